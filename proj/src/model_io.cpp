#include "mlca/model_io.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <variant>

#include "json.hpp"

namespace mlca {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw DataError("model json: " + where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing '") + key + "'");
  return *it;
}

double as_double(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

std::int64_t as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<std::int64_t>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

Vector as_vector(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = as_double(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

json vec_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json counts_json(const CountVector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json matrix_json(const CountMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json sigma_json(const NodeBandwidth& nb) {
  json j;
  if (const auto* s = std::get_if<ScalarNodeBandwidth>(&nb)) {
    j["scalar"] = s->value;
  } else if (const auto* a = std::get_if<AttributeNodeBandwidth>(&nb)) {
    j["per_attribute"] = vec_json(a->values);
  } else {
    const auto& g = std::get<GroupNodeBandwidth>(nb);
    j["attribute_std"] = vec_json(g.attribute_std);
    j["group_sigmas"] = json(g.per_group);
  }
  return j;
}

void check_positive(const Vector& v, const std::string& where) {
  if (!v.allFinite() || !(v.array() > 0.0).all()) bad(where, "entries must be positive");
}

NodeBandwidth sigma_from_json(const json& j, Variant variant, Eigen::Index dim,
                              const AttributeGrouping* grouping, const std::string& where) {
  switch (variant) {
    case Variant::kBase: {
      const double s = as_double(field(j, "scalar", where), where + ".scalar");
      if (!(s > 0.0) || !std::isfinite(s)) bad(where + ".scalar", "must be positive");
      return ScalarNodeBandwidth{s};
    }
    case Variant::kIndividual: {
      Vector v = as_vector(field(j, "per_attribute", where), where + ".per_attribute");
      if (v.size() != dim) bad(where + ".per_attribute", "wrong length");
      check_positive(v, where + ".per_attribute");
      return AttributeNodeBandwidth{std::move(v)};
    }
    case Variant::kClustered: {
      Vector stds = as_vector(field(j, "attribute_std", where), where + ".attribute_std");
      if (stds.size() != dim) bad(where + ".attribute_std", "wrong length");
      if (!stds.allFinite() || !(stds.array() >= 0.0).all()) {
        bad(where + ".attribute_std", "entries must be non-negative");
      }
      Vector groups = as_vector(field(j, "group_sigmas", where), where + ".group_sigmas");
      if (grouping == nullptr || groups.size() != grouping->groups()) {
        bad(where + ".group_sigmas", "one bandwidth per attribute group required");
      }
      check_positive(groups, where + ".group_sigmas");
      std::vector<double> raw(groups.data(), groups.data() + groups.size());
      return GroupNodeBandwidth{std::move(stds), std::move(raw)};
    }
  }
  bad(where, "bad variant");
}

CountMatrix as_count_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                            const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    bad(where, "expected " + std::to_string(rows) + " rows");
  }
  CountMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      bad(rw, "expected " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = as_int(row[static_cast<std::size_t>(c)], rw);
      if (m(r, c) < 0) bad(rw, "counts must be non-negative");
    }
  }
  return m;
}

}  // namespace

// Serialization needs the raw members; everything else goes through the
// public interface.
struct ModelIoAccess {
  static json save(const MlcaModel& m) {
    json j;
    j["format_version"] = 1;
    j["variant"] = to_string(m.variant_);
    j["params"] = {{"v_threshold", m.params_.v_threshold},
                   {"lambda", m.params_.lambda},
                   {"n_y", m.params_.n_y}};
    j["dim"] = static_cast<std::int64_t>(m.dim_);
    j["label_names"] = m.label_names_;
    j["n_seen"] = m.counters_.n_seen;

    json win = json::array();
    for (const Vector& w : m.window_) win.push_back(vec_json(w));
    j["window"] = std::move(win);

    j["pending"] = m.pending_ ? sigma_json(*m.pending_) : json(nullptr);

    if (m.grouping_) {
      json g = json::array();
      for (Eigen::Index i = 0; i < m.grouping_->dimension(); ++i) {
        g.push_back(m.grouping_->group_of(i));
      }
      j["grouping"] = std::move(g);
    }

    json nodes = json::array();
    for (const auto& n : m.store_.nodes()) {
      json nj;
      nj["weight"] = vec_json(n.weight);
      nj["alpha"] = n.alpha;
      nj["beta"] = counts_json(n.beta);
      nj["sigma"] = sigma_json(n.sigma);
      nodes.push_back(std::move(nj));
    }
    j["nodes"] = std::move(nodes);

    j["counters"] = {{"c_pos", matrix_json(m.counters_.c_pos)},
                     {"c_neg", matrix_json(m.counters_.c_neg)},
                     {"n_events", m.counters_.n_events}};
    return j;
  }

  static MlcaModel load(const json& j) {
    if (as_int(field(j, "format_version", "root"), "format_version") != 1) {
      bad("format_version", "only version 1 is supported");
    }

    Variant variant = Variant::kBase;
    Params params;
    try {
      variant = parse_variant(as_string(field(j, "variant", "root"), "variant"));
      const json& pj = field(j, "params", "root");
      params.v_threshold = as_double(field(pj, "v_threshold", "params"), "params.v_threshold");
      params.lambda = static_cast<int>(as_int(field(pj, "lambda", "params"), "params.lambda"));
      params.n_y = static_cast<int>(as_int(field(pj, "n_y", "params"), "params.n_y"));
      params.validate();
    } catch (const ConfigError& e) {
      bad("params", e.what());
    }

    MlcaModel m(variant, params);

    const std::int64_t dim = as_int(field(j, "dim", "root"), "dim");
    if (dim != -1 && dim < 1) bad("dim", "must be -1 or a positive count");
    m.dim_ = static_cast<Eigen::Index>(dim);

    const json& names = field(j, "label_names", "root");
    if (!names.is_array()) bad("label_names", "expected an array");
    for (std::size_t i = 0; i < names.size(); ++i) {
      m.label_names_.push_back(as_string(names[i], "label_names[" + std::to_string(i) + "]"));
    }
    const Eigen::Index n_labels = m.label_count();

    m.counters_.grow_labels(n_labels);
    const json& cj = field(j, "counters", "root");
    m.counters_.c_pos =
        as_count_matrix(field(cj, "c_pos", "counters"), n_labels, params.n_y + 1, "counters.c_pos");
    m.counters_.c_neg =
        as_count_matrix(field(cj, "c_neg", "counters"), n_labels, params.n_y + 1, "counters.c_neg");
    m.counters_.n_seen = as_int(field(j, "n_seen", "root"), "n_seen");
    if (m.counters_.n_seen < 0) bad("n_seen", "must be non-negative");
    m.counters_.n_events = as_int(field(cj, "n_events", "counters"), "counters.n_events");
    if (m.counters_.n_events < 0 || m.counters_.n_events > m.counters_.n_seen) {
      bad("counters.n_events", "must lie in [0, n_seen]");
    }
    // Every label row has banked exactly one event per counting step, whether
    // it observed the event or inherited it through the vocabulary-growth
    // backfill.
    for (Eigen::Index i = 0; i < n_labels; ++i) {
      if (m.counters_.c_pos.row(i).sum() + m.counters_.c_neg.row(i).sum() !=
          m.counters_.n_events) {
        bad("counters", "row " + std::to_string(i) + " does not sum to n_events");
      }
    }

    const json& win = field(j, "window", "root");
    if (!win.is_array()) bad("window", "expected an array");
    for (std::size_t i = 0; i < win.size(); ++i) {
      const std::string where = "window[" + std::to_string(i) + "]";
      Vector w = as_vector(win[i], where);
      if (w.size() != m.dim_) bad(where, "wrong length");
      if (!w.allFinite()) bad(where, "entries must be finite");
      m.window_.push_back(std::move(w));
    }
    const auto expect_window = static_cast<std::size_t>(
        std::min<std::int64_t>(m.counters_.n_seen, params.lambda));
    if (m.window_.size() != expect_window) {
      bad("window", "expected min(n_seen, lambda) = " + std::to_string(expect_window) + " entries");
    }

    if (variant == Variant::kClustered && m.dim_ >= 1) {
      const json& gj = field(j, "grouping", "root");
      if (!gj.is_array() || static_cast<Eigen::Index>(gj.size()) != m.dim_) {
        bad("grouping", "expected one group id per attribute");
      }
      std::vector<int> group_of;
      for (std::size_t i = 0; i < gj.size(); ++i) {
        group_of.push_back(
            static_cast<int>(as_int(gj[i], "grouping[" + std::to_string(i) + "]")));
      }
      try {
        m.grouping_ = AttributeGrouping(std::move(group_of));
      } catch (const ContractViolation& e) {
        bad("grouping", e.what());
      }
    }
    const AttributeGrouping* grouping = m.grouping_ ? &*m.grouping_ : nullptr;

    const json& pending = field(j, "pending", "root");
    if (!pending.is_null()) {
      m.pending_ = sigma_from_json(pending, variant, m.dim_, grouping, "pending");
    }

    const json& nodes = field(j, "nodes", "root");
    if (!nodes.is_array()) bad("nodes", "expected an array");
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const std::string where = "nodes[" + std::to_string(k) + "]";
      const json& nj = nodes[k];
      PrototypeNode node;
      node.weight = as_vector(field(nj, "weight", where), where + ".weight");
      if (node.weight.size() != m.dim_) bad(where + ".weight", "wrong length");
      if (!node.weight.allFinite()) bad(where + ".weight", "entries must be finite");
      node.alpha = as_int(field(nj, "alpha", where), where + ".alpha");
      if (node.alpha < 1) bad(where + ".alpha", "must be at least 1");
      const json& bj = field(nj, "beta", where);
      if (!bj.is_array() || static_cast<Eigen::Index>(bj.size()) != n_labels) {
        bad(where + ".beta", "expected one count per label");
      }
      node.beta.resize(n_labels);
      for (Eigen::Index i = 0; i < n_labels; ++i) {
        node.beta[i] = as_int(bj[static_cast<std::size_t>(i)], where + ".beta");
        if (node.beta[i] < 0 || node.beta[i] > node.alpha) {
          bad(where + ".beta", "counts must lie in [0, alpha]");
        }
      }
      node.sigma = sigma_from_json(field(nj, "sigma", where), variant, m.dim_, grouping,
                                   where + ".sigma");
      m.store_.add(std::move(node));
    }

    return m;
  }
};

std::string model_to_json(const MlcaModel& model) {
  return ModelIoAccess::save(model).dump(2) + "\n";
}

MlcaModel model_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("model json: not valid JSON");
  return ModelIoAccess::load(j);
}

void save_model(const MlcaModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << model_to_json(model);
  if (!out) throw DataError("failed writing '" + path + "'");
}

MlcaModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace mlca
