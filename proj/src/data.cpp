#include "mlca/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mlca {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail_at(const std::string& path, std::size_t line, const std::string& what) {
  throw DataError(path + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& token, const std::string& path, std::size_t line) {
  const std::string t = trim(token);
  if (t.empty()) fail_at(path, line, "empty value");
  if (t == "?") fail_at(path, line, "missing values ('?') are not supported");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v)) {
    fail_at(path, line, "non-numeric token '" + t + "'");
  }
  return v;
}

int parse_label_bit(const std::string& token, const std::string& path, std::size_t line) {
  const double v = parse_double(token, path, line);
  if (v != 0.0 && v != 1.0) fail_at(path, line, "label value must be 0 or 1");
  return static_cast<int>(v);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Attribute name, optionally quoted with ' or ". Returns (name, rest).
std::pair<std::string, std::string> take_attr_name(const std::string& decl,
                                                   const std::string& path, std::size_t line) {
  const std::string s = trim(decl);
  if (s.empty()) fail_at(path, line, "@attribute missing name");
  if (s[0] == '\'' || s[0] == '"') {
    const char quote = s[0];
    const std::size_t close = s.find(quote, 1);
    if (close == std::string::npos) fail_at(path, line, "unterminated attribute name quote");
    return {s.substr(1, close - 1), trim(s.substr(close + 1))};
  }
  std::size_t sp = 0;
  while (sp < s.size() && !std::isspace(static_cast<unsigned char>(s[sp]))) ++sp;
  return {s.substr(0, sp), trim(s.substr(sp))};
}

bool is_numeric_type(const std::string& t) {
  const std::string x = lower(t);
  return x == "numeric" || x == "real" || x == "integer";
}

bool is_binary_nominal(const std::string& t) {
  const std::string x = trim(t);
  if (x.size() < 2 || x.front() != '{' || x.back() != '}') return false;
  std::vector<std::string> vals = split(x.substr(1, x.size() - 2), ',');
  if (vals.size() != 2) return false;
  for (std::string& v : vals) v = trim(v);
  std::sort(vals.begin(), vals.end());
  return vals[0] == "0" && vals[1] == "1";
}

std::vector<std::string> read_spec_names(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    names.push_back(t);
  }
  if (names.empty()) throw DataError("label spec '" + path + "' names no labels");
  return names;
}

struct Square {
  double x0, x1, y0, y1;
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

constexpr Square kSquares[3] = {{0.0, 2.0, 0.0, 2.0}, {1.0, 3.0, 0.0, 2.0}, {0.5, 2.5, 1.0, 3.0}};

Vector draw_in_square(Rng& rng, const Square& s) {
  Vector p(2);
  p[0] = uniform_in(rng, s.x0, s.x1);
  p[1] = uniform_in(rng, s.y0, s.y1);
  return p;
}

Dataset make_block(std::vector<LabeledInstance> instances, Eigen::Index vocab,
                   const std::string& provenance) {
  Dataset ds;
  ds.instances = std::move(instances);
  ds.attr_names = {"x", "y"};
  static const char* kNames[3] = {"s1", "s2", "s3"};
  for (Eigen::Index i = 0; i < vocab; ++i) ds.label_names.emplace_back(kNames[i]);
  ds.provenance = provenance;
  for (LabeledInstance& inst : ds.instances) {
    if (inst.labels.size() > vocab) inst.labels.conservativeResize(vocab);
  }
  return ds;
}

}  // namespace

Dataset load_arff_multilabel(const std::string& arff_path, const std::string& label_spec_path) {
  std::ifstream in = open_input(arff_path);
  std::vector<std::string> attr_names;
  std::vector<bool> attr_nominal;
  bool in_data = false;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    if (!in_data) {
      const std::string head = lower(t.substr(0, t.find_first_of(" \t")));
      if (head == "@relation") continue;
      if (head == "@attribute") {
        auto [name, type] = take_attr_name(t.substr(10), arff_path, line_no);
        if (name.empty()) fail_at(arff_path, line_no, "@attribute missing name");
        if (is_numeric_type(type)) {
          attr_nominal.push_back(false);
        } else if (is_binary_nominal(type)) {
          attr_nominal.push_back(true);
        } else {
          fail_at(arff_path, line_no, "unsupported attribute type '" + type + "'");
        }
        attr_names.push_back(name);
        continue;
      }
      if (head == "@data") {
        if (attr_names.empty()) fail_at(arff_path, line_no, "@data before any @attribute");
        in_data = true;
        continue;
      }
      fail_at(arff_path, line_no, "unrecognized header line");
    }

    // data row
    std::vector<double> row(attr_names.size(), 0.0);
    if (t[0] == '{') {
      if (t.back() != '}') fail_at(arff_path, line_no, "unterminated sparse row");
      const std::string body = trim(t.substr(1, t.size() - 2));
      std::vector<bool> seen(attr_names.size(), false);
      if (!body.empty()) {
        for (const std::string& entry : split(body, ',')) {
          std::istringstream es(trim(entry));
          long idx = -1;
          std::string value;
          es >> idx >> value;
          if (es.fail() || idx < 0 || idx >= static_cast<long>(attr_names.size())) {
            fail_at(arff_path, line_no, "bad sparse entry '" + trim(entry) + "'");
          }
          if (seen[static_cast<std::size_t>(idx)]) {
            fail_at(arff_path, line_no, "duplicate sparse index " + std::to_string(idx));
          }
          seen[static_cast<std::size_t>(idx)] = true;
          row[static_cast<std::size_t>(idx)] = parse_double(value, arff_path, line_no);
        }
      }
    } else {
      const std::vector<std::string> cells = split(t, ',');
      if (cells.size() != attr_names.size()) {
        fail_at(arff_path, line_no,
                "expected " + std::to_string(attr_names.size()) + " values, got " +
                    std::to_string(cells.size()));
      }
      for (std::size_t i = 0; i < cells.size(); ++i) {
        row[i] = parse_double(cells[i], arff_path, line_no);
      }
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (attr_nominal[i] && row[i] != 0.0 && row[i] != 1.0) {
        fail_at(arff_path, line_no, "nominal attribute '" + attr_names[i] + "' must be 0 or 1");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!in_data) throw DataError(arff_path + ": no @data section");

  const std::vector<std::string> label_names = read_spec_names(label_spec_path);
  std::vector<std::size_t> label_cols;
  std::vector<bool> is_label(attr_names.size(), false);
  for (const std::string& name : label_names) {
    const auto it = std::find(attr_names.begin(), attr_names.end(), name);
    if (it == attr_names.end()) {
      throw DataError("label '" + name + "' from '" + label_spec_path + "' not in '" + arff_path +
                      "'");
    }
    const auto col = static_cast<std::size_t>(it - attr_names.begin());
    if (is_label[col]) throw DataError("label '" + name + "' listed twice");
    is_label[col] = true;
    label_cols.push_back(col);
  }

  Dataset ds;
  ds.label_names = label_names;
  for (std::size_t i = 0; i < attr_names.size(); ++i) {
    if (!is_label[i]) ds.attr_names.push_back(attr_names[i]);
  }
  if (ds.attr_names.empty()) throw DataError(arff_path + ": every attribute is a label");
  ds.provenance = "arff:" + arff_path;

  for (const std::vector<double>& row : rows) {
    LabeledInstance inst;
    inst.features.resize(static_cast<Eigen::Index>(ds.attr_names.size()));
    inst.labels.resize(static_cast<Eigen::Index>(label_cols.size()));
    Eigen::Index f = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!is_label[i]) inst.features[f++] = row[i];
    }
    for (std::size_t i = 0; i < label_cols.size(); ++i) {
      const double v = row[label_cols[i]];
      if (v != 0.0 && v != 1.0) {
        throw DataError(arff_path + ": label '" + label_names[i] + "' has non-binary value");
      }
      inst.labels[static_cast<Eigen::Index>(i)] = static_cast<int>(v);
    }
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

namespace {

struct CsvTable {
  std::vector<std::string> header;  // empty if none
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in = open_input(path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, ',');
    for (std::string& c : cells) c = trim(c);
    if (first) {
      first = false;
      const bool header = std::any_of(cells.begin(), cells.end(), [](const std::string& c) {
        char* end = nullptr;
        std::strtod(c.c_str(), &end);
        return c.empty() || end != c.c_str() + c.size();
      });
      if (header) {
        table.header = cells;
        continue;
      }
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.rows.empty()) throw DataError(path + ": no data rows");
  return table;
}

}  // namespace

Dataset load_csv(const std::string& features_path, const std::string& labels_path) {
  const CsvTable feat = read_csv_table(features_path);
  const CsvTable lab = read_csv_table(labels_path);
  if (feat.rows.size() != lab.rows.size()) {
    throw DataError("row count mismatch: '" + features_path + "' has " +
                    std::to_string(feat.rows.size()) + ", '" + labels_path + "' has " +
                    std::to_string(lab.rows.size()));
  }

  const std::size_t d = feat.rows.front().size();
  const std::size_t n_labels = lab.rows.front().size();
  Dataset ds;
  ds.provenance = "csv:" + features_path;
  if (!feat.header.empty()) {
    ds.attr_names = feat.header;
  } else {
    for (std::size_t i = 0; i < d; ++i) ds.attr_names.push_back("attr_" + std::to_string(i));
  }
  if (!lab.header.empty()) {
    ds.label_names = lab.header;
  } else {
    for (std::size_t i = 0; i < n_labels; ++i) ds.label_names.push_back("label_" + std::to_string(i));
  }
  if (ds.attr_names.size() != d || ds.label_names.size() != n_labels) {
    throw DataError("csv header arity mismatch");
  }

  for (std::size_t r = 0; r < feat.rows.size(); ++r) {
    if (feat.rows[r].size() != d) {
      fail_at(features_path, r + 1, "inconsistent column count");
    }
    if (lab.rows[r].size() != n_labels) {
      fail_at(labels_path, r + 1, "inconsistent column count");
    }
    LabeledInstance inst;
    inst.features.resize(static_cast<Eigen::Index>(d));
    inst.labels.resize(static_cast<Eigen::Index>(n_labels));
    for (std::size_t i = 0; i < d; ++i) {
      inst.features[static_cast<Eigen::Index>(i)] = parse_double(feat.rows[r][i], features_path, r + 1);
    }
    for (std::size_t i = 0; i < n_labels; ++i) {
      inst.labels[static_cast<Eigen::Index>(i)] = parse_label_bit(lab.rows[r][i], labels_path, r + 1);
    }
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

std::vector<Vector> load_features_csv(const std::string& path) {
  const CsvTable feat = read_csv_table(path);
  const std::size_t d = feat.rows.front().size();
  std::vector<Vector> out;
  out.reserve(feat.rows.size());
  for (std::size_t r = 0; r < feat.rows.size(); ++r) {
    if (feat.rows[r].size() != d) fail_at(path, r + 1, "inconsistent column count");
    Vector v(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      v[static_cast<Eigen::Index>(i)] = parse_double(feat.rows[r][i], path, r + 1);
    }
    out.push_back(std::move(v));
  }
  return out;
}

void write_arff(const Dataset& ds, const std::string& arff_path) {
  std::ofstream out = open_output(arff_path);
  out << "@relation mlca\n";
  for (const std::string& name : ds.attr_names) out << "@attribute " << name << " numeric\n";
  for (const std::string& name : ds.label_names) out << "@attribute " << name << " {0,1}\n";
  out << "@data\n";
  for (const LabeledInstance& inst : ds.instances) {
    for (Eigen::Index i = 0; i < inst.features.size(); ++i) {
      if (i > 0) out << ',';
      out << format_full(inst.features[i]);
    }
    for (Eigen::Index i = 0; i < inst.labels.size(); ++i) out << ',' << inst.labels[i];
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + arff_path + "'");
}

void write_label_spec(const Dataset& ds, const std::string& spec_path) {
  std::ofstream out = open_output(spec_path);
  for (const std::string& name : ds.label_names) out << name << '\n';
  if (!out) throw DataError("write failed for '" + spec_path + "'");
}

void write_csv(const Dataset& ds, const std::string& features_path,
               const std::string& labels_path) {
  {
    std::ofstream out = open_output(features_path);
    for (std::size_t i = 0; i < ds.attr_names.size(); ++i) {
      out << (i ? "," : "") << ds.attr_names[i];
    }
    out << '\n';
    for (const LabeledInstance& inst : ds.instances) {
      for (Eigen::Index i = 0; i < inst.features.size(); ++i) {
        if (i > 0) out << ',';
        out << format_full(inst.features[i]);
      }
      out << '\n';
    }
    if (!out) throw DataError("write failed for '" + features_path + "'");
  }
  std::ofstream out = open_output(labels_path);
  for (std::size_t i = 0; i < ds.label_names.size(); ++i) {
    out << (i ? "," : "") << ds.label_names[i];
  }
  out << '\n';
  for (const LabeledInstance& inst : ds.instances) {
    for (Eigen::Index i = 0; i < inst.labels.size(); ++i) {
      if (i > 0) out << ',';
      out << inst.labels[i];
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + labels_path + "'");
}

Scenario parse_scenario(const std::string& name) {
  if (name == "stationary") return Scenario::kStationary;
  if (name == "seq3") return Scenario::kSeq3;
  if (name == "seq7") return Scenario::kSeq7;
  throw ConfigError("unknown scenario '" + name + "'");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kStationary: return "stationary";
    case Scenario::kSeq3: return "seq3";
    case Scenario::kSeq7: return "seq7";
  }
  throw ContractViolation("unreachable scenario");
}

LabelVector square_membership(double x, double y) {
  LabelVector m(3);
  for (int s = 0; s < 3; ++s) m[s] = kSquares[s].contains(x, y) ? 1 : 0;
  return m;
}

int region_of(double x, double y) {
  const LabelVector m = square_membership(x, y);
  // region order A,B,C,D,E,F,G per the label-transition schedule
  static const int kRegionBits[7][3] = {{1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 1},
                                        {1, 1, 1}, {0, 1, 1}, {0, 0, 1}};
  for (int r = 0; r < 7; ++r) {
    if (m[0] == kRegionBits[r][0] && m[1] == kRegionBits[r][1] && m[2] == kRegionBits[r][2]) {
      return r;
    }
  }
  return -1;
}

StreamScenario generate_synthetic(Scenario scenario, std::size_t n_per_dist, std::uint64_t seed) {
  require(n_per_dist >= 1, "generate_synthetic: n_per_dist must be positive");
  std::vector<LabeledInstance> draws[3];
  for (int s = 0; s < 3; ++s) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(s));
    draws[s].reserve(n_per_dist);
    for (std::size_t i = 0; i < n_per_dist; ++i) {
      LabeledInstance inst;
      inst.features = draw_in_square(rng, kSquares[s]);
      inst.labels = square_membership(inst.features[0], inst.features[1]);
      draws[s].push_back(std::move(inst));
    }
  }

  StreamScenario out;
  out.kind = scenario;
  out.seed = seed;
  const std::string tag = "synthetic:" + to_string(scenario) + ":seed=" + std::to_string(seed);

  switch (scenario) {
    case Scenario::kStationary: {
      std::vector<LabeledInstance> all;
      for (auto& block : draws) {
        for (LabeledInstance& inst : block) all.push_back(std::move(inst));
      }
      Rng rng = make_rng(seed, 100);
      const std::vector<std::size_t> order = shuffled_indices(all.size(), rng);
      std::vector<LabeledInstance> shuffled;
      shuffled.reserve(all.size());
      for (std::size_t i : order) shuffled.push_back(std::move(all[i]));
      out.phases.push_back({make_block(std::move(shuffled), 3, tag), 3});
      break;
    }
    case Scenario::kSeq3: {
      for (int p = 0; p < 3; ++p) {
        const Eigen::Index vocab = p + 1;
        out.phases.push_back({make_block(std::move(draws[p]), vocab, tag), vocab});
      }
      break;
    }
    case Scenario::kSeq7: {
      static const Eigen::Index kVocab[7] = {1, 2, 2, 3, 3, 3, 3};
      std::vector<LabeledInstance> regions[7];
      for (auto& block : draws) {
        for (LabeledInstance& inst : block) {
          const int r = region_of(inst.features[0], inst.features[1]);
          require(r >= 0, "generate_synthetic: draw outside all squares");
          regions[r].push_back(std::move(inst));
        }
      }
      for (int r = 0; r < 7; ++r) {
        out.phases.push_back({make_block(std::move(regions[r]), kVocab[r], tag), kVocab[r]});
      }
      break;
    }
  }
  return out;
}

Dataset synthetic_test_block(Scenario scenario, std::size_t phase, std::size_t n,
                             std::uint64_t seed) {
  require(n >= 1, "synthetic_test_block: n must be positive");
  Rng rng = make_rng(seed, 500 + phase);
  std::vector<LabeledInstance> points;
  points.reserve(n);
  switch (scenario) {
    case Scenario::kStationary:
      require(phase == 0, "synthetic_test_block: stationary has one phase");
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = uniform_index(rng, 3);
        LabeledInstance inst;
        inst.features = draw_in_square(rng, kSquares[s]);
        inst.labels = square_membership(inst.features[0], inst.features[1]);
        points.push_back(std::move(inst));
      }
      break;
    case Scenario::kSeq3:
      require(phase < 3, "synthetic_test_block: seq3 has three phases");
      for (std::size_t i = 0; i < n; ++i) {
        LabeledInstance inst;
        inst.features = draw_in_square(rng, kSquares[phase]);
        inst.labels = square_membership(inst.features[0], inst.features[1]);
        points.push_back(std::move(inst));
      }
      break;
    case Scenario::kSeq7: {
      require(phase < 7, "synthetic_test_block: seq7 has seven phases");
      const Square box{0.0, 3.0, 0.0, 3.0};
      for (std::size_t i = 0; i < n; ++i) {
        LabeledInstance inst;
        do {
          inst.features = draw_in_square(rng, box);
        } while (region_of(inst.features[0], inst.features[1]) != static_cast<int>(phase));
        inst.labels = square_membership(inst.features[0], inst.features[1]);
        points.push_back(std::move(inst));
      }
      break;
    }
  }
  return make_block(std::move(points), 3,
                    "synthetic-test:" + to_string(scenario) + ":phase=" + std::to_string(phase));
}

void truncate_labels(Dataset& ds, Eigen::Index k) {
  require(k >= 0, "truncate_labels: negative size");
  if (static_cast<std::size_t>(k) < ds.label_names.size()) {
    ds.label_names.resize(static_cast<std::size_t>(k));
  }
  for (LabeledInstance& inst : ds.instances) {
    if (inst.labels.size() > k) inst.labels.conservativeResize(k);
  }
}

std::vector<std::vector<std::size_t>> split_cv(std::size_t n, int folds, int repeats,
                                               std::uint64_t seed) {
  if (folds < 2) throw ConfigError("split_cv: folds must be >= 2");
  if (repeats < 1) throw ConfigError("split_cv: repeats must be >= 1");
  if (n < static_cast<std::size_t>(folds)) throw DataError("split_cv: fewer instances than folds");

  std::vector<std::vector<std::size_t>> out;
  out.reserve(static_cast<std::size_t>(folds) * static_cast<std::size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    Rng rng = make_rng(seed, 200 + static_cast<std::uint64_t>(r));
    const std::vector<std::size_t> perm = shuffled_indices(n, rng);
    const std::size_t base = n / static_cast<std::size_t>(folds);
    const std::size_t extra = n % static_cast<std::size_t>(folds);
    std::size_t cursor = 0;
    for (int f = 0; f < folds; ++f) {
      const std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
      std::vector<std::size_t> fold(perm.begin() + static_cast<std::ptrdiff_t>(cursor),
                                    perm.begin() + static_cast<std::ptrdiff_t>(cursor + len));
      std::sort(fold.begin(), fold.end());
      out.push_back(std::move(fold));
      cursor += len;
    }
  }
  return out;
}

}  // namespace mlca
