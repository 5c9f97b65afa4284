#include "mlca/learner.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace mlca {
namespace {

Params validated(Params p) {
  p.validate();
  return p;
}

}  // namespace

Variant parse_variant(const std::string& text) {
  if (text == "mlca") return Variant::kBase;
  if (text == "mlca-i") return Variant::kIndividual;
  if (text == "mlca-c") return Variant::kClustered;
  throw ConfigError("unknown variant '" + text + "' (expected mlca, mlca-i, or mlca-c)");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kBase:
      return "mlca";
    case Variant::kIndividual:
      return "mlca-i";
    case Variant::kClustered:
      return "mlca-c";
  }
  throw ContractViolation("to_string: bad variant value");
}

void Params::validate() const {
  if (!(v_threshold > 0.0 && v_threshold < 1.0)) {
    throw ConfigError("v-threshold must lie strictly between 0 and 1");
  }
  if (lambda < 2) throw ConfigError("lambda must be at least 2");
  if (n_y < 1) throw ConfigError("ny must be at least 1");
}

Prediction ModelSnapshot::predict(Eigen::Ref<const Vector> x) const { return model_->predict(x); }

MlcaModel::MlcaModel(Variant variant, Params params)
    : variant_(variant), params_(validated(params)), counters_(params.n_y) {}

void MlcaModel::ensure_dimension(Eigen::Ref<const Vector> x) {
  if (x.size() < 1) throw DataError("instance has no features");
  if (!x.allFinite()) throw DataError("instance has non-finite feature values");
  if (dim_ < 0) {
    dim_ = x.size();
    if (variant_ == Variant::kClustered) grouping_ = AttributeGrouping::trivial(dim_);
  } else if (x.size() != dim_) {
    throw DataError("instance has " + std::to_string(x.size()) + " features, model expects " +
                    std::to_string(dim_));
  }
}

LabelVector MlcaModel::normalized_label(Eigen::Ref<const LabelVector> label) {
  if (label.size() < 1) throw DataError("instance carries no label entries");
  for (Eigen::Index i = 0; i < label.size(); ++i) {
    if (label[i] != 0 && label[i] != 1) throw DataError("label entries must be 0 or 1");
  }
  while (static_cast<Eigen::Index>(label_names_.size()) < label.size()) {
    label_names_.push_back("label_" + std::to_string(label_names_.size()));
  }
  const Eigen::Index n = label_count();
  store_.pad_labels(n);
  counters_.grow_labels(n);
  LabelVector lab = LabelVector::Zero(n);
  lab.head(label.size()) = label;
  return lab;
}

void MlcaModel::refresh_bandwidth() {
  require(window_.size() == static_cast<std::size_t>(params_.lambda),
          "refresh_bandwidth: window must hold exactly lambda instances");
  const bool first = !pending_.has_value();
  const Vector stds = attribute_std(window_);
  const auto count = static_cast<std::size_t>(params_.lambda);

  switch (variant_) {
    case Variant::kBase: {
      const Vector bv = bandwidth_from_std(stds, count, dim_);
      pending_ = ScalarNodeBandwidth{scalar_bandwidth(BandwidthVector(bv)).value()};
      break;
    }
    case Variant::kIndividual: {
      pending_ = AttributeNodeBandwidth{bandwidth_from_std(stds, count, dim_)};
      break;
    }
    case Variant::kClustered: {
      grouping_ = regroup_attributes(window_, params_);
      std::vector<double> groups;
      for (const Bandwidth& b : group_bandwidth_from_std(stds, count, *grouping_)) {
        groups.push_back(b.value());
      }
      pending_ = GroupNodeBandwidth{stds, std::move(groups)};
      // Existing nodes keep their own std snapshot but follow the new grouping.
      for (std::size_t k = 0; k < store_.size() && !first; ++k) {
        auto& gb = std::get<GroupNodeBandwidth>(store_.mutable_node(k).sigma);
        std::vector<double> ng;
        for (const Bandwidth& b : group_bandwidth_from_std(gb.attribute_std, count, *grouping_)) {
          ng.push_back(b.value());
        }
        gb.per_group = std::move(ng);
      }
      break;
    }
  }

  // Nodes created before any full window carry placeholder bandwidths; the
  // first real estimate replaces them all.
  if (first) {
    for (std::size_t k = 0; k < store_.size(); ++k) store_.mutable_node(k).sigma = *pending_;
  }
}

NodeBandwidth MlcaModel::provisional_bandwidth() const {
  Vector stds;
  if (window_.size() >= 2) {
    stds = attribute_std(window_);
  } else {
    stds = Vector::Zero(dim_);
  }
  const std::size_t count = std::max<std::size_t>(window_.size(), 1);
  switch (variant_) {
    case Variant::kBase: {
      const Vector bv = bandwidth_from_std(stds, count, dim_);
      return ScalarNodeBandwidth{scalar_bandwidth(BandwidthVector(bv)).value()};
    }
    case Variant::kIndividual:
      return AttributeNodeBandwidth{bandwidth_from_std(stds, count, dim_)};
    case Variant::kClustered: {
      std::vector<double> groups;
      for (const Bandwidth& b : group_bandwidth_from_std(stds, count, *grouping_)) {
        groups.push_back(b.value());
      }
      return GroupNodeBandwidth{std::move(stds), std::move(groups)};
    }
  }
  throw ContractViolation("provisional_bandwidth: bad variant value");
}

double MlcaModel::mean_scalar_sigma() const {
  require(!store_.empty(), "mean_scalar_sigma: no nodes");
  double acc = 0.0;
  for (const auto& node : store_.nodes()) {
    acc += std::get<ScalarNodeBandwidth>(node.sigma).value;
  }
  return acc / static_cast<double>(store_.size());
}

std::vector<double> MlcaModel::similarities_to(Eigen::Ref<const Vector> x) const {
  std::vector<double> sims(store_.size());
  switch (variant_) {
    case Variant::kBase: {
      const Bandwidth sigma(mean_scalar_sigma());
      for (std::size_t k = 0; k < sims.size(); ++k) {
        sims[k] = cim(x, store_.node(k).weight, sigma);
      }
      break;
    }
    case Variant::kIndividual:
      for (std::size_t k = 0; k < sims.size(); ++k) {
        sims[k] = cim_individual(x, store_.node(k).weight,
                                 std::get<AttributeNodeBandwidth>(store_.node(k).sigma).values);
      }
      break;
    case Variant::kClustered:
      for (std::size_t k = 0; k < sims.size(); ++k) {
        sims[k] = cim_clustered(x, store_.node(k).weight, *grouping_,
                                std::get<GroupNodeBandwidth>(store_.node(k).sigma).per_group);
      }
      break;
  }
  return sims;
}

std::vector<double> MlcaModel::similarities_from_node(std::size_t k) const {
  return similarities_to(store_.node(k).weight);
}

TrainStepEvent MlcaModel::train_step(Eigen::Ref<const Vector> x,
                                     Eigen::Ref<const LabelVector> label) {
  ensure_dimension(x);
  const LabelVector lab = normalized_label(label);

  // The estimate lives on a fixed cadence of consumed instances, so a model
  // reloaded mid-stream refreshes at the same steps as one trained in place.
  if (counters_.n_seen >= params_.lambda && counters_.n_seen % params_.lambda == 0) {
    refresh_bandwidth();
  }

  window_.emplace_back(x);
  if (window_.size() > static_cast<std::size_t>(params_.lambda)) window_.erase(window_.begin());

  TrainStepEvent ev;
  ev.label = lab;

  if (!pending_.has_value() || store_.size() < 2) {
    // Not enough history for a trustworthy estimate or a two-winner test:
    // absorb the instance as its own node and keep only the label tallies.
    ev.node = store_.add(create_node(x, provisional_bandwidth(), lab));
    counters_.n_seen += 1;
    ev.kind = TrainStepEvent::Kind::kBootstrap;
    ev.counters_updated = false;
  } else {
    const std::vector<double> sims = similarities_to(x);
    const WinnerPair w = select_winners(sims);
    const VigilanceCase vc = vigilance_test(w.v1, w.v2, params_.v_threshold);

    std::size_t eff = w.k1;
    if (vc == VigilanceCase::kCaseI) {
      eff = store_.add(create_node(x, *pending_, lab));
      ev.kind = TrainStepEvent::Kind::kCaseI;
    } else {
      record_counts(store_.mutable_node(w.k1), lab);
      update_winner(store_.mutable_node(w.k1), x);
      ev.kind = vc == VigilanceCase::kCaseII ? TrainStepEvent::Kind::kCaseII
                                             : TrainStepEvent::Kind::kCaseIII;
    }

    // One neighbor lookup per step: it feeds both the topology update and the
    // label-event tallies below.
    const std::vector<double> node_sims = similarities_from_node(eff);
    const std::size_t want =
        std::min<std::size_t>(static_cast<std::size_t>(params_.n_y), store_.size() - 1);
    const std::vector<std::size_t> neighbors = nearest_nodes(node_sims, eff, want);
    if (vc == VigilanceCase::kCaseIII) update_neighbors(store_, eff, neighbors, params_.n_y);

    std::vector<std::size_t> hood;
    hood.reserve(neighbors.size() + 1);
    hood.push_back(eff);
    hood.insert(hood.end(), neighbors.begin(), neighbors.end());
    ev.g = counting_vector(store_, hood, params_.n_y, label_count());
    update_event_counters(counters_, ev.g, lab);

    ev.node = eff;
    ev.counters_updated = true;
  }

  ev.step = counters_.n_seen;
  if (observer_) observer_(ev);
  return ev;
}

void MlcaModel::train_epochs(const std::vector<LabeledInstance>& data, int epochs,
                             std::uint64_t seed) {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  for (int e = 0; e < epochs; ++e) {
    if (e == 0) {
      for (const auto& inst : data) train_step(inst.features, inst.labels);
    } else {
      Rng rng = make_rng(seed, 300 + static_cast<std::uint64_t>(e));
      for (std::size_t idx : shuffled_indices(data.size(), rng)) {
        train_step(data[idx].features, data[idx].labels);
      }
    }
  }
}

Prediction MlcaModel::predict(Eigen::Ref<const Vector> x) const {
  if (store_.empty()) throw DataError("predict: model has no nodes yet");
  if (label_count() < 1) throw DataError("predict: model has no labels yet");
  if (x.size() != dim_) throw DataError("predict: instance has wrong dimension");
  if (!x.allFinite()) throw DataError("predict: non-finite feature values");

  const std::vector<double> sims = similarities_to(x);
  const std::size_t want =
      std::min<std::size_t>(static_cast<std::size_t>(params_.n_y) + 1, store_.size());
  const std::vector<std::size_t> hood = nearest_nodes(sims, kNoExclude, want);
  const CountingVec g = counting_vector(store_, hood, params_.n_y, label_count());

  Prediction pred;
  pred.posterior.resize(label_count());
  for (Eigen::Index i = 0; i < label_count(); ++i) {
    pred.posterior[i] = posterior_positive(counters_, store_, g, i);
  }
  pred.labels = predict_labels(pred.posterior);
  return pred;
}

ModelSnapshot MlcaModel::snapshot() const {
  return ModelSnapshot(std::make_shared<const MlcaModel>(*this));
}

void MlcaModel::rename_labels(std::vector<std::string> names) {
  if (names.size() != label_names_.size()) {
    throw DataError("rename_labels: model has " + std::to_string(label_names_.size()) +
                    " labels, got " + std::to_string(names.size()) + " names");
  }
  label_names_ = std::move(names);
}

AttributeGrouping MlcaModel::regroup_attributes(const std::vector<Vector>& window,
                                                const Params& params) {
  require(!window.empty(), "regroup_attributes: empty window");
  const Eigen::Index d = window.front().size();
  if (d == 1) return AttributeGrouping::trivial(1);

  // All lambda*d values form one scalar population; its spread sets the single
  // bandwidth the whole sub-clustering runs with.
  const double total = static_cast<double>(window.size()) * static_cast<double>(d);
  double mean = 0.0;
  for (const Vector& row : window) mean += row.sum();
  mean /= total;
  double var = 0.0;
  for (const Vector& row : window) var += (row.array() - mean).square().sum();
  var /= total;
  Vector one(1);
  one[0] = std::sqrt(var);
  const double sigma = bandwidth_from_std(one, static_cast<std::size_t>(total), 1)[0];

  const auto cim1 = [sigma](double a, double b) {
    const double z = (a - b) / sigma;
    return std::sqrt(std::max(0.0, 1.0 - std::exp(-0.5 * z * z)));
  };

  struct SubNode {
    double weight;
    std::int64_t alpha;
  };
  std::vector<SubNode> nodes;
  std::vector<double> sims;
  std::vector<std::size_t> majority(static_cast<std::size_t>(d), 0);
  std::vector<std::size_t> picks;
  picks.reserve(window.size());

  for (Eigen::Index attr = 0; attr < d; ++attr) {
    picks.clear();
    for (const Vector& row : window) {
      const double v = row[attr];
      std::size_t eff;
      if (nodes.size() < 2) {
        nodes.push_back({v, 1});
        eff = nodes.size() - 1;
      } else {
        sims.resize(nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) sims[k] = cim1(v, nodes[k].weight);
        const WinnerPair w = select_winners(sims);
        const VigilanceCase vc = vigilance_test(w.v1, w.v2, params.v_threshold);
        if (vc == VigilanceCase::kCaseI) {
          nodes.push_back({v, 1});
          eff = nodes.size() - 1;
        } else {
          SubNode& win = nodes[w.k1];
          win.alpha += 1;
          win.weight += (v - win.weight) / static_cast<double>(win.alpha);
          eff = w.k1;
          if (vc == VigilanceCase::kCaseIII) {
            for (std::size_t k = 0; k < nodes.size(); ++k) sims[k] = cim1(win.weight, nodes[k].weight);
            const std::size_t want =
                std::min<std::size_t>(static_cast<std::size_t>(params.n_y), nodes.size() - 1);
            for (std::size_t j : nearest_nodes(sims, w.k1, want)) {
              SubNode& nb = nodes[j];
              nb.weight += (win.weight - nb.weight) /
                           (static_cast<double>(params.n_y) * static_cast<double>(nb.alpha));
            }
          }
        }
      }
      picks.push_back(eff);
    }

    // Majority node for this attribute; ties break to the lower node id.
    std::vector<int> tally(nodes.size(), 0);
    for (std::size_t p : picks) tally[p] += 1;
    std::size_t best_node = 0;
    int best = 0;
    for (std::size_t k = 0; k < tally.size(); ++k) {
      if (tally[k] > best) {
        best = tally[k];
        best_node = k;
      }
    }
    majority[static_cast<std::size_t>(attr)] = best_node;
  }

  // Attributes sharing a majority node share a group; group ids follow the
  // ascending order of those node ids.
  std::vector<std::size_t> distinct = majority;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> group_of(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < majority.size(); ++i) {
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), majority[i]);
    group_of[i] = static_cast<int>(it - distinct.begin());
  }
  return AttributeGrouping(std::move(group_of));
}

}  // namespace mlca
