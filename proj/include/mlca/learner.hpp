#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mlca/art.hpp"
#include "mlca/cim.hpp"
#include "mlca/common.hpp"
#include "mlca/label_bayes.hpp"

namespace mlca {

// Which bandwidth structure drives the dissimilarity:
//   kBase       one scalar per node, comparisons use the mean over all nodes
//   kIndividual one bandwidth per attribute, owned by the candidate node
//   kClustered  one bandwidth per attribute group, groups re-learned per window
enum class Variant { kBase, kIndividual, kClustered };

Variant parse_variant(const std::string& text);
std::string to_string(Variant v);

struct Params {
  double v_threshold = 0.10;  // dissimilarity ceiling for resonance, in (0,1)
  int lambda = 50;            // sliding-window length for bandwidth estimation
  int n_y = 10;               // neighborhood size around the winner

  void validate() const;
};

// One record per consumed training instance, for observers and audits.
struct TrainStepEvent {
  enum class Kind { kBootstrap, kCaseI, kCaseII, kCaseIII };

  Kind kind = Kind::kBootstrap;
  std::size_t node = 0;  // node that absorbed the instance (new or winner)
  std::int64_t step = 0;  // instances consumed so far, including this one
  LabelVector label;
  bool counters_updated = false;  // false only while bootstrapping
  CountingVec g;                  // empty while bootstrapping
};

struct Prediction {
  Vector posterior;    // per-label probability of relevance
  LabelVector labels;  // 1 where posterior > 0.5
};

class MlcaModel;

// Immutable copy of a model at a point in time. Cheap to pass around;
// training the source model afterwards cannot change snapshot output.
class ModelSnapshot {
 public:
  explicit ModelSnapshot(std::shared_ptr<const MlcaModel> model) : model_(std::move(model)) {}

  Prediction predict(Eigen::Ref<const Vector> x) const;
  const MlcaModel& model() const { return *model_; }

 private:
  std::shared_ptr<const MlcaModel> model_;
};

class MlcaModel {
 public:
  MlcaModel(Variant variant, Params params);

  // Consumes one (instance, labels) pair. Labels longer than the current
  // vocabulary grow it; entries must be 0 or 1. Returns the step record.
  TrainStepEvent train_step(Eigen::Ref<const Vector> x, Eigen::Ref<const LabelVector> label);

  // Runs `epochs` passes. The first pass keeps the given order; later passes
  // reshuffle deterministically from `seed`.
  void train_epochs(const std::vector<LabeledInstance>& data, int epochs, std::uint64_t seed);

  Prediction predict(Eigen::Ref<const Vector> x) const;
  ModelSnapshot snapshot() const;

  // Replaces the synthesized label names; the count must match exactly.
  void rename_labels(std::vector<std::string> names);

  // Learns a partition of the attributes by clustering the window's values
  // as d independent scalar streams over a shared node pool; attributes whose
  // values gravitate to the same node share a group.
  static AttributeGrouping regroup_attributes(const std::vector<Vector>& window,
                                              const Params& params);

  void set_observer(std::function<void(const TrainStepEvent&)> observer) {
    observer_ = std::move(observer);
  }

  Variant variant() const { return variant_; }
  const Params& params() const { return params_; }
  Eigen::Index dim() const { return dim_; }
  Eigen::Index label_count() const { return static_cast<Eigen::Index>(label_names_.size()); }
  const std::vector<std::string>& label_names() const { return label_names_; }
  std::size_t node_count() const { return store_.size(); }
  std::int64_t instances_seen() const { return counters_.n_seen; }
  const NodeStore& store() const { return store_; }
  const LabelEventCounters& counters() const { return counters_; }
  const std::vector<Vector>& window() const { return window_; }
  const std::optional<AttributeGrouping>& grouping() const { return grouping_; }
  bool bandwidth_ready() const { return pending_.has_value(); }

 private:
  friend struct ModelIoAccess;

  void ensure_dimension(Eigen::Ref<const Vector> x);
  LabelVector normalized_label(Eigen::Ref<const LabelVector> label);
  void refresh_bandwidth();
  NodeBandwidth provisional_bandwidth() const;
  double mean_scalar_sigma() const;
  std::vector<double> similarities_to(Eigen::Ref<const Vector> x) const;
  std::vector<double> similarities_from_node(std::size_t k) const;

  Variant variant_;
  Params params_;
  Eigen::Index dim_ = -1;
  std::vector<std::string> label_names_;
  NodeStore store_;
  LabelEventCounters counters_;
  std::vector<Vector> window_;  // oldest first, at most lambda entries
  std::optional<NodeBandwidth> pending_;  // next new node's bandwidth; empty until
                                          // the first full window was observed
  std::optional<AttributeGrouping> grouping_;  // clustered variant only
  std::function<void(const TrainStepEvent&)> observer_;
};

}  // namespace mlca
