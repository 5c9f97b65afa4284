#pragma once

#include "mlca/cim.hpp"
#include "mlca/common.hpp"

#include <cstddef>
#include <limits>
#include <variant>
#include <vector>

namespace mlca {

// Node-local bandwidth storage. Which alternative is active depends on the
// model variant: a scalar for the base metric, one value per attribute for the
// individual metric, per-group values (plus the per-attribute std snapshot
// they were derived from, needed to re-derive them when the grouping changes)
// for the clustered metric.
struct ScalarNodeBandwidth {
  double value;
};
struct AttributeNodeBandwidth {
  Vector values;
};
struct GroupNodeBandwidth {
  Vector attribute_std;            // window std snapshot at estimation time
  std::vector<double> per_group;   // derived under the current grouping
};
using NodeBandwidth = std::variant<ScalarNodeBandwidth, AttributeNodeBandwidth, GroupNodeBandwidth>;

struct PrototypeNode {
  Vector weight;
  NodeBandwidth sigma;
  std::int64_t alpha = 0;  // times this node won (>=1 once created)
  CountVector beta;        // per-label win counts, length = current vocabulary
};

// Append-only node list; clustering has no deletion, so indexes are stable ids.
class NodeStore {
 public:
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const PrototypeNode& node(std::size_t k) const { return nodes_[k]; }
  PrototypeNode& mutable_node(std::size_t k) { return nodes_[k]; }
  const std::vector<PrototypeNode>& nodes() const { return nodes_; }

  std::size_t add(PrototypeNode n) {
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  // Zero-pads every beta vector when the label vocabulary grows.
  void pad_labels(Eigen::Index n_labels) {
    for (PrototypeNode& n : nodes_) {
      if (n.beta.size() < n_labels) {
        CountVector grown = CountVector::Zero(n_labels);
        grown.head(n.beta.size()) = n.beta;
        n.beta = std::move(grown);
      }
    }
  }

  // Sum of beta over all nodes for one label.
  std::int64_t beta_sum(Eigen::Index label) const {
    std::int64_t acc = 0;
    for (const PrototypeNode& n : nodes_) {
      if (label < n.beta.size()) acc += n.beta[label];
    }
    return acc;
  }

 private:
  std::vector<PrototypeNode> nodes_;
};

enum class VigilanceCase { kCaseI, kCaseII, kCaseIII };

struct WinnerPair {
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  double v1 = 0.0;
  double v2 = 0.0;
};

// Two smallest similarities with ties broken toward the lower index.
WinnerPair select_winners(const std::vector<double>& similarities);

template <typename SimilarityFn>
WinnerPair select_winners(Eigen::Ref<const Vector> x, const NodeStore& store, SimilarityFn&& sim) {
  std::vector<double> sims(store.size());
  for (std::size_t k = 0; k < store.size(); ++k) sims[k] = sim(x, store.node(k));
  return select_winners(sims);
}

// Case I: v1 > V. Case II: v1 <= V < v2. Case III: v1 <= V and v2 <= V.
VigilanceCase vigilance_test(double v1, double v2, double v_threshold);

PrototypeNode create_node(Eigen::Ref<const Vector> x, NodeBandwidth sigma,
                          Eigen::Ref<const LabelVector> label);

// alpha += 1; beta += label (label may be shorter than beta: missing tail = 0).
void record_counts(PrototypeNode& node, Eigen::Ref<const LabelVector> label);

// weight += (x - weight)/alpha. alpha must already count this instance.
void update_winner(PrototypeNode& node, Eigen::Ref<const Vector> x);

// Indexes of the `count` smallest similarities, ordered by (value, index);
// pass kNoExclude to keep every candidate.
inline constexpr std::size_t kNoExclude = std::numeric_limits<std::size_t>::max();
std::vector<std::size_t> nearest_nodes(const std::vector<double>& similarities,
                                       std::size_t exclude, std::size_t count);

// Case III neighbor move: each neighbor approaches the winner's (already
// updated) weight by 1/(N_y * neighbor_alpha). Counters stay untouched.
void update_neighbors(NodeStore& store, std::size_t k1,
                      const std::vector<std::size_t>& neighbors, int n_y);

}  // namespace mlca
