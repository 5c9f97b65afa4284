#include "mlca/art.hpp"

#include <algorithm>

namespace mlca {

WinnerPair select_winners(const std::vector<double>& similarities) {
  require(similarities.size() >= 2, "select_winners: needs at least 2 nodes");
  WinnerPair w;
  w.v1 = w.v2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < similarities.size(); ++k) {
    const double v = similarities[k];
    if (v < w.v1) {
      w.v2 = w.v1;
      w.k2 = w.k1;
      w.v1 = v;
      w.k1 = k;
    } else if (v < w.v2) {
      w.v2 = v;
      w.k2 = k;
    }
  }
  return w;
}

VigilanceCase vigilance_test(double v1, double v2, double v_threshold) {
  require(v1 <= v2, "vigilance_test: winners out of order");
  if (v1 > v_threshold) return VigilanceCase::kCaseI;
  return v2 > v_threshold ? VigilanceCase::kCaseII : VigilanceCase::kCaseIII;
}

PrototypeNode create_node(Eigen::Ref<const Vector> x, NodeBandwidth sigma,
                          Eigen::Ref<const LabelVector> label) {
  PrototypeNode n;
  n.weight = x;
  n.sigma = std::move(sigma);
  n.alpha = 1;
  n.beta = label.cast<std::int64_t>();
  return n;
}

void record_counts(PrototypeNode& node, Eigen::Ref<const LabelVector> label) {
  require(label.size() <= node.beta.size(), "record_counts: label longer than vocabulary");
  node.alpha += 1;
  node.beta.head(label.size()) += label.cast<std::int64_t>();
}

void update_winner(PrototypeNode& node, Eigen::Ref<const Vector> x) {
  require(node.alpha >= 1, "update_winner: alpha not yet counted");
  node.weight += (x - node.weight) / static_cast<double>(node.alpha);
}

std::vector<std::size_t> nearest_nodes(const std::vector<double>& similarities,
                                       std::size_t exclude, std::size_t count) {
  std::vector<std::size_t> idx;
  idx.reserve(similarities.size());
  for (std::size_t k = 0; k < similarities.size(); ++k) {
    if (k != exclude) idx.push_back(k);
  }
  const std::size_t keep = std::min(count, idx.size());
  auto by_value_then_index = [&](std::size_t a, std::size_t b) {
    if (similarities[a] != similarities[b]) return similarities[a] < similarities[b];
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    by_value_then_index);
  idx.resize(keep);
  return idx;
}

void update_neighbors(NodeStore& store, std::size_t k1,
                      const std::vector<std::size_t>& neighbors, int n_y) {
  require(n_y >= 1, "update_neighbors: n_y must be positive");
  const Vector& target = store.node(k1).weight;
  for (std::size_t k : neighbors) {
    require(k != k1, "update_neighbors: winner listed as its own neighbor");
    PrototypeNode& nb = store.mutable_node(k);
    nb.weight += (target - nb.weight) / (static_cast<double>(n_y) * static_cast<double>(nb.alpha));
  }
}

}  // namespace mlca
