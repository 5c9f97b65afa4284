#include "mlca/label_bayes.hpp"

#include <cmath>

namespace mlca {

CountingVec counting_vector(const NodeStore& store, const std::vector<std::size_t>& neighborhood,
                            int n_y, Eigen::Index n_labels) {
  CountVector raw = CountVector::Zero(n_labels);
  for (std::size_t k : neighborhood) {
    const CountVector& beta = store.node(k).beta;
    require(beta.size() <= n_labels, "counting_vector: node beta exceeds vocabulary");
    raw.head(beta.size()) += beta;
  }
  const std::int64_t max_raw = n_labels > 0 ? raw.maxCoeff() : 0;
  CountingVec g = CountingVec::Zero(n_labels);
  if (max_raw == 0) return g;
  for (Eigen::Index i = 0; i < n_labels; ++i) {
    const double scaled =
        static_cast<double>(n_y) * static_cast<double>(raw[i]) / static_cast<double>(max_raw);
    g[i] = static_cast<int>(std::llround(scaled));  // llround = half away from zero
  }
  return g;
}

void update_event_counters(LabelEventCounters& counters, const CountingVec& g,
                           Eigen::Ref<const LabelVector> label) {
  require(g.size() == label.size() && g.size() == counters.label_count(),
          "update_event_counters: g/label/counter size mismatch");
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    require(g[i] >= 0 && g[i] <= counters.n_y, "update_event_counters: g out of range");
    if (label[i] == 1) {
      counters.c_pos(i, g[i]) += 1;
    } else {
      counters.c_neg(i, g[i]) += 1;
    }
  }
  counters.n_seen += 1;
  counters.n_events += 1;
}

double likelihood(const LabelEventCounters& counters, Eigen::Index i, int j, bool positive,
                  double s) {
  require(i >= 0 && i < counters.label_count(), "likelihood: label out of range");
  require(j >= 0 && j <= counters.n_y, "likelihood: count out of range");
  const CountMatrix& c = positive ? counters.c_pos : counters.c_neg;
  const double row_sum = static_cast<double>(c.row(i).sum());
  return (s + static_cast<double>(c(i, j))) / (s * (counters.n_y + 1) + row_sum);
}

double prior_positive(const LabelEventCounters& counters, const NodeStore& store, Eigen::Index i,
                      double s) {
  require(i >= 0 && i < counters.label_count(), "prior: label out of range");
  const double beta_sum = static_cast<double>(store.beta_sum(i));
  return (s + beta_sum) / (s * 2.0 + static_cast<double>(counters.n_seen));
}

double posterior_positive(const LabelEventCounters& counters, const NodeStore& store,
                          const CountingVec& g, Eigen::Index i) {
  require(g.size() == counters.label_count(), "posterior: g size mismatch");
  const double p_pos = prior_positive(counters, store, i);
  const double p_neg = 1.0 - p_pos;
  const double like_pos = likelihood(counters, i, g[i], true);
  const double like_neg = likelihood(counters, i, g[i], false);
  const double joint_pos = like_pos * p_pos;
  const double joint_neg = like_neg * p_neg;
  return joint_pos / (joint_pos + joint_neg);
}

LabelVector predict_labels(const Vector& posteriors) {
  LabelVector out(posteriors.size());
  for (Eigen::Index i = 0; i < posteriors.size(); ++i) out[i] = posteriors[i] > 0.5 ? 1 : 0;
  return out;
}

}  // namespace mlca
