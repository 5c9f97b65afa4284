#pragma once

#include "mlca/art.hpp"
#include "mlca/common.hpp"

#include <vector>

namespace mlca {

// Event-count matrices: row = label, column j in [0, N_y] = neighborhood count
// value. c_pos rows collect instances carrying the label, c_neg the rest.
// n_seen counts every training instance the owning model has consumed,
// including bootstrap instances that update no event cell; n_events counts
// only the instances that did update a cell.
//
// A label joining the vocabulary mid-stream was absent, with zero
// neighborhood evidence, for every earlier event. Its fresh negative row
// therefore starts with those events banked in column 0, keeping all rows at
// the same total. The priors already treat old instances this way, so without
// the backfill a young label would face a flat, overly permissive negative
// likelihood instead of one anchored by its own history.
struct LabelEventCounters {
  explicit LabelEventCounters(int n_y_) : n_y(n_y_) {
    require(n_y >= 1, "LabelEventCounters: n_y must be positive");
    c_pos.resize(0, n_y + 1);
    c_neg.resize(0, n_y + 1);
  }

  void grow_labels(Eigen::Index n_labels) {
    if (n_labels <= c_pos.rows()) return;
    const Eigen::Index old_rows = c_pos.rows();
    c_pos.conservativeResize(n_labels, n_y + 1);
    c_neg.conservativeResize(n_labels, n_y + 1);
    c_pos.bottomRows(n_labels - old_rows).setZero();
    c_neg.bottomRows(n_labels - old_rows).setZero();
    c_neg.col(0).tail(n_labels - old_rows).setConstant(n_events);
  }

  Eigen::Index label_count() const { return c_pos.rows(); }

  int n_y;
  CountMatrix c_pos;
  CountMatrix c_neg;
  std::int64_t n_seen = 0;
  std::int64_t n_events = 0;
};

using CountingVec = Eigen::VectorXi;  // g, entries in [0, N_y] after rescaling

// Sums beta over the neighborhood, then rescales so the largest entry is N_y
// (half-away-from-zero rounding). An all-zero raw vector stays all-zero.
CountingVec counting_vector(const NodeStore& store, const std::vector<std::size_t>& neighborhood,
                            int n_y, Eigen::Index n_labels);

// For each label i increments exactly one cell in row i: column g_i of c_pos
// when the instance carries the label, of c_neg otherwise. Bumps n_seen and
// n_events once each.
void update_event_counters(LabelEventCounters& counters, const CountingVec& g,
                           Eigen::Ref<const LabelVector> label);

// (s + c^sign[i][j]) / (s*(N_y+1) + sum_j c^sign[i][j]); Laplace smoothing s=1.
double likelihood(const LabelEventCounters& counters, Eigen::Index i, int j, bool positive,
                  double s = 1.0);

// (s + sum_k beta[k][i]) / (2s + n_seen); the negative prior is its complement.
double prior_positive(const LabelEventCounters& counters, const NodeStore& store, Eigen::Index i,
                      double s = 1.0);

// Bayes combination of likelihood at column g_i with the label prior.
double posterior_positive(const LabelEventCounters& counters, const NodeStore& store,
                          const CountingVec& g, Eigen::Index i);

// Strict > 0.5 thresholding; exactly 0.5 maps to 0.
LabelVector predict_labels(const Vector& posteriors);

}  // namespace mlca
