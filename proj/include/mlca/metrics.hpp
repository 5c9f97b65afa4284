#pragma once

#include "mlca/common.hpp"

#include <string>
#include <vector>

namespace mlca {

using BinaryMatrix = Eigen::MatrixXi;  // rows = instances, cols = labels, entries 0/1

// Six example/label-based multi-label metrics plus diagnostics. Metrics that
// cannot be computed (no valid label/instance) carry the NaN sentinel.
struct EvalReport {
  double exact_match = 0.0;
  double f1_example = 0.0;
  double macro_auc = 0.0;
  double hamming_loss = 0.0;
  double ranking_loss = 0.0;
  double coverage = 0.0;
  std::vector<double> per_label_auc;  // NaN where a label was excluded

  int excluded_auc_labels = 0;          // all-positive or all-negative labels
  int skipped_ranking_instances = 0;    // no relevant or no irrelevant labels
  int skipped_coverage_instances = 0;   // no relevant labels

  // Optional model context, included in rendering when >= 0.
  std::int64_t node_count = -1;
  std::int64_t label_count = -1;

  std::string to_table() const;
  std::string to_lines() const;  // name=value, 6 decimals, one per line
};

double exact_match(const BinaryMatrix& pred, const BinaryMatrix& truth);
double f1_example(const BinaryMatrix& pred, const BinaryMatrix& truth);
double hamming_loss(const BinaryMatrix& pred, const BinaryMatrix& truth);

// Per-label ROC AUC via the rank statistic (ties earn 0.5), averaged over
// labels that have both positives and negatives.
double macro_auc(const Matrix& scores, const BinaryMatrix& truth,
                 std::vector<double>* per_label = nullptr, int* excluded = nullptr);

// Per instance: fraction of (relevant, irrelevant) pairs ordered wrongly,
// ties 0.5; instances lacking either side are skipped.
double ranking_loss(const Matrix& scores, const BinaryMatrix& truth, int* skipped = nullptr);

// Per instance: (worst average rank of a relevant label - 1)/(N_l - 1),
// rank 1 = highest score; instances with no relevant labels are skipped.
double coverage(const Matrix& scores, const BinaryMatrix& truth, int* skipped = nullptr);

EvalReport evaluate(const Matrix& scores, const BinaryMatrix& pred, const BinaryMatrix& truth);

// 1-based average ranks; ascending = true ranks the smallest value 1.
std::vector<double> average_ranks(const std::vector<double>& values, bool ascending);

}  // namespace mlca
