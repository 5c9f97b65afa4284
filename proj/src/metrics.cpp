#include "mlca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace mlca {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_shapes(Eigen::Index r1, Eigen::Index c1, Eigen::Index r2, Eigen::Index c2,
                  const char* who) {
  if (r1 != r2 || c1 != c2) throw DataError(std::string(who) + ": shape mismatch");
  if (r1 == 0 || c1 == 0) throw DataError(std::string(who) + ": empty input");
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::vector<double> average_ranks(const std::vector<double>& values, bool ascending) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return ascending ? values[a] < values[b] : values[a] > values[b];
    return a < b;
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t end = pos + 1;
    while (end < n && values[idx[end]] == values[idx[pos]]) ++end;
    const double avg = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t t = pos; t < end; ++t) ranks[idx[t]] = avg;
    pos = end;
  }
  return ranks;
}

double exact_match(const BinaryMatrix& pred, const BinaryMatrix& truth) {
  check_shapes(pred.rows(), pred.cols(), truth.rows(), truth.cols(), "exact_match");
  Eigen::Index hits = 0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    if ((pred.row(r).array() == truth.row(r).array()).all()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pred.rows());
}

double f1_example(const BinaryMatrix& pred, const BinaryMatrix& truth) {
  check_shapes(pred.rows(), pred.cols(), truth.rows(), truth.cols(), "f1_example");
  double acc = 0.0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    const int inter = (pred.row(r).array() * truth.row(r).array()).sum();
    const int total = pred.row(r).sum() + truth.row(r).sum();
    acc += total == 0 ? 1.0 : 2.0 * inter / total;  // both-empty scores 1
  }
  return acc / static_cast<double>(pred.rows());
}

double hamming_loss(const BinaryMatrix& pred, const BinaryMatrix& truth) {
  check_shapes(pred.rows(), pred.cols(), truth.rows(), truth.cols(), "hamming_loss");
  const auto wrong = (pred.array() != truth.array()).count();
  return static_cast<double>(wrong) / static_cast<double>(pred.size());
}

double macro_auc(const Matrix& scores, const BinaryMatrix& truth, std::vector<double>* per_label,
                 int* excluded) {
  check_shapes(scores.rows(), scores.cols(), truth.rows(), truth.cols(), "macro_auc");
  const Eigen::Index n = scores.rows();
  const Eigen::Index n_labels = scores.cols();
  if (per_label) per_label->assign(static_cast<std::size_t>(n_labels), kNaN);
  int skipped = 0;
  double acc = 0.0;
  int valid = 0;
  std::vector<double> column(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n_labels; ++i) {
    const Eigen::Index positives = truth.col(i).sum();
    const Eigen::Index negatives = n - positives;
    if (positives == 0 || negatives == 0) {
      ++skipped;
      continue;
    }
    for (Eigen::Index r = 0; r < n; ++r) column[static_cast<std::size_t>(r)] = scores(r, i);
    const std::vector<double> ranks = average_ranks(column, /*ascending=*/true);
    double rank_sum = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (truth(r, i) == 1) rank_sum += ranks[static_cast<std::size_t>(r)];
    }
    const double p = static_cast<double>(positives);
    // rank-sum statistic: correct pairs + half the ties, exact in doubles
    const double correct = rank_sum - p * (p + 1.0) / 2.0;
    const double auc = correct / (p * static_cast<double>(negatives));
    if (per_label) (*per_label)[static_cast<std::size_t>(i)] = auc;
    acc += auc;
    ++valid;
  }
  if (excluded) *excluded = skipped;
  return valid == 0 ? kNaN : acc / valid;
}

double ranking_loss(const Matrix& scores, const BinaryMatrix& truth, int* skipped) {
  check_shapes(scores.rows(), scores.cols(), truth.rows(), truth.cols(), "ranking_loss");
  const Eigen::Index n_labels = scores.cols();
  int dropped = 0;
  double acc = 0.0;
  int kept = 0;
  std::vector<double> row(static_cast<std::size_t>(n_labels));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const Eigen::Index relevant = truth.row(r).sum();
    const Eigen::Index irrelevant = n_labels - relevant;
    if (relevant == 0 || irrelevant == 0) {
      ++dropped;
      continue;
    }
    for (Eigen::Index i = 0; i < n_labels; ++i) row[static_cast<std::size_t>(i)] = scores(r, i);
    const std::vector<double> ranks = average_ranks(row, /*ascending=*/true);
    double rank_sum = 0.0;
    for (Eigen::Index i = 0; i < n_labels; ++i) {
      if (truth(r, i) == 1) rank_sum += ranks[static_cast<std::size_t>(i)];
    }
    const double rel = static_cast<double>(relevant);
    const double pairs = rel * static_cast<double>(irrelevant);
    const double correct = rank_sum - rel * (rel + 1.0) / 2.0;
    acc += (pairs - correct) / pairs;
    ++kept;
  }
  if (skipped) *skipped = dropped;
  return kept == 0 ? kNaN : acc / kept;
}

double coverage(const Matrix& scores, const BinaryMatrix& truth, int* skipped) {
  check_shapes(scores.rows(), scores.cols(), truth.rows(), truth.cols(), "coverage");
  const Eigen::Index n_labels = scores.cols();
  if (n_labels < 2) {
    if (skipped) *skipped = 0;
    return kNaN;
  }
  int dropped = 0;
  double acc = 0.0;
  int kept = 0;
  std::vector<double> row(static_cast<std::size_t>(n_labels));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    if (truth.row(r).sum() == 0) {
      ++dropped;
      continue;
    }
    for (Eigen::Index i = 0; i < n_labels; ++i) row[static_cast<std::size_t>(i)] = scores(r, i);
    const std::vector<double> ranks = average_ranks(row, /*ascending=*/false);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n_labels; ++i) {
      if (truth(r, i) == 1) worst = std::max(worst, ranks[static_cast<std::size_t>(i)]);
    }
    acc += (worst - 1.0) / static_cast<double>(n_labels - 1);
    ++kept;
  }
  if (skipped) *skipped = dropped;
  return kept == 0 ? kNaN : acc / kept;
}

EvalReport evaluate(const Matrix& scores, const BinaryMatrix& pred, const BinaryMatrix& truth) {
  EvalReport rep;
  rep.exact_match = exact_match(pred, truth);
  rep.f1_example = f1_example(pred, truth);
  rep.hamming_loss = hamming_loss(pred, truth);
  rep.macro_auc = macro_auc(scores, truth, &rep.per_label_auc, &rep.excluded_auc_labels);
  rep.ranking_loss = ranking_loss(scores, truth, &rep.skipped_ranking_instances);
  rep.coverage = coverage(scores, truth, &rep.skipped_coverage_instances);
  return rep;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char line[64];
  auto row = [&](const char* name, double v) {
    std::snprintf(line, sizeof(line), "%-14s %s\n", name, format_value(v).c_str());
    out << line;
  };
  out << "metric         value\n";
  row("exact_match", exact_match);
  row("f1_example", f1_example);
  row("macro_auc", macro_auc);
  row("hamming_loss", hamming_loss);
  row("ranking_loss", ranking_loss);
  row("coverage", coverage);
  if (node_count >= 0) out << "nodes          " << node_count << "\n";
  if (label_count >= 0) out << "labels         " << label_count << "\n";
  if (excluded_auc_labels > 0) out << "excluded_auc_labels      " << excluded_auc_labels << "\n";
  if (skipped_ranking_instances > 0)
    out << "skipped_ranking_instances  " << skipped_ranking_instances << "\n";
  if (skipped_coverage_instances > 0)
    out << "skipped_coverage_instances " << skipped_coverage_instances << "\n";
  return out.str();
}

std::string EvalReport::to_lines() const {
  std::ostringstream out;
  out << "exact_match=" << format_value(exact_match) << "\n";
  out << "f1_example=" << format_value(f1_example) << "\n";
  out << "macro_auc=" << format_value(macro_auc) << "\n";
  out << "hamming_loss=" << format_value(hamming_loss) << "\n";
  out << "ranking_loss=" << format_value(ranking_loss) << "\n";
  out << "coverage=" << format_value(coverage) << "\n";
  if (node_count >= 0) out << "nodes=" << node_count << "\n";
  if (label_count >= 0) out << "labels=" << label_count << "\n";
  if (excluded_auc_labels > 0) out << "excluded_auc_labels=" << excluded_auc_labels << "\n";
  if (skipped_ranking_instances > 0)
    out << "skipped_ranking_instances=" << skipped_ranking_instances << "\n";
  if (skipped_coverage_instances > 0)
    out << "skipped_coverage_instances=" << skipped_coverage_instances << "\n";
  return out.str();
}

}  // namespace mlca
