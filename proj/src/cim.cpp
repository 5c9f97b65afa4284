#include "mlca/cim.hpp"

#include <algorithm>

namespace mlca {

double cim_clustered(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> y,
                     const AttributeGrouping& grouping, const std::vector<double>& group_sigmas) {
  const Eigen::Index d = x.size();
  require(y.size() == d && grouping.dimension() == d, "cim_clustered: dimension mismatch");
  require(static_cast<int>(group_sigmas.size()) == grouping.groups(),
          "cim_clustered: one bandwidth per group required");

  const int j_count = grouping.groups();
  std::vector<double> kernel_sum(static_cast<std::size_t>(j_count), 0.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto j = static_cast<std::size_t>(grouping.group_of(i));
    const double z = (x[i] - y[i]) / group_sigmas[j];
    kernel_sum[j] += std::exp(-0.5 * z * z);
  }

  double acc = 0.0;
  for (std::size_t j = 0; j < kernel_sum.size(); ++j) {
    const double correntropy = kernel_sum[j] / grouping.group_dims()[j];
    acc += std::sqrt(std::max(0.0, 1.0 - correntropy));
  }
  return acc / j_count;
}

double cim_clustered(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> y,
                     const AttributeGrouping& grouping, const std::vector<Bandwidth>& group_sigmas) {
  std::vector<double> raw;
  raw.reserve(group_sigmas.size());
  for (const Bandwidth& b : group_sigmas) raw.push_back(b.value());
  return cim_clustered(x, y, grouping, raw);
}

Vector attribute_std(const std::vector<Vector>& window) {
  require(!window.empty(), "attribute_std: empty window");
  const Eigen::Index d = window.front().size();
  Vector mean = Vector::Zero(d);
  for (const Vector& x : window) {
    require(x.size() == d, "attribute_std: ragged window");
    mean += x;
  }
  mean /= static_cast<double>(window.size());

  Vector var = Vector::Zero(d);
  for (const Vector& x : window) var += (x - mean).array().square().matrix();
  var /= static_cast<double>(window.size());
  return var.array().sqrt();
}

Vector bandwidth_from_std(const Vector& stds, std::size_t sample_count, Eigen::Index dim) {
  require(sample_count >= 1, "bandwidth_from_std: empty sample");
  require(dim >= 1, "bandwidth_from_std: bad dimension");
  const double expo = 1.0 / (4.0 + static_cast<double>(dim));
  const double factor = std::pow(4.0 / (2.0 + static_cast<double>(dim)), expo) *
                        std::pow(static_cast<double>(sample_count), -expo);
  Vector out(stds.size());
  for (Eigen::Index i = 0; i < stds.size(); ++i) {
    out[i] = stds[i] > 0.0 ? factor * stds[i] : kBandwidthFloor;
  }
  return out;
}

BandwidthVector estimate_bandwidth(const std::vector<Vector>& window) {
  if (window.size() < 2) throw DataError("estimate_bandwidth: window needs at least 2 instances");
  const Vector stds = attribute_std(window);
  return BandwidthVector(bandwidth_from_std(stds, window.size(), stds.size()));
}

Bandwidth scalar_bandwidth(const BandwidthVector& bv) {
  std::vector<double> v(bv.values().data(), bv.values().data() + bv.size());
  std::sort(v.begin(), v.end());
  const std::size_t half = v.size() / 2;
  if (v.size() % 2 == 1) return Bandwidth(v[half]);
  return Bandwidth(0.5 * (v[half - 1] + v[half]));
}

std::vector<Bandwidth> group_bandwidth_from_std(const Vector& stds, std::size_t sample_count,
                                                const AttributeGrouping& grouping) {
  require(stds.size() == grouping.dimension(), "group_bandwidth: dimension mismatch");
  require(sample_count >= 1, "group_bandwidth: empty sample");

  const int j_count = grouping.groups();
  std::vector<double> term_sum(static_cast<std::size_t>(j_count), 0.0);
  std::vector<double> factor(static_cast<std::size_t>(j_count));
  for (std::size_t j = 0; j < factor.size(); ++j) {
    const double dj = grouping.group_dims()[j];
    const double expo = 1.0 / (4.0 + dj);
    factor[j] = std::pow(4.0 / (2.0 + dj), expo) *
                std::pow(static_cast<double>(sample_count), -expo);
  }
  for (Eigen::Index i = 0; i < stds.size(); ++i) {
    const auto j = static_cast<std::size_t>(grouping.group_of(i));
    term_sum[j] += stds[i] > 0.0 ? factor[j] * stds[i] : kBandwidthFloor;
  }

  std::vector<Bandwidth> out;
  out.reserve(factor.size());
  for (std::size_t j = 0; j < factor.size(); ++j) {
    out.emplace_back(term_sum[j] / grouping.group_dims()[j]);
  }
  return out;
}

std::vector<Bandwidth> group_bandwidth(const std::vector<Vector>& window,
                                       const AttributeGrouping& grouping) {
  if (window.size() < 2) throw DataError("group_bandwidth: window needs at least 2 instances");
  return group_bandwidth_from_std(attribute_std(window), window.size(), grouping);
}

}  // namespace mlca
