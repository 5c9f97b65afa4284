#pragma once

#include "mlca/common.hpp"

#include <cmath>
#include <vector>

namespace mlca {

// Positive kernel bandwidth. Zero/negative values are rejected at construction
// so the kernel below never sees a degenerate denominator.
class Bandwidth {
 public:
  explicit Bandwidth(double value) : value_(value) {
    require(std::isfinite(value) && value > 0.0, "Bandwidth: value must be positive");
  }
  double value() const { return value_; }

 private:
  double value_;
};

// Per-attribute bandwidths, one positive entry per feature dimension.
class BandwidthVector {
 public:
  explicit BandwidthVector(Vector values) : values_(std::move(values)) {
    require(values_.size() > 0, "BandwidthVector: empty");
    require((values_.array() > 0.0).all() && values_.allFinite(),
            "BandwidthVector: entries must be positive");
  }
  const Vector& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }

 private:
  Vector values_;
};

// Partition of the d attributes into J groups, 0-based group ids.
class AttributeGrouping {
 public:
  static AttributeGrouping trivial(Eigen::Index d) {
    return AttributeGrouping(std::vector<int>(static_cast<std::size_t>(d), 0));
  }

  explicit AttributeGrouping(std::vector<int> group_of) : group_of_(std::move(group_of)) {
    require(!group_of_.empty(), "AttributeGrouping: no attributes");
    int max_group = -1;
    for (int g : group_of_) {
      require(g >= 0, "AttributeGrouping: negative group id");
      max_group = std::max(max_group, g);
    }
    group_dims_.assign(static_cast<std::size_t>(max_group) + 1, 0);
    for (int g : group_of_) group_dims_[static_cast<std::size_t>(g)] += 1;
    for (int dj : group_dims_) require(dj > 0, "AttributeGrouping: empty group");
  }

  int group_of(Eigen::Index attribute) const {
    return group_of_[static_cast<std::size_t>(attribute)];
  }
  const std::vector<int>& assignments() const { return group_of_; }
  const std::vector<int>& group_dims() const { return group_dims_; }
  int groups() const { return static_cast<int>(group_dims_.size()); }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(group_of_.size()); }

 private:
  std::vector<int> group_of_;
  std::vector<int> group_dims_;
};

// exp(-delta^2 / (2 sigma^2)); 1 iff delta == 0.
inline double gaussian_kernel(double delta, Bandwidth sigma) {
  const double z = delta / sigma.value();
  return std::exp(-0.5 * z * z);
}

// sqrt(1 - mean_i kernel(x_i - y_i)), a bounded dissimilarity in [0,1].
inline double cim(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> y, Bandwidth sigma) {
  require(x.size() == y.size() && x.size() > 0, "cim: dimension mismatch");
  const double correntropy = (((x - y) / sigma.value()).array().square() * -0.5).exp().mean();
  return std::sqrt(std::max(0.0, 1.0 - correntropy));
}

// mean_i sqrt(1 - kernel_{sigma_i}(x_i - y_i)): every attribute contributes its
// own kernel bandwidth before averaging. The Ref overload trusts its sigmas to
// be positive (hot path); the BandwidthVector one is the validated entry.
inline double cim_individual(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> y,
                             Eigen::Ref<const Vector> sigmas) {
  require(x.size() == y.size() && x.size() == sigmas.size(),
          "cim_individual: dimension mismatch");
  const auto z = (x - y).array() / sigmas.array();
  return (1.0 - (z.square() * -0.5).exp()).max(0.0).sqrt().mean();
}

inline double cim_individual(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> y,
                             const BandwidthVector& sigmas) {
  return cim_individual(x, y, sigmas.values());
}

// mean over groups of sqrt(1 - within-group mean kernel), one bandwidth per
// group. Same raw/validated split as cim_individual.
double cim_clustered(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> y,
                     const AttributeGrouping& grouping, const std::vector<double>& group_sigmas);

double cim_clustered(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> y,
                     const AttributeGrouping& grouping, const std::vector<Bandwidth>& group_sigmas);

// Population (divide-by-n) standard deviation of each attribute over the window.
Vector attribute_std(const std::vector<Vector>& window);

/// Silverman-style per-attribute bandwidth from precomputed stds:
//   sigma_i = (4/(2+dim))^{1/(4+dim)} * std_i * sample_count^{-1/(4+dim)}
// `dim` is the exponent dimension, `sample_count` the number of instances the
// stds were estimated from. Zero stds fall back to the 1e-6 floor.
Vector bandwidth_from_std(const Vector& stds, std::size_t sample_count, Eigen::Index dim);

// Full-window estimate with the window's own dimension as exponent.
BandwidthVector estimate_bandwidth(const std::vector<Vector>& window);

// Median of the per-attribute bandwidths (mean of the central pair when even).
Bandwidth scalar_bandwidth(const BandwidthVector& bv);

/// Per-group bandwidths from per-attribute stds: each attribute's term uses its
// group's dimension d_j in the exponents, then the group averages its terms.
std::vector<Bandwidth> group_bandwidth_from_std(const Vector& stds, std::size_t sample_count,
                                                const AttributeGrouping& grouping);

std::vector<Bandwidth> group_bandwidth(const std::vector<Vector>& window,
                                       const AttributeGrouping& grouping);

constexpr double kBandwidthFloor = 1e-6;

}  // namespace mlca
