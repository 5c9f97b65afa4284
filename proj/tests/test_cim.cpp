#include "doctest.h"

#include "mlca/cim.hpp"

#include <cmath>
#include <vector>

namespace {

mlca::Vector vec(std::initializer_list<double> xs) {
  mlca::Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("bandwidth wrappers reject degenerate values") {
  CHECK_THROWS_AS(mlca::Bandwidth(0.0), mlca::ContractViolation);
  CHECK_THROWS_AS(mlca::Bandwidth(-1.0), mlca::ContractViolation);
  CHECK_THROWS_AS(mlca::Bandwidth(std::nan("")), mlca::ContractViolation);
  CHECK(mlca::Bandwidth(0.25).value() == 0.25);

  CHECK_THROWS_AS(mlca::BandwidthVector(mlca::Vector()), mlca::ContractViolation);
  CHECK_THROWS_AS(mlca::BandwidthVector(vec({1.0, 0.0})), mlca::ContractViolation);
  CHECK(mlca::BandwidthVector(vec({1.0, 2.0})).size() == 2);
}

TEST_CASE("gaussian kernel values") {
  const mlca::Bandwidth unit(1.0);
  CHECK(mlca::gaussian_kernel(0.0, unit) == 1.0);
  CHECK(mlca::gaussian_kernel(1.0, unit) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
  CHECK(mlca::gaussian_kernel(3.0, unit) == doctest::Approx(0.011108996538242306).epsilon(1e-15));
  CHECK(mlca::gaussian_kernel(2.0, mlca::Bandwidth(2.0)) ==
        doctest::Approx(0.6065306597126334).epsilon(1e-15));

  SUBCASE("symmetric in the sign of the difference") {
    CHECK(mlca::gaussian_kernel(-3.0, unit) == mlca::gaussian_kernel(3.0, unit));
  }
  SUBCASE("invariant under power-of-two rescaling of delta and sigma") {
    for (double delta : {0.1, 0.7, 1.3, 2.9}) {
      CHECK(mlca::gaussian_kernel(delta, mlca::Bandwidth(0.3)) ==
            mlca::gaussian_kernel(2.0 * delta, mlca::Bandwidth(0.6)));
    }
  }
}

TEST_CASE("scalar-bandwidth dissimilarity") {
  const mlca::Bandwidth unit(1.0);

  SUBCASE("identical points have zero dissimilarity") {
    const mlca::Vector x = vec({0.4, -1.7, 3.2});
    CHECK(mlca::cim(x, x, unit) == 0.0);
  }
  SUBCASE("one-dimensional value") {
    CHECK(mlca::cim(vec({0.0}), vec({3.0}), unit) ==
          doctest::Approx(0.9944299892208389).epsilon(1e-15));
  }
  SUBCASE("only the differing attribute contributes") {
    CHECK(mlca::cim(vec({0.0, 0.0}), vec({0.0, 3.0}), unit) ==
          doctest::Approx(0.7031681887933205).epsilon(1e-15));
  }
  SUBCASE("saturates at one for distant points") {
    CHECK(mlca::cim(vec({0.0}), vec({1000.0}), unit) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(mlca::cim(vec({0.0}), vec({0.0, 1.0}), unit), mlca::ContractViolation);
    CHECK_THROWS_AS(mlca::cim(mlca::Vector(), mlca::Vector(), unit), mlca::ContractViolation);
  }
}

TEST_CASE("per-attribute dissimilarity") {
  SUBCASE("identical points have zero dissimilarity") {
    const mlca::Vector x = vec({1.0, 2.0});
    CHECK(mlca::cim_individual(x, x, vec({0.5, 2.0})) == 0.0);
  }
  SUBCASE("collapses to the scalar form in one dimension") {
    const mlca::Vector x = vec({0.3});
    const mlca::Vector y = vec({-1.2});
    for (double s : {0.2, 1.0, 3.5}) {
      CHECK(mlca::cim_individual(x, y, vec({s})) == mlca::cim(x, y, mlca::Bandwidth(s)));
    }
  }
  SUBCASE("averages per-attribute terms") {
    // Attribute 0: delta 3, sigma 1. Attribute 1: delta 0, term 0.
    CHECK(mlca::cim_individual(vec({0.0, 0.0}), vec({3.0, 0.0}), vec({1.0, 5.0})) ==
          doctest::Approx(0.49721499461041946).epsilon(1e-15));
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(mlca::cim_individual(vec({0.0}), vec({0.0}), vec({1.0, 1.0})),
                    mlca::ContractViolation);
  }
}

TEST_CASE("per-group dissimilarity") {
  SUBCASE("identical points have zero dissimilarity") {
    const mlca::Vector x = vec({1.0, 2.0, 3.0});
    const mlca::AttributeGrouping grouping({0, 0, 1});
    CHECK(mlca::cim_clustered(x, x, grouping, std::vector<double>{1.0, 2.0}) == 0.0);
  }
  SUBCASE("single group collapses to the scalar form") {
    const mlca::Vector x = vec({0.1, 0.9, -0.4});
    const mlca::Vector y = vec({0.6, 0.2, 0.3});
    const auto grouping = mlca::AttributeGrouping::trivial(3);
    CHECK(mlca::cim_clustered(x, y, grouping, std::vector<double>{0.7}) ==
          doctest::Approx(mlca::cim(x, y, mlca::Bandwidth(0.7))).epsilon(1e-15));
  }
  SUBCASE("singleton groups collapse to the per-attribute form") {
    const mlca::Vector x = vec({0.1, 0.9, -0.4});
    const mlca::Vector y = vec({0.6, 0.2, 0.3});
    const mlca::AttributeGrouping grouping({0, 1, 2});
    CHECK(mlca::cim_clustered(x, y, grouping, std::vector<double>{0.7, 1.3, 0.2}) ==
          doctest::Approx(mlca::cim_individual(x, y, vec({0.7, 1.3, 0.2}))).epsilon(1e-15));
  }
  SUBCASE("two-group value") {
    // Group 0 = attributes {0,1} with sigma 1, group 1 = attribute {2} with
    // sigma 0.5; deltas (3, 0, 1).
    const mlca::AttributeGrouping grouping({0, 0, 1});
    CHECK(mlca::cim_clustered(vec({0.0, 0.0, 0.0}), vec({3.0, 0.0, 1.0}), grouping,
                              std::vector<double>{1.0, 0.5}) ==
          doctest::Approx(0.8165208419127572).epsilon(1e-15));
  }
  SUBCASE("bandwidth count must match the group count") {
    const mlca::AttributeGrouping grouping({0, 0, 1});
    CHECK_THROWS_AS(mlca::cim_clustered(vec({0.0, 0.0, 0.0}), vec({1.0, 1.0, 1.0}), grouping,
                                        std::vector<double>{1.0}),
                    mlca::ContractViolation);
  }
  SUBCASE("dimension mismatch is rejected") {
    const mlca::AttributeGrouping grouping({0, 0});
    CHECK_THROWS_AS(mlca::cim_clustered(vec({0.0}), vec({0.0}), grouping,
                                        std::vector<double>{1.0}),
                    mlca::ContractViolation);
  }
}

TEST_CASE("attribute standard deviation over a window") {
  SUBCASE("balanced +-1 window has unit deviation exactly") {
    std::vector<mlca::Vector> window;
    for (int i = 0; i < 25; ++i) window.push_back(vec({-1.0}));
    for (int i = 0; i < 25; ++i) window.push_back(vec({1.0}));
    const mlca::Vector stds = mlca::attribute_std(window);
    REQUIRE(stds.size() == 1);
    CHECK(stds[0] == 1.0);
  }
  SUBCASE("constant attribute has zero deviation") {
    const std::vector<mlca::Vector> window{vec({3.0, 1.0}), vec({3.0, 2.0}), vec({3.0, 3.0})};
    const mlca::Vector stds = mlca::attribute_std(window);
    CHECK(stds[0] == 0.0);
    CHECK(stds[1] > 0.0);
  }
  SUBCASE("divides by the window size, not size minus one") {
    const std::vector<mlca::Vector> window{vec({0.0}), vec({2.0})};
    CHECK(mlca::attribute_std(window)[0] == 1.0);  // mean 1, squared deviations 1,1
  }
  SUBCASE("ragged or empty windows are rejected") {
    CHECK_THROWS_AS(mlca::attribute_std({}), mlca::ContractViolation);
    CHECK_THROWS_AS(mlca::attribute_std({vec({1.0}), vec({1.0, 2.0})}), mlca::ContractViolation);
  }
}

TEST_CASE("bandwidth estimation from deviations") {
  SUBCASE("one-dimensional reference value") {
    // std 1, 50 samples: (4/3)^(1/5) * 50^(-1/5).
    const mlca::Vector out = mlca::bandwidth_from_std(vec({1.0}), 50, 1);
    CHECK(out[0] == doctest::Approx(0.4843884136334891).epsilon(1e-14));
  }
  SUBCASE("scales linearly with the deviation") {
    const mlca::Vector out = mlca::bandwidth_from_std(vec({1.0, 2.0}), 50, 2);
    CHECK(out[1] == 2.0 * out[0]);
  }
  SUBCASE("zero deviation falls back to the positive floor") {
    const mlca::Vector out = mlca::bandwidth_from_std(vec({0.0, 1.0}), 50, 2);
    CHECK(out[0] == mlca::kBandwidthFloor);
    CHECK(out[1] > mlca::kBandwidthFloor);
  }
  SUBCASE("shrinks as the sample grows") {
    const double few = mlca::bandwidth_from_std(vec({1.0}), 50, 1)[0];
    const double many = mlca::bandwidth_from_std(vec({1.0}), 5000, 1)[0];
    CHECK(many < few);
  }
  SUBCASE("bad arguments are rejected") {
    CHECK_THROWS_AS(mlca::bandwidth_from_std(vec({1.0}), 0, 1), mlca::ContractViolation);
    CHECK_THROWS_AS(mlca::bandwidth_from_std(vec({1.0}), 50, 0), mlca::ContractViolation);
  }
}

TEST_CASE("full-window bandwidth estimate") {
  SUBCASE("matches the two-step construction") {
    std::vector<mlca::Vector> window;
    for (int i = 0; i < 25; ++i) window.push_back(vec({-1.0, 0.0}));
    for (int i = 0; i < 25; ++i) window.push_back(vec({1.0, 4.0}));
    const mlca::BandwidthVector bv = mlca::estimate_bandwidth(window);
    const mlca::Vector direct =
        mlca::bandwidth_from_std(mlca::attribute_std(window), window.size(), 2);
    CHECK(bv.values()[0] == direct[0]);
    CHECK(bv.values()[1] == direct[1]);
  }
  SUBCASE("windows below two instances are data errors") {
    CHECK_THROWS_AS(mlca::estimate_bandwidth({}), mlca::DataError);
    CHECK_THROWS_AS(mlca::estimate_bandwidth({vec({1.0})}), mlca::DataError);
  }
  SUBCASE("all-constant window yields the floor everywhere") {
    const std::vector<mlca::Vector> window{vec({2.0, 2.0}), vec({2.0, 2.0})};
    const mlca::BandwidthVector bv = mlca::estimate_bandwidth(window);
    CHECK(bv.values()[0] == mlca::kBandwidthFloor);
    CHECK(bv.values()[1] == mlca::kBandwidthFloor);
  }
}

TEST_CASE("scalar bandwidth is the median of the per-attribute values") {
  CHECK(mlca::scalar_bandwidth(mlca::BandwidthVector(vec({0.3}))).value() == 0.3);
  CHECK(mlca::scalar_bandwidth(mlca::BandwidthVector(vec({0.1, 0.5, 0.9}))).value() == 0.5);
  CHECK(mlca::scalar_bandwidth(mlca::BandwidthVector(vec({0.9, 0.1, 0.5}))).value() == 0.5);
  // Even length: mean of the central pair.
  CHECK(mlca::scalar_bandwidth(mlca::BandwidthVector(vec({0.1, 0.2, 0.6, 0.9}))).value() == 0.4);
  CHECK(mlca::scalar_bandwidth(mlca::BandwidthVector(vec({0.2, 0.8}))).value() == 0.5);
}

TEST_CASE("per-group bandwidth estimation") {
  SUBCASE("singleton groups match the per-attribute estimate") {
    const mlca::Vector stds = vec({1.0, 2.0});
    const mlca::AttributeGrouping grouping({0, 1});
    const auto grouped = mlca::group_bandwidth_from_std(stds, 50, grouping);
    const mlca::Vector single = mlca::bandwidth_from_std(stds, 50, 1);
    REQUIRE(grouped.size() == 2);
    CHECK(grouped[0].value() == single[0]);
    CHECK(grouped[1].value() == single[1]);
  }
  SUBCASE("a two-attribute group uses its own dimension in the exponents") {
    // Both stds 1, group dimension 2: (4/4)^(1/6) * 50^(-1/6) = 50^(-1/6).
    const mlca::AttributeGrouping grouping({0, 0});
    const auto grouped = mlca::group_bandwidth_from_std(vec({1.0, 1.0}), 50, grouping);
    REQUIRE(grouped.size() == 1);
    CHECK(grouped[0].value() == doctest::Approx(0.5210007309586914).epsilon(1e-14));
  }
  SUBCASE("constant attributes contribute the floor to their group") {
    const mlca::AttributeGrouping grouping({0, 0});
    const auto grouped = mlca::group_bandwidth_from_std(vec({0.0, 0.0}), 50, grouping);
    CHECK(grouped[0].value() == mlca::kBandwidthFloor);
  }
  SUBCASE("window entry point enforces the minimum window") {
    CHECK_THROWS_AS(mlca::group_bandwidth({vec({1.0})}, mlca::AttributeGrouping::trivial(1)),
                    mlca::DataError);
  }
}

TEST_CASE("attribute grouping invariants") {
  CHECK_THROWS_AS(mlca::AttributeGrouping({}), mlca::ContractViolation);
  CHECK_THROWS_AS(mlca::AttributeGrouping({0, -1}), mlca::ContractViolation);
  CHECK_THROWS_AS(mlca::AttributeGrouping({0, 2}), mlca::ContractViolation);  // group 1 empty

  const mlca::AttributeGrouping g({0, 1, 0, 2});
  CHECK(g.groups() == 3);
  CHECK(g.dimension() == 4);
  CHECK(g.group_dims() == std::vector<int>{2, 1, 1});
  CHECK(g.group_of(2) == 0);

  const auto trivial = mlca::AttributeGrouping::trivial(5);
  CHECK(trivial.groups() == 1);
  CHECK(trivial.group_dims() == std::vector<int>{5});
}

TEST_CASE("dissimilarity properties hold over random inputs") {
  mlca::Rng rng = mlca::make_rng(20240817, 0);
  for (int iter = 0; iter < 2000; ++iter) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(mlca::uniform_index(rng, 6));
    mlca::Vector x(d), y(d), sigmas(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      x[i] = mlca::uniform_in(rng, -5.0, 5.0);
      y[i] = mlca::uniform_in(rng, -5.0, 5.0);
      sigmas[i] = mlca::uniform_in(rng, 0.05, 3.0);
    }
    const mlca::Bandwidth sigma(sigmas[0]);

    // Range and symmetry for all three forms.
    const double base = mlca::cim(x, y, sigma);
    REQUIRE(base >= 0.0);
    REQUIRE(base <= 1.0);
    REQUIRE(base == mlca::cim(y, x, sigma));

    const double indiv = mlca::cim_individual(x, y, sigmas);
    REQUIRE(indiv >= 0.0);
    REQUIRE(indiv <= 1.0);
    REQUIRE(indiv == mlca::cim_individual(y, x, sigmas));

    std::vector<int> assignment(static_cast<std::size_t>(d));
    int next_group = 0;
    for (auto& a : assignment) {
      a = static_cast<int>(mlca::uniform_index(rng, static_cast<std::size_t>(next_group) + 1));
      if (a == next_group) ++next_group;
    }
    const mlca::AttributeGrouping grouping(assignment);
    std::vector<double> group_sigmas(static_cast<std::size_t>(grouping.groups()));
    for (auto& s : group_sigmas) s = mlca::uniform_in(rng, 0.05, 3.0);
    const double grouped = mlca::cim_clustered(x, y, grouping, group_sigmas);
    REQUIRE(grouped >= 0.0);
    REQUIRE(grouped <= 1.0);
    REQUIRE(grouped == mlca::cim_clustered(y, x, grouping, group_sigmas));

    // Identity of indiscernibles.
    REQUIRE(mlca::cim(x, x, sigma) == 0.0);
    REQUIRE(mlca::cim_individual(x, x, sigmas) == 0.0);
    REQUIRE(mlca::cim_clustered(x, x, grouping, group_sigmas) == 0.0);

    // A wider kernel never increases the dissimilarity.
    const double wider = mlca::cim(x, y, mlca::Bandwidth(2.0 * sigmas[0]));
    REQUIRE(wider <= base + 1e-15);

    // Collapse identities.
    if (d == 1) {
      REQUIRE(indiv == base);
    }
    const auto trivial = mlca::AttributeGrouping::trivial(d);
    REQUIRE(mlca::cim_clustered(x, y, trivial, std::vector<double>{sigmas[0]}) ==
            doctest::Approx(base).epsilon(1e-14));
    std::vector<int> singleton(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) singleton[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::vector<double> per_attr(sigmas.data(), sigmas.data() + d);
    REQUIRE(mlca::cim_clustered(x, y, mlca::AttributeGrouping(singleton), per_attr) ==
            doctest::Approx(indiv).epsilon(1e-14));

    // Rescaling points and bandwidth by a power of two changes nothing.
    REQUIRE(mlca::cim(2.0 * x, 2.0 * y, mlca::Bandwidth(2.0 * sigmas[0])) == base);
  }
}
