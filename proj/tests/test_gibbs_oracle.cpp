#include <gtest/gtest.h>

#include <cmath>

#include "cayley_gibbs/gibbs_oracle.hpp"
#include "cayley_gibbs/solver.hpp"

using namespace cayley_gibbs;

namespace {

constexpr double kHStar2_08 = 2.0634370688955605467;
constexpr double kRatioAtHStar = 0.016133230340664918566;  // exp(-2 h*), mpmath

SchemeMatrix ti2() { return SchemeMatrix::make(2, {2, 0, 0, 0}, {0, 0, 2, 0}); }

}  // namespace

TEST(ConfigWeight, Examples) {
  const auto a = assign_fields(build_tree(2, 1), ti2(), FieldLabel::PlusH, {0.0, 0.0});
  const auto c = Coupling::make(0.5, 1.0);
  EXPECT_NEAR(config_weight(a, c, SpinConfig::constant(3, 1), 1), std::exp(1.0), 1e-15);
  EXPECT_NEAR(config_weight(a, c, {{1, 1, -1}}, 1), 1.0, 1e-15);
  EXPECT_THROW(config_weight(a, c, {{1, 1}}, 1), std::invalid_argument);
  EXPECT_THROW(config_weight(a, c, {{1, 0, 1}}, 1), std::invalid_argument);
}

TEST(ConfigWeight, BoundaryFieldOnlyOnLastLevel) {
  const auto a = assign_fields(build_tree(2, 2), ti2(), FieldLabel::PlusH, {0.7, 0.0});
  const auto c = Coupling::make(0.3, 1.0);
  const auto plus = SpinConfig::constant(7, 1);
  // 6 edges, 4 leaves carrying +0.7; the root and level 1 carry no field.
  EXPECT_NEAR(config_weight(a, c, plus, 2), std::exp(6 * 0.3 + 4 * 0.7), 1e-12);
  EXPECT_NEAR(config_weight(a, c, SpinConfig::constant(3, 1), 1), std::exp(2 * 0.3 + 2 * 0.7), 1e-12);
}

TEST(FiniteVolume, UniformAtZeroCoupling) {
  const auto a = assign_fields(build_tree(2, 1), ti2(), FieldLabel::PlusH, {0.0, 0.0});
  const auto mu = finite_volume_measure(a, Coupling::from_theta(0.0), 1);
  ASSERT_EQ(mu.weights.size(), 8u);
  for (std::uint64_t s = 0; s < 8; ++s) {
    EXPECT_EQ(mu.probability(s), 0.125);
  }
}

TEST(FiniteVolume, NormalizedAndMatchesConfigWeight) {
  const auto m = SchemeMatrix::make(2, {1, 0, 0, 1}, {0, 1, 1, 0});
  const auto a = assign_fields(build_tree(2, 2), m, FieldLabel::PlusH, {0.9, -0.4});
  const auto c = Coupling::from_theta(0.8);
  const auto mu = finite_volume_measure(a, c, 2);
  double total = 0.0;
  for (std::uint64_t s = 0; s < mu.weights.size(); ++s) total += mu.probability(s);
  EXPECT_NEAR(total, 1.0, 1e-12);
  const double log_z = mu.log_partition();
  for (std::uint64_t s : {0ULL, 5ULL, 77ULL, 127ULL}) {
    const double w = config_weight(a, c, SpinConfig::from_mask(s, 7), 2);
    EXPECT_NEAR(mu.probability(s), w / std::exp(log_z), 1e-14);
  }
}

TEST(FiniteVolume, CapacityError) {
  const auto a = assign_fields(build_tree(2, 4), ti2(), FieldLabel::PlusH, {0.0, 0.0});
  EXPECT_THROW(finite_volume_measure(a, Coupling::from_theta(0.5), 4), CapacityError);
  EXPECT_NO_THROW(finite_volume_measure(a, Coupling::from_theta(0.5), 3));
}

TEST(FiniteVolume, LargeCouplingStaysFinite) {
  // exp(8 * 300) overflows a double; the scaled weights must not.
  const auto a = assign_fields(build_tree(2, 3), ti2(), FieldLabel::PlusH, {300.0, 0.0});
  const auto mu = finite_volume_measure(a, Coupling::make(15.0, 1.0), 3);
  EXPECT_TRUE(std::isfinite(mu.z));
  EXPECT_TRUE(std::isfinite(mu.log_partition()));
  EXPECT_GT(mu.probability((1u << 15) - 1), 0.99);
}

TEST(RootRatio, Examples) {
  const auto c = Coupling::from_theta(0.8);
  const auto zero = assign_fields(build_tree(2, 3), ti2(), FieldLabel::PlusH, {0.0, 0.0});
  EXPECT_NEAR(root_marginal_ratio(finite_volume_measure(zero, c, 3)).ratio, 1.0, 1e-12);
  for (int n = 1; n <= 3; ++n) {
    const auto plus = zero.with_values({kHStar2_08, 0.0});
    const auto r = root_marginal_ratio(finite_volume_measure(plus, c, n));
    EXPECT_FALSE(r.plus_underflow);
    EXPECT_NEAR(r.ratio, kRatioAtHStar, 1e-10 * kRatioAtHStar) << "n=" << n;
    const auto minus = plus.negated();
    EXPECT_NEAR(root_marginal_ratio(finite_volume_measure(minus, c, n)).ratio, 1.0 / kRatioAtHStar, 1e-8);
  }
}

TEST(Kolmogorov, Examples) {
  const auto c = Coupling::from_theta(0.8);
  const auto zero = assign_fields(build_tree(2, 3), ti2(), FieldLabel::PlusH, {0.0, 0.0});
  const auto mu1 = finite_volume_measure(zero, c, 1);
  const auto mu2 = finite_volume_measure(zero, c, 2);
  EXPECT_TRUE(check_kolmogorov(mu2, mu1).pass);
  const auto star = zero.with_values({kHStar2_08, 0.0});
  EXPECT_TRUE(check_kolmogorov(finite_volume_measure(star, c, 3), finite_volume_measure(star, c, 2)).pass);
  const auto bad = zero.with_values({1.0, 0.0});
  const auto rep = check_kolmogorov(finite_volume_measure(bad, c, 3), finite_volume_measure(bad, c, 2));
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.max_discrepancy, 1e-4);
  EXPECT_THROW(check_kolmogorov(mu1, mu2), MismatchError);
  EXPECT_THROW(check_kolmogorov(mu2, mu2), MismatchError);
}

// Every scheme at k = 2, every solution, both theta values, an H and an L root.
TEST(Kolmogorov, ExhaustiveOverSchemes) {
  auto tree = std::make_shared<const FiniteTree>(2, 3);
  for (double theta : {0.6, 0.8}) {
    const auto c = Coupling::from_theta(theta);
    for_each_scheme(2, [&](const SchemeMatrix& m) {
      for (const auto& p : solve_system(reduce(m), theta).solutions) {
        for (auto root : {FieldLabel::PlusH, FieldLabel::MinusL}) {
          const auto a = assign_fields(tree, m, root, p);
          const auto mu1 = finite_volume_measure(a, c, 1);
          const auto mu2 = finite_volume_measure(a, c, 2);
          const auto mu3 = finite_volume_measure(a, c, 3);
          EXPECT_LT(check_kolmogorov(mu2, mu1).max_discrepancy, 1e-12);
          EXPECT_LT(check_kolmogorov(mu3, mu2).max_discrepancy, 1e-12);
          for (const auto* mu : {&mu1, &mu2, &mu3}) {
            const double want = std::exp(-2.0 * numeric_field(a, 0));
            EXPECT_NEAR(root_marginal_ratio(*mu).ratio / want, 1.0, 1e-10);
          }
        }
      }
    });
  }
}

TEST(Kolmogorov, NonSolutionsFail) {
  auto tree = std::make_shared<const FiniteTree>(2, 3);
  const double theta = 0.8;
  const auto c = Coupling::from_theta(theta);
  for_each_scheme(2, [&](const SchemeMatrix& m) {
    for (const auto& p : solve_system(reduce(m), theta).solutions) {
      const auto a = assign_fields(tree, m, FieldLabel::PlusH, {p.h + 0.1, p.l + 0.1});
      const auto rep = check_kolmogorov(finite_volume_measure(a, c, 3), finite_volume_measure(a, c, 2));
      EXPECT_GE(rep.max_discrepancy, 1e-4);
    }
  });
}

TEST(SpinFlip, NegatedLabelsGiveFlippedMeasure) {
  const auto m = SchemeMatrix::make(2, {1, 1, 0, 0}, {0, 0, 1, 1});
  const auto a = assign_fields(build_tree(2, 3), m, FieldLabel::PlusH, {0.8, 0.3});
  const auto c = Coupling::from_theta(0.7);
  const auto mu = finite_volume_measure(a, c, 3);
  const auto flipped = finite_volume_measure(a.negated(), c, 3);
  const std::uint64_t all = (std::uint64_t{1} << 15) - 1;
  for (std::uint64_t s = 0; s <= all; ++s) {
    EXPECT_NEAR(mu.probability(s) / flipped.probability(all ^ s), 1.0, 1e-12);
  }
}

TEST(PinnedVariation, EqualsKBetaOfFreeRatio) {
  auto tree = std::make_shared<const FiniteTree>(2, 4);
  for (double theta : {0.6, 0.8}) {
    const auto c = Coupling::from_theta(theta);
    for_each_scheme(2, [&](const SchemeMatrix& m) {
      for (const auto& p : solve_system(reduce(m), theta).solutions) {
        const auto a = assign_fields(tree, m, FieldLabel::PlusH, p);
        for (Vertex z : {Vertex{1}, Vertex{2}, Vertex{4}}) {
          const auto pv = parent_pinned_variation(a, c, 4, z);
          EXPECT_NEAR(pv.variation, k_beta(c, pv.free_ratio), 1e-12);
          EXPECT_NEAR(pv.free_ratio / std::exp(-2.0 * numeric_field(a, z)), 1.0, 1e-10);
        }
      }
    });
  }
}
