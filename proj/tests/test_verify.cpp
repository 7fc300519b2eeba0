#include <gtest/gtest.h>

#include <cmath>

#include "qmw/verify.hpp"

using namespace qmw;

TEST(FitOrder, GeometricData) {
  EXPECT_NEAR(fit_order({4e-2, 1e-2, 2.5e-3}, {0.4, 0.2, 0.1}), 2.0, 1e-12);
  EXPECT_NEAR(fit_order({1.0, 0.5, 0.25, 0.125}, {8, 4, 2, 1}), 1.0, 1e-12);
}

TEST(FitOrder, ConstantResidualsFail) {
  const std::vector<double> r{0.3, 0.3, 0.3};
  const double p = fit_order(r, {0.4, 0.2, 0.1});
  EXPECT_NEAR(p, 0.0, 1e-12);
  EXPECT_FALSE(convergence_pass(r, p, 0.9));
}

TEST(FitOrder, Preconditions) {
  EXPECT_THROW(fit_order({0.1}, {0.4}), std::invalid_argument);
  EXPECT_THROW(fit_order({0.1, 0.05}, {0.4, 0.2}), std::invalid_argument);
  EXPECT_THROW(fit_order({0.1, 0.05, 0.02}, {0.4, 0.2}), std::invalid_argument);
  EXPECT_EQ(fit_order({0.1, 0.0, 0.01}, {0.4, 0.2, 0.1}), kOrderSentinel);
}

TEST(FitOrder, PassRuleNeedsStrictDecrease) {
  EXPECT_TRUE(strictly_decreasing({3, 2, 1}));
  EXPECT_FALSE(strictly_decreasing({3, 3, 1}));
  EXPECT_FALSE(convergence_pass({0.1, 0.2, 0.01}, 2.0, 0.9));
  EXPECT_TRUE(convergence_pass({0.4, 0.1, 0.025}, 2.0, 0.9));
  EXPECT_FALSE(convergence_pass({0.4, 0.3, 0.25}, 0.5, 0.9));
}

TEST(FitOrder, ScaleInvariance) {
  // rescaling residuals or spacings leaves the slope unchanged
  const std::vector<double> r{0.2, 0.07, 0.03}, h{0.5, 0.3, 0.2};
  const double p = fit_order(r, h);
  EXPECT_NEAR(fit_order({2.0, 0.7, 0.3}, h), p, 1e-12);
  EXPECT_NEAR(fit_order(r, {5.0, 3.0, 2.0}), p, 1e-12);
}

TEST(ExactSuite, DefaultInstancePasses) {
  InstanceConfig c;
  c.lattice = LatticeSpec{1, 8, 8.0, 0.0};
  c.theta = {0.0, 0.1, -0.1, 0.0};
  const auto results = check_exact_suite(c);
  EXPECT_GE(results.size(), 12u);
  for (const auto& r : results) EXPECT_TRUE(r.pass) << r.name << " " << r.residuals.front();
}

TEST(ExactSuite, ZeroThetaPasses) {
  InstanceConfig c;
  c.lattice = LatticeSpec{1, 4, 4.0, 0.0};
  c.theta = {0.0, 0.0, 0.0, 0.0};
  for (const auto& r : check_exact_suite(c)) EXPECT_TRUE(r.pass) << r.name;
}

TEST(ExactSuite, CorruptedThetaFailsValidation) {
  const std::vector<double> sym{0.0, 0.1, 0.1, 0.0};
  const auto r = check_theta_validity(ThetaMatrix::unchecked(2, sym), 1e-12);
  EXPECT_FALSE(r.pass);
  EXPECT_GE(r.residuals.front(), 1e-3);
}

TEST(ExactSuite, NegativeControlsDetectCorruption) {
  InstanceConfig c;
  c.lattice = LatticeSpec{1, 4, 4.0, 0.0};
  c.max_particles = 2;
  c.theta = {0.0, 0.1, -0.1, 0.0};
  const auto results = check_negative_controls(c);
  EXPECT_EQ(results.size(), 3u);
  for (const auto& r : results) {
    EXPECT_TRUE(r.pass) << r.name;
    EXPECT_GE(r.residuals.front(), 1e-3) << r.name;
  }
}

TEST(Quadrature, FactorLimitIsPlainPhase) {
  // as eps -> 0 the cutoff integral tends to exp(i s c)
  for (auto [s, c] : {std::pair{0.3, -0.4}, std::pair{1.2, 0.7}}) {
    const cplx v = cutoff_phase_integral(s, c, 0.01);
    EXPECT_NEAR(std::abs(v - std::polar(1.0, s * c)), 0.0, 2e-3);
  }
}

TEST(Quadrature, GuardPasses) {
  const auto r = check_quadrature_guard(1e-3, 42);
  EXPECT_TRUE(r.pass) << r.residuals.front();
}

namespace {

StudyConfig small_study(double theta) {
  StudyConfig c;
  c.n = 1;
  c.max_particles = 1;
  c.refinements = {{4, 4.0}, {6, 6.0}, {8, 8.0}};
  c.theta = {0.0, theta, -theta, 0.0};
  c.ensemble = default_study_ensemble(42);
  return c;
}

}  // namespace

TEST(Study, ZeroThetaLemmaResidualVanishes) {
  const auto r = check_lemma8(small_study(0.0));
  for (double v : r.residuals) EXPECT_LE(v, 1e-13);
}

TEST(Study, Deterministic) {
  const auto a = check_lemma8(small_study(0.1));
  const auto b = check_lemma8(small_study(0.1));
  EXPECT_EQ(a.residuals, b.residuals);
  ASSERT_EQ(a.residuals.size(), 3u);
  EXPECT_EQ(a.levels.front(), (std::pair<int, double>{4, 4.0}));
}

TEST(Study, ThetaForDimension) {
  const auto t = theta_for_dimension({0.0, 0.1, -0.1, 0.0}, 2);
  ASSERT_EQ(t.size(), 9u);
  EXPECT_NO_THROW(ThetaMatrix(3, t));
  EXPECT_DOUBLE_EQ(t[1], 0.1);
  EXPECT_DOUBLE_EQ(std::abs(t[5]), 0.1);
}

TEST(Study, EnsembleIsNormalizedAndInterior) {
  const auto space = make_fock_space(LatticeSpec{1, 16, 16.0, 0.0}, 2);
  EnsembleOptions o = default_study_ensemble(42);
  o.reference_dp = 2 * 3.141592653589793 / 8.0;
  const auto e = build_ensemble(space, o);
  EXPECT_GE(e.states.size(), 4u);
  for (const auto& s : e.states) {
    EXPECT_NEAR(s.psi.norm(), 1.0, 1e-12) << s.label;
    EXPECT_LE(exterior_weight(space, s.psi), 1e-4) << s.label;
  }
}
