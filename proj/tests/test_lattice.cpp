#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmw/lattice.hpp"

using namespace qmw;

namespace {

LatticeSpec spec1(int M, double L, double m = 0.0) { return LatticeSpec{1, M, L, m}; }

}  // namespace

TEST(Lattice, OffsetGridValues) {
  const auto g = build_grid(spec1(4, 2 * std::numbers::pi));
  const double p[] = {-1.5, -0.5, 0.5, 1.5};
  const double w[] = {1.5, 0.5, 0.5, 1.5};
  ASSERT_EQ(g.num_modes(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(g.points(k, 0), p[k], 1e-15);
    EXPECT_NEAR(g.energies(k), w[k], 1e-15);
  }
}

TEST(Lattice, MassiveDispersion) {
  const auto g = build_grid(spec1(4, 2 * std::numbers::pi, 2.0));
  EXPECT_NEAR(g.energies(0), 2.5, 1e-15);
}

TEST(Lattice, TwoDimensionalMinimumEnergy) {
  const auto g = build_grid(LatticeSpec{2, 4, 2 * std::numbers::pi, 0.0});
  EXPECT_EQ(g.num_modes(), 16u);
  EXPECT_NEAR(g.energies.minCoeff(), std::sqrt(0.5), 1e-15);
}

TEST(Lattice, GridClosedUnderNegation) {
  for (int n : {1, 2}) {
    const auto g = build_grid(LatticeSpec{n, 6, 5.0, 0.3});
    for (std::size_t k = 0; k < g.num_modes(); ++k) {
      const auto nk = g.negated(k);
      EXPECT_NEAR((g.points.row(k) + g.points.row(nk)).norm(), 0.0, 1e-14);
      for (int a = 0; a < n; ++a) EXPECT_GT(std::abs(g.points(k, a)), 0.0);
    }
  }
}

TEST(Lattice, ValidationRejectsBadSpecs) {
  EXPECT_THROW(validate(spec1(5, 1.0)), LatticeError);
  EXPECT_THROW(validate(spec1(2, 1.0)), LatticeError);
  EXPECT_THROW(validate(spec1(4, 0.0)), LatticeError);
  EXPECT_THROW(validate(spec1(4, 1.0, -1.0)), LatticeError);
  EXPECT_THROW(validate(LatticeSpec{0, 4, 1.0, 0.0}), LatticeError);
  EXPECT_NO_THROW(validate(spec1(4, 1.0)));
}

TEST(Lattice, DftMatchesDirectSumAndIsUnitary) {
  for (int n : {1, 2}) {
    const auto g = build_grid(LatticeSpec{n, 4, 3.0, 0.0});
    const auto W = dft_one_particle(g).entries;
    const auto K = static_cast<Eigen::Index>(g.num_modes());
    const double norm = std::pow(4.0, -n / 2.0);
    for (Eigen::Index m = 0; m < K; ++m)
      for (Eigen::Index k = 0; k < K; ++k) {
        double phase = 0.0;
        for (int a = 0; a < n; ++a) phase += g.points(k, a) * g.dual_points(m, a);
        EXPECT_NEAR(std::abs(W(m, k) - norm * std::polar(1.0, phase)), 0.0, 1e-13);
      }
    const DenseMatrix id = DenseMatrix::Identity(K, K);
    EXPECT_LE(max_abs(DenseMatrix(W.adjoint() * W - id)), 1e-12);
    for (Eigen::Index k = 0; k < K; ++k) EXPECT_NEAR(W.col(k).norm(), 1.0, 1e-13);
  }
}

TEST(Lattice, DftOfConstantConcentratesAtCentre) {
  const auto g = build_grid(spec1(8, 8.0));
  const auto W = dft_one_particle(g).entries;
  const StateVector v = W * StateVector::Ones(8);
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  EXPECT_LT(std::abs(g.dual_points(arg, 0)), g.spec.dx());
}

TEST(Lattice, PositionMultiplierSpectrumIsDualGrid) {
  const auto g = build_grid(spec1(4, 6.0));
  const auto Q = position_multiplier(g, [](std::span<const double> x) { return x[0]; });
  EXPECT_TRUE(Q.hermitian);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(Q.entries);
  std::vector<double> want(g.dual_points.col(0).data(), g.dual_points.col(0).data() + 4);
  std::sort(want.begin(), want.end());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(es.eigenvalues()(i), want[static_cast<std::size_t>(i)], 1e-13);
}

TEST(Lattice, ConstantAndAbsoluteMultipliers) {
  const auto g = build_grid(LatticeSpec{2, 4, 5.0, 0.0});
  const auto one = position_multiplier(g, [](std::span<const double>) { return 1.0; });
  EXPECT_LE(max_abs(DenseMatrix(one.entries - DenseMatrix::Identity(16, 16))), 1e-13);
  const auto absx =
      position_multiplier(g, [](std::span<const double> x) { return std::sqrt(x[0] * x[0] + x[1] * x[1]); });
  EXPECT_TRUE(absx.hermitian);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(absx.entries);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-13);
}

TEST(Lattice, CentralDifferenceIsRealAntisymmetric) {
  const auto g = build_grid(LatticeSpec{2, 6, 4.0, 0.0});
  const auto D = central_difference(g, 1).entries;
  EXPECT_LE(max_abs(DenseMatrix(D + D.transpose())), 1e-15);
  EXPECT_LE(D.imag().cwiseAbs().maxCoeff(), 0.0);
}
