#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qmw/deform.hpp"

using namespace qmw;

namespace {

DenseMatrix dense(const FockOperator& a) { return DenseMatrix(a.matrix); }

FockOperator random_op(const FockSpace& s, unsigned seed, double density = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  const auto D = static_cast<Eigen::Index>(s.basis.size());
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = 0; j < D; ++j)
      if (u(rng) < density) t.emplace_back(i, j, cplx(g(rng), g(rng)));
  SparseMatrix m(D, D);
  m.setFromTriplets(t.begin(), t.end());
  return make_operator(std::move(m), s.sectors, "random");
}

// eta(theta x, y) = theta^{mu nu} x_nu y_mu, written out without the class
double phase(const std::vector<double>& th, int d, const RealVector& x, const RealVector& y) {
  double s = 0.0;
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) s += th[static_cast<std::size_t>(mu * d + nu)] * x(nu) * y(mu);
  return s;
}

DenseMatrix triple_sum(const DenseMatrix& A, const DenseMatrix& B, const std::vector<double>& th, int d,
                       const RealMatrix& q) {
  const auto D = A.rows();
  DenseMatrix out = DenseMatrix::Zero(D, D);
  for (Eigen::Index u = 0; u < D; ++u)
    for (Eigen::Index v = 0; v < D; ++v)
      for (Eigen::Index w = 0; w < D; ++w) {
        const RealVector x = (q.row(w) - q.row(v)).transpose();
        const RealVector y = (q.row(u) - q.row(w)).transpose();
        out(u, v) += std::polar(1.0, phase(th, d, x, y)) * A(u, w) * B(w, v);
      }
  return out;
}

const std::vector<double> kTheta3{0.0, 0.1, -0.07, -0.1, 0.0, 0.05, 0.07, -0.05, 0.0};

}  // namespace

TEST(Theta, ValidationNamesInvariant) {
  const std::vector<double> sym{0.0, 0.1, 0.1, 0.0};
  try {
    ThetaMatrix(2, sym);
    FAIL();
  } catch (const ThetaError& e) {
    EXPECT_NE(std::string(e.what()).find("antisymmetry"), std::string::npos);
  }
  const std::vector<double> diag{0.2, 0.0, 0.0, 0.0};
  EXPECT_THROW(ThetaMatrix(2, diag), ThetaError);
  const std::vector<double> shortv{0.0, 0.1, -0.1};
  EXPECT_THROW(ThetaMatrix(2, shortv), ThetaError);
  EXPECT_NO_THROW(ThetaMatrix(3, kTheta3));
}

TEST(Theta, SkewnessAndZeroDiagonalTwist) {
  const ThetaMatrix th(3, kTheta3);
  EXPECT_LE(th.antisymmetry_defect(), 0.0);
  EXPECT_LE(th.skewness_defect(), 1e-14);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    RealVector q(3);
    for (int a = 0; a < 3; ++a) q(a) = g(rng);
    EXPECT_NEAR(th.twist(q, q), 0.0, 1e-15);
  }
  EXPECT_NEAR(th.mixed(0, 1), th.mixed(1, 0), 1e-15);
  EXPECT_NEAR(th.mixed(1, 2), -th.mixed(2, 1), 1e-15);
}

TEST(Warp, EntryPhase) {
  const auto s = make_fock_space(LatticeSpec{1, 4, 2 * std::numbers::pi, 0.0}, 1);
  const auto th = ThetaMatrix::time_space(2, 0.1);
  const auto a = random_op(s, 1, 1.0);
  const DenseMatrix w = dense(warp(a, th, s.sectors));
  const auto v = static_cast<Eigen::Index>(*s.basis.index({2}));  // q = (0.5, 0.5)
  const auto u = static_cast<Eigen::Index>(*s.basis.index({0}));  // q = (1.5, -1.5)
  // theta q_v = (0.05, -0.05) contravariant, contracted with q_u gives +0.15
  EXPECT_NEAR(std::abs(w(u, v) - std::polar(1.0, 0.15) * dense(a)(u, v)), 0.0, 1e-14);
}

TEST(Warp, ZeroThetaAndFixedPoints) {
  const auto s = make_fock_space(LatticeSpec{2, 4, 3.0, 0.0}, 2);
  const ThetaMatrix th(3, kTheta3);
  const auto a = random_op(s, 2);
  EXPECT_LE(max_abs(DenseMatrix(dense(warp(a, ThetaMatrix::zero(3), s.sectors)) - dense(a))), 0.0);
  for (const auto& f : {momentum_op(s, 0), momentum_op(s, 1), momentum_op(s, 2), number_op(s)})
    EXPECT_LE(max_abs(DenseMatrix(dense(warp(f, th, s.sectors)) - dense(f))), 1e-12);
}

TEST(Warp, RoundTrip) {
  const auto s = make_fock_space(LatticeSpec{2, 4, 3.0, 0.0}, 2);
  const ThetaMatrix th(3, kTheta3);
  for (const auto& a : {random_op(s, 3), coordinate_op_spectral(s, 1)}) {
    EXPECT_LE(max_abs(DenseMatrix(dense(unwarp_roundtrip(a, th, s.sectors)) - dense(a))), 1e-14);
    const auto w = warp(a, th, s.sectors);
    const auto www = warp(warp(w, -th, s.sectors), th, s.sectors);
    EXPECT_LE(max_abs(DenseMatrix(dense(www) - dense(w))), 1e-14);
  }
}

TEST(Rieffel, MatchesTripleSumOracle) {
  const auto s = make_fock_space(LatticeSpec{2, 4, 3.0, 0.3}, 1);
  const ThetaMatrix th(3, kTheta3);
  const auto a = random_op(s, 4), b = random_op(s, 5);
  const DenseMatrix want = triple_sum(dense(a), dense(b), kTheta3, 3, s.sectors.q);
  EXPECT_LE(max_abs(DenseMatrix(dense(rieffel_product(a, b, th, s.sectors)) - want)), 1e-12);
}

TEST(Rieffel, ZeroThetaIsOrdinaryProduct) {
  const auto s = make_fock_space(LatticeSpec{1, 4, 3.0, 0.0}, 2);
  const auto a = random_op(s, 6), b = random_op(s, 7);
  const DenseMatrix prod = dense(a) * dense(b);
  EXPECT_LE(max_abs(DenseMatrix(dense(rieffel_product(a, b, ThetaMatrix::zero(2), s.sectors)) - prod)), 1e-13);
}

TEST(Rieffel, ProductLawAndAssociativity) {
  const auto s = make_fock_space(LatticeSpec{1, 4, 3.0, 0.0}, 2);
  const auto th = ThetaMatrix::time_space(2, 0.1);
  const auto &S = s.sectors;
  for (unsigned seed = 10; seed < 14; ++seed) {
    const auto a = random_op(s, seed), b = random_op(s, seed + 100), c = random_op(s, seed + 200);
    const DenseMatrix lhs = dense(warp(a, th, S)) * dense(warp(b, th, S));
    const DenseMatrix rhs = dense(warp(rieffel_product(a, b, th, S), th, S));
    EXPECT_LE(max_abs(DenseMatrix(lhs - rhs)), 1e-12);
    const auto ab_c = rieffel_product(rieffel_product(a, b, th, S), c, th, S);
    const auto a_bc = rieffel_product(a, rieffel_product(b, c, th, S), th, S);
    EXPECT_LE(max_abs(DenseMatrix(dense(ab_c) - dense(a_bc))), 1e-12);
  }
}

TEST(DeformedCommutator, Properties) {
  const auto s = make_fock_space(LatticeSpec{1, 4, 3.0, 0.0}, 2);
  const auto th = ThetaMatrix::time_space(2, 0.1);
  const auto &S = s.sectors;
  const auto a = random_op(s, 20), b = random_op(s, 21);
  const DenseMatrix plain = dense(a) * dense(b) - dense(b) * dense(a);
  EXPECT_LE(max_abs(DenseMatrix(dense(deformed_commutator(a, b, ThetaMatrix::zero(2), S)) - plain)), 1e-13);
  EXPECT_LE(max_abs(DenseMatrix(dense(deformed_commutator(a, b, th, S)) + dense(deformed_commutator(b, a, th, S)))),
            0.0);
  const auto p = momentum_op(s, 1);
  EXPECT_LE(max_abs(deformed_commutator(p, p, th, S).matrix), 0.0);
}

TEST(DeformedCommutator, TimeSpaceCoordinatesAgainstOracle) {
  const auto s = make_fock_space(LatticeSpec{1, 4, 3.0, 0.0}, 2);
  const std::vector<double> t{0.0, 0.1, -0.1, 0.0};
  const ThetaMatrix th(2, t);
  const auto x0 = time_op(s), x1 = coordinate_op_spectral(s, 1);
  const DenseMatrix want = triple_sum(dense(x0), dense(x1), t, 2, s.sectors.q) -
                           triple_sum(dense(x1), dense(x0), t, 2, s.sectors.q);
  EXPECT_LE(max_abs(DenseMatrix(dense(deformed_commutator(x0, x1, th, s.sectors)) - want)), 1e-12);
}

TEST(DeformedCommutator, CommutatorCompatibility) {
  // [X1_theta, X2_theta] warped by -theta is [X1 x_theta, X2]
  const auto s = make_fock_space(LatticeSpec{2, 4, 3.0, 0.0}, 2);
  const ThetaMatrix th(3, kTheta3);
  const auto &S = s.sectors;
  const auto x1 = coordinate_op_spectral(s, 1), x2 = coordinate_op_spectral(s, 2);
  const auto plain = commutator(warp(x1, th, S), warp(x2, th, S));
  const auto back = warp(plain, -th, S);
  EXPECT_LE(max_abs(DenseMatrix(dense(back) - dense(deformed_commutator(x1, x2, th, S)))), 1e-12);
}
