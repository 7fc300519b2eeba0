#include "qmw/deform.hpp"

#include <cmath>
#include <string>

namespace qmw {

namespace {

RealMatrix from_row_major(int d, std::span<const double> v) {
  if (d < 2) throw ThetaError("theta: dimension must be >= 2");
  if (v.size() != static_cast<std::size_t>(d * d))
    throw ThetaError("theta: expected " + std::to_string(d * d) + " entries, got " + std::to_string(v.size()));
  RealMatrix e(d, d);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) e(mu, nu) = v[static_cast<std::size_t>(mu * d + nu)];
  return e;
}

}  // namespace

ThetaMatrix::ThetaMatrix(int d, std::span<const double> row_major) : d_(d), e_(from_row_major(d, row_major)) {
  validate();
}

ThetaMatrix ThetaMatrix::zero(int d) {
  if (d < 2) throw ThetaError("theta: dimension must be >= 2");
  return ThetaMatrix(d, RealMatrix(RealMatrix::Zero(d, d)));
}

ThetaMatrix ThetaMatrix::time_space(int d, double value) {
  ThetaMatrix t = zero(d);
  t.e_(0, 1) = value;
  t.e_(1, 0) = -value;
  return t;
}

ThetaMatrix ThetaMatrix::unchecked(int d, std::span<const double> row_major) {
  return ThetaMatrix(d, from_row_major(d, row_major));
}

std::vector<double> ThetaMatrix::flattened() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(d_ * d_));
  for (int mu = 0; mu < d_; ++mu)
    for (int nu = 0; nu < d_; ++nu) v.push_back(e_(mu, nu));
  return v;
}

double ThetaMatrix::antisymmetry_defect() const { return (e_ + e_.transpose()).cwiseAbs().maxCoeff(); }

double ThetaMatrix::skewness_defect() const {
  double worst = 0.0;
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b) {
      const RealVector ea = RealVector::Unit(d_, a);
      const RealVector eb = RealVector::Unit(d_, b);
      worst = std::max(worst, std::abs(twist(ea, eb) + twist(eb, ea)));
    }
  return worst;
}

void ThetaMatrix::validate() const {
  if (!e_.allFinite()) throw ThetaError("theta: entries must be finite");
  for (int mu = 0; mu < d_; ++mu)
    for (int nu = 0; nu < d_; ++nu)
      if (e_(mu, nu) != -e_(nu, mu))
        throw ThetaError("theta: antisymmetry violated, theta^{" + std::to_string(mu) + std::to_string(nu) +
                         "} != -theta^{" + std::to_string(nu) + std::to_string(mu) + "}");
  if (skewness_defect() > 1e-14) throw ThetaError("theta: not skew-symmetric with respect to the Minkowski metric");
}

ThetaMatrix operator-(const ThetaMatrix& theta) {
  const auto v = theta.flattened();
  std::vector<double> neg(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
  return ThetaMatrix::unchecked(theta.dim(), neg);
}

namespace {

void check_compatible(const FockOperator& a, const ThetaMatrix& theta, const SectorTable& sectors,
                      const char* what) {
  if (a.dim() != sectors.npart.size()) throw OperatorError(std::string(what) + ": operator does not match the basis");
  if (theta.dim() != sectors.dim()) throw ThetaError(std::string(what) + ": theta dimension does not match d");
  theta.validate();
}

// Entrywise factor exp(i eta(theta q_col, q_row)), or its conjugate.
SparseMatrix twisted(const SparseMatrix& m, const RealMatrix& q, const RealMatrix& thq, double sign) {
  SparseMatrix out = m;
  for (Eigen::Index r = 0; r < out.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(out, r); it; ++it)
      it.valueRef() *= std::polar(1.0, sign * q.row(it.row()).dot(thq.row(it.col())));
  return out;
}

FockOperator finish(SparseMatrix m, bool conserving, std::string label) {
  FockOperator op;
  op.matrix = std::move(m);
  SparseMatrix adj = op.matrix.adjoint();
  op.hermitian = max_abs(SparseMatrix(op.matrix - adj)) <= 1e-12;
  op.number_conserving = conserving;
  op.label = std::move(label);
  return op;
}

}  // namespace

FockOperator warp(const FockOperator& a, const ThetaMatrix& theta, const SectorTable& sectors) {
  check_compatible(a, theta, sectors, "warp");
  const RealMatrix thq = sectors.q * theta.entries().transpose();  // row v: (theta q_v)^mu
  return finish(twisted(a.matrix, sectors.q, thq, +1.0), a.number_conserving, a.label + "_theta");
}

FockOperator rieffel_product(const FockOperator& a, const FockOperator& b, const ThetaMatrix& theta,
                             const SectorTable& sectors, Twist twist) {
  check_compatible(a, theta, sectors, "rieffel_product");
  check_compatible(b, theta, sectors, "rieffel_product");
  const bool conserving = a.number_conserving && b.number_conserving;
  const std::string label = a.label + " x_theta " + b.label;
  if (twist == Twist::dropped) return finish(multiply(a.matrix, b.matrix, sectors), conserving, label);

  // With tau(x, y) = eta(theta x, y) and tau(q, q) = 0 the twist phase splits:
  //   tau(q_w - q_v, q_u - q_w) = tau(q_w, q_u) + tau(q_v, q_w) - tau(q_v, q_u),
  // so the sum over w is an ordinary product of the entrywise-twisted factors
  // followed by one inverse twist per (u, v).
  const RealMatrix thq = sectors.q * theta.entries().transpose();
  const SparseMatrix ta = twisted(a.matrix, sectors.q, thq, +1.0);
  const SparseMatrix tb = twisted(b.matrix, sectors.q, thq, +1.0);
  return finish(twisted(multiply(ta, tb, sectors), sectors.q, thq, -1.0), conserving, label);
}

FockOperator deformed_commutator(const FockOperator& a, const FockOperator& b, const ThetaMatrix& theta,
                                 const SectorTable& sectors, Twist twist) {
  const FockOperator ab = rieffel_product(a, b, theta, sectors, twist);
  const FockOperator ba = rieffel_product(b, a, theta, sectors, twist);
  SparseMatrix diff = ab.matrix - ba.matrix;
  return finish(std::move(diff), ab.number_conserving, "[" + a.label + " x_theta, " + b.label + "]");
}

FockOperator unwarp_roundtrip(const FockOperator& a, const ThetaMatrix& theta, const SectorTable& sectors) {
  return warp(warp(a, theta, sectors), -theta, sectors);
}

}  // namespace qmw
