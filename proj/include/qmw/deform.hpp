#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "qmw/ops.hpp"

namespace qmw {

class ThetaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Deformation matrix, stored contravariantly as theta^{mu nu}.
///
/// Index conventions: momenta q_mu are covariant, (theta q)^mu =
/// theta^{mu nu} q_nu is a contravariant translation, and the twist form is
/// eta(theta x, y) = theta^{mu nu} x_nu y_mu. Antisymmetry of theta^{mu nu}
/// is the same statement as Minkowski skewness of the mixed matrix
/// theta^mu_nu, i.e. theta_{0j} = theta_{j0} and theta_{kj} = -theta_{jk} in
/// mixed components.
class ThetaMatrix {
 public:
  /// Validating constructor; throws ThetaError naming the violated invariant.
  ThetaMatrix(int d, std::span<const double> row_major);

  static ThetaMatrix zero(int d);
  /// theta^{0 1} = -theta^{1 0} = value.
  static ThetaMatrix time_space(int d, double value);
  /// No validation; for negative controls only.
  static ThetaMatrix unchecked(int d, std::span<const double> row_major);

  int dim() const { return d_; }
  double upper(int mu, int nu) const { return e_(mu, nu); }
  double lower(int mu, int nu) const { return metric(mu) * metric(nu) * e_(mu, nu); }
  double mixed(int mu, int nu) const { return e_(mu, nu) * metric(nu); }
  const RealMatrix& entries() const { return e_; }
  std::vector<double> flattened() const;

  /// Largest |theta^{mu nu} + theta^{nu mu}|.
  double antisymmetry_defect() const;
  /// Largest |eta(theta e_a, e_b) + eta(e_a, theta e_b)| over basis vectors.
  double skewness_defect() const;
  void validate() const;

  /// (theta q)^mu for covariant q.
  RealVector apply(const RealVector& q) const { return e_ * q; }
  /// eta(theta x, y) for covariant x, y.
  double twist(const RealVector& x, const RealVector& y) const { return y.dot(e_ * x); }

 private:
  ThetaMatrix(int d, RealMatrix e) : d_(d), e_(std::move(e)) {}
  int d_;
  RealMatrix e_;
};

/// How the Rieffel product treats the twist phase. `dropped` replaces it by 1
/// and exists only for negative controls.
enum class Twist { full, dropped };

/// Warped convolution on pure point spectrum:
/// (A_theta)_uv = exp(i eta(theta q_v, q_u)) A_uv.
FockOperator warp(const FockOperator& a, const ThetaMatrix& theta, const SectorTable& sectors);

/// (A x_theta B)_uv = sum_w exp(i eta(theta(q_w - q_v), q_u - q_w)) A_uw B_wv.
FockOperator rieffel_product(const FockOperator& a, const FockOperator& b, const ThetaMatrix& theta,
                             const SectorTable& sectors, Twist twist = Twist::full);

/// [A x_theta, B] = A x_theta B - B x_theta A.
FockOperator deformed_commutator(const FockOperator& a, const FockOperator& b, const ThetaMatrix& theta,
                                 const SectorTable& sectors, Twist twist = Twist::full);

/// warp(warp(A, theta), -theta).
FockOperator unwarp_roundtrip(const FockOperator& a, const ThetaMatrix& theta, const SectorTable& sectors);

ThetaMatrix operator-(const ThetaMatrix& theta);

}  // namespace qmw
