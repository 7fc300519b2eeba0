#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "qmw/fock.hpp"

namespace qmw {

class OperatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sparse matrix over a FockBasis plus structural metadata.
///
/// `hermitian` and `number_conserving` are measured on construction
/// (tolerances 1e-12 and 1e-14), never asserted by the builder.
struct FockOperator {
  SparseMatrix matrix;
  bool hermitian = false;
  bool number_conserving = false;
  std::string label;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  double hermiticity_defect() const;
};

FockOperator make_operator(SparseMatrix matrix, const SectorTable& sectors, std::string label);

/// Largest |A_uv| over pairs with different particle number.
double number_leakage(const SparseMatrix& a, const SectorTable& sectors);

FockOperator operator+(const FockOperator& a, const FockOperator& b);
FockOperator operator-(const FockOperator& a, const FockOperator& b);
FockOperator operator*(const FockOperator& a, const FockOperator& b);
FockOperator operator*(cplx s, const FockOperator& a);
FockOperator commutator(const FockOperator& a, const FockOperator& b);

/// Matrix product that exploits block structure: when both factors conserve
/// particle number, each particle-number block is multiplied densely (blocks
/// up to a few thousand states), otherwise a plain sparse product is used.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b, const SectorTable& sectors);
FockOperator commutator(const FockOperator& a, const FockOperator& b, const SectorTable& sectors);
FockOperator anticommutator(const FockOperator& a, const FockOperator& b);

enum class LadderKind { create, annihilate };

FockOperator ladder_op(const FockSpace& space, std::size_t mode, LadderKind kind);

/// dGamma(h) = sum_kk' h_kk' a^dagger_k a_k'. Exact on the truncated basis.
FockOperator second_quantize(const FockBasis& basis, const OneParticleMatrix& h, std::string label = "dGamma");
FockOperator second_quantize(const FockSpace& space, const OneParticleMatrix& h, std::string label = "dGamma");

FockOperator number_op(const FockSpace& space);

/// Covariant P_mu: eigenvalue q_mu of the sector table (energy sum for mu = 0).
FockOperator momentum_op(const FockSpace& space, int mu);

/// V_j = dGamma(p_j / omega).
FockOperator velocity_op(const FockSpace& space, int j);

/// One-particle kernels. Spatial index j is 1-based, matching P_mu.
namespace kernel {
OneParticleMatrix coordinate_spectral(const MomentumGrid& grid, int j);
OneParticleMatrix coordinate_stencil(const MomentumGrid& grid, int j);
/// f_0(x) = sqrt(x.x + m^2), the position-space image of the dispersion.
OneParticleMatrix time_coordinate(const MomentumGrid& grid);
OneParticleMatrix nwp(const MomentumGrid& grid, int j);
/// x_j / f_0(x) conjugated into momentum space.
OneParticleMatrix unit_position(const MomentumGrid& grid, int j);
}  // namespace kernel

/// X_j = dGamma(W^dagger diag(x_j) W).
FockOperator coordinate_op_spectral(const FockSpace& space, int j);

/// X_j = dGamma(+i D_j), D_j the periodic central difference in p_j, which
/// is -i d/dp^j for the contravariant component p^j = -p_j.
FockOperator coordinate_op_stencil(const FockSpace& space, int j);

/// X_0 = dGamma(W^dagger diag(f_0) W).
FockOperator time_op(const FockSpace& space);

/// Newton-Wigner-Pryce position operator carried back from the covariant
/// representation: D^{-1} (-i)(p_j / (2 omega^2) + d/dp^j) D with
/// D = diag(sqrt(2 omega)) and d/dp^j = i X_j (spectral). Hermitian only up to
/// discretization error; see hermiticity_defect().
FockOperator nwp_op(const FockSpace& space, int j);

/// Vtilde^mu = -i [P^mu, X_0] with contravariant P^mu = eta^{mu mu} P_mu.
FockOperator tilde_velocity_op(const FockSpace& space, int mu);

/// dGamma(Q_j / |Q|) built directly from the position multiplier. On this
/// lattice Vtilde^j -> +dGamma(Q_j/|Q|) = -dGamma(Q^j/|Q|) in the continuum limit.
FockOperator unit_position_op(const FockSpace& space, int j);

/// Vtilde^k_j = [Vtilde^k, V_j].
FockOperator tilde_velocity_commutator(const FockSpace& space, int k, int j);

/// U(b) A U(b)^{-1} with U(b) = exp(i b^mu P_mu); `b` is contravariant.
FockOperator translate(const FockOperator& a, const SectorTable& sectors, std::span<const double> b);

/// "row col re im" lines, sorted row-major, 17 significant digits.
void write_triplets(std::ostream& out, const FockOperator& op);

}  // namespace qmw
