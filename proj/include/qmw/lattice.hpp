#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

#include "qmw/types.hpp"

namespace qmw {

class LatticeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Discretization of n-dimensional momentum space: M modes per axis on a box
/// of length L, with dispersion omega = sqrt(p.p + m^2).
struct LatticeSpec {
  int n = 1;
  int M = 8;
  double L = 8.0;
  double m = 0.0;

  int spacetime_dim() const { return n + 1; }
  double dp() const;  ///< 2 pi / L
  double dx() const;  ///< L / M
};

void validate(const LatticeSpec& spec);

/// Momentum points p(k) and position points x(m) on half-integer offset grids.
///
/// Rows are enumerated in row-major axis order (last axis fastest). The offset
/// keeps every component away from zero, so omega > 0 even at m = 0.
/// Stored spatial components are the covariant p_j; the full covariant
/// d-momentum of a mode is (omega, p_1, ..., p_n).
struct MomentumGrid {
  LatticeSpec spec;
  RealMatrix points;       ///< K x n
  RealVector energies;     ///< K
  RealMatrix dual_points;  ///< K x n

  std::size_t num_modes() const { return static_cast<std::size_t>(points.rows()); }

  /// K x d matrix of covariant mode momenta (omega, p).
  RealMatrix covariant_momenta() const;

  /// Index of the mode with momentum -p(k).
  std::size_t negated(std::size_t k) const;

  /// Index of the mode shifted by `steps` along `axis`, with periodic wrap.
  std::size_t shifted(std::size_t k, int axis, int steps) const;
};

/// Dense one-particle kernel over the momentum modes.
struct OneParticleMatrix {
  DenseMatrix entries;
  bool hermitian = false;

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
  double hermiticity_defect() const;
};

OneParticleMatrix make_one_particle(DenseMatrix entries);

MomentumGrid build_grid(const LatticeSpec& spec);

/// W_{mk} = M^{-n/2} exp(i p(k).x(m)); rows are position points, columns momenta.
OneParticleMatrix dft_one_particle(const MomentumGrid& grid);

using PositionFunction = std::function<double(std::span<const double>)>;

/// W^dagger diag(f(x(m))) W. For f = x_j this is the spectral position
/// operator, +i d/dp_j = -i d/dp^j on band-limited momentum functions.
OneParticleMatrix position_multiplier(const MomentumGrid& grid, const PositionFunction& f);

/// diag(f(p(k), omega_k)).
OneParticleMatrix momentum_multiplier(const MomentumGrid& grid,
                                      const std::function<double(std::span<const double>, double)>& f);

/// Second-order central difference in the stored grid coordinate p_j with
/// periodic wrap, (f(p + dp e_j) - f(p - dp e_j)) / (2 dp). Real antisymmetric.
OneParticleMatrix central_difference(const MomentumGrid& grid, int axis);

}  // namespace qmw
