#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmw/fock.hpp"

namespace qmw {

struct EnsembleOptions {
  /// Packet width in units of the coarsest grid spacing of a refinement
  /// study; widths are fixed in absolute momentum across levels.
  double sigma = 1.0;
  double reference_dp = 0.0;  ///< 0 selects the instance's own dp
  /// Packet centre offset, as a fraction of the half-range pi/dx per axis.
  double centre_fraction = 0.25;
  /// Position-space displacement of every packet, in units of dx per axis.
  double position_offset = 0.0;
  std::uint64_t seed = 42;
  int random_superpositions = 2;
};

struct TestState {
  std::string label;
  StateVector psi;
};

/// Lattice stand-in for smooth, interior domain vectors: the vacuum, one- and
/// two-particle Gaussian packets centred at interior momenta, and seeded
/// random superpositions of those across particle-number sectors.
struct TestStateEnsemble {
  std::vector<TestState> states;
};

/// Momentum-space Gaussian packet, unnormalized, over the modes.
StateVector gaussian_packet(const MomentumGrid& grid, const RealVector& centre, double width);

/// Interior packet centres, in units of the half-range pi/dx of each axis.
std::vector<RealVector> packet_centres(const MomentumGrid& grid, double centre_fraction);

TestStateEnsemble build_ensemble(const FockSpace& space, const EnsembleOptions& options);

/// Probability weight on basis states with a particle outside the central
/// half of the momentum grid along some axis.
double exterior_weight(const FockSpace& space, const StateVector& psi);

}  // namespace qmw
