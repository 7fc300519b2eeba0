#include "qmw/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qmw {

StateVector gaussian_packet(const MomentumGrid& grid, const RealVector& centre, double width) {
  const std::size_t K = grid.num_modes();
  StateVector phi(static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    const RealVector d = grid.points.row(static_cast<Eigen::Index>(k)).transpose() - centre;
    phi(static_cast<Eigen::Index>(k)) = std::exp(-d.squaredNorm() / (4.0 * width * width));
  }
  return phi;
}

std::vector<RealVector> packet_centres(const MomentumGrid& grid, double centre_fraction) {
  const int n = grid.spec.n;
  const double c = centre_fraction * std::numbers::pi / grid.spec.dx();
  // Two distinct centres on opposite diagonals, keeping p = 0 in the far tails.
  RealVector a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a(i) = c;
    b(i) = (i % 2 == 0 ? -c : c);
  }
  return {a, b};
}

namespace {

StateVector one_particle_state(const FockSpace& space, const StateVector& phi) {
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(space.basis.size()));
  for (Eigen::Index k = 0; k < phi.size(); ++k) {
    const auto i = space.basis.index(ModeList{static_cast<std::uint32_t>(k)});
    if (i) psi(static_cast<Eigen::Index>(*i)) = phi(k);
  }
  return psi;
}

// Symmetrized product phi1 (x) phi2 projected onto the occupation basis.
StateVector two_particle_state(const FockSpace& space, const StateVector& phi1, const StateVector& phi2) {
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(space.basis.size()));
  const auto [lo, hi] = space.basis.stratum(2);
  for (std::size_t i = lo; i < hi; ++i) {
    const ModeList& s = space.basis.state(i);
    const auto a = static_cast<Eigen::Index>(s[0]);
    const auto b = static_cast<Eigen::Index>(s[1]);
    // |a b> normalized: a^dag_a a^dag_b |0> / sqrt(n_a! n_b!)
    if (a == b)
      psi(static_cast<Eigen::Index>(i)) = std::sqrt(2.0) * phi1(a) * phi2(b);
    else
      psi(static_cast<Eigen::Index>(i)) = phi1(a) * phi2(b) + phi1(b) * phi2(a);
  }
  return psi;
}

void normalize(StateVector& psi) {
  const double nrm = psi.norm();
  if (nrm > 0) psi /= nrm;
}

}  // namespace

TestStateEnsemble build_ensemble(const FockSpace& space, const EnsembleOptions& options) {
  const MomentumGrid& grid = space.grid;
  const double width = options.sigma * (options.reference_dp > 0 ? options.reference_dp : grid.spec.dp());
  const auto centres = packet_centres(grid, options.centre_fraction);
  std::vector<StateVector> phis;
  const double x0 = options.position_offset * grid.spec.dx();
  for (const auto& c : centres) {
    StateVector phi = gaussian_packet(grid, c, width);
    for (Eigen::Index k = 0; k < phi.size(); ++k) phi(k) *= std::polar(1.0, -x0 * grid.points.row(k).sum());
    phis.push_back(phi);
  }

  TestStateEnsemble ens;
  StateVector vac = StateVector::Zero(static_cast<Eigen::Index>(space.basis.size()));
  vac(0) = 1.0;
  ens.states.push_back({"vacuum", vac});

  std::vector<StateVector> pure;
  for (std::size_t c = 0; c < phis.size(); ++c) {
    StateVector psi = one_particle_state(space, phis[c]);
    normalize(psi);
    ens.states.push_back({"one_particle_" + std::to_string(c), psi});
    pure.push_back(psi);
  }
  if (space.basis.max_particles() >= 2) {
    StateVector psi = two_particle_state(space, phis[0], phis[1]);
    normalize(psi);
    ens.states.push_back({"two_particle", psi});
    pure.push_back(psi);
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  for (int r = 0; r < options.random_superpositions; ++r) {
    StateVector psi = cplx(gauss(rng), gauss(rng)) * vac;
    for (const auto& p : pure) psi += cplx(gauss(rng), gauss(rng)) * p;
    normalize(psi);
    ens.states.push_back({"superposition_" + std::to_string(r), psi});
  }
  return ens;
}

double exterior_weight(const FockSpace& space, const StateVector& psi) {
  const double quarter = std::numbers::pi / (2.0 * space.grid.spec.dx());
  double w = 0.0;
  for (std::size_t i = 0; i < space.basis.size(); ++i) {
    bool outside = false;
    for (auto k : space.basis.state(i))
      if ((space.grid.points.row(k).array().abs() > quarter).any()) outside = true;
    if (outside) w += std::norm(psi(static_cast<Eigen::Index>(i)));
  }
  return w;
}

}  // namespace qmw
