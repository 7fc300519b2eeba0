#include "qmw/lattice.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace qmw {

double max_abs(const DenseMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double max_abs(const SparseMatrix& a) {
  double best = 0.0;
  for (Eigen::Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) best = std::max(best, std::abs(it.value()));
  return best;
}

double LatticeSpec::dp() const { return 2.0 * std::numbers::pi / L; }
double LatticeSpec::dx() const { return L / static_cast<double>(M); }

void validate(const LatticeSpec& spec) {
  if (spec.n < 1) throw LatticeError("lattice: spatial dimension n must be >= 1");
  if (spec.M < 4) throw LatticeError("lattice: modes per axis M must be >= 4");
  if (spec.M % 2 != 0) throw LatticeError("lattice: modes per axis M must be even");
  if (!(spec.L > 0.0) || !std::isfinite(spec.L)) throw LatticeError("lattice: box length L must be positive");
  if (!(spec.m >= 0.0) || !std::isfinite(spec.m)) throw LatticeError("lattice: mass m must be non-negative");
}

namespace {

// Axis digits of a row-major flat index.
std::vector<int> digits(std::size_t flat, int n, int M) {
  std::vector<int> d(static_cast<std::size_t>(n));
  for (int a = n - 1; a >= 0; --a) {
    d[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(M));
    flat /= static_cast<std::size_t>(M);
  }
  return d;
}

std::size_t flatten(const std::vector<int>& d, int M) {
  std::size_t flat = 0;
  for (int v : d) flat = flat * static_cast<std::size_t>(M) + static_cast<std::size_t>(v);
  return flat;
}

}  // namespace

RealMatrix MomentumGrid::covariant_momenta() const {
  RealMatrix q(points.rows(), points.cols() + 1);
  q.col(0) = energies;
  q.rightCols(points.cols()) = points;
  return q;
}

std::size_t MomentumGrid::negated(std::size_t k) const {
  auto d = digits(k, spec.n, spec.M);
  for (int& v : d) v = spec.M - 1 - v;
  return flatten(d, spec.M);
}

std::size_t MomentumGrid::shifted(std::size_t k, int axis, int steps) const {
  auto d = digits(k, spec.n, spec.M);
  int& v = d[static_cast<std::size_t>(axis)];
  v = ((v + steps) % spec.M + spec.M) % spec.M;
  return flatten(d, spec.M);
}

double OneParticleMatrix::hermiticity_defect() const { return max_abs(DenseMatrix(entries - entries.adjoint())); }

OneParticleMatrix make_one_particle(DenseMatrix entries) {
  OneParticleMatrix h{std::move(entries), false};
  h.hermitian = h.entries.rows() == h.entries.cols() && h.hermiticity_defect() <= 1e-12;
  return h;
}

MomentumGrid build_grid(const LatticeSpec& spec) {
  validate(spec);
  std::size_t K = 1;
  for (int a = 0; a < spec.n; ++a) K *= static_cast<std::size_t>(spec.M);

  MomentumGrid g;
  g.spec = spec;
  g.points.resize(static_cast<Eigen::Index>(K), spec.n);
  g.dual_points.resize(static_cast<Eigen::Index>(K), spec.n);
  g.energies.resize(static_cast<Eigen::Index>(K));
  const double centre = spec.M / 2.0 - 0.5;
  for (std::size_t k = 0; k < K; ++k) {
    const auto d = digits(k, spec.n, spec.M);
    double p2 = 0.0;
    for (int a = 0; a < spec.n; ++a) {
      const double offset = d[static_cast<std::size_t>(a)] - centre;
      const double p = spec.dp() * offset;
      g.points(static_cast<Eigen::Index>(k), a) = p;
      g.dual_points(static_cast<Eigen::Index>(k), a) = spec.dx() * offset;
      p2 += p * p;
    }
    g.energies(static_cast<Eigen::Index>(k)) = std::sqrt(p2 + spec.m * spec.m);
  }
  return g;
}

OneParticleMatrix dft_one_particle(const MomentumGrid& grid) {
  const auto K = static_cast<Eigen::Index>(grid.num_modes());
  const double norm = std::pow(static_cast<double>(grid.spec.M), -0.5 * grid.spec.n);
  DenseMatrix W(K, K);
  for (Eigen::Index m = 0; m < K; ++m)
    for (Eigen::Index k = 0; k < K; ++k) W(m, k) = std::polar(norm, grid.points.row(k).dot(grid.dual_points.row(m)));
  return OneParticleMatrix{std::move(W), false};
}

OneParticleMatrix position_multiplier(const MomentumGrid& grid, const PositionFunction& f) {
  const auto K = static_cast<Eigen::Index>(grid.num_modes());
  RealVector values(K);
  std::vector<double> x(static_cast<std::size_t>(grid.spec.n));
  bool real_finite = true;
  for (Eigen::Index m = 0; m < K; ++m) {
    for (int a = 0; a < grid.spec.n; ++a) x[static_cast<std::size_t>(a)] = grid.dual_points(m, a);
    values(m) = f(x);
    real_finite = real_finite && std::isfinite(values(m));
  }
  if (!real_finite) throw LatticeError("position_multiplier: function is not finite on the position grid");
  const DenseMatrix W = dft_one_particle(grid).entries;
  DenseMatrix h = W.adjoint() * (values.cast<cplx>().asDiagonal() * W);
  // Real multipliers give hermitian kernels; symmetrize away GEMM rounding.
  h = 0.5 * (h + h.adjoint()).eval();
  return OneParticleMatrix{std::move(h), true};
}

OneParticleMatrix momentum_multiplier(const MomentumGrid& grid,
                                      const std::function<double(std::span<const double>, double)>& f) {
  const auto K = static_cast<Eigen::Index>(grid.num_modes());
  DenseMatrix h = DenseMatrix::Zero(K, K);
  std::vector<double> p(static_cast<std::size_t>(grid.spec.n));
  for (Eigen::Index k = 0; k < K; ++k) {
    for (int a = 0; a < grid.spec.n; ++a) p[static_cast<std::size_t>(a)] = grid.points(k, a);
    const double v = f(p, grid.energies(k));
    if (!std::isfinite(v)) throw LatticeError("momentum_multiplier: function is not finite on the momentum grid");
    h(k, k) = v;
  }
  return OneParticleMatrix{std::move(h), true};
}

OneParticleMatrix central_difference(const MomentumGrid& grid, int axis) {
  if (axis < 0 || axis >= grid.spec.n) throw LatticeError("central_difference: axis out of range");
  const auto K = grid.num_modes();
  DenseMatrix D = DenseMatrix::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
  const double inv = 1.0 / (2.0 * grid.spec.dp());
  for (std::size_t k = 0; k < K; ++k) {
    D(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(grid.shifted(k, axis, +1))) += inv;
    D(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(grid.shifted(k, axis, -1))) -= inv;
  }
  return OneParticleMatrix{std::move(D), false};
}

}  // namespace qmw
