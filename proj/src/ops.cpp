#include "qmw/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace qmw {

double FockOperator::hermiticity_defect() const {
  SparseMatrix adj = matrix.adjoint();
  return max_abs(SparseMatrix(matrix - adj));
}

double number_leakage(const SparseMatrix& a, const SectorTable& sectors) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (sectors.npart[static_cast<std::size_t>(it.row())] != sectors.npart[static_cast<std::size_t>(it.col())])
        worst = std::max(worst, std::abs(it.value()));
  return worst;
}

namespace {

double leakage(const SparseMatrix& a, const std::vector<int>& npart) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (npart[static_cast<std::size_t>(it.row())] != npart[static_cast<std::size_t>(it.col())])
        worst = std::max(worst, std::abs(it.value()));
  return worst;
}

bool is_hermitian(const SparseMatrix& a) {
  SparseMatrix adj = a.adjoint();
  return max_abs(SparseMatrix(a - adj)) <= 1e-12;
}

// Binary ops cannot see the sector table, so number conservation of the
// result follows from the operands: sums and products of number-conserving
// matrices are number-conserving.
FockOperator combine(SparseMatrix m, bool conserving, std::string label) {
  FockOperator op;
  op.matrix = std::move(m);
  op.matrix.prune(cplx{0.0, 0.0}, 0.0);
  op.hermitian = is_hermitian(op.matrix);
  op.number_conserving = conserving;
  op.label = std::move(label);
  return op;
}

void check_same_dim(const FockOperator& a, const FockOperator& b, const char* what) {
  if (a.dim() != b.dim()) throw OperatorError(std::string(what) + ": dimension mismatch");
}

}  // namespace

FockOperator make_operator(SparseMatrix matrix, const SectorTable& sectors, std::string label) {
  if (static_cast<std::size_t>(matrix.rows()) != sectors.npart.size() || matrix.rows() != matrix.cols())
    throw OperatorError("make_operator: matrix does not match the basis");
  FockOperator op;
  op.matrix = std::move(matrix);
  op.hermitian = is_hermitian(op.matrix);
  op.number_conserving = leakage(op.matrix, sectors.npart) <= 1e-14;
  op.label = std::move(label);
  return op;
}

FockOperator operator+(const FockOperator& a, const FockOperator& b) {
  check_same_dim(a, b, "operator+");
  return combine(a.matrix + b.matrix, a.number_conserving && b.number_conserving, a.label + "+" + b.label);
}

FockOperator operator-(const FockOperator& a, const FockOperator& b) {
  check_same_dim(a, b, "operator-");
  return combine(a.matrix - b.matrix, a.number_conserving && b.number_conserving, a.label + "-" + b.label);
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  check_same_dim(a, b, "operator*");
  return combine(SparseMatrix(a.matrix * b.matrix), a.number_conserving && b.number_conserving,
                 a.label + "*" + b.label);
}

FockOperator operator*(cplx s, const FockOperator& a) {
  return combine(SparseMatrix(s * a.matrix), a.number_conserving, a.label);
}

FockOperator commutator(const FockOperator& a, const FockOperator& b) {
  check_same_dim(a, b, "commutator");
  SparseMatrix ab = a.matrix * b.matrix;
  SparseMatrix ba = b.matrix * a.matrix;
  return combine(ab - ba, a.number_conserving && b.number_conserving, "[" + a.label + "," + b.label + "]");
}

FockOperator anticommutator(const FockOperator& a, const FockOperator& b) {
  check_same_dim(a, b, "anticommutator");
  SparseMatrix ab = a.matrix * b.matrix;
  SparseMatrix ba = b.matrix * a.matrix;
  return combine(ab + ba, a.number_conserving && b.number_conserving, "{" + a.label + "," + b.label + "}");
}

FockOperator ladder_op(const FockSpace& space, std::size_t mode, LadderKind kind) {
  const auto& basis = space.basis;
  if (mode >= basis.num_modes()) throw OperatorError("ladder_op: mode index out of range");
  const auto k = static_cast<std::uint32_t>(mode);
  std::vector<Triplet> trips;
  for (std::size_t v = 0; v < basis.size(); ++v) {
    const auto& s = basis.state(v);
    if (static_cast<int>(s.size()) == basis.max_particles()) continue;
    ModeList t = s;
    t.insert(std::upper_bound(t.begin(), t.end(), k), k);
    const auto u = basis.index(t);
    const double amp = std::sqrt(static_cast<double>(basis.occupation(v, k) + 1));
    // a^dagger_k |v> = sqrt(n_k + 1) |u>; the annihilator is its transpose.
    if (kind == LadderKind::create)
      trips.emplace_back(static_cast<int>(*u), static_cast<int>(v), amp);
    else
      trips.emplace_back(static_cast<int>(v), static_cast<int>(*u), amp);
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  return make_operator(std::move(m), space.sectors,
                       (kind == LadderKind::create ? "a+" : "a") + std::to_string(mode));
}

FockOperator second_quantize(const FockBasis& basis, const OneParticleMatrix& h, std::string label) {
  const auto K = basis.num_modes();
  if (h.dim() != K || h.entries.cols() != h.entries.rows())
    throw OperatorError("second_quantize: kernel is not " + std::to_string(K) + " x " + std::to_string(K));

  std::vector<Triplet> trips;
  ModeList removed;
  ModeList target;
  for (std::size_t v = 0; v < basis.size(); ++v) {
    const auto& s = basis.state(v);
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
      if (pos > 0 && s[pos] == s[pos - 1]) continue;  // one pass per distinct mode
      const auto kp = s[pos];
      const auto nkp = static_cast<double>(std::count(s.begin(), s.end(), kp));
      removed = s;
      removed.erase(removed.begin() + static_cast<std::ptrdiff_t>(pos));
      for (std::size_t k = 0; k < K; ++k) {
        const cplx hv = h.entries(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(kp));
        if (hv == cplx{0.0, 0.0}) continue;
        const auto km = static_cast<std::uint32_t>(k);
        const auto nk = static_cast<double>(std::count(removed.begin(), removed.end(), km));
        target = removed;
        target.insert(std::upper_bound(target.begin(), target.end(), km), km);
        const auto u = basis.index(target);
        // a^dagger_k a_k' |v> = sqrt(n_k') sqrt(n_k + 1) |u>, n_k counted after removal.
        trips.emplace_back(static_cast<int>(*u), static_cast<int>(v), hv * std::sqrt(nkp * (nk + 1.0)));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  FockOperator op;
  op.matrix = std::move(m);
  op.hermitian = h.entries.rows() == 0 || is_hermitian(op.matrix);
  op.number_conserving = true;
  op.label = std::move(label);
  return op;
}

FockOperator second_quantize(const FockSpace& space, const OneParticleMatrix& h, std::string label) {
  return second_quantize(space.basis, h, std::move(label));
}

namespace {

FockOperator diagonal_op(const FockSpace& space, const RealVector& diag, std::string label) {
  const auto n = static_cast<Eigen::Index>(space.basis.size());
  SparseMatrix m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index i = 0; i < n; ++i)
    if (diag(i) != 0.0) m.insert(i, i) = diag(i);
  m.makeCompressed();
  FockOperator op;
  op.matrix = std::move(m);
  op.hermitian = true;
  op.number_conserving = true;
  op.label = std::move(label);
  return op;
}

void check_spatial(const FockSpace& space, int j, const char* what) {
  if (j < 1 || j > space.grid.spec.n) throw OperatorError(std::string(what) + ": spatial index out of range");
}

}  // namespace

FockOperator number_op(const FockSpace& space) {
  RealVector d(static_cast<Eigen::Index>(space.basis.size()));
  for (std::size_t i = 0; i < space.basis.size(); ++i) d(static_cast<Eigen::Index>(i)) = space.sectors.npart[i];
  return diagonal_op(space, d, "N");
}

FockOperator momentum_op(const FockSpace& space, int mu) {
  if (mu < 0 || mu > space.grid.spec.n) throw OperatorError("momentum_op: index mu out of range");
  return diagonal_op(space, space.sectors.q.col(mu), "P" + std::to_string(mu));
}

FockOperator velocity_op(const FockSpace& space, int j) {
  check_spatial(space, j, "velocity_op");
  const auto& g = space.grid;
  const OneParticleMatrix h = momentum_multiplier(g, [j](std::span<const double> p, double w) {
    return p[static_cast<std::size_t>(j - 1)] / w;
  });
  return second_quantize(space, h, "V" + std::to_string(j));
}

namespace kernel {

OneParticleMatrix coordinate_spectral(const MomentumGrid& grid, int j) {
  if (j < 1 || j > grid.spec.n) throw OperatorError("coordinate_spectral: spatial index out of range");
  return position_multiplier(grid, [j](std::span<const double> x) { return x[static_cast<std::size_t>(j - 1)]; });
}

OneParticleMatrix coordinate_stencil(const MomentumGrid& grid, int j) {
  if (j < 1 || j > grid.spec.n) throw OperatorError("coordinate_stencil: spatial index out of range");
  DenseMatrix d = central_difference(grid, j - 1).entries;
  return make_one_particle(kI * d);
}

OneParticleMatrix time_coordinate(const MomentumGrid& grid) {
  const double m2 = grid.spec.m * grid.spec.m;
  return position_multiplier(grid, [m2](std::span<const double> x) {
    double r2 = m2;
    for (double v : x) r2 += v * v;
    return std::sqrt(r2);
  });
}

OneParticleMatrix unit_position(const MomentumGrid& grid, int j) {
  if (j < 1 || j > grid.spec.n) throw OperatorError("unit_position: spatial index out of range");
  const double m2 = grid.spec.m * grid.spec.m;
  return position_multiplier(grid, [j, m2](std::span<const double> x) {
    double r2 = m2;
    for (double v : x) r2 += v * v;
    return x[static_cast<std::size_t>(j - 1)] / std::sqrt(r2);
  });
}

OneParticleMatrix nwp(const MomentumGrid& grid, int j) {
  const DenseMatrix X = coordinate_spectral(grid, j).entries;
  const auto K = X.rows();
  RealVector root(K);
  RealVector shift(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double w = grid.energies(k);
    root(k) = std::sqrt(2.0 * w);
    shift(k) = grid.points(k, j - 1) / (2.0 * w * w);
  }
  // covariant kernel -i(p_j/(2 w^2) + d/dp^j) with d/dp^j = i X_j
  DenseMatrix covariant = X;
  covariant.diagonal() -= kI * shift.cast<cplx>();
  DenseMatrix h = root.cwiseInverse().cast<cplx>().asDiagonal() * covariant * root.cast<cplx>().asDiagonal();
  return make_one_particle(std::move(h));
}

}  // namespace kernel

FockOperator coordinate_op_spectral(const FockSpace& space, int j) {
  check_spatial(space, j, "coordinate_op_spectral");
  return second_quantize(space, kernel::coordinate_spectral(space.grid, j), "X" + std::to_string(j));
}

FockOperator coordinate_op_stencil(const FockSpace& space, int j) {
  check_spatial(space, j, "coordinate_op_stencil");
  return second_quantize(space, kernel::coordinate_stencil(space.grid, j), "Xs" + std::to_string(j));
}

FockOperator time_op(const FockSpace& space) {
  return second_quantize(space, kernel::time_coordinate(space.grid), "X0");
}

FockOperator nwp_op(const FockSpace& space, int j) {
  check_spatial(space, j, "nwp_op");
  return second_quantize(space, kernel::nwp(space.grid, j), "XNWP" + std::to_string(j));
}

FockOperator tilde_velocity_op(const FockSpace& space, int mu) {
  if (mu < 0 || mu > space.grid.spec.n) throw OperatorError("tilde_velocity_op: index mu out of range");
  const auto& g = space.grid;
  const DenseMatrix X0 = kernel::time_coordinate(g).entries;
  const RealVector pmu = g.covariant_momenta().col(mu) * metric(mu);  // contravariant P^mu
  DenseMatrix h = -kI * (pmu.cast<cplx>().asDiagonal() * X0 - X0 * pmu.cast<cplx>().asDiagonal());
  return second_quantize(space, make_one_particle(std::move(h)), "Vt" + std::to_string(mu));
}

FockOperator unit_position_op(const FockSpace& space, int j) {
  check_spatial(space, j, "unit_position_op");
  return second_quantize(space, kernel::unit_position(space.grid, j), "Q/|Q|" + std::to_string(j));
}

FockOperator tilde_velocity_commutator(const FockSpace& space, int k, int j) {
  check_spatial(space, k, "tilde_velocity_commutator");
  check_spatial(space, j, "tilde_velocity_commutator");
  FockOperator op = commutator(tilde_velocity_op(space, k), velocity_op(space, j), space.sectors);
  op.label = "Vt" + std::to_string(k) + "_" + std::to_string(j);
  return op;
}

FockOperator translate(const FockOperator& a, const SectorTable& sectors, std::span<const double> b) {
  if (a.dim() != sectors.npart.size()) throw OperatorError("translate: dimension mismatch");
  if (static_cast<int>(b.size()) != sectors.dim()) throw OperatorError("translate: b must be a d-vector");
  const Eigen::Map<const RealVector> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  const RealVector phase = sectors.q * bv;
  SparseMatrix m = a.matrix;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it)
      it.valueRef() *= std::polar(1.0, phase(it.row()) - phase(it.col()));
  FockOperator op;
  op.matrix = std::move(m);
  op.hermitian = is_hermitian(op.matrix);
  op.number_conserving = a.number_conserving;
  op.label = "U(b)" + a.label;
  return op;
}

void write_triplets(std::ostream& out, const FockOperator& op) {
  char line[128];
  for (Eigen::Index r = 0; r < op.matrix.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(op.matrix, r); it; ++it) {
      std::snprintf(line, sizeof line, "%lld %lld %.17g %.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value().real(), it.value().imag());
      out << line;
    }
}

}  // namespace qmw

namespace qmw {

namespace {

constexpr Eigen::Index kDenseBlockLimit = 4096;

// Contiguous runs of equal particle number.
std::vector<std::pair<Eigen::Index, Eigen::Index>> strata(const std::vector<int>& npart) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> runs;
  Eigen::Index start = 0;
  for (std::size_t i = 1; i <= npart.size(); ++i)
    if (i == npart.size() || npart[i] != npart[i - 1]) {
      runs.emplace_back(start, static_cast<Eigen::Index>(i));
      start = static_cast<Eigen::Index>(i);
    }
  return runs;
}

DenseMatrix dense_block(const SparseMatrix& a, Eigen::Index lo, Eigen::Index hi) {
  DenseMatrix d = DenseMatrix::Zero(hi - lo, hi - lo);
  for (Eigen::Index r = lo; r < hi; ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) d(r - lo, it.col() - lo) = it.value();
  return d;
}

}  // namespace

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b, const SectorTable& sectors) {
  if (a.cols() != b.rows()) throw OperatorError("multiply: dimension mismatch");
  if (number_leakage(a, sectors) > 0.0 || number_leakage(b, sectors) > 0.0) return SparseMatrix(a * b);

  std::vector<Triplet> trips;
  for (auto [lo, hi] : strata(sectors.npart)) {
    if (hi - lo > kDenseBlockLimit) {
      SparseMatrix sa = a.block(lo, lo, hi - lo, hi - lo);
      SparseMatrix sb = b.block(lo, lo, hi - lo, hi - lo);
      SparseMatrix ab = sa * sb;
      for (Eigen::Index r = 0; r < ab.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(ab, r); it; ++it) trips.emplace_back(r + lo, it.col() + lo, it.value());
      continue;
    }
    const DenseMatrix prod = dense_block(a, lo, hi) * dense_block(b, lo, hi);
    for (Eigen::Index r = 0; r < prod.rows(); ++r)
      for (Eigen::Index c = 0; c < prod.cols(); ++c)
        if (prod(r, c) != cplx{0.0, 0.0}) trips.emplace_back(r + lo, c + lo, prod(r, c));
  }
  SparseMatrix m(a.rows(), b.cols());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

FockOperator commutator(const FockOperator& a, const FockOperator& b, const SectorTable& sectors) {
  check_same_dim(a, b, "commutator");
  SparseMatrix ab = multiply(a.matrix, b.matrix, sectors);
  SparseMatrix ba = multiply(b.matrix, a.matrix, sectors);
  return combine(ab - ba, a.number_conserving && b.number_conserving, "[" + a.label + "," + b.label + "]");
}

}  // namespace qmw
