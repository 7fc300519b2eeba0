#include "qmw/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qmw {

const char* to_string(CheckKind kind) { return kind == CheckKind::exact ? "exact" : "convergence"; }

double fit_order(const std::vector<double>& residuals, const std::vector<double>& spacings) {
  if (residuals.size() != spacings.size()) throw std::invalid_argument("fit_order: residuals and spacings differ in length");
  if (residuals.size() < 3) throw std::invalid_argument("fit_order: need at least 3 refinement levels");
  for (double s : spacings)
    if (!(s > 0)) throw std::invalid_argument("fit_order: spacings must be positive");
  for (double r : residuals)
    if (!(r > 0)) return kOrderSentinel;
  const auto k = static_cast<double>(residuals.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double x = std::log(spacings[i]);
    const double y = std::log(residuals[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

bool convergence_pass(const std::vector<double>& residuals, double order, double threshold) {
  if (residuals.size() < 3) return false;
  if (order == kOrderSentinel) return true;
  return strictly_decreasing(residuals) && order >= threshold;
}

double relative_residual(const std::vector<StateVector>& lhs, const std::vector<StateVector>& rhs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double num = (lhs[i] - rhs[i]).norm();
    worst = std::max(worst, num / (lhs[i].norm() + rhs[i].norm() + 1e-30));
  }
  return worst;
}

EnsembleOptions default_study_ensemble(std::uint64_t seed) {
  EnsembleOptions e;
  e.sigma = 0.4;
  e.centre_fraction = 0.0;
  e.seed = seed;
  return e;
}

EnsembleOptions off_origin_ensemble(std::uint64_t seed) {
  EnsembleOptions e;
  e.sigma = 0.2;
  e.centre_fraction = 0.25;
  e.seed = seed;
  return e;
}

std::vector<double> theta_for_dimension(const std::vector<double>& theta, int n) {
  const int d = n + 1;
  if (theta.size() == static_cast<std::size_t>(d * d)) return theta;
  double mag = 0.0;
  for (double t : theta) mag = std::max(mag, std::abs(t));
  std::vector<double> out(static_cast<std::size_t>(d * d), 0.0);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = mu + 1; nu < d; ++nu) {
      out[static_cast<std::size_t>(mu * d + nu)] = mag;
      out[static_cast<std::size_t>(nu * d + mu)] = -mag;
    }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

long long elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

double scaled_diff(const SparseMatrix& a, const SparseMatrix& b) {
  const double scale = std::max({1.0, max_abs(a), max_abs(b)});
  return max_abs(SparseMatrix(a - b)) / scale;
}

CheckResult exact_result(std::string name, double residual, double tol, Clock::time_point t0, std::string note = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.kind = CheckKind::exact;
  r.residuals = {residual};
  r.threshold = tol;
  r.pass = residual <= tol;
  r.runtime_ms = elapsed_ms(t0);
  r.note = std::move(note);
  return r;
}

StateVector act(const FockOperator& a, const StateVector& psi) { return a.matrix * psi; }

StateVector scale_by(const RealVector& diag, const StateVector& v) { return diag.cast<cplx>().cwiseProduct(v); }

// Operator catalogue of one instance, used by the batteries.
struct Catalogue {
  FockOperator N;
  std::vector<FockOperator> P;        // P_0..P_n
  std::vector<FockOperator> V;        // V_1..V_n at [j-1]
  std::vector<FockOperator> X;        // spectral X_1..X_n
  std::vector<FockOperator> Xs;       // stencil
  FockOperator X0;
  std::vector<FockOperator> Vt;       // Vt^0..Vt^n
  std::vector<FockOperator> U;        // dGamma(x_j/f_0)
  std::vector<FockOperator> nwp;
  std::vector<FockOperator> Vtkj;     // Vt^k_j, anti-Hermitian

  std::vector<const FockOperator*> hermitian() const {
    std::vector<const FockOperator*> out{&N, &X0};
    for (const auto* v : {&P, &V, &X, &Xs, &Vt, &U})
      for (const auto& op : *v) out.push_back(&op);
    return out;
  }
  std::vector<const FockOperator*> all() const {
    auto out = hermitian();
    for (const auto& op : nwp) out.push_back(&op);
    for (const auto& op : Vtkj) out.push_back(&op);
    return out;
  }
};

Catalogue build_catalogue(const FockSpace& space) {
  const int n = space.grid.spec.n;
  Catalogue c;
  c.N = number_op(space);
  for (int mu = 0; mu <= n; ++mu) c.P.push_back(momentum_op(space, mu));
  for (int j = 1; j <= n; ++j) {
    c.V.push_back(velocity_op(space, j));
    c.X.push_back(coordinate_op_spectral(space, j));
    c.Xs.push_back(coordinate_op_stencil(space, j));
    c.U.push_back(unit_position_op(space, j));
    c.nwp.push_back(nwp_op(space, j));
  }
  c.X0 = time_op(space);
  for (int mu = 0; mu <= n; ++mu) c.Vt.push_back(tilde_velocity_op(space, mu));
  for (int k = 1; k <= n; ++k)
    for (int j = 1; j <= n; ++j) c.Vtkj.push_back(tilde_velocity_commutator(space, k, j));
  return c;
}

FockOperator random_number_conserving(const FockSpace& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const auto K = static_cast<Eigen::Index>(space.grid.num_modes());
  DenseMatrix h(K, K);
  for (Eigen::Index r = 0; r < K; ++r)
    for (Eigen::Index c = 0; c < K; ++c) h(r, c) = cplx(g(rng), g(rng));
  return second_quantize(space, make_one_particle(h), "R");
}

std::vector<std::pair<const FockOperator*, const FockOperator*>> product_pairs(const Catalogue& c,
                                                                               const FockOperator& rnd) {
  std::vector<std::pair<const FockOperator*, const FockOperator*>> pairs{
      {&c.X0, &c.X[0]}, {&c.X[0], &c.X0}, {&c.X[0], &c.V[0]}, {&rnd, &c.X[0]}, {&c.Vt[0], &rnd}};
  if (c.X.size() > 1) pairs.push_back({&c.X[0], &c.X[1]});
  return pairs;
}

double product_law_residual(const FockSpace& space, const ThetaMatrix& theta, Twist twist,
                            const std::vector<std::pair<const FockOperator*, const FockOperator*>>& pairs) {
  const auto& s = space.sectors;
  double worst = 0.0;
  for (auto [a, b] : pairs) {
    const FockOperator lhs = warp(*a, theta, s) * warp(*b, theta, s);
    const FockOperator rhs = warp(rieffel_product(*a, *b, theta, s, twist), theta, s);
    worst = std::max(worst, scaled_diff(lhs.matrix, rhs.matrix));
  }
  return worst;
}

}  // namespace

CheckResult check_theta_validity(const ThetaMatrix& theta, double tol) {
  const auto t0 = Clock::now();
  const double r = std::max(theta.antisymmetry_defect(), theta.skewness_defect());
  return exact_result("theta_validity", r, tol, t0);
}

CheckResult check_zero_diagonal_twist(const SectorTable& sectors, const ThetaMatrix& theta, double tol) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sectors.q.rows(); ++i) {
    const RealVector q = sectors.q.row(i).transpose();
    worst = std::max(worst, std::abs(theta.twist(q, q)));
  }
  return exact_result("zero_diagonal_twist", worst, tol, t0);
}

CheckResult check_product_law(const FockSpace& space, const ThetaMatrix& theta, double tol, Twist twist,
                              std::uint64_t seed) {
  const auto t0 = Clock::now();
  const Catalogue c = build_catalogue(space);
  const FockOperator rnd = random_number_conserving(space, seed);
  const double r = product_law_residual(space, theta, twist, product_pairs(c, rnd));
  return exact_result("product_law", r, tol, t0);
}

CheckResult check_weyl_ccr(const MomentumGrid& grid, double tol) {
  const auto t0 = Clock::now();
  const double dp = grid.spec.dp();
  const double dx = grid.spec.dx();
  double worst = 0.0;
  for (int j = 0; j < grid.spec.n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const DenseMatrix T =
        position_multiplier(grid, [&](std::span<const double> x) { return std::cos(dp * x[ju]); }).entries +
        kI * position_multiplier(grid, [&](std::span<const double> x) { return std::sin(dp * x[ju]); }).entries;
    const DenseMatrix Phi =
        momentum_multiplier(grid, [&](std::span<const double> p, double) { return std::cos(dx * p[ju]); }).entries +
        kI * momentum_multiplier(grid, [&](std::span<const double> p, double) { return std::sin(dx * p[ju]); })
                 .entries;
    const DenseMatrix lhs = Phi * T;
    const DenseMatrix rhs = std::polar(1.0, dx * dp) * (T * Phi);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return exact_result("weyl_ccr", worst, tol, t0);
}

std::vector<CheckResult> check_exact_suite(const InstanceConfig& config) {
  std::vector<CheckResult> out;
  const double tol = config.tol_exact;
  const FockSpace space = make_fock_space(config.lattice, config.max_particles, config.memory_budget);
  const auto& s = space.sectors;
  const int d = config.lattice.spacetime_dim();
  const ThetaMatrix theta(d, config.theta);
  const ThetaMatrix zero = ThetaMatrix::zero(d);

  auto t0 = Clock::now();
  const Catalogue c = build_catalogue(space);
  const FockOperator rnd = random_number_conserving(space, config.seed);
  const auto pairs = product_pairs(c, rnd);
  const long long build_ms = elapsed_ms(t0);

  out.push_back(check_theta_validity(theta, tol));
  out.push_back(check_zero_diagonal_twist(s, theta, tol));

  t0 = Clock::now();
  out.push_back(exact_result("product_law", product_law_residual(space, theta, Twist::full, pairs), tol, t0));

  t0 = Clock::now();
  {
    double worst = 0.0;
    for (auto [a, b] : pairs) {
      const FockOperator lhs = commutator(warp(*a, theta, s), warp(*b, theta, s), s);
      const FockOperator back = warp(lhs, -theta, s);
      worst = std::max(worst, scaled_diff(back.matrix, deformed_commutator(*a, *b, theta, s).matrix));
    }
    out.push_back(exact_result("product_law_commutator", worst, tol, t0));
  }

  t0 = Clock::now();
  {
    double worst = 0.0;
    for (auto [a, b] : pairs) {
      const FockOperator ab = deformed_commutator(*a, *b, theta, s);
      const FockOperator ba = deformed_commutator(*b, *a, theta, s);
      worst = std::max(worst, max_abs(SparseMatrix(ab.matrix + ba.matrix)) / std::max(1.0, max_abs(ab.matrix)));
    }
    out.push_back(exact_result("deformed_commutator_antisymmetry", worst, tol, t0));
  }

  t0 = Clock::now();
  {
    double worst = 0.0;
    for (const auto* a : c.all()) worst = std::max(worst, scaled_diff(unwarp_roundtrip(*a, theta, s).matrix, a->matrix));
    out.push_back(exact_result("warp_roundtrip", worst, tol, t0));
  }

  t0 = Clock::now();
  {
    double worst = scaled_diff(warp(c.N, theta, s).matrix, c.N.matrix);
    for (const auto& p : c.P) worst = std::max(worst, scaled_diff(warp(p, theta, s).matrix, p.matrix));
    out.push_back(exact_result("warp_fixed_points", worst, tol, t0));
  }

  t0 = Clock::now();
  {
    double worst = 0.0;
    for (const auto& x : c.X) worst = std::max(worst, max_abs(commutator(c.X0, x, s).matrix));
    for (std::size_t i = 0; i < c.X.size(); ++i)
      for (std::size_t j = i + 1; j < c.X.size(); ++j) {
        worst = std::max(worst, max_abs(commutator(c.X[i], c.X[j], s).matrix));
        worst = std::max(worst, max_abs(commutator(c.Xs[i], c.Xs[j], s).matrix));
      }
    out.push_back(exact_result("coordinate_commutation", worst, tol, t0));
  }

  t0 = Clock::now();
  {
    double worst = 0.0;
    for (const auto& v : c.V)
      for (const auto& p : c.P) worst = std::max(worst, max_abs(commutator(v, p, s).matrix));
    out.push_back(exact_result("velocity_momentum_commutation", worst, tol, t0));
  }

  t0 = Clock::now();
  {
    double worst = 0.0;
    for (const auto* a : c.all()) {
      worst = std::max(worst, max_abs(commutator(c.N, *a, s).matrix));
      worst = std::max(worst, number_leakage(a->matrix, s));
    }
    out.push_back(exact_result("number_commutation", worst, tol, t0));
  }

  t0 = Clock::now();
  {
    double worst = 0.0;
    for (const auto* a : c.hermitian()) worst = std::max(worst, a->hermiticity_defect() / std::max(1.0, max_abs(a->matrix)));
    for (const auto& a : c.Vtkj) {
      SparseMatrix adj = a.matrix.adjoint();
      worst = std::max(worst, max_abs(SparseMatrix(a.matrix + adj)) / std::max(1.0, max_abs(a.matrix)));
    }
    out.push_back(exact_result("hermiticity", worst, tol, t0,
                               "N, P, V, X (spectral, stencil), X0, Vt, Q/|Q| Hermitian; Vt^k_j anti-Hermitian"));
  }

  out.push_back(check_weyl_ccr(space.grid, tol));

  t0 = Clock::now();
  {
    double worst = product_law_residual(space, zero, Twist::full, pairs);
    for (auto [a, b] : pairs)
      worst = std::max(worst, scaled_diff(rieffel_product(*a, *b, zero, s).matrix, multiply(a->matrix, b->matrix, s)));
    worst = std::max(worst, check_zero_diagonal_twist(s, zero, tol).residuals[0]);
    out.push_back(exact_result("theta_zero", worst, tol, t0));
  }

  if (!out.empty()) out.front().runtime_ms += build_ms;
  return out;
}

std::vector<CheckResult> check_negative_controls(const InstanceConfig& config) {
  constexpr double margin = 1e-3;
  std::vector<CheckResult> out;
  const FockSpace space = make_fock_space(config.lattice, config.max_particles, config.memory_budget);
  const int d = config.lattice.spacetime_dim();
  const ThetaMatrix theta(d, config.theta);

  auto control = [&](std::string name, CheckResult corrupted) {
    CheckResult r = corrupted;
    r.name = std::move(name);
    r.threshold = margin;
    r.pass = !corrupted.pass && corrupted.residuals[0] >= margin;
    r.note = "passes iff the corrupted check fails by at least the threshold";
    out.push_back(r);
  };

  control("control_dropped_twist_product_law",
          check_product_law(space, theta, config.tol_exact, Twist::dropped, config.seed));

  // theta^{nu mu} = +theta^{mu nu}: transposition without the sign flip
  std::vector<double> bad = config.theta;
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < mu; ++nu)
      bad[static_cast<std::size_t>(mu * d + nu)] = bad[static_cast<std::size_t>(nu * d + mu)];
  const ThetaMatrix corrupt = ThetaMatrix::unchecked(d, bad);
  control("control_symmetric_theta_validity", check_theta_validity(corrupt, config.tol_exact));
  control("control_symmetric_theta_diagonal_twist", check_zero_diagonal_twist(space.sectors, corrupt, config.tol_exact));
  return out;
}

// ---- convergence studies ----------------------------------------------------

namespace {

struct LevelOutcome {
  double residual = 0.0;
  std::vector<std::pair<std::string, double>> extras;
};

using LevelEval = std::function<LevelOutcome(const FockSpace&, const TestStateEnsemble&, const ThetaMatrix&)>;

CheckResult run_study(const std::string& name, const StudyConfig& cfg, int n, int max_particles,
                      const EnsembleOptions& ens_opts, double threshold, const LevelEval& eval) {
  const auto t0 = Clock::now();
  if (cfg.refinements.empty()) throw std::invalid_argument(name + ": no refinement levels");
  CheckResult r;
  r.name = name;
  r.kind = CheckKind::convergence;
  r.threshold = threshold;
  const int d = n + 1;
  const ThetaMatrix theta(d, theta_for_dimension(cfg.theta, n));
  EnsembleOptions eo = ens_opts;
  eo.reference_dp = 2.0 * std::numbers::pi / cfg.refinements.front().second;

  std::vector<Series> extras;
  Series exterior{"exterior_weight", {}};
  for (auto [M, L] : cfg.refinements) {
    LatticeSpec spec{n, M, L, cfg.m};
    const FockSpace space = make_fock_space(spec, max_particles, cfg.memory_budget);
    const TestStateEnsemble ens = build_ensemble(space, eo);
    double ext = 0.0;
    for (const auto& st : ens.states) ext = std::max(ext, exterior_weight(space, st.psi));
    exterior.values.push_back(ext);
    const LevelOutcome o = eval(space, ens, theta);
    r.residuals.push_back(o.residual);
    r.levels.emplace_back(M, L);
    r.spacings.push_back(spec.dp());
    for (const auto& [key, value] : o.extras) {
      auto it = std::find_if(extras.begin(), extras.end(), [&](const Series& s) { return s.name == key; });
      if (it == extras.end()) {
        extras.push_back({key, {}});
        it = extras.end() - 1;
      }
      it->values.push_back(value);
    }
  }
  r.series.push_back(std::move(exterior));
  for (auto& s : extras) r.series.push_back(std::move(s));
  r.fitted_order = r.residuals.size() >= 3 ? fit_order(r.residuals, r.spacings) : std::numeric_limits<double>::quiet_NaN();
  r.pass = convergence_pass(r.residuals, r.fitted_order, threshold);
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

std::vector<StateVector> states_of(const TestStateEnsemble& ens) {
  std::vector<StateVector> v;
  for (const auto& s : ens.states) v.push_back(s.psi);
  return v;
}

using VecMap = std::function<StateVector(const StateVector&)>;

std::vector<StateVector> apply_all(const VecMap& f, const std::vector<StateVector>& psis) {
  std::vector<StateVector> out;
  out.reserve(psis.size());
  for (const auto& p : psis) out.push_back(f(p));
  return out;
}

// Residual plus per-sector residuals over the pure-sector packets.
void residual_with_sectors(const TestStateEnsemble& ens, const VecMap& lhs, const VecMap& rhs, double& worst,
                           std::vector<double>& sector_worst) {
  for (const auto& st : ens.states) {
    const StateVector l = lhs(st.psi);
    const StateVector r = rhs(st.psi);
    const double res = (l - r).norm() / (l.norm() + r.norm() + 1e-30);
    worst = std::max(worst, res);
    int sector = -1;
    if (st.label.rfind("one_particle", 0) == 0) sector = 1;
    if (st.label.rfind("two_particle", 0) == 0) sector = 2;
    if (sector > 0) {
      if (sector_worst.size() < static_cast<std::size_t>(sector)) sector_worst.resize(static_cast<std::size_t>(sector), 0.0);
      sector_worst[static_cast<std::size_t>(sector - 1)] = std::max(sector_worst[static_cast<std::size_t>(sector - 1)], res);
    }
  }
}

void push_sectors(LevelOutcome& o, const std::vector<double>& sector_worst) {
  for (std::size_t s = 0; s < sector_worst.size(); ++s)
    o.extras.emplace_back("sector_" + std::to_string(s + 1), sector_worst[s]);
}

int study_particles(const StudyConfig& cfg, int n) { return std::min(cfg.max_particles, n == 1 ? 2 : 1); }

const std::vector<double> kTranslation{0.5, 0.25, 0.25, 0.25};

}  // namespace

CheckResult check_lemma8(const StudyConfig& cfg) {
  const int n = cfg.n;
  return run_study("lemma8", cfg, n, study_particles(cfg, n), default_study_ensemble(cfg.seed), cfg.order_threshold,
                   [n](const FockSpace& space, const TestStateEnsemble& ens, const ThetaMatrix& theta) {
                     const auto psis = states_of(ens);
                     const RealMatrix thq = space.sectors.q * theta.entries().transpose();
                     const FockOperator N = number_op(space);
                     LevelOutcome o;
                     for (int j = 1; j <= n; ++j) {
                       const FockOperator X = coordinate_op_spectral(space, j);
                       const FockOperator Xt = warp(X, theta, space.sectors);
                       const FockOperator V = velocity_op(space, j);
                       const RealVector a = thq.col(0);
                       const RealVector b = thq.col(j);
                       const auto lhs = apply_all([&](const StateVector& p) { return act(Xt, p); }, psis);
                       const auto rhs = apply_all(
                           [&](const StateVector& p) {
                             return StateVector(act(X, p) + scale_by(a, act(V, p)) + scale_by(b, act(N, p)));
                           },
                           psis);
                       o.residual = std::max(o.residual, relative_residual(lhs, rhs));
                     }
                     return o;
                   });
}

namespace {

CheckResult theorem_0j_study(const StudyConfig& cfg, bool stated) {
  const int n = std::max(cfg.n, 2);
  StudyConfig c = cfg;
  c.theta = theta_for_dimension(cfg.theta, n);
  return run_study(stated ? "theorem_0j" : "theorem_0j_expanded", c, n, study_particles(cfg, n),
                   default_study_ensemble(cfg.seed), cfg.order_threshold,
                   [n, stated](const FockSpace& space, const TestStateEnsemble& ens, const ThetaMatrix& theta) {
                     const auto& s = space.sectors;
                     const FockOperator N = number_op(space);
                     const FockOperator X0 = time_op(space);
                     std::vector<FockOperator> Vt, U, V;
                     for (int k = 0; k <= n; ++k) Vt.push_back(tilde_velocity_op(space, k));
                     for (int k = 1; k <= n; ++k) {
                       U.push_back(unit_position_op(space, k));
                       V.push_back(velocity_op(space, k));
                     }
                     LevelOutcome o;
                     double worst = 0.0;
                     std::vector<double> sectors;
                     for (int j = 1; j <= n; ++j) {
                       const FockOperator C = deformed_commutator(X0, coordinate_op_spectral(space, j), theta, s);
                       const FockOperator& Vj = V[static_cast<std::size_t>(j - 1)];
                       std::vector<FockOperator> Vtkj;
                       if (stated)
                         for (int k = 1; k <= n; ++k) Vtkj.push_back(tilde_velocity_commutator(space, k, j));
                       const VecMap lhs = [&](const StateVector& p) { return act(C, p); };
                       const VecMap rhs = [&](const StateVector& p) {
                         StateVector r = StateVector::Zero(p.size());
                         const StateVector Np = act(N, p);
                         for (int k = 1; k <= n; ++k) {
                           const auto ku = static_cast<std::size_t>(k - 1);
                           const double t0k = theta.lower(0, k);
                           const double tjk = theta.lower(j, k);
                           if (stated) {
                             // dGamma(Q^k/|Q|) = -dGamma(x_k/f_0) for contravariant Q^k
                             r += cplx(0, t0k) * act(Vtkj[ku], p);
                             r += cplx(0, 2 * tjk) * act(U[ku], Np);
                           } else {
                             const FockOperator& A = Vt[static_cast<std::size_t>(k)];
                             r += cplx(0, -t0k) * (act(A, act(Vj, p)) + act(Vj, act(A, p)));
                             r += cplx(0, 2 * tjk) * act(A, Np);
                           }
                         }
                         if (!stated) r += cplx(0, -2 * theta.lower(0, j)) * act(Vt[0], Np);
                         return r;
                       };
                       residual_with_sectors(ens, lhs, rhs, worst, sectors);
                     }
                     o.residual = worst;
                     push_sectors(o, sectors);
                     return o;
                   });
}

}  // namespace

CheckResult check_theorem_0j(const StudyConfig& cfg) { return theorem_0j_study(cfg, true); }
CheckResult check_theorem_0j_expanded(const StudyConfig& cfg) { return theorem_0j_study(cfg, false); }

CheckResult check_theorem_ij(const StudyConfig& cfg) {
  const int n = std::max(cfg.n, 2);
  StudyConfig c = cfg;
  c.theta = theta_for_dimension(cfg.theta, n);
  return run_study("theorem_ij", c, n, study_particles(cfg, n), default_study_ensemble(cfg.seed), cfg.order_threshold,
                   [n](const FockSpace& space, const TestStateEnsemble& ens, const ThetaMatrix& theta) {
                     const auto& s = space.sectors;
                     const FockOperator N = number_op(space);
                     std::vector<FockOperator> X, V;
                     for (int k = 1; k <= n; ++k) {
                       X.push_back(coordinate_op_spectral(space, k));
                       V.push_back(velocity_op(space, k));
                     }
                     LevelOutcome o;
                     double worst = 0.0;
                     std::vector<double> sectors;
                     for (int i = 1; i <= n; ++i)
                       for (int j = i + 1; j <= n; ++j) {
                         const auto iu = static_cast<std::size_t>(i - 1);
                         const auto ju = static_cast<std::size_t>(j - 1);
                         const FockOperator C = deformed_commutator(X[iu], X[ju], theta, s);
                         const VecMap lhs = [&](const StateVector& p) { return act(C, p); };
                         const VecMap rhs = [&](const StateVector& p) {
                           const StateVector Np = act(N, p);
                           StateVector r = cplx(0, -2) * (theta.lower(0, i) * act(V[ju], Np) - theta.lower(0, j) * act(V[iu], Np));
                           r += cplx(0, -2 * theta.lower(i, j)) * act(N, Np);
                           return r;
                         };
                         residual_with_sectors(ens, lhs, rhs, worst, sectors);
                       }
                     o.residual = worst;
                     push_sectors(o, sectors);
                     return o;
                   });
}

CheckResult check_translation_law(const StudyConfig& cfg) {
  const int n = cfg.n;
  CheckResult r = run_study(
      "translation_law", cfg, n, study_particles(cfg, n), default_study_ensemble(cfg.seed), cfg.order_threshold,
      [n](const FockSpace& space, const TestStateEnsemble& ens, const ThetaMatrix&) {
        const auto& s = space.sectors;
        const int d = n + 1;
        const auto psis = states_of(ens);
        const FockOperator N = number_op(space);
        std::vector<double> b(kTranslation.begin(), kTranslation.begin() + d);
        LevelOutcome o;
        double dual = 0.0;
        for (int j = 1; j <= n; ++j) {
          const FockOperator X = coordinate_op_spectral(space, j);
          const FockOperator V = velocity_op(space, j);
          const FockOperator Xb = translate(X, s, b);
          const double bj = b[static_cast<std::size_t>(j)];
          const auto lhs = apply_all([&](const StateVector& p) { return act(Xb, p); }, psis);
          const auto rhs = apply_all(
              [&](const StateVector& p) { return StateVector(act(X, p) + b[0] * act(V, p) + bj * act(N, p)); }, psis);
          o.residual = std::max(o.residual, relative_residual(lhs, rhs));

          // one dual-lattice step: exact cyclic relabelling of the position grid
          std::vector<double> step(static_cast<std::size_t>(d), 0.0);
          const double dx = space.grid.spec.dx();
          const double half = space.grid.spec.L / 2.0;
          step[static_cast<std::size_t>(j)] = dx;
          const auto ju = static_cast<std::size_t>(j - 1);
          const OneParticleMatrix shifted = position_multiplier(space.grid, [&](std::span<const double> x) {
            const double y = x[ju] + dx;
            return y > half ? y - space.grid.spec.L : y;
          });
          const FockOperator oracle = second_quantize(space, shifted);
          dual = std::max(dual, scaled_diff(translate(X, s, step).matrix, oracle.matrix));
        }

        // first order in b for X_0: d/db_mu alpha_b(X_0) = -Vt^mu
        constexpr double h = 1e-3;
        const FockOperator X0 = time_op(space);
        double first = 0.0;
        for (int mu = 0; mu <= n; ++mu) {
          std::vector<double> bp(static_cast<std::size_t>(d), 0.0), bm(static_cast<std::size_t>(d), 0.0);
          bp[static_cast<std::size_t>(mu)] = metric(mu) * h;  // contravariant image of b_mu = h
          bm[static_cast<std::size_t>(mu)] = -metric(mu) * h;
          const FockOperator Dp = translate(X0, s, bp);
          const FockOperator Dm = translate(X0, s, bm);
          const FockOperator Vt = tilde_velocity_op(space, mu);
          const auto lhs = apply_all(
              [&](const StateVector& p) { return StateVector((act(Dp, p) - act(Dm, p)) / (2 * h)); }, psis);
          const auto rhs = apply_all([&](const StateVector& p) { return StateVector(-act(Vt, p)); }, psis);
          first = std::max(first, relative_residual(lhs, rhs));
        }
        o.extras.emplace_back("dual_shift_exact", dual);
        o.extras.emplace_back("x0_first_order", first);
        return o;
      });
  // Sub-checks: exact dual-lattice relabelling and the O(h^2) first-order X_0 law.
  for (const auto& s : r.series) {
    if (s.name == "dual_shift_exact")
      for (double v : s.values) r.pass = r.pass && v <= 1e-12;
    if (s.name == "x0_first_order")
      for (double v : s.values) r.pass = r.pass && v <= 1e-5;
  }
  r.note = "b = (0.5, 0.25, ...) contravariant; sub-checks dual_shift_exact <= 1e-12, x0_first_order <= 1e-5";
  return r;
}

CheckResult check_nwp_equiv(const StudyConfig& cfg) {
  const int n = cfg.n;
  return run_study("nwp_equiv", cfg, n, study_particles(cfg, n), off_origin_ensemble(cfg.seed), cfg.order_threshold,
                   [n](const FockSpace& space, const TestStateEnsemble& ens, const ThetaMatrix&) {
                     const auto psis = states_of(ens);
                     LevelOutcome o;
                     for (int j = 1; j <= n; ++j) {
                       const FockOperator A = nwp_op(space, j);
                       const FockOperator X = coordinate_op_spectral(space, j);
                       o.residual = std::max(o.residual, relative_residual(apply_all([&](const StateVector& p) { return act(A, p); }, psis),
                                                                           apply_all([&](const StateVector& p) { return act(X, p); }, psis)));
                     }
                     return o;
                   });
}

CheckResult check_stencil_spectral(const StudyConfig& cfg) {
  const int n = cfg.n;
  CheckResult r = run_study("stencil_spectral", cfg, n, study_particles(cfg, n), default_study_ensemble(cfg.seed),
                            std::max(cfg.order_threshold, 1.5),
                            [n](const FockSpace& space, const TestStateEnsemble& ens, const ThetaMatrix&) {
                              const auto psis = states_of(ens);
                              LevelOutcome o;
                              for (int j = 1; j <= n; ++j) {
                                const FockOperator A = coordinate_op_stencil(space, j);
                                const FockOperator X = coordinate_op_spectral(space, j);
                                o.residual = std::max(o.residual, relative_residual(apply_all([&](const StateVector& p) { return act(A, p); }, psis),
                                                                                    apply_all([&](const StateVector& p) { return act(X, p); }, psis)));
                              }
                              return o;
                            });
  return r;
}

SectorLawResult check_sector_law(const StudyConfig& cfg) {
  const auto t0 = Clock::now();
  SectorLawResult out;
  CheckResult& r = out.check;
  r.name = "theorem_ij_sector_law";
  r.kind = CheckKind::convergence;
  r.threshold = 0.1;

  double mag = 0.0;
  for (double t : cfg.theta) mag = std::max(mag, std::abs(t));
  std::vector<double> th(9, 0.0);
  th[1 * 3 + 2] = mag;
  th[2 * 3 + 1] = -mag;
  const ThetaMatrix theta(3, th);
  const double coeff = theta.lower(1, 2);

  EnsembleOptions eo = default_study_ensemble(cfg.seed);
  const std::vector<std::pair<int, double>> levels{{4, 4.0}, {6, 6.0}, {8, 8.0}};
  eo.reference_dp = 2.0 * std::numbers::pi / 8.0;  // same packets as the (8, 8)-based studies
  double target = 0.0;
  for (auto [M, L] : levels) {
    const FockSpace space = make_fock_space(LatticeSpec{2, M, L, cfg.m}, 2, cfg.memory_budget);
    const TestStateEnsemble ens = build_ensemble(space, eo);
    const FockOperator C = deformed_commutator(coordinate_op_spectral(space, 1), coordinate_op_spectral(space, 2), theta,
                                               space.sectors);
    const FockOperator N = number_op(space);
    const StateVector* one = nullptr;
    const StateVector* two = nullptr;
    for (const auto& st : ens.states) {
      if (!one && st.label.rfind("one_particle", 0) == 0) one = &st.psi;
      if (!two && st.label == "two_particle") two = &st.psi;
    }
    const cplx unit(0, -2 * coeff);
    const double l1 = (one->dot(act(C, *one)) / unit).real();
    const double l2 = (two->dot(act(C, *two)) / unit).real();
    const double r1 = (one->dot(unit * act(N, act(N, *one))) / unit).real();
    const double r2 = (two->dot(unit * act(N, act(N, *two))) / unit).real();
    target = r2 / r1;
    out.one_particle.push_back(l1);
    out.two_particle.push_back(l2);
    r.levels.emplace_back(M, L);
    r.spacings.push_back(2.0 * std::numbers::pi / L);
    r.residuals.push_back(std::max(std::abs(l1 - r1), std::abs(l2 - r2) / r2));
  }
  out.target_ratio = target;
  out.lhs_ratio = out.two_particle.back() / out.one_particle.back();
  r.series.push_back({"one_particle_coefficient", out.one_particle});
  r.series.push_back({"two_particle_coefficient", out.two_particle});
  r.series.push_back({"target_ratio", {target}});
  r.fitted_order = std::numeric_limits<double>::quiet_NaN();
  r.pass = std::abs(target - 4.0) <= 1e-12 && std::abs(out.lhs_ratio / target - 1.0) <= 0.1;
  r.note = "theta^{12} only, n = 2, N_max = 2; residual = worst relative sector coefficient error; "
           "pass iff target ratio is 4 and the finest LHS ratio is within 10% of it";
  r.runtime_ms = elapsed_ms(t0);
  return out;
}

// ---- oscillatory integral guard ---------------------------------------------

namespace {

// int du exp(-eps^2 u^2 / 2 + i sgn u^2 / 2 + i b u) by the trapezoid rule.
cplx chirp_integral(double eps, double sgn, double b) {
  const double R = 8.0 / eps;
  const double h = 0.25 / (R + std::abs(b));
  const auto steps = static_cast<long long>(std::ceil(R / h));
  cplx sum = 0.0;
  for (long long k = -steps; k <= steps; ++k) {
    const double u = static_cast<double>(k) * h;
    sum += std::exp(-0.5 * eps * eps * u * u) * std::polar(1.0, 0.5 * sgn * u * u + b * u);
  }
  return sum * h;
}

}  // namespace

cplx cutoff_phase_integral(double s, double c, double eps) {
  // Rotating to u = (x + y)/sqrt2, v = (x - y)/sqrt2 separates -xy = (v^2 - u^2)/2.
  const double r2 = std::numbers::sqrt2;
  return chirp_integral(eps, -1.0, (s + c) / r2) * chirp_integral(eps, +1.0, (s - c) / r2) /
         (2.0 * std::numbers::pi);
}

DenseMatrix rieffel_quadrature(const DenseMatrix& a, const DenseMatrix& b, const SectorTable& sectors,
                               const ThetaMatrix& theta, double eps) {
  const auto D = a.rows();
  const int d = sectors.dim();
  DenseMatrix out = DenseMatrix::Zero(D, D);
  for (Eigen::Index u = 0; u < D; ++u)
    for (Eigen::Index w = 0; w < D; ++w)
      for (Eigen::Index v = 0; v < D; ++v) {
        if (a(u, w) == cplx(0, 0) || b(w, v) == cplx(0, 0)) continue;
        // alpha_{theta x}(A) contributes exp(i (theta x).(q_u - q_w)), alpha_y(B) exp(i y.(q_w - q_v))
        const RealVector dq1 = (sectors.q.row(u) - sectors.q.row(w)).transpose();
        const RealVector dq2 = (sectors.q.row(w) - sectors.q.row(v)).transpose();
        const RealVector sv = theta.entries().transpose() * dq1;
        cplx factor = 1.0;
        for (int nu = 0; nu < d; ++nu) factor *= cutoff_phase_integral(sv(nu), dq2(nu), eps);
        out(u, v) += factor * a(u, w) * b(w, v);
      }
  return out;
}

CheckResult check_quadrature_guard(double tol, std::uint64_t seed) {
  const auto t0 = Clock::now();
  // Two modes taken from the n = 1, M = 4, L = 16 grid: p = 0.196 and p = -0.589.
  const MomentumGrid grid = build_grid(LatticeSpec{1, 4, 16.0, 0.0});
  const RealMatrix all = grid.covariant_momenta();
  RealMatrix modes(2, 2);
  modes.row(0) = all.row(2);
  modes.row(1) = all.row(0);
  const FockBasis basis = enumerate_basis(2, 1);
  const SectorTable sectors = sector_table(basis, modes);
  const ThetaMatrix theta = ThetaMatrix::time_space(2, 0.1);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const auto D = static_cast<Eigen::Index>(basis.size());
  DenseMatrix a(D, D), b(D, D);
  for (Eigen::Index r = 0; r < D; ++r)
    for (Eigen::Index c = 0; c < D; ++c) {
      a(r, c) = cplx(g(rng), g(rng));
      b(r, c) = cplx(g(rng), g(rng));
    }
  const FockOperator A = make_operator(a.sparseView(), sectors, "A");
  const FockOperator B = make_operator(b.sparseView(), sectors, "B");
  const DenseMatrix twisted = DenseMatrix(rieffel_product(A, B, theta, sectors).matrix);
  const DenseMatrix quad = rieffel_quadrature(a, b, sectors, theta, 0.02);
  const double rel = (quad - twisted).cwiseAbs().maxCoeff() / twisted.cwiseAbs().maxCoeff();
  return exact_result("quadrature_guard", rel, tol, t0, "Gaussian cutoff eps = 0.02, 2 modes, N_max = 1");
}

std::vector<std::string> convergence_check_names() {
  return {"lemma8", "translation_law", "theorem_0j", "theorem_0j_expanded", "theorem_ij", "nwp_equiv", "stencil_spectral"};
}

CheckResult run_convergence_check(const std::string& name, const StudyConfig& config) {
  if (name == "lemma8") return check_lemma8(config);
  if (name == "translation_law") return check_translation_law(config);
  if (name == "theorem_0j") return check_theorem_0j(config);
  if (name == "theorem_0j_expanded") return check_theorem_0j_expanded(config);
  if (name == "theorem_ij") return check_theorem_ij(config);
  if (name == "nwp_equiv") return check_nwp_equiv(config);
  if (name == "stencil_spectral") return check_stencil_spectral(config);
  throw std::invalid_argument("unknown convergence check: " + name);
}

}  // namespace qmw
