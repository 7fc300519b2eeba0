#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmw/deform.hpp"
#include "qmw/ensemble.hpp"

namespace qmw {

enum class CheckKind { exact, convergence };

const char* to_string(CheckKind kind);

/// Named per-level series reported next to the main residuals.
struct Series {
  std::string name;
  std::vector<double> values;
};

struct CheckResult {
  std::string name;
  CheckKind kind = CheckKind::exact;
  std::vector<double> residuals;  ///< one per refinement level; one entry for exact checks
  std::vector<std::pair<int, double>> levels;  ///< (M, L) per residual
  std::vector<double> spacings;                ///< dp per residual
  double fitted_order = std::numeric_limits<double>::quiet_NaN();
  double threshold = 0.0;  ///< tol for exact checks, order threshold for convergence checks
  bool pass = false;
  long long runtime_ms = 0;
  std::vector<Series> series;
  std::string note;
};

inline constexpr double kOrderSentinel = std::numeric_limits<double>::infinity();

/// Least-squares slope of log(residual) against log(spacing). Needs at least
/// three levels; any nonpositive residual returns the +inf sentinel.
double fit_order(const std::vector<double>& residuals, const std::vector<double>& spacings);

bool strictly_decreasing(const std::vector<double>& v);

/// Pass rule for convergence checks.
bool convergence_pass(const std::vector<double>& residuals, double order, double threshold);

/// max over the ensemble of |(L - R) psi| / (|L psi| + |R psi| + 1e-30).
double relative_residual(const std::vector<StateVector>& lhs, const std::vector<StateVector>& rhs);

struct InstanceConfig {
  LatticeSpec lattice;
  int max_particles = 2;
  std::vector<double> theta;  ///< row-major theta^{mu nu}, d x d
  std::uint64_t seed = 42;
  double tol_exact = 1e-12;
  std::size_t memory_budget = kDefaultMemoryBudget;
};

struct StudyConfig {
  int n = 1;
  double m = 0.0;
  int max_particles = 2;
  std::vector<std::pair<int, double>> refinements{{8, 8.0}, {16, 16.0}, {32, 32.0}};
  std::vector<double> theta;  ///< row-major, (n+1) x (n+1)
  std::uint64_t seed = 42;
  double order_threshold = 0.9;
  EnsembleOptions ensemble;  ///< sigma is in units of the coarsest dp
  std::size_t memory_budget = kDefaultMemoryBudget;
};

/// Default ensemble: width 0.4 coarse dp, packets at the origin.
EnsembleOptions default_study_ensemble(std::uint64_t seed);
/// Off-origin packets (width 0.2 coarse dp, centres at pi/4); used where a
/// kernel is singular at p = 0 for m = 0.
EnsembleOptions off_origin_ensemble(std::uint64_t seed);

/// theta of dimension n+1: `theta` itself if its size fits, otherwise every
/// independent component set to the largest magnitude found in `theta`.
std::vector<double> theta_for_dimension(const std::vector<double>& theta, int n);

// ---- exact checks -------------------------------------------------------

std::vector<CheckResult> check_exact_suite(const InstanceConfig& config);

/// Product law A_theta B_theta = (A x_theta B)_theta on a fixed operator set.
CheckResult check_product_law(const FockSpace& space, const ThetaMatrix& theta, double tol,
                              Twist twist = Twist::full, std::uint64_t seed = 42);

/// theta invariants; accepts an unvalidated theta.
CheckResult check_theta_validity(const ThetaMatrix& theta, double tol);

/// max |eta(theta q, q)| over the sector table; accepts an unvalidated theta.
CheckResult check_zero_diagonal_twist(const SectorTable& sectors, const ThetaMatrix& theta, double tol);

/// Weyl relation Phi T = exp(i dx dp) T Phi for the one-particle momentum shift
/// T = exp(i dp x_j) and position shift Phi = exp(i dx p_j).
CheckResult check_weyl_ccr(const MomentumGrid& grid, double tol);

/// Negative controls on the instance: dropped twist phase and a theta whose
/// transpose has the wrong sign. Each result passes iff its corruption is
/// detected by a margin of at least 1e-3.
std::vector<CheckResult> check_negative_controls(const InstanceConfig& config);

// ---- convergence studies ------------------------------------------------

CheckResult check_lemma8(const StudyConfig& config);
/// Stated form: i theta_{0k} Vt^k_j - 2i theta_{jk} dGamma(Q^k/|Q|) N.
CheckResult check_theorem_0j(const StudyConfig& config);
/// Form obtained from the exact first-order expansion of the twisted product:
/// -i theta_{0k} {Vt^k, V_j} + 2i theta_{jk} Vt^k N - 2i theta_{0j} Vt^0 N.
CheckResult check_theorem_0j_expanded(const StudyConfig& config);
CheckResult check_theorem_ij(const StudyConfig& config);
CheckResult check_translation_law(const StudyConfig& config);
CheckResult check_nwp_equiv(const StudyConfig& config);
CheckResult check_stencil_spectral(const StudyConfig& config);

/// Per-sector expectation values of [X_1 x_theta, X_2] with theta^{12} only.
struct SectorLawResult {
  CheckResult check;
  double target_ratio = 0.0;   ///< RHS two-particle / one-particle coefficient
  double lhs_ratio = 0.0;      ///< finest-level LHS ratio
  std::vector<double> one_particle;  ///< LHS / (-2i theta_{12}) per level
  std::vector<double> two_particle;
};

SectorLawResult check_sector_law(const StudyConfig& config);

// ---- oscillatory integral guard -----------------------------------------

/// Cutoff quadrature of the oscillatory integral defining the Rieffel product
/// with chi(x, y) = exp(-eps^2 (x.x + y.y) / 2). `mode_momenta` rows are
/// covariant (omega, p) and `a`, `b` act on the basis of those modes.
DenseMatrix rieffel_quadrature(const DenseMatrix& a, const DenseMatrix& b, const SectorTable& sectors,
                               const ThetaMatrix& theta, double eps);

/// One 2-D factor: (2 pi)^-1 int dx dy exp(-eps^2 (x^2 + y^2)/2) exp(i(-xy + s x + c y)).
cplx cutoff_phase_integral(double s, double c, double eps);

CheckResult check_quadrature_guard(double tol = 1e-3, std::uint64_t seed = 42);

/// Convergence suite names in report order.
std::vector<std::string> convergence_check_names();
CheckResult run_convergence_check(const std::string& name, const StudyConfig& config);

}  // namespace qmw
