// One line per acceptance criterion. Names passed with --known-finding are
// still printed as FAIL; the exit status then requires them to keep failing
// and everything else to pass.
#include <chrono>
#include <cstdio>
#include <numbers>
#include <set>
#include <string>

#include "qmw/verify.hpp"

using namespace qmw;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Tally {
  std::set<std::string> known;
  int failures = 0;
  int known_hits = 0;

  void line(const std::string& id, const std::string& name, bool pass, const std::string& detail) {
    const bool is_known = known.contains(name);
    std::printf("%s [%s] %s  %s%s\n", pass ? "PASS" : "FAIL", id.c_str(), name.c_str(), detail.c_str(),
                !pass && is_known ? "  (known finding)" : "");
    if (is_known) {
      known_hits += pass ? 0 : 1;
      failures += pass ? 1 : 0;  // a known finding that passes needs a second look
    } else if (!pass) {
      ++failures;
    }
    std::fflush(stdout);
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string residual_list(const std::vector<double>& r) {
  std::string s;
  for (double v : r) s += (s.empty() ? "" : ", ") + fmt("%.3e", v);
  return "[" + s + "]";
}

void exact_criterion(Tally& t, const std::string& id, double m) {
  constexpr double tol = 1e-12;
  const auto t0 = Clock::now();
  bool all = true;
  double worst = 0.0;
  for (int n : {1, 2}) {
    InstanceConfig c;
    c.lattice = n == 1 ? LatticeSpec{1, 8, 8.0, m} : LatticeSpec{2, 4, 4.0, m};
    c.max_particles = 2;
    c.theta = theta_for_dimension({0.0, 0.1, -0.1, 0.0}, n);
    c.tol_exact = tol;
    for (const auto& r : check_exact_suite(c)) {
      worst = std::max(worst, r.residuals.front());
      all = all && r.pass;
      if (!r.pass) t.line(id, "exact/" + r.name, false, fmt("residual %.3e", r.residuals.front()));
    }
  }
  const double secs = seconds_since(t0);
  t.line(id, "exact_suite", all, "n=1 M=8 and n=2 M=4, N_max=2, worst residual " + fmt("%.2e", worst) + " <= 1e-12");
  t.line(id, "exact_runtime", secs < 30.0, fmt("%.1f s < 30 s", secs));
}

void convergence_criterion(Tally& t, const std::string& id, double m) {
  StudyConfig c;
  c.n = 1;
  c.m = m;
  c.theta = {0.0, 0.1, -0.1, 0.0};
  c.seed = 42;
  c.refinements = {{8, 8.0}, {16, 16.0}, {32, 32.0}};
  const auto t0 = Clock::now();
  for (const char* name : {"lemma8", "translation_law", "theorem_0j", "theorem_ij", "nwp_equiv", "stencil_spectral"}) {
    const auto r = run_convergence_check(name, c);
    t.line(id, name, r.pass,
           residual_list(r.residuals) + " order " + fmt("%.3f", r.fitted_order) + " >= " + fmt("%.1f", r.threshold));
  }
  const double secs = seconds_since(t0);
  t.line(id, "convergence_runtime", secs < 300.0, fmt("%.1f s < 300 s", secs));
  const auto extra = check_theorem_0j_expanded(c);
  std::printf("info [%s] theorem_0j_expanded  %s order %.3f\n", id.c_str(), residual_list(extra.residuals).c_str(),
              extra.fitted_order);
}

}  // namespace

int main(int argc, char** argv) {
  Tally t;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--known-finding") t.known.insert(argv[++i]);

  exact_criterion(t, "1", 0.0);

  {
    const auto t0 = Clock::now();
    const auto r = check_quadrature_guard(1e-3, 42);
    const double secs = seconds_since(t0);
    t.line("2", "quadrature_guard", r.pass && secs < 60.0,
           fmt("relative error %.2e <= 1e-3", r.residuals.front()) + fmt(", %.1f s < 60 s", secs));
  }

  convergence_criterion(t, "3", 0.0);

  {
    StudyConfig c;
    c.theta = {0.0, 0.1, -0.1, 0.0};
    const auto s = check_sector_law(c);
    const double dev = std::abs(s.lhs_ratio / s.target_ratio - 1.0);
    t.line("4", "sector_law", s.check.pass,
           fmt("two/one particle ratio %.4f", s.lhs_ratio) + fmt(" vs %.4f", s.target_ratio) +
               fmt(", deviation %.2e <= 0.1", dev));
  }

  exact_criterion(t, "5", 0.5);
  convergence_criterion(t, "5", 0.5);

  {
    InstanceConfig c;
    c.lattice = LatticeSpec{1, 8, 8.0, 0.0};
    c.theta = {0.0, 0.1, -0.1, 0.0};
    for (const auto& r : check_negative_controls(c))
      t.line("6", r.name, r.pass, fmt("corrupted residual %.3e >= 1e-3", r.residuals.front()));
  }

  std::printf("%d unexpected result(s), %d known finding(s)\n", t.failures, t.known_hits);
  return t.failures == 0 ? 0 : 1;
}
