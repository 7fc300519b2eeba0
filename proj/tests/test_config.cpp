#include <gtest/gtest.h>

#include "qmw/config.hpp"
#include "qmw/runner.hpp"

using namespace qmw;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, EmptyObjectGivesDefaults) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.lattice.n, 1);
  EXPECT_EQ(c.lattice.M, 8);
  EXPECT_EQ(c.lattice.L, 8.0);
  EXPECT_EQ(c.lattice.m, 0.0);
  EXPECT_EQ(c.max_particles, 2);
  EXPECT_EQ(c.theta, (std::vector<double>{0.0, 0.1, -0.1, 0.0}));
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.tol_exact, 1e-12);
  EXPECT_EQ(c.order_threshold, 0.9);
  EXPECT_EQ(c.memory_budget, std::size_t{2} << 30);
}

TEST(Config, DefaultThetaFollowsDimension) {
  const auto c = parse_config(R"({"n": 2, "M": 4})");
  ASSERT_EQ(c.theta.size(), 9u);
  EXPECT_EQ(c.theta[1], 0.1);
  EXPECT_EQ(c.theta[3], -0.1);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"theta": [[0, 0.1], [0.2, 0]]})").find("antisymmetry"), std::string::npos);
  EXPECT_NE(error_of(R"({"colour": 1})").find("colour"), std::string::npos);
  EXPECT_NE(error_of(R"({"M": "eight"})").find("'M'"), std::string::npos);
  EXPECT_NE(error_of(R"({"M": 7})").find("M"), std::string::npos);
  EXPECT_NE(error_of(R"({"N_max": 0})").find("N_max"), std::string::npos);
  EXPECT_NE(error_of(R"({"theta": [0, 0.1, -0.1]})").find("theta"), std::string::npos);
  EXPECT_NE(error_of(R"({"refinements": [[8, 8], [8, 16]]})").find("refinements"), std::string::npos);
  EXPECT_NE(error_of(R"({"tol_exact": -1})").find("tol_exact"), std::string::npos);
}

TEST(Config, SyntaxErrorCarriesLineAndColumn) {
  const auto msg = error_of("{\n  \"M\": 8,\n  \"L\" 8\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, CanonicalFormRoundTripsToSameHash) {
  const auto c = parse_config(
      R"({"n": 2, "M": 4, "L": 5.5, "m": 0.5, "N_max": 1, "seed": 7,
          "theta": [[0, 0.1, 0], [-0.1, 0, 0.2], [0, -0.2, 0]],
          "refinements": [[4, 4], [6, 6], [8, 8]], "suites": ["exact"], "output_dir": "/tmp/a"})");
  const auto again = parse_config(canonical_config(c));
  EXPECT_EQ(canonical_config(again), canonical_config(c));
  EXPECT_EQ(config_hash(again), config_hash(c));
  auto moved = c;
  moved.output_dir = "/elsewhere";
  EXPECT_EQ(config_hash(moved), config_hash(c));
  auto reseeded = c;
  reseeded.seed = 8;
  EXPECT_NE(config_hash(reseeded), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, CsvHelpers) {
  EXPECT_EQ(parse_theta_csv("0.3", 2), (std::vector<double>{0.0, 0.3, -0.3, 0.0}));
  EXPECT_EQ(parse_theta_csv("0,1,-1,0", 2), (std::vector<double>{0, 1, -1, 0}));
  EXPECT_THROW(parse_theta_csv("0,1,-1", 2), ConfigError);
  EXPECT_THROW(parse_theta_csv("x", 2), ConfigError);
  EXPECT_EQ(parse_refinements("8:8,16:16.5"), (std::vector<std::pair<int, double>>{{8, 8.0}, {16, 16.5}}));
  EXPECT_THROW(parse_refinements("8-8"), ConfigError);
}

TEST(Runner, SuiteResolution) {
  EXPECT_EQ(resolve_suites({"all"}, "verify"), exact_suite_names());
  EXPECT_EQ(resolve_suites({"all"}, "convergence"), study_suite_names());
  EXPECT_EQ(resolve_suites({"exact", "lemma8", "exact"}, "verify"), (std::vector<std::string>{"exact", "lemma8"}));
  EXPECT_THROW(resolve_suites({"nope"}, "verify"), ConfigError);
}

TEST(Runner, NamedOperators) {
  const auto space = make_fock_space(LatticeSpec{2, 4, 4.0, 0.0}, 1);
  for (const char* name : {"N", "P0", "P2", "V1", "X2", "Xs1", "X0", "Vt0", "Vt2", "U1", "NWP2", "Vt1_2"})
    EXPECT_EQ(named_operator(space, name).dim(), space.basis.size()) << name;
  EXPECT_THROW(named_operator(space, "X3"), ConfigError);
  EXPECT_THROW(named_operator(space, "V0"), ConfigError);
  EXPECT_THROW(named_operator(space, "Q1"), ConfigError);
}

TEST(Runner, ReportIsDeterministicApartFromRunBlock) {
  RunConfig c = parse_config(R"({"M": 4, "L": 4})");
  const auto checks = run_suites(c, {"exact", "controls"});
  const auto again = run_suites(c, {"exact", "controls"});
  auto strip = [](std::string s) { return s.substr(0, s.find("\"run\"")); };
  const auto a = report_json(c, "verify", checks, "2026-01-01T00:00:00Z");
  const auto b = report_json(c, "verify", again, "2026-06-01T00:00:00Z");
  EXPECT_EQ(strip(a), strip(b));
  EXPECT_NE(a.find("\"summary\""), std::string::npos);
  EXPECT_NE(a.find("\"config_hash\": \"" + config_hash(c) + "\""), std::string::npos);
}

TEST(Runner, ConvergenceCsvHeader) {
  CheckResult r;
  r.name = "demo";
  r.kind = CheckKind::convergence;
  r.residuals = {0.4, 0.1, 0.025};
  r.levels = {{8, 8.0}, {16, 16.0}, {32, 32.0}};
  r.spacings = {0.5, 0.25, 0.125};
  r.fitted_order = 2.0;
  const auto csv = convergence_csv({r});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "check,M,L,dp,residual,fitted_order");
  EXPECT_NE(csv.find("demo,16,16,0.25,0.10000000000000001,2"), std::string::npos) << csv;
}
