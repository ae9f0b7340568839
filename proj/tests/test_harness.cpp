#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lrdfield/errors.hpp"
#include "lrdfield/fieldsim.hpp"
#include "lrdfield/harness.hpp"
#include "lrdfield/log.hpp"

using namespace lrdfield;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_case(CaseId id, const std::string& dir) {
  auto c = ExperimentConfig::preset(id);
  c.grid = LatticeSpec{32, 32, 1.0};
  c.n_realizations = 6;
  c.output_dir = std::filesystem::temp_directory_path() / dir;
  return c;
}

}  // namespace

TEST_CASE("presets") {
  const auto c1 = ExperimentConfig::preset(CaseId::Case1);
  CHECK(c1.arms.size() == 4);
  CHECK(c1.arm("b").fields.components[0] == CovarianceModel::cauchy(0.65));
  CHECK(c1.arm("a0.8").fields.components[2] == CovarianceModel::cauchy(0.8));
  CHECK(c1.comparisons.size() == 3);
  CHECK(c1.grid == LatticeSpec{128, 128, 1.0});
  CHECK(c1.n_realizations == 200);
  CHECK(c1.level == 1.0);
  const auto c2 = ExperimentConfig::preset(CaseId::Case2);
  CHECK(c2.arm("a0.1").fields.components[1] == CovarianceModel::cauchy(0.1));
  const auto c3 = ExperimentConfig::preset(CaseId::Case3);
  CHECK(c3.arm("c").fields.components[0] == CovarianceModel::bessel(0.0));
  CHECK(c3.comparisons.front() == std::pair<std::string, std::string>{"a", "c"});
}

TEST_CASE("config text round trip and overrides") {
  for (auto id : {CaseId::Case1, CaseId::Case2, CaseId::Case3}) {
    const auto c = ExperimentConfig::preset(id);
    const auto back = ExperimentConfig::parse(c.to_text());
    CHECK(back.to_text() == c.to_text());
  }
  const auto c = ExperimentConfig::parse("case = 3\ngrid = 64\nreps = 10 # short\nseed = 5\n");
  CHECK(c.grid.n_x == 64);
  CHECK(c.n_realizations == 10);
  CHECK(c.master_seed == 5);
  CHECK(c.arms.size() == 2);
  const auto custom = ExperimentConfig::parse(
      "case = custom\narm x = n=2; kind=sqexp; kind=sqexp; kind=cauchy alpha=0.4\n"
      "arm y = kind=cauchy alpha=0.4; kind=cauchy alpha=0.4\ncompare = x y\n");
  CHECK(custom.arm("x").fields.n == 2);
  CHECK(custom.arm("y").fields.m() == 2);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(ExperimentConfig::parse("case = 4\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("case = 1\nreps = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("case = 1\ngrid = abc\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("case = 1\nbogus = 2\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("case = 1\ncompare = b zz\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("case = custom\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("case = custom\narm x = kind=sqexp\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("case = custom\narm x/y = kind=sqexp; kind=sqexp\n"),
                  ConfigError);
}

TEST_CASE("two realizations are repeatable bit for bit") {
  auto c = small_case(CaseId::Case1, "lrdfield_h1");
  c.n_realizations = 2;
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  REQUIRE(a.size() == 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].areas.size() == 2);
    CHECK(a[k].areas_by_realization == b[k].areas_by_realization);
    CHECK(a[k].seeds == b[k].seeds);
    CHECK(std::is_sorted(a[k].areas.begin(), a[k].areas.end()));
  }
  // arms draw from disjoint seeds
  CHECK(a[0].seeds[0] != a[1].seeds[0]);
}

TEST_CASE("outputs are written and deterministic") {
  auto c = small_case(CaseId::Case1, "lrdfield_h2");
  std::filesystem::remove_all(c.output_dir);
  write_experiment_outputs(c, run_experiment(c));
  for (const char* f : {"arms.csv", "ks.csv", "config.echo", "qq_b_a0.65.csv", "qq_b_a0.9.csv",
                        "normal_qq_b.csv"}) {
    CHECK(std::filesystem::exists(c.output_dir / f));
  }
  const auto first = slurp(c.output_dir / "arms.csv");
  CHECK(first.rfind("arm,seed,area,fraction\n", 0) == 0);
  CHECK(std::count(first.begin(), first.end(), '\n') == 1 + 4 * 6);
  CHECK(ExperimentConfig::parse(slurp(c.output_dir / "config.echo")).to_text() == c.to_text());
  write_experiment_outputs(c, run_experiment(c));
  CHECK(slurp(c.output_dir / "arms.csv") == first);
  std::filesystem::remove_all(c.output_dir);
}

TEST_CASE("an arm that cannot be embedded is reported, not fatal") {
  warnings_enabled() = false;
  auto c = ExperimentConfig::parse(
      "case = custom\ngrid = 64\nreps = 3\n"
      "arm bad = kind=powerlaw_sv alpha=0.2 sv=log_oscillating; kind=cauchy alpha=0.5\n"
      "arm good = kind=cauchy alpha=0.5; kind=cauchy alpha=0.5\n");
  const auto res = run_experiment(c);
  warnings_enabled() = true;
  CHECK(res[0].failures == 3);
  CHECK(res[0].areas.empty());
  CHECK_FALSE(res[0].failure_message.empty());
  CHECK(res[1].failures == 0);
  CHECK(res[1].areas.size() == 3);
}

TEST_CASE("variance report shape and analytic scaling") {
  auto c = small_case(CaseId::Case1, "lrdfield_h3");
  c.n_realizations = 20;
  const auto rows = variance_scaling_report(c, {8, 16, 32});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.var_krk2 == doctest::Approx(4.0 * r.var_projection));
    CHECK(r.ratio > 0.0);
    CHECK(r.correlation <= 1.0);
  }
  // L == 1: the analytic column is A r^2.7 + B r^2.4 + C r^2.2 (the squared
  // indices (2,0,0), (0,2,0), (0,0,2)); solve for A, B, C and require each > 0.
  const double e[3] = {2.7, 2.4, 2.2};
  double m[3][3], rhs[3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = std::pow(rows[i].r, e[j]);
    rhs[i] = rows[i].analytic;
  }
  auto det = [](const double (&a)[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double d = det(m);
  for (int j = 0; j < 3; ++j) {
    double mj[3][3];
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) mj[i][k] = k == j ? rhs[i] : m[i][k];
    CHECK(det(mj) / d > 0.0);
  }
  const double growth = rows[1].analytic / rows[0].analytic;
  CHECK(growth > std::pow(2.0, 2.2));
  CHECK(growth < std::pow(2.0, 2.7));
  CHECK_THROWS_AS(variance_scaling_report(c, {8, 16}), ConfigError);
  CHECK_THROWS_AS(variance_scaling_report(c, {16, 8, 32}), ConfigError);
  auto c3 = small_case(CaseId::Case3, "lrdfield_h4");
  c3.n_realizations = 5;
  c3.arms.erase(c3.arms.begin());
  c3.comparisons.clear();
  const auto bessel_rows = variance_scaling_report(c3, {8, 16, 32});
  CHECK(std::isnan(bessel_rows[0].analytic));
}
