// Command-line front end: simulate, excursion, hermite, variance, lemmas,
// experiment. Exit codes: 0 ok, 1 other error, 2 embedding failure,
// 3 configuration error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrdfield/errors.hpp"
#include "lrdfield/fieldsim.hpp"
#include "lrdfield/harness.hpp"
#include "lrdfield/hermite_expansion.hpp"
#include "lrdfield/minkowski.hpp"
#include "lrdfield/reduction.hpp"

using namespace lrdfield;

namespace {

constexpr int kExitEmbedding = 2;
constexpr int kExitConfig = 3;

std::vector<CovarianceModel> parse_models(const std::string& text) {
  std::vector<CovarianceModel> models;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.find_first_not_of(" \t") == std::string::npos) continue;
    models.push_back(CovarianceModel::parse(part));
  }
  if (models.empty()) throw ConfigError("no covariance model given");
  return models;
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::stringstream item(part);
    T v{};
    if (!(item >> v)) throw ConfigError("bad list entry '" + part + "'");
    out.push_back(v);
  }
  return out;
}

void write_field(const LatticeField& f, const std::string& path, const std::string& format) {
  if (format == "bin") {
    write_field_binary(f, path);
  } else if (format == "csv") {
    write_field_csv(f, path);
  } else if (format == "pgm") {
    write_field_pgm(f, path);
  } else {
    throw ConfigError("unknown format '" + format + "' (bin, csv, pgm)");
  }
}

struct GridOptions {
  std::size_t grid = 128;
  double dx = 1.0;
  std::uint64_t seed = kDefaultMasterSeed;

  void add(CLI::App* app) {
    app->add_option("--grid", grid, "Grid side in nodes")->capture_default_str();
    app->add_option("--dx", dx, "Grid spacing")->capture_default_str();
    app->add_option("--seed", seed, "Seed")->capture_default_str();
  }
  LatticeSpec spec() const {
    LatticeSpec s{grid, grid, dx};
    s.validate();
    return s;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Excursion sets of Fisher-Snedecor fields built from long-range dependent "
               "Gaussian fields"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate one Gaussian field and write it out");
  GridOptions sim_grid;
  sim_grid.add(sim);
  std::string sim_model = "kind=cauchy alpha=0.65";
  std::string sim_out = "field.bin";
  std::string sim_format = "bin";
  sim->add_option("--model", sim_model, "Covariance model")->capture_default_str();
  sim->add_option("--out", sim_out, "Output path")->capture_default_str();
  sim->add_option("--format", sim_format, "bin, csv or pgm")->capture_default_str();

  // excursion
  auto* exc = app.add_subcommand("excursion", "F-field excursion set above a level");
  GridOptions exc_grid;
  exc_grid.add(exc);
  std::string exc_models =
      "kind=cauchy alpha=0.65; kind=cauchy alpha=0.8; kind=cauchy alpha=0.9";
  std::string exc_input;
  int exc_n = 1;
  double exc_level = 1.0;
  std::string exc_mask = "mask.pgm";
  std::string exc_mask_csv;
  exc->add_option("--models", exc_models, "Component models separated by ';'")
      ->capture_default_str();
  exc->add_option("--input", exc_input, "Threshold an existing binary dump instead");
  exc->add_option("--n", exc_n, "Numerator components")->capture_default_str();
  exc->add_option("--level", exc_level, "Level a")->capture_default_str();
  exc->add_option("--mask", exc_mask, "Mask PGM path")->capture_default_str();
  exc->add_option("--mask-csv", exc_mask_csv, "Mask CSV path");

  // hermite
  auto* her = app.add_subcommand("hermite", "Hermite expansion of the F-indicator");
  double her_level = 1.0;
  int her_n = 1;
  int her_m = 3;
  int her_kappa = 4;
  std::int64_t her_samples = 1'000'000;
  std::uint64_t her_seed = kDefaultMasterSeed;
  her->add_option("--level", her_level, "Level a")->capture_default_str();
  her->add_option("--n", her_n, "Numerator components")->capture_default_str();
  her->add_option("--m", her_m, "Total components")->capture_default_str();
  her->add_option("--kappa", her_kappa, "Highest order")->capture_default_str();
  her->add_option("--samples", her_samples, "Monte Carlo samples")->capture_default_str();
  her->add_option("--seed", her_seed, "Seed")->capture_default_str();

  // variance
  auto* var = app.add_subcommand("variance", "Variance scaling of sojourn vs. its projection");
  std::string var_case = "1";
  std::string var_r = "16,32,64,128";
  int var_reps = 200;
  std::uint64_t var_seed = kDefaultMasterSeed;
  std::string var_out;
  var->add_option("--case", var_case, "Case preset (first arm is used)")->capture_default_str();
  var->add_option("--r", var_r, "Grid sides, ascending")->capture_default_str();
  var->add_option("--reps", var_reps, "Realizations per r")->capture_default_str();
  var->add_option("--seed", var_seed, "Master seed")->capture_default_str();
  var->add_option("--out", var_out, "CSV output path");

  // lemmas
  auto* lem = app.add_subcommand("lemmas", "Multi-index gap and covariance product checks");
  std::string lem_alphas = "0.65,0.8,0.9";
  int lem_l0 = 2;
  std::string lem_k = "2,0,0";
  int lem_lmax = 6;
  double lem_zmax = 1e6;
  lem->add_option("--alphas", lem_alphas, "Exponents")->capture_default_str();
  lem->add_option("--l0", lem_l0, "Base order")->capture_default_str();
  lem->add_option("--k", lem_k, "Base multi-index")->capture_default_str();
  lem->add_option("--lmax", lem_lmax, "Highest order checked")->capture_default_str();
  lem->add_option("--zmax", lem_zmax, "Upper end of the lag grid")->capture_default_str();
  std::string lem_c1_csv;
  std::int64_t lem_c1_samples = 1'000'000;
  lem->add_option("--c1-csv", lem_c1_csv, "Write c1 with its Monte Carlo oracle for every k in N_l0");
  lem->add_option("--c1-samples", lem_c1_samples, "Monte Carlo samples per c1 oracle")
      ->capture_default_str();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte Carlo comparison of arms");
  std::string exp_case = "1";
  std::string exp_config;
  std::size_t exp_grid = 0;
  int exp_reps = 0;
  std::uint64_t exp_seed = 0;
  std::string exp_out;
  exp->add_option("--case", exp_case, "1, 2, 3 or custom")->capture_default_str();
  exp->add_option("--config", exp_config, "Config file (overrides the case preset)");
  exp->add_option("--grid", exp_grid, "Grid side");
  exp->add_option("--reps", exp_reps, "Realizations per arm");
  exp->add_option("--seed", exp_seed, "Master seed");
  exp->add_option("--out", exp_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  std::cout << std::setprecision(10);
  try {
    if (*sim) {
      const auto spec = sim_grid.spec();
      GaussianSynthesizer synth(spec, CovarianceModel::parse(sim_model));
      const auto field = synth.sample(sim_grid.seed);
      write_field(field, sim_out, sim_format);
      std::cout << "wrote " << sim_out << " (" << spec.n_x << "x" << spec.n_y << ", "
                << (synth.report().method == SynthesisMethod::CirculantEmbedding
                        ? "circulant embedding"
                        : "spectral quadrature")
                << ")\n";
    } else if (*exc) {
      LatticeField field;
      std::uint64_t seed = exc_grid.seed;
      if (!exc_input.empty()) {
        field = read_field_binary(exc_input);
        seed = field.seed;
      } else {
        VectorFieldSpec vspec{parse_models(exc_models), exc_n};
        vspec.validate();
        const auto comps = simulate_vector(exc_grid.spec(), vspec, seed);
        field = fisher_snedecor_field(comps, exc_n);
      }
      const auto mask = excursion_mask(field, exc_level);
      write_mask_pgm(mask, exc_mask);
      if (!exc_mask_csv.empty()) write_mask_csv(mask, exc_mask_csv);
      const auto s = excursion_area(field, exc_level);
      write_summary_csv_header(std::cout);
      write_summary_csv_row(std::cout, s, seed,
                            static_cast<double>(field.spec.n_x) * field.spec.dx);
    } else if (*her) {
      const auto g = f_indicator(her_level, her_n, her_m);
      const auto rep = expand(g, her_m, her_kappa, her_samples, her_seed);
      std::cout << "c4 = " << c4(her_level, her_n, her_m) << "\n";
      for (int j = 1; j <= her_m; ++j) std::cout << 'k' << j << ',';
      std::cout << "estimate,std_error,closed_form\n";
      for (std::size_t i = 0; i < rep.indices.size(); ++i) {
        const auto& v = rep.indices[i];
        for (int kj : v.k) std::cout << kj << ',';
        std::cout << rep.coefficients[i].estimate << ','
                  << rep.coefficients[i].std_error << ',';
        if (v.order() == 2) {
          std::cout << closed_form_cv_f_indicator(v, her_level, her_n, her_m);
        }
        std::cout << '\n';
      }
      std::cout << "hermite_rank = "
                << (rep.hermite_rank ? std::to_string(*rep.hermite_rank) : "none") << "\n";
      const auto gap = parseval_check(rep, g, her_samples, her_seed + 1);
      std::cout << "parseval: E G^2 = " << gap.second_moment << ", partial = " << gap.partial_sum
                << ", gap = " << gap.gap << " (se " << gap.std_error << ")\n";
    } else if (*var) {
      auto config = ExperimentConfig::preset(parse_case_id(var_case));
      config.n_realizations = var_reps;
      config.master_seed = var_seed;
      const auto rows = variance_scaling_report(config, parse_list<int>(var_r));
      std::cout << "r,var_centered,var_krk2,var_projection,ratio,ratio_se,analytic,correlation\n";
      for (const auto& r : rows) {
        std::cout << r.r << ',' << r.var_centered << ',' << r.var_krk2 << ','
                  << r.var_projection << ',' << r.ratio << ',' << r.ratio_se << ','
                  << r.analytic << ',' << r.correlation << '\n';
      }
      if (!var_out.empty()) write_variance_report_csv(rows, var_out);
    } else if (*lem) {
      const auto alphas = parse_list<double>(lem_alphas);
      const MultiIndex k{parse_list<int>(lem_k)};
      const auto gap = check_gap_inequality(alphas, lem_l0, k, lem_lmax);
      std::cout << "gap inequality: " << to_string(gap.status) << "\n  " << gap.detail
                << "\n  max/min alpha = " << gap.alpha_ratio << " (sufficient condition "
                << (gap.sufficient_ratio_condition ? "met" : "not met") << ")\n";
      const auto every = check_gap_inequality(alphas, lem_l0, lem_lmax);
      std::cout << "gap inequality, every base index of order " << lem_l0 << ": "
                << to_string(every.status) << "\n  " << every.detail << "\n";
      std::vector<CovarianceModel> models;
      for (double a : alphas) models.push_back(CovarianceModel::cauchy(a));
      const auto grid = log_grid(1e-3, lem_zmax, 10);
      const auto prod = check_product_bound(models, lem_l0, k, lem_lmax, grid);
      std::cout << "product bound (Cauchy): " << to_string(prod.status) << "\n  " << prod.detail
                << "\n  ratio at 0 = " << prod.ratio_at_zero << ", tail decreasing = "
                << (prod.tail_decreasing ? "yes" : "no") << "\n";
      if (!lem_c1_csv.empty()) {
        const auto rows = c1_table(WindowShape::unit_square(), alphas, lem_l0, lem_c1_samples,
                                   kDefaultMasterSeed);
        std::ofstream out(lem_c1_csv);
        if (!out) throw std::runtime_error("cannot write " + lem_c1_csv);
        write_c1_table_csv(alphas, rows, out);
        std::cout << "c1 table (" << rows.size() << " rows) written to " << lem_c1_csv << "\n";
      }
    } else if (*exp) {
      ExperimentConfig config;
      if (!exp_config.empty()) {
        std::ifstream in(exp_config);
        if (!in) throw ConfigError("cannot read " + exp_config);
        std::stringstream buf;
        buf << in.rdbuf();
        config = ExperimentConfig::parse(buf.str());
      } else {
        config = ExperimentConfig::preset(parse_case_id(exp_case));
      }
      if (exp_grid) config.grid.n_x = config.grid.n_y = exp_grid;
      if (exp_reps) config.n_realizations = exp_reps;
      if (exp_seed) config.master_seed = exp_seed;
      if (!exp_out.empty()) config.output_dir = exp_out;
      config.validate();
      const auto results = run_experiment(config);
      write_experiment_outputs(config, results);
      bool failed = false;
      for (const auto& r : results) {
        std::cout << r.label << ": " << r.areas.size() << " realizations, mean area " << r.mean
                  << ", variance " << r.variance;
        if (r.failures) {
          failed = true;
          std::cout << " (" << r.failures << " failed: " << r.failure_message << ")";
        }
        std::cout << '\n';
      }
      for (const auto& c : compare_arms(config, results)) {
        std::cout << "KS " << c.arm_x << " vs " << c.arm_y << " = " << c.statistic
                  << " (p " << c.p_value << ")\n";
      }
      std::cout << "outputs in " << config.output_dir.string() << '\n';
      if (failed) return kExitEmbedding;
    }
  } catch (const EmbeddingNotPD& e) {
    std::cerr << "embedding failure: " << e.what() << '\n';
    return kExitEmbedding;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
