#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lrdfield/fieldsim.hpp"
#include "lrdfield/lattice.hpp"

namespace lrdfield {

enum class CaseId { Case1, Case2, Case3, Custom };

inline constexpr std::uint64_t kDefaultMasterSeed = 20261016;

struct Arm {
  std::string label;
  VectorFieldSpec fields;
};

/// One Monte Carlo experiment: every arm simulates n_realizations
/// F-fields on the same grid and records the excursion area above level.
///
/// Text form (one "key = value" per line, '#' starts a comment):
///
///   case = 1                 # 1, 2, 3 or custom; loads a preset first
///   grid = 128               # or grid_x / grid_y
///   dx = 1
///   level = 1
///   reps = 200
///   seed = 20261016
///   output_dir = out
///   arm b = n=1; kind=cauchy alpha=0.65; kind=cauchy alpha=0.8; kind=cauchy alpha=0.9
///   compare = b a0.65
///
/// Keys after "case" override the preset field by field; the first "arm"
/// or "compare" line replaces the preset's arms or comparisons.
struct ExperimentConfig {
  CaseId case_id = CaseId::Custom;
  LatticeSpec grid{};
  std::vector<Arm> arms;
  std::vector<std::pair<std::string, std::string>> comparisons;
  double level = 1.0;
  int n_realizations = 200;
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::filesystem::path output_dir = "out";

  /// Throws ConfigError on any inconsistency.
  void validate() const;
  const Arm& arm(std::string_view label) const;
  std::string to_text() const;
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig preset(CaseId id);
};

std::string to_string(CaseId id);
CaseId parse_case_id(std::string_view text);

struct ArmResult {
  std::string label;
  /// Ascending; one per successful realization.
  std::vector<double> areas;
  double mean = 0.0;
  double variance = 0.0;
  /// Realization order.
  std::vector<std::uint64_t> seeds;
  std::vector<double> areas_by_realization;
  std::vector<double> fractions_by_realization;
  std::size_t clipped_cells = 0;
  int failures = 0;
  std::string failure_message;
};

/// Seed of realization i of arm k: derive_seed(master_seed, k, i).
/// Component j of that realization uses stream key (seed, j).
std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t arm, std::size_t i);

/// Realizations run in parallel; results are stored by realization index,
/// so the output is independent of the thread count. An arm whose
/// synthesizer cannot be built is reported with failures == n_realizations.
std::vector<ArmResult> run_experiment(const ExperimentConfig& config);

struct Comparison {
  std::string arm_x;
  std::string arm_y;
  /// Kolmogorov-Smirnov on per-arm standardized areas.
  double statistic = 0.0;
  double p_value = 1.0;
};

std::vector<Comparison> compare_arms(const ExperimentConfig& config,
                                     const std::vector<ArmResult>& results);

/// Writes arms.csv, ks.csv, qq_<x>_<y>.csv, normal_qq_<arm>.csv and
/// config.echo into config.output_dir.
void write_experiment_outputs(const ExperimentConfig& config,
                              const std::vector<ArmResult>& results);

struct VarianceScalingRow {
  int r = 0;  // grid side in nodes
  double var_centered = 0.0;
  double var_krk2 = 0.0;
  double var_projection = 0.0;
  /// Var(projection) / Var(centered sojourn), jackknife standard error.
  double ratio = 0.0;
  double ratio_se = 0.0;
  /// Leading-order Var of the projection; NaN without (alpha, L) tails.
  double analytic = 0.0;
  double correlation = 0.0;
};

/// Runs the first arm of `config` on r x r grids for every r in r_list
/// (ascending, at least three values) with n_realizations each.
std::vector<VarianceScalingRow> variance_scaling_report(const ExperimentConfig& config,
                                                        const std::vector<int>& r_list);

void write_variance_report_csv(const std::vector<VarianceScalingRow>& rows,
                               const std::filesystem::path& path);

}  // namespace lrdfield
