#include "lrdfield/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "lrdfield/errors.hpp"
#include "lrdfield/hermite_expansion.hpp"
#include "lrdfield/log.hpp"
#include "lrdfield/minkowski.hpp"
#include "lrdfield/reduction.hpp"
#include "lrdfield/rng.hpp"
#include "lrdfield/statistics.hpp"

namespace lrdfield {

namespace {

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError("config: bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

bool label_ok(std::string_view label) {
  return !label.empty() && std::all_of(label.begin(), label.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
  });
}

Arm uniform_arm(std::string label, const CovarianceModel& model, int m) {
  return {std::move(label), {std::vector<CovarianceModel>(m, model), 1}};
}

Arm parse_arm(std::string_view label, std::string_view spec) {
  Arm arm;
  arm.label = std::string(label);
  while (!spec.empty()) {
    const auto cut = spec.find(';');
    const auto part = trim(spec.substr(0, cut));
    spec = cut == std::string_view::npos ? std::string_view{} : spec.substr(cut + 1);
    if (part.empty()) continue;
    if (part.starts_with("n=")) {
      arm.fields.n = parse_number<int>("n", trim(part.substr(2)));
    } else {
      arm.fields.components.push_back(CovarianceModel::parse(part));
    }
  }
  return arm;
}

}  // namespace

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::Case1: return "1";
    case CaseId::Case2: return "2";
    case CaseId::Case3: return "3";
    case CaseId::Custom: return "custom";
  }
  return {};
}

CaseId parse_case_id(std::string_view text) {
  if (text == "1") return CaseId::Case1;
  if (text == "2") return CaseId::Case2;
  if (text == "3") return CaseId::Case3;
  if (text == "custom") return CaseId::Custom;
  throw ConfigError("unknown case '" + std::string(text) + "' (expected 1, 2, 3 or custom)");
}

ExperimentConfig ExperimentConfig::preset(CaseId id) {
  ExperimentConfig c;
  c.case_id = id;
  c.grid = LatticeSpec{128, 128, 1.0};
  c.level = 1.0;
  c.n_realizations = 200;
  auto mixed_vs_uniform = [&c](const std::vector<double>& alphas) {
    Arm mixed{"b", {{}, 1}};
    for (double a : alphas) mixed.fields.components.push_back(CovarianceModel::cauchy(a));
    c.arms.push_back(mixed);
    for (double a : alphas) {
      const auto label = "a" + shortest(a);
      c.arms.push_back(uniform_arm(label, CovarianceModel::cauchy(a), 3));
      c.comparisons.emplace_back("b", label);
    }
  };
  switch (id) {
    case CaseId::Case1: mixed_vs_uniform({0.65, 0.8, 0.9}); break;
    case CaseId::Case2: mixed_vs_uniform({0.1, 0.5, 0.9}); break;
    case CaseId::Case3:
      c.arms.push_back(uniform_arm("a", CovarianceModel::cauchy(0.5), 3));
      c.arms.push_back(uniform_arm("c", CovarianceModel::bessel(0.0), 3));
      c.comparisons.emplace_back("a", "c");
      break;
    case CaseId::Custom: break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  grid.validate();
  if (n_realizations < 2) throw ConfigError("config: reps must be at least 2");
  if (!std::isfinite(level)) throw ConfigError("config: level must be finite");
  if (arms.empty()) throw ConfigError("config: no arms defined");
  std::set<std::string> labels;
  for (const auto& a : arms) {
    if (!label_ok(a.label)) throw ConfigError("config: bad arm label '" + a.label + "'");
    if (!labels.insert(a.label).second) throw ConfigError("config: duplicate arm " + a.label);
    a.fields.validate();
  }
  for (const auto& [x, y] : comparisons) {
    if (!labels.count(x) || !labels.count(y)) {
      throw ConfigError("config: comparison " + x + " vs " + y + " names an unknown arm");
    }
  }
}

const Arm& ExperimentConfig::arm(std::string_view label) const {
  for (const auto& a : arms) {
    if (a.label == label) return a;
  }
  throw ConfigError("config: no arm '" + std::string(label) + "'");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << "case = " << to_string(case_id) << '\n'
     << "grid_x = " << grid.n_x << '\n'
     << "grid_y = " << grid.n_y << '\n'
     << "dx = " << shortest(grid.dx) << '\n'
     << "level = " << shortest(level) << '\n'
     << "reps = " << n_realizations << '\n'
     << "seed = " << master_seed << '\n'
     << "output_dir = " << output_dir.string() << '\n';
  for (const auto& a : arms) {
    os << "arm " << a.label << " = n=" << a.fields.n;
    for (const auto& model : a.fields.components) os << "; " << model.to_string();
    os << '\n';
  }
  for (const auto& [x, y] : comparisons) os << "compare = " << x << ' ' << y << '\n';
  return os.str();
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig c;
  bool arms_seen = false;
  bool compares_seen = false;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "case") {
      const auto id = parse_case_id(value);
      const auto keep_dir = c.output_dir;
      c = preset(id);
      c.output_dir = keep_dir;
      arms_seen = compares_seen = false;
    } else if (key == "grid") {
      c.grid.n_x = c.grid.n_y = parse_number<std::size_t>(key, value);
    } else if (key == "grid_x") {
      c.grid.n_x = parse_number<std::size_t>(key, value);
    } else if (key == "grid_y") {
      c.grid.n_y = parse_number<std::size_t>(key, value);
    } else if (key == "dx") {
      c.grid.dx = parse_number<double>(key, value);
    } else if (key == "level") {
      c.level = parse_number<double>(key, value);
    } else if (key == "reps") {
      c.n_realizations = parse_number<int>(key, value);
    } else if (key == "seed") {
      c.master_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "output_dir") {
      c.output_dir = std::string(value);
    } else if (key.starts_with("arm ")) {
      if (!arms_seen) c.arms.clear();
      arms_seen = true;
      c.arms.push_back(parse_arm(trim(key.substr(4)), value));
    } else if (key == "compare") {
      if (!compares_seen) c.comparisons.clear();
      compares_seen = true;
      const auto sp = value.find_first_of(" \t");
      if (sp == std::string_view::npos) throw ConfigError("config: compare needs two arm labels");
      c.comparisons.emplace_back(std::string(trim(value.substr(0, sp))),
                                 std::string(trim(value.substr(sp + 1))));
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  c.validate();
  return c;
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t arm, std::size_t i) {
  return derive_seed(master_seed, arm, i);
}

namespace {

/// One synthesizer per distinct model; components reuse them by index.
struct ArmSampler {
  std::vector<GaussianSynthesizer> synths;
  std::vector<std::size_t> component_synth;

  ArmSampler(const LatticeSpec& grid, const VectorFieldSpec& fields) {
    std::vector<CovarianceModel> distinct;
    for (const auto& model : fields.components) {
      auto it = std::find(distinct.begin(), distinct.end(), model);
      if (it == distinct.end()) {
        distinct.push_back(model);
        synths.emplace_back(grid, model);
        component_synth.push_back(distinct.size() - 1);
      } else {
        component_synth.push_back(static_cast<std::size_t>(it - distinct.begin()));
      }
    }
  }

  std::vector<LatticeField> sample(std::uint64_t seed) const {
    std::vector<LatticeField> out;
    out.reserve(component_synth.size());
    for (std::size_t j = 0; j < component_synth.size(); ++j) {
      out.push_back(synths[component_synth[j]].sample(seed, j));
    }
    return out;
  }
};

void finish_arm(ArmResult& res) {
  res.areas = res.areas_by_realization;
  std::sort(res.areas.begin(), res.areas.end());
  if (!res.areas.empty()) res.mean = mean(res.areas);
  res.variance = res.areas.size() > 1 ? variance(res.areas) : 0.0;
}

}  // namespace

std::vector<ArmResult> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<ArmResult> results;
  const auto reps = static_cast<std::size_t>(config.n_realizations);
  for (std::size_t k = 0; k < config.arms.size(); ++k) {
    const auto& arm = config.arms[k];
    ArmResult res;
    res.label = arm.label;
    std::unique_ptr<ArmSampler> sampler;
    try {
      sampler = std::make_unique<ArmSampler>(config.grid, arm.fields);
    } catch (const EmbeddingNotPD& e) {
      res.failures = config.n_realizations;
      res.failure_message = e.what();
      log_warning("arm " + arm.label + " aborted: " + e.what());
      results.push_back(std::move(res));
      continue;
    }
    std::vector<double> area(reps);
    std::vector<double> fraction(reps);
    std::vector<std::size_t> clipped(reps);
    std::vector<std::uint64_t> seeds(reps);
    const int n = arm.fields.n;
    const long long count = static_cast<long long>(reps);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
      const auto seed = realization_seed(config.master_seed, k, static_cast<std::size_t>(i));
      const auto components = sampler->sample(seed);
      const auto f = fisher_snedecor_field(components, n);
      const auto s = excursion_area(f, config.level);
      seeds[i] = seed;
      area[i] = s.area;
      fraction[i] = s.fraction;
      clipped[i] = s.clipped_cells;
    }
    res.seeds = std::move(seeds);
    res.areas_by_realization = std::move(area);
    res.fractions_by_realization = std::move(fraction);
    for (auto c : clipped) res.clipped_cells += c;
    finish_arm(res);
    results.push_back(std::move(res));
  }
  return results;
}

std::vector<Comparison> compare_arms(const ExperimentConfig& config,
                                     const std::vector<ArmResult>& results) {
  auto find = [&](const std::string& label) -> const ArmResult& {
    for (const auto& r : results) {
      if (r.label == label) return r;
    }
    throw ConfigError("no result for arm " + label);
  };
  std::vector<Comparison> out;
  for (const auto& [x, y] : config.comparisons) {
    const auto& rx = find(x);
    const auto& ry = find(y);
    Comparison c{x, y, std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN()};
    if (rx.areas.size() >= 2 && ry.areas.size() >= 2 && rx.variance > 0.0 && ry.variance > 0.0) {
      const auto sx = standardize(rx.areas);
      const auto sy = standardize(ry.areas);
      const auto ks = ks_two_sample(sx, sy);
      c.statistic = ks.statistic;
      c.p_value = ks.p_value;
    }
    out.push_back(c);
  }
  return out;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  os.precision(17);
  return os;
}

}  // namespace

void write_experiment_outputs(const ExperimentConfig& config,
                              const std::vector<ArmResult>& results) {
  const auto& dir = config.output_dir;
  std::filesystem::create_directories(dir);
  {
    auto os = open_output(dir / "config.echo");
    os << config.to_text();
  }
  {
    auto os = open_output(dir / "arms.csv");
    os << "arm,seed,area,fraction\n";
    for (const auto& r : results) {
      for (std::size_t i = 0; i < r.areas_by_realization.size(); ++i) {
        os << r.label << ',' << r.seeds[i] << ',' << r.areas_by_realization[i] << ','
           << r.fractions_by_realization[i] << '\n';
      }
    }
  }
  {
    auto os = open_output(dir / "ks.csv");
    os << "arm_x,arm_y,statistic,p\n";
    for (const auto& c : compare_arms(config, results)) {
      os << c.arm_x << ',' << c.arm_y << ',' << c.statistic << ',' << c.p_value << '\n';
    }
  }
  std::map<std::string, const ArmResult*> by_label;
  for (const auto& r : results) by_label[r.label] = &r;
  for (const auto& [x, y] : config.comparisons) {
    const auto& ax = by_label.at(x)->areas;
    const auto& ay = by_label.at(y)->areas;
    if (ax.empty() || ay.empty()) continue;
    auto os = open_output(dir / ("qq_" + x + "_" + y + ".csv"));
    os << "q_x,q_y\n";
    for (const auto& [qx, qy] : qq_data(ax, ay)) os << qx << ',' << qy << '\n';
  }
  for (const auto& r : results) {
    if (r.areas.empty()) continue;
    auto os = open_output(dir / ("normal_qq_" + r.label + ".csv"));
    os << "z,standardized_area\n";
    for (const auto& [z, q] : normal_qq_data(r.areas).points) os << z << ',' << q << '\n';
  }
}

std::vector<VarianceScalingRow> variance_scaling_report(const ExperimentConfig& config,
                                                        const std::vector<int>& r_list) {
  config.validate();
  if (r_list.size() < 3) throw ConfigError("variance report: need at least three r values");
  if (!std::is_sorted(r_list.begin(), r_list.end()) ||
      std::adjacent_find(r_list.begin(), r_list.end()) != r_list.end()) {
    throw ConfigError("variance report: r values must be strictly ascending");
  }
  const auto& fields = config.arms.front().fields;
  const int n = fields.n;
  const int m = fields.m();
  const double a = config.level;

  std::optional<ComponentParams> params;
  try {
    params = ComponentParams::from_models(fields.components, n, a);
  } catch (const DomainError&) {
  }
  std::vector<std::pair<MultiIndex, double>> coeffs;
  for (const auto& v : enumerate_multiindices(m, 2)) {
    coeffs.emplace_back(v, closed_form_cv_f_indicator(v, a, n, m));
  }

  // Nested windows: one realization on the largest grid, statistics on its
  // corner r x r sub-windows, as in the growing-window setting Delta(r).
  const auto reps = static_cast<std::size_t>(config.n_realizations);
  const std::size_t n_r = r_list.size();
  const auto r_max = static_cast<std::size_t>(r_list.back());
  if (r_list.front() < 2) throw ConfigError("variance report: r must be at least 2");
  const ArmSampler sampler(LatticeSpec{r_max, r_max, config.grid.dx}, fields);
  std::vector<std::vector<double>> centered(n_r, std::vector<double>(reps));
  auto krk2 = centered;
  const long long count = static_cast<long long>(reps);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    const auto seed = derive_seed(config.master_seed, 0x7A000000ULL + r_max,
                                  static_cast<std::uint64_t>(i));
    const auto full = sampler.sample(seed);
    for (std::size_t q = 0; q < n_r; ++q) {
      const auto side = static_cast<std::size_t>(r_list[q]);
      std::vector<LatticeField> components;
      for (const auto& c : full) components.push_back(crop(c, side, side));
      const auto f = fisher_snedecor_field(components, n);
      centered[q][i] = centered_sojourn(f, a, n, m);
      krk2[q][i] = empirical_krk2(components, n, m, a);
    }
  }

  std::vector<VarianceScalingRow> rows;
  for (std::size_t q = 0; q < n_r; ++q) {
    const auto& cen = centered[q];
    std::vector<double> proj(reps);
    for (std::size_t i = 0; i < reps; ++i) proj[i] = 0.5 * krk2[q][i];
    VarianceScalingRow row;
    row.r = r_list[q];
    row.var_centered = variance(cen);
    row.var_krk2 = variance(krk2[q]);
    row.var_projection = variance(proj);
    auto ratio_of = [&](std::span<const std::size_t> idx) {
      std::vector<double> c, p;
      c.reserve(idx.size());
      p.reserve(idx.size());
      for (auto i : idx) {
        c.push_back(cen[i]);
        p.push_back(proj[i]);
      }
      return variance(p) / variance(c);
    };
    const auto jk = jackknife(reps, ratio_of);
    row.ratio = jk.value;
    row.ratio_se = jk.std_error;
    row.correlation = pearson_correlation(cen, krk2[q]);
    row.analytic = std::numeric_limits<double>::quiet_NaN();
    if (params) {
      try {
        row.analytic = var_krk_asymptote(*params, WindowShape::unit_square(), 2, coeffs,
                                         row.r * config.grid.dx, 2);
      } catch (const DivergentConstant&) {
      }
    }
    rows.push_back(row);
  }
  return rows;
}

void write_variance_report_csv(const std::vector<VarianceScalingRow>& rows,
                               const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto os = open_output(path);
  os << "r,var_centered,var_krk2,var_projection,ratio,ratio_se,analytic_var_projection,"
        "correlation\n";
  for (const auto& row : rows) {
    os << row.r << ',' << row.var_centered << ',' << row.var_krk2 << ',' << row.var_projection
       << ',' << row.ratio << ',' << row.ratio_se << ',' << row.analytic << ','
       << row.correlation << '\n';
  }
}

}  // namespace lrdfield
