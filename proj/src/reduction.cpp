#include "lrdfield/reduction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lrdfield/errors.hpp"
#include "lrdfield/rng.hpp"

namespace lrdfield {

namespace {

constexpr double kPi = std::numbers::pi;

double weighted_order(std::span<const double> alphas, const MultiIndex& k) {
  if (static_cast<int>(alphas.size()) != k.m()) {
    throw DomainError("multi-index length differs from number of exponents");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < alphas.size(); ++j) s += alphas[j] * k.k[j];
  return s;
}

double min_alpha(std::span<const double> alphas) {
  if (alphas.empty()) throw DomainError("need at least one exponent");
  return *std::min_element(alphas.begin(), alphas.end());
}

bool same_alpha(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

}  // namespace

double WindowShape::diameter() const noexcept {
  return kind == WindowKind::UnitSquare ? std::numbers::sqrt2 : 2.0;
}

double WindowShape::area() const noexcept {
  return kind == WindowKind::UnitSquare ? 1.0 : kPi;
}

double distance_density(const WindowShape& shape, double rho) {
  if (!(rho >= 0.0) || rho > shape.diameter()) return 0.0;
  if (shape.kind == WindowKind::UnitSquare) {
    if (rho <= 1.0) return 2.0 * rho * (kPi - 4.0 * rho + rho * rho);
    const double r2 = rho * rho;
    const double v = 2.0 * rho *
                     (4.0 * std::sqrt(r2 - 1.0) - (r2 + 2.0 - kPi) - 4.0 * std::acos(1.0 / rho));
    return std::max(0.0, v);
  }
  const double h = 0.5 * rho;
  return 4.0 * rho / kPi * (std::acos(h) - h * std::sqrt(std::max(0.0, 1.0 - h * h)));
}

double c1_exponent(const WindowShape& shape, double s, int d) {
  if (d != 2) throw DomainError("c1: windows are planar, d must be 2");
  if (s >= d) {
    throw DivergentConstant("c1 diverges: sum alpha_j k_j = " + std::to_string(s) +
                            " >= d = " + std::to_string(d));
  }
  // z = D t^p with p = 1/(d - s) turns the z^(d-1-s) behaviour at the
  // origin into a bounded integrand on t in [0, 1].
  const double diam = shape.diameter();
  const double p = 1.0 / (d - s);
  auto integrand = [&](double t) {
    if (t <= 0.0) {
      // limit t -> 0: psi(z) ~ (2 pi / |Delta|) z
      return 2.0 * kPi / shape.area() * std::pow(diam, 2.0 - s) * p;
    }
    const double z = diam * std::pow(t, p);
    return std::pow(z, -s) * distance_density(shape, z) * diam * p * std::pow(t, p - 1.0);
  };
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0.0;
  if (shape.kind == WindowKind::UnitSquare) {
    // psi has a square-root kink at z = 1.
    const double t1 = std::pow(1.0 / diam, 1.0 / p);
    total = Rule::integrate(integrand, 0.0, t1, 15, 1e-13) +
            Rule::integrate(integrand, t1, 1.0, 15, 1e-13);
  } else {
    total = Rule::integrate(integrand, 0.0, 1.0, 15, 1e-13);
  }
  return total;
}

double set_covariance(const WindowShape& shape, double hx, double hy) {
  if (shape.kind == WindowKind::UnitSquare) {
    return std::max(0.0, 1.0 - std::abs(hx)) * std::max(0.0, 1.0 - std::abs(hy));
  }
  const double rho = std::hypot(hx, hy);
  if (rho >= 2.0) return 0.0;
  return 2.0 * std::acos(rho / 2.0) - rho / 2.0 * std::sqrt(4.0 - rho * rho);
}

MonteCarloValue c1_monte_carlo(const WindowShape& shape, double s, std::int64_t samples,
                               std::uint64_t seed) {
  if (!(s < 2.0)) throw DivergentConstant("c1_monte_carlo: s must be < 2");
  if (samples < 2) throw DomainError("c1_monte_carlo: need at least two samples");
  GaussianStream g(seed, 0);
  const double diam = shape.diameter();
  const double scale =
      2.0 * kPi * std::pow(diam, 2.0 - s) / (2.0 - s) / (shape.area() * shape.area());
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double rho = diam * std::pow(g.uniform(), 1.0 / (2.0 - s));
    const double theta = 2.0 * kPi * g.uniform();
    const double w = scale * set_covariance(shape, rho * std::cos(theta), rho * std::sin(theta));
    sum += w;
    sum2 += w * w;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sum2 / n - mean * mean) / (n - 1.0))};
}

std::vector<C1Row> c1_table(const WindowShape& shape, std::span<const double> alphas, int order,
                            std::int64_t samples, std::uint64_t seed) {
  std::vector<C1Row> rows;
  std::uint64_t stream = 0;
  for (const auto& k : enumerate_multiindices(static_cast<int>(alphas.size()), order)) {
    const double s = weighted_order(alphas, k);
    if (!(s < 2.0)) continue;
    C1Row row{k, s, c1_exponent(shape, s), 0.0, 0.0, 0.0};
    const auto mc = c1_monte_carlo(shape, s, samples, derive_seed(seed, stream++, 0));
    row.oracle = mc.estimate;
    row.oracle_se = mc.std_error;
    row.rel_err = row.c1 / row.oracle - 1.0;
    rows.push_back(row);
  }
  return rows;
}

void write_c1_table_csv(std::span<const double> alphas, const std::vector<C1Row>& rows,
                        std::ostream& os) {
  std::string a;
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, alphas[j]);
    a += (j ? " " : "") + std::string(buf, res.ptr);
  }
  os << "alphas,k,c1,oracle_c1,rel_err\n" << std::setprecision(12);
  for (const auto& r : rows) {
    std::string k;
    for (std::size_t j = 0; j < r.k.k.size(); ++j) k += (j ? " " : "") + std::to_string(r.k.k[j]);
    os << a << ',' << k << ',' << r.c1 << ',' << r.oracle << ',' << r.rel_err << '\n';
  }
}

double c1(const WindowShape& shape, std::span<const double> alphas, const MultiIndex& k, int d) {
  return c1_exponent(shape, weighted_order(alphas, k), d);
}

ComponentParams ComponentParams::from_models(std::span<const CovarianceModel> models, int n,
                                             double level) {
  ComponentParams p;
  p.n = n;
  p.level = level;
  for (const auto& model : models) {
    const auto lrd = lrd_params(model);
    p.alphas.push_back(lrd.alpha);
    p.sv_kinds.push_back(lrd.sv_kind);
  }
  return p;
}

double var_krk_asymptote(const ComponentParams& params, const WindowShape& shape, int kappa,
                         std::span<const std::pair<MultiIndex, double>> coeffs, double r,
                         int d) {
  if (!(r > 0.0)) throw DomainError("var_krk_asymptote: r must be positive");
  double total = 0.0;
  for (const auto& [v, c] : coeffs) {
    if (v.order() != kappa) throw DomainError("coefficient index " + v.to_string() +
                                              " does not have order " + std::to_string(kappa));
    if (c == 0.0) continue;
    const double s = weighted_order(params.alphas, v);
    double slow = 1.0;
    for (int j = 0; j < v.m(); ++j) {
      if (v.k[j] > 0) slow *= std::pow(slowly_varying(params.sv_kinds[j], r), v.k[j]);
    }
    total += c * c / static_cast<double>(v.factorial()) * c1_exponent(shape, s, d) *
             std::pow(r, 2.0 * d - s) * slow;
  }
  return shape.area() * shape.area() * total;
}

std::vector<DominantComponent> dominant_components(const ComponentParams& params) {
  if (params.alphas.empty() || params.alphas.size() != params.sv_kinds.size()) {
    throw DomainError("dominant_components: need one sv kind per exponent");
  }
  const double amin = min_alpha(params.alphas);
  std::vector<int> minimal;
  for (int j = 0; j < params.m(); ++j) {
    if (same_alpha(params.alphas[j], amin)) minimal.push_back(j);
  }
  const SlowlyVaryingKind first = params.sv_kinds[minimal.front()];
  for (int j : minimal) {
    if (params.sv_kinds[j] != first) {
      throw NoDominantComponent(
          "components " + std::to_string(minimal.front()) + " and " + std::to_string(j) +
          " share the minimal alpha but L_" + std::to_string(j) + "/L_" +
          std::to_string(minimal.front()) + " has no limit (" + to_string(params.sv_kinds[j]) +
          " vs " + to_string(first) + ")");
    }
  }
  std::vector<DominantComponent> out;
  for (int j : minimal) out.push_back({j, 1.0});
  return out;
}

std::vector<std::pair<int, double>> limit_weights(const ComponentParams& params,
                                                  std::span<const DominantComponent> dominants) {
  if (dominants.empty()) throw DomainError("limit_weights: no dominant components");
  const int m = params.m();
  const int n = params.n;
  if (n < 1 || n >= m) throw DomainError("limit_weights: need 1 <= n < m");
  std::vector<std::pair<int, double>> q;
  for (const auto& dom : dominants) {
    q.emplace_back(dom.index, dom.index < n ? dom.ratio / n : -dom.ratio / (m - n));
  }
  return q;
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Holds: return "holds";
    case CheckStatus::HypothesisFailed: return "hypothesis_failed";
    case CheckStatus::Violated: return "violated";
  }
  return {};
}

namespace {

void check_base_index(std::span<const double> alphas, int l0, const MultiIndex& k_l0,
                      int l_max) {
  if (l0 < 1) throw DomainError("index check: l0 must be >= 1");
  if (k_l0.m() != static_cast<int>(alphas.size())) {
    throw DomainError("index check: k_l0 length differs from number of exponents");
  }
  if (k_l0.order() != l0) throw DomainError("index check: k_l0 must sum to l0");
  if (l_max <= l0) throw DomainError("index check: l_max must exceed l0");
}

}  // namespace

GapInequalityReport check_gap_inequality(std::span<const double> alphas, int l0, const MultiIndex& k_l0,
                          int l_max) {
  check_base_index(alphas, l0, k_l0, l_max);
  GapInequalityReport rep;
  const double amin = min_alpha(alphas);
  const double amax = *std::max_element(alphas.begin(), alphas.end());
  rep.lhs = weighted_order(alphas, k_l0);
  rep.rhs = (l0 + 1) * amin;
  rep.delta = rep.rhs - rep.lhs;
  rep.alpha_ratio = amax / amin;
  rep.sufficient_ratio_condition = rep.alpha_ratio <= 1.0 + 1.0 / l0;
  if (!(rep.lhs < rep.rhs)) {
    rep.status = CheckStatus::HypothesisFailed;
    std::ostringstream os;
    os << "hypothesis sum alpha_j k_j,l0 < (l0+1) min alpha fails: " << rep.lhs
       << " >= " << rep.rhs;
    rep.detail = os.str();
    return rep;
  }
  // Rounding slack for the attained case gap == delta.
  const double slack = 1e-12 * std::max(1.0, rep.rhs);
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (int l = l0 + 1; l <= l_max; ++l) {
    for (const auto& k : enumerate_multiindices(static_cast<int>(alphas.size()), l)) {
      const double gap = weighted_order(alphas, k) - rep.lhs;
      ++rep.checked;
      if (gap < rep.min_gap) {
        rep.min_gap = gap;
        rep.argmin = k;
      }
      if (!(gap > 0.0) || gap < rep.delta - slack) {
        rep.status = CheckStatus::Violated;
        rep.detail = "gap " + std::to_string(gap) + " at " + k.to_string() +
                     " below delta " + std::to_string(rep.delta);
      }
    }
  }
  if (rep.status == CheckStatus::Holds) {
    std::ostringstream os;
    os << "all " << rep.checked << " indices satisfy gap >= delta = " << rep.delta
       << " (min gap " << rep.min_gap << " at " << rep.argmin.to_string() << ")";
    rep.detail = os.str();
  }
  return rep;
}

GapInequalityReport check_gap_inequality(std::span<const double> alphas, int l0, int l_max) {
  if (l0 < 1) throw DomainError("check_gap_inequality: l0 must be >= 1");
  std::optional<GapInequalityReport> worst;
  std::size_t total = 0;
  for (const auto& k : enumerate_multiindices(static_cast<int>(alphas.size()), l0)) {
    auto rep = check_gap_inequality(alphas, l0, k, l_max);
    total += rep.checked;
    if (rep.status == CheckStatus::HypothesisFailed) {
      rep.detail = "base index " + k.to_string() + ": " + rep.detail;
      rep.checked = total;
      return rep;
    }
    if (!worst || rep.status == CheckStatus::Violated ||
        (worst->status == CheckStatus::Holds && rep.delta < worst->delta)) {
      worst = std::move(rep);
      worst->detail = "base index " + k.to_string() + ": " + worst->detail;
    }
  }
  worst->checked = total;
  return *worst;
}

ProductBoundReport check_product_bound(std::span<const CovarianceModel> models, int l0,
                          const MultiIndex& k_l0, int l_max, std::span<const double> z_grid) {
  std::vector<double> alphas;
  for (const auto& model : models) alphas.push_back(lrd_params(model).alpha);
  check_base_index(alphas, l0, k_l0, l_max);
  if (z_grid.empty()) throw DomainError("check_product_bound: empty z grid");
  ProductBoundReport rep;
  const double lhs = weighted_order(alphas, k_l0);
  const double rhs = (l0 + 1) * min_alpha(alphas);
  if (!(lhs < rhs)) {
    rep.status = CheckStatus::HypothesisFailed;
    rep.detail = "hypothesis fails: " + std::to_string(lhs) + " >= " + std::to_string(rhs);
    return rep;
  }
  const std::size_t m = models.size();
  std::vector<std::vector<double>> cov(z_grid.size(), std::vector<double>(m));
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) cov[i][j] = evaluate(models[j], z_grid[i]);
  }
  auto product = [&](std::size_t i, const MultiIndex& k) {
    double p = 1.0;
    for (std::size_t j = 0; j < m; ++j) p *= std::pow(cov[i][j], k.k[j]);
    return p;
  };
  std::vector<double> envelope(z_grid.size(), 0.0);
  rep.sup_ratio = -std::numeric_limits<double>::infinity();
  for (int l = l0 + 1; l <= l_max; ++l) {
    for (const auto& k : enumerate_multiindices(static_cast<int>(m), l)) {
      ++rep.checked;
      for (std::size_t i = 0; i < z_grid.size(); ++i) {
        const double ratio = product(i, k) / product(i, k_l0);
        envelope[i] = std::max(envelope[i], ratio);
        if (ratio > rep.sup_ratio) {
          rep.sup_ratio = ratio;
          rep.sup_z = z_grid[i];
          rep.sup_index = k;
        }
      }
    }
  }
  rep.ratio_at_zero = envelope.front();
  rep.tail_ratio = envelope.back();
  const double z_last = z_grid.back();
  rep.tail_decreasing = true;
  for (std::size_t i = 1; i < z_grid.size(); ++i) {
    if (z_grid[i] >= 0.1 * z_last && envelope[i] > envelope[i - 1]) rep.tail_decreasing = false;
  }
  if (!std::isfinite(rep.sup_ratio)) {
    rep.status = CheckStatus::Violated;
    rep.detail = "ratio unbounded on the grid";
  } else {
    std::ostringstream os;
    os << "sup ratio " << rep.sup_ratio << " at z = " << rep.sup_z << " for "
       << rep.sup_index.to_string() << "; tail ratio " << rep.tail_ratio;
    rep.detail = os.str();
  }
  return rep;
}

std::vector<double> log_grid(double lo, double hi, int per_decade, bool include_zero) {
  if (!(lo > 0.0) || !(hi > lo) || per_decade < 1) throw DomainError("log_grid: bad range");
  std::vector<double> z;
  if (include_zero) z.push_back(0.0);
  const double decades = std::log10(hi / lo);
  const int steps = static_cast<int>(std::ceil(decades * per_decade));
  for (int i = 0; i <= steps; ++i) {
    z.push_back(lo * std::pow(10.0, decades * i / steps));
  }
  return z;
}

}  // namespace lrdfield
