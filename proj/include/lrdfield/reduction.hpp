#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrdfield/covariance.hpp"
#include "lrdfield/hermite_expansion.hpp"

namespace lrdfield {

enum class WindowKind { UnitSquare, UnitDisc };

/// Observation window Delta before scaling: the unit square (side 1,
/// |Delta| = 1, diameter sqrt 2) or the unit disc (radius 1, |Delta| = pi,
/// diameter 2), both centred at the origin. Delta(r) = r Delta.
struct WindowShape {
  WindowKind kind = WindowKind::UnitSquare;

  static WindowShape unit_square() { return {WindowKind::UnitSquare}; }
  static WindowShape unit_disc() { return {WindowKind::UnitDisc}; }
  double diameter() const noexcept;
  double area() const noexcept;
};

/// Density of |U - V| for U, V independent and uniform on the window
/// (square and disc line-picking densities). Zero outside [0, diameter].
double distance_density(const WindowShape& shape, double rho);

/// c1 = int_0^diam z^-s psi(z) dz = E|U - V|^-s for s = sum alpha_j k_j.
/// DivergentConstant when s >= d; windows are planar, so d must be 2.
double c1(const WindowShape& shape, std::span<const double> alphas, const MultiIndex& k,
          int d = 2);
double c1_exponent(const WindowShape& shape, double s, int d = 2);

/// Area of Delta intersected with Delta + (hx, hy).
double set_covariance(const WindowShape& shape, double hx, double hy);

struct MonteCarloValue {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Independent estimate of c1_exponent: E|U - V|^-s written as an integral of
/// the set covariance over the difference h, sampled in polar form with
/// radial density proportional to rho^(1 - s) so the weights stay bounded.
MonteCarloValue c1_monte_carlo(const WindowShape& shape, double s, std::int64_t samples,
                               std::uint64_t seed);

struct C1Row {
  MultiIndex k;
  double s = 0.0;
  double c1 = 0.0;
  double oracle = 0.0;
  double oracle_se = 0.0;
  double rel_err = 0.0;
};

/// c1 and its Monte Carlo oracle for every k in N_order with sum alpha_j k_j < 2.
std::vector<C1Row> c1_table(const WindowShape& shape, std::span<const double> alphas, int order,
                            std::int64_t samples, std::uint64_t seed);
void write_c1_table_csv(std::span<const double> alphas, const std::vector<C1Row>& rows,
                        std::ostream& os);

/// Per-component long-range parameters, the F-field split and the level.
/// Component indices are 0-based throughout the API.
struct ComponentParams {
  std::vector<double> alphas;
  std::vector<SlowlyVaryingKind> sv_kinds;
  int n = 1;
  double level = 1.0;

  int m() const noexcept { return static_cast<int>(alphas.size()); }
  /// From covariance models via lrd_params (Bessel/sqexp rejected).
  static ComponentParams from_models(std::span<const CovarianceModel> models, int n,
                                     double level);
};

/// Leading-order Var(K_{r,kappa}):
///   |Delta|^2 sum_v (C_v^2 / v!) c1(v) r^(2d - sum alpha_j k_j) prod L_j(r)^k_j
/// over the supplied order-kappa coefficients. Zero coefficients are skipped;
/// DivergentConstant if a nonzero one has sum alpha_j k_j >= d.
double var_krk_asymptote(const ComponentParams& params, const WindowShape& shape, int kappa,
                         std::span<const std::pair<MultiIndex, double>> coeffs, double r,
                         int d = 2);

struct DominantComponent {
  int index;
  /// a_{j, j1*} = lim L_j(r) / L_{j1*}(r), j1* the first dominant index.
  double ratio;
};

/// Components with the minimal alpha; their slowly varying factors must
/// have pairwise limit ratios (identical kinds). Mixed kinds among the
/// minimal-alpha components throw NoDominantComponent.
std::vector<DominantComponent> dominant_components(const ComponentParams& params);

/// Signed weights q_j of the limit combination sum q_j X_{2,j}:
/// a_{j,j1*} / n for numerator components, -a_{j,j1*} / (m - n) otherwise.
std::vector<std::pair<int, double>> limit_weights(const ComponentParams& params,
                                                  std::span<const DominantComponent> dominants);

enum class CheckStatus { Holds, HypothesisFailed, Violated };
std::string to_string(CheckStatus status);

struct GapInequalityReport {
  CheckStatus status = CheckStatus::Holds;
  double lhs = 0.0;    // sum alpha_j k_{j,l0}
  double rhs = 0.0;    // (l0 + 1) min alpha
  double delta = 0.0;  // rhs - lhs
  double min_gap = 0.0;
  MultiIndex argmin;
  std::size_t checked = 0;
  bool sufficient_ratio_condition = false;  // max/min alpha <= 1 + 1/l0
  double alpha_ratio = 0.0;
  std::string detail;
};

/// Exhaustive check over every l in (l0, l_max] and every k in N_l that
/// sum alpha_j k_{j,l} - sum alpha_j k_{j,l0} is positive and at least delta.
/// The bound is attained (gap == delta) at k = (l0 + 1) e_{argmin alpha}.
GapInequalityReport check_gap_inequality(std::span<const double> alphas, int l0, const MultiIndex& k_l0,
                          int l_max);

/// Same check for every base index k_l0 in N_l0, as needed when all order-l0
/// coefficients are nonzero. Returns the first base index whose hypothesis
/// fails, otherwise the one with the smallest delta; `checked` is the total.
/// For l0 = 2 the hypothesis holds for all base indices iff max < 1.5 min.
GapInequalityReport check_gap_inequality(std::span<const double> alphas, int l0, int l_max);

struct ProductBoundReport {
  CheckStatus status = CheckStatus::Holds;
  double sup_ratio = 0.0;
  double sup_z = 0.0;
  MultiIndex sup_index;
  double ratio_at_zero = 0.0;   // max over k at the first grid point
  double tail_ratio = 0.0;      // max over k at the last grid point
  bool tail_decreasing = false; // max over k nonincreasing over the last decade
  std::size_t checked = 0;
  std::string detail;
};

/// Evaluates prod B_j^{k_{j,l}}(z) / prod B_j^{k_{j,l0}}(z) on z_grid for all
/// l in (l0, l_max], k in N_l, with B_j the component covariance models.
ProductBoundReport check_product_bound(std::span<const CovarianceModel> models, int l0,
                          const MultiIndex& k_l0, int l_max, std::span<const double> z_grid);

/// {0} followed by `per_decade` log-spaced points per decade in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int per_decade, bool include_zero = true);

}  // namespace lrdfield
