#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lrdfield {

/// Hermite multi-index v = (k_1, ..., k_m); its order is sum k_j.
struct MultiIndex {
  std::vector<int> k;

  int m() const noexcept { return static_cast<int>(k.size()); }
  int order() const noexcept;
  /// v! = prod k_j!, exact in 64-bit arithmetic; DomainError past order 20.
  std::uint64_t factorial() const;
  std::string to_string() const;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// All v with m entries and order kappa, ascending lexicographic order.
/// There are C(kappa + m - 1, kappa) of them.
std::vector<MultiIndex> enumerate_multiindices(int m, int kappa);

/// e_v(omega) = prod_j He_{k_j}(omega_j).
double e_v(const MultiIndex& v, std::span<const double> omega);

/// Square-integrable functional G of an m-vector.
using Functional = std::function<double(std::span<const double>)>;

struct CoefficientEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimates of C_v = E[G(W) e_v(W)], W ~ N(0, I_m), for every
/// index in `indices` from one shared sample. Even-order indices use the
/// antithetic average (G(w) + G(-w)) / 2 per draw. Deterministic given seed
/// regardless of thread count. Throws ConfigError if n_samples < 100.
std::vector<CoefficientEstimate> hermite_coefficients(const Functional& g, int m,
                                                      std::span<const MultiIndex> indices,
                                                      std::int64_t n_samples, std::uint64_t seed);

CoefficientEstimate hermite_coefficient(const Functional& g, const MultiIndex& v,
                                        std::int64_t n_samples, std::uint64_t seed);

/// Excursion indicator of the Fisher-Snedecor ratio,
/// chi((sum_{j<n} w_j^2 / n) / (sum_{j>=n} w_j^2 / (m - n)) > a).
Functional f_indicator(double a, int n, int m);

/// ((na/(m-n))^(n/2) Gamma(m/2)) / ((1 + na/(m-n))^(m/2) Gamma((m-n)/2) Gamma(n/2)).
double c4(double a, int n, int m);

/// Second-order Hermite coefficients of f_indicator(a, n, m): 2 c4 / n when
/// some k_j = 2 with j < n, -2 c4 / (m - n) when some k_j = 2 with j >= n,
/// 0 for mixed indices. DomainError unless order 2 and v.m() == m.
double closed_form_cv_f_indicator(const MultiIndex& v, double a, int n, int m);

/// Smallest kappa in [1, max_order] where some |C_v| > z * SE(C_v);
/// nullopt when none is found.
std::optional<int> hermite_rank(const Functional& g, int m, int max_order,
                                std::int64_t n_samples, std::uint64_t seed, double z = 4.0);

struct ExpansionReport {
  int m = 0;
  int kappa_max = 0;
  double z = 4.0;
  std::vector<MultiIndex> indices;  // grouped by order, lexicographic within
  std::vector<CoefficientEstimate> coefficients;
  std::optional<int> hermite_rank;
  /// (kappa, sum over orders <= kappa of C_v^2 / v!)
  std::vector<std::pair<int, double>> parseval_partial;
};

ExpansionReport expand(const Functional& g, int m, int kappa_max, std::int64_t n_samples,
                       std::uint64_t seed, double z = 4.0);

struct ParsevalGap {
  double second_moment = 0.0;  // MC estimate of E G(W)^2
  double partial_sum = 0.0;    // report's cumulative sum at kappa_max
  double gap = 0.0;
  double std_error = 0.0;      // combined (delta method)
};

ParsevalGap parseval_check(const ExpansionReport& report, const Functional& g,
                           std::int64_t n_samples, std::uint64_t seed);

}  // namespace lrdfield
