#include "lrdfield/hermite_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lrdfield/errors.hpp"
#include "lrdfield/rng.hpp"
#include "lrdfield/specialfuns.hpp"

namespace lrdfield {

namespace {

constexpr std::int64_t kBlockSize = 8192;
constexpr std::uint64_t kCoefficientStream = 0xC0EFF1C1E17ULL;
constexpr std::uint64_t kMomentStream = 0x5EC0DD0E17ULL;

void compositions(int m, int remaining, std::vector<int>& prefix,
                  std::vector<MultiIndex>& out) {
  if (static_cast<int>(prefix.size()) == m - 1) {
    prefix.push_back(remaining);
    out.push_back(MultiIndex{prefix});
    prefix.pop_back();
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    prefix.push_back(k);
    compositions(m, remaining - k, prefix, out);
    prefix.pop_back();
  }
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

}  // namespace

int MultiIndex::order() const noexcept {
  int s = 0;
  for (int v : k) s += v;
  return s;
}

std::uint64_t MultiIndex::factorial() const {
  if (order() > 20) throw DomainError("multi-index factorial supported up to order 20");
  std::uint64_t f = 1;
  for (int kj : k) {
    for (int i = 2; i <= kj; ++i) {
      if (f > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(i)) {
        throw DomainError("multi-index factorial overflow");
      }
      f *= static_cast<std::uint64_t>(i);
    }
  }
  return f;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < k.size(); ++j) os << (j ? "," : "") << k[j];
  os << ')';
  return os.str();
}

std::vector<MultiIndex> enumerate_multiindices(int m, int kappa) {
  if (m < 1 || kappa < 0) throw DomainError("enumerate_multiindices: need m >= 1, kappa >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  compositions(m, kappa, prefix, out);
  return out;
}

double e_v(const MultiIndex& v, std::span<const double> omega) {
  if (omega.size() != v.k.size()) throw DomainError("e_v: dimension mismatch");
  double p = 1.0;
  for (std::size_t j = 0; j < v.k.size(); ++j) p *= special::hermite(v.k[j], omega[j]);
  return p;
}

std::vector<CoefficientEstimate> hermite_coefficients(const Functional& g, int m,
                                                      std::span<const MultiIndex> indices,
                                                      std::int64_t n_samples,
                                                      std::uint64_t seed) {
  if (n_samples < 100) throw ConfigError("hermite coefficients need at least 100 samples");
  int max_degree = 0;
  bool any_even = false;
  for (const auto& v : indices) {
    if (v.m() != m) throw DomainError("multi-index length differs from m");
    for (int kj : v.k) max_degree = std::max(max_degree, kj);
    any_even = any_even || v.order() % 2 == 0;
  }
  if (max_degree > special::kMaxHermiteDegree) throw DomainError("Hermite degree too high");

  const std::size_t n_idx = indices.size();
  const std::int64_t n_blocks = (n_samples + kBlockSize - 1) / kBlockSize;
  std::vector<std::vector<Moments>> partial(static_cast<std::size_t>(n_blocks),
                                            std::vector<Moments>(n_idx));

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    GaussianStream gauss(seed, kCoefficientStream, static_cast<std::uint64_t>(b));
    std::vector<double> w(static_cast<std::size_t>(m));
    std::vector<double> neg(static_cast<std::size_t>(m));
    // table[j * (max_degree + 1) + k] = He_k(w_j)
    std::vector<double> table(static_cast<std::size_t>(m) * (max_degree + 1));
    auto& acc = partial[static_cast<std::size_t>(b)];
    const std::int64_t count = std::min(kBlockSize, n_samples - b * kBlockSize);
    for (std::int64_t s = 0; s < count; ++s) {
      for (int j = 0; j < m; ++j) {
        w[j] = gauss.normal();
        neg[j] = -w[j];
      }
      for (int j = 0; j < m; ++j) {
        double* row = &table[static_cast<std::size_t>(j) * (max_degree + 1)];
        row[0] = 1.0;
        if (max_degree >= 1) row[1] = w[j];
        for (int k = 1; k < max_degree; ++k) row[k + 1] = w[j] * row[k] - k * row[k - 1];
      }
      const double g_plus = g(w);
      const double g_even = any_even ? 0.5 * (g_plus + g(neg)) : 0.0;
      for (std::size_t i = 0; i < n_idx; ++i) {
        const auto& v = indices[i];
        double e = 1.0;
        for (int j = 0; j < m; ++j) e *= table[static_cast<std::size_t>(j) * (max_degree + 1) + v.k[j]];
        const double f = (v.order() % 2 == 0 ? g_even : g_plus) * e;
        acc[i].sum += f;
        acc[i].sum_sq += f * f;
      }
    }
  }

  std::vector<CoefficientEstimate> out(n_idx);
  const double n = static_cast<double>(n_samples);
  for (std::size_t i = 0; i < n_idx; ++i) {
    double s = 0.0;
    double s2 = 0.0;
    for (const auto& blk : partial) {
      s += blk[i].sum;
      s2 += blk[i].sum_sq;
    }
    const double mean = s / n;
    const double var = std::max(0.0, (s2 / n - mean * mean) * n / (n - 1.0));
    out[i] = {mean, std::sqrt(var / n)};
  }
  return out;
}

CoefficientEstimate hermite_coefficient(const Functional& g, const MultiIndex& v,
                                        std::int64_t n_samples, std::uint64_t seed) {
  return hermite_coefficients(g, v.m(), std::span(&v, 1), n_samples, seed).front();
}

Functional f_indicator(double a, int n, int m) {
  if (n < 1 || n >= m) throw DomainError("f_indicator: need 1 <= n < m");
  return [a, n, m](std::span<const double> w) {
    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j < n; ++j) num += w[j] * w[j];
    for (int j = n; j < m; ++j) den += w[j] * w[j];
    // num/n > a * den/(m-n), written without division.
    return num * (m - n) > a * n * den ? 1.0 : 0.0;
  };
}

double c4(double a, int n, int m) {
  if (n < 1 || n >= m) throw DomainError("c4: need 1 <= n < m");
  if (!(a > 0.0)) throw DomainError("c4: level must be positive");
  const double t = n * a / (m - n);
  return std::pow(t, 0.5 * n) * special::gamma(0.5 * m) /
         (std::pow(1.0 + t, 0.5 * m) * special::gamma(0.5 * (m - n)) * special::gamma(0.5 * n));
}

double closed_form_cv_f_indicator(const MultiIndex& v, double a, int n, int m) {
  if (v.order() != 2 || v.m() != m) {
    throw DomainError("closed-form coefficient defined for order-2 indices of length m only");
  }
  for (int j = 0; j < m; ++j) {
    if (v.k[j] == 2) {
      return j < n ? 2.0 * c4(a, n, m) / n : -2.0 * c4(a, n, m) / (m - n);
    }
  }
  return 0.0;
}

namespace {

std::optional<int> detect_rank(const std::vector<MultiIndex>& indices,
                               const std::vector<CoefficientEstimate>& coef, double z) {
  std::optional<int> rank;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int order = indices[i].order();
    if (order < 1) continue;
    if (rank && order >= *rank) continue;
    if (std::abs(coef[i].estimate) > z * coef[i].std_error) rank = order;
  }
  return rank;
}

}  // namespace

std::optional<int> hermite_rank(const Functional& g, int m, int max_order,
                                std::int64_t n_samples, std::uint64_t seed, double z) {
  if (max_order < 1) throw DomainError("hermite_rank: max_order must be >= 1");
  std::vector<MultiIndex> indices;
  for (int kappa = 1; kappa <= max_order; ++kappa) {
    auto level = enumerate_multiindices(m, kappa);
    indices.insert(indices.end(), level.begin(), level.end());
  }
  const auto coef = hermite_coefficients(g, m, indices, n_samples, seed);
  return detect_rank(indices, coef, z);
}

ExpansionReport expand(const Functional& g, int m, int kappa_max, std::int64_t n_samples,
                       std::uint64_t seed, double z) {
  ExpansionReport report;
  report.m = m;
  report.kappa_max = kappa_max;
  report.z = z;
  for (int kappa = 0; kappa <= kappa_max; ++kappa) {
    auto level = enumerate_multiindices(m, kappa);
    report.indices.insert(report.indices.end(), level.begin(), level.end());
  }
  report.coefficients = hermite_coefficients(g, m, report.indices, n_samples, seed);
  report.hermite_rank = detect_rank(report.indices, report.coefficients, z);
  double cumulative = 0.0;
  std::size_t i = 0;
  for (int kappa = 0; kappa <= kappa_max; ++kappa) {
    for (; i < report.indices.size() && report.indices[i].order() == kappa; ++i) {
      const double c = report.coefficients[i].estimate;
      cumulative += c * c / static_cast<double>(report.indices[i].factorial());
    }
    report.parseval_partial.emplace_back(kappa, cumulative);
  }
  return report;
}

ParsevalGap parseval_check(const ExpansionReport& report, const Functional& g,
                           std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 100) throw ConfigError("parseval_check needs at least 100 samples");
  if (report.parseval_partial.empty()) throw DomainError("parseval_check: empty report");
  double s = 0.0;
  double s2 = 0.0;
  GaussianStream gauss(seed, kMomentStream);
  std::vector<double> w(static_cast<std::size_t>(report.m));
  for (std::int64_t i = 0; i < n_samples; ++i) {
    for (auto& x : w) x = gauss.normal();
    const double v = g(w);
    s += v * v;
    s2 += v * v * v * v;
  }
  const double n = static_cast<double>(n_samples);
  ParsevalGap out;
  out.second_moment = s / n;
  const double var_moment =
      std::max(0.0, (s2 / n - out.second_moment * out.second_moment) * n / (n - 1.0)) / n;
  out.partial_sum = report.parseval_partial.back().second;
  out.gap = out.second_moment - out.partial_sum;
  double var_partial = 0.0;
  for (std::size_t i = 0; i < report.indices.size(); ++i) {
    const double d = 2.0 * report.coefficients[i].estimate /
                     static_cast<double>(report.indices[i].factorial());
    var_partial += d * d * report.coefficients[i].std_error * report.coefficients[i].std_error;
  }
  out.std_error = std::sqrt(var_moment + var_partial);
  return out;
}

}  // namespace lrdfield
