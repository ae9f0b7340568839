#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrdfield/covariance.hpp"
#include "lrdfield/fieldsim.hpp"

using namespace lrdfield;

// Thinning to every 8th cell does not make long-range dependent values
// independent: B(8) is about 0.26 for Cauchy(0.65), and the correlations are
// not summable. The iid critical value is then too small.
TEST_CASE("pooled marginal of the F-field matches H") {
  const LatticeSpec spec{128, 128, 1.0};
  const VectorFieldSpec vspec{{CovarianceModel::cauchy(0.65), CovarianceModel::cauchy(0.8),
                               CovarianceModel::cauchy(0.9)}, 1};
  std::vector<GaussianSynthesizer> synths;
  for (const auto& m : vspec.components) synths.emplace_back(spec, m);
  int passes = 0;
  const int runs = 20;
  for (int run = 0; run < runs; ++run) {
    const auto comps = simulate_vector(synths, 500 + run);
    const auto f = fisher_snedecor_field(comps, 1);
    std::vector<double> u;
    for (std::size_t i = 0; i < spec.n_x; i += 8) {
      for (std::size_t j = 0; j < spec.n_y; j += 8) u.push_back(f(i, j));
    }
    std::sort(u.begin(), u.end());
    double d = 0.0;
    const double n = static_cast<double>(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double h = f_cdf(u[k], 1, 3);
      d = std::max({d, std::abs((k + 1) / n - h), std::abs(h - k / n)});
    }
    // 1% critical value of the one-sample statistic
    if (d < 1.628 / std::sqrt(n)) ++passes;
  }
  CHECK(passes >= 19);
}
