#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "lrdfield/fieldsim.hpp"
#include "lrdfield/hermite_expansion.hpp"
#include "lrdfield/log.hpp"
#include "lrdfield/minkowski.hpp"
#include "lrdfield/rng.hpp"
#include "lrdfield/statistics.hpp"

using namespace lrdfield;

namespace {

LatticeField constant_field(LatticeSpec spec, double value) {
  return {spec, std::vector<double>(spec.size(), value), 0, {}};
}

}  // namespace

TEST_CASE("excursion area of constant fields") {
  const LatticeSpec spec{10, 8, 0.5};
  CHECK(excursion_area(constant_field(spec, 0.0), 1.0).area == 0.0);
  const auto full = excursion_area(constant_field(spec, 2.0), 1.0);
  CHECK(full.area == full.window_area);
  CHECK(full.window_area == doctest::Approx(80 * 0.25));
  CHECK(full.fraction == 1.0);
  // strict inequality at the level
  CHECK(excursion_area(constant_field(spec, 1.0), 1.0).area == 0.0);
}

TEST_CASE("non-finite cells are excluded and counted") {
  auto f = constant_field({4, 4, 1.0}, 3.0);
  f.values[0] = std::numeric_limits<double>::infinity();
  f.values[1] = std::numeric_limits<double>::quiet_NaN();
  const auto s = excursion_area(f, 1.0);
  CHECK(s.clipped_cells == 2);
  CHECK(s.area == 14.0);
  CHECK(excursion_mask(f, 1.0).count() == 14);
}

TEST_CASE("mask consistency, extremes and export") {
  const LatticeSpec spec{16, 12, 0.7};
  auto f = simulate_gaussian(spec, CovarianceModel::squared_exponential(), 4);
  CHECK(excursion_mask(constant_field(spec, -5.0), 0.0).count() == 0);
  CHECK(excursion_mask(f, -1e308).count() == spec.size());
  const auto mask = excursion_mask(f, 0.3);
  CHECK(mask.count() * spec.dx * spec.dx == doctest::Approx(excursion_area(f, 0.3).area));

  const auto dir = std::filesystem::temp_directory_path() / "lrdfield_mask_test";
  std::filesystem::create_directories(dir);
  write_mask_pgm(mask, dir / "m.pgm");
  write_mask_csv(mask, dir / "m.csv");
  std::ifstream pgm(dir / "m.pgm", std::ios::binary);
  std::string magic;
  std::size_t w = 0, h = 0, maxval = 0;
  pgm >> magic >> w >> h >> maxval;
  pgm.get();
  CHECK(magic == "P5");
  CHECK(w == spec.n_y);
  CHECK(h == spec.n_x);
  CHECK(maxval == 255);
  std::vector<unsigned char> px(w * h);
  pgm.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  std::size_t white = 0;
  for (auto p : px) white += p == 255;
  CHECK(white == mask.count());
  std::ifstream csv(dir / "m.csv");
  std::string line;
  std::size_t rows = 0, ones = 0;
  while (std::getline(csv, line)) {
    ++rows;
    for (char c : line) ones += c == '1';
  }
  CHECK(rows == spec.n_x);
  CHECK(ones == mask.count());
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary csv row") {
  std::ostringstream os;
  write_summary_csv_header(os);
  write_summary_csv_row(os, excursion_area(constant_field({2, 2, 1.0}, 2.0), 1.0), 9, 2.0);
  CHECK(os.str() == "seed,r,a,area,fraction,clipped_cells\n9,2,1,4,1,0\n");
}

TEST_CASE("excursion area is nonincreasing in the level") {
  const auto f = simulate_gaussian({32, 32, 1.0}, CovarianceModel::cauchy(0.8), 8);
  double prev = std::numeric_limits<double>::infinity();
  for (double a = -3.0; a <= 3.0; a += 0.05) {
    const double area = excursion_area(f, a).area;
    CHECK(area <= prev);
    prev = area;
  }
}

TEST_CASE("centered sojourn arithmetic") {
  const LatticeSpec spec{8, 8, 1.0};
  const double h = f_cdf(1.0, 1, 3);
  const auto inf = constant_field(spec, std::numeric_limits<double>::infinity());
  // every cell clipped: the area is 0 and the centering term remains
  CHECK(centered_sojourn(inf, 1.0, 1, 3) == doctest::Approx(-64.0 * (1.0 - h)));
  CHECK(centered_sojourn(constant_field(spec, 1e300), 1.0, 1, 3) == doctest::Approx(64.0 * h));
}

TEST_CASE("second-order statistic of constant components") {
  const LatticeSpec spec{6, 5, 1.0};
  const double area = spec.window_area();
  std::vector<LatticeField> zeros(3, constant_field(spec, 0.0));
  CHECK(empirical_krk2(zeros, 1, 3, 1.0) == doctest::Approx(0.0));
  auto perturbed = zeros;
  perturbed[0] = constant_field(spec, 1.0);
  CHECK(empirical_krk2(perturbed, 1, 3, 1.0) == doctest::Approx(2.0 * c4(1.0, 1, 3) * area));
  CHECK(hermite2_projection(perturbed, 1, 3, 1.0) ==
        doctest::Approx(c4(1.0, 1, 3) * area));
}

TEST_CASE("mean sojourn matches the marginal law") {
  warnings_enabled() = false;
  const LatticeSpec spec{64, 64, 1.0};
  const VectorFieldSpec vspec{{CovarianceModel::cauchy(0.65), CovarianceModel::cauchy(0.8),
                               CovarianceModel::cauchy(0.9)}, 1};
  std::vector<GaussianSynthesizer> synths;
  for (const auto& m : vspec.components) synths.emplace_back(spec, m);
  for (double a : {0.5, 1.0, 2.0}) {
    std::vector<double> centered;
    for (int r = 0; r < 200; ++r) {
      const auto comps = simulate_vector(synths, derive_seed(99, 0, r));
      centered.push_back(centered_sojourn(fisher_snedecor_field(comps, 1), a, 1, 3));
    }
    const double se = std::sqrt(variance(centered) / centered.size());
    INFO("a=" << a);
    CHECK(std::abs(mean(centered)) < 3.0 * se);
  }
  warnings_enabled() = true;
}

TEST_CASE("sojourn variance grows faster than the window area") {
  const VectorFieldSpec vspec{{CovarianceModel::cauchy(0.65), CovarianceModel::cauchy(0.8),
                               CovarianceModel::cauchy(0.9)}, 1};
  const LatticeSpec big{128, 128, 1.0};
  std::vector<GaussianSynthesizer> synths;
  for (const auto& m : vspec.components) synths.emplace_back(big, m);
  const std::vector<std::size_t> sides{16, 32, 64, 128};
  std::vector<std::vector<double>> samples(sides.size());
  for (int r = 0; r < 200; ++r) {
    const auto comps = simulate_vector(synths, derive_seed(123, 1, r));
    for (std::size_t q = 0; q < sides.size(); ++q) {
      std::vector<LatticeField> sub;
      for (const auto& c : comps) sub.push_back(crop(c, sides[q], sides[q]));
      samples[q].push_back(centered_sojourn(fisher_snedecor_field(sub, 1), 1.0, 1, 3));
    }
  }
  // least-squares slope of log Var against log r
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t q = 0; q < sides.size(); ++q) {
    const double x = std::log(double(sides[q]));
    const double y = std::log(variance(samples[q]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = double(sides.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  MESSAGE("log-variance slope " << slope);
  CHECK(slope > 2.0);
  CHECK(std::abs(slope - (4.0 - 2.0 * 0.65)) < 0.3);
}

TEST_CASE("refining the grid barely changes the mean fraction") {
  // One realization at spacing 0.5; its every-other-node subgrid is the same
  // field at spacing 1 over the same physical window.
  warnings_enabled() = false;
  const VectorFieldSpec vspec{{CovarianceModel::cauchy(0.65), CovarianceModel::cauchy(0.8),
                               CovarianceModel::cauchy(0.9)}, 1};
  const LatticeSpec fine_spec{128, 128, 0.5};
  std::vector<GaussianSynthesizer> synths;
  for (const auto& m : vspec.components) synths.emplace_back(fine_spec, m);
  std::vector<double> fine, coarse;
  for (int r = 0; r < 200; ++r) {
    const auto comps = simulate_vector(synths, derive_seed(5, 2, r));
    const auto f = fisher_snedecor_field(comps, 1);
    LatticeField sub{{64, 64, 1.0}, std::vector<double>(64 * 64), 0, {}};
    for (std::size_t i = 0; i < 64; ++i) {
      for (std::size_t j = 0; j < 64; ++j) sub(i, j) = f(2 * i, 2 * j);
    }
    fine.push_back(excursion_area(f, 1.0).fraction);
    coarse.push_back(excursion_area(sub, 1.0).fraction);
  }
  CHECK(std::abs(mean(fine) - mean(coarse)) / mean(coarse) < 0.01);
  warnings_enabled() = true;
}
