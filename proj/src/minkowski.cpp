#include "lrdfield/minkowski.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "lrdfield/errors.hpp"
#include "lrdfield/fieldsim.hpp"
#include "lrdfield/hermite_expansion.hpp"

namespace lrdfield {

ExcursionSummary excursion_area(const LatticeField& field, double a) {
  ExcursionSummary s;
  s.level = a;
  std::size_t above = 0;
  for (double v : field.values) {
    if (!std::isfinite(v)) {
      ++s.clipped_cells;
    } else if (v > a) {
      ++above;
    }
  }
  const double cell = field.spec.dx * field.spec.dx;
  s.area = static_cast<double>(above) * cell;
  s.window_area = field.spec.window_area();
  s.fraction = s.area / s.window_area;
  return s;
}

std::size_t ExcursionMask::count() const noexcept {
  std::size_t c = 0;
  for (auto v : cells) c += v;
  return c;
}

ExcursionMask excursion_mask(const LatticeField& field, double a) {
  ExcursionMask mask{field.spec, std::vector<std::uint8_t>(field.values.size())};
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double v = field.values[i];
    mask.cells[i] = std::isfinite(v) && v > a ? 1 : 0;
  }
  return mask;
}

void write_mask_pgm(const ExcursionMask& mask, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  os << "P5\n" << mask.spec.n_y << ' ' << mask.spec.n_x << "\n255\n";
  std::vector<char> row(mask.spec.n_y);
  for (std::size_t i = 0; i < mask.spec.n_x; ++i) {
    for (std::size_t j = 0; j < mask.spec.n_y; ++j) {
      row[j] = static_cast<char>(mask(i, j) ? 255 : 0);
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_mask_csv(const ExcursionMask& mask, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < mask.spec.n_x; ++i) {
    for (std::size_t j = 0; j < mask.spec.n_y; ++j) {
      if (j) os << ',';
      os << (mask(i, j) ? 1 : 0);
    }
    os << '\n';
  }
}

void write_summary_csv_header(std::ostream& os) {
  os << "seed,r,a,area,fraction,clipped_cells\n";
}

void write_summary_csv_row(std::ostream& os, const ExcursionSummary& s, std::uint64_t seed,
                           double r) {
  const auto old = os.precision(17);
  os << seed << ',' << r << ',' << s.level << ',' << s.area << ',' << s.fraction << ','
     << s.clipped_cells << '\n';
  os.precision(old);
}

double centered_sojourn(const LatticeField& field, double a, int n, int m) {
  const auto s = excursion_area(field, a);
  return s.area - s.window_area * (1.0 - f_cdf(a, n, m));
}

double hermite2_integral(const LatticeField& component) {
  double sum = 0.0;
  for (double v : component.values) sum += v * v - 1.0;
  return component.spec.dx * component.spec.dx * sum;
}

namespace {

double weighted_hermite2(std::span<const LatticeField> components, int n, int m) {
  if (static_cast<int>(components.size()) != m || n < 1 || n >= m) {
    throw DomainError("need m components with 1 <= n < m");
  }
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < m; ++j) {
    (j < n ? num : den) += hermite2_integral(components[j]);
  }
  return num / n - den / (m - n);
}

}  // namespace

double empirical_krk2(std::span<const LatticeField> components, int n, int m, double a) {
  return 2.0 * c4(a, n, m) * weighted_hermite2(components, n, m);
}

double hermite2_projection(std::span<const LatticeField> components, int n, int m, double a) {
  return c4(a, n, m) * weighted_hermite2(components, n, m);
}

}  // namespace lrdfield
