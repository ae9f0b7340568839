#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "lrdfield/lattice.hpp"

namespace lrdfield {

struct ExcursionSummary {
  double level = 0.0;
  /// dx^2 times the number of nodes with a finite value strictly above level.
  double area = 0.0;
  double window_area = 0.0;
  double fraction = 0.0;
  /// Non-finite nodes (the +inf of a vanishing F denominator, NaN), excluded.
  std::size_t clipped_cells = 0;
};

/// First Minkowski functional by the counting rule, strict ">" at the level.
ExcursionSummary excursion_area(const LatticeField& field, double a);

/// Row-major indicator of {finite value > a}.
struct ExcursionMask {
  LatticeSpec spec;
  std::vector<std::uint8_t> cells;

  bool operator()(std::size_t i, std::size_t j) const { return cells[i * spec.n_y + j] != 0; }
  std::size_t count() const noexcept;
};

ExcursionMask excursion_mask(const LatticeField& field, double a);
/// P5, 255 for excursion cells and 0 elsewhere.
void write_mask_pgm(const ExcursionMask& mask, const std::filesystem::path& path);
/// n_x lines of n_y comma-separated 0/1 values.
void write_mask_csv(const ExcursionMask& mask, const std::filesystem::path& path);

void write_summary_csv_header(std::ostream& os);
/// seed, r, a, area, fraction, clipped_cells; r is the window side n_x dx.
void write_summary_csv_row(std::ostream& os, const ExcursionSummary& s, std::uint64_t seed,
                           double r);

/// area - window_area (1 - H(a)), with H the F_{n, m-n} distribution function.
double centered_sojourn(const LatticeField& field, double a, int n, int m);

/// sigma_j = dx^2 sum over the grid of H_2(eta_j) = eta_j^2 - 1.
double hermite2_integral(const LatticeField& component);

/// 2 c4(a, n, m) [ (1/n) sum_{j<n} sigma_j - (1/(m-n)) sum_{j>=n} sigma_j ].
double empirical_krk2(std::span<const LatticeField> components, int n, int m, double a);

/// Second-level Hermite projection of the centered sojourn:
/// sum_{|v|=2} C_v / v! int e_v, which equals empirical_krk2 / 2.
double hermite2_projection(std::span<const LatticeField> components, int n, int m, double a);

}  // namespace lrdfield
