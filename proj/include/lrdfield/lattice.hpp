#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrdfield/covariance.hpp"

namespace lrdfield {

/// Regular 2D grid: nodes (i dx, j dx), 0 <= i < n_x, 0 <= j < n_y.
struct LatticeSpec {
  std::size_t n_x = 128;
  std::size_t n_y = 128;
  double dx = 1.0;

  std::size_t size() const noexcept { return n_x * n_y; }
  /// Counting-rule area: one cell of dx^2 per node.
  double window_area() const noexcept { return static_cast<double>(size()) * dx * dx; }
  /// Throws ConfigError unless n_x, n_y >= 2 and dx > 0.
  void validate() const;

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

/// One realization on a lattice, stored row-major: value(i, j) = values[i * n_y + j].
struct LatticeField {
  LatticeSpec spec;
  std::vector<double> values;
  std::uint64_t seed = 0;
  /// Generating model for Gaussian components; empty for derived fields.
  std::optional<CovarianceModel> model;

  double operator()(std::size_t i, std::size_t j) const { return values[i * spec.n_y + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * spec.n_y + j]; }
  std::span<const double> view() const noexcept { return values; }
};

/// The corner sub-window [0, n_x) x [0, n_y) of a field; same dx, seed
/// and model. ShapeError if it does not fit.
LatticeField crop(const LatticeField& field, std::size_t n_x, std::size_t n_y);

// File formats.
//
// Binary dump: 16-byte little-endian header
//   bytes 0..3   magic "SJLF"
//   bytes 4..7   u32 n_x
//   bytes 8..11  u32 n_y
//   bytes 12..15 u32 format version (1)
// followed by n_x * n_y IEEE-754 doubles, row-major, little-endian.
// The sidecar "<path>.meta" holds key = value lines (n_x, n_y, dx, seed, model).

void write_field_binary(const LatticeField& field, const std::filesystem::path& path);
/// Reads the binary dump and, when present, the sidecar metadata.
LatticeField read_field_binary(const std::filesystem::path& path);
void write_field_csv(const LatticeField& field, const std::filesystem::path& path);
/// 8-bit binary PGM (P5) of the field, min-max scaled to 0..255.
void write_field_pgm(const LatticeField& field, const std::filesystem::path& path);

}  // namespace lrdfield
