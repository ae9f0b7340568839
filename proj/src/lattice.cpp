#include "lrdfield/lattice.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "lrdfield/errors.hpp"

namespace lrdfield {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary field dumps assume a little-endian host");

constexpr std::array<char, 4> kMagic = {'S', 'J', 'L', 'F'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

std::filesystem::path meta_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".meta";
  return p;
}

}  // namespace

void LatticeSpec::validate() const {
  if (n_x < 2 || n_y < 2) throw ConfigError("lattice needs at least 2 points per axis");
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ConfigError("lattice spacing must be positive");
}

void write_field_binary(const LatticeField& field, const std::filesystem::path& path) {
  const auto& s = field.spec;
  if (s.n_x > std::numeric_limits<std::uint32_t>::max() ||
      s.n_y > std::numeric_limits<std::uint32_t>::max()) {
    throw ShapeError("field too large for the binary dump header");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(s.n_x));
  put_u32(out, static_cast<std::uint32_t>(s.n_y));
  put_u32(out, kFormatVersion);
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path.string());

  std::ofstream meta(meta_path(path));
  meta.precision(17);
  meta << "n_x = " << s.n_x << "\n"
       << "n_y = " << s.n_y << "\n"
       << "dx = " << s.dx << "\n"
       << "seed = " << field.seed << "\n";
  if (field.model) meta << "model = " << field.model->to_string() << "\n";
}

LatticeField read_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ShapeError(path.string() + ": not an SJLF field dump");
  LatticeField field;
  field.spec.n_x = get_u32(in);
  field.spec.n_y = get_u32(in);
  const std::uint32_t version = get_u32(in);
  if (!in || version != kFormatVersion) {
    throw ShapeError(path.string() + ": unsupported SJLF header");
  }
  field.values.resize(field.spec.size());
  in.read(reinterpret_cast<char*>(field.values.data()),
          static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (!in) throw ShapeError(path.string() + ": truncated field data");

  std::ifstream meta(meta_path(path));
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (key == "dx") field.spec.dx = std::stod(value);
    else if (key == "seed") field.seed = std::stoull(value);
    else if (key == "model") field.model = CovarianceModel::parse(value);
  }
  return field;
}

void write_field_csv(const LatticeField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "x,y,value\n";
  const auto& s = field.spec;
  for (std::size_t i = 0; i < s.n_x; ++i) {
    for (std::size_t j = 0; j < s.n_y; ++j) {
      out << static_cast<double>(i) * s.dx << ',' << static_cast<double>(j) * s.dx << ','
          << field(i, j) << '\n';
    }
  }
}

void write_field_pgm(const LatticeField& field, const std::filesystem::path& path) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : field.values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "P5\n" << field.spec.n_y << ' ' << field.spec.n_x << "\n255\n";
  for (double v : field.values) {
    const double t = std::isfinite(v) ? (v - lo) / span : 1.0;
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
  }
}

LatticeField crop(const LatticeField& field, std::size_t n_x, std::size_t n_y) {
  if (n_x > field.spec.n_x || n_y > field.spec.n_y) {
    throw ShapeError("crop: window larger than the field");
  }
  LatticeField out{{n_x, n_y, field.spec.dx}, std::vector<double>(n_x * n_y), field.seed,
                   field.model};
  for (std::size_t i = 0; i < n_x; ++i) {
    for (std::size_t j = 0; j < n_y; ++j) out(i, j) = field(i, j);
  }
  return out;
}

}  // namespace lrdfield
