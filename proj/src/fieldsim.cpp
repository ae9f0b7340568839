#include "lrdfield/fieldsim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <fftw3.h>

#include "lrdfield/errors.hpp"
#include "lrdfield/log.hpp"
#include "lrdfield/rng.hpp"
#include "lrdfield/specialfuns.hpp"

namespace lrdfield {

namespace {

// The FFTW planner is not re-entrant; execution on new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

ComplexBuffer make_buffer(std::size_t n) {
  return ComplexBuffer(fftw_alloc_complex(n));
}

class FftPlan {
 public:
  FftPlan(int n0, int n1, int sign) {
    auto in = make_buffer(static_cast<std::size_t>(n0) * n1);
    auto out = make_buffer(static_cast<std::size_t>(n0) * n1);
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_2d(n0, n1, in.get(), out.get(), sign, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    if (plan_ != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute(fftw_complex* in, fftw_complex* out) const { fftw_execute_dft(plan_, in, out); }

 private:
  fftw_plan plan_ = nullptr;
};

// Gauss-Jacobi nodes/weights on [0, 1] for the probability density
// nu (1 - t)^(nu - 1), via Golub-Welsch on [-1, 1] with (a, b) = (nu - 1, 0).
void gauss_jacobi_unit(double nu, int n, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  const double a = nu - 1.0;
  const double b = 0.0;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    diag(k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    off(k - 1) = std::sqrt(4.0 * k * (k + a) * (k + b) * (k + a + b) /
                           (s * s * (s + 1.0) * (s - 1.0)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off.head(n - 1), Eigen::ComputeEigenvectors);
  nodes.resize(n);
  weights.resize(n);
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    nodes[k] = 0.5 * (1.0 + solver.eigenvalues()(k));
    const double v = solver.eigenvectors()(0, k);
    weights[k] = v * v;
    total += weights[k];
  }
  for (double& w : weights) w /= total;
}

}  // namespace

void VectorFieldSpec::validate() const {
  if (components.size() < 2) throw ConfigError("vector field needs at least two components");
  if (n < 1 || n >= m()) throw ConfigError("F-field split needs 1 <= n < m");
}

struct GaussianSynthesizer::Impl {
  LatticeSpec spec;
  CovarianceModel model;
  SynthesisReport report;

  // Circulant embedding state.
  int mx = 0;
  int my = 0;
  std::vector<double> amplitude;    // sqrt(max(lambda, 0) / M)
  std::vector<double> eigenvalues;  // clipped eigenvalues
  std::unique_ptr<FftPlan> plan;

  // Spectral quadrature state.
  Eigen::MatrixXd cos_x, sin_x, cos_y, sin_y;  // lattice x node tables
  Eigen::VectorXd sqrt_weight;
  std::vector<double> freq_x, freq_y, weight;

  Impl(LatticeSpec s, CovarianceModel m) : spec(s), model(std::move(m)) {}

  void build_circulant(const EmbeddingOptions& options);
  void build_spectral();
  LatticeField sample_circulant(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t substream) const;
  LatticeField sample_spectral(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t substream) const;
};

void GaussianSynthesizer::Impl::build_circulant(const EmbeddingOptions& options) {
  const int base_x = 2 * static_cast<int>(spec.n_x - 1);
  const int base_y = 2 * static_cast<int>(spec.n_y - 1);
  double worst_ratio = 0.0;
  for (int doubling = 0; doubling <= options.max_doublings; ++doubling) {
    mx = base_x << doubling;
    my = base_y << doubling;
    const std::size_t total = static_cast<std::size_t>(mx) * my;
    auto buf = make_buffer(total);
    auto out = make_buffer(total);
    std::vector<double> row(total);
    for (int p = 0; p < mx; ++p) {
      const double ip = std::min(p, mx - p);
      for (int q = 0; q < my; ++q) {
        const double iq = std::min(q, my - q);
        const double v = evaluate(model, spec.dx * std::hypot(ip, iq));
        row[static_cast<std::size_t>(p) * my + q] = v;
        buf[static_cast<std::size_t>(p) * my + q][0] = v;
        buf[static_cast<std::size_t>(p) * my + q][1] = 0.0;
      }
    }
    auto forward = std::make_unique<FftPlan>(mx, my, FFTW_FORWARD);
    forward->execute(buf.get(), out.get());
    double lmax = 0.0;
    double lmin = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
      lmax = std::max(lmax, out[k][0]);
      lmin = std::min(lmin, out[k][0]);
    }
    const double ratio = lmax > 0.0 ? lmin / lmax : -1.0;
    worst_ratio = ratio;
    if (ratio < -options.eps_embed) continue;

    report.method = SynthesisMethod::CirculantEmbedding;
    report.size_x = static_cast<std::size_t>(mx);
    report.size_y = static_cast<std::size_t>(my);
    report.min_eigen_ratio = ratio;
    eigenvalues.resize(total);
    amplitude.resize(total);
    std::size_t clipped = 0;
    for (std::size_t k = 0; k < total; ++k) {
      double lam = out[k][0];
      if (lam < 0.0) {
        lam = 0.0;
        ++clipped;
      }
      eigenvalues[k] = lam;
      amplitude[k] = std::sqrt(lam / static_cast<double>(total));
    }
    report.clipped_eigenvalues = clipped;
    if (clipped > 0) {
      // Covariance actually realised after clipping, against the target row.
      for (std::size_t k = 0; k < total; ++k) {
        buf[k][0] = eigenvalues[k];
        buf[k][1] = 0.0;
      }
      FftPlan backward(mx, my, FFTW_BACKWARD);
      backward.execute(buf.get(), out.get());
      double num = 0.0;
      double den = 0.0;
      for (std::size_t k = 0; k < total; ++k) {
        const double d = out[k][0] / static_cast<double>(total) - row[k];
        num += d * d;
        den += row[k] * row[k];
      }
      report.clip_distortion = std::sqrt(num / den);
      std::ostringstream msg;
      msg << model.to_string() << ": clipped " << clipped
          << " negative eigenvalues (min ratio " << ratio << ") on " << mx << "x" << my
          << " embedding, relative covariance distortion " << report.clip_distortion;
      log_warning(msg.str());
    }
    plan = std::move(forward);
    return;
  }
  std::ostringstream msg;
  msg << "circulant embedding of " << model.to_string() << " on " << spec.n_x << "x"
      << spec.n_y << " (dx=" << spec.dx << ") not PSD after " << options.max_doublings
      << " doublings: min/max eigenvalue ratio " << worst_ratio << " < -" << options.eps_embed;
  throw EmbeddingNotPD(msg.str(), worst_ratio);
}

void GaussianSynthesizer::Impl::build_spectral() {
  const double z_max =
      spec.dx * std::hypot(static_cast<double>(spec.n_x - 1), static_cast<double>(spec.n_y - 1));
  // Midpoint rule over half-circle angles is spectrally accurate: the error
  // at distance z is ~2|J_{2K}(z)|, negligible once 2K > z + O(z^(1/3)).
  const int angles = static_cast<int>(std::ceil(0.5 * z_max + 6.0 * std::cbrt(z_max))) + 16;
  std::vector<double> radii{1.0};
  std::vector<double> radial_weights{1.0};
  const double nu = model.nu();
  if (nu > 0.0) {
    const int radial = static_cast<int>(std::ceil(0.5 * z_max + 6.0 * std::cbrt(z_max))) + 16;
    std::vector<double> t;
    gauss_jacobi_unit(nu, radial, t, radial_weights);
    radii.resize(t.size());
    std::transform(t.begin(), t.end(), radii.begin(), [](double v) { return std::sqrt(v); });
  }
  const std::size_t nodes = radii.size() * static_cast<std::size_t>(angles);
  freq_x.reserve(nodes);
  freq_y.reserve(nodes);
  weight.reserve(nodes);
  for (std::size_t r = 0; r < radii.size(); ++r) {
    for (int k = 0; k < angles; ++k) {
      const double theta = (k + 0.5) * std::numbers::pi / angles;
      freq_x.push_back(radii[r] * std::cos(theta) * spec.dx);
      freq_y.push_back(radii[r] * std::sin(theta) * spec.dx);
      weight.push_back(radial_weights[r] / angles);
    }
  }
  const auto nn = static_cast<Eigen::Index>(nodes);
  cos_x.resize(static_cast<Eigen::Index>(spec.n_x), nn);
  sin_x.resize(static_cast<Eigen::Index>(spec.n_x), nn);
  cos_y.resize(static_cast<Eigen::Index>(spec.n_y), nn);
  sin_y.resize(static_cast<Eigen::Index>(spec.n_y), nn);
  sqrt_weight.resize(nn);
  for (Eigen::Index k = 0; k < nn; ++k) {
    sqrt_weight(k) = std::sqrt(weight[k]);
    for (Eigen::Index i = 0; i < cos_x.rows(); ++i) {
      cos_x(i, k) = std::cos(freq_x[k] * i);
      sin_x(i, k) = std::sin(freq_x[k] * i);
    }
    for (Eigen::Index j = 0; j < cos_y.rows(); ++j) {
      cos_y(j, k) = std::cos(freq_y[k] * j);
      sin_y(j, k) = std::sin(freq_y[k] * j);
    }
  }
  report.method = SynthesisMethod::SpectralQuadrature;
  report.size_x = radii.size();
  report.size_y = static_cast<std::size_t>(angles);
  report.min_eigen_ratio = 0.0;
}

LatticeField GaussianSynthesizer::Impl::sample_circulant(std::uint64_t seed, std::uint64_t stream,
                                                         std::uint64_t substream) const {
  const std::size_t total = static_cast<std::size_t>(mx) * my;
  auto in = make_buffer(total);
  auto out = make_buffer(total);
  GaussianStream gauss(seed, stream, substream);
  for (std::size_t k = 0; k < total; ++k) {
    const double re = gauss.normal();
    const double im = gauss.normal();
    in[k][0] = amplitude[k] * re;
    in[k][1] = amplitude[k] * im;
  }
  plan->execute(in.get(), out.get());
  LatticeField field{spec, std::vector<double>(spec.size()), seed, model};
  for (std::size_t i = 0; i < spec.n_x; ++i) {
    for (std::size_t j = 0; j < spec.n_y; ++j) {
      field(i, j) = out[i * static_cast<std::size_t>(my) + j][0];
    }
  }
  return field;
}

LatticeField GaussianSynthesizer::Impl::sample_spectral(std::uint64_t seed, std::uint64_t stream,
                                                        std::uint64_t substream) const {
  const Eigen::Index nodes = sqrt_weight.size();
  Eigen::VectorXd a(nodes);
  Eigen::VectorXd b(nodes);
  GaussianStream gauss(seed, stream, substream);
  for (Eigen::Index k = 0; k < nodes; ++k) {
    a(k) = gauss.normal() * sqrt_weight(k);
    b(k) = gauss.normal() * sqrt_weight(k);
  }
  // sum_k a_k cos(u_k i + v_k j) + b_k sin(u_k i + v_k j), expanded so the
  // lattice sum becomes two matrix products.
  const Eigen::MatrixXd p = cos_y * a.asDiagonal() + sin_y * b.asDiagonal();
  const Eigen::MatrixXd q = cos_y * b.asDiagonal() - sin_y * a.asDiagonal();
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor x = cos_x * p.transpose() + sin_x * q.transpose();
  LatticeField field{spec, std::vector<double>(x.data(), x.data() + x.size()), seed, model};
  return field;
}

GaussianSynthesizer::GaussianSynthesizer(LatticeSpec spec, CovarianceModel model,
                                         EmbeddingOptions options)
    : impl_(std::make_unique<Impl>(spec, std::move(model))) {
  spec.validate();
  if (impl_->model.kind() == CovarianceKind::Bessel) {
    impl_->build_spectral();
  } else {
    impl_->build_circulant(options);
  }
}

GaussianSynthesizer::~GaussianSynthesizer() = default;
GaussianSynthesizer::GaussianSynthesizer(GaussianSynthesizer&&) noexcept = default;
GaussianSynthesizer& GaussianSynthesizer::operator=(GaussianSynthesizer&&) noexcept = default;

LatticeField GaussianSynthesizer::sample(std::uint64_t seed, std::uint64_t stream,
                                         std::uint64_t substream) const {
  if (impl_->report.method == SynthesisMethod::SpectralQuadrature) {
    return impl_->sample_spectral(seed, stream, substream);
  }
  return impl_->sample_circulant(seed, stream, substream);
}

std::vector<double> GaussianSynthesizer::implied_covariance() const {
  const auto& s = impl_->spec;
  std::vector<double> cov(s.size());
  if (impl_->report.method == SynthesisMethod::SpectralQuadrature) {
    for (std::size_t i = 0; i < s.n_x; ++i) {
      for (std::size_t j = 0; j < s.n_y; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < impl_->weight.size(); ++k) {
          acc += impl_->weight[k] * std::cos(impl_->freq_x[k] * static_cast<double>(i) +
                                             impl_->freq_y[k] * static_cast<double>(j));
        }
        cov[i * s.n_y + j] = acc;
      }
    }
    return cov;
  }
  const std::size_t total = static_cast<std::size_t>(impl_->mx) * impl_->my;
  auto in = make_buffer(total);
  auto out = make_buffer(total);
  for (std::size_t k = 0; k < total; ++k) {
    in[k][0] = impl_->eigenvalues[k];
    in[k][1] = 0.0;
  }
  FftPlan backward(impl_->mx, impl_->my, FFTW_BACKWARD);
  backward.execute(in.get(), out.get());
  for (std::size_t i = 0; i < s.n_x; ++i) {
    for (std::size_t j = 0; j < s.n_y; ++j) {
      cov[i * s.n_y + j] = out[i * static_cast<std::size_t>(impl_->my) + j][0] /
                           static_cast<double>(total);
    }
  }
  return cov;
}

const SynthesisReport& GaussianSynthesizer::report() const noexcept { return impl_->report; }
const LatticeSpec& GaussianSynthesizer::spec() const noexcept { return impl_->spec; }
const CovarianceModel& GaussianSynthesizer::model() const noexcept { return impl_->model; }

LatticeField simulate_gaussian(const LatticeSpec& spec, const CovarianceModel& model,
                               std::uint64_t seed) {
  return GaussianSynthesizer(spec, model).sample(seed);
}

std::vector<LatticeField> simulate_vector(std::span<const GaussianSynthesizer> synths,
                                          std::uint64_t seed) {
  std::vector<LatticeField> out;
  out.reserve(synths.size());
  for (std::size_t j = 0; j < synths.size(); ++j) {
    out.push_back(synths[j].sample(seed, j));
  }
  return out;
}

std::vector<LatticeField> simulate_vector(const LatticeSpec& spec, const VectorFieldSpec& vspec,
                                          std::uint64_t seed) {
  vspec.validate();
  std::vector<GaussianSynthesizer> synths;
  synths.reserve(vspec.components.size());
  for (const auto& model : vspec.components) synths.emplace_back(spec, model);
  return simulate_vector(synths, seed);
}

LatticeField fisher_snedecor_field(std::span<const LatticeField> components, int n) {
  const int m = static_cast<int>(components.size());
  if (n < 1 || n >= m) throw DomainError("fisher_snedecor_field: need 1 <= n < m");
  const LatticeSpec& spec = components.front().spec;
  for (const auto& c : components) {
    if (!(c.spec == spec) || c.values.size() != spec.size()) {
      throw ShapeError("fisher_snedecor_field: components live on different lattices");
    }
  }
  LatticeField out{spec, std::vector<double>(spec.size()), components.front().seed, std::nullopt};
  std::size_t degenerate = 0;
  const double num_scale = 1.0 / n;
  const double den_scale = 1.0 / (m - n);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    double num = 0.0;
    for (int j = 0; j < n; ++j) num += components[j].values[k] * components[j].values[k];
    double den = 0.0;
    for (int j = n; j < m; ++j) den += components[j].values[k] * components[j].values[k];
    num *= num_scale;
    den *= den_scale;
    if (den < kFisherDenominatorFloor) {
      out.values[k] = std::numeric_limits<double>::infinity();
      ++degenerate;
    } else {
      out.values[k] = num / den;
    }
  }
  if (degenerate > 0) {
    log_warning("fisher_snedecor_field: " + std::to_string(degenerate) +
                " zero denominators set to +inf");
  }
  return out;
}

double f_pdf(double u, int n, int m) {
  if (n < 1 || n >= m) throw DomainError("f_pdf: need 1 <= n < m");
  if (!(u >= 0.0)) throw DomainError("f_pdf: u must be >= 0");
  const double k = m - n;
  const double half_n = 0.5 * n;
  if (u == 0.0) {
    if (n == 1) return std::numeric_limits<double>::infinity();
    if (n > 2) return 0.0;
  }
  if (std::isinf(u)) return 0.0;
  const double log_c = half_n * std::log(static_cast<double>(n)) + 0.5 * k * std::log(k) +
                       special::log_gamma(0.5 * m) - special::log_gamma(half_n) -
                       special::log_gamma(0.5 * k);
  const double log_u = u == 0.0 ? 0.0 : (half_n - 1.0) * std::log(u);
  return std::exp(log_c + log_u - 0.5 * m * std::log(k + n * u));
}

double f_cdf(double u, int n, int m) {
  if (n < 1 || n >= m) throw DomainError("f_cdf: need 1 <= n < m");
  if (!(u >= 0.0)) throw DomainError("f_cdf: u must be >= 0");
  if (u == 0.0) return 0.0;
  if (std::isinf(u)) return 1.0;
  const double mu = n * u / (m - n + n * u);
  return special::incomplete_beta(mu, 0.5 * n, 0.5 * (m - n));
}

}  // namespace lrdfield
