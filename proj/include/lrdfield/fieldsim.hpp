#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lrdfield/covariance.hpp"
#include "lrdfield/lattice.hpp"

namespace lrdfield {

/// m independent Gaussian components; the Fisher-Snedecor field puts the
/// first n in the numerator and the remaining m - n in the denominator.
struct VectorFieldSpec {
  std::vector<CovarianceModel> components;
  int n = 1;

  int m() const noexcept { return static_cast<int>(components.size()); }
  /// Throws ConfigError unless m >= 2 and 1 <= n < m.
  void validate() const;
};

struct EmbeddingOptions {
  /// Negative eigenvalues down to -eps_embed * max eigenvalue are clipped.
  double eps_embed = 1e-6;
  /// Times the minimal 2(n-1) embedding may be doubled per axis.
  int max_doublings = 3;
};

enum class SynthesisMethod { CirculantEmbedding, SpectralQuadrature };

struct SynthesisReport {
  SynthesisMethod method = SynthesisMethod::CirculantEmbedding;
  /// Embedding torus size (circulant) or number of spectral nodes in each
  /// direction (quadrature: radial x angular).
  std::size_t size_x = 0;
  std::size_t size_y = 0;
  double min_eigen_ratio = 0.0;
  std::size_t clipped_eigenvalues = 0;
  /// Relative L2 distortion of the covariance row caused by clipping.
  double clip_distortion = 0.0;
};

/// Exact sampler of a stationary, isotropic, unit-variance Gaussian field on
/// a lattice.
///
/// Built once per (lattice, model); sample() is const and may be called
/// from several threads at once. Two methods are used:
///
///  * circulant embedding on a torus of 2(n-1) 2^k points per axis, with
///    the eigenvalues of the embedded covariance obtained by FFT;
///  * for Bessel models, whose spectral measure is supported on the unit
///    disc (a ring for nu = 0) and whose embeddings are never close to
///    positive definite, a finite Gaussian superposition of plane waves at
///    Gauss-Jacobi x midpoint-rule spectral nodes. The node count is chosen
///    so the implied lattice covariance matches B to ~1e-12.
class GaussianSynthesizer {
 public:
  /// Throws EmbeddingNotPD if no embedding within max_doublings is PSD up
  /// to eps_embed.
  GaussianSynthesizer(LatticeSpec spec, CovarianceModel model, EmbeddingOptions options = {});
  ~GaussianSynthesizer();
  GaussianSynthesizer(GaussianSynthesizer&&) noexcept;
  GaussianSynthesizer& operator=(GaussianSynthesizer&&) noexcept;

  /// One realization driven by the normal stream keyed (seed, stream).
  LatticeField sample(std::uint64_t seed, std::uint64_t stream = 0,
                      std::uint64_t substream = 0) const;

  /// Covariance the sampler actually reproduces at lag (i dx, j dx), for
  /// 0 <= i < n_x, 0 <= j < n_y, row-major.
  std::vector<double> implied_covariance() const;

  const SynthesisReport& report() const noexcept;
  const LatticeSpec& spec() const noexcept;
  const CovarianceModel& model() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LatticeField simulate_gaussian(const LatticeSpec& spec, const CovarianceModel& model,
                               std::uint64_t seed);

/// Component j is sampled from stream key (seed, j).
std::vector<LatticeField> simulate_vector(const LatticeSpec& spec, const VectorFieldSpec& vspec,
                                          std::uint64_t seed);

/// Same, reusing prepared synthesizers (one per component).
std::vector<LatticeField> simulate_vector(std::span<const GaussianSynthesizer> synths,
                                          std::uint64_t seed);

/// Values with a denominator below this become +infinity.
inline constexpr double kFisherDenominatorFloor = 1e-300;

/// Pointwise F_{n, m-n} = (sum_{j<n} eta_j^2 / n) / (sum_{j>=n} eta_j^2 / (m-n)).
LatticeField fisher_snedecor_field(std::span<const LatticeField> components, int n);

/// Marginal density and distribution function of F_{n, m-n}.
double f_pdf(double u, int n, int m);
double f_cdf(double u, int n, int m);

}  // namespace lrdfield
