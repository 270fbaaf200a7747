#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace ggm {

/// Parameters of one symmetric generalized Gaussian component:
/// f(y) = beta / (2 alpha Gamma(1/beta)) exp(-(|y - mu| / alpha)^beta).
struct GgmParams {
  double mu = 0.0;
  double alpha = 1.0;  // scale, > 0
  double beta = 2.0;   // shape, in [kBetaMin, kBetaMax]

  static constexpr double kBetaMin = 0.1;
  static constexpr double kBetaMax = 4.0;

  /// Throws DomainError unless alpha > 0 and beta lies in the clamp interval.
  void validate() const;

  friend bool operator==(const GgmParams&, const GgmParams&) = default;
};

void to_json(nlohmann::json& j, const GgmParams& p);
void from_json(const nlohmann::json& j, GgmParams& p);

struct ActivationConfig {
  double delta = 0.11;    // Huber knee
  double beta_min = GgmParams::kBetaMin;
  double beta_max = GgmParams::kBetaMax;
  double zeta = 0.1;      // slope of the shape-dependent scale floor

  void validate() const;
};

// Floor applied to bin probabilities before taking logarithms; matches the
// smallest nonzero frequency of a 16-bit coding table.
inline constexpr double kProbFloor = 1.0 / 65536.0;

// ---- parameter activations -------------------------------------------------

/// clamp(softplus(raw), beta_min, beta_max), stable for large |raw|.
double softplus_clamped(double raw, const ActivationConfig& cfg = {});

/// raw^2 / (2 delta) + delta / 2 for |raw| <= delta, |raw| otherwise.
double huber_like(double raw, const ActivationConfig& cfg = {});

/// max(alpha, zeta * beta).
double dynamic_lower_bound(double alpha, double beta,
                           const ActivationConfig& cfg = {});

// ---- density and distribution ---------------------------------------------

double log_pdf(double y, const GgmParams& p);
double pdf(double y, const GgmParams& p);

/// 1/2 + sgn(t)/2 P(1/beta, |t|^beta) with t = (y - mu) / alpha.
double cdf(double y, const GgmParams& p);

/// Mass of the standardized (mu = 0, alpha = 1) GGM on [lo, hi]. Bins on one
/// side of the mode are formed from upper-tail differences so far-tail masses
/// keep relative precision. Infinite endpoints are allowed.
double standard_interval_mass(double lo, double hi, double beta);

/// Mass of the unit bin [center - 1/2, center + 1/2]: the density convolved
/// with U(-1/2, 1/2), evaluated at center. Not floored.
double bin_mass(double center, const GgmParams& p);

/// bin_mass floored at kProbFloor; this is the probability used for rates.
double bin_probability(double center, const GgmParams& p);

/// Sum of -log2 bin_probability over zero-center symbols: symbol s under
/// params p occupies the bin centred at p.mu + s.
double rate_bits(std::span<const std::int64_t> symbols,
                 std::span<const GgmParams> params);

/// Same with one shared parameter set.
double rate_bits(std::span<const std::int64_t> symbols, const GgmParams& p);

// ---- quantization and sampling --------------------------------------------

struct Quantized {
  std::int64_t symbol = 0;
  double reconstructed = 0.0;
};

/// symbol = round(y - mu) with ties away from zero; reconstructed = symbol + mu.
Quantized quantize_zero_center(double y, double mu);

/// Inverse-CDF transform of a uniform u in (0, 1).
double quantile(double u, const GgmParams& p);

/// n deterministic draws for a given seed.
std::vector<double> sample(const GgmParams& p, std::size_t n,
                           std::uint64_t seed);

/// Variance alpha^2 Gamma(3/beta) / Gamma(1/beta).
double variance(const GgmParams& p);

}  // namespace ggm
