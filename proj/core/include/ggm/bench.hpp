#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ggm/ggm.hpp"

namespace ggm::bench {

struct RoiLatentConfig {
  std::size_t n = 100000;
  double roi_fraction = 0.3;
  GgmParams roi_params{0.0, 2.0, 1.0};
  GgmParams bg_params{0.0, 0.15, 2.0};
  std::uint64_t seed = 0;

  /// roi_fraction must lie in [0, 1]; both parameter sets must be valid.
  void validate() const;
};

struct LatentSet {
  std::vector<double> values;       // exactly representable as f32
  std::vector<std::uint8_t> mask;   // 1 = ROI
  double roi_fraction = 0.0;
  std::uint64_t seed = 0;
};

/// The first round(roi_fraction * n) elements come from roi_params and carry
/// mask 1, the rest come from bg_params; the whole set is then shuffled.
LatentSet synth_roi_latents(const RoiLatentConfig& cfg);

double excess_kurtosis(std::span<const double> v);

/// Sum of w_i |x_i - x_hat_i|^beta_prime with w_i picked by the mask.
double weighted_distortion(std::span<const double> x, std::span<const double> x_hat,
                           std::span<const std::uint8_t> mask, double w_roi,
                           double w_nonroi, double beta_prime);

struct GradientWeight {
  double value = 0.0;
  bool at_singularity = false;  // beta' < 1 at e = 0, where the true limit is +inf
};

GradientWeight distortion_gradient_weight(double e_abs, double beta_prime);

double rdo_objective(std::span<const double> x, std::span<const double> x_hat,
                     std::span<const std::uint8_t> mask, double w_roi,
                     double w_nonroi, double beta_prime, double rate_bits,
                     double lambda);

struct MismatchResult {
  double r_train = 0.0;  // bits/sample
  double r_test = 0.0;
  double delta_r = 0.0;
};

struct MismatchConfig {
  std::size_t n_samples = 100000;
  std::size_t n_noise = 16;
  std::uint64_t seed = 0;
  unsigned workers = 1;  // result does not depend on this
};

/// Monte-Carlo train/test rate estimates under the model itself. Every sample
/// and noise draw comes from a counter-based stream, so sharding is exact.
MismatchResult mismatch_delta_r(const GgmParams& p, const MismatchConfig& cfg);

enum class BoundMode { none, fixed, dynamic };
inline constexpr double kFixedBound = 0.11;

std::string to_string(BoundMode m);
BoundMode bound_mode_from_string(const std::string& s);

/// Scale actually used after applying the bound mode to a raw alpha.
double effective_alpha(double alpha, double beta, BoundMode mode, double zeta);

struct RateCurvePoint {
  double rate = 0.0;
  double quality = 0.0;
};

/// Percent rate change of curve b relative to curve a at equal quality.
/// Cubic fit of ln(rate) against quality over the overlapping quality range.
double bd_rate(std::span<const RateCurvePoint> a, std::span<const RateCurvePoint> b);

}  // namespace ggm::bench
