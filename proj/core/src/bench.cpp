#include "ggm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <Eigen/Dense>

#include "ggm/error.hpp"
#include "ggm/rng.hpp"

namespace ggm::bench {

void RoiLatentConfig::validate() const {
  if (!(roi_fraction >= 0.0 && roi_fraction <= 1.0)) {
    throw DomainError("roi_fraction must lie in [0, 1]");
  }
  roi_params.validate();
  bg_params.validate();
}

LatentSet synth_roi_latents(const RoiLatentConfig& cfg) {
  cfg.validate();
  const auto n_roi = static_cast<std::size_t>(
      std::llround(cfg.roi_fraction * static_cast<double>(cfg.n)));

  Rng rng(cfg.seed);
  LatentSet out;
  out.roi_fraction = cfg.roi_fraction;
  out.seed = cfg.seed;
  out.values.resize(cfg.n);
  out.mask.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const bool roi = i < n_roi;
    const double y = quantile(uniform_open01(rng), roi ? cfg.roi_params : cfg.bg_params);
    // Stored as f32 on disk; keep the in-memory copy identical.
    out.values[i] = static_cast<double>(static_cast<float>(y));
    out.mask[i] = roi ? 1 : 0;
  }
  // Fisher-Yates by hand: std::shuffle's draw pattern is implementation-defined.
  for (std::size_t i = cfg.n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(out.values[i - 1], out.values[j]);
    std::swap(out.mask[i - 1], out.mask[j]);
  }
  return out;
}

double excess_kurtosis(std::span<const double> v) {
  if (v.size() < 4) throw DomainError("excess_kurtosis: need at least 4 values");
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double m2 = 0.0, m4 = 0.0;
  for (const double x : v) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= static_cast<double>(v.size());
  m4 /= static_cast<double>(v.size());
  if (m2 <= 0.0) throw DomainError("excess_kurtosis: zero variance");
  return m4 / (m2 * m2) - 3.0;
}

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t mask) {
  if (a != b || a != mask) {
    throw DomainError("weighted_distortion: length mismatch");
  }
}

}  // namespace

double weighted_distortion(std::span<const double> x, std::span<const double> x_hat,
                           std::span<const std::uint8_t> mask, double w_roi,
                           double w_nonroi, double beta_prime) {
  check_lengths(x.size(), x_hat.size(), mask.size());
  if (!(beta_prime > 0.0)) throw DomainError("beta_prime must be positive");
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::fabs(x[i] - x_hat[i]);
    d += (mask[i] ? w_roi : w_nonroi) * std::pow(e, beta_prime);
  }
  return d;
}

GradientWeight distortion_gradient_weight(double e_abs, double beta_prime) {
  if (!(e_abs >= 0.0)) throw DomainError("e_abs must be nonnegative");
  if (!(beta_prime > 0.0)) throw DomainError("beta_prime must be positive");
  if (beta_prime == 1.0) return {1.0, false};
  if (e_abs == 0.0) return {0.0, beta_prime < 1.0};
  return {beta_prime * std::pow(e_abs, beta_prime - 1.0), false};
}

double rdo_objective(std::span<const double> x, std::span<const double> x_hat,
                     std::span<const std::uint8_t> mask, double w_roi,
                     double w_nonroi, double beta_prime, double rate_bits,
                     double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
  return weighted_distortion(x, x_hat, mask, w_roi, w_nonroi, beta_prime) +
         lambda * rate_bits;
}

MismatchResult mismatch_delta_r(const GgmParams& p, const MismatchConfig& cfg) {
  p.validate();
  if (cfg.n_samples < 10000) throw DomainError("mismatch: n_samples must be >= 1e4");
  if (cfg.n_noise < 1) throw DomainError("mismatch: n_noise must be >= 1");

  // Stream 0 draws the sample, streams 1..n_noise the training noise.
  std::vector<double> train(cfg.n_samples), test(cfg.n_samples);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double y = quantile(counter_uniform(cfg.seed, i, 0), p);
      double acc = 0.0;
      for (std::size_t k = 1; k <= cfg.n_noise; ++k) {
        const double u = counter_uniform(cfg.seed, i, k) - 0.5;
        acc -= std::log2(bin_probability(y + u, p));
      }
      train[i] = acc / static_cast<double>(cfg.n_noise);
      const auto q = quantize_zero_center(y, p.mu);
      test[i] = -std::log2(bin_probability(q.reconstructed, p));
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(1, cfg.n_samples));
  if (workers == 1) {
    work(0, cfg.n_samples);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (cfg.n_samples + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(cfg.n_samples, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }

  // Sequential sums keep the result independent of the shard layout.
  MismatchResult r;
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    r.r_train += train[i];
    r.r_test += test[i];
  }
  r.r_train /= static_cast<double>(cfg.n_samples);
  r.r_test /= static_cast<double>(cfg.n_samples);
  r.delta_r = r.r_train - r.r_test;
  return r;
}

std::string to_string(BoundMode m) {
  switch (m) {
    case BoundMode::none: return "none";
    case BoundMode::fixed: return "fixed";
    case BoundMode::dynamic: return "dynamic";
  }
  return "none";
}

BoundMode bound_mode_from_string(const std::string& s) {
  if (s == "none") return BoundMode::none;
  if (s == "fixed" || s == "fixed:0.11") return BoundMode::fixed;
  if (s == "dynamic") return BoundMode::dynamic;
  throw DomainError("unknown bound mode '" + s + "'");
}

double effective_alpha(double alpha, double beta, BoundMode mode, double zeta) {
  switch (mode) {
    case BoundMode::none: return alpha;
    case BoundMode::fixed: return std::max(alpha, kFixedBound);
    case BoundMode::dynamic: {
      ActivationConfig cfg;
      cfg.zeta = zeta;
      return dynamic_lower_bound(alpha, beta, cfg);
    }
  }
  return alpha;
}

namespace {

void check_curve(std::span<const RateCurvePoint> c) {
  if (c.size() < 4) throw DomainError("bd_rate: each curve needs at least 4 points");
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i].rate > 0.0) || !std::isfinite(c[i].quality)) {
      throw DomainError("bd_rate: rates must be positive and qualities finite");
    }
    if (i > 0 && !(c[i].rate > c[i - 1].rate)) {
      throw DomainError("bd_rate: rates must strictly increase");
    }
  }
}

// Coefficients of ln(rate) = c0 + c1 q + c2 q^2 + c3 q^3, with q shifted by
// `center` for conditioning.
Eigen::Vector4d fit_cubic(std::span<const RateCurvePoint> c, double center) {
  Eigen::MatrixXd A(c.size(), 4);
  Eigen::VectorXd y(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double q = c[i].quality - center;
    const auto r = static_cast<Eigen::Index>(i);
    A(r, 0) = 1.0;
    A(r, 1) = q;
    A(r, 2) = q * q;
    A(r, 3) = q * q * q;
    y(r) = std::log(c[i].rate);
  }
  return A.colPivHouseholderQr().solve(y);
}

double integrate_cubic(const Eigen::Vector4d& k, double lo, double hi) {
  auto prim = [&](double q) {
    return k(0) * q + k(1) * q * q / 2.0 + k(2) * q * q * q / 3.0 +
           k(3) * q * q * q * q / 4.0;
  };
  return prim(hi) - prim(lo);
}

}  // namespace

double bd_rate(std::span<const RateCurvePoint> a, std::span<const RateCurvePoint> b) {
  check_curve(a);
  check_curve(b);
  auto qrange = [](std::span<const RateCurvePoint> c) {
    const auto [mn, mx] = std::minmax_element(
        c.begin(), c.end(),
        [](const auto& l, const auto& r) { return l.quality < r.quality; });
    return std::pair{mn->quality, mx->quality};
  };
  const auto [a_lo, a_hi] = qrange(a);
  const auto [b_lo, b_hi] = qrange(b);
  const double lo = std::max(a_lo, b_lo);
  const double hi = std::min(a_hi, b_hi);
  if (!(hi > lo)) throw DomainError("bd_rate: quality ranges do not overlap");

  const double center = 0.5 * (lo + hi);
  const auto ka = fit_cubic(a, center);
  const auto kb = fit_cubic(b, center);
  const double avg =
      (integrate_cubic(kb, lo - center, hi - center) -
       integrate_cubic(ka, lo - center, hi - center)) / (hi - lo);
  return std::expm1(avg) * 100.0;
}

}  // namespace ggm::bench
