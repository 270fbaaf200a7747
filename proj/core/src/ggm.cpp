#include "ggm/ggm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ggm/error.hpp"
#include "ggm/rng.hpp"
#include "ggm/specfun.hpp"

namespace ggm {
namespace {

// |t|^beta as exp(beta ln|t|), with t = 0 short-circuited.
double abs_pow(double t, double beta) {
  const double at = std::fabs(t);
  if (at == 0.0) return 0.0;
  if (std::isinf(at)) return at;
  return std::exp(beta * std::log(at));
}

// Upper-tail mass of the standardized GGM beyond x >= 0.
double upper_tail(double x, double beta) {
  return 0.5 * specfun::reg_upper_incomplete_gamma(1.0 / beta, abs_pow(x, beta));
}

// Mass of the standardized GGM on [0, x], x >= 0.
double half_mass(double x, double beta) {
  return 0.5 * specfun::reg_lower_incomplete_gamma(1.0 / beta, abs_pow(x, beta));
}

}  // namespace

void GgmParams::validate() const {
  if (!std::isfinite(mu) || !(alpha > 0.0) || !std::isfinite(alpha) ||
      !(beta >= kBetaMin && beta <= kBetaMax)) {
    std::ostringstream oss;
    oss << "invalid GGM parameters: mu=" << mu << " alpha=" << alpha
        << " beta=" << beta << " (need alpha > 0, beta in [" << kBetaMin
        << ", " << kBetaMax << "])";
    throw DomainError(oss.str());
  }
}

void to_json(nlohmann::json& j, const GgmParams& p) {
  j = nlohmann::json{{"mu", p.mu}, {"alpha", p.alpha}, {"beta", p.beta}};
}

void from_json(const nlohmann::json& j, GgmParams& p) {
  j.at("mu").get_to(p.mu);
  j.at("alpha").get_to(p.alpha);
  j.at("beta").get_to(p.beta);
}

void ActivationConfig::validate() const {
  if (!(delta > 0.0) || !(beta_min > 0.0) || !(beta_max > beta_min) ||
      !(zeta >= 0.0)) {
    throw DomainError(
        "invalid ActivationConfig: need delta > 0, 0 < beta_min < beta_max, "
        "zeta >= 0");
  }
}

double softplus_clamped(double raw, const ActivationConfig& cfg) {
  double sp;
  if (raw > 30.0) {
    sp = raw;
  } else if (raw < -30.0) {
    sp = std::exp(raw);
  } else {
    sp = std::log1p(std::exp(raw));
  }
  return std::clamp(sp, cfg.beta_min, cfg.beta_max);
}

double huber_like(double raw, const ActivationConfig& cfg) {
  const double a = std::fabs(raw);
  if (a <= cfg.delta) return raw * raw / (2.0 * cfg.delta) + cfg.delta / 2.0;
  return a;
}

double dynamic_lower_bound(double alpha, double beta,
                           const ActivationConfig& cfg) {
  return std::max(alpha, cfg.zeta * beta);
}

double log_pdf(double y, const GgmParams& p) {
  const double t = (y - p.mu) / p.alpha;
  return std::log(p.beta) - std::numbers::ln2 - std::log(p.alpha) -
         specfun::log_gamma(1.0 / p.beta) - abs_pow(t, p.beta);
}

double pdf(double y, const GgmParams& p) { return std::exp(log_pdf(y, p)); }

double cdf(double y, const GgmParams& p) {
  const double t = (y - p.mu) / p.alpha;
  if (t == 0.0) return 0.5;
  const double prob =
      specfun::reg_lower_incomplete_gamma(1.0 / p.beta, abs_pow(t, p.beta));
  return t > 0.0 ? 0.5 + 0.5 * prob : 0.5 - 0.5 * prob;
}

double standard_interval_mass(double lo, double hi, double beta) {
  if (!(hi > lo)) return 0.0;
  if (lo >= 0.0) return std::max(0.0, upper_tail(lo, beta) - upper_tail(hi, beta));
  if (hi <= 0.0) return std::max(0.0, upper_tail(-hi, beta) - upper_tail(-lo, beta));
  return half_mass(-lo, beta) + half_mass(hi, beta);
}

double bin_mass(double center, const GgmParams& p) {
  const double lo = (center - 0.5 - p.mu) / p.alpha;
  const double hi = (center + 0.5 - p.mu) / p.alpha;
  return standard_interval_mass(lo, hi, p.beta);
}

double bin_probability(double center, const GgmParams& p) {
  return std::max(bin_mass(center, p), kProbFloor);
}

double rate_bits(std::span<const std::int64_t> symbols,
                 std::span<const GgmParams> params) {
  if (symbols.size() != params.size()) {
    std::ostringstream oss;
    oss << "rate_bits: " << symbols.size() << " symbols but " << params.size()
        << " parameter sets";
    throw DomainError(oss.str());
  }
  double bits = 0.0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const auto& p = params[i];
    bits -= std::log2(
        bin_probability(p.mu + static_cast<double>(symbols[i]), p));
  }
  return bits;
}

double rate_bits(std::span<const std::int64_t> symbols, const GgmParams& p) {
  double bits = 0.0;
  for (const auto s : symbols) {
    bits -= std::log2(bin_probability(p.mu + static_cast<double>(s), p));
  }
  return bits;
}

Quantized quantize_zero_center(double y, double mu) {
  const double r = std::round(y - mu);  // ties away from zero
  return {static_cast<std::int64_t>(r), r + mu};
}

double quantile(double u, const GgmParams& p) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("quantile: u must lie in (0, 1)");
  }
  const double centered = 2.0 * u - 1.0;
  if (centered == 0.0) return p.mu;
  const double b =
      specfun::inv_reg_lower_incomplete_gamma(1.0 / p.beta, std::fabs(centered));
  const double mag = p.alpha * std::pow(b, 1.0 / p.beta);
  return centered > 0.0 ? p.mu + mag : p.mu - mag;
}

std::vector<double> sample(const GgmParams& p, std::size_t n,
                           std::uint64_t seed) {
  p.validate();
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& y : out) y = quantile(uniform_open01(rng), p);
  return out;
}

double variance(const GgmParams& p) {
  return p.alpha * p.alpha *
         std::exp(specfun::log_gamma(3.0 / p.beta) -
                  specfun::log_gamma(1.0 / p.beta));
}

}  // namespace ggm
