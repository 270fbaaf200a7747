#include "ggm/grad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ggm/error.hpp"
#include "ggm/rng.hpp"
#include "ggm/specfun.hpp"

namespace ggm::grad {
namespace {

double sgn(double t) { return (t > 0.0) - (t < 0.0); }

// Standardized density beta / (2 Gamma(1/beta)) exp(-|t|^beta).
double standard_pdf(double t, double beta) {
  const double at = std::fabs(t);
  const double pw = at == 0.0 ? 0.0 : std::exp(beta * std::log(at));
  return std::exp(std::log(beta) - std::log(2.0) -
                  specfun::log_gamma(1.0 / beta) - pw);
}

using PartialDa = double (*)(double, double, const FdConfig&);

double dcdf_dbeta_with(double y, const GgmParams& p, const FdConfig& cfg,
                       PartialDa partial_a) {
  const double t = (y - p.mu) / p.alpha;
  const double x_abs = std::fabs(t);
  if (x_abs < cfg.eps_abs_floor) return 0.0;
  const double beta = p.beta;
  const double a = 1.0 / beta;
  const double log_x = std::log(x_abs);
  const double b = std::exp(beta * log_x);
  // dP/db * db/dbeta = b^a e^-b / Gamma(a) * ln|t|, formed in log space so
  // that b^(a-1) never overflows for small |t|.
  const double db_term =
      std::exp(a * std::log(b) - b - specfun::log_gamma(a)) * log_x;
  const double da_term = partial_a(a, b, cfg) * (-1.0 / (beta * beta));
  return 0.5 * sgn(t) * (da_term + db_term);
}

double dP_da_quadrature(double a, double b, const FdConfig&) {
  if (b == 0.0) return 0.0;
  return dgamma_da_quadrature(a, b) / std::exp(specfun::log_gamma(a)) -
         specfun::reg_lower_incomplete_gamma(a, b) * specfun::digamma(a);
}

double dP_da_fd(double a, double b, const FdConfig& cfg) {
  return dP_da(a, b, cfg);
}

}  // namespace

void FdConfig::validate() const {
  if (!(epsilon_fd > 0.0 && epsilon_fd < 1e-2)) {
    throw DomainError("FdConfig.epsilon_fd must lie in (0, 1e-2)");
  }
  if (!(eps_abs_floor >= 0.0)) {
    throw DomainError("FdConfig.eps_abs_floor must be >= 0");
  }
}

double dcdf_dy(double y, const GgmParams& p) { return pdf(y, p); }

double dP_db(double a, double b) {
  if (!(a > 0.0) || !(b >= 0.0)) throw DomainError("dP_db: need a > 0, b >= 0");
  if (b == 0.0) {
    if (a < 1.0) return INFINITY;
    if (a == 1.0) return 1.0;
    return 0.0;
  }
  return std::exp((a - 1.0) * std::log(b) - b - specfun::log_gamma(a));
}

double dgamma_da_fd(double a, double b, const FdConfig& cfg) {
  cfg.validate();
  const double eps = cfg.epsilon_fd;
  if (!(a > eps)) {
    std::ostringstream oss;
    oss << "dgamma_da_fd: a=" << a << " must exceed the step " << eps;
    throw DomainError(oss.str());
  }
  if (!(b >= 0.0)) throw DomainError("dgamma_da_fd: b must be >= 0");
  if (b == 0.0) return 0.0;
  const double v_plus = specfun::reg_lower_incomplete_gamma(a + eps, b) *
                        std::exp(specfun::log_gamma(a + eps));
  const double v_minus = specfun::reg_lower_incomplete_gamma(a - eps, b) *
                         std::exp(specfun::log_gamma(a - eps));
  return (v_plus - v_minus) / (2.0 * eps);
}

double dgamma_da_quadrature(double a, double b) {
  if (!(a > 0.0) || !(b >= 0.0)) {
    throw DomainError("dgamma_da_quadrature: need a > 0, b >= 0");
  }
  if (b == 0.0) return 0.0;
  // With s = t^a the integrand t^(a-1) e^-t ln t dt becomes
  // e^(-s^(1/a)) ln(s) ds / a^2 on [0, b^a], removing the power singularity.
  const double upper = std::pow(b, a);
  const double inv_a = 1.0 / a;
  auto f = [inv_a](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(-std::pow(s, inv_a)) * std::log(s);
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double value = integrator.integrate(f, 0.0, upper, 1e-14);
  return value / (a * a);
}

double dP_da(double a, double b, const FdConfig& cfg) {
  if (!(b >= 0.0)) throw DomainError("dP_da: b must be >= 0");
  if (b == 0.0) {
    cfg.validate();
    if (!(a > cfg.epsilon_fd)) throw DomainError("dP_da: a must exceed the step");
    return 0.0;
  }
  const double gamma_a = std::exp(specfun::log_gamma(a));
  return dgamma_da_fd(a, b, cfg) / gamma_a -
         specfun::reg_lower_incomplete_gamma(a, b) * specfun::digamma(a);
}

double dcdf_dbeta(double y, const GgmParams& p, const FdConfig& cfg) {
  return dcdf_dbeta_with(y, p, cfg, &dP_da_fd);
}

double dcdf_dbeta_quadrature(double y, const GgmParams& p,
                             const FdConfig& cfg) {
  return dcdf_dbeta_with(y, p, cfg, &dP_da_quadrature);
}

ScaleLocationGradients dcdf_dalpha_dmu(double y, const GgmParams& p) {
  const double t = (y - p.mu) / p.alpha;
  const double f = standard_pdf(t, p.beta);
  return {-f * t / p.alpha, -f / p.alpha};
}

CdfGradients cdf_gradients(double y, const GgmParams& p, const FdConfig& cfg) {
  const auto sl = dcdf_dalpha_dmu(y, p);
  return {dcdf_dy(y, p), dcdf_dbeta(y, p, cfg), sl.d_alpha, sl.d_mu};
}

// ---- gradient checking -----------------------------------------------------

std::vector<GradCheckTuple> random_tuples(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradCheckTuple> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    GgmParams p;
    p.beta = 0.15 + 3.75 * uniform_open01(rng);
    p.alpha = 0.11 + 4.89 * uniform_open01(rng);
    p.mu = -2.0 + 4.0 * uniform_open01(rng);
    const double t = -3.0 + 6.0 * uniform_open01(rng);
    out.push_back({p.mu + p.alpha * t, p});
  }
  return out;
}

bool GradCheckReport::passed() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const GradCheckRow& r) { return r.failures == 0; });
}

const GradCheckRow& GradCheckReport::row(const std::string& gradient) const {
  for (const auto& r : rows) {
    if (r.gradient == gradient) return r;
  }
  throw std::out_of_range("no gradient row named " + gradient);
}

std::string to_string(GradReference r) {
  switch (r) {
    case GradReference::central_difference:
      return "central_difference";
    case GradReference::quadrature:
      return "quadrature";
  }
  return "unknown";
}

GradCheckReport gradient_check(std::span<const GradCheckTuple> tuples,
                               const FdConfig& cfg, GradReference reference) {
  cfg.validate();
  const double h = kGradCheckStep;
  GradCheckReport report;
  report.epsilon_fd = cfg.epsilon_fd;
  report.reference = reference;
  report.rows = {{"d_y"}, {"d_beta"}, {"d_alpha"}, {"d_mu"}};

  auto score = [](GradCheckRow& row, double value, double ref) {
    ++row.n;
    const double abs_err = std::fabs(value - ref);
    if (std::fabs(ref) < kGradCheckSmall) {
      row.max_abs_err_small = std::max(row.max_abs_err_small, abs_err);
      if (abs_err > kGradCheckAbsTol) ++row.failures;
    } else {
      const double rel = abs_err / std::fabs(ref);
      row.max_rel_err = std::max(row.max_rel_err, rel);
      if (rel > kGradCheckRelTol) ++row.failures;
    }
  };

  for (const auto& tup : tuples) {
    const auto& p = tup.params;
    const double y = tup.y;
    const auto g = cdf_gradients(y, p, cfg);

    GgmParams pb_hi = p, pb_lo = p, pa_hi = p, pa_lo = p, pm_hi = p, pm_lo = p;
    pb_hi.beta += h;
    pb_lo.beta -= h;
    pa_hi.alpha += h;
    pa_lo.alpha -= h;
    pm_hi.mu += h;
    pm_lo.mu -= h;

    const double ref_y = (cdf(y + h, p) - cdf(y - h, p)) / (2.0 * h);
    const double ref_alpha = (cdf(y, pa_hi) - cdf(y, pa_lo)) / (2.0 * h);
    const double ref_mu = (cdf(y, pm_hi) - cdf(y, pm_lo)) / (2.0 * h);
    const double ref_beta =
        reference == GradReference::quadrature
            ? dcdf_dbeta_quadrature(y, p, cfg)
            : (cdf(y, pb_hi) - cdf(y, pb_lo)) / (2.0 * h);

    score(report.rows[0], g.d_y, ref_y);
    score(report.rows[1], g.d_beta, ref_beta);
    score(report.rows[2], g.d_alpha, ref_alpha);
    score(report.rows[3], g.d_mu, ref_mu);
  }
  return report;
}

}  // namespace ggm::grad
