#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ggm/ggm.hpp"

// Gradients of the generalized Gaussian CDF. The shape derivative needs
// d gamma(a, b) / da, which has no closed form; it is bridged with a central
// finite difference in a, everything else is analytic.
namespace ggm::grad {

struct FdConfig {
  double epsilon_fd = 1e-5;     // central-difference step in a = 1/beta
  double eps_abs_floor = 1e-12; // |t| below this gives a zero shape gradient

  void validate() const;
};

struct CdfGradients {
  double d_y = 0.0;
  double d_beta = 0.0;
  double d_alpha = 0.0;
  double d_mu = 0.0;
};

/// dC/dy: the full density including the 1/alpha factor.
double dcdf_dy(double y, const GgmParams& p);

/// dP/db = b^(a-1) e^-b / Gamma(a). At b = 0 returns the one-sided limit.
double dP_db(double a, double b);

/// (gamma(a + eps, b) - gamma(a - eps, b)) / (2 eps), with
/// gamma(a +- eps, b) = P(a +- eps, b) exp(lgamma(a +- eps)).
double dgamma_da_fd(double a, double b, const FdConfig& cfg = {});

/// d gamma(a, b) / da = int_0^b t^(a-1) e^-t ln t dt by tanh-sinh quadrature.
/// O(N) reference route used to score the finite-difference scheme.
double dgamma_da_quadrature(double a, double b);

/// dP/da = dgamma_da_fd / Gamma(a) - P(a, b) psi(a).
double dP_da(double a, double b, const FdConfig& cfg = {});

/// dC/dbeta = sgn(t)/2 [dP/da (-1/beta^2) + dP/db |t|^beta ln|t|].
double dcdf_dbeta(double y, const GgmParams& p, const FdConfig& cfg = {});

/// Same expression with dgamma/da from quadrature instead of the difference.
double dcdf_dbeta_quadrature(double y, const GgmParams& p,
                             const FdConfig& cfg = {});

struct ScaleLocationGradients {
  double d_alpha = 0.0;
  double d_mu = 0.0;
};

/// Chain rule through t = (y - mu) / alpha:
/// dC/dalpha = -f_std(t) t / alpha, dC/dmu = -f_std(t) / alpha.
ScaleLocationGradients dcdf_dalpha_dmu(double y, const GgmParams& p);

CdfGradients cdf_gradients(double y, const GgmParams& p,
                           const FdConfig& cfg = {});

// ---- gradient checking -----------------------------------------------------

struct GradCheckTuple {
  double y = 0.0;
  GgmParams params;
};

/// n tuples with beta in [0.15, 3.9], alpha in [0.11, 5], mu in [-2, 2] and
/// standardized offset t = (y - mu) / alpha in [-3, 3].
std::vector<GradCheckTuple> random_tuples(std::size_t n, std::uint64_t seed);

enum class GradReference {
  // Global central difference of the CDF itself with step 1e-4.
  central_difference,
  // d_beta from quadrature of d gamma / da; the other three are analytic and
  // are still scored against the global central difference.
  quadrature,
};

struct GradCheckRow {
  std::string gradient;            // "d_y", "d_beta", "d_alpha" or "d_mu"
  double max_rel_err = 0.0;        // over tuples with |reference| >= 1e-4
  double max_abs_err_small = 0.0;  // over tuples with |reference| < 1e-4
  std::size_t failures = 0;        // rel > 1e-3, or abs > 1e-7 when small
  std::size_t n = 0;
};

struct GradCheckReport {
  double epsilon_fd = 0.0;
  GradReference reference = GradReference::central_difference;
  std::vector<GradCheckRow> rows;  // d_y, d_beta, d_alpha, d_mu

  bool passed() const;
  const GradCheckRow& row(const std::string& gradient) const;
};

inline constexpr double kGradCheckStep = 1e-4;
inline constexpr double kGradCheckRelTol = 1e-3;
inline constexpr double kGradCheckAbsTol = 1e-7;
inline constexpr double kGradCheckSmall = 1e-4;

GradCheckReport gradient_check(std::span<const GradCheckTuple> tuples,
                               const FdConfig& cfg, GradReference reference);

std::string to_string(GradReference r);

}  // namespace ggm::grad
