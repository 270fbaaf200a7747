#pragma once

// Gamma-family special functions used by the generalized Gaussian CDF and
// its gradients. All functions are pure and thread-safe.

namespace ggm::specfun {

struct SpecfunConfig {
  // Relative tolerance for series / continued-fraction convergence.
  double series_tol = 1e-15;
  // Iteration cap for series, continued fraction and Newton loops.
  int max_iter = 500;

  void validate() const;
};

/// ln Gamma(a) for a > 0. Throws DomainError for a <= 0 or non-finite a.
double log_gamma(double a);

/// Digamma psi(a) for a > 0, via recurrence to a >= 6 and the asymptotic
/// expansion.
double digamma(double a);

/// Regularized lower incomplete gamma P(a, b) = gamma(a, b) / Gamma(a).
///
/// Uses the power series for b < a + 1 and a Lentz continued fraction for
/// the complement Q otherwise; the prefactor b^a e^-b / Gamma(a) is formed in
/// log space. b = +inf is accepted and yields 1.
double reg_lower_incomplete_gamma(double a, double b,
                                  const SpecfunConfig& cfg = {});

/// Regularized upper incomplete gamma Q(a, b) = 1 - P(a, b), computed
/// directly so that far-tail values keep full relative precision.
double reg_upper_incomplete_gamma(double a, double b,
                                  const SpecfunConfig& cfg = {});

/// Inverse of P(a, .) on p in [0, 1): returns b with |P(a, b) - p| <= 1e-10.
/// Safeguarded Newton iteration inside a bisection bracket [0, b_hi], with
/// b_hi doubled until P(a, b_hi) > p. Throws ConvergenceError if the bracket
/// grows past 1e6.
double inv_reg_lower_incomplete_gamma(double a, double p,
                                      const SpecfunConfig& cfg = {});

}  // namespace ggm::specfun
