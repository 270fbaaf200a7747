#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ggm/ggm.hpp"
#include "ggm/grad.hpp"
#include "ggm/models.hpp"

namespace ggm::fit {

enum class MuMode { median, mean, gradient };
enum class Objective { continuous, discrete };

std::string to_string(MuMode m);
std::string to_string(Objective o);
MuMode mu_mode_from_string(const std::string& s);
Objective objective_from_string(const std::string& s);

struct FitConfig {
  int max_steps = 2000;
  double learning_rate = 1e-2;  // initial step; halved on rejection
  double tol_rel_nll = 1e-9;
  MuMode mu_mode = MuMode::median;
  Objective objective = Objective::continuous;
  std::uint64_t seed = 0;
  // Logistic and mixture fits run on a seeded subsample of at most this many
  // points; the reported NLL is always over the full sample set.
  std::size_t max_samples = 20000;
  int gmm_components = 3;
  ActivationConfig activation;
  grad::FdConfig fd;

  void validate() const;
};

struct FitResult {
  EntropyModel model;
  double nll_bits = 0.0;            // mean per-sample NLL under cfg.objective
  int steps = 0;
  bool converged = false;
  std::vector<double> nll_trace;    // accepted values of the winning start
  std::string start;                // which initialization won
};

/// Ratio-estimator initialization: mu = median, beta from
/// Gamma(2/b)^2 / (Gamma(1/b) Gamma(3/b)) = E|y-mu|^2 / E(y-mu)^2 by
/// bisection on [0.1, 4], alpha = E|y-mu| Gamma(1/b) / Gamma(2/b).
/// Throws DomainError with fewer than 30 samples or zero spread.
GgmParams moment_init(std::span<const double> samples);

/// Maximum-likelihood fit by backtracking gradient descent. GGM raw
/// parameters pass through softplus_clamped (beta), huber_like (alpha) and
/// dynamic_lower_bound every step. Non-convergence is reported through
/// FitResult::converged with the best parameters found.
FitResult fit_mle(std::span<const double> samples, Family family,
                  const FitConfig& cfg = {});

/// Mean per-sample negative log-likelihood in bits. The discrete objective
/// scores floored unit-bin probabilities of the quantized samples.
double mean_nll_bits(std::span<const double> samples, const EntropyModel& m,
                     Objective objective = Objective::continuous);

struct Histogram {
  std::vector<double> edges;           // strictly increasing, may be +-inf
  std::vector<std::uint64_t> counts;   // edges.size() - 1 entries

  void validate() const;
  std::uint64_t total() const;
};

/// bins equal-width bins spanning the central `coverage` fraction of samples.
Histogram make_histogram(std::span<const double> samples, std::size_t bins,
                         double coverage = 0.9999);

/// sum_i p_i log2(p_i / q_i) over nonempty bins with q_i the model mass on
/// the bin, floored at 1e-12.
double kl_divergence(const Histogram& h, const EntropyModel& m);

}  // namespace ggm::fit
