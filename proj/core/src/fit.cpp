#include "ggm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ggm/error.hpp"
#include "ggm/rng.hpp"
#include "ggm/specfun.hpp"

namespace ggm::fit {
namespace {

constexpr double kLn2 = std::numbers::ln2;

double median_of(std::span<const double> samples) {
  std::vector<double> v(samples.begin(), samples.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

double mean_of(std::span<const double> samples) {
  return std::accumulate(samples.begin(), samples.end(), 0.0) /
         static_cast<double>(samples.size());
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double inverse_softplus(double y) { return std::log(std::expm1(y)); }

// Raw value whose huber_like image is alpha (or the closest reachable).
double inverse_huber(double alpha, const ActivationConfig& act) {
  if (alpha >= act.delta) return alpha;
  if (alpha <= act.delta / 2.0) return 0.0;
  return std::sqrt(2.0 * act.delta * (alpha - act.delta / 2.0));
}

// ---- descent ---------------------------------------------------------------

struct Problem {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
};

struct Descent {
  std::vector<double> x;
  double f = 0.0;
  int steps = 0;
  bool converged = false;
  std::vector<double> trace;
};

Descent backtracking_descent(const Problem& prob, std::vector<double> x,
                             const FitConfig& cfg) {
  Descent d;
  d.f = prob.value(x);
  if (!std::isfinite(d.f)) {
    throw DomainError("fit: objective is not finite at the initial point");
  }
  d.trace.push_back(d.f);
  std::vector<double> g(x.size()), trial(x.size());
  double lr = cfg.learning_rate;
  for (int step = 0; step < cfg.max_steps; ++step) {
    prob.gradient(x, g);
    bool accepted = false;
    double f_trial = d.f;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - lr * g[i];
      f_trial = prob.value(trial);
      if (std::isfinite(f_trial) && f_trial <= d.f) {
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) {
      d.converged = true;
      break;
    }
    const double rel = (d.f - f_trial) / std::max(std::fabs(d.f), 1e-300);
    x = trial;
    d.f = f_trial;
    d.trace.push_back(d.f);
    d.steps = step + 1;
    lr *= 2.0;
    if (rel < cfg.tol_rel_nll) {
      d.converged = true;
      break;
    }
  }
  d.x = std::move(x);
  return d;
}

// ---- GGM parameterization --------------------------------------------------

struct GgmActivated {
  double alpha = 0.0;
  double beta = 0.0;
  double dalpha_dra = 0.0;
  double dalpha_drb = 0.0;
  double dbeta_drb = 0.0;
};

GgmActivated activate(double ra, double rb, const ActivationConfig& act) {
  GgmActivated o;
  o.beta = softplus_clamped(rb, act);
  const double sp = rb > 30.0 ? rb : std::log1p(std::exp(rb));
  o.dbeta_drb = (sp >= act.beta_min && sp <= act.beta_max) ? sigmoid(rb) : 0.0;
  const double alpha_h = huber_like(ra, act);
  const double dh = std::fabs(ra) <= act.delta ? ra / act.delta
                                               : (ra > 0.0 ? 1.0 : -1.0);
  o.alpha = dynamic_lower_bound(alpha_h, o.beta, act);
  if (alpha_h >= act.zeta * o.beta) {
    o.dalpha_dra = dh;
  } else {
    o.dalpha_drb = act.zeta * o.dbeta_drb;
  }
  return o;
}

struct GgmStart {
  std::string name;
  GgmParams params;
};

// Continuous NLL of the GGM in nats with mu either fixed (log-distances are
// precomputed) or free.
class GgmContinuous {
 public:
  GgmContinuous(std::span<const double> samples, double mu, bool free_mu,
                const ActivationConfig& act)
      : samples_(samples), mu_(mu), free_mu_(free_mu), act_(act) {
    if (!free_mu_) log_dist_ = log_distances(mu_);
  }

  GgmParams params(std::span<const double> raw) const {
    const auto a = activate(raw[0], raw[1], act_);
    return {free_mu_ ? raw[2] : mu_, a.alpha, a.beta};
  }

  double value(std::span<const double> raw) const {
    const auto a = activate(raw[0], raw[1], act_);
    const auto& ld = free_mu_ ? log_distances(raw[2]) : log_dist_;
    const double la = std::log(a.alpha);
    double acc = 0.0;
    for (const double l : ld) {
      if (std::isfinite(l)) acc += std::exp(a.beta * (l - la));
    }
    acc /= static_cast<double>(ld.size());
    return -std::log(a.beta) + std::numbers::ln2 + la +
           specfun::log_gamma(1.0 / a.beta) + acc;
  }

  void gradient(std::span<const double> raw, std::span<double> g) const {
    const auto a = activate(raw[0], raw[1], act_);
    const double mu = free_mu_ ? raw[2] : mu_;
    const auto& ld = free_mu_ ? log_distances(mu) : log_dist_;
    const double la = std::log(a.alpha);
    double sum_s = 0.0, sum_sl = 0.0, sum_mu = 0.0;
    for (std::size_t i = 0; i < ld.size(); ++i) {
      if (!std::isfinite(ld[i])) continue;
      const double s = std::exp(a.beta * (ld[i] - la));
      sum_s += s;
      sum_sl += s * (ld[i] - la);
      if (free_mu_) sum_mu += -a.beta * s / (samples_[i] - mu);
    }
    const double n = static_cast<double>(ld.size());
    const double beta = a.beta;
    const double d_alpha = 1.0 / a.alpha - beta / a.alpha * (sum_s / n);
    const double d_beta = -1.0 / beta -
                          specfun::digamma(1.0 / beta) / (beta * beta) +
                          sum_sl / n;
    g[0] = d_alpha * a.dalpha_dra;
    g[1] = d_beta * a.dbeta_drb + d_alpha * a.dalpha_drb;
    if (free_mu_) g[2] = sum_mu / n;
  }

 private:
  std::vector<double> log_distances(double mu) const {
    std::vector<double> out(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const double d = std::fabs(samples_[i] - mu);
      out[i] = d > 0.0 ? std::log(d) : -INFINITY;
    }
    return out;
  }

  std::span<const double> samples_;
  double mu_;
  bool free_mu_;
  ActivationConfig act_;
  std::vector<double> log_dist_;
};

// Discrete (unit-bin) NLL of the GGM in nats. Samples are grouped by
// zero-center symbol; the shape gradient comes from the finite-difference
// CDF derivative.
class GgmDiscrete {
 public:
  GgmDiscrete(std::span<const double> samples, double mu, bool free_mu,
              const ActivationConfig& act, const grad::FdConfig& fd)
      : samples_(samples), mu_(mu), free_mu_(free_mu), act_(act), fd_(fd) {
    if (!free_mu_) symbols_ = group(mu_);
  }

  GgmParams params(std::span<const double> raw) const {
    const auto a = activate(raw[0], raw[1], act_);
    return {free_mu_ ? raw[2] : mu_, a.alpha, a.beta};
  }

  double value(std::span<const double> raw) const {
    const auto p = params(raw);
    const auto& sym = free_mu_ ? group(p.mu) : symbols_;
    double acc = 0.0;
    for (const auto& [k, c] : sym) {
      acc -= static_cast<double>(c) *
             std::log(bin_probability(p.mu + static_cast<double>(k), p));
    }
    return acc / static_cast<double>(samples_.size());
  }

  void gradient(std::span<const double> raw, std::span<double> g) const {
    const auto a = activate(raw[0], raw[1], act_);
    const auto p = params(raw);
    const auto& sym = free_mu_ ? group(p.mu) : symbols_;
    double d_alpha = 0.0, d_beta = 0.0;
    for (const auto& [k, c] : sym) {
      const double center = p.mu + static_cast<double>(k);
      const double mass = bin_mass(center, p);
      if (mass <= kProbFloor) continue;
      const double hi = center + 0.5;
      const double lo = center - 0.5;
      const double dm_alpha = grad::dcdf_dalpha_dmu(hi, p).d_alpha -
                              grad::dcdf_dalpha_dmu(lo, p).d_alpha;
      const double dm_beta =
          grad::dcdf_dbeta(hi, p, fd_) - grad::dcdf_dbeta(lo, p, fd_);
      const double w = -static_cast<double>(c) / mass;
      d_alpha += w * dm_alpha;
      d_beta += w * dm_beta;
    }
    const double n = static_cast<double>(samples_.size());
    d_alpha /= n;
    d_beta /= n;
    g[0] = d_alpha * a.dalpha_dra;
    g[1] = d_beta * a.dbeta_drb + d_alpha * a.dalpha_drb;
    // The zero-center grid moves with mu, so the objective is piecewise
    // constant in mu.
    if (free_mu_) g[2] = 0.0;
  }

 private:
  std::map<std::int64_t, std::uint64_t> group(double mu) const {
    std::map<std::int64_t, std::uint64_t> out;
    for (const double y : samples_) ++out[quantize_zero_center(y, mu).symbol];
    return out;
  }

  std::span<const double> samples_;
  double mu_;
  bool free_mu_;
  ActivationConfig act_;
  grad::FdConfig fd_;
  std::map<std::int64_t, std::uint64_t> symbols_;
};

FitResult fit_ggm(std::span<const double> samples, const FitConfig& cfg) {
  const auto& act = cfg.activation;
  const GgmParams init = moment_init(samples);
  const double median = init.mu;
  const double mean = mean_of(samples);

  std::vector<GgmStart> starts;
  GgmParams primary = init;
  if (cfg.mu_mode == MuMode::mean) primary.mu = mean;
  starts.push_back({"moment", primary});

  // Nested slices: the Gaussian and Laplace maximum-likelihood points are
  // members of the family, so descending from them guarantees the fit never
  // scores worse than either baseline.
  double var = 0.0;
  for (const double y : samples) var += (y - mean) * (y - mean);
  var /= static_cast<double>(samples.size());
  starts.push_back({"gaussian_slice", {mean, std::sqrt(2.0 * var), 2.0}});
  double mad = 0.0;
  for (const double y : samples) mad += std::fabs(y - median);
  mad /= static_cast<double>(samples.size());
  starts.push_back({"laplace_slice", {median, mad, 1.0}});

  const bool free_mu = cfg.mu_mode == MuMode::gradient;
  FitResult best;
  best.nll_bits = INFINITY;
  for (const auto& start : starts) {
    std::vector<double> x0{inverse_huber(start.params.alpha, act),
                           inverse_softplus(std::clamp(start.params.beta,
                                                       act.beta_min,
                                                       act.beta_max))};
    if (free_mu) x0.push_back(start.params.mu);

    Descent d;
    GgmParams fitted;
    if (cfg.objective == Objective::continuous) {
      GgmContinuous obj(samples, start.params.mu, free_mu, act);
      d = backtracking_descent(
          {[&](auto r) { return obj.value(r); },
           [&](auto r, auto g) { obj.gradient(r, g); }},
          std::move(x0), cfg);
      fitted = obj.params(d.x);
    } else {
      GgmDiscrete obj(samples, start.params.mu, free_mu, act, cfg.fd);
      d = backtracking_descent(
          {[&](auto r) { return obj.value(r); },
           [&](auto r, auto g) { obj.gradient(r, g); }},
          std::move(x0), cfg);
      fitted = obj.params(d.x);
    }
    const double nll = d.f / kLn2;
    if (nll < best.nll_bits) {
      best.model = EntropyModel(fitted);
      best.nll_bits = nll;
      best.steps = d.steps;
      best.converged = d.converged;
      best.nll_trace.clear();
      for (const double v : d.trace) best.nll_trace.push_back(v / kLn2);
      best.start = start.name;
    }
  }
  return best;
}

// ---- baselines -------------------------------------------------------------

std::vector<double> subsample(std::span<const double> samples,
                              std::size_t cap, std::uint64_t seed) {
  std::vector<double> v(samples.begin(), samples.end());
  if (v.size() <= cap) return v;
  Rng rng(seed);
  for (std::size_t i = 0; i < cap; ++i) {
    const std::size_t j = i + uniform_index(rng, v.size() - i);
    std::swap(v[i], v[j]);
  }
  v.resize(cap);
  return v;
}

EntropyModel baseline_model(Family family, std::span<const double> x,
                            int k) {
  switch (family) {
    case Family::gaussian:
      return GaussianParams{x[0], std::exp(x[1])};
    case Family::laplace:
      return LaplaceParams{x[0], std::exp(x[1])};
    case Family::logistic:
      return LogisticParams{x[0], std::exp(x[1])};
    case Family::gmm: {
      GmmParams p;
      double top = *std::max_element(x.begin(), x.begin() + k);
      double z = 0.0;
      for (int i = 0; i < k; ++i) z += std::exp(x[i] - top);
      double total = 0.0;
      for (int i = 0; i < k; ++i) {
        const double w = std::exp(x[i] - top) / z;
        total += w;
        p.components.push_back({w, x[k + i], std::exp(x[2 * k + i])});
      }
      // Renormalize against rounding so the weight invariant holds exactly.
      for (auto& c : p.components) c.weight /= total;
      return p;
    }
    case Family::ggm:
      break;
  }
  throw DomainError("baseline_model: unsupported family");
}

// Analytic continuous-NLL gradients (nats) on raw parameters.
void baseline_gradient(Family family, std::span<const double> samples,
                       std::span<const double> x, int k, std::span<double> g) {
  const double n = static_cast<double>(samples.size());
  std::fill(g.begin(), g.end(), 0.0);
  switch (family) {
    case Family::gaussian: {
      const double sigma = std::exp(x[1]);
      double s1 = 0.0, s2 = 0.0;
      for (const double y : samples) {
        const double z = (y - x[0]) / sigma;
        s1 += z;
        s2 += z * z;
      }
      g[0] = -s1 / (n * sigma);
      g[1] = 1.0 - s2 / n;
      return;
    }
    case Family::laplace: {
      const double b = std::exp(x[1]);
      double s1 = 0.0, s2 = 0.0;
      for (const double y : samples) {
        const double d = y - x[0];
        s1 += (d > 0.0) - (d < 0.0);
        s2 += std::fabs(d);
      }
      g[0] = -s1 / (n * b);
      g[1] = 1.0 - s2 / (n * b);
      return;
    }
    case Family::logistic: {
      const double s = std::exp(x[1]);
      double s1 = 0.0, s2 = 0.0;
      for (const double y : samples) {
        const double z = (y - x[0]) / s;
        const double t = std::tanh(0.5 * z);
        s1 += t;
        s2 += z * t;
      }
      g[0] = -s1 / (n * s);
      g[1] = 1.0 - s2 / n;
      return;
    }
    case Family::gmm: {
      const auto model = baseline_model(family, x, k);
      const auto& comps = model.as<GmmParams>().components;
      std::vector<double> lp(k);
      for (const double y : samples) {
        double top = -INFINITY;
        for (int i = 0; i < k; ++i) {
          const double z = (y - comps[i].mu) / comps[i].sigma;
          lp[i] = std::log(comps[i].weight) - 0.5 * z * z -
                  std::log(comps[i].sigma);
          top = std::max(top, lp[i]);
        }
        double z_sum = 0.0;
        for (int i = 0; i < k; ++i) z_sum += std::exp(lp[i] - top);
        for (int i = 0; i < k; ++i) {
          const double r = std::exp(lp[i] - top) / z_sum;
          const double z = (y - comps[i].mu) / comps[i].sigma;
          g[i] -= r - comps[i].weight;
          g[k + i] -= r * z / comps[i].sigma;
          g[2 * k + i] -= r * (z * z - 1.0);
        }
      }
      for (auto& v : g) v /= n;
      return;
    }
    case Family::ggm:
      break;
  }
}

std::vector<double> baseline_init(Family family, std::span<const double> s,
                                  int k) {
  const double mean = mean_of(s);
  const double median = median_of(s);
  double var = 0.0, mad = 0.0;
  for (const double y : s) {
    var += (y - mean) * (y - mean);
    mad += std::fabs(y - median);
  }
  var /= static_cast<double>(s.size());
  mad /= static_cast<double>(s.size());
  switch (family) {
    case Family::gaussian:
      return {mean, 0.5 * std::log(var)};
    case Family::laplace:
      return {median, std::log(mad)};
    case Family::logistic:
      return {median, std::log(std::sqrt(3.0 * var) / std::numbers::pi)};
    case Family::gmm: {
      // Equal weights, means at evenly spaced quantiles, nested widths so the
      // mixture can represent both a narrow peak and broad tails.
      std::vector<double> sorted(s.begin(), s.end());
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> x(3 * k, 0.0);
      const double sd = std::sqrt(var);
      for (int i = 0; i < k; ++i) {
        const double q = (i + 0.5) / k;
        x[k + i] = sorted[static_cast<std::size_t>(q * (sorted.size() - 1))];
        x[2 * k + i] = std::log(sd * std::pow(0.25, i) + 1e-6);
      }
      return x;
    }
    case Family::ggm:
      break;
  }
  throw DomainError("baseline_init: unsupported family");
}

FitResult fit_baseline(std::span<const double> samples, Family family,
                       const FitConfig& cfg) {
  const int k = cfg.gmm_components;
  const bool iterative_only =
      family == Family::logistic || family == Family::gmm;
  const auto work = iterative_only
                        ? subsample(samples, cfg.max_samples, cfg.seed)
                        : std::vector<double>(samples.begin(), samples.end());
  const std::span<const double> ws(work);

  Problem prob;
  if (cfg.objective == Objective::continuous) {
    prob.value = [&](std::span<const double> x) {
      const auto m = baseline_model(family, x, k);
      double acc = 0.0;
      for (const double y : ws) acc -= model_log_pdf(y, m);
      return acc / static_cast<double>(ws.size());
    };
    prob.gradient = [&](std::span<const double> x, std::span<double> g) {
      baseline_gradient(family, ws, x, k, g);
    };
  } else {
    prob.value = [&](std::span<const double> x) {
      const auto m = baseline_model(family, x, k);
      return mean_nll_bits(ws, m, Objective::discrete) * kLn2;
    };
    // Unit-bin objectives of the baselines use a central difference on the
    // raw parameters; only the GGM shape needs the dedicated scheme.
    prob.gradient = [&](std::span<const double> x, std::span<double> g) {
      std::vector<double> xp(x.begin(), x.end());
      const double h = 1e-6;
      for (std::size_t i = 0; i < xp.size(); ++i) {
        const double keep = xp[i];
        xp[i] = keep + h;
        const double fp = prob.value(xp);
        xp[i] = keep - h;
        const double fm = prob.value(xp);
        xp[i] = keep;
        g[i] = (fp - fm) / (2.0 * h);
      }
    };
  }

  auto d = backtracking_descent(prob, baseline_init(family, ws, k), cfg);
  FitResult r;
  r.model = baseline_model(family, d.x, k);
  r.nll_bits = mean_nll_bits(samples, r.model, cfg.objective);
  r.steps = d.steps;
  r.converged = d.converged;
  for (const double v : d.trace) r.nll_trace.push_back(v / kLn2);
  r.start = "closed_form";
  return r;
}

}  // namespace

std::string to_string(MuMode m) {
  switch (m) {
    case MuMode::median: return "median";
    case MuMode::mean: return "mean";
    case MuMode::gradient: return "gradient";
  }
  return "unknown";
}

std::string to_string(Objective o) {
  return o == Objective::continuous ? "continuous" : "discrete";
}

MuMode mu_mode_from_string(const std::string& s) {
  if (s == "median") return MuMode::median;
  if (s == "mean") return MuMode::mean;
  if (s == "gradient") return MuMode::gradient;
  throw DomainError("unknown mu mode '" + s + "'");
}

Objective objective_from_string(const std::string& s) {
  if (s == "continuous") return Objective::continuous;
  if (s == "discrete") return Objective::discrete;
  throw DomainError("unknown objective '" + s + "'");
}

void FitConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
  if (max_steps < 1) throw DomainError("max_steps must be >= 1");
  if (!(tol_rel_nll >= 0.0)) throw DomainError("tol_rel_nll must be >= 0");
  if (gmm_components < 1) throw DomainError("gmm_components must be >= 1");
  if (max_samples < 30) throw DomainError("max_samples must be >= 30");
  activation.validate();
  fd.validate();
}

GgmParams moment_init(std::span<const double> samples) {
  if (samples.size() < 30) {
    throw DomainError("moment_init: need at least 30 samples");
  }
  const double mu = median_of(samples);
  double m1 = 0.0, m2 = 0.0;
  for (const double y : samples) {
    const double d = y - mu;
    m1 += std::fabs(d);
    m2 += d * d;
  }
  m1 /= static_cast<double>(samples.size());
  m2 /= static_cast<double>(samples.size());
  if (!(m2 > 0.0) || !(m1 > 0.0)) {
    throw DomainError("moment_init: degenerate sample (zero spread)");
  }
  const double target = m1 * m1 / m2;
  auto ratio = [](double b) {
    using specfun::log_gamma;
    return std::exp(2.0 * log_gamma(2.0 / b) - log_gamma(1.0 / b) -
                    log_gamma(3.0 / b));
  };
  double lo = GgmParams::kBetaMin, hi = GgmParams::kBetaMax;
  double beta;
  if (target <= ratio(lo)) {
    beta = lo;
  } else if (target >= ratio(hi)) {
    beta = hi;
  } else {
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (ratio(mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    beta = 0.5 * (lo + hi);
  }
  const double alpha = m1 * std::exp(specfun::log_gamma(1.0 / beta) -
                                     specfun::log_gamma(2.0 / beta));
  return {mu, alpha, beta};
}

FitResult fit_mle(std::span<const double> samples, Family family,
                  const FitConfig& cfg) {
  cfg.validate();
  if (samples.size() < 30) throw DomainError("fit_mle: need >= 30 samples");
  for (const double y : samples) {
    if (!std::isfinite(y)) throw DomainError("fit_mle: non-finite sample");
  }
  if (family == Family::ggm) return fit_ggm(samples, cfg);
  return fit_baseline(samples, family, cfg);
}

double mean_nll_bits(std::span<const double> samples, const EntropyModel& m,
                     Objective objective) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  if (objective == Objective::continuous) {
    for (const double y : samples) acc -= model_log_pdf(y, m);
    return acc / (static_cast<double>(samples.size()) * kLn2);
  }
  const double offset = m.quantization_offset();
  std::map<std::int64_t, std::uint64_t> counts;
  for (const double y : samples) ++counts[quantize_zero_center(y, offset).symbol];
  for (const auto& [k, c] : counts) {
    acc -= static_cast<double>(c) *
           std::log2(model_bin_probability(offset + static_cast<double>(k), m));
  }
  return acc / static_cast<double>(samples.size());
}

void Histogram::validate() const {
  if (edges.size() < 2 || counts.size() != edges.size() - 1) {
    throw DomainError("Histogram: need len(counts) == len(edges) - 1 >= 1");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw DomainError("Histogram: edges must be strictly increasing");
    }
  }
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Histogram make_histogram(std::span<const double> samples, std::size_t bins,
                         double coverage) {
  if (samples.empty() || bins == 0) {
    throw DomainError("make_histogram: need samples and bins >= 1");
  }
  if (!(coverage > 0.0 && coverage <= 1.0)) {
    throw DomainError("make_histogram: coverage must be in (0, 1]");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1.0 - coverage);
  const auto n = sorted.size();
  const double lo = sorted[static_cast<std::size_t>(tail * (n - 1))];
  double hi = sorted[static_cast<std::size_t>((1.0 - tail) * (n - 1))];
  if (!(hi > lo)) hi = lo + 1.0;
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges[i] = lo + width * static_cast<double>(i);
  }
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (const double y : sorted) {
    if (y < lo || y > hi) continue;
    auto idx = static_cast<std::size_t>((y - lo) / width);
    if (idx >= bins) idx = bins - 1;
    ++h.counts[idx];
  }
  return h;
}

double kl_divergence(const Histogram& h, const EntropyModel& m) {
  h.validate();
  const double total = static_cast<double>(h.total());
  if (!(total > 0.0)) throw DomainError("kl_divergence: empty histogram");
  double kl = 0.0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    if (h.counts[i] == 0) continue;
    const double p = static_cast<double>(h.counts[i]) / total;
    const double q =
        std::max(model_interval_mass(h.edges[i], h.edges[i + 1], m), 1e-12);
    kl += p * std::log2(p / q);
  }
  return kl;
}

}  // namespace ggm::fit
