#include "ggm/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ggm/error.hpp"

namespace ggm {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kSqrt2 = std::numbers::sqrt2;

// Upper tail 1 - Phi(z) without cancellation.
double gauss_upper(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double gauss_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

// Standardized mass helpers. Each takes standardized endpoints lo < hi.
double gauss_std_mass(double lo, double hi) {
  if (lo >= 0.0) return std::max(0.0, gauss_upper(lo) - gauss_upper(hi));
  if (hi <= 0.0) return std::max(0.0, gauss_upper(-hi) - gauss_upper(-lo));
  return std::max(0.0, 1.0 - gauss_upper(-lo) - gauss_upper(hi));
}

double laplace_upper(double z) { return 0.5 * std::exp(-z); }  // z >= 0

double laplace_std_mass(double lo, double hi) {
  if (lo >= 0.0) return std::max(0.0, laplace_upper(lo) - laplace_upper(hi));
  if (hi <= 0.0) return std::max(0.0, laplace_upper(-hi) - laplace_upper(-lo));
  return std::max(0.0, 1.0 - laplace_upper(-lo) - laplace_upper(hi));
}

// Upper tail of the standard logistic, 1 / (1 + e^z).
double logistic_upper(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double logistic_std_mass(double lo, double hi) {
  if (lo >= 0.0) return std::max(0.0, logistic_upper(lo) - logistic_upper(hi));
  if (hi <= 0.0) return std::max(0.0, logistic_upper(-hi) - logistic_upper(-lo));
  return std::max(0.0, 1.0 - logistic_upper(-lo) - logistic_upper(hi));
}

double gauss_log_pdf(double y, double mu, double sigma) {
  const double z = (y - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) -
         0.5 * std::log(2.0 * std::numbers::pi);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::ggm: return "ggm";
    case Family::gaussian: return "gaussian";
    case Family::laplace: return "laplace";
    case Family::logistic: return "logistic";
    case Family::gmm: return "gmm";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "ggm") return Family::ggm;
  if (name == "gaussian") return Family::gaussian;
  if (name == "laplace") return Family::laplace;
  if (name == "logistic") return Family::logistic;
  if (name == "gmm") return Family::gmm;
  throw DomainError("unknown model family '" + std::string(name) + "'");
}

Family family_from_tag(std::uint8_t tag) {
  if (tag >= 1 && tag <= 5) return static_cast<Family>(tag);
  throw FormatError("unknown family tag " + std::to_string(tag));
}

Family EntropyModel::family() const {
  return std::visit(
      Overloaded{
          [](const GgmParams&) { return Family::ggm; },
          [](const GaussianParams&) { return Family::gaussian; },
          [](const LaplaceParams&) { return Family::laplace; },
          [](const LogisticParams&) { return Family::logistic; },
          [](const GmmParams&) { return Family::gmm; },
      },
      params_);
}

double EntropyModel::quantization_offset() const {
  return std::visit(
      Overloaded{
          [](const GmmParams&) { return 0.0; },
          [](const auto& p) { return p.mu; },
      },
      params_);
}

void EntropyModel::validate() const {
  std::visit(
      Overloaded{
          [](const GgmParams& p) { p.validate(); },
          [](const GaussianParams& p) {
            require(std::isfinite(p.mu) && positive_finite(p.sigma),
                    "Gaussian: sigma must be > 0");
          },
          [](const LaplaceParams& p) {
            require(std::isfinite(p.mu) && positive_finite(p.b),
                    "Laplace: b must be > 0");
          },
          [](const LogisticParams& p) {
            require(std::isfinite(p.mu) && positive_finite(p.s),
                    "Logistic: s must be > 0");
          },
          [](const GmmParams& p) {
            require(!p.components.empty(), "GMM: need at least one component");
            double total = 0.0;
            for (const auto& c : p.components) {
              require(c.weight >= 0.0 && std::isfinite(c.mu) &&
                          positive_finite(c.sigma),
                      "GMM: weights must be >= 0 and sigmas > 0");
              total += c.weight;
            }
            require(std::fabs(total - 1.0) <= 1e-9,
                    "GMM: weights must sum to 1");
          },
      },
      params_);
}

void to_json(nlohmann::json& j, const EntropyModel& m) {
  std::visit(
      Overloaded{
          [&](const GgmParams& p) {
            j = {{"family", "ggm"}, {"mu", p.mu}, {"alpha", p.alpha},
                 {"beta", p.beta}};
          },
          [&](const GaussianParams& p) {
            j = {{"family", "gaussian"}, {"mu", p.mu}, {"sigma", p.sigma}};
          },
          [&](const LaplaceParams& p) {
            j = {{"family", "laplace"}, {"mu", p.mu}, {"b", p.b}};
          },
          [&](const LogisticParams& p) {
            j = {{"family", "logistic"}, {"mu", p.mu}, {"s", p.s}};
          },
          [&](const GmmParams& p) {
            auto comps = nlohmann::json::array();
            for (const auto& c : p.components) {
              comps.push_back(
                  {{"weight", c.weight}, {"mu", c.mu}, {"sigma", c.sigma}});
            }
            j = {{"family", "gmm"}, {"components", comps}};
          },
      },
      m.params());
}

void from_json(const nlohmann::json& j, EntropyModel& m) {
  const auto family = family_from_string(j.at("family").get<std::string>());
  switch (family) {
    case Family::ggm:
      m = EntropyModel(j.get<GgmParams>());
      return;
    case Family::gaussian:
      m = EntropyModel(GaussianParams{j.at("mu").get<double>(),
                                      j.at("sigma").get<double>()});
      return;
    case Family::laplace:
      m = EntropyModel(
          LaplaceParams{j.at("mu").get<double>(), j.at("b").get<double>()});
      return;
    case Family::logistic:
      m = EntropyModel(
          LogisticParams{j.at("mu").get<double>(), j.at("s").get<double>()});
      return;
    case Family::gmm: {
      GmmParams p;
      for (const auto& c : j.at("components")) {
        p.components.push_back({c.at("weight").get<double>(),
                                c.at("mu").get<double>(),
                                c.at("sigma").get<double>()});
      }
      m = EntropyModel(std::move(p));
      return;
    }
  }
}

double model_log_pdf(double y, const EntropyModel& m) {
  return std::visit(
      Overloaded{
          [&](const GgmParams& p) { return log_pdf(y, p); },
          [&](const GaussianParams& p) {
            return gauss_log_pdf(y, p.mu, p.sigma);
          },
          [&](const LaplaceParams& p) {
            return -std::fabs(y - p.mu) / p.b - std::log(2.0 * p.b);
          },
          [&](const LogisticParams& p) {
            const double z = std::fabs(y - p.mu) / p.s;
            // e^-z / (s (1 + e^-z)^2), symmetric in z.
            return -z - 2.0 * std::log1p(std::exp(-z)) - std::log(p.s);
          },
          [&](const GmmParams& p) {
            // log-sum-exp; a single unit-weight component reduces exactly to
            // the Gaussian expression.
            double top = -INFINITY;
            for (const auto& c : p.components) {
              if (c.weight > 0.0) top = std::max(top, gauss_log_pdf(y, c.mu, c.sigma));
            }
            if (!std::isfinite(top)) return top;
            double acc = 0.0;
            for (const auto& c : p.components) {
              if (c.weight > 0.0) {
                acc += c.weight * std::exp(gauss_log_pdf(y, c.mu, c.sigma) - top);
              }
            }
            return top + std::log(acc);
          },
      },
      m.params());
}

double model_pdf(double y, const EntropyModel& m) {
  if (const auto* g = std::get_if<GgmParams>(&m.params())) return pdf(y, *g);
  return std::exp(model_log_pdf(y, m));
}

double model_cdf(double y, const EntropyModel& m) {
  return std::visit(
      Overloaded{
          [&](const GgmParams& p) { return cdf(y, p); },
          [&](const GaussianParams& p) { return gauss_cdf((y - p.mu) / p.sigma); },
          [&](const LaplaceParams& p) {
            const double z = (y - p.mu) / p.b;
            return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
          },
          [&](const LogisticParams& p) {
            return logistic_upper(-(y - p.mu) / p.s);
          },
          [&](const GmmParams& p) {
            double acc = 0.0;
            for (const auto& c : p.components) {
              acc += c.weight * gauss_cdf((y - c.mu) / c.sigma);
            }
            return acc;
          },
      },
      m.params());
}

double gaussian_interval_mass(double lo, double hi, double mu, double sigma) {
  if (!(hi > lo)) return 0.0;
  return gauss_std_mass((lo - mu) / sigma, (hi - mu) / sigma);
}

double model_interval_mass(double lo, double hi, const EntropyModel& m) {
  if (!(hi > lo)) return 0.0;
  return std::visit(
      Overloaded{
          [&](const GgmParams& p) {
            return standard_interval_mass((lo - p.mu) / p.alpha,
                                          (hi - p.mu) / p.alpha, p.beta);
          },
          [&](const GaussianParams& p) {
            return gaussian_interval_mass(lo, hi, p.mu, p.sigma);
          },
          [&](const LaplaceParams& p) {
            return laplace_std_mass((lo - p.mu) / p.b, (hi - p.mu) / p.b);
          },
          [&](const LogisticParams& p) {
            return logistic_std_mass((lo - p.mu) / p.s, (hi - p.mu) / p.s);
          },
          [&](const GmmParams& p) {
            double acc = 0.0;
            for (const auto& c : p.components) {
              acc += c.weight * gaussian_interval_mass(lo, hi, c.mu, c.sigma);
            }
            return acc;
          },
      },
      m.params());
}

double model_relative_interval_mass(double lo, double hi,
                                    const EntropyModel& m) {
  if (!(hi > lo)) return 0.0;
  return std::visit(
      Overloaded{
          [&](const GgmParams& p) {
            return standard_interval_mass(lo / p.alpha, hi / p.alpha, p.beta);
          },
          [&](const GaussianParams& p) {
            return gauss_std_mass(lo / p.sigma, hi / p.sigma);
          },
          [&](const LaplaceParams& p) {
            return laplace_std_mass(lo / p.b, hi / p.b);
          },
          [&](const LogisticParams& p) {
            return logistic_std_mass(lo / p.s, hi / p.s);
          },
          [&](const GmmParams&) { return model_interval_mass(lo, hi, m); },
      },
      m.params());
}

double model_bin_mass(double symbol_center, const EntropyModel& m) {
  return model_interval_mass(symbol_center - 0.5, symbol_center + 0.5, m);
}

double model_bin_probability(double symbol_center, const EntropyModel& m) {
  return std::max(model_bin_mass(symbol_center, m), kProbFloor);
}

}  // namespace ggm
