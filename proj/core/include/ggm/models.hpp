#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ggm/ggm.hpp"

namespace ggm {

// Numeric values double as the family tag byte of the bitstream header.
enum class Family : std::uint8_t {
  ggm = 1,
  gaussian = 2,
  laplace = 3,
  logistic = 4,
  gmm = 5,
};

std::string to_string(Family f);
Family family_from_string(std::string_view name);  // throws DomainError
Family family_from_tag(std::uint8_t tag);          // throws FormatError

struct GaussianParams {
  double mu = 0.0;
  double sigma = 1.0;
  friend bool operator==(const GaussianParams&, const GaussianParams&) = default;
};

struct LaplaceParams {
  double mu = 0.0;
  double b = 1.0;
  friend bool operator==(const LaplaceParams&, const LaplaceParams&) = default;
};

struct LogisticParams {
  double mu = 0.0;
  double s = 1.0;
  friend bool operator==(const LogisticParams&, const LogisticParams&) = default;
};

struct GmmComponent {
  double weight = 1.0;
  double mu = 0.0;
  double sigma = 1.0;
  friend bool operator==(const GmmComponent&, const GmmComponent&) = default;
};

struct GmmParams {
  std::vector<GmmComponent> components;
  friend bool operator==(const GmmParams&, const GmmParams&) = default;
};

/// A parametric density over the real line with a uniform interface for
/// density, distribution and unit-bin probabilities.
class EntropyModel {
 public:
  using Params = std::variant<GgmParams, GaussianParams, LaplaceParams,
                              LogisticParams, GmmParams>;

  EntropyModel() : params_(GgmParams{}) {}
  EntropyModel(GgmParams p) : params_(p) { validate(); }
  EntropyModel(GaussianParams p) : params_(p) { validate(); }
  EntropyModel(LaplaceParams p) : params_(p) { validate(); }
  EntropyModel(LogisticParams p) : params_(p) { validate(); }
  EntropyModel(GmmParams p) : params_(std::move(p)) { validate(); }

  Family family() const;
  const Params& params() const { return params_; }

  template <class T>
  const T& as() const {
    return std::get<T>(params_);
  }

  /// Location of the quantization grid. Zero-center families quantize
  /// round(y - mu) + mu; the mixture uses plain rounding.
  double quantization_offset() const;

  /// Throws DomainError for non-positive scales or mixture weights that are
  /// negative or do not sum to 1 within 1e-9.
  void validate() const;

  friend bool operator==(const EntropyModel&, const EntropyModel&) = default;

 private:
  Params params_;
};

void to_json(nlohmann::json& j, const EntropyModel& m);
void from_json(const nlohmann::json& j, EntropyModel& m);

double model_pdf(double y, const EntropyModel& m);
double model_log_pdf(double y, const EntropyModel& m);
double model_cdf(double y, const EntropyModel& m);

/// Mass on [lo, hi]; infinite endpoints allowed. Tail intervals are computed
/// from upper-tail functions for relative precision.
double model_interval_mass(double lo, double hi, const EntropyModel& m);

/// Mass on [offset + lo, offset + hi] with offset = quantization_offset().
/// Location families standardize the relative endpoints directly, so
/// symbols +k and -k get bit-identical masses under a symmetric model.
double model_relative_interval_mass(double lo, double hi, const EntropyModel& m);

/// Unit-bin mass centred at symbol_center, not floored.
double model_bin_mass(double symbol_center, const EntropyModel& m);

/// Unit-bin mass floored at kProbFloor.
double model_bin_probability(double symbol_center, const EntropyModel& m);

/// Internal erf-based Gaussian helpers shared with the mixture.
double gaussian_interval_mass(double lo, double hi, double mu, double sigma);

}  // namespace ggm
