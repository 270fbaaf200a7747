#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ggm/bench.hpp"
#include "ggm/error.hpp"
#include "ggm/fit.hpp"

using namespace ggm;
using namespace ggm::fit;

namespace {

std::vector<double> laplace_samples(std::size_t n, std::uint64_t seed) {
  return sample({0.0, 1.0, 1.0}, n, seed);
}

}  // namespace

TEST(MomentInit, RecoversShape) {
  const auto g = moment_init(sample({0.0, 1.0, 2.0}, 1000000, 1));
  EXPECT_GE(g.beta, 1.9);
  EXPECT_LE(g.beta, 2.1);
  const auto l = moment_init(sample({0.0, 1.0, 1.0}, 1000000, 2));
  EXPECT_GE(l.beta, 0.95);
  EXPECT_LE(l.beta, 1.05);
}

TEST(MomentInit, TranslationEquivariant) {
  auto y = sample({0.0, 0.7, 1.4}, 5000, 3);
  const auto a = moment_init(y);
  for (auto& v : y) v += 3.0;
  const auto b = moment_init(y);
  EXPECT_NEAR(b.mu, a.mu + 3.0, 1e-12);
  EXPECT_NEAR(b.beta, a.beta, 1e-9);
  EXPECT_NEAR(b.alpha, a.alpha, 1e-9);
}

TEST(MomentInit, Degenerate) {
  EXPECT_THROW(moment_init(std::vector<double>(10, 1.0)), DomainError);
  EXPECT_THROW(moment_init(std::vector<double>(100, 1.0)), DomainError);
}

TEST(FitMle, GaussianSamples) {
  const auto r = fit_mle(sample({0.0, 1.0, 2.0}, 100000, 4), Family::ggm);
  const auto& p = r.model.as<GgmParams>();
  EXPECT_GE(p.beta, 1.85);
  EXPECT_LE(p.beta, 2.15);
  EXPECT_GE(p.alpha, 0.95);
  EXPECT_LE(p.alpha, 1.05);
}

TEST(FitMle, LaplaceSamples) {
  const auto r = fit_mle(laplace_samples(100000, 5), Family::ggm);
  const auto& p = r.model.as<GgmParams>();
  EXPECT_GE(p.beta, 0.9);
  EXPECT_LE(p.beta, 1.1);
}

TEST(FitMle, NestedFamilyDominance) {
  bench::RoiLatentConfig rc;
  rc.n = 20000;
  const std::vector<std::vector<double>> sets = {
      sample({0.0, 1.0, 2.0}, 20000, 6),
      laplace_samples(20000, 7),
      sample({0.5, 0.3, 0.6}, 20000, 8),
      sample({0.0, 2.0, 3.5}, 20000, 9),
      bench::synth_roi_latents(rc).values,
  };
  for (const auto& y : sets) {
    const double ggm_nll = fit_mle(y, Family::ggm).nll_bits;
    EXPECT_LE(ggm_nll, fit_mle(y, Family::gaussian).nll_bits + 1e-9);
    EXPECT_LE(ggm_nll, fit_mle(y, Family::laplace).nll_bits + 1e-9);
  }
}

TEST(FitMle, TraceMonotoneAndActivationRangesHold) {
  FitConfig cfg;
  for (auto mode : {MuMode::median, MuMode::mean, MuMode::gradient}) {
    cfg.mu_mode = mode;
    const auto r = fit_mle(sample({0.2, 0.05, 3.0}, 5000, 10), Family::ggm, cfg);
    for (std::size_t i = 1; i < r.nll_trace.size(); ++i) {
      EXPECT_LE(r.nll_trace[i], r.nll_trace[i - 1]);
    }
    const auto& p = r.model.as<GgmParams>();
    EXPECT_GE(p.beta, 0.1);
    EXPECT_LE(p.beta, 4.0);
    EXPECT_GE(p.alpha, std::max(cfg.activation.delta / 2, cfg.activation.zeta * p.beta) - 1e-15);
  }
}

TEST(FitMle, DiscreteObjective) {
  FitConfig cfg;
  cfg.objective = Objective::discrete;
  const auto y = sample({0.0, 2.0, 1.2}, 20000, 11);
  const auto r = fit_mle(y, Family::ggm, cfg);
  const auto& p = r.model.as<GgmParams>();
  EXPECT_NEAR(p.beta, 1.2, 0.1);
  EXPECT_NEAR(p.alpha, 2.0, 0.2);
  EXPECT_NEAR(r.nll_bits, mean_nll_bits(y, r.model, Objective::discrete), 1e-12);
  for (std::size_t i = 1; i < r.nll_trace.size(); ++i) {
    EXPECT_LE(r.nll_trace[i], r.nll_trace[i - 1]);
  }
}

TEST(FitMle, BaselinesRecoverParameters) {
  const auto y = sample({0.5, std::numbers::sqrt2, 2.0}, 50000, 12);  // sigma = 1
  const auto g = fit_mle(y, Family::gaussian).model.as<GaussianParams>();
  EXPECT_NEAR(g.mu, 0.5, 0.02);
  EXPECT_NEAR(g.sigma, 1.0, 0.02);
  const auto l = fit_mle(laplace_samples(50000, 13), Family::laplace).model.as<LaplaceParams>();
  EXPECT_NEAR(l.b, 1.0, 0.03);
  const auto lg = fit_mle(y, Family::logistic).model.as<LogisticParams>();
  EXPECT_NEAR(lg.mu, 0.5, 0.03);
  const auto m = fit_mle(y, Family::gmm).model.as<GmmParams>();
  EXPECT_EQ(m.components.size(), 3u);
}

TEST(FitMle, Deterministic) {
  const auto y = sample({0.0, 1.0, 0.7}, 5000, 14);
  for (auto f : {Family::ggm, Family::gaussian, Family::laplace, Family::logistic, Family::gmm}) {
    const auto a = fit_mle(y, f);
    const auto b = fit_mle(y, f);
    EXPECT_EQ(a.model, b.model) << to_string(f);
    EXPECT_EQ(a.nll_bits, b.nll_bits);
  }
}

TEST(FitConfig, Validation) {
  FitConfig c;
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.max_steps = 0;
  EXPECT_THROW(c.validate(), DomainError);
  EXPECT_EQ(mu_mode_from_string("gradient"), MuMode::gradient);
  EXPECT_THROW(mu_mode_from_string("mode"), DomainError);
  EXPECT_EQ(objective_from_string(to_string(Objective::discrete)), Objective::discrete);
}

TEST(Kl, SelfHistogramIsZero) {
  const EntropyModel m(LaplaceParams{0.0, 1.0 / std::numbers::ln2});  // quartiles at +-1
  Histogram h{{-INFINITY, -1.0, 0.0, 1.0, INFINITY}, {5, 5, 5, 5}};
  EXPECT_NEAR(kl_divergence(h, m), 0.0, 1e-9);
}

TEST(Kl, TwoBinToy) {
  const EntropyModel m(GaussianParams{0.0, 1.0});
  Histogram h{{-INFINITY, 0.0, INFINITY}, {3, 1}};
  EXPECT_NEAR(kl_divergence(h, m), 0.75 * std::log2(1.5) + 0.25 * std::log2(0.5), 1e-12);
  EXPECT_NEAR(kl_divergence(h, m), 0.18872, 1e-5);
}

TEST(Kl, EmptyBinsSkippedAndFloor) {
  const EntropyModel m(GaussianParams{0.0, 0.1});
  Histogram h{{-1.0, 0.0, 1.0, 50.0, 60.0}, {1, 1, 0, 1}};
  EXPECT_TRUE(std::isfinite(kl_divergence(h, m)));
  Histogram bad{{0.0, 1.0}, {1, 2}};
  EXPECT_THROW(bad.validate(), DomainError);
  Histogram empty{{0.0, 1.0}, {0}};
  EXPECT_THROW(kl_divergence(empty, m), DomainError);
}

TEST(Kl, HeavyTailedMixtureFavoursGgm) {
  bench::RoiLatentConfig rc;
  rc.n = 50000;
  const auto y = bench::synth_roi_latents(rc).values;
  const auto h = make_histogram(y, 201);
  EXPECT_EQ(h.counts.size(), 201u);
  const double kl_ggm = kl_divergence(h, fit_mle(y, Family::ggm).model);
  const double kl_gauss = kl_divergence(h, fit_mle(y, Family::gaussian).model);
  EXPECT_LT(kl_ggm, kl_gauss);
}
