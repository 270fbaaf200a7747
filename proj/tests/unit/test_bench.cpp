#include <gtest/gtest.h>

#include <cmath>

#include "ggm/bench.hpp"
#include "ggm/error.hpp"

using namespace ggm;
using namespace ggm::bench;

TEST(Synth, AllBackgroundAtZeroFraction) {
  RoiLatentConfig c;
  c.n = 1000;
  c.roi_fraction = 0.0;
  const auto s = synth_roi_latents(c);
  for (auto m : s.mask) EXPECT_EQ(m, 0);
}

TEST(Synth, MaskCountAndDeterminism) {
  RoiLatentConfig c;
  c.n = 10001;
  c.roi_fraction = 0.3;
  const auto a = synth_roi_latents(c);
  const auto b = synth_roi_latents(c);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.mask, b.mask);
  std::size_t roi = 0;
  for (auto m : a.mask) roi += m;
  EXPECT_EQ(roi, 3000u);
  for (double v : a.values) EXPECT_EQ(v, static_cast<double>(static_cast<float>(v)));
  c.seed = 1;
  EXPECT_NE(synth_roi_latents(c).values, a.values);
}

TEST(Synth, HeavyTailedPool) {
  RoiLatentConfig c;
  c.n = 1000000;
  EXPECT_GT(excess_kurtosis(synth_roi_latents(c).values), 3.0);
}

TEST(Synth, RejectsBadFraction) {
  RoiLatentConfig c;
  c.roi_fraction = 1.5;
  EXPECT_THROW(synth_roi_latents(c), DomainError);
}

TEST(Distortion, Examples) {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<std::uint8_t> ones(4, 1), half{1, 1, 0, 0};
  EXPECT_EQ(weighted_distortion(x, x, ones, 2.0, 1.0, 2.0), 0.0);
  const std::vector<double> xh{0.5, 2.5, 2.0, 6.0};
  EXPECT_NEAR(weighted_distortion(x, xh, ones, 1.0, 1.0, 2.0), 0.25 + 0.25 + 1.0 + 4.0, 1e-15);
  const std::vector<double> off{0.0, 1.0, 2.0, 3.0};
  EXPECT_NEAR(weighted_distortion(x, off, half, 2.0, 1.0, 2.0), 6.0, 1e-15);
  EXPECT_THROW(weighted_distortion(x, std::vector<double>{1.0}, ones, 1, 1, 2), DomainError);
}

TEST(Distortion, GradientWeight) {
  EXPECT_EQ(distortion_gradient_weight(0.5, 1.0).value, 1.0);
  EXPECT_NEAR(distortion_gradient_weight(0.5, 2.0).value, 1.0, 1e-15);
  EXPECT_NEAR(distortion_gradient_weight(2.0, 3.0).value, 12.0, 1e-13);
  EXPECT_EQ(distortion_gradient_weight(0.0, 1.0).value, 1.0);
  const auto w = distortion_gradient_weight(0.0, 0.5);
  EXPECT_EQ(w.value, 0.0);
  EXPECT_TRUE(w.at_singularity);
  EXPECT_FALSE(distortion_gradient_weight(0.0, 2.0).at_singularity);
}

TEST(Rdo, Examples) {
  const std::vector<double> x{0, 1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> xh{0, 1.5, 2, 2, 4, 5, 8, 7};
  const std::vector<std::uint8_t> mask{1, 1, 1, 1, 0, 0, 0, 0};
  // ROI errors 0, .5, 0, 1 weighted 3; background errors 0, 0, 2, 0 weighted 1.
  const double d = 3.0 * (0.25 + 1.0) + 4.0;
  EXPECT_NEAR(rdo_objective(x, xh, mask, 3.0, 1.0, 2.0, 100.0, 0.0), d, 1e-14);
  EXPECT_NEAR(rdo_objective(x, xh, mask, 3.0, 1.0, 2.0, 100.0, 0.01), d + 1.0, 1e-14);
  EXPECT_NEAR(rdo_objective(x, x, mask, 3.0, 1.0, 2.0, 100.0, 0.25), 25.0, 1e-14);
  EXPECT_THROW(rdo_objective(x, x, mask, 3.0, 1.0, 2.0, 1.0, -1.0), DomainError);
}

TEST(Mismatch, SmallAtUnitScale) {
  MismatchConfig c;
  c.n_samples = 20000;
  const auto r = mismatch_delta_r({0.0, 1.0, 2.0}, c);
  EXPECT_LT(std::fabs(r.delta_r), 0.05);
  EXPECT_NEAR(r.delta_r, r.r_train - r.r_test, 1e-15);
}

TEST(Mismatch, ShardIndependent) {
  MismatchConfig c;
  c.n_samples = 12345;
  const auto a = mismatch_delta_r({0.0, 0.3, 1.5}, c);
  c.workers = 4;
  const auto b = mismatch_delta_r({0.0, 0.3, 1.5}, c);
  EXPECT_EQ(a.r_train, b.r_train);
  EXPECT_EQ(a.r_test, b.r_test);
  c.n_samples = 100;
  EXPECT_THROW(mismatch_delta_r({0.0, 0.3, 1.5}, c), DomainError);
}

TEST(Mismatch, DynamicBoundCapsDeltaR) {
  MismatchConfig c;
  c.n_samples = 10000;
  const double beta = 2.0, zeta = 0.1;
  const double cap = mismatch_delta_r({0.0, zeta * beta, beta}, c).delta_r;
  for (double a : {0.01, 0.05, 0.15}) {
    const double eff = effective_alpha(a, beta, BoundMode::dynamic, zeta);
    EXPECT_EQ(eff, zeta * beta);
    EXPECT_EQ(mismatch_delta_r({0.0, eff, beta}, c).delta_r, cap);
  }
}

TEST(Mismatch, BoundModes) {
  EXPECT_EQ(effective_alpha(0.05, 2.0, BoundMode::none, 0.1), 0.05);
  EXPECT_EQ(effective_alpha(0.05, 2.0, BoundMode::fixed, 0.1), 0.11);
  EXPECT_NEAR(effective_alpha(0.05, 2.0, BoundMode::dynamic, 0.1), 0.2, 1e-15);
  EXPECT_EQ(bound_mode_from_string("fixed"), BoundMode::fixed);
  EXPECT_THROW(bound_mode_from_string("loose"), DomainError);
}

TEST(BdRate, AnalyticCases) {
  const std::vector<RateCurvePoint> a{{0.1, 30.0}, {0.2, 33.0}, {0.4, 35.5}, {0.8, 38.0}, {1.6, 40.0}};
  auto scaled = [&](double f) {
    auto b = a;
    for (auto& p : b) p.rate *= f;
    return b;
  };
  EXPECT_NEAR(bd_rate(a, a), 0.0, 1e-10);
  EXPECT_NEAR(bd_rate(a, scaled(0.9)), -10.0, 1e-9);
  EXPECT_NEAR(bd_rate(a, scaled(1.25)), 25.0, 1e-9);
  const double ab = bd_rate(a, scaled(1.25)) / 100.0;
  const double ba = bd_rate(scaled(1.25), a) / 100.0;
  EXPECT_NEAR(ab, -ba / (1.0 + ba), 1e-9);
}

TEST(BdRate, Errors) {
  const std::vector<RateCurvePoint> a{{0.1, 30.0}, {0.2, 33.0}, {0.4, 35.5}, {0.8, 38.0}};
  const std::vector<RateCurvePoint> far{{0.1, 50.0}, {0.2, 53.0}, {0.4, 55.5}, {0.8, 58.0}};
  EXPECT_THROW(bd_rate(a, far), DomainError);
  const std::vector<RateCurvePoint> three(a.begin(), a.begin() + 3);
  EXPECT_THROW(bd_rate(a, three), DomainError);
  const std::vector<RateCurvePoint> unsorted{{0.2, 30.0}, {0.1, 33.0}, {0.4, 35.5}, {0.8, 38.0}};
  EXPECT_THROW(bd_rate(a, unsorted), DomainError);
}
