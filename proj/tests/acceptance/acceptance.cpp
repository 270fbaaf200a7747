// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ggm/bench.hpp"
#include "ggm/codec.hpp"
#include "ggm/fit.hpp"
#include "ggm/ggm.hpp"
#include "ggm/grad.hpp"
#include "ggm/models.hpp"
#include "ggm/rng.hpp"
#include "ggm/specfun.hpp"
#include "quadrature.hpp"

#ifdef GGM_HAVE_CLI
#include "ggm_cli/commands.hpp"
#endif

using namespace ggm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

Outcome special_functions() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = 0.25 * std::pow(40.0, i / 19.0);
    for (int j = 0; j < 20; ++j) {
      const double b = 1e-4 * std::pow(4e5, j / 19.0);
      worst = std::max(worst, std::fabs(specfun::reg_lower_incomplete_gamma(a, b) -
                                        oracle::reg_lower_gamma(a, b)));
    }
  }
  const double e1 = std::fabs(specfun::reg_lower_incomplete_gamma(1.0, 1.0) - (1.0 - std::exp(-1.0)));
  const double e2 = std::fabs(specfun::reg_lower_incomplete_gamma(0.5, 1.0) - std::erf(1.0));
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && e1 <= 1e-12 && e2 <= 1e-12 && secs < 5.0,
          "grid max |err|=" + num(worst) + " P(1,1) err=" + num(e1) + " P(0.5,1) err=" +
              num(e2) + " time=" + num(secs) + "s"};
}

Outcome family_embedding() {
  double worst = 0.0;
  for (double alpha : {0.11, 0.5, 1.0, 3.0}) {
    const EntropyModel gauss(GaussianParams{0.0, alpha / std::sqrt(2.0)});
    const EntropyModel lap(LaplaceParams{0.0, alpha});
    for (int k = -20; k <= 20; ++k) {
      worst = std::max(worst, std::fabs(bin_mass(k, {0.0, alpha, 2.0}) - model_bin_mass(k, gauss)));
      worst = std::max(worst, std::fabs(bin_mass(k, {0.0, alpha, 1.0}) - model_bin_mass(k, lap)));
    }
  }
  return {worst <= 1e-9, "max |mass diff|=" + num(worst)};
}

Outcome gradient_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tuples = grad::random_tuples(200, 0);
  const auto rep = grad::gradient_check(tuples, {}, grad::GradReference::central_difference);
  std::string detail;
  bool ok = true;
  for (const auto& r : rep.rows) {
    ok = ok && r.max_rel_err <= 1e-3 && r.failures == 0;
    detail += r.gradient + "=" + num(r.max_rel_err) + " ";
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 30.0, "max rel err " + detail + "time=" + num(secs) + "s"};
}

Outcome order_of_accuracy() {
  double lo_oracle = 1e300, hi_oracle = 0.0, lo_boost = 1e300, hi_boost = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = 0.25 * std::pow(40.0, (i % 5) / 4.0);
    const double b = 0.05 * std::pow(200.0, (i / 5) / 3.0);
    grad::FdConfig f1, f2;
    f1.epsilon_fd = 1e-3;
    f2.epsilon_fd = 5e-4;
    const double d1 = grad::dgamma_da_fd(a, b, f1);
    const double d2 = grad::dgamma_da_fd(a, b, f2);
    const double r_oracle = std::fabs(d1 - oracle::dlower_gamma_da(a, b)) /
                            std::fabs(d2 - oracle::dlower_gamma_da(a, b));
    const double ref = grad::dgamma_da_quadrature(a, b);
    const double r_boost = std::fabs(d1 - ref) / std::fabs(d2 - ref);
    lo_oracle = std::min(lo_oracle, r_oracle);
    hi_oracle = std::max(hi_oracle, r_oracle);
    lo_boost = std::min(lo_boost, r_boost);
    hi_boost = std::max(hi_boost, r_boost);
  }
  return {lo_oracle >= 3.0 && hi_oracle <= 5.0,
          "error ratio in [" + num(lo_oracle) + ", " + num(hi_oracle) +
              "] vs test oracle, [" + num(lo_boost) + ", " + num(hi_boost) +
              "] vs library quadrature"};
}

// Only the shape gradient depends on the step; the other three are analytic.
double suite_beta_rel(std::span<const grad::GradCheckTuple> tuples, double eps,
                      grad::GradReference ref) {
  grad::FdConfig fd;
  fd.epsilon_fd = eps;
  return grad::gradient_check(tuples, fd, ref).row("d_beta").max_rel_err;
}

Outcome epsilon_ablation() {
  const auto tuples = grad::random_tuples(200, 0);
  bool ok = true;
  std::string detail;
  for (const auto ref : {grad::GradReference::central_difference, grad::GradReference::quadrature}) {
    const double e3 = suite_beta_rel(tuples, 1e-3, ref);
    const double e5 = suite_beta_rel(tuples, 1e-5, ref);
    const double e7 = suite_beta_rel(tuples, 1e-7, ref);
    // The verdict uses the suite's own reference; the quadrature one is reported alongside.
    if (ref == grad::GradReference::central_difference) ok = e5 < e3 && e5 < e7;
    detail += grad::to_string(ref) + " d_beta: eps=1e-3 " + num(e3) + ", 1e-5 " + num(e5) +
              ", 1e-7 " + num(e7) + "; ";
  }
  return {ok, detail};
}

EntropyModel random_model(Rng& rng) {
  const double u = uniform_open01(rng);
  const double mu = 4.0 * uniform_open01(rng) - 2.0;
  const double scale = std::exp(std::log(1e-3) + (std::log(20.0) - std::log(1e-3)) * uniform_open01(rng));
  switch (static_cast<int>(u * 5.0)) {
    case 0: return GgmParams{mu, scale, 0.1 + 3.9 * uniform_open01(rng)};
    case 1: return GaussianParams{mu, scale};
    case 2: return LaplaceParams{mu, scale};
    case 3: return LogisticParams{mu, scale};
    default: {
      const double w = 0.1 + 0.8 * uniform_open01(rng);
      return GmmParams{{{w, mu, scale}, {1.0 - w, -mu, 2.0 * scale}}};
    }
  }
}

double draw_one(const EntropyModel& m, Rng& rng) {
  const double u = uniform_open01(rng);
  double lo = -1e4, hi = 1e4;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (model_cdf(mid, m) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<std::int64_t> quantize(std::span<const double> y, const EntropyModel& m) {
  std::vector<std::int64_t> s;
  s.reserve(y.size());
  for (double v : y) s.push_back(quantize_zero_center(v, m.quantization_offset()).symbol);
  return s;
}

Outcome lossless_coding() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto m = random_model(rng);
    std::vector<double> y(1 + uniform_index(rng, 64));
    for (auto& v : y) v = draw_one(m, rng);
    if (trial % 7 == 0) y[0] = m.quantization_offset() + 1e6 * (uniform_open01(rng) - 0.5);
    const auto s = quantize(y, m);
    const auto bs = codec::Bitstream::parse(codec::encode_with_model(s, m).serialize());
    if (codec::decode_with_model(bs) != s) ++mismatches;
  }
  double worst_excess = -1e300;
  bool rate_ok = true;
  for (const GgmParams p : {GgmParams{0.0, 1.3, 1.5}, GgmParams{0.0, 0.2, 0.5},
                            GgmParams{0.3, 4.0, 3.0}}) {
    const EntropyModel m(p);
    const auto s = quantize(sample(p, 100000, 3), m);
    const auto r = codec::rate_report(s, m, codec::encode_with_model(s, m));
    rate_ok = rate_ok && r.measured_bits <= 1.005 * r.ideal_bits + 64.0;
    worst_excess = std::max(worst_excess, (r.measured_bits - r.ideal_bits) / r.ideal_bits);
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && rate_ok && secs < 60.0,
          "round-trip mismatches=" + std::to_string(mismatches) +
              "/10000 worst rate excess=" + num(100.0 * worst_excess) + "% time=" + num(secs) + "s"};
}

Outcome mismatch_sweep() {
  bench::MismatchConfig cfg;
  cfg.workers = worker_count();
  auto dr = [&](double alpha) { return bench::mismatch_delta_r({0.0, alpha, 2.0}, cfg).delta_r; };
  const double d03 = dr(0.03), d08 = dr(0.08), d3 = dr(0.3);
  const bool chain = d03 > d08 && d08 > 0.1 && 0.1 > d3 && d3 >= -0.05;

  const double zeta = 0.1, beta = 2.0;
  const double cap = dr(zeta * beta);
  bool capped = true;
  for (double raw : {0.01, 0.03, 0.05, 0.08, 0.11}) {
    const double a = bench::effective_alpha(raw, beta, bench::BoundMode::dynamic, zeta);
    capped = capped && dr(a) <= cap;
  }
  return {chain && capped, "dR(0.03)=" + num(d03) + " dR(0.08)=" + num(d08) + " dR(0.3)=" +
                               num(d3) + " chain=" + (chain ? "ok" : "broken") +
                               " dynamic cap dR(0.2)=" + num(cap) + (capped ? " holds" : " violated")};
}

struct Scores {
  double kl = 0.0;
  double coded = 0.0;
};

Scores score(const std::vector<double>& y, Family f, std::uint64_t seed) {
  fit::FitConfig cfg;
  cfg.seed = seed;
  const auto r = fit::fit_mle(y, f, cfg);
  const auto s = quantize(y, r.model);
  const auto rate = codec::rate_report(s, r.model, codec::encode_with_model(s, r.model));
  return {fit::kl_divergence(fit::make_histogram(y, 201), r.model),
          rate.measured_bits / static_cast<double>(y.size())};
}

Outcome fig1_direction() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {0, 1, 2}) {
    bench::RoiLatentConfig rc;
    rc.seed = seed;
    const auto set = bench::synth_roi_latents(rc);
    const auto g = score(set.values, Family::ggm, seed);
    const auto n = score(set.values, Family::gaussian, seed);
    const auto l = score(set.values, Family::laplace, seed);
    const auto lo = score(set.values, Family::logistic, seed);
    ok = ok && g.kl < n.kl && g.coded <= n.coded && g.coded <= l.coded && g.coded <= lo.coded;
    detail += "seed " + std::to_string(seed) + ": KL ggm " + num(g.kl) + " gauss " + num(n.kl) +
              ", bits ggm " + num(g.coded) + " gauss " + num(n.coded) + " lap " + num(l.coded) +
              " logi " + num(lo.coded) + "; ";
  }
  return {ok, detail};
}

Outcome nested_dominance() {
  std::vector<std::vector<double>> sets = {
      sample({0.0, 1.0, 2.0}, 20000, 6), sample({0.0, 1.0, 1.0}, 20000, 7),
      sample({0.5, 0.3, 0.6}, 20000, 8), sample({0.0, 2.0, 3.5}, 20000, 9)};
  for (std::uint64_t seed : {0, 1, 2}) {
    bench::RoiLatentConfig rc;
    rc.seed = seed;
    sets.push_back(bench::synth_roi_latents(rc).values);
  }
  double worst = -1e300;
  for (const auto& y : sets) {
    const double g = fit::fit_mle(y, Family::ggm).nll_bits;
    worst = std::max({worst, g - fit::fit_mle(y, Family::gaussian).nll_bits,
                      g - fit::fit_mle(y, Family::laplace).nll_bits});
  }
  return {worst <= 1e-9, std::to_string(sets.size()) +
                             " sets, max (GGM NLL - best nested NLL)=" + num(worst) + " bits"};
}

#ifdef GGM_HAVE_CLI
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ggm_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string lat = (dir / "lat.bin").string();
  std::ostringstream sink;

  // Each command runs twice with "@" replaced by a per-run prefix.
  const std::vector<std::vector<std::string>> cmds = {
      {"synth", "--out", "@lat.bin", "--n", "20000", "--seed", "3"},
      {"fit", "--in", lat, "--out", "@fit.json", "--seed", "3"},
      {"compare", "--in", lat, "--out", "@cmp.csv", "--seed", "3"},
      {"encode", "--in", lat, "--out", "@s.ggmc", "--symbols-out", "@sym.csv"},
      {"decode", "--in", (dir / "ref.ggmc").string(), "--out", "@dec.csv"},
      {"mismatch", "--out", "@mm.csv", "--n", "10000", "--seed", "3", "--workers", "3"},
      {"gradcheck", "--out", "@g.csv", "--n", "50", "--seed", "3", "--order-out", "@o.csv"},
      {"pdfplot", "--out", "@p.csv"},
  };
  if (cli::run({"synth", "--out", lat, "--n", "20000", "--seed", "3"}, sink, sink) != 0 ||
      cli::run({"encode", "--in", lat, "--out", (dir / "ref.ggmc").string()}, sink, sink) != 0) {
    return {false, "setup failed: " + sink.str()};
  }
  std::size_t files = 0;
  std::string diffs;
  for (const auto& cmd : cmds) {
    std::vector<std::string> produced[2];
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<std::string> args;
      for (const auto& a : cmd) {
        if (a.front() == '@') {
          args.push_back((dir / (std::to_string(rep) + "_" + a.substr(1))).string());
          produced[rep].push_back(args.back());
        } else {
          args.push_back(a);
        }
      }
      if (cli::run(args, sink, sink) != 0) return {false, cmd[0] + " failed: " + sink.str()};
    }
    for (std::size_t i = 0; i < produced[0].size(); ++i) {
      ++files;
      if (slurp(produced[0][i]) != slurp(produced[1][i])) diffs += cmd[0] + " ";
    }
  }
  fs::remove_all(dir);
  return {diffs.empty(), std::to_string(cmds.size()) + " commands, " + std::to_string(files) +
                             " outputs compared" + (diffs.empty() ? "" : ", differing: " + diffs)};
}
#else
Outcome cli_determinism() { return {false, "CLI not built"}; }
#endif

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"special-function accuracy", special_functions},
      {"family embedding", family_embedding},
      {"gradient fidelity", gradient_fidelity},
      {"finite-difference order of accuracy", order_of_accuracy},
      {"epsilon ablation direction", epsilon_ablation},
      {"lossless coding", lossless_coding},
      {"rate mismatch sweep", mismatch_sweep},
      {"heterogeneous-latent model comparison", fig1_direction},
      {"nested-family dominance", nested_dominance},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
