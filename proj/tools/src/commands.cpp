#include "ggm_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ggm/bench.hpp"
#include "ggm/codec.hpp"
#include "ggm/error.hpp"
#include "ggm/fit.hpp"
#include "ggm/grad.hpp"
#include "ggm/latent_io.hpp"
#include "ggm/specfun.hpp"
#include "ggm_cli/output.hpp"

namespace ggm::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::format: return "format";
    case ErrorKind::corrupt_stream: return "corrupt_stream";
  }
  return "unknown";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::domain: return kFlagError;
    case ErrorKind::convergence: return kNonConvergence;
    case ErrorKind::format: return kFormatError;
    case ErrorKind::corrupt_stream: return kCorruptStream;
  }
  return kFlagError;
}

void report(std::ostream& err, int code, const std::string& kind, std::string msg) {
  for (auto& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  err << "error code=" << code << " kind=" << kind << " message=" << msg << '\n';
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(x)) {
      throw DomainError(flag + ": '" + item + "' is not a number");
    }
    v.push_back(x);
  }
  if (v.empty()) throw DomainError(flag + ": empty list");
  return v;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(item);
  return v;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

std::size_t components(const EntropyModel& m) {
  return m.family() == Family::gmm ? m.as<GmmParams>().components.size() : 1;
}

// Every option of the subcommand with its effective value, in declaration
// order, so a manifest alone is enough to repeat the run.
nlohmann::ordered_json flag_map(const CLI::App& sub) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty() || opt->get_name() == "--help") continue;
    const std::string name = "--" + opt->get_lnames().front();
    if (opt->get_expected_max() == 0) {
      j[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      j[name] = opt->as<std::string>();
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

struct Common {
  std::uint64_t seed = 0;
  bool timing = false;
};

class Timer {
 public:
  explicit Timer(bool enabled) : enabled_(enabled), start_(Clock::now()) {}
  // Reported only on request so that default outputs stay byte-identical.
  double ms() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }

 private:
  bool enabled_;
  Clock::time_point start_;
};

fit::FitConfig fit_config(std::uint64_t seed, const std::string& objective,
                          const std::string& mu_mode, int max_steps) {
  fit::FitConfig cfg;
  cfg.seed = seed;
  cfg.objective = fit::objective_from_string(objective);
  cfg.mu_mode = fit::mu_mode_from_string(mu_mode);
  cfg.max_steps = max_steps;
  cfg.validate();
  return cfg;
}

// ---- synth ------------------------------------------------------------------

struct SynthOpts {
  std::string out;
  std::size_t n = 100000;
  double roi_fraction = 0.3;
  double roi_alpha = 2.0, roi_beta = 1.0, bg_alpha = 0.15, bg_beta = 2.0;
};

void add_synth(CLI::App& app, SynthOpts& o, Common& c) {
  app.add_option("--out", o.out, "latent file to write")->required();
  app.add_option("--n", o.n, "number of latent elements");
  app.add_option("--roi-fraction", o.roi_fraction, "fraction of ROI elements in [0, 1]");
  app.add_option("--roi-alpha", o.roi_alpha, "ROI scale");
  app.add_option("--roi-beta", o.roi_beta, "ROI shape");
  app.add_option("--bg-alpha", o.bg_alpha, "background scale");
  app.add_option("--bg-beta", o.bg_beta, "background shape");
  app.add_option("--seed", c.seed, "random seed");
  app.add_flag("--timing", c.timing, "record wall time in the manifest");
}

int cmd_synth(const SynthOpts& o, const Common& c, Manifest& m, std::ostream& out) {
  Timer timer(c.timing);
  bench::RoiLatentConfig cfg;
  cfg.n = o.n;
  cfg.roi_fraction = o.roi_fraction;
  cfg.roi_params = {0.0, o.roi_alpha, o.roi_beta};
  cfg.bg_params = {0.0, o.bg_alpha, o.bg_beta};
  cfg.seed = c.seed;
  const auto set = bench::synth_roi_latents(cfg);
  write_latents(o.out, set);
  m.outputs = {o.out};
  m.wall_ms = timer.ms();
  m.write(o.out);
  out << "wrote " << set.values.size() << " latents to " << o.out << '\n';
  return kOk;
}

// ---- fit ----------------------------------------------------------------------

struct FitOpts {
  std::string in, out, family = "ggm", objective = "continuous", mu_mode = "median";
  std::size_t bins = 201;
  int max_steps = 2000;
};

void add_fit(CLI::App& app, FitOpts& o, Common& c) {
  app.add_option("--in", o.in, "latent file")->required();
  app.add_option("--out", o.out, "fitted parameter JSON; a CSV row goes next to it")->required();
  app.add_option("--family", o.family, "ggm, gaussian, laplace, logistic or gmm");
  app.add_option("--objective", o.objective, "continuous or discrete");
  app.add_option("--mu-mode", o.mu_mode, "median, mean or gradient");
  app.add_option("--bins", o.bins, "histogram bins for the KL score");
  app.add_option("--max-steps", o.max_steps, "descent step cap");
  app.add_option("--seed", c.seed, "random seed");
  app.add_flag("--timing", c.timing, "record wall time");
}

int cmd_fit(const FitOpts& o, const Common& c, Manifest& m, std::ostream& out) {
  Timer timer(c.timing);
  // Flags are checked before any file is touched.
  const auto family = family_from_string(o.family);
  const auto cfg = fit_config(c.seed, o.objective, o.mu_mode, o.max_steps);
  const auto set = read_latents(o.in);
  const auto r = fit::fit_mle(set.values, family, cfg);
  const double kl = fit::kl_divergence(fit::make_histogram(set.values, o.bins), r.model);
  const double wall = timer.ms();

  nlohmann::ordered_json j;
  j["model"] = nlohmann::json(r.model);
  j["nll_bits"] = r.nll_bits;
  j["kl_bits"] = kl;
  j["objective"] = o.objective;
  j["steps"] = r.steps;
  j["converged"] = r.converged;
  j["start"] = r.start;
  j["n"] = set.values.size();
  write_text(o.out, j.dump(2) + "\n");

  CsvWriter csv({"family", "k", "params", "nll_bits", "kl_bits", "wall_ms"});
  csv.row({o.family, std::to_string(components(r.model)),
           csv_quote(nlohmann::json(r.model).dump()), fmt(r.nll_bits), fmt(kl), fmt(wall)});
  const auto csv_path = fs::path(o.out).replace_extension(".csv");
  write_text(csv_path, csv.str());

  m.inputs = {o.in};
  m.outputs = {o.out, csv_path.string()};
  m.wall_ms = wall;
  m.write(o.out);
  out << o.family << " nll_bits=" << fmt(r.nll_bits) << " kl_bits=" << fmt(kl)
      << (r.converged ? "" : " (not converged)") << '\n';
  return kOk;
}

// ---- compare --------------------------------------------------------------------

struct CompareOpts {
  std::string in, out, families = "ggm,gaussian,laplace,logistic,gmm";
  std::string objective = "continuous";
  std::size_t bins = 201;
};

void add_compare(CLI::App& app, CompareOpts& o, Common& c) {
  app.add_option("--in", o.in, "latent file")->required();
  app.add_option("--out", o.out, "comparison CSV")->required();
  app.add_option("--family", o.families, "comma-separated families");
  app.add_option("--objective", o.objective, "continuous or discrete fitting");
  app.add_option("--bins", o.bins, "histogram bins for the KL score");
  app.add_option("--seed", c.seed, "random seed");
  app.add_flag("--timing", c.timing, "record wall time per family");
}

int cmd_compare(const CompareOpts& o, const Common& c, Manifest& m, std::ostream& out) {
  Timer total(c.timing);
  std::vector<Family> families;
  for (const auto& name : split_names(o.families)) families.push_back(family_from_string(name));
  const auto cfg = fit_config(c.seed, o.objective, "median", 2000);
  const auto set = read_latents(o.in);
  const auto hist = fit::make_histogram(set.values, o.bins);
  const double n = static_cast<double>(set.values.size());

  CsvWriter csv({"family", "k", "nll_bits", "kl_bits", "coded_bits_per_sample",
                 "ideal_bits_per_sample", "wall_ms", "params"});
  for (const auto family : families) {
    Timer timer(c.timing);
    const std::string name = to_string(family);
    const auto r = fit::fit_mle(set.values, family, cfg);
    const double kl = fit::kl_divergence(hist, r.model);
    std::vector<std::int64_t> symbols;
    symbols.reserve(set.values.size());
    const double offset = r.model.quantization_offset();
    for (double y : set.values) symbols.push_back(quantize_zero_center(y, offset).symbol);
    const auto bs = codec::encode_with_model(symbols, r.model);
    const auto rate = codec::rate_report(symbols, r.model, bs);
    csv.row({name, std::to_string(components(r.model)), fmt(r.nll_bits), fmt(kl),
             fmt(rate.measured_bits / n), fmt(rate.ideal_bits / n), fmt(timer.ms()),
             csv_quote(nlohmann::json(r.model).dump())});
    out << name << " kl_bits=" << fmt(kl) << " coded_bits_per_sample="
        << fmt(rate.measured_bits / n) << '\n';
  }
  write_text(o.out, csv.str());
  m.inputs = {o.in};
  m.outputs = {o.out};
  m.wall_ms = total.ms();
  m.write(o.out);
  return kOk;
}

// ---- encode / decode ----------------------------------------------------------------

struct EncodeOpts {
  std::string in, out, family = "ggm", objective = "continuous", symbols_out;
  std::optional<double> alpha, beta;
  double mu = 0.0;
};

void add_encode(CLI::App& app, EncodeOpts& o, Common& c) {
  app.add_option("--in", o.in, "latent file")->required();
  app.add_option("--out", o.out, "bitstream to write")->required();
  app.add_option("--family", o.family, "entropy model family (fitted unless given)");
  app.add_option("--objective", o.objective, "fitting objective");
  app.add_option("--alpha", o.alpha, "use this GGM scale instead of fitting");
  app.add_option("--beta", o.beta, "use this GGM shape instead of fitting");
  app.add_option("--mu", o.mu, "GGM mean when --alpha/--beta are given");
  app.add_option("--symbols-out", o.symbols_out, "also write the coded symbols as CSV");
  app.add_option("--seed", c.seed, "random seed for fitting");
  app.add_flag("--timing", c.timing, "record wall time");
}

std::string symbols_csv(std::span<const std::int64_t> s, double offset) {
  CsvWriter csv({"symbol", "reconstructed"});
  for (auto v : s) csv.row({std::to_string(v), fmt(static_cast<double>(v) + offset)});
  return csv.str();
}

int cmd_encode(const EncodeOpts& o, const Common& c, Manifest& m, std::ostream& out) {
  Timer timer(c.timing);
  const auto family = family_from_string(o.family);
  const auto set = read_latents(o.in);
  EntropyModel model;
  if (o.alpha || o.beta) {
    if (!(o.alpha && o.beta)) throw DomainError("--alpha and --beta must be given together");
    if (family != Family::ggm) throw DomainError("--alpha/--beta describe a ggm model");
    model = EntropyModel(GgmParams{o.mu, *o.alpha, *o.beta});
  } else {
    const auto cfg = fit_config(c.seed, o.objective, "median", 2000);
    model = fit::fit_mle(set.values, family, cfg).model;
  }
  const double offset = model.quantization_offset();
  std::vector<std::int64_t> symbols;
  symbols.reserve(set.values.size());
  for (double y : set.values) symbols.push_back(quantize_zero_center(y, offset).symbol);
  const auto bs = codec::encode_with_model(symbols, model);
  write_bytes(o.out, bs.serialize());
  m.inputs = {o.in};
  m.outputs = {o.out};
  if (!o.symbols_out.empty()) {
    write_text(o.symbols_out, symbols_csv(symbols, offset));
    m.outputs.push_back(o.symbols_out);
  }
  m.wall_ms = timer.ms();
  m.write(o.out);
  out << "encoded " << symbols.size() << " symbols in " << bs.payload_bits()
      << " payload bits (" << fmt(static_cast<double>(bs.payload_bits()) /
                                  std::max<double>(1.0, static_cast<double>(symbols.size())))
      << " bits/symbol)\n";
  return kOk;
}

struct DecodeOpts {
  std::string in, out;
};

void add_decode(CLI::App& app, DecodeOpts& o, Common& c) {
  app.add_option("--in", o.in, "bitstream")->required();
  app.add_option("--out", o.out, "symbol CSV to write")->required();
  app.add_option("--seed", c.seed, "unused; accepted for uniformity");
  app.add_flag("--timing", c.timing, "record wall time");
}

int cmd_decode(const DecodeOpts& o, const Common& c, Manifest& m, std::ostream& out) {
  Timer timer(c.timing);
  const auto bs = codec::Bitstream::parse(read_bytes(o.in));
  const auto symbols = codec::decode_with_model(bs);
  if (symbols.size() != bs.count) throw CorruptStreamError("decoded count mismatch");
  const auto model = nlohmann::json::parse(bs.params_json).get<EntropyModel>();
  write_text(o.out, symbols_csv(symbols, model.quantization_offset()));
  m.inputs = {o.in};
  m.outputs = {o.out};
  m.wall_ms = timer.ms();
  m.write(o.out);
  out << "decoded " << symbols.size() << " symbols\n";
  return kOk;
}

// ---- mismatch ---------------------------------------------------------------------------

struct MismatchOpts {
  std::string out, grid = "0.01,0.03,0.05,0.08,0.11,0.2,0.3,0.5,1.0", bound = "none";
  double beta = 2.0, mu = 0.0, zeta = 0.1;
  std::size_t n = 100000, noise = 16;
  unsigned workers = 1;
};

void add_mismatch(CLI::App& app, MismatchOpts& o, Common& c) {
  app.add_option("--out", o.out, "sweep CSV")->required();
  app.add_option("--grid", o.grid, "comma-separated raw alpha values");
  app.add_option("--beta", o.beta, "shape");
  app.add_option("--mu", o.mu, "mean");
  app.add_option("--zeta", o.zeta, "slope of the dynamic bound");
  app.add_option("--bound", o.bound, "none, fixed (0.11) or dynamic");
  app.add_option("--n", o.n, "samples per grid point (>= 10000)");
  app.add_option("--noise", o.noise, "uniform-noise draws per sample");
  app.add_option("--workers", o.workers, "threads; results do not depend on it");
  app.add_option("--seed", c.seed, "random seed");
  app.add_flag("--timing", c.timing, "record wall time");
}

int cmd_mismatch(const MismatchOpts& o, const Common& c, Manifest& m, std::ostream& out) {
  Timer timer(c.timing);
  const auto grid = parse_list(o.grid, "--grid");
  const auto mode = bench::bound_mode_from_string(o.bound);
  if (!(o.zeta >= 0.0)) throw DomainError("--zeta must be >= 0");
  bench::MismatchConfig cfg;
  cfg.n_samples = o.n;
  cfg.n_noise = o.noise;
  cfg.seed = c.seed;
  cfg.workers = o.workers;

  CsvWriter csv({"alpha", "beta", "r_train", "r_test", "delta_r", "n_samples", "seed",
                 "alpha_raw", "bound"});
  for (const double raw : grid) {
    if (!(raw > 0.0)) throw DomainError("--grid values must be positive");
    const double alpha = bench::effective_alpha(raw, o.beta, mode, o.zeta);
    const auto r = bench::mismatch_delta_r({o.mu, alpha, o.beta}, cfg);
    csv.row({fmt(alpha), fmt(o.beta), fmt(r.r_train), fmt(r.r_test), fmt(r.delta_r),
             std::to_string(o.n), std::to_string(c.seed), fmt(raw), bench::to_string(mode)});
    out << "alpha=" << fmt(alpha) << " delta_r=" << fmt(r.delta_r) << '\n';
  }
  write_text(o.out, csv.str());
  m.outputs = {o.out};
  m.wall_ms = timer.ms();
  m.write(o.out);
  return kOk;
}

// ---- gradcheck -----------------------------------------------------------------------------

struct GradcheckOpts {
  std::string out, eps = "1e-3,1e-5,1e-7", reference = "central_difference,quadrature";
  std::string order_out;
  std::size_t n = 200;
};

void add_gradcheck(CLI::App& app, GradcheckOpts& o, Common& c) {
  app.add_option("--out", o.out, "per-gradient error CSV")->required();
  app.add_option("--n", o.n, "number of random tuples");
  app.add_option("--eps-fd", o.eps, "comma-separated finite-difference steps");
  app.add_option("--reference", o.reference, "central_difference and/or quadrature");
  app.add_option("--order-out", o.order_out, "also write the halving-step order check");
  app.add_option("--seed", c.seed, "tuple seed");
  app.add_flag("--timing", c.timing, "record wall time");
}

grad::GradReference reference_from_string(const std::string& s) {
  if (s == "central_difference") return grad::GradReference::central_difference;
  if (s == "quadrature") return grad::GradReference::quadrature;
  throw DomainError("unknown reference '" + s + "'");
}

int cmd_gradcheck(const GradcheckOpts& o, const Common& c, Manifest& m, std::ostream& out) {
  Timer timer(c.timing);
  const auto steps = parse_list(o.eps, "--eps-fd");
  std::vector<grad::GradReference> refs;
  for (const auto& r : split_names(o.reference)) refs.push_back(reference_from_string(r));
  const auto tuples = grad::random_tuples(o.n, c.seed);

  CsvWriter csv({"epsilon_fd", "reference", "gradient", "max_rel_err", "max_abs_err_small",
                 "failures", "n"});
  for (const auto ref : refs) {
    for (const double eps : steps) {
      grad::FdConfig fd;
      fd.epsilon_fd = eps;
      const auto rep = grad::gradient_check(tuples, fd, ref);
      for (const auto& row : rep.rows) {
        csv.row({fmt(eps), grad::to_string(ref), row.gradient, fmt(row.max_rel_err),
                 fmt(row.max_abs_err_small), std::to_string(row.failures),
                 std::to_string(row.n)});
      }
      out << grad::to_string(ref) << " eps=" << fmt(eps)
          << " d_beta max_rel_err=" << fmt(rep.row("d_beta").max_rel_err) << '\n';
    }
  }
  write_text(o.out, csv.str());
  m.outputs = {o.out};

  if (!o.order_out.empty()) {
    CsvWriter order({"a", "b", "epsilon_fd", "err", "err_half", "ratio"});
    for (int i = 0; i < 20; ++i) {
      const double a = 0.25 * std::pow(40.0, (i % 5) / 4.0);
      const double b = 0.05 * std::pow(200.0, (i / 5) / 3.0);
      const double ref = grad::dgamma_da_quadrature(a, b);
      for (const double eps : {1e-3, 1e-4}) {
        grad::FdConfig f1, f2;
        f1.epsilon_fd = eps;
        f2.epsilon_fd = eps / 2;
        const double e1 = std::fabs(grad::dgamma_da_fd(a, b, f1) - ref);
        const double e2 = std::fabs(grad::dgamma_da_fd(a, b, f2) - ref);
        order.row({fmt(a), fmt(b), fmt(eps), fmt(e1), fmt(e2), fmt(e1 / e2)});
      }
    }
    write_text(o.order_out, order.str());
    m.outputs.push_back(o.order_out);
  }
  m.wall_ms = timer.ms();
  m.write(o.out);
  return kOk;
}

// ---- pdfplot ---------------------------------------------------------------------------------

struct PdfplotOpts {
  std::string out, alpha = "1", beta = "0.5,1,2,4", grid = "-4:4:401";
  double mu = 0.0;
};

void add_pdfplot(CLI::App& app, PdfplotOpts& o, Common& c) {
  app.add_option("--out", o.out, "CSV of y, pdf, cdf")->required();
  app.add_option("--alpha", o.alpha, "comma-separated scales");
  app.add_option("--beta", o.beta, "comma-separated shapes");
  app.add_option("--mu", o.mu, "mean");
  app.add_option("--grid", o.grid, "lo:hi:count for y");
  app.add_option("--seed", c.seed, "unused; accepted for uniformity");
  app.add_flag("--timing", c.timing, "record wall time");
}

int cmd_pdfplot(const PdfplotOpts& o, const Common& c, Manifest& m, std::ostream& out) {
  Timer timer(c.timing);
  const auto alphas = parse_list(o.alpha, "--alpha");
  const auto betas = parse_list(o.beta, "--beta");
  std::string g = o.grid;
  for (auto& ch : g) {
    if (ch == ':') ch = ',';
  }
  const auto parts = parse_list(g, "--grid");
  if (parts.size() != 3 || !(parts[1] > parts[0]) || parts[2] < 2 ||
      parts[2] != std::floor(parts[2]) || parts[2] > 1e7) {
    throw DomainError("--grid must be lo:hi:count with hi > lo and 2 <= count <= 1e7");
  }
  const auto count = static_cast<std::size_t>(parts[2]);
  CsvWriter csv({"alpha", "beta", "mu", "y", "pdf", "cdf"});
  for (const double a : alphas) {
    for (const double b : betas) {
      const GgmParams p{o.mu, a, b};
      p.validate();
      for (std::size_t i = 0; i < count; ++i) {
        const double y = parts[0] + (parts[1] - parts[0]) * static_cast<double>(i) /
                                        static_cast<double>(count - 1);
        csv.row({fmt(a), fmt(b), fmt(o.mu), fmt(y), fmt(pdf(y, p)), fmt(cdf(y, p))});
      }
    }
  }
  write_text(o.out, csv.str());
  m.outputs = {o.out};
  m.wall_ms = timer.ms();
  m.write(o.out);
  out << "wrote " << alphas.size() * betas.size() * count << " rows\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Gaussian entropy-model toolkit", "ggmtool"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Common common;
  SynthOpts synth;
  FitOpts fit;
  CompareOpts compare;
  EncodeOpts encode;
  DecodeOpts decode;
  MismatchOpts mismatch;
  GradcheckOpts gradcheck;
  PdfplotOpts pdfplot;

  std::map<CLI::App*, std::function<int(Manifest&)>> handlers;
  auto sub = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };

  auto* s = sub("synth", "generate synthetic ROI latents");
  add_synth(*s, synth, common);
  handlers[s] = [&](Manifest& m) { return cmd_synth(synth, common, m, out); };
  s = sub("fit", "fit one entropy model to a latent file");
  add_fit(*s, fit, common);
  handlers[s] = [&](Manifest& m) { return cmd_fit(fit, common, m, out); };
  s = sub("compare", "fit and code a latent file under several families");
  add_compare(*s, compare, common);
  handlers[s] = [&](Manifest& m) { return cmd_compare(compare, common, m, out); };
  s = sub("encode", "quantize and range-code a latent file");
  add_encode(*s, encode, common);
  handlers[s] = [&](Manifest& m) { return cmd_encode(encode, common, m, out); };
  s = sub("decode", "decode a bitstream to symbols");
  add_decode(*s, decode, common);
  handlers[s] = [&](Manifest& m) { return cmd_decode(decode, common, m, out); };
  s = sub("mismatch", "train/test rate mismatch sweep over alpha");
  add_mismatch(*s, mismatch, common);
  handlers[s] = [&](Manifest& m) { return cmd_mismatch(mismatch, common, m, out); };
  s = sub("gradcheck", "gradient accuracy versus finite-difference step");
  add_gradcheck(*s, gradcheck, common);
  handlers[s] = [&](Manifest& m) { return cmd_gradcheck(gradcheck, common, m, out); };
  s = sub("pdfplot", "tabulate pdf and cdf over a grid");
  add_pdfplot(*s, pdfplot, common);
  handlers[s] = [&](Manifest& m) { return cmd_pdfplot(pdfplot, common, m, out); };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    report(err, kFlagError, "flag", e.what());
    return kFlagError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Manifest manifest;
  manifest.command = chosen->get_name();
  manifest.flags = flag_map(*chosen);
  try {
    manifest.seed = common.seed;
    return handlers.at(chosen)(manifest);
  } catch (const Error& e) {
    report(err, exit_code(e.kind()), kind_name(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    report(err, kFormatError, "format", e.what());
    return kFormatError;
  } catch (const std::exception& e) {
    report(err, kFlagError, "domain", e.what());
    return kFlagError;
  }
}

}  // namespace ggm::cli
