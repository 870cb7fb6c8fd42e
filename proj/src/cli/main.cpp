#include "pwband/pwband.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct Options {
  double eta = 30.0;
  double alpha = 0.1;
  double beta = 0.05;
  std::int64_t d = 0;
  double lambda = 0.1;
  std::int64_t m = 0;
  std::int64_t q = 0;
  std::uint64_t seed = 0;
  std::int64_t grid = 512;
  double delta0 = 0.0;
  std::string in;
  std::string out;
  std::string config;
  int threads = 0;
  bool clip_unit = false;
  std::string perturb = "d";
  std::string algorithm = "noise-free";
  std::int64_t trials = 500;
  std::int64_t n = 100;
  std::string noise = "none";
  double noise_scale = 0.4;
};

void add_shared_options(CLI::App* sub, Options& o) {
  sub->add_option("--eta", o.eta, "band limit in radians per unit input");
  sub->add_option("--alpha", o.alpha, "norm-bound risk");
  sub->add_option("--beta", o.beta, "observed-interval risk");
  sub->add_option("--d", o.d, "representation size (0: ceil(sqrt(n)))");
  sub->add_option("--lambda", o.lambda, "ridge weight");
  sub->add_option("--m", o.m, "sign perturbations (0: derive from beta)");
  sub->add_option("--q", o.q, "rank threshold (0: derive from beta)");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--grid", o.grid, "grid resolution on [0,1]");
  sub->add_option("--delta0", o.delta0, "tail-energy allowance");
  sub->add_option("--in", o.in, "input CSV with header x,y");
  sub->add_option("--out", o.out, "output path prefix");
  sub->add_option("--config", o.config, "JSON config file; flags override");
  sub->add_option("--threads", o.threads, "worker cap (0: all cores)");
  sub->add_flag("--clip-unit", o.clip_unit, "intersect intervals with [-1,1]");
}

int fail_status(pwb_status status) {
  std::fprintf(stderr, "error: %s\n", pwb_last_error());
  return status == PWB_IO_ERROR ? kExitIo : kExitValidation;
}

bool write_or_report(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (out) {
    out << content;
    out.flush();
  }
  if (!out) {
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    return false;
  }
  return true;
}

std::string now_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> make_grid(std::int64_t count) {
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(count - 1);
  }
  grid.back() = 1.0;
  return grid;
}

int noise_family_id(const std::string& name) {
  if (name == "none") return PWB_NOISE_NONE;
  if (name == "laplace") return PWB_NOISE_LAPLACE;
  if (name == "gaussian") return PWB_NOISE_GAUSSIAN;
  if (name == "uniform") return PWB_NOISE_UNIFORM;
  return -1;
}

// Config file fills in whatever the command line left untouched.
int apply_config(const CLI::App* sub, Options& o) {
  if (o.config.empty()) return kExitOk;
  std::ifstream in(o.config);
  if (!in) {
    std::fprintf(stderr, "error: cannot open config %s\n", o.config.c_str());
    return kExitIo;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: config %s: %s\n", o.config.c_str(), e.what());
    return kExitValidation;
  }
  auto unset = [sub](const char* flag) { return sub->count(flag) == 0; };
  try {
    if (j.contains("eta") && unset("--eta")) o.eta = j["eta"].get<double>();
    if (j.contains("alpha") && unset("--alpha")) o.alpha = j["alpha"].get<double>();
    if (j.contains("beta") && unset("--beta")) o.beta = j["beta"].get<double>();
    if (j.contains("d") && unset("--d")) o.d = j["d"].get<std::int64_t>();
    if (j.contains("lambda") && unset("--lambda")) o.lambda = j["lambda"].get<double>();
    if (j.contains("m") && unset("--m")) o.m = j["m"].get<std::int64_t>();
    if (j.contains("q") && unset("--q")) o.q = j["q"].get<std::int64_t>();
    if (j.contains("seed") && unset("--seed")) o.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("grid") && unset("--grid")) o.grid = j["grid"].get<std::int64_t>();
    if (j.contains("delta0") && unset("--delta0")) o.delta0 = j["delta0"].get<double>();
    if (j.contains("in") && unset("--in")) o.in = j["in"].get<std::string>();
    if (j.contains("out") && unset("--out")) o.out = j["out"].get<std::string>();
    if (j.contains("threads") && unset("--threads")) o.threads = j["threads"].get<int>();
    if (j.contains("clip_unit") && unset("--clip-unit")) {
      o.clip_unit = j["clip_unit"].get<bool>();
    }
    if (j.contains("perturb") && unset("--perturb")) o.perturb = j["perturb"].get<std::string>();
    if (j.contains("algorithm") && unset("--algorithm")) {
      o.algorithm = j["algorithm"].get<std::string>();
    }
    if (j.contains("trials") && unset("--trials")) o.trials = j["trials"].get<std::int64_t>();
    if (j.contains("n") && unset("--n")) o.n = j["n"].get<std::int64_t>();
    if (j.contains("noise") && unset("--noise")) o.noise = j["noise"].get<std::string>();
    if (j.contains("noise_scale") && unset("--noise-scale")) {
      o.noise_scale = j["noise_scale"].get<double>();
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: config %s: %s\n", o.config.c_str(), e.what());
    return kExitValidation;
  }
  return kExitOk;
}

struct DataBuffers {
  double* xs = nullptr;
  double* ys = nullptr;
  std::int64_t n = 0;

  ~DataBuffers() {
    pwb_free_buffer(xs);
    pwb_free_buffer(ys);
  }
};

int load_data(const Options& o, DataBuffers& data) {
  if (o.in.empty()) {
    std::fprintf(stderr, "error: --in is required (CSV with header x,y)\n");
    return kExitValidation;
  }
  const pwb_status status = pwb_read_xy_csv(o.in.c_str(), &data.xs, &data.ys, &data.n);
  if (status != PWB_OK) return fail_status(status);
  return kExitOk;
}

int check_grid(const Options& o) {
  if (o.grid < 2) {
    std::fprintf(stderr, "error: --grid must be at least 2\n");
    return kExitValidation;
  }
  return kExitOk;
}

int write_band(const pwb_band* band, const std::string& prefix) {
  char* csv = nullptr;
  pwb_status status = pwb_band_to_csv(band, &csv);
  if (status != PWB_OK) return fail_status(status);
  const bool csv_ok = write_or_report(prefix + ".csv", csv);
  pwb_free_string(csv);
  if (!csv_ok) return kExitIo;

  char* json = nullptr;
  status = pwb_band_to_json(band, now_utc().c_str(), &json);
  if (status != PWB_OK) return fail_status(status);
  const bool json_ok = write_or_report(prefix + ".json", json);
  pwb_free_string(json);
  return json_ok ? kExitOk : kExitIo;
}

int cmd_band_free(const CLI::App* sub, Options o) {
  if (int rc = apply_config(sub, o); rc != kExitOk) return rc;
  if (int rc = check_grid(o); rc != kExitOk) return rc;
  DataBuffers data;
  if (int rc = load_data(o, data); rc != kExitOk) return rc;
  const std::vector<double> grid = make_grid(o.grid);

  pwb_band* band = nullptr;
  const pwb_status status =
      pwb_band_free_compute(data.xs, data.ys, data.n, grid.data(),
                            static_cast<std::int64_t>(grid.size()), o.eta, o.alpha, o.delta0,
                            o.clip_unit ? 1 : 0, &band);
  if (status != PWB_OK) return fail_status(status);
  const std::string prefix = o.out.empty() ? "band" : o.out;
  const int rc = write_band(band, prefix);
  if (rc == kExitOk) {
    std::printf("band-free: n=%" PRId64 " grid=%" PRId64 " risk=%g bound=%.6g wrote %s.csv %s.json\n",
                data.n, o.grid, pwb_band_risk(band), pwb_band_bound_value(band), prefix.c_str(),
                prefix.c_str());
  }
  pwb_band_free(band);
  return rc;
}

int cmd_band_noisy(const CLI::App* sub, Options o) {
  if (int rc = apply_config(sub, o); rc != kExitOk) return rc;
  if (int rc = check_grid(o); rc != kExitOk) return rc;
  if (o.perturb != "d" && o.perturb != "all") {
    std::fprintf(stderr, "error: --perturb must be d or all\n");
    return kExitValidation;
  }
  DataBuffers data;
  if (int rc = load_data(o, data); rc != kExitOk) return rc;
  const std::vector<double> grid = make_grid(o.grid);

  pwb_noisy_options opts;
  pwb_noisy_options_init(&opts);
  opts.alpha = o.alpha;
  opts.beta = o.beta;
  opts.d = o.d;
  opts.lambda = o.lambda;
  opts.seed = o.seed;
  opts.m = o.m;
  opts.q = o.q;
  opts.delta0 = o.delta0;
  opts.clip_unit = o.clip_unit ? 1 : 0;
  opts.perturbed_rows = o.perturb == "all" ? data.n : -1;

  pwb_band* band = nullptr;
  const pwb_status status =
      pwb_band_noisy_compute(data.xs, data.ys, data.n, grid.data(),
                             static_cast<std::int64_t>(grid.size()), o.eta, &opts, &band);
  if (status != PWB_OK) return fail_status(status);
  const std::string prefix = o.out.empty() ? "band" : o.out;
  const int rc = write_band(band, prefix);
  if (rc == kExitOk) {
    std::printf("band-noisy: n=%" PRId64 " grid=%" PRId64 " risk=%g bound=%.6g wrote %s.csv %s.json\n",
                data.n, o.grid, pwb_band_risk(band), pwb_band_bound_value(band), prefix.c_str(),
                prefix.c_str());
  }
  pwb_band_free(band);
  return rc;
}

int cmd_coverage(const CLI::App* sub, Options o) {
  if (int rc = apply_config(sub, o); rc != kExitOk) return rc;
  if (o.algorithm != "noise-free" && o.algorithm != "noisy") {
    std::fprintf(stderr, "error: --algorithm must be noise-free or noisy\n");
    return kExitValidation;
  }
  const int family = noise_family_id(o.noise);
  if (family < 0) {
    std::fprintf(stderr, "error: --noise must be none, laplace, gaussian, or uniform\n");
    return kExitValidation;
  }
  if (o.perturb != "d" && o.perturb != "all") {
    std::fprintf(stderr, "error: --perturb must be d or all\n");
    return kExitValidation;
  }

  pwb_coverage_options opts;
  pwb_coverage_options_init(&opts);
  opts.algorithm = o.algorithm == "noisy" ? 1 : 0;
  opts.trials = o.trials;
  opts.n = o.n;
  opts.grid_resolution = o.grid;
  opts.eta = o.eta;
  opts.alpha = o.alpha;
  opts.beta = o.beta;
  opts.d = o.d;
  opts.lambda = o.lambda;
  opts.m = o.m;
  opts.q = o.q;
  opts.perturbed_rows = o.perturb == "all" ? o.n : -1;
  opts.noise_family = family;
  opts.noise_scale = o.noise_scale;
  opts.seed = o.seed;
  opts.threads = o.threads;
  opts.clip_unit = o.clip_unit ? 1 : 0;

  pwb_coverage_report* report = nullptr;
  const pwb_status status = pwb_coverage_run(&opts, &report);
  if (status != PWB_OK) return fail_status(status);

  char* json = nullptr;
  const pwb_status jstatus = pwb_coverage_to_json(report, now_utc().c_str(), &json);
  if (jstatus != PWB_OK) {
    pwb_coverage_free(report);
    return fail_status(jstatus);
  }
  const std::string path = (o.out.empty() ? "coverage" : o.out) + ".json";
  const bool ok = write_or_report(path, json);
  pwb_free_string(json);
  if (ok) {
    std::printf("coverage: trials=%" PRId64 " successes=%" PRId64 " errors=%" PRId64
                " reliability=%.4f guarantee=%.4f wrote %s\n",
                pwb_coverage_trials(report), pwb_coverage_successes(report),
                pwb_coverage_errors(report), pwb_coverage_reliability(report),
                pwb_coverage_guarantee(report), path.c_str());
  }
  pwb_coverage_free(report);
  return ok ? kExitOk : kExitIo;
}

int cmd_demo(const CLI::App* sub, Options o) {
  if (int rc = apply_config(sub, o); rc != kExitOk) return rc;
  if (int rc = check_grid(o); rc != kExitOk) return rc;
  const int family = noise_family_id(o.noise);
  if (family < 0) {
    std::fprintf(stderr, "error: --noise must be none, laplace, gaussian, or uniform\n");
    return kExitValidation;
  }

  pwb_demo* demo = nullptr;
  const pwb_status status =
      pwb_demo_generate(o.seed, o.n, o.eta, family, o.noise_scale, &demo);
  if (status != PWB_OK) return fail_status(status);

  const std::string prefix = o.out.empty() ? "demo" : o.out;
  char buf[80];
  std::string data_csv = "x,y\n";
  const double* xs = pwb_demo_xs(demo);
  const double* ys = pwb_demo_ys(demo);
  for (std::int64_t k = 0; k < pwb_demo_size(demo); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", xs[k], ys[k]);
    data_csv += buf;
  }
  std::string true_csv = "x,f\n";
  for (double x : make_grid(o.grid)) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", x, pwb_demo_true_eval(demo, x));
    true_csv += buf;
  }
  nlohmann::ordered_json meta;
  meta["seed"] = o.seed;
  meta["n"] = o.n;
  meta["eta"] = o.eta;
  meta["noise"] = o.noise;
  meta["noise_scale"] = o.noise_scale;
  meta["norm_sq"] = pwb_demo_norm_sq(demo);
  meta["tail_energy"] = pwb_demo_tail_energy(demo);
  meta["generated_at"] = now_utc();
  pwb_demo_free(demo);

  if (!write_or_report(prefix + "_data.csv", data_csv)) return kExitIo;
  if (!write_or_report(prefix + "_true.csv", true_csv)) return kExitIo;
  if (!write_or_report(prefix + ".json", meta.dump(2) + "\n")) return kExitIo;
  std::printf("demo: n=%" PRId64 " seed=%" PRIu64 " wrote %s_data.csv %s_true.csv %s.json\n",
              o.n, o.seed, prefix.c_str(), prefix.c_str(), prefix.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simultaneous confidence bands for bounded band-limited functions"};
  app.require_subcommand(1);

  Options band_free_opts;
  CLI::App* band_free = app.add_subcommand("band-free", "noise-free band from a CSV dataset");
  add_shared_options(band_free, band_free_opts);

  Options band_noisy_opts;
  band_noisy_opts.alpha = 0.05;
  CLI::App* band_noisy = app.add_subcommand("band-noisy", "noisy-case band from a CSV dataset");
  add_shared_options(band_noisy, band_noisy_opts);
  band_noisy->add_option("--perturb", band_noisy_opts.perturb,
                         "residual rows to sign-perturb: d (first d) or all (every noise row)");

  Options coverage_opts;
  CLI::App* coverage = app.add_subcommand("coverage", "Monte Carlo coverage experiment");
  add_shared_options(coverage, coverage_opts);
  coverage->add_option("--algorithm", coverage_opts.algorithm, "noise-free or noisy");
  coverage->add_option("--trials", coverage_opts.trials, "Monte Carlo trials");
  coverage->add_option("--n", coverage_opts.n, "samples per trial");
  coverage->add_option("--noise", coverage_opts.noise, "none, laplace, gaussian, or uniform");
  coverage->add_option("--noise-scale", coverage_opts.noise_scale, "noise scale parameter");
  coverage->add_option("--perturb", coverage_opts.perturb, "d or all");

  Options demo_opts;
  demo_opts.n = 100;
  CLI::App* demo = app.add_subcommand("demo", "generate a random function and dataset");
  add_shared_options(demo, demo_opts);
  demo->add_option("--n", demo_opts.n, "samples to draw");
  demo->add_option("--noise", demo_opts.noise, "none, laplace, gaussian, or uniform");
  demo->add_option("--noise-scale", demo_opts.noise_scale, "noise scale parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (band_free->parsed()) return cmd_band_free(band_free, band_free_opts);
  if (band_noisy->parsed()) return cmd_band_noisy(band_noisy, band_noisy_opts);
  if (coverage->parsed()) return cmd_coverage(coverage, coverage_opts);
  if (demo->parsed()) return cmd_demo(demo, demo_opts);
  return kExitValidation;
}
