#include "pwband/pwband.h"

#include "band_noise_free.hpp"
#include "band_noisy.hpp"
#include "harness.hpp"
#include "rng.hpp"
#include "serialize.hpp"

#include <algorithm>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <utility>

namespace {

thread_local std::string g_last_error;

pwb_status map_code(pwband::errc code) {
  switch (code) {
    case pwband::errc::invalid_argument: return PWB_INVALID_ARGUMENT;
    case pwband::errc::duplicate_inputs: return PWB_DUPLICATE_INPUTS;
    case pwband::errc::ill_conditioned: return PWB_ILL_CONDITIONED;
    case pwband::errc::not_psd: return PWB_NOT_PSD;
    case pwband::errc::invalid_risk: return PWB_INVALID_RISK;
    case pwband::errc::empty_observed_intervals: return PWB_EMPTY_OBSERVED_INTERVALS;
    case pwband::errc::degenerate_design: return PWB_DEGENERATE_DESIGN;
    case pwband::errc::no_strictly_feasible_point: return PWB_NO_STRICTLY_FEASIBLE_POINT;
    case pwband::errc::query_collision: return PWB_QUERY_COLLISION;
    case pwband::errc::non_monotone_cdf: return PWB_NON_MONOTONE_CDF;
    case pwband::errc::infeasible: return PWB_INFEASIBLE;
    case pwband::errc::io_error: return PWB_IO_ERROR;
  }
  return PWB_INTERNAL;
}

template <typename Fn>
pwb_status guarded(Fn&& fn) {
  try {
    fn();
    return PWB_OK;
  } catch (const pwband::error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PWB_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PWB_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pwband::NoiseFamily map_family(int family) {
  switch (family) {
    case PWB_NOISE_NONE: return pwband::NoiseFamily::none;
    case PWB_NOISE_LAPLACE: return pwband::NoiseFamily::laplace;
    case PWB_NOISE_GAUSSIAN: return pwband::NoiseFamily::gaussian;
    case PWB_NOISE_UNIFORM: return pwband::NoiseFamily::uniform;
    default:
      throw pwband::error(pwband::errc::invalid_argument, "unknown noise family");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw pwband::error(pwband::errc::invalid_argument, what);
}

}  // namespace

struct pwb_band {
  pwband::Band value;
};

struct pwb_coverage_report {
  pwband::CoverageReport value;
};

struct pwb_demo {
  pwband::TrueFunction truth;
  pwband::Dataset data;
  double norm_sq = 0.0;
  double tail = 0.0;
};

extern "C" {

const char* pwb_last_error(void) { return g_last_error.c_str(); }

void pwb_free_string(char* s) { delete[] s; }
void pwb_free_buffer(double* p) { delete[] p; }

pwb_status pwb_band_free_compute(const double* xs, const double* ys, int64_t n,
                                 const double* grid, int64_t grid_len, double eta, double alpha,
                                 double delta0, int clip_unit, pwb_band** out) {
  return guarded([&] {
    require(xs && ys && grid && out, "null pointer argument");
    require(n >= 1 && grid_len >= 1, "need at least one sample and one grid point");
    pwband::KernelParams params{eta};
    pwband::Band band =
        pwband::band(std::span<const double>(xs, static_cast<std::size_t>(n)),
                     std::span<const double>(ys, static_cast<std::size_t>(n)),
                     std::span<const double>(grid, static_cast<std::size_t>(grid_len)), alpha,
                     delta0, params);
    if (clip_unit) {
      band.meta.clip_unit = true;
      for (auto& iv : band.intervals) {
        if (iv.empty()) continue;
        iv.lower = std::max(iv.lower, -1.0);
        iv.upper = std::min(iv.upper, 1.0);
        if (iv.lower > iv.upper) iv = pwband::IntervalPair::empty_pair();
      }
    }
    *out = new pwb_band{std::move(band)};
  });
}

void pwb_noisy_options_init(pwb_noisy_options* opts) {
  if (!opts) return;
  opts->alpha = 0.05;
  opts->beta = 0.05;
  opts->d = 0;
  opts->lambda = 0.1;
  opts->seed = 0;
  opts->m = 0;
  opts->q = 0;
  opts->delta0 = 0.0;
  opts->clip_unit = 0;
  opts->perturbed_rows = -1;
}

pwb_status pwb_band_noisy_compute(const double* xs, const double* ys, int64_t n,
                                  const double* grid, int64_t grid_len, double eta,
                                  const pwb_noisy_options* opts, pwb_band** out) {
  return guarded([&] {
    require(xs && ys && grid && opts && out, "null pointer argument");
    require(n >= 1 && grid_len >= 1, "need at least one sample and one grid point");
    pwband::KernelParams params{eta};
    pwband::NoisyBandConfig config;
    config.alpha = opts->alpha;
    config.beta = opts->beta;
    config.d = opts->d;
    config.lambda = opts->lambda;
    config.seed = opts->seed;
    config.m = opts->m;
    config.q = opts->q;
    config.delta0 = opts->delta0;
    config.clip_unit = opts->clip_unit != 0;
    config.perturbed_rows = opts->perturbed_rows;
    pwband::Band band =
        pwband::band_noisy(std::span<const double>(xs, static_cast<std::size_t>(n)),
                           std::span<const double>(ys, static_cast<std::size_t>(n)),
                           std::span<const double>(grid, static_cast<std::size_t>(grid_len)),
                           config, params);
    *out = new pwb_band{std::move(band)};
  });
}

int64_t pwb_band_size(const pwb_band* band) {
  return band ? static_cast<int64_t>(band->value.grid.size()) : 0;
}

pwb_status pwb_band_get(const pwb_band* band, int64_t i, double* x, double* lower, double* upper,
                        int* empty) {
  return guarded([&] {
    require(band != nullptr, "null band");
    require(i >= 0 && i < static_cast<int64_t>(band->value.grid.size()), "index out of range");
    const pwband::IntervalPair& iv = band->value.intervals[static_cast<std::size_t>(i)];
    if (x) *x = band->value.grid[static_cast<std::size_t>(i)];
    if (lower) *lower = iv.lower;
    if (upper) *upper = iv.upper;
    if (empty) *empty = iv.empty() ? 1 : 0;
  });
}

double pwb_band_risk(const pwb_band* band) { return band ? band->value.risk : 0.0; }

double pwb_band_bound_value(const pwb_band* band) {
  return band ? band->value.meta.bound_value : 0.0;
}

pwb_status pwb_band_to_csv(const pwb_band* band, char** out) {
  return guarded([&] {
    require(band && out, "null pointer argument");
    *out = copy_string(pwband::band_to_csv(band->value));
  });
}

pwb_status pwb_band_to_json(const pwb_band* band, const char* timestamp, char** out) {
  return guarded([&] {
    require(band && out, "null pointer argument");
    *out = copy_string(pwband::band_to_json(band->value, timestamp ? timestamp : ""));
  });
}

void pwb_band_free(pwb_band* band) { delete band; }

void pwb_coverage_options_init(pwb_coverage_options* opts) {
  if (!opts) return;
  opts->algorithm = 0;
  opts->trials = 500;
  opts->n = 10;
  opts->grid_resolution = 512;
  opts->eta = 30.0;
  opts->alpha = 0.1;
  opts->beta = 0.05;
  opts->d = 0;
  opts->lambda = 0.1;
  opts->m = 0;
  opts->q = 0;
  opts->perturbed_rows = -1;
  opts->noise_family = PWB_NOISE_NONE;
  opts->noise_scale = 0.4;
  opts->seed = 0;
  opts->threads = 0;
  opts->clip_unit = 0;
}

pwb_status pwb_coverage_run(const pwb_coverage_options* opts, pwb_coverage_report** out) {
  return guarded([&] {
    require(opts && out, "null pointer argument");
    require(opts->algorithm == 0 || opts->algorithm == 1, "algorithm must be 0 or 1");
    pwband::CoverageConfig config;
    config.algorithm = opts->algorithm == 0 ? pwband::BandAlgorithm::noise_free
                                            : pwband::BandAlgorithm::noisy;
    config.trials = opts->trials;
    config.n = opts->n;
    config.grid_resolution = opts->grid_resolution;
    config.alpha = opts->alpha;
    config.beta = opts->beta;
    config.d = opts->d;
    config.lambda = opts->lambda;
    config.m = opts->m;
    config.q = opts->q;
    config.perturbed_rows = opts->perturbed_rows;
    config.noise.family = map_family(opts->noise_family);
    config.noise.scale = opts->noise_scale;
    config.seed = opts->seed;
    config.threads = opts->threads;
    config.params.eta = opts->eta;
    config.clip_unit = opts->clip_unit != 0;
    *out = new pwb_coverage_report{pwband::coverage_experiment(config)};
  });
}

int64_t pwb_coverage_trials(const pwb_coverage_report* report) {
  return report ? report->value.trials : 0;
}

int64_t pwb_coverage_successes(const pwb_coverage_report* report) {
  return report ? report->value.successes : 0;
}

int64_t pwb_coverage_errors(const pwb_coverage_report* report) {
  return report ? report->value.errors : 0;
}

double pwb_coverage_reliability(const pwb_coverage_report* report) {
  return report ? report->value.empirical_reliability : 0.0;
}

double pwb_coverage_guarantee(const pwb_coverage_report* report) {
  return report ? report->value.guarantee : 0.0;
}

double pwb_coverage_mean_width(const pwb_coverage_report* report) {
  return report ? report->value.mean_width : 0.0;
}

pwb_status pwb_coverage_to_json(const pwb_coverage_report* report, const char* timestamp,
                                char** out) {
  return guarded([&] {
    require(report && out, "null pointer argument");
    *out = copy_string(
        pwband::coverage_report_to_json(report->value, timestamp ? timestamp : ""));
  });
}

void pwb_coverage_free(pwb_coverage_report* report) { delete report; }

pwb_status pwb_demo_generate(uint64_t seed, int64_t n, double eta, int noise_family,
                             double noise_scale, pwb_demo** out) {
  return guarded([&] {
    require(out != nullptr, "null pointer argument");
    require(n >= 1, "need at least one sample");
    pwband::KernelParams params{eta};
    pwband::CounterRng master(seed, 0, pwband::kStreamDemo);
    const uint64_t fseed = master.next_u64();
    const uint64_t dseed = master.next_u64();
    pwband::NoiseSpec noise;
    noise.family = map_family(noise_family);
    noise.scale = noise_scale;
    auto demo = std::make_unique<pwb_demo>();
    demo->truth = pwband::generate_true_function(fseed, params);
    demo->data = pwband::sample_dataset(demo->truth, n, noise, dseed);
    demo->norm_sq = pwband::exact_norm_sq(demo->truth);
    demo->tail = pwband::tail_energy(demo->truth).upper();
    *out = demo.release();
  });
}

int64_t pwb_demo_size(const pwb_demo* demo) {
  return demo ? static_cast<int64_t>(demo->data.xs.size()) : 0;
}

const double* pwb_demo_xs(const pwb_demo* demo) { return demo ? demo->data.xs.data() : nullptr; }

const double* pwb_demo_ys(const pwb_demo* demo) { return demo ? demo->data.ys.data() : nullptr; }

double pwb_demo_true_eval(const pwb_demo* demo, double x) {
  return demo ? pwband::true_eval(demo->truth, x) : 0.0;
}

double pwb_demo_norm_sq(const pwb_demo* demo) { return demo ? demo->norm_sq : 0.0; }

double pwb_demo_tail_energy(const pwb_demo* demo) { return demo ? demo->tail : 0.0; }

void pwb_demo_free(pwb_demo* demo) { delete demo; }

pwb_status pwb_read_xy_csv(const char* path, double** xs, double** ys, int64_t* n) {
  return guarded([&] {
    require(path && xs && ys && n, "null pointer argument");
    pwband::Dataset data = pwband::read_xy_csv(path);
    auto* bx = new double[data.xs.size()];
    auto* by = new double[data.ys.size()];
    std::memcpy(bx, data.xs.data(), data.xs.size() * sizeof(double));
    std::memcpy(by, data.ys.data(), data.ys.size() * sizeof(double));
    *xs = bx;
    *ys = by;
    *n = static_cast<int64_t>(data.xs.size());
  });
}

}  // extern "C"
