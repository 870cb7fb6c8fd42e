#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pwband/pwband.h"

#include "band_noise_free.hpp"
#include "band_noisy.hpp"
#include "harness.hpp"
#include "rng.hpp"
#include "serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>
#include <unistd.h>

namespace {

const double kXs[5] = {0.1, 0.3, 0.5, 0.7, 0.9};
const double kYs[5] = {0.3, -0.2, 0.4, 0.0, -0.3};
const double kGrid[3] = {0.2, 0.55, 0.8};

struct BandHandle {
  pwb_band* ptr = nullptr;
  ~BandHandle() { pwb_band_free(ptr); }
};

}  // namespace

TEST_CASE("last error is never null") {
  const char* msg = pwb_last_error();
  REQUIRE(msg != nullptr);
}

TEST_CASE("status codes map the error taxonomy") {
  pwb_band* out = reinterpret_cast<pwb_band*>(0x1);
  pwb_band* sentinel = out;

  double dup_xs[2] = {0.5, 0.5};
  double dup_ys[2] = {0.1, 0.2};
  double grid1[1] = {0.3};
  CHECK(pwb_band_free_compute(dup_xs, dup_ys, 2, grid1, 1, 30.0, 0.1, 0.0, 0, &out) ==
        PWB_DUPLICATE_INPUTS);
  CHECK(out == sentinel);
  CHECK(std::strlen(pwb_last_error()) > 0);

  CHECK(pwb_band_free_compute(kXs, kYs, 5, kGrid, 3, 30.0, 1.5, 0.0, 0, &out) ==
        PWB_INVALID_RISK);
  CHECK(pwb_band_free_compute(kXs, kYs, 5, kGrid, 3, -3.0, 0.1, 0.0, 0, &out) ==
        PWB_INVALID_ARGUMENT);
  CHECK(pwb_band_free_compute(nullptr, kYs, 5, kGrid, 3, 30.0, 0.1, 0.0, 0, &out) ==
        PWB_INVALID_ARGUMENT);
  CHECK(pwb_band_free_compute(kXs, kYs, 0, kGrid, 3, 30.0, 0.1, 0.0, 0, &out) ==
        PWB_INVALID_ARGUMENT);
  CHECK(out == sentinel);

  pwb_noisy_options opts;
  pwb_noisy_options_init(&opts);
  opts.d = 9;
  CHECK(pwb_band_noisy_compute(kXs, kYs, 5, kGrid, 3, 30.0, &opts, &out) ==
        PWB_INVALID_ARGUMENT);
  pwb_noisy_options_init(&opts);
  opts.alpha = 0.6;
  opts.beta = 0.5;
  CHECK(pwb_band_noisy_compute(kXs, kYs, 5, kGrid, 3, 30.0, &opts, &out) == PWB_INVALID_RISK);
  CHECK(out == sentinel);

  double x = 0.0;
  CHECK(pwb_band_get(nullptr, 0, &x, nullptr, nullptr, nullptr) == PWB_INVALID_ARGUMENT);

  double* bx = nullptr;
  double* by = nullptr;
  int64_t n = 0;
  CHECK(pwb_read_xy_csv("/definitely/not/here.csv", &bx, &by, &n) == PWB_IO_ERROR);
}

TEST_CASE("noisy options initialize to the documented defaults") {
  pwb_noisy_options opts;
  pwb_noisy_options_init(&opts);
  CHECK(opts.alpha == 0.05);
  CHECK(opts.beta == 0.05);
  CHECK(opts.d == 0);
  CHECK(opts.lambda == 0.1);
  CHECK(opts.seed == 0);
  CHECK(opts.m == 0);
  CHECK(opts.q == 0);
  CHECK(opts.delta0 == 0.0);
  CHECK(opts.clip_unit == 0);
  CHECK(opts.perturbed_rows == -1);

  pwb_coverage_options cov;
  pwb_coverage_options_init(&cov);
  CHECK(cov.algorithm == 0);
  CHECK(cov.trials == 500);
  CHECK(cov.n == 10);
  CHECK(cov.grid_resolution == 512);
  CHECK(cov.eta == 30.0);
  CHECK(cov.alpha == 0.1);
  CHECK(cov.noise_family == PWB_NOISE_NONE);
  CHECK(cov.threads == 0);
}

TEST_CASE("noise-free compute matches the core library") {
  BandHandle h;
  REQUIRE(pwb_band_free_compute(kXs, kYs, 5, kGrid, 3, 30.0, 0.1, 0.01, 0, &h.ptr) == PWB_OK);
  REQUIRE(h.ptr != nullptr);

  pwband::KernelParams params{30.0};
  pwband::Band direct = pwband::band({kXs, 5}, {kYs, 5}, {kGrid, 3}, 0.1, 0.01, params);

  REQUIRE(pwb_band_size(h.ptr) == 3);
  CHECK(pwb_band_risk(h.ptr) == direct.risk);
  CHECK(pwb_band_bound_value(h.ptr) == direct.meta.bound_value);
  for (int64_t i = 0; i < 3; ++i) {
    double x = 0.0, lo = 0.0, hi = 0.0;
    int empty = -1;
    REQUIRE(pwb_band_get(h.ptr, i, &x, &lo, &hi, &empty) == PWB_OK);
    CHECK(x == kGrid[i]);
    CHECK(lo == direct.intervals[static_cast<std::size_t>(i)].lower);
    CHECK(hi == direct.intervals[static_cast<std::size_t>(i)].upper);
    CHECK(empty == (direct.intervals[static_cast<std::size_t>(i)].empty() ? 1 : 0));
  }

  char* csv = nullptr;
  REQUIRE(pwb_band_to_csv(h.ptr, &csv) == PWB_OK);
  CHECK(std::string(csv) == pwband::band_to_csv(direct));
  pwb_free_string(csv);

  char* json = nullptr;
  REQUIRE(pwb_band_to_json(h.ptr, nullptr, &json) == PWB_OK);
  CHECK(std::string(json) == pwband::band_to_json(direct, ""));
  pwb_free_string(json);

  char* stamped = nullptr;
  REQUIRE(pwb_band_to_json(h.ptr, "2026-01-01T00:00:00Z", &stamped) == PWB_OK);
  CHECK(std::string(stamped).find("generated_at") != std::string::npos);
  pwb_free_string(stamped);
}

TEST_CASE("clip flag intersects the noise-free band with the unit range") {
  BandHandle raw, clipped;
  REQUIRE(pwb_band_free_compute(kXs, kYs, 5, kGrid, 3, 30.0, 0.1, 0.01, 0, &raw.ptr) == PWB_OK);
  REQUIRE(pwb_band_free_compute(kXs, kYs, 5, kGrid, 3, 30.0, 0.1, 0.01, 1, &clipped.ptr) ==
          PWB_OK);
  for (int64_t i = 0; i < 3; ++i) {
    double rlo = 0.0, rhi = 0.0, clo = 0.0, chi = 0.0;
    int rempty = 0, cempty = 0;
    REQUIRE(pwb_band_get(raw.ptr, i, nullptr, &rlo, &rhi, &rempty) == PWB_OK);
    REQUIRE(pwb_band_get(clipped.ptr, i, nullptr, &clo, &chi, &cempty) == PWB_OK);
    if (rempty) {
      CHECK(cempty);
      continue;
    }
    double lo = std::max(rlo, -1.0);
    double hi = std::min(rhi, 1.0);
    if (lo > hi) {
      CHECK(cempty);
    } else {
      CHECK(clo == lo);
      CHECK(chi == hi);
    }
  }
}

TEST_CASE("noisy compute matches the core library") {
  pwb_noisy_options opts;
  pwb_noisy_options_init(&opts);
  opts.alpha = 0.05;
  opts.beta = 0.1;
  opts.d = 5;
  opts.seed = 21;
  opts.perturbed_rows = 5;

  BandHandle h;
  REQUIRE(pwb_band_noisy_compute(kXs, kYs, 5, kGrid, 3, 30.0, &opts, &h.ptr) == PWB_OK);

  pwband::NoisyBandConfig config;
  config.alpha = 0.05;
  config.beta = 0.1;
  config.d = 5;
  config.seed = 21;
  config.perturbed_rows = 5;
  pwband::KernelParams params{30.0};
  pwband::Band direct = pwband::band_noisy({kXs, 5}, {kYs, 5}, {kGrid, 3}, config, params);

  CHECK(pwb_band_risk(h.ptr) == direct.risk);
  bool both_nan = std::isnan(pwb_band_bound_value(h.ptr)) && std::isnan(direct.meta.bound_value);
  CHECK((both_nan || pwb_band_bound_value(h.ptr) == direct.meta.bound_value));
  for (int64_t i = 0; i < 3; ++i) {
    double lo = 0.0, hi = 0.0;
    REQUIRE(pwb_band_get(h.ptr, i, nullptr, &lo, &hi, nullptr) == PWB_OK);
    CHECK(lo == direct.intervals[static_cast<std::size_t>(i)].lower);
    CHECK(hi == direct.intervals[static_cast<std::size_t>(i)].upper);
  }
}

TEST_CASE("coverage run matches the direct experiment") {
  pwb_coverage_options opts;
  pwb_coverage_options_init(&opts);
  opts.trials = 6;
  opts.n = 5;
  opts.grid_resolution = 16;
  opts.alpha = 0.2;
  opts.seed = 12;
  opts.threads = 2;

  pwb_coverage_report* report = nullptr;
  REQUIRE(pwb_coverage_run(&opts, &report) == PWB_OK);

  pwband::CoverageConfig config;
  config.algorithm = pwband::BandAlgorithm::noise_free;
  config.trials = 6;
  config.n = 5;
  config.grid_resolution = 16;
  config.alpha = 0.2;
  config.seed = 12;
  config.threads = 2;
  config.params = pwband::KernelParams{30.0};
  config.noise.scale = 0.4;  // option-struct default, carried into the dump
  pwband::CoverageReport direct = pwband::coverage_experiment(config);

  CHECK(pwb_coverage_trials(report) == direct.trials);
  CHECK(pwb_coverage_successes(report) == direct.successes);
  CHECK(pwb_coverage_errors(report) == direct.errors);
  CHECK(pwb_coverage_reliability(report) == direct.empirical_reliability);
  CHECK(pwb_coverage_guarantee(report) == direct.guarantee);
  CHECK(pwb_coverage_mean_width(report) == direct.mean_width);

  char* json = nullptr;
  REQUIRE(pwb_coverage_to_json(report, nullptr, &json) == PWB_OK);
  CHECK(std::string(json) == pwband::coverage_report_to_json(direct, ""));
  pwb_free_string(json);
  pwb_coverage_free(report);

  pwb_coverage_options bad = opts;
  bad.algorithm = 7;
  pwb_coverage_report* none = nullptr;
  CHECK(pwb_coverage_run(&bad, &none) == PWB_INVALID_ARGUMENT);
  CHECK(none == nullptr);
}

TEST_CASE("demo generation is deterministic and matches the harness") {
  pwb_demo* demo = nullptr;
  REQUIRE(pwb_demo_generate(9, 25, 30.0, PWB_NOISE_LAPLACE, 0.4, &demo) == PWB_OK);
  REQUIRE(pwb_demo_size(demo) == 25);

  pwband::KernelParams params{30.0};
  pwband::CounterRng master(9, 0, pwband::kStreamDemo);
  const uint64_t fseed = master.next_u64();
  const uint64_t dseed = master.next_u64();
  pwband::TrueFunction truth = pwband::generate_true_function(fseed, params);
  pwband::Dataset data = pwband::sample_dataset(
      truth, 25, pwband::NoiseSpec{pwband::NoiseFamily::laplace, 0.0, 0.4}, dseed);

  const double* xs = pwb_demo_xs(demo);
  const double* ys = pwb_demo_ys(demo);
  REQUIRE(xs != nullptr);
  REQUIRE(ys != nullptr);
  for (int i = 0; i < 25; ++i) {
    CHECK(xs[i] == data.xs[static_cast<std::size_t>(i)]);
    CHECK(ys[i] == data.ys[static_cast<std::size_t>(i)]);
  }
  CHECK(pwb_demo_norm_sq(demo) == pwband::exact_norm_sq(truth));
  CHECK(pwb_demo_tail_energy(demo) == pwband::tail_energy(truth).upper());
  CHECK(pwb_demo_true_eval(demo, 0.37) == pwband::true_eval(truth, 0.37));

  pwb_demo* again = nullptr;
  REQUIRE(pwb_demo_generate(9, 25, 30.0, PWB_NOISE_LAPLACE, 0.4, &again) == PWB_OK);
  bool identical = true;
  for (int i = 0; i < 25; ++i) {
    identical = identical && pwb_demo_xs(again)[i] == xs[i] && pwb_demo_ys(again)[i] == ys[i];
  }
  CHECK(identical);
  pwb_demo_free(again);

  pwb_demo* other = nullptr;
  REQUIRE(pwb_demo_generate(10, 25, 30.0, PWB_NOISE_LAPLACE, 0.4, &other) == PWB_OK);
  bool differs = false;
  for (int i = 0; i < 25; ++i) {
    differs = differs || pwb_demo_ys(other)[i] != ys[i];
  }
  CHECK(differs);
  pwb_demo_free(other);

  pwb_demo* bad = nullptr;
  CHECK(pwb_demo_generate(9, 25, 30.0, 42, 0.4, &bad) == PWB_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  pwb_demo_free(demo);
}

TEST_CASE("csv buffers round-trip through the c api") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("pwband_capi_" + std::to_string(getpid()));
  fs::create_directories(dir);
  fs::path file = dir / "points.csv";
  {
    std::ofstream out(file);
    out << "x,y\n0.125,0.5\n0.875,-0.25\n";
  }
  double* xs = nullptr;
  double* ys = nullptr;
  int64_t n = 0;
  REQUIRE(pwb_read_xy_csv(file.string().c_str(), &xs, &ys, &n) == PWB_OK);
  REQUIRE(n == 2);
  CHECK(xs[0] == 0.125);
  CHECK(ys[0] == 0.5);
  CHECK(xs[1] == 0.875);
  CHECK(ys[1] == -0.25);
  pwb_free_buffer(xs);
  pwb_free_buffer(ys);
  fs::remove_all(dir);
}
