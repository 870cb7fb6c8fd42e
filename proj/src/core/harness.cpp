#include "harness.hpp"

#include "parallel.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace pwband {

namespace {

template <typename F>
double adaptive_step(const F& g, double a, double m, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(g, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(g, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& g, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = g(a);
  const double fm = g(m);
  const double fb = g(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_step(g, a, m, b, fa, fm, fb, whole, tol, 18);
}

void validate(const NoiseSpec& noise) {
  if (noise.location != 0.0) {
    throw error(errc::invalid_argument, "noise location must be zero");
  }
  if (noise.family != NoiseFamily::none && !(noise.scale > 0.0)) {
    throw error(errc::invalid_argument, "noise scale must be positive");
  }
}

struct TrialOutcome {
  bool success = false;
  bool failed_with_error = false;
  bool has_empty = false;
  bool has_unbounded = false;
  double mean_width = 0.0;
  bool width_finite = false;
};

}  // namespace

std::vector<double> linspace01(std::int64_t count) {
  if (count < 2) throw error(errc::invalid_argument, "grid needs at least two points");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] =
        static_cast<double>(i) / static_cast<double>(count - 1);
  }
  grid.back() = 1.0;
  return grid;
}

TrueFunction make_true_function(std::vector<double> centers, Eigen::VectorXd coeffs,
                                const KernelParams& params) {
  validate(params);
  if (centers.size() != static_cast<std::size_t>(coeffs.size()) || centers.empty()) {
    throw error(errc::invalid_argument, "need equally many centers and coefficients");
  }
  TrueFunction f{std::move(centers), std::move(coeffs), params, 1.0};
  double max_abs = 0.0;
  for (double x : linspace01(10000)) {
    max_abs = std::max(max_abs, std::fabs(true_eval(f, x)));
  }
  if (max_abs > 1.0) {
    f.scale = 1.0 / max_abs;
    f.coeffs *= f.scale;
  }
  return f;
}

TrueFunction generate_true_function(std::uint64_t seed, const KernelParams& params,
                                    std::int64_t count) {
  if (count < 1) throw error(errc::invalid_argument, "need at least one center");
  CounterRng rng(seed, 0, kStreamTrueFunction);
  std::vector<double> centers(static_cast<std::size_t>(count));
  for (double& c : centers) c = rng.uniform01();
  Eigen::VectorXd coeffs(count);
  for (std::int64_t k = 0; k < count; ++k) coeffs[k] = rng.uniform(-1.0, 1.0);
  return make_true_function(std::move(centers), std::move(coeffs), params);
}

double true_eval(const TrueFunction& f, double x) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f.centers.size(); ++k) {
    acc += f.coeffs[static_cast<Eigen::Index>(k)] * kernel_eval(x, f.centers[k], f.params);
  }
  return acc;
}

double exact_norm_sq(const TrueFunction& f) {
  const auto n = static_cast<Eigen::Index>(f.centers.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += f.coeffs[i] * f.coeffs[j] *
             kernel_eval(f.centers[static_cast<std::size_t>(i)],
                         f.centers[static_cast<std::size_t>(j)], f.params);
    }
  }
  return acc;
}

TailEnergy tail_energy(const TrueFunction& f) {
  auto sq = [&f](double x) {
    const double v = true_eval(f, x);
    return v * v;
  };
  TailEnergy out;
  for (int p = -50; p < 0; ++p) {
    out.estimate += adaptive_simpson(sq, p, p + 1, 1e-11);
  }
  for (int p = 1; p < 51; ++p) {
    out.estimate += adaptive_simpson(sq, p, p + 1, 1e-11);
  }
  // Centers lie in [0,1], so |f(x)| <= C / (|x| - 1) outside [-50, 51] with
  // C = sum |w_k| / pi; integrating the square gives < 2 C^2 / 49.
  const double c = f.coeffs.lpNorm<1>() / std::numbers::pi;
  out.remainder = 2.0 * c * c / 49.0;
  return out;
}

Dataset sample_dataset(const TrueFunction& f, std::int64_t n, const NoiseSpec& noise,
                       std::uint64_t seed) {
  if (n < 1) throw error(errc::invalid_argument, "need at least one sample");
  validate(noise);
  CounterRng xrng(seed, 0, kStreamInputs);
  CounterRng erng(seed, 0, kStreamNoise);
  Dataset data;
  data.xs.resize(static_cast<std::size_t>(n));
  data.ys.resize(static_cast<std::size_t>(n));
  for (double& x : data.xs) x = xrng.uniform01();
  for (std::size_t k = 0; k < data.xs.size(); ++k) {
    double eps = 0.0;
    switch (noise.family) {
      case NoiseFamily::none:
        break;
      case NoiseFamily::laplace:
        eps = erng.laplace(noise.scale);
        break;
      case NoiseFamily::gaussian:
        eps = erng.gaussian(noise.scale);
        break;
      case NoiseFamily::uniform:
        eps = erng.uniform(-noise.scale, noise.scale);
        break;
    }
    data.ys[k] = true_eval(f, data.xs[k]) + eps;
  }
  return data;
}

std::vector<double> uniformize(std::span<const double> raw,
                               const std::function<double(double)>& cdf) {
  std::vector<double> out(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out[k] = cdf(raw[k]);
    if (!(out[k] >= -1e-12 && out[k] <= 1.0 + 1e-12)) {
      throw error(errc::invalid_argument, "cdf values must lie in [0, 1]");
    }
    out[k] = std::clamp(out[k], 0.0, 1.0);
  }
  std::vector<std::size_t> order(raw.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&raw](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (raw[order[k - 1]] < raw[order[k]] && out[order[k - 1]] >= out[order[k]]) {
      throw error(errc::non_monotone_cdf, "cdf is not strictly increasing on the sample");
    }
  }
  return out;
}

CoverageReport coverage_experiment(const CoverageConfig& config, const BandSink& sink) {
  if (config.trials < 1) throw error(errc::invalid_argument, "need at least one trial");
  validate(config.params);
  validate(config.noise);
  const std::vector<double> grid = linspace01(config.grid_resolution);
  const int threads = config.threads > 0 ? config.threads : hardware_threads();

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
  std::vector<Band> bands;
  if (sink) bands.resize(outcomes.size());

  parallel_for(config.trials, threads, [&](std::int64_t t) {
    TrialOutcome& res = outcomes[static_cast<std::size_t>(t)];
    try {
      CounterRng master(config.seed, static_cast<std::uint64_t>(t), kStreamTrial);
      const std::uint64_t fseed = master.next_u64();
      const std::uint64_t dseed = master.next_u64();
      const std::uint64_t sseed = master.next_u64();
      const TrueFunction f = generate_true_function(fseed, config.params);
      const double delta0 = tail_energy(f).upper();
      const Dataset data = sample_dataset(f, config.n, config.noise, dseed);

      Band b;
      if (config.algorithm == BandAlgorithm::noise_free) {
        b = band(data.xs, data.ys, grid, config.alpha, delta0, config.params);
      } else {
        NoisyBandConfig nb;
        nb.alpha = config.alpha;
        nb.beta = config.beta;
        nb.d = config.d;
        nb.lambda = config.lambda;
        nb.seed = sseed;
        nb.m = config.m;
        nb.q = config.q;
        nb.delta0 = delta0;
        nb.clip_unit = config.clip_unit;
        nb.perturbed_rows = config.perturbed_rows;
        b = band_noisy(data.xs, data.ys, grid, nb, config.params);
      }

      res.success = true;
      double width_sum = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const IntervalPair& iv = b.intervals[i];
        if (iv.empty()) {
          res.has_empty = true;
          res.success = false;
          continue;
        }
        const double w = iv.upper - iv.lower;
        if (std::isinf(w)) res.has_unbounded = true;
        width_sum += w;
        if (!iv.contains(true_eval(f, grid[i]))) res.success = false;
      }
      if (!res.has_empty) {
        res.mean_width = width_sum / static_cast<double>(grid.size());
        res.width_finite = std::isfinite(res.mean_width);
      }
      if (sink) bands[static_cast<std::size_t>(t)] = std::move(b);
    } catch (const std::exception&) {
      res = TrialOutcome{};
      res.failed_with_error = true;
    }
  });

  CoverageReport report;
  report.trials = config.trials;
  report.config = config;
  report.guarantee = config.algorithm == BandAlgorithm::noise_free
                         ? 1.0 - config.alpha
                         : 1.0 - config.alpha - config.beta;
  double width_acc = 0.0;
  for (std::int64_t t = 0; t < config.trials; ++t) {
    const TrialOutcome& res = outcomes[static_cast<std::size_t>(t)];
    report.successes += res.success ? 1 : 0;
    report.errors += res.failed_with_error ? 1 : 0;
    report.empty_trials += res.has_empty ? 1 : 0;
    report.unbounded_trials += res.has_unbounded ? 1 : 0;
    if (res.width_finite) {
      report.finite_width_trials += 1;
      width_acc += res.mean_width;
    }
    if (sink) sink(t, bands[static_cast<std::size_t>(t)]);
  }
  report.empirical_reliability =
      static_cast<double>(report.successes) / static_cast<double>(report.trials);
  if (report.finite_width_trials > 0) {
    report.mean_width = width_acc / static_cast<double>(report.finite_width_trials);
  }
  return report;
}

}  // namespace pwband
