#pragma once

#include "types.hpp"

#include <span>

namespace pwband {

// Hoeffding bound from exact samples: (1/n) sum y_k^2 + sqrt(ln(alpha)/(-2n)) + delta0.
NormBudget noise_free_bound(std::span<const double> ys, double alpha, double delta0);

// Hoeffding bound from intervals: (1/d) sum max{nu_k^2, mu_k^2} + sqrt(ln(alpha)/(-2d)) + delta0.
NormBudget noisy_bound(const ObservedIntervals& intervals, double alpha, double delta0);

}  // namespace pwband
