#pragma once

#include <span>
#include <vector>

#include "infoflow/time.hpp"

namespace infoflow {

/// Univariate Hawkes process with kernel alpha * exp(-beta u). Parameters are
/// in the caller's time unit.
struct HawkesFit {
  double mu = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double branching = 0.0;  // alpha / beta, clamped to [0, 1 - 1e-6]
  double log_likelihood = 0.0;
  int iterations = 0;
  int starts_converged = 0;
};

/// Log-likelihood on [0, horizon] for sorted arrival times in [0, horizon],
/// computed with the O(n) recursion.
double hawkes_log_likelihood(std::span<const double> times, double horizon, double mu,
                             double alpha, double beta);

/// Maximum-likelihood fit from three fixed starting points. Times are
/// rescaled by the mean inter-arrival gap internally.
/// Throws Undefined for fewer than 20 arrivals, FitFailed when no start converges.
HawkesFit fit_hawkes(std::span<const double> times, double horizon);

/// Branching ratio for trade timestamps observed over [first, last].
double hawkes_branching(std::span<const Timestamp> arrivals);

}  // namespace infoflow
