#pragma once

namespace infoflow {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF for p in (0, 1): rational approximation
/// refined by one Halley step (absolute error well below 1e-9).
/// Throws ConfigError outside (0, 1).
double normal_quantile(double p);

}  // namespace infoflow
