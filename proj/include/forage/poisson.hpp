#pragma once

namespace forage {

/// CDF of a Poisson(lambda) variable at k: sum_{i=0..k} e^-lambda lambda^i / i!.
/// Throws std::domain_error for k < 0 or lambda < 0.
double poisson_cdf(int k, double lambda);

/// Standard deviation of the informed correlated random walk after `t` seconds
/// of informed searching: omega + (2*pi - omega) * e^(-lambda_id * t).
double informed_sigma(double omega, double lambda_id, double t);

}  // namespace forage
