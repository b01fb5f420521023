#include "forage/poisson.hpp"

#include <cmath>
#include <stdexcept>

#include "forage/geometry.hpp"

namespace forage {

double poisson_cdf(int k, double lambda) {
    if (k < 0) throw std::domain_error("poisson_cdf: k must be non-negative");
    if (lambda < 0.0 || !std::isfinite(lambda)) {
        throw std::domain_error("poisson_cdf: lambda must be non-negative and finite");
    }
    if (k > 10000) k = 10000;  // CDF is 1 to machine precision far beyond any sane lambda here
    // Accumulate terms by the stable recurrence term_i = term_{i-1} * lambda / i.
    double term = std::exp(-lambda);
    double sum = term;
    for (int i = 1; i <= k; ++i) {
        term *= lambda / static_cast<double>(i);
        sum += term;
    }
    return sum < 1.0 ? sum : 1.0;
}

double informed_sigma(double omega, double lambda_id, double t) {
    return omega + (kTwoPi - omega) * std::exp(-lambda_id * t);
}

}  // namespace forage
