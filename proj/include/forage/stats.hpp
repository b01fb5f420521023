#pragma once

#include <vector>

namespace forage {

double mean_of(const std::vector<double>& xs);    // throws on empty input
double sample_sd(const std::vector<double>& xs);  // n-1 denominator; 0 for n < 2

/// Mean, sample SD, and the half-width of the 95% confidence interval
/// (t-based). n == 1 yields sd = 0 and ci95_half = 0.
struct SampleStats {
    int n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double ci95_half = 0.0;
};
SampleStats summarize(const std::vector<double>& xs);

/// Regularized incomplete beta function I_x(a, b), evaluated with a modified
/// Lentz continued fraction; relative accuracy ~1e-12 for the a, b used here.
double reg_inc_beta(double a, double b, double x);

/// Two-sided p-value of a t statistic with df degrees of freedom:
/// I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

/// Positive critical value c with student_t_two_sided_p(c, df) = alpha.
double student_t_critical(double df, double alpha);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
/// freedom and a two-sided p. Requires both samples to have at least two
/// values and at least one positive variance; throws std::invalid_argument
/// otherwise.
WelchResult welch_t_test(const std::vector<double>& xs, const std::vector<double>& ys);

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r = 0.0;
    double p = 1.0;
};

/// Ordinary least squares of values on log2(levels), with a two-sided t-test
/// on the slope. Needs >= 3 points and >= 2 distinct levels (else
/// std::invalid_argument / std::domain_error). Constant values give slope 0,
/// r 0, p 1; an exact fit gives p 0.
RegressionResult loglinear_regression(const std::vector<double>& levels,
                                      const std::vector<double>& values);

}  // namespace forage
