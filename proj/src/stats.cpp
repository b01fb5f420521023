#include "forage/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace forage {

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean_of: empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

SampleStats summarize(const std::vector<double>& xs) {
    SampleStats s;
    s.n = static_cast<int>(xs.size());
    if (s.n == 0) return s;
    s.mean = mean_of(xs);
    s.sd = sample_sd(xs);
    if (s.n >= 2 && s.sd > 0.0) {
        double crit = student_t_critical(static_cast<double>(s.n - 1), 0.05);
        s.ci95_half = crit * s.sd / std::sqrt(static_cast<double>(s.n));
    }
    return s;
}

namespace {

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr double kEps = 1e-14;
    constexpr double kTiny = 1e-300;
    constexpr int kMaxIter = 500;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("reg_inc_beta: a, b must be positive");
    if (x < 0.0 || x > 1.0) throw std::domain_error("reg_inc_beta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    // The continued fraction converges fastest below the pivot; use the
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the other side.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw std::domain_error("student_t_two_sided_p: df must be positive");
    if (!std::isfinite(t)) return 0.0;
    if (t == 0.0) return 1.0;
    return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
}

double student_t_critical(double df, double alpha) {
    if (!(df > 0.0)) throw std::domain_error("student_t_critical: df must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::domain_error("student_t_critical: alpha outside (0, 1)");
    }
    double lo = 0.0, hi = 1.0;
    while (student_t_two_sided_p(hi, df) > alpha) {
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (student_t_two_sided_p(mid, df) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

WelchResult welch_t_test(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto nx = static_cast<double>(xs.size());
    const auto ny = static_cast<double>(ys.size());
    if (xs.size() < 2 || ys.size() < 2) {
        throw std::invalid_argument("welch_t_test: each sample needs at least 2 values");
    }
    const double mx = mean_of(xs), my = mean_of(ys);
    const double sx = sample_sd(xs), sy = sample_sd(ys);
    const double vx = sx * sx / nx, vy = sy * sy / ny;
    if (vx + vy <= 0.0) {
        throw std::invalid_argument("welch_t_test: both samples are degenerate (zero variance)");
    }
    WelchResult r;
    r.t = (mx - my) / std::sqrt(vx + vy);
    r.df = (vx + vy) * (vx + vy) /
           (vx * vx / (nx - 1.0) + vy * vy / (ny - 1.0));
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

RegressionResult loglinear_regression(const std::vector<double>& levels,
                                      const std::vector<double>& values) {
    const std::size_t n = levels.size();
    if (n != values.size()) {
        throw std::invalid_argument("loglinear_regression: size mismatch");
    }
    if (n < 3) throw std::invalid_argument("loglinear_regression: need at least 3 points");

    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(levels[i] > 0.0)) {
            throw std::domain_error("loglinear_regression: levels must be positive");
        }
        xs[i] = std::log2(levels[i]);
    }

    const double xbar = mean_of(xs), ybar = mean_of(values);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - xbar, dy = values[i] - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw std::domain_error("loglinear_regression: all levels are equal");

    RegressionResult res;
    if (syy <= 0.0) {
        // Constant response: flat line, no evidence of trend.
        res.intercept = ybar;
        return res;
    }
    res.slope = sxy / sxx;
    res.intercept = ybar - res.slope * xbar;
    res.r = sxy / std::sqrt(sxx * syy);

    double sse = syy - res.slope * sxy;
    if (sse < 0.0) sse = 0.0;  // guard tiny negative from cancellation
    const double dof = static_cast<double>(n) - 2.0;
    if (sse <= 1e-14 * syy) {
        // Numerically exact fit.
        res.p = 0.0;
        return res;
    }
    const double se = std::sqrt(sse / dof / sxx);
    res.p = student_t_two_sided_p(res.slope / se, dof);
    return res;
}

}  // namespace forage
