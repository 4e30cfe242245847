#include "driftscan/stats.hpp"

#include <cmath>

#include "driftscan/error.hpp"

namespace driftscan::stats {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw Error("mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

static double sum_sq_dev(std::span<const double> xs, double m) {
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s;
}

double stddev_pop(std::span<const double> xs) {
    double m = mean(xs);
    return std::sqrt(sum_sq_dev(xs, m) / static_cast<double>(xs.size()));
}

double stddev_sample(std::span<const double> xs) {
    if (xs.size() < 2) throw Error("sample stddev needs n >= 2");
    double m = mean(xs);
    return std::sqrt(sum_sq_dev(xs, m) / static_cast<double>(xs.size() - 1));
}

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for the incomplete beta, evaluated with the modified
// Lentz algorithm.
double beta_cf(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    constexpr int max_iter = 200000;

    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        double m2 = 2.0 * m;
        double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + num * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + num * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) <= eps) return h;
    }
    throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete beta: a, b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw Error("incomplete beta: x must lie in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    // The continued fraction converges fast for x below the distribution
    // bulk; use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                     beta_cf(1.0 - x, b, a) / b;
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) throw Error("student t: dof must be positive");
    double tail = regularized_incomplete_beta(dof / (dof + t * t), dof / 2.0, 0.5) / 2.0;
    return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0.0)) throw Error("student t: dof must be positive");
    if (t == 0.0) return 1.0;
    return regularized_incomplete_beta(dof / (dof + t * t), dof / 2.0, 0.5);
}

}  // namespace driftscan::stats
