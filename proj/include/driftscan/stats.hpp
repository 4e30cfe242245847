#pragma once

#include <span>

namespace driftscan::stats {

double mean(std::span<const double> xs);
double stddev_pop(std::span<const double> xs);     // ddof=0
double stddev_sample(std::span<const double> xs);  // ddof=1, needs n >= 2

// I_x(a,b) evaluated with the textbook continued fraction (modified Lentz),
// tolerance 1e-15. Accurate to well under the 1e-8 the p-values need.
double regularized_incomplete_beta(double x, double a, double b);

double student_t_cdf(double t, double dof);

// 2*P(|T| >= |t|) computed directly as I_{v/(v+t^2)}(v/2, 1/2), which stays
// accurate for the tiny tail probabilities the tests assert on.
double student_t_two_sided_p(double t, double dof);

}  // namespace driftscan::stats
