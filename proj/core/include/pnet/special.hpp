#pragma once

namespace pnet::special {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value P(|T| >= |t|) for Student's t with `df` degrees of
/// freedom; df = +inf falls back to the standard normal.
double t_two_sided_p(double t, double df);

double digamma(double x);
double trigamma(double x);
double tetragamma(double x);

/// y such that trigamma(y) = x, for x > 0 (Newton iteration on 1/trigamma).
double trigamma_inverse(double x);

}  // namespace pnet::special
