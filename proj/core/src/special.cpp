#include "pnet/special.hpp"

#include <cmath>
#include <limits>

#include "pnet/error.hpp"

namespace pnet::special {

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 10000;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) {
            return h;
        }
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw ArgumentError("incomplete_beta needs a > 0 and b > 0");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ArgumentError("incomplete_beta needs x in [0, 1]");
    }
    if (x == 0.0 || x == 1.0) {
        return x;
    }
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The fraction converges fast for x < (a + 1) / (a + b + 2); use the
    // symmetry I_x(a, b) = 1 - I_{1-x}(b, a) elsewhere.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, double df) {
    if (std::isnan(t) || !(df > 0.0)) {
        throw ArgumentError("t_two_sided_p needs a finite statistic and df > 0");
    }
    if (std::isinf(t)) {
        return 0.0;
    }
    if (std::isinf(df)) {
        return std::erfc(std::fabs(t) / std::sqrt(2.0));
    }
    const double x = df / (df + t * t);
    double p = 0.0;
    if (x > 0.5) {
        // Avoid cancellation in df + t^2 for small t: 1 - x = t^2 / (df + t^2).
        p = 1.0 - incomplete_beta(0.5, 0.5 * df, t * t / (df + t * t));
    } else {
        p = incomplete_beta(0.5 * df, 0.5, x);
    }
    return std::fmin(1.0, std::fmax(0.0, p));
}

double digamma(double x) {
    if (!(x > 0.0)) {
        throw ArgumentError("digamma implemented for x > 0 only");
    }
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    // Asymptotic series with Bernoulli-number coefficients.
    result += std::log(x) - 0.5 / x -
              f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f * (1.0 / 132 - f * (691.0 / 32760 - f / 12))))));
    return result;
}

double trigamma(double x) {
    if (!(x > 0.0)) {
        throw ArgumentError("trigamma implemented for x > 0 only");
    }
    double result = 0.0;
    while (x < 10.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    result += 1.0 / x + f / 2.0 +
              f / x * (1.0 / 6 - f * (1.0 / 30 - f * (1.0 / 42 - f * (1.0 / 30 - f * (5.0 / 66 - f * (691.0 / 2730 - f * 7.0 / 6))))));
    return result;
}

double tetragamma(double x) {
    if (!(x > 0.0)) {
        throw ArgumentError("tetragamma implemented for x > 0 only");
    }
    double result = 0.0;
    while (x < 10.0) {
        result -= 2.0 / (x * x * x);
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    result += -f - 1.0 / (x * x * x) -
              f * f * (0.5 - f * (1.0 / 6 - f * (1.0 / 6 - f * (3.0 / 10 - f * (5.0 / 6 - f * (691.0 / 210 - f * 35.0 / 2))))));
    return result;
}

double trigamma_inverse(double x) {
    if (!(x > 0.0)) {
        throw ArgumentError("trigamma_inverse needs x > 0");
    }
    if (x > 1e7) {
        return 1.0 / std::sqrt(x);
    }
    if (x < 1e-6) {
        return 1.0 / x;
    }
    double y = 0.5 + 1.0 / x;
    for (int iter = 0; iter < 50; ++iter) {
        const double tri = trigamma(y);
        const double dif = tri * (1.0 - tri / x) / tetragamma(y);
        y += dif;
        if (-dif / y < 1e-8) {
            break;
        }
    }
    return y;
}

}  // namespace pnet::special
