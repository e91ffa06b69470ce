#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "scriptor/error.hpp"

namespace scriptor {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
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
    throw Error("incomplete beta: continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(x)) throw DomainError("incomplete beta: non-finite argument");
    if (a <= 0 || b <= 0) throw DomainError("incomplete beta: shape parameters must be positive");
    if (x < 0 || x > 1) throw DomainError("incomplete beta: x must be in [0, 1]");
    if (x == 0) return 0.0;
    if (x == 1) return 1.0;

    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(X > f) for X ~ F(d1, d2).
inline double f_sf(double f, double d1, double d2) {
    if (!std::isfinite(f) || !std::isfinite(d1) || !std::isfinite(d2)) throw DomainError("f_sf: non-finite argument");
    if (d1 <= 0 || d2 <= 0) throw DomainError("f_sf: degrees of freedom must be positive");
    if (f <= 0) return 1.0;
    // Upper tail equals I_{d2/(d2+d1 f)}(d2/2, d1/2); the complement form keeps
    // precision when the tail is small.
    const double x = d2 / (d2 + d1 * f);
    return incomplete_beta(d2 / 2.0, d1 / 2.0, x);
}

/// P(T > t) for T ~ Student t(df).
inline double t_sf(double t, double df) {
    if (!std::isfinite(t) || !std::isfinite(df)) throw DomainError("t_sf: non-finite argument");
    if (df <= 0) throw DomainError("t_sf: degrees of freedom must be positive");
    if (t == 0) return 0.5;
    const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return t > 0 ? tail : 1.0 - tail;
}

}  // namespace scriptor
