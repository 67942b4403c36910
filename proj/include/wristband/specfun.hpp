#pragma once

// Scalar special functions: log-gamma, regularized incomplete gamma, chi-squared
// CDF/PDF, exponentially scaled modified Bessel I, and the inverse normal CDF.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace wristband {

struct SpecFunResult {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

namespace specfun_detail {

inline constexpr int kMaxIterations = 500;
inline constexpr double kTolerance = 1e-15;

inline void check_finite(double v, const char* what) {
    if (std::isnan(v)) throw DomainError(std::string(what) + ": NaN argument");
}

// Stirling series, accurate to ~1e-15 absolute for a >= 10.
inline double stirling_log_gamma(double a) {
    const double inv = 1.0 / a;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 / 12.0 -
               inv2 * (1.0 / 360.0 -
                       inv2 * (1.0 / 1260.0 -
                               inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0 - inv2 * (691.0 / 360360.0))))));
    return (a - 0.5) * std::log(a) - a + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

}  // namespace specfun_detail

/// ln Gamma(a) for a > 0.
inline double log_gamma(double a) {
    specfun_detail::check_finite(a, "log_gamma");
    if (!(a > 0.0)) throw DomainError("log_gamma: argument must be positive");
    if (std::isinf(a)) return a;
    if (a >= 10.0) return specfun_detail::stirling_log_gamma(a);
    // shift up into the Stirling range; the product stays small for a < 10
    double shift = 1.0;
    double z = a;
    while (z < 10.0) {
        shift *= z;
        z += 1.0;
    }
    return specfun_detail::stirling_log_gamma(z) - std::log(shift);
}

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
///
/// Power series for x < a + 1, Lentz continued fraction for Q = 1 - P otherwise.
inline SpecFunResult reg_lower_gamma(double a, double x) {
    using namespace specfun_detail;
    check_finite(a, "reg_lower_gamma");
    check_finite(x, "reg_lower_gamma");
    if (!(a > 0.0)) throw DomainError("reg_lower_gamma: shape a must be positive");
    if (x < 0.0) throw DomainError("reg_lower_gamma: x must be nonnegative");
    if (x == 0.0) return {0.0, true, 0};
    if (std::isinf(x)) return {1.0, true, 0};

    const double log_prefactor = a * std::log(x) - x - log_gamma(a);

    if (x < a + 1.0) {
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int it = 1; it <= kMaxIterations; ++it) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * kTolerance) {
                return {std::min(1.0, sum * std::exp(log_prefactor)), true, it};
            }
        }
        return {std::min(1.0, sum * std::exp(log_prefactor)), false, kMaxIterations};
    }

    constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int it = 1; it <= kMaxIterations; ++it) {
        const double an = -it * (it - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kTolerance) {
            return {std::max(0.0, 1.0 - std::exp(log_prefactor) * h), true, it};
        }
    }
    return {std::max(0.0, 1.0 - std::exp(log_prefactor) * h), false, kMaxIterations};
}

/// CDF of chi-squared with d degrees of freedom.
inline double chi2_cdf(int d, double s) {
    if (d < 1) throw DomainError("chi2_cdf: degrees of freedom must be >= 1");
    const SpecFunResult r = reg_lower_gamma(0.5 * d, 0.5 * s);
    if (!r.converged) throw std::runtime_error("chi2_cdf: incomplete gamma did not converge");
    return r.value;
}

/// Density of chi-squared with d degrees of freedom, s > 0.
inline double chi2_pdf(int d, double s) {
    specfun_detail::check_finite(s, "chi2_pdf");
    if (d < 1) throw DomainError("chi2_pdf: degrees of freedom must be >= 1");
    if (!(s > 0.0)) throw DomainError("chi2_pdf: s must be positive");
    if (std::isinf(s)) return 0.0;
    const double k = 0.5 * d;
    return std::exp((k - 1.0) * std::log(s) - 0.5 * s - k * std::numbers::ln2 - log_gamma(k));
}

/// e^{-c} I_nu(c), the exponentially scaled modified Bessel function of the first kind.
///
/// Sums the ascending series outward from its largest term, all in log-scaled form,
/// so neither e^{-c} nor I_nu(c) is ever formed on its own. Every term is positive;
/// the work is O(sqrt(c) + 1).
inline double scaled_bessel_i(double nu, double c) {
    specfun_detail::check_finite(nu, "scaled_bessel_i");
    specfun_detail::check_finite(c, "scaled_bessel_i");
    if (nu < 0.0 || c < 0.0) throw DomainError("scaled_bessel_i: nu and c must be nonnegative");
    if (c == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    if (std::isinf(c)) return 0.0;

    const double q = 0.5 * c;
    const double q2 = q * q;
    const double y = 0.5 * (-nu + std::sqrt(nu * nu + c * c));
    const double peak = std::max(0.0, std::floor(y - 1.0 + 0.5));

    auto log_term = [&](double m) {
        return (2.0 * m + nu) * std::log(q) - log_gamma(m + 1.0) - log_gamma(m + nu + 1.0) - c;
    };

    double sum = 1.0;  // relative to the peak term
    double term = 1.0;
    for (double m = peak;; m += 1.0) {
        term *= q2 / ((m + 1.0) * (m + nu + 1.0));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    term = 1.0;
    for (double m = peak; m > 0.0; m -= 1.0) {
        term *= m * (m + nu) / q2;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return std::exp(log_term(peak)) * sum;
}

/// Standard normal CDF.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Standard normal quantile (rational initial guess refined by Halley steps on erfc).
inline double inv_norm_cdf(double p) {
    specfun_detail::check_finite(p, "inv_norm_cdf");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("inv_norm_cdf: p must lie in (0, 1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p == 0.5) return 0.0;
    for (int it = 0; it < 2; ++it) {
        // work on the smaller tail so erfc keeps relative precision
        const double e = (x < 0.0) ? norm_cdf(x) - p : (1.0 - p) - norm_cdf(-x);
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x = x - u / (1.0 + 0.5 * x * u);
    }
    return x;
}

}  // namespace wristband
