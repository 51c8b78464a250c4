#include "randsum/special.hpp"

#include <cmath>
#include <limits>

#include "randsum/errors.hpp"

namespace randsum {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599;

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 3e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    // convergence needs O(sqrt(max(a, b))) terms; binomial intervals for 1e7
    // trials land here with a, b that large
    for (int m = 1; m <= 20000; ++m) {
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
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

} // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_upper_tail(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double normal_abs_tail(double x) {
    if (x <= 0.0) return 1.0;
    return std::erfc(x * kInvSqrt2);
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("inverse_normal_cdf: p must be in (0,1)");
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) *
                        r +
                    4.5921953931549871457e4) *
                       r +
                   1.3731693765509461125e4) *
                      r +
                  1.9715909503065514427e3) *
                     r +
                 1.3314166789178437745e2) *
                    r +
                3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) *
                        r +
                    2.1213794301586595867e4) *
                       r +
                   5.3941960214247511077e3) *
                      r +
                  6.8718700749205790830e2) *
                     r +
                 4.2313330701600911252e1) *
                    r +
                1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double result;
    if (r <= 5.0) {
        r -= 1.6;
        result = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                       2.41780725177450611770e-1) *
                          r +
                      1.27045825245236838258e0) *
                         r +
                     3.64784832476320460504e0) *
                        r +
                    5.76949722146069140550e0) *
                       r +
                   4.63033784615654529590e0) *
                      r +
                  1.42343711074968357734e0) /
                 (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                       1.51986665636164571966e-2) *
                          r +
                      1.48103976427480074590e-1) *
                         r +
                     6.89767334985100004550e-1) *
                        r +
                    1.67638483018380384940e0) *
                       r +
                   2.05319162663775882187e0) *
                      r +
                  1.0);
    } else {
        r -= 5.0;
        result = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                       1.24266094738807843860e-3) *
                          r +
                      2.65321895265761230930e-2) *
                         r +
                     2.96560571828504891230e-1) *
                        r +
                    1.78482653991729133580e0) *
                       r +
                   5.46378491116411436990e0) *
                      r +
                  6.65790464350110377720e0) /
                 (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                       1.84631831751005468180e-5) *
                          r +
                      7.86869131145613259100e-4) *
                         r +
                     1.48753612908506148525e-2) *
                        r +
                    1.36929880922735805310e-1) *
                       r +
                   5.99832206555887937690e-1) *
                      r +
                  1.0);
    }
    return (q < 0.0) ? -result : result;
}

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw DomainError("regularized_incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(x, a, b) / a;
    }
    return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double beta_quantile(double p, double a, double b) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("beta_quantile: p must be in [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (regularized_incomplete_beta(mid, a, b) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    return 0.5 * (lo + hi);
}

BinomialCi clopper_pearson(std::uint64_t hits, std::uint64_t n, double level) {
    if (n == 0) throw DomainError("clopper_pearson: n must be positive");
    if (hits > n) throw DomainError("clopper_pearson: hits exceed trials");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("clopper_pearson: level must be in (0,1)");
    const double alpha = 1.0 - level;
    const double k = static_cast<double>(hits);
    const double nn = static_cast<double>(n);
    BinomialCi ci;
    ci.low = (hits == 0) ? 0.0 : beta_quantile(alpha / 2.0, k, nn - k + 1.0);
    ci.high = (hits == n) ? 1.0 : beta_quantile(1.0 - alpha / 2.0, k + 1.0, nn - k);
    return ci;
}

} // namespace randsum
