#pragma once

#include <cstdint>

namespace randsum {

/// Standard normal density.
double normal_pdf(double x);

/// Upper tail P(Z >= x) of the standard normal, accurate into the far tail.
double normal_upper_tail(double x);

/// Two-sided tail P(|Z| > x) = erfc(x / sqrt(2)).
double normal_abs_tail(double x);

/// Normal quantile, Wichura's AS 241 (PPND16), ~1 ulp of double accuracy.
double inverse_normal_cdf(double p);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double x, double a, double b);

/// Inverse of I_x(a, b) in x for fixed (a, b).
double beta_quantile(double p, double a, double b);

struct BinomialCi {
    double low;
    double high;
};

/// Exact (Clopper-Pearson) two-sided binomial confidence interval for
/// `hits` successes out of `n` trials at confidence `level` (e.g. 0.99).
BinomialCi clopper_pearson(std::uint64_t hits, std::uint64_t n, double level);

} // namespace randsum
