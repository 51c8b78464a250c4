#pragma once

#include <limits>
#include <span>
#include <vector>

#include "randsum/rng.hpp"

namespace randsum {

inline constexpr double kInfiniteShape = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultLogShift = 2.718281828459045235360287471353; // keeps log(c2+x) >= 1

/// Exponents (power, log_power) of a tail envelope exp(-C x^power log^log_power x).
struct SumExponents {
    double power = 0.0;
    double log_power = 0.0;
    friend bool operator==(const SumExponents&, const SumExponents&) = default;
};

/// Tail exponents of the normalized n-summand sums when the summands have a
/// tail envelope exp(-c1 x^m log^r(c2+x)). Piecewise in (m, r); combinations
/// outside the supported table raise DomainError.
SumExponents sum_exponents(double m, double r);

/// Parametric sub-exponential tail family: P(|xi| > x) = exp(-c1 x^m log^r(c2 + x)),
/// plus the bounded sentinel m = +inf where the tail is the indicator {x < ess_sup}.
///
/// The summand standard deviation is derived from the tail at construction and cached.
class OrliczTailSpec {
public:
    OrliczTailSpec(double m, double r, double c1 = 1.0, double c2 = kDefaultLogShift);

    /// Bounded summands: |xi| <= ess_sup almost surely (samples are +-ess_sup).
    static OrliczTailSpec bounded(double ess_sup);

    double m() const { return m_; }
    double r() const { return r_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    double sd() const { return sd_; }
    bool is_bounded() const { return m_ == kInfiniteShape; }
    double ess_sup() const { return ess_sup_; }

    /// Two-sided tail P(|xi| > x); 1 at x = 0, non-increasing.
    double tail(double x) const;

    /// Smallest x with tail(x) <= u, by bisection on the monotone tail
    /// (absolute tolerance 1e-10 on the tail value).
    double tail_inverse(double u) const;

    /// Symmetric variate with this absolute-value tail.
    double sample_symmetric(Rng& rng) const;

    SumExponents exponents() const { return sum_exponents(m_, r_); }

private:
    OrliczTailSpec() = default;

    double m_ = 1.0, r_ = 0.0, c1_ = 1.0, c2_ = kDefaultLogShift;
    double ess_sup_ = 0.0; // only meaningful when m == +inf
    double sd_ = 0.0;
};

/// Grid estimator of the Orlicz-type norm sup_{p>=2} |tau|_p p^{-1/m} (log p)^{r/m}.
/// Consistent on the grid only; the true supremum is not computable from samples.
double orlicz_norm_estimate(std::span<const double> samples, double m, double r,
                            std::span<const double> p_grid);

/// Default moment grid {2, 3, 4, 6, 8, 12, 16, 24, 32}.
std::vector<double> default_p_grid();

} // namespace randsum
