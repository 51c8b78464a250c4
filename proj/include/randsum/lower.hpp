#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "randsum/bounds.hpp"
#include "randsum/index_law.hpp"
#include "randsum/mc.hpp"
#include "randsum/orlicz.hpp"

namespace randsum {

/// The two-point index construction showing the x^{-2} floor for normal summands:
/// eta is 2 with probability 1 - alpha and k = floor(x^2) with probability
/// alpha = 1/k, so the mean is 3 - 2*alpha >= 25/9.
struct TwoPointConstruction {
    double x = 3.0;
    std::uint64_t k = 9;
    double alpha = 1.0 / 9.0;
    double mean = 25.0 / 9.0;
    IndexLaw law = IndexLaw::two_point(9);

    static TwoPointConstruction for_level(double x); // requires x >= 3
};

struct TwoPointTail {
    double exact = 0.0;         // P(S > x), closed-form normal mixture
    double heavy_term = 0.0;    // the alpha * (k-summand) contribution alone
    double floor_value = 0.0;   // x^{-2} * Psi(3 sqrt(3/8)) comparison floor
};

/// Exact tail of the construction with standard normal summands.
TwoPointTail exact_two_point_tail(double x);

struct OverlayRow {
    double x = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Closed-form lower/upper envelope pair for the Poisson index (same exponents
/// on both sides; only constants differ).
std::vector<OverlayRow> poisson_lower_overlay(SumExponents exps, double c_lower, double cap_lower,
                                              double c_upper, double cap_upper,
                                              std::span<const double> x_grid);

struct GeometricLowerOptions {
    double ci_level = 0.99;
    double min_expected_hits = 100.0;
    int threads = 1;
};

/// Monte Carlo tail of the compound geometric sum with symmetric sub-exponential
/// summands (m > 1 required), used to demonstrate that the upper bound's
/// exponents are not improvable. Every requested x must pass the expected-hit
/// gate, computed from the matching upper bound; otherwise a domain error names
/// the feasible range.
EmpiricalTail geometric_lower_tail_mc(const OrliczTailSpec& spec, double mean,
                                      std::span<const double> x_grid, std::uint64_t n_samples,
                                      std::uint64_t seed, const GeometricLowerOptions& options = {});

} // namespace randsum
