#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "randsum/orlicz.hpp"

namespace randsum {

/// Two-sided tail function T(x) = P(|xi| > x) of a symmetric summand law:
/// T(0) = 1, non-increasing, right-continuous, finite second moment.
///
/// Immutable after construction. The second moment and a log-spaced table of
/// truncated second moments are precomputed, so instances are cheap to share
/// across threads and the truncation-bound optimizer has an O(1) fast path.
class TailFunction {
public:
    enum class Kind { normal, orlicz, bounded, empirical };

    static TailFunction standard_normal();
    static TailFunction orlicz(const OrliczTailSpec& spec);
    /// Right-continuous step tail on a grid: T(x) = values[i] for xs[i] <= x < xs[i+1],
    /// T = 1 left of the grid. The last value must be exactly 0 (all mass located).
    static TailFunction empirical(std::vector<double> xs, std::vector<double> values);
    /// Two-column CSV "x,T" (header line optional, '#' comments skipped).
    static TailFunction empirical_from_csv(const std::string& path);

    double operator()(double x) const;

    Kind kind() const { return kind_; }
    const std::optional<OrliczTailSpec>& orlicz_spec() const { return spec_; }

    /// E[xi^2].
    double second_moment() const { return second_moment_; }

    /// Truncated second moment E[xi^2 1{|xi| > z}] = -integral of y^2 dT over (z, inf).
    /// Exact for step tails; adaptive quadrature of z^2 T(z) + 2*int_z^inf y T(y) dy
    /// otherwise. Non-increasing in z, equals second_moment() at z = 0.
    double second_moment_tail(double z) const;

    /// Precomputed nodes for optimizers: second_moment_tail at moment_nodes()[i]
    /// equals moment_values()[i]. Empty for empirical tails (those are exact anyway).
    std::span<const double> moment_nodes() const { return table_z_; }
    std::span<const double> moment_values() const { return table_m2_; }

    /// Step-grid columns (empty unless kind == empirical).
    std::span<const double> empirical_xs() const { return grid_x_; }
    std::span<const double> empirical_ts() const { return grid_t_; }

private:
    TailFunction() = default;
    void build_moment_table();
    double quadrature_tail_moment(double z) const;

    Kind kind_ = Kind::normal;
    std::optional<OrliczTailSpec> spec_;
    // empirical representation
    std::vector<double> grid_x_;
    std::vector<double> grid_t_;
    std::vector<double> suffix_m2_; // suffix sums of x_i^2 * mass_i
    double second_moment_ = 0.0;
    std::vector<double> table_z_;
    std::vector<double> table_m2_;
    std::vector<double> table_2j_; // integral of 2 y T(y) dy over [node_i, inf)
};

/// Free-function spelling of TailFunction::second_moment_tail.
double tail_second_moment(const TailFunction& tail, double z);

} // namespace randsum
