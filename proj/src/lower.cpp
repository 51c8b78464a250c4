#include "randsum/lower.hpp"

#include <cmath>
#include <string>

#include "randsum/errors.hpp"
#include "randsum/special.hpp"

namespace randsum {

TwoPointConstruction TwoPointConstruction::for_level(double x) {
    if (!(x >= 3.0)) throw DomainError("TwoPointConstruction: x must be >= 3");
    TwoPointConstruction c;
    c.x = x;
    c.k = static_cast<std::uint64_t>(std::floor(x * x));
    c.alpha = 1.0 / static_cast<double>(c.k);
    c.mean = 3.0 - 2.0 * c.alpha;
    c.law = IndexLaw::two_point(c.k);
    return c;
}

TwoPointTail exact_two_point_tail(double x) {
    const TwoPointConstruction c = TwoPointConstruction::for_level(x);
    // given eta = n, S is exactly N(0, n / A), so each branch is a normal tail
    const double a = c.mean;
    const double light = (1.0 - c.alpha) * normal_upper_tail(x * std::sqrt(a / 2.0));
    const double heavy =
        c.alpha * normal_upper_tail(x * std::sqrt(a / static_cast<double>(c.k)));
    TwoPointTail out;
    out.exact = light + heavy;
    out.heavy_term = heavy;
    out.floor_value = normal_upper_tail(3.0 * std::sqrt(3.0 / 8.0)) / (x * x);
    return out;
}

std::vector<OverlayRow> poisson_lower_overlay(SumExponents exps, double c_lower, double cap_lower,
                                              double c_upper, double cap_upper,
                                              std::span<const double> x_grid) {
    std::vector<OverlayRow> rows;
    rows.reserve(x_grid.size());
    for (double x : x_grid) {
        OverlayRow row;
        row.x = x;
        row.lower = closed_form_poisson_bound(exps, c_lower, cap_lower, x);
        row.upper = closed_form_poisson_bound(exps, c_upper, cap_upper, x);
        rows.push_back(row);
    }
    return rows;
}

EmpiricalTail geometric_lower_tail_mc(const OrliczTailSpec& spec, double mean,
                                      std::span<const double> x_grid, std::uint64_t n_samples,
                                      std::uint64_t seed, const GeometricLowerOptions& options) {
    if (!(spec.m() > 1.0))
        throw DomainError("geometric_lower_tail_mc: requires summand shape m > 1");
    CompoundSpec compound{SummandLaw::orlicz(spec), IndexLaw::geometric(mean)};

    // gate on the matching upper bound: if even N * bound < the hit target, the
    // point is hopeless and the whole request is rejected with the feasible range
    const CumulantModel model = compound.summand.make_cumulant();
    const double sigma = compound.sd();
    std::vector<double> gate;
    gate.reserve(x_grid.size());
    double feasible_up_to = 0.0;
    bool all_ok = true;
    for (double x : x_grid) {
        const double bound = random_sum_bound(compound.summand.tail(), model,
                                              compound.index, sigma, x);
        gate.push_back(bound);
        const bool ok = bound * static_cast<double>(n_samples) >= options.min_expected_hits;
        if (ok)
            feasible_up_to = std::max(feasible_up_to, x);
        else
            all_ok = false;
    }
    if (!all_ok)
        throw DomainError("geometric_lower_tail_mc: expected hits below " +
                          std::to_string(options.min_expected_hits) +
                          " at the largest x; feasible x range for this N ends near " +
                          std::to_string(feasible_up_to));

    SimulateOptions sim;
    sim.ci_level = options.ci_level;
    sim.threads = options.threads;
    sim.min_expected_hits = options.min_expected_hits;
    sim.gate_bounds = std::move(gate);
    return simulate_tail(compound, x_grid, n_samples, seed, sim);
}

} // namespace randsum
