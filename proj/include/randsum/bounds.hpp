#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "randsum/cumulant.hpp"
#include "randsum/index_law.hpp"
#include "randsum/orlicz.hpp"
#include "randsum/tail_function.hpp"

namespace randsum {

/// Which ingredient produced the winning value of the combined bound.
enum class BoundBranch { chebyshev, truncation, rate };

/// Interface names used in CSV/JSON output.
std::string branch_name(BoundBranch b);

/// Truncation bound: min(1, 4 inf_z [exp(-x^2/(8 z^2)) + E(xi^2; |xi| > z)]).
/// The infimum is located on the tail's precomputed moment grid and refined by
/// golden section; the reported value only ever uses exact objective evaluations,
/// so it is a certified bound for every z candidate considered.
double truncation_bound(const TailFunction& tail, double x);

/// sup over n >= 1 of n * phi(lambda / sqrt(n)): the worst log-mgf among all
/// normalized n-summand sums. +infinity when the Chernoff machinery is unavailable.
double sum_cumulant(const CumulantModel& model, double lambda);

/// Legendre transform sup_lambda (lambda x - sum_cumulant(lambda)).
/// 0 when the exponential moment fails entirely (the rate branch then degenerates
/// to the trivial bound 1 and the truncation branch takes over).
double rate_function(const CumulantModel& model, double x);

struct RatePoint {
    double value = 0.0;
    double maximizer = 0.0; // optimal lambda; equals d(rate)/dx by convex duality
};
RatePoint rate_function_detail(const CumulantModel& model, double x);

struct BranchValue {
    double value = 1.0;
    BoundBranch branch = BoundBranch::chebyshev;
};

/// Combined bound on sup_n P(|n^{-1/2} sum xi| >= x): the minimum of the
/// truncation bound, exp(-rate), and the Chebyshev cap min(1, E xi^2 / x^2).
BranchValue uniform_sum_bound(const TailFunction& tail, const CumulantModel& model, double x);

struct RandomSumDetail {
    double value = 1.0;
    BoundBranch branch = BoundBranch::chebyshev; // branch of the dominant series term
    std::uint64_t dominant_n = 1;                // index of the largest series term
};

/// Certified upper bound for the two-sided tail of S = sum_{i<=eta} xi_i / (sigma sqrt(A)):
/// sum_n P(eta = n) * uniform_sum_bound(sigma x sqrt(A/n)), truncated once the
/// remaining index mass drops below eps_tail. The remainder enters at its worst
/// case value 1, so truncation never invalidates the bound.
double random_sum_bound(const TailFunction& tail, const CumulantModel& model, const IndexLaw& law,
                        double sigma, double x, double eps_tail = 1e-12);
RandomSumDetail random_sum_bound_detail(const TailFunction& tail, const CumulantModel& model,
                                        const IndexLaw& law, double sigma, double x,
                                        double eps_tail = 1e-12);

/// The summand count carrying the largest series term of the mixture bound, for
/// geometric or shifted-Poisson index laws (the discrete saddle point). Ties go
/// to the smaller count.
std::uint64_t dominant_index(const IndexLaw& law, SumExponents exps, double x, double c = 1.0,
                             double c2 = kDefaultLogShift);

/// Closed-form envelope for the geometric-index bound:
/// min(1, cap * exp(-c x^{2M/(M+2)} (log x)^{2L/(M+2)})), x >= 2.
double closed_form_geometric_bound(SumExponents exps, double c, double cap, double x);

/// Closed-form envelope for the Poisson-index bound; the log exponent gains
/// an extra M/(M+2): min(1, cap * exp(-c x^{2M/(M+2)} (log x)^{(2L+M)/(M+2)})).
double closed_form_poisson_bound(SumExponents exps, double c, double cap, double x);

/// Exponents (q, w) of the stopped-sum tail envelope exp(-C x^q log^w x) when the
/// stopping time has tail shape (m, r) and the summands tail shape (a, b).
/// a or m may be +infinity (bounded laws); then the 1/(2a) or 1/m terms vanish.
struct StoppedSumExponents {
    double q = 0.0;
    double w = 0.0;
    double moment_power() const { return 1.0 / q; }
    double moment_log_power() const { return -w / q; }
    /// The induced moment growth curve p^{1/q} (log p)^{-w/q}.
    double moment_curve(double p) const;
};
StoppedSumExponents stopped_sum_exponents(double a, double b, double m, double r);

struct MomentGrowthRow {
    double p = 0.0;
    double curve_main = 0.0;          // p^{1/2 + 1/min(m,2)} / sqrt(log p)
    double curve_ref_log = 0.0;       // p^{1 + 1/m} / log p
    double curve_ref_root_log = 0.0;  // p^{1 + 1/m} (log p)^{-1/2}
};

/// Reference moment-growth curves (constants set to 1) for report plotting.
std::vector<MomentGrowthRow> moment_growth_comparison(double m, std::span<const double> p_grid);

struct BoundCurve {
    std::vector<double> x;
    std::vector<double> value;
    std::vector<BoundBranch> branch;
    std::vector<std::uint64_t> dominant_n;
};

/// random_sum_bound over a grid; values are monotonized by a running minimum
/// (still certified: a bound at smaller x bounds every larger x as well).
BoundCurve compute_bound_curve(const TailFunction& tail, const CumulantModel& model,
                               const IndexLaw& law, double sigma, std::span<const double> x_grid,
                               double eps_tail = 1e-12);

namespace detail {
/// First argmax over {begin, ..., end-ish} of a scalar sequence; scanning stops
/// once the values have fallen for `patience` consecutive steps after the peak.
/// Ties keep the earlier index.
template <class F>
std::uint64_t scan_argmax(F&& value_at, std::uint64_t begin, std::uint64_t cap,
                          int patience = 200) {
    std::uint64_t best_n = begin;
    double best = value_at(begin);
    int falling = 0;
    double prev = best;
    for (std::uint64_t n = begin + 1; n <= cap; ++n) {
        const double v = value_at(n);
        if (v > best) {
            best = v;
            best_n = n;
        }
        falling = (v < prev) ? falling + 1 : 0;
        prev = v;
        if (falling >= patience && n > 4 * best_n) break;
    }
    return best_n;
}
} // namespace detail

} // namespace randsum
