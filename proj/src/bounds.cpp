#include "randsum/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "randsum/errors.hpp"

namespace randsum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498948482;

// golden-section minimum of f over [lo, hi]; assumes near-unimodality there
template <class F>
double golden_min(const F& f, double lo, double hi, double x_tol, int max_iter = 200) {
    double a = lo, b = hi;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < max_iter && (b - a) > x_tol; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

} // namespace

std::string branch_name(BoundBranch b) {
    switch (b) {
    case BoundBranch::chebyshev:
        return "chebyshev";
    case BoundBranch::truncation:
        return "W";
    case BoundBranch::rate:
        return "chi-star";
    }
    return "?";
}

double truncation_bound(const TailFunction& tail, double x) {
    if (x <= 0.0) return 1.0;

    if (tail.kind() == TailFunction::Kind::bounded) {
        // M2(z) is b^2 below b and 0 from b on: the infimum sits either at z -> 0
        // (value b^2) or exactly at z = b (value exp(-x^2/(8 b^2)))
        const double b = tail.orlicz_spec()->ess_sup();
        const double best = std::min(b * b, std::exp(-x * x / (8.0 * b * b)));
        return std::min(1.0, 4.0 * best);
    }

    const auto objective = [&](double z) {
        return std::exp(-x * x / (8.0 * z * z)) + tail.second_moment_tail(z);
    };

    // candidate z nodes: the precomputed moment grid where available, a log grid otherwise
    std::vector<double> zs;
    std::vector<double> m2s;
    if (!tail.moment_nodes().empty()) {
        const auto nodes = tail.moment_nodes();
        const auto values = tail.moment_values();
        zs.assign(nodes.begin() + 1, nodes.end()); // skip z = 0
        m2s.assign(values.begin() + 1, values.end());
    } else {
        double z_hi = 1.0;
        for (double gx : tail.empirical_xs()) z_hi = std::max(z_hi, gx);
        z_hi *= 4.0;
        const double z_lo = z_hi * 1e-8;
        const int n = 512;
        const double step = std::log(z_hi / z_lo) / (n - 1);
        for (int i = 0; i < n; ++i) zs.push_back(z_lo * std::exp(step * i));
        for (double gx : tail.empirical_xs())
            if (gx > 0.0) zs.push_back(gx); // the atoms are where M2 jumps
        std::sort(zs.begin(), zs.end());
        m2s.reserve(zs.size());
        for (double z : zs) m2s.push_back(tail.second_moment_tail(z));
    }

    std::size_t best_i = 0;
    double best = kInf;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double v = std::exp(-x * x / (8.0 * zs[i] * zs[i])) + m2s[i];
        if (v < best) {
            best = v;
            best_i = i;
        }
    }
    if (!(best < kInf)) throw NumericalError("truncation_bound: no usable truncation level");

    // refine within the bracketing nodes on the exact objective
    const double lo = zs[best_i > 0 ? best_i - 1 : 0];
    const double hi = zs[std::min(best_i + 1, zs.size() - 1)];
    if (hi > lo) {
        const double z_star =
            std::exp(golden_min([&](double t) { return objective(std::exp(t)); }, std::log(lo),
                                std::log(hi), 1e-10));
        best = std::min(best, objective(z_star));
    }
    return std::min(1.0, 4.0 * best);
}

double sum_cumulant(const CumulantModel& model, double lambda) {
    lambda = std::fabs(lambda);
    if (lambda == 0.0) return 0.0;
    const double phi1 = model.log_mgf(lambda);
    if (!(phi1 < kInf)) return kInf; // n = 1 already infinite, so the sup is

    const auto h = [&](double t) { return t * model.log_mgf(lambda / std::sqrt(t)); };

    double best = phi1;
    double best_n = 1.0;
    // dense integer scan first, then geometric steps; stop after a long fall
    // past the peak or a long plateau (the limit candidate covers the tail)
    double prev = phi1;
    int falling = 0, flat = 0;
    double n = 1.0;
    while (n < 1e9) {
        n = (n < 256.0) ? n + 1.0 : std::ceil(n * 1.05);
        const double v = h(n);
        if (v > best) {
            best = v;
            best_n = n;
        }
        if (v < prev)
            ++falling;
        else
            falling = 0;
        if (std::fabs(v - prev) <= 1e-14 * (1.0 + std::fabs(v)))
            ++flat;
        else
            flat = 0;
        prev = v;
        if ((falling >= 50 && n > 4.0 * best_n) || flat >= 50) break;
    }
    // continuous refinement around the best scanned count (only adds candidates)
    const double t_star = std::exp(golden_min(
        [&](double logt) { return -h(std::exp(logt)); }, std::log(std::max(1.0, best_n / 2.0)),
        std::log(best_n * 2.0), 1e-10));
    best = std::max(best, h(std::max(1.0, t_star)));
    // n -> infinity limit of n phi(lambda/sqrt(n))
    best = std::max(best, 0.5 * model.variance() * lambda * lambda);
    return best;
}

RatePoint rate_function_detail(const CumulantModel& model, double x) {
    if (x <= 0.0 || model.cramer_radius() == 0.0) return {0.0, 0.0};

    const auto objective = [&](double lam) {
        const double chi = sum_cumulant(model, lam);
        return (chi < kInf) ? lam * x - chi : -kInf;
    };

    // start inside the finite-moment region, however small it is
    double hi = 1.0;
    double f_hi = objective(hi);
    while (!std::isfinite(f_hi) && hi > 1e-12) {
        hi *= 0.5;
        f_hi = objective(hi);
    }
    if (!std::isfinite(f_hi)) return {0.0, 0.0};
    // expand the bracket by factors of 4 while the objective keeps improving
    double f_half = objective(0.5 * hi);
    int expansions = 0;
    while (std::isfinite(f_hi) && f_hi >= f_half && expansions < 60) {
        f_half = f_hi;
        hi *= 4.0;
        f_hi = objective(hi);
        ++expansions;
    }
    if (!std::isfinite(f_hi)) {
        // shrink onto the finite region
        double good = hi / 4.0, bad = hi;
        for (int i = 0; i < 40; ++i) {
            const double mid = 0.5 * (good + bad);
            if (std::isfinite(objective(mid)))
                good = mid;
            else
                bad = mid;
        }
        hi = good;
    }
    const double lam_star =
        golden_min([&](double lam) { return -objective(lam); }, 0.0, hi, 1e-9 * (1.0 + hi));
    const double val = objective(lam_star);
    if (!(val > 0.0)) return {0.0, 0.0};
    return {val, lam_star};
}

double rate_function(const CumulantModel& model, double x) {
    return rate_function_detail(model, x).value;
}

BranchValue uniform_sum_bound(const TailFunction& tail, const CumulantModel& model, double x) {
    const double second = tail.second_moment();
    const double cheb = (x > 0.0) ? std::min(1.0, second / (x * x)) : 1.0;
    const double trunc = truncation_bound(tail, x);
    const double chern = std::exp(-rate_function(model, x));
    BranchValue out;
    if (cheb <= trunc && cheb <= chern) {
        out = {cheb, BoundBranch::chebyshev};
    } else if (trunc <= chern) {
        out = {trunc, BoundBranch::truncation};
    } else {
        out = {chern, BoundBranch::rate};
    }
    return out;
}

namespace {

RandomSumDetail random_sum_series(const TailFunction& tail, const CumulantModel& model,
                                  const IndexLaw& law, double sigma, double x, double eps_tail) {
    if (!(sigma > 0.0)) throw DomainError("random_sum_bound: sigma must be positive");
    if (!(eps_tail > 0.0 && eps_tail < 0.1))
        throw DomainError("random_sum_bound: eps_tail must be in (0, 0.1)");
    if (!(x >= 0.0)) throw DomainError("random_sum_bound: x must be >= 0");

    const double mean = law.mean();
    double acc = 0.0, acc_c = 0.0;   // Kahan for the bound value
    double mass = 0.0, mass_c = 0.0; // Kahan for the accumulated index mass
    RandomSumDetail detail;
    double largest_term = -1.0;

    constexpr std::uint64_t kMaxTerms = 100000000ULL;
    for (std::uint64_t n = 1; n <= kMaxTerms; ++n) {
        const double q_n = law.pmf(n);
        if (q_n > 0.0) {
            const double y = sigma * x * std::sqrt(mean / static_cast<double>(n));
            const BranchValue term = uniform_sum_bound(tail, model, y);
            const double contribution = q_n * term.value;
            double yk = contribution - acc_c;
            double t = acc + yk;
            acc_c = (t - acc) - yk;
            acc = t;
            if (contribution > largest_term) {
                largest_term = contribution;
                detail.branch = term.branch;
                detail.dominant_n = n;
            }
            yk = q_n - mass_c;
            t = mass + yk;
            mass_c = (t - mass) - yk;
            mass = t;
        }
        const double remaining = std::max(0.0, 1.0 - mass);
        const std::uint64_t support_end = law.support_end();
        if (remaining < eps_tail || (support_end > 0 && n >= support_end)) {
            acc += remaining; // worst case for the untouched terms
            break;
        }
        if (n == kMaxTerms)
            throw NumericalError("random_sum_bound: series did not reach the mass target");
    }
    const double mixture_cheb =
        (x > 0.0) ? tail.second_moment() / (sigma * sigma * x * x) : 1.0;
    detail.value = std::min({acc, 1.0, mixture_cheb});
    return detail;
}

} // namespace

double random_sum_bound(const TailFunction& tail, const CumulantModel& model, const IndexLaw& law,
                        double sigma, double x, double eps_tail) {
    return random_sum_series(tail, model, law, sigma, x, eps_tail).value;
}

RandomSumDetail random_sum_bound_detail(const TailFunction& tail, const CumulantModel& model,
                                        const IndexLaw& law, double sigma, double x,
                                        double eps_tail) {
    return random_sum_series(tail, model, law, sigma, x, eps_tail);
}

std::uint64_t dominant_index(const IndexLaw& law, SumExponents exps, double x, double c,
                             double c2) {
    if (law.kind() != IndexLaw::Kind::geometric && law.kind() != IndexLaw::Kind::shifted_poisson)
        throw DomainError("dominant_index: only geometric and shifted-Poisson index laws");
    if (!(x >= 2.0)) throw DomainError("dominant_index: x must be >= 2");
    const double mean = law.mean();
    const auto log_term = [&](std::uint64_t n) {
        const double nn = static_cast<double>(n);
        double log_q;
        if (law.kind() == IndexLaw::Kind::geometric) {
            log_q = -std::log(mean) + (nn - 1.0) * std::log1p(-1.0 / mean);
        } else {
            const double b = mean - 1.0;
            log_q = -b + (nn - 1.0) * std::log(b) - std::lgamma(nn);
        }
        const double y = x * std::sqrt(mean / nn);
        const double expo =
            c * std::pow(y, exps.power) * std::pow(std::log(c2 + y), exps.log_power);
        return log_q - expo;
    };
    return detail::scan_argmax(log_term, 1, 10000000ULL);
}

double closed_form_geometric_bound(SumExponents exps, double c, double cap, double x) {
    if (!(x >= 2.0)) throw DomainError("closed_form_geometric_bound: x must be >= 2");
    if (!(c > 0.0 && cap > 0.0))
        throw DomainError("closed_form_geometric_bound: constants must be positive");
    const double xp = 2.0 * exps.power / (exps.power + 2.0);
    const double lp = 2.0 * exps.log_power / (exps.power + 2.0);
    return std::min(1.0, cap * std::exp(-c * std::pow(x, xp) * std::pow(std::log(x), lp)));
}

double closed_form_poisson_bound(SumExponents exps, double c, double cap, double x) {
    if (!(x >= 2.0)) throw DomainError("closed_form_poisson_bound: x must be >= 2");
    if (!(c > 0.0 && cap > 0.0))
        throw DomainError("closed_form_poisson_bound: constants must be positive");
    const double xp = 2.0 * exps.power / (exps.power + 2.0);
    const double lp = (2.0 * exps.log_power + exps.power) / (exps.power + 2.0);
    return std::min(1.0, cap * std::exp(-c * std::pow(x, xp) * std::pow(std::log(x), lp)));
}

double StoppedSumExponents::moment_curve(double p) const {
    return std::pow(p, moment_power()) * std::pow(std::log(p), moment_log_power());
}

StoppedSumExponents stopped_sum_exponents(double a, double b, double m, double r) {
    if (!(a > 0.0)) throw DomainError("stopped_sum_exponents: a must be positive");
    if (!(m > 0.0)) throw DomainError("stopped_sum_exponents: m must be positive");
    // q comes from 1/q = 1 + 1/(2a) + 1/m, and w/q = 1 + r + b/(2a); both stay
    // finite under the a = +inf or m = +inf sentinels (bounded laws)
    const double inv_2a = (a == kInf) ? 0.0 : 1.0 / (2.0 * a);
    const double inv_m = (m == kInf) ? 0.0 : 1.0 / m;
    StoppedSumExponents out;
    out.q = 1.0 / (1.0 + inv_2a + inv_m);
    out.w = out.q * (1.0 + r + b * inv_2a);
    return out;
}

std::vector<MomentGrowthRow> moment_growth_comparison(double m, std::span<const double> p_grid) {
    if (!(m > 1.0)) throw DomainError("moment_growth_comparison: m must be > 1");
    std::vector<MomentGrowthRow> rows;
    rows.reserve(p_grid.size());
    const double inv_m = (m == kInf) ? 0.0 : 1.0 / m;
    for (double p : p_grid) {
        if (!(p >= 2.0)) throw DomainError("moment_growth_comparison: p must be >= 2");
        MomentGrowthRow row;
        row.p = p;
        row.curve_main = std::pow(p, 0.5 + 1.0 / std::min(m, 2.0)) / std::sqrt(std::log(p));
        row.curve_ref_log = std::pow(p, 1.0 + inv_m) / std::log(p);
        row.curve_ref_root_log = std::pow(p, 1.0 + inv_m) / std::sqrt(std::log(p));
        rows.push_back(row);
    }
    return rows;
}

BoundCurve compute_bound_curve(const TailFunction& tail, const CumulantModel& model,
                               const IndexLaw& law, double sigma, std::span<const double> x_grid,
                               double eps_tail) {
    BoundCurve curve;
    curve.x.reserve(x_grid.size());
    for (double x : x_grid) {
        const RandomSumDetail d = random_sum_bound_detail(tail, model, law, sigma, x, eps_tail);
        curve.x.push_back(x);
        curve.value.push_back(d.value);
        curve.branch.push_back(d.branch);
        curve.dominant_n.push_back(d.dominant_n);
    }
    for (std::size_t i = 1; i < curve.value.size(); ++i)
        curve.value[i] = std::min(curve.value[i], curve.value[i - 1]);
    return curve;
}

} // namespace randsum
