#include "randsum/orlicz.hpp"

#include <algorithm>
#include <cmath>

#include "randsum/errors.hpp"
#include "randsum/quadrature.hpp"

namespace randsum {

SumExponents sum_exponents(double m, double r) {
    if (!(m > 0.0)) throw DomainError("sum_exponents: m must be positive");
    if (m == kInfiniteShape) return {2.0, 0.0};
    if (m < 1.0 || (m == 1.0 && r < 0.0)) return {2.0 * m / (m + 2.0), 2.0 * r / (m + 2.0)};
    if (m == 1.0) return {m, r}; // r >= 0
    if (m < 2.0) {
        if (r < 0.0) return {m, r};
        throw DomainError("sum_exponents: m in (1,2) with r >= 0 is not covered");
    }
    if (m == 2.0) {
        if (r >= 0.0) return {2.0, 0.0};
        throw DomainError("sum_exponents: m = 2 with r < 0 is not covered");
    }
    return {2.0, 0.0}; // m > 2
}

OrliczTailSpec::OrliczTailSpec(double m, double r, double c1, double c2)
    : m_(m), r_(r), c1_(c1), c2_(c2) {
    if (!(m > 0.0)) throw DomainError("OrliczTailSpec: m must be positive");
    if (m == kInfiniteShape)
        throw DomainError("OrliczTailSpec: use OrliczTailSpec::bounded for m = +inf");
    if (!(c1 > 0.0)) throw DomainError("OrliczTailSpec: c1 must be positive");
    if (!(c2 >= kDefaultLogShift))
        throw DomainError("OrliczTailSpec: c2 must be >= e");
    if (r < 0.0) {
        // monotone tail needs m log(c2+x) + r x/(c2+x) >= 0 everywhere; c2 at
        // least exp(-r/m) guarantees it (equals e exactly when r = -m)
        const double needed = std::exp(-r / m);
        if (c2 < needed * (1.0 - 1e-12))
            throw DomainError("OrliczTailSpec: monotone tail with r < 0 needs c2 >= exp(-r/m) = " +
                              std::to_string(needed));
    }
    // sigma^2 = integral of 2 y T(y) dy
    const auto second = integrate_to_infinity(
        [this](double y) { return 2.0 * y * tail(y); }, 0.0, 1e-11, 1e-300, 1.0);
    if (!second.acceptable(1e-9))
        throw NumericalError("OrliczTailSpec: second-moment quadrature did not converge");
    sd_ = std::sqrt(second.value);
}

OrliczTailSpec OrliczTailSpec::bounded(double ess_sup) {
    if (!(ess_sup > 0.0)) throw DomainError("OrliczTailSpec::bounded: ess_sup must be positive");
    OrliczTailSpec spec;
    spec.m_ = kInfiniteShape;
    spec.r_ = 0.0;
    spec.c1_ = 1.0;
    spec.c2_ = kDefaultLogShift;
    spec.ess_sup_ = ess_sup;
    spec.sd_ = ess_sup; // mass sits at +-ess_sup
    return spec;
}

double OrliczTailSpec::tail(double x) const {
    if (x <= 0.0) return 1.0;
    if (is_bounded()) return x < ess_sup_ ? 1.0 : 0.0;
    const double lg = std::log(c2_ + x);
    const double expo = c1_ * std::pow(x, m_) * std::pow(lg, r_);
    return std::min(1.0, std::exp(-expo));
}

double OrliczTailSpec::tail_inverse(double u) const {
    if (!(u > 0.0 && u <= 1.0)) throw DomainError("tail_inverse: u must be in (0,1]");
    if (is_bounded()) return ess_sup_;
    if (tail(0.0) <= u) return 0.0;
    // expand bracket geometrically, then bisect
    double lo = 0.0, hi = 1.0;
    int expansions = 0;
    while (tail(hi) > u) {
        lo = hi;
        hi *= 2.0;
        if (++expansions > 400) throw NumericalError("tail_inverse: bracket expansion failed");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double t = tail(mid);
        if (std::fabs(t - u) <= 1e-10) return mid;
        if (t > u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double OrliczTailSpec::sample_symmetric(Rng& rng) const {
    const double magnitude = is_bounded() ? ess_sup_ : tail_inverse(rng.uniform01());
    return rng.sign() * magnitude;
}

double orlicz_norm_estimate(std::span<const double> samples, double m, double r,
                            std::span<const double> p_grid) {
    if (samples.empty()) throw DomainError("orlicz_norm_estimate: samples must be non-empty");
    if (!(m > 0.0)) throw DomainError("orlicz_norm_estimate: m must be positive");
    double best = 0.0;
    for (double p : p_grid) {
        if (!(p >= 2.0)) throw DomainError("orlicz_norm_estimate: p grid values must be >= 2");
        double acc = 0.0;
        for (double v : samples) acc += std::pow(std::fabs(v), p);
        const double p_norm = std::pow(acc / static_cast<double>(samples.size()), 1.0 / p);
        const double weight = std::pow(p, -1.0 / m) * std::pow(std::log(p), r / m);
        best = std::max(best, p_norm * weight);
    }
    return best;
}

std::vector<double> default_p_grid() { return {2, 3, 4, 6, 8, 12, 16, 24, 32}; }

} // namespace randsum
