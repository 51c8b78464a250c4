#pragma once

#include <cmath>
#include <cstdint>

namespace randsum {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::int64_t evaluations = 0;
    double range_end = 0.0; // where a semi-infinite integration actually stopped
    bool converged = true;  // every panel met its error target
    bool diverged = false;  // contributions kept growing or overflowed

    /// Usable result: not divergent, and either fully converged or carrying an
    /// error estimate below `rel` of the value.
    bool acceptable(double rel = 1e-6) const {
        return !diverged && std::isfinite(value) &&
               (converged || abs_error <= rel * std::fabs(value));
    }
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1].
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGk15KronrodW[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGk15GaussW[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15_panel(const F& f, double a, double b, double& kronrod, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_mid = f(mid);
    double result_gauss = kGk15GaussW[3] * f_mid;
    double result_kronrod = kGk15KronrodW[7] * f_mid;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGk15Nodes[i];
        const double f_sum = f(mid - dx) + f(mid + dx);
        result_kronrod += kGk15KronrodW[i] * f_sum;
        if (i % 2 == 1) result_gauss += kGk15GaussW[i / 2] * f_sum;
    }
    kronrod = result_kronrod * half;
    err = std::fabs((result_kronrod - result_gauss) * half);
}

template <class F>
void adapt(const F& f, double a, double b, double abs_tol, int depth, QuadResult& out,
           std::int64_t budget) {
    double v, e;
    gk15_panel(f, a, b, v, e);
    out.evaluations += 15;
    if (!std::isfinite(v) || !std::isfinite(e)) { // overflowing integrand: report, don't split
        out.value = v;
        out.converged = false;
        out.diverged = true;
        return;
    }
    if (e <= abs_tol || depth >= 50 || out.evaluations > budget ||
        !(b - a > 1e-15 * (std::fabs(a) + std::fabs(b) + 1.0))) {
        out.value += v;
        out.abs_error += e;
        if (e > abs_tol && (depth >= 50 || out.evaluations > budget)) out.converged = false;
        return;
    }
    const double mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * abs_tol, depth + 1, out, budget);
    if (out.diverged) return;
    adapt(f, mid, b, 0.5 * abs_tol, depth + 1, out, budget);
}

} // namespace detail

/// Adaptive Gauss-Kronrod integral of f over [a, b]. `budget` caps the number
/// of integrand evaluations; hitting it reports converged = false.
template <class F>
QuadResult integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 1e-14, std::int64_t budget = 200000) {
    QuadResult out;
    if (!(b > a)) return out;
    // one probe pass sets the absolute target from the rough magnitude
    double v, e;
    detail::gk15_panel(f, a, b, v, e);
    if (!std::isfinite(v)) {
        out.value = v;
        out.converged = false;
        out.diverged = true;
        return out;
    }
    const double target = std::max(abs_tol, rel_tol * std::fabs(v));
    detail::adapt(f, a, b, target, 0, out, budget);
    return out;
}

/// Integral of f over [a, +inf) by panels of geometrically growing width.
/// Divergence (panel contributions that stop shrinking) is reported via
/// converged = false rather than looping forever.
template <class F>
QuadResult integrate_to_infinity(const F& f, double a, double rel_tol = 1e-10,
                                 double abs_tol = 1e-300, double initial_span = 1.0) {
    QuadResult out;
    double lo = a;
    double span = initial_span;
    double prev_abs = 0.0;
    int shrinking_streak = 0;
    int growth_streak = 0;
    for (int panel = 0; panel < 400; ++panel) {
        const QuadResult piece = integrate(f, lo, lo + span, rel_tol, abs_tol);
        out.value += piece.value;
        out.abs_error += piece.abs_error;
        out.evaluations += piece.evaluations;
        out.converged = out.converged && piece.converged;
        out.range_end = lo + span;
        if (piece.diverged || !std::isfinite(out.value)) {
            out.converged = false;
            out.diverged = true;
            return out;
        }
        const double mag = std::fabs(piece.value);
        if (panel > 0 && mag > prev_abs) {
            ++growth_streak;
            shrinking_streak = 0;
        } else {
            ++shrinking_streak;
            growth_streak = 0;
        }
        // long sustained growth means the overflow guard will fire soon anyway;
        // the generous streak lets slowly-decaying (but integrable) tails through
        if (growth_streak >= 250 || !(std::fabs(out.value) < 1e290)) {
            out.converged = false;
            out.diverged = true;
            return out;
        }
        if (shrinking_streak >= 2 &&
            mag <= std::max(abs_tol, rel_tol * std::fabs(out.value)) && panel >= 2) {
            return out;
        }
        prev_abs = mag;
        lo += span;
        span *= 2.0;
    }
    out.converged = false;
    out.diverged = true; // never settled
    return out;
}

} // namespace randsum
