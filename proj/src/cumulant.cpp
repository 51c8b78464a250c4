#include "randsum/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "randsum/errors.hpp"
#include "randsum/quadrature.hpp"

namespace randsum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPhiCap = 750.0; // beyond this the Chernoff branch is exp(-750) ~ 0

double log_cosh(double t) {
    t = std::fabs(t);
    if (t > 20.0) return t + std::log1p(std::exp(-2.0 * t)) - 0.6931471805599453;
    const double s = std::sinh(0.5 * t); // cosh(t) - 1 = 2 sinh^2(t/2), exact near 0
    return std::log1p(2.0 * s * s);
}

/// log E exp(lambda xi) for the symmetric law with two-sided tail T:
/// E cosh(lambda |xi|) = 1 + int_0^inf lambda sinh(lambda y) T(y) dy.
/// Returns +inf when the integral diverges (or overflows).
double phi_from_tail(const TailFunction& tail, double lambda) {
    lambda = std::fabs(lambda);
    if (lambda == 0.0) return 0.0;
    if (tail.kind() == TailFunction::Kind::empirical) {
        // atomic law: E cosh(lambda |xi|) is an exact finite sum over the atoms
        const auto xs = tail.empirical_xs();
        const auto ts = tail.empirical_ts();
        double hi = -kInf;
        std::vector<double> terms;
        terms.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double mass = (i == 0 ? 1.0 : ts[i - 1]) - ts[i];
            if (mass <= 0.0) continue;
            const double term = std::log(mass) + log_cosh(lambda * xs[i]);
            terms.push_back(term);
            hi = std::max(hi, term);
        }
        double acc = 0.0;
        for (double t : terms) acc += std::exp(t - hi);
        return hi + std::log(acc);
    }
    const auto integrand = [&](double y) {
        const double t = tail(y);
        if (t <= 0.0) return 0.0; // no mass out here, whatever sinh does
        const double a = lambda * y;
        if (a < 700.0) return lambda * std::sinh(a) * t;
        return std::exp(std::log(0.5 * lambda) + a + std::log(t)); // sinh ~ e^a / 2
    };
    const auto integral =
        integrate_to_infinity(integrand, 0.0, 1e-9, 1e-300, std::max(0.25, 1.0 / lambda));
    if (!integral.acceptable(1e-6) || !(integral.value < 1e290)) return kInf;
    // the quadrature can settle before a far-tail blowup becomes representable
    // (heavier-than-exponential tails): probe the region it never reached and
    // call the moment infinite if non-negligible mass shows up out there
    const double negligible = std::log(1e-9 * (1.0 + integral.value));
    for (double y = std::max(1.0, integral.range_end); y < 1e300; y *= 2.0) {
        const double t = tail(y);
        if (t <= 0.0) break;
        // log of the rough [y, 2y] contribution lambda sinh(lambda y) T(y) y
        if (std::log(0.5 * lambda) + lambda * y + std::log(t) + std::log(y) > negligible)
            return kInf;
    }
    return std::log1p(integral.value);
}

} // namespace

CumulantModel CumulantModel::normal(double sd) {
    if (!(sd > 0.0)) throw DomainError("CumulantModel::normal: sd must be positive");
    CumulantModel m;
    m.kind_ = Kind::normal;
    m.scale_ = sd;
    m.variance_ = sd * sd;
    m.radius_ = kInf;
    return m;
}

CumulantModel CumulantModel::two_point(double magnitude) {
    if (!(magnitude > 0.0)) throw DomainError("CumulantModel::two_point: magnitude must be positive");
    CumulantModel m;
    m.kind_ = Kind::two_point;
    m.scale_ = magnitude;
    m.variance_ = magnitude * magnitude;
    m.radius_ = kInf;
    return m;
}

CumulantModel CumulantModel::from_tail(const TailFunction& tail) {
    CumulantModel m;
    m.kind_ = Kind::table;
    m.variance_ = tail.second_moment();

    // find the largest lambda with a finite, sub-cap phi
    double hi = 1.0;
    double phi_hi = phi_from_tail(tail, hi);
    if (!(phi_hi < kPhiCap)) {
        // shrink until finite or give up (Cramer condition fails)
        while (hi > 1e-8) {
            hi *= 0.5;
            phi_hi = phi_from_tail(tail, hi);
            if (phi_hi < kPhiCap) break;
        }
        if (!(phi_hi < kPhiCap)) {
            m.radius_ = 0.0;
            return m;
        }
    } else {
        while (hi < 1e9) {
            const double next = hi * 2.0;
            const double phi_next = phi_from_tail(tail, next);
            if (!(phi_next < kPhiCap)) break;
            hi = next;
            phi_hi = phi_next;
        }
    }
    // refine the usable endpoint between hi (good) and 2*hi (bad or cap)
    double lo = hi;
    double bad = hi * 2.0;
    for (int i = 0; i < 12; ++i) {
        const double mid = 0.5 * (lo + bad);
        if (phi_from_tail(tail, mid) < kPhiCap)
            lo = mid;
        else
            bad = mid;
    }
    const double lambda_end = lo;

    constexpr int kNodes = 1024;
    const double lambda_first = lambda_end * 1e-6;
    const double step = std::log(lambda_end / lambda_first) / (kNodes - 1);
    m.nodes_.reserve(kNodes);
    m.psi_.reserve(kNodes);
    for (int i = 0; i < kNodes; ++i) {
        const double lam = lambda_first * std::exp(step * i);
        const double phi = phi_from_tail(tail, lam);
        if (!(phi < kInf)) break; // truncate table at first divergence
        m.nodes_.push_back(lam);
        m.psi_.push_back(phi / (lam * lam));
    }
    if (m.nodes_.empty()) {
        m.radius_ = 0.0;
        return m;
    }
    m.radius_ = m.nodes_.back();
    return m;
}

CumulantModel CumulantModel::from_samples(std::vector<double> samples) {
    if (samples.empty()) throw DomainError("CumulantModel::from_samples: empty sample");
    CumulantModel m;
    m.kind_ = Kind::samples;
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    m.variance_ = var / static_cast<double>(samples.size());
    m.radius_ = kInf; // finite sample: empirical mgf always exists
    m.samples_ = std::move(samples);
    return m;
}

double CumulantModel::exact_table_phi(double lambda) const {
    // interpolate psi = phi / lambda^2 in log(lambda); psi(0+) = variance/2
    if (lambda <= nodes_.front()) {
        const double w = lambda / nodes_.front();
        const double psi = (1.0 - w) * 0.5 * variance_ + w * psi_.front();
        return psi * lambda * lambda;
    }
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), lambda);
    std::size_t j = static_cast<std::size_t>(it - nodes_.begin());
    if (nodes_.size() < 3) return psi_[std::min(j, psi_.size() - 1)] * lambda * lambda;
    // three-point parabola through the bracketing nodes
    if (j + 1 >= nodes_.size()) j = nodes_.size() - 2;
    const double u = std::log(lambda);
    const double u0 = std::log(nodes_[j - 1]), u1 = std::log(nodes_[j]),
                 u2 = std::log(nodes_[j + 1]);
    const double l0 = (u - u1) * (u - u2) / ((u0 - u1) * (u0 - u2));
    const double l1 = (u - u0) * (u - u2) / ((u1 - u0) * (u1 - u2));
    const double l2 = (u - u0) * (u - u1) / ((u2 - u0) * (u2 - u1));
    const double psi = l0 * psi_[j - 1] + l1 * psi_[j] + l2 * psi_[j + 1];
    return psi * lambda * lambda;
}

double CumulantModel::log_mgf(double lambda) const {
    lambda = std::fabs(lambda);
    if (lambda == 0.0) return 0.0;
    switch (kind_) {
    case Kind::normal:
        return 0.5 * variance_ * lambda * lambda;
    case Kind::two_point:
        return log_cosh(scale_ * lambda);
    case Kind::table:
        if (radius_ == 0.0 || lambda > radius_) return kInf;
        return exact_table_phi(lambda);
    case Kind::samples: {
        // stable log-mean-exp, maximized over the sign
        double best = -kInf;
        for (double sign : {1.0, -1.0}) {
            double hi = -kInf;
            for (double v : samples_) hi = std::max(hi, sign * lambda * v);
            double acc = 0.0;
            for (double v : samples_) acc += std::exp(sign * lambda * v - hi);
            best = std::max(best, hi + std::log(acc / static_cast<double>(samples_.size())));
        }
        return best;
    }
    }
    return kInf;
}

bool CumulantModel::small_lambda_ok() const {
    const double lam = 1e-3;
    const double expected = 0.5 * variance_ * lam * lam;
    const double got = log_mgf(lam);
    return std::isfinite(got) && std::fabs(got - expected) <= 1e-4 * expected;
}

std::string CumulantModel::describe() const {
    switch (kind_) {
    case Kind::normal:
        return "normal(sd=" + std::to_string(scale_) + ")";
    case Kind::two_point:
        return "two_point(+-" + std::to_string(scale_) + ")";
    case Kind::table:
        return "tail_table(radius=" + std::to_string(radius_) + ")";
    case Kind::samples:
        return "samples(n=" + std::to_string(samples_.size()) + ")";
    }
    return "?";
}

} // namespace randsum
