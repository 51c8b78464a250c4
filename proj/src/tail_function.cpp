#include "randsum/tail_function.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "randsum/errors.hpp"
#include "randsum/quadrature.hpp"
#include "randsum/special.hpp"

namespace randsum {

TailFunction TailFunction::standard_normal() {
    TailFunction t;
    t.kind_ = Kind::normal;
    t.build_moment_table();
    return t;
}

TailFunction TailFunction::orlicz(const OrliczTailSpec& spec) {
    TailFunction t;
    t.kind_ = spec.is_bounded() ? Kind::bounded : Kind::orlicz;
    t.spec_ = spec;
    if (t.kind_ == Kind::bounded) {
        const double b = spec.ess_sup();
        t.second_moment_ = b * b;
    } else {
        t.build_moment_table();
    }
    return t;
}

TailFunction TailFunction::empirical(std::vector<double> xs, std::vector<double> values) {
    if (xs.size() != values.size() || xs.empty())
        throw DomainError("empirical tail: need equally sized, non-empty x and T columns");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] >= 0.0) || !std::isfinite(xs[i]))
            throw DomainError("empirical tail: x values must be finite and >= 0");
        if (i > 0 && !(xs[i] > xs[i - 1]))
            throw DomainError("empirical tail: x values must be strictly increasing");
        if (!(values[i] >= 0.0 && values[i] <= 1.0))
            throw DomainError("empirical tail: T values must lie in [0,1]");
        if (i > 0 && values[i] > values[i - 1] + 1e-12)
            throw DomainError("empirical tail: T values must be non-increasing");
    }
    if (values.back() > 1e-12)
        throw DomainError("empirical tail: last T value must be 0 (all mass located)");
    values.back() = 0.0;

    TailFunction t;
    t.kind_ = Kind::empirical;
    t.grid_x_ = std::move(xs);
    t.grid_t_ = std::move(values);
    // atom masses are the step drops; suffix sums give exact truncated second moments
    const std::size_t n = t.grid_x_.size();
    t.suffix_m2_.assign(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        const double prev = (i == 0) ? 1.0 : t.grid_t_[i - 1];
        const double mass = std::max(0.0, prev - t.grid_t_[i]);
        t.suffix_m2_[i] = t.suffix_m2_[i + 1] + t.grid_x_[i] * t.grid_x_[i] * mass;
    }
    t.second_moment_ = t.suffix_m2_[0];
    return t;
}

TailFunction TailFunction::empirical_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("empirical tail: cannot open " + path);
    std::vector<double> xs, ts;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream row(line);
        double x, t;
        if (!(row >> x >> t)) {
            if (first) { // header line
                first = false;
                continue;
            }
            throw DomainError("empirical tail: unparseable row in " + path + ": " + line);
        }
        first = false;
        xs.push_back(x);
        ts.push_back(t);
    }
    return empirical(std::move(xs), std::move(ts));
}

double TailFunction::operator()(double x) const {
    if (x <= 0.0) return 1.0;
    switch (kind_) {
    case Kind::normal:
        return normal_abs_tail(x);
    case Kind::orlicz:
    case Kind::bounded:
        return spec_->tail(x);
    case Kind::empirical: {
        // first grid point strictly beyond x; value of the step left of it
        const auto it = std::upper_bound(grid_x_.begin(), grid_x_.end(), x);
        if (it == grid_x_.begin()) return 1.0;
        return grid_t_[static_cast<std::size_t>(it - grid_x_.begin()) - 1];
    }
    }
    return 0.0;
}

double TailFunction::quadrature_tail_moment(double z) const {
    const double head = z * z * (*this)(z);
    // fast path: the construction pass left suffix integrals at every node, so
    // only the partial panel up to the next node needs fresh quadrature
    if (!table_z_.empty() && z <= table_z_.back()) {
        const auto it = std::upper_bound(table_z_.begin(), table_z_.end(), z);
        const std::size_t i = static_cast<std::size_t>(it - table_z_.begin());
        const auto partial = integrate([this](double y) { return 2.0 * y * (*this)(y); }, z,
                                       table_z_[i], 1e-11, 1e-300);
        if (partial.acceptable(1e-9)) return head + partial.value + table_2j_[i];
    }
    const double span = std::max(1.0, 0.25 * z);
    const auto integral = integrate_to_infinity(
        [this](double y) { return 2.0 * y * (*this)(y); }, z, 1e-11, 1e-300, span);
    if (!integral.acceptable(1e-9))
        throw NumericalError("second_moment_tail: quadrature did not converge at z = " +
                             std::to_string(z) + " after " +
                             std::to_string(integral.evaluations) + " evaluations");
    return head + integral.value;
}

double TailFunction::second_moment_tail(double z) const {
    if (z < 0.0) z = 0.0;
    switch (kind_) {
    case Kind::bounded: {
        const double b = spec_->ess_sup();
        return z < b ? b * b : 0.0;
    }
    case Kind::empirical: {
        const auto it = std::upper_bound(grid_x_.begin(), grid_x_.end(), z);
        return suffix_m2_[static_cast<std::size_t>(it - grid_x_.begin())];
    }
    case Kind::normal:
    case Kind::orlicz:
        return quadrature_tail_moment(z);
    }
    return 0.0;
}

void TailFunction::build_moment_table() {
    // locate where the tail has effectively vanished
    double z_hi = 1.0;
    int guard = 0;
    while ((*this)(z_hi) > 1e-280) {
        z_hi *= 2.0;
        if (++guard > 2000) throw NumericalError("tail does not vanish within range");
    }
    constexpr int kNodes = 768;
    const double z_lo = z_hi * 1e-8;
    std::vector<double> nodes;
    nodes.reserve(kNodes + 1);
    nodes.push_back(0.0);
    const double ratio = std::log(z_hi / z_lo) / (kNodes - 1);
    for (int i = 0; i < kNodes; ++i) nodes.push_back(z_lo * std::exp(ratio * i));

    // one backward pass over panels of 2 y T(y) gives every node's tail integral
    std::vector<double> m2(nodes.size(), 0.0);
    std::vector<double> suffix(nodes.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = nodes.size() - 1; i-- > 0;) {
        const auto panel = integrate([this](double y) { return 2.0 * y * (*this)(y); },
                                     nodes[i], nodes[i + 1], 1e-11, 1e-300);
        acc += panel.value;
        suffix[i] = acc;
        m2[i] = nodes[i] * nodes[i] * (*this)(nodes[i]) + acc;
    }
    m2.back() = nodes.back() * nodes.back() * (*this)(nodes.back());
    second_moment_ = m2[0];
    table_z_ = std::move(nodes);
    table_m2_ = std::move(m2);
    table_2j_ = std::move(suffix);
}

double tail_second_moment(const TailFunction& tail, double z) { return tail.second_moment_tail(z); }

} // namespace randsum
