#include "randsum/index_law.hpp"

#include <cmath>

#include "randsum/errors.hpp"

namespace randsum {

IndexLaw IndexLaw::geometric(double mean) {
    if (!(mean >= 2.0)) throw DomainError("IndexLaw: mean must be >= 2");
    IndexLaw law;
    law.kind_ = Kind::geometric;
    law.mean_ = mean;
    law.param_ = mean;
    return law;
}

IndexLaw IndexLaw::shifted_poisson(double mean) {
    if (!(mean >= 2.0)) throw DomainError("IndexLaw: mean must be >= 2");
    IndexLaw law;
    law.kind_ = Kind::shifted_poisson;
    law.mean_ = mean;
    law.param_ = mean;
    return law;
}

IndexLaw IndexLaw::deterministic(std::uint64_t n) {
    if (n < 2) throw DomainError("IndexLaw: deterministic count must be >= 2 (mean >= 2)");
    IndexLaw law;
    law.kind_ = Kind::deterministic;
    law.mean_ = static_cast<double>(n);
    law.support_n_ = n;
    return law;
}

IndexLaw IndexLaw::two_point(std::uint64_t k) {
    if (k < 3) throw DomainError("IndexLaw: two-point upper atom must be >= 3");
    IndexLaw law;
    law.kind_ = Kind::two_point;
    law.support_n_ = k;
    law.mean_ = 3.0 - 2.0 / static_cast<double>(k);
    return law;
}

IndexLaw IndexLaw::two_point_for_level(double x) {
    if (!(x >= 3.0)) throw DomainError("IndexLaw: two-point level requires x >= 3");
    return two_point(static_cast<std::uint64_t>(std::floor(x * x)));
}

IndexLaw IndexLaw::explicit_probs(std::vector<double> probs) {
    if (probs.empty()) throw DomainError("IndexLaw: empty probability vector");
    double total = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0)) throw DomainError("IndexLaw: negative probability");
        total += probs[i];
        mean += probs[i] * static_cast<double>(i + 1);
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw DomainError("IndexLaw: probabilities must sum to 1 (got " + std::to_string(total) +
                          ")");
    if (!(mean >= 2.0 - 1e-12)) throw DomainError("IndexLaw: mean must be >= 2");
    IndexLaw law;
    law.kind_ = Kind::explicit_vector;
    law.mean_ = mean;
    law.suffix_.assign(probs.size() + 1, 0.0);
    for (std::size_t i = probs.size(); i-- > 0;) law.suffix_[i] = law.suffix_[i + 1] + probs[i];
    law.probs_ = std::move(probs);
    return law;
}

double IndexLaw::pmf(std::uint64_t n) const {
    if (n == 0) return 0.0;
    switch (kind_) {
    case Kind::geometric: {
        const double p = 1.0 / param_;
        return p * std::exp(static_cast<double>(n - 1) * std::log1p(-p));
    }
    case Kind::shifted_poisson: {
        const double b = param_ - 1.0;
        const double k = static_cast<double>(n - 1);
        if (b == 0.0) return n == 1 ? 1.0 : 0.0;
        return std::exp(-b + k * std::log(b) - std::lgamma(k + 1.0));
    }
    case Kind::deterministic:
        return n == support_n_ ? 1.0 : 0.0;
    case Kind::two_point: {
        const double alpha = 1.0 / static_cast<double>(support_n_);
        if (n == 2) return 1.0 - alpha;
        if (n == support_n_) return alpha;
        return 0.0;
    }
    case Kind::explicit_vector:
        return n <= probs_.size() ? probs_[n - 1] : 0.0;
    }
    return 0.0;
}

double IndexLaw::tail_mass(std::uint64_t n) const {
    switch (kind_) {
    case Kind::geometric:
        return std::exp(static_cast<double>(n) * std::log1p(-1.0 / param_));
    case Kind::shifted_poisson: {
        double acc = 0.0, c = 0.0; // Kahan
        for (std::uint64_t k = 1; k <= n; ++k) {
            const double y = pmf(k) - c;
            const double t = acc + y;
            c = (t - acc) - y;
            acc = t;
        }
        return std::max(0.0, 1.0 - acc);
    }
    case Kind::deterministic:
        return n >= support_n_ ? 0.0 : 1.0;
    case Kind::two_point: {
        const double alpha = 1.0 / static_cast<double>(support_n_);
        if (n < 2) return 1.0;
        if (n < support_n_) return alpha;
        return 0.0;
    }
    case Kind::explicit_vector:
        return n < suffix_.size() ? suffix_[n] : 0.0;
    }
    return 0.0;
}

std::uint64_t IndexLaw::support_end() const {
    switch (kind_) {
    case Kind::deterministic:
    case Kind::two_point:
        return support_n_;
    case Kind::explicit_vector:
        return probs_.size();
    case Kind::geometric:
    case Kind::shifted_poisson:
        return 0;
    }
    return 0;
}

std::uint64_t IndexLaw::sample(Rng& rng) const {
    switch (kind_) {
    case Kind::geometric: {
        const double u = rng.uniform01();
        const double n = std::ceil(std::log(u) / std::log1p(-1.0 / param_));
        return n < 1.0 ? 1 : static_cast<std::uint64_t>(n);
    }
    case Kind::shifted_poisson: {
        // sequential inversion; fine for the moderate means used here
        const double b = param_ - 1.0;
        double u = rng.uniform01();
        double p = std::exp(-b);
        std::uint64_t k = 0;
        while (u > p && k < 100000000ULL) {
            u -= p;
            ++k;
            p *= b / static_cast<double>(k);
        }
        return k + 1;
    }
    case Kind::deterministic:
        return support_n_;
    case Kind::two_point:
        return rng.uniform01() < 1.0 / static_cast<double>(support_n_) ? support_n_ : 2;
    case Kind::explicit_vector: {
        double u = rng.uniform01();
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            if (u < probs_[i]) return i + 1;
            u -= probs_[i];
        }
        return probs_.size();
    }
    }
    return 1;
}

std::string IndexLaw::describe() const {
    switch (kind_) {
    case Kind::geometric:
        return "geometric(mean=" + std::to_string(mean_) + ")";
    case Kind::shifted_poisson:
        return "shifted_poisson(mean=" + std::to_string(mean_) + ")";
    case Kind::deterministic:
        return "deterministic(n=" + std::to_string(support_n_) + ")";
    case Kind::two_point:
        return "two_point(k=" + std::to_string(support_n_) + ")";
    case Kind::explicit_vector:
        return "explicit(" + std::to_string(probs_.size()) + " atoms)";
    }
    return "?";
}

} // namespace randsum
