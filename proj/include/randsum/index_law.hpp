#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "randsum/rng.hpp"

namespace randsum {

/// Law of the random summand count eta >= 1. Mean must be >= 2 (standing
/// assumption everywhere in this library). Immutable.
class IndexLaw {
public:
    enum class Kind { geometric, shifted_poisson, deterministic, two_point, explicit_vector };

    /// P(eta = n) = (1/A)(1 - 1/A)^(n-1), n >= 1.
    static IndexLaw geometric(double mean);
    /// eta - 1 ~ Poisson(mean - 1).
    static IndexLaw shifted_poisson(double mean);
    static IndexLaw deterministic(std::uint64_t n);
    /// P(eta = 2) = 1 - 1/k, P(eta = k) = 1/k; mean 3 - 2/k.
    static IndexLaw two_point(std::uint64_t k);
    /// The two-point law with k = floor(x^2), for levels x >= 3.
    static IndexLaw two_point_for_level(double x);
    /// probs[i] = P(eta = i + 1); must sum to 1 within 1e-12.
    static IndexLaw explicit_probs(std::vector<double> probs);

    Kind kind() const { return kind_; }
    double mean() const { return mean_; }
    double pmf(std::uint64_t n) const;
    /// P(eta > n).
    double tail_mass(std::uint64_t n) const;
    /// Largest support point for finitely supported laws; 0 when unbounded.
    std::uint64_t support_end() const;
    std::uint64_t sample(Rng& rng) const;
    std::string describe() const;

private:
    IndexLaw() = default;

    Kind kind_ = Kind::deterministic;
    double mean_ = 2.0;
    double param_ = 0.0;            // A for geometric / shifted_poisson
    std::uint64_t support_n_ = 2;   // deterministic n or two-point upper atom k
    std::vector<double> probs_;     // explicit vector
    std::vector<double> suffix_;    // explicit tail masses
};

} // namespace randsum
