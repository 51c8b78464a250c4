#pragma once

#include <string>
#include <vector>

#include "randsum/tail_function.hpp"

namespace randsum {

/// Symmetrized log-moment-generating function phi(lambda) = max over signs of
/// log E exp(+-lambda xi), with its effective finiteness radius.
///
/// Closed forms exist for the normal and symmetric two-point laws. For a
/// TailFunction the values are quadrature results tabulated at construction
/// (immutable afterwards, so concurrent readers need no locks); between nodes
/// phi is interpolated via phi(t)/t^2, which is smooth down to t = 0. Outside
/// the tabulated range, or when the exponential moment diverges everywhere,
/// phi is +infinity, which downstream bounds treat as "no Chernoff branch".
class CumulantModel {
public:
    static CumulantModel normal(double sd = 1.0);
    /// xi = +-magnitude with probability 1/2 each.
    static CumulantModel two_point(double magnitude = 1.0);
    /// Numeric model for a symmetric law given by its two-sided tail.
    static CumulantModel from_tail(const TailFunction& tail);
    /// Empirical model: phi of the sample measure. O(n) per evaluation.
    static CumulantModel from_samples(std::vector<double> samples);

    /// phi(lambda); +infinity when the exponential moment does not exist.
    double log_mgf(double lambda) const;

    /// Largest lambda with a finite exponential moment that this model can
    /// certify (+infinity for closed forms; 0 when the moment diverges for
    /// every lambda != 0).
    double cramer_radius() const { return radius_; }

    double variance() const { return variance_; }

    /// True when phi(1e-3) is within 1e-4 relative of variance * lambda^2 / 2,
    /// the small-lambda behaviour every centered finite-variance law must show.
    bool small_lambda_ok() const;

    std::string describe() const;

private:
    enum class Kind { normal, two_point, table, samples };

    CumulantModel() = default;
    double exact_table_phi(double lambda) const;

    Kind kind_ = Kind::normal;
    double scale_ = 1.0;   // sd or two-point magnitude
    double variance_ = 1.0;
    double radius_ = 0.0;
    std::vector<double> nodes_;     // lambda nodes (table kind), ascending, nodes_[0] > 0
    std::vector<double> psi_;       // phi(node) / node^2
    std::vector<double> samples_;   // samples kind
};

} // namespace randsum
