#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "randsum/bounds.hpp"
#include "randsum/cumulant.hpp"
#include "randsum/index_law.hpp"
#include "randsum/orlicz.hpp"
#include "randsum/rng.hpp"
#include "randsum/tail_function.hpp"

namespace randsum {

/// A summand law that can both be sampled and be handed to the bound machinery.
class SummandLaw {
public:
    enum class Kind { normal, orlicz, pm1, empirical };

    static SummandLaw standard_normal();
    static SummandLaw orlicz(const OrliczTailSpec& spec);
    static SummandLaw two_point_pm1();
    /// Symmetric law with atoms at the step positions of an empirical tail.
    static SummandLaw empirical(TailFunction tail);

    double sample(Rng& rng) const;
    double sd() const;
    const TailFunction& tail() const { return tail_; }
    /// Best available cumulant model (closed form where one exists, tabulated
    /// quadrature otherwise; the latter costs a construction-time table build).
    CumulantModel make_cumulant() const;
    Kind kind() const { return kind_; }
    std::string describe() const;

private:
    SummandLaw(Kind kind, TailFunction tail) : kind_(kind), tail_(std::move(tail)) {}

    Kind kind_;
    TailFunction tail_;
    std::optional<OrliczTailSpec> spec_;
    std::vector<double> atom_x_;    // empirical sampling support
    std::vector<double> atom_cdf_;
};

/// The simulated object: S = sum_{i <= eta} xi_i / (sigma sqrt(A)).
struct CompoundSpec {
    SummandLaw summand;
    IndexLaw index;

    double sd() const { return summand.sd(); }
    std::string describe() const;
};

struct EmpiricalTail {
    std::vector<double> x;
    std::vector<double> estimate;  // max(P^(S >= x), P^(S <= -x))
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    std::vector<std::uint64_t> hits;      // max(up, down) per grid point
    std::vector<std::uint64_t> hits_up;   // S >= x
    std::vector<std::uint64_t> hits_down; // S <= -x
    std::vector<bool> feasible;    // expected-hit gate verdict; all true when ungated
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    double ci_level = 0.99;
    double sample_mean = 0.0;
    double sample_variance = 0.0;
    std::string spec_id;
    std::string generator = Rng::kGeneratorId;
};

struct SimulateOptions {
    double ci_level = 0.99;
    std::uint64_t batch_size = 1u << 16;
    int threads = 1;                      // batch results reduce in batch order either way
    double min_expected_hits = 0.0;       // 0 disables the gate
    std::vector<double> gate_bounds;      // per-grid-point upper bounds used by the gate
    bool strict_gate = false;             // throw instead of flagging when nothing is feasible
};

/// Empirical two-sided tail of the normalized compound sum. Deterministic for
/// fixed (seed, spec, n_samples) regardless of the thread count.
EmpiricalTail simulate_tail(const CompoundSpec& spec, std::span<const double> x_grid,
                            std::uint64_t n_samples, std::uint64_t seed,
                            const SimulateOptions& options = {});

/// Same, for a fixed summand count: tail of n^{-1/2} * (raw sum of n summands).
EmpiricalTail simulate_fixed_n_tail(const SummandLaw& summand, std::uint64_t n_summands,
                                    std::span<const double> x_grid, std::uint64_t n_samples,
                                    std::uint64_t seed, double ci_level = 0.99, int threads = 1);

struct MomentRow {
    double p = 0.0;
    double s_norm = 0.0;  // |S|_p of the normalized sum
    double s_lo = 0.0;    // bootstrap CI
    double s_hi = 0.0;
    double eta_norm = 0.0;
    double xi_norm = 0.0;
    double burkholder = 0.0; // c_B * p / log p
    double rhs = 0.0;        // burkholder * |eta|_p^{1/2} * |xi|_p / (sigma sqrt(A))
};

/// Empirical moment growth of S against the martingale moment inequality with
/// the configurable Burkholder constant.
std::vector<MomentRow> empirical_moments(const CompoundSpec& spec, std::span<const double> p_grid,
                                         std::uint64_t n_samples, std::uint64_t seed,
                                         double burkholder_c = 1.0, int threads = 1);

struct StoppingTimeSpec {
    enum class Rule { independent, first_passage, fixed_window_max };
    Rule rule = Rule::independent;
    double level = 5.0;                 // first_passage: |partial sum| threshold
    std::uint64_t window = 64;          // fixed_window_max horizon
    std::uint64_t cap = 1000000;        // hard truncation of eta
    std::optional<IndexLaw> index;      // required for Rule::independent
    std::string describe() const;
};

struct StoppingExperimentRow {
    double p = 0.0;
    double s_norm = 0.0;
    double curve = 0.0;      // stopped-moment growth curve anchored at p = 2
    bool dominated = false;  // s_norm <= curve
};

struct StoppingExperimentResult {
    double fitted_m = 0.0;    // fitted tail shape of eta
    double fitted_r = 0.0;
    StoppedSumExponents exponents;
    double mean_eta = 0.0;
    double truncated_fraction = 0.0; // paths where eta hit the cap
    std::vector<StoppingExperimentRow> rows;
};

/// Simulates the stopped sum with eta produced by the rule on the same path,
/// fits the tail shape of eta, and checks the stopped-moment growth ordering.
StoppingExperimentResult stopping_time_experiment(const StoppingTimeSpec& spec,
                                                  const OrliczTailSpec& summand,
                                                  std::span<const double> p_grid,
                                                  std::uint64_t n_samples, std::uint64_t seed,
                                                  int threads = 1);

} // namespace randsum
