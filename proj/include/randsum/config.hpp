#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "randsum/index_law.hpp"
#include "randsum/mc.hpp"
#include "randsum/orlicz.hpp"

namespace randsum {

/// Evaluation grid, also parseable from the CLI "lo:hi:step" form.
struct GridSpec {
    double lo = 0.0;
    double hi = 6.0;
    double step = 0.25;

    std::vector<double> values() const;
    static GridSpec parse(const std::string& text);
    nlohmann::json to_json() const;
    static GridSpec from_json(const nlohmann::json& j);
    bool operator==(const GridSpec&) const = default;
};

struct SummandConfig {
    enum class Kind { normal, orlicz, pm1, empirical_csv };
    Kind kind = Kind::normal;
    double m = 2.0;
    double r = 0.0;
    double c1 = 1.0;
    double c2 = kDefaultLogShift;
    double bound = 1.0;   // essential supremum for pm1 / orlicz with m = inf
    std::string path;     // empirical CSV

    SummandLaw build() const;
    /// (m, r) pair the closed-form bounds should use for this law.
    std::pair<double, double> shape() const;
    nlohmann::json to_json() const;
    static SummandConfig from_json(const nlohmann::json& j);
};

struct IndexConfig {
    enum class Kind { geometric, shifted_poisson, deterministic, two_point, explicit_vector };
    Kind kind = Kind::geometric;
    double mean = 4.0;
    std::uint64_t n = 4;          // deterministic
    std::uint64_t k = 9;          // two-point upper atom
    std::vector<double> probs;    // explicit

    IndexLaw build() const;
    nlohmann::json to_json() const;
    static IndexConfig from_json(const nlohmann::json& j);
};

struct BoundJob {
    SummandConfig summand;
    IndexConfig index;
    GridSpec grid;
    double eps_tail = 1e-12;
};

struct SimulateJob {
    SummandConfig summand;
    IndexConfig index;
    GridSpec grid;
    std::uint64_t n_samples = 100000;
    double ci_level = 0.99;
    // optional moment table
    std::vector<double> moment_p;
    double burkholder_c = 1.0;
    // optional stopping-time experiment (rule "none" = skip); the summand must
    // be an orlicz/pm1 law so its tail shape is known
    enum class StoppingRule { none, independent, first_passage, fixed_window_max };
    StoppingRule stopping_rule = StoppingRule::none;
    double stopping_level = 5.0;
    std::uint64_t stopping_window = 64;
    std::uint64_t stopping_cap = 1000000;
    std::vector<double> stopping_p = {2, 3, 4, 6, 8};
};

struct VerifyJob {
    enum class Method { mixture, closed_geometric, closed_poisson };
    SummandConfig summand;
    IndexConfig index;
    GridSpec grid;
    std::uint64_t n_samples = 100000;
    double ci_level = 0.99;
    double min_expected_hits = 100.0;
    Method method = Method::mixture;
    double c = 1.0;
    double cap = 1.0;
    double eps_tail = 1e-12;
};

struct ExponentsJob {
    std::vector<std::pair<double, double>> ml_rows = {{2.0, 0.0}};
    std::vector<std::array<double, 4>> stopping_rows; // (a, b, m, r)
    std::vector<double> growth_m;                     // moment-growth reference curves
    std::vector<double> growth_p = {2, 4, 8, 16, 32, 64};
};

struct LowerJob {
    enum class Mode { two_point, geometric_mc, poisson_overlay };
    Mode mode = Mode::two_point;
    GridSpec grid{3.0, 50.0, 0.5};
    SummandConfig summand; // geometric_mc / poisson_overlay shape source
    double mean = 4.0;
    std::uint64_t n_samples = 200000;
    double mc_x = 3.0;          // two_point MC companion level (0 disables)
    std::uint64_t mc_n = 0;     // companion sample count (0 disables)
    double c_lower = 1.0, cap_lower = 1.0;
    double c_upper = 1.0, cap_upper = 1.0;
    double min_expected_hits = 100.0;
};

/// One run = one resolved configuration; precedence is defaults < config file
/// < command-line flags, and every report embeds the resolved form.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 1;
    bool quiet = false;

    BoundJob bound;
    SimulateJob simulate;
    VerifyJob verify;
    ExponentsJob exponents;
    LowerJob lower;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load_file(const std::string& path);
    /// Canonical resolved form (round-trips: from_json(resolved()) == *this).
    nlohmann::json resolved() const;
};

} // namespace randsum
