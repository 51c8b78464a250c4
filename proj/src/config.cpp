#include "randsum/config.hpp"

#include <cmath>
#include <fstream>

#include "randsum/errors.hpp"
#include "randsum/tail_function.hpp"

namespace randsum {

namespace {

double number_or_inf(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity") return kInfiniteShape;
        throw ConfigError(std::string("field '") + key + "': unrecognized value " + s);
    }
    if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

nlohmann::json inf_aware(double v) {
    if (v == kInfiniteShape) return "inf";
    return v;
}

template <class T>
T field_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

} // namespace

std::vector<double> GridSpec::values() const {
    if (!(step > 0.0)) throw ConfigError("grid: step must be positive");
    if (!(hi >= lo)) throw ConfigError("grid: hi must be >= lo");
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 1000000) throw ConfigError("grid: too many points");
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
    return out;
}

GridSpec GridSpec::parse(const std::string& text) {
    GridSpec g;
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw ConfigError("grid: expected lo:hi:step, got " + text);
    try {
        g.lo = std::stod(text.substr(0, first));
        g.hi = std::stod(text.substr(first + 1, second - first - 1));
        g.step = std::stod(text.substr(second + 1));
    } catch (const std::exception&) {
        throw ConfigError("grid: expected lo:hi:step, got " + text);
    }
    (void)g.values(); // validate
    return g;
}

nlohmann::json GridSpec::to_json() const { return {{"lo", lo}, {"hi", hi}, {"step", step}}; }

GridSpec GridSpec::from_json(const nlohmann::json& j) {
    GridSpec g;
    if (j.is_string()) return parse(j.get<std::string>());
    g.lo = field_or(j, "lo", g.lo);
    g.hi = field_or(j, "hi", g.hi);
    g.step = field_or(j, "step", g.step);
    (void)g.values();
    return g;
}

SummandLaw SummandConfig::build() const {
    switch (kind) {
    case Kind::normal:
        return SummandLaw::standard_normal();
    case Kind::orlicz:
        if (m == kInfiniteShape) return SummandLaw::orlicz(OrliczTailSpec::bounded(bound));
        return SummandLaw::orlicz(OrliczTailSpec(m, r, c1, c2));
    case Kind::pm1:
        return SummandLaw::orlicz(OrliczTailSpec::bounded(bound));
    case Kind::empirical_csv:
        return SummandLaw::empirical(TailFunction::empirical_from_csv(path));
    }
    throw ConfigError("summand: unknown kind");
}

std::pair<double, double> SummandConfig::shape() const {
    switch (kind) {
    case Kind::normal:
        return {2.0, 0.0};
    case Kind::orlicz:
        return {m, r};
    case Kind::pm1:
        return {kInfiniteShape, 0.0};
    case Kind::empirical_csv:
        return {kInfiniteShape, 0.0}; // finite grid => bounded support
    }
    return {2.0, 0.0};
}

nlohmann::json SummandConfig::to_json() const {
    switch (kind) {
    case Kind::normal:
        return {{"kind", "normal"}};
    case Kind::orlicz:
        return {{"kind", "orlicz"}, {"m", inf_aware(m)},     {"r", r},
                {"c1", c1},         {"c2", c2},              {"bound", bound}};
    case Kind::pm1:
        return {{"kind", "pm1"}, {"bound", bound}};
    case Kind::empirical_csv:
        return {{"kind", "empirical_csv"}, {"path", path}};
    }
    return {};
}

SummandConfig SummandConfig::from_json(const nlohmann::json& j) {
    SummandConfig c;
    const std::string kind = field_or<std::string>(j, "kind", "normal");
    if (kind == "normal") {
        c.kind = Kind::normal;
    } else if (kind == "orlicz") {
        c.kind = Kind::orlicz;
        c.m = number_or_inf(j, "m", c.m);
        c.r = field_or(j, "r", c.r);
        c.c1 = field_or(j, "c1", c.c1);
        c.c2 = field_or(j, "c2", c.c2);
        c.bound = field_or(j, "bound", c.bound);
    } else if (kind == "pm1") {
        c.kind = Kind::pm1;
        c.bound = field_or(j, "bound", 1.0);
    } else if (kind == "empirical_csv") {
        c.kind = Kind::empirical_csv;
        c.path = field_or<std::string>(j, "path", "");
        if (c.path.empty()) throw ConfigError("summand: empirical_csv requires a path");
    } else {
        throw ConfigError("summand: unknown kind '" + kind + "'");
    }
    return c;
}

IndexLaw IndexConfig::build() const {
    switch (kind) {
    case Kind::geometric:
        return IndexLaw::geometric(mean);
    case Kind::shifted_poisson:
        return IndexLaw::shifted_poisson(mean);
    case Kind::deterministic:
        return IndexLaw::deterministic(n);
    case Kind::two_point:
        return IndexLaw::two_point(k);
    case Kind::explicit_vector:
        return IndexLaw::explicit_probs(probs);
    }
    throw ConfigError("index: unknown kind");
}

nlohmann::json IndexConfig::to_json() const {
    switch (kind) {
    case Kind::geometric:
        return {{"kind", "geometric"}, {"mean", mean}};
    case Kind::shifted_poisson:
        return {{"kind", "shifted_poisson"}, {"mean", mean}};
    case Kind::deterministic:
        return {{"kind", "deterministic"}, {"n", n}};
    case Kind::two_point:
        return {{"kind", "two_point"}, {"k", k}};
    case Kind::explicit_vector:
        return {{"kind", "explicit"}, {"probs", probs}};
    }
    return {};
}

IndexConfig IndexConfig::from_json(const nlohmann::json& j) {
    IndexConfig c;
    const std::string kind = field_or<std::string>(j, "kind", "geometric");
    if (kind == "geometric") {
        c.kind = Kind::geometric;
        c.mean = field_or(j, "mean", c.mean);
    } else if (kind == "shifted_poisson") {
        c.kind = Kind::shifted_poisson;
        c.mean = field_or(j, "mean", c.mean);
    } else if (kind == "deterministic") {
        c.kind = Kind::deterministic;
        c.n = field_or<std::uint64_t>(j, "n", c.n);
    } else if (kind == "two_point") {
        c.kind = Kind::two_point;
        if (j.contains("x"))
            c.k = static_cast<std::uint64_t>(
                std::floor(field_or(j, "x", 3.0) * field_or(j, "x", 3.0)));
        else
            c.k = field_or<std::uint64_t>(j, "k", c.k);
    } else if (kind == "explicit") {
        c.kind = Kind::explicit_vector;
        c.probs = field_or<std::vector<double>>(j, "probs", {});
    } else {
        throw ConfigError("index: unknown kind '" + kind + "'");
    }
    return c;
}

namespace {

VerifyJob::Method method_from_string(const std::string& s) {
    if (s == "mixture") return VerifyJob::Method::mixture;
    if (s == "closed_geometric") return VerifyJob::Method::closed_geometric;
    if (s == "closed_poisson") return VerifyJob::Method::closed_poisson;
    throw ConfigError("verify: unknown method '" + s + "'");
}

std::string method_to_string(VerifyJob::Method m) {
    switch (m) {
    case VerifyJob::Method::mixture:
        return "mixture";
    case VerifyJob::Method::closed_geometric:
        return "closed_geometric";
    case VerifyJob::Method::closed_poisson:
        return "closed_poisson";
    }
    return "?";
}

LowerJob::Mode lower_mode_from_string(const std::string& s) {
    if (s == "two_point") return LowerJob::Mode::two_point;
    if (s == "geometric_mc") return LowerJob::Mode::geometric_mc;
    if (s == "poisson_overlay") return LowerJob::Mode::poisson_overlay;
    throw ConfigError("lower: unknown mode '" + s + "'");
}

std::string lower_mode_to_string(LowerJob::Mode m) {
    switch (m) {
    case LowerJob::Mode::two_point:
        return "two_point";
    case LowerJob::Mode::geometric_mc:
        return "geometric_mc";
    case LowerJob::Mode::poisson_overlay:
        return "poisson_overlay";
    }
    return "?";
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.seed = field_or<std::uint64_t>(j, "seed", c.seed);
    c.out_dir = field_or<std::string>(j, "out_dir", c.out_dir);
    c.threads = field_or(j, "threads", c.threads);
    c.quiet = field_or(j, "quiet", c.quiet);

    if (j.contains("bound")) {
        const auto& b = j.at("bound");
        if (b.contains("summand")) c.bound.summand = SummandConfig::from_json(b.at("summand"));
        if (b.contains("index")) c.bound.index = IndexConfig::from_json(b.at("index"));
        if (b.contains("grid")) c.bound.grid = GridSpec::from_json(b.at("grid"));
        c.bound.eps_tail = field_or(b, "eps_tail", c.bound.eps_tail);
    }
    if (j.contains("simulate")) {
        const auto& s = j.at("simulate");
        if (s.contains("summand")) c.simulate.summand = SummandConfig::from_json(s.at("summand"));
        if (s.contains("index")) c.simulate.index = IndexConfig::from_json(s.at("index"));
        if (s.contains("grid")) c.simulate.grid = GridSpec::from_json(s.at("grid"));
        c.simulate.n_samples = field_or<std::uint64_t>(s, "n_samples", c.simulate.n_samples);
        c.simulate.ci_level = field_or(s, "ci_level", c.simulate.ci_level);
        if (s.contains("moments")) {
            const auto& mm = s.at("moments");
            c.simulate.moment_p = field_or<std::vector<double>>(mm, "p_grid", {2, 3, 4, 6, 8});
            c.simulate.burkholder_c = field_or(mm, "burkholder_c", c.simulate.burkholder_c);
        }
        if (s.contains("stopping")) {
            const auto& st = s.at("stopping");
            const std::string rule = field_or<std::string>(st, "rule", "independent");
            if (rule == "independent")
                c.simulate.stopping_rule = SimulateJob::StoppingRule::independent;
            else if (rule == "first_passage")
                c.simulate.stopping_rule = SimulateJob::StoppingRule::first_passage;
            else if (rule == "fixed_window_max")
                c.simulate.stopping_rule = SimulateJob::StoppingRule::fixed_window_max;
            else if (rule == "none")
                c.simulate.stopping_rule = SimulateJob::StoppingRule::none;
            else
                throw ConfigError("simulate.stopping: unknown rule '" + rule + "'");
            c.simulate.stopping_level = field_or(st, "level", c.simulate.stopping_level);
            c.simulate.stopping_window =
                field_or<std::uint64_t>(st, "window", c.simulate.stopping_window);
            c.simulate.stopping_cap = field_or<std::uint64_t>(st, "cap", c.simulate.stopping_cap);
            c.simulate.stopping_p =
                field_or<std::vector<double>>(st, "p_grid", c.simulate.stopping_p);
        }
    }
    if (j.contains("verify")) {
        const auto& v = j.at("verify");
        if (v.contains("summand")) c.verify.summand = SummandConfig::from_json(v.at("summand"));
        if (v.contains("index")) c.verify.index = IndexConfig::from_json(v.at("index"));
        if (v.contains("grid")) c.verify.grid = GridSpec::from_json(v.at("grid"));
        if (v.contains("mc_grid")) {
            const GridSpec mc = GridSpec::from_json(v.at("mc_grid"));
            if (!(mc == c.verify.grid))
                throw ConfigError("verify: bound grid and MC grid do not align");
        }
        c.verify.n_samples = field_or<std::uint64_t>(v, "n_samples", c.verify.n_samples);
        c.verify.ci_level = field_or(v, "ci_level", c.verify.ci_level);
        c.verify.min_expected_hits = field_or(v, "min_expected_hits", c.verify.min_expected_hits);
        c.verify.method =
            method_from_string(field_or<std::string>(v, "method", "mixture"));
        c.verify.c = field_or(v, "c", c.verify.c);
        c.verify.cap = field_or(v, "cap", c.verify.cap);
        c.verify.eps_tail = field_or(v, "eps_tail", c.verify.eps_tail);
    }
    if (j.contains("exponents")) {
        const auto& e = j.at("exponents");
        if (e.contains("ml")) {
            c.exponents.ml_rows.clear();
            for (const auto& row : e.at("ml")) {
                if (!row.is_array() || row.size() != 2)
                    throw ConfigError("exponents: ml rows must be [m, r] pairs");
                double m = row[0].is_string() ? kInfiniteShape : row[0].get<double>();
                c.exponents.ml_rows.emplace_back(m, row[1].get<double>());
            }
        }
        if (e.contains("stopping")) {
            c.exponents.stopping_rows.clear();
            for (const auto& row : e.at("stopping")) {
                if (!row.is_array() || row.size() != 4)
                    throw ConfigError("exponents: stopping rows must be [a, b, m, r]");
                std::array<double, 4> vals{};
                for (int i = 0; i < 4; ++i)
                    vals[static_cast<std::size_t>(i)] =
                        row[static_cast<std::size_t>(i)].is_string()
                            ? kInfiniteShape
                            : row[static_cast<std::size_t>(i)].get<double>();
                c.exponents.stopping_rows.push_back(vals);
            }
        }
        if (e.contains("growth")) {
            const auto& g = e.at("growth");
            c.exponents.growth_m.clear();
            for (const auto& v : field_or<nlohmann::json>(g, "m", nlohmann::json::array()))
                c.exponents.growth_m.push_back(v.is_string() ? kInfiniteShape : v.get<double>());
            c.exponents.growth_p = field_or<std::vector<double>>(g, "p_grid", c.exponents.growth_p);
        }
    }
    if (j.contains("lower")) {
        const auto& l = j.at("lower");
        c.lower.mode = lower_mode_from_string(field_or<std::string>(l, "mode", "two_point"));
        if (l.contains("grid")) c.lower.grid = GridSpec::from_json(l.at("grid"));
        if (l.contains("summand")) c.lower.summand = SummandConfig::from_json(l.at("summand"));
        c.lower.mean = field_or(l, "mean", c.lower.mean);
        c.lower.n_samples = field_or<std::uint64_t>(l, "n_samples", c.lower.n_samples);
        c.lower.mc_x = field_or(l, "mc_x", c.lower.mc_x);
        c.lower.mc_n = field_or<std::uint64_t>(l, "mc_n", c.lower.mc_n);
        c.lower.c_lower = field_or(l, "c_lower", c.lower.c_lower);
        c.lower.cap_lower = field_or(l, "cap_lower", c.lower.cap_lower);
        c.lower.c_upper = field_or(l, "c_upper", c.lower.c_upper);
        c.lower.cap_upper = field_or(l, "cap_upper", c.lower.cap_upper);
        c.lower.min_expected_hits = field_or(l, "min_expected_hits", c.lower.min_expected_hits);
    }
    return c;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json ExperimentConfig::resolved() const {
    // runtime dispositions (out_dir, quiet, threads) stay out: they do not
    // change any result, and reruns into different directories must hash alike
    nlohmann::json j;
    j["seed"] = seed;
    j["bound"] = {{"summand", bound.summand.to_json()},
                  {"index", bound.index.to_json()},
                  {"grid", bound.grid.to_json()},
                  {"eps_tail", bound.eps_tail}};
    j["simulate"] = {{"summand", simulate.summand.to_json()},
                     {"index", simulate.index.to_json()},
                     {"grid", simulate.grid.to_json()},
                     {"n_samples", simulate.n_samples},
                     {"ci_level", simulate.ci_level}};
    if (!simulate.moment_p.empty())
        j["simulate"]["moments"] = {{"p_grid", simulate.moment_p},
                                    {"burkholder_c", simulate.burkholder_c}};
    if (simulate.stopping_rule != SimulateJob::StoppingRule::none) {
        const char* rule = simulate.stopping_rule == SimulateJob::StoppingRule::independent
                               ? "independent"
                               : simulate.stopping_rule == SimulateJob::StoppingRule::first_passage
                                     ? "first_passage"
                                     : "fixed_window_max";
        j["simulate"]["stopping"] = {{"rule", rule},
                                     {"level", simulate.stopping_level},
                                     {"window", simulate.stopping_window},
                                     {"cap", simulate.stopping_cap},
                                     {"p_grid", simulate.stopping_p}};
    }
    j["verify"] = {{"summand", verify.summand.to_json()},
                   {"index", verify.index.to_json()},
                   {"grid", verify.grid.to_json()},
                   {"n_samples", verify.n_samples},
                   {"ci_level", verify.ci_level},
                   {"min_expected_hits", verify.min_expected_hits},
                   {"method", method_to_string(verify.method)},
                   {"c", verify.c},
                   {"cap", verify.cap},
                   {"eps_tail", verify.eps_tail}};
    nlohmann::json ml = nlohmann::json::array();
    for (const auto& [m, r] : exponents.ml_rows) ml.push_back({inf_aware(m), r});
    nlohmann::json stopping = nlohmann::json::array();
    for (const auto& row : exponents.stopping_rows)
        stopping.push_back({inf_aware(row[0]), row[1], inf_aware(row[2]), row[3]});
    j["exponents"] = {{"ml", ml}, {"stopping", stopping}};
    if (!exponents.growth_m.empty()) {
        nlohmann::json growth_m = nlohmann::json::array();
        for (double m : exponents.growth_m) growth_m.push_back(inf_aware(m));
        j["exponents"]["growth"] = {{"m", growth_m}, {"p_grid", exponents.growth_p}};
    }
    j["lower"] = {{"mode", lower_mode_to_string(lower.mode)},
                  {"grid", lower.grid.to_json()},
                  {"summand", lower.summand.to_json()},
                  {"mean", lower.mean},
                  {"n_samples", lower.n_samples},
                  {"mc_x", lower.mc_x},
                  {"mc_n", lower.mc_n},
                  {"c_lower", lower.c_lower},
                  {"cap_lower", lower.cap_lower},
                  {"c_upper", lower.c_upper},
                  {"cap_upper", lower.cap_upper},
                  {"min_expected_hits", lower.min_expected_hits}};
    return j;
}

} // namespace randsum
