#include "randsum/report.hpp"

#include <cstdio>
#include <fstream>

#include "randsum/errors.hpp"

namespace randsum {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

nlohmann::json Provenance::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = std::string(kToolName) + " " + kToolVersion;
    j["config_hash"] = hex64(config_hash);
    j["seed"] = seed;
    if (!generator.empty()) j["generator"] = generator;
    return j;
}

std::string Provenance::csv_preamble() const {
    std::string out;
    out += "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    out += std::string("# tool=") + kToolName + " " + kToolVersion + "\n";
    out += "# config_hash=" + hex64(config_hash) + "\n";
    out += "# seed=" + std::to_string(seed) + "\n";
    if (!generator.empty()) out += "# generator=" + generator + "\n";
    return out;
}

Provenance make_provenance(const nlohmann::json& resolved_config, std::uint64_t seed,
                           bool stochastic) {
    Provenance p;
    p.config_hash = fnv1a64(resolved_config.dump());
    p.seed = seed;
    if (stochastic) p.generator = Rng::kGeneratorId;
    return p;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
    if (!out) throw ConfigError("write failed for " + path);
}

std::string bound_curve_csv(const BoundCurve& curve, const Provenance& p) {
    std::string out = p.csv_preamble();
    out += "x,bound,branch,dominant_n\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        out += format_double(curve.x[i]) + "," + format_double(curve.value[i]) + "," +
               branch_name(curve.branch[i]) + "," + std::to_string(curve.dominant_n[i]) + "\n";
    }
    return out;
}

std::string empirical_tail_csv(const EmpiricalTail& tail, const Provenance& p) {
    std::string out = p.csv_preamble();
    out += "x,estimate,ci_low,ci_high,hits,N\n";
    for (std::size_t i = 0; i < tail.x.size(); ++i) {
        out += format_double(tail.x[i]) + "," + format_double(tail.estimate[i]) + "," +
               format_double(tail.ci_low[i]) + "," + format_double(tail.ci_high[i]) + "," +
               std::to_string(tail.hits[i]) + "," + std::to_string(tail.n_samples) + "\n";
    }
    return out;
}

std::string verdict_name(VerifyRow::Verdict v) {
    switch (v) {
    case VerifyRow::Verdict::pass:
        return "PASS";
    case VerifyRow::Verdict::fail:
        return "FAIL";
    case VerifyRow::Verdict::skipped_infeasible:
        return "SKIP-INFEASIBLE";
    }
    return "?";
}

std::string verify_csv(const std::vector<VerifyRow>& rows, const Provenance& p) {
    std::string out = p.csv_preamble();
    out += "x,bound,estimate,ci_high,verdict\n";
    for (const auto& row : rows) {
        out += format_double(row.x) + "," + format_double(row.bound) + "," +
               format_double(row.estimate) + "," + format_double(row.ci_high) + "," +
               verdict_name(row.verdict) + "\n";
    }
    return out;
}

nlohmann::json bound_curve_json(const BoundCurve& curve, const Provenance& p,
                                const nlohmann::json& resolved_config) {
    nlohmann::json j;
    j["provenance"] = p.to_json();
    j["config"] = resolved_config;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        rows.push_back({{"x", curve.x[i]},
                        {"bound", curve.value[i]},
                        {"branch", branch_name(curve.branch[i])},
                        {"dominant_n", curve.dominant_n[i]}});
    }
    j["curve"] = rows;
    return j;
}

nlohmann::json empirical_tail_json(const EmpiricalTail& tail, const Provenance& p,
                                   const nlohmann::json& resolved_config) {
    nlohmann::json j;
    j["provenance"] = p.to_json();
    j["config"] = resolved_config;
    j["spec"] = tail.spec_id;
    j["spec_hash"] = hex64(fnv1a64(tail.spec_id));
    j["n_samples"] = tail.n_samples;
    j["ci_level"] = tail.ci_level;
    j["sample_mean"] = tail.sample_mean;
    j["sample_variance"] = tail.sample_variance;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < tail.x.size(); ++i) {
        rows.push_back({{"x", tail.x[i]},
                        {"estimate", tail.estimate[i]},
                        {"ci_low", tail.ci_low[i]},
                        {"ci_high", tail.ci_high[i]},
                        {"hits", tail.hits[i]},
                        {"feasible", static_cast<bool>(tail.feasible[i])}});
    }
    j["tail"] = rows;
    return j;
}

nlohmann::json verify_json(const std::vector<VerifyRow>& rows, const Provenance& p,
                           const nlohmann::json& resolved_config) {
    nlohmann::json j;
    j["provenance"] = p.to_json();
    j["config"] = resolved_config;
    int pass = 0, fail = 0, skipped = 0;
    nlohmann::json out_rows = nlohmann::json::array();
    for (const auto& row : rows) {
        switch (row.verdict) {
        case VerifyRow::Verdict::pass:
            ++pass;
            break;
        case VerifyRow::Verdict::fail:
            ++fail;
            break;
        case VerifyRow::Verdict::skipped_infeasible:
            ++skipped;
            break;
        }
        out_rows.push_back({{"x", row.x},
                            {"bound", row.bound},
                            {"estimate", row.estimate},
                            {"ci_high", row.ci_high},
                            {"verdict", verdict_name(row.verdict)}});
    }
    j["counts"] = {{"pass", pass}, {"fail", fail}, {"skipped_infeasible", skipped}};
    j["verdict"] = (fail == 0) ? "PASS" : "FAIL";
    j["rows"] = out_rows;
    return j;
}

} // namespace randsum
