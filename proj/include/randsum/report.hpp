#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "randsum/bounds.hpp"
#include "randsum/mc.hpp"

namespace randsum {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolName = "randsum";
inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest-round-trip-safe, locale-free rendering ("%.17g").
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

/// Identification block stamped into every emitted file.
struct Provenance {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string generator; // empty for deterministic outputs

    nlohmann::json to_json() const;
    std::string csv_preamble() const; // "# key=value" comment lines
};

Provenance make_provenance(const nlohmann::json& resolved_config, std::uint64_t seed,
                           bool stochastic);

void write_text_file(const std::string& path, const std::string& content);

// CSV emitters (column schemas are part of the CLI contract)
std::string bound_curve_csv(const BoundCurve& curve, const Provenance& p);
std::string empirical_tail_csv(const EmpiricalTail& tail, const Provenance& p);

struct VerifyRow {
    double x = 0.0;
    double bound = 0.0;
    double estimate = 0.0;
    double ci_high = 0.0;
    enum class Verdict { pass, fail, skipped_infeasible } verdict = Verdict::pass;
};
std::string verify_csv(const std::vector<VerifyRow>& rows, const Provenance& p);
std::string verdict_name(VerifyRow::Verdict v);

// JSON report bodies (caller adds the file write)
nlohmann::json bound_curve_json(const BoundCurve& curve, const Provenance& p,
                                const nlohmann::json& resolved_config);
nlohmann::json empirical_tail_json(const EmpiricalTail& tail, const Provenance& p,
                                   const nlohmann::json& resolved_config);
nlohmann::json verify_json(const std::vector<VerifyRow>& rows, const Provenance& p,
                           const nlohmann::json& resolved_config);

} // namespace randsum
