// randsum: exponential tail bounds for random sums, with Monte Carlo verification.
//
// Subcommands: bound | simulate | verify | exponents | lower
// Precedence: built-in defaults < --config file < command-line flags.
// Exit codes: 0 success, 1 verification failure, 2 config error, 3 numerical error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "randsum/bounds.hpp"
#include "randsum/config.hpp"
#include "randsum/errors.hpp"
#include "randsum/lower.hpp"
#include "randsum/mc.hpp"
#include "randsum/report.hpp"

namespace {

using namespace randsum;

struct CliOverrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> grid;
    bool quiet = false;
};

ExperimentConfig resolve_config(const CliOverrides& cli, const char* grid_target) {
    ExperimentConfig cfg;
    const char* env_out = std::getenv("RANDSUM_OUT");
    if (env_out && *env_out) cfg.out_dir = env_out;
    if (!cli.config_path.empty()) {
        const std::string env_default = cfg.out_dir;
        cfg = ExperimentConfig::load_file(cli.config_path);
        if (env_out && *env_out && cfg.out_dir == "out") cfg.out_dir = env_default;
    }
    if (cli.seed) cfg.seed = *cli.seed;
    if (cli.out_dir) cfg.out_dir = *cli.out_dir;
    if (cli.quiet) cfg.quiet = true;
    if (cli.grid) {
        const GridSpec g = GridSpec::parse(*cli.grid);
        const std::string target = grid_target;
        if (target == "bound") cfg.bound.grid = g;
        if (target == "simulate") cfg.simulate.grid = g;
        if (target == "verify") cfg.verify.grid = g;
        if (target == "lower") cfg.lower.grid = g;
    }
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void say(const ExperimentConfig& cfg, const std::string& line) {
    if (!cfg.quiet) std::cout << line << "\n";
}

int run_bound(const CliOverrides& cli) {
    const ExperimentConfig cfg = resolve_config(cli, "bound");
    const nlohmann::json resolved = cfg.resolved();
    const Provenance prov = make_provenance(resolved, cfg.seed, false);

    const SummandLaw summand = cfg.bound.summand.build();
    const IndexLaw index = cfg.bound.index.build();
    const CumulantModel model = summand.make_cumulant();
    const std::vector<double> grid = cfg.bound.grid.values();
    const BoundCurve curve =
        compute_bound_curve(summand.tail(), model, index, summand.sd(), grid, cfg.bound.eps_tail);

    write_text_file(out_path(cfg, "bound.csv"), bound_curve_csv(curve, prov));
    write_text_file(out_path(cfg, "bound.json"),
                    bound_curve_json(curve, prov, resolved).dump(2) + "\n");
    say(cfg, "bound: " + std::to_string(grid.size()) + " points -> " + out_path(cfg, "bound.csv"));
    return 0;
}

OrliczTailSpec orlicz_spec_from(const SummandConfig& summand) {
    if (summand.kind == SummandConfig::Kind::orlicz) {
        if (summand.m == kInfiniteShape) return OrliczTailSpec::bounded(summand.bound);
        return OrliczTailSpec(summand.m, summand.r, summand.c1, summand.c2);
    }
    if (summand.kind == SummandConfig::Kind::pm1) return OrliczTailSpec::bounded(summand.bound);
    throw ConfigError("stopping experiment needs an orlicz or pm1 summand");
}

int run_simulate(const CliOverrides& cli) {
    const ExperimentConfig cfg = resolve_config(cli, "simulate");
    const nlohmann::json resolved = cfg.resolved();
    const Provenance prov = make_provenance(resolved, cfg.seed, true);
    const SimulateJob& job = cfg.simulate;

    CompoundSpec spec{job.summand.build(), job.index.build()};
    SimulateOptions options;
    options.ci_level = job.ci_level;
    options.threads = cfg.threads;
    const std::vector<double> grid = job.grid.values();
    const EmpiricalTail tail = simulate_tail(spec, grid, job.n_samples, cfg.seed, options);

    write_text_file(out_path(cfg, "simulate.csv"), empirical_tail_csv(tail, prov));
    write_text_file(out_path(cfg, "simulate.json"),
                    empirical_tail_json(tail, prov, resolved).dump(2) + "\n");
    say(cfg, "simulate: N=" + std::to_string(tail.n_samples) + " -> " +
                 out_path(cfg, "simulate.csv"));

    if (!job.moment_p.empty()) {
        const auto rows = empirical_moments(spec, job.moment_p, job.n_samples, cfg.seed,
                                            job.burkholder_c, cfg.threads);
        std::string csv = prov.csv_preamble();
        csv += "p,s_norm,s_lo,s_hi,eta_norm,xi_norm,burkholder,rhs\n";
        nlohmann::json jrows = nlohmann::json::array();
        for (const auto& row : rows) {
            csv += format_double(row.p) + "," + format_double(row.s_norm) + "," +
                   format_double(row.s_lo) + "," + format_double(row.s_hi) + "," +
                   format_double(row.eta_norm) + "," + format_double(row.xi_norm) + "," +
                   format_double(row.burkholder) + "," + format_double(row.rhs) + "\n";
            jrows.push_back({{"p", row.p},
                             {"s_norm", row.s_norm},
                             {"s_lo", row.s_lo},
                             {"s_hi", row.s_hi},
                             {"eta_norm", row.eta_norm},
                             {"xi_norm", row.xi_norm},
                             {"burkholder", row.burkholder},
                             {"rhs", row.rhs}});
        }
        write_text_file(out_path(cfg, "moments.csv"), csv);
        nlohmann::json j;
        j["provenance"] = prov.to_json();
        j["config"] = resolved;
        j["rows"] = jrows;
        write_text_file(out_path(cfg, "moments.json"), j.dump(2) + "\n");
        say(cfg, "simulate: moment table -> " + out_path(cfg, "moments.csv"));
    }

    if (job.stopping_rule != SimulateJob::StoppingRule::none) {
        StoppingTimeSpec st;
        st.level = job.stopping_level;
        st.window = job.stopping_window;
        st.cap = job.stopping_cap;
        switch (job.stopping_rule) {
        case SimulateJob::StoppingRule::independent:
            st.rule = StoppingTimeSpec::Rule::independent;
            st.index = job.index.build();
            break;
        case SimulateJob::StoppingRule::first_passage:
            st.rule = StoppingTimeSpec::Rule::first_passage;
            break;
        case SimulateJob::StoppingRule::fixed_window_max:
            st.rule = StoppingTimeSpec::Rule::fixed_window_max;
            break;
        default:
            break;
        }
        const auto result = stopping_time_experiment(st, orlicz_spec_from(job.summand),
                                                     job.stopping_p, job.n_samples, cfg.seed,
                                                     cfg.threads);
        std::string csv = prov.csv_preamble();
        csv += "p,s_norm,curve,dominated\n";
        nlohmann::json jrows = nlohmann::json::array();
        for (const auto& row : result.rows) {
            csv += format_double(row.p) + "," + format_double(row.s_norm) + "," +
                   format_double(row.curve) + "," + (row.dominated ? "1" : "0") + "\n";
            jrows.push_back({{"p", row.p},
                             {"s_norm", row.s_norm},
                             {"curve", row.curve},
                             {"dominated", row.dominated}});
        }
        write_text_file(out_path(cfg, "stopping.csv"), csv);
        nlohmann::json j;
        j["provenance"] = prov.to_json();
        j["config"] = resolved;
        j["fitted_m"] = result.fitted_m;
        j["fitted_r"] = result.fitted_r;
        j["q"] = result.exponents.q;
        j["w"] = result.exponents.w;
        j["mean_eta"] = result.mean_eta;
        j["truncated_fraction"] = result.truncated_fraction;
        j["rows"] = jrows;
        write_text_file(out_path(cfg, "stopping.json"), j.dump(2) + "\n");
        say(cfg, "simulate: stopping experiment -> " + out_path(cfg, "stopping.csv"));
    }
    return 0;
}

int run_verify(const CliOverrides& cli) {
    const ExperimentConfig cfg = resolve_config(cli, "verify");
    const nlohmann::json resolved = cfg.resolved();
    const Provenance prov = make_provenance(resolved, cfg.seed, true);
    const VerifyJob& job = cfg.verify;

    const SummandLaw summand = job.summand.build();
    const IndexLaw index = job.index.build();
    const std::vector<double> grid = job.grid.values();

    std::vector<double> bound_values;
    bound_values.reserve(grid.size());
    if (job.method == VerifyJob::Method::mixture) {
        const CumulantModel model = summand.make_cumulant();
        const BoundCurve curve =
            compute_bound_curve(summand.tail(), model, index, summand.sd(), grid, job.eps_tail);
        bound_values = curve.value;
    } else {
        const auto [m, r] = job.summand.shape();
        const SumExponents exps = sum_exponents(m, r);
        for (double x : grid) {
            double v = 1.0;
            if (x >= 2.0) {
                v = (job.method == VerifyJob::Method::closed_geometric)
                        ? closed_form_geometric_bound(exps, job.c, job.cap, x)
                        : closed_form_poisson_bound(exps, job.c, job.cap, x);
            }
            bound_values.push_back(v);
        }
    }

    CompoundSpec spec{summand, index};
    SimulateOptions options;
    options.ci_level = job.ci_level;
    options.threads = cfg.threads;
    options.min_expected_hits = job.min_expected_hits;
    options.gate_bounds = bound_values;
    const EmpiricalTail tail = simulate_tail(spec, grid, job.n_samples, cfg.seed, options);

    std::vector<VerifyRow> rows;
    int fails = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        VerifyRow row;
        row.x = grid[i];
        row.bound = bound_values[i];
        row.estimate = tail.estimate[i];
        row.ci_high = tail.ci_high[i];
        if (!tail.feasible[i]) {
            row.verdict = VerifyRow::Verdict::skipped_infeasible;
        } else if (tail.ci_high[i] <= bound_values[i]) {
            row.verdict = VerifyRow::Verdict::pass;
        } else {
            row.verdict = VerifyRow::Verdict::fail;
            ++fails;
        }
        rows.push_back(row);
        say(cfg, "verify x=" + format_double(row.x) + ": " + verdict_name(row.verdict));
    }

    write_text_file(out_path(cfg, "verify.csv"), verify_csv(rows, prov));
    write_text_file(out_path(cfg, "verify.json"),
                    verify_json(rows, prov, resolved).dump(2) + "\n");
    say(cfg, std::string("verify: ") + (fails == 0 ? "PASS" : "FAIL") + " -> " +
                 out_path(cfg, "verify.csv"));
    return fails == 0 ? 0 : 1;
}

int run_exponents(const CliOverrides& cli) {
    const ExperimentConfig cfg = resolve_config(cli, "exponents");
    const nlohmann::json resolved = cfg.resolved();
    const Provenance prov = make_provenance(resolved, cfg.seed, false);

    std::string csv = prov.csv_preamble();
    nlohmann::json jrows = nlohmann::json::array();
    csv += "table,m_or_a,r_or_b,m,r,power,log_power\n";
    for (const auto& [m, r] : cfg.exponents.ml_rows) {
        std::string power = "domain-error", log_power = "domain-error";
        try {
            const SumExponents e = sum_exponents(m, r);
            power = format_double(e.power);
            log_power = format_double(e.log_power);
        } catch (const DomainError&) {
        }
        csv += "sum," + format_double(m) + "," + format_double(r) + ",,," + power + "," +
               log_power + "\n";
        jrows.push_back({{"table", "sum"}, {"m", m}, {"r", r}, {"power", power},
                         {"log_power", log_power}});
    }
    for (const auto& row : cfg.exponents.stopping_rows) {
        std::string q = "domain-error", w = "domain-error";
        try {
            const StoppedSumExponents e = stopped_sum_exponents(row[0], row[1], row[2], row[3]);
            q = format_double(e.q);
            w = format_double(e.w);
        } catch (const DomainError&) {
        }
        csv += "stopped," + format_double(row[0]) + "," + format_double(row[1]) + "," +
               format_double(row[2]) + "," + format_double(row[3]) + "," + q + "," + w + "\n";
        jrows.push_back({{"table", "stopped"}, {"a", row[0]}, {"b", row[1]}, {"m", row[2]},
                         {"r", row[3]}, {"power", q}, {"log_power", w}});
    }
    write_text_file(out_path(cfg, "exponents.csv"), csv);
    nlohmann::json j;
    j["provenance"] = prov.to_json();
    j["config"] = resolved;
    j["rows"] = jrows;
    write_text_file(out_path(cfg, "exponents.json"), j.dump(2) + "\n");
    say(cfg, "exponents -> " + out_path(cfg, "exponents.csv"));

    if (!cfg.exponents.growth_m.empty()) {
        std::string growth_csv = prov.csv_preamble();
        growth_csv += "m,p,curve_main,curve_ref_log,curve_ref_root_log\n";
        for (double m : cfg.exponents.growth_m) {
            for (const auto& row : moment_growth_comparison(m, cfg.exponents.growth_p)) {
                growth_csv += format_double(m) + "," + format_double(row.p) + "," +
                              format_double(row.curve_main) + "," +
                              format_double(row.curve_ref_log) + "," +
                              format_double(row.curve_ref_root_log) + "\n";
            }
        }
        write_text_file(out_path(cfg, "growth.csv"), growth_csv);
        say(cfg, "exponents: growth curves -> " + out_path(cfg, "growth.csv"));
    }
    return 0;
}

int run_lower(const CliOverrides& cli) {
    const ExperimentConfig cfg = resolve_config(cli, "lower");
    const nlohmann::json resolved = cfg.resolved();
    const Provenance prov = make_provenance(resolved, cfg.seed, true);
    const LowerJob& job = cfg.lower;

    nlohmann::json j;
    j["provenance"] = prov.to_json();
    j["config"] = resolved;

    switch (job.mode) {
    case LowerJob::Mode::two_point: {
        std::string csv = prov.csv_preamble();
        csv += "x,exact,heavy_term,floor,x2_times_exact\n";
        nlohmann::json rows = nlohmann::json::array();
        for (double x : job.grid.values()) {
            const TwoPointTail t = exact_two_point_tail(x);
            csv += format_double(x) + "," + format_double(t.exact) + "," +
                   format_double(t.heavy_term) + "," + format_double(t.floor_value) + "," +
                   format_double(x * x * t.exact) + "\n";
            rows.push_back({{"x", x}, {"exact", t.exact}, {"floor", t.floor_value}});
        }
        j["rows"] = rows;
        if (job.mc_n >= 1000 && job.mc_x >= 3.0) {
            const TwoPointConstruction c = TwoPointConstruction::for_level(job.mc_x);
            CompoundSpec spec{SummandLaw::standard_normal(), c.law};
            SimulateOptions mc_options;
            mc_options.ci_level = 0.999;
            mc_options.threads = cfg.threads;
            const EmpiricalTail mc =
                simulate_tail(spec, std::vector<double>{job.mc_x}, job.mc_n, cfg.seed, mc_options);
            // one-sided exact value: the simulated statistic is two-sided, but the
            // construction is symmetric so both agree in distribution
            j["mc_companion"] = {{"x", job.mc_x},
                                 {"estimate", mc.estimate[0]},
                                 {"ci_low", mc.ci_low[0]},
                                 {"ci_high", mc.ci_high[0]},
                                 {"exact", exact_two_point_tail(job.mc_x).exact},
                                 {"n", job.mc_n}};
        }
        write_text_file(out_path(cfg, "lower.csv"), csv);
        break;
    }
    case LowerJob::Mode::geometric_mc: {
        if (job.summand.kind != SummandConfig::Kind::orlicz)
            throw ConfigError("lower geometric_mc: summand must be an orlicz spec with m > 1");
        const OrliczTailSpec spec(job.summand.m, job.summand.r, job.summand.c1, job.summand.c2);
        GeometricLowerOptions options;
        options.min_expected_hits = job.min_expected_hits;
        options.threads = cfg.threads;
        const std::vector<double> grid = job.grid.values();
        const EmpiricalTail tail =
            geometric_lower_tail_mc(spec, job.mean, grid, job.n_samples, cfg.seed, options);
        write_text_file(out_path(cfg, "lower_tail.csv"), empirical_tail_csv(tail, prov));
        const SumExponents exps = spec.exponents();
        std::string csv = prov.csv_preamble();
        csv += "x,estimate,ci_low,ci_high,lower_envelope,upper_envelope\n";
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double lo_env = (grid[i] >= 2.0)
                ? closed_form_geometric_bound(exps, job.c_lower, job.cap_lower, grid[i])
                : 1.0;
            const double up_env = (grid[i] >= 2.0)
                ? closed_form_geometric_bound(exps, job.c_upper, job.cap_upper, grid[i])
                : 1.0;
            csv += format_double(grid[i]) + "," + format_double(tail.estimate[i]) + "," +
                   format_double(tail.ci_low[i]) + "," + format_double(tail.ci_high[i]) + "," +
                   format_double(lo_env) + "," + format_double(up_env) + "\n";
            rows.push_back({{"x", grid[i]},
                            {"estimate", tail.estimate[i]},
                            {"lower_envelope", lo_env},
                            {"upper_envelope", up_env}});
        }
        j["rows"] = rows;
        write_text_file(out_path(cfg, "lower.csv"), csv);
        break;
    }
    case LowerJob::Mode::poisson_overlay: {
        const auto [m, r] = job.summand.shape();
        const SumExponents exps = sum_exponents(m, r);
        const std::vector<double> grid = job.grid.values();
        const auto rows = poisson_lower_overlay(exps, job.c_lower, job.cap_lower, job.c_upper,
                                                job.cap_upper, grid);
        std::string csv = prov.csv_preamble();
        csv += "x,lower_envelope,upper_envelope\n";
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& row : rows) {
            csv += format_double(row.x) + "," + format_double(row.lower) + "," +
                   format_double(row.upper) + "\n";
            jr.push_back({{"x", row.x}, {"lower", row.lower}, {"upper", row.upper}});
        }
        j["rows"] = jr;
        write_text_file(out_path(cfg, "lower.csv"), csv);
        break;
    }
    }
    write_text_file(out_path(cfg, "lower.json"), j.dump(2) + "\n");
    say(cfg, "lower -> " + out_path(cfg, "lower.csv"));
    return 0;
}

void add_common(CLI::App* sub, CliOverrides& cli) {
    sub->add_option("--config", cli.config_path, "JSON config file");
    sub->add_option("--seed", cli.seed, "RNG seed (overrides config)");
    sub->add_option("--out", cli.out_dir, "output directory (overrides config and RANDSUM_OUT)");
    sub->add_option("--grid", cli.grid, "evaluation grid as lo:hi:step");
    sub->add_flag("--quiet", cli.quiet, "suppress progress output");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exponential tail bounds for random sums, with Monte Carlo verification"};
    app.require_subcommand(1);

    CliOverrides cli;
    int (*runner)(const CliOverrides&) = nullptr;

    auto* bound = app.add_subcommand("bound", "evaluate the mixture bound on a grid");
    add_common(bound, cli);
    bound->callback([&] { runner = run_bound; });
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo tail of the compound sum");
    add_common(simulate, cli);
    simulate->callback([&] { runner = run_simulate; });
    auto* verify = app.add_subcommand("verify", "check empirical tails against the bound");
    add_common(verify, cli);
    verify->callback([&] { runner = run_verify; });
    auto* exponents = app.add_subcommand("exponents", "tabulate tail/moment exponents");
    add_common(exponents, cli);
    exponents->callback([&] { runner = run_exponents; });
    auto* lower = app.add_subcommand("lower", "lower-bound constructions and overlays");
    add_common(lower, cli);
    lower->callback([&] { runner = run_lower; });

    CLI11_PARSE(app, argc, argv);

    try {
        return runner(cli);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
