#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "randsum/config.hpp"
#include "randsum/errors.hpp"

using namespace randsum;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return RANDSUM_CLI_PATH; }

struct TempDir {
    fs::path path;
    TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("randsum_test_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream cells_in(line);
        std::string cell;
        while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("config: grid parsing and round trip") {
    const GridSpec g = GridSpec::parse("0:6:0.25");
    CHECK(g.values().size() == 25);
    CHECK(g.values().front() == 0.0);
    CHECK(g.values().back() == doctest::Approx(6.0));
    CHECK_THROWS_AS(GridSpec::parse("junk"), ConfigError);
    CHECK_THROWS_AS(GridSpec::parse("0:6:-1"), ConfigError);

    ExperimentConfig cfg;
    cfg.seed = 99;
    cfg.verify.method = VerifyJob::Method::closed_geometric;
    cfg.exponents.stopping_rows.push_back({2.0, 0.0, 2.0, 0.0});
    const ExperimentConfig back = ExperimentConfig::from_json(cfg.resolved());
    CHECK(back.resolved() == cfg.resolved());
}

TEST_CASE("config: validation failures carry field context") {
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"bound", {{"summand", {{"kind", "weird"}}}}}}),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"verify",
                                                  {{"grid", {{"lo", 0}, {"hi", 4}, {"step", 1}}},
                                                   {"mc_grid", {{"lo", 0}, {"hi", 5}, {"step", 1}}}}}}),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::load_file("missing_config.json"), ConfigError);
}

TEST_CASE("cli bound: monotone curve, valid branches, byte-identical reruns") {
    TempDir tmp("bound");
    const fs::path cfg = tmp.path / "config.json";
    write(cfg, R"({
      "seed": 5,
      "bound": {
        "summand": {"kind": "normal"},
        "index": {"kind": "geometric", "mean": 4},
        "grid": {"lo": 0, "hi": 6, "step": 0.5}
      }
    })");
    const std::string out1 = (tmp.path / "run1").string();
    const std::string out2 = (tmp.path / "run2").string();
    REQUIRE(run_cli("bound --config " + cfg.string() + " --out " + out1 + " --quiet") == 0);
    REQUIRE(run_cli("bound --config " + cfg.string() + " --out " + out2 + " --quiet") == 0);

    const std::string csv = slurp(fs::path(out1) / "bound.csv");
    const auto rows = csv_rows(csv);
    REQUIRE(rows.size() == 14); // header + 13 grid points
    CHECK(rows[0] == std::vector<std::string>{"x", "bound", "branch", "dominant_n"});
    double prev = 2.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double v = std::stod(rows[i][1]);
        CHECK(v <= prev + 1e-15);
        prev = v;
        const bool valid_branch =
            rows[i][2] == "W" || rows[i][2] == "chi-star" || rows[i][2] == "chebyshev";
        CHECK(valid_branch);
    }
    CHECK(csv == slurp(fs::path(out2) / "bound.csv"));
    CHECK(slurp(fs::path(out1) / "bound.json") == slurp(fs::path(out2) / "bound.json"));
}

TEST_CASE("cli simulate: deterministic output for a fixed seed") {
    TempDir tmp("simulate");
    const fs::path cfg = tmp.path / "config.json";
    write(cfg, R"({
      "simulate": {
        "summand": {"kind": "pm1"},
        "index": {"kind": "geometric", "mean": 4},
        "grid": {"lo": 0.5, "hi": 2.5, "step": 1.0},
        "n_samples": 20000
      }
    })");
    const std::string out1 = (tmp.path / "a").string();
    const std::string out2 = (tmp.path / "b").string();
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --seed 42 --out " + out1 +
                    " --quiet") == 0);
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --seed 42 --out " + out2 +
                    " --quiet") == 0);
    CHECK(slurp(fs::path(out1) / "simulate.csv") == slurp(fs::path(out2) / "simulate.csv"));
    const auto rows = csv_rows(slurp(fs::path(out1) / "simulate.csv"));
    CHECK(rows[0] == std::vector<std::string>{"x", "estimate", "ci_low", "ci_high", "hits", "N"});
}

TEST_CASE("cli verify: clean pass, forced failure, grid mismatch") {
    TempDir tmp("verify");
    const fs::path ok_cfg = tmp.path / "ok.json";
    write(ok_cfg, R"({
      "verify": {
        "summand": {"kind": "normal"},
        "index": {"kind": "deterministic", "n": 4},
        "grid": {"lo": 0, "hi": 3, "step": 0.5},
        "n_samples": 50000,
        "min_expected_hits": 5
      }
    })");
    const std::string out = (tmp.path / "ok").string();
    REQUIRE(run_cli("verify --config " + ok_cfg.string() + " --seed 9 --out " + out +
                    " --quiet") == 0);
    const auto rows = csv_rows(slurp(fs::path(out) / "verify.csv"));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const bool ok_verdict = rows[i][4] == "PASS" || rows[i][4] == "SKIP-INFEASIBLE";
        CHECK(ok_verdict);
    }
    const std::string verdict_json = slurp(fs::path(out) / "verify.json");
    CHECK(verdict_json.find("\"pass\"") != std::string::npos);
    CHECK(verdict_json.find("\"fail\": 0") != std::string::npos);

    // closed-form envelope with an oversized decay constant cannot hold against
    // MC (constant small enough that the points still pass the hit gate)
    const fs::path bad_cfg = tmp.path / "bad.json";
    write(bad_cfg, R"({
      "verify": {
        "summand": {"kind": "normal"},
        "index": {"kind": "geometric", "mean": 4},
        "grid": {"lo": 2, "hi": 3, "step": 0.5},
        "n_samples": 50000,
        "min_expected_hits": 1,
        "method": "closed_geometric",
        "c": 3.0
      }
    })");
    CHECK(run_cli("verify --config " + bad_cfg.string() + " --seed 9 --out " +
                  (tmp.path / "bad").string() + " --quiet") == 1);

    const fs::path mismatch = tmp.path / "mismatch.json";
    write(mismatch, R"({
      "verify": {
        "grid": {"lo": 0, "hi": 4, "step": 1.0},
        "mc_grid": {"lo": 0, "hi": 5, "step": 1.0}
      }
    })");
    CHECK(run_cli("verify --config " + mismatch.string() + " --quiet --out " +
                  (tmp.path / "m").string()) == 2);
}

TEST_CASE("cli exponents: table rows and the domain-error marker") {
    TempDir tmp("exponents");
    const fs::path cfg = tmp.path / "config.json";
    write(cfg, R"({
      "exponents": {
        "ml": [[2, 0], ["inf", 5], [1, -2], [1.5, 1]],
        "stopping": [[2, 0, 2, 0]]
      }
    })");
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run_cli("exponents --config " + cfg.string() + " --out " + out + " --quiet") == 0);
    const auto rows = csv_rows(slurp(fs::path(out) / "exponents.csv"));
    REQUIRE(rows.size() == 6); // header + 4 sum rows + 1 stopped row
    CHECK(rows[1][5] == "2");
    CHECK(rows[1][6] == "0");
    CHECK(rows[2][5] == "2");
    CHECK(std::stod(rows[3][5]) == doctest::Approx(2.0 / 3.0));
    CHECK(rows[4][5] == "domain-error");
    CHECK(rows[4][6] == "domain-error");
    CHECK(std::stod(rows[5][5]) == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("cli lower: two-point table and floor column") {
    TempDir tmp("lower");
    const fs::path cfg = tmp.path / "config.json";
    write(cfg, R"({
      "lower": {
        "mode": "two_point",
        "grid": {"lo": 3, "hi": 10, "step": 0.5},
        "mc_x": 3.0,
        "mc_n": 20000
      }
    })");
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run_cli("lower --config " + cfg.string() + " --seed 4 --out " + out + " --quiet") ==
            0);
    const auto rows = csv_rows(slurp(fs::path(out) / "lower.csv"));
    REQUIRE(rows.size() >= 15);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        // x^2 P(S > x) never falls below the fixed floor constant
        CHECK(std::stod(rows[i][4]) >= std::stod(rows[i][3]) * std::stod(rows[i][0]) *
                                           std::stod(rows[i][0]) - 1e-12);
    }
    CHECK(slurp(fs::path(out) / "lower.json").find("mc_companion") != std::string::npos);
}

TEST_CASE("cli: config errors exit with code 2") {
    TempDir tmp("badcfg");
    const fs::path cfg = tmp.path / "broken.json";
    write(cfg, "{ not json");
    CHECK(run_cli("bound --config " + cfg.string() + " --quiet --out " +
                  (tmp.path / "x").string()) == 2);
    CHECK(run_cli("bound --grid nonsense --quiet --out " + (tmp.path / "y").string()) == 2);
}

TEST_CASE("cli: numerical failures exit with code 3") {
    TempDir tmp("numerr");
    const fs::path cfg = tmp.path / "config.json";
    // a tail this flat never vanishes within double range; the second-moment
    // quadrature reports non-convergence and the run dies with code 3
    write(cfg, R"({
      "bound": {
        "summand": {"kind": "orlicz", "m": 0.001, "r": 0.0},
        "index": {"kind": "geometric", "mean": 4},
        "grid": {"lo": 0, "hi": 2, "step": 1.0}
      }
    })");
    CHECK(run_cli("bound --config " + cfg.string() + " --quiet --out " +
                  (tmp.path / "out").string()) == 3);
}

TEST_CASE("cli: bare subcommand runs with built-in defaults") {
    TempDir tmp("defaults");
    REQUIRE(run_cli("exponents --out " + (tmp.path / "out").string() + " --quiet") == 0);
    CHECK(fs::exists(tmp.path / "out" / "exponents.csv"));
    CHECK(fs::exists(tmp.path / "out" / "exponents.json"));
}

TEST_CASE("cli simulate: optional moment table and stopping experiment") {
    TempDir tmp("moments");
    const fs::path cfg = tmp.path / "config.json";
    write(cfg, R"({
      "simulate": {
        "summand": {"kind": "pm1"},
        "index": {"kind": "geometric", "mean": 4},
        "grid": {"lo": 1, "hi": 2, "step": 1.0},
        "n_samples": 20000,
        "moments": {"p_grid": [2, 4]},
        "stopping": {"rule": "first_passage", "level": 4, "p_grid": [2, 4]}
      }
    })");
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --seed 2 --out " + out + " --quiet") ==
            0);
    const auto moment_rows = csv_rows(slurp(fs::path(out) / "moments.csv"));
    REQUIRE(moment_rows.size() == 3);
    CHECK(moment_rows[0][0] == "p");
    CHECK(std::stod(moment_rows[1][1]) == doctest::Approx(1.0).epsilon(0.05)); // Wald at p = 2
    const auto stop_rows = csv_rows(slurp(fs::path(out) / "stopping.csv"));
    REQUIRE(stop_rows.size() == 3);
    CHECK(stop_rows[1][3] == "1"); // anchored curve covers p = 2 by construction
    CHECK(slurp(fs::path(out) / "stopping.json").find("fitted_m") != std::string::npos);
}

TEST_CASE("cli exponents: growth reference curves") {
    TempDir tmp("growth");
    const fs::path cfg = tmp.path / "config.json";
    write(cfg, R"({"exponents": {"ml": [[2, 0]], "growth": {"m": [2, "inf"], "p_grid": [2, 8, 32]}}})");
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run_cli("exponents --config " + cfg.string() + " --out " + out + " --quiet") == 0);
    const auto rows = csv_rows(slurp(fs::path(out) / "growth.csv"));
    REQUIRE(rows.size() == 7); // header + 2 m-values x 3 p-values
    CHECK(std::stod(rows[1][2]) < std::stod(rows[2][2]));
}

TEST_CASE("cli: empirical summand tail loaded from CSV drives bound and verify") {
    TempDir tmp("empirical");
    const fs::path tail_csv = tmp.path / "tail.csv";
    write(tail_csv, "x,T\n1.0,0.5\n2.0,0.0\n");
    const fs::path cfg = tmp.path / "config.json";
    write(cfg, R"({
      "verify": {
        "summand": {"kind": "empirical_csv", "path": ")" + tail_csv.string() + R"("},
        "index": {"kind": "geometric", "mean": 4},
        "grid": {"lo": 0, "hi": 3, "step": 0.5},
        "n_samples": 50000,
        "min_expected_hits": 5
      }
    })");
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run_cli("verify --config " + cfg.string() + " --seed 3 --out " + out + " --quiet") ==
            0);
    const auto rows = csv_rows(slurp(fs::path(out) / "verify.csv"));
    REQUIRE(rows.size() >= 6);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][4] != "FAIL");
}

TEST_CASE("cli: --grid flag overrides the config grid") {
    TempDir tmp("gridflag");
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run_cli("bound --grid 0:2:1 --out " + out + " --quiet") == 0);
    const auto rows = csv_rows(slurp(fs::path(out) / "bound.csv"));
    REQUIRE(rows.size() == 4); // header + x in {0, 1, 2}
    CHECK(rows[3][0] == "2");
}

TEST_CASE("cli: RANDSUM_OUT provides the default output directory") {
    TempDir tmp("envout");
    const std::string cmd = "RANDSUM_OUT=" + (tmp.path / "env_out").string() + " " +
                            cli_path() + " exponents --quiet >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(tmp.path / "env_out" / "exponents.csv"));
}
