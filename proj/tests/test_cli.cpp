#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "toric/io.hpp"
#include "toric/montecarlo.hpp"
#include "toric/noise.hpp"
#include "toric/overhead.hpp"
#include "toric/scaling.hpp"

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

// Runs the installed binary under a scrubbed environment so ambient TORIC_*
// variables cannot leak into the tests. `env_prefix` may re-introduce them.
CommandResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    std::string cmd = "env -u TORIC_SEED -u TORIC_WORKERS -u TORIC_TAU ";
    cmd += env_prefix.empty() ? "" : env_prefix + " ";
    cmd += std::string(TORIC_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult result;
    char buffer[4096];
    std::size_t n = 0;
    while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) {
        result.output.append(buffer, n);
    }
    const int status = pclose(pipe);
    REQUIRE(WIFEXITED(status));
    result.exit_code = WEXITSTATUS(status);
    return result;
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("toric_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        lines.push_back(line);
    }
    return lines;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("simulate prints a parseable row that matches the library") {
    const auto run = run_cli("--seed 11 simulate --L 3 --p 0.08 --trials 2000");
    CHECK(run.exit_code == 0);

    const auto lines = split_lines(run.output);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == toric::csv_header());

    const toric::ResultRow row = toric::parse_row(lines[1]);
    CHECK(row.L == 3);
    CHECK(row.p == 0.08);
    CHECK(row.tau == 0.02);
    CHECK(row.N == 2000);
    CHECK(row.master_seed == 11);

    const toric::FailureEstimate direct =
        toric::run_batch({3, 0.08, 0.02, 11}, 2000, 1);
    CHECK(row.N_f == direct.failures);
    CHECK(row.p_fail == direct.p_fail);

    const auto rerun = run_cli("--seed 11 simulate --L 3 --p 0.08 --trials 2000");
    CHECK(rerun.exit_code == 0);
    // Wall time differs between runs, so compare everything except it.
    const toric::ResultRow again = toric::parse_row(split_lines(rerun.output)[1]);
    CHECK(again.N_f == row.N_f);
    CHECK(again.master_seed == row.master_seed);
}

TEST_CASE("global options work before or after the subcommand") {
    const auto front = run_cli("--seed 9 simulate --L 3 --p 0.08 --trials 500");
    const auto back = run_cli("simulate --L 3 --p 0.08 --trials 500 --seed 9");
    REQUIRE(front.exit_code == 0);
    REQUIRE(back.exit_code == 0);
    const toric::ResultRow a = toric::parse_row(split_lines(front.output)[1]);
    const toric::ResultRow b = toric::parse_row(split_lines(back.output)[1]);
    CHECK(a.N_f == b.N_f);
    CHECK(a.master_seed == b.master_seed);
}

TEST_CASE("seed precedence: command line flag beats environment variable") {
    const auto env_only =
        run_cli("simulate --L 3 --p 0.05 --trials 100", "TORIC_SEED=42");
    REQUIRE(env_only.exit_code == 0);
    CHECK(toric::parse_row(split_lines(env_only.output)[1]).master_seed == 42);

    const auto both =
        run_cli("--seed 7 simulate --L 3 --p 0.05 --trials 100", "TORIC_SEED=42");
    REQUIRE(both.exit_code == 0);
    CHECK(toric::parse_row(split_lines(both.output)[1]).master_seed == 7);
}

TEST_CASE("simulate --out appends to a CSV file with a single header") {
    TempDir tmp;
    const auto out = (tmp.path / "single.csv").string();
    const auto first =
        run_cli("--seed 3 simulate --L 3 --p 0.06 --trials 200 --out " + out);
    REQUIRE(first.exit_code == 0);
    const auto second =
        run_cli("--seed 4 simulate --L 3 --p 0.07 --trials 200 --out " + out);
    REQUIRE(second.exit_code == 0);

    const auto rows = toric::read_rows(out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].master_seed == 3);
    CHECK(rows[1].master_seed == 4);

    std::size_t header_count = 0;
    for (const std::string& line : split_lines(read_file(out))) {
        if (line == toric::csv_header()) {
            ++header_count;
        }
    }
    CHECK(header_count == 1);
}

TEST_CASE("exact emits a report that round trips and matches the library") {
    const auto run = run_cli("exact --L 3 --p 0.05 --max-weight 4");
    REQUIRE(run.exit_code == 0);

    const toric::FitReport report = toric::parse_report(run.output);
    const toric::ExactFailureResult direct =
        toric::exact_failure_probability(3, 0.05, 0.02, 4, 1);
    CHECK(report.value("L") == 3.0);
    CHECK(report.value("max_weight") == 4.0);
    CHECK(report.value("truncated") == 1.0);
    CHECK(report.value("p_fail") == direct.p_fail);
    CHECK(report.value("truncation_bound") == direct.truncation_bound);

    // The per-weight table rides along as comments.
    bool found_weight_two = false;
    for (const std::string& comment : report.comments) {
        if (comment == "2 153 18") {
            found_weight_two = true;
        }
    }
    CHECK(found_weight_two);
}

TEST_CASE("sweep fills a grid, seeds cells by position, and resumes") {
    TempDir tmp;
    const auto out = (tmp.path / "sweep.csv").string();

    const auto first = run_cli("--seed 5 sweep --L 3 --p 0.06,0.1 --trials 400 --out " + out);
    REQUIRE(first.exit_code == 0);
    const std::string after_first = read_file(out);

    auto rows = toric::read_rows(out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].L == 3);
    CHECK(rows[0].p == 0.06);
    CHECK(rows[0].master_seed == toric::derive_seed(5, 0));
    CHECK(rows[1].p == 0.1);
    CHECK(rows[1].master_seed == toric::derive_seed(5, 1));

    // A cell is a pure function of (master seed, grid position).
    const toric::FailureEstimate direct =
        toric::run_batch({3, 0.06, 0.02, toric::derive_seed(5, 0)}, 400, 1);
    CHECK(rows[0].N_f == direct.failures);

    // Extending the grid reuses finished cells and only runs the new ones.
    const auto second =
        run_cli("--seed 5 sweep --L 3,5 --p 0.06,0.1 --trials 400 --out " + out);
    REQUIRE(second.exit_code == 0);
    const std::string after_second = read_file(out);
    CHECK(after_second.compare(0, after_first.size(), after_first) == 0);

    rows = toric::read_rows(out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[2].L == 5);
    CHECK(rows[2].p == 0.06);
    CHECK(rows[2].master_seed == toric::derive_seed(5, 2));
    CHECK(rows[3].L == 5);
    CHECK(rows[3].p == 0.1);
    CHECK(rows[3].master_seed == toric::derive_seed(5, 3));

    // Only the two new rows appear on stdout (after the header).
    const auto lines = split_lines(second.output);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == toric::csv_header());
    CHECK(toric::parse_row(lines[1]).L == 5);
}

TEST_CASE("dump-config resolves environment and flags without running") {
    const auto run = run_cli("--dump-config simulate --L 5 --p 0.1",
                             "TORIC_WORKERS=3");
    CHECK(run.exit_code == 0);
    CHECK(run.output.find("command = simulate") != std::string::npos);
    CHECK(run.output.find("workers = 3") != std::string::npos);
    CHECK(run.output.find("seed = 0") != std::string::npos);
    CHECK(run.output.find("L = 5") != std::string::npos);
    // No simulation ran: no CSV header in the output.
    CHECK(run.output.find(toric::csv_header()) == std::string::npos);
}

TEST_CASE("exit codes distinguish validation, fit, and parse failures") {
    SUBCASE("invalid lattice size is a validation error") {
        CHECK(run_cli("simulate --L 4 --p 0.05 --trials 10").exit_code == 2);
    }
    SUBCASE("unknown options are parse errors") {
        CHECK(run_cli("simulate --L 3 --p 0.05 --frobnicate").exit_code == 2);
    }
    SUBCASE("missing subcommand") {
        CHECK(run_cli("").exit_code == 2);
    }
    SUBCASE("help exits cleanly") {
        CHECK(run_cli("--help").exit_code == 0);
        CHECK(run_cli("simulate --help").exit_code == 0);
    }
    SUBCASE("missing data file is caught at parse time") {
        CHECK(run_cli("fit decay --data /no/such/file.csv").exit_code == 2);
    }
    SUBCASE("a fit with no usable points reports non-convergence") {
        TempDir tmp;
        const auto data = (tmp.path / "bad.csv").string();
        std::vector<toric::ResultRow> rows;
        for (int L : {5, 7, 9}) {
            toric::ResultRow row;
            row.L = L;
            row.p = 0.2;  // above threshold: outside the decay window
            row.tau = 0.02;
            row.N = 1000;
            row.N_f = 500;
            row.p_fail = 0.5;
            row.sigma = 0.0158;
            rows.push_back(row);
        }
        toric::append_rows(data, rows);
        CHECK(run_cli("fit decay --data " + data).exit_code == 3);
    }
}

TEST_CASE("fit decay, predict, and overhead chain through report files") {
    TempDir tmp;
    const auto data = (tmp.path / "decay.csv").string();
    const auto report_path = (tmp.path / "decay_report.txt").string();

    // Synthetic data drawn exactly from the scaling form with the reference
    // parameters; every point sits inside the validity window.
    const toric::UniversalScalingParams reference;
    std::vector<toric::ResultRow> rows;
    for (int L : {9, 11, 13}) {
        for (double p : {0.05, 0.06, 0.07}) {
            toric::ResultRow row;
            row.L = L;
            row.p = p;
            row.tau = 0.02;
            row.N = 100000;
            const double pf = toric::p_fail_ush(L, p, reference);
            row.N_f = static_cast<std::uint64_t>(std::llround(pf * 100000));
            row.p_fail = pf;
            row.sigma = 0.05 * pf;
            rows.push_back(row);
        }
    }
    toric::append_rows(data, rows);

    const auto fit =
        run_cli("fit decay --data " + data + " --out " + report_path);
    REQUIRE(fit.exit_code == 0);

    const toric::FitReport report = toric::read_report(report_path);
    CHECK(report.value("a") == doctest::Approx(reference.a).epsilon(1e-9));
    CHECK(report.value("A") == reference.A);
    CHECK(report.value("p_c0") == reference.p_c0);
    CHECK(report.value("nu0") == reference.nu0);
    CHECK(report.value("points_used") == 9.0);
    CHECK(report.value("points_rejected") == 0.0);
    CHECK(report.value("residual_chi2_per_dof") < 1e-12);

    // predict consumes the report and evaluates the fitted form.
    const auto predict =
        run_cli("predict --L 11 --p 0.08 --params " + report_path);
    REQUIRE(predict.exit_code == 0);
    const toric::FitReport prediction = toric::parse_report(predict.output);
    CHECK(prediction.value("p_fail_ush") ==
          doctest::Approx(toric::p_fail_ush(11, 0.08, reference)).epsilon(1e-9));
    CHECK(prediction.value("p_fail") == prediction.value("p_fail_ush"));
    bool regime_comment = false;
    for (const std::string& comment : prediction.comments) {
        if (comment == "regime = universal_scaling") {
            regime_comment = true;
        }
    }
    CHECK(regime_comment);

    // overhead consumes the same report.
    const auto overhead =
        run_cli("overhead --p 0.05 --target 1e-3 --params " + report_path);
    REQUIRE(overhead.exit_code == 0);
    const toric::FitReport plan_report = toric::parse_report(overhead.output);
    const toric::OverheadPlan plan = toric::plan_overhead(0.05, 1e-3, reference);
    CHECK(plan_report.value("l_code") == plan.recommended().l_code);
    CHECK(plan_report.value("omega") ==
          doctest::Approx(plan.recommended().omega).epsilon(1e-9));

    // Explicit flags override values taken from the report.
    const auto overridden = run_cli("predict --L 11 --p 0.08 --params " +
                                    report_path + " --A 0.5");
    REQUIRE(overridden.exit_code == 0);
    const toric::FitReport changed = toric::parse_report(overridden.output);
    toric::UniversalScalingParams bumped = reference;
    bumped.A = 0.5;
    CHECK(changed.value("p_fail_ush") ==
          doctest::Approx(toric::p_fail_ush(11, 0.08, bumped)).epsilon(1e-9));
}

TEST_CASE("fit quadratic on synthetic rows recovers the curvature") {
    TempDir tmp;
    const auto data = (tmp.path / "quad.csv").string();

    // ln P = 1.0 - 0.8 L + 0.01 L^2 at p = 0.05, plus off-p rows that the
    // --p filter must ignore.
    std::vector<toric::ResultRow> rows;
    for (int L : {5, 7, 9, 11, 13}) {
        toric::ResultRow row;
        row.L = L;
        row.p = 0.05;
        row.tau = 0.02;
        row.N = 100000;
        row.p_fail = std::exp(1.0 - 0.8 * L + 0.01 * L * L);
        row.sigma = 0.02 * row.p_fail;
        row.N_f = 1;
        rows.push_back(row);
        row.p = 0.09;
        row.p_fail = 0.5;
        row.sigma = 0.01;
        rows.push_back(row);
    }
    toric::append_rows(data, rows);

    const auto run = run_cli("fit quadratic --data " + data + " --p 0.05");
    REQUIRE(run.exit_code == 0);
    const toric::FitReport report = toric::parse_report(run.output);
    CHECK(report.value("points") == 5.0);
    CHECK(report.value("alpha") == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(report.value("beta") == doctest::Approx(-0.8).epsilon(1e-6));
    CHECK(report.value("gamma") == doctest::Approx(0.01).epsilon(1e-4));
    CHECK(report.value("curvature_ratio") ==
          doctest::Approx(0.01 / 0.8).epsilon(1e-4));
}
