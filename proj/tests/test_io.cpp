#include "doctest.h"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "toric/io.hpp"

using namespace toric;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("toric_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("rows round trip bit exactly") {
    ResultRow row;
    row.L = 11;
    row.p = 0.1007;               // not representable exactly
    row.tau = 0.02;
    row.N = 1000000;
    row.N_f = 123456;
    row.p_fail = 0.123456;
    row.sigma = 1.0 / 3.0;
    row.master_seed = 18446744073709551615ULL;  // max u64 survives
    row.wall_time_seconds = 12.75;

    const ResultRow back = parse_row(format_row(row));
    CHECK(back.L == row.L);
    CHECK(back.p == row.p);
    CHECK(back.tau == row.tau);
    CHECK(back.N == row.N);
    CHECK(back.N_f == row.N_f);
    CHECK(back.p_fail == row.p_fail);
    CHECK(back.sigma == row.sigma);
    CHECK(back.master_seed == row.master_seed);
    CHECK(back.wall_time_seconds == row.wall_time_seconds);
}

TEST_CASE("malformed rows are rejected with context") {
    CHECK_THROWS_AS(parse_row("1,2,3"), std::runtime_error);
    CHECK_THROWS_AS(parse_row("a,0.1,0.02,10,1,0.1,0.01,0,0.5"), std::runtime_error);
    CHECK_THROWS_AS(parse_row("3,0.1,0.02,10,1,0.1,0.01,0,0.5,extra"),
                    std::runtime_error);
    CHECK_THROWS_AS(parse_row("3,0.1,0.02,10,-1,0.1,0.01,0,0.5"),
                    std::runtime_error);
    CHECK_THROWS_AS(parse_row(""), std::runtime_error);
}

TEST_CASE("append creates the header once and keeps appending") {
    TempDir tmp;
    const auto file = tmp.path / "rows.csv";

    ResultRow a;
    a.L = 5;
    a.p = 0.1;
    a.N = 10;
    append_rows(file, {a});
    ResultRow b = a;
    b.L = 7;
    append_rows(file, {b});

    std::ifstream in(file);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        if (lines == 0) {
            CHECK(line == csv_header());
        }
        ++lines;
    }
    CHECK(lines == 3);

    const auto rows = read_rows(file);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].L == 5);
    CHECK(rows[1].L == 7);
}

TEST_CASE("read_rows validates the header and tolerates blank lines and CRLF") {
    TempDir tmp;
    const auto file = tmp.path / "rows.csv";
    {
        std::ofstream out(file);
        out << csv_header() << "\r\n";
        out << "3,0.1,0.02,10,1,0.1,0.01,7,0.5\r\n";
        out << "\n";
        out << "5,0.2,0.02,10,2,0.2,0.01,8,0.5\n";
    }
    const auto rows = read_rows(file);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].master_seed == 7);
    CHECK(rows[1].L == 5);

    const auto bad = tmp.path / "bad.csv";
    {
        std::ofstream out(bad);
        out << "not,the,header\n";
    }
    CHECK_THROWS_AS(read_rows(bad), std::runtime_error);
    CHECK_THROWS_AS(read_rows(tmp.path / "missing.csv"), std::runtime_error);

    const auto empty = tmp.path / "empty.csv";
    { std::ofstream out(empty); }
    CHECK(read_rows(empty).empty());
}

TEST_CASE("fit reports round trip through text") {
    FitReport report;
    report.comments.push_back("threshold fit, 72 points");
    report.set("p_c0", 0.10273, 0.00031);
    report.set("nu0", 1.5301, 0.0042);
    report.set("residual_chi2_per_dof", 1.02);

    const std::string text = format_report(report);
    CHECK(text.find("p_c0 = ") != std::string::npos);
    CHECK(text.find("±") != std::string::npos);
    CHECK(text.find("# threshold fit") != std::string::npos);

    const FitReport back = parse_report(text);
    REQUIRE(back.entries.size() == 3);
    CHECK(back.comments.size() == 1);
    CHECK(back.value("p_c0") == 0.10273);
    REQUIRE(back.find("nu0") != nullptr);
    CHECK(back.find("nu0")->uncertainty.has_value());
    CHECK(*back.find("nu0")->uncertainty == 0.0042);
    CHECK_FALSE(back.find("residual_chi2_per_dof")->uncertainty.has_value());
    CHECK_THROWS_AS(back.value("absent"), std::runtime_error);
}

TEST_CASE("reports accept the ascii uncertainty separator") {
    const FitReport r = parse_report("a = 32.31 +- 0.13\n");
    REQUIRE(r.entries.size() == 1);
    CHECK(r.value("a") == 32.31);
    CHECK(*r.entries[0].uncertainty == 0.13);

    CHECK_THROWS_AS(parse_report("no equals sign here\n"), std::runtime_error);
}

TEST_CASE("reports write to and read from disk") {
    TempDir tmp;
    const auto file = tmp.path / "fit.txt";
    FitReport report;
    report.set("A", 0.246, 0.005);
    write_report(file, report);
    const FitReport back = read_report(file);
    CHECK(back.value("A") == 0.246);
    CHECK_THROWS_AS(read_report(tmp.path / "absent.txt"), std::runtime_error);
}
