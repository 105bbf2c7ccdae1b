#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace toric {

// One simulation cell as stored on disk. Floats are written with 17
// significant digits so a parse-format round trip is bit exact, which is
// what lets resumed sweeps trust previously written rows.
struct ResultRow {
    int L = 0;
    double p = 0.0;
    double tau = 0.0;
    std::uint64_t N = 0;
    std::uint64_t N_f = 0;
    double p_fail = 0.0;
    double sigma = 0.0;
    std::uint64_t master_seed = 0;
    double wall_time_seconds = 0.0;
};

const std::string& csv_header();
std::string format_row(const ResultRow& row);

// Both throw std::runtime_error with the offending line on malformed input.
ResultRow parse_row(const std::string& line);
std::vector<ResultRow> read_rows(const std::filesystem::path& path);

// Creates the file with a header when absent or empty, then appends and
// flushes, so a killed sweep loses at most the row being written.
void append_rows(const std::filesystem::path& path,
                 const std::vector<ResultRow>& rows);

// Key-value report emitted by the fitting commands. Lines look like
//   p_c0 = 0.10273 ± 0.00031
// with '#' comment lines for context; uncertainty-free entries drop the
// "± ..." part. Entries keep insertion order.
struct ReportEntry {
    std::string key;
    double value = 0.0;
    std::optional<double> uncertainty;
};

struct FitReport {
    std::vector<std::string> comments;
    std::vector<ReportEntry> entries;

    void set(const std::string& key, double value);
    void set(const std::string& key, double value, double uncertainty);
    const ReportEntry* find(const std::string& key) const;

    // Value of an entry that must exist; throws std::runtime_error otherwise.
    double value(const std::string& key) const;
};

std::string format_report(const FitReport& report);

// Accepts both "±" and its ASCII fallback "+-" between value and
// uncertainty. Unknown lines are an error, not a warning.
FitReport parse_report(const std::string& text);

void write_report(const std::filesystem::path& path, const FitReport& report);
FitReport read_report(const std::filesystem::path& path);

}  // namespace toric
