#include "toric/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace toric {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& field, const std::string& line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || field.empty() || errno == ERANGE) {
        throw std::runtime_error("malformed numeric field '" + field +
                                 "' in line: " + line);
    }
    return v;
}

std::uint64_t parse_u64(const std::string& field, const std::string& line) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
    if (end != field.c_str() + field.size() || field.empty() ||
        errno == ERANGE || field[0] == '-') {
        throw std::runtime_error("malformed integer field '" + field +
                                 "' in line: " + line);
    }
    return v;
}

std::string strip(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return "";
    }
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

const std::string& csv_header() {
    static const std::string header =
        "L,p,tau,N,N_f,P_fail,sigma,master_seed,wall_time_seconds";
    return header;
}

std::string format_row(const ResultRow& row) {
    std::ostringstream out;
    out << row.L << ',' << format_double(row.p) << ',' << format_double(row.tau)
        << ',' << row.N << ',' << row.N_f << ',' << format_double(row.p_fail)
        << ',' << format_double(row.sigma) << ',' << row.master_seed << ','
        << format_double(row.wall_time_seconds);
    return out.str();
}

ResultRow parse_row(const std::string& line) {
    const auto fields = split(line, ',');
    if (fields.size() != 9) {
        throw std::runtime_error("expected 9 fields, got " +
                                 std::to_string(fields.size()) +
                                 " in line: " + line);
    }
    ResultRow row;
    row.L = static_cast<int>(parse_u64(fields[0], line));
    row.p = parse_double(fields[1], line);
    row.tau = parse_double(fields[2], line);
    row.N = parse_u64(fields[3], line);
    row.N_f = parse_u64(fields[4], line);
    row.p_fail = parse_double(fields[5], line);
    row.sigma = parse_double(fields[6], line);
    row.master_seed = parse_u64(fields[7], line);
    row.wall_time_seconds = parse_double(fields[8], line);
    return row;
}

std::vector<ResultRow> read_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        return {};
    }
    if (strip(line) != csv_header()) {
        throw std::runtime_error("unexpected header in " + path.string() + ": " +
                                 line);
    }
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        const std::string trimmed = strip(line);
        if (trimmed.empty()) {
            continue;
        }
        rows.push_back(parse_row(trimmed));
    }
    return rows;
}

void append_rows(const std::filesystem::path& path,
                 const std::vector<ResultRow>& rows) {
    const bool need_header =
        !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for append");
    }
    if (need_header) {
        out << csv_header() << '\n';
    }
    for (const ResultRow& row : rows) {
        out << format_row(row) << '\n';
    }
    out.flush();
    if (!out) {
        throw std::runtime_error("write to " + path.string() + " failed");
    }
}

void FitReport::set(const std::string& key, double value) {
    entries.push_back({key, value, std::nullopt});
}

void FitReport::set(const std::string& key, double value, double uncertainty) {
    entries.push_back({key, value, uncertainty});
}

const ReportEntry* FitReport::find(const std::string& key) const {
    for (const ReportEntry& e : entries) {
        if (e.key == key) {
            return &e;
        }
    }
    return nullptr;
}

double FitReport::value(const std::string& key) const {
    const ReportEntry* e = find(key);
    if (!e) {
        throw std::runtime_error("report is missing entry '" + key + "'");
    }
    return e->value;
}

std::string format_report(const FitReport& report) {
    std::ostringstream out;
    for (const std::string& comment : report.comments) {
        out << "# " << comment << '\n';
    }
    for (const ReportEntry& e : report.entries) {
        out << e.key << " = " << format_double(e.value);
        if (e.uncertainty) {
            out << " ± " << format_double(*e.uncertainty);
        }
        out << '\n';
    }
    return out.str();
}

FitReport parse_report(const std::string& text) {
    FitReport report;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string trimmed = strip(line);
        if (trimmed.empty()) {
            continue;
        }
        if (trimmed[0] == '#') {
            report.comments.push_back(strip(trimmed.substr(1)));
            continue;
        }
        const auto eq = trimmed.find(" = ");
        if (eq == std::string::npos) {
            throw std::runtime_error("malformed report line: " + line);
        }
        ReportEntry entry;
        entry.key = strip(trimmed.substr(0, eq));
        std::string rest = strip(trimmed.substr(eq + 3));
        // Both separators are 4 bytes: the sign is 2 bytes of UTF-8.
        std::string::size_type sep = rest.find(" ± ");
        if (sep == std::string::npos) {
            sep = rest.find(" +- ");
        }
        constexpr std::string::size_type sep_len = 4;
        if (sep == std::string::npos) {
            entry.value = parse_double(rest, line);
        } else {
            entry.value = parse_double(strip(rest.substr(0, sep)), line);
            entry.uncertainty =
                parse_double(strip(rest.substr(sep + sep_len)), line);
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

void write_report(const std::filesystem::path& path, const FitReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for write");
    }
    out << format_report(report);
    out.flush();
    if (!out) {
        throw std::runtime_error("write to " + path.string() + " failed");
    }
}

FitReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_report(buf.str());
}

}  // namespace toric
