#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nldiff/errors.hpp"
#include "nldiff/functionals.hpp"
#include "nldiff/grid.hpp"
#include "nldiff/profiles.hpp"

namespace nldiff {

/// Shortest text that round-trips the double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : path_(path) {
        std::error_code ec;
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        out_.open(path, std::ios::binary);
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    }

    void header(const std::vector<std::string>& cols) { row_text(cols); }

    void row(const std::vector<double>& vals) {
        std::vector<std::string> cells;
        cells.reserve(vals.size());
        for (double v : vals) cells.push_back(format_double(v));
        row_text(cells);
    }

    void row_text(const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
        out_ << '\n';
        if (!out_) throw IoError("write failed for " + path_.string());
    }

    void close() {
        out_.close();
        if (out_.fail()) throw IoError("write failed for " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

inline void write_series_csv(const std::filesystem::path& path, const FunctionalSeries& s) {
    CsvWriter w(path);
    w.header({"t", "value"});
    for (std::size_t k = 0; k < s.size(); ++k) w.row({s.t[k], s.value[k]});
    w.close();
}

/// Snapshot columns r, n, p with p the signed pressure.
inline void write_snapshot_csv(const std::filesystem::path& path, const RadialField& f, double gamma) {
    CsvWriter w(path);
    w.header({"r", "n", "p"});
    const double s = gamma > 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double n = f[i];
        w.row({f.grid.center(i), n, n > 0.0 ? s * std::pow(n, gamma) : 0.0});
    }
    w.close();
}

/// Closed-form profile table: r, n, p, dp/dr at `points` radii in [0, radius].
inline void write_profile_csv(std::ostream& os, const BarenblattProfile& b, double t, double radius, int points) {
    if (points < 2) throw DomainError("profile table needs at least two points");
    if (!(radius > 0.0)) throw DomainError("profile table radius must be positive");
    os << "r,n,p,dp_dr\n";
    for (int k = 0; k < points; ++k) {
        const double r = radius * k / (points - 1);
        os << format_double(r) << ',' << format_double(b.density(t, r)) << ',' << format_double(b.pressure(t, r))
           << ',' << format_double(b.pressure_gradient(t, r)) << '\n';
    }
}

inline void write_profile_csv(const std::filesystem::path& path, const BarenblattProfile& b, double t,
                              double radius, int points) {
    std::ostringstream os;
    write_profile_csv(os, b, t, radius, points);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << os.str();
    out.close();
    if (out.fail()) throw IoError("write failed for " + path.string());
}

/// Two-column t,value file as written by write_series_csv.
inline FunctionalSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    FunctionalSeries s;
    s.label = path.stem().string();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("t,", 0) == 0) continue;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected t,value");
        try {
            s.push(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::invalid_argument&) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": not a number");
        }
    }
    return s;
}

}  // namespace nldiff
