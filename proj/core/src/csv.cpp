#include "lrg/csv.hpp"

#include "lrg/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lrg {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::comment(const std::string& line) { os_ << "# " << line << "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) os_ << ',';
        os_ << columns[i];
    }
    os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os_ << ',';
        os_ << format_double(values[i]);
    }
    os_ << '\n';
}

void CsvWriter::raw_row(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os_ << ',';
        os_ << values[i];
    }
    os_ << '\n';
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

CsvTable CsvTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file: " + path);

    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
            table.comments.push_back(line.substr(start));
            continue;
        }
        if (!have_header) {
            table.columns = split_csv_line(line);
            have_header = true;
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != table.columns.size())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(table.columns.size()) + " cells, got " +
                              std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            std::size_t pos = 0;
            double v = 0;
            try {
                v = std::stod(c, &pos);
            } catch (const std::exception&) {
                throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
            }
            if (pos != c.size() || std::isnan(v))
                throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw ConfigError(path + ": missing CSV header");
    return table;
}

bool CsvTable::comment_value(const std::string& key, std::string& out) const {
    const std::string needle = key + "=";
    for (const auto& c : comments) {
        std::stringstream ss(c);
        std::string tok;
        while (ss >> tok) {
            if (tok.rfind(needle, 0) == 0) {
                out = tok.substr(needle.size());
                return true;
            }
        }
    }
    return false;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace lrg
