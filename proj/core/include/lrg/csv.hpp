#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace lrg {

/// Shortest round-trip decimal representation ("%.17g").
std::string format_double(double v);

/// Writes a CSV stream with `#`-prefixed comment lines before the header.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void comment(const std::string& line);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& values);

private:
    std::ostream& os_;
};

/// In-memory CSV contents: leading comments, one header, numeric rows.
struct CsvTable {
    std::vector<std::string> comments; // without the leading "# "
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Parses a file written by CsvWriter. Rejects NaN cells and rows whose
    /// width differs from the header.
    static CsvTable load(const std::string& path);

    /// Looks up "key=value" entries in the comment block.
    bool comment_value(const std::string& key, std::string& out) const;
};

/// FNV-1a 64-bit hash, used for config fingerprints in output headers.
std::uint64_t fnv1a64(const std::string& data);

} // namespace lrg
