#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lrg {

/// Flat key/value configuration with dotted section prefixes.
///
/// Grammar: one `key = value` pair per line, `#` starts a comment,
/// blank lines ignored. Values are numbers, words, or comma-separated
/// number lists. Keys are unique; a duplicate key is an error.
///
/// Every key must be consumed by some module; `require_all_used` turns
/// leftovers into a ConfigError so typos cannot silently pass.
class KeyValues {
public:
    static KeyValues parse_file(const std::string& path);
    static KeyValues parse_string(const std::string& text, const std::string& origin = "<string>");

    /// Applies a "section.key=value" override (CLI --set).
    void apply_override(const std::string& assignment);

    bool has(const std::string& key) const;

    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;

    /// Keys with the given prefix that no getter has touched yet.
    std::vector<std::string> unused_keys(const std::string& prefix = "") const;

    /// Throws ConfigError naming every unused key with the given prefix.
    void require_all_used(const std::string& prefix = "") const;

    /// FNV-1a hash over the sorted canonical "key=value" listing. Stable
    /// across whitespace and ordering differences in the source file.
    std::uint64_t content_hash() const;

private:
    std::string raw(const std::string& key) const;

    std::map<std::string, std::string> values_;
    mutable std::map<std::string, bool> used_;
    std::string origin_;
};

} // namespace lrg
