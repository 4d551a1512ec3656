#include "lrg/config.hpp"

#include "lrg/csv.hpp"
#include "lrg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lrg {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + text + "'");
    }
    if (pos != text.size() || std::isnan(v))
        throw ConfigError("key '" + key + "': not a number: '" + text + "'");
    return v;
}

} // namespace

KeyValues KeyValues::parse_string(const std::string& text, const std::string& origin) {
    KeyValues kv;
    kv.origin_ = origin;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (kv.values_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv.values_[key] = value;
    }
    return kv;
}

KeyValues KeyValues::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

void KeyValues::apply_override(const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be key=value: '" + assignment + "'");
    std::string key = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));
    if (key.empty()) throw ConfigError("override with empty key: '" + assignment + "'");
    values_[key] = value;
    used_.erase(key);
}

bool KeyValues::has(const std::string& key) const { return values_.count(key) != 0; }

std::string KeyValues::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    used_[key] = true;
    return it->second;
}

double KeyValues::get_double(const std::string& key) const { return parse_number(key, raw(key)); }

double KeyValues::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int KeyValues::get_int(const std::string& key) const {
    double v = get_double(key);
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw ConfigError("key '" + key + "': expected integer");
    return i;
}

int KeyValues::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValues::get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string text = raw(key);
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected unsigned integer");
    }
}

std::string KeyValues::get_string(const std::string& key) const { return raw(key); }

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

std::vector<double> KeyValues::get_double_list(const std::string& key) const {
    const std::string text = raw(key);
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(parse_number(key, trim(cell)));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::vector<double> KeyValues::get_double_list(const std::string& key,
                                               const std::vector<double>& fallback) const {
    return has(key) ? get_double_list(key) : fallback;
}

std::vector<std::string> KeyValues::unused_keys(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
        if (!k.empty() && k.rfind(prefix, 0) != 0) continue;
        auto it = used_.find(k);
        if (it == used_.end() || !it->second) out.push_back(k);
    }
    return out;
}

void KeyValues::require_all_used(const std::string& prefix) const {
    auto leftover = unused_keys(prefix);
    if (leftover.empty()) return;
    std::string msg = origin_ + ": unknown key(s):";
    for (const auto& k : leftover) msg += " '" + k + "'";
    throw ConfigError(msg);
}

std::uint64_t KeyValues::content_hash() const {
    std::string canon;
    for (const auto& [k, v] : values_) {
        canon += k;
        canon += '=';
        canon += v;
        canon += '\n';
    }
    return fnv1a64(canon);
}

} // namespace lrg
