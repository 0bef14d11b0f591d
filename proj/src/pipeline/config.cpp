#include "bpred/pipeline/config.hpp"

#include <fstream>
#include <sstream>

#include "bpred/core/text.hpp"

namespace bpred::pipeline {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_items(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

Config Config::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("--config", "cannot read config file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), file.string());
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config c;
    std::istringstream in(text);
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(origin, no, "expected key=value");
        const auto key = trim(t.substr(0, eq));
        if (key.empty()) throw ParseError(origin, no, "empty key");
        c.values_[key] = trim(t.substr(eq + 1));
    }
    return c;
}

void Config::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value: " + assignment);
    values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::string Config::str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "missing config key '" + key + "'");
    return it->second;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::num(const std::string& key) const {
    const auto v = parse_double(str(key));
    if (!v) throw ConfigError(key, "config key '" + key + "' is not a number");
    return *v;
}

double Config::num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

long long Config::integer(const std::string& key) const {
    const auto v = parse_int(str(key));
    if (!v) throw ConfigError(key, "config key '" + key + "' is not an integer");
    return *v;
}

long long Config::integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
}

std::uint64_t Config::seed(const std::string& key) const {
    const auto v = integer(key);
    if (v < 0) throw ConfigError(key, "config key '" + key + "' must be a non-negative seed");
    return static_cast<std::uint64_t>(v);
}

bool Config::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto v = str(key);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError(key, "config key '" + key + "' is not a boolean");
}

std::vector<std::string> Config::list(const std::string& key, const std::vector<std::string>& fallback) const {
    return has(key) ? split_items(str(key)) : fallback;
}

std::vector<double> Config::num_list(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& item : split_items(str(key))) {
        const auto v = parse_double(item);
        if (!v) throw ConfigError(key, "config key '" + key + "' holds a non-numeric item '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

std::vector<long long> Config::int_list(const std::string& key, const std::vector<long long>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<long long> out;
    for (const auto& item : split_items(str(key))) {
        const auto v = parse_int(item);
        if (!v) throw ConfigError(key, "config key '" + key + "' holds a non-integer item '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

}  // namespace bpred::pipeline
