#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bpred/core/types.hpp"

namespace bpred::pipeline {

/// Missing or malformed configuration entry; carries the key.
class ConfigError : public DomainError {
public:
    ConfigError(const std::string& key, const std::string& what) : DomainError(what), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Flat key=value configuration with dotted section prefixes. Lines starting
/// with '#' and blank lines are ignored.
class Config {
public:
    static Config load(const std::filesystem::path& file);
    static Config parse(const std::string& text, const std::string& origin = "<string>");

    /// Applies one "key=value" override.
    void set_assignment(const std::string& assignment);
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    /// Required entries throw ConfigError naming the key when absent.
    std::string str(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key) const;
    double num(const std::string& key, double fallback) const;
    long long integer(const std::string& key) const;
    long long integer(const std::string& key, long long fallback) const;
    std::uint64_t seed(const std::string& key) const;
    bool flag(const std::string& key, bool fallback) const;
    /// Comma-separated list; empty items are dropped.
    std::vector<std::string> list(const std::string& key, const std::vector<std::string>& fallback) const;
    std::vector<double> num_list(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<long long> int_list(const std::string& key, const std::vector<long long>& fallback) const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace bpred::pipeline
