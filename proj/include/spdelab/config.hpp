#pragma once

// Flat key=value configuration files with dotted section prefixes:
//
//   # comment
//   experiment = probe-temporal
//   model.N = 64
//
// Every entry remembers its line so that later validation errors can point at it.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdelab {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::size_t line, const std::string& message);

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }  // 0 when not from the file

private:
    std::string key_;
    std::size_t line_;
};

class KeyValueConfig {
public:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };

    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    const Entry* find(const std::string& key) const;
    void set(const std::string& key, std::string value);  // line 0
    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, Entry> entries_;
};

// Value parsers; they throw ConfigError naming the key and line.
double parse_real(const std::string& key, const KeyValueConfig::Entry& e);
long long parse_integer(const std::string& key, const KeyValueConfig::Entry& e);
std::vector<double> parse_real_list(const std::string& key, const KeyValueConfig::Entry& e);
std::vector<long long> parse_integer_list(const std::string& key, const KeyValueConfig::Entry& e);

}  // namespace spdelab
