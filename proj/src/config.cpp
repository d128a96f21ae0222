#include "spdelab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace spdelab {

namespace {

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') return false;
    for (char c : key) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                  c == '.' || c == '-';
        if (!ok) return false;
    }
    return key.find("..") == std::string::npos;
}

std::vector<std::string> split_list(const std::string& key, const KeyValueConfig::Entry& e) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = e.value.find(',', start);
        std::string item = trim(e.value.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (item.empty()) throw ConfigError(key, e.line, "empty list element");
        out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_real(const std::string& key, std::size_t line, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ConfigError(key, line, "expected a number, got '" + text + "'");
    if (!std::isfinite(v)) throw ConfigError(key, line, "value must be finite");
    return v;
}

long long to_integer(const std::string& key, std::size_t line, const std::string& text) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return v;
    // Accept exact integers written as reals, e.g. 1e5.
    double d = to_real(key, line, text);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) {
        throw ConfigError(key, line, "expected an integer, got '" + text + "'");
    }
    return static_cast<long long>(d);
}

}  // namespace

ConfigError::ConfigError(std::string key, std::size_t line, const std::string& message)
    : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) +
                         (key.empty() ? std::string() : "'" + key + "': ") + message),
      key_(std::move(key)),
      line_(line) {}

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("", line, "expected key = value");
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (!valid_key(key)) throw ConfigError(key, line, "malformed key");
        if (value.empty()) throw ConfigError(key, line, "missing value");
        if (auto it = cfg.entries_.find(key); it != cfg.entries_.end()) {
            throw ConfigError(key, line, "duplicate key (first set on line " + std::to_string(it->second.line) + ")");
        }
        cfg.entries_[key] = {value, line};
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    return parse(in);
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

const KeyValueConfig::Entry* KeyValueConfig::find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void KeyValueConfig::set(const std::string& key, std::string value) { entries_[key] = {std::move(value), 0}; }

double parse_real(const std::string& key, const KeyValueConfig::Entry& e) { return to_real(key, e.line, e.value); }

long long parse_integer(const std::string& key, const KeyValueConfig::Entry& e) {
    return to_integer(key, e.line, e.value);
}

std::vector<double> parse_real_list(const std::string& key, const KeyValueConfig::Entry& e) {
    std::vector<double> out;
    for (const auto& item : split_list(key, e)) out.push_back(to_real(key, e.line, item));
    return out;
}

std::vector<long long> parse_integer_list(const std::string& key, const KeyValueConfig::Entry& e) {
    std::vector<long long> out;
    for (const auto& item : split_list(key, e)) out.push_back(to_integer(key, e.line, item));
    return out;
}

}  // namespace spdelab
