#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bucksim {

// Flat `key = value` configuration. Keys may carry a section prefix
// (`sde.epsilon = 0.05`); `#` starts a comment. Later assignments win, so
// overrides applied after loading a file take precedence.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text, std::string_view source = "<string>");
    static KeyValueConfig load(const std::filesystem::path& path);

    void set(std::string key, std::string value);
    // Parses "key=value"; throws ConfigError when malformed.
    void apply_override(std::string_view assignment);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) const;

    std::vector<std::string> keys() const;

private:
    std::map<std::string, std::string> values_;
};

// Strict decimal parse of the whole string; throws ConfigError naming `what`.
double parse_double(std::string_view text, std::string_view what);

} // namespace bucksim
