#pragma once

// Run configuration: a flat "key = value" text file, overridable by flags.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ewlab::config {

struct KeySpec {
    std::string name;
    std::string default_value;
    std::string help;
    bool echo = true; // included in report metadata
};

// Keys understood by a subcommand (sieve, avg, finitary, expsum, maximal, kbsz).
const std::vector<KeySpec>& keys_for(std::string_view command);
const std::vector<std::string>& commands();

class RunConfig {
public:
    static RunConfig parse(std::string_view text);
    static RunConfig load(const std::filesystem::path& path);

    // Sorted "key = value" lines; parse(to_text()) reproduces the config.
    std::string to_text() const;
    void save(const std::filesystem::path& path) const;

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    // Typed getters; failures name the key and the offending text.
    const std::string& get(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::int64_t get_i64(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<std::uint64_t> get_u64_list(const std::string& key) const;
    std::vector<std::int64_t> get_i64_list(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key, char separator) const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

private:
    std::map<std::string, std::string> entries_;
};

// Fills defaults for command and rejects keys it does not know.
RunConfig resolve(std::string_view command, const RunConfig& user);

} // namespace ewlab::config
