// config.hpp — flat key=value configuration files with typed getters.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace mcse {

// thrown on invalid user configuration; the CLI maps it to exit code 2
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Config {
  public:
    Config() = default;
    static Config load(const std::string& path);
    static Config parse(const std::string& text);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_str(const std::string& key, const std::string& fallback) const;
    std::string require_str(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;

    // canonical sorted key=value text; hashed into run manifests
    std::string canonical() const;

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace mcse
