#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsfp_cli {

/// Raised for malformed config files or bad values (process exit code 1).
class ConfigParseError : public std::runtime_error {
public:
    explicit ConfigParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Flat `key = value` file with `[section]` headers. `#` starts a comment.
/// Section and key order is preserved so per-signal sections keep their
/// file order.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    std::string require(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                  const std::vector<int>& fallback) const;

    /// Section names in file order (each name listed once).
    const std::vector<std::string>& sections() const { return order_; }

    /// Directory of the config file, for resolving relative paths.
    const std::string& base_dir() const { return base_dir_; }
    std::string resolve_path(const std::string& path) const;

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
    std::vector<std::string> order_;
    std::string origin_;
    std::string base_dir_;
};

double parse_double(const std::string& text, const std::string& context);
int parse_int(const std::string& text, const std::string& context);
std::vector<std::string> split_csv_list(const std::string& text);

} // namespace hsfp_cli
