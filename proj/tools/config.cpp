#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hsfp_cli {

namespace {

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigParseError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    ConfigFile cfg = parse_string(buf.str(), path);
    cfg.base_dir_ = std::filesystem::path(path).parent_path().string();
    return cfg;
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = strip(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigParseError(origin + ":" + std::to_string(line_no) +
                                       ": unterminated section header");
            section = strip(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigParseError(origin + ":" + std::to_string(line_no) +
                                       ": empty section name");
            if (!cfg.values_.count(section))
                cfg.order_.push_back(section);
            cfg.values_[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError(origin + ":" + std::to_string(line_no) +
                                   ": expected 'key = value'");
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (key.empty())
            throw ConfigParseError(origin + ":" + std::to_string(line_no) + ": empty key");
        if (!cfg.values_.count(section))
            cfg.order_.push_back(section);
        cfg.values_[section][key] = value;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto it = values_.find(section);
    return it != values_.end() && it->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    auto it = values_.find(section);
    if (it == values_.end())
        return fallback;
    auto kt = it->second.find(key);
    return kt == it->second.end() ? fallback : kt->second;
}

std::string ConfigFile::require(const std::string& section, const std::string& key) const {
    if (!has(section, key))
        throw ConfigParseError(origin_ + ": missing required key '" + key + "' in section [" +
                               section + "]");
    return get(section, key, "");
}

double parse_double(const std::string& text, const std::string& context) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigParseError(context + ": bad number '" + text + "'");
    return v;
}

int parse_int(const std::string& text, const std::string& context) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigParseError(context + ": bad integer '" + text + "'");
    return v;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    if (!has(section, key))
        return fallback;
    return parse_double(get(section, key, ""), "[" + section + "] " + key);
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
    if (!has(section, key))
        return fallback;
    return parse_int(get(section, key, ""), "[" + section + "] " + key);
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
    if (!has(section, key))
        return fallback;
    std::string v = get(section, key, "");
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "yes" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "0")
        return false;
    throw ConfigParseError("[" + section + "] " + key + ": bad boolean '" + v + "'");
}

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos)
            comma = text.size();
        std::string item = strip(text.substr(pos, comma - pos));
        if (!item.empty())
            out.push_back(item);
        pos = comma + 1;
    }
    return out;
}

std::vector<double> ConfigFile::get_double_list(const std::string& section,
                                                const std::string& key,
                                                const std::vector<double>& fallback) const {
    if (!has(section, key))
        return fallback;
    std::vector<double> out;
    for (const auto& item : split_csv_list(get(section, key, "")))
        out.push_back(parse_double(item, "[" + section + "] " + key));
    return out;
}

std::vector<int> ConfigFile::get_int_list(const std::string& section, const std::string& key,
                                          const std::vector<int>& fallback) const {
    if (!has(section, key))
        return fallback;
    std::vector<int> out;
    for (const auto& item : split_csv_list(get(section, key, "")))
        out.push_back(parse_int(item, "[" + section + "] " + key));
    return out;
}

std::string ConfigFile::resolve_path(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir_.empty())
        return path;
    return (std::filesystem::path(base_dir_) / p).string();
}

} // namespace hsfp_cli
