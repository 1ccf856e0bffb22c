#include "envpoison/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "envpoison/errors.hpp"

namespace envpoison {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_num(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    if (t == "inf") return std::numeric_limits<double>::infinity();
    try {
        size_t pos = 0;
        const double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw DomainError("config value for '" + key + "' is not a number: " + t);
    }
}

}  // namespace

KvConfig KvConfig::from_string(const std::string& text) {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(lineno) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw DomainError("config line " + std::to_string(lineno) + " has an empty key");
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

KvConfig KvConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

std::string KvConfig::get_str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KvConfig::get_num(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_num(it->second, key);
}

long KvConfig::get_int(const std::string& key, long fallback) const {
    const double v = get_num(key, double(fallback));
    const long r = long(std::llround(v));
    if (double(r) != v) throw DomainError("config value for '" + key + "' is not an integer");
    return r;
}

bool KvConfig::get_flag(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw DomainError("config value for '" + key + "' is not a boolean: " + v);
}

std::vector<double> KvConfig::get_list(const std::string& key,
                                       const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_num(item, key));
    if (out.empty()) throw DomainError("config list '" + key + "' is empty");
    return out;
}

std::vector<long> KvConfig::get_int_list(const std::string& key,
                                         const std::vector<long>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<long> out;
    for (double v : get_list(key, {})) {
        const long r = long(std::llround(v));
        if (double(r) != v)
            throw DomainError("config list '" + key + "' has a non-integer entry");
        out.push_back(r);
    }
    return out;
}

const std::string& KvConfig::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw DomainError("missing required config key '" + key + "'");
    return it->second;
}

std::string KvConfig::get_str(const std::string& key) const { return require(key); }

double KvConfig::get_num(const std::string& key) const {
    return parse_num(require(key), key);
}

long KvConfig::get_int(const std::string& key) const {
    require(key);
    return get_int(key, 0);
}

bool KvConfig::get_flag(const std::string& key) const {
    require(key);
    return get_flag(key, false);
}

std::vector<double> KvConfig::get_list(const std::string& key) const {
    require(key);
    return get_list(key, {});
}

std::vector<long> KvConfig::get_int_list(const std::string& key) const {
    require(key);
    return get_int_list(key, {});
}

}  // namespace envpoison
