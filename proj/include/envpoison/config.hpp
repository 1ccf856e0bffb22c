#pragma once

#include <map>
#include <string>
#include <vector>

namespace envpoison {

// Flat key = value configuration.  '#' starts a comment; blank lines are
// skipped; later assignments win.  set() lets command-line flags override
// file values.
class KvConfig {
  public:
    KvConfig() = default;
    static KvConfig from_file(const std::string& path);
    static KvConfig from_string(const std::string& text);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_str(const std::string& key, const std::string& fallback) const;
    double get_num(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_flag(const std::string& key, bool fallback) const;
    // Comma-separated doubles; fallback when the key is absent.
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;
    std::vector<long> get_int_list(const std::string& key,
                                   const std::vector<long>& fallback) const;

    // Required-key variants: absence is an error.
    std::string get_str(const std::string& key) const;
    double get_num(const std::string& key) const;
    long get_int(const std::string& key) const;
    bool get_flag(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;
    std::vector<long> get_int_list(const std::string& key) const;

  private:
    const std::string& require(const std::string& key) const;

    std::map<std::string, std::string> values_;
};

}  // namespace envpoison
