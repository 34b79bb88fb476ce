#pragma once

#include <map>
#include <string>

namespace seg {

// Flat `key = value` config text, '#' comments, dotted prefixes allowed in
// keys (e.g. stage2.tau). Values are strings until asked for as a type.
class KeyValueConfig {
public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    long long get_int(const std::string& key, long long def) const;
    double get_double(const std::string& key, double def) const;
    bool get_bool(const std::string& key, bool def) const;

    // Required variants throw std::runtime_error naming the key.
    std::string require_string(const std::string& key) const;

    void set(const std::string& key, const std::string& value);

    const std::map<std::string, std::string>& entries() const { return entries_; }

    // All keys materialized, one `key = value` per line, sorted. Used for the
    // config echo in run logs.
    std::string render() const;

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace seg
