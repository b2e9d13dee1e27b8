#ifndef MILKSTREAM_HARNESS_CONFIG_HPP
#define MILKSTREAM_HARNESS_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace milkstream::harness {

// Flat key=value configuration with [section] headers; a key "lr" under
// [train] is addressed as "train.lr". CLI flags overwrite keys, and the
// fully resolved map is echoed into every output directory so a run can be
// audited and replayed.
class KeyValueConfig {
public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
    std::vector<std::string> get_string_list(const std::string& key,
                                             const std::vector<std::string>& fallback) const;

    // Sections and keys sorted; parseable by from_string.
    std::string serialize() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace milkstream::harness

#endif
