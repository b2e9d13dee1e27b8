#include "milkstream/harness/config.hpp"

#include <fstream>
#include <sstream>

#include "milkstream/errors.hpp"

namespace milkstream::harness {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return from_string(buf.str());
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw FormatError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw FormatError("config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw FormatError("config key " + key + ": '" + it->second + "' is not a number");
    }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw FormatError("config key " + key + ": '" + it->second + "' is not an integer");
    }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw FormatError("config key " + key + ": '" + it->second + "' is not an integer");
    }
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& part : split_csv(it->second)) {
        try {
            out.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw FormatError("config key " + key + ": '" + part + "' is not a number");
        }
    }
    return out;
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key,
                                              const std::vector<int>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<int> out;
    for (const auto& part : split_csv(it->second)) {
        try {
            out.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw FormatError("config key " + key + ": '" + part + "' is not an integer");
        }
    }
    return out;
}

std::vector<std::string> KeyValueConfig::get_string_list(
    const std::string& key, const std::vector<std::string>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return split_csv(it->second);
}

std::string KeyValueConfig::serialize() const {
    std::ostringstream out;
    // Sectionless keys first so reparsing never misfiles them.
    for (const auto& [full_key, value] : values_) {
        if (full_key.find('.') == std::string::npos) out << full_key << '=' << value << '\n';
    }
    std::string current_section;
    for (const auto& [full_key, value] : values_) {
        const auto dotpos = full_key.find('.');
        if (dotpos == std::string::npos) continue;
        const std::string section = full_key.substr(0, dotpos);
        if (section != current_section) {
            out << '[' << section << "]\n";
            current_section = section;
        }
        out << full_key.substr(dotpos + 1) << '=' << value << '\n';
    }
    return out.str();
}

}  // namespace milkstream::harness
