#ifndef MILKSTREAM_ATTENTION_CONFIG_HPP
#define MILKSTREAM_ATTENTION_CONFIG_HPP

#include <stdexcept>
#include <string>

#include "milkstream/constants.hpp"

namespace milkstream::attention {

enum class Kind { soft, monotonic, mocha, milk, wait_k };

inline std::string to_string(Kind k) {
    switch (k) {
        case Kind::soft: return "soft";
        case Kind::monotonic: return "monotonic";
        case Kind::mocha: return "mocha";
        case Kind::milk: return "milk";
        case Kind::wait_k: return "wait_k";
    }
    return "?";
}

inline Kind kind_from_string(const std::string& s) {
    if (s == "soft") return Kind::soft;
    if (s == "monotonic") return Kind::monotonic;
    if (s == "mocha") return Kind::mocha;
    if (s == "milk") return Kind::milk;
    if (s == "wait_k" || s == "wait-k" || s == "waitk") return Kind::wait_k;
    throw std::invalid_argument("unknown attention kind: " + s);
}

struct AttentionConfig {
    Kind kind = Kind::soft;
    int chunk_size = 4;            // cs; MoChA only
    double noise_n = 4.0;          // stddev of the pre-sigmoid Gaussian noise
    double energy_offset = -4.0;   // r, initial monotonic-energy offset
    double eps = kEps;

    void validate() const {
        if (kind == Kind::mocha && chunk_size < 1) {
            throw std::invalid_argument("AttentionConfig: chunk_size must be >= 1 for mocha");
        }
        if (noise_n < 0.0) throw std::invalid_argument("AttentionConfig: noise_n must be >= 0");
        if (eps <= 0.0) throw std::invalid_argument("AttentionConfig: eps must be positive");
    }

    bool monotonic_family() const {
        return kind == Kind::monotonic || kind == Kind::mocha || kind == Kind::milk;
    }
};

}  // namespace milkstream::attention

#endif
