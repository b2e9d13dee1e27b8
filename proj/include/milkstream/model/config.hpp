#ifndef MILKSTREAM_MODEL_CONFIG_HPP
#define MILKSTREAM_MODEL_CONFIG_HPP

#include <stdexcept>

#include "milkstream/attention/config.hpp"

namespace milkstream::model {

// Desk-scale streaming seq2seq. The encoder is unidirectional by
// construction, which is what every streaming attention kind requires.
struct ModelConfig {
    int vocab_size = 32;
    int embed_dim = 16;
    int hidden_dim = 32;
    int encoder_layers = 1;
    int decoder_layers = 1;
    attention::AttentionConfig attention;
    double label_smoothing = 0.1;

    void validate() const {
        if (vocab_size < 5) throw std::invalid_argument("ModelConfig: vocab_size too small");
        if (embed_dim < 1 || hidden_dim < 1 || encoder_layers < 1 || decoder_layers < 1) {
            throw std::invalid_argument("ModelConfig: all dims and layer counts must be >= 1");
        }
        if (label_smoothing < 0.0 || label_smoothing >= 1.0) {
            throw std::invalid_argument("ModelConfig: label_smoothing must be in [0, 1)");
        }
        attention.validate();
    }
};

// Fixed schedule: read k tokens, then alternate writes with reads at the
// emission rate (fractional rates accumulate; 1.1 reads one extra token
// every 10 writes).
struct WaitKSchedule {
    int k = 3;
    double emission_rate = 1.0;

    void validate() const {
        if (k < 1) throw std::invalid_argument("WaitKSchedule: k must be >= 1");
        if (emission_rate <= 0.0) {
            throw std::invalid_argument("WaitKSchedule: emission_rate must be positive");
        }
    }
};

}  // namespace milkstream::model

#endif
