#ifndef MILKSTREAM_ATTENTION_ENERGIES_HPP
#define MILKSTREAM_ATTENTION_ENERGIES_HPP

#include <Eigen/Dense>

#include "milkstream/numerics/ops.hpp"

namespace milkstream::attention {

using numerics::Value;

// Additive (Bahdanau-style) energy: v^T tanh(W_s s + W_h h + b).
struct AdditiveEnergyParams {
    Value w_s;  // d_a x d_s
    Value w_h;  // d_a x d_h
    Value b;    // d_a x 1
    Value v;    // d_a x 1
};

// Additive energy with a weight-normalized projection and learned offset:
// gain * (v/||v||)^T tanh(W_s s + W_h h + b) + r. The offset r starts
// negative so early stopping probabilities are small and the head learns to
// read far before committing.
struct MonotonicEnergyParams {
    Value w_s;
    Value w_h;
    Value b;
    Value v_raw;  // pre-normalization projection
    Value gain;   // 1x1
    Value r;      // 1x1
};

Value soft_energy(const Value& decoder_state, const Value& encoder_state,
                  const AdditiveEnergyParams& p);
// Energies against every column of encoder_states; returns n x 1.
Value soft_energy_row(const Value& decoder_state, const Value& encoder_states,
                      const AdditiveEnergyParams& p);

Value monotonic_energy(const Value& decoder_state, const Value& encoder_state,
                       const MonotonicEnergyParams& p);
Value monotonic_energy_row(const Value& decoder_state, const Value& encoder_states,
                           const MonotonicEnergyParams& p);

// Per-sentence energy matrices (|y| x width) with identical padding: columns
// at or beyond valid_len hold the -inf sentinel in both.
struct EnergyPair {
    Eigen::ArrayXXd monotonic;
    Eigen::ArrayXXd soft;
    Eigen::Index valid_len = 0;

    static EnergyPair padded(const Eigen::ArrayXXd& monotonic_rows,
                             const Eigen::ArrayXXd& soft_rows, Eigen::Index width);
};

}  // namespace milkstream::attention

#endif
