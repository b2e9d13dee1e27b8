#ifndef MILKSTREAM_ATTENTION_MONOTONIC_HPP
#define MILKSTREAM_ATTENTION_MONOTONIC_HPP

#include <functional>

#include "milkstream/constants.hpp"
#include "milkstream/numerics/ops.hpp"
#include "milkstream/numerics/rng.hpp"

namespace milkstream::attention {

using numerics::ArrayVec;
using numerics::SeededRng;
using numerics::Value;

// Bernoulli stopping probabilities from monotonic energies. Training adds
// zero-mean Gaussian noise (stddev noise_n) to each energy before the
// sigmoid to push probabilities toward 0/1; inference adds none.
Value selection_probabilities(const Value& energies, double noise_n, SeededRng& rng,
                              bool training);
ArrayVec selection_probabilities(const ArrayVec& energies, double noise_n, SeededRng& rng,
                                 bool training);

// Marginal stop distribution for one output step, computed via the parallel
// cumsum/cumprod closed form of the scan recurrence
//   alpha[i,j] = p[j] ((1-p[j-1]) alpha[i,j-1]/p[j-1] + alpha_prev[j]).
// 1-p is clamped into [eps, 1] and the division is clamped, which keeps the
// parallel form finite where the literal recurrence degenerates.
// For the first output step alpha_prev is one-hot at position 1.
Value monotonic_alpha_row(const Value& p, const Value& alpha_prev, double eps = kEps);
ArrayVec monotonic_alpha_row(const ArrayVec& p, const ArrayVec& alpha_prev, double eps = kEps);

// Moves any residual stop probability (the head overshooting the sentence)
// onto the final source position, equivalent to forcing p at EOS to 1.
// The shifted residual carries gradient.
Value preserve_mass(const Value& alpha);
ArrayVec preserve_mass(const ArrayVec& alpha);

// Test-time attention head. Positions are 1-indexed source indices.
struct HardHead {
    Eigen::Index position = 1;
    bool halted = false;
};

struct HardStep {
    HardHead head;
    Eigen::Index attended_len = 0;  // t_i; softmax is applied over u[1..t_i]
};

// Scans source positions from head.position, stopping at the first j with
// energy > 0 or at source_len (forced stop, EOS). monotonic_energy takes a
// 1-indexed position and is only called for positions < source_len; each
// advance past the already-read prefix is one more source read on the
// caller's side.
HardStep hard_decode_step(const std::function<double(Eigen::Index)>& monotonic_energy,
                          HardHead head, Eigen::Index source_len);

}  // namespace milkstream::attention

#endif
