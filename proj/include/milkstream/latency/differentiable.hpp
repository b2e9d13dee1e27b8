#ifndef MILKSTREAM_LATENCY_DIFFERENTIABLE_HPP
#define MILKSTREAM_LATENCY_DIFFERENTIABLE_HPP

#include "milkstream/numerics/ops.hpp"

namespace milkstream::latency {

using numerics::Value;

// Tape counterparts of the latency metrics, used inside the training
// objective. Delays here are expected delays (fractional) and gradient
// flows through every piece.

// sum_j j * alpha[j], 1-indexed; alpha must be normalized.
Value expected_delay(const Value& alpha_row);

// Differentiable g': g'[0] = g[0], g'[i] = max(g[i], g'[i-1] + 1/gamma).
// The max routes gradient to whichever branch was taken (ties to g[i]).
Value clamp_delays(const Value& g, double gamma);

// (1/|y|) sum_i (g'[i] - i/gamma).
Value differentiable_average_lagging(const Value& g, double gamma);

// nll + lambda * DAL(g).
Value latency_augmented_loss(const Value& nll, const Value& g, double lambda, double gamma);

}  // namespace milkstream::latency

#endif
