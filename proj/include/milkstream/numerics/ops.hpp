#ifndef MILKSTREAM_NUMERICS_OPS_HPP
#define MILKSTREAM_NUMERICS_OPS_HPP

#include <vector>

#include "milkstream/numerics/rng.hpp"
#include "milkstream/numerics/tape.hpp"

// Differentiable free functions over tape Values, plus plain ArrayVec
// overloads for the non-differentiable paths (hard decoding, metric
// evaluation, test oracles). Every Value op installs an exact backward rule;
// composing them keeps the whole graph reverse-mode differentiable.
namespace milkstream::numerics {

// ---- elementwise ----
Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value neg(const Value& a);
// Ties route the gradient to the first argument.
Value maximum(const Value& a, const Value& b);
Value add_scalar(const Value& a, double c);
Value mul_scalar(const Value& a, double c);
Value exp(const Value& a);
Value log(const Value& a);
Value tanh(const Value& a);
Value logistic(const Value& a);
// Pass-through gradient inside [lo, hi] (inclusive), zero outside.
Value clamp(const Value& a, double lo, double hi);
Value stop_gradient(const Value& a);
Value pow_scalar(const Value& a, double p);
// a scaled by the 1x1 value s.
Value scale(const Value& a, const Value& s);

inline Value operator+(const Value& a, const Value& b) { return add(a, b); }
inline Value operator-(const Value& a, const Value& b) { return sub(a, b); }
inline Value operator*(const Value& a, const Value& b) { return mul(a, b); }
inline Value operator-(const Value& a) { return neg(a); }
inline Value operator*(double c, const Value& a) { return mul_scalar(a, c); }
inline Value operator*(const Value& a, double c) { return mul_scalar(a, c); }
inline Value operator+(const Value& a, double c) { return add_scalar(a, c); }
inline Value operator+(double c, const Value& a) { return add_scalar(a, c); }
inline Value operator-(const Value& a, double c) { return add_scalar(a, -c); }
inline Value operator-(double c, const Value& a) { return add_scalar(neg(a), c); }

// ---- reductions / linear algebra ----
Value sum(const Value& a);                       // -> 1x1
Value dot(const Value& a, const Value& b);       // vectors -> 1x1
Value matmul(const Value& a, const Value& b);
Value transpose(const Value& a);
// M.colwise() + v
Value add_colvec(const Value& m, const Value& v);

// ---- scans over vectors (n x 1) ----
Value cumulative_sum(const Value& v);
Value cumulative_product(const Value& v);
Value reversed_cumulative_sum(const Value& v);
// out[j] = sum of v[j-back .. j+fwd] clipped to the vector bounds.
Value moving_sum(const Value& v, int back, int fwd);
// out[0] = fill, out[j] = v[j-1]; turns an inclusive scan into an exclusive
// one.
Value shifted(const Value& v, double fill);

// ---- stabilized pieces ----
// out[j] = num[j] / max(den[j], eps)
Value clamped_divide(const Value& num, const Value& den, double eps);
// Softmax over the first valid_len entries; positions >= valid_len are
// exactly 0.
Value masked_softmax(const Value& e, Eigen::Index valid_len);
Value log_softmax(const Value& v);

// ---- structural ----
Value vconcat(const Value& a, const Value& b);
Value hconcat(const std::vector<Value>& cols);       // d x 1 columns -> d x n
Value stack_scalars(const std::vector<Value>& xs);   // 1x1 values  -> n x 1
Value column(const Value& m, Eigen::Index j);        // -> d x 1
// out = v with s added at row idx.
Value add_at_index(const Value& v, Eigen::Index idx, const Value& s);

// ---- plain (non-tape) counterparts ----
ArrayVec cumulative_sum(const ArrayVec& v);
ArrayVec cumulative_product(const ArrayVec& v);
ArrayVec reversed_cumulative_sum(const ArrayVec& v);
ArrayVec moving_sum(const ArrayVec& v, int back, int fwd);
ArrayVec clamped_divide(const ArrayVec& num, const ArrayVec& den, double eps);
ArrayVec masked_softmax(const ArrayVec& e, Eigen::Index valid_len);
double logistic(double x);

// Zero-mean Gaussian noise; stddev 0 returns exactly 0.
double gaussian_noise(SeededRng& rng, double stddev);
ArrayVec gaussian_noise_vector(SeededRng& rng, Eigen::Index n, double stddev);

}  // namespace milkstream::numerics

#endif
