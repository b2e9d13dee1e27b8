#ifndef MILKSTREAM_ATTENTION_INDUCED_HPP
#define MILKSTREAM_ATTENTION_INDUCED_HPP

#include "milkstream/constants.hpp"
#include "milkstream/numerics/ops.hpp"

namespace milkstream::attention {

using numerics::ArrayVec;
using numerics::Value;

// Attention distribution induced by infinite lookback behind a monotonic
// head:
//   beta[j] = sum_{k >= j} alpha[k] exp(u[j]) / sum_{l <= k} exp(u[l])
// evaluated as exp(u) * revcumsum(alpha / cumsum(exp(u))) with the row max
// subtracted from u before exponentiation. alpha must be normalized
// (post mass preservation).
Value milk_beta_row(const Value& alpha, const Value& u, double eps = kEps);
ArrayVec milk_beta_row(const ArrayVec& alpha, const ArrayVec& u, double eps = kEps);

// Chunkwise variant: soft attention over the cs positions ending at the
// head,
//   beta[j] = sum_{k=j}^{min(j+cs-1,n)} alpha[k] exp(u[j])
//             / sum_{l=max(1,k-cs+1)}^{k} exp(u[l]).
// cs = 1 reduces to pure monotonic attention (beta == alpha); cs >= n
// matches milk_beta_row.
Value mocha_beta_row(const Value& alpha, const Value& u, int chunk_size, double eps = kEps);
ArrayVec mocha_beta_row(const ArrayVec& alpha, const ArrayVec& u, int chunk_size,
                        double eps = kEps);

// c = sum_j beta[j] h_j with encoder states as columns.
Value expected_context(const Value& beta, const Value& encoder_states);

}  // namespace milkstream::attention

#endif
