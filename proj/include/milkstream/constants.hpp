#ifndef MILKSTREAM_CONSTANTS_HPP
#define MILKSTREAM_CONSTANTS_HPP

namespace milkstream {

// Stabilizer for every clamped division in the repo; sized so cumulative
// products over sequences up to ~64 tokens clamp before they underflow.
inline constexpr double kEps = 1e-10;

// Sentinel energy for padded source positions; masked before any exp().
inline constexpr double kNegInf = -1e300;

}  // namespace milkstream

#endif
