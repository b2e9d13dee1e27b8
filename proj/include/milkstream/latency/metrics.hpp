#ifndef MILKSTREAM_LATENCY_METRICS_HPP
#define MILKSTREAM_LATENCY_METRICS_HPP

#include "milkstream/numerics/tape.hpp"
#include "milkstream/trace.hpp"

namespace milkstream::latency {

using numerics::ArrayVec;

// Per-target-token delays g plus the sentence geometry the metrics need.
// Delays may be fractional (expectations) but must stay within
// [1, source_len] up to a small tolerance; the clamped delays g' derived
// from them may exceed source_len.
struct DelayVector {
    ArrayVec g;
    Eigen::Index source_len = 0;
    Eigen::Index target_len = 0;
    double gamma = 0.0;  // target_len / source_len

    static DelayVector from_delays(ArrayVec g, Eigen::Index source_len);
};

struct LatencyReport {
    double ap = 0.0;
    double al = 0.0;
    double dal = 0.0;
};

// Expected position of the attention head: sum_j j * alpha[j], 1-indexed.
double expected_delay(const ArrayVec& alpha_row);

// AP: mean absolute delay normalized by |x||y|. Always in (0, 1].
double average_proportion(const DelayVector& d);

// AL: mean lag behind the ideal simultaneous translator, truncated at the
// first step where the source is fully consumed (tau falls back to |y| for
// truncated hypotheses that never consume it).
double average_lagging(const DelayVector& d);

// g' wraps g so each target token costs at least 1/gamma time units:
// g'[0] = g[0], g'[i] = max(g[i], g'[i-1] + 1/gamma).
ArrayVec clamp_delays(const DelayVector& d);

// DAL: mean of g'[i] - i/gamma over all |y| positions; equal to AL on
// wait-k traces with |x| = |y| and defined on fractional delays.
double differentiable_average_lagging(const DelayVector& d);

LatencyReport report(const DelayVector& d);

// g[i] = number of reads before the i-th write.
DelayVector delays_from_trace(const DecodeTrace& trace);

}  // namespace milkstream::latency

#endif
