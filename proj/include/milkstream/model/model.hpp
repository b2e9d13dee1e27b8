#ifndef MILKSTREAM_MODEL_MODEL_HPP
#define MILKSTREAM_MODEL_MODEL_HPP

#include <string>
#include <vector>

#include "milkstream/attention/energies.hpp"
#include "milkstream/data/batches.hpp"
#include "milkstream/model/config.hpp"
#include "milkstream/numerics/ops.hpp"
#include "milkstream/trace.hpp"

namespace milkstream::model {

using numerics::Array;
using numerics::ArrayVec;
using numerics::SeededRng;
using numerics::Tape;
using numerics::Value;

struct NamedParam {
    std::string name;
    Array value;
};

// Encoder-decoder with pluggable attention. Training runs the expectation
// path (alpha/beta rows, expected delays, DAL in the objective); decoding
// runs the hard path (monotonic head thresholding, prefix softmax) and
// produces a read/write trace. Parameter snapshots are plain arrays, so a
// const Model is safe to decode from concurrently.
class Model {
public:
    Model(ModelConfig cfg, std::uint64_t seed);
    Model(ModelConfig cfg, WaitKSchedule schedule, std::uint64_t seed);

    const ModelConfig& config() const { return cfg_; }
    const WaitKSchedule& schedule() const { return schedule_; }
    void set_schedule(WaitKSchedule s) { s.validate(); schedule_ = s; }

    std::vector<NamedParam>& params() { return params_; }
    const std::vector<NamedParam>& params() const { return params_; }
    Eigen::Index param_count() const;  // total scalar parameters

    struct StepStats {
        double loss = 0.0;      // batch mean of nll + lambda * dal
        double nll = 0.0;       // batch mean, summed over tokens per sentence
        double dal = 0.0;       // batch mean of per-sentence expected DAL
        std::vector<Array> grads;  // aligned with params()
    };
    // Teacher-forced expectation training step; deterministic given the rng
    // state. Throws NumericError naming the sentence if the loss is not
    // finite.
    StepStats train_step(const data::Batch& batch, double lambda, SeededRng& rng) const;

    // Loss only (used by validation and the finite-difference oracle).
    double batch_loss(const data::Batch& batch, double lambda, SeededRng& rng) const;

    // Expected delays g_i = sum_j j alpha[i,j] for one teacher-forced
    // sentence, noise-free.
    ArrayVec expected_delays(const std::vector<int>& src, const std::vector<int>& tgt) const;

    // Top-layer encoder states h_1..h_upto; extending the prefix never
    // changes earlier states.
    std::vector<ArrayVec> encode_prefix(const std::vector<int>& tokens, Eigen::Index upto) const;

    struct DecodeResult {
        std::vector<int> tokens;  // written tokens, EOS included when terminated
        DecodeTrace trace;
        Eigen::ArrayXXd beta;                // writes x |x|, attention at each write
        std::vector<Eigen::Index> heads;     // attended prefix length per write
    };
    // Interleaves reads and writes according to the attention kind: hard
    // monotonic head for monotonic/mocha/milk, read-everything for soft,
    // the fixed schedule for wait_k.
    DecodeResult greedy_simultaneous_decode(const std::vector<int>& source, int max_len = -1) const;
    DecodeResult wait_k_decode(const std::vector<int>& source, const WaitKSchedule& schedule,
                               int max_len = -1) const;

    // Energy matrices for one teacher-forced sentence, padded to width with
    // the -inf sentinel (diagnostics).
    attention::EnergyPair energies_for_sentence(const std::vector<int>& src,
                                                const std::vector<int>& tgt,
                                                Eigen::Index width) const;

private:
    struct Bound;  // per-tape parameter handles

    Bound bind(Tape& tape) const;
    void init_params(std::uint64_t seed);
    void check_tokens(const std::vector<int>& tokens) const;

    struct SentenceGraph {
        Value loss;
        Value nll;
        double dal = 0.0;
        ArrayVec delays;  // expected delays (monotonic family) or schedule delays
    };
    SentenceGraph sentence_forward(Tape& tape, const Bound& bound, const std::vector<int>& src,
                                   const std::vector<int>& tgt, double lambda, bool training,
                                   SeededRng& rng) const;

    ModelConfig cfg_;
    WaitKSchedule schedule_;
    std::vector<NamedParam> params_;
};

struct QualityReport {
    double sequence = 0.0;  // exact-match fraction
    double token = 0.0;     // per-position token accuracy against references
};
QualityReport sequence_accuracy(const std::vector<std::vector<int>>& hyps,
                                const std::vector<std::vector<int>>& refs);

// Adam with global gradient-norm clipping; state and updates are
// deterministic.
class AdamOptimizer {
public:
    explicit AdamOptimizer(const Model& model, double lr = 1e-3, double beta1 = 0.9,
                           double beta2 = 0.999, double eps = 1e-8, double clip_norm = 5.0);
    void step(Model& model, const std::vector<Array>& grads);

private:
    double lr_, beta1_, beta2_, eps_, clip_norm_;
    long t_ = 0;
    std::vector<Array> m_, v_;
};

}  // namespace milkstream::model

#endif
