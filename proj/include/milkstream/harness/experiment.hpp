#ifndef MILKSTREAM_HARNESS_EXPERIMENT_HPP
#define MILKSTREAM_HARNESS_EXPERIMENT_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "milkstream/data/corpus.hpp"
#include "milkstream/harness/config.hpp"
#include "milkstream/harness/writers.hpp"
#include "milkstream/model/model.hpp"

namespace milkstream::harness {

// One fully resolved experiment: data source, model, training knobs, sweep
// grids. Grid defaults follow the latency-weight / chunk-size shapes used
// for the published curves, with the k grid scaled down to desk-size
// sentences (300 stays as the full-attention sentinel).
struct RunConfig {
    // data
    data::TaskSpec task;
    std::string corpus_src, corpus_tgt, corpus_vocab;  // overrides task when set
    std::uint64_t train_pairs = 10000;
    std::uint64_t dev_pairs = 500;
    std::uint64_t test_pairs = 1000;

    // model
    model::ModelConfig model;
    model::WaitKSchedule wait_k;

    // training
    int steps = 1500;
    int batch_size = 16;
    double lr = 1e-3;
    double clip_norm = 5.0;
    double latency_weight = 0.0;  // lambda
    int eval_interval = 150;
    std::uint64_t seed = 1;

    // sweep
    std::vector<std::string> methods = {"milk", "wait_k"};
    std::vector<double> lambda_grid = {0.75, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01, 0.0};
    std::vector<int> k_grid = {1, 2, 8, 12, 300};
    std::vector<int> cs_grid = {1, 2, 4, 8, 16};
    std::vector<std::uint64_t> seeds = {1};
    int jobs = 1;

    std::string out_dir = "out";

    static RunConfig from_config(const KeyValueConfig& kv);
    KeyValueConfig to_config() const;  // the effective-config echo
};

struct TrainOutcome {
    model::Model model;  // best-validation parameters
    double best_val_loss = 0.0;
    int best_step = 0;
    bool diverged = false;
    std::vector<std::string> log_lines;
};

// Deterministic training loop with periodic validation; keeps the best
// dev-loss checkpoint. A non-finite loss aborts the run but the last good
// checkpoint survives (diverged = true).
TrainOutcome run_training(const RunConfig& rc,
                          const std::function<void(const std::string&)>& log_sink = nullptr);

struct EvalOutcome {
    double seq_acc = 0.0;
    double token_acc = 0.0;
    double ap = 0.0;   // means over hard-decode traces
    double al = 0.0;
    double dal = 0.0;
    double expected_dal = 0.0;     // teacher-forced expected delays
    double delay_agreement = 0.0;  // |mean expected g - mean hard g| <= 1, fraction
    double initial_delay_mean = 0.0;
    double initial_delay_var = 0.0;
    std::vector<Eigen::Index> initial_delays;
    std::vector<model::Model::DecodeResult> decodes;  // kept when requested
};

EvalOutcome evaluate_model(const model::Model& m, const std::vector<data::SentencePair>& test,
                           bool keep_decodes = false);

// Dataset triple derived from the run config (synthetic split by index
// range, or corpus files with a held-out tail).
struct DataBundle {
    data::Vocabulary vocab;
    std::vector<data::SentencePair> train, dev, test;
};
DataBundle load_data(const RunConfig& rc);

// Expands the grids into (method, param, seed) runs, trains and evaluates
// each, and returns records ready for write_curves_csv. Individual failures
// become failed rows, never aborts. jobs > 1 runs grid points in worker
// threads; results are independent of the worker count.
std::vector<ExperimentRecord> run_sweep(const RunConfig& base,
                                        const std::function<void(const std::string&)>& log_sink = nullptr);

// Applies (method, param) onto a copy of the base config.
RunConfig configure_grid_point(const RunConfig& base, const std::string& method, double param,
                               std::uint64_t seed);

}  // namespace milkstream::harness

#endif
