#include "milkstream/harness/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "milkstream/data/batches.hpp"
#include "milkstream/errors.hpp"
#include "milkstream/latency/metrics.hpp"

namespace milkstream::harness {

using data::SentencePair;
using model::Model;
using numerics::mix_seed;
using numerics::SeededRng;

RunConfig RunConfig::from_config(const KeyValueConfig& kv) {
    RunConfig rc;
    rc.task.kind = data::task_kind_from_string(kv.get("task.kind", "marker_lookahead"));
    rc.task.vocab_size = kv.get_int("task.vocab_size", rc.task.vocab_size);
    rc.task.min_len = kv.get_int("task.min_len", rc.task.min_len);
    rc.task.max_len = kv.get_int("task.max_len", rc.task.max_len);
    rc.task.lookahead_fraction = kv.get_double("task.lookahead_fraction", rc.task.lookahead_fraction);
    rc.task.seed = kv.get_u64("task.seed", rc.task.seed);
    rc.corpus_src = kv.get("task.corpus_src", "");
    rc.corpus_tgt = kv.get("task.corpus_tgt", "");
    rc.corpus_vocab = kv.get("task.corpus_vocab", "");
    rc.train_pairs = kv.get_u64("task.train_pairs", rc.train_pairs);
    rc.dev_pairs = kv.get_u64("task.dev_pairs", rc.dev_pairs);
    rc.test_pairs = kv.get_u64("task.test_pairs", rc.test_pairs);

    rc.model.vocab_size = rc.task.vocab_size;
    rc.model.embed_dim = kv.get_int("model.embed_dim", rc.model.embed_dim);
    rc.model.hidden_dim = kv.get_int("model.hidden_dim", rc.model.hidden_dim);
    rc.model.encoder_layers = kv.get_int("model.encoder_layers", rc.model.encoder_layers);
    rc.model.decoder_layers = kv.get_int("model.decoder_layers", rc.model.decoder_layers);
    rc.model.label_smoothing = kv.get_double("model.label_smoothing", rc.model.label_smoothing);
    rc.model.attention.kind = attention::kind_from_string(kv.get("attention.kind", "milk"));
    rc.model.attention.chunk_size = kv.get_int("attention.chunk_size", rc.model.attention.chunk_size);
    rc.model.attention.noise_n = kv.get_double("attention.noise", rc.model.attention.noise_n);
    rc.model.attention.energy_offset =
        kv.get_double("attention.energy_offset", rc.model.attention.energy_offset);
    rc.model.attention.eps = kv.get_double("attention.eps", rc.model.attention.eps);

    rc.wait_k.k = kv.get_int("wait_k.k", rc.wait_k.k);
    rc.wait_k.emission_rate = kv.get_double("wait_k.emission_rate", rc.wait_k.emission_rate);

    rc.steps = kv.get_int("train.steps", rc.steps);
    rc.batch_size = kv.get_int("train.batch_size", rc.batch_size);
    rc.lr = kv.get_double("train.lr", rc.lr);
    rc.clip_norm = kv.get_double("train.clip_norm", rc.clip_norm);
    rc.latency_weight = kv.get_double("train.latency_weight", rc.latency_weight);
    rc.eval_interval = kv.get_int("train.eval_interval", rc.eval_interval);
    rc.seed = kv.get_u64("train.seed", rc.seed);

    rc.methods = kv.get_string_list("sweep.methods", rc.methods);
    rc.lambda_grid = kv.get_double_list("sweep.lambda_grid", rc.lambda_grid);
    rc.k_grid = kv.get_int_list("sweep.k_grid", rc.k_grid);
    rc.cs_grid = kv.get_int_list("sweep.cs_grid", rc.cs_grid);
    {
        std::vector<int> seed_default;
        seed_default.reserve(rc.seeds.size());
        for (auto s : rc.seeds) seed_default.push_back(static_cast<int>(s));
        std::vector<int> got = kv.get_int_list("sweep.seeds", seed_default);
        rc.seeds.clear();
        for (int s : got) rc.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    rc.jobs = kv.get_int("sweep.jobs", rc.jobs);
    rc.out_dir = kv.get("out", rc.out_dir);
    return rc;
}

KeyValueConfig RunConfig::to_config() const {
    KeyValueConfig kv;
    kv.set("out", out_dir);
    kv.set("task.kind", data::to_string(task.kind));
    kv.set("task.vocab_size", std::to_string(task.vocab_size));
    kv.set("task.min_len", std::to_string(task.min_len));
    kv.set("task.max_len", std::to_string(task.max_len));
    kv.set("task.lookahead_fraction", fmt_double(task.lookahead_fraction, 4));
    kv.set("task.seed", std::to_string(task.seed));
    if (!corpus_src.empty()) kv.set("task.corpus_src", corpus_src);
    if (!corpus_tgt.empty()) kv.set("task.corpus_tgt", corpus_tgt);
    if (!corpus_vocab.empty()) kv.set("task.corpus_vocab", corpus_vocab);
    kv.set("task.train_pairs", std::to_string(train_pairs));
    kv.set("task.dev_pairs", std::to_string(dev_pairs));
    kv.set("task.test_pairs", std::to_string(test_pairs));

    kv.set("model.embed_dim", std::to_string(model.embed_dim));
    kv.set("model.hidden_dim", std::to_string(model.hidden_dim));
    kv.set("model.encoder_layers", std::to_string(model.encoder_layers));
    kv.set("model.decoder_layers", std::to_string(model.decoder_layers));
    kv.set("model.label_smoothing", fmt_double(model.label_smoothing, 4));
    kv.set("attention.kind", attention::to_string(model.attention.kind));
    kv.set("attention.chunk_size", std::to_string(model.attention.chunk_size));
    kv.set("attention.noise", fmt_double(model.attention.noise_n, 4));
    kv.set("attention.energy_offset", fmt_double(model.attention.energy_offset, 4));
    kv.set("attention.eps", fmt_double(model.attention.eps, 12));

    kv.set("wait_k.k", std::to_string(wait_k.k));
    kv.set("wait_k.emission_rate", fmt_double(wait_k.emission_rate, 4));

    kv.set("train.steps", std::to_string(steps));
    kv.set("train.batch_size", std::to_string(batch_size));
    kv.set("train.lr", fmt_double(lr, 6));
    kv.set("train.clip_norm", fmt_double(clip_norm, 4));
    kv.set("train.latency_weight", fmt_double(latency_weight, 4));
    kv.set("train.eval_interval", std::to_string(eval_interval));
    kv.set("train.seed", std::to_string(seed));

    auto join_doubles = [](const std::vector<double>& xs) {
        std::ostringstream ss;
        for (std::size_t i = 0; i < xs.size(); ++i) ss << (i ? "," : "") << fmt_double(xs[i], 4);
        return ss.str();
    };
    auto join_ints = [](const std::vector<int>& xs) {
        std::ostringstream ss;
        for (std::size_t i = 0; i < xs.size(); ++i) ss << (i ? "," : "") << xs[i];
        return ss.str();
    };
    std::ostringstream methods_ss;
    for (std::size_t i = 0; i < methods.size(); ++i) methods_ss << (i ? "," : "") << methods[i];
    kv.set("sweep.methods", methods_ss.str());
    kv.set("sweep.lambda_grid", join_doubles(lambda_grid));
    kv.set("sweep.k_grid", join_ints(k_grid));
    kv.set("sweep.cs_grid", join_ints(cs_grid));
    std::ostringstream seeds_ss;
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds_ss << (i ? "," : "") << seeds[i];
    kv.set("sweep.seeds", seeds_ss.str());
    kv.set("sweep.jobs", std::to_string(jobs));
    return kv;
}

DataBundle load_data(const RunConfig& rc) {
    DataBundle db;
    if (!rc.corpus_src.empty()) {
        db.vocab = rc.corpus_vocab.empty() ? data::Vocabulary::synthetic(rc.task.vocab_size)
                                           : data::load_vocabulary(rc.corpus_vocab);
        auto pairs = data::load_parallel_corpus(rc.corpus_src, rc.corpus_tgt, db.vocab);
        // Held-out tail: last 10% for dev, pairs stay in file order.
        const std::size_t dev = std::max<std::size_t>(1, pairs.size() / 10);
        db.dev.assign(pairs.end() - static_cast<std::ptrdiff_t>(dev), pairs.end());
        db.train.assign(pairs.begin(), pairs.end() - static_cast<std::ptrdiff_t>(dev));
        db.test = db.dev;
        return db;
    }
    db.vocab = data::Vocabulary::synthetic(rc.task.vocab_size);
    db.train = data::generate_dataset(rc.task, rc.train_pairs, 0);
    db.dev = data::generate_dataset(rc.task, rc.dev_pairs, rc.train_pairs);
    db.test = data::generate_dataset(rc.task, rc.test_pairs, rc.train_pairs + rc.dev_pairs);
    return db;
}

namespace {

double validation_loss(const Model& m, const std::vector<SentencePair>& dev, double lambda,
                       int batch_size, std::uint64_t seed) {
    auto batches = data::make_batches(dev, batch_size, mix_seed(seed, 0xDEu));
    SeededRng rng(mix_seed(seed, 0x7a1u));
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& b : batches) {
        acc += m.batch_loss(b, lambda, rng) * static_cast<double>(b.size());
        count += static_cast<std::size_t>(b.size());
    }
    return acc / static_cast<double>(count);
}

std::vector<numerics::Array> snapshot_params(const Model& m) {
    std::vector<numerics::Array> out;
    out.reserve(m.params().size());
    for (const auto& p : m.params()) out.push_back(p.value);
    return out;
}

void restore_params(Model& m, const std::vector<numerics::Array>& snap) {
    for (std::size_t i = 0; i < snap.size(); ++i) m.params()[i].value = snap[i];
}

}  // namespace

TrainOutcome run_training(const RunConfig& rc,
                          const std::function<void(const std::string&)>& log_sink) {
    DataBundle db = load_data(rc);
    model::ModelConfig mc = rc.model;
    mc.vocab_size = db.vocab.size();

    TrainOutcome out{Model(mc, rc.wait_k, rc.seed)};
    Model& m = out.model;
    model::AdamOptimizer opt(m, rc.lr, 0.9, 0.999, 1e-8, rc.clip_norm);
    SeededRng noise_rng(mix_seed(rc.seed, 0xA11CEu));

    auto log = [&](const std::string& line) {
        out.log_lines.push_back(line);
        if (log_sink) log_sink(line);
    };

    std::vector<numerics::Array> best = snapshot_params(m);
    out.best_val_loss = validation_loss(m, db.dev, rc.latency_weight, rc.batch_size, rc.seed);
    out.best_step = 0;

    std::vector<data::Batch> batches;
    std::size_t batch_idx = 0;
    std::uint64_t epoch = 0;
    for (int step = 1; step <= rc.steps; ++step) {
        if (batch_idx == batches.size()) {
            batches = data::make_batches(db.train, rc.batch_size, mix_seed(rc.seed, epoch++));
            batch_idx = 0;
        }
        Model::StepStats st;
        try {
            st = m.train_step(batches[batch_idx++], rc.latency_weight, noise_rng);
        } catch (const NumericError& e) {
            log("step=" + std::to_string(step) + " diverged: " + e.what());
            out.diverged = true;
            restore_params(m, best);
            return out;
        }
        opt.step(m, st.grads);

        if (step % rc.eval_interval == 0 || step == rc.steps) {
            const double val = validation_loss(m, db.dev, rc.latency_weight, rc.batch_size, rc.seed);
            std::ostringstream line;
            line << "step=" << step << " loss=" << fmt_double(st.loss, 6)
                 << " nll=" << fmt_double(st.nll, 6) << " expected_dal=" << fmt_double(st.dal, 4)
                 << " val_loss=" << fmt_double(val, 6);
            log(line.str());
            if (val < out.best_val_loss) {
                out.best_val_loss = val;
                out.best_step = step;
                best = snapshot_params(m);
            }
        }
    }
    restore_params(m, best);
    return out;
}

EvalOutcome evaluate_model(const Model& m, const std::vector<SentencePair>& test,
                           bool keep_decodes) {
    if (test.empty()) throw std::invalid_argument("evaluate_model: empty test set");
    EvalOutcome out;
    std::vector<std::vector<int>> hyps, refs;
    double ap = 0.0, al = 0.0, dal = 0.0, edal = 0.0, agree = 0.0;

    for (const auto& [src, tgt] : test) {
        Model::DecodeResult dec = m.greedy_simultaneous_decode(src);
        const latency::DelayVector d = latency::delays_from_trace(dec.trace);
        const latency::LatencyReport rep = latency::report(d);
        ap += rep.ap;
        al += rep.al;
        dal += rep.dal;
        out.initial_delays.push_back(static_cast<Eigen::Index>(std::lround(d.g[0])));

        const numerics::ArrayVec eg = m.expected_delays(src, tgt);
        edal += latency::differentiable_average_lagging(
            latency::DelayVector::from_delays(eg, static_cast<Eigen::Index>(src.size())));
        agree += (std::abs(eg.mean() - d.g.mean()) <= 1.0) ? 1.0 : 0.0;

        hyps.push_back(dec.tokens);
        refs.push_back(tgt);
        if (keep_decodes) out.decodes.push_back(std::move(dec));
    }
    const double n = static_cast<double>(test.size());
    const model::QualityReport q = model::sequence_accuracy(hyps, refs);
    out.seq_acc = q.sequence;
    out.token_acc = q.token;
    out.ap = ap / n;
    out.al = al / n;
    out.dal = dal / n;
    out.expected_dal = edal / n;
    out.delay_agreement = agree / n;

    double mean = 0.0;
    for (auto d : out.initial_delays) mean += static_cast<double>(d);
    mean /= n;
    double var = 0.0;
    for (auto d : out.initial_delays) {
        var += (static_cast<double>(d) - mean) * (static_cast<double>(d) - mean);
    }
    out.initial_delay_mean = mean;
    out.initial_delay_var = var / n;
    return out;
}

RunConfig configure_grid_point(const RunConfig& base, const std::string& method, double param,
                               std::uint64_t seed) {
    RunConfig rc = base;
    rc.seed = seed;
    if (method == "milk") {
        rc.model.attention.kind = attention::Kind::milk;
        rc.latency_weight = param;
    } else if (method == "monotonic") {
        rc.model.attention.kind = attention::Kind::monotonic;
        rc.latency_weight = 0.0;
    } else if (method == "mocha") {
        rc.model.attention.kind = attention::Kind::mocha;
        rc.model.attention.chunk_size = static_cast<int>(param);
        rc.latency_weight = 0.0;
    } else if (method == "wait_k") {
        rc.model.attention.kind = attention::Kind::wait_k;
        rc.wait_k.k = static_cast<int>(param);
        rc.latency_weight = 0.0;
    } else if (method == "soft") {
        rc.model.attention.kind = attention::Kind::soft;
        rc.latency_weight = 0.0;
    } else {
        throw std::invalid_argument("unknown sweep method: " + method);
    }
    return rc;
}

std::vector<ExperimentRecord> run_sweep(const RunConfig& base,
                                        const std::function<void(const std::string&)>& log_sink) {
    struct GridPoint {
        std::string method;
        double param;
        std::uint64_t seed;
    };
    std::vector<GridPoint> grid;
    for (const auto& method : base.methods) {
        for (std::uint64_t seed : base.seeds) {
            if (method == "milk") {
                for (double l : base.lambda_grid) grid.push_back({method, l, seed});
            } else if (method == "wait_k") {
                for (int k : base.k_grid) grid.push_back({method, static_cast<double>(k), seed});
            } else if (method == "mocha") {
                for (int cs : base.cs_grid) grid.push_back({method, static_cast<double>(cs), seed});
            } else {
                grid.push_back({method, 0.0, seed});
            }
        }
    }

    std::vector<ExperimentRecord> records(grid.size());
    std::mutex log_mutex;
    auto log = [&](const std::string& line) {
        if (!log_sink) return;
        std::lock_guard<std::mutex> lock(log_mutex);
        log_sink(line);
    };

    auto run_point = [&](std::size_t idx) {
        const GridPoint& gp = grid[idx];
        ExperimentRecord rec;
        rec.method = gp.method;
        rec.param = gp.param;
        rec.seed = gp.seed;
        const auto start = std::chrono::steady_clock::now();
        try {
            RunConfig rc = configure_grid_point(base, gp.method, gp.param, gp.seed);
            TrainOutcome tr = run_training(rc);
            DataBundle db = load_data(rc);
            EvalOutcome ev = evaluate_model(tr.model, db.test);
            rec.quality = ev.seq_acc;
            rec.ap = ev.ap;
            rec.al = ev.al;
            rec.dal = ev.dal;
            if (tr.diverged) {
                log("sweep " + gp.method + " param=" + fmt_double(gp.param, 3) + " diverged");
            }
        } catch (const std::exception& e) {
            rec.failed = true;
            log("sweep " + gp.method + " param=" + fmt_double(gp.param, 3) + " failed: " + e.what());
        }
        rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log("sweep " + gp.method + " param=" + fmt_double(gp.param, 3) +
            " seed=" + std::to_string(gp.seed) + (rec.failed ? " FAILED" : (
                " quality=" + fmt_double(rec.quality, 4) + " dal=" + fmt_double(rec.dal, 3))) +
            " wall=" + fmt_double(rec.wall_time_s, 1) + "s");
        records[idx] = std::move(rec);
    };

    const int jobs = std::max(1, base.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (int j = 0; j < jobs; ++j) {
            workers.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= grid.size()) break;
                    run_point(i);
                }
            });
        }
        for (auto& w : workers) w.join();
    }
    return records;
}

}  // namespace milkstream::harness
