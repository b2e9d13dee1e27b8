#include "milkstream/model/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "milkstream/attention/induced.hpp"
#include "milkstream/attention/monotonic.hpp"
#include "milkstream/data/vocab.hpp"
#include "milkstream/errors.hpp"
#include "milkstream/latency/differentiable.hpp"
#include "milkstream/latency/metrics.hpp"

namespace milkstream::model {

using namespace numerics;
namespace att = milkstream::attention;

namespace {

struct CellParams {
    Value w_z, u_z, b_z, w_c, u_c, b_c;
};

// Single-gate recurrent cell with tanh candidate:
//   z = sigma(W_z x + U_z h + b_z)
//   h' = (1-z) h + z tanh(W_c x + U_c h + b_c)
Value cell_step(const CellParams& cp, const Value& x, const Value& h) {
    Value z = logistic(add(add(matmul(cp.w_z, x), matmul(cp.u_z, h)), cp.b_z));
    Value cand = tanh(add(add(matmul(cp.w_c, x), matmul(cp.u_c, h)), cp.b_c));
    return add(mul(1.0 - z, h), mul(z, cand));
}

// Feeds input through the layer stack, updating states in place; returns the
// top-layer state.
Value stack_step(const std::vector<CellParams>& layers, Value input, std::vector<Value>& states) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        states[l] = cell_step(layers[l], input, states[l]);
        input = states[l];
    }
    return states.back();
}

// Read counter for a wait-k schedule. After each write the fractional part
// of the emission rate accumulates; every overflow grants one extra read.
struct EmissionCounter {
    explicit EmissionCounter(double rate)
        : base_(static_cast<Eigen::Index>(std::floor(rate))), frac_(rate - std::floor(rate)) {}

    Eigen::Index reads_after_write() {
        Eigen::Index reads = base_;
        acc_ += frac_;
        if (acc_ >= 1.0 - 1e-9) {
            acc_ -= 1.0;
            ++reads;
        }
        return reads;
    }

private:
    Eigen::Index base_;
    double frac_;
    double acc_ = 0.0;
};

// Source prefix visible at each of the first `steps` writes.
std::vector<Eigen::Index> wait_k_prefixes(const WaitKSchedule& sched, Eigen::Index source_len,
                                          Eigen::Index steps) {
    std::vector<Eigen::Index> prefixes;
    prefixes.reserve(static_cast<std::size_t>(steps));
    EmissionCounter counter(sched.emission_rate);
    Eigen::Index read = std::min<Eigen::Index>(sched.k, source_len);
    for (Eigen::Index i = 0; i < steps; ++i) {
        prefixes.push_back(read);
        read = std::min(source_len, read + counter.reads_after_write());
    }
    return prefixes;
}

ArrayVec smoothed_one_hot(int target, int vocab_size, double smoothing) {
    ArrayVec q = ArrayVec::Constant(vocab_size, smoothing / static_cast<double>(vocab_size));
    q[target] += 1.0 - smoothing;
    return q;
}

int argmax_token(const Array& logits) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < logits.rows(); ++i) {
        if (logits(i, 0) > logits(best, 0)) best = i;
    }
    return static_cast<int>(best);
}

}  // namespace

struct Model::Bound {
    Value embed;
    std::vector<CellParams> enc, dec;
    att::MonotonicEnergyParams mono;
    att::AdditiveEnergyParams soft;
    Value w_out, b_out;
    std::vector<Value> ordered;  // exactly the params() order
};

Model::Model(ModelConfig cfg, std::uint64_t seed) : Model(std::move(cfg), WaitKSchedule{}, seed) {}

Model::Model(ModelConfig cfg, WaitKSchedule schedule, std::uint64_t seed)
    : cfg_(std::move(cfg)), schedule_(schedule) {
    cfg_.validate();
    schedule_.validate();
    init_params(seed);
}

void Model::init_params(std::uint64_t seed) {
    SeededRng rng(mix_seed(seed, 0x9a2f));
    const int H = cfg_.hidden_dim;
    const int E = cfg_.embed_dim;
    const int V = cfg_.vocab_size;
    const double span = 0.08;

    auto uniform = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
        Array a(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = rng.uniform(-span, span);
        }
        params_.push_back({name, std::move(a)});
    };
    auto zeros = [&](const std::string& name, Eigen::Index rows) {
        params_.push_back({name, Array::Zero(rows, 1)});
    };
    auto scalar = [&](const std::string& name, double value) {
        params_.push_back({name, Array::Constant(1, 1, value)});
    };

    uniform("embed", E, V);
    auto cell_block = [&](const std::string& prefix, int layers, Eigen::Index input_dim) {
        for (int l = 0; l < layers; ++l) {
            const Eigen::Index in = (l == 0) ? input_dim : H;
            const std::string base = prefix + ".l" + std::to_string(l) + ".";
            uniform(base + "w_z", H, in);
            uniform(base + "u_z", H, H);
            zeros(base + "b_z", H);
            uniform(base + "w_c", H, in);
            uniform(base + "u_c", H, H);
            zeros(base + "b_c", H);
        }
    };
    cell_block("enc", cfg_.encoder_layers, E);
    cell_block("dec", cfg_.decoder_layers, E + H);

    uniform("mono.w_s", H, H);
    uniform("mono.w_h", H, H);
    zeros("mono.b", H);
    uniform("mono.v", H, 1);
    scalar("mono.gain", 1.0 / std::sqrt(static_cast<double>(H)));
    scalar("mono.r", cfg_.attention.energy_offset);

    uniform("soft.w_s", H, H);
    uniform("soft.w_h", H, H);
    zeros("soft.b", H);
    uniform("soft.v", H, 1);

    uniform("out.w", V, 2 * H);
    zeros("out.b", V);
}

Eigen::Index Model::param_count() const {
    Eigen::Index n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
}

Model::Bound Model::bind(Tape& tape) const {
    Bound b;
    b.ordered.reserve(params_.size());
    for (const auto& p : params_) b.ordered.push_back(tape.leaf(p.value));

    std::size_t i = 0;
    auto next = [&]() { return b.ordered[i++]; };
    b.embed = next();
    auto cells = [&](int layers) {
        std::vector<CellParams> out;
        for (int l = 0; l < layers; ++l) {
            CellParams cp;
            cp.w_z = next();
            cp.u_z = next();
            cp.b_z = next();
            cp.w_c = next();
            cp.u_c = next();
            cp.b_c = next();
            out.push_back(cp);
        }
        return out;
    };
    b.enc = cells(cfg_.encoder_layers);
    b.dec = cells(cfg_.decoder_layers);
    b.mono.w_s = next();
    b.mono.w_h = next();
    b.mono.b = next();
    b.mono.v_raw = next();
    b.mono.gain = next();
    b.mono.r = next();
    b.soft.w_s = next();
    b.soft.w_h = next();
    b.soft.b = next();
    b.soft.v = next();
    b.w_out = next();
    b.b_out = next();
    return b;
}

void Model::check_tokens(const std::vector<int>& tokens) const {
    for (int t : tokens) {
        if (t < 0 || t >= cfg_.vocab_size) {
            throw std::invalid_argument("unknown token id " + std::to_string(t));
        }
    }
}

Model::SentenceGraph Model::sentence_forward(Tape& tape, const Bound& bound,
                                             const std::vector<int>& src,
                                             const std::vector<int>& tgt, double lambda,
                                             bool training, SeededRng& rng) const {
    check_tokens(src);
    check_tokens(tgt);
    const Eigen::Index n = static_cast<Eigen::Index>(src.size());
    const Eigen::Index m = static_cast<Eigen::Index>(tgt.size());
    if (n == 0 || m == 0) throw std::invalid_argument("sentence_forward: empty sentence");
    const att::Kind kind = cfg_.attention.kind;
    const int H = cfg_.hidden_dim;

    // Encoder.
    std::vector<Value> enc_states(static_cast<std::size_t>(cfg_.encoder_layers),
                                  tape.constant(Array::Zero(H, 1)));
    std::vector<Value> hs;
    hs.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        hs.push_back(stack_step(bound.enc, column(bound.embed, src[static_cast<std::size_t>(j)]),
                                enc_states));
    }
    Value H_states = hconcat(hs);

    // Decoder (teacher forced).
    std::vector<Value> dec_states(static_cast<std::size_t>(cfg_.decoder_layers),
                                  tape.constant(Array::Zero(H, 1)));
    ArrayVec alpha0 = ArrayVec::Zero(n);
    alpha0[0] = 1.0;  // head starts at position 1
    Value alpha_prev = tape.vector(alpha0);

    std::vector<Eigen::Index> fixed_prefix;
    if (kind == att::Kind::wait_k) fixed_prefix = wait_k_prefixes(schedule_, n, m);

    std::vector<Value> nll_terms;
    std::vector<Value> delay_values;
    ArrayVec plain_delays(m);
    int prev_token = data::Vocabulary::kBos;

    for (Eigen::Index i = 0; i < m; ++i) {
        Value s_prev = dec_states.back();
        Value beta;
        switch (kind) {
            case att::Kind::soft: {
                Value u = att::soft_energy_row(s_prev, H_states, bound.soft);
                beta = masked_softmax(u, n);
                plain_delays[i] = static_cast<double>(n);
                break;
            }
            case att::Kind::wait_k: {
                Value u = att::soft_energy_row(s_prev, H_states, bound.soft);
                const Eigen::Index prefix = fixed_prefix[static_cast<std::size_t>(i)];
                beta = masked_softmax(u, prefix);
                plain_delays[i] = static_cast<double>(prefix);
                break;
            }
            default: {
                Value e = att::monotonic_energy_row(s_prev, H_states, bound.mono);
                Value p = att::selection_probabilities(e, cfg_.attention.noise_n, rng, training);
                Value alpha =
                    att::preserve_mass(att::monotonic_alpha_row(p, alpha_prev, cfg_.attention.eps));
                Value g_i = latency::expected_delay(alpha);
                delay_values.push_back(g_i);
                plain_delays[i] = g_i.scalar();
                if (kind == att::Kind::monotonic) {
                    beta = alpha;
                } else {
                    Value u = att::soft_energy_row(s_prev, H_states, bound.soft);
                    beta = (kind == att::Kind::milk)
                               ? att::milk_beta_row(alpha, u, cfg_.attention.eps)
                               : att::mocha_beta_row(alpha, u, cfg_.attention.chunk_size,
                                                     cfg_.attention.eps);
                }
                alpha_prev = alpha;
                break;
            }
        }
        Value c = att::expected_context(beta, H_states);
        Value s = stack_step(bound.dec, vconcat(column(bound.embed, prev_token), c), dec_states);
        Value logits = add(matmul(bound.w_out, vconcat(s, c)), bound.b_out);
        Value logp = log_softmax(logits);
        const int target = tgt[static_cast<std::size_t>(i)];
        Value q = tape.vector(smoothed_one_hot(target, cfg_.vocab_size, cfg_.label_smoothing));
        nll_terms.push_back(neg(dot(logp, q)));
        prev_token = target;
    }

    SentenceGraph out;
    out.nll = sum(stack_scalars(nll_terms));
    out.delays = plain_delays;
    const double gamma = static_cast<double>(m) / static_cast<double>(n);
    if (!delay_values.empty()) {
        Value g = stack_scalars(delay_values);
        out.loss = latency::latency_augmented_loss(out.nll, g, lambda, gamma);
    } else {
        const double dal = latency::differentiable_average_lagging(
            latency::DelayVector::from_delays(plain_delays, n));
        out.loss = (lambda > 0.0) ? add_scalar(out.nll, lambda * dal) : out.nll;
    }
    out.dal = latency::differentiable_average_lagging(
        latency::DelayVector::from_delays(plain_delays, n));
    return out;
}

Model::StepStats Model::train_step(const data::Batch& batch, double lambda,
                                   SeededRng& rng) const {
    if (batch.size() == 0) throw std::invalid_argument("train_step: empty batch");
    if (lambda < 0.0) throw std::invalid_argument("train_step: lambda must be >= 0");
    Tape tape(true);
    Bound bound = bind(tape);

    std::vector<Value> losses;
    double nll_acc = 0.0, dal_acc = 0.0;
    for (Eigen::Index r = 0; r < batch.size(); ++r) {
        SentenceGraph sg = sentence_forward(tape, bound, batch.source_of(r), batch.target_of(r),
                                            lambda, /*training=*/true, rng);
        if (!std::isfinite(sg.loss.scalar())) {
            throw NumericError("train_step: non-finite loss at sentence " + std::to_string(r));
        }
        losses.push_back(sg.loss);
        nll_acc += sg.nll.scalar();
        dal_acc += sg.dal;
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    Value total = mul_scalar(sum(stack_scalars(losses)), inv_b);
    tape.backward(total);

    StepStats st;
    st.loss = total.scalar();
    st.nll = nll_acc * inv_b;
    st.dal = dal_acc * inv_b;
    st.grads.reserve(params_.size());
    for (const auto& v : bound.ordered) st.grads.push_back(tape.grad(v));
    return st;
}

double Model::batch_loss(const data::Batch& batch, double lambda, SeededRng& rng) const {
    if (batch.size() == 0) throw std::invalid_argument("batch_loss: empty batch");
    Tape tape(false);
    Bound bound = bind(tape);
    double acc = 0.0;
    for (Eigen::Index r = 0; r < batch.size(); ++r) {
        SentenceGraph sg = sentence_forward(tape, bound, batch.source_of(r), batch.target_of(r),
                                            lambda, /*training=*/false, rng);
        acc += sg.loss.scalar();
    }
    return acc / static_cast<double>(batch.size());
}

ArrayVec Model::expected_delays(const std::vector<int>& src, const std::vector<int>& tgt) const {
    Tape tape(false);
    Bound bound = bind(tape);
    SeededRng rng(0);
    SentenceGraph sg = sentence_forward(tape, bound, src, tgt, 0.0, /*training=*/false, rng);
    return sg.delays;
}

std::vector<ArrayVec> Model::encode_prefix(const std::vector<int>& tokens,
                                           Eigen::Index upto) const {
    if (upto < 0 || upto > static_cast<Eigen::Index>(tokens.size())) {
        throw std::invalid_argument("encode_prefix: upto out of range");
    }
    check_tokens(tokens);
    Tape tape(false);
    Bound bound = bind(tape);
    std::vector<Value> states(static_cast<std::size_t>(cfg_.encoder_layers),
                              tape.constant(Array::Zero(cfg_.hidden_dim, 1)));
    std::vector<ArrayVec> out;
    out.reserve(static_cast<std::size_t>(upto));
    for (Eigen::Index j = 0; j < upto; ++j) {
        Value h = stack_step(bound.enc, column(bound.embed, tokens[static_cast<std::size_t>(j)]),
                             states);
        out.emplace_back(h.array().col(0));
    }
    return out;
}

att::EnergyPair Model::energies_for_sentence(const std::vector<int>& src,
                                             const std::vector<int>& tgt,
                                             Eigen::Index width) const {
    check_tokens(src);
    check_tokens(tgt);
    Tape tape(false);
    Bound bound = bind(tape);
    const Eigen::Index n = static_cast<Eigen::Index>(src.size());
    const Eigen::Index m = static_cast<Eigen::Index>(tgt.size());
    const int H = cfg_.hidden_dim;

    std::vector<Value> enc_states(static_cast<std::size_t>(cfg_.encoder_layers),
                                  tape.constant(Array::Zero(H, 1)));
    std::vector<Value> hs;
    for (Eigen::Index j = 0; j < n; ++j) {
        hs.push_back(stack_step(bound.enc, column(bound.embed, src[static_cast<std::size_t>(j)]),
                                enc_states));
    }
    Value H_states = hconcat(hs);

    std::vector<Value> dec_states(static_cast<std::size_t>(cfg_.decoder_layers),
                                  tape.constant(Array::Zero(H, 1)));
    ArrayVec alpha0 = ArrayVec::Zero(n);
    alpha0[0] = 1.0;
    Value alpha_prev = tape.vector(alpha0);
    SeededRng rng(0);

    Eigen::ArrayXXd mono_rows(m, n), soft_rows(m, n);
    int prev_token = data::Vocabulary::kBos;
    for (Eigen::Index i = 0; i < m; ++i) {
        Value s_prev = dec_states.back();
        Value e = att::monotonic_energy_row(s_prev, H_states, bound.mono);
        Value u = att::soft_energy_row(s_prev, H_states, bound.soft);
        mono_rows.row(i) = e.array().col(0).transpose();
        soft_rows.row(i) = u.array().col(0).transpose();

        Value p = att::selection_probabilities(e, 0.0, rng, false);
        Value alpha = att::preserve_mass(att::monotonic_alpha_row(p, alpha_prev, cfg_.attention.eps));
        Value beta;
        switch (cfg_.attention.kind) {
            case att::Kind::soft:
                beta = masked_softmax(u, n);
                break;
            case att::Kind::wait_k:
                beta = masked_softmax(u, n);
                break;
            case att::Kind::monotonic:
                beta = alpha;
                break;
            case att::Kind::milk:
                beta = att::milk_beta_row(alpha, u, cfg_.attention.eps);
                break;
            case att::Kind::mocha:
                beta = att::mocha_beta_row(alpha, u, cfg_.attention.chunk_size, cfg_.attention.eps);
                break;
        }
        alpha_prev = alpha;
        Value c = att::expected_context(beta, H_states);
        Value s = stack_step(bound.dec, vconcat(column(bound.embed, prev_token), c), dec_states);
        (void)s;
        prev_token = tgt[static_cast<std::size_t>(i)];
    }
    return att::EnergyPair::padded(mono_rows, soft_rows, width);
}

Model::DecodeResult Model::greedy_simultaneous_decode(const std::vector<int>& source,
                                                      int max_len) const {
    if (source.empty() || source.back() != data::Vocabulary::kEos) {
        throw std::invalid_argument("greedy_simultaneous_decode: source must end with EOS");
    }
    check_tokens(source);
    const Eigen::Index n = static_cast<Eigen::Index>(source.size());
    if (max_len < 0) max_len = static_cast<int>(2 * n + 10);
    if (max_len < 1) throw std::invalid_argument("greedy_simultaneous_decode: max_len must be >= 1");

    if (cfg_.attention.kind == att::Kind::wait_k) {
        return wait_k_decode(source, schedule_, max_len);
    }

    Tape tape(false);
    Bound bound = bind(tape);
    const int H = cfg_.hidden_dim;

    DecodeResult res;
    res.trace.source_len = n;

    std::vector<Value> enc_states(static_cast<std::size_t>(cfg_.encoder_layers),
                                  tape.constant(Array::Zero(H, 1)));
    std::vector<Value> hs;
    auto ensure_read = [&](Eigen::Index upto) {  // 1-indexed position
        while (static_cast<Eigen::Index>(hs.size()) < upto) {
            const Eigen::Index j = static_cast<Eigen::Index>(hs.size());
            hs.push_back(stack_step(
                bound.enc, column(bound.embed, source[static_cast<std::size_t>(j)]), enc_states));
            res.trace.actions.push_back(
                TraceAction::read_action(source[static_cast<std::size_t>(j)], j + 1));
        }
    };

    std::vector<Value> dec_states(static_cast<std::size_t>(cfg_.decoder_layers),
                                  tape.constant(Array::Zero(H, 1)));
    att::HardHead head;
    int prev_token = data::Vocabulary::kBos;
    std::vector<ArrayVec> beta_rows;

    for (int w = 1; w <= max_len; ++w) {
        Value s_prev = dec_states.back();
        Eigen::Index attended = n;
        Value c;
        ArrayVec beta_row = ArrayVec::Zero(n);

        if (cfg_.attention.kind == att::Kind::soft) {
            ensure_read(n);
            Value Hp = hconcat(hs);
            Value u = att::soft_energy_row(s_prev, Hp, bound.soft);
            Value b = masked_softmax(u, n);
            beta_row = b.array().col(0);
            c = att::expected_context(b, Hp);
        } else {
            // Hard monotonic head: advance while energies stay <= 0, reading
            // on the way; stop early or at EOS.
            auto energy_at = [&](Eigen::Index pos) -> double {
                if (pos < 1 || pos > n) {
                    throw ContractViolation("decode: energy query at position " +
                                            std::to_string(pos) + " outside source");
                }
                ensure_read(pos);
                return att::monotonic_energy(s_prev, hs[static_cast<std::size_t>(pos - 1)],
                                             bound.mono)
                    .scalar();
            };
            const att::HardStep step = att::hard_decode_step(energy_at, head, n);
            head = step.head;
            attended = step.attended_len;
            ensure_read(attended);

            if (cfg_.attention.kind == att::Kind::monotonic) {
                c = hs[static_cast<std::size_t>(attended - 1)];
                beta_row[attended - 1] = 1.0;
            } else if (cfg_.attention.kind == att::Kind::milk) {
                std::vector<Value> prefix(hs.begin(), hs.begin() + attended);
                Value Hp = hconcat(prefix);
                Value u = att::soft_energy_row(s_prev, Hp, bound.soft);
                Value b = masked_softmax(u, attended);
                beta_row.head(attended) = b.array().col(0);
                c = att::expected_context(b, Hp);
            } else {  // mocha
                const Eigen::Index lo =
                    std::max<Eigen::Index>(1, attended - cfg_.attention.chunk_size + 1);
                std::vector<Value> chunk(hs.begin() + (lo - 1), hs.begin() + attended);
                Value Hc = hconcat(chunk);
                Value u = att::soft_energy_row(s_prev, Hc, bound.soft);
                Value b = masked_softmax(u, attended - lo + 1);
                beta_row.segment(lo - 1, attended - lo + 1) = b.array().col(0);
                c = att::expected_context(b, Hc);
            }
        }

        Value s = stack_step(bound.dec, vconcat(column(bound.embed, prev_token), c), dec_states);
        Value logits = add(matmul(bound.w_out, vconcat(s, c)), bound.b_out);
        const int tok = argmax_token(logits.array());

        res.tokens.push_back(tok);
        res.trace.actions.push_back(TraceAction::write_action(tok, w));
        res.heads.push_back(cfg_.attention.kind == att::Kind::soft ? n : attended);
        beta_rows.push_back(beta_row);
        if (tok == data::Vocabulary::kEos) {
            res.trace.terminated = true;
            break;
        }
        prev_token = tok;
    }

    res.beta = Eigen::ArrayXXd::Zero(static_cast<Eigen::Index>(beta_rows.size()), n);
    for (std::size_t i = 0; i < beta_rows.size(); ++i) {
        res.beta.row(static_cast<Eigen::Index>(i)) = beta_rows[i].transpose();
    }
    return res;
}

Model::DecodeResult Model::wait_k_decode(const std::vector<int>& source,
                                         const WaitKSchedule& schedule, int max_len) const {
    if (source.empty() || source.back() != data::Vocabulary::kEos) {
        throw std::invalid_argument("wait_k_decode: source must end with EOS");
    }
    schedule.validate();
    check_tokens(source);
    const Eigen::Index n = static_cast<Eigen::Index>(source.size());
    if (max_len < 0) max_len = static_cast<int>(2 * n + 10);
    if (max_len < 1) throw std::invalid_argument("wait_k_decode: max_len must be >= 1");

    Tape tape(false);
    Bound bound = bind(tape);
    const int H = cfg_.hidden_dim;

    DecodeResult res;
    res.trace.source_len = n;

    std::vector<Value> enc_states(static_cast<std::size_t>(cfg_.encoder_layers),
                                  tape.constant(Array::Zero(H, 1)));
    std::vector<Value> hs;
    auto ensure_read = [&](Eigen::Index upto) {
        while (static_cast<Eigen::Index>(hs.size()) < upto) {
            const Eigen::Index j = static_cast<Eigen::Index>(hs.size());
            hs.push_back(stack_step(
                bound.enc, column(bound.embed, source[static_cast<std::size_t>(j)]), enc_states));
            res.trace.actions.push_back(
                TraceAction::read_action(source[static_cast<std::size_t>(j)], j + 1));
        }
    };

    std::vector<Value> dec_states(static_cast<std::size_t>(cfg_.decoder_layers),
                                  tape.constant(Array::Zero(H, 1)));
    EmissionCounter counter(schedule.emission_rate);
    Eigen::Index prefix = std::min<Eigen::Index>(schedule.k, n);
    int prev_token = data::Vocabulary::kBos;
    std::vector<ArrayVec> beta_rows;

    for (int w = 1; w <= max_len; ++w) {
        ensure_read(prefix);
        Value s_prev = dec_states.back();
        std::vector<Value> visible(hs.begin(), hs.begin() + prefix);
        Value Hp = hconcat(visible);
        Value u = att::soft_energy_row(s_prev, Hp, bound.soft);
        Value b = masked_softmax(u, prefix);
        Value c = att::expected_context(b, Hp);

        Value s = stack_step(bound.dec, vconcat(column(bound.embed, prev_token), c), dec_states);
        Value logits = add(matmul(bound.w_out, vconcat(s, c)), bound.b_out);
        const int tok = argmax_token(logits.array());

        ArrayVec beta_row = ArrayVec::Zero(n);
        beta_row.head(prefix) = b.array().col(0);
        beta_rows.push_back(beta_row);
        res.tokens.push_back(tok);
        res.trace.actions.push_back(TraceAction::write_action(tok, w));
        res.heads.push_back(prefix);
        if (tok == data::Vocabulary::kEos) {
            res.trace.terminated = true;
            break;
        }
        prev_token = tok;
        prefix = std::min(n, prefix + counter.reads_after_write());
    }

    res.beta = Eigen::ArrayXXd::Zero(static_cast<Eigen::Index>(beta_rows.size()), n);
    for (std::size_t i = 0; i < beta_rows.size(); ++i) {
        res.beta.row(static_cast<Eigen::Index>(i)) = beta_rows[i].transpose();
    }
    return res;
}

QualityReport sequence_accuracy(const std::vector<std::vector<int>>& hyps,
                                const std::vector<std::vector<int>>& refs) {
    if (hyps.size() != refs.size()) {
        throw std::invalid_argument("sequence_accuracy: hypothesis/reference count mismatch");
    }
    if (hyps.empty()) throw std::invalid_argument("sequence_accuracy: empty input");
    std::size_t exact = 0, token_hits = 0, token_total = 0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
        if (hyps[i] == refs[i]) ++exact;
        token_total += refs[i].size();
        const std::size_t overlap = std::min(hyps[i].size(), refs[i].size());
        for (std::size_t j = 0; j < overlap; ++j) token_hits += (hyps[i][j] == refs[i][j]);
    }
    QualityReport q;
    q.sequence = static_cast<double>(exact) / static_cast<double>(hyps.size());
    q.token = static_cast<double>(token_hits) / static_cast<double>(token_total);
    return q;
}

AdamOptimizer::AdamOptimizer(const Model& model, double lr, double beta1, double beta2, double eps,
                             double clip_norm)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), clip_norm_(clip_norm) {
    for (const auto& p : model.params()) {
        m_.push_back(Array::Zero(p.value.rows(), p.value.cols()));
        v_.push_back(Array::Zero(p.value.rows(), p.value.cols()));
    }
}

void AdamOptimizer::step(Model& model, const std::vector<Array>& grads) {
    auto& params = model.params();
    if (grads.size() != params.size()) {
        throw std::invalid_argument("AdamOptimizer: gradient count mismatch");
    }
    double norm_sq = 0.0;
    for (const auto& g : grads) norm_sq += g.square().sum();
    const double norm = std::sqrt(norm_sq);
    const double scale = (clip_norm_ > 0.0 && norm > clip_norm_) ? clip_norm_ / norm : 1.0;

    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Array g = grads[i] * scale;
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.square();
        params[i].value -= lr_ * (m_[i] / bc1) / ((v_[i] / bc2).sqrt() + eps_);
    }
}

}  // namespace milkstream::model
