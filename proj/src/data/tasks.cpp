#include "milkstream/data/tasks.hpp"

#include <stdexcept>

#include "milkstream/numerics/rng.hpp"

namespace milkstream::data {

using numerics::mix_seed;
using numerics::SeededRng;

TaskKind task_kind_from_string(const std::string& s) {
    if (s == "copy") return TaskKind::copy;
    if (s == "rotate") return TaskKind::rotate;
    if (s == "marker_lookahead") return TaskKind::marker_lookahead;
    throw std::invalid_argument("unknown task kind: " + s);
}

std::string to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::copy: return "copy";
        case TaskKind::rotate: return "rotate";
        case TaskKind::marker_lookahead: return "marker_lookahead";
    }
    return "?";
}

void TaskSpec::validate() const {
    if (vocab_size < Vocabulary::kSyntheticPayloadStart + 1) {
        throw std::invalid_argument("TaskSpec: vocab_size too small for payload tokens");
    }
    if (min_len < 1 || max_len < min_len) {
        throw std::invalid_argument("TaskSpec: bad length range");
    }
    if (lookahead_fraction < 0.0 || lookahead_fraction > 1.0) {
        throw std::invalid_argument("TaskSpec: lookahead_fraction must be in [0, 1]");
    }
}

SentencePair generate_pair(const TaskSpec& spec, std::uint64_t index) {
    spec.validate();
    SeededRng rng(mix_seed(spec.seed, index));
    const int payload_count = spec.vocab_size - Vocabulary::kSyntheticPayloadStart;
    const int m = spec.min_len +
                  static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.max_len - spec.min_len + 1)));
    std::vector<int> payload(static_cast<std::size_t>(m));
    for (auto& t : payload) {
        t = Vocabulary::kSyntheticPayloadStart +
            static_cast<int>(rng.next_below(static_cast<std::uint64_t>(payload_count)));
    }

    std::vector<int> src, tgt;
    switch (spec.kind) {
        case TaskKind::copy:
            src = payload;
            tgt = payload;
            break;
        case TaskKind::rotate:
            src = payload;
            tgt.assign(payload.begin() + 1, payload.end());
            tgt.push_back(payload.front());
            break;
        case TaskKind::marker_lookahead: {
            const bool lookahead = rng.next_double() < spec.lookahead_fraction;
            src.push_back(lookahead ? Vocabulary::kMarkerLookahead : Vocabulary::kMarkerEager);
            src.insert(src.end(), payload.begin(), payload.end());
            if (lookahead) {
                tgt.push_back(payload.back());
                tgt.insert(tgt.end(), payload.begin(), payload.end() - 1);
            } else {
                tgt = payload;
            }
            break;
        }
    }
    src.push_back(Vocabulary::kEos);
    tgt.push_back(Vocabulary::kEos);
    return {std::move(src), std::move(tgt)};
}

std::vector<SentencePair> generate_dataset(const TaskSpec& spec, std::uint64_t count,
                                           std::uint64_t start_index) {
    std::vector<SentencePair> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(generate_pair(spec, start_index + i));
    return out;
}

}  // namespace milkstream::data
