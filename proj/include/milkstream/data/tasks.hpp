#ifndef MILKSTREAM_DATA_TASKS_HPP
#define MILKSTREAM_DATA_TASKS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "milkstream/data/vocab.hpp"

namespace milkstream::data {

using SentencePair = std::pair<std::vector<int>, std::vector<int>>;

enum class TaskKind { copy, rotate, marker_lookahead };

TaskKind task_kind_from_string(const std::string& s);
std::string to_string(TaskKind kind);

// Synthetic transduction tasks. copy and rotate are solvable by near-fixed
// schedules; marker_lookahead mixes eager sentences (marker E: target copies
// the payload) with lookahead sentences (marker L: the first target token is
// the final payload token), so only an adaptive schedule can be both fast
// and exact.
struct TaskSpec {
    TaskKind kind = TaskKind::copy;
    int vocab_size = 32;
    int min_len = 6;   // payload tokens, excluding marker and EOS
    int max_len = 12;
    double lookahead_fraction = 0.5;  // marker_lookahead only
    std::uint64_t seed = 1;

    void validate() const;
};

// Deterministic function of (spec, spec.seed, index). Sequences come with
// EOS appended; marker tasks put the marker first.
SentencePair generate_pair(const TaskSpec& spec, std::uint64_t index);

std::vector<SentencePair> generate_dataset(const TaskSpec& spec, std::uint64_t count,
                                           std::uint64_t start_index = 0);

}  // namespace milkstream::data

#endif
