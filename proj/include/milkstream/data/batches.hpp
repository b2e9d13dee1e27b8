#ifndef MILKSTREAM_DATA_BATCHES_HPP
#define MILKSTREAM_DATA_BATCHES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "milkstream/data/tasks.hpp"

namespace milkstream::data {

using TokenMatrix = Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic>;

// One padded batch: ids are PAD beyond each sentence's length and the length
// vectors are the masks. Attention and the loss must never look past them.
struct Batch {
    TokenMatrix src;  // batch x max_src_len
    TokenMatrix tgt;  // batch x max_tgt_len
    std::vector<Eigen::Index> src_lens;
    std::vector<Eigen::Index> tgt_lens;

    Eigen::Index size() const { return src.rows(); }
    std::vector<int> source_of(Eigen::Index row) const;
    std::vector<int> target_of(Eigen::Index row) const;
};

// Deterministic shuffle (Fisher-Yates driven by seed), then contiguous
// batches of batch_size (last one may be smaller).
std::vector<Batch> make_batches(const std::vector<SentencePair>& pairs, int batch_size,
                                std::uint64_t seed);

}  // namespace milkstream::data

#endif
