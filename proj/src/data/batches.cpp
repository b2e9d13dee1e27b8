#include "milkstream/data/batches.hpp"

#include <algorithm>
#include <stdexcept>

#include "milkstream/numerics/rng.hpp"

namespace milkstream::data {

using numerics::SeededRng;

std::vector<int> Batch::source_of(Eigen::Index row) const {
    std::vector<int> out(static_cast<std::size_t>(src_lens[static_cast<std::size_t>(row)]));
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = src(row, static_cast<Eigen::Index>(j));
    return out;
}

std::vector<int> Batch::target_of(Eigen::Index row) const {
    std::vector<int> out(static_cast<std::size_t>(tgt_lens[static_cast<std::size_t>(row)]));
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = tgt(row, static_cast<Eigen::Index>(j));
    return out;
}

std::vector<Batch> make_batches(const std::vector<SentencePair>& pairs, int batch_size,
                                std::uint64_t seed) {
    if (batch_size < 1) throw std::invalid_argument("make_batches: batch_size must be >= 1");
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SeededRng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.next_below(i)]);
    }

    std::vector<Batch> batches;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
        const std::size_t count = std::min<std::size_t>(batch_size, order.size() - start);
        Eigen::Index max_src = 0, max_tgt = 0;
        for (std::size_t r = 0; r < count; ++r) {
            const auto& [s, t] = pairs[order[start + r]];
            max_src = std::max<Eigen::Index>(max_src, static_cast<Eigen::Index>(s.size()));
            max_tgt = std::max<Eigen::Index>(max_tgt, static_cast<Eigen::Index>(t.size()));
        }
        Batch b;
        b.src = TokenMatrix::Constant(static_cast<Eigen::Index>(count), max_src, Vocabulary::kPad);
        b.tgt = TokenMatrix::Constant(static_cast<Eigen::Index>(count), max_tgt, Vocabulary::kPad);
        for (std::size_t r = 0; r < count; ++r) {
            const auto& [s, t] = pairs[order[start + r]];
            for (std::size_t j = 0; j < s.size(); ++j) {
                b.src(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = s[j];
            }
            for (std::size_t j = 0; j < t.size(); ++j) {
                b.tgt(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = t[j];
            }
            b.src_lens.push_back(static_cast<Eigen::Index>(s.size()));
            b.tgt_lens.push_back(static_cast<Eigen::Index>(t.size()));
        }
        batches.push_back(std::move(b));
    }
    return batches;
}

}  // namespace milkstream::data
