#ifndef MILKSTREAM_DATA_CORPUS_HPP
#define MILKSTREAM_DATA_CORPUS_HPP

#include <string>
#include <vector>

#include "milkstream/data/tasks.hpp"
#include "milkstream/data/vocab.hpp"

namespace milkstream::data {

// Two line-aligned UTF-8 files, one sentence per line, space-separated
// tokens. EOS is appended to every side; tokens missing from the vocabulary
// map to UNK. Line-count mismatch is a FormatError naming the first
// unmatched line.
std::vector<SentencePair> load_parallel_corpus(const std::string& src_path,
                                               const std::string& tgt_path,
                                               const Vocabulary& vocab);

void save_parallel_corpus(const std::vector<SentencePair>& pairs, const Vocabulary& vocab,
                          const std::string& src_path, const std::string& tgt_path);

}  // namespace milkstream::data

#endif
