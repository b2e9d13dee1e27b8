#include "milkstream/data/corpus.hpp"

#include <fstream>
#include <sstream>

#include "milkstream/errors.hpp"

namespace milkstream::data {

namespace {

std::vector<int> tokenize_line(const std::string& line, const Vocabulary& vocab) {
    std::istringstream ss(line);
    std::vector<int> ids;
    std::string tok;
    while (ss >> tok) ids.push_back(vocab.id_of(tok));
    ids.push_back(Vocabulary::kEos);
    return ids;
}

}  // namespace

std::vector<SentencePair> load_parallel_corpus(const std::string& src_path,
                                               const std::string& tgt_path,
                                               const Vocabulary& vocab) {
    std::ifstream src_in(src_path);
    if (!src_in) throw IoError("cannot open source corpus: " + src_path);
    std::ifstream tgt_in(tgt_path);
    if (!tgt_in) throw IoError("cannot open target corpus: " + tgt_path);

    std::vector<SentencePair> pairs;
    std::string src_line, tgt_line;
    std::size_t line_no = 0;
    while (true) {
        const bool has_src = static_cast<bool>(std::getline(src_in, src_line));
        const bool has_tgt = static_cast<bool>(std::getline(tgt_in, tgt_line));
        ++line_no;
        if (!has_src && !has_tgt) break;
        if (has_src != has_tgt) {
            throw FormatError("parallel corpus line-count mismatch at line " +
                              std::to_string(line_no) + " (" +
                              (has_src ? tgt_path : src_path) + " ended first)");
        }
        pairs.emplace_back(tokenize_line(src_line, vocab), tokenize_line(tgt_line, vocab));
    }
    return pairs;
}

void save_parallel_corpus(const std::vector<SentencePair>& pairs, const Vocabulary& vocab,
                          const std::string& src_path, const std::string& tgt_path) {
    std::ofstream src_out(src_path);
    if (!src_out) throw IoError("cannot write source corpus: " + src_path);
    std::ofstream tgt_out(tgt_path);
    if (!tgt_out) throw IoError("cannot write target corpus: " + tgt_path);
    auto write_side = [&vocab](std::ofstream& out, const std::vector<int>& ids) {
        bool first = true;
        for (int id : ids) {
            if (id == Vocabulary::kEos) continue;
            if (!first) out << ' ';
            out << vocab.token_of(id);
            first = false;
        }
        out << '\n';
    };
    for (const auto& [src, tgt] : pairs) {
        write_side(src_out, src);
        write_side(tgt_out, tgt);
    }
}

}  // namespace milkstream::data
