#include "milkstream/data/vocab.hpp"

#include <fstream>
#include <stdexcept>

#include "milkstream/errors.hpp"

namespace milkstream::data {

namespace {
const std::vector<std::string> kReservedTokens = {"<pad>", "<bos>", "<eos>", "<unk>"};
}

Vocabulary Vocabulary::with_tokens(const std::vector<std::string>& tokens) {
    Vocabulary v;
    v.tokens_ = kReservedTokens;
    for (const auto& tok : tokens) v.tokens_.push_back(tok);
    for (int i = 0; i < static_cast<int>(v.tokens_.size()); ++i) {
        if (!v.ids_.emplace(v.tokens_[i], i).second) {
            throw std::invalid_argument("Vocabulary: duplicate token '" + v.tokens_[i] + "'");
        }
    }
    return v;
}

Vocabulary Vocabulary::synthetic(int vocab_size) {
    if (vocab_size < kSyntheticPayloadStart + 1) {
        throw std::invalid_argument("Vocabulary::synthetic: vocab_size must be at least 7");
    }
    std::vector<std::string> toks = {"E", "L"};
    for (int i = 0; i < vocab_size - kSyntheticPayloadStart; ++i) {
        if (i < 26) {
            toks.push_back(std::string(1, static_cast<char>('a' + i)));
        } else {
            toks.push_back("w" + std::to_string(i));
        }
    }
    return with_tokens(toks);
}

int Vocabulary::id_of(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
    if (id < 0 || id >= size()) {
        throw std::invalid_argument("Vocabulary: id " + std::to_string(id) + " out of range");
    }
    return tokens_[static_cast<std::size_t>(id)];
}

Vocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vocabulary file: " + path);
    std::vector<std::string> toks;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        toks.push_back(line);
    }
    return Vocabulary::with_tokens(toks);
}

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write vocabulary file: " + path);
    for (int id = Vocabulary::kReserved; id < vocab.size(); ++id) {
        out << vocab.token_of(id) << '\n';
    }
}

}  // namespace milkstream::data
