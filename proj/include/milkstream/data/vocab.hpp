#ifndef MILKSTREAM_DATA_VOCAB_HPP
#define MILKSTREAM_DATA_VOCAB_HPP

#include <string>
#include <unordered_map>
#include <vector>

namespace milkstream::data {

// token <-> id bijection with the four reserved ids up front. Every source
// and target sentence ends with EOS; BOS only ever feeds the decoder.
class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;
    static constexpr int kUnk = 3;
    static constexpr int kReserved = 4;

    // Reserved ids plus the given tokens in order (token i gets id 4 + i).
    static Vocabulary with_tokens(const std::vector<std::string>& tokens);

    // Vocabulary for the synthetic tasks: markers "E","L" at ids 4,5 and
    // payload tokens filling the rest up to vocab_size.
    static Vocabulary synthetic(int vocab_size);

    int size() const { return static_cast<int>(tokens_.size()); }
    // UNK for tokens not in the vocabulary.
    int id_of(const std::string& token) const;
    const std::string& token_of(int id) const;
    bool contains(const std::string& token) const { return ids_.count(token) > 0; }

    static constexpr int kMarkerEager = 4;      // "E"
    static constexpr int kMarkerLookahead = 5;  // "L"
    // First id usable as payload in synthetic tasks.
    static constexpr int kSyntheticPayloadStart = 6;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> ids_;
};

// One non-reserved token per line; line number = id - 4.
Vocabulary load_vocabulary(const std::string& path);
void save_vocabulary(const Vocabulary& vocab, const std::string& path);

}  // namespace milkstream::data

#endif
