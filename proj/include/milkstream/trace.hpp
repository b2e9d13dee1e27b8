#ifndef MILKSTREAM_TRACE_HPP
#define MILKSTREAM_TRACE_HPP

#include <Eigen/Dense>
#include <vector>

namespace milkstream {

// One scheduling decision: read the next source token or write a target
// token. Positions are 1-indexed.
struct TraceAction {
    enum class Type { read, write };
    Type type = Type::read;
    int token = 0;
    Eigen::Index pos = 0;

    static TraceAction read_action(int token, Eigen::Index pos) {
        return {Type::read, token, pos};
    }
    static TraceAction write_action(int token, Eigen::Index pos) {
        return {Type::write, token, pos};
    }
};

// Ordered read/write interleaving for one sentence. Test-time delays are
// recomputed from this, never trusted from the decoder.
struct DecodeTrace {
    std::vector<TraceAction> actions;
    Eigen::Index source_len = 0;  // |x| of the sentence being decoded
    bool terminated = false;      // decoder emitted target EOS

    Eigen::Index read_count() const;
    Eigen::Index write_count() const;

    // Throws std::invalid_argument unless reads cover source positions
    // 1,2,... in order (at most source_len of them), writes cover target
    // positions 1,2,... in order, and at least one write exists with a read
    // before it.
    void validate() const;
};

}  // namespace milkstream

#endif
