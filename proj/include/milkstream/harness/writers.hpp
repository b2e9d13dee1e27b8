#ifndef MILKSTREAM_HARNESS_WRITERS_HPP
#define MILKSTREAM_HARNESS_WRITERS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "milkstream/data/vocab.hpp"
#include "milkstream/latency/metrics.hpp"
#include "milkstream/trace.hpp"

namespace milkstream::harness {

// Fixed-precision decimal, so identical runs produce byte-identical files.
std::string fmt_double(double v, int precision = 9);

struct ExperimentRecord {
    std::string method;
    double param = 0.0;  // lambda, k, or cs depending on method
    std::uint64_t seed = 0;
    double quality = 0.0;
    double ap = 0.0;
    double al = 0.0;
    double dal = 0.0;
    double wall_time_s = 0.0;  // diagnostic only; never written to the curve file
    bool failed = false;
};

// Header "method,param,seed,quality,AP,AL,DAL"; rows grouped by method and
// sorted by DAL ascending within each. Failed runs keep their row with nan
// metrics.
void write_curves_csv(const std::string& path, std::vector<ExperimentRecord> records);
std::vector<ExperimentRecord> read_curves_csv(const std::string& path);

// One sentence as JSONL: a {"a":"r"|"w","tok":...,"pos":...} record per
// action followed by one summary record carrying lengths and AP/AL/DAL.
class TraceWriter {
public:
    explicit TraceWriter(const std::string& path);
    ~TraceWriter();
    void write_sentence(const DecodeTrace& trace, const data::Vocabulary& vocab,
                        const latency::LatencyReport& report);

private:
    struct Impl;
    Impl* impl_;
};

struct TraceSentence {
    DecodeTrace trace;
    latency::LatencyReport reported;
};
std::vector<TraceSentence> read_trace_file(const std::string& path);

// Attention heat map: one shaded cell per (output step, source position),
// bold outline on the hard head, a polyline tracking its trajectory.
void write_attention_svg(const std::string& path, const Eigen::ArrayXXd& beta,
                         const std::vector<Eigen::Index>& heads,
                         const std::vector<std::string>& src_tokens,
                         const std::vector<std::string>& tgt_tokens);

// beta matrix CSV with a trailing `head` column per row.
void write_beta_csv(const std::string& path, const Eigen::ArrayXXd& beta,
                    const std::vector<Eigen::Index>& heads);

// Grouped bar chart of initial-delay counts; one series per system.
struct DelayHistogram {
    std::string label;
    std::map<Eigen::Index, std::size_t> counts;  // initial delay -> sentences
};
void write_histogram_csv(const std::string& path, const std::vector<DelayHistogram>& series);
void write_histogram_svg(const std::string& path, const std::vector<DelayHistogram>& series);

}  // namespace milkstream::harness

#endif
