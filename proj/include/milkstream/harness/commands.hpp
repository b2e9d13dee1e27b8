#ifndef MILKSTREAM_HARNESS_COMMANDS_HPP
#define MILKSTREAM_HARNESS_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "milkstream/harness/config.hpp"

namespace milkstream::harness {

// CLI-facing entry points. Each resolves its configuration (file, then flag
// overrides), echoes the effective config into the output directory, and
// writes its artifacts there. Errors propagate as the exception types in
// errors.hpp; main() maps them to exit codes.

struct CommandOptions {
    std::string config_path;                                        // optional
    std::vector<std::pair<std::string, std::string>> overrides;    // key, value
    std::string out_dir;                                            // --out
};

KeyValueConfig resolve_config(const CommandOptions& opts);

// Trains one model; writes checkpoint.bin, vocab.txt, train.log,
// config.echo.txt, test.src/test.tgt and an eval summary.
void cmd_train(const CommandOptions& opts, std::ostream& status);

// Runs the (method, param, seed) grid; writes curves.csv + config echo.
void cmd_sweep(const CommandOptions& opts, std::ostream& status);

// Decodes a tokenized input file with a trained checkpoint; writes
// translations.txt and traces.jsonl (per-sentence actions + AP/AL/DAL
// summary records).
void cmd_decode(const std::string& checkpoint_path, const std::string& input_path,
                std::string vocab_path, const std::string& out_dir, std::ostream& status);

// Hard-decodes a single sentence and dumps the attention matrix (beta.csv)
// and heat map (attention.svg) with the head trajectory.
void cmd_dump_attention(const std::string& checkpoint_path, const std::string& sentence,
                        std::string vocab_path, const std::string& out_dir, std::ostream& status);

// Bins initial delays (reads before the first write) per trace file; writes
// histogram.csv and histogram.svg.
void cmd_delay_histogram(const std::vector<std::string>& trace_files, const std::string& out_dir,
                         std::ostream& status);

// Recomputes AP/AL/DAL from trace files (independent of the values stored in
// their summaries) and prints per-file means.
void cmd_eval_latency(const std::vector<std::string>& trace_files, std::ostream& status);

}  // namespace milkstream::harness

#endif
