#include "milkstream/model/checkpoint.hpp"

#include <cstdint>
#include <fstream>
#include <map>

#include "milkstream/errors.hpp"

namespace milkstream::model {

namespace {

constexpr const char* kMagic = "MILKSTREAM-CKPT-1";

void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw FormatError("checkpoint: truncated header field");
    return v;
}

void write_entry(std::ofstream& out, const std::string& name, const numerics::Array& a) {
    write_u64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(out, static_cast<std::uint64_t>(a.rows()));
    write_u64(out, static_cast<std::uint64_t>(a.cols()));
    out.write(reinterpret_cast<const char*>(a.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(a.size())));
}

struct Entry {
    std::string name;
    numerics::Array value;
};

Entry read_entry(std::ifstream& in) {
    Entry e;
    const std::uint64_t name_len = read_u64(in);
    if (name_len > 4096) throw FormatError("checkpoint: implausible entry name length");
    e.name.resize(name_len);
    in.read(e.name.data(), static_cast<std::streamsize>(name_len));
    const std::uint64_t rows = read_u64(in);
    const std::uint64_t cols = read_u64(in);
    if (rows == 0 || cols == 0 || rows * cols > (1ull << 30)) {
        throw FormatError("checkpoint: implausible entry shape for '" + e.name + "'");
    }
    e.value.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(e.value.data()),
            static_cast<std::streamsize>(sizeof(double) * rows * cols));
    if (!in) throw FormatError("checkpoint: truncated data for '" + e.name + "'");
    return e;
}

numerics::Array meta(double v) { return numerics::Array::Constant(1, 1, v); }

}  // namespace

void save_checkpoint(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out << kMagic << '\n';

    const ModelConfig& c = model.config();
    const WaitKSchedule& s = model.schedule();
    std::vector<std::pair<std::string, numerics::Array>> entries;
    entries.emplace_back("__meta/vocab_size", meta(c.vocab_size));
    entries.emplace_back("__meta/embed_dim", meta(c.embed_dim));
    entries.emplace_back("__meta/hidden_dim", meta(c.hidden_dim));
    entries.emplace_back("__meta/encoder_layers", meta(c.encoder_layers));
    entries.emplace_back("__meta/decoder_layers", meta(c.decoder_layers));
    entries.emplace_back("__meta/attention_kind", meta(static_cast<double>(c.attention.kind)));
    entries.emplace_back("__meta/chunk_size", meta(c.attention.chunk_size));
    entries.emplace_back("__meta/noise_n", meta(c.attention.noise_n));
    entries.emplace_back("__meta/energy_offset", meta(c.attention.energy_offset));
    entries.emplace_back("__meta/eps", meta(c.attention.eps));
    entries.emplace_back("__meta/label_smoothing", meta(c.label_smoothing));
    entries.emplace_back("__meta/wait_k", meta(s.k));
    entries.emplace_back("__meta/emission_rate", meta(s.emission_rate));
    for (const auto& p : model.params()) entries.emplace_back(p.name, p.value);

    write_u64(out, entries.size());
    for (const auto& [name, value] : entries) write_entry(out, name, value);
    if (!out) throw IoError("failed while writing checkpoint: " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    std::string magic;
    if (!std::getline(in, magic)) throw FormatError("checkpoint: missing magic line");
    if (magic != kMagic) {
        throw VersionError("checkpoint: magic '" + magic + "' does not match " + kMagic);
    }

    const std::uint64_t count = read_u64(in);
    std::map<std::string, numerics::Array> entries;
    for (std::uint64_t i = 0; i < count; ++i) {
        Entry e = read_entry(in);
        entries[e.name] = std::move(e.value);
    }

    auto meta_of = [&](const std::string& key) {
        auto it = entries.find("__meta/" + key);
        if (it == entries.end()) throw FormatError("checkpoint: missing __meta/" + key);
        return it->second(0, 0);
    };

    ModelConfig cfg;
    cfg.vocab_size = static_cast<int>(meta_of("vocab_size"));
    cfg.embed_dim = static_cast<int>(meta_of("embed_dim"));
    cfg.hidden_dim = static_cast<int>(meta_of("hidden_dim"));
    cfg.encoder_layers = static_cast<int>(meta_of("encoder_layers"));
    cfg.decoder_layers = static_cast<int>(meta_of("decoder_layers"));
    cfg.attention.kind = static_cast<attention::Kind>(static_cast<int>(meta_of("attention_kind")));
    cfg.attention.chunk_size = static_cast<int>(meta_of("chunk_size"));
    cfg.attention.noise_n = meta_of("noise_n");
    cfg.attention.energy_offset = meta_of("energy_offset");
    cfg.attention.eps = meta_of("eps");
    cfg.label_smoothing = meta_of("label_smoothing");
    WaitKSchedule sched;
    sched.k = static_cast<int>(meta_of("wait_k"));
    sched.emission_rate = meta_of("emission_rate");

    Model model(cfg, sched, /*seed=*/0);
    for (auto& p : model.params()) {
        auto it = entries.find(p.name);
        if (it == entries.end()) throw FormatError("checkpoint: missing parameter '" + p.name + "'");
        if (it->second.rows() != p.value.rows() || it->second.cols() != p.value.cols()) {
            throw FormatError("checkpoint: shape mismatch for '" + p.name + "'");
        }
        p.value = it->second;
    }
    return model;
}

}  // namespace milkstream::model
