#include "milkstream/harness/writers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "milkstream/errors.hpp"

namespace milkstream::harness {

using nlohmann::json;

std::string fmt_double(double v, int precision) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

void write_curves_csv(const std::string& path, std::vector<ExperimentRecord> records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const ExperimentRecord& a, const ExperimentRecord& b) {
                         if (a.method != b.method) return a.method < b.method;
                         const double da = a.failed ? std::numeric_limits<double>::infinity() : a.dal;
                         const double db = b.failed ? std::numeric_limits<double>::infinity() : b.dal;
                         if (da != db) return da < db;
                         if (a.param != b.param) return a.param < b.param;
                         return a.seed < b.seed;
                     });
    std::ofstream out(path);
    if (!out) throw IoError("cannot write curve file: " + path);
    out << "method,param,seed,quality,AP,AL,DAL\n";
    for (const auto& r : records) {
        out << r.method << ',' << fmt_double(r.param, 4) << ',' << r.seed << ',';
        if (r.failed) {
            out << "nan,nan,nan,nan\n";
        } else {
            out << fmt_double(r.quality, 6) << ',' << fmt_double(r.ap, 6) << ','
                << fmt_double(r.al, 6) << ',' << fmt_double(r.dal, 6) << '\n';
        }
    }
}

std::vector<ExperimentRecord> read_curves_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open curve file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("curve file is empty: " + path);
    if (line != "method,param,seed,quality,AP,AL,DAL") {
        throw FormatError("curve file has unexpected header: " + line);
    }
    std::vector<ExperimentRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 7) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected 7 fields");
        }
        ExperimentRecord r;
        r.method = fields[0];
        r.param = std::stod(fields[1]);
        r.seed = std::stoull(fields[2]);
        r.failed = (fields[3] == "nan");
        if (!r.failed) {
            r.quality = std::stod(fields[3]);
            r.ap = std::stod(fields[4]);
            r.al = std::stod(fields[5]);
            r.dal = std::stod(fields[6]);
        } else {
            r.quality = r.ap = r.al = r.dal = std::nan("");
        }
        records.push_back(std::move(r));
    }
    return records;
}

struct TraceWriter::Impl {
    std::ofstream out;
    std::size_t sentence = 0;
};

TraceWriter::TraceWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path);
    if (!impl_->out) {
        delete impl_;
        throw IoError("cannot write trace file: " + path);
    }
}

TraceWriter::~TraceWriter() { delete impl_; }

void TraceWriter::write_sentence(const DecodeTrace& trace, const data::Vocabulary& vocab,
                                 const latency::LatencyReport& report) {
    for (const auto& a : trace.actions) {
        json rec;
        rec["a"] = (a.type == TraceAction::Type::read) ? "r" : "w";
        rec["tok"] = vocab.token_of(a.token);
        rec["pos"] = static_cast<int>(a.pos);
        impl_->out << rec.dump() << '\n';
    }
    json summary;
    summary["a"] = "summary";
    summary["sent"] = impl_->sentence++;
    summary["src_len"] = static_cast<int>(trace.source_len);
    summary["tgt_len"] = static_cast<int>(trace.write_count());
    summary["terminated"] = trace.terminated;
    summary["ap"] = report.ap;
    summary["al"] = report.al;
    summary["dal"] = report.dal;
    impl_->out << summary.dump() << '\n';
}

std::vector<TraceSentence> read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file: " + path);
    std::vector<TraceSentence> sentences;
    DecodeTrace current;
    Eigen::Index reads = 0, writes = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": bad JSON: " + e.what());
        }
        const std::string a = rec.value("a", "");
        if (a == "r" || a == "w") {
            TraceAction action;
            action.type = (a == "r") ? TraceAction::Type::read : TraceAction::Type::write;
            action.pos = rec.value("pos", 0);
            action.token = -1;  // token ids are not serialized; text is
            current.actions.push_back(action);
            (a == "r" ? reads : writes) += 1;
        } else if (a == "summary") {
            current.source_len = rec.value("src_len", static_cast<int>(reads));
            current.terminated = rec.value("terminated", false);
            TraceSentence s;
            s.trace = std::move(current);
            s.reported.ap = rec.value("ap", std::nan(""));
            s.reported.al = rec.value("al", std::nan(""));
            s.reported.dal = rec.value("dal", std::nan(""));
            sentences.push_back(std::move(s));
            current = DecodeTrace{};
            reads = writes = 0;
        } else {
            throw FormatError(path + ":" + std::to_string(line_no) + ": unknown record kind");
        }
    }
    if (!current.actions.empty()) {
        throw FormatError(path + ": trailing actions without a summary record");
    }
    return sentences;
}

namespace {

std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_attention_svg(const std::string& path, const Eigen::ArrayXXd& beta,
                         const std::vector<Eigen::Index>& heads,
                         const std::vector<std::string>& src_tokens,
                         const std::vector<std::string>& tgt_tokens) {
    const Eigen::Index rows = beta.rows(), cols = beta.cols();
    const int cell = 22, margin = 70;
    const int width = margin + cell * static_cast<int>(cols) + 10;
    const int height = margin + cell * static_cast<int>(rows) + 10;

    std::ofstream out(path);
    if (!out) throw IoError("cannot write svg: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double w = std::clamp(beta(i, j), 0.0, 1.0);
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - w)));
            const int x = margin + cell * static_cast<int>(j);
            const int y = margin + cell * static_cast<int>(i);
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell - 2
                << "\" height=\"" << cell - 2 << "\" fill=\"rgb(" << shade << ',' << shade << ','
                << shade << ")\" stroke=\"#ccc\"/>\n";
        }
    }
    // Bold outline on the hard head plus its trajectory.
    std::ostringstream pts;
    for (std::size_t i = 0; i < heads.size() && static_cast<Eigen::Index>(i) < rows; ++i) {
        const Eigen::Index j = heads[i] - 1;
        const int x = margin + cell * static_cast<int>(j);
        const int y = margin + cell * static_cast<int>(i);
        out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell - 2 << "\" height=\""
            << cell - 2 << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2.5\"/>\n";
        pts << (x + cell / 2 - 1) << ',' << (y + cell / 2 - 1) << ' ';
    }
    if (heads.size() > 1) {
        out << "<polyline points=\"" << pts.str()
            << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
    }
    for (std::size_t j = 0; j < src_tokens.size() && static_cast<Eigen::Index>(j) < cols; ++j) {
        out << "<text x=\"" << margin + cell * static_cast<int>(j) + cell / 2 << "\" y=\""
            << margin - 8 << "\" font-size=\"10\" text-anchor=\"middle\">"
            << svg_escape(src_tokens[j]) << "</text>\n";
    }
    for (std::size_t i = 0; i < tgt_tokens.size() && static_cast<Eigen::Index>(i) < rows; ++i) {
        out << "<text x=\"" << margin - 6 << "\" y=\""
            << margin + cell * static_cast<int>(i) + cell / 2 + 4
            << "\" font-size=\"10\" text-anchor=\"end\">" << svg_escape(tgt_tokens[i])
            << "</text>\n";
    }
    out << "</svg>\n";
}

void write_beta_csv(const std::string& path, const Eigen::ArrayXXd& beta,
                    const std::vector<Eigen::Index>& heads) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write beta csv: " + path);
    for (Eigen::Index j = 0; j < beta.cols(); ++j) out << "beta_" << (j + 1) << ',';
    out << "head\n";
    for (Eigen::Index i = 0; i < beta.rows(); ++i) {
        for (Eigen::Index j = 0; j < beta.cols(); ++j) out << fmt_double(beta(i, j), 9) << ',';
        out << heads[static_cast<std::size_t>(i)] << '\n';
    }
}

void write_histogram_csv(const std::string& path, const std::vector<DelayHistogram>& series) {
    if (series.empty()) throw std::invalid_argument("write_histogram_csv: no series");
    Eigen::Index max_delay = 0;
    for (const auto& s : series) {
        for (const auto& [d, _] : s.counts) max_delay = std::max(max_delay, d);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write histogram csv: " + path);
    out << "delay";
    for (const auto& s : series) out << ',' << s.label;
    out << '\n';
    for (Eigen::Index d = 1; d <= max_delay; ++d) {
        out << d;
        for (const auto& s : series) {
            auto it = s.counts.find(d);
            out << ',' << (it == s.counts.end() ? 0 : it->second);
        }
        out << '\n';
    }
}

void write_histogram_svg(const std::string& path, const std::vector<DelayHistogram>& series) {
    if (series.empty()) throw std::invalid_argument("write_histogram_svg: no series");
    Eigen::Index max_delay = 1;
    std::size_t max_count = 1;
    for (const auto& s : series) {
        for (const auto& [d, c] : s.counts) {
            max_delay = std::max(max_delay, d);
            max_count = std::max(max_count, c);
        }
    }
    const int bar_w = 16, group_gap = 10, margin = 46, plot_h = 220;
    const int group_w = bar_w * static_cast<int>(series.size()) + group_gap;
    const int width = margin * 2 + group_w * static_cast<int>(max_delay);
    const int height = margin * 2 + plot_h + 20;
    const char* palette[] = {"#4472c4", "#ed7d31", "#70ad47", "#9e480e", "#5b9bd5", "#a5a5a5"};

    std::ofstream out(path);
    if (!out) throw IoError("cannot write histogram svg: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin + plot_h << "\" x2=\""
        << width - margin / 2 << "\" y2=\"" << margin + plot_h
        << "\" stroke=\"black\"/>\n";
    for (Eigen::Index d = 1; d <= max_delay; ++d) {
        const int gx = margin + group_w * static_cast<int>(d - 1);
        for (std::size_t s = 0; s < series.size(); ++s) {
            auto it = series[s].counts.find(d);
            const std::size_t c = it == series[s].counts.end() ? 0 : it->second;
            const int h = static_cast<int>(std::lround(
                static_cast<double>(plot_h) * static_cast<double>(c) /
                static_cast<double>(max_count)));
            out << "<rect x=\"" << gx + bar_w * static_cast<int>(s) << "\" y=\""
                << margin + plot_h - h << "\" width=\"" << bar_w - 2 << "\" height=\"" << h
                << "\" fill=\"" << palette[s % 6] << "\"/>\n";
        }
        out << "<text x=\"" << gx + group_w / 2 - group_gap / 2 << "\" y=\""
            << margin + plot_h + 14 << "\" font-size=\"10\" text-anchor=\"middle\">" << d
            << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const int y = margin / 2 + static_cast<int>(s) * 16;
        out << "<rect x=\"" << margin << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
            << palette[s % 6] << "\"/>\n";
        out << "<text x=\"" << margin + 18 << "\" y=\"" << y << "\" font-size=\"11\">"
            << svg_escape(series[s].label) << "</text>\n";
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 8
        << "\" font-size=\"11\" text-anchor=\"middle\">initial delay (source tokens read before "
           "first write)</text>\n";
    out << "</svg>\n";
}

}  // namespace milkstream::harness
