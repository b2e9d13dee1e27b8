#include "milkstream/latency/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace milkstream {

Eigen::Index DecodeTrace::read_count() const {
    Eigen::Index n = 0;
    for (const auto& a : actions) n += (a.type == TraceAction::Type::read);
    return n;
}

Eigen::Index DecodeTrace::write_count() const {
    Eigen::Index n = 0;
    for (const auto& a : actions) n += (a.type == TraceAction::Type::write);
    return n;
}

void DecodeTrace::validate() const {
    Eigen::Index reads = 0, writes = 0;
    for (const auto& a : actions) {
        if (a.type == TraceAction::Type::read) {
            if (a.pos != reads + 1) {
                throw std::invalid_argument("DecodeTrace: reads must cover source positions in order");
            }
            ++reads;
            if (reads > source_len) {
                throw std::invalid_argument("DecodeTrace: more reads than source tokens");
            }
        } else {
            if (a.pos != writes + 1) {
                throw std::invalid_argument("DecodeTrace: writes must cover target positions in order");
            }
            if (reads == 0) {
                throw std::invalid_argument("DecodeTrace: write before any read");
            }
            ++writes;
        }
    }
    if (writes == 0) throw std::invalid_argument("DecodeTrace: no writes");
}

}  // namespace milkstream

namespace milkstream::latency {

DelayVector DelayVector::from_delays(ArrayVec g, Eigen::Index source_len) {
    if (source_len < 1 || g.size() < 1) {
        throw std::invalid_argument("DelayVector: source and target must be nonempty");
    }
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (g[i] < 1.0 - 1e-6 || g[i] > static_cast<double>(source_len) + 1e-6) {
            throw std::invalid_argument("DelayVector: delay " + std::to_string(g[i]) +
                                        " outside [1, " + std::to_string(source_len) + "]");
        }
    }
    DelayVector d;
    d.g = std::move(g);
    d.source_len = source_len;
    d.target_len = d.g.size();
    d.gamma = static_cast<double>(d.target_len) / static_cast<double>(source_len);
    return d;
}

double expected_delay(const ArrayVec& alpha_row) {
    if (alpha_row.size() == 0) throw std::invalid_argument("expected_delay: empty alpha");
    if (std::abs(alpha_row.sum() - 1.0) > 1e-6) {
        throw std::invalid_argument("expected_delay: alpha not normalized");
    }
    double g = 0.0;
    for (Eigen::Index j = 0; j < alpha_row.size(); ++j) {
        g += static_cast<double>(j + 1) * alpha_row[j];
    }
    return g;
}

double average_proportion(const DelayVector& d) {
    if (d.source_len < 1 || d.target_len < 1) {
        throw std::invalid_argument("average_proportion: zero lengths");
    }
    return d.g.sum() / (static_cast<double>(d.source_len) * static_cast<double>(d.target_len));
}

double average_lagging(const DelayVector& d) {
    // First step that consumed the whole source; |y| if none did.
    Eigen::Index tau = d.target_len;
    for (Eigen::Index i = 0; i < d.target_len; ++i) {
        if (d.g[i] >= static_cast<double>(d.source_len) - 1e-6) {
            tau = i + 1;
            break;
        }
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < tau; ++i) {
        acc += d.g[i] - static_cast<double>(i) / d.gamma;
    }
    return acc / static_cast<double>(tau);
}

ArrayVec clamp_delays(const DelayVector& d) {
    ArrayVec gp(d.target_len);
    gp[0] = d.g[0];
    const double min_step = 1.0 / d.gamma;
    for (Eigen::Index i = 1; i < d.target_len; ++i) {
        gp[i] = std::max(d.g[i], gp[i - 1] + min_step);
    }
    return gp;
}

double differentiable_average_lagging(const DelayVector& d) {
    const ArrayVec gp = clamp_delays(d);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d.target_len; ++i) {
        acc += gp[i] - static_cast<double>(i) / d.gamma;
    }
    return acc / static_cast<double>(d.target_len);
}

LatencyReport report(const DelayVector& d) {
    return {average_proportion(d), average_lagging(d), differentiable_average_lagging(d)};
}

DelayVector delays_from_trace(const DecodeTrace& trace) {
    trace.validate();
    ArrayVec g(trace.write_count());
    Eigen::Index reads = 0, writes = 0;
    for (const auto& a : trace.actions) {
        if (a.type == TraceAction::Type::read) {
            ++reads;
        } else {
            g[writes++] = static_cast<double>(reads);
        }
    }
    return DelayVector::from_delays(std::move(g), trace.source_len);
}

}  // namespace milkstream::latency
