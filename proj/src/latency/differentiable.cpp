#include "milkstream/latency/differentiable.hpp"

#include <stdexcept>
#include <vector>

namespace milkstream::latency {

using namespace numerics;

Value expected_delay(const Value& alpha_row) {
    if (alpha_row.cols() != 1 || alpha_row.rows() == 0) {
        throw std::invalid_argument("expected_delay: expected a nonempty vector");
    }
    if (std::abs(alpha_row.array().sum() - 1.0) > 1e-6) {
        throw std::invalid_argument("expected_delay: alpha not normalized");
    }
    const Eigen::Index n = alpha_row.rows();
    ArrayVec positions = ArrayVec::LinSpaced(n, 1.0, static_cast<double>(n));
    return dot(alpha_row, alpha_row.tape()->vector(positions));
}

Value clamp_delays(const Value& g, double gamma) {
    if (g.cols() != 1 || g.rows() == 0) {
        throw std::invalid_argument("clamp_delays: expected a nonempty vector");
    }
    if (gamma <= 0.0) throw std::invalid_argument("clamp_delays: gamma must be positive");
    Tape& t = *g.tape();
    const Eigen::Index n = g.rows();
    const double min_step = 1.0 / gamma;

    Array gp(n, 1);
    // branch[i] == true when g[i] wins the max and gradient routes to it;
    // otherwise the lag chains back through g'[i-1].
    std::vector<bool> branch(static_cast<std::size_t>(n), true);
    gp(0, 0) = g.array()(0, 0);
    for (Eigen::Index i = 1; i < n; ++i) {
        const double chained = gp(i - 1, 0) + min_step;
        const double direct = g.array()(i, 0);
        if (direct >= chained) {
            gp(i, 0) = direct;
        } else {
            gp(i, 0) = chained;
            branch[static_cast<std::size_t>(i)] = false;
        }
    }

    Node* out = t.emplace(std::move(gp));
    Node* ng = g.node();
    Node* self = out;
    if (t.recording() && ng->requires_grad) {
        out->requires_grad = true;
        out->backprop = [ng, self, branch, n] {
            Array& dg = ng->grad_ref();
            double carry = 0.0;
            for (Eigen::Index i = n - 1; i >= 0; --i) {
                const double adj = self->grad(i, 0) + carry;
                if (branch[static_cast<std::size_t>(i)]) {
                    dg(i, 0) += adj;
                    carry = 0.0;
                } else {
                    carry = adj;
                }
            }
        };
    }
    return Value(&t, out);
}

Value differentiable_average_lagging(const Value& g, double gamma) {
    const Eigen::Index n = g.rows();
    Value gp = clamp_delays(g, gamma);
    ArrayVec offsets(n);
    for (Eigen::Index i = 0; i < n; ++i) offsets[i] = static_cast<double>(i) / gamma;
    Value lag = sub(gp, g.tape()->vector(offsets));
    return mul_scalar(sum(lag), 1.0 / static_cast<double>(n));
}

Value latency_augmented_loss(const Value& nll, const Value& g, double lambda, double gamma) {
    if (lambda < 0.0) throw std::invalid_argument("latency_augmented_loss: lambda must be >= 0");
    if (lambda == 0.0) return nll;
    return add(nll, mul_scalar(differentiable_average_lagging(g, gamma), lambda));
}

}  // namespace milkstream::latency
