#include "milkstream/attention/monotonic.hpp"

#include <stdexcept>
#include <string>

#include "milkstream/errors.hpp"

namespace milkstream::attention {

using namespace numerics;

Value selection_probabilities(const Value& energies, double noise_n, SeededRng& rng,
                              bool training) {
    if (noise_n < 0.0) throw std::invalid_argument("selection_probabilities: noise_n must be >= 0");
    if (!training || noise_n == 0.0) return logistic(energies);
    ArrayVec noise = gaussian_noise_vector(rng, energies.rows(), noise_n);
    Value shift = energies.tape()->vector(noise);
    return logistic(add(energies, shift));
}

ArrayVec selection_probabilities(const ArrayVec& energies, double noise_n, SeededRng& rng,
                                 bool training) {
    if (noise_n < 0.0) throw std::invalid_argument("selection_probabilities: noise_n must be >= 0");
    ArrayVec out(energies.size());
    for (Eigen::Index j = 0; j < energies.size(); ++j) {
        const double shift = training ? gaussian_noise(rng, noise_n) : 0.0;
        out[j] = logistic(energies[j] + shift);
    }
    return out;
}

namespace {

void check_alpha_prev(double sum) {
    if (sum > 1.0 + 1e-6) {
        throw std::invalid_argument("monotonic_alpha_row: alpha_prev sums to " +
                                    std::to_string(sum) + " > 1");
    }
}

}  // namespace

Value monotonic_alpha_row(const Value& p, const Value& alpha_prev, double eps) {
    if (p.rows() != alpha_prev.rows() || p.cols() != 1 || alpha_prev.cols() != 1) {
        throw std::invalid_argument("monotonic_alpha_row: length mismatch");
    }
    check_alpha_prev(alpha_prev.array().sum());
    Value one_minus_p = clamp(sub(p.tape()->constant(Array::Ones(p.rows(), 1)), p), eps, 1.0);
    Value cp = shifted(cumulative_product(one_minus_p), 1.0);  // exclusive cumprod
    return mul(p, mul(cp, cumulative_sum(clamped_divide(alpha_prev, cp, eps))));
}

ArrayVec monotonic_alpha_row(const ArrayVec& p, const ArrayVec& alpha_prev, double eps) {
    if (p.size() != alpha_prev.size()) {
        throw std::invalid_argument("monotonic_alpha_row: length mismatch");
    }
    check_alpha_prev(alpha_prev.sum());
    ArrayVec one_minus_p = (1.0 - p).max(eps).min(1.0);
    ArrayVec cp(p.size());
    cp[0] = 1.0;
    if (p.size() > 1) {
        cp.tail(p.size() - 1) = cumulative_product(one_minus_p).head(p.size() - 1);
    }
    return p * cp * cumulative_sum(clamped_divide(alpha_prev, cp, eps));
}

Value preserve_mass(const Value& alpha) {
    if (alpha.cols() != 1 || alpha.rows() == 0) {
        throw std::invalid_argument("preserve_mass: expected a nonempty vector");
    }
    const double total = alpha.array().sum();
    if (total > 1.0 + 1e-6) {
        throw NumericError("preserve_mass: alpha sums to " + std::to_string(total) + " > 1");
    }
    Value residual = sub(alpha.tape()->scalar(1.0), sum(alpha));
    return add_at_index(alpha, alpha.rows() - 1, residual);
}

ArrayVec preserve_mass(const ArrayVec& alpha) {
    if (alpha.size() == 0) throw std::invalid_argument("preserve_mass: empty vector");
    const double total = alpha.sum();
    if (total > 1.0 + 1e-6) {
        throw NumericError("preserve_mass: alpha sums to " + std::to_string(total) + " > 1");
    }
    ArrayVec out = alpha;
    out[alpha.size() - 1] += 1.0 - total;
    return out;
}

HardStep hard_decode_step(const std::function<double(Eigen::Index)>& monotonic_energy,
                          HardHead head, Eigen::Index source_len) {
    if (source_len < 1) throw std::invalid_argument("hard_decode_step: empty source");
    if (head.position < 1 || head.position > source_len) {
        throw ContractViolation("hard_decode_step: head at position " +
                                std::to_string(head.position) + " outside source of length " +
                                std::to_string(source_len));
    }
    Eigen::Index j = head.position;
    while (j < source_len) {
        if (monotonic_energy(j) > 0.0) break;
        ++j;
    }
    HardStep out;
    out.head.position = j;
    out.head.halted = (j == source_len);
    out.attended_len = j;
    return out;
}

}  // namespace milkstream::attention
