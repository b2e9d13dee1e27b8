#include "milkstream/attention/induced.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace milkstream::attention {

using namespace numerics;

namespace {

void check_normalized(double sum, const char* op) {
    if (std::abs(sum - 1.0) > 1e-6) {
        throw std::invalid_argument(std::string(op) + ": alpha not normalized (sum " +
                                    std::to_string(sum) + "); apply preserve_mass first");
    }
}

}  // namespace

Value milk_beta_row(const Value& alpha, const Value& u, double eps) {
    if (alpha.rows() != u.rows() || alpha.cols() != 1 || u.cols() != 1) {
        throw std::invalid_argument("milk_beta_row: length mismatch");
    }
    check_normalized(alpha.array().sum(), "milk_beta_row");
    const double m = u.array().maxCoeff();
    Value eu = exp(add_scalar(u, -m));
    Value denom = cumulative_sum(eu);
    return mul(eu, reversed_cumulative_sum(clamped_divide(alpha, denom, eps)));
}

ArrayVec milk_beta_row(const ArrayVec& alpha, const ArrayVec& u, double eps) {
    if (alpha.size() != u.size()) throw std::invalid_argument("milk_beta_row: length mismatch");
    check_normalized(alpha.sum(), "milk_beta_row");
    ArrayVec eu = (u - u.maxCoeff()).exp();
    return eu * reversed_cumulative_sum(clamped_divide(alpha, cumulative_sum(eu), eps));
}

Value mocha_beta_row(const Value& alpha, const Value& u, int chunk_size, double eps) {
    if (chunk_size < 1) throw std::invalid_argument("mocha_beta_row: chunk_size must be >= 1");
    if (alpha.rows() != u.rows() || alpha.cols() != 1 || u.cols() != 1) {
        throw std::invalid_argument("mocha_beta_row: length mismatch");
    }
    check_normalized(alpha.array().sum(), "mocha_beta_row");
    const double m = u.array().maxCoeff();
    Value eu = exp(add_scalar(u, -m));
    Value denom = moving_sum(eu, chunk_size - 1, 0);
    return mul(eu, moving_sum(clamped_divide(alpha, denom, eps), 0, chunk_size - 1));
}

ArrayVec mocha_beta_row(const ArrayVec& alpha, const ArrayVec& u, int chunk_size, double eps) {
    if (chunk_size < 1) throw std::invalid_argument("mocha_beta_row: chunk_size must be >= 1");
    if (alpha.size() != u.size()) throw std::invalid_argument("mocha_beta_row: length mismatch");
    check_normalized(alpha.sum(), "mocha_beta_row");
    ArrayVec eu = (u - u.maxCoeff()).exp();
    ArrayVec denom = moving_sum(eu, chunk_size - 1, 0);
    return eu * moving_sum(clamped_divide(alpha, denom, eps), 0, chunk_size - 1);
}

Value expected_context(const Value& beta, const Value& encoder_states) {
    if (encoder_states.cols() != beta.rows() || beta.cols() != 1) {
        throw std::invalid_argument("expected_context: beta length must match state count");
    }
    return matmul(encoder_states, beta);
}

}  // namespace milkstream::attention
