#include "milkstream/attention/energies.hpp"

#include <stdexcept>

#include "milkstream/constants.hpp"

namespace milkstream::attention {

using namespace numerics;

namespace {

// tanh(W_s s + W_h H + b) for H with one state per column.
Value energy_core(const Value& s, const Value& h, const Value& w_s, const Value& w_h,
                  const Value& b) {
    Value proj = matmul(w_h, h);
    Value bias = add(matmul(w_s, s), b);
    return tanh(add_colvec(proj, bias));
}

Value normalized_projection(const MonotonicEnergyParams& p) {
    Value norm_sq = dot(p.v_raw, p.v_raw);
    Value inv_norm = pow_scalar(add_scalar(norm_sq, 1e-30), -0.5);
    return scale(p.v_raw, inv_norm);
}

}  // namespace

Value soft_energy(const Value& decoder_state, const Value& encoder_state,
                  const AdditiveEnergyParams& p) {
    return dot(p.v, energy_core(decoder_state, encoder_state, p.w_s, p.w_h, p.b));
}

Value soft_energy_row(const Value& decoder_state, const Value& encoder_states,
                      const AdditiveEnergyParams& p) {
    Value core = energy_core(decoder_state, encoder_states, p.w_s, p.w_h, p.b);
    return transpose(matmul(transpose(p.v), core));
}

Value monotonic_energy(const Value& decoder_state, const Value& encoder_state,
                       const MonotonicEnergyParams& p) {
    Value vn = normalized_projection(p);
    Value raw = dot(vn, energy_core(decoder_state, encoder_state, p.w_s, p.w_h, p.b));
    return add(scale(raw, p.gain), p.r);
}

Value monotonic_energy_row(const Value& decoder_state, const Value& encoder_states,
                           const MonotonicEnergyParams& p) {
    Value vn = normalized_projection(p);
    Value core = energy_core(decoder_state, encoder_states, p.w_s, p.w_h, p.b);
    Value raw = transpose(matmul(transpose(vn), core));
    return add_colvec(scale(raw, p.gain), p.r);
}

EnergyPair EnergyPair::padded(const Eigen::ArrayXXd& monotonic_rows,
                              const Eigen::ArrayXXd& soft_rows, Eigen::Index width) {
    if (monotonic_rows.rows() != soft_rows.rows() || monotonic_rows.cols() != soft_rows.cols()) {
        throw std::invalid_argument("EnergyPair: monotonic and soft energies must agree in shape");
    }
    if (width < monotonic_rows.cols()) {
        throw std::invalid_argument("EnergyPair: width smaller than energy rows");
    }
    EnergyPair out;
    out.valid_len = monotonic_rows.cols();
    out.monotonic = Eigen::ArrayXXd::Constant(monotonic_rows.rows(), width, kNegInf);
    out.soft = Eigen::ArrayXXd::Constant(soft_rows.rows(), width, kNegInf);
    out.monotonic.leftCols(out.valid_len) = monotonic_rows;
    out.soft.leftCols(out.valid_len) = soft_rows;
    return out;
}

}  // namespace milkstream::attention
