#ifndef MILKSTREAM_NUMERICS_GRADCHECK_HPP
#define MILKSTREAM_NUMERICS_GRADCHECK_HPP

#include <functional>

#include "milkstream/numerics/tape.hpp"

namespace milkstream::numerics {

// Central-difference gradient: (f(x + h e_i) - f(x - h e_i)) / 2h per
// coordinate. f must be pure and deterministic; a non-finite f output raises
// NumericError. This is the independent oracle for every differentiability
// claim in the repo and must never call into the tape.
ArrayVec finite_difference_gradient(const std::function<double(const ArrayVec&)>& f,
                                    const ArrayVec& x, double h);

// max over i of |a_i - b_i| / max(|a_i|, |b_i|, abs_floor); the comparison
// used by gradient-check tests.
double max_relative_error(const ArrayVec& a, const ArrayVec& b, double abs_floor = 1e-7);

}  // namespace milkstream::numerics

#endif
