#include "milkstream/numerics/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

#include "milkstream/errors.hpp"

namespace milkstream::numerics {

ArrayVec finite_difference_gradient(const std::function<double(const ArrayVec&)>& f,
                                    const ArrayVec& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_difference_gradient: h must be positive");
    ArrayVec grad(x.size());
    ArrayVec probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw NumericError("finite_difference_gradient: non-finite objective at coordinate " +
                               std::to_string(i));
        }
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

double max_relative_error(const ArrayVec& a, const ArrayVec& b, double abs_floor) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("max_relative_error: size mismatch");
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double denom = std::max({std::abs(a[i]), std::abs(b[i]), abs_floor});
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

}  // namespace milkstream::numerics
