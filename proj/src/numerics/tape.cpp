#include "milkstream/numerics/tape.hpp"

#include <stdexcept>

namespace milkstream::numerics {

double Value::scalar() const {
    if (rows() != 1 || cols() != 1) {
        throw std::invalid_argument("Value::scalar: value is not 1x1");
    }
    return node_->value(0, 0);
}

Value Tape::leaf(Array v) {
    Node* n = emplace(std::move(v));
    n->requires_grad = recording_;
    return Value(this, n);
}

Value Tape::constant(Array v) {
    Node* n = emplace(std::move(v));
    return Value(this, n);
}

Value Tape::vector(const ArrayVec& v) {
    Array a(v.size(), 1);
    a.col(0) = v;
    return constant(std::move(a));
}

void Tape::backward(const Value& root) {
    if (root.rows() != 1 || root.cols() != 1) {
        throw std::invalid_argument("Tape::backward: root must be a scalar");
    }
    root.node()->grad_ref()(0, 0) = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        if (it->backprop && it->grad.size() != 0) it->backprop();
    }
}

Array Tape::grad(const Value& v) const {
    Node* n = v.node();
    if (n->grad.size() == 0) return Array::Zero(v.rows(), v.cols());
    return n->grad;
}

}  // namespace milkstream::numerics
