#ifndef MILKSTREAM_NUMERICS_TAPE_HPP
#define MILKSTREAM_NUMERICS_TAPE_HPP

#include <Eigen/Dense>
#include <deque>
#include <functional>

namespace milkstream::numerics {

// All differentiable state is a dense double array. Vectors are n x 1,
// scalars 1 x 1.
using Array = Eigen::ArrayXXd;
using ArrayVec = Eigen::ArrayXd;

class Tape;

// One value in the computation graph: data, same-shape gradient, and the
// backward rule pulling this node's gradient into its parents.
struct Node {
    Array value;
    Array grad;  // empty until first accumulation
    std::function<void()> backprop;
    bool requires_grad = false;

    Array& grad_ref() {
        if (grad.size() == 0) grad = Array::Zero(value.rows(), value.cols());
        return grad;
    }
};

// Lightweight handle; nodes are owned by the tape and have stable addresses.
class Value {
public:
    Value() = default;
    Value(Tape* tape, Node* node) : tape_(tape), node_(node) {}

    const Array& array() const { return node_->value; }
    double scalar() const;
    Eigen::Index rows() const { return node_->value.rows(); }
    Eigen::Index cols() const { return node_->value.cols(); }

    Tape* tape() const { return tape_; }
    Node* node() const { return node_; }
    bool valid() const { return node_ != nullptr; }

private:
    Tape* tape_ = nullptr;
    Node* node_ = nullptr;
};

// Records nodes in construction order; backward() replays the tape in
// reverse, which is a valid topological order because ops only reference
// already-built nodes. Single-threaded per tape.
class Tape {
public:
    explicit Tape(bool recording = true) : recording_(recording) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Gradient-tracked input (model parameters, checked inputs).
    Value leaf(Array v);
    // Gradient-free value.
    Value constant(Array v);
    Value scalar(double x) { return constant(Array::Constant(1, 1, x)); }
    Value vector(const ArrayVec& v);

    // Seeds root (must be 1x1) with gradient 1 and runs every backward rule
    // in reverse construction order.
    void backward(const Value& root);

    // Gradient of a node after backward(); zero array if it was never
    // reached.
    Array grad(const Value& v) const;

    bool recording() const { return recording_; }
    void set_recording(bool r) { recording_ = r; }
    std::size_t size() const { return nodes_.size(); }

    Node* emplace(Array&& value) {
        nodes_.emplace_back();
        nodes_.back().value = std::move(value);
        return &nodes_.back();
    }

private:
    std::deque<Node> nodes_;
    bool recording_;
};

}  // namespace milkstream::numerics

#endif
