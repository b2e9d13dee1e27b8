#include "milkstream/numerics/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "milkstream/errors.hpp"

namespace milkstream::numerics {

namespace {

void require_same_shape(const Value& a, const Value& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
    }
}

void require_vector(const Value& v, const char* op) {
    if (v.cols() != 1) throw std::invalid_argument(std::string(op) + ": expected a column vector");
    if (v.rows() == 0) throw std::invalid_argument(std::string(op) + ": empty input");
}

void require_vector(const ArrayVec& v, const char* op) {
    if (v.size() == 0) throw std::invalid_argument(std::string(op) + ": empty input");
}

bool tracked(Tape& t, const Value& a) { return t.recording() && a.node()->requires_grad; }

Value finish(Tape& t, Node* out, bool track, std::function<void()> backprop) {
    if (track) {
        out->requires_grad = true;
        out->backprop = std::move(backprop);
    }
    return Value(&t, out);
}

}  // namespace

// ----------------------------------------------------------------------
// elementwise
// ----------------------------------------------------------------------

Value add(const Value& a, const Value& b) {
    require_same_shape(a, b, "add");
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array() + b.array());
    Node *na = a.node(), *nb = b.node(), *self = out;
    return finish(t, out, tracked(t, a) || tracked(t, b), [na, nb, self] {
        if (na->requires_grad) na->grad_ref() += self->grad;
        if (nb->requires_grad) nb->grad_ref() += self->grad;
    });
}

Value sub(const Value& a, const Value& b) {
    require_same_shape(a, b, "sub");
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array() - b.array());
    Node *na = a.node(), *nb = b.node(), *self = out;
    return finish(t, out, tracked(t, a) || tracked(t, b), [na, nb, self] {
        if (na->requires_grad) na->grad_ref() += self->grad;
        if (nb->requires_grad) nb->grad_ref() -= self->grad;
    });
}

Value mul(const Value& a, const Value& b) {
    require_same_shape(a, b, "mul");
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array() * b.array());
    Node *na = a.node(), *nb = b.node(), *self = out;
    return finish(t, out, tracked(t, a) || tracked(t, b), [na, nb, self] {
        if (na->requires_grad) na->grad_ref() += self->grad * nb->value;
        if (nb->requires_grad) nb->grad_ref() += self->grad * na->value;
    });
}

Value neg(const Value& a) {
    Tape& t = *a.tape();
    Node* out = t.emplace(-a.array());
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a), [na, self] { na->grad_ref() -= self->grad; });
}

Value maximum(const Value& a, const Value& b) {
    require_same_shape(a, b, "maximum");
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array().max(b.array()));
    Node *na = a.node(), *nb = b.node(), *self = out;
    return finish(t, out, tracked(t, a) || tracked(t, b), [na, nb, self] {
        Array take_a = (na->value >= nb->value).cast<double>();
        if (na->requires_grad) na->grad_ref() += self->grad * take_a;
        if (nb->requires_grad) nb->grad_ref() += self->grad * (1.0 - take_a);
    });
}

Value add_scalar(const Value& a, double c) {
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array() + c);
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a), [na, self] { na->grad_ref() += self->grad; });
}

Value mul_scalar(const Value& a, double c) {
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array() * c);
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a), [na, self, c] { na->grad_ref() += self->grad * c; });
}

Value exp(const Value& a) {
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array().exp());
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a),
                  [na, self] { na->grad_ref() += self->grad * self->value; });
}

Value log(const Value& a) {
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array().log());
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a),
                  [na, self] { na->grad_ref() += self->grad / na->value; });
}

Value tanh(const Value& a) {
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array().tanh());
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a), [na, self] {
        na->grad_ref() += self->grad * (1.0 - self->value.square());
    });
}

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Value logistic(const Value& a) {
    Tape& t = *a.tape();
    Array v = a.array().unaryExpr([](double x) { return logistic(x); });
    Node* out = t.emplace(std::move(v));
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a), [na, self] {
        na->grad_ref() += self->grad * self->value * (1.0 - self->value);
    });
}

Value clamp(const Value& a, double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("clamp: lo must be <= hi");
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array().max(lo).min(hi));
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a), [na, self, lo, hi] {
        Array inside = ((na->value >= lo) && (na->value <= hi)).cast<double>();
        na->grad_ref() += self->grad * inside;
    });
}

Value stop_gradient(const Value& a) {
    return a.tape()->constant(a.array());
}

Value pow_scalar(const Value& a, double p) {
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array().pow(p));
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a), [na, self, p] {
        na->grad_ref() += self->grad * p * na->value.pow(p - 1.0);
    });
}

Value scale(const Value& a, const Value& s) {
    if (s.rows() != 1 || s.cols() != 1) throw std::invalid_argument("scale: s must be 1x1");
    Tape& t = *a.tape();
    Node* out = t.emplace(a.array() * s.scalar());
    Node *na = a.node(), *ns = s.node(), *self = out;
    return finish(t, out, tracked(t, a) || tracked(t, s), [na, ns, self] {
        if (na->requires_grad) na->grad_ref() += self->grad * ns->value(0, 0);
        if (ns->requires_grad) ns->grad_ref()(0, 0) += (self->grad * na->value).sum();
    });
}

// ----------------------------------------------------------------------
// reductions / linear algebra
// ----------------------------------------------------------------------

Value sum(const Value& a) {
    Tape& t = *a.tape();
    Node* out = t.emplace(Array::Constant(1, 1, a.array().sum()));
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a),
                  [na, self] { na->grad_ref() += self->grad(0, 0); });
}

Value dot(const Value& a, const Value& b) {
    require_same_shape(a, b, "dot");
    require_vector(a, "dot");
    Tape& t = *a.tape();
    Node* out = t.emplace(Array::Constant(1, 1, (a.array() * b.array()).sum()));
    Node *na = a.node(), *nb = b.node(), *self = out;
    return finish(t, out, tracked(t, a) || tracked(t, b), [na, nb, self] {
        const double g = self->grad(0, 0);
        if (na->requires_grad) na->grad_ref() += g * nb->value;
        if (nb->requires_grad) nb->grad_ref() += g * na->value;
    });
}

Value matmul(const Value& a, const Value& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
    Tape& t = *a.tape();
    Node* out = t.emplace(Array((a.array().matrix() * b.array().matrix()).array()));
    Node *na = a.node(), *nb = b.node(), *self = out;
    return finish(t, out, tracked(t, a) || tracked(t, b), [na, nb, self] {
        const auto g = self->grad.matrix();
        if (na->requires_grad) na->grad_ref().matrix() += g * nb->value.matrix().transpose();
        if (nb->requires_grad) nb->grad_ref().matrix() += na->value.matrix().transpose() * g;
    });
}

Value transpose(const Value& a) {
    Tape& t = *a.tape();
    Node* out = t.emplace(Array(a.array().transpose()));
    Node *na = a.node(), *self = out;
    return finish(t, out, tracked(t, a),
                  [na, self] { na->grad_ref() += self->grad.transpose(); });
}

Value add_colvec(const Value& m, const Value& v) {
    if (v.cols() != 1 || v.rows() != m.rows()) {
        throw std::invalid_argument("add_colvec: v must be a column vector matching m's rows");
    }
    Tape& t = *m.tape();
    Node* out = t.emplace(Array(m.array().colwise() + v.array().col(0)));
    Node *nm = m.node(), *nv = v.node(), *self = out;
    return finish(t, out, tracked(t, m) || tracked(t, v), [nm, nv, self] {
        if (nm->requires_grad) nm->grad_ref() += self->grad;
        if (nv->requires_grad) nv->grad_ref().col(0) += self->grad.rowwise().sum();
    });
}

// ----------------------------------------------------------------------
// scans
// ----------------------------------------------------------------------

ArrayVec cumulative_sum(const ArrayVec& v) {
    require_vector(v, "cumulative_sum");
    ArrayVec out(v.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = acc += v[i];
    return out;
}

ArrayVec cumulative_product(const ArrayVec& v) {
    require_vector(v, "cumulative_product");
    ArrayVec out(v.size());
    double acc = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = acc *= v[i];
    return out;
}

ArrayVec reversed_cumulative_sum(const ArrayVec& v) {
    require_vector(v, "reversed_cumulative_sum");
    ArrayVec out(v.size());
    double acc = 0.0;
    for (Eigen::Index i = v.size() - 1; i >= 0; --i) out[i] = acc += v[i];
    return out;
}

Value cumulative_sum(const Value& v) {
    require_vector(v, "cumulative_sum");
    Tape& t = *v.tape();
    Array out_a(v.rows(), 1);
    out_a.col(0) = cumulative_sum(ArrayVec(v.array().col(0)));
    Node* out = t.emplace(std::move(out_a));
    Node *nv = v.node(), *self = out;
    return finish(t, out, tracked(t, v), [nv, self] {
        nv->grad_ref().col(0) += reversed_cumulative_sum(ArrayVec(self->grad.col(0)));
    });
}

Value reversed_cumulative_sum(const Value& v) {
    require_vector(v, "reversed_cumulative_sum");
    Tape& t = *v.tape();
    Array out_a(v.rows(), 1);
    out_a.col(0) = reversed_cumulative_sum(ArrayVec(v.array().col(0)));
    Node* out = t.emplace(std::move(out_a));
    Node *nv = v.node(), *self = out;
    return finish(t, out, tracked(t, v), [nv, self] {
        nv->grad_ref().col(0) += cumulative_sum(ArrayVec(self->grad.col(0)));
    });
}

Value cumulative_product(const Value& v) {
    require_vector(v, "cumulative_product");
    Tape& t = *v.tape();
    Array out_a(v.rows(), 1);
    out_a.col(0) = cumulative_product(ArrayVec(v.array().col(0)));
    Node* out = t.emplace(std::move(out_a));
    Node *nv = v.node(), *self = out;
    // O(n^2) backward built from exclusive products; exact even with zeros
    // in v, unlike the divide-by-v shortcut.
    return finish(t, out, tracked(t, v), [nv, self] {
        const Eigen::Index n = nv->value.rows();
        const auto& val = nv->value;
        const auto& g = self->grad;
        ArrayVec d = ArrayVec::Zero(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            double partial = (k == 0) ? 1.0 : self->value(k - 1, 0);  // prod of v[0..k-1]
            d[k] += g(k, 0) * partial;
            for (Eigen::Index j = k + 1; j < n; ++j) {
                partial *= val(j, 0);
                d[k] += g(j, 0) * partial;
            }
        }
        nv->grad_ref().col(0) += d;
    });
}

ArrayVec moving_sum(const ArrayVec& v, int back, int fwd) {
    require_vector(v, "moving_sum");
    if (back < 0 || fwd < 0) throw std::invalid_argument("moving_sum: window must be nonnegative");
    const Eigen::Index n = v.size();
    ArrayVec out(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, j - back);
        const Eigen::Index hi = std::min<Eigen::Index>(n - 1, j + fwd);
        out[j] = v.segment(lo, hi - lo + 1).sum();
    }
    return out;
}

Value moving_sum(const Value& v, int back, int fwd) {
    require_vector(v, "moving_sum");
    Tape& t = *v.tape();
    Array out_a(v.rows(), 1);
    out_a.col(0) = moving_sum(ArrayVec(v.array().col(0)), back, fwd);
    Node* out = t.emplace(std::move(out_a));
    Node *nv = v.node(), *self = out;
    return finish(t, out, tracked(t, v), [nv, self, back, fwd] {
        nv->grad_ref().col(0) += moving_sum(ArrayVec(self->grad.col(0)), fwd, back);
    });
}

Value shifted(const Value& v, double fill) {
    require_vector(v, "shifted");
    Tape& t = *v.tape();
    const Eigen::Index n = v.rows();
    Array out_a(n, 1);
    out_a(0, 0) = fill;
    if (n > 1) out_a.col(0).tail(n - 1) = v.array().col(0).head(n - 1);
    Node* out = t.emplace(std::move(out_a));
    Node *nv = v.node(), *self = out;
    return finish(t, out, tracked(t, v), [nv, self, n] {
        if (n > 1) nv->grad_ref().col(0).head(n - 1) += self->grad.col(0).tail(n - 1);
    });
}

// ----------------------------------------------------------------------
// stabilized pieces
// ----------------------------------------------------------------------

ArrayVec clamped_divide(const ArrayVec& num, const ArrayVec& den, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("clamped_divide: eps must be positive");
    if (num.size() != den.size()) throw std::invalid_argument("clamped_divide: shape mismatch");
    return num / den.max(eps);
}

Value clamped_divide(const Value& num, const Value& den, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("clamped_divide: eps must be positive");
    require_same_shape(num, den, "clamped_divide");
    Tape& t = *num.tape();
    Array d = den.array().max(eps);
    Node* out = t.emplace(num.array() / d);
    Node *nn = num.node(), *nd = den.node(), *self = out;
    return finish(t, out, tracked(t, num) || tracked(t, den), [nn, nd, self, eps] {
        Array d2 = nd->value.max(eps);
        if (nn->requires_grad) nn->grad_ref() += self->grad / d2;
        if (nd->requires_grad) {
            // Clamp is flat below eps: no gradient flows to den there.
            Array active = (nd->value >= eps).cast<double>();
            nd->grad_ref() -= self->grad * active * nn->value / d2.square();
        }
    });
}

ArrayVec masked_softmax(const ArrayVec& e, Eigen::Index valid_len) {
    require_vector(e, "masked_softmax");
    if (valid_len < 1 || valid_len > e.size()) {
        throw std::invalid_argument("masked_softmax: valid_len out of range");
    }
    ArrayVec out = ArrayVec::Zero(e.size());
    const double m = e.head(valid_len).maxCoeff();
    ArrayVec w = (e.head(valid_len) - m).exp();
    out.head(valid_len) = w / w.sum();
    return out;
}

Value masked_softmax(const Value& e, Eigen::Index valid_len) {
    require_vector(e, "masked_softmax");
    if (valid_len < 1 || valid_len > e.rows()) {
        throw std::invalid_argument("masked_softmax: valid_len out of range");
    }
    Tape& t = *e.tape();
    Array out_a = Array::Zero(e.rows(), 1);
    out_a.col(0) = masked_softmax(ArrayVec(e.array().col(0)), valid_len);
    Node* out = t.emplace(std::move(out_a));
    Node *ne = e.node(), *self = out;
    return finish(t, out, tracked(t, e), [ne, self, valid_len] {
        auto p = self->value.col(0).head(valid_len);
        auto g = self->grad.col(0).head(valid_len);
        const double inner = (g * p).sum();
        ne->grad_ref().col(0).head(valid_len) += p * (g - inner);
    });
}

Value log_softmax(const Value& v) {
    require_vector(v, "log_softmax");
    Tape& t = *v.tape();
    const auto col = v.array().col(0);
    const double m = col.maxCoeff();
    const double lse = m + std::log((col - m).exp().sum());
    Node* out = t.emplace(Array(col - lse));
    Node *nv = v.node(), *self = out;
    return finish(t, out, tracked(t, v), [nv, self] {
        const double gsum = self->grad.sum();
        nv->grad_ref() += self->grad - self->value.exp() * gsum;
    });
}

// ----------------------------------------------------------------------
// structural
// ----------------------------------------------------------------------

Value vconcat(const Value& a, const Value& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("vconcat: column mismatch");
    Tape& t = *a.tape();
    Array out_a(a.rows() + b.rows(), a.cols());
    out_a.topRows(a.rows()) = a.array();
    out_a.bottomRows(b.rows()) = b.array();
    Node* out = t.emplace(std::move(out_a));
    Node *na = a.node(), *nb = b.node(), *self = out;
    const Eigen::Index ra = a.rows(), rb = b.rows();
    return finish(t, out, tracked(t, a) || tracked(t, b), [na, nb, self, ra, rb] {
        if (na->requires_grad) na->grad_ref() += self->grad.topRows(ra);
        if (nb->requires_grad) nb->grad_ref() += self->grad.bottomRows(rb);
    });
}

Value hconcat(const std::vector<Value>& cols) {
    if (cols.empty()) throw std::invalid_argument("hconcat: empty input");
    Tape& t = *cols.front().tape();
    const Eigen::Index d = cols.front().rows();
    Array out_a(d, static_cast<Eigen::Index>(cols.size()));
    bool track = false;
    std::vector<Node*> parents(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i].rows() != d || cols[i].cols() != 1) {
            throw std::invalid_argument("hconcat: all inputs must be d x 1");
        }
        out_a.col(static_cast<Eigen::Index>(i)) = cols[i].array().col(0);
        parents[i] = cols[i].node();
        track = track || tracked(t, cols[i]);
    }
    Node* out = t.emplace(std::move(out_a));
    Node* self = out;
    return finish(t, out, track, [parents, self] {
        for (std::size_t i = 0; i < parents.size(); ++i) {
            if (parents[i]->requires_grad) {
                parents[i]->grad_ref().col(0) += self->grad.col(static_cast<Eigen::Index>(i));
            }
        }
    });
}

Value stack_scalars(const std::vector<Value>& xs) {
    if (xs.empty()) throw std::invalid_argument("stack_scalars: empty input");
    Tape& t = *xs.front().tape();
    Array out_a(static_cast<Eigen::Index>(xs.size()), 1);
    bool track = false;
    std::vector<Node*> parents(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i].rows() != 1 || xs[i].cols() != 1) {
            throw std::invalid_argument("stack_scalars: all inputs must be scalars");
        }
        out_a(static_cast<Eigen::Index>(i), 0) = xs[i].scalar();
        parents[i] = xs[i].node();
        track = track || tracked(t, xs[i]);
    }
    Node* out = t.emplace(std::move(out_a));
    Node* self = out;
    return finish(t, out, track, [parents, self] {
        for (std::size_t i = 0; i < parents.size(); ++i) {
            if (parents[i]->requires_grad) {
                parents[i]->grad_ref()(0, 0) += self->grad(static_cast<Eigen::Index>(i), 0);
            }
        }
    });
}

Value column(const Value& m, Eigen::Index j) {
    if (j < 0 || j >= m.cols()) throw std::invalid_argument("column: index out of range");
    Tape& t = *m.tape();
    Node* out = t.emplace(Array(m.array().col(j)));
    Node *nm = m.node(), *self = out;
    return finish(t, out, tracked(t, m),
                  [nm, self, j] { nm->grad_ref().col(j) += self->grad.col(0); });
}

Value add_at_index(const Value& v, Eigen::Index idx, const Value& s) {
    require_vector(v, "add_at_index");
    if (idx < 0 || idx >= v.rows()) throw std::invalid_argument("add_at_index: index out of range");
    if (s.rows() != 1 || s.cols() != 1) throw std::invalid_argument("add_at_index: s must be scalar");
    Tape& t = *v.tape();
    Array out_a = v.array();
    out_a(idx, 0) += s.scalar();
    Node* out = t.emplace(std::move(out_a));
    Node *nv = v.node(), *ns = s.node(), *self = out;
    return finish(t, out, tracked(t, v) || tracked(t, s), [nv, ns, self, idx] {
        if (nv->requires_grad) nv->grad_ref() += self->grad;
        if (ns->requires_grad) ns->grad_ref()(0, 0) += self->grad(idx, 0);
    });
}

// ----------------------------------------------------------------------
// noise
// ----------------------------------------------------------------------

double gaussian_noise(SeededRng& rng, double stddev) {
    if (stddev < 0.0) throw std::invalid_argument("gaussian_noise: stddev must be >= 0");
    return rng.gaussian(stddev);
}

ArrayVec gaussian_noise_vector(SeededRng& rng, Eigen::Index n, double stddev) {
    if (stddev < 0.0) throw std::invalid_argument("gaussian_noise_vector: stddev must be >= 0");
    ArrayVec out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = rng.gaussian(stddev);
    return out;
}

}  // namespace milkstream::numerics
