#include "seqmine/ops.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace seqmine {

namespace detail {

ShiftedExpSum shifted_exp_sum(const Array& e, Index lo, Index hi) {
    double m = e[lo];
    for (Index k = lo + 1; k <= hi; ++k) m = std::max(m, e[k]);
    double s = 0.0;
    for (Index k = lo; k <= hi; ++k) s += std::exp(e[k] - m);
    return {m, s};
}

Tensor make_op(const char* name, Shape shape, Array values, std::vector<Tensor> inputs,
               std::function<void(TensorNode&)> vjp) {
    if (!values.allFinite()) {
        throw ValueError(std::string(name) + " produced a non-finite result");
    }
    auto node = std::make_shared<TensorNode>();
    node->shape = std::move(shape);
    node->values = std::move(values);
    bool needs = false;
    for (const Tensor& in : inputs) needs = needs || in.node()->needs_grad;
    node->needs_grad = needs;
    if (needs) {
        node->parents.reserve(inputs.size());
        for (const Tensor& in : inputs) node->parents.push_back(in.node());
        node->vjp = std::move(vjp);
    }
    return Tensor::from_node(std::move(node));
}

void accumulate(TensorNode& parent, const Array& contribution) {
    if (!parent.needs_grad) return;
    if (parent.grad.size() != parent.values.size()) {
        parent.grad = Array::Zero(parent.values.size());
    }
    parent.grad += contribution;
}

namespace {

void check_same_shape(const char* name, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(name) + ": operand shapes differ, " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
    }
}

Tensor binary_op(const char* name, const Tensor& a, const Tensor& b, Array out,
                 std::function<void(TensorNode&)> vjp) {
    return make_op(name, a.shape(), std::move(out), {a, b}, std::move(vjp));
}

} // namespace

} // namespace detail

using detail::accumulate;
using detail::make_op;

Tensor add(const Tensor& a, const Tensor& b) {
    detail::check_same_shape("add", a, b);
    return detail::binary_op("add", a, b, a.values() + b.values(), [](detail::TensorNode& n) {
        accumulate(*n.parents[0], n.grad);
        accumulate(*n.parents[1], n.grad);
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    detail::check_same_shape("sub", a, b);
    return detail::binary_op("sub", a, b, a.values() - b.values(), [](detail::TensorNode& n) {
        accumulate(*n.parents[0], n.grad);
        accumulate(*n.parents[1], -n.grad);
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    detail::check_same_shape("mul", a, b);
    return detail::binary_op("mul", a, b, a.values() * b.values(), [](detail::TensorNode& n) {
        accumulate(*n.parents[0], n.grad * n.parents[1]->values);
        accumulate(*n.parents[1], n.grad * n.parents[0]->values);
    });
}

Tensor tanh(const Tensor& t) {
    return make_op("tanh", t.shape(), t.values().tanh(), {t}, [](detail::TensorNode& n) {
        accumulate(*n.parents[0], n.grad * (1.0 - n.values.square()));
    });
}

Tensor sigmoid(const Tensor& t) {
    // logistic via tanh keeps both saturation tails stable
    Array y = 0.5 * ((0.5 * t.values()).tanh() + 1.0);
    return make_op("sigmoid", t.shape(), std::move(y), {t}, [](detail::TensorNode& n) {
        accumulate(*n.parents[0], n.grad * n.values * (1.0 - n.values));
    });
}

Tensor exp(const Tensor& t) {
    return make_op("exp", t.shape(), t.values().exp(), {t}, [](detail::TensorNode& n) {
        accumulate(*n.parents[0], n.grad * n.values);
    });
}

Tensor log(const Tensor& t) {
    if ((t.values() <= 0.0).any()) {
        throw ValueError("log requires strictly positive inputs");
    }
    return make_op("log", t.shape(), t.values().log(), {t}, [](detail::TensorNode& n) {
        accumulate(*n.parents[0], n.grad / n.parents[0]->values);
    });
}

Tensor clamp_min(const Tensor& t, double floor) {
    Array y = t.values().max(floor);
    return make_op("clamp_min", t.shape(), std::move(y), {t}, [floor](detail::TensorNode& n) {
        Array mask = (n.parents[0]->values > floor).cast<double>();
        accumulate(*n.parents[0], n.grad * mask);
    });
}

Tensor scale(const Tensor& t, double factor) {
    if (!std::isfinite(factor)) throw ValueError("scale factor must be finite");
    return make_op("scale", t.shape(), t.values() * factor, {t}, [factor](detail::TensorNode& n) {
        accumulate(*n.parents[0], n.grad * factor);
    });
}

Tensor add_scalar(const Tensor& t, const Tensor& s) {
    if (!s.is_scalar()) {
        throw ShapeError("add_scalar: second operand must be scalar, got " + shape_str(s.shape()));
    }
    Array y = t.values() + s.scalar_value();
    return make_op("add_scalar", t.shape(), std::move(y), {t, s}, [](detail::TensorNode& n) {
        accumulate(*n.parents[0], n.grad);
        accumulate(*n.parents[1], Array::Constant(1, n.grad.sum()));
    });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        throw ShapeError("matmul requires rank-2 operands, got " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
    }
    const Index m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) {
        throw ShapeError("matmul: inner dimensions disagree, " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
    }
    Array out(m * n);
    {
        Eigen::Map<const RowMatrix> A(a.values().data(), m, k);
        Eigen::Map<const RowMatrix> B(b.values().data(), k, n);
        Eigen::Map<RowMatrix> O(out.data(), m, n);
        O.noalias() = A * B;
    }
    return make_op("matmul", {m, n}, std::move(out), {a, b}, [m, k, n](detail::TensorNode& node) {
        Eigen::Map<const RowMatrix> G(node.grad.data(), m, n);
        detail::TensorNode& pa = *node.parents[0];
        detail::TensorNode& pb = *node.parents[1];
        if (pa.needs_grad) {
            Eigen::Map<const RowMatrix> B(pb.values.data(), k, n);
            Array ga(m * k);
            Eigen::Map<RowMatrix>(ga.data(), m, k).noalias() = G * B.transpose();
            accumulate(pa, ga);
        }
        if (pb.needs_grad) {
            Eigen::Map<const RowMatrix> A(pa.values.data(), m, k);
            Array gb(k * n);
            Eigen::Map<RowMatrix>(gb.data(), k, n).noalias() = A.transpose() * G;
            accumulate(pb, gb);
        }
    });
}

Tensor matvec(const Tensor& a, const Tensor& x) {
    if (a.rank() != 2 || x.rank() != 1) {
        throw ShapeError("matvec requires [m,n] and [n] operands, got " + shape_str(a.shape()) +
                         " and " + shape_str(x.shape()));
    }
    const Index m = a.rows(), n = a.cols();
    if (x.size() != n) {
        throw ShapeError("matvec: dimensions disagree, " + shape_str(a.shape()) + " x " +
                         shape_str(x.shape()));
    }
    Array out(m);
    {
        Eigen::Map<const RowMatrix> A(a.values().data(), m, n);
        Eigen::Map<const Eigen::VectorXd> X(x.values().data(), n);
        Eigen::Map<Eigen::VectorXd> O(out.data(), m);
        O.noalias() = A * X;
    }
    return make_op("matvec", {m}, std::move(out), {a, x}, [m, n](detail::TensorNode& node) {
        Eigen::Map<const Eigen::VectorXd> G(node.grad.data(), m);
        detail::TensorNode& pa = *node.parents[0];
        detail::TensorNode& px = *node.parents[1];
        if (pa.needs_grad) {
            Eigen::Map<const Eigen::VectorXd> X(px.values.data(), n);
            Array ga(m * n);
            Eigen::Map<RowMatrix>(ga.data(), m, n).noalias() = G * X.transpose();
            accumulate(pa, ga);
        }
        if (px.needs_grad) {
            Eigen::Map<const RowMatrix> A(pa.values.data(), m, n);
            Array gx(n);
            Eigen::Map<Eigen::VectorXd>(gx.data(), n).noalias() = A.transpose() * G;
            accumulate(px, gx);
        }
    });
}

Tensor transpose(const Tensor& a) {
    if (a.rank() != 2) {
        throw ShapeError("transpose requires rank 2, got " + shape_str(a.shape()));
    }
    const Index m = a.rows(), n = a.cols();
    Array out(n * m);
    Eigen::Map<RowMatrix>(out.data(), n, m) =
        Eigen::Map<const RowMatrix>(a.values().data(), m, n).transpose();
    return make_op("transpose", {n, m}, std::move(out), {a}, [m, n](detail::TensorNode& node) {
        Array g(m * n);
        Eigen::Map<RowMatrix>(g.data(), m, n) =
            Eigen::Map<const RowMatrix>(node.grad.data(), n, m).transpose();
        accumulate(*node.parents[0], g);
    });
}

Tensor row(const Tensor& a, Index r) {
    if (a.rank() != 2) throw ShapeError("row requires rank 2, got " + shape_str(a.shape()));
    const Index m = a.rows(), n = a.cols();
    if (r < 0 || r >= m) {
        throw BoundsError("row " + std::to_string(r) + " out of range for " + shape_str(a.shape()));
    }
    Array out = a.values().segment(r * n, n);
    return make_op("row", {n}, std::move(out), {a}, [r, m, n](detail::TensorNode& node) {
        Array g = Array::Zero(m * n);
        g.segment(r * n, n) = node.grad;
        accumulate(*node.parents[0], g);
    });
}

Tensor segment(const Tensor& x, Index lo, Index len) {
    if (x.rank() != 1) throw ShapeError("segment requires rank 1, got " + shape_str(x.shape()));
    const Index n = x.size();
    if (len < 1 || lo < 0 || lo + len > n) {
        throw BoundsError("segment [" + std::to_string(lo) + "," + std::to_string(lo + len - 1) +
                          "] out of range for length " + std::to_string(n));
    }
    Array out = x.values().segment(lo, len);
    return make_op("segment", {len}, std::move(out), {x}, [lo, len, n](detail::TensorNode& node) {
        Array g = Array::Zero(n);
        g.segment(lo, len) = node.grad;
        accumulate(*node.parents[0], g);
    });
}

Tensor concat(std::span<const Tensor> parts) {
    if (parts.empty()) throw ShapeError("concat of zero parts");
    Index total = 0;
    for (const Tensor& p : parts) {
        if (p.rank() != 1) throw ShapeError("concat requires rank-1 parts, got " + shape_str(p.shape()));
        total += p.size();
    }
    Array out(total);
    Index off = 0;
    std::vector<Tensor> inputs;
    inputs.reserve(parts.size());
    std::vector<Index> lengths;
    lengths.reserve(parts.size());
    for (const Tensor& p : parts) {
        out.segment(off, p.size()) = p.values();
        off += p.size();
        inputs.push_back(p);
        lengths.push_back(p.size());
    }
    return make_op("concat", {total}, std::move(out), std::move(inputs),
                   [lengths](detail::TensorNode& node) {
                       Index off = 0;
                       for (std::size_t i = 0; i < lengths.size(); ++i) {
                           accumulate(*node.parents[i], node.grad.segment(off, lengths[i]));
                           off += lengths[i];
                       }
                   });
}

Tensor stack_rows(std::span<const Tensor> rows) {
    if (rows.empty()) throw ShapeError("stack_rows of zero rows");
    const Index n = rows.front().size();
    for (const Tensor& r : rows) {
        if (r.rank() != 1 || r.size() != n) {
            throw ShapeError("stack_rows requires equal-length rank-1 rows");
        }
    }
    const Index m = static_cast<Index>(rows.size());
    Array out(m * n);
    std::vector<Tensor> inputs;
    inputs.reserve(rows.size());
    for (Index i = 0; i < m; ++i) {
        out.segment(i * n, n) = rows[static_cast<std::size_t>(i)].values();
        inputs.push_back(rows[static_cast<std::size_t>(i)]);
    }
    return make_op("stack_rows", {m, n}, std::move(out), std::move(inputs),
                   [n](detail::TensorNode& node) {
                       for (std::size_t i = 0; i < node.parents.size(); ++i) {
                           accumulate(*node.parents[i],
                                      node.grad.segment(static_cast<Index>(i) * n, n));
                       }
                   });
}

Tensor sum(const Tensor& t) {
    Array out = Array::Constant(1, t.values().sum());
    return make_op("sum", {1}, std::move(out), {t}, [](detail::TensorNode& node) {
        accumulate(*node.parents[0],
                   Array::Constant(node.parents[0]->values.size(), node.grad[0]));
    });
}

Tensor reshape(const Tensor& t, Shape shape) {
    if (shape_size(shape) != t.size()) {
        throw ShapeError("reshape to " + shape_str(shape) + " changes element count from " +
                         std::to_string(t.size()));
    }
    for (Index e : shape) {
        if (e <= 0) throw ShapeError("reshape extents must be positive");
    }
    return make_op("reshape", std::move(shape), t.values(), {t}, [](detail::TensorNode& node) {
        accumulate(*node.parents[0], node.grad);
    });
}

Tensor softmax_slice(const Tensor& e, Index lo, Index hi) {
    if (e.rank() != 1) {
        throw ShapeError("softmax_slice requires rank 1, got " + shape_str(e.shape()));
    }
    const Index n = e.size();
    if (lo < 0 || hi < lo || hi >= n) {
        throw BoundsError("softmax_slice [" + std::to_string(lo) + "," + std::to_string(hi) +
                          "] invalid for length " + std::to_string(n));
    }
    const Index len = hi - lo + 1;
    auto [mx, denom] = detail::shifted_exp_sum(e.values(), lo, hi);
    Array out(len);
    for (Index i = 0; i < len; ++i) out[i] = std::exp(e.values()[lo + i] - mx) / denom;
    return make_op("softmax_slice", {len}, std::move(out), {e},
                   [lo, len, n](detail::TensorNode& node) {
                       const Array& y = node.values;
                       const double dot = (node.grad * y).sum();
                       Array g = Array::Zero(n);
                       g.segment(lo, len) = y * (node.grad - dot);
                       accumulate(*node.parents[0], g);
                   });
}

} // namespace seqmine
