#include "seqmine/tensor.hpp"

#include <atomic>
#include <sstream>

namespace seqmine {

namespace {

std::atomic<std::uint64_t> g_next_node_id{1};

} // namespace

Index shape_size(const Shape& shape) {
    Index n = 1;
    for (Index e : shape) n *= e;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(Shape shape, Array values, bool requires_grad) {
    if (shape.empty()) throw ShapeError("tensor shape must have at least one extent");
    for (Index e : shape) {
        if (e <= 0) throw ShapeError("tensor extents must be positive, got " + shape_str(shape));
    }
    if (shape_size(shape) != values.size()) {
        throw ShapeError("shape " + shape_str(shape) + " does not match payload length " +
                         std::to_string(values.size()));
    }
    if (!values.allFinite()) throw ValueError("tensor payload contains NaN or Inf");
    node_ = std::make_shared<detail::TensorNode>();
    node_->shape = std::move(shape);
    node_->values = std::move(values);
    node_->requires_grad = requires_grad;
    node_->needs_grad = requires_grad;
    node_->id = g_next_node_id.fetch_add(1, std::memory_order_relaxed);
}

Tensor::Tensor(Shape shape, const std::vector<double>& values, bool requires_grad)
    : Tensor(std::move(shape),
             Eigen::Map<const Array>(values.data(), static_cast<Index>(values.size())),
             requires_grad) {}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    const Index n = shape_size(shape);
    return Tensor(std::move(shape), Array::Zero(n), requires_grad);
}

Tensor Tensor::ones(Shape shape) {
    const Index n = shape_size(shape);
    return Tensor(std::move(shape), Array::Ones(n));
}

Tensor Tensor::constant(Shape shape, double value) {
    const Index n = shape_size(shape);
    return Tensor(std::move(shape), Array::Constant(n, value));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return Tensor(Shape{1}, Array::Constant(1, value), requires_grad);
}

void Tensor::ensure_defined() const {
    if (!node_) throw ValueError("use of an empty tensor handle");
}

const Shape& Tensor::shape() const {
    ensure_defined();
    return node_->shape;
}

Index Tensor::rank() const { return static_cast<Index>(shape().size()); }

Index Tensor::size() const {
    ensure_defined();
    return node_->values.size();
}

Index Tensor::extent(Index axis) const {
    const Shape& s = shape();
    if (axis < 0 || axis >= static_cast<Index>(s.size())) {
        throw BoundsError("axis " + std::to_string(axis) + " out of range for " + shape_str(s));
    }
    return s[static_cast<std::size_t>(axis)];
}

Index Tensor::rows() const {
    if (rank() != 2) throw ShapeError("rows() requires rank 2, tensor is " + shape_str(shape()));
    return shape()[0];
}

Index Tensor::cols() const {
    if (rank() != 2) throw ShapeError("cols() requires rank 2, tensor is " + shape_str(shape()));
    return shape()[1];
}

const Array& Tensor::values() const {
    ensure_defined();
    return node_->values;
}

double Tensor::at(Index i) const {
    if (i < 0 || i >= size()) {
        throw BoundsError("index " + std::to_string(i) + " out of range for size " +
                          std::to_string(size()));
    }
    return node_->values[i];
}

double Tensor::at(Index r, Index c) const {
    if (rank() != 2) throw ShapeError("two-index access requires rank 2");
    if (r < 0 || r >= rows() || c < 0 || c >= cols()) {
        throw BoundsError("index (" + std::to_string(r) + "," + std::to_string(c) +
                          ") out of range for " + shape_str(shape()));
    }
    return node_->values[r * cols() + c];
}

double Tensor::scalar_value() const {
    if (size() != 1) throw ShapeError("scalar_value() on tensor of shape " + shape_str(shape()));
    return node_->values[0];
}

Array& Tensor::mutable_values() {
    ensure_defined();
    if (node_->is_op() || !node_->parents.empty()) {
        throw GraphError("op outputs are immutable; only leaf tensors may be mutated");
    }
    return node_->values;
}

bool Tensor::requires_grad() const {
    ensure_defined();
    return node_->requires_grad;
}

bool Tensor::has_grad() const {
    ensure_defined();
    return node_->grad.size() == node_->values.size() && node_->values.size() > 0;
}

const Array& Tensor::grad() const {
    ensure_defined();
    if (!has_grad()) throw GraphError("gradient not populated; run backward first");
    return node_->grad;
}

void Tensor::zero_grad() {
    ensure_defined();
    node_->grad = Array::Zero(node_->values.size());
}

bool Tensor::is_leaf() const {
    ensure_defined();
    return node_->parents.empty() && !node_->is_op();
}

std::uint64_t Tensor::node_id() const {
    ensure_defined();
    return node_->id;
}

Tensor Tensor::detach() const {
    ensure_defined();
    return Tensor(node_->shape, node_->values, false);
}

Tensor Tensor::from_node(std::shared_ptr<detail::TensorNode> node) {
    node->id = g_next_node_id.fetch_add(1, std::memory_order_relaxed);
    Tensor t;
    t.node_ = std::move(node);
    return t;
}

} // namespace seqmine
