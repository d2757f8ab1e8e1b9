#ifndef SEQMINE_TENSOR_HPP
#define SEQMINE_TENSOR_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "seqmine/errors.hpp"

namespace seqmine {

using Index = Eigen::Index;

/// Flat storage for tensor payloads, row-major order.
using Array = Eigen::ArrayXd;

/// Dense row-major matrix; all rank-2 math maps tensor storage onto this.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Shape = std::vector<Index>;

Index shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

/// One node of the dynamic tape. Leaves (parameters, inputs) have no
/// parents and no vjp; op outputs carry both until a backward pass
/// releases them.
struct TensorNode {
    Shape shape;
    Array values;
    Array grad;                  // allocated lazily, same length as values
    bool requires_grad = false;  // leaf marker: keep grad after backward
    bool needs_grad = false;     // lies on a path from a requires_grad leaf
    bool consumed = false;       // op record already released by backward
    std::uint64_t id = 0;        // creation order, for tape diagnostics
    std::vector<std::shared_ptr<TensorNode>> parents;
    std::function<void(TensorNode&)> vjp;  // scatter this->grad into parents

    bool is_op() const { return static_cast<bool>(vjp) || consumed; }
};

} // namespace detail

/// Dense tensor of 64-bit floats with an optional gradient record.
///
/// A Tensor is a cheap shared handle onto a tape node. Leaves may have
/// requires_grad set and their values mutated between passes (optimizer
/// steps, finite differences); op outputs are immutable snapshots tied to
/// the graph that produced them. All stored values are finite; NaN/Inf is
/// rejected at construction and surfaced as errors from ops.
class Tensor {
public:
    Tensor() = default;

    Tensor(Shape shape, Array values, bool requires_grad = false);
    Tensor(Shape shape, const std::vector<double>& values, bool requires_grad = false);

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor ones(Shape shape);
    static Tensor constant(Shape shape, double value);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }

    const Shape& shape() const;
    Index rank() const;
    Index size() const;
    Index extent(Index axis) const;
    /// Rank-2 accessors.
    Index rows() const;
    Index cols() const;
    bool is_scalar() const { return size() == 1; }

    const Array& values() const;
    double at(Index i) const;
    double at(Index r, Index c) const;
    double scalar_value() const;

    /// Mutable access to a leaf's payload. Throws GraphError on op outputs
    /// and ValueError if the caller leaves non-finite values behind is not
    /// checked here; optimizer code validates after updating.
    Array& mutable_values();

    bool requires_grad() const;
    bool has_grad() const;
    const Array& grad() const;
    void zero_grad();

    bool is_leaf() const;
    std::uint64_t node_id() const;

    /// Detached copy of the values: a fresh leaf with no graph attachment.
    Tensor detach() const;

    const std::shared_ptr<detail::TensorNode>& node() const { return node_; }
    static Tensor from_node(std::shared_ptr<detail::TensorNode> node);

private:
    std::shared_ptr<detail::TensorNode> node_;

    void ensure_defined() const;
};

} // namespace seqmine

#endif
