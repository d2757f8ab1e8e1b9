#ifndef SEQMINE_GRAPH_HPP
#define SEQMINE_GRAPH_HPP

#include <memory>
#include <vector>

#include "seqmine/tensor.hpp"

namespace seqmine {

/// Ordered record of the differentiable operations reachable from a root
/// tensor. Construction traces the tape into topological order (inputs
/// before the ops that consume them); backward() walks it once in reverse,
/// accumulating gradients with +=, then releases the recorded closures so
/// the graph cannot be replayed.
class Graph {
public:
    explicit Graph(const Tensor& root);

    std::size_t size() const { return order_.size(); }

    /// Nodes in topological order; the root is last.
    const std::vector<std::shared_ptr<detail::TensorNode>>& nodes() const { return order_; }

    /// Fills grad on every requires_grad tensor reachable from the root.
    /// The root must be scalar. A graph can be run exactly once.
    void backward();

    bool consumed() const { return consumed_; }

private:
    std::shared_ptr<detail::TensorNode> root_;
    std::vector<std::shared_ptr<detail::TensorNode>> order_;
    bool consumed_ = false;
};

/// Convenience wrapper: trace from loss and run the backward pass.
void backward(const Tensor& loss);

} // namespace seqmine

#endif
