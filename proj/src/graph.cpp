#include "seqmine/graph.hpp"

#include <unordered_set>

namespace seqmine {

Graph::Graph(const Tensor& root) {
    if (!root.defined()) throw ValueError("cannot trace an empty tensor handle");
    root_ = root.node();
    if (root_->consumed) throw GraphError("graph already consumed by a previous backward pass");

    // Iterative post-order DFS over parents. Parents that carry no gradient
    // path are plain value leaves and are skipped; detached subtrees never
    // made it onto the tape in the first place.
    std::unordered_set<const detail::TensorNode*> visited;
    struct Frame {
        std::shared_ptr<detail::TensorNode> node;
        std::size_t next_parent;
    };
    std::vector<Frame> stack;

    auto push = [&](const std::shared_ptr<detail::TensorNode>& n) {
        if (visited.insert(n.get()).second) {
            if (n->consumed) {
                throw GraphError("graph already consumed by a previous backward pass");
            }
            stack.push_back({n, 0});
        }
    };

    push(root_);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_parent < f.node->parents.size()) {
            const auto& p = f.node->parents[f.next_parent++];
            if (p->needs_grad) push(p);
        } else {
            // post-order: parents emitted before this node
            order_.push_back(std::move(f.node));
            stack.pop_back();
        }
    }
}

void Graph::backward() {
    if (consumed_) throw GraphError("graph already consumed by a previous backward pass");
    if (root_->values.size() != 1) {
        throw GraphError("backward requires a scalar loss, got shape " + shape_str(root_->shape));
    }
    consumed_ = true;

    for (const auto& n : order_) {
        n->grad = Array::Zero(n->values.size());
    }
    root_->grad[0] = 1.0;

    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
        detail::TensorNode& n = **it;
        if (n.vjp) n.vjp(n);
    }

    // Release the tape: drop closures and parent links, keep gradients only
    // on requires_grad leaves.
    for (const auto& n : order_) {
        if (n->vjp) {
            n->vjp = nullptr;
            n->consumed = true;
        }
        n->parents.clear();
        if (!n->requires_grad) n->grad.resize(0);
    }
}

void backward(const Tensor& loss) {
    Graph g(loss);
    g.backward();
}

} // namespace seqmine
