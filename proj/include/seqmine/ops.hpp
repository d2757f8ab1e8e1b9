#ifndef SEQMINE_OPS_HPP
#define SEQMINE_OPS_HPP

#include <span>

#include "seqmine/tensor.hpp"

namespace seqmine {

// Elementwise arithmetic on same-shape tensors.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

// Pointwise nonlinearities.
Tensor tanh(const Tensor& t);
Tensor sigmoid(const Tensor& t);
Tensor exp(const Tensor& t);
Tensor log(const Tensor& t);  // strictly positive inputs

/// Elementwise max(t, floor); gradient passes only where t > floor.
Tensor clamp_min(const Tensor& t, double floor);

/// Multiply by a compile-time constant (not a tracked tensor).
Tensor scale(const Tensor& t, double factor);

/// Broadcast-add a scalar tensor to every element.
Tensor add_scalar(const Tensor& t, const Tensor& s);

Tensor matmul(const Tensor& a, const Tensor& b);       // [m,k] x [k,n] -> [m,n]
Tensor matvec(const Tensor& a, const Tensor& x);       // [m,n] x [n]   -> [m]
Tensor transpose(const Tensor& a);                     // [m,n] -> [n,m]

Tensor row(const Tensor& a, Index r);                  // [m,n] -> [n]
Tensor segment(const Tensor& x, Index lo, Index len);  // [n] -> [len]
Tensor concat(std::span<const Tensor> parts);          // 1-D parts -> 1-D
Tensor stack_rows(std::span<const Tensor> rows);       // R vectors [n] -> [R,n]

Tensor sum(const Tensor& t);                           // -> scalar [1]
Tensor reshape(const Tensor& t, Shape shape);          // same size, same data

/// Max-shifted softmax over the inclusive slice [lo, hi] of a vector:
/// exp(e_i - max) / sum_j exp(e_j - max). Output length hi - lo + 1,
/// entries sum to 1 within 1e-12.
Tensor softmax_slice(const Tensor& e, Index lo, Index hi);

namespace detail {

/// Shared numeric kernel of the sliced softmax: max and shifted-exp sum
/// over the inclusive index range [lo, hi].
struct ShiftedExpSum {
    double max;
    double sum;  // sum of exp(e_k - max), k in [lo, hi]
};
ShiftedExpSum shifted_exp_sum(const Array& e, Index lo, Index hi);

/// Assemble an op output node. Parents and the vjp closure are recorded
/// only when some input lies on a gradient path; pure evaluations stay off
/// the tape. The result payload must be finite or ValueError is thrown.
Tensor make_op(const char* name, Shape shape, Array values, std::vector<Tensor> inputs,
               std::function<void(TensorNode&)> vjp);

/// Accumulate a gradient contribution into a parent node (+= semantics,
/// allocating a zero buffer on first touch). No-op for value-only parents.
void accumulate(TensorNode& parent, const Array& contribution);

} // namespace detail

} // namespace seqmine

#endif
