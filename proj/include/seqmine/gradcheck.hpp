#ifndef SEQMINE_GRADCHECK_HPP
#define SEQMINE_GRADCHECK_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "seqmine/tensor.hpp"

namespace seqmine {

/// Central-difference gradient of a deterministic scalar function with
/// respect to every coordinate of every listed leaf tensor:
/// (f(theta + eps e_i) - f(theta - eps e_i)) / (2 eps).
///
/// f is evaluated with the tensors mutated in place; their original values
/// are restored exactly. Non-finite evaluations are reported with the
/// offending tensor and coordinate.
std::vector<Array> finite_diff_grad(const std::function<double()>& f,
                                    const std::vector<Tensor>& params, double eps);

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst;  // "name[i] analytic=.. numeric=.." for the worst coordinate

    bool passed(double tol) const { return max_rel_err <= tol; }
};

/// Compares reverse-mode gradients against the finite-difference oracle.
/// loss_fn must rebuild the forward graph on every call; relative error
/// uses denominator max(1, |analytic|).
GradCheckReport compare_gradients(const std::function<Tensor()>& loss_fn,
                                  const std::vector<std::pair<std::string, Tensor>>& params,
                                  double eps);

} // namespace seqmine

#endif
