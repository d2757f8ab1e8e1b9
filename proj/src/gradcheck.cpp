#include "seqmine/gradcheck.hpp"

#include <cmath>

#include "seqmine/graph.hpp"

namespace seqmine {

std::vector<Array> finite_diff_grad(const std::function<double()>& f,
                                    const std::vector<Tensor>& params, double eps) {
    if (!(eps > 0.0)) throw ValueError("finite_diff_grad requires eps > 0");
    std::vector<Array> grads;
    grads.reserve(params.size());
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor t = params[p];
        Array& v = t.mutable_values();
        Array g(v.size());
        for (Index i = 0; i < v.size(); ++i) {
            const double saved = v[i];
            v[i] = saved + eps;
            const double up = f();
            v[i] = saved - eps;
            const double down = f();
            v[i] = saved;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw ValueError("finite_diff_grad: non-finite evaluation at tensor " +
                                 std::to_string(p) + ", coordinate " + std::to_string(i));
            }
            g[i] = (up - down) / (2.0 * eps);
        }
        grads.push_back(std::move(g));
    }
    return grads;
}

GradCheckReport compare_gradients(const std::function<Tensor()>& loss_fn,
                                  const std::vector<std::pair<std::string, Tensor>>& params,
                                  double eps) {
    for (auto& [name, t] : params) {
        Tensor copy = t;
        copy.zero_grad();
    }
    Tensor loss = loss_fn();
    Graph graph(loss);
    graph.backward();

    std::vector<Array> analytic;
    analytic.reserve(params.size());
    std::vector<Tensor> tensors;
    tensors.reserve(params.size());
    for (const auto& [name, t] : params) {
        analytic.push_back(t.has_grad() ? t.grad() : Array::Zero(t.size()));
        tensors.push_back(t);
    }

    const auto eval = [&]() { return loss_fn().scalar_value(); };
    const std::vector<Array> numeric = finite_diff_grad(eval, tensors, eps);

    GradCheckReport report;
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (Index i = 0; i < analytic[p].size(); ++i) {
            const double a = analytic[p][i];
            const double n = numeric[p][i];
            const double rel = std::abs(a - n) / std::max(1.0, std::abs(a));
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst = params[p].first + "[" + std::to_string(i) +
                               "] analytic=" + std::to_string(a) + " numeric=" + std::to_string(n);
            }
        }
    }
    return report;
}

} // namespace seqmine
