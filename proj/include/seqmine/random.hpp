#ifndef SEQMINE_RANDOM_HPP
#define SEQMINE_RANDOM_HPP

#include <random>

#include "seqmine/tensor.hpp"

namespace seqmine {

/// Leaf tensor with i.i.d. uniform(lo, hi) entries drawn from the given
/// engine, in row-major coordinate order.
inline Tensor uniform_tensor(Shape shape, double lo, double hi, std::mt19937_64& rng,
                             bool requires_grad = true) {
    const Index n = shape_size(shape);
    std::uniform_real_distribution<double> dist(lo, hi);
    Array values(n);
    for (Index i = 0; i < n; ++i) values[i] = dist(rng);
    return Tensor(std::move(shape), std::move(values), requires_grad);
}

/// Serializes a mersenne twister state to text (space-separated words).
std::string rng_state_to_string(const std::mt19937_64& rng);
std::mt19937_64 rng_state_from_string(const std::string& text);

} // namespace seqmine

#endif
