#ifndef SEQMINE_LSTM_HPP
#define SEQMINE_LSTM_HPP

#include <random>
#include <utility>

#include "seqmine/tensor.hpp"

namespace seqmine {

/// Parameters of one LSTM direction. The stacked gate order along the 4h
/// axis is fixed: input, forget, cell-candidate, output.
struct LstmParams {
    Tensor input_weights;      // [4h, d]
    Tensor recurrent_weights;  // [4h, h]
    Tensor bias;               // [4h]

    Index hidden_size() const { return recurrent_weights.cols(); }
    Index input_size() const { return input_weights.cols(); }

    /// uniform(-1/sqrt(h), 1/sqrt(h)) initialization, draws in field order.
    static LstmParams init(Index input_size, Index hidden_size, std::mt19937_64& rng);

    void validate() const;
};

struct BiLstmParams {
    LstmParams forward;
    LstmParams backward;

    Index hidden_size() const { return forward.hidden_size(); }
    Index input_size() const { return forward.input_size(); }

    static BiLstmParams init(Index input_size, Index hidden_size, std::mt19937_64& rng);

    void validate() const;
};

/// Encoder output: row t holds the forward state in columns [0, h) and the
/// backward state in columns [h, 2h).
struct HiddenSequence {
    Tensor values;  // [T, 2h]
    Index hidden_size = 0;

    Index length() const { return values.rows(); }
    Index width() const { return values.cols(); }  // 2h
};

/// One cell update: gates from the affine map of (x_t, h_prev), then
/// c_t = f (*) c_prev + i (*) g and h_t = o (*) tanh(c_t).
std::pair<Tensor, Tensor> lstm_cell_step(const Tensor& x_t, const Tensor& h_prev,
                                         const Tensor& c_prev, const LstmParams& p);

/// Bidirectional encoding of X[T, d] with zero initial states. The forward
/// direction scans t = 0..T-1, the backward direction T-1..0, using the
/// identical per-step routine, so reversal symmetry holds bitwise.
HiddenSequence bilstm_encode(const Tensor& x, const BiLstmParams& p);

} // namespace seqmine

#endif
