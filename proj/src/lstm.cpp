#include "seqmine/lstm.hpp"

#include <cmath>

#include "seqmine/ops.hpp"
#include "seqmine/random.hpp"

namespace seqmine {

LstmParams LstmParams::init(Index input_size, Index hidden_size, std::mt19937_64& rng) {
    if (input_size < 1 || hidden_size < 1) {
        throw ValueError("LSTM sizes must be positive");
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    LstmParams p;
    p.input_weights = uniform_tensor({4 * hidden_size, input_size}, -bound, bound, rng);
    p.recurrent_weights = uniform_tensor({4 * hidden_size, hidden_size}, -bound, bound, rng);
    p.bias = uniform_tensor({4 * hidden_size}, -bound, bound, rng);
    return p;
}

void LstmParams::validate() const {
    const Index h = hidden_size();
    const Index d = input_size();
    if (input_weights.rows() != 4 * h || recurrent_weights.rows() != 4 * h ||
        bias.size() != 4 * h || d < 1) {
        throw ShapeError("inconsistent LSTM parameter shapes: input " +
                         shape_str(input_weights.shape()) + ", recurrent " +
                         shape_str(recurrent_weights.shape()) + ", bias " +
                         shape_str(bias.shape()));
    }
}

BiLstmParams BiLstmParams::init(Index input_size, Index hidden_size, std::mt19937_64& rng) {
    BiLstmParams p;
    p.forward = LstmParams::init(input_size, hidden_size, rng);
    p.backward = LstmParams::init(input_size, hidden_size, rng);
    return p;
}

void BiLstmParams::validate() const {
    forward.validate();
    backward.validate();
    if (forward.hidden_size() != backward.hidden_size() ||
        forward.input_size() != backward.input_size()) {
        throw ShapeError("forward and backward LSTM directions disagree on sizes");
    }
}

std::pair<Tensor, Tensor> lstm_cell_step(const Tensor& x_t, const Tensor& h_prev,
                                         const Tensor& c_prev, const LstmParams& p) {
    p.validate();
    const Index h = p.hidden_size();
    if (x_t.rank() != 1 || x_t.size() != p.input_size()) {
        throw ShapeError("lstm_cell_step: input is " + shape_str(x_t.shape()) + ", expected [" +
                         std::to_string(p.input_size()) + "]");
    }
    if (h_prev.rank() != 1 || h_prev.size() != h || c_prev.rank() != 1 || c_prev.size() != h) {
        throw ShapeError("lstm_cell_step: state sizes do not match hidden size " +
                         std::to_string(h));
    }

    Tensor z = add(add(matvec(p.input_weights, x_t), matvec(p.recurrent_weights, h_prev)), p.bias);
    Tensor gate_in = sigmoid(segment(z, 0, h));
    Tensor gate_forget = sigmoid(segment(z, h, h));
    Tensor candidate = tanh(segment(z, 2 * h, h));
    Tensor gate_out = sigmoid(segment(z, 3 * h, h));

    Tensor c_t = add(mul(gate_forget, c_prev), mul(gate_in, candidate));
    Tensor h_t = mul(gate_out, tanh(c_t));
    return {h_t, c_t};
}

namespace {

// Scans rows of X in the given time order with zero initial states and
// returns the hidden state per original row index.
std::vector<Tensor> lstm_scan(const Tensor& x, const LstmParams& p, bool reverse_time) {
    const Index steps = x.rows();
    const Index h = p.hidden_size();
    std::vector<Tensor> states(static_cast<std::size_t>(steps));
    Tensor h_t = Tensor::zeros({h});
    Tensor c_t = Tensor::zeros({h});
    for (Index k = 0; k < steps; ++k) {
        const Index t = reverse_time ? steps - 1 - k : k;
        std::tie(h_t, c_t) = lstm_cell_step(row(x, t), h_t, c_t, p);
        states[static_cast<std::size_t>(t)] = h_t;
    }
    return states;
}

} // namespace

HiddenSequence bilstm_encode(const Tensor& x, const BiLstmParams& p) {
    p.validate();
    if (x.rank() != 2) {
        throw ShapeError("bilstm_encode expects [T, d] input, got " + shape_str(x.shape()));
    }
    if (x.rows() < 1) throw ValueError("bilstm_encode: empty sequence");
    if (x.cols() != p.input_size()) {
        throw ShapeError("bilstm_encode: input has " + std::to_string(x.cols()) +
                         " channels, parameters expect " + std::to_string(p.input_size()));
    }

    const std::vector<Tensor> fwd = lstm_scan(x, p.forward, false);
    const std::vector<Tensor> bwd = lstm_scan(x, p.backward, true);

    std::vector<Tensor> rows;
    rows.reserve(fwd.size());
    for (std::size_t t = 0; t < fwd.size(); ++t) {
        const Tensor parts[] = {fwd[t], bwd[t]};
        rows.push_back(concat(parts));
    }
    HiddenSequence out;
    out.values = stack_rows(rows);
    out.hidden_size = p.hidden_size();
    return out;
}

} // namespace seqmine
