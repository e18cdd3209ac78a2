#pragma once

#include <cstdint>
#include <vector>

#include "mosr/matrix.hpp"
#include "mosr/rng.hpp"

namespace mosr {

struct EncoderConfig {
    std::size_t vocab_size = 0;  // M
    std::size_t embed_dim = 0;
    std::size_t hidden_dim = 0;  // width of g_t
    std::size_t num_layers = 1;

    void validate() const;
};

// Stacked-LSTM parameters. Gate order within the 4H blocks is fixed as
// [input, forget, cell, output]. The same struct doubles as the gradient
// container (identical shapes).
struct LstmParams {
    struct Layer {
        Matrix w_input;      // 4H x in_dim
        Matrix w_recurrent;  // 4H x H
        Matrix bias;         // 1 x 4H
    };
    Matrix embedding;  // M x embed_dim
    std::vector<Layer> layers;
};

struct HiddenState {
    std::vector<Matrix> h;  // per layer: B x H
    std::vector<Matrix> c;  // per layer: B x H

    std::size_t batch_size() const { return h.empty() ? 0 : h.front().rows(); }
};

HiddenState zero_state(const EncoderConfig& config, std::size_t batch_size);

// Weights ~ Uniform(-0.1, 0.1); biases zero except the forget-gate block,
// which starts at 1.0.
LstmParams init_params(const EncoderConfig& config, std::uint64_t seed);
LstmParams zeros_like(const EncoderConfig& config);

// Activation record needed for exact BPTT. h doubles as the input to the
// layer above and the recurrent input of the next step.
struct LstmTape {
    std::vector<std::vector<std::int32_t>> ids;                 // B x L
    HiddenState initial;                                        // state entering the window
    std::vector<std::vector<Matrix>> gate_i, gate_f, gate_g, gate_o;  // [t][layer]: B x H
    std::vector<std::vector<Matrix>> cell, tanh_cell, hidden;         // [t][layer]: B x H
};

struct EncoderForward {
    std::vector<Matrix> g;  // per step: B x hidden_dim (top layer)
    HiddenState state;      // carried state after the window
    LstmTape tape;
};

// Standard LSTM recurrence over a B x L window of token ids.
EncoderForward forward(const EncoderConfig& config, const LstmParams& params,
                       const std::vector<std::vector<std::int32_t>>& ids,
                       const HiddenState& state);

// Single step without a tape; updates `state` in place and returns the top
// layer's hidden row block (B x H). Used by evaluation paths.
Matrix step(const EncoderConfig& config, const LstmParams& params,
            const std::vector<std::int32_t>& ids, HiddenState& state);

struct EncoderBackward {
    LstmParams grads;
    HiddenState state_grad;  // gradient w.r.t. the incoming state
};

// Exact gradients of sum_t <grad_g[t], g[t]> with respect to all parameters
// and the incoming state. `grad_state_in`, when given, injects the gradient
// flowing back into the window's outgoing state (used to chain windows).
EncoderBackward backward(const EncoderConfig& config, const LstmParams& params,
                         const EncoderForward& fwd, const std::vector<Matrix>& grad_g,
                         const HiddenState* grad_state_in = nullptr);

}  // namespace mosr
