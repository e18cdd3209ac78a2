#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mosr/encoder.hpp"
#include "mosr/errors.hpp"
#include "mosr/rng.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace mosr;
using testutil::max_abs_diff;

namespace {

const EncoderConfig kTiny{5, 3, 4, 3};  // M=5, embed 3, hidden 4, 3 layers

std::vector<Matrix> random_grad_g(std::size_t L, std::size_t B, std::size_t H, Rng& rng) {
    std::vector<Matrix> grad;
    for (std::size_t t = 0; t < L; ++t) grad.push_back(testutil::random_matrix(B, H, rng));
    return grad;
}

double weighted_sum(const EncoderConfig& config, const LstmParams& params,
                    const std::vector<std::vector<std::int32_t>>& ids, const HiddenState& state,
                    const std::vector<Matrix>& grad_g) {
    EncoderForward fwd = forward(config, params, ids, state);
    double loss = 0.0;
    for (std::size_t t = 0; t < fwd.g.size(); ++t)
        for (std::size_t b = 0; b < fwd.g[t].rows(); ++b)
            for (std::size_t j = 0; j < fwd.g[t].cols(); ++j)
                loss += grad_g[t](b, j) * fwd.g[t](b, j);
    return loss;
}

}  // namespace

TEST_CASE("init_params is seeded and in range") {
    LstmParams a = init_params(kTiny, 7);
    LstmParams b = init_params(kTiny, 7);
    CHECK(max_abs_diff(a.embedding, b.embedding) == 0.0);
    for (std::size_t l = 0; l < 3; ++l) {
        CHECK(max_abs_diff(a.layers[l].w_input, b.layers[l].w_input) == 0.0);
        CHECK(max_abs_diff(a.layers[l].w_recurrent, b.layers[l].w_recurrent) == 0.0);
    }

    for (std::size_t i = 0; i < a.embedding.rows(); ++i)
        for (double v : a.embedding.row(i)) {
            CHECK(v >= -0.1);
            CHECK(v <= 0.1);
        }
    // Forget-gate bias block is 1, the rest 0.
    const std::size_t H = kTiny.hidden_dim;
    for (std::size_t j = 0; j < 4 * H; ++j) {
        CHECK(a.layers[0].bias(0, j) == ((j >= H && j < 2 * H) ? 1.0 : 0.0));
    }

    LstmParams c = init_params(kTiny, 8);
    CHECK(max_abs_diff(a.embedding, c.embedding) > 0.0);
}

TEST_CASE("zero weights and zero state give zero outputs") {
    LstmParams zeros = zeros_like(kTiny);
    for (auto& layer : zeros.layers) layer.bias.fill(0.0);
    std::vector<std::vector<std::int32_t>> ids{{0, 1, 2}, {3, 4, 0}};
    EncoderForward fwd = forward(kTiny, zeros, ids, zero_state(kTiny, 2));
    for (const auto& g : fwd.g) CHECK(g.frobenius() == 0.0);
    for (const auto& c : fwd.state.c) CHECK(c.frobenius() == 0.0);
}

TEST_CASE("single-cell LSTM matches hand-rolled recurrence") {
    const EncoderConfig cfg{2, 1, 1, 1};
    LstmParams params = zeros_like(cfg);
    params.embedding(0, 0) = 0.7;
    params.embedding(1, 0) = -0.3;
    const double wi = 0.5, wf = -0.4, wg = 0.9, wo = 0.2;
    const double ui = -0.6, uf = 0.3, ug = -0.8, uo = 0.55;
    const double bi = 0.05, bf = 1.0, bg = -0.15, bo = 0.25;
    params.layers[0].w_input(0, 0) = wi;
    params.layers[0].w_input(1, 0) = wf;
    params.layers[0].w_input(2, 0) = wg;
    params.layers[0].w_input(3, 0) = wo;
    params.layers[0].w_recurrent(0, 0) = ui;
    params.layers[0].w_recurrent(1, 0) = uf;
    params.layers[0].w_recurrent(2, 0) = ug;
    params.layers[0].w_recurrent(3, 0) = uo;
    params.layers[0].bias(0, 0) = bi;
    params.layers[0].bias(0, 1) = bf;
    params.layers[0].bias(0, 2) = bg;
    params.layers[0].bias(0, 3) = bo;

    HiddenState state = zero_state(cfg, 1);
    state.h[0](0, 0) = 0.3;
    state.c[0](0, 0) = -0.2;

    EncoderForward fwd = forward(cfg, params, {{0, 1}}, state);

    auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    double h = 0.3, c = -0.2;
    for (double x : {0.7, -0.3}) {
        const double i = sig(wi * x + ui * h + bi);
        const double f = sig(wf * x + uf * h + bf);
        const double g = std::tanh(wg * x + ug * h + bg);
        const double o = sig(wo * x + uo * h + bo);
        c = f * c + i * g;
        h = o * std::tanh(c);
    }
    CHECK(std::abs(fwd.g[1](0, 0) - h) < 1e-12);
    CHECK(std::abs(fwd.state.c[0](0, 0) - c) < 1e-12);
}

TEST_CASE("state carry across windows equals one long window") {
    Rng rng(13);
    LstmParams params = init_params(kTiny, 3);
    std::vector<std::vector<std::int32_t>> full{{0, 1, 2, 3}, {4, 0, 1, 2}};
    std::vector<std::vector<std::int32_t>> first{{0, 1}, {4, 0}};
    std::vector<std::vector<std::int32_t>> second{{2, 3}, {1, 2}};

    EncoderForward whole = forward(kTiny, params, full, zero_state(kTiny, 2));
    EncoderForward w1 = forward(kTiny, params, first, zero_state(kTiny, 2));
    EncoderForward w2 = forward(kTiny, params, second, w1.state);

    CHECK(max_abs_diff(whole.g[0], w1.g[0]) < 1e-12);
    CHECK(max_abs_diff(whole.g[1], w1.g[1]) < 1e-12);
    CHECK(max_abs_diff(whole.g[2], w2.g[0]) < 1e-12);
    CHECK(max_abs_diff(whole.g[3], w2.g[1]) < 1e-12);
    for (std::size_t l = 0; l < 3; ++l) {
        CHECK(max_abs_diff(whole.state.h[l], w2.state.h[l]) < 1e-12);
        CHECK(max_abs_diff(whole.state.c[l], w2.state.c[l]) < 1e-12);
    }
}

TEST_CASE("step() agrees with windowed forward") {
    LstmParams params = init_params(kTiny, 21);
    std::vector<std::vector<std::int32_t>> ids{{1, 2, 3}};
    EncoderForward fwd = forward(kTiny, params, ids, zero_state(kTiny, 1));

    HiddenState state = zero_state(kTiny, 1);
    for (std::size_t t = 0; t < 3; ++t) {
        Matrix g = step(kTiny, params, {ids[0][t]}, state);
        CHECK(max_abs_diff(g, fwd.g[t]) == 0.0);
    }
}

TEST_CASE("backward with zero grad_g gives zero gradients") {
    LstmParams params = init_params(kTiny, 5);
    std::vector<std::vector<std::int32_t>> ids{{0, 1}, {2, 3}};
    EncoderForward fwd = forward(kTiny, params, ids, zero_state(kTiny, 2));
    std::vector<Matrix> grad_g{Matrix(2, 4, 0.0), Matrix(2, 4, 0.0)};
    EncoderBackward back = backward(kTiny, params, fwd, grad_g);
    CHECK(back.grads.embedding.frobenius() == 0.0);
    for (const auto& layer : back.grads.layers) {
        CHECK(layer.w_input.frobenius() == 0.0);
        CHECK(layer.w_recurrent.frobenius() == 0.0);
        CHECK(layer.bias.frobenius() == 0.0);
    }
}

TEST_CASE("gradients match central finite differences") {
    Rng rng(101);
    LstmParams params = init_params(kTiny, 11);
    std::vector<std::vector<std::int32_t>> ids{{0, 1, 4}, {2, 3, 1}};
    HiddenState state = zero_state(kTiny, 2);
    for (std::size_t l = 0; l < kTiny.num_layers; ++l) {
        state.h[l] = testutil::random_matrix(2, 4, rng, -0.5, 0.5);
        state.c[l] = testutil::random_matrix(2, 4, rng, -0.5, 0.5);
    }
    std::vector<Matrix> grad_g = random_grad_g(3, 2, 4, rng);

    EncoderForward fwd = forward(kTiny, params, ids, state);
    EncoderBackward back = backward(kTiny, params, fwd, grad_g);

    auto loss = [&]() { return weighted_sum(kTiny, params, ids, state, grad_g); };
    CHECK(oracles::finite_diff_rel_err(params.embedding, back.grads.embedding, loss) < 1e-4);
    for (std::size_t l = 0; l < kTiny.num_layers; ++l) {
        CHECK(oracles::finite_diff_rel_err(params.layers[l].w_input, back.grads.layers[l].w_input,
                                           loss) < 1e-4);
        CHECK(oracles::finite_diff_rel_err(params.layers[l].w_recurrent,
                                           back.grads.layers[l].w_recurrent, loss) < 1e-4);
        CHECK(oracles::finite_diff_rel_err(params.layers[l].bias, back.grads.layers[l].bias,
                                           loss) < 1e-4);
    }
    // Incoming-state gradients via the same oracle.
    for (std::size_t l = 0; l < kTiny.num_layers; ++l) {
        CHECK(oracles::finite_diff_rel_err(state.h[l], back.state_grad.h[l], loss) < 1e-4);
        CHECK(oracles::finite_diff_rel_err(state.c[l], back.state_grad.c[l], loss) < 1e-4);
    }
}

TEST_CASE("chained window gradients equal full-sequence gradients") {
    Rng rng(55);
    LstmParams params = init_params(kTiny, 17);
    std::vector<std::vector<std::int32_t>> full{{0, 1, 2, 3}, {4, 3, 2, 1}};
    std::vector<std::vector<std::int32_t>> first{{0, 1}, {4, 3}};
    std::vector<std::vector<std::int32_t>> second{{2, 3}, {2, 1}};
    std::vector<Matrix> grad_g = random_grad_g(4, 2, 4, rng);
    std::vector<Matrix> grad1{grad_g[0], grad_g[1]};
    std::vector<Matrix> grad2{grad_g[2], grad_g[3]};

    EncoderForward whole = forward(kTiny, params, full, zero_state(kTiny, 2));
    EncoderBackward back_whole = backward(kTiny, params, whole, grad_g);

    EncoderForward w1 = forward(kTiny, params, first, zero_state(kTiny, 2));
    EncoderForward w2 = forward(kTiny, params, second, w1.state);
    EncoderBackward b2 = backward(kTiny, params, w2, grad2);
    EncoderBackward b1 = backward(kTiny, params, w1, grad1, &b2.state_grad);

    LstmParams sum = b1.grads;
    sum.embedding.add_scaled(b2.grads.embedding, 1.0);
    for (std::size_t l = 0; l < kTiny.num_layers; ++l) {
        sum.layers[l].w_input.add_scaled(b2.grads.layers[l].w_input, 1.0);
        sum.layers[l].w_recurrent.add_scaled(b2.grads.layers[l].w_recurrent, 1.0);
        sum.layers[l].bias.add_scaled(b2.grads.layers[l].bias, 1.0);
    }

    CHECK(max_abs_diff(sum.embedding, back_whole.grads.embedding) < 1e-12);
    for (std::size_t l = 0; l < kTiny.num_layers; ++l) {
        CHECK(max_abs_diff(sum.layers[l].w_input, back_whole.grads.layers[l].w_input) < 1e-12);
        CHECK(max_abs_diff(sum.layers[l].w_recurrent, back_whole.grads.layers[l].w_recurrent) <
              1e-12);
        CHECK(max_abs_diff(sum.layers[l].bias, back_whole.grads.layers[l].bias) < 1e-12);
    }
}

TEST_CASE("shape contract violations") {
    LstmParams params = init_params(kTiny, 1);
    std::vector<std::vector<std::int32_t>> ids{{0, 1}, {2}};
    CHECK_THROWS_AS(forward(kTiny, params, ids, zero_state(kTiny, 2)), contract_error);

    std::vector<std::vector<std::int32_t>> bad_id{{9}};
    CHECK_THROWS_AS(forward(kTiny, params, bad_id, zero_state(kTiny, 1)), contract_error);

    std::vector<std::vector<std::int32_t>> ok{{0, 1}};
    CHECK_THROWS_AS(forward(kTiny, params, ok, zero_state(kTiny, 3)), contract_error);

    EncoderForward fwd = forward(kTiny, params, ok, zero_state(kTiny, 1));
    std::vector<Matrix> wrong_steps{Matrix(1, 4, 0.0)};
    CHECK_THROWS_AS(backward(kTiny, params, fwd, wrong_steps), contract_error);
}
