#include "mosr/encoder.hpp"

#include <cmath>
#include <string>

#include "mosr/errors.hpp"
#include "mosr/linalg.hpp"

namespace mosr {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Matrix gather_embedding(const Matrix& embedding, const std::vector<std::int32_t>& ids) {
    Matrix out(ids.size(), embedding.cols());
    for (std::size_t b = 0; b < ids.size(); ++b) {
        const auto id = ids[b];
        if (id < 0 || static_cast<std::size_t>(id) >= embedding.rows()) {
            throw contract_error("encoder: token id " + std::to_string(id) +
                                 " outside vocabulary of " + std::to_string(embedding.rows()));
        }
        auto src = embedding.row(static_cast<std::size_t>(id));
        auto dst = out.row(b);
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j];
    }
    return out;
}

void check_state_shape(const EncoderConfig& config, const HiddenState& state, std::size_t B) {
    if (state.h.size() != config.num_layers || state.c.size() != config.num_layers) {
        throw contract_error("encoder: state has " + std::to_string(state.h.size()) +
                             " layers, config has " + std::to_string(config.num_layers));
    }
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        if (state.h[l].rows() != B || state.h[l].cols() != config.hidden_dim ||
            !state.c[l].same_shape(state.h[l])) {
            throw contract_error("encoder: state layer " + std::to_string(l) + " shaped " +
                                 state.h[l].shape_str() + ", expected " + std::to_string(B) +
                                 "x" + std::to_string(config.hidden_dim));
        }
    }
}

}  // namespace

void EncoderConfig::validate() const {
    if (vocab_size == 0 || embed_dim == 0 || hidden_dim == 0 || num_layers == 0) {
        throw contract_error("EncoderConfig: all dimensions must be positive");
    }
}

HiddenState zero_state(const EncoderConfig& config, std::size_t batch_size) {
    config.validate();
    HiddenState state;
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        state.h.emplace_back(batch_size, config.hidden_dim, 0.0);
        state.c.emplace_back(batch_size, config.hidden_dim, 0.0);
    }
    return state;
}

LstmParams init_params(const EncoderConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    auto fill_uniform = [&rng](Matrix& m) {
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (double& v : m.row(i)) v = rng.uniform(-0.1, 0.1);
    };

    LstmParams params;
    params.embedding = Matrix(config.vocab_size, config.embed_dim);
    fill_uniform(params.embedding);

    const std::size_t H = config.hidden_dim;
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        const std::size_t in_dim = (l == 0) ? config.embed_dim : H;
        LstmParams::Layer layer;
        layer.w_input = Matrix(4 * H, in_dim);
        layer.w_recurrent = Matrix(4 * H, H);
        layer.bias = Matrix(1, 4 * H, 0.0);
        fill_uniform(layer.w_input);
        fill_uniform(layer.w_recurrent);
        for (std::size_t j = H; j < 2 * H; ++j) layer.bias(0, j) = 1.0;  // forget gate
        params.layers.push_back(std::move(layer));
    }
    return params;
}

LstmParams zeros_like(const EncoderConfig& config) {
    config.validate();
    LstmParams params;
    params.embedding = Matrix(config.vocab_size, config.embed_dim, 0.0);
    const std::size_t H = config.hidden_dim;
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        const std::size_t in_dim = (l == 0) ? config.embed_dim : H;
        params.layers.push_back({Matrix(4 * H, in_dim, 0.0), Matrix(4 * H, H, 0.0),
                                 Matrix(1, 4 * H, 0.0)});
    }
    return params;
}

EncoderForward forward(const EncoderConfig& config, const LstmParams& params,
                       const std::vector<std::vector<std::int32_t>>& ids,
                       const HiddenState& state) {
    config.validate();
    const std::size_t B = ids.size();
    if (B == 0 || ids[0].empty()) throw contract_error("encoder: empty input window");
    const std::size_t L = ids[0].size();
    for (const auto& row : ids) {
        if (row.size() != L) throw contract_error("encoder: ragged input window");
    }
    check_state_shape(config, state, B);

    const std::size_t H = config.hidden_dim;
    const std::size_t layers = config.num_layers;

    EncoderForward fwd;
    fwd.state = state;
    fwd.tape.ids = ids;
    fwd.tape.initial = state;
    auto& tape = fwd.tape;
    tape.gate_i.resize(L);
    tape.gate_f.resize(L);
    tape.gate_g.resize(L);
    tape.gate_o.resize(L);
    tape.cell.resize(L);
    tape.tanh_cell.resize(L);
    tape.hidden.resize(L);

    std::vector<std::int32_t> step_ids(B);
    for (std::size_t t = 0; t < L; ++t) {
        for (std::size_t b = 0; b < B; ++b) step_ids[b] = ids[b][t];
        Matrix x = gather_embedding(params.embedding, step_ids);
        for (std::size_t l = 0; l < layers; ++l) {
            const auto& layer = params.layers[l];
            Matrix z = matmul_nt(x, layer.w_input);
            z.add_scaled(matmul_nt(fwd.state.h[l], layer.w_recurrent), 1.0);

            Matrix gi(B, H), gf(B, H), gg(B, H), go(B, H), c(B, H), tc(B, H), h(B, H);
            for (std::size_t b = 0; b < B; ++b) {
                const double* zb = z.data() + b * 4 * H;
                const double* bias = layer.bias.data();
                const double* cp = fwd.state.c[l].data() + b * H;
                for (std::size_t j = 0; j < H; ++j) {
                    const double vi = sigmoid(zb[j] + bias[j]);
                    const double vf = sigmoid(zb[H + j] + bias[H + j]);
                    const double vg = std::tanh(zb[2 * H + j] + bias[2 * H + j]);
                    const double vo = sigmoid(zb[3 * H + j] + bias[3 * H + j]);
                    const double vc = vf * cp[j] + vi * vg;
                    const double vtc = std::tanh(vc);
                    gi(b, j) = vi;
                    gf(b, j) = vf;
                    gg(b, j) = vg;
                    go(b, j) = vo;
                    c(b, j) = vc;
                    tc(b, j) = vtc;
                    h(b, j) = vo * vtc;
                }
            }
            fwd.state.h[l] = h;
            fwd.state.c[l] = c;
            tape.gate_i[t].push_back(std::move(gi));
            tape.gate_f[t].push_back(std::move(gf));
            tape.gate_g[t].push_back(std::move(gg));
            tape.gate_o[t].push_back(std::move(go));
            tape.cell[t].push_back(std::move(c));
            tape.tanh_cell[t].push_back(std::move(tc));
            tape.hidden[t].push_back(h);
            x = std::move(h);
        }
        fwd.g.push_back(tape.hidden[t].back());
    }
    return fwd;
}

Matrix step(const EncoderConfig& config, const LstmParams& params,
            const std::vector<std::int32_t>& ids, HiddenState& state) {
    std::vector<std::vector<std::int32_t>> window(ids.size());
    for (std::size_t b = 0; b < ids.size(); ++b) window[b] = {ids[b]};
    EncoderForward fwd = forward(config, params, window, state);
    state = std::move(fwd.state);
    return fwd.g.front();
}

EncoderBackward backward(const EncoderConfig& config, const LstmParams& params,
                         const EncoderForward& fwd, const std::vector<Matrix>& grad_g,
                         const HiddenState* grad_state_in) {
    const auto& tape = fwd.tape;
    const std::size_t B = tape.ids.size();
    const std::size_t L = tape.ids.empty() ? 0 : tape.ids[0].size();
    const std::size_t H = config.hidden_dim;
    const std::size_t layers = config.num_layers;
    if (grad_g.size() != L) {
        throw contract_error("encoder backward: grad_g has " + std::to_string(grad_g.size()) +
                             " steps, tape has " + std::to_string(L));
    }
    for (const auto& g : grad_g) {
        if (g.rows() != B || g.cols() != H) {
            throw contract_error("encoder backward: grad_g block shaped " + g.shape_str() +
                                 ", expected " + std::to_string(B) + "x" + std::to_string(H));
        }
    }

    EncoderBackward out;
    out.grads = zeros_like(config);

    // Gradients flowing backward into h/c of each layer from the next step.
    std::vector<Matrix> dh_next, dc_next;
    for (std::size_t l = 0; l < layers; ++l) {
        dh_next.emplace_back(B, H, 0.0);
        dc_next.emplace_back(B, H, 0.0);
    }
    if (grad_state_in) {
        check_state_shape(config, *grad_state_in, B);
        for (std::size_t l = 0; l < layers; ++l) {
            dh_next[l] = grad_state_in->h[l];
            dc_next[l] = grad_state_in->c[l];
        }
    }

    std::vector<std::int32_t> step_ids(B);
    Matrix dz(B, 4 * H);
    for (std::size_t t = L; t-- > 0;) {
        for (std::size_t b = 0; b < B; ++b) step_ids[b] = tape.ids[b][t];
        Matrix dx_above;  // dh contribution for the layer below, same step
        for (std::size_t l = layers; l-- > 0;) {
            const auto& layer = params.layers[l];
            const Matrix& gi = tape.gate_i[t][l];
            const Matrix& gf = tape.gate_f[t][l];
            const Matrix& gg = tape.gate_g[t][l];
            const Matrix& go = tape.gate_o[t][l];
            const Matrix& tc = tape.tanh_cell[t][l];
            const Matrix& c_prev = (t > 0) ? tape.cell[t - 1][l] : tape.initial.c[l];
            const Matrix& h_prev = (t > 0) ? tape.hidden[t - 1][l] : tape.initial.h[l];

            Matrix dh = (l == layers - 1) ? grad_g[t] : dx_above;
            dh.add_scaled(dh_next[l], 1.0);

            for (std::size_t b = 0; b < B; ++b) {
                for (std::size_t j = 0; j < H; ++j) {
                    const double vdh = dh(b, j);
                    const double vo = go(b, j);
                    const double vtc = tc(b, j);
                    const double vdo = vdh * vtc;
                    const double vdc = vdh * vo * (1.0 - vtc * vtc) + dc_next[l](b, j);
                    const double vi = gi(b, j);
                    const double vf = gf(b, j);
                    const double vg = gg(b, j);
                    dz(b, j) = vdc * vg * vi * (1.0 - vi);
                    dz(b, H + j) = vdc * c_prev(b, j) * vf * (1.0 - vf);
                    dz(b, 2 * H + j) = vdc * vi * (1.0 - vg * vg);
                    dz(b, 3 * H + j) = vdo * vo * (1.0 - vo);
                    dc_next[l](b, j) = vdc * vf;
                }
            }

            const Matrix x = (l == 0) ? gather_embedding(params.embedding, step_ids)
                                      : tape.hidden[t][l - 1];
            out.grads.layers[l].w_input.add_scaled(matmul_tn(dz, x), 1.0);
            out.grads.layers[l].w_recurrent.add_scaled(matmul_tn(dz, h_prev), 1.0);
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t j = 0; j < 4 * H; ++j)
                    out.grads.layers[l].bias(0, j) += dz(b, j);

            dh_next[l] = matmul(dz, layer.w_recurrent);
            Matrix dx = matmul(dz, layer.w_input);
            if (l == 0) {
                for (std::size_t b = 0; b < B; ++b) {
                    auto grad_row =
                        out.grads.embedding.row(static_cast<std::size_t>(step_ids[b]));
                    for (std::size_t j = 0; j < grad_row.size(); ++j) grad_row[j] += dx(b, j);
                }
            } else {
                dx_above = std::move(dx);
            }
        }
    }

    out.state_grad.h = dh_next;
    out.state_grad.c = dc_next;
    return out;
}

}  // namespace mosr
