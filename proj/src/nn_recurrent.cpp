#include "swardcast/nn/recurrent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swardcast/errors.hpp"
#include "swardcast/nn/activations.hpp"

namespace swardcast::nn {

std::string to_string(CellKind kind) {
    return kind == CellKind::lstm ? "lstm" : "gru";
}

CellKind cell_kind_from_string(const std::string& name) {
    if (name == "lstm") return CellKind::lstm;
    if (name == "gru") return CellKind::gru;
    throw ConfigError("unknown cell kind `" + name + "`");
}

LstmState LstmState::zero(std::size_t hidden) {
    LstmState s;
    s.h.assign(hidden, 0.0);
    s.c.assign(hidden, 0.0);
    return s;
}

GruState GruState::zero(std::size_t hidden) {
    GruState s;
    s.h.assign(hidden, 0.0);
    return s;
}

namespace {

void check_dims(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(want) +
                                ", got " + std::to_string(got));
    }
}

// a = W x + U h + sign * b
void gate_preact(const Matrix& w, const Matrix& u, const std::vector<double>& b, double sign,
                 std::span<const double> x, std::span<const double> h, std::vector<double>& a) {
    a.resize(b.size());
    matvec(w, x, a);
    std::vector<double> uh(b.size(), 0.0);
    matvec(u, h, uh);
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] += uh[k] + sign * b[k];
    }
}

}  // namespace

LstmState lstm_step(const LstmLayer& layer, std::span<const double> x, const LstmState& prev,
                    CellVariant variant) {
    check_dims(x.size(), layer.input_size, "lstm input");
    check_dims(prev.h.size(), layer.hidden_size, "lstm hidden state");
    check_dims(prev.c.size(), layer.hidden_size, "lstm cell state");

    const bool literal = variant == CellVariant::paper_literal;
    const double flip = literal ? -1.0 : 1.0;
    const std::size_t hidden = layer.hidden_size;

    LstmState next;
    std::vector<double> a;
    gate_preact(layer.W_i, layer.U_i, layer.b_i, flip, x, prev.h, a);
    next.i.resize(hidden);
    for (std::size_t k = 0; k < hidden; ++k) next.i[k] = sigmoid(a[k]);
    gate_preact(layer.W_f, layer.U_f, layer.b_f, 1.0, x, prev.h, a);
    next.f.resize(hidden);
    for (std::size_t k = 0; k < hidden; ++k) next.f[k] = sigmoid(a[k]);
    gate_preact(layer.W_o, layer.U_o, layer.b_o, flip, x, prev.h, a);
    next.o.resize(hidden);
    for (std::size_t k = 0; k < hidden; ++k) next.o[k] = sigmoid(a[k]);
    gate_preact(layer.W_g, layer.U_g, layer.b_g, flip, x, prev.h, a);
    next.g.resize(hidden);
    for (std::size_t k = 0; k < hidden; ++k) next.g[k] = std::tanh(a[k]);

    next.c.resize(hidden);
    next.h.resize(hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
        next.c[k] = next.f[k] * prev.c[k] + next.i[k] * next.g[k];
        next.h[k] = next.o[k] * std::tanh(literal ? next.g[k] : next.c[k]);
    }
    return next;
}

GruState gru_step(const GruLayer& layer, std::span<const double> x, std::span<const double> h_prev,
                  CellVariant variant) {
    check_dims(x.size(), layer.input_size, "gru input");
    check_dims(h_prev.size(), layer.hidden_size, "gru hidden state");

    const double flip = variant == CellVariant::paper_literal ? -1.0 : 1.0;
    const std::size_t hidden = layer.hidden_size;

    GruState next;
    std::vector<double> a;
    gate_preact(layer.W_z, layer.U_z, layer.b_z, flip, x, h_prev, a);
    next.z.resize(hidden);
    for (std::size_t k = 0; k < hidden; ++k) next.z[k] = sigmoid(a[k]);
    gate_preact(layer.W_r, layer.U_r, layer.b_r, 1.0, x, h_prev, a);
    next.r.resize(hidden);
    for (std::size_t k = 0; k < hidden; ++k) next.r[k] = sigmoid(a[k]);

    std::vector<double> hr(hidden);
    for (std::size_t k = 0; k < hidden; ++k) hr[k] = next.r[k] * h_prev[k];
    gate_preact(layer.W_g, layer.U_g, layer.b_g, 1.0, x, hr, a);
    next.g.resize(hidden);
    for (std::size_t k = 0; k < hidden; ++k) next.g[k] = std::tanh(a[k]);

    next.h.resize(hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
        next.h[k] = next.z[k] * h_prev[k] + (1.0 - next.z[k]) * next.g[k];
    }
    return next;
}

LstmLayer lstm_init(std::size_t input, std::size_t hidden, Rng& rng) {
    LstmLayer l;
    l.input_size = input;
    l.hidden_size = hidden;
    auto glorot = [&](Matrix& m, std::size_t rows, std::size_t cols) {
        m = Matrix(rows, cols);
        const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (double& v : m.data) v = rng.uniform(-limit, limit);
    };
    glorot(l.W_i, hidden, input);
    glorot(l.W_f, hidden, input);
    glorot(l.W_o, hidden, input);
    glorot(l.W_g, hidden, input);
    glorot(l.U_i, hidden, hidden);
    glorot(l.U_f, hidden, hidden);
    glorot(l.U_o, hidden, hidden);
    glorot(l.U_g, hidden, hidden);
    l.b_i.assign(hidden, 0.0);
    l.b_f.assign(hidden, 0.0);
    l.b_o.assign(hidden, 0.0);
    l.b_g.assign(hidden, 0.0);
    return l;
}

GruLayer gru_init(std::size_t input, std::size_t hidden, Rng& rng) {
    GruLayer l;
    l.input_size = input;
    l.hidden_size = hidden;
    auto glorot = [&](Matrix& m, std::size_t rows, std::size_t cols) {
        m = Matrix(rows, cols);
        const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (double& v : m.data) v = rng.uniform(-limit, limit);
    };
    glorot(l.W_z, hidden, input);
    glorot(l.W_r, hidden, input);
    glorot(l.W_g, hidden, input);
    glorot(l.U_z, hidden, hidden);
    glorot(l.U_r, hidden, hidden);
    glorot(l.U_g, hidden, hidden);
    l.b_z.assign(hidden, 0.0);
    l.b_r.assign(hidden, 0.0);
    l.b_g.assign(hidden, 0.0);
    return l;
}

void RnnConfig::validate() const {
    if (hidden_sizes.empty()) {
        throw ConfigError("at least one recurrent layer is required");
    }
    for (int h : hidden_sizes) {
        if (h < 1) {
            throw ConfigError("hidden sizes must be positive");
        }
    }
    if (lag < 1 || epochs < 1 || batch_size < 1) {
        throw ConfigError("lag, epochs and batch_size must be at least 1");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be a finite non-negative number");
    }
}

RnnModel RnnModel::init(const RnnConfig& config) {
    config.validate();
    RnnModel model;
    model.cfg_ = config;
    Rng rng(config.seed);
    std::size_t in = 1;
    for (int h : config.hidden_sizes) {
        const auto hidden = static_cast<std::size_t>(h);
        if (config.cell == CellKind::lstm) {
            model.lstm_layers_.push_back(lstm_init(in, hidden, rng));
        } else {
            model.gru_layers_.push_back(gru_init(in, hidden, rng));
        }
        in = hidden;
    }
    model.readout_ = dense_init(in, 1, Activation::linear, rng);
    return model;
}

namespace {

// Forward pass over one window; seqs[l][t] is layer l's state after step t.
template <typename Layer, typename State, typename StepFn>
std::vector<std::vector<State>> unroll(const std::vector<Layer>& layers,
                                       std::span<const double> window, StepFn step) {
    const std::size_t T = window.size();
    std::vector<std::vector<State>> seqs(layers.size());
    std::vector<double> scalar(1);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        seqs[l].reserve(T);
        State state = State::zero(layers[l].hidden_size);
        for (std::size_t t = 0; t < T; ++t) {
            std::span<const double> x;
            if (l == 0) {
                scalar[0] = window[t];
                x = scalar;
            } else {
                x = seqs[l - 1][t].h;
            }
            state = step(layers[l], x, state);
            seqs[l].push_back(state);
        }
    }
    return seqs;
}

struct LstmGrads {
    Matrix dW_i, dW_f, dW_o, dW_g, dU_i, dU_f, dU_o, dU_g;
    std::vector<double> db_i, db_f, db_o, db_g;

    explicit LstmGrads(const LstmLayer& l)
        : dW_i(l.W_i.rows, l.W_i.cols), dW_f(l.W_f.rows, l.W_f.cols),
          dW_o(l.W_o.rows, l.W_o.cols), dW_g(l.W_g.rows, l.W_g.cols),
          dU_i(l.U_i.rows, l.U_i.cols), dU_f(l.U_f.rows, l.U_f.cols),
          dU_o(l.U_o.rows, l.U_o.cols), dU_g(l.U_g.rows, l.U_g.cols),
          db_i(l.b_i.size(), 0.0), db_f(l.b_f.size(), 0.0),
          db_o(l.b_o.size(), 0.0), db_g(l.b_g.size(), 0.0) {}
};

struct GruGrads {
    Matrix dW_z, dW_r, dW_g, dU_z, dU_r, dU_g;
    std::vector<double> db_z, db_r, db_g;

    explicit GruGrads(const GruLayer& l)
        : dW_z(l.W_z.rows, l.W_z.cols), dW_r(l.W_r.rows, l.W_r.cols),
          dW_g(l.W_g.rows, l.W_g.cols), dU_z(l.U_z.rows, l.U_z.cols),
          dU_r(l.U_r.rows, l.U_r.cols), dU_g(l.U_g.rows, l.U_g.cols),
          db_z(l.b_z.size(), 0.0), db_r(l.b_r.size(), 0.0), db_g(l.b_g.size(), 0.0) {}
};

// Backpropagation through time for one LSTM layer. dh_ext[t] carries the
// gradient arriving at h_t from the layer above (or the readout). Writes the
// gradient w.r.t. the layer's inputs into dx (dx[t] has the input size).
void lstm_bptt(const LstmLayer& layer, CellVariant variant,
               const std::vector<LstmState>& states,
               const std::vector<std::vector<double>>& inputs,
               const std::vector<std::vector<double>>& dh_ext, LstmGrads& grads,
               std::vector<std::vector<double>>& dx) {
    const bool literal = variant == CellVariant::paper_literal;
    const double flip = literal ? -1.0 : 1.0;
    const std::size_t T = states.size();
    const std::size_t hidden = layer.hidden_size;

    dx.assign(T, std::vector<double>(layer.input_size, 0.0));
    std::vector<double> dh_rec(hidden, 0.0), dc_next(hidden, 0.0);
    std::vector<double> dh(hidden), dc(hidden), da_i(hidden), da_f(hidden), da_o(hidden),
        da_g(hidden);
    const LstmState zero_state = LstmState::zero(hidden);

    for (std::size_t t = T; t-- > 0;) {
        const LstmState& s = states[t];
        const LstmState& prev = t == 0 ? zero_state : states[t - 1];
        for (std::size_t k = 0; k < hidden; ++k) {
            dh[k] = dh_ext[t][k] + dh_rec[k];
        }
        for (std::size_t k = 0; k < hidden; ++k) {
            double d_o, dg_from_h;
            if (literal) {
                const double tg = std::tanh(s.g[k]);
                d_o = dh[k] * tg;
                dc[k] = dc_next[k];
                dg_from_h = dh[k] * s.o[k] * (1.0 - tg * tg);
            } else {
                const double tc = std::tanh(s.c[k]);
                d_o = dh[k] * tc;
                dc[k] = dc_next[k] + dh[k] * s.o[k] * (1.0 - tc * tc);
                dg_from_h = 0.0;
            }
            const double di = dc[k] * s.g[k];
            const double df = dc[k] * prev.c[k];
            const double dg = dc[k] * s.i[k] + dg_from_h;
            dc_next[k] = dc[k] * s.f[k];
            da_i[k] = di * s.i[k] * (1.0 - s.i[k]);
            da_f[k] = df * s.f[k] * (1.0 - s.f[k]);
            da_o[k] = d_o * s.o[k] * (1.0 - s.o[k]);
            da_g[k] = dg * (1.0 - s.g[k] * s.g[k]);
        }

        const std::vector<double>& x = inputs[t];
        add_outer(grads.dW_i, da_i, x);
        add_outer(grads.dW_f, da_f, x);
        add_outer(grads.dW_o, da_o, x);
        add_outer(grads.dW_g, da_g, x);
        add_outer(grads.dU_i, da_i, prev.h);
        add_outer(grads.dU_f, da_f, prev.h);
        add_outer(grads.dU_o, da_o, prev.h);
        add_outer(grads.dU_g, da_g, prev.h);
        for (std::size_t k = 0; k < hidden; ++k) {
            grads.db_i[k] += flip * da_i[k];
            grads.db_f[k] += da_f[k];
            grads.db_o[k] += flip * da_o[k];
            grads.db_g[k] += flip * da_g[k];
        }

        std::fill(dh_rec.begin(), dh_rec.end(), 0.0);
        matvec_transpose_add(layer.U_i, da_i, dh_rec);
        matvec_transpose_add(layer.U_f, da_f, dh_rec);
        matvec_transpose_add(layer.U_o, da_o, dh_rec);
        matvec_transpose_add(layer.U_g, da_g, dh_rec);
        matvec_transpose_add(layer.W_i, da_i, dx[t]);
        matvec_transpose_add(layer.W_f, da_f, dx[t]);
        matvec_transpose_add(layer.W_o, da_o, dx[t]);
        matvec_transpose_add(layer.W_g, da_g, dx[t]);
    }
}

void gru_bptt(const GruLayer& layer, CellVariant variant, const std::vector<GruState>& states,
              const std::vector<std::vector<double>>& inputs,
              const std::vector<std::vector<double>>& dh_ext, GruGrads& grads,
              std::vector<std::vector<double>>& dx) {
    const double flip = variant == CellVariant::paper_literal ? -1.0 : 1.0;
    const std::size_t T = states.size();
    const std::size_t hidden = layer.hidden_size;

    dx.assign(T, std::vector<double>(layer.input_size, 0.0));
    std::vector<double> dh_rec(hidden, 0.0);
    std::vector<double> dh(hidden), da_z(hidden), da_r(hidden), da_g(hidden), dhr(hidden),
        hr(hidden);
    const GruState zero_state = GruState::zero(hidden);

    for (std::size_t t = T; t-- > 0;) {
        const GruState& s = states[t];
        const std::vector<double>& h_prev = (t == 0 ? zero_state : states[t - 1]).h;
        for (std::size_t k = 0; k < hidden; ++k) {
            dh[k] = dh_ext[t][k] + dh_rec[k];
        }
        for (std::size_t k = 0; k < hidden; ++k) {
            const double dz = dh[k] * (h_prev[k] - s.g[k]);
            const double dg = dh[k] * (1.0 - s.z[k]);
            da_z[k] = dz * s.z[k] * (1.0 - s.z[k]);
            da_g[k] = dg * (1.0 - s.g[k] * s.g[k]);
            hr[k] = s.r[k] * h_prev[k];
        }
        std::fill(dhr.begin(), dhr.end(), 0.0);
        matvec_transpose_add(layer.U_g, da_g, dhr);
        for (std::size_t k = 0; k < hidden; ++k) {
            const double dr = dhr[k] * h_prev[k];
            da_r[k] = dr * s.r[k] * (1.0 - s.r[k]);
        }

        const std::vector<double>& x = inputs[t];
        add_outer(grads.dW_z, da_z, x);
        add_outer(grads.dW_r, da_r, x);
        add_outer(grads.dW_g, da_g, x);
        add_outer(grads.dU_z, da_z, h_prev);
        add_outer(grads.dU_r, da_r, h_prev);
        add_outer(grads.dU_g, da_g, hr);
        for (std::size_t k = 0; k < hidden; ++k) {
            grads.db_z[k] += flip * da_z[k];
            grads.db_r[k] += da_r[k];
            grads.db_g[k] += da_g[k];
        }

        for (std::size_t k = 0; k < hidden; ++k) {
            dh_rec[k] = dh[k] * s.z[k] + dhr[k] * s.r[k];
        }
        matvec_transpose_add(layer.U_z, da_z, dh_rec);
        matvec_transpose_add(layer.U_r, da_r, dh_rec);
        matvec_transpose_add(layer.W_z, da_z, dx[t]);
        matvec_transpose_add(layer.W_r, da_r, dx[t]);
        matvec_transpose_add(layer.W_g, da_g, dx[t]);
    }
}

std::vector<std::vector<double>> collect_inputs(std::span<const double> window,
                                                const std::vector<std::vector<double>>* below_h) {
    std::vector<std::vector<double>> inputs;
    inputs.reserve(window.size());
    if (below_h == nullptr) {
        for (double v : window) {
            inputs.push_back({v});
        }
    } else {
        inputs = *below_h;
    }
    return inputs;
}

}  // namespace

double RnnModel::predict(std::span<const double> window) const {
    if (window.size() != static_cast<std::size_t>(cfg_.lag)) {
        throw DimensionMismatch("window length " + std::to_string(window.size()) +
                                " does not match lag " + std::to_string(cfg_.lag));
    }
    std::span<const double> top_h;
    std::vector<std::vector<LstmState>> lstm_seqs;
    std::vector<std::vector<GruState>> gru_seqs;
    if (cfg_.cell == CellKind::lstm) {
        lstm_seqs = unroll<LstmLayer, LstmState>(
            lstm_layers_, window, [&](const LstmLayer& l, std::span<const double> x,
                                      const LstmState& prev) {
                return lstm_step(l, x, prev, cfg_.variant);
            });
        top_h = lstm_seqs.back().back().h;
    } else {
        gru_seqs = unroll<GruLayer, GruState>(
            gru_layers_, window,
            [&](const GruLayer& l, std::span<const double> x, const GruState& prev) {
                return gru_step(l, x, prev.h, cfg_.variant);
            });
        top_h = gru_seqs.back().back().h;
    }
    DenseCache cache;
    dense_forward(readout_, top_h, cache);
    return cache.output[0];
}

std::size_t RnnModel::parameter_count() const {
    std::size_t count = 0;
    for (const auto& l : lstm_layers_) {
        count += l.W_i.size() * 4 + l.U_i.size() * 4 + l.b_i.size() * 4;
    }
    for (const auto& l : gru_layers_) {
        count += l.W_z.size() * 3 + l.U_z.size() * 3 + l.b_z.size() * 3;
    }
    return count + readout_.weights.size() + readout_.bias.size();
}

std::vector<double> RnnModel::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    auto push_matrix = [&](const Matrix& m) {
        flat.insert(flat.end(), m.data.begin(), m.data.end());
    };
    auto push_vec = [&](const std::vector<double>& v) {
        flat.insert(flat.end(), v.begin(), v.end());
    };
    for (const auto& l : lstm_layers_) {
        push_matrix(l.W_i); push_matrix(l.W_f); push_matrix(l.W_o); push_matrix(l.W_g);
        push_matrix(l.U_i); push_matrix(l.U_f); push_matrix(l.U_o); push_matrix(l.U_g);
        push_vec(l.b_i); push_vec(l.b_f); push_vec(l.b_o); push_vec(l.b_g);
    }
    for (const auto& l : gru_layers_) {
        push_matrix(l.W_z); push_matrix(l.W_r); push_matrix(l.W_g);
        push_matrix(l.U_z); push_matrix(l.U_r); push_matrix(l.U_g);
        push_vec(l.b_z); push_vec(l.b_r); push_vec(l.b_g);
    }
    push_matrix(readout_.weights);
    push_vec(readout_.bias);
    return flat;
}

void RnnModel::set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        throw DimensionMismatch("expected " + std::to_string(parameter_count()) +
                                " parameters, got " + std::to_string(flat.size()));
    }
    std::size_t pos = 0;
    auto read_matrix = [&](Matrix& m) {
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + m.size()), m.data.begin());
        pos += m.size();
    };
    auto read_vec = [&](std::vector<double>& v) {
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + v.size()), v.begin());
        pos += v.size();
    };
    for (auto& l : lstm_layers_) {
        read_matrix(l.W_i); read_matrix(l.W_f); read_matrix(l.W_o); read_matrix(l.W_g);
        read_matrix(l.U_i); read_matrix(l.U_f); read_matrix(l.U_o); read_matrix(l.U_g);
        read_vec(l.b_i); read_vec(l.b_f); read_vec(l.b_o); read_vec(l.b_g);
    }
    for (auto& l : gru_layers_) {
        read_matrix(l.W_z); read_matrix(l.W_r); read_matrix(l.W_g);
        read_matrix(l.U_z); read_matrix(l.U_r); read_matrix(l.U_g);
        read_vec(l.b_z); read_vec(l.b_r); read_vec(l.b_g);
    }
    read_matrix(readout_.weights);
    read_vec(readout_.bias);
}

double RnnModel::batch_loss(const WindowedDataset& data, std::size_t begin, std::size_t end) const {
    if (begin >= end || end > data.size()) {
        throw DimensionMismatch("invalid batch range");
    }
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        double e = data.targets[i] - predict(data.inputs[i]);
        sum += e * e;
    }
    return sum / static_cast<double>(end - begin);
}

std::vector<double> RnnModel::batch_gradient(const WindowedDataset& data, std::size_t begin,
                                             std::size_t end) const {
    if (begin >= end || end > data.size()) {
        throw DimensionMismatch("invalid batch range");
    }
    const bool is_lstm = cfg_.cell == CellKind::lstm;
    const std::size_t n_layers = is_lstm ? lstm_layers_.size() : gru_layers_.size();
    const std::size_t T = static_cast<std::size_t>(cfg_.lag);

    std::vector<LstmGrads> lstm_grads;
    std::vector<GruGrads> gru_grads;
    for (const auto& l : lstm_layers_) lstm_grads.emplace_back(l);
    for (const auto& l : gru_layers_) gru_grads.emplace_back(l);
    Matrix d_readout_w(readout_.weights.rows, readout_.weights.cols);
    std::vector<double> d_readout_b(readout_.bias.size(), 0.0);

    const double inv_n = 1.0 / static_cast<double>(end - begin);
    DenseCache readout_cache;
    std::vector<double> dout(1), d_top_h;

    for (std::size_t i = begin; i < end; ++i) {
        std::span<const double> window(data.inputs[i]);
        std::vector<std::vector<LstmState>> lstm_seqs;
        std::vector<std::vector<GruState>> gru_seqs;
        std::span<const double> top_h;
        if (is_lstm) {
            lstm_seqs = unroll<LstmLayer, LstmState>(
                lstm_layers_, window, [&](const LstmLayer& l, std::span<const double> x,
                                          const LstmState& prev) {
                    return lstm_step(l, x, prev, cfg_.variant);
                });
            top_h = lstm_seqs.back().back().h;
        } else {
            gru_seqs = unroll<GruLayer, GruState>(
                gru_layers_, window,
                [&](const GruLayer& l, std::span<const double> x, const GruState& prev) {
                    return gru_step(l, x, prev.h, cfg_.variant);
                });
            top_h = gru_seqs.back().back().h;
        }
        dense_forward(readout_, top_h, readout_cache);

        dout[0] = 2.0 * (readout_cache.output[0] - data.targets[i]) * inv_n;
        dense_backward(readout_, readout_cache, dout, d_readout_w, d_readout_b, d_top_h);

        // Per-layer external gradients: readout feeds the top layer's final step.
        std::vector<std::vector<double>> dh_ext(T);
        const std::size_t top_hidden =
            is_lstm ? lstm_layers_.back().hidden_size : gru_layers_.back().hidden_size;
        for (std::size_t t = 0; t < T; ++t) {
            dh_ext[t].assign(top_hidden, 0.0);
        }
        dh_ext[T - 1] = d_top_h;

        for (std::size_t l = n_layers; l-- > 0;) {
            std::vector<std::vector<double>> inputs;
            std::vector<std::vector<double>> dx;
            if (is_lstm) {
                const std::vector<std::vector<double>>* below = nullptr;
                std::vector<std::vector<double>> below_h;
                if (l > 0) {
                    below_h.reserve(T);
                    for (std::size_t t = 0; t < T; ++t) {
                        below_h.push_back(lstm_seqs[l - 1][t].h);
                    }
                    below = &below_h;
                }
                inputs = collect_inputs(window, below);
                lstm_bptt(lstm_layers_[l], cfg_.variant, lstm_seqs[l], inputs, dh_ext,
                          lstm_grads[l], dx);
            } else {
                const std::vector<std::vector<double>>* below = nullptr;
                std::vector<std::vector<double>> below_h;
                if (l > 0) {
                    below_h.reserve(T);
                    for (std::size_t t = 0; t < T; ++t) {
                        below_h.push_back(gru_seqs[l - 1][t].h);
                    }
                    below = &below_h;
                }
                inputs = collect_inputs(window, below);
                gru_bptt(gru_layers_[l], cfg_.variant, gru_seqs[l], inputs, dh_ext, gru_grads[l],
                         dx);
            }
            dh_ext = std::move(dx);  // becomes the external gradient for the layer below
        }
    }

    std::vector<double> flat;
    flat.reserve(parameter_count());
    auto push_matrix = [&](const Matrix& m) {
        flat.insert(flat.end(), m.data.begin(), m.data.end());
    };
    auto push_vec = [&](const std::vector<double>& v) {
        flat.insert(flat.end(), v.begin(), v.end());
    };
    for (const auto& g : lstm_grads) {
        push_matrix(g.dW_i); push_matrix(g.dW_f); push_matrix(g.dW_o); push_matrix(g.dW_g);
        push_matrix(g.dU_i); push_matrix(g.dU_f); push_matrix(g.dU_o); push_matrix(g.dU_g);
        push_vec(g.db_i); push_vec(g.db_f); push_vec(g.db_o); push_vec(g.db_g);
    }
    for (const auto& g : gru_grads) {
        push_matrix(g.dW_z); push_matrix(g.dW_r); push_matrix(g.dW_g);
        push_matrix(g.dU_z); push_matrix(g.dU_r); push_matrix(g.dU_g);
        push_vec(g.db_z); push_vec(g.db_r); push_vec(g.db_g);
    }
    push_matrix(d_readout_w);
    push_vec(d_readout_b);
    return flat;
}

}  // namespace swardcast::nn
