#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swardcast/nn/dense.hpp"
#include "swardcast/nn/matrix.hpp"
#include "swardcast/pipeline.hpp"

namespace swardcast::nn {

enum class CellKind { lstm, gru };

/**
 * Cell equation variant. `standard` is the textbook form: every bias is
 * added and the LSTM output is o_t * tanh(c_t). `paper_literal` flips the
 * input/output/candidate bias signs (update-gate bias for GRU) and emits
 * o_t * tanh(g_t) from the LSTM instead of reading the cell state.
 */
enum class CellVariant { standard, paper_literal };

std::string to_string(CellKind kind);
CellKind cell_kind_from_string(const std::string& name);

struct LstmLayer {
    Matrix W_i, W_f, W_o, W_g;  // hidden x input
    Matrix U_i, U_f, U_o, U_g;  // hidden x hidden
    std::vector<double> b_i, b_f, b_o, b_g;
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
};

/// Hidden and cell state after a step, with the gate values kept for inspection.
struct LstmState {
    std::vector<double> h, c;
    std::vector<double> i, f, o, g;

    static LstmState zero(std::size_t hidden);
};

LstmState lstm_step(const LstmLayer& layer, std::span<const double> x, const LstmState& prev,
                    CellVariant variant = CellVariant::standard);

struct GruLayer {
    Matrix W_z, W_r, W_g;
    Matrix U_z, U_r, U_g;
    std::vector<double> b_z, b_r, b_g;
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
};

struct GruState {
    std::vector<double> h;
    std::vector<double> z, r, g;

    static GruState zero(std::size_t hidden);
};

GruState gru_step(const GruLayer& layer, std::span<const double> x, std::span<const double> h_prev,
                  CellVariant variant = CellVariant::standard);

LstmLayer lstm_init(std::size_t input, std::size_t hidden, Rng& rng);
GruLayer gru_init(std::size_t input, std::size_t hidden, Rng& rng);

struct RnnConfig {
    CellKind cell = CellKind::lstm;
    std::vector<int> hidden_sizes = {10};
    int lag = 2;
    int batch_size = 32;
    int epochs = 50;
    std::uint64_t seed = 42;
    double learning_rate = 0.01;
    CellVariant variant = CellVariant::standard;

    void validate() const;
};

/**
 * Stacked recurrent one-step forecaster. Each scalar lag value is one
 * timestep input; layer k consumes layer k-1's hidden sequence; a single
 * linear neuron reads the top layer's final hidden state. Initial states are
 * zero for every window.
 */
class RnnModel {
public:
    static RnnModel init(const RnnConfig& config);

    double predict(std::span<const double> window) const;

    std::size_t parameter_count() const;
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> flat);

    double batch_loss(const WindowedDataset& data, std::size_t begin, std::size_t end) const;
    std::vector<double> batch_gradient(const WindowedDataset& data, std::size_t begin,
                                       std::size_t end) const;

    const RnnConfig& config() const { return cfg_; }
    const std::vector<LstmLayer>& lstm_layers() const { return lstm_layers_; }
    const std::vector<GruLayer>& gru_layers() const { return gru_layers_; }
    const DenseLayer& readout() const { return readout_; }

private:
    RnnConfig cfg_;
    std::vector<LstmLayer> lstm_layers_;
    std::vector<GruLayer> gru_layers_;
    DenseLayer readout_;

    friend struct RnnBackprop;
};

}  // namespace swardcast::nn
