#include "swardcast/forecaster.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include "swardcast/digest.hpp"
#include "swardcast/errors.hpp"

namespace swardcast {

using nlohmann::json;

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::arima: return "arima";
        case ModelFamily::lstm: return "lstm";
        case ModelFamily::gru: return "gru";
        case ModelFamily::mlp: return "mlp";
        case ModelFamily::tcn: return "tcn";
    }
    return "arima";
}

ModelFamily family_from_string(const std::string& name) {
    if (name == "arima") return ModelFamily::arima;
    if (name == "lstm") return ModelFamily::lstm;
    if (name == "gru") return ModelFamily::gru;
    if (name == "mlp") return ModelFamily::mlp;
    if (name == "tcn") return ModelFamily::tcn;
    throw ConfigError("unknown model family `" + name + "`");
}

namespace {

void reject_unknown_keys(const json& config, const std::set<std::string>& known) {
    for (auto it = config.begin(); it != config.end(); ++it) {
        if (!known.contains(it.key())) {
            throw ConfigError("unknown config key `" + it.key() + "`");
        }
    }
}

int get_int(const json& config, const char* key, int fallback) {
    if (!config.contains(key)) return fallback;
    const auto& v = config.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(std::string("config key `") + key + "` must be an integer");
    }
    return v.get<int>();
}

double get_double(const json& config, const char* key, double fallback) {
    if (!config.contains(key)) return fallback;
    const auto& v = config.at(key);
    if (!v.is_number()) {
        throw ConfigError(std::string("config key `") + key + "` must be a number");
    }
    return v.get<double>();
}

std::uint64_t get_seed(const json& config, std::uint64_t fallback) {
    if (!config.contains("seed")) return fallback;
    const auto& v = config.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
        throw ConfigError("config key `seed` must be an integer");
    }
    return v.get<std::uint64_t>();
}

std::vector<int> get_int_array(const json& config, const char* key,
                               const std::vector<int>& fallback) {
    if (!config.contains(key)) return fallback;
    const auto& v = config.at(key);
    if (!v.is_array()) {
        throw ConfigError(std::string("config key `") + key + "` must be an array of integers");
    }
    std::vector<int> out;
    for (const auto& item : v) {
        if (!item.is_number_integer()) {
            throw ConfigError(std::string("config key `") + key + "` must contain integers only");
        }
        out.push_back(item.get<int>());
    }
    return out;
}

}  // namespace

ArimaOrder arima_order_from_config(const json& config) {
    reject_unknown_keys(config, {"p", "d", "q"});
    ArimaOrder order;
    order.p = get_int(config, "p", 1);
    order.d = get_int(config, "d", 0);
    order.q = get_int(config, "q", 0);
    order.validate();
    return order;
}

nn::MlpConfig mlp_config_from_config(const json& config) {
    reject_unknown_keys(config,
                        {"layers", "batch_size", "epochs", "lag", "seed", "learning_rate"});
    nn::MlpConfig cfg;
    cfg.layer_sizes = get_int_array(config, "layers", {10});
    cfg.batch_size = get_int(config, "batch_size", 32);
    cfg.epochs = get_int(config, "epochs", 50);
    cfg.lag = get_int(config, "lag", 2);
    cfg.seed = get_seed(config, 42);
    cfg.learning_rate = get_double(config, "learning_rate", 0.01);
    cfg.validate();
    return cfg;
}

nn::RnnConfig rnn_config_from_config(ModelFamily family, const json& config) {
    reject_unknown_keys(config, {"layers", "batch_size", "epochs", "lag", "seed", "learning_rate",
                                 "paper_literal"});
    nn::RnnConfig cfg;
    cfg.cell = family == ModelFamily::lstm ? nn::CellKind::lstm : nn::CellKind::gru;
    cfg.hidden_sizes = get_int_array(config, "layers", {10});
    cfg.batch_size = get_int(config, "batch_size", 32);
    cfg.epochs = get_int(config, "epochs", 50);
    cfg.lag = get_int(config, "lag", 2);
    cfg.seed = get_seed(config, 42);
    cfg.learning_rate = get_double(config, "learning_rate", 0.01);
    if (config.contains("paper_literal")) {
        if (!config.at("paper_literal").is_boolean()) {
            throw ConfigError("config key `paper_literal` must be a boolean");
        }
        cfg.variant = config.at("paper_literal").get<bool>() ? nn::CellVariant::paper_literal
                                                             : nn::CellVariant::standard;
    }
    cfg.validate();
    return cfg;
}

nn::TcnConfig tcn_config_from_config(const json& config) {
    reject_unknown_keys(config, {"stacks", "filters", "kernel_size", "blocks", "dilations", "lag",
                                 "epochs", "batch_size", "seed", "learning_rate"});
    nn::TcnConfig cfg;
    cfg.stacks = get_int(config, "stacks", 1);
    cfg.filters = get_int(config, "filters", 16);
    cfg.kernel_size = get_int(config, "kernel_size", 2);
    cfg.blocks = get_int(config, "blocks", 2);
    cfg.dilations = get_int_array(config, "dilations", {1, 2, 4, 8, 16});
    cfg.lag = get_int(config, "lag", 2);
    cfg.epochs = get_int(config, "epochs", 30);
    cfg.batch_size = get_int(config, "batch_size", 32);
    cfg.seed = get_seed(config, 42);
    cfg.learning_rate = get_double(config, "learning_rate", 0.01);
    cfg.validate();
    return cfg;
}

json canonical_config(ModelFamily family, const json& config) {
    if (!config.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    json out;
    switch (family) {
        case ModelFamily::arima: {
            ArimaOrder order = arima_order_from_config(config);
            out = {{"p", order.p}, {"d", order.d}, {"q", order.q}};
            break;
        }
        case ModelFamily::mlp: {
            nn::MlpConfig cfg = mlp_config_from_config(config);
            out = {{"layers", cfg.layer_sizes}, {"batch_size", cfg.batch_size},
                   {"epochs", cfg.epochs},      {"lag", cfg.lag},
                   {"seed", cfg.seed},          {"learning_rate", cfg.learning_rate}};
            break;
        }
        case ModelFamily::lstm:
        case ModelFamily::gru: {
            nn::RnnConfig cfg = rnn_config_from_config(family, config);
            out = {{"layers", cfg.hidden_sizes},
                   {"batch_size", cfg.batch_size},
                   {"epochs", cfg.epochs},
                   {"lag", cfg.lag},
                   {"seed", cfg.seed},
                   {"learning_rate", cfg.learning_rate},
                   {"paper_literal", cfg.variant == nn::CellVariant::paper_literal}};
            break;
        }
        case ModelFamily::tcn: {
            nn::TcnConfig cfg = tcn_config_from_config(config);
            out = {{"stacks", cfg.stacks},
                   {"filters", cfg.filters},
                   {"kernel_size", cfg.kernel_size},
                   {"blocks", cfg.blocks},
                   {"dilations", cfg.dilations},
                   {"lag", cfg.lag},
                   {"epochs", cfg.epochs},
                   {"batch_size", cfg.batch_size},
                   {"seed", cfg.seed},
                   {"learning_rate", cfg.learning_rate}};
            break;
        }
    }
    return out;
}

std::string config_digest(ModelFamily family, const json& config) {
    return text_digest(canonical_config(family, config).dump());
}

std::size_t TrainedForecaster::input_lag() const {
    if (family == ModelFamily::arima) {
        ArimaOrder order = arima_order_from_config(config);
        return static_cast<std::size_t>(order.p + order.d);
    }
    return static_cast<std::size_t>(config.at("lag").get<int>());
}

namespace {

double predict_one(const TrainedForecaster& f, std::span<const double> window) {
    return std::visit(
        [&](const auto& model) -> double {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, ArimaModel>) {
                throw Error("internal: predict_one is not defined for arima");
            } else {
                return model.predict(window);
            }
        },
        f.model);
}

}  // namespace

std::vector<double> TrainedForecaster::forecast(const TimeSeries& history, int steps) const {
    if (steps < 1) {
        throw ConfigError("steps must be at least 1");
    }
    if (family == ModelFamily::arima) {
        return forecast_recursive(std::get<ArimaModel>(model), history, steps);
    }
    const std::size_t lag = input_lag();
    if (history.size() < lag) {
        throw InsufficientHistory("model needs " + std::to_string(lag) +
                                  " trailing values, data has " + std::to_string(history.size()));
    }
    if (!scaler) {
        throw Error("internal: neural model without normalization parameters");
    }
    std::vector<double> window(history.values.end() - static_cast<std::ptrdiff_t>(lag),
                               history.values.end());
    for (double& v : window) {
        v = transform_value(v, *scaler);
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) {
        double next = predict_one(*this, window);
        out.push_back(inverse_transform_value(next, *scaler));
        window.erase(window.begin());
        window.push_back(next);
    }
    return out;
}

double TrainedForecaster::predict_next(const TimeSeries& history) const {
    return forecast(history, 1).front();
}

namespace {

constexpr char kModelMagic[4] = {'S', 'W', 'C', 'M'};
constexpr std::uint32_t kModelVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ofstream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

double read_f64(std::ifstream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

std::vector<double> model_parameters(const TrainedForecaster& f) {
    return std::visit(
        [](const auto& model) -> std::vector<double> {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, ArimaModel>) {
                std::vector<double> flat;
                flat.push_back(model.c);
                flat.insert(flat.end(), model.phi.begin(), model.phi.end());
                flat.insert(flat.end(), model.theta.begin(), model.theta.end());
                return flat;
            } else {
                return model.parameters();
            }
        },
        f.model);
}

}  // namespace

void TrainedForecaster::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out.write(kModelMagic, sizeof(kModelMagic));
    write_u32(out, kModelVersion);
    const auto family_tag = static_cast<std::uint32_t>(family);
    write_u32(out, family_tag);
    write_u32(out, scaler ? 1u : 0u);
    if (scaler) {
        write_f64(out, scaler->min);
        write_f64(out, scaler->max);
    }
    const std::string config_dump = config.dump();
    const std::string digest = text_digest(config_dump);
    write_u64(out, digest.size());
    out.write(digest.data(), static_cast<std::streamsize>(digest.size()));
    write_u64(out, config_dump.size());
    out.write(config_dump.data(), static_cast<std::streamsize>(config_dump.size()));
    const std::vector<double> params = model_parameters(*this);
    write_u64(out, params.size());
    for (double p : params) {
        write_f64(out, p);
    }
    if (!out) {
        throw IoError("failed while writing " + path);
    }
}

TrainedForecaster TrainedForecaster::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
        throw IoError(path + " is not a swardcast model file");
    }
    const std::uint32_t version = read_u32(in);
    if (version != kModelVersion) {
        throw IoError("unsupported model file version " + std::to_string(version));
    }
    TrainedForecaster f;
    f.family = static_cast<ModelFamily>(read_u32(in));
    if (read_u32(in) != 0) {
        MinMaxParams scaler;
        scaler.min = read_f64(in);
        scaler.max = read_f64(in);
        f.scaler = scaler;
    }
    const std::uint64_t digest_len = read_u64(in);
    std::string digest(digest_len, '\0');
    in.read(digest.data(), static_cast<std::streamsize>(digest_len));
    const std::uint64_t config_len = read_u64(in);
    std::string config_dump(config_len, '\0');
    in.read(config_dump.data(), static_cast<std::streamsize>(config_len));
    if (!in || text_digest(config_dump) != digest) {
        throw IoError("config digest mismatch in " + path);
    }
    f.config = json::parse(config_dump);

    const std::uint64_t param_count = read_u64(in);
    std::vector<double> params(param_count);
    for (auto& p : params) {
        p = read_f64(in);
    }
    if (!in) {
        throw IoError("truncated model file " + path);
    }

    switch (f.family) {
        case ModelFamily::arima: {
            ArimaModel model;
            model.order = arima_order_from_config(f.config);
            const auto p = static_cast<std::size_t>(model.order.p);
            const auto q = static_cast<std::size_t>(model.order.q);
            if (params.size() != 1 + p + q) {
                throw IoError("arima parameter count mismatch in " + path);
            }
            model.c = params[0];
            model.phi.assign(params.begin() + 1, params.begin() + 1 + static_cast<std::ptrdiff_t>(p));
            model.theta.assign(params.begin() + 1 + static_cast<std::ptrdiff_t>(p), params.end());
            f.model = std::move(model);
            break;
        }
        case ModelFamily::mlp: {
            auto model = nn::MlpModel::init(mlp_config_from_config(f.config));
            model.set_parameters(params);
            f.model = std::move(model);
            break;
        }
        case ModelFamily::lstm:
        case ModelFamily::gru: {
            auto model = nn::RnnModel::init(rnn_config_from_config(f.family, f.config));
            model.set_parameters(params);
            f.model = std::move(model);
            break;
        }
        case ModelFamily::tcn: {
            auto model = nn::TcnModel::init(tcn_config_from_config(f.config));
            model.set_parameters(params);
            f.model = std::move(model);
            break;
        }
        default:
            throw IoError("unknown model family tag in " + path);
    }
    return f;
}

namespace {

ResidualSummary summarize_residuals(const std::vector<double>& residuals) {
    ResidualSummary s;
    s.n = residuals.size();
    if (s.n == 0) {
        return s;
    }
    double sum = 0.0;
    for (double r : residuals) sum += r;
    s.mean = sum / static_cast<double>(s.n);
    double var = 0.0;
    for (double r : residuals) var += (r - s.mean) * (r - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(s.n));
    return s;
}

template <typename Model>
std::vector<double> predict_windows(const Model& model, const WindowedDataset& data) {
    std::vector<double> out;
    out.reserve(data.size());
    for (const auto& row : data.inputs) {
        out.push_back(model.predict(row));
    }
    return out;
}

struct NeuralEval {
    std::vector<double> val_pred;
    std::vector<double> test_pred;
    nn::TrainingTrace trace;
};

template <typename Model>
NeuralEval train_and_predict(Model& model, const DatasetSplits& splits,
                             const MinMaxParams& scaler, int lag, const nn::TrainSettings& settings) {
    const TimeSeries norm_train = transform(splits.train, scaler);
    const TimeSeries norm_val = transform(splits.val, scaler);
    const TimeSeries norm_test = transform(splits.test, scaler);
    const WindowedDataset wtrain = window(norm_train, lag);
    const WindowedDataset wval = window(norm_val, lag);
    const WindowedDataset wtest = window(norm_test, lag);

    NeuralEval eval;
    eval.trace = nn::train_model(model, wtrain, wval, settings);
    eval.val_pred = predict_windows(model, wval);
    eval.test_pred = predict_windows(model, wtest);
    for (double& v : eval.val_pred) v = inverse_transform_value(v, scaler);
    for (double& v : eval.test_pred) v = inverse_transform_value(v, scaler);
    return eval;
}

}  // namespace

FitOutcome fit_and_evaluate(ModelFamily family, const json& config, const TimeSeries& series,
                            const SplitSpec& split_spec) {
    const json canonical = canonical_config(family, config);
    const std::string digest = text_digest(canonical.dump());
    const std::string tag = to_string(family);

    DatasetSplits splits = split(series, split_spec);

    FitOutcome outcome;
    outcome.split_sizes = {splits.train.size(), splits.val.size(), splits.test.size()};
    outcome.forecaster.family = family;
    outcome.forecaster.config = canonical;

    const auto started = std::chrono::steady_clock::now();
    std::vector<double> val_pred, test_pred;

    if (family == ModelFamily::arima) {
        ArimaOrder order = arima_order_from_config(canonical);
        ArimaModel model = ArimaModel::fit(splits.train, order);
        val_pred = walk_forward(model, series, splits.train.size(), splits.val.size());
        test_pred = forecast_test(model, series, splits);
        outcome.residuals = summarize_residuals(model.residuals);
        outcome.stationary_warning = !model.stationary() || !model.invertible();
        outcome.forecaster.model = std::move(model);
    } else {
        MinMaxParams scaler = fit_minmax(splits.train);
        outcome.forecaster.scaler = scaler;
        NeuralEval eval;
        if (family == ModelFamily::mlp) {
            nn::MlpConfig cfg = mlp_config_from_config(canonical);
            auto model = nn::MlpModel::init(cfg);
            eval = train_and_predict(model, splits, scaler, cfg.lag,
                                     {cfg.epochs, cfg.batch_size, cfg.learning_rate});
            outcome.forecaster.model = std::move(model);
        } else if (family == ModelFamily::tcn) {
            nn::TcnConfig cfg = tcn_config_from_config(canonical);
            auto model = nn::TcnModel::init(cfg);
            eval = train_and_predict(model, splits, scaler, cfg.lag,
                                     {cfg.epochs, cfg.batch_size, cfg.learning_rate});
            outcome.forecaster.model = std::move(model);
        } else {
            nn::RnnConfig cfg = rnn_config_from_config(family, canonical);
            auto model = nn::RnnModel::init(cfg);
            eval = train_and_predict(model, splits, scaler, cfg.lag,
                                     {cfg.epochs, cfg.batch_size, cfg.learning_rate});
            outcome.forecaster.model = std::move(model);
        }
        val_pred = std::move(eval.val_pred);
        test_pred = std::move(eval.test_pred);
        outcome.trace = std::move(eval.trace);
    }

    const auto finished = std::chrono::steady_clock::now();
    outcome.runtime_seconds = std::chrono::duration<double>(finished - started).count();

    // Observed values come from windowing the raw splits so metrics are in cm.
    std::vector<double> val_observed, test_observed;
    if (family == ModelFamily::arima) {
        val_observed = splits.val.values;
        test_observed = splits.test.values;
    } else {
        const int lag = canonical.at("lag").get<int>();
        val_observed = window(splits.val, lag).targets;
        test_observed = window(splits.test, lag).targets;
    }
    outcome.val_report = evaluate(val_observed, val_pred, outcome.runtime_seconds, tag, digest);
    outcome.test_report = evaluate(test_observed, test_pred, outcome.runtime_seconds, tag, digest);
    return outcome;
}

}  // namespace swardcast
