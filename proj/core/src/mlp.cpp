#include "doasel/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "doasel/parallel.hpp"

namespace doasel {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void validate_dims(const std::vector<int>& dims) {
    if (dims.size() < 2) {
        throw std::invalid_argument("MlpModel: need at least input and output layers");
    }
    for (int g : dims) {
        if (g < 1) {
            throw std::invalid_argument("MlpModel: every layer needs at least one unit");
        }
    }
}

void validate_model(const MlpModel& model) {
    validate_dims(model.layer_dims);
    const std::size_t layers = model.layer_dims.size() - 1;
    if (model.weights.size() != layers || model.biases.size() != layers) {
        throw std::invalid_argument("MlpModel: layer count mismatch");
    }
    for (std::size_t h = 0; h < layers; ++h) {
        const std::size_t rows = static_cast<std::size_t>(model.layer_dims[h]);
        const std::size_t cols = static_cast<std::size_t>(model.layer_dims[h + 1]);
        if (model.weights[h].size() != rows * cols || model.biases[h].size() != cols) {
            throw std::invalid_argument("MlpModel: weight or bias shape mismatch");
        }
    }
}

// Pre-activations and post-activations for every layer.
struct ForwardTrace {
    std::vector<std::vector<double>> pre;  // z_1 .. z_{H+1}
    std::vector<std::vector<double>> post; // x_0 .. x_{H+1}
};

ForwardTrace run_forward(const MlpModel& model, double u, double snr_db) {
    ForwardTrace trace;
    const std::size_t layers = model.layer_dims.size() - 1;
    trace.pre.resize(layers);
    trace.post.resize(layers + 1);
    if (model.layer_dims.front() != 2) {
        throw std::invalid_argument("forward: model expects a 2-component input");
    }
    trace.post[0] = {u, snr_db * model.snr_scale};

    for (std::size_t h = 0; h < layers; ++h) {
        const std::size_t rows = static_cast<std::size_t>(model.layer_dims[h]);
        const std::size_t cols = static_cast<std::size_t>(model.layer_dims[h + 1]);
        const std::vector<double>& in = trace.post[h];
        std::vector<double> z(model.biases[h]);
        for (std::size_t i = 0; i < rows; ++i) {
            const double xi = in[i];
            if (xi == 0.0) {
                continue;
            }
            const double* w = model.weights[h].data() + i * cols;
            for (std::size_t j = 0; j < cols; ++j) {
                z[j] += xi * w[j];
            }
        }
        trace.pre[h] = z;
        std::vector<double> x(cols);
        if (h + 1 == layers) {
            for (std::size_t j = 0; j < cols; ++j) {
                x[j] = sigmoid(z[j]);
            }
        } else {
            for (std::size_t j = 0; j < cols; ++j) {
                x[j] = z[j] > 0.0 ? z[j] : 0.0;
            }
        }
        trace.post[h + 1] = std::move(x);
    }
    return trace;
}

} // namespace

std::size_t MlpModel::parameter_count() const {
    std::size_t count = 0;
    for (std::size_t h = 0; h + 1 < layer_dims.size(); ++h) {
        count += static_cast<std::size_t>(layer_dims[h]) * static_cast<std::size_t>(layer_dims[h + 1]) +
                 static_cast<std::size_t>(layer_dims[h + 1]);
    }
    return count;
}

std::uint64_t MlpModel::weight_multiplies() const {
    std::uint64_t count = 0;
    for (std::size_t h = 0; h + 1 < layer_dims.size(); ++h) {
        count += static_cast<std::uint64_t>(layer_dims[h]) * static_cast<std::uint64_t>(layer_dims[h + 1]);
    }
    return count;
}

MlpModel make_mlp(const std::vector<int>& layer_dims, RandomStream& rng) {
    validate_dims(layer_dims);
    MlpModel model;
    model.layer_dims = layer_dims;
    const std::size_t layers = layer_dims.size() - 1;
    model.weights.resize(layers);
    model.biases.resize(layers);
    for (std::size_t h = 0; h < layers; ++h) {
        const std::size_t rows = static_cast<std::size_t>(layer_dims[h]);
        const std::size_t cols = static_cast<std::size_t>(layer_dims[h + 1]);
        const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        model.weights[h].resize(rows * cols);
        for (double& w : model.weights[h]) {
            w = rng.uniform(-bound, bound);
        }
        model.biases[h].assign(cols, 0.0);
    }
    return model;
}

std::vector<double> forward(const MlpModel& model, double u, double snr_db) {
    validate_model(model);
    return run_forward(model, u, snr_db).post.back();
}

double loss(std::span<const double> predicted, const SelectionVector& label) {
    if (predicted.size() != label.size()) {
        throw std::invalid_argument("loss: prediction and label lengths differ");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double diff = predicted[i] - (label.bit(i) ? 1.0 : 0.0);
        sum += diff * diff;
    }
    return sum / static_cast<double>(predicted.size());
}

Gradients gradients(const MlpModel& model, const TrainingSample& sample) {
    validate_model(model);
    if (sample.label.size() != static_cast<std::size_t>(model.layer_dims.back())) {
        throw std::invalid_argument("gradients: label length does not match the output layer");
    }
    const ForwardTrace trace = run_forward(model, sample.u, sample.snr_db);
    const std::size_t layers = model.layer_dims.size() - 1;

    Gradients grads;
    grads.weights.resize(layers);
    grads.biases.resize(layers);

    // d(loss)/d(pre-activation) of the output layer.
    const std::vector<double>& out = trace.post[layers];
    const double n_out = static_cast<double>(out.size());
    std::vector<double> delta(out.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double target = sample.label.bit(j) ? 1.0 : 0.0;
        delta[j] = 2.0 / n_out * (out[j] - target) * out[j] * (1.0 - out[j]);
    }

    for (std::size_t h = layers; h-- > 0;) {
        const std::size_t rows = static_cast<std::size_t>(model.layer_dims[h]);
        const std::size_t cols = static_cast<std::size_t>(model.layer_dims[h + 1]);
        grads.biases[h] = delta;
        grads.weights[h].assign(rows * cols, 0.0);
        const std::vector<double>& in = trace.post[h];
        for (std::size_t i = 0; i < rows; ++i) {
            const double xi = in[i];
            if (xi == 0.0) {
                continue;
            }
            double* gw = grads.weights[h].data() + i * cols;
            for (std::size_t j = 0; j < cols; ++j) {
                gw[j] = xi * delta[j];
            }
        }
        if (h == 0) {
            break;
        }
        std::vector<double> prev(rows, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            if (trace.pre[h - 1][i] <= 0.0) {
                continue; // dead ReLU path, subgradient 0
            }
            const double* w = model.weights[h].data() + i * cols;
            double acc = 0.0;
            for (std::size_t j = 0; j < cols; ++j) {
                acc += w[j] * delta[j];
            }
            prev[i] = acc;
        }
        delta = std::move(prev);
    }
    return grads;
}

AdamState AdamState::zeros_like(const MlpModel& model) {
    AdamState state;
    const std::size_t layers = model.weights.size();
    state.m_weights.resize(layers);
    state.v_weights.resize(layers);
    state.m_biases.resize(layers);
    state.v_biases.resize(layers);
    for (std::size_t h = 0; h < layers; ++h) {
        state.m_weights[h].assign(model.weights[h].size(), 0.0);
        state.v_weights[h].assign(model.weights[h].size(), 0.0);
        state.m_biases[h].assign(model.biases[h].size(), 0.0);
        state.v_biases[h].assign(model.biases[h].size(), 0.0);
    }
    return state;
}

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state,
               const AdamConfig& config) {
    if (grads.weights.size() != model.weights.size() ||
        grads.biases.size() != model.biases.size()) {
        throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));

    const auto update = [&](std::vector<double>& params, const std::vector<double>& g,
                            std::vector<double>& m, std::vector<double>& v) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
    };
    for (std::size_t h = 0; h < model.weights.size(); ++h) {
        update(model.weights[h], grads.weights[h], state.m_weights[h], state.v_weights[h]);
        update(model.biases[h], grads.biases[h], state.m_biases[h], state.v_biases[h]);
    }
}

std::vector<TrainingSample> generate_dataset(int n_samples, Interval u_range,
                                             Interval snr_db_range,
                                             const SelectionQuery& query_template,
                                             RandomStream& rng, int threads) {
    if (n_samples < 1) {
        throw std::invalid_argument("generate_dataset: need at least one sample");
    }
    // All randomness happens up front so label computation can fan out.
    std::vector<std::pair<double, double>> inputs(static_cast<std::size_t>(n_samples));
    for (auto& in : inputs) {
        in.first = rng.uniform(u_range.lo, u_range.hi);
        in.second = rng.uniform(snr_db_range.lo, snr_db_range.hi);
    }

    std::vector<std::optional<TrainingSample>> staged(inputs.size());
    parallel_for(n_samples, threads, [&](int i) {
        const auto& in = inputs[static_cast<std::size_t>(i)];
        SelectionQuery query = query_template;
        query.anchors = anchor_set(in.first, 0.0, 1);
        query.snr = std::pow(10.0, in.second / 10.0);
        query.threads = 1;
        const SelectionResult picked = select_greedy_tra(query);
        staged[static_cast<std::size_t>(i)] =
            TrainingSample{in.first, in.second, picked.chosen};
    });

    std::vector<TrainingSample> samples;
    samples.reserve(staged.size());
    for (auto& s : staged) {
        samples.push_back(std::move(*s));
    }
    return samples;
}

std::vector<double> train(MlpModel& model, const std::vector<TrainingSample>& dataset,
                          const AdamConfig& config, RandomStream& rng) {
    validate_model(model);
    if (dataset.empty()) {
        throw std::invalid_argument("train: empty dataset");
    }
    if (!(config.batch_fraction > 0.0 && config.batch_fraction <= 1.0)) {
        throw std::invalid_argument("train: batch_fraction must lie in (0, 1]");
    }

    const std::size_t n = dataset.size();
    const std::size_t batch = static_cast<std::size_t>(
        std::ceil(config.batch_fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    AdamState state = AdamState::zeros_like(model);
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(std::max(config.iterations, 0)));

    for (int it = 0; it < config.iterations; ++it) {
        // Partial Fisher-Yates: the first `batch` entries become the batch.
        for (std::size_t i = 0; i < batch; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(
                rng.uniform() * static_cast<double>(n - i));
            std::swap(order[i], order[std::min(j, n - 1)]);
        }

        Gradients total;
        double batch_loss = 0.0;
        for (std::size_t i = 0; i < batch; ++i) {
            const TrainingSample& sample = dataset[order[i]];
            Gradients g = gradients(model, sample);
            batch_loss += loss(forward(model, sample.u, sample.snr_db), sample.label);
            if (total.weights.empty()) {
                total = std::move(g);
            } else {
                for (std::size_t h = 0; h < total.weights.size(); ++h) {
                    for (std::size_t k = 0; k < total.weights[h].size(); ++k) {
                        total.weights[h][k] += g.weights[h][k];
                    }
                    for (std::size_t k = 0; k < total.biases[h].size(); ++k) {
                        total.biases[h][k] += g.biases[h][k];
                    }
                }
            }
        }
        const double scale = 1.0 / static_cast<double>(batch);
        for (auto& layer : total.weights) {
            for (double& g : layer) {
                g *= scale;
            }
        }
        for (auto& layer : total.biases) {
            for (double& g : layer) {
                g *= scale;
            }
        }
        adam_step(model, total, state, config);
        history.push_back(batch_loss * scale);
    }
    return history;
}

SelectionVector select_top_m(std::span<const double> scores, int m) {
    const int n = static_cast<int>(scores.size());
    if (m < 1 || m > n) {
        throw std::invalid_argument("select_top_m: need 1 <= m <= score count");
    }
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)]) {
            return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
        }
        return a < b;
    });
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < m; ++i) {
        bits[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
    }
    return SelectionVector(std::move(bits));
}

SelectionVector select_with_model(const MlpModel& model, double u_hat,
                                  double snr_db, int m) {
    const std::vector<double> scores = forward(model, u_hat, snr_db);
    return select_top_m(scores, m);
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
    validate_model(model);
    nlohmann::json j;
    j["layer_dims"] = model.layer_dims;
    j["weights"] = model.weights;
    j["biases"] = model.biases;
    j["input_norm"] = {{"snr_scale", model.snr_scale}};
    j["training"] = {
        {"seed", model.meta.seed},         {"u_min", model.meta.u_min},
        {"u_max", model.meta.u_max},       {"snr_db_min", model.meta.snr_db_min},
        {"snr_db_max", model.meta.snr_db_max}, {"n_samples", model.meta.n_samples},
        {"iterations", model.meta.iterations}, {"n_antennas", model.meta.n_antennas},
        {"m_target", model.meta.m_target}, {"spacing", model.meta.spacing},
    };
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("save_model: cannot open " + path.string());
    }
    out << j.dump(1) << '\n';
    if (!out) {
        throw std::runtime_error("save_model: write failed for " + path.string());
    }
}

MlpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_model: cannot open " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_model: malformed model file: " + std::string(e.what()));
    }

    MlpModel model;
    try {
        model.layer_dims = j.at("layer_dims").get<std::vector<int>>();
        model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
        model.biases = j.at("biases").get<std::vector<std::vector<double>>>();
        model.snr_scale = j.at("input_norm").at("snr_scale").get<double>();
        const auto& t = j.at("training");
        model.meta.seed = t.at("seed").get<std::uint64_t>();
        model.meta.u_min = t.at("u_min").get<double>();
        model.meta.u_max = t.at("u_max").get<double>();
        model.meta.snr_db_min = t.at("snr_db_min").get<double>();
        model.meta.snr_db_max = t.at("snr_db_max").get<double>();
        model.meta.n_samples = t.at("n_samples").get<int>();
        model.meta.iterations = t.at("iterations").get<int>();
        model.meta.n_antennas = t.at("n_antennas").get<int>();
        model.meta.m_target = t.at("m_target").get<int>();
        model.meta.spacing = t.at("spacing").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_model: malformed model file: " + std::string(e.what()));
    }
    validate_model(model);
    return model;
}

} // namespace doasel
