#ifndef DOASEL_MLP_HPP
#define DOASEL_MLP_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "doasel/rng.hpp"
#include "doasel/select.hpp"
#include "doasel/subarray.hpp"

namespace doasel {

/// Provenance stored with a trained model.
struct TrainingMetadata {
    std::uint64_t seed = 0;
    double u_min = -0.9;
    double u_max = 0.9;
    double snr_db_min = -10.0;
    double snr_db_max = 20.0;
    int n_samples = 0;
    int iterations = 0;
    int n_antennas = 0;
    int m_target = 0;
    double spacing = 0.0;
};

/// Fully connected network scoring a (direction, SNR) pair into per-antenna
/// scores: ReLU hidden layers, sigmoid output. Weights are row-major
/// g_{h-1} x g_h matrices so x_h = act(x_{h-1} W_h + b_h).
struct MlpModel {
    std::vector<int> layer_dims; // g_0 = 2, hidden sizes, g_{H+1} = N
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    double snr_scale = 1.0 / 30.0; // applied to the dB input
    TrainingMetadata meta;

    std::size_t parameter_count() const;
    std::uint64_t weight_multiplies() const; // sum of g_{h-1} * g_h
};

/// Fresh model with uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases.
MlpModel make_mlp(const std::vector<int>& layer_dims, RandomStream& rng);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
    int iterations = 200;
    double batch_fraction = 0.1;
};

struct TrainingSample {
    double u = 0.0;
    double snr_db = 0.0;
    SelectionVector label;
};

/// Network output for one input; every component lies strictly in (0, 1).
std::vector<double> forward(const MlpModel& model, double u, double snr_db);

/// Mean squared error against the 0/1 label.
double loss(std::span<const double> predicted, const SelectionVector& label);

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

/// Exact loss gradient for one sample (ReLU subgradient at zero taken as 0).
Gradients gradients(const MlpModel& model, const TrainingSample& sample);

struct AdamState {
    std::vector<std::vector<double>> m_weights, v_weights;
    std::vector<std::vector<double>> m_biases, v_biases;
    long step = 0;

    static AdamState zeros_like(const MlpModel& model);
};

/// One bias-corrected Adam update.
void adam_step(MlpModel& model, const Gradients& grads, AdamState& state,
               const AdamConfig& config);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Labeled (u, SNR) -> layout pairs produced by the greedy selector with a
/// single anchor at the drawn direction. Draws come sequentially from `rng`;
/// label computation may run on `threads` workers without changing the
/// result.
std::vector<TrainingSample> generate_dataset(int n_samples, Interval u_range,
                                             Interval snr_db_range,
                                             const SelectionQuery& query_template,
                                             RandomStream& rng, int threads = 1);

/// Mini-batch training: each iteration draws ceil(batch_fraction * |D|)
/// distinct samples, averages their gradients, applies one Adam step.
/// Returns the per-iteration batch loss (pre-update).
std::vector<double> train(MlpModel& model, const std::vector<TrainingSample>& dataset,
                          const AdamConfig& config, RandomStream& rng);

/// Mask selecting the m highest scores; ties go to the lower index.
SelectionVector select_top_m(std::span<const double> scores, int m);

/// Model-driven selection: forward pass then top-m thresholding.
SelectionVector select_with_model(const MlpModel& model, double u_hat,
                                  double snr_db, int m);

void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

} // namespace doasel

#endif // DOASEL_MLP_HPP
