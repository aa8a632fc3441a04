#include "doasel/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace doasel {

namespace {

void validate_params(const SignalParams& params) {
    if (!(params.noise_variance > 0.0)) {
        throw std::invalid_argument("SignalParams: noise variance must be positive");
    }
    if (std::abs(std::abs(params.symbol) - 1.0) > 1e-12) {
        throw std::invalid_argument("SignalParams: symbol must have unit magnitude");
    }
    if (params.n_snapshots < 1) {
        throw std::invalid_argument("SignalParams: need at least one snapshot");
    }
}

} // namespace

cdouble CovarianceMatrix::trace() const {
    cdouble t{0.0, 0.0};
    for (std::size_t i = 0; i < dim_; ++i) {
        t += at(i, i);
    }
    return t;
}

std::vector<cdouble> steering_vector(const Subarray& sub, double u) {
    if (!(u > -1.0 && u < 1.0)) {
        throw std::invalid_argument("steering_vector: u must lie in (-1, 1)");
    }
    std::vector<cdouble> a;
    a.reserve(sub.size());
    for (double d : sub.positions()) {
        a.push_back(std::polar(1.0, -std::numbers::pi * d * u));
    }
    return a;
}

SnrDiversity snr_and_diversity(const SignalParams& params, const Subarray& sub) {
    validate_params(params);
    const double m = static_cast<double>(sub.size());
    const double gain2 = std::norm(params.channel_gain);
    SnrDiversity out;
    out.snr = m * static_cast<double>(params.n_snapshots) * gain2 / params.noise_variance;
    out.diversity = position_variance(sub);
    return out;
}

SignalParams params_for_aggregate_snr(double snr, int m, int n_snapshots) {
    if (!(snr > 0.0)) {
        throw std::invalid_argument("params_for_aggregate_snr: snr must be positive");
    }
    if (m < 1 || n_snapshots < 1) {
        throw std::invalid_argument("params_for_aggregate_snr: bad subarray size or snapshot count");
    }
    SignalParams params;
    params.channel_gain = {std::sqrt(snr / (static_cast<double>(m) * n_snapshots)), 0.0};
    return params;
}

Snapshot generate_snapshot(const SignalParams& params, const Subarray& sub,
                           double u, RandomStream& rng) {
    validate_params(params);
    Snapshot snap;
    snap.true_direction = u;
    snap.observation = steering_vector(sub, u);
    for (cdouble& y : snap.observation) {
        y = params.channel_gain * y * params.symbol + rng.complex_gaussian(params.noise_variance);
    }
    return snap;
}

CovarianceMatrix sample_covariance(std::span<const cdouble> y) {
    if (y.empty()) {
        throw std::invalid_argument("sample_covariance: empty observation");
    }
    CovarianceMatrix r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            r.at(i, j) = y[i] * std::conj(y[j]);
        }
    }
    return r;
}

} // namespace doasel
