#ifndef DOASEL_SIGNAL_HPP
#define DOASEL_SIGNAL_HPP

#include <complex>
#include <span>
#include <vector>

#include "doasel/rng.hpp"
#include "doasel/subarray.hpp"

namespace doasel {

using cdouble = std::complex<double>;

/// Narrowband single-source observation parameters. The symbol is a known
/// unit-magnitude pilot; noise_variance is the total complex noise variance
/// (split evenly between the real and imaginary parts).
struct SignalParams {
    cdouble channel_gain{1.0, 0.0};
    cdouble symbol{1.0, 0.0};
    double noise_variance = 1.0;
    int n_snapshots = 1;
};

struct Snapshot {
    std::vector<cdouble> observation;
    double true_direction = 0.0; // u = sin(theta)
};

/// Square complex matrix, row-major. Just enough for covariance handling.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(std::size_t dim)
        : dim_(dim), data_(dim * dim, cdouble{0.0, 0.0}) {}

    std::size_t dim() const { return dim_; }
    cdouble& at(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const cdouble& at(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
    cdouble trace() const;

private:
    std::size_t dim_;
    std::vector<cdouble> data_;
};

/// Steering vector a(u) with element m = exp(-i*pi*d_m*u). Requires |u| < 1.
std::vector<cdouble> steering_vector(const Subarray& sub, double u);

struct SnrDiversity {
    double snr = 0.0;       // aggregate S = M * Ns * |gain|^2 / noise_variance
    double diversity = 0.0; // positional variance U
};

SnrDiversity snr_and_diversity(const SignalParams& params, const Subarray& sub);

/// Parameters that make an m-element subarray observe aggregate SNR `snr`:
/// unit noise variance and a real positive channel gain.
SignalParams params_for_aggregate_snr(double snr, int m, int n_snapshots = 1);

/// y = gain * a(u) * symbol + noise. Deterministic given the stream state.
Snapshot generate_snapshot(const SignalParams& params, const Subarray& sub,
                           double u, RandomStream& rng);

/// Rank-one sample covariance y * y^H.
CovarianceMatrix sample_covariance(std::span<const cdouble> y);

} // namespace doasel

#endif // DOASEL_SIGNAL_HPP
