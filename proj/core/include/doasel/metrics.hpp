#ifndef DOASEL_METRICS_HPP
#define DOASEL_METRICS_HPP

#include <utility>
#include <vector>

#include "doasel/subarray.hpp"

namespace doasel {

/// Default resolution of the sidelobe-search grid.
inline constexpr int kDefaultGridPoints = 2048;

struct SidelobePeak {
    double location = 0.0;    // u_k
    double value = 0.0;       // V(u0, u_k)
    double correlation = 0.0; // |a^H(u0) a(u_k)| = sqrt(value)
};

/// Sidelobe structure of the noise-free beampattern around one source
/// direction, extracted from a uniform grid scan over (-1, 1). The mainlobe
/// is the interval around u0 bounded by the first local minima on each side;
/// strict local maxima outside it are kept, each refined by one parabolic
/// interpolation step. Grid edge points never count as peaks.
struct BeampatternProfile {
    double source = 0.0;    // u0
    double peak_main = 0.0; // M^2
    std::vector<SidelobePeak> sidelobes;
    int grid_points = 0;

    int count() const { return static_cast<int>(sidelobes.size()); }
};

struct AnchorSet {
    std::vector<double> anchors;
};

struct TraOptions {
    /// Clamp the non-outlier weight (1 - sum of outlier probabilities) at
    /// zero instead of letting it go negative at very low SNR.
    bool clamp_nonoutlier = false;
};

/// i-th point of the n-point evaluation grid spanning the open interval
/// (-1, 1). The grid is symmetric under negation: u(n-1-i) == -u(i).
inline double grid_point(int i, int n) {
    return static_cast<double>(2 * (i + 1) - (n + 1)) / static_cast<double>(n + 1);
}

/// Noise-free beampattern V(u0, u) = |a^H(u) a(u0)|^2, in [0, M^2].
double beampattern(const Subarray& sub, double u0, double u);

/// Beampattern on the canonical n-point grid; (u_i, V_i) pairs.
std::vector<std::pair<double, double>> beampattern_grid(const Subarray& sub,
                                                        double u0, int n_grid);

BeampatternProfile sidelobe_profile(const Subarray& sub, double u0, int n_grid);

/// Peak sidelobe level: highest sidelobe over the mainlobe peak, in [0, 1);
/// zero for a profile without sidelobes.
double psl(const BeampatternProfile& profile);

/// Single-source DOA variance bound 1/(2 pi^2 S U) in u^2 units.
double crlb(double snr, const Subarray& sub);

/// exp(-x) * I0(x) to relative error <= 1e-12 (power series up to x = 15,
/// optimally truncated asymptotic series above).
double bessel_i0_scaled(double x);

/// Probability that the estimate jumps to a sidelobe with steering
/// correlation `correlation`, evaluated in overflow-safe form; in [0, 1/2].
double outlier_probability(double snr, double correlation, int m);

/// Threshold-region MSE approximation from a precomputed profile:
/// (1 - sum Pk) * CRLB + sum Pk * (u_k - u0)^2.
double tra_mse(const BeampatternProfile& profile, double snr, const Subarray& sub,
               const TraOptions& opts = {});

/// Convenience overload that builds the profile at u0 first.
double tra_mse(double u0, double snr, const Subarray& sub, int n_grid,
               const TraOptions& opts = {});

/// Worst (largest) tra_mse across the anchor directions.
double worst_case_tra(const AnchorSet& anchors, double snr, const Subarray& sub,
                      int n_grid, const TraOptions& opts = {});

/// Anchor directions around a prior u_hat: {u_hat} for a single anchor,
/// otherwise an odd number of points evenly spanning
/// [u_hat - delta_u, u_hat + delta_u]; every anchor is clamped into
/// [-0.995, 0.995].
AnchorSet anchor_set(double u_hat, double delta_u, int n_anchors);

} // namespace doasel

#endif // DOASEL_METRICS_HPP
