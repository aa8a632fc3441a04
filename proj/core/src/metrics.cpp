#include "doasel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace doasel {

namespace {

using cdouble = std::complex<double>;

void check_direction(double u, const char* what) {
    if (!(u > -1.0 && u < 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in (-1, 1)");
    }
}

// |sum_m exp(i*pi*d_m*v)|^2 for v = u - u0.
double pattern_at_offset(const std::vector<double>& d, double v) {
    cdouble sum{0.0, 0.0};
    for (double p : d) {
        sum += std::polar(1.0, std::numbers::pi * p * v);
    }
    return std::norm(sum);
}

// Beampattern on the canonical grid via per-element phasor recurrence:
// one complex multiply per element per point instead of a sin/cos pair.
std::vector<double> scan_pattern(const std::vector<double>& d, double u0, int n_grid) {
    const std::size_t m = d.size();
    const double step = 2.0 / static_cast<double>(n_grid + 1);

    std::vector<cdouble> phasor(m);
    std::vector<cdouble> rot(m);
    const double v0 = grid_point(0, n_grid) - u0;
    for (std::size_t k = 0; k < m; ++k) {
        phasor[k] = std::polar(1.0, std::numbers::pi * d[k] * v0);
        rot[k] = std::polar(1.0, std::numbers::pi * d[k] * step);
    }

    std::vector<double> values(static_cast<std::size_t>(n_grid));
    for (int i = 0; i < n_grid; ++i) {
        cdouble sum{0.0, 0.0};
        for (std::size_t k = 0; k < m; ++k) {
            sum += phasor[k];
            phasor[k] *= rot[k];
        }
        values[static_cast<std::size_t>(i)] = std::norm(sum);
    }
    return values;
}

int nearest_grid_index(double u0, int n_grid) {
    const double t = (u0 + 1.0) * static_cast<double>(n_grid + 1) / 2.0 - 1.0;
    long i = std::lround(t);
    if (i < 0) {
        i = 0;
    }
    if (i > n_grid - 1) {
        i = n_grid - 1;
    }
    return static_cast<int>(i);
}

} // namespace

double beampattern(const Subarray& sub, double u0, double u) {
    check_direction(u0, "u0");
    check_direction(u, "u");
    return pattern_at_offset(sub.positions(), u - u0);
}

std::vector<std::pair<double, double>> beampattern_grid(const Subarray& sub,
                                                        double u0, int n_grid) {
    check_direction(u0, "u0");
    if (n_grid < 2) {
        throw std::invalid_argument("beampattern_grid: need at least 2 grid points");
    }
    const std::vector<double> values = scan_pattern(sub.positions(), u0, n_grid);
    std::vector<std::pair<double, double>> out(values.size());
    for (int i = 0; i < n_grid; ++i) {
        out[static_cast<std::size_t>(i)] = {grid_point(i, n_grid),
                                            values[static_cast<std::size_t>(i)]};
    }
    return out;
}

BeampatternProfile sidelobe_profile(const Subarray& sub, double u0, int n_grid) {
    check_direction(u0, "u0");
    if (n_grid < 64) {
        throw std::invalid_argument("sidelobe_profile: need at least 64 grid points");
    }

    BeampatternProfile profile;
    profile.source = u0;
    const double m = static_cast<double>(sub.size());
    profile.peak_main = m * m;
    profile.grid_points = n_grid;

    // One element radiates a constant pattern: nothing to find.
    if (sub.size() == 1) {
        return profile;
    }

    const std::vector<double> v = scan_pattern(sub.positions(), u0, n_grid);

    // Mainlobe: descend from the grid point nearest u0 to the first local
    // minimum on each side.
    int left = nearest_grid_index(u0, n_grid);
    int right = left;
    while (right + 1 < n_grid && v[static_cast<std::size_t>(right + 1)] < v[static_cast<std::size_t>(right)]) {
        ++right;
    }
    while (left > 0 && v[static_cast<std::size_t>(left - 1)] < v[static_cast<std::size_t>(left)]) {
        --left;
    }

    const double step = 2.0 / static_cast<double>(n_grid + 1);
    for (int i = 1; i + 1 < n_grid; ++i) {
        if (i >= left && i <= right) {
            continue;
        }
        const double a = v[static_cast<std::size_t>(i - 1)];
        const double b = v[static_cast<std::size_t>(i)];
        const double c = v[static_cast<std::size_t>(i + 1)];
        if (!(b > a && b > c)) {
            continue;
        }
        // One parabolic step through the three samples around the maximum.
        const double denom = a + c - 2.0 * b;
        double offset = 0.0;
        double value = b;
        if (denom < 0.0) {
            offset = (a - c) / (2.0 * denom);
            value = b - (a - c) * (a - c) / (8.0 * denom);
        }
        SidelobePeak peak;
        peak.location = grid_point(i, n_grid) + offset * step;
        peak.value = value;
        peak.correlation = std::min(std::sqrt(std::max(value, 0.0)), m);
        profile.sidelobes.push_back(peak);
    }
    return profile;
}

double psl(const BeampatternProfile& profile) {
    if (profile.sidelobes.empty()) {
        return 0.0;
    }
    double top = 0.0;
    for (const SidelobePeak& peak : profile.sidelobes) {
        top = std::max(top, peak.value);
    }
    return top / profile.peak_main;
}

double crlb(double snr, const Subarray& sub) {
    if (!(snr > 0.0)) {
        throw std::invalid_argument("crlb: snr must be positive");
    }
    const double u = position_variance(sub);
    if (sub.size() < 2 || !(u > 0.0)) {
        throw std::domain_error("crlb: zero diversity, bound is unbounded");
    }
    return 1.0 / (2.0 * std::numbers::pi * std::numbers::pi * snr * u);
}

double bessel_i0_scaled(double x) {
    if (x < 0.0) {
        throw std::invalid_argument("bessel_i0_scaled: negative argument");
    }
    if (x <= 15.0) {
        const double q = 0.25 * x * x;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 90; ++k) {
            term *= q / (static_cast<double>(k) * static_cast<double>(k));
            sum += term;
            if (term < sum * 1e-17) {
                break;
            }
        }
        return std::exp(-x) * sum;
    }
    // Asymptotic series; terms shrink until k ~ 2x, stop at the smallest.
    const double inv8x = 1.0 / (8.0 * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        const double ratio = static_cast<double>(2 * k - 1) *
                             static_cast<double>(2 * k - 1) * inv8x /
                             static_cast<double>(k);
        if (ratio >= 1.0) {
            break;
        }
        term *= ratio;
        sum += term;
        if (term < sum * 1e-17) {
            break;
        }
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double outlier_probability(double snr, double correlation, int m) {
    if (snr < 0.0) {
        throw std::invalid_argument("outlier_probability: snr must be non-negative");
    }
    if (correlation < 0.0 || correlation > static_cast<double>(m)) {
        throw std::invalid_argument("outlier_probability: correlation outside [0, M]");
    }
    const double x = snr * correlation / (2.0 * static_cast<double>(m));
    return 0.5 * std::exp(x - 0.5 * snr) * bessel_i0_scaled(x);
}

double tra_mse(const BeampatternProfile& profile, double snr, const Subarray& sub,
               const TraOptions& opts) {
    const int m = static_cast<int>(sub.size());
    double p_sum = 0.0;
    double outlier_term = 0.0;
    for (const SidelobePeak& peak : profile.sidelobes) {
        const double p = outlier_probability(snr, peak.correlation, m);
        p_sum += p;
        const double err = peak.location - profile.source;
        outlier_term += p * err * err;
    }
    double weight = 1.0 - p_sum;
    if (opts.clamp_nonoutlier && weight < 0.0) {
        weight = 0.0;
    }
    return weight * crlb(snr, sub) + outlier_term;
}

double tra_mse(double u0, double snr, const Subarray& sub, int n_grid,
               const TraOptions& opts) {
    return tra_mse(sidelobe_profile(sub, u0, n_grid), snr, sub, opts);
}

double worst_case_tra(const AnchorSet& anchors, double snr, const Subarray& sub,
                      int n_grid, const TraOptions& opts) {
    if (anchors.anchors.empty()) {
        throw std::invalid_argument("worst_case_tra: empty anchor set");
    }
    double worst = -1.0;
    for (double u : anchors.anchors) {
        worst = std::max(worst, tra_mse(u, snr, sub, n_grid, opts));
    }
    return worst;
}

AnchorSet anchor_set(double u_hat, double delta_u, int n_anchors) {
    if (delta_u < 0.0) {
        throw std::invalid_argument("anchor_set: delta_u must be non-negative");
    }
    if (n_anchors < 1 || n_anchors % 2 == 0) {
        throw std::invalid_argument("anchor_set: anchor count must be odd and positive");
    }
    AnchorSet set;
    set.anchors.reserve(static_cast<std::size_t>(n_anchors));
    if (n_anchors == 1) {
        set.anchors.push_back(u_hat);
    } else {
        for (int i = 0; i < n_anchors; ++i) {
            const double frac = 2.0 * static_cast<double>(i) /
                                    static_cast<double>(n_anchors - 1) - 1.0;
            set.anchors.push_back(u_hat + frac * delta_u);
        }
    }
    for (double& u : set.anchors) {
        u = std::clamp(u, -0.995, 0.995);
    }
    return set;
}

} // namespace doasel
