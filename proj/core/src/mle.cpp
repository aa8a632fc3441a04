#include "doasel/mle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace doasel {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// real(a(u)^H R a(u)) for the unit-modulus steering vector at u.
double objective(const CovarianceMatrix& r, const std::vector<double>& d, double u) {
    const std::size_t m = d.size();
    std::vector<cdouble> a(m);
    for (std::size_t k = 0; k < m; ++k) {
        a[k] = std::polar(1.0, -std::numbers::pi * d[k] * u);
    }
    cdouble acc{0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) {
        cdouble row{0.0, 0.0};
        for (std::size_t j = 0; j < m; ++j) {
            row += r.at(i, j) * a[j];
        }
        acc += std::conj(a[i]) * row;
    }
    return acc.real();
}

} // namespace

double mle_estimate(const CovarianceMatrix& r_hat, const Subarray& sub,
                    const GridSpec& grid) {
    if (r_hat.dim() != sub.size()) {
        throw std::invalid_argument("mle_estimate: covariance and subarray dimensions differ");
    }
    if (sub.size() < 2) {
        throw std::invalid_argument("mle_estimate: need at least two elements");
    }
    if (!(grid.coarse_step_deg > 0.0) || !(grid.fine_step_deg > 0.0) ||
        !(grid.fine_step_deg < grid.coarse_step_deg)) {
        throw std::invalid_argument("mle_estimate: need 0 < fine step < coarse step");
    }

    const std::vector<double>& d = sub.positions();

    const auto in_domain = [&](double theta_deg, double& u_out) {
        if (!(theta_deg > -90.0 && theta_deg < 90.0)) {
            return false;
        }
        const double u = std::sin(theta_deg * kDegToRad);
        if (!(u > grid.u_min && u < grid.u_max)) {
            return false;
        }
        u_out = u;
        return true;
    };

    // Coarse pass over the symmetric theta grid; ascending order plus strict
    // improvement makes ties resolve toward smaller u.
    const int k_lim = static_cast<int>(std::ceil(90.0 / grid.coarse_step_deg)) - 1;
    double best_theta = 0.0;
    double best_u = 0.0;
    double best_value = -1.0;
    bool found = false;
    for (int k = -k_lim; k <= k_lim; ++k) {
        const double theta = static_cast<double>(k) * grid.coarse_step_deg;
        double u = 0.0;
        if (!in_domain(theta, u)) {
            continue;
        }
        const double value = objective(r_hat, d, u);
        if (!found || value > best_value) {
            found = true;
            best_value = value;
            best_theta = theta;
            best_u = u;
        }
    }
    if (!found) {
        throw std::invalid_argument("mle_estimate: search domain is empty");
    }

    // Fine pass within one coarse step of the winner.
    const int j_lim = static_cast<int>(std::lround(grid.coarse_step_deg / grid.fine_step_deg));
    for (int j = -j_lim; j <= j_lim; ++j) {
        const double theta = best_theta + static_cast<double>(j) * grid.fine_step_deg;
        double u = 0.0;
        if (!in_domain(theta, u)) {
            continue;
        }
        const double value = objective(r_hat, d, u);
        if (value > best_value || (value == best_value && u < best_u)) {
            best_value = value;
            best_u = u;
        }
    }
    return best_u;
}

} // namespace doasel
