#ifndef DOASEL_MLE_HPP
#define DOASEL_MLE_HPP

#include "doasel/signal.hpp"
#include "doasel/subarray.hpp"

namespace doasel {

/// Two-level search grid. Steps are in degrees of arrival angle; the search
/// runs over theta in (-90, 90) and reports u = sin(theta), optionally
/// limited to an open u interval.
struct GridSpec {
    double coarse_step_deg = 0.2;
    double fine_step_deg = 0.01;
    double u_min = -1.0;
    double u_max = 1.0;
};

/// Maximum-likelihood DOA estimate: argmax_u a(u)^H R a(u) over the coarse
/// theta grid, refined at the fine step within one coarse step of the
/// winner. Ties break toward smaller u.
double mle_estimate(const CovarianceMatrix& r_hat, const Subarray& sub,
                    const GridSpec& grid = {});

} // namespace doasel

#endif // DOASEL_MLE_HPP
