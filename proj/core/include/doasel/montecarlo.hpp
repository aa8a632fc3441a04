#ifndef DOASEL_MONTECARLO_HPP
#define DOASEL_MONTECARLO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "doasel/metrics.hpp"
#include "doasel/mle.hpp"
#include "doasel/rng.hpp"
#include "doasel/subarray.hpp"

namespace doasel {

/// One selector entry of a simulation run. Tokens look like "ula", "tra-g",
/// "tra-exh", "psl-c", "psl-c:0.85" or "tra-dl"; psl-c takes its constraint
/// from the suffix or the run default, tra-dl reads the configured model.
struct MethodSpec {
    std::string name;
    std::string label;
    double psl_delta = 1.0;
    std::string model_file;
};

MethodSpec parse_method(const std::string& token, double default_delta,
                        const std::string& default_model);

struct SimConfig {
    ArrayGeometry geometry{21, 0.5};
    int m_target = 6;
    std::vector<std::string> methods{"tra-g"};
    std::vector<double> snr_db_points{0.0, 10.0, 20.0, 30.0};
    int trials = 500;
    double delta_u = 0.1;
    int n_anchors = 5;
    double u_min = -0.9;
    double u_max = 0.9;
    std::uint64_t master_seed = 1;
    int n_grid = kDefaultGridPoints;
    bool coupled = true; // common random numbers across methods
    double psl_delta = 1.0;
    std::string model_file;
    int threads = 0; // 0 = resolve from environment/hardware
    int n_measurements = 5;
    GridSpec estimator_grid{};
};

/// Aggregated MSE for one (SNR, method) cell.
struct CurvePoint {
    double snr_db = 0.0;
    std::string method;
    double mse = 0.0;
    int trials_used = 0;
    double crlb_ref = 0.0;      // bound of the best-diversity layout
    double crlb_selected = 0.0; // mean bound of the actually selected layouts
    int fallback_count = 0;     // PSL-C trials served by the fallback layout
};

/// One Monte Carlo draw, kept when callers need per-trial resolution.
struct TrialRecord {
    int snr_index = 0;
    int method_index = 0;
    int trial = 0;
    double u_true = 0.0;
    double u_prior = 0.0;
    double estimate = 0.0;
    double sq_error = 0.0;
    double crlb_selected = 0.0;
    bool psl_fallback = false;
};

struct SweepResult {
    std::vector<CurvePoint> curve;
    std::vector<TrialRecord> trials; // filled only on request
};

/// Prior draw: uniform in [u_true - delta_u, u_true + delta_u], clamped into
/// [-0.995, 0.995].
double sample_prior(double u_true, double delta_u, RandomStream& rng);

/// MSE-vs-SNR sweep. Per (SNR, method, trial): draw the source direction and
/// its prior, select a subarray, observe one snapshot at the configured
/// aggregate SNR, estimate by MLE, and record the squared error. With
/// config.coupled every method sees identical direction/prior/noise draws.
SweepResult run_mse_sweep(const SimConfig& config, bool keep_trials = false);

struct SequentialPoint {
    int measurement = 0;
    double snr_db = 0.0;
    std::string method;
    double mse = 0.0;
    int trials_used = 0;
};

/// Sequential selection: measurement 1 uses the half-wavelength comb; each
/// later measurement selects with the previous MLE estimate as the prior and
/// estimates again on a fresh snapshot.
std::vector<SequentialPoint> run_sequential(const SimConfig& config,
                                            int n_measurements);

void export_csv(const std::vector<CurvePoint>& points, std::ostream& out);
void export_csv(const std::vector<SequentialPoint>& points, std::ostream& out);

/// Plain `key = value` configuration; '#' starts a comment, unknown keys are
/// errors.
SimConfig parse_sim_config(std::istream& in);

} // namespace doasel

#endif // DOASEL_MONTECARLO_HPP
