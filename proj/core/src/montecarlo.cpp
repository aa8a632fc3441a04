#include "doasel/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "doasel/mlp.hpp"
#include "doasel/parallel.hpp"
#include "doasel/select.hpp"
#include "doasel/signal.hpp"

namespace doasel {

namespace {

// Stream-derivation tags so sweep and sequential draws never collide.
constexpr std::uint64_t kSweepTag = 0x53574545ULL;
constexpr std::uint64_t kSequentialTag = 0x53455154ULL;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

// Per-method selection state shared across trials. The comb and the
// PSL-constrained pick do not depend on the prior, so they are computed once.
struct MethodRunner {
    MethodSpec spec;
    bool per_trial = false;
    SelectionVector static_choice{std::vector<std::uint8_t>{1}};
    bool static_fallback = false;
    MlpModel model;

    SelectionVector select(const SimConfig& cfg, double u_prior, double snr_db,
                           double snr_linear, bool* fallback) const {
        if (!per_trial) {
            if (fallback) {
                *fallback = static_fallback;
            }
            return static_choice;
        }
        if (spec.name == "tra-dl") {
            return select_with_model(model, u_prior, snr_db, cfg.m_target);
        }
        SelectionQuery query{anchor_set(u_prior, cfg.delta_u, cfg.n_anchors),
                             snr_linear, cfg.geometry, cfg.m_target, cfg.n_grid};
        if (spec.name == "tra-g") {
            return select_greedy_tra(query).chosen;
        }
        if (spec.name == "psl-c") {
            const SelectionResult res = select_psl_c(query, spec.psl_delta);
            if (fallback) {
                *fallback = res.psl_fallback;
            }
            return res.chosen;
        }
        return select_exhaustive_tra(query).chosen;
    }
};

MethodRunner make_runner(const SimConfig& cfg, const MethodSpec& spec) {
    MethodRunner runner;
    runner.spec = spec;
    if (spec.name == "ula") {
        runner.static_choice = select_ula(cfg.geometry, cfg.m_target);
    } else if (spec.name == "psl-c") {
        if (spec.psl_delta < 1.0) {
            // A binding constraint is checked at the per-trial prior, so the
            // pick has to be recomputed every trial.
            runner.per_trial = true;
        } else {
            // delta = 1 never binds, leaving the S-independent CRLB ordering:
            // one pick serves the whole sweep.
            SelectionQuery query{anchor_set(0.0, cfg.delta_u, cfg.n_anchors), 1.0,
                                 cfg.geometry, cfg.m_target, cfg.n_grid};
            const SelectionResult res = select_psl_c(query, spec.psl_delta);
            runner.static_choice = res.chosen;
            runner.static_fallback = res.psl_fallback;
        }
    } else if (spec.name == "tra-dl") {
        if (spec.model_file.empty()) {
            throw std::invalid_argument("tra-dl requires a model file");
        }
        runner.model = load_model(spec.model_file);
        if (runner.model.meta.n_antennas != 0 &&
            runner.model.meta.n_antennas != cfg.geometry.n_antennas()) {
            throw std::invalid_argument("tra-dl model was trained for a different array size");
        }
        runner.per_trial = true;
    } else if (spec.name == "tra-g" || spec.name == "tra-exh") {
        runner.per_trial = true;
    } else {
        throw std::invalid_argument("unknown selection method: " + spec.name);
    }
    return runner;
}

// PSL-C at delta = 1 is the pure CRLB minimizer over the unique set.
Subarray reference_subarray(const SimConfig& cfg) {
    SelectionQuery query{anchor_set(0.0, cfg.delta_u, 1), 1.0, cfg.geometry,
                         cfg.m_target, cfg.n_grid};
    return positions_from_selection(select_psl_c(query, 1.0).chosen, cfg.geometry);
}

void validate_config(const SimConfig& cfg) {
    if (cfg.trials < 1) {
        throw std::invalid_argument("sim config: trials must be at least 1");
    }
    if (cfg.methods.empty()) {
        throw std::invalid_argument("sim config: no methods configured");
    }
    if (cfg.snr_db_points.empty()) {
        throw std::invalid_argument("sim config: no SNR points configured");
    }
    for (double s : cfg.snr_db_points) {
        if (!std::isfinite(s)) {
            throw std::invalid_argument("sim config: SNR points must be finite");
        }
    }
    if (!(cfg.u_min > -1.0 && cfg.u_max < 1.0 && cfg.u_min <= cfg.u_max)) {
        throw std::invalid_argument("sim config: source range must lie inside (-1, 1)");
    }
    if (cfg.delta_u < 0.0) {
        throw std::invalid_argument("sim config: delta_u must be non-negative");
    }
}

} // namespace

MethodSpec parse_method(const std::string& token, double default_delta,
                        const std::string& default_model) {
    MethodSpec spec;
    spec.label = token;
    const auto colon = token.find(':');
    spec.name = colon == std::string::npos ? token : token.substr(0, colon);
    spec.psl_delta = default_delta;
    spec.model_file = default_model;
    if (colon != std::string::npos) {
        const std::string arg = token.substr(colon + 1);
        if (spec.name == "psl-c") {
            spec.psl_delta = std::stod(arg);
        } else if (spec.name == "tra-dl") {
            spec.model_file = arg;
        } else {
            throw std::invalid_argument("method " + spec.name + " takes no parameter");
        }
    }
    return spec;
}

double sample_prior(double u_true, double delta_u, RandomStream& rng) {
    if (delta_u < 0.0) {
        throw std::invalid_argument("sample_prior: delta_u must be non-negative");
    }
    const double u = rng.uniform(u_true - delta_u, u_true + delta_u);
    return std::clamp(u, -0.995, 0.995);
}

SweepResult run_mse_sweep(const SimConfig& config, bool keep_trials) {
    validate_config(config);
    const int threads = resolve_threads(config.threads);
    const int n = config.geometry.n_antennas();

    std::vector<MethodRunner> runners;
    runners.reserve(config.methods.size());
    for (const std::string& token : config.methods) {
        runners.push_back(make_runner(
            config, parse_method(token, config.psl_delta, config.model_file)));
    }

    const Subarray ref_sub = reference_subarray(config);

    SweepResult result;
    result.curve.reserve(config.snr_db_points.size() * runners.size());

    for (std::size_t s = 0; s < config.snr_db_points.size(); ++s) {
        const double snr_db = config.snr_db_points[s];
        const double snr = std::pow(10.0, snr_db / 10.0);
        const double crlb_ref = crlb(snr, ref_sub);

        for (std::size_t m = 0; m < runners.size(); ++m) {
            const MethodRunner& runner = runners[m];
            std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));

            parallel_for(config.trials, threads, [&](int t) {
                const std::uint64_t method_word = config.coupled ? 0 : m + 1;
                RandomStream rng = RandomStream::derive(
                    config.master_seed,
                    {kSweepTag, static_cast<std::uint64_t>(s), method_word,
                     static_cast<std::uint64_t>(t)});

                TrialRecord rec;
                rec.snr_index = static_cast<int>(s);
                rec.method_index = static_cast<int>(m);
                rec.trial = t;
                rec.u_true = rng.uniform(config.u_min, config.u_max);
                rec.u_prior = sample_prior(rec.u_true, config.delta_u, rng);

                // Noise for the whole grid; a subarray observes the entries
                // at its selected antennas, which is what makes the coupled
                // comparison meaningful across different layouts.
                std::vector<cdouble> noise(static_cast<std::size_t>(n));
                for (cdouble& v : noise) {
                    v = rng.complex_gaussian(1.0);
                }

                bool fallback = false;
                const SelectionVector sel =
                    runner.select(config, rec.u_prior, snr_db, snr, &fallback);
                rec.psl_fallback = fallback;
                const Subarray sub = positions_from_selection(sel, config.geometry);
                rec.crlb_selected = crlb(snr, sub);

                const double gain =
                    std::sqrt(snr / static_cast<double>(config.m_target));
                std::vector<cdouble> y = steering_vector(sub, rec.u_true);
                const std::vector<int> idx = sel.set_indices();
                for (std::size_t i = 0; i < y.size(); ++i) {
                    y[i] = gain * y[i] + noise[static_cast<std::size_t>(idx[i])];
                }

                rec.estimate = mle_estimate(sample_covariance(y), sub,
                                            config.estimator_grid);
                const double err = rec.estimate - rec.u_true;
                rec.sq_error = err * err;
                records[static_cast<std::size_t>(t)] = rec;
            });

            CurvePoint point;
            point.snr_db = snr_db;
            point.method = runner.spec.label;
            point.trials_used = config.trials;
            point.crlb_ref = crlb_ref;
            for (const TrialRecord& rec : records) {
                point.mse += rec.sq_error;
                point.crlb_selected += rec.crlb_selected;
                point.fallback_count += rec.psl_fallback ? 1 : 0;
            }
            point.mse /= static_cast<double>(config.trials);
            point.crlb_selected /= static_cast<double>(config.trials);
            result.curve.push_back(point);

            if (keep_trials) {
                result.trials.insert(result.trials.end(), records.begin(), records.end());
            }
        }
    }
    return result;
}

std::vector<SequentialPoint> run_sequential(const SimConfig& config,
                                            int n_measurements) {
    validate_config(config);
    if (n_measurements < 1) {
        throw std::invalid_argument("run_sequential: need at least one measurement");
    }
    const int threads = resolve_threads(config.threads);
    const int n = config.geometry.n_antennas();

    std::vector<MethodRunner> runners;
    for (const std::string& token : config.methods) {
        runners.push_back(make_runner(
            config, parse_method(token, config.psl_delta, config.model_file)));
    }
    const SelectionVector first_choice = select_ula(config.geometry, config.m_target);

    std::vector<SequentialPoint> curve;
    for (std::size_t s = 0; s < config.snr_db_points.size(); ++s) {
        const double snr_db = config.snr_db_points[s];
        const double snr = std::pow(10.0, snr_db / 10.0);
        const double gain = std::sqrt(snr / static_cast<double>(config.m_target));

        for (std::size_t m = 0; m < runners.size(); ++m) {
            const MethodRunner& runner = runners[m];
            std::vector<std::vector<double>> sq_errors(
                static_cast<std::size_t>(n_measurements),
                std::vector<double>(static_cast<std::size_t>(config.trials), 0.0));

            parallel_for(config.trials, threads, [&](int t) {
                const std::uint64_t method_word = config.coupled ? 0 : m + 1;
                RandomStream rng = RandomStream::derive(
                    config.master_seed,
                    {kSequentialTag, static_cast<std::uint64_t>(s), method_word,
                     static_cast<std::uint64_t>(t)});

                const double u_true = rng.uniform(config.u_min, config.u_max);
                SelectionVector sel = first_choice;
                for (int meas = 0; meas < n_measurements; ++meas) {
                    const Subarray sub = positions_from_selection(sel, config.geometry);
                    std::vector<cdouble> noise(static_cast<std::size_t>(n));
                    for (cdouble& v : noise) {
                        v = rng.complex_gaussian(1.0);
                    }
                    std::vector<cdouble> y = steering_vector(sub, u_true);
                    const std::vector<int> idx = sel.set_indices();
                    for (std::size_t i = 0; i < y.size(); ++i) {
                        y[i] = gain * y[i] + noise[static_cast<std::size_t>(idx[i])];
                    }
                    const double estimate = mle_estimate(sample_covariance(y), sub,
                                                         config.estimator_grid);
                    const double err = estimate - u_true;
                    sq_errors[static_cast<std::size_t>(meas)][static_cast<std::size_t>(t)] =
                        err * err;

                    if (meas + 1 < n_measurements) {
                        sel = runner.select(config, std::clamp(estimate, -0.995, 0.995),
                                            snr_db, snr, nullptr);
                    }
                }
            });

            for (int meas = 0; meas < n_measurements; ++meas) {
                SequentialPoint point;
                point.measurement = meas + 1;
                point.snr_db = snr_db;
                point.method = runner.spec.label;
                point.trials_used = config.trials;
                double total = 0.0;
                for (double e : sq_errors[static_cast<std::size_t>(meas)]) {
                    total += e;
                }
                point.mse = total / static_cast<double>(config.trials);
                curve.push_back(point);
            }
        }
    }
    return curve;
}

void export_csv(const std::vector<CurvePoint>& points, std::ostream& out) {
    if (points.empty()) {
        throw std::invalid_argument("export_csv: nothing to write");
    }
    out << "snr_db,method,mse,trials,crlb_ref\n";
    for (const CurvePoint& p : points) {
        out << format_double(p.snr_db) << ',' << p.method << ','
            << format_double(p.mse) << ',' << p.trials_used << ','
            << format_double(p.crlb_ref) << '\n';
    }
}

void export_csv(const std::vector<SequentialPoint>& points, std::ostream& out) {
    if (points.empty()) {
        throw std::invalid_argument("export_csv: nothing to write");
    }
    out << "measurement,snr_db,method,mse,trials\n";
    for (const SequentialPoint& p : points) {
        out << p.measurement << ',' << format_double(p.snr_db) << ',' << p.method
            << ',' << format_double(p.mse) << ',' << p.trials_used << '\n';
    }
}

SimConfig parse_sim_config(std::istream& in) {
    SimConfig cfg;
    int n_antennas = cfg.geometry.n_antennas();
    double spacing = cfg.geometry.spacing();

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        try {
            if (key == "n_antennas") {
                n_antennas = std::stoi(value);
            } else if (key == "spacing") {
                spacing = std::stod(value);
            } else if (key == "m_target") {
                cfg.m_target = std::stoi(value);
            } else if (key == "methods") {
                cfg.methods = split_list(value);
            } else if (key == "snr_db_points") {
                cfg.snr_db_points.clear();
                for (const std::string& item : split_list(value)) {
                    cfg.snr_db_points.push_back(std::stod(item));
                }
            } else if (key == "trials") {
                cfg.trials = std::stoi(value);
            } else if (key == "delta_u") {
                cfg.delta_u = std::stod(value);
            } else if (key == "n_anchors") {
                cfg.n_anchors = std::stoi(value);
            } else if (key == "u_min") {
                cfg.u_min = std::stod(value);
            } else if (key == "u_max") {
                cfg.u_max = std::stod(value);
            } else if (key == "master_seed") {
                cfg.master_seed = std::stoull(value);
            } else if (key == "n_grid") {
                cfg.n_grid = std::stoi(value);
            } else if (key == "coupled") {
                cfg.coupled = value == "1" || value == "true" || value == "yes";
            } else if (key == "psl_delta") {
                cfg.psl_delta = std::stod(value);
            } else if (key == "model_file") {
                cfg.model_file = value;
            } else if (key == "threads") {
                cfg.threads = std::stoi(value);
            } else if (key == "n_measurements") {
                cfg.n_measurements = std::stoi(value);
            } else {
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": bad value for '" + key + "'");
        }
    }
    cfg.geometry = ArrayGeometry(n_antennas, spacing);
    return cfg;
}

} // namespace doasel
