// doasel — antenna-subset selection for DOA estimation with switched arrays.
//
// Subcommands: enumerate, stats, beampattern, estimate, select, train,
// simulate, sequential, table1, table2. All numeric output is plain CSV so
// results diff cleanly; plotting is left to external tools.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "doasel/metrics.hpp"
#include "doasel/mle.hpp"
#include "doasel/mlp.hpp"
#include "doasel/montecarlo.hpp"
#include "doasel/parallel.hpp"
#include "doasel/rng.hpp"
#include "doasel/select.hpp"
#include "doasel/signal.hpp"
#include "doasel/subarray.hpp"
#include "doasel/tables.hpp"

namespace {

using namespace doasel;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(std::stod(item));
        }
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_double_list(text)) {
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::string positions_field(const Subarray& sub) {
    std::string out = "\"";
    for (std::size_t i = 0; i < sub.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += fmt(sub[i]);
    }
    out += '"';
    return out;
}

void print_selection_row(const SelectionVector& chosen, const ArrayGeometry& geometry,
                         double objective, std::uint64_t evaluations,
                         std::uint64_t mult_count) {
    const Subarray sub = positions_from_selection(chosen, geometry);
    std::cout << "selection,positions,objective,evaluations,mult_count\n"
              << chosen.to_string() << ',' << positions_field(sub) << ','
              << fmt(objective) << ',' << evaluations << ',' << mult_count << '\n';
}

std::vector<cdouble> read_complex_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open sample file " + path);
    }
    std::vector<cdouble> samples;
    std::string line;
    while (std::getline(in, line)) {
        for (char& c : line) {
            if (c == ',') {
                c = ' ';
            }
        }
        std::istringstream ls(line);
        double re = 0.0;
        double im = 0.0;
        if (ls >> re) {
            if (!(ls >> im)) {
                im = 0.0;
            }
            samples.push_back({re, im});
        }
    }
    if (samples.empty()) {
        throw std::runtime_error("no complex samples in " + path);
    }
    return samples;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path);
    }
    return parse_sim_config(in);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open output file " + path);
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

// ---- subcommand argument bundles -----------------------------------------

struct EnumerateArgs {
    int n = 11;
    int m = 2;
    bool unique = false;
};

struct BeampatternArgs {
    std::string positions;
    double u0 = 0.0;
    int n_grid = kDefaultGridPoints;
};

struct EstimateArgs {
    std::string sample_file;
    std::string positions;
    double coarse = 0.2;
    double fine = 0.01;
};

struct SelectArgs {
    std::string method = "tra-g";
    int n = 21;
    int m = 6;
    double spacing = 0.5;
    double u_hat = 0.0;
    double delta_u = 0.1;
    int n_anchors = 5;
    double snr_db = 10.0;
    double delta = 1.0;
    std::string model;
    int n_grid = kDefaultGridPoints;
    int threads = 0;
    std::uint64_t cap = kDefaultExhaustiveCap;
};

struct TrainArgs {
    int n = 21;
    int m = 6;
    double spacing = 0.5;
    int samples = 10000;
    int iters = 200;
    double batch_fraction = 0.1;
    double lr = 1e-3;
    std::uint64_t seed = 1;
    std::string out;
    std::string hidden = "16,32,64,32,16";
    double u_min = -0.9;
    double u_max = 0.9;
    double snr_db_min = -10.0;
    double snr_db_max = 20.0;
    int n_grid = kDefaultGridPoints;
    int threads = 0;
};

struct SimArgs {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    int threads = -1;
    int measurements = 0;
};

struct Table2Args {
    Table2Params params;
    std::string hidden = "16,32,64,32,16";
    std::uint64_t out_dim = 21;
};

// ---- command implementations ----------------------------------------------

void run_enumerate(const EnumerateArgs& args) {
    const UniqueSet set = unique_subarray_set(args.n, args.m);
    std::cout << set.stats.total_count << ',' << set.stats.unique_count << '\n';
    if (args.unique) {
        for (const SelectionVector& v : set.vectors) {
            std::cout << v.to_string() << '\n';
        }
    }
}

void run_beampattern(const BeampatternArgs& args) {
    const Subarray sub(parse_double_list(args.positions));
    const auto grid = beampattern_grid(sub, args.u0, args.n_grid);
    std::cout << "u,V\n";
    for (const auto& [u, v] : grid) {
        std::cout << fmt(u) << ',' << fmt(v) << '\n';
    }
    const BeampatternProfile profile = sidelobe_profile(sub, args.u0, args.n_grid);
    std::cout << "\nk,u_k,V_k,corr_k\n";
    for (int k = 0; k < profile.count(); ++k) {
        const SidelobePeak& peak = profile.sidelobes[static_cast<std::size_t>(k)];
        std::cout << (k + 1) << ',' << fmt(peak.location) << ',' << fmt(peak.value)
                  << ',' << fmt(peak.correlation) << '\n';
    }
}

void run_estimate(const EstimateArgs& args) {
    const Subarray sub(parse_double_list(args.positions));
    const auto samples = read_complex_file(args.sample_file);
    if (samples.size() != sub.size()) {
        throw std::runtime_error("sample count does not match the subarray size");
    }
    GridSpec grid;
    grid.coarse_step_deg = args.coarse;
    grid.fine_step_deg = args.fine;
    const double estimate = mle_estimate(sample_covariance(samples), sub, grid);
    std::cout << fmt(estimate) << '\n';
}

void run_select(const SelectArgs& args) {
    const ArrayGeometry geometry(args.n, args.spacing);
    const double snr = std::pow(10.0, args.snr_db / 10.0);
    SelectionQuery query{anchor_set(args.u_hat, args.delta_u, args.n_anchors), snr,
                         geometry, args.m, args.n_grid, args.cap,
                         resolve_threads(args.threads)};

    std::string method = args.method;
    if (method == "auto") {
        // Greedy only pays off once it needs fewer evaluations than the
        // unique set holds.
        const std::uint64_t unique = unique_subarray_set(args.n, args.m).stats.unique_count;
        method = (args.m < args.n &&
                  greedy_evaluation_count(args.n, args.m) < unique)
                     ? "tra-g"
                     : "tra-exh";
        std::cout << "# method: " << method << '\n';
    }

    if (method == "tra-g") {
        const SelectionResult r = select_greedy_tra(query);
        print_selection_row(r.chosen, geometry, r.objective, r.evaluations, r.mult_count);
    } else if (method == "tra-exh") {
        const SelectionResult r = select_exhaustive_tra(query);
        print_selection_row(r.chosen, geometry, r.objective, r.evaluations, r.mult_count);
    } else if (method == "psl-c") {
        const SelectionResult r = select_psl_c(query, args.delta);
        if (r.psl_fallback) {
            std::cout << "# infeasible constraint, returning the minimum-PSL layout\n";
        }
        print_selection_row(r.chosen, geometry, r.objective, r.evaluations, r.mult_count);
    } else if (method == "ula") {
        const SelectionVector chosen = select_ula(geometry, args.m);
        const Subarray sub = positions_from_selection(chosen, geometry);
        const double objective = worst_case_tra(query.anchors, snr, sub, args.n_grid);
        print_selection_row(chosen, geometry, objective, 1, 0);
    } else if (method == "tra-dl") {
        if (args.model.empty()) {
            throw std::runtime_error("--model is required for tra-dl");
        }
        const MlpModel model = load_model(args.model);
        const SelectionVector chosen = select_with_model(model, args.u_hat, args.snr_db, args.m);
        const Subarray sub = positions_from_selection(chosen, geometry);
        const double objective = worst_case_tra(query.anchors, snr, sub, args.n_grid);
        CountParams cost;
        cost.layer_dims = std::vector<std::uint64_t>(model.layer_dims.begin(),
                                                     model.layer_dims.end());
        print_selection_row(chosen, geometry, objective, 1,
                            multiplication_count(CountMethod::TraDl, cost));
    } else {
        throw std::runtime_error("unknown method " + method);
    }
}

void run_train(const TrainArgs& args) {
    if (args.out.empty()) {
        throw std::runtime_error("--out is required");
    }
    const ArrayGeometry geometry(args.n, args.spacing);
    SelectionQuery tmpl{anchor_set(0.0, 0.0, 1), 1.0, geometry, args.m, args.n_grid};

    RandomStream data_rng = RandomStream::derive(args.seed, {1});
    const auto dataset =
        generate_dataset(args.samples, {args.u_min, args.u_max},
                         {args.snr_db_min, args.snr_db_max}, tmpl, data_rng,
                         resolve_threads(args.threads));

    std::vector<int> dims{2};
    for (int h : parse_int_list(args.hidden)) {
        dims.push_back(h);
    }
    dims.push_back(args.n);

    RandomStream init_rng = RandomStream::derive(args.seed, {2});
    MlpModel model = make_mlp(dims, init_rng);

    AdamConfig config;
    config.learning_rate = args.lr;
    config.iterations = args.iters;
    config.batch_fraction = args.batch_fraction;
    RandomStream train_rng = RandomStream::derive(args.seed, {3});
    const auto history = train(model, dataset, config, train_rng);

    model.meta.seed = args.seed;
    model.meta.u_min = args.u_min;
    model.meta.u_max = args.u_max;
    model.meta.snr_db_min = args.snr_db_min;
    model.meta.snr_db_max = args.snr_db_max;
    model.meta.n_samples = args.samples;
    model.meta.iterations = args.iters;
    model.meta.n_antennas = args.n;
    model.meta.m_target = args.m;
    model.meta.spacing = args.spacing;
    save_model(model, args.out);

    std::cout << "samples," << dataset.size() << "\nparameters,"
              << model.parameter_count() << "\ninitial_loss,"
              << (history.empty() ? 0.0 : history.front()) << "\nfinal_loss,"
              << (history.empty() ? 0.0 : history.back()) << "\nmodel,"
              << args.out << '\n';
}

SimConfig resolved_config(const SimArgs& args) {
    SimConfig cfg = load_config(args.config);
    if (args.seed_set) {
        cfg.master_seed = args.seed;
    }
    if (args.trials > 0) {
        cfg.trials = args.trials;
    }
    if (args.threads >= 0) {
        cfg.threads = args.threads;
    }
    if (args.measurements > 0) {
        cfg.n_measurements = args.measurements;
    }
    return cfg;
}

void run_simulate(const SimArgs& args) {
    const SimConfig cfg = resolved_config(args);
    const SweepResult result = run_mse_sweep(cfg);
    std::ostringstream csv;
    export_csv(result.curve, csv);
    write_file(args.out, csv.str());
    std::cout << "rows," << result.curve.size() << "\nout," << args.out << '\n';
}

void run_sequential_cmd(const SimArgs& args) {
    const SimConfig cfg = resolved_config(args);
    const auto curve = run_sequential(cfg, cfg.n_measurements);
    std::ostringstream csv;
    export_csv(curve, csv);
    write_file(args.out, csv.str());
    std::cout << "rows," << curve.size() << "\nout," << args.out << '\n';
}

void run_table2(const Table2Args& args) {
    Table2Params params = args.params;
    params.layer_dims.clear();
    params.layer_dims.push_back(2);
    for (double v : parse_double_list(args.hidden)) {
        params.layer_dims.push_back(static_cast<std::uint64_t>(v));
    }
    params.layer_dims.push_back(args.out_dim);
    std::cout << reproduce_table2(params);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Antenna-subset selection toolkit for DOA estimation with switched arrays"};
    app.require_subcommand(1);

    EnumerateArgs enum_args;
    auto* cmd_enum = app.add_subcommand("enumerate", "List subarray counts (and layouts)");
    cmd_enum->add_option("--n", enum_args.n, "Antennas on the grid")->required();
    cmd_enum->add_option("--m", enum_args.m, "Selected antennas")->required();
    cmd_enum->add_flag("--unique", enum_args.unique, "Also print the aligned unique set");

    EnumerateArgs stats_args;
    auto* cmd_stats = app.add_subcommand("stats", "Redundancy statistics for one (N, M) pair");
    cmd_stats->add_option("--n", stats_args.n, "Antennas on the grid")->required();
    cmd_stats->add_option("--m", stats_args.m, "Selected antennas")->required();

    BeampatternArgs bp_args;
    auto* cmd_bp = app.add_subcommand("beampattern", "Beampattern scan and sidelobe table");
    cmd_bp->add_option("--positions", bp_args.positions,
                       "Comma-separated element positions (half-wavelengths)")->required();
    cmd_bp->add_option("--u0", bp_args.u0, "Source direction (sine space)");
    cmd_bp->add_option("--n-grid", bp_args.n_grid, "Scan resolution");

    EstimateArgs est_args;
    auto* cmd_est = app.add_subcommand("estimate", "Maximum-likelihood DOA from samples");
    cmd_est->add_option("--y", est_args.sample_file, "File of complex samples (re im per line)")
        ->required();
    cmd_est->add_option("--positions", est_args.positions,
                        "Comma-separated element positions")->required();
    cmd_est->add_option("--coarse", est_args.coarse, "Coarse step, degrees");
    cmd_est->add_option("--fine", est_args.fine, "Fine step, degrees");

    SelectArgs sel_args;
    auto* cmd_sel = app.add_subcommand("select", "Pick an antenna subset");
    cmd_sel->add_option("--method", sel_args.method,
                        "tra-g | tra-exh | psl-c | ula | tra-dl | auto")->required();
    cmd_sel->add_option("--n", sel_args.n, "Antennas on the grid");
    cmd_sel->add_option("--m", sel_args.m, "RF chains");
    cmd_sel->add_option("--d", sel_args.spacing, "Grid pitch (half-wavelengths)");
    cmd_sel->add_option("--u-hat", sel_args.u_hat, "Prior direction");
    cmd_sel->add_option("--delta-u", sel_args.delta_u, "Prior uncertainty");
    cmd_sel->add_option("--n-anchors", sel_args.n_anchors, "Anchor count (odd)");
    cmd_sel->add_option("--snr-db", sel_args.snr_db, "Aggregate SNR in dB");
    cmd_sel->add_option("--delta", sel_args.delta, "PSL constraint threshold");
    cmd_sel->add_option("--model", sel_args.model, "Model file for tra-dl");
    cmd_sel->add_option("--n-grid", sel_args.n_grid, "Sidelobe scan resolution");
    cmd_sel->add_option("--threads", sel_args.threads, "Worker threads (0 = auto)");
    cmd_sel->add_option("--cap", sel_args.cap, "Unique-set size cap for exhaustive scans");

    TrainArgs train_args;
    auto* cmd_train = app.add_subcommand("train", "Train the selection network");
    cmd_train->add_option("--n", train_args.n, "Antennas on the grid");
    cmd_train->add_option("--m", train_args.m, "RF chains");
    cmd_train->add_option("--d", train_args.spacing, "Grid pitch");
    cmd_train->add_option("--samples", train_args.samples, "Training samples");
    cmd_train->add_option("--iters", train_args.iters, "Training iterations");
    cmd_train->add_option("--batch-fraction", train_args.batch_fraction,
                          "Fraction of the dataset per iteration");
    cmd_train->add_option("--lr", train_args.lr, "Adam learning rate");
    cmd_train->add_option("--seed", train_args.seed, "Master seed");
    cmd_train->add_option("--out", train_args.out, "Model output file")->required();
    cmd_train->add_option("--hidden", train_args.hidden, "Hidden layer sizes");
    cmd_train->add_option("--u-min", train_args.u_min, "Lower direction bound");
    cmd_train->add_option("--u-max", train_args.u_max, "Upper direction bound");
    cmd_train->add_option("--snr-db-min", train_args.snr_db_min, "Lower SNR bound (dB)");
    cmd_train->add_option("--snr-db-max", train_args.snr_db_max, "Upper SNR bound (dB)");
    cmd_train->add_option("--n-grid", train_args.n_grid, "Sidelobe scan resolution");
    cmd_train->add_option("--threads", train_args.threads, "Worker threads (0 = auto)");

    SimArgs sim_args;
    auto* cmd_sim = app.add_subcommand("simulate", "MSE-vs-SNR Monte Carlo sweep");
    cmd_sim->add_option("--config", sim_args.config, "Config file (key = value)")->required();
    cmd_sim->add_option("--out", sim_args.out, "Output CSV")->required();
    auto* sim_seed = cmd_sim->add_option("--seed", sim_args.seed, "Override master_seed");
    cmd_sim->add_option("--trials", sim_args.trials, "Override trials");
    cmd_sim->add_option("--threads", sim_args.threads, "Override threads");

    SimArgs seq_args;
    auto* cmd_seq = app.add_subcommand("sequential", "Sequential measurement experiment");
    cmd_seq->add_option("--config", seq_args.config, "Config file (key = value)")->required();
    cmd_seq->add_option("--out", seq_args.out, "Output CSV")->required();
    auto* seq_seed = cmd_seq->add_option("--seed", seq_args.seed, "Override master_seed");
    cmd_seq->add_option("--trials", seq_args.trials, "Override trials");
    cmd_seq->add_option("--threads", seq_args.threads, "Override threads");
    cmd_seq->add_option("--measurements", seq_args.measurements, "Override n_measurements");

    auto* cmd_t1 = app.add_subcommand("table1", "Redundancy statistics for the reference pairs");

    Table2Args t2_args;
    auto* cmd_t2 = app.add_subcommand("table2", "Multiplication cost of each method");
    cmd_t2->add_option("--n", t2_args.params.n, "Antennas");
    cmd_t2->add_option("--m", t2_args.params.m, "RF chains");
    cmd_t2->add_option("--f", t2_args.params.full_count, "Candidate sets F");
    cmd_t2->add_option("--f-feasible", t2_args.params.feasible_count, "Feasible sets");
    cmd_t2->add_option("--g", t2_args.params.greedy_count, "Greedy evaluations G");
    cmd_t2->add_option("--n-grid", t2_args.params.n_grid, "Scan resolution");
    cmd_t2->add_option("--k", t2_args.params.sidelobes, "Sidelobe count K");
    cmd_t2->add_option("--bessel-mults", t2_args.params.bessel_mults,
                       "Multiplications per Bessel evaluation");
    cmd_t2->add_option("--hidden", t2_args.hidden, "Hidden layer sizes");
    cmd_t2->add_option("--out-dim", t2_args.out_dim, "Network output size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_enum->parsed()) {
            run_enumerate(enum_args);
        } else if (cmd_stats->parsed()) {
            std::cout << "N,M,F,F_unique,ratio,G,S,S_unique\n"
                      << stats_csv_row(stats_args.n, stats_args.m) << '\n';
        } else if (cmd_bp->parsed()) {
            run_beampattern(bp_args);
        } else if (cmd_est->parsed()) {
            run_estimate(est_args);
        } else if (cmd_sel->parsed()) {
            run_select(sel_args);
        } else if (cmd_train->parsed()) {
            run_train(train_args);
        } else if (cmd_sim->parsed()) {
            sim_args.seed_set = sim_seed->count() > 0;
            run_simulate(sim_args);
        } else if (cmd_seq->parsed()) {
            seq_args.seed_set = seq_seed->count() > 0;
            run_sequential_cmd(seq_args);
        } else if (cmd_t1->parsed()) {
            std::cout << reproduce_table1();
        } else if (cmd_t2->parsed()) {
            run_table2(t2_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
