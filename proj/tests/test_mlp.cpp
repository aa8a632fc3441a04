#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "doasel/metrics.hpp"
#include "doasel/mlp.hpp"
#include "doasel/rng.hpp"

using namespace doasel;

namespace {

const std::vector<int> kReferenceDims{2, 16, 32, 64, 32, 16, 21};

MlpModel zero_model(const std::vector<int>& dims) {
    RandomStream rng(1);
    MlpModel model = make_mlp(dims, rng);
    for (auto& layer : model.weights) {
        std::fill(layer.begin(), layer.end(), 0.0);
    }
    for (auto& layer : model.biases) {
        std::fill(layer.begin(), layer.end(), 0.0);
    }
    return model;
}

SelectionVector random_label(RandomStream& rng, int n, int m) {
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (double& s : scores) {
        s = rng.uniform();
    }
    return select_top_m(scores, m);
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("model bookkeeping for the reference network") {
    RandomStream rng(5);
    const MlpModel model = make_mlp(kReferenceDims, rng);
    CHECK(model.weight_multiplies() == 5488);
    CHECK(model.parameter_count() == 5669); // 5488 weights + 181 biases

    CHECK_THROWS_AS(make_mlp({2}, rng), std::invalid_argument);
    CHECK_THROWS_AS(make_mlp({2, 0, 4}, rng), std::invalid_argument);
}

TEST_CASE("forward of the zero model is one half everywhere") {
    const MlpModel model = zero_model({2, 4, 7});
    const auto out = forward(model, 0.3, 12.0);
    REQUIRE(out.size() == 7);
    for (double v : out) {
        CHECK(v == 0.5);
    }
}

TEST_CASE("forward outputs stay strictly inside (0,1) and repeat exactly") {
    RandomStream rng(9);
    const MlpModel model = make_mlp(kReferenceDims, rng);
    for (int round = 0; round < 50; ++round) {
        const double u = rng.uniform(-0.9, 0.9);
        const double snr_db = rng.uniform(-10.0, 20.0);
        const auto a = forward(model, u, snr_db);
        const auto b = forward(model, u, snr_db);
        REQUIRE(a.size() == 21);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i] > 0.0);
            CHECK(a[i] < 1.0);
            CHECK(a[i] == b[i]);
        }
    }
}

TEST_CASE("loss") {
    const SelectionVector label(std::vector<std::uint8_t>{1, 0, 1, 0});
    CHECK(loss(std::vector<double>{1.0, 0.0, 1.0, 0.0}, label) == 0.0);
    CHECK(loss(std::vector<double>{0.5, 0.5, 0.5, 0.5}, label) == doctest::Approx(0.25));
    RandomStream rng(2);
    for (int round = 0; round < 20; ++round) {
        std::vector<double> pred(4);
        for (double& p : pred) {
            p = rng.uniform();
        }
        CHECK(loss(pred, label) >= 0.0);
    }
    CHECK_THROWS_AS(loss(std::vector<double>{0.1, 0.2}, label), std::invalid_argument);
}

TEST_CASE("gradients of the zero model hit the closed form") {
    const MlpModel model = zero_model({2, 3, 5});
    RandomStream rng(8);
    const TrainingSample sample{0.2, 6.0, random_label(rng, 5, 2)};
    const Gradients grads = gradients(model, sample);
    // Output 0.5, sigmoid slope 0.25.
    for (std::size_t j = 0; j < 5; ++j) {
        const double target = sample.label.bit(j) ? 1.0 : 0.0;
        const double expected = 2.0 / 5.0 * (0.5 - target) * 0.25;
        CHECK(grads.biases.back()[j] == doctest::Approx(expected).epsilon(1e-14));
    }
    // Hidden ReLU inputs are all zero (dead), so first-layer weights get none.
    for (double g : grads.weights.front()) {
        CHECK(g == 0.0);
    }
}

TEST_CASE("gradients match central finite differences") {
    RandomStream rng(123);
    const double step = 1e-5;
    int checked = 0;
    for (int round = 0; round < 4; ++round) {
        MlpModel model = make_mlp({2, 6, 8, 5}, rng);
        const TrainingSample sample{rng.uniform(-0.9, 0.9), rng.uniform(-10.0, 20.0),
                                    random_label(rng, 5, 2)};
        const Gradients grads = gradients(model, sample);
        for (int probe = 0; probe < 20; ++probe) {
            const std::size_t layer =
                static_cast<std::size_t>(rng.uniform() * model.weights.size());
            const bool weight = rng.uniform() < 0.7;
            auto& params = weight ? model.weights[layer] : model.biases[layer];
            const auto& anal = weight ? grads.weights[layer] : grads.biases[layer];
            const std::size_t k = static_cast<std::size_t>(rng.uniform() * params.size());

            const double saved = params[k];
            params[k] = saved + step;
            const double up = loss(forward(model, sample.u, sample.snr_db), sample.label);
            params[k] = saved - step;
            const double down = loss(forward(model, sample.u, sample.snr_db), sample.label);
            params[k] = saved;

            const double numeric = (up - down) / (2.0 * step);
            if (std::fabs(numeric) < 1e-10 && std::fabs(anal[k]) < 1e-10) {
                continue; // disconnected parameter, both sides vanish
            }
            CHECK(std::fabs(anal[k] - numeric) <=
                  1e-4 * std::max({std::fabs(numeric), std::fabs(anal[k]), 1e-8}));
            ++checked;
        }
    }
    CHECK(checked >= 50);
}

TEST_CASE("dead ReLU paths carry no gradient") {
    MlpModel model = zero_model({2, 3, 4});
    // Negative biases keep the hidden layer dark for any input.
    std::fill(model.biases[0].begin(), model.biases[0].end(), -1.0);
    RandomStream rng(4);
    const TrainingSample sample{0.5, 3.0, random_label(rng, 4, 2)};
    const Gradients grads = gradients(model, sample);
    for (double g : grads.weights[0]) {
        CHECK(g == 0.0);
    }
    for (double g : grads.biases[0]) {
        CHECK(g == 0.0);
    }
    // The second-layer weights see zero activations as well.
    for (double g : grads.weights[1]) {
        CHECK(g == 0.0);
    }
}

TEST_CASE("adam_step first-step magnitude and zero-gradient fixpoint") {
    MlpModel model = zero_model({2, 2, 3});
    AdamState state = AdamState::zeros_like(model);
    AdamConfig config;

    Gradients grads;
    grads.weights.resize(2);
    grads.biases.resize(2);
    grads.weights[0].assign(model.weights[0].size(), 0.0);
    grads.weights[1].assign(model.weights[1].size(), 0.0);
    grads.biases[0].assign(model.biases[0].size(), 0.0);
    grads.biases[1].assign(model.biases[1].size(), 0.0);
    grads.weights[0][1] = 0.37;
    grads.weights[0][2] = -2.4;

    adam_step(model, grads, state, config);
    CHECK(model.weights[0][1] ==
          doctest::Approx(-config.learning_rate).epsilon(1e-3));
    CHECK(model.weights[0][2] ==
          doctest::Approx(config.learning_rate).epsilon(1e-3));
    CHECK(model.weights[0][0] == 0.0);
    CHECK(model.biases[1][0] == 0.0);

    // A second step with zero gradients still moves parameters (momentum),
    // but an all-zero history never does.
    MlpModel still = zero_model({2, 2, 3});
    AdamState idle = AdamState::zeros_like(still);
    Gradients nothing = grads;
    nothing.weights[0][1] = 0.0;
    nothing.weights[0][2] = 0.0;
    adam_step(still, nothing, idle, config);
    for (const auto& layer : still.weights) {
        for (double w : layer) {
            CHECK(w == 0.0);
        }
    }
}

TEST_CASE("training on a fixed toy set descends almost monotonically") {
    RandomStream data_rng(31);
    std::vector<TrainingSample> toy;
    for (int i = 0; i < 100; ++i) {
        toy.push_back(TrainingSample{data_rng.uniform(-0.9, 0.9),
                                     data_rng.uniform(-10.0, 20.0),
                                     random_label(data_rng, 11, 4)});
    }
    RandomStream init_rng(7);
    MlpModel model = make_mlp({2, 12, 11}, init_rng);
    AdamConfig config;
    config.iterations = 200;
    config.batch_fraction = 1.0;
    RandomStream train_rng(99);
    const std::vector<double> history = train(model, toy, config, train_rng);

    REQUIRE(history.size() == 200);
    int decreasing = 0;
    for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i] < history[i - 1]) {
            ++decreasing;
        }
    }
    CHECK(decreasing >= 180);
    CHECK(history.back() < history.front());
}

TEST_CASE("train bookkeeping and reproducibility") {
    RandomStream data_rng(3);
    std::vector<TrainingSample> data;
    for (int i = 0; i < 24; ++i) {
        data.push_back(TrainingSample{data_rng.uniform(-0.9, 0.9),
                                      data_rng.uniform(-10.0, 20.0),
                                      random_label(data_rng, 7, 3)});
    }

    RandomStream init(11);
    MlpModel model = make_mlp({2, 5, 7}, init);
    const MlpModel before = model;
    AdamConfig none;
    none.iterations = 0;
    RandomStream r0(1);
    CHECK(train(model, data, none, r0).empty());
    for (std::size_t h = 0; h < model.weights.size(); ++h) {
        CHECK(model.weights[h] == before.weights[h]);
        CHECK(model.biases[h] == before.biases[h]);
    }

    AdamConfig some;
    some.iterations = 40;
    some.batch_fraction = 0.25;
    RandomStream ra(77);
    RandomStream rb(77);
    MlpModel ma = before;
    MlpModel mb = before;
    const auto ha = train(ma, data, some, ra);
    const auto hb = train(mb, data, some, rb);
    CHECK(ha.size() == 40);
    CHECK(ha == hb);
    for (std::size_t h = 0; h < ma.weights.size(); ++h) {
        CHECK(ma.weights[h] == mb.weights[h]);
        CHECK(ma.biases[h] == mb.biases[h]);
    }

    CHECK_THROWS_AS(train(ma, {}, some, ra), std::invalid_argument);
}

TEST_CASE("select_top_m") {
    CHECK(select_top_m(std::vector<double>{0.9, 0.1, 0.8, 0.7}, 2).to_string() == "1010");
    CHECK(select_top_m(std::vector<double>{0.4, 0.4, 0.4, 0.4}, 2).to_string() == "1100");
    RandomStream rng(6);
    for (int round = 0; round < 30; ++round) {
        std::vector<double> scores(9);
        for (double& s : scores) {
            s = rng.uniform();
        }
        const int m = 1 + static_cast<int>(rng.uniform() * 8);
        CHECK(select_top_m(scores, m).popcount() == m);
    }
    CHECK_THROWS_AS(select_top_m(std::vector<double>{0.1}, 2), std::invalid_argument);
}

TEST_CASE("generate_dataset draws deterministically and labels with the greedy pick") {
    SelectionQuery tmpl{anchor_set(0.0, 0.1, 1), 1.0, ArrayGeometry(11, 0.5), 4, 128};
    RandomStream ra(2025);
    RandomStream rb(2025);
    const auto da = generate_dataset(12, {-0.9, 0.9}, {-5.0, 15.0}, tmpl, ra);
    const auto db = generate_dataset(12, {-0.9, 0.9}, {-5.0, 15.0}, tmpl, rb, 2);
    REQUIRE(da.size() == 12);
    for (std::size_t i = 0; i < da.size(); ++i) {
        CHECK(da[i].u == db[i].u);
        CHECK(da[i].snr_db == db[i].snr_db);
        CHECK(da[i].label == db[i].label);
        CHECK(da[i].label.popcount() == 4);
        CHECK(da[i].u >= -0.9);
        CHECK(da[i].u <= 0.9);
        CHECK(da[i].snr_db >= -5.0);
        CHECK(da[i].snr_db <= 15.0);

        // Label really is the greedy pick for that prior.
        SelectionQuery query = tmpl;
        query.anchors = anchor_set(da[i].u, 0.0, 1);
        query.snr = std::pow(10.0, da[i].snr_db / 10.0);
        CHECK(select_greedy_tra(query).chosen == da[i].label);
    }
}

TEST_CASE("model serialization round-trips bit-exactly") {
    RandomStream rng(314);
    MlpModel model = make_mlp({2, 6, 9}, rng);
    model.meta.seed = 314;
    model.meta.n_samples = 12;
    model.meta.n_antennas = 9;
    model.meta.m_target = 3;
    model.meta.spacing = 0.5;

    const auto path = temp_file("doasel_model_roundtrip.json");
    save_model(model, path);
    const MlpModel loaded = load_model(path);

    CHECK(loaded.layer_dims == model.layer_dims);
    CHECK(loaded.snr_scale == model.snr_scale);
    CHECK(loaded.meta.seed == model.meta.seed);
    for (std::size_t h = 0; h < model.weights.size(); ++h) {
        CHECK(loaded.weights[h] == model.weights[h]);
        CHECK(loaded.biases[h] == model.biases[h]);
    }
    for (int round = 0; round < 100; ++round) {
        const double u = rng.uniform(-0.9, 0.9);
        const double snr_db = rng.uniform(-10.0, 20.0);
        const auto a = forward(model, u, snr_db);
        const auto b = forward(loaded, u, snr_db);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i] == b[i]);
        }
    }
    std::filesystem::remove(path);
}

TEST_CASE("model loading rejects malformed files") {
    const auto path = temp_file("doasel_model_broken.json");

    RandomStream rng(1);
    save_model(make_mlp({2, 4, 5}, rng), path);
    // Truncate mid-document.
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path, std::ios::trunc);
    out << text.substr(0, text.size() / 2);
    out.close();
    CHECK_THROWS_AS(load_model(path), std::runtime_error);

    // Structurally valid JSON with inconsistent shapes.
    std::ofstream bad(path, std::ios::trunc);
    bad << R"({"layer_dims":[2,3,4],"weights":[[1,2,3],[1]],"biases":[[0,0,0],[0,0,0,0]],)"
        << R"("input_norm":{"snr_scale":0.03},"training":{"seed":0,"u_min":-0.9,"u_max":0.9,)"
        << R"("snr_db_min":-10,"snr_db_max":20,"n_samples":0,"iterations":0,"n_antennas":4,)"
        << R"("m_target":2,"spacing":0.5}})";
    bad.close();
    CHECK_THROWS_AS(load_model(path), std::invalid_argument);

    // Empty layer list.
    std::ofstream empty(path, std::ios::trunc);
    empty << R"({"layer_dims":[],"weights":[],"biases":[],"input_norm":{"snr_scale":0.03},)"
          << R"("training":{"seed":0,"u_min":-0.9,"u_max":0.9,"snr_db_min":-10,"snr_db_max":20,)"
          << R"("n_samples":0,"iterations":0,"n_antennas":0,"m_target":0,"spacing":0.5}})";
    empty.close();
    CHECK_THROWS_AS(load_model(path), std::invalid_argument);

    CHECK_THROWS_AS(load_model(temp_file("doasel_no_such_model.json")), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_SUITE("slow") {

TEST_CASE("training on a greedy-labeled dataset reduces the loss") {
    SelectionQuery tmpl{anchor_set(0.0, 0.1, 1), 1.0, ArrayGeometry(21, 0.5), 6, 128};
    RandomStream data_rng(1001);
    const auto dataset =
        generate_dataset(10000, {-0.9, 0.9}, {-10.0, 20.0}, tmpl, data_rng, 0);
    REQUIRE(dataset.size() == 10000);

    RandomStream init(42);
    MlpModel model = make_mlp(kReferenceDims, init);
    AdamConfig config; // reference settings: lr 1e-3, 200 iterations
    RandomStream train_rng(4242);
    const auto history = train(model, dataset, config, train_rng);
    REQUIRE(history.size() == 200);
    CHECK(history.back() <= history.front());
}

TEST_CASE("trained model imitates the greedy selector") {
    const ArrayGeometry geometry(21, 0.5);
    const int m = 6;
    const int n_grid = 512;
    SelectionQuery tmpl{anchor_set(0.0, 0.1, 1), 1.0, geometry, m, n_grid};

    RandomStream data_rng(77);
    const auto dataset = generate_dataset(3000, {-0.9, 0.9}, {-10.0, 20.0}, tmpl, data_rng, 0);

    RandomStream init(4);
    MlpModel model = make_mlp(kReferenceDims, init);
    AdamConfig config;
    config.iterations = 5000;
    config.batch_fraction = 0.25;
    RandomStream train_rng(8);
    train(model, dataset, config, train_rng);

    RandomStream eval_rng(505);
    int close = 0;
    const int held_out = 300;
    for (int i = 0; i < held_out; ++i) {
        const double u = eval_rng.uniform(-0.9, 0.9);
        const double snr_db = eval_rng.uniform(-10.0, 20.0);
        const double snr = std::pow(10.0, snr_db / 10.0);
        const AnchorSet anchors = anchor_set(u, 0.0, 1);

        SelectionQuery query{anchors, snr, geometry, m, n_grid};
        const SelectionResult reference = select_greedy_tra(query);

        const SelectionVector picked = select_with_model(model, u, snr_db, m);
        const Subarray sub = positions_from_selection(picked, geometry);
        const double objective = worst_case_tra(anchors, snr, sub, n_grid);
        if (objective <= 3.0 * reference.objective) {
            ++close;
        }
    }
    MESSAGE("imitation within factor 3: ", close, "/", held_out);
    CHECK(close >= 210); // at least 70%
}

} // TEST_SUITE("slow")
