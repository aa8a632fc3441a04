#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "doasel/metrics.hpp"
#include "doasel/select.hpp"
#include "doasel/signal.hpp"

using namespace doasel;

namespace {

SelectionQuery half_wave_query(int n, int m, double u_hat, double delta_u, double snr,
                           int n_grid, int n_anchors = 5) {
    SelectionQuery query{anchor_set(u_hat, delta_u, n_anchors), snr,
                         ArrayGeometry(n, 0.5), m, n_grid};
    return query;
}

} // namespace

TEST_CASE("select_exhaustive_tra scans exactly the unique set") {
    SelectionQuery query = half_wave_query(11, 2, 0.2, 0.1, 10.0, 512);
    const SelectionResult result = select_exhaustive_tra(query);
    CHECK(result.evaluations == 10);
    CHECK(result.chosen.popcount() == 2);

    // Self-consistency: no unique candidate beats the returned objective.
    const UniqueSet unique = unique_subarray_set(11, 2);
    for (const SelectionVector& cand : unique.vectors) {
        const Subarray sub = positions_from_selection(cand, query.geometry);
        CHECK(result.objective <=
              worst_case_tra(query.anchors, query.snr, sub, query.n_grid) + 1e-15);
    }
}

TEST_CASE("select_exhaustive_tra full-array corner and budget cap") {
    SelectionQuery full = half_wave_query(4, 4, 0.1, 0.1, 5.0, 256);
    const SelectionResult result = select_exhaustive_tra(full);
    CHECK(result.evaluations == 1);
    CHECK(result.chosen.popcount() == 4);
    CHECK(result.chosen.to_string() == "1111");

    SelectionQuery capped = half_wave_query(21, 8, 0.2, 0.1, 10.0, 256);
    capped.exhaustive_cap = 1000;
    CHECK_THROWS_AS(select_exhaustive_tra(capped), std::runtime_error);
}

TEST_CASE("select_exhaustive_tra optimality over the unique set at (11, 4)") {
    SelectionQuery query = half_wave_query(11, 4, 0.2, 0.1, 10.0, 512);
    const SelectionResult result = select_exhaustive_tra(query);
    CHECK(result.evaluations == 70);

    const UniqueSet unique = unique_subarray_set(11, 4);
    REQUIRE(unique.stats.unique_count == 70);
    int strictly_better = 0;
    for (const SelectionVector& cand : unique.vectors) {
        const Subarray sub = positions_from_selection(cand, query.geometry);
        if (worst_case_tra(query.anchors, query.snr, sub, query.n_grid) <
            result.objective - 1e-15) {
            ++strictly_better;
        }
    }
    CHECK(strictly_better == 0);
}

TEST_CASE("select_greedy_tra evaluation counts match the closed form") {
    CHECK(select_greedy_tra(half_wave_query(21, 8, 0.2, 0.1, 10.0, 256)).evaluations == 195);
    CHECK(select_greedy_tra(half_wave_query(11, 6, 0.2, 0.1, 10.0, 256)).evaluations == 45);
    CHECK(greedy_evaluation_count(21, 8) == 195);
    CHECK(greedy_evaluation_count(11, 6) == 45);
    CHECK(greedy_evaluation_count(11, 2) == 63);
    CHECK(greedy_evaluation_count(21, 4) == 221);
    CHECK(greedy_evaluation_count(21, 6) == 210);
    CHECK(greedy_evaluation_count(11, 4) == 56);
    CHECK(greedy_evaluation_count(5, 5) == 0);
}

TEST_CASE("select_greedy_tra stays near the exhaustive optimum at (11, 4)") {
    SelectionQuery query = half_wave_query(11, 4, 0.2, 0.1, 10.0, 512);
    const SelectionResult greedy = select_greedy_tra(query);
    const SelectionResult exhaustive = select_exhaustive_tra(query);
    CHECK(greedy.chosen.popcount() == 4);
    CHECK(greedy.objective >= exhaustive.objective - 1e-15);
    CHECK(greedy.objective <= 1.25 * exhaustive.objective);
}

TEST_CASE("select_greedy_tra nests its choices") {
    for (int m = 3; m <= 8; ++m) {
        SelectionQuery larger = half_wave_query(11, m + 1, 0.15, 0.1, 8.0, 256);
        SelectionQuery smaller = half_wave_query(11, m, 0.15, 0.1, 8.0, 256);
        const SelectionVector big = select_greedy_tra(larger).chosen;
        const SelectionVector small = select_greedy_tra(smaller).chosen;
        // Every antenna kept at m survives from the m+1 round.
        for (std::size_t i = 0; i < small.size(); ++i) {
            if (small.bit(i)) {
                CHECK(big.bit(i));
            }
        }
    }
}

TEST_CASE("selectors are deterministic and honor m_target") {
    SelectionQuery query = half_wave_query(11, 5, -0.35, 0.1, 12.0, 512);
    const SelectionResult a = select_greedy_tra(query);
    const SelectionResult b = select_greedy_tra(query);
    CHECK(a.chosen == b.chosen);
    CHECK(a.objective == b.objective);
    CHECK(a.evaluations == b.evaluations);

    SelectionQuery threaded = query;
    threaded.threads = 2;
    const SelectionResult c = select_greedy_tra(threaded);
    CHECK(c.chosen == a.chosen);
    CHECK(c.objective == a.objective);

    const SelectionResult d = select_exhaustive_tra(query);
    const SelectionResult e = select_exhaustive_tra(threaded);
    CHECK(d.chosen == e.chosen);
    CHECK(d.objective == e.objective);

    for (const SelectionResult* r : {&a, &d}) {
        CHECK(r->chosen.popcount() == 5);
    }

    CHECK_THROWS_AS(select_greedy_tra(half_wave_query(11, 11, 0.0, 0.1, 5.0, 256)),
                    std::invalid_argument);
}

TEST_CASE("select_psl_c with a vacuous constraint minimizes the bound") {
    SelectionQuery query = half_wave_query(21, 6, 0.2, 0.1, 10.0, 2048);
    const SelectionResult result = select_psl_c(query, 1.0);

    const Subarray chosen = positions_from_selection(result.chosen, query.geometry);
    const std::vector<double> expected{0.0, 0.5, 1.0, 9.0, 9.5, 10.0};
    REQUIRE(chosen.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(chosen[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
    CHECK_FALSE(result.psl_fallback);
    CHECK(result.evaluations == 7872);

    // Its diversity tops every unique candidate.
    const double u_best = position_variance(chosen);
    const UniqueSet unique = unique_subarray_set(21, 6);
    for (const SelectionVector& cand : unique.vectors) {
        CHECK(u_best >= position_variance(
                            positions_from_selection(cand, query.geometry)) - 1e-12);
    }
}

TEST_CASE("select_psl_c constrained and infeasible modes") {
    // On a quarter-wave grid the compact comb keeps its first sidelobe
    // outside the visible region, so delta = 0 stays feasible.
    SelectionQuery quarter = half_wave_query(21, 3, 0.2, 0.1, 10.0, 1024);
    const SelectionResult compact = select_psl_c(quarter, 0.0);
    CHECK_FALSE(compact.psl_fallback);
    CHECK(psl(sidelobe_profile(
              positions_from_selection(compact.chosen, quarter.geometry), 0.1,
              quarter.n_grid)) == 0.0);

    // On a half-wavelength grid every 3-element layout shows a sidelobe, so
    // delta = 0 cannot be met and the flagged fallback kicks in.
    SelectionQuery half{anchor_set(0.2, 0.1, 5), 10.0, ArrayGeometry(11, 1.0), 3, 1024};
    const SelectionResult fallback = select_psl_c(half, 0.0);
    CHECK(fallback.psl_fallback);
    CHECK(fallback.chosen.popcount() == 3);

    // A binding constraint can only shrink the feasible set, so the bound of
    // the constrained winner is at least the unconstrained one.
    SelectionQuery q6 = half_wave_query(21, 6, 0.2, 0.1, 10.0, 1024);
    const SelectionResult free_pick = select_psl_c(q6, 1.0);
    const SelectionResult tight = select_psl_c(q6, 0.35);
    CHECK_FALSE(tight.psl_fallback);
    CHECK(tight.objective >= free_pick.objective - 1e-18);
    const double tight_psl = psl(sidelobe_profile(
        positions_from_selection(tight.chosen, q6.geometry), 0.1, q6.n_grid));
    CHECK(tight_psl <= 0.35 + 1e-12);

    CHECK_THROWS_AS(select_psl_c(q6, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(select_psl_c(q6, -0.1), std::invalid_argument);
}

TEST_CASE("select_ula combs") {
    const SelectionVector half(select_ula(ArrayGeometry(21, 0.5), 6));
    CHECK(half.set_indices() == std::vector<int>{0, 2, 4, 6, 8, 10});
    const Subarray pos = positions_from_selection(half, ArrayGeometry(21, 0.5));
    for (std::size_t i = 0; i < pos.size(); ++i) {
        CHECK(pos[i] == doctest::Approx(static_cast<double>(i)));
    }

    const Subarray pos4 =
        positions_from_selection(select_ula(ArrayGeometry(21, 0.5), 4), ArrayGeometry(21, 0.5));
    REQUIRE(pos4.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(pos4[i] == doctest::Approx(static_cast<double>(i)));
    }

    CHECK(select_ula(ArrayGeometry(5, 1.0), 3).set_indices() == std::vector<int>{0, 1, 2});

    CHECK_THROWS_AS(select_ula(ArrayGeometry(5, 0.5), 4), std::runtime_error);
}

TEST_CASE("multiplication_count formulas") {
    CountParams dl;
    dl.layer_dims = std::vector<std::uint64_t>{2, 16, 32, 64, 32, 16, 21};
    CHECK(multiplication_count(CountMethod::TraDl, dl) == 5488);

    CountParams greedy;
    greedy.greedy_count = 0;
    greedy.n = 21;
    greedy.n_grid = 2048;
    greedy.sidelobes = 4;
    greedy.bessel_mults = 30;
    CHECK(multiplication_count(CountMethod::TraG, greedy) == 0);

    greedy.greedy_count = 210;
    greedy.sidelobes = 0;
    CHECK(multiplication_count(CountMethod::TraG, greedy) ==
          210ULL * (2ULL * 21 * 2048 + 21));

    CountParams psl_params;
    psl_params.n = 21;
    psl_params.m = 6;
    psl_params.full_count = 54264;
    psl_params.feasible_count = 1000;
    CHECK(multiplication_count(CountMethod::PslC, psl_params) ==
          6ULL * 21 + 6ULL * 54264 + 24ULL * 1000);
    CHECK(multiplication_count(CountMethod::PslC, psl_params) == 349710);

    CountParams missing;
    missing.n = 21;
    CHECK_THROWS_AS(multiplication_count(CountMethod::TraG, missing), std::invalid_argument);
    CHECK_THROWS_AS(multiplication_count(CountMethod::PslC, missing), std::invalid_argument);
    CHECK_THROWS_AS(multiplication_count(CountMethod::TraDl, missing), std::invalid_argument);
}

TEST_CASE("selection queries are validated") {
    CHECK_THROWS_AS(select_greedy_tra(half_wave_query(11, 1, 0.2, 0.1, 10.0, 256)),
                    std::invalid_argument);
    SelectionQuery no_anchor{AnchorSet{}, 10.0, ArrayGeometry(11, 0.5), 4, 256};
    CHECK_THROWS_AS(select_greedy_tra(no_anchor), std::invalid_argument);
    SelectionQuery bad_snr = half_wave_query(11, 4, 0.2, 0.1, 10.0, 256);
    bad_snr.snr = 0.0;
    CHECK_THROWS_AS(select_exhaustive_tra(bad_snr), std::invalid_argument);
}
