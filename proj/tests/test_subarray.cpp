#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "doasel/rng.hpp"
#include "doasel/subarray.hpp"

using namespace doasel;

namespace {

SelectionVector random_selection(RandomStream& rng, int n) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
    int ones = 0;
    for (auto& b : bits) {
        b = rng.uniform() < 0.5 ? 1 : 0;
        ones += b;
    }
    if (ones == 0) {
        bits[static_cast<std::size_t>(rng.uniform() * n)] = 1;
    }
    return SelectionVector(bits);
}

SelectionVector flipped(const SelectionVector& sel) {
    std::vector<std::uint8_t> bits(sel.bits().rbegin(), sel.bits().rend());
    return SelectionVector(bits);
}

} // namespace

TEST_CASE("type invariants are enforced") {
    CHECK_THROWS_AS(ArrayGeometry(1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ArrayGeometry(4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ArrayGeometry(4, -1.0), std::invalid_argument);

    CHECK_THROWS_AS(SelectionVector(std::vector<std::uint8_t>{0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(SelectionVector(std::vector<std::uint8_t>{}), std::invalid_argument);
    CHECK_THROWS_AS(SelectionVector(std::vector<std::uint8_t>{0, 2}), std::invalid_argument);

    CHECK_THROWS_AS(Subarray({1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Subarray({2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Subarray({}), std::invalid_argument);
}

TEST_CASE("positions_from_selection maps set bits to grid positions") {
    const ArrayGeometry g4(4, 1.0);
    const auto pos = positions_from_selection(
        SelectionVector(std::vector<std::uint8_t>{1, 1, 0, 1}), g4);
    REQUIRE(pos.size() == 3);
    CHECK(pos[0] == 0.0);
    CHECK(pos[1] == 1.0);
    CHECK(pos[2] == 3.0);

    const ArrayGeometry g7(7, 0.5);
    std::vector<std::uint8_t> single(7, 0);
    single[0] = 1;
    const auto lone = positions_from_selection(SelectionVector(single), g7);
    REQUIRE(lone.size() == 1);
    CHECK(lone[0] == 0.0);

    const ArrayGeometry g5(5, 0.5);
    const auto two = positions_from_selection(
        SelectionVector(std::vector<std::uint8_t>{0, 0, 1, 0, 1}), g5);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == 1.0);
    CHECK(two[1] == 2.0);

    CHECK_THROWS_AS(positions_from_selection(
                        SelectionVector(std::vector<std::uint8_t>{1, 1}), g5),
                    std::invalid_argument);
}

TEST_CASE("enumerate_subarrays counts and ordering") {
    CHECK(enumerate_subarrays(11, 2).size() == 55);
    CHECK(enumerate_subarrays(21, 4).size() == 5985);

    const auto full = enumerate_subarrays(3, 3);
    REQUIRE(full.size() == 1);
    CHECK(full[0] == SelectionVector(std::vector<std::uint8_t>{1, 1, 1}));

    CHECK_THROWS_AS(enumerate_subarrays(4, 5), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_subarrays(4, 0), std::invalid_argument);

    const auto seq = enumerate_subarrays(6, 3);
    REQUIRE(seq.size() == 20);
    std::set<std::string> distinct;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i].popcount() == 3);
        distinct.insert(seq[i].to_string());
        if (i > 0) {
            CHECK(seq[i - 1] < seq[i]);
        }
    }
    CHECK(distinct.size() == seq.size());
}

TEST_CASE("score uses power-of-two position weights") {
    CHECK(score(SelectionVector(std::vector<std::uint8_t>{1, 1, 0, 1})) == 11);
    CHECK(score(SelectionVector(std::vector<std::uint8_t>{1, 0, 0, 0})) == 1);
    CHECK(score(SelectionVector(std::vector<std::uint8_t>{1, 0, 1, 1, 1, 0, 0, 0})) == 29);
}

TEST_CASE("align_layout canonicalizes shifted and mirrored layouts") {
    const SelectionVector expected(std::vector<std::uint8_t>{1, 0, 1, 1, 1, 0, 0, 0});
    CHECK(align_layout(SelectionVector(std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1, 0, 1})) ==
          expected);
    CHECK(align_layout(SelectionVector(std::vector<std::uint8_t>{0, 1, 0, 1, 1, 1, 0, 0})) ==
          expected);

    const SelectionVector lone(std::vector<std::uint8_t>{1, 0, 0, 0});
    CHECK(align_layout(lone) == lone);
}

TEST_CASE("align_layout properties on random vectors") {
    RandomStream rng(42);
    for (int round = 0; round < 400; ++round) {
        const int n = 2 + static_cast<int>(rng.uniform() * 20);
        const SelectionVector sel = random_selection(rng, n);
        const SelectionVector aligned = align_layout(sel);

        CHECK(aligned.bit(0));
        CHECK(aligned.popcount() == sel.popcount());
        CHECK(align_layout(aligned) == aligned);
        CHECK(align_layout(flipped(sel)) == aligned);

        // Non-wrapping translations stay in the same class.
        auto bits = sel.bits();
        if (bits.back() == 0) {
            std::rotate(bits.rbegin(), bits.rbegin() + 1, bits.rend());
            CHECK(align_layout(SelectionVector(bits)) == aligned);
        }
    }
}

TEST_CASE("unique_subarray_set matches the published redundancy counts") {
    const auto set_11_2 = unique_subarray_set(11, 2);
    CHECK(set_11_2.stats.total_count == 55);
    CHECK(set_11_2.stats.unique_count == 10);
    CHECK(set_11_2.stats.ratio == doctest::Approx(0.1818).epsilon(1e-3));

    CHECK(unique_subarray_set(11, 4).stats.unique_count == 70);
    CHECK(unique_subarray_set(21, 4).stats.unique_count == 615);

    for (const auto& v : set_11_2.vectors) {
        CHECK(v.popcount() == 2);
        CHECK(align_layout(v) == v);
    }
}

TEST_CASE("switch_counts reproduces the published connection counts") {
    const auto set_11_2 = unique_subarray_set(11, 2);
    const auto counts = switch_counts(set_11_2.vectors, 11, 2);
    CHECK(counts.first == 22);
    CHECK(counts.second == 11);

    const auto set_11_4 = unique_subarray_set(11, 4);
    const auto counts4 = switch_counts(set_11_4.vectors, 11, 4);
    CHECK(counts4.first == 44);
    CHECK(counts4.second == 21);

    // A single layout needs exactly one connection per RF chain.
    std::vector<std::uint8_t> bits(9, 0);
    bits[0] = bits[3] = bits[5] = 1;
    const std::vector<SelectionVector> lone{SelectionVector(bits)};
    const auto single = switch_counts(lone, 9, 3);
    CHECK(single.first == 27);
    CHECK(single.second == 3);
}

TEST_CASE("position_variance basics") {
    CHECK(position_variance(Subarray({5.0})) == 0.0);
    CHECK(position_variance(Subarray({0.0, 4.0})) == doctest::Approx(4.0));
    // Translation invariance.
    RandomStream rng(7);
    for (int round = 0; round < 50; ++round) {
        std::vector<double> pos;
        double p = 0.0;
        const int m = 2 + static_cast<int>(rng.uniform() * 6);
        for (int i = 0; i < m; ++i) {
            p += 0.5 + rng.uniform() * 2.0;
            pos.push_back(p);
        }
        const double shift = rng.uniform(-5.0, 5.0);
        std::vector<double> moved = pos;
        for (double& v : moved) {
            v += shift;
        }
        CHECK(position_variance(Subarray(moved)) ==
              doctest::Approx(position_variance(Subarray(pos))).epsilon(1e-12));
    }
}

TEST_CASE("binomial") {
    CHECK(binomial(11, 2) == 55);
    CHECK(binomial(21, 8) == 203490);
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(64, 32) == 1832624140942590534ULL);
    CHECK_THROWS_AS(binomial(65, 2), std::invalid_argument);
    CHECK_THROWS_AS(binomial(4, 5), std::invalid_argument);
}
