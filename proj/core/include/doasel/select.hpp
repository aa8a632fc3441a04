#ifndef DOASEL_SELECT_HPP
#define DOASEL_SELECT_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "doasel/metrics.hpp"
#include "doasel/subarray.hpp"

namespace doasel {

inline constexpr std::uint64_t kDefaultExhaustiveCap = 50000;
inline constexpr std::uint64_t kDefaultBesselMults = 30;

struct SelectionQuery {
    AnchorSet anchors;
    double snr = 1.0; // aggregate S, linear
    ArrayGeometry geometry{21, 0.5};
    int m_target = 6;
    int n_grid = kDefaultGridPoints;
    std::uint64_t exhaustive_cap = kDefaultExhaustiveCap;
    int threads = 1;
    TraOptions tra;
};

struct SelectionResult {
    SelectionVector chosen;
    double objective = 0.0;        // worst-case TRA, or CRLB for the PSL-constrained pick
    std::uint64_t evaluations = 0; // candidate metric evaluations performed
    std::uint64_t mult_count = 0;  // cost-model multiplications for the run
    bool psl_fallback = false;     // PSL-C only: no candidate met the constraint
};

/// Worst-case-TRA minimizer over the whole unique subarray set. Ties go to
/// the lexicographically smallest layout. Fails when the unique set exceeds
/// query.exhaustive_cap.
SelectionResult select_exhaustive_tra(const SelectionQuery& query);

/// Greedy descent from the full array: each round drops the antenna whose
/// removal leaves the best worst-case TRA, until m_target elements remain.
/// Performs exactly (N+M+1)(N-M)/2 candidate evaluations.
SelectionResult select_greedy_tra(const SelectionQuery& query);

/// CRLB minimizer over the unique set subject to PSL <= delta at the first
/// anchor. With an empty feasible set the minimum-PSL candidate is returned
/// and flagged.
SelectionResult select_psl_c(const SelectionQuery& query, double delta);

/// The m-element comb at half-wavelength pitch: indices {0, k, 2k, ...} with
/// k = round(1/spacing), so positions are [0, 1, ..., m-1] half-wavelengths
/// (contiguous indices when the grid pitch is already >= half wavelength).
SelectionVector select_ula(const ArrayGeometry& geometry, int m);

/// (N+M+1)(N-M)/2 — candidate evaluations of the greedy pass.
std::uint64_t greedy_evaluation_count(int n, int m);

enum class CountMethod { PslC, TraG, TraDl };

/// Inputs for multiplication_count; only the fields the method uses must be
/// set.
struct CountParams {
    std::optional<std::uint64_t> n;              // antennas
    std::optional<std::uint64_t> m;              // RF chains
    std::optional<std::uint64_t> full_count;     // F, candidate sets
    std::optional<std::uint64_t> feasible_count; // sets meeting the PSL constraint
    std::optional<std::uint64_t> greedy_count;   // G, greedy evaluations
    std::optional<std::uint64_t> n_grid;         // sidelobe-search grid points
    std::optional<std::uint64_t> sidelobes;      // K
    std::optional<std::uint64_t> bessel_mults;   // multiplications per Bessel call
    std::optional<std::vector<std::uint64_t>> layer_dims; // full chain incl. input/output
};

/// Multiplication cost model per selection method:
///   psl-c:  6N + M*F + 4M*F_feasible
///   tra-g:  G * (2*N*N_R + N + K*(2N + 2 + bessel_mults))
///   tra-dl: sum over layers of g_{h-1} * g_h
std::uint64_t multiplication_count(CountMethod method, const CountParams& params);

} // namespace doasel

#endif // DOASEL_SELECT_HPP
