#include "doasel/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "doasel/parallel.hpp"

namespace doasel {

namespace {

void validate_query(const SelectionQuery& query) {
    if (query.m_target < 2 || query.m_target > query.geometry.n_antennas()) {
        throw std::invalid_argument("selection: need 2 <= m_target <= n_antennas");
    }
    if (query.anchors.anchors.empty()) {
        throw std::invalid_argument("selection: anchor set is empty");
    }
    if (!(query.snr > 0.0)) {
        throw std::invalid_argument("selection: snr must be positive");
    }
    if (query.n_grid < 64) {
        throw std::invalid_argument("selection: n_grid must be at least 64");
    }
}

double evaluate_worst_case(const SelectionQuery& query, const SelectionVector& sel) {
    const Subarray sub = positions_from_selection(sel, query.geometry);
    return worst_case_tra(query.anchors, query.snr, sub, query.n_grid, query.tra);
}

// Sidelobe count of the chosen layout at the first anchor; used as the K of
// the per-evaluation cost model.
std::uint64_t chosen_sidelobe_count(const SelectionQuery& query, const SelectionVector& sel) {
    const Subarray sub = positions_from_selection(sel, query.geometry);
    return static_cast<std::uint64_t>(
        sidelobe_profile(sub, query.anchors.anchors.front(), query.n_grid).count());
}

std::uint64_t tra_eval_cost(const SelectionQuery& query, std::uint64_t evals,
                            std::uint64_t sidelobes) {
    CountParams params;
    params.n = static_cast<std::uint64_t>(query.geometry.n_antennas());
    params.greedy_count = evals;
    params.n_grid = static_cast<std::uint64_t>(query.n_grid);
    params.sidelobes = sidelobes;
    params.bessel_mults = kDefaultBesselMults;
    return multiplication_count(CountMethod::TraG, params);
}

// Translation-canonical form: the layout shifted to its leading one. Only
// translates share metrics at a fixed anchor set (a reflected layout matches
// at mirrored anchors instead), so reflections get their own canonical form.
std::vector<std::uint8_t> shift_canonical(const std::vector<std::uint8_t>& in) {
    auto bits = in;
    const auto first = std::find(bits.begin(), bits.end(), std::uint8_t{1});
    std::rotate(bits.begin(), first, bits.end());
    return bits;
}

} // namespace

SelectionResult select_exhaustive_tra(const SelectionQuery& query) {
    validate_query(query);
    UniqueSet unique = unique_subarray_set(query.geometry.n_antennas(), query.m_target);
    if (unique.stats.unique_count > query.exhaustive_cap) {
        throw std::runtime_error("select_exhaustive_tra: unique set of " +
                                 std::to_string(unique.stats.unique_count) +
                                 " candidates exceeds the configured cap of " +
                                 std::to_string(query.exhaustive_cap));
    }

    const int count = static_cast<int>(unique.vectors.size());
    std::vector<double> objectives(static_cast<std::size_t>(count));
    parallel_for(count, query.threads, [&](int i) {
        objectives[static_cast<std::size_t>(i)] =
            evaluate_worst_case(query, unique.vectors[static_cast<std::size_t>(i)]);
    });

    int best = 0;
    for (int i = 1; i < count; ++i) {
        const double obj = objectives[static_cast<std::size_t>(i)];
        const double best_obj = objectives[static_cast<std::size_t>(best)];
        if (obj < best_obj ||
            (obj == best_obj &&
             unique.vectors[static_cast<std::size_t>(i)] < unique.vectors[static_cast<std::size_t>(best)])) {
            best = i;
        }
    }

    SelectionResult result{unique.vectors[static_cast<std::size_t>(best)]};
    result.objective = objectives[static_cast<std::size_t>(best)];
    result.evaluations = static_cast<std::uint64_t>(count);
    result.mult_count = tra_eval_cost(query, result.evaluations,
                                      chosen_sidelobe_count(query, result.chosen));
    return result;
}

SelectionResult select_greedy_tra(const SelectionQuery& query) {
    validate_query(query);
    const int n = query.geometry.n_antennas();
    if (query.m_target >= n) {
        throw std::invalid_argument("select_greedy_tra: m_target must be below n_antennas");
    }

    std::vector<std::uint8_t> current(static_cast<std::size_t>(n), 1);
    int popcount = n;
    std::uint64_t evaluations = 0;
    double best_objective = std::numeric_limits<double>::infinity();
    std::unordered_map<std::string, double> memo;

    while (popcount > query.m_target) {
        std::vector<int> removable;
        removable.reserve(static_cast<std::size_t>(popcount));
        for (int i = 0; i < n; ++i) {
            if (current[static_cast<std::size_t>(i)]) {
                removable.push_back(i);
            }
        }

        // Evaluate memo misses in parallel, then pick sequentially so the
        // winner is identical for any thread count.
        std::vector<std::vector<std::uint8_t>> candidates;
        std::vector<std::vector<std::uint8_t>> canonicals;
        std::vector<std::string> keys;
        candidates.reserve(removable.size());
        canonicals.reserve(removable.size());
        keys.reserve(removable.size());
        std::vector<int> miss_index;
        for (int idx : removable) {
            auto bits = current;
            bits[static_cast<std::size_t>(idx)] = 0;
            canonicals.push_back(shift_canonical(bits));
            candidates.push_back(std::move(bits));
            keys.emplace_back(canonicals.back().begin(), canonicals.back().end());
            if (!memo.contains(keys.back())) {
                memo.emplace(keys.back(), std::numeric_limits<double>::quiet_NaN());
                miss_index.push_back(static_cast<int>(candidates.size()) - 1);
            }
        }
        std::vector<double> miss_values(miss_index.size());
        parallel_for(static_cast<int>(miss_index.size()), query.threads, [&](int i) {
            const int c = miss_index[static_cast<std::size_t>(i)];
            miss_values[static_cast<std::size_t>(i)] = evaluate_worst_case(
                query, SelectionVector(canonicals[static_cast<std::size_t>(c)]));
        });
        for (std::size_t i = 0; i < miss_index.size(); ++i) {
            memo[keys[static_cast<std::size_t>(miss_index[i])]] = miss_values[i];
        }

        int best = -1;
        double best_round = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            ++evaluations;
            const double obj = memo.at(keys[c]);
            if (best < 0 || obj < best_round) {
                best = static_cast<int>(c);
                best_round = obj;
            }
        }

        current = candidates[static_cast<std::size_t>(best)];
        --popcount;
        best_objective = best_round;
    }

    SelectionResult result{SelectionVector(current)};
    result.objective = best_objective;
    result.evaluations = evaluations;
    result.mult_count = tra_eval_cost(query, evaluations,
                                      chosen_sidelobe_count(query, result.chosen));
    return result;
}

SelectionResult select_psl_c(const SelectionQuery& query, double delta) {
    validate_query(query);
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("select_psl_c: delta must lie in [0, 1]");
    }
    const double u0 = query.anchors.anchors.front();
    const int n = query.geometry.n_antennas();

    UniqueSet unique = unique_subarray_set(n, query.m_target);
    if (unique.stats.unique_count > query.exhaustive_cap) {
        throw std::runtime_error("select_psl_c: unique set exceeds the configured cap");
    }
    const int count = static_cast<int>(unique.vectors.size());

    // delta = 1 never constrains (sidelobes sit strictly below the mainlobe
    // peak), so the PSL scan can be skipped entirely.
    std::vector<double> psl_values(static_cast<std::size_t>(count), 0.0);
    if (delta < 1.0) {
        parallel_for(count, query.threads, [&](int i) {
            const Subarray sub =
                positions_from_selection(unique.vectors[static_cast<std::size_t>(i)], query.geometry);
            psl_values[static_cast<std::size_t>(i)] =
                psl(sidelobe_profile(sub, u0, query.n_grid));
        });
    }

    std::vector<double> bounds(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const Subarray sub =
            positions_from_selection(unique.vectors[static_cast<std::size_t>(i)], query.geometry);
        bounds[static_cast<std::size_t>(i)] = crlb(query.snr, sub);
    }

    int best = -1;
    std::uint64_t feasible = 0;
    for (int i = 0; i < count; ++i) {
        if (psl_values[static_cast<std::size_t>(i)] > delta) {
            continue;
        }
        ++feasible;
        if (best < 0 || bounds[static_cast<std::size_t>(i)] < bounds[static_cast<std::size_t>(best)] ||
            (bounds[static_cast<std::size_t>(i)] == bounds[static_cast<std::size_t>(best)] &&
             unique.vectors[static_cast<std::size_t>(i)] < unique.vectors[static_cast<std::size_t>(best)])) {
            best = i;
        }
    }

    SelectionResult result{SelectionVector(std::vector<std::uint8_t>(1, 1))};
    if (best >= 0) {
        result.chosen = unique.vectors[static_cast<std::size_t>(best)];
        result.objective = bounds[static_cast<std::size_t>(best)];
    } else {
        // Nothing satisfies the constraint; fall back to the flattest pattern.
        int flattest = 0;
        for (int i = 1; i < count; ++i) {
            if (psl_values[static_cast<std::size_t>(i)] < psl_values[static_cast<std::size_t>(flattest)] ||
                (psl_values[static_cast<std::size_t>(i)] == psl_values[static_cast<std::size_t>(flattest)] &&
                 unique.vectors[static_cast<std::size_t>(i)] < unique.vectors[static_cast<std::size_t>(flattest)])) {
                flattest = i;
            }
        }
        result.chosen = unique.vectors[static_cast<std::size_t>(flattest)];
        result.objective = bounds[static_cast<std::size_t>(flattest)];
        result.psl_fallback = true;
    }
    result.evaluations = static_cast<std::uint64_t>(count);

    CountParams cost;
    cost.n = static_cast<std::uint64_t>(n);
    cost.m = static_cast<std::uint64_t>(query.m_target);
    cost.full_count = binomial(n, query.m_target);
    cost.feasible_count = feasible;
    result.mult_count = multiplication_count(CountMethod::PslC, cost);
    return result;
}

SelectionVector select_ula(const ArrayGeometry& geometry, int m) {
    if (m < 1 || m > geometry.n_antennas()) {
        throw std::invalid_argument("select_ula: need 1 <= m <= n_antennas");
    }
    const int stride = std::max(1, static_cast<int>(std::lround(1.0 / geometry.spacing())));
    if ((m - 1) * stride >= geometry.n_antennas()) {
        throw std::runtime_error("select_ula: half-wavelength comb does not fit the grid");
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(geometry.n_antennas()), 0);
    for (int i = 0; i < m; ++i) {
        bits[static_cast<std::size_t>(i * stride)] = 1;
    }
    return SelectionVector(std::move(bits));
}

std::uint64_t greedy_evaluation_count(int n, int m) {
    if (n < 1 || m < 1 || m > n) {
        throw std::invalid_argument("greedy_evaluation_count: need 1 <= m <= n");
    }
    return static_cast<std::uint64_t>(n + m + 1) * static_cast<std::uint64_t>(n - m) / 2;
}

std::uint64_t multiplication_count(CountMethod method, const CountParams& params) {
    const auto require = [](const std::optional<std::uint64_t>& field, const char* name) {
        if (!field) {
            throw std::invalid_argument(std::string("multiplication_count: missing parameter ") + name);
        }
        return *field;
    };

    switch (method) {
    case CountMethod::PslC: {
        const std::uint64_t n = require(params.n, "n");
        const std::uint64_t m = require(params.m, "m");
        const std::uint64_t f = require(params.full_count, "full_count");
        const std::uint64_t fc = require(params.feasible_count, "feasible_count");
        return 6 * n + m * f + 4 * m * fc;
    }
    case CountMethod::TraG: {
        const std::uint64_t g = require(params.greedy_count, "greedy_count");
        const std::uint64_t n = require(params.n, "n");
        const std::uint64_t nr = require(params.n_grid, "n_grid");
        const std::uint64_t k = require(params.sidelobes, "sidelobes");
        const std::uint64_t db = require(params.bessel_mults, "bessel_mults");
        return g * (2 * n * nr + n + k * (2 * n + 2 + db));
    }
    case CountMethod::TraDl: {
        if (!params.layer_dims || params.layer_dims->size() < 2) {
            throw std::invalid_argument("multiplication_count: missing parameter layer_dims");
        }
        const auto& dims = *params.layer_dims;
        std::uint64_t total = 0;
        for (std::size_t h = 1; h < dims.size(); ++h) {
            total += dims[h - 1] * dims[h];
        }
        return total;
    }
    }
    throw std::invalid_argument("multiplication_count: unknown method");
}

} // namespace doasel
