#include "doasel/tables.hpp"

#include <cstdio>

#include "doasel/subarray.hpp"

namespace doasel {

std::string stats_csv_row(int n, int m) {
    const UniqueSet unique = unique_subarray_set(n, m);
    const UniqueSetStats& s = unique.stats;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d,%d,%llu,%llu,%.4f,%llu,%llu,%llu", n, m,
                  static_cast<unsigned long long>(s.total_count),
                  static_cast<unsigned long long>(s.unique_count), s.ratio,
                  static_cast<unsigned long long>(greedy_evaluation_count(n, m)),
                  static_cast<unsigned long long>(s.switches_full),
                  static_cast<unsigned long long>(s.switches_unique));
    return buf;
}

std::string reproduce_table1() {
    static constexpr int kPairs[][2] = {{11, 2}, {11, 4}, {11, 6},
                                        {21, 4}, {21, 6}, {21, 8}};
    std::string out = "N,M,F,F_unique,ratio,G,S,S_unique\n";
    for (const auto& p : kPairs) {
        out += stats_csv_row(p[0], p[1]);
        out += '\n';
    }
    return out;
}

std::string reproduce_table2(const Table2Params& params) {
    CountParams psl;
    psl.n = params.n;
    psl.m = params.m;
    psl.full_count = params.full_count;
    psl.feasible_count = params.feasible_count;

    CountParams greedy;
    greedy.n = params.n;
    greedy.greedy_count = params.greedy_count;
    greedy.n_grid = params.n_grid;
    greedy.sidelobes = params.sidelobes;
    greedy.bessel_mults = params.bessel_mults;

    CountParams dl;
    dl.layer_dims = params.layer_dims;

    std::string out = "method,multiplications\n";
    out += "psl-c," + std::to_string(multiplication_count(CountMethod::PslC, psl)) + '\n';
    out += "tra-g," + std::to_string(multiplication_count(CountMethod::TraG, greedy)) + '\n';
    out += "tra-dl," + std::to_string(multiplication_count(CountMethod::TraDl, dl)) + '\n';
    return out;
}

} // namespace doasel
