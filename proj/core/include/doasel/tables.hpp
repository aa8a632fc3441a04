#ifndef DOASEL_TABLES_HPP
#define DOASEL_TABLES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "doasel/metrics.hpp"
#include "doasel/select.hpp"

namespace doasel {

/// One row of the redundancy table:
/// `N,M,F,F_unique,ratio,G,S,S_unique` with the ratio at four decimals.
std::string stats_csv_row(int n, int m);

/// Redundancy statistics for the six reference (N, M) pairs, as CSV with a
/// header line.
std::string reproduce_table1();

struct Table2Params {
    std::uint64_t n = 21;
    std::uint64_t m = 6;
    std::uint64_t full_count = 54264;
    std::uint64_t feasible_count = 0;
    std::uint64_t greedy_count = 210;
    std::uint64_t n_grid = kDefaultGridPoints;
    std::uint64_t sidelobes = 0;
    std::uint64_t bessel_mults = kDefaultBesselMults;
    std::vector<std::uint64_t> layer_dims{2, 16, 32, 64, 32, 16, 21};
};

/// Multiplication cost of each selection method under the supplied
/// parameters, as CSV with a header line.
std::string reproduce_table2(const Table2Params& params);

} // namespace doasel

#endif // DOASEL_TABLES_HPP
