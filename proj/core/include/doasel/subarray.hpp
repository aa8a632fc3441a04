#ifndef DOASEL_SUBARRAY_HPP
#define DOASEL_SUBARRAY_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace doasel {

/// Uniform N-element antenna grid. Distances are in half-wavelength units;
/// antenna m (zero-based) sits at m * spacing.
class ArrayGeometry {
public:
    ArrayGeometry(int n_antennas, double spacing);

    int n_antennas() const { return n_antennas_; }
    double spacing() const { return spacing_; }

private:
    int n_antennas_;
    double spacing_;
};

/// Length-N binary antenna-selection mask with at least one element chosen.
class SelectionVector {
public:
    explicit SelectionVector(std::vector<std::uint8_t> bits);

    /// Parse "0110..." style strings.
    static SelectionVector from_string(const std::string& text);

    std::size_t size() const { return bits_.size(); }
    int popcount() const { return popcount_; }
    bool bit(std::size_t i) const { return bits_[i] != 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::vector<int> set_indices() const;
    std::string to_string() const;

    bool operator==(const SelectionVector& other) const { return bits_ == other.bits_; }
    bool operator!=(const SelectionVector& other) const { return bits_ != other.bits_; }
    /// Lexicographic order on the bit sequence.
    bool operator<(const SelectionVector& other) const { return bits_ < other.bits_; }

private:
    std::vector<std::uint8_t> bits_;
    int popcount_;
};

/// Selected antenna positions in half-wavelength units, strictly increasing.
class Subarray {
public:
    explicit Subarray(std::vector<double> positions);

    std::size_t size() const { return positions_.size(); }
    const std::vector<double>& positions() const { return positions_; }
    double operator[](std::size_t i) const { return positions_[i]; }

private:
    std::vector<double> positions_;
};

/// Redundancy statistics of the (N, M) subarray family.
struct UniqueSetStats {
    std::uint64_t total_count = 0;     // C(N, M)
    std::uint64_t unique_count = 0;    // distinct layouts after alignment
    double ratio = 0.0;                // unique_count / total_count
    std::uint64_t switches_full = 0;   // M * N
    std::uint64_t switches_unique = 0; // distinct (RFC, antenna) connections
};

struct UniqueSet {
    std::vector<SelectionVector> vectors;
    UniqueSetStats stats;
};

/// C(n, k); requires n <= 64 so the result fits an unsigned 64-bit value.
std::uint64_t binomial(int n, int k);

/// Positions i * spacing for every selected zero-based index i, ascending.
Subarray positions_from_selection(const SelectionVector& sel,
                                  const ArrayGeometry& geometry);

/// All C(n, m) selection vectors in ascending lexicographic bit order.
std::vector<SelectionVector> enumerate_subarrays(int n, int m);

/// Sum of 2^i over the selected zero-based indices i; requires size <= 64.
std::uint64_t score(const SelectionVector& sel);

/// Canonical representative of the translation/reflection class of `sel`:
/// shift left until the leading bit is one, do the same to the reversed
/// vector, and keep whichever of the two scores higher (ties keep the
/// unreversed shift). Idempotent; preserves popcount.
SelectionVector align_layout(const SelectionVector& sel);

/// Aligned deduplication of the whole (n, m) family plus its statistics.
/// Vectors come back in first-occurrence order of the enumeration.
UniqueSet unique_subarray_set(int n, int m);

/// (switches_full, switches_unique) for a unique subarray family on an
/// n-antenna grid with m RF chains. Each layout is realized in the
/// orientation that puts its weight toward the low antenna indices, and
/// RF chain r then connects to the r-th selected antenna in ascending
/// position order; switches_unique counts the distinct connections.
std::pair<std::uint64_t, std::uint64_t> switch_counts(
    const std::vector<SelectionVector>& unique_vectors, int n, int m);

/// Mean squared deviation of the element positions from their centroid.
double position_variance(const Subarray& sub);

} // namespace doasel

#endif // DOASEL_SUBARRAY_HPP
