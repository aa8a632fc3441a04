#include "doasel/subarray.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace doasel {

namespace {

std::vector<std::uint8_t> shift_to_leading_one(std::vector<std::uint8_t> bits) {
    const auto first = std::find(bits.begin(), bits.end(), std::uint8_t{1});
    std::rotate(bits.begin(), first, bits.end());
    return bits;
}

// score(a) < score(b) without the 64-bit limit: the vector with a one at the
// highest differing index scores higher.
bool score_less(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) {
            return a[i] < b[i];
        }
    }
    return false;
}

// Orientation of `bits` whose mass sits at the low antenna indices: the
// lower-scoring member of the {shifted, reversed-and-shifted} pair.
std::vector<std::uint8_t> mass_left_orientation(const std::vector<std::uint8_t>& bits) {
    std::vector<std::uint8_t> shifted = shift_to_leading_one(bits);
    std::vector<std::uint8_t> reversed(bits.rbegin(), bits.rend());
    reversed = shift_to_leading_one(std::move(reversed));
    return score_less(reversed, shifted) ? reversed : shifted;
}

std::string key_of(const std::vector<std::uint8_t>& bits) {
    return std::string(bits.begin(), bits.end());
}

} // namespace

ArrayGeometry::ArrayGeometry(int n_antennas, double spacing)
    : n_antennas_(n_antennas), spacing_(spacing) {
    if (n_antennas < 2) {
        throw std::invalid_argument("ArrayGeometry: need at least 2 antennas");
    }
    if (!(spacing > 0.0)) {
        throw std::invalid_argument("ArrayGeometry: spacing must be positive");
    }
}

SelectionVector::SelectionVector(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)), popcount_(0) {
    if (bits_.empty()) {
        throw std::invalid_argument("SelectionVector: empty bit vector");
    }
    for (std::uint8_t b : bits_) {
        if (b > 1) {
            throw std::invalid_argument("SelectionVector: bits must be 0 or 1");
        }
        popcount_ += b;
    }
    if (popcount_ == 0) {
        throw std::invalid_argument("SelectionVector: at least one antenna must be selected");
    }
}

SelectionVector SelectionVector::from_string(const std::string& text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("SelectionVector: expected a string of 0/1 characters");
        }
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return SelectionVector(std::move(bits));
}

std::vector<int> SelectionVector::set_indices() const {
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(popcount_));
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) {
            idx.push_back(static_cast<int>(i));
        }
    }
    return idx;
}

std::string SelectionVector::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) {
            s[i] = '1';
        }
    }
    return s;
}

Subarray::Subarray(std::vector<double> positions) : positions_(std::move(positions)) {
    if (positions_.empty()) {
        throw std::invalid_argument("Subarray: empty position vector");
    }
    for (std::size_t i = 1; i < positions_.size(); ++i) {
        if (!(positions_[i] > positions_[i - 1])) {
            throw std::invalid_argument("Subarray: positions must be strictly increasing");
        }
    }
}

std::uint64_t binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) {
        throw std::invalid_argument("binomial: need 0 <= k <= n");
    }
    if (n > 64) {
        throw std::invalid_argument("binomial: n > 64 would overflow");
    }
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        // Exact at every step: the running product is C(n-k+i, i).
        result = static_cast<std::uint64_t>(
            static_cast<unsigned __int128>(result) *
            static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i));
    }
    return result;
}

Subarray positions_from_selection(const SelectionVector& sel, const ArrayGeometry& geometry) {
    if (static_cast<int>(sel.size()) != geometry.n_antennas()) {
        throw std::invalid_argument("positions_from_selection: selection length does not match geometry");
    }
    std::vector<double> positions;
    positions.reserve(static_cast<std::size_t>(sel.popcount()));
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (sel.bit(i)) {
            positions.push_back(static_cast<double>(i) * geometry.spacing());
        }
    }
    return Subarray(std::move(positions));
}

std::vector<SelectionVector> enumerate_subarrays(int n, int m) {
    if (m < 1) {
        throw std::invalid_argument("enumerate_subarrays: m must be at least 1");
    }
    if (m > n) {
        throw std::invalid_argument("enumerate_subarrays: m must not exceed n");
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
    std::fill(bits.end() - m, bits.end(), std::uint8_t{1});

    std::vector<SelectionVector> all;
    all.reserve(static_cast<std::size_t>(binomial(n, m)));
    do {
        all.emplace_back(bits);
    } while (std::next_permutation(bits.begin(), bits.end()));
    return all;
}

std::uint64_t score(const SelectionVector& sel) {
    if (sel.size() > 64) {
        throw std::invalid_argument("score: selection longer than 64 bits");
    }
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (sel.bit(i)) {
            s |= std::uint64_t{1} << i;
        }
    }
    return s;
}

SelectionVector align_layout(const SelectionVector& sel) {
    std::vector<std::uint8_t> shifted = shift_to_leading_one(sel.bits());
    std::vector<std::uint8_t> reversed(sel.bits().rbegin(), sel.bits().rend());
    reversed = shift_to_leading_one(std::move(reversed));
    // Ties keep the unreversed shift.
    return SelectionVector(score_less(shifted, reversed) ? std::move(reversed)
                                                         : std::move(shifted));
}

UniqueSet unique_subarray_set(int n, int m) {
    UniqueSet result;
    result.stats.total_count = binomial(n, m);
    result.vectors.reserve(256);

    std::unordered_set<std::string> seen;
    for (const SelectionVector& sel : enumerate_subarrays(n, m)) {
        SelectionVector aligned = align_layout(sel);
        std::string key = key_of(aligned.bits());
        if (seen.insert(std::move(key)).second) {
            result.vectors.push_back(std::move(aligned));
        }
    }

    result.stats.unique_count = result.vectors.size();
    result.stats.ratio = static_cast<double>(result.stats.unique_count) /
                         static_cast<double>(result.stats.total_count);
    const auto switches = switch_counts(result.vectors, n, m);
    result.stats.switches_full = switches.first;
    result.stats.switches_unique = switches.second;
    return result;
}

std::pair<std::uint64_t, std::uint64_t> switch_counts(
    const std::vector<SelectionVector>& unique_vectors, int n, int m) {
    const std::uint64_t full = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n);

    std::vector<std::uint8_t> connected(static_cast<std::size_t>(m) * static_cast<std::size_t>(n), 0);
    for (const SelectionVector& sel : unique_vectors) {
        const std::vector<std::uint8_t> oriented = mass_left_orientation(sel.bits());
        int rfc = 0;
        for (std::size_t i = 0; i < oriented.size(); ++i) {
            if (oriented[i]) {
                connected[static_cast<std::size_t>(rfc) * static_cast<std::size_t>(n) + i] = 1;
                ++rfc;
            }
        }
    }

    std::uint64_t unique = 0;
    for (std::uint8_t c : connected) {
        unique += c;
    }
    return {full, unique};
}

double position_variance(const Subarray& sub) {
    const auto& d = sub.positions();
    double mean = 0.0;
    for (double p : d) {
        mean += p;
    }
    mean /= static_cast<double>(d.size());
    double var = 0.0;
    for (double p : d) {
        const double dev = p - mean;
        var += dev * dev;
    }
    return var / static_cast<double>(d.size());
}

} // namespace doasel
