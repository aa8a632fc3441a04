#ifndef DOASEL_RNG_HPP
#define DOASEL_RNG_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace doasel {

/// Deterministic random stream for Monte Carlo work.
///
/// Wraps std::mt19937_64 (whose raw output is pinned by the standard) and
/// derives uniforms and gaussians from the raw 64-bit draws directly, so a
/// seed produces the same sequence on every platform and standard library.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Child stream for (master seed, path...). Streams derived with distinct
    /// paths are statistically independent, which lets concurrent trials draw
    /// without any ordering between them.
    static RandomStream derive(std::uint64_t master,
                               std::initializer_list<std::uint64_t> path);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Standard normal via Box-Muller; generates pairs, caches the second.
    double gaussian();

    /// Circular complex gaussian with total variance `variance`
    /// (variance/2 in each of the real and imaginary parts).
    std::complex<double> complex_gaussian(double variance);

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace doasel

#endif // DOASEL_RNG_HPP
