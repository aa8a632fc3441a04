#include "doasel/rng.hpp"

#include <cmath>
#include <numbers>

namespace doasel {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

RandomStream RandomStream::derive(std::uint64_t master,
                                  std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t w : path) {
        h = splitmix64(h ^ w);
    }
    return RandomStream(h);
}

double RandomStream::gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    double u1 = uniform();
    if (u1 < 0x1.0p-53) {
        u1 = 0x1.0p-53;
    }
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

std::complex<double> RandomStream::complex_gaussian(double variance) {
    const double s = std::sqrt(variance * 0.5);
    const double re = gaussian();
    const double im = gaussian();
    return {s * re, s * im};
}

} // namespace doasel
