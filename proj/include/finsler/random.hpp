#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "finsler/linalg.hpp"

namespace finsler {

// Portable seeded stream: the standard distributions are implementation-defined,
// so uniforms are built directly from the 64-bit engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int index(int count) { return static_cast<int>(uniform() * count) % count; }
    double normal()
    {
        const double u1 = 1.0 - uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    Vec vector(int n, double lo, double hi)
    {
        Vec out(n);
        for (int i = 0; i < n; ++i) out(i) = uniform(lo, hi);
        return out;
    }
    Vec gaussian(int n)
    {
        Vec out(n);
        for (int i = 0; i < n; ++i) out(i) = normal();
        return out;
    }
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace finsler
