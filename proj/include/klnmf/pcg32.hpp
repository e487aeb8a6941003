#pragma once

#include <cmath>
#include <cstdint>

namespace klnmf {

/// Minimal PCG32 generator (O'Neill's pcg32_random_r). A single fixed stream
/// is used so that a seed alone pins the entire sequence on every platform.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed) : state_(0u), inc_((kStream << 1u) | 1u) {
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    /// Uniform double in [0, 1).
    double next_double() { return std::ldexp(static_cast<double>(next_u32()), -32); }

    /// Uniform double in (0, 1]; never returns zero.
    double next_positive() {
        return std::ldexp(static_cast<double>(next_u32()) + 1.0, -32);
    }

    /// Exact Poisson sample via Knuth's method; large means are split into
    /// chunks so exp() never underflows. Deterministic given the stream state.
    std::uint64_t next_poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 0.0) {
            const double chunk = mean > 30.0 ? 30.0 : mean;
            mean -= chunk;
            const double limit = std::exp(-chunk);
            double p = 1.0;
            std::uint64_t k = 0;
            do {
                ++k;
                p *= next_double();
            } while (p > limit);
            total += k - 1;
        }
        return total;
    }

private:
    static constexpr std::uint64_t kStream = 0xda3e39cb94b95bdbULL;

    std::uint64_t state_;
    std::uint64_t inc_;
};

} // namespace klnmf
