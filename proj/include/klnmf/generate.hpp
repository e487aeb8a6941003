#pragma once

#include <cstddef>
#include <cstdint>

#include "klnmf/matrix.hpp"

namespace klnmf {

enum class NoiseKind { none, poisson };

struct GenConfig {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t rank = 1;
    double density = 1.0; // < 1: entries kept with this probability, output sparse
    std::uint64_t seed = 0;
    NoiseKind noise = NoiseKind::none;
};

struct GenResult {
    AnyMatrix v;
    DenseMatrix w; // ground-truth factors of the noise-free product
    DenseMatrix h;
};

/// Synthesize v = w*h from strictly positive uniform factors, optionally
/// Poisson-sample every entry, then apply the density mask. Everything is
/// driven by one seeded generator, so equal configs give equal results.
GenResult generate(const GenConfig& cfg);

} // namespace klnmf
