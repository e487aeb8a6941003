#include "klnmf/generate.hpp"

#include "klnmf/kernels.hpp"
#include "klnmf/pcg32.hpp"

namespace klnmf {

GenResult generate(const GenConfig& cfg) {
    if (cfg.rows == 0 || cfg.cols == 0 || cfg.rank == 0)
        throw ValueError("generate: rows, cols and rank must be at least 1");
    if (!(cfg.density > 0.0) || cfg.density > 1.0)
        throw ValueError("generate: density must lie in (0, 1]");

    Pcg32 rng(cfg.seed);
    // consumption order is fixed: w, then h, then per-entry noise, then the
    // density mask, so one seed pins the whole artifact
    DenseMatrix w(cfg.rows, cfg.rank);
    for (std::size_t r = 0; r < cfg.rank; ++r) {
        double* col = w.col(r);
        for (std::size_t i = 0; i < cfg.rows; ++i) col[i] = rng.next_positive();
    }
    DenseMatrix h(cfg.rank, cfg.cols);
    for (std::size_t t = 0; t < cfg.cols; ++t) {
        double* col = h.col(t);
        for (std::size_t r = 0; r < cfg.rank; ++r) col[r] = rng.next_positive();
    }

    DenseMatrix v = matmul(w, h);
    if (cfg.noise == NoiseKind::poisson) {
        for (std::size_t t = 0; t < cfg.cols; ++t) {
            double* col = v.col(t);
            for (std::size_t i = 0; i < cfg.rows; ++i)
                col[i] = static_cast<double>(rng.next_poisson(col[i]));
        }
    }

    GenResult out;
    out.w = std::move(w);
    out.h = std::move(h);
    if (cfg.density < 1.0) {
        std::vector<std::tuple<std::size_t, std::size_t, double>> kept;
        for (std::size_t t = 0; t < cfg.cols; ++t)
            for (std::size_t i = 0; i < cfg.rows; ++i) {
                const bool keep = rng.next_double() < cfg.density;
                if (keep && v(i, t) > 0.0) kept.emplace_back(i, t, v(i, t));
            }
        out.v = SparseMatrix::from_triplets(cfg.rows, cfg.cols, std::move(kept));
    } else {
        out.v = std::move(v);
    }
    return out;
}

} // namespace klnmf
