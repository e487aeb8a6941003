#include <doctest.h>

#include <cmath>

#include "klnmf/generate.hpp"
#include "klnmf/kernels.hpp"

using klnmf::DenseMatrix;
using klnmf::GenConfig;
using klnmf::SparseMatrix;

TEST_CASE("noise-free generation is exactly the factor product") {
    GenConfig cfg;
    cfg.rows = 20;
    cfg.cols = 15;
    cfg.rank = 3;
    cfg.seed = 5;
    const auto res = klnmf::generate(cfg);
    REQUIRE(std::holds_alternative<DenseMatrix>(res.v));
    const auto& v = std::get<DenseMatrix>(res.v);
    CHECK(v == klnmf::matmul(res.w, res.h));
    v.check_non_negative("v");
    for (std::size_t j = 0; j < res.w.cols(); ++j)
        for (std::size_t i = 0; i < res.w.rows(); ++i) CHECK(res.w(i, j) > 0.0);
}

TEST_CASE("generation is deterministic in the seed") {
    GenConfig cfg;
    cfg.rows = 12;
    cfg.cols = 10;
    cfg.rank = 2;
    cfg.seed = 77;
    cfg.noise = klnmf::NoiseKind::poisson;
    const auto a = klnmf::generate(cfg);
    const auto b = klnmf::generate(cfg);
    CHECK(std::get<DenseMatrix>(a.v) == std::get<DenseMatrix>(b.v));
    CHECK(a.w == b.w);

    cfg.seed = 78;
    const auto c = klnmf::generate(cfg);
    CHECK(!(std::get<DenseMatrix>(a.v) == std::get<DenseMatrix>(c.v)));
}

TEST_CASE("poisson noise yields integer counts") {
    GenConfig cfg;
    cfg.rows = 15;
    cfg.cols = 11;
    cfg.rank = 4;
    cfg.seed = 3;
    cfg.noise = klnmf::NoiseKind::poisson;
    const auto res = klnmf::generate(cfg);
    const auto& v = std::get<DenseMatrix>(res.v);
    for (std::size_t j = 0; j < v.cols(); ++j)
        for (std::size_t i = 0; i < v.rows(); ++i)
            CHECK(v(i, j) == std::floor(v(i, j)));
}

TEST_CASE("density mask hits the binomial expectation") {
    GenConfig cfg;
    cfg.rows = 1000;
    cfg.cols = 800;
    cfg.rank = 3;
    cfg.seed = 9;
    cfg.density = 0.01;
    const auto res = klnmf::generate(cfg);
    REQUIRE(std::holds_alternative<SparseMatrix>(res.v));
    const double nnz = static_cast<double>(std::get<SparseMatrix>(res.v).nnz());
    // expectation 8000, sd ~ 89; allow five sigma
    CHECK(nnz > 8000 - 450);
    CHECK(nnz < 8000 + 450);
}

TEST_CASE("invalid generator configs are rejected") {
    GenConfig cfg;
    cfg.rows = 0;
    cfg.cols = 5;
    cfg.rank = 2;
    CHECK_THROWS_AS(klnmf::generate(cfg), klnmf::ValueError);
    cfg.rows = 5;
    cfg.density = 0.0;
    CHECK_THROWS_AS(klnmf::generate(cfg), klnmf::ValueError);
    cfg.density = 1.5;
    CHECK_THROWS_AS(klnmf::generate(cfg), klnmf::ValueError);
}
