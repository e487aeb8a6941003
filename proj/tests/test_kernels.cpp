#include <doctest.h>

#include <cmath>

#include "klnmf/kernels.hpp"
#include "oracles.hpp"

using klnmf::DenseMatrix;
using klnmf::SparseMatrix;

namespace {

SparseMatrix sparsify(const DenseMatrix& d) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> trips;
    for (std::size_t j = 0; j < d.cols(); ++j)
        for (std::size_t i = 0; i < d.rows(); ++i)
            if (d(i, j) != 0.0) trips.emplace_back(i, j, d(i, j));
    return SparseMatrix::from_triplets(d.rows(), d.cols(), trips);
}

} // namespace

TEST_CASE("matmul: identity factor and rank-1 broadcast") {
    const auto w = DenseMatrix::from_rows({{1, 0}, {0, 1}});
    const auto h = DenseMatrix::from_rows({{3, 4}, {5, 6}});
    CHECK(klnmf::matmul(w, h) == h);

    const auto ones = DenseMatrix::from_rows({{1}, {1}});
    const auto row = DenseMatrix::from_rows({{2, 3}});
    CHECK(klnmf::matmul(ones, row) == DenseMatrix::from_rows({{2, 3}, {2, 3}}));
}

TEST_CASE("matmul matches the triple-loop oracle") {
    const auto a = oracle::random_dense(7, 3, 11);
    const auto b = oracle::random_dense(3, 5, 12);
    CHECK(oracle::max_rel_err(klnmf::matmul(a, b), oracle::matmul(a, b)) <= 1e-12);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = oracle::random_dense(10, 4, 100 + seed);
        const auto y = oracle::random_dense(4, 8, 200 + seed);
        CHECK(oracle::max_rel_err(klnmf::matmul(x, y), oracle::matmul(x, y)) <= 1e-12);
    }
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
    CHECK_THROWS_AS(klnmf::matmul(DenseMatrix(2, 3), DenseMatrix(2, 2)), klnmf::DimensionError);
}

TEST_CASE("matmul is identical for any worker count") {
    const auto a = oracle::random_dense(17, 6, 31);
    const auto b = oracle::random_dense(6, 23, 32);
    const auto c1 = klnmf::matmul(a, b, 1);
    const auto c4 = klnmf::matmul(a, b, 4);
    CHECK(c1 == c4);
}

TEST_CASE("masked_ratio: scalar ratio and zero convention") {
    CHECK(klnmf::masked_ratio(DenseMatrix::from_rows({{4}}), DenseMatrix::from_rows({{2}}))(0, 0) ==
          2.0);
    CHECK(klnmf::masked_ratio(DenseMatrix::from_rows({{0}}), DenseMatrix::from_rows({{5}}))(0, 0) ==
          0.0);
    CHECK_THROWS_AS(klnmf::masked_ratio(DenseMatrix(2, 2), DenseMatrix(2, 3)),
                    klnmf::DimensionError);
}

TEST_CASE("masked_ratio on sparse input keeps the pattern") {
    const auto v = SparseMatrix::from_triplets(3, 2, {{0, 0, 1.0}, {2, 1, 3.0}});
    const DenseMatrix z(3, 2, 2.0);
    const auto q = klnmf::masked_ratio(v, z);
    CHECK(q.nnz() == 2);
    CHECK(q.row_index(0) == 0);
    CHECK(q.value(0) == 0.5);
    CHECK(q.row_index(1) == 2);
    CHECK(q.value(1) == 1.5);
    CHECK(q.col_ptr() == v.col_ptr());
}

TEST_CASE("masked_ratio never produces NaN or Inf on data-scale inputs") {
    klnmf::Pcg32 rng(77);
    DenseMatrix v(9, 7), z(9, 7);
    for (int rep = 0; rep < 50; ++rep) {
        for (std::size_t j = 0; j < v.cols(); ++j)
            for (std::size_t i = 0; i < v.rows(); ++i) {
                const double u = rng.next_double();
                v(i, j) = u < 0.3 ? 0.0 : rng.next_double() * 1e6;
                z(i, j) = u < 0.5 ? 0.0 : rng.next_double() * 1e6; // zeros of z included
            }
        const auto q = klnmf::masked_ratio(v, z);
        const auto q2 = klnmf::masked_ratio_squared(v, z);
        CHECK(q.all_finite());
        CHECK(q2.all_finite());
        for (std::size_t j = 0; j < v.cols(); ++j)
            for (std::size_t i = 0; i < v.rows(); ++i)
                if (v(i, j) == 0.0) {
                    CHECK(q(i, j) == 0.0);
                    CHECK(q2(i, j) == 0.0);
                }
    }
}

TEST_CASE("masked_ratio sparse agrees with the densified path bit-for-bit") {
    const auto vd = oracle::random_dense_with_zeros(12, 9, 5, 0.6);
    const auto vs = sparsify(vd);
    const auto z = oracle::random_dense(12, 9, 6, 0.1, 2.0);
    const auto qd = klnmf::masked_ratio(vd, z);
    const auto qs = klnmf::masked_ratio(vs, z);
    CHECK(qs.to_dense() == qd);
    const auto q2d = klnmf::masked_ratio_squared(vd, z);
    const auto q2s = klnmf::masked_ratio_squared(vs, z);
    CHECK(q2s.to_dense() == q2d);
}

TEST_CASE("weighted_gram: scalar square and hand-computed sum") {
    CHECK(klnmf::weighted_gram(DenseMatrix::from_rows({{2}}), DenseMatrix::from_rows({{1}}))(0, 0) ==
          4.0);
    const auto w = DenseMatrix::from_rows({{1}, {1}});
    const auto qbar = DenseMatrix::from_rows({{0.25}, {0}});
    CHECK(klnmf::weighted_gram(w, qbar)(0, 0) == 0.25);
}

TEST_CASE("weighted_gram and gram_t match the double-loop oracle") {
    const auto w = oracle::random_dense(6, 2, 21);
    const auto q = oracle::random_dense(6, 4, 22);
    CHECK(oracle::max_rel_err(klnmf::weighted_gram(w, q), oracle::powered_gram(w, q, 2)) <= 1e-12);
    CHECK(oracle::max_rel_err(klnmf::gram_t(w, q), oracle::powered_gram(w, q, 1)) <= 1e-12);
}

TEST_CASE("gram kernels: sparse q gives the same bits as dense q") {
    const auto w = oracle::random_dense(15, 4, 41);
    const auto qd = oracle::random_dense_with_zeros(15, 8, 42, 0.7);
    const auto qs = sparsify(qd);
    CHECK(klnmf::gram_t(w, qs) == klnmf::gram_t(w, qd));
    CHECK(klnmf::weighted_gram(w, qs) == klnmf::weighted_gram(w, qd));
    CHECK(klnmf::gram_t(w, qs, 3) == klnmf::gram_t(w, qd, 1));
}

TEST_CASE("column and row sums") {
    const auto m = DenseMatrix::from_rows({{1, 2}, {3, 4}});
    CHECK(klnmf::column_sums(m) == std::vector<double>{4, 6});
    CHECK(klnmf::row_sums(m) == std::vector<double>{3, 7});

    const auto vd = oracle::random_dense_with_zeros(10, 6, 51, 0.5);
    const auto vs = sparsify(vd);
    CHECK(klnmf::row_sums(vs) == klnmf::row_sums(vd));
    CHECK(klnmf::column_sums(vs) == klnmf::column_sums(vd));
}

TEST_CASE("scaling by reciprocal sums normalizes") {
    auto m = oracle::random_dense(5, 4, 61, 0.1, 2.0);
    auto cs = klnmf::column_sums(m);
    for (auto& s : cs) s = 1.0 / s;
    klnmf::scale_columns(m, cs);
    for (const double s : klnmf::column_sums(m)) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

    auto r = klnmf::row_sums(m);
    for (auto& s : r) s = 1.0 / s;
    klnmf::scale_rows(m, r);
    for (const double s : klnmf::row_sums(m)) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scaling rejects non-positive factors") {
    auto m = DenseMatrix(2, 2, 1.0);
    const std::vector<double> bad{1.0, 0.0};
    CHECK_THROWS_AS(klnmf::scale_columns(m, bad), klnmf::ValueError);
    const std::vector<double> neg{1.0, -2.0};
    CHECK_THROWS_AS(klnmf::scale_rows(m, neg), klnmf::ValueError);
    const std::vector<double> short_vec{1.0};
    CHECK_THROWS_AS(klnmf::scale_columns(m, short_vec), klnmf::DimensionError);
}
