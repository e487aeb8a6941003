#include <doctest.h>

#include <cmath>
#include <numeric>

#include "klnmf/kernels.hpp"
#include "klnmf/objective.hpp"
#include "oracles.hpp"

using klnmf::Axis;
using klnmf::DenseMatrix;
using klnmf::SparseMatrix;

TEST_CASE("kl_divergence basics") {
    const auto v = oracle::random_dense(6, 5, 7, 0.1, 3.0);
    CHECK(klnmf::kl_divergence(v, v) == doctest::Approx(0.0).epsilon(1e-14));

    // 2*ln 2 - 2 + 1
    CHECK(klnmf::kl_divergence(DenseMatrix::from_rows({{2}}), DenseMatrix::from_rows({{1}})) ==
          doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-15));

    // zero-entry convention: only the sum-z term remains
    CHECK(klnmf::kl_divergence(DenseMatrix::from_rows({{0}}), DenseMatrix::from_rows({{1}})) ==
          1.0);

    CHECK_THROWS_AS(klnmf::kl_divergence(DenseMatrix(2, 2), DenseMatrix(3, 2)),
                    klnmf::DimensionError);
}

TEST_CASE("kl_divergence matches the entry-by-entry oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto v = oracle::random_dense_with_zeros(8, 6, 300 + seed, 0.4);
        const auto z = oracle::random_dense(8, 6, 400 + seed, 0.05, 2.0);
        CHECK(klnmf::kl_divergence(v, z) ==
              doctest::Approx(oracle::kl(v, z)).epsilon(1e-12));
    }
}

TEST_CASE("kl_divergence is non-negative when column masses match") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto v = oracle::random_dense(7, 5, 500 + seed, 0.0, 2.0);
        auto z = oracle::random_dense(7, 5, 600 + seed, 0.1, 2.0);
        // rescale z columns so each has the column mass of v
        auto cv = klnmf::column_sums(v);
        auto cz = klnmf::column_sums(z);
        std::vector<double> s(cv.size());
        for (std::size_t t = 0; t < s.size(); ++t) s[t] = cv[t] / cz[t];
        klnmf::scale_columns(z, s);
        CHECK(klnmf::kl_divergence(v, z) >= -1e-12);
    }
}

TEST_CASE("kl_divergence on sparse input equals the densified value") {
    const auto vd = oracle::random_dense_with_zeros(10, 8, 70, 0.7);
    std::vector<std::tuple<std::size_t, std::size_t, double>> trips;
    for (std::size_t j = 0; j < vd.cols(); ++j)
        for (std::size_t i = 0; i < vd.rows(); ++i)
            if (vd(i, j) != 0.0) trips.emplace_back(i, j, vd(i, j));
    const auto vs = SparseMatrix::from_triplets(vd.rows(), vd.cols(), trips);
    const auto z = oracle::random_dense(10, 8, 71, 0.1, 2.0);
    CHECK(klnmf::kl_divergence(vs, z) == klnmf::kl_divergence(vd, z));
}

TEST_CASE("partial_divergence: exact reconstruction scores zero") {
    const auto v = oracle::random_dense(5, 4, 80, 0.1, 2.0);
    const auto q = klnmf::masked_ratio(v, v);
    for (const double s : klnmf::partial_divergence(v, q, v, Axis::columns))
        CHECK(s == doctest::Approx(0.0).epsilon(1e-13));
    for (const double s : klnmf::partial_divergence(v, q, v, Axis::rows))
        CHECK(s == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("partial_divergence hand example") {
    // One column, v = [1, 0], z = [0.5, 0.5]: 1*ln 2 + sum z - sum v = ln 2.
    const auto v = DenseMatrix::from_rows({{1}, {0}});
    const auto z = DenseMatrix::from_rows({{0.5}, {0.5}});
    const auto q = klnmf::masked_ratio(v, z);
    const auto s = klnmf::partial_divergence(v, q, z, Axis::columns);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("scores sum to the full divergence along either axis") {
    const auto v = oracle::random_dense_with_zeros(9, 7, 90, 0.3);
    const auto z = oracle::random_dense(9, 7, 91, 0.1, 2.0);
    const auto q = klnmf::masked_ratio(v, z);
    const double want = klnmf::kl_divergence(v, z);
    for (const auto axis : {Axis::columns, Axis::rows}) {
        const auto s = klnmf::partial_divergence(v, q, z, axis);
        const double got = std::accumulate(s.begin(), s.end(), 0.0);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("per-column ordering agrees with the per-column full objective") {
    // Two candidates; whichever is closer on a column must score lower there.
    const auto v = oracle::random_dense_with_zeros(8, 6, 95, 0.25);
    const auto z1 = oracle::random_dense(8, 6, 96, 0.2, 2.0);
    const auto z2 = oracle::random_dense(8, 6, 97, 0.2, 2.0);
    const auto s1 = klnmf::partial_divergence(v, klnmf::masked_ratio(v, z1), z1, Axis::columns);
    const auto s2 = klnmf::partial_divergence(v, klnmf::masked_ratio(v, z2), z2, Axis::columns);
    for (std::size_t t = 0; t < v.cols(); ++t) {
        DenseMatrix vc(v.rows(), 1), c1(v.rows(), 1), c2(v.rows(), 1);
        for (std::size_t i = 0; i < v.rows(); ++i) {
            vc(i, 0) = v(i, t);
            c1(i, 0) = z1(i, t);
            c2(i, 0) = z2(i, t);
        }
        const double full1 = klnmf::kl_divergence(vc, c1);
        const double full2 = klnmf::kl_divergence(vc, c2);
        CHECK(s1[t] == doctest::Approx(full1).epsilon(1e-10));
        CHECK(s2[t] == doctest::Approx(full2).epsilon(1e-10));
        if (full1 < full2) CHECK(s1[t] < s2[t]);
        if (full2 < full1) CHECK(s2[t] < s1[t]);
    }
}

TEST_CASE("divergence is invariant under the column/row rescaling") {
    const auto v = oracle::random_dense(10, 8, 98, 0.1, 2.0);
    auto w = oracle::random_dense(10, 3, 99, 0.1, 1.0);
    auto h = oracle::random_dense(3, 8, 100, 0.1, 1.0);
    const double before = klnmf::kl_divergence(v, klnmf::matmul(w, h));

    auto s = klnmf::column_sums(w);
    std::vector<double> inv(s.size());
    for (std::size_t r = 0; r < s.size(); ++r) inv[r] = 1.0 / s[r];
    klnmf::scale_columns(w, inv);
    klnmf::scale_rows(h, s);
    const double after = klnmf::kl_divergence(v, klnmf::matmul(w, h));
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
}
