#include <doctest.h>

#include <limits>

#include "klnmf/matrix.hpp"

using klnmf::DenseMatrix;
using klnmf::SparseMatrix;

TEST_CASE("dense from_rows lays out column-major") {
    const auto m = DenseMatrix::from_rows({{1, 2}, {3, 4}});
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m(0, 0) == 1);
    CHECK(m(0, 1) == 2);
    CHECK(m(1, 0) == 3);
    CHECK(m(1, 1) == 4);
    CHECK(m.data()[0] == 1);
    CHECK(m.data()[1] == 3); // second element of the first column
}

TEST_CASE("dense non-negativity check") {
    auto m = DenseMatrix::from_rows({{1, 0}, {2, 3}});
    CHECK_NOTHROW(m.check_non_negative("m"));
    m(1, 0) = -1e-9;
    CHECK_THROWS_AS(m.check_non_negative("m"), klnmf::ValueError);
    m(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(m.check_non_negative("m"), klnmf::ValueError);
}

TEST_CASE("sparse construction validates invariants") {
    // 3x2 with entries (0,0)=1, (2,0)=2, (1,1)=3
    CHECK_NOTHROW(SparseMatrix(3, 2, {0, 2, 3}, {0, 2, 1}, {1.0, 2.0, 3.0}));

    // final column pointer must equal nnz
    CHECK_THROWS_AS(SparseMatrix(3, 2, {0, 2, 2}, {0, 2, 1}, {1.0, 2.0, 3.0}),
                    klnmf::ValueError);
    // decreasing column pointer
    CHECK_THROWS_AS(SparseMatrix(3, 2, {0, 2, 1}, {0, 2, 1}, {1.0, 2.0, 3.0}),
                    klnmf::ValueError);
    // row indices must strictly increase within a column
    CHECK_THROWS_AS(SparseMatrix(3, 2, {0, 2, 3}, {2, 0, 1}, {1.0, 2.0, 3.0}),
                    klnmf::ValueError);
    // row index out of range
    CHECK_THROWS_AS(SparseMatrix(3, 2, {0, 2, 3}, {0, 3, 1}, {1.0, 2.0, 3.0}),
                    klnmf::ValueError);
    // stored values must be strictly positive
    CHECK_THROWS_AS(SparseMatrix(3, 2, {0, 2, 3}, {0, 2, 1}, {1.0, 0.0, 3.0}),
                    klnmf::ValueError);
    CHECK_THROWS_AS(SparseMatrix(3, 2, {0, 2, 3}, {0, 2, 1}, {1.0, -2.0, 3.0}),
                    klnmf::ValueError);
}

TEST_CASE("sparse from_triplets sums duplicates and drops zeros") {
    auto s = SparseMatrix::from_triplets(3, 3,
                                         {{2, 1, 1.5}, {0, 0, 1.0}, {2, 1, 0.5}, {1, 2, 0.0}});
    CHECK(s.nnz() == 2);
    CHECK(s.row_index(0) == 0);
    CHECK(s.value(0) == 1.0);
    CHECK(s.row_index(1) == 2);
    CHECK(s.value(1) == 2.0);

    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 0, -1.0}}), klnmf::ValueError);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{5, 0, 1.0}}), klnmf::ValueError);
}

TEST_CASE("sparse densify and transpose round trip") {
    auto s = SparseMatrix::from_triplets(3, 2, {{0, 0, 1.0}, {2, 0, 2.0}, {1, 1, 3.0}});
    const auto d = s.to_dense();
    CHECK(d(0, 0) == 1.0);
    CHECK(d(2, 0) == 2.0);
    CHECK(d(1, 1) == 3.0);
    CHECK(d(0, 1) == 0.0);

    const auto tt = s.transposed().transposed();
    CHECK(tt == s);
    const auto dt = s.transposed().to_dense();
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(dt(j, i) == d(i, j));
}

TEST_CASE("empty sparse matrix is valid") {
    SparseMatrix s(4, 3, {0, 0, 0, 0}, {}, {});
    CHECK(s.nnz() == 0);
    CHECK(s.to_dense().sum() == 0.0);
}

TEST_CASE("dense transpose") {
    const auto m = DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    const auto t = klnmf::transpose(m);
    CHECK(t.rows() == 3);
    CHECK(t.cols() == 2);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) CHECK(t(j, i) == m(i, j));
}
