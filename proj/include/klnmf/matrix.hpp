#pragma once

#include <cstddef>
#include <initializer_list>
#include <tuple>
#include <variant>
#include <vector>

#include "klnmf/errors.hpp"

namespace klnmf {

/// Dense non-negative matrix, column-major. Column-major keeps each column
/// subproblem contiguous, which is the access pattern of every solver kernel.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    /// Build from row-major nested lists; test and fixture convenience.
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return v_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return v_[c * rows_ + r]; }
    double operator()(std::size_t r, std::size_t c) const { return v_[c * rows_ + r]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* col(std::size_t c) { return v_.data() + c * rows_; }
    const double* col(std::size_t c) const { return v_.data() + c * rows_; }

    bool same_shape(const DenseMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool operator==(const DenseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
    }

    double sum() const;
    double max_abs() const;
    bool all_finite() const;

    /// Throws ValueError if any entry is negative or non-finite.
    void check_non_negative(const char* what) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

/// Sparse non-negative matrix in compressed-sparse-column form. Only strictly
/// positive entries are stored; a structural zero and an explicit zero are the
/// same thing.
class SparseMatrix {
public:
    SparseMatrix() : col_ptr_(1, 0) {}

    /// Validates all storage invariants: column pointers non-decreasing and
    /// ending at nnz, row indices strictly increasing within each column and
    /// in range, values finite and > 0.
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> col_ptr,
                 std::vector<std::size_t> row_idx, std::vector<double> values);

    /// Build from (row, col, value) triplets in any order. Duplicates are
    /// summed; entries that end up non-positive are rejected, exact zeros are
    /// dropped.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<std::tuple<std::size_t, std::size_t, double>> triplets);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::size_t col_begin(std::size_t c) const { return col_ptr_[c]; }
    std::size_t col_end(std::size_t c) const { return col_ptr_[c + 1]; }
    std::size_t row_index(std::size_t k) const { return row_idx_[k]; }
    double value(std::size_t k) const { return values_[k]; }

    const std::vector<std::size_t>& col_ptr() const { return col_ptr_; }
    const std::vector<std::size_t>& row_indices() const { return row_idx_; }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const SparseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && col_ptr_ == o.col_ptr_ &&
               row_idx_ == o.row_idx_ && values_ == o.values_;
    }

    DenseMatrix to_dense() const;
    SparseMatrix transposed() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> col_ptr_;
    std::vector<std::size_t> row_idx_;
    std::vector<double> values_;
};

using AnyMatrix = std::variant<DenseMatrix, SparseMatrix>;

DenseMatrix transpose(const DenseMatrix& m);

std::size_t matrix_rows(const AnyMatrix& m);
std::size_t matrix_cols(const AnyMatrix& m);

} // namespace klnmf
