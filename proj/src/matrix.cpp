#include "klnmf/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace klnmf {

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t nr = rows.size();
    const std::size_t nc = nr == 0 ? 0 : rows.begin()->size();
    DenseMatrix m(nr, nc);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != nc) throw DimensionError("from_rows: ragged row lengths");
        std::size_t j = 0;
        for (const double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

double DenseMatrix::sum() const {
    double s = 0.0;
    for (const double x : v_) s += x;
    return s;
}

double DenseMatrix::max_abs() const {
    double s = 0.0;
    for (const double x : v_) s = std::max(s, std::abs(x));
    return s;
}

bool DenseMatrix::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

void DenseMatrix::check_non_negative(const char* what) const {
    for (const double x : v_) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw ValueError(std::string(what) + ": entries must be finite and non-negative");
    }
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> col_ptr,
                           std::vector<std::size_t> row_idx, std::vector<double> values)
    : rows_(rows), cols_(cols), col_ptr_(std::move(col_ptr)), row_idx_(std::move(row_idx)),
      values_(std::move(values)) {
    if (col_ptr_.size() != cols_ + 1 || col_ptr_.front() != 0)
        throw ValueError("sparse: column pointer array must have cols+1 entries starting at 0");
    if (row_idx_.size() != values_.size())
        throw ValueError("sparse: row index and value arrays differ in length");
    if (col_ptr_.back() != values_.size())
        throw ValueError("sparse: last column pointer must equal the number of stored entries");
    for (std::size_t c = 0; c < cols_; ++c) {
        if (col_ptr_[c + 1] < col_ptr_[c])
            throw ValueError("sparse: column pointers must be non-decreasing");
        for (std::size_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) {
            if (row_idx_[k] >= rows_) throw ValueError("sparse: row index out of range");
            if (k > col_ptr_[c] && row_idx_[k] <= row_idx_[k - 1])
                throw ValueError("sparse: row indices must strictly increase within a column");
        }
    }
    for (const double x : values_) {
        if (!(x > 0.0) || !std::isfinite(x))
            throw ValueError("sparse: stored values must be finite and strictly positive");
    }
}

SparseMatrix SparseMatrix::from_triplets(
    std::size_t rows, std::size_t cols,
    std::vector<std::tuple<std::size_t, std::size_t, double>> triplets) {
    for (const auto& [r, c, x] : triplets) {
        if (r >= rows || c >= cols) throw ValueError("sparse: triplet index out of range");
        (void)x;
    }
    std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
        return std::get<1>(a) != std::get<1>(b) ? std::get<1>(a) < std::get<1>(b)
                                                : std::get<0>(a) < std::get<0>(b);
    });

    std::vector<std::size_t> col_ptr(cols + 1, 0);
    std::vector<std::size_t> row_idx;
    std::vector<double> values;
    row_idx.reserve(triplets.size());
    values.reserve(triplets.size());

    std::size_t k = 0;
    for (std::size_t c = 0; c < cols; ++c) {
        while (k < triplets.size() && std::get<1>(triplets[k]) == c) {
            const std::size_t r = std::get<0>(triplets[k]);
            double x = std::get<2>(triplets[k]);
            ++k;
            while (k < triplets.size() && std::get<1>(triplets[k]) == c &&
                   std::get<0>(triplets[k]) == r) {
                x += std::get<2>(triplets[k]);
                ++k;
            }
            if (!(x >= 0.0) || !std::isfinite(x))
                throw ValueError("sparse: entries must be finite and non-negative");
            if (x > 0.0) {
                row_idx.push_back(r);
                values.push_back(x);
            }
        }
        col_ptr[c + 1] = values.size();
    }
    return SparseMatrix(rows, cols, std::move(col_ptr), std::move(row_idx), std::move(values));
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (std::size_t c = 0; c < cols_; ++c)
        for (std::size_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) d(row_idx_[k], c) = values_[k];
    return d;
}

SparseMatrix SparseMatrix::transposed() const {
    // counting sort by row; within a target column the source column index
    // (the new row index) is visited in increasing order
    std::vector<std::size_t> col_ptr(rows_ + 1, 0);
    for (const std::size_t r : row_idx_) ++col_ptr[r + 1];
    for (std::size_t r = 0; r < rows_; ++r) col_ptr[r + 1] += col_ptr[r];

    std::vector<std::size_t> cursor(col_ptr.begin(), col_ptr.end() - 1);
    std::vector<std::size_t> row_idx(values_.size());
    std::vector<double> values(values_.size());
    for (std::size_t c = 0; c < cols_; ++c)
        for (std::size_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) {
            const std::size_t pos = cursor[row_idx_[k]]++;
            row_idx[pos] = c;
            values[pos] = values_[k];
        }
    return SparseMatrix(cols_, rows_, std::move(col_ptr), std::move(row_idx), std::move(values));
}

DenseMatrix transpose(const DenseMatrix& m) {
    DenseMatrix t(m.cols(), m.rows());
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) t(j, i) = m(i, j);
    return t;
}

std::size_t matrix_rows(const AnyMatrix& m) {
    return std::visit([](const auto& x) { return x.rows(); }, m);
}

std::size_t matrix_cols(const AnyMatrix& m) {
    return std::visit([](const auto& x) { return x.cols(); }, m);
}

} // namespace klnmf
