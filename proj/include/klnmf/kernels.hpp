#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "klnmf/matrix.hpp"

namespace klnmf {

/// Floor applied to reconstruction entries before any division. Far below
/// data scale; it exists only so accumulated underflow cannot turn into 0/0.
inline constexpr double kReconFloor = 1e-300;

/// Ratios against a floored reconstruction saturate here instead of
/// overflowing, so downstream arithmetic never sees an infinity.
inline constexpr double kRatioCeil = std::numeric_limits<double>::max();

/// C = A * B. Inner accumulation runs over ascending index so results are
/// reproducible bit-for-bit for any worker count.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, std::size_t threads = 1);

/// Entry-wise v / max(z, floor) where v > 0, exactly 0 where v = 0.
DenseMatrix masked_ratio(const DenseMatrix& v, const DenseMatrix& z);
SparseMatrix masked_ratio(const SparseMatrix& v, const DenseMatrix& z);

/// Entry-wise v / max(z, floor)^2 with the same zero convention.
DenseMatrix masked_ratio_squared(const DenseMatrix& v, const DenseMatrix& z);
SparseMatrix masked_ratio_squared(const SparseMatrix& v, const DenseMatrix& z);

/// (r, t) -> sum_n w(n,r) * q(n,t). Zeros of a sparse q contribute nothing,
/// so the dense and sparse overloads agree bit-for-bit on equal inputs.
DenseMatrix gram_t(const DenseMatrix& w, const DenseMatrix& q, std::size_t threads = 1);
DenseMatrix gram_t(const DenseMatrix& w, const SparseMatrix& q, std::size_t threads = 1);

/// (r, t) -> sum_n w(n,r)^2 * qbar(n,t).
DenseMatrix weighted_gram(const DenseMatrix& w, const DenseMatrix& qbar, std::size_t threads = 1);
DenseMatrix weighted_gram(const DenseMatrix& w, const SparseMatrix& qbar, std::size_t threads = 1);

std::vector<double> column_sums(const DenseMatrix& m);
std::vector<double> column_sums(const SparseMatrix& m);
std::vector<double> row_sums(const DenseMatrix& m);
std::vector<double> row_sums(const SparseMatrix& m);

/// Multiply each column/row by the given factor; factors must be > 0.
void scale_columns(DenseMatrix& m, std::span<const double> factors);
void scale_rows(DenseMatrix& m, std::span<const double> factors);

} // namespace klnmf
