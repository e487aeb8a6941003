#pragma once

#include <cstddef>
#include <vector>

#include "klnmf/matrix.hpp"

namespace klnmf {

/// Generalized KL divergence split into its data and regularizer parts.
struct ObjectiveValue {
    double kl = 0.0;    // sum v*log(v/z) - sum v + sum z, zeros of v skipped
    double reg_w = 0.0; // rho * sum W
    double reg_h = 0.0; // lambda * sum H
    double total = 0.0; // kl + reg_w + reg_h
};

enum class Axis { columns, rows };

/// Per-column (or per-row) divergence of two candidate reconstructions; used
/// to pick the winner of each independent subproblem.
using SelectionScores = std::vector<double>;

/// d(v, z) = sum v*log(v/z) - sum v + sum z. Entries with v = 0 contribute
/// only through the sum-z term; z is floored like every other division.
double kl_divergence(const DenseMatrix& v, const DenseMatrix& z);
double kl_divergence(const SparseMatrix& v, const DenseMatrix& z);

/// Score per column (Axis::columns) or per row (Axis::rows):
///   sum v*log(q) + sum z - sum v
/// restricted to that slice, with q the masked ratio of v against z. Summing
/// the scores over the axis recovers kl_divergence(v, z). The linear term
/// makes the comparison exact even when candidate slices have different mass.
SelectionScores partial_divergence(const DenseMatrix& v, const DenseMatrix& q,
                                   const DenseMatrix& z, Axis axis);
SelectionScores partial_divergence(const SparseMatrix& v, const SparseMatrix& q,
                                   const DenseMatrix& z, Axis axis);

} // namespace klnmf
