#include "klnmf/objective.hpp"

#include <cmath>

#include "klnmf/kernels.hpp"

namespace klnmf {

namespace {

inline double floored(double z) { return z > kReconFloor ? z : kReconFloor; }

void require_same_shape(std::size_t ar, std::size_t ac, std::size_t br, std::size_t bc,
                        const char* what) {
    if (ar != br || ac != bc) throw DimensionError(std::string(what) + ": shape mismatch");
}

} // namespace

double kl_divergence(const DenseMatrix& v, const DenseMatrix& z) {
    require_same_shape(v.rows(), v.cols(), z.rows(), z.cols(), "kl_divergence");
    double d = 0.0;
    for (std::size_t j = 0; j < v.cols(); ++j) {
        const double* vj = v.col(j);
        const double* zj = z.col(j);
        for (std::size_t i = 0; i < v.rows(); ++i) {
            const double zf = floored(zj[i]);
            if (vj[i] > 0.0) d += vj[i] * std::log(vj[i] / zf) - vj[i] + zf;
            else d += zf;
        }
    }
    return d;
}

double kl_divergence(const SparseMatrix& v, const DenseMatrix& z) {
    require_same_shape(v.rows(), v.cols(), z.rows(), z.cols(), "kl_divergence");
    // walk every entry in the same order as the dense overload so the two
    // produce identical bits on equal inputs
    double d = 0.0;
    for (std::size_t j = 0; j < v.cols(); ++j) {
        const double* zj = z.col(j);
        std::size_t k = v.col_begin(j);
        const std::size_t kend = v.col_end(j);
        for (std::size_t i = 0; i < v.rows(); ++i) {
            const double zf = floored(zj[i]);
            if (k < kend && v.row_index(k) == i) {
                const double vv = v.value(k++);
                d += vv * std::log(vv / zf) - vv + zf;
            } else {
                d += zf;
            }
        }
    }
    return d;
}

SelectionScores partial_divergence(const DenseMatrix& v, const DenseMatrix& q,
                                   const DenseMatrix& z, Axis axis) {
    require_same_shape(v.rows(), v.cols(), q.rows(), q.cols(), "partial_divergence");
    require_same_shape(v.rows(), v.cols(), z.rows(), z.cols(), "partial_divergence");
    const std::size_t n = axis == Axis::columns ? v.cols() : v.rows();
    SelectionScores scores(n, 0.0);
    for (std::size_t j = 0; j < v.cols(); ++j) {
        const double* vj = v.col(j);
        const double* qj = q.col(j);
        const double* zj = z.col(j);
        for (std::size_t i = 0; i < v.rows(); ++i) {
            double s = zj[i] - vj[i];
            if (vj[i] > 0.0) s += vj[i] * std::log(qj[i]);
            scores[axis == Axis::columns ? j : i] += s;
        }
    }
    return scores;
}

SelectionScores partial_divergence(const SparseMatrix& v, const SparseMatrix& q,
                                   const DenseMatrix& z, Axis axis) {
    require_same_shape(v.rows(), v.cols(), z.rows(), z.cols(), "partial_divergence");
    if (v.nnz() != q.nnz()) throw DimensionError("partial_divergence: q must share v's pattern");
    const std::size_t n = axis == Axis::columns ? v.cols() : v.rows();
    SelectionScores scores(n, 0.0);
    for (std::size_t j = 0; j < v.cols(); ++j) {
        const double* zj = z.col(j);
        std::size_t k = v.col_begin(j);
        const std::size_t kend = v.col_end(j);
        for (std::size_t i = 0; i < v.rows(); ++i) {
            double s = zj[i];
            if (k < kend && v.row_index(k) == i) {
                s += v.value(k) * std::log(q.value(k)) - v.value(k);
                ++k;
            }
            scores[axis == Axis::columns ? j : i] += s;
        }
    }
    return scores;
}

} // namespace klnmf
