#include "klnmf/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "klnmf/parallel.hpp"

namespace klnmf {

namespace {

inline double floored(double z) { return z > kReconFloor ? z : kReconFloor; }

inline double saturated(double ratio) { return ratio < kRatioCeil ? ratio : kRatioCeil; }

void require_same_shape(std::size_t ar, std::size_t ac, std::size_t br, std::size_t bc,
                        const char* what) {
    if (ar != br || ac != bc) throw DimensionError(std::string(what) + ": shape mismatch");
}

} // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, std::size_t threads) {
    if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions disagree");
    const std::size_t n = a.rows(), r = a.cols(), t = b.cols();
    DenseMatrix c(n, t);
    parallel_for(t, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            double* cj = c.col(j);
            const double* bj = b.col(j);
            for (std::size_t k = 0; k < r; ++k) {
                const double bkj = bj[k];
                const double* ak = a.col(k);
                for (std::size_t i = 0; i < n; ++i) cj[i] += ak[i] * bkj;
            }
        }
    });
    return c;
}

DenseMatrix masked_ratio(const DenseMatrix& v, const DenseMatrix& z) {
    require_same_shape(v.rows(), v.cols(), z.rows(), z.cols(), "masked_ratio");
    DenseMatrix q(v.rows(), v.cols());
    const double* pv = v.data();
    const double* pz = z.data();
    double* pq = q.data();
    for (std::size_t i = 0; i < v.size(); ++i)
        pq[i] = pv[i] > 0.0 ? saturated(pv[i] / floored(pz[i])) : 0.0;
    return q;
}

SparseMatrix masked_ratio(const SparseMatrix& v, const DenseMatrix& z) {
    require_same_shape(v.rows(), v.cols(), z.rows(), z.cols(), "masked_ratio");
    std::vector<double> values(v.nnz());
    for (std::size_t c = 0; c < v.cols(); ++c)
        for (std::size_t k = v.col_begin(c); k < v.col_end(c); ++k)
            values[k] = saturated(v.value(k) / floored(z(v.row_index(k), c)));
    return SparseMatrix(v.rows(), v.cols(), v.col_ptr(), v.row_indices(), std::move(values));
}

DenseMatrix masked_ratio_squared(const DenseMatrix& v, const DenseMatrix& z) {
    require_same_shape(v.rows(), v.cols(), z.rows(), z.cols(), "masked_ratio_squared");
    DenseMatrix q(v.rows(), v.cols());
    const double* pv = v.data();
    const double* pz = z.data();
    double* pq = q.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double zf = floored(pz[i]);
        pq[i] = pv[i] > 0.0 ? saturated(pv[i] / zf / zf) : 0.0;
    }
    return q;
}

SparseMatrix masked_ratio_squared(const SparseMatrix& v, const DenseMatrix& z) {
    require_same_shape(v.rows(), v.cols(), z.rows(), z.cols(), "masked_ratio_squared");
    std::vector<double> values(v.nnz());
    for (std::size_t c = 0; c < v.cols(); ++c)
        for (std::size_t k = v.col_begin(c); k < v.col_end(c); ++k) {
            const double zf = floored(z(v.row_index(k), c));
            values[k] = saturated(v.value(k) / zf / zf);
        }
    return SparseMatrix(v.rows(), v.cols(), v.col_ptr(), v.row_indices(), std::move(values));
}

DenseMatrix gram_t(const DenseMatrix& w, const DenseMatrix& q, std::size_t threads) {
    if (w.rows() != q.rows()) throw DimensionError("gram_t: row counts disagree");
    const std::size_t n = w.rows(), r = w.cols(), t = q.cols();
    DenseMatrix out(r, t);
    parallel_for(t, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const double* qj = q.col(j);
            double* oj = out.col(j);
            for (std::size_t k = 0; k < r; ++k) {
                const double* wk = w.col(k);
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += wk[i] * qj[i];
                oj[k] = s;
            }
        }
    });
    return out;
}

DenseMatrix gram_t(const DenseMatrix& w, const SparseMatrix& q, std::size_t threads) {
    if (w.rows() != q.rows()) throw DimensionError("gram_t: row counts disagree");
    const std::size_t r = w.cols();
    DenseMatrix out(r, q.cols());
    parallel_for(q.cols(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            double* oj = out.col(j);
            for (std::size_t k = 0; k < r; ++k) {
                const double* wk = w.col(k);
                double s = 0.0;
                for (std::size_t p = q.col_begin(j); p < q.col_end(j); ++p)
                    s += wk[q.row_index(p)] * q.value(p);
                oj[k] = s;
            }
        }
    });
    return out;
}

DenseMatrix weighted_gram(const DenseMatrix& w, const DenseMatrix& qbar, std::size_t threads) {
    if (w.rows() != qbar.rows()) throw DimensionError("weighted_gram: row counts disagree");
    const std::size_t n = w.rows(), r = w.cols(), t = qbar.cols();
    DenseMatrix out(r, t);
    parallel_for(t, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const double* qj = qbar.col(j);
            double* oj = out.col(j);
            for (std::size_t k = 0; k < r; ++k) {
                const double* wk = w.col(k);
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += wk[i] * wk[i] * qj[i];
                oj[k] = s;
            }
        }
    });
    return out;
}

DenseMatrix weighted_gram(const DenseMatrix& w, const SparseMatrix& qbar, std::size_t threads) {
    if (w.rows() != qbar.rows()) throw DimensionError("weighted_gram: row counts disagree");
    const std::size_t r = w.cols();
    DenseMatrix out(r, qbar.cols());
    parallel_for(qbar.cols(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            double* oj = out.col(j);
            for (std::size_t k = 0; k < r; ++k) {
                const double* wk = w.col(k);
                double s = 0.0;
                for (std::size_t p = qbar.col_begin(j); p < qbar.col_end(j); ++p) {
                    const double wv = wk[qbar.row_index(p)];
                    s += wv * wv * qbar.value(p);
                }
                oj[k] = s;
            }
        }
    });
    return out;
}

std::vector<double> column_sums(const DenseMatrix& m) {
    std::vector<double> s(m.cols(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double* mj = m.col(j);
        for (std::size_t i = 0; i < m.rows(); ++i) s[j] += mj[i];
    }
    return s;
}

std::vector<double> column_sums(const SparseMatrix& m) {
    std::vector<double> s(m.cols(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t k = m.col_begin(j); k < m.col_end(j); ++k) s[j] += m.value(k);
    return s;
}

std::vector<double> row_sums(const DenseMatrix& m) {
    std::vector<double> s(m.rows(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double* mj = m.col(j);
        for (std::size_t i = 0; i < m.rows(); ++i) s[i] += mj[i];
    }
    return s;
}

std::vector<double> row_sums(const SparseMatrix& m) {
    std::vector<double> s(m.rows(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t k = m.col_begin(j); k < m.col_end(j); ++k) s[m.row_index(k)] += m.value(k);
    return s;
}

void scale_columns(DenseMatrix& m, std::span<const double> factors) {
    if (factors.size() != m.cols()) throw DimensionError("scale_columns: factor count mismatch");
    for (const double f : factors)
        if (!(f > 0.0) || !std::isfinite(f))
            throw ValueError("scale_columns: factors must be finite and strictly positive");
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double* mj = m.col(j);
        for (std::size_t i = 0; i < m.rows(); ++i) mj[i] *= factors[j];
    }
}

void scale_rows(DenseMatrix& m, std::span<const double> factors) {
    if (factors.size() != m.rows()) throw DimensionError("scale_rows: factor count mismatch");
    for (const double f : factors)
        if (!(f > 0.0) || !std::isfinite(f))
            throw ValueError("scale_rows: factors must be finite and strictly positive");
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double* mj = m.col(j);
        for (std::size_t i = 0; i < m.rows(); ++i) mj[i] *= factors[i];
    }
}

} // namespace klnmf
