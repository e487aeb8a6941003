#include "klnmf/solver.hpp"

#include <cmath>
#include <cstring>

#include "klnmf/parallel.hpp"

namespace klnmf {

namespace {

inline double floored(double z) { return z > kReconFloor ? z : kReconFloor; }

inline double saturate(double ratio) { return ratio < kRatioCeil ? ratio : kRatioCeil; }

std::vector<double> regularized(std::vector<double> cs, double reg) {
    for (auto& d : cs) d += reg;
    return cs;
}

std::vector<unsigned char> dead_mask(const std::vector<double>& den) {
    std::vector<unsigned char> dead(den.size(), 0);
    for (std::size_t r = 0; r < den.size(); ++r) dead[r] = den[r] == 0.0 ? 1 : 0;
    return dead;
}

bool any_dead(const std::vector<unsigned char>& dead) {
    for (const auto d : dead)
        if (d) return true;
    return false;
}

// a = gram / den - 1 row-wise; rows of vanished components are pinned to -1
// so the fixed-point update sends the factor row to zero.
void finalize_a(DenseMatrix& a, const std::vector<double>& den,
                const std::vector<unsigned char>& dead) {
    for (std::size_t t = 0; t < a.cols(); ++t) {
        double* at = a.col(t);
        for (std::size_t r = 0; r < a.rows(); ++r)
            at[r] = dead[r] ? -1.0 : at[r] / den[r] - 1.0;
    }
}

void finalize_b(DenseMatrix& b, const std::vector<double>& den,
                const std::vector<unsigned char>& dead) {
    for (std::size_t t = 0; t < b.cols(); ++t) {
        double* bt = b.col(t);
        for (std::size_t r = 0; r < b.rows(); ++r) bt[r] = dead[r] ? 0.0 : bt[r] / den[r];
    }
}

// t -> sum_r weights[r] * x(r, t): the column sums of basis*x computed on the
// factor side, which is the only way the sparse path can afford them.
std::vector<double> weighted_column_sums(std::span<const double> weights, const DenseMatrix& x) {
    std::vector<double> s(x.cols(), 0.0);
    for (std::size_t t = 0; t < x.cols(); ++t) {
        const double* xt = x.col(t);
        double acc = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) acc += weights[r] * xt[r];
        s[t] = acc;
    }
    return s;
}

// --- representation-specific pieces -----------------------------------------
// Dense data carries a full reconstruction matrix; sparse data carries the
// reconstruction at its support only. Accumulation orders are aligned so both
// representations produce identical bits on equal inputs.

DenseMatrix recon_of(const DenseMatrix& data, const DenseMatrix& basis, const DenseMatrix& x,
                     std::size_t threads) {
    (void)data;
    return matmul(basis, x, threads);
}

std::vector<double> recon_of(const SparseMatrix& data, const DenseMatrix& basis,
                             const DenseMatrix& x, std::size_t threads) {
    return reconstruction_at_support(data, basis, x, threads);
}

DenseMatrix ratio_of(const DenseMatrix& data, const DenseMatrix& z) {
    return masked_ratio(data, z);
}

SparseMatrix ratio_of(const SparseMatrix& data, const std::vector<double>& z) {
    return masked_ratio_from_support(data, z);
}

DenseMatrix ratio_sq_of(const DenseMatrix& data, const DenseMatrix& z) {
    return masked_ratio_squared(data, z);
}

SparseMatrix ratio_sq_of(const SparseMatrix& data, const std::vector<double>& z) {
    return masked_ratio_squared_from_support(data, z);
}

// Per-column score sum_{v>0} v*log(v/z) + sum(z) - sum(v), with the
// reconstruction column sums supplied factor-side by the caller.
std::vector<double> scores_of(const DenseMatrix& data, const DenseMatrix& z,
                              const std::vector<double>& zsums, const std::vector<double>& vsums,
                              std::size_t threads) {
    std::vector<double> scores(data.cols(), 0.0);
    parallel_for(data.cols(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const double* vt = data.col(t);
            const double* zt = z.col(t);
            double acc = 0.0;
            for (std::size_t i = 0; i < data.rows(); ++i)
                if (vt[i] > 0.0) acc += vt[i] * std::log(vt[i] / floored(zt[i]));
            scores[t] = acc + zsums[t] - vsums[t];
        }
    });
    return scores;
}

std::vector<double> scores_of(const SparseMatrix& data, const std::vector<double>& z,
                              const std::vector<double>& zsums, const std::vector<double>& vsums,
                              std::size_t threads) {
    std::vector<double> scores(data.cols(), 0.0);
    parallel_for(data.cols(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            double acc = 0.0;
            for (std::size_t k = data.col_begin(t); k < data.col_end(t); ++k)
                acc += data.value(k) * std::log(data.value(k) / floored(z[k]));
            scores[t] = acc + zsums[t] - vsums[t];
        }
    });
    return scores;
}

template <class Data>
PhaseStats update_factor_impl(const Data& data, const DenseMatrix& basis, DenseMatrix& x,
                              double reg, Algorithm algo, const DnaParams& params,
                              bool with_scores, std::size_t threads) {
    if (basis.rows() != data.rows() || basis.cols() != x.rows() || x.cols() != data.cols())
        throw DimensionError("update_factor: factor shapes do not match the data");
    if (!(params.epsilon > 0.0) || !(params.alpha > 0.0))
        throw ValueError("update_factor: gain floor and step ceiling must be positive");

    const std::vector<double> cs = column_sums(basis);
    const std::vector<double> den = regularized(cs, reg);
    const std::vector<unsigned char> dead = dead_mask(den);
    const std::vector<double> vsums = column_sums(data);

    const auto z = recon_of(data, basis, x, threads);
    const auto q = ratio_of(data, z);
    DenseMatrix a = gram_t(basis, q, threads);
    finalize_a(a, den, dead);

    DenseMatrix x_mu = mu_update(x, a);

    PhaseStats stats;
    std::vector<double> s_mu;
    if (with_scores || algo == Algorithm::dna) {
        const auto z_mu = recon_of(data, basis, x_mu, threads);
        s_mu = scores_of(data, z_mu, weighted_column_sums(cs, x_mu), vsums, threads);
    }

    if (algo == Algorithm::mu) {
        x = std::move(x_mu);
        if (with_scores) {
            double kl = 0.0;
            for (const double s : s_mu) kl += s;
            stats.kl = kl;
        }
        return stats;
    }

    const auto qbar = ratio_sq_of(data, z);
    DenseMatrix b = weighted_gram(basis, qbar, threads);
    finalize_b(b, den, dead);

    DenseMatrix x_dna = dna_step(x, a, b, params);
    renormalize_columns(x_dna, den, vsums);
    const auto z_dna = recon_of(data, basis, x_dna, threads);
    const auto s_dna = scores_of(data, z_dna, weighted_column_sums(cs, x_dna), vsums, threads);

    const std::size_t rank = x.rows();
    double kl = 0.0;
    for (std::size_t t = 0; t < x.cols(); ++t) {
        const bool newton_wins = s_dna[t] < s_mu[t];
        const DenseMatrix& src = newton_wins ? x_dna : x_mu;
        std::memcpy(x.col(t), src.col(t), rank * sizeof(double));
        kl += newton_wins ? s_dna[t] : s_mu[t];
        stats.dna_wins += newton_wins ? 1 : 0;
    }
    stats.kl = kl;
    return stats;
}

} // namespace

namespace {

void require_alive(const std::vector<unsigned char>& dead, const char* what) {
    if (any_dead(dead))
        throw DeadComponentError(std::string(what) +
                                 ": a basis column sums to zero with no regularizer");
}

template <class Q>
DenseMatrix compute_a_any(const DenseMatrix& basis, const Q& q, double reg, std::size_t threads,
                          bool strict) {
    const auto den = regularized(column_sums(basis), reg);
    const auto dead = dead_mask(den);
    if (strict) require_alive(dead, "compute_a");
    DenseMatrix a = gram_t(basis, q, threads);
    finalize_a(a, den, dead);
    return a;
}

template <class Q>
DenseMatrix compute_b_any(const DenseMatrix& basis, const Q& qbar, double reg, std::size_t threads,
                          bool strict) {
    const auto den = regularized(column_sums(basis), reg);
    const auto dead = dead_mask(den);
    if (strict) require_alive(dead, "compute_b");
    DenseMatrix b = weighted_gram(basis, qbar, threads);
    finalize_b(b, den, dead);
    return b;
}

} // namespace

DenseMatrix compute_a(const DenseMatrix& basis, const DenseMatrix& q, double reg,
                      std::size_t threads) {
    return compute_a_any(basis, q, reg, threads, true);
}

DenseMatrix compute_a(const DenseMatrix& basis, const SparseMatrix& q, double reg,
                      std::size_t threads) {
    return compute_a_any(basis, q, reg, threads, true);
}

DenseMatrix compute_b(const DenseMatrix& basis, const DenseMatrix& qbar, double reg,
                      std::size_t threads) {
    return compute_b_any(basis, qbar, reg, threads, true);
}

DenseMatrix compute_b(const DenseMatrix& basis, const SparseMatrix& qbar, double reg,
                      std::size_t threads) {
    return compute_b_any(basis, qbar, reg, threads, true);
}

DenseMatrix compute_a_pinned(const DenseMatrix& basis, const DenseMatrix& q, double reg,
                             std::size_t threads) {
    return compute_a_any(basis, q, reg, threads, false);
}

DenseMatrix compute_a_pinned(const DenseMatrix& basis, const SparseMatrix& q, double reg,
                             std::size_t threads) {
    return compute_a_any(basis, q, reg, threads, false);
}

DenseMatrix compute_b_pinned(const DenseMatrix& basis, const DenseMatrix& qbar, double reg,
                             std::size_t threads) {
    return compute_b_any(basis, qbar, reg, threads, false);
}

DenseMatrix compute_b_pinned(const DenseMatrix& basis, const SparseMatrix& qbar, double reg,
                             std::size_t threads) {
    return compute_b_any(basis, qbar, reg, threads, false);
}

DenseMatrix mu_update(const DenseMatrix& x, const DenseMatrix& a) {
    if (!x.same_shape(a)) throw DimensionError("mu_update: shape mismatch");
    DenseMatrix out(x.rows(), x.cols());
    const double* px = x.data();
    const double* pa = a.data();
    double* po = out.data();
    for (std::size_t i = 0; i < x.size(); ++i) po[i] = px[i] * (1.0 + pa[i]);
    return out;
}

double dna_step_scalar(double x, double a, double b, const DnaParams& params) {
    if (x == 0.0) return 0.0;
    if (b == 0.0) return x * (1.0 + a); // flat curvature: take the fixed-point value
    if (a < 0.0) {
        const double xb = x * b;
        if (!std::isfinite(xb)) return x; // gain tends to 1 as curvature blows up
        const double gain = xb / (xb - a); // denominator strictly positive here
        return x * (gain > params.epsilon ? gain : params.epsilon);
    }
    const double step = a / b;
    const double cap = params.alpha * x;
    return x + (step < cap ? step : cap);
}

DenseMatrix dna_step(const DenseMatrix& x, const DenseMatrix& a, const DenseMatrix& b,
                     const DnaParams& params) {
    if (!x.same_shape(a) || !x.same_shape(b)) throw DimensionError("dna_step: shape mismatch");
    DenseMatrix out(x.rows(), x.cols());
    const double* px = x.data();
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    for (std::size_t i = 0; i < x.size(); ++i)
        po[i] = dna_step_scalar(px[i], pa[i], pb[i], params);
    return out;
}

std::vector<std::size_t> renormalize_columns(DenseMatrix& x, std::span<const double> den,
                                             std::span<const double> target) {
    if (den.size() != x.rows() || target.size() != x.cols())
        throw DimensionError("renormalize_columns: weight or target length mismatch");
    std::vector<std::size_t> skipped;
    for (std::size_t t = 0; t < x.cols(); ++t) {
        double* xt = x.col(t);
        double mass = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) mass += den[r] * xt[r];
        if (mass > 0.0) {
            const double s = target[t] / mass;
            for (std::size_t r = 0; r < x.rows(); ++r) xt[r] *= s;
        } else {
            skipped.push_back(t);
        }
    }
    return skipped;
}

Candidate select_best(const Candidate& mu, const Candidate& dna, std::size_t* dna_wins) {
    if (!mu.factor.same_shape(dna.factor) || !mu.recon.same_shape(dna.recon) ||
        mu.scores.size() != dna.scores.size() || mu.scores.size() != mu.factor.cols())
        throw DimensionError("select_best: candidates disagree in shape");
    Candidate out{DenseMatrix(mu.factor.rows(), mu.factor.cols()),
                  DenseMatrix(mu.recon.rows(), mu.recon.cols()),
                  SelectionScores(mu.scores.size())};
    std::size_t wins = 0;
    for (std::size_t t = 0; t < mu.scores.size(); ++t) {
        const bool newton_wins = dna.scores[t] < mu.scores[t]; // ties stay with mu
        const Candidate& src = newton_wins ? dna : mu;
        std::memcpy(out.factor.col(t), src.factor.col(t), out.factor.rows() * sizeof(double));
        std::memcpy(out.recon.col(t), src.recon.col(t), out.recon.rows() * sizeof(double));
        out.scores[t] = src.scores[t];
        wins += newton_wins ? 1 : 0;
    }
    if (dna_wins) *dna_wins = wins;
    return out;
}

PhaseStats update_factor(const DenseMatrix& data, const DenseMatrix& basis, DenseMatrix& x,
                         double reg, Algorithm algo, const DnaParams& params, bool with_scores,
                         std::size_t threads) {
    return update_factor_impl(data, basis, x, reg, algo, params, with_scores, threads);
}

PhaseStats update_factor(const SparseMatrix& data, const DenseMatrix& basis, DenseMatrix& x,
                         double reg, Algorithm algo, const DnaParams& params, bool with_scores,
                         std::size_t threads) {
    return update_factor_impl(data, basis, x, reg, algo, params, with_scores, threads);
}

std::vector<double> reconstruction_at_support(const SparseMatrix& v, const DenseMatrix& basis,
                                              const DenseMatrix& x, std::size_t threads) {
    if (basis.rows() != v.rows() || basis.cols() != x.rows() || x.cols() != v.cols())
        throw DimensionError("reconstruction_at_support: factor shapes do not match the data");
    std::vector<double> z(v.nnz(), 0.0);
    const std::size_t rank = basis.cols();
    parallel_for(v.cols(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const double* xt = x.col(t);
            for (std::size_t k = v.col_begin(t); k < v.col_end(t); ++k) {
                const std::size_t i = v.row_index(k);
                double s = 0.0;
                for (std::size_t r = 0; r < rank; ++r) s += basis(i, r) * xt[r];
                z[k] = s;
            }
        }
    });
    return z;
}

SparseMatrix masked_ratio_from_support(const SparseMatrix& v, std::span<const double> z) {
    if (z.size() != v.nnz()) throw DimensionError("masked_ratio_from_support: length mismatch");
    std::vector<double> values(v.nnz());
    for (std::size_t k = 0; k < v.nnz(); ++k)
        values[k] = saturate(v.value(k) / floored(z[k]));
    return SparseMatrix(v.rows(), v.cols(), v.col_ptr(), v.row_indices(), std::move(values));
}

SparseMatrix masked_ratio_squared_from_support(const SparseMatrix& v, std::span<const double> z) {
    if (z.size() != v.nnz())
        throw DimensionError("masked_ratio_squared_from_support: length mismatch");
    std::vector<double> values(v.nnz());
    for (std::size_t k = 0; k < v.nnz(); ++k) {
        const double zf = floored(z[k]);
        values[k] = saturate(v.value(k) / zf / zf);
    }
    return SparseMatrix(v.rows(), v.cols(), v.col_ptr(), v.row_indices(), std::move(values));
}

} // namespace klnmf
