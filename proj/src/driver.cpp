#include "klnmf/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "klnmf/kernels.hpp"
#include "klnmf/pcg32.hpp"

namespace klnmf {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

DenseMatrix transposed_data(const DenseMatrix& v) { return transpose(v); }
SparseMatrix transposed_data(const SparseMatrix& v) { return v.transposed(); }

double data_sum(const DenseMatrix& v) { return v.sum(); }
double data_sum(const SparseMatrix& v) {
    double s = 0.0;
    for (const double x : v.values()) s += x;
    return s;
}

// Algorithm step-1/16/29 rescaling: divide each basis column by its sum and
// multiply the matching factor row, leaving the reconstruction unchanged.
// Only applied when both regularizers are zero (see run_from_impl); vanished
// components are skipped.
void normalize_w_pair(DenseMatrix& w, DenseMatrix& h) {
    const auto cs = column_sums(w);
    for (std::size_t r = 0; r < w.cols(); ++r) {
        if (!(cs[r] > 0.0)) continue;
        double* wc = w.col(r);
        const double inv = 1.0 / cs[r];
        for (std::size_t i = 0; i < w.rows(); ++i) wc[i] *= inv;
        for (std::size_t t = 0; t < h.cols(); ++t) h(r, t) *= cs[r];
    }
}

void normalize_h_pair(DenseMatrix& h, DenseMatrix& w) {
    const auto rs = row_sums(h);
    for (std::size_t r = 0; r < h.rows(); ++r) {
        if (!(rs[r] > 0.0)) continue;
        const double inv = 1.0 / rs[r];
        for (std::size_t t = 0; t < h.cols(); ++t) h(r, t) *= inv;
        double* wc = w.col(r);
        for (std::size_t i = 0; i < w.rows(); ++i) wc[i] *= rs[r];
    }
}

void refresh_caches(FactorizationState& st, const DenseMatrix& v, std::size_t threads) {
    st.z = matmul(st.w, st.h, threads);
    st.q = masked_ratio(v, st.z);
    st.sparse_data = false;
}

void refresh_caches(FactorizationState& st, const SparseMatrix& v, std::size_t threads) {
    auto zvals = reconstruction_at_support(v, st.w, st.h, threads);
    st.qs = masked_ratio_from_support(v, zvals);
    // the support reconstruction shares the divisor floor so a decayed entry
    // cannot violate the strictly-positive storage invariant
    for (auto& z : zvals) z = z > kReconFloor ? z : kReconFloor;
    st.zs = SparseMatrix(v.rows(), v.cols(), v.col_ptr(), v.row_indices(), std::move(zvals));
    st.sparse_data = true;
}

template <class Data>
void check_factor_shapes(const FactorizationState& st, const Data& v) {
    if (st.w.rows() != v.rows() || st.h.cols() != v.cols() || st.w.cols() != st.h.rows())
        throw DimensionError("run_from: factor shapes do not match the data");
}

// One full sweep: row-space phase on the data, then column-space phase on the
// transposed problem. Solver work is accumulated into solver_ms; callbacks,
// logging and validation stay outside the timed sections.
template <class Data>
void run_one_iteration(const Data& v, const Data& vt, DenseMatrix& w, DenseMatrix& h,
                       const SolverConfig& cfg, Algorithm algo, bool with_scores,
                       std::size_t iter, const PhaseCallback& callback, PhaseStats& h_stats,
                       PhaseStats& w_stats, double& solver_ms) {
    const bool normalize = cfg.rho == 0.0 && cfg.lambda == 0.0;
    const DnaParams params = cfg.dna_params();

    auto t0 = Clock::now();
    if (normalize) normalize_w_pair(w, h);
    h_stats = update_factor(v, w, h, cfg.lambda, algo, params, with_scores, cfg.threads);
    solver_ms += ms_since(t0);
    if (callback) callback(Phase::h_update, iter, w, h);

    t0 = Clock::now();
    if (normalize) normalize_h_pair(h, w);
    DenseMatrix ht = transpose(h);
    DenseMatrix wt = transpose(w);
    w_stats = update_factor(vt, ht, wt, cfg.rho, algo, params, with_scores, cfg.threads);
    w = transpose(wt);
    if (normalize) normalize_w_pair(w, h);
    solver_ms += ms_since(t0);
    if (callback) callback(Phase::w_update, iter, w, h);
}

template <class Data>
FactorizationState initial_factors_impl(const Data& v, const SolverConfig& cfg) {
    if (v.rows() == 0 || v.cols() == 0) throw ValueError("initialize: data matrix is empty");
    if (cfg.rank == 0) throw ValueError("initialize: rank must be at least 1");
    if (data_sum(v) == 0.0) throw ValueError("initialize: data matrix is all zeros");

    FactorizationState st;
    const auto rs = row_sums(v);
    const auto cs = column_sums(v);
    std::size_t zero_rows = 0, zero_cols = 0;
    for (const double s : rs) zero_rows += s == 0.0 ? 1 : 0;
    for (const double s : cs) zero_cols += s == 0.0 ? 1 : 0;
    if (zero_rows > 0) st.warnings.push_back(std::to_string(zero_rows) + " all-zero data rows");
    if (zero_cols > 0) st.warnings.push_back(std::to_string(zero_cols) + " all-zero data columns");
    if (cfg.rank > std::min(v.rows(), v.cols()))
        st.warnings.push_back("rank exceeds min(rows, cols)");

    // uniform W in storage (column-major) order, then unit column sums
    Pcg32 rng(cfg.seed);
    st.w = DenseMatrix(v.rows(), cfg.rank);
    for (std::size_t r = 0; r < cfg.rank; ++r) {
        double* wc = st.w.col(r);
        double sum = 0.0;
        do {
            sum = 0.0;
            for (std::size_t i = 0; i < v.rows(); ++i) sum += wc[i] = rng.next_double();
        } while (!(sum > 0.0));
        const double inv = 1.0 / sum;
        for (std::size_t i = 0; i < v.rows(); ++i) wc[i] *= inv;
    }
    st.h = gram_t(st.w, v, cfg.threads);
    st.sparse_data = std::is_same_v<Data, SparseMatrix>;
    return st;
}

template <class Data>
FactorizationState initialize_impl(const Data& v, const SolverConfig& cfg) {
    FactorizationState st = initial_factors_impl(v, cfg);
    const Data vt = transposed_data(v);
    PhaseStats hs, ws;
    double ms = 0.0;
    // warm-up sweep is always the fixed-point update so every solver starts
    // from one and the same state
    run_one_iteration(v, vt, st.w, st.h, cfg, Algorithm::mu, false, 0, {}, hs, ws, ms);
    refresh_caches(st, v, cfg.threads);
    return st;
}

template <class Data>
FactorizationState state_from_factors_impl(const Data& v, DenseMatrix w, DenseMatrix h) {
    w.check_non_negative("w");
    h.check_non_negative("h");
    FactorizationState st;
    st.w = std::move(w);
    st.h = std::move(h);
    check_factor_shapes(st, v);
    refresh_caches(st, v, 1);
    return st;
}

template <class Data>
RunResult run_from_impl(FactorizationState state, const Data& v, const SolverConfig& cfg,
                        const PhaseCallback& callback) {
    check_factor_shapes(state, v);
    if (!cfg.with_cost && cfg.algorithm != Algorithm::mu)
        throw ValueError("run: cost-free mode disables the safety net and needs --algo mu");
    const std::size_t log_every = cfg.log_every == 0 ? 1 : cfg.log_every;

    const Data vt = transposed_data(v);
    RunResult out;
    out.records.reserve(cfg.with_cost ? cfg.max_iters / log_every + 2 : 0);

    if (cfg.with_cost) {
        ConvergenceRecord rec;
        rec.iteration = 0;
        rec.objective = evaluate_objective(v, state.w, state.h, cfg.rho, cfg.lambda);
        out.records.push_back(rec);
    }

    double solver_ms = 0.0;
    double prev_total = out.records.empty() ? 0.0 : out.records.front().objective.total;
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        PhaseStats hs, ws;
        run_one_iteration(v, vt, state.w, state.h, cfg, cfg.algorithm, cfg.with_cost, it,
                          callback, hs, ws, solver_ms);
        state.iteration = it;

        if (!state.w.all_finite() || !state.h.all_finite())
            throw NumericalError("run: non-finite factor entry at iteration " +
                                 std::to_string(it));

        bool stop = false;
        if (cfg.with_cost) {
            ObjectiveValue obj;
            obj.kl = ws.kl;
            obj.reg_w = cfg.rho * state.w.sum();
            obj.reg_h = cfg.lambda * state.h.sum();
            obj.total = obj.kl + obj.reg_w + obj.reg_h;
            if (!std::isfinite(obj.total))
                throw NumericalError("run: non-finite objective at iteration " +
                                     std::to_string(it));

            if (cfg.rel_tol > 0.0 && it > 1 &&
                prev_total - obj.total < cfg.rel_tol * std::abs(prev_total))
                stop = true;
            prev_total = obj.total;

            if (it % log_every == 0 || it == cfg.max_iters || stop) {
                ConvergenceRecord rec;
                rec.iteration = it;
                rec.objective = obj;
                rec.wall_ms = solver_ms;
                rec.dna_wins_h = hs.dna_wins;
                rec.dna_wins_w = ws.dna_wins;
                out.records.push_back(rec);
            }
        } else if (it % log_every == 0 || it == cfg.max_iters) {
            ConvergenceRecord rec;
            rec.iteration = it;
            rec.objective = {std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0,
                             std::numeric_limits<double>::quiet_NaN()};
            rec.wall_ms = solver_ms;
            out.records.push_back(rec);
        }
        if (stop) break;
    }

    refresh_caches(state, v, cfg.threads);
    out.state = std::move(state);
    return out;
}

template <class Data>
ObjectiveValue evaluate_objective_impl(const Data& v, const DenseMatrix& w, const DenseMatrix& h,
                                       double rho, double lambda);

template <>
ObjectiveValue evaluate_objective_impl(const DenseMatrix& v, const DenseMatrix& w,
                                       const DenseMatrix& h, double rho, double lambda) {
    ObjectiveValue obj;
    obj.kl = kl_divergence(v, matmul(w, h));
    obj.reg_w = rho * w.sum();
    obj.reg_h = lambda * h.sum();
    obj.total = obj.kl + obj.reg_w + obj.reg_h;
    return obj;
}

template <>
ObjectiveValue evaluate_objective_impl(const SparseMatrix& v, const DenseMatrix& w,
                                       const DenseMatrix& h, double rho, double lambda) {
    // support terms at O(nnz); the reconstruction total comes factor-side
    const auto z = reconstruction_at_support(v, w, h, 1);
    double kl = 0.0;
    double sv = 0.0;
    for (std::size_t k = 0; k < v.nnz(); ++k) {
        const double zf = z[k] > kReconFloor ? z[k] : kReconFloor;
        kl += v.value(k) * std::log(v.value(k) / zf);
        sv += v.value(k);
    }
    const auto cs = column_sums(w);
    const auto hr = row_sums(h);
    double sz = 0.0;
    for (std::size_t r = 0; r < cs.size(); ++r) sz += cs[r] * hr[r];

    ObjectiveValue obj;
    obj.kl = kl - sv + sz;
    obj.reg_w = rho * w.sum();
    obj.reg_h = lambda * h.sum();
    obj.total = obj.kl + obj.reg_w + obj.reg_h;
    return obj;
}

DenseMatrix recon_like(const FactorizationState& st, const DenseMatrix&) {
    return matmul(st.w, st.h);
}
std::vector<double> recon_like(const FactorizationState& st, const SparseMatrix& v) {
    return reconstruction_at_support(v, st.w, st.h);
}
DenseMatrix recon_like_t(const DenseMatrix& vt, const DenseMatrix& ht, const DenseMatrix& wt) {
    (void)vt;
    return matmul(ht, wt);
}
std::vector<double> recon_like_t(const SparseMatrix& vt, const DenseMatrix& ht,
                                 const DenseMatrix& wt) {
    return reconstruction_at_support(vt, ht, wt);
}
DenseMatrix ratio_like(const DenseMatrix& v, const DenseMatrix& z) { return masked_ratio(v, z); }
SparseMatrix ratio_like(const SparseMatrix& v, const std::vector<double>& z) {
    return masked_ratio_from_support(v, z);
}

template <class Data>
double kkt_residual_impl(const FactorizationState& state, const Data& v,
                         const SolverConfig& cfg) {
    const std::size_t n = v.rows(), t = v.cols();

    const auto z = recon_like(state, v);
    const auto q = ratio_like(v, z);
    const auto a_h = compute_a_pinned(state.w, q, cfg.lambda, cfg.threads);
    double worst = 0.0;
    for (std::size_t j = 0; j < t; ++j)
        for (std::size_t r = 0; r < a_h.rows(); ++r)
            worst = std::max(worst, std::abs(a_h(r, j) * state.h(r, j)));

    const Data vt = transposed_data(v);
    const DenseMatrix ht = transpose(state.h);
    const DenseMatrix wt = transpose(state.w);
    const auto zt = recon_like_t(vt, ht, wt);
    const auto qt = ratio_like(vt, zt);
    const auto a_w = compute_a_pinned(ht, qt, cfg.rho, cfg.threads);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t r = 0; r < a_w.rows(); ++r)
            worst = std::max(worst, std::abs(a_w(r, j) * wt(r, j)));

    const double mean = data_sum(v) / (static_cast<double>(n) * static_cast<double>(t));
    return worst / mean;
}

} // namespace

FactorizationState initial_factors(const DenseMatrix& v, const SolverConfig& cfg) {
    v.check_non_negative("v");
    return initial_factors_impl(v, cfg);
}
FactorizationState initial_factors(const SparseMatrix& v, const SolverConfig& cfg) {
    return initial_factors_impl(v, cfg);
}

FactorizationState initialize(const DenseMatrix& v, const SolverConfig& cfg) {
    v.check_non_negative("v");
    return initialize_impl(v, cfg);
}
FactorizationState initialize(const SparseMatrix& v, const SolverConfig& cfg) {
    return initialize_impl(v, cfg);
}

FactorizationState state_from_factors(const DenseMatrix& v, DenseMatrix w, DenseMatrix h) {
    return state_from_factors_impl(v, std::move(w), std::move(h));
}
FactorizationState state_from_factors(const SparseMatrix& v, DenseMatrix w, DenseMatrix h) {
    return state_from_factors_impl(v, std::move(w), std::move(h));
}

RunResult run(const DenseMatrix& v, const SolverConfig& cfg) {
    return run_from_impl(initialize(v, cfg), v, cfg, {});
}
RunResult run(const SparseMatrix& v, const SolverConfig& cfg) {
    return run_from_impl(initialize(v, cfg), v, cfg, {});
}

RunResult run_from(FactorizationState state, const DenseMatrix& v, const SolverConfig& cfg,
                   const PhaseCallback& callback) {
    return run_from_impl(std::move(state), v, cfg, callback);
}
RunResult run_from(FactorizationState state, const SparseMatrix& v, const SolverConfig& cfg,
                   const PhaseCallback& callback) {
    return run_from_impl(std::move(state), v, cfg, callback);
}

ObjectiveValue evaluate_objective(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h,
                                  double rho, double lambda) {
    return evaluate_objective_impl(v, w, h, rho, lambda);
}
ObjectiveValue evaluate_objective(const SparseMatrix& v, const DenseMatrix& w,
                                  const DenseMatrix& h, double rho, double lambda) {
    return evaluate_objective_impl(v, w, h, rho, lambda);
}

double kkt_residual(const FactorizationState& state, const DenseMatrix& v,
                    const SolverConfig& cfg) {
    return kkt_residual_impl(state, v, cfg);
}
double kkt_residual(const FactorizationState& state, const SparseMatrix& v,
                    const SolverConfig& cfg) {
    return kkt_residual_impl(state, v, cfg);
}

} // namespace klnmf
