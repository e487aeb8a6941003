#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "klnmf/matrix.hpp"
#include "klnmf/objective.hpp"
#include "klnmf/solver.hpp"

namespace klnmf {

struct SolverConfig {
    std::size_t rank = 1;
    double rho = 0.0;    // column-factor regularizer weight
    double lambda = 0.0; // row-factor regularizer weight
    double epsilon = 0.01;
    double alpha = 4.0;
    std::size_t max_iters = 500;
    double rel_tol = 0.0; // relative decrease per iteration; 0 disables
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::dna;
    std::size_t log_every = 1;
    std::size_t threads = 1;
    bool with_cost = true; // false: skip all objective bookkeeping (mu only)

    DnaParams dna_params() const { return {epsilon, alpha}; }
};

/// Factors plus cached reconstruction/ratio in the storage class of the data.
struct FactorizationState {
    DenseMatrix w; // N x R
    DenseMatrix h; // R x T
    // Dense data: full reconstruction basis*factor and masked ratio.
    DenseMatrix z;
    DenseMatrix q;
    // Sparse data: the same two quantities on the support pattern of v; a
    // dense N x T reconstruction is never materialized on this path.
    SparseMatrix zs;
    SparseMatrix qs;
    bool sparse_data = false;
    std::size_t iteration = 0;
    std::vector<std::string> warnings;
};

struct ConvergenceRecord {
    std::size_t iteration = 0;
    ObjectiveValue objective;
    double wall_ms = 0.0; // cumulative solver time; file I/O excluded
    std::size_t dna_wins_h = 0;
    std::size_t dna_wins_w = 0;
};

struct RunResult {
    FactorizationState state;
    std::vector<ConvergenceRecord> records;
};

enum class Phase { h_update, w_update };

/// Invoked after each half-step with the current factors; used by tests and
/// diagnostics, never on the timed path.
using PhaseCallback =
    std::function<void(Phase, std::size_t iteration, const DenseMatrix& w, const DenseMatrix& h)>;

/// Seeded uniform W with unit column sums and H = W^t V; no update applied.
FactorizationState initial_factors(const DenseMatrix& v, const SolverConfig& cfg);
FactorizationState initial_factors(const SparseMatrix& v, const SolverConfig& cfg);

/// initial_factors followed by one full fixed-point iteration, caches filled.
/// Independent of cfg.algorithm, so every solver starts from the same state.
FactorizationState initialize(const DenseMatrix& v, const SolverConfig& cfg);
FactorizationState initialize(const SparseMatrix& v, const SolverConfig& cfg);

/// A consistent state built from externally chosen factors.
FactorizationState state_from_factors(const DenseMatrix& v, DenseMatrix w, DenseMatrix h);
FactorizationState state_from_factors(const SparseMatrix& v, DenseMatrix w, DenseMatrix h);

RunResult run(const DenseMatrix& v, const SolverConfig& cfg);
RunResult run(const SparseMatrix& v, const SolverConfig& cfg);
RunResult run_from(FactorizationState state, const DenseMatrix& v, const SolverConfig& cfg,
                   const PhaseCallback& callback = {});
RunResult run_from(FactorizationState state, const SparseMatrix& v, const SolverConfig& cfg,
                   const PhaseCallback& callback = {});

ObjectiveValue evaluate_objective(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h,
                                  double rho, double lambda);
ObjectiveValue evaluate_objective(const SparseMatrix& v, const DenseMatrix& w, const DenseMatrix& h,
                                  double rho, double lambda);

/// Max over both factors of |a .* factor| (the stationarity products),
/// normalized by the mean of v. Zero at any KKT point.
double kkt_residual(const FactorizationState& state, const DenseMatrix& v, const SolverConfig& cfg);
double kkt_residual(const FactorizationState& state, const SparseMatrix& v, const SolverConfig& cfg);

} // namespace klnmf
