#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "klnmf/driver.hpp"

namespace klnmf {

struct AlgoRunStats {
    std::string name;
    std::size_t iterations = 0;
    double final_objective = 0.0;
    double total_ms = 0.0;
    double ms_per_iter = 0.0;
    // First iteration whose objective reaches the shared target (the
    // fixed-point run's final objective), and the solver time spent there.
    bool crossover_found = false;
    std::size_t crossover_iteration = 0;
    double crossover_ms = 0.0;
};

struct BenchReport {
    AlgoRunStats mu;
    AlgoRunStats dna;
    std::optional<AlgoRunStats> mu_no_cost; // timing-only row, objective skipped
    double target_objective = 0.0;
    // Measured speedups at the crossover point: iterations and solver time
    // the fixed-point run needed, over what the Newton run needed.
    double speedup_iterations = 0.0;
    double speedup_cpu = 0.0;
    double cost_ratio = 0.0; // dna ms/iter over mu-with-cost ms/iter
    std::uint64_t init_hash = 0;
    std::vector<ConvergenceRecord> mu_records;
    std::vector<ConvergenceRecord> dna_records;
};

/// FNV-1a over the raw bytes of both factors; used to assert that compared
/// runs really consumed identical initial states.
std::uint64_t factor_hash(const DenseMatrix& w, const DenseMatrix& h);

/// Initialize once, then run the fixed-point and Newton solvers from copies
/// of that state. The fixed-point run's final objective becomes the target
/// for both crossover searches.
BenchReport run_bench(const DenseMatrix& v, const SolverConfig& cfg, bool time_no_cost = false);
BenchReport run_bench(const SparseMatrix& v, const SolverConfig& cfg, bool time_no_cost = false);
BenchReport run_bench_from(const FactorizationState& init, const DenseMatrix& v,
                           const SolverConfig& cfg, bool time_no_cost = false);
BenchReport run_bench_from(const FactorizationState& init, const SparseMatrix& v,
                           const SolverConfig& cfg, bool time_no_cost = false);

/// Human-readable table with one row per run, the crossover line, and the
/// per-iteration cost ratio printed with one decimal.
std::string format_bench_report(const BenchReport& report);

} // namespace klnmf
