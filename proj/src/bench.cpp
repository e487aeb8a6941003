#include "klnmf/bench.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

namespace klnmf {

namespace {

std::uint64_t fnv1a(std::uint64_t hash, const DenseMatrix& m) {
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(m.data());
    const std::size_t n = m.size() * sizeof(double);
    for (std::size_t i = 0; i < n; ++i) {
        hash ^= bytes[i];
        hash *= 1099511628211ULL;
    }
    return hash;
}

// Crossover slack: objectives within one part in 1e12 of the target count as
// having reached it, so exact-fit fixtures where everything sits at numerical
// zero do not flip on last-bit noise.
bool reached(double objective, double target) {
    return objective <= target + 1e-12 * std::max(1.0, std::abs(target));
}

AlgoRunStats stats_of(const std::string& name, const std::vector<ConvergenceRecord>& records,
                      double target) {
    AlgoRunStats s;
    s.name = name;
    s.iterations = records.back().iteration;
    s.final_objective = records.back().objective.total;
    s.total_ms = records.back().wall_ms - records.front().wall_ms;
    s.ms_per_iter = s.iterations > 0 ? s.total_ms / static_cast<double>(s.iterations) : 0.0;
    for (const auto& rec : records) {
        if (reached(rec.objective.total, target)) {
            s.crossover_found = true;
            s.crossover_iteration = rec.iteration;
            s.crossover_ms = rec.wall_ms;
            break;
        }
    }
    return s;
}

template <class Data>
BenchReport bench_impl(const FactorizationState& init, const Data& v, const SolverConfig& cfg,
                       bool time_no_cost) {
    BenchReport report;

    // both solvers consume byte-identical copies of one initial state
    FactorizationState init_mu = init;
    FactorizationState init_dna = init;
    const std::uint64_t h_mu = factor_hash(init_mu.w, init_mu.h);
    const std::uint64_t h_dna = factor_hash(init_dna.w, init_dna.h);
    if (h_mu != h_dna) throw NumericalError("bench: initial states diverged");
    report.init_hash = h_mu;

    SolverConfig mu_cfg = cfg;
    mu_cfg.algorithm = Algorithm::mu;
    mu_cfg.log_every = 1;
    mu_cfg.rel_tol = 0.0;
    SolverConfig dna_cfg = mu_cfg;
    dna_cfg.algorithm = Algorithm::dna;

    auto mu_res = run_from(std::move(init_mu), v, mu_cfg);
    report.target_objective = mu_res.records.back().objective.total;
    auto dna_res = run_from(std::move(init_dna), v, dna_cfg);

    report.mu = stats_of("mu", mu_res.records, report.target_objective);
    report.dna = stats_of("dna", dna_res.records, report.target_objective);
    report.mu_records = std::move(mu_res.records);
    report.dna_records = std::move(dna_res.records);

    if (report.dna.crossover_found && report.dna.crossover_iteration > 0) {
        report.speedup_iterations = static_cast<double>(report.mu.iterations) /
                                    static_cast<double>(report.dna.crossover_iteration);
        if (report.dna.crossover_ms > 0.0)
            report.speedup_cpu = report.mu.total_ms / report.dna.crossover_ms;
    }
    if (report.mu.ms_per_iter > 0.0) report.cost_ratio = report.dna.ms_per_iter / report.mu.ms_per_iter;

    if (time_no_cost) {
        SolverConfig nc_cfg = mu_cfg;
        nc_cfg.with_cost = false;
        auto nc_res = run_from(init, v, nc_cfg);
        AlgoRunStats s;
        s.name = "mu (no cost)";
        s.iterations = nc_res.records.back().iteration;
        s.total_ms = nc_res.records.back().wall_ms;
        s.ms_per_iter = s.iterations ? s.total_ms / static_cast<double>(s.iterations) : 0.0;
        s.final_objective = std::numeric_limits<double>::quiet_NaN();
        report.mu_no_cost = s;
    }
    return report;
}

} // namespace

std::uint64_t factor_hash(const DenseMatrix& w, const DenseMatrix& h) {
    return fnv1a(fnv1a(1469598103934665603ULL, w), h);
}

BenchReport run_bench(const DenseMatrix& v, const SolverConfig& cfg, bool time_no_cost) {
    return bench_impl(initialize(v, cfg), v, cfg, time_no_cost);
}

BenchReport run_bench(const SparseMatrix& v, const SolverConfig& cfg, bool time_no_cost) {
    return bench_impl(initialize(v, cfg), v, cfg, time_no_cost);
}

BenchReport run_bench_from(const FactorizationState& init, const DenseMatrix& v,
                           const SolverConfig& cfg, bool time_no_cost) {
    return bench_impl(init, v, cfg, time_no_cost);
}

BenchReport run_bench_from(const FactorizationState& init, const SparseMatrix& v,
                           const SolverConfig& cfg, bool time_no_cost) {
    return bench_impl(init, v, cfg, time_no_cost);
}

std::string format_bench_report(const BenchReport& report) {
    char buf[256];
    std::string out;
    out += "algorithm      iters   final objective      total ms     ms/iter\n";
    const auto row = [&](const AlgoRunStats& s) {
        std::snprintf(buf, sizeof(buf), "%-12s %7zu %17.8g %13.2f %11.3f\n", s.name.c_str(),
                      s.iterations, s.final_objective, s.total_ms, s.ms_per_iter);
        out += buf;
    };
    if (report.mu_no_cost) row(*report.mu_no_cost);
    row(report.mu);
    row(report.dna);

    std::snprintf(buf, sizeof(buf), "time per iteration, dna over mu: %.1f\n", report.cost_ratio);
    out += buf;
    if (report.dna.crossover_found) {
        std::snprintf(buf, sizeof(buf),
                      "dna reached the mu final objective at iteration %zu (%.2f ms)\n",
                      report.dna.crossover_iteration, report.dna.crossover_ms);
        out += buf;
        if (report.speedup_iterations > 0.0) {
            std::snprintf(buf, sizeof(buf),
                          "measured speedup: %.1fx in iterations, %.1fx in solver time\n",
                          report.speedup_iterations, report.speedup_cpu);
            out += buf;
        }
    } else {
        out += "dna did not reach the mu final objective within the iteration budget\n";
    }
    std::snprintf(buf, sizeof(buf), "shared initial state hash: %016llx\n",
                  static_cast<unsigned long long>(report.init_hash));
    out += buf;
    return out;
}

} // namespace klnmf
