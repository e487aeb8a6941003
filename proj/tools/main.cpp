#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <variant>

#include "klnmf/bench.hpp"
#include "klnmf/driver.hpp"
#include "klnmf/generate.hpp"
#include "klnmf/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

struct SolverFlags {
    std::string input;
    std::size_t rank = 0;
    std::string algo = "dna";
    std::size_t max_iters = 500;
    double rel_tol = 0.0;
    std::uint64_t seed = 0;
    double rho = 0.0;
    double lambda = 0.0;
    double epsilon = 0.01;
    double alpha = 4.0;
    std::string out_w, out_h, log_path, plot_path;
    std::size_t threads = 1;
    bool no_cost = false;

    klnmf::SolverConfig config() const {
        klnmf::SolverConfig cfg;
        cfg.rank = rank;
        cfg.algorithm = algo == "mu" ? klnmf::Algorithm::mu : klnmf::Algorithm::dna;
        cfg.max_iters = max_iters;
        cfg.rel_tol = rel_tol;
        cfg.seed = seed;
        cfg.rho = rho;
        cfg.lambda = lambda;
        cfg.epsilon = epsilon;
        cfg.alpha = alpha;
        cfg.threads = threads;
        cfg.with_cost = !no_cost;
        return cfg;
    }
};

void add_solver_options(CLI::App* cmd, SolverFlags& f, bool with_algo) {
    cmd->add_option("--input", f.input, "matrix file (MatrixMarket or CSV)")->required();
    cmd->add_option("--rank", f.rank, "number of components")->required();
    if (with_algo)
        cmd->add_option("--algo", f.algo, "solver")->check(CLI::IsMember({"mu", "dna"}));
    cmd->add_option("--max-iters", f.max_iters, "iteration budget");
    cmd->add_option("--rel-tol", f.rel_tol, "early-stop threshold, 0 disables");
    cmd->add_option("--seed", f.seed, "initialization seed");
    cmd->add_option("--rho", f.rho, "column-factor regularizer");
    cmd->add_option("--lambda", f.lambda, "row-factor regularizer");
    cmd->add_option("--epsilon", f.epsilon, "multiplicative gain floor");
    cmd->add_option("--alpha", f.alpha, "additive step ceiling, in units of the entry");
    cmd->add_option("--out-w", f.out_w, "write the column factor here");
    cmd->add_option("--out-h", f.out_h, "write the row factor here");
    cmd->add_option("--log", f.log_path, "write the convergence CSV here");
    cmd->add_option("--plot", f.plot_path, "write the convergence SVG here");
    cmd->add_option("--threads", f.threads, "worker count for the column-parallel kernels");
    cmd->add_flag("--no-cost", f.no_cost, "skip objective computation (mu only, timing runs)");
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const std::size_t dot = path.rfind('.');
    const std::size_t slash = path.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

void print_warnings(const klnmf::FactorizationState& state) {
    for (const auto& w : state.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int cmd_factorize(const SolverFlags& flags) {
    if (flags.no_cost && flags.algo != "mu") {
        std::fprintf(stderr, "error: --no-cost disables the safety net; use --algo mu\n");
        return kExitUsage;
    }
    const klnmf::AnyMatrix v = klnmf::read_matrix(flags.input);
    const klnmf::SolverConfig cfg = flags.config();

    const klnmf::RunResult res =
        std::visit([&](const auto& m) { return klnmf::run(m, cfg); }, v);
    print_warnings(res.state);

    if (!flags.out_w.empty())
        klnmf::write_matrix(res.state.w, flags.out_w, klnmf::format_for_path(flags.out_w, false));
    if (!flags.out_h.empty())
        klnmf::write_matrix(res.state.h, flags.out_h, klnmf::format_for_path(flags.out_h, false));
    if (!flags.log_path.empty()) klnmf::write_convergence_log(res.records, flags.log_path);
    if (!flags.plot_path.empty())
        klnmf::write_svg_plot({{flags.algo, res.records}}, flags.plot_path);

    const auto& last = res.records.back();
    if (cfg.with_cost)
        std::printf("%s: %zu iterations, objective %.10g, %.2f ms solver time\n",
                    flags.algo.c_str(), res.state.iteration, last.objective.total, last.wall_ms);
    else
        std::printf("%s: %zu iterations, %.2f ms solver time (objective not computed)\n",
                    flags.algo.c_str(), res.state.iteration, last.wall_ms);
    return kExitOk;
}

int cmd_bench(const SolverFlags& flags) {
    const klnmf::AnyMatrix v = klnmf::read_matrix(flags.input);
    klnmf::SolverConfig cfg = flags.config();
    cfg.with_cost = true; // the comparison itself always needs objectives

    const klnmf::BenchReport report = std::visit(
        [&](const auto& m) { return klnmf::run_bench(m, cfg, flags.no_cost); }, v);

    if (!flags.log_path.empty()) {
        klnmf::write_convergence_log(report.mu_records, with_suffix(flags.log_path, "_mu"));
        klnmf::write_convergence_log(report.dna_records, with_suffix(flags.log_path, "_dna"));
    }
    if (!flags.plot_path.empty())
        klnmf::write_svg_plot({{"mu", report.mu_records}, {"dna", report.dna_records}},
                              flags.plot_path);

    std::fputs(klnmf::format_bench_report(report).c_str(), stdout);
    return kExitOk;
}

struct GenFlags {
    std::size_t n = 0, t = 0, r = 0;
    double density = 1.0;
    std::uint64_t seed = 0;
    std::string noise = "none";
    std::string out, out_w, out_h;
};

int cmd_gen(const GenFlags& flags) {
    klnmf::GenConfig cfg;
    cfg.rows = flags.n;
    cfg.cols = flags.t;
    cfg.rank = flags.r;
    cfg.density = flags.density;
    cfg.seed = flags.seed;
    cfg.noise = flags.noise == "poisson" ? klnmf::NoiseKind::poisson : klnmf::NoiseKind::none;

    const klnmf::GenResult result = klnmf::generate(cfg);
    klnmf::write_matrix(result.v, flags.out);
    if (!flags.out_w.empty())
        klnmf::write_matrix(result.w, flags.out_w, klnmf::format_for_path(flags.out_w, false));
    if (!flags.out_h.empty())
        klnmf::write_matrix(result.h, flags.out_h, klnmf::format_for_path(flags.out_h, false));

    const std::size_t nnz = std::holds_alternative<klnmf::SparseMatrix>(result.v)
                                ? std::get<klnmf::SparseMatrix>(result.v).nnz()
                                : flags.n * flags.t;
    std::printf("wrote %zux%zu matrix (%zu stored entries) to %s\n", flags.n, flags.t, nnz,
                flags.out.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"KL-divergence non-negative matrix factorization"};
    app.require_subcommand(1);

    SolverFlags fac_flags;
    auto* fac = app.add_subcommand("factorize", "factorize a matrix file");
    add_solver_options(fac, fac_flags, true);

    SolverFlags bench_flags;
    auto* bench = app.add_subcommand("bench", "compare the two solvers from one initial state");
    add_solver_options(bench, bench_flags, false);

    GenFlags gen_flags;
    auto* gen = app.add_subcommand("gen", "synthesize a low-rank test matrix");
    gen->add_option("--n", gen_flags.n, "rows")->required();
    gen->add_option("--t", gen_flags.t, "columns")->required();
    gen->add_option("--r", gen_flags.r, "true rank")->required();
    gen->add_option("--density", gen_flags.density, "keep probability; < 1 writes sparse");
    gen->add_option("--seed", gen_flags.seed, "generator seed");
    gen->add_option("--noise", gen_flags.noise, "entry noise")
        ->check(CLI::IsMember({"none", "poisson"}));
    gen->add_option("--out", gen_flags.out, "output matrix file")->required();
    gen->add_option("--out-w", gen_flags.out_w, "write the ground-truth column factor");
    gen->add_option("--out-h", gen_flags.out_h, "write the ground-truth row factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (fac->parsed()) return cmd_factorize(fac_flags);
        if (bench->parsed()) return cmd_bench(bench_flags);
        if (gen->parsed()) return cmd_gen(gen_flags);
    } catch (const klnmf::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const klnmf::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const klnmf::NumericalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const klnmf::DeadComponentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const klnmf::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
    return kExitOk;
}
