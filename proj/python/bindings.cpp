#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "klnmf/bench.hpp"
#include "klnmf/driver.hpp"
#include "klnmf/generate.hpp"
#include "klnmf/io.hpp"

namespace py = pybind11;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;

klnmf::DenseMatrix dense_from_numpy(const FArray& arr) {
    if (arr.ndim() != 2) throw klnmf::DimensionError("expected a 2-d array");
    klnmf::DenseMatrix m(static_cast<std::size_t>(arr.shape(0)),
                         static_cast<std::size_t>(arr.shape(1)));
    std::memcpy(m.data(), arr.data(), m.size() * sizeof(double));
    return m;
}

py::array_t<double> numpy_from_dense(const klnmf::DenseMatrix& m) {
    // column-major storage maps straight onto a Fortran-ordered array
    py::array_t<double> arr({m.rows(), m.cols()},
                            {sizeof(double), sizeof(double) * m.rows()});
    std::memcpy(arr.mutable_data(), m.data(), m.size() * sizeof(double));
    return arr;
}

klnmf::SparseMatrix csc_from_parts(std::size_t rows, std::size_t cols,
                                   const std::vector<std::size_t>& indptr,
                                   const std::vector<std::size_t>& indices,
                                   const std::vector<double>& data) {
    return klnmf::SparseMatrix(rows, cols, indptr, indices, data);
}

klnmf::SolverConfig make_config(std::size_t rank, const std::string& algo, std::size_t max_iters,
                                double rel_tol, std::uint64_t seed, double rho, double lambda,
                                double epsilon, double alpha, std::size_t threads) {
    klnmf::SolverConfig cfg;
    cfg.rank = rank;
    if (algo == "mu") cfg.algorithm = klnmf::Algorithm::mu;
    else if (algo == "dna") cfg.algorithm = klnmf::Algorithm::dna;
    else throw klnmf::ValueError("algo must be 'mu' or 'dna'");
    cfg.max_iters = max_iters;
    cfg.rel_tol = rel_tol;
    cfg.seed = seed;
    cfg.rho = rho;
    cfg.lambda = lambda;
    cfg.epsilon = epsilon;
    cfg.alpha = alpha;
    cfg.threads = threads;
    return cfg;
}

py::dict records_to_dict(const std::vector<klnmf::ConvergenceRecord>& records) {
    const std::size_t n = records.size();
    py::array_t<std::size_t> iteration(n), wins_h(n), wins_w(n);
    py::array_t<double> objective(n), wall_ms(n);
    for (std::size_t i = 0; i < n; ++i) {
        iteration.mutable_at(i) = records[i].iteration;
        objective.mutable_at(i) = records[i].objective.total;
        wall_ms.mutable_at(i) = records[i].wall_ms;
        wins_h.mutable_at(i) = records[i].dna_wins_h;
        wins_w.mutable_at(i) = records[i].dna_wins_w;
    }
    py::dict d;
    d["iteration"] = iteration;
    d["objective"] = objective;
    d["wall_ms"] = wall_ms;
    d["dna_wins_h"] = wins_h;
    d["dna_wins_w"] = wins_w;
    return d;
}

template <class Data>
py::tuple run_and_pack(const Data& v, const klnmf::SolverConfig& cfg) {
    klnmf::RunResult res;
    {
        py::gil_scoped_release release;
        res = klnmf::run(v, cfg);
    }
    return py::make_tuple(numpy_from_dense(res.state.w), numpy_from_dense(res.state.h),
                          records_to_dict(res.records));
}

} // namespace

PYBIND11_MODULE(_klnmf, m) {
    m.doc() = "KL-divergence non-negative matrix factorization (fixed-point and "
              "diagonal-Newton solvers)";

    py::register_exception<klnmf::Error>(m, "KlnmfError", PyExc_ValueError);

    m.def(
        "factorize",
        [](const FArray& v, std::size_t rank, const std::string& algo, std::size_t max_iters,
           double rel_tol, std::uint64_t seed, double rho, double lambda, double epsilon,
           double alpha, std::size_t threads) {
            const auto cfg = make_config(rank, algo, max_iters, rel_tol, seed, rho, lambda,
                                         epsilon, alpha, threads);
            const auto data = dense_from_numpy(v);
            return run_and_pack(data, cfg);
        },
        py::arg("v"), py::arg("rank"), py::arg("algo") = "dna", py::arg("max_iters") = 500,
        py::arg("rel_tol") = 0.0, py::arg("seed") = 0, py::arg("rho") = 0.0,
        py::arg("lambda_") = 0.0, py::arg("epsilon") = 0.01, py::arg("alpha") = 4.0,
        py::arg("threads") = 1,
        "Factorize a dense non-negative matrix; returns (w, h, records).");

    m.def(
        "factorize_csc",
        [](std::size_t rows, std::size_t cols, const std::vector<std::size_t>& indptr,
           const std::vector<std::size_t>& indices, const std::vector<double>& data,
           std::size_t rank, const std::string& algo, std::size_t max_iters, double rel_tol,
           std::uint64_t seed, double rho, double lambda, double epsilon, double alpha,
           std::size_t threads) {
            const auto cfg = make_config(rank, algo, max_iters, rel_tol, seed, rho, lambda,
                                         epsilon, alpha, threads);
            const auto v = csc_from_parts(rows, cols, indptr, indices, data);
            return run_and_pack(v, cfg);
        },
        py::arg("rows"), py::arg("cols"), py::arg("indptr"), py::arg("indices"), py::arg("data"),
        py::arg("rank"), py::arg("algo") = "dna", py::arg("max_iters") = 500,
        py::arg("rel_tol") = 0.0, py::arg("seed") = 0, py::arg("rho") = 0.0,
        py::arg("lambda_") = 0.0, py::arg("epsilon") = 0.01, py::arg("alpha") = 4.0,
        py::arg("threads") = 1,
        "Factorize a compressed-sparse-column matrix; returns (w, h, records).");

    m.def(
        "kl_divergence",
        [](const FArray& v, const FArray& z) {
            return klnmf::kl_divergence(dense_from_numpy(v), dense_from_numpy(z));
        },
        py::arg("v"), py::arg("z"),
        "Generalized KL divergence with zeros of v contributing only mass.");

    m.def(
        "kkt_residual",
        [](const FArray& v, const FArray& w, const FArray& h, double rho, double lambda) {
            const auto vd = dense_from_numpy(v);
            const auto state = klnmf::state_from_factors(vd, dense_from_numpy(w),
                                                         dense_from_numpy(h));
            klnmf::SolverConfig cfg;
            cfg.rank = state.w.cols();
            cfg.rho = rho;
            cfg.lambda = lambda;
            return klnmf::kkt_residual(state, vd, cfg);
        },
        py::arg("v"), py::arg("w"), py::arg("h"), py::arg("rho") = 0.0, py::arg("lambda_") = 0.0,
        "Stationarity residual of the given factor pair, normalized by mean(v).");

    m.def(
        "generate",
        [](std::size_t n, std::size_t t, std::size_t rank, double density, std::uint64_t seed,
           const std::string& noise) {
            klnmf::GenConfig cfg;
            cfg.rows = n;
            cfg.cols = t;
            cfg.rank = rank;
            cfg.density = density;
            cfg.seed = seed;
            if (noise == "poisson") cfg.noise = klnmf::NoiseKind::poisson;
            else if (noise != "none") throw klnmf::ValueError("noise must be 'none' or 'poisson'");
            const auto res = klnmf::generate(cfg);
            py::dict out;
            out["w"] = numpy_from_dense(res.w);
            out["h"] = numpy_from_dense(res.h);
            if (std::holds_alternative<klnmf::SparseMatrix>(res.v)) {
                const auto& s = std::get<klnmf::SparseMatrix>(res.v);
                out["v"] = py::none();
                out["indptr"] = s.col_ptr();
                out["indices"] = s.row_indices();
                out["data"] = s.values();
                out["shape"] = py::make_tuple(s.rows(), s.cols());
            } else {
                out["v"] = numpy_from_dense(std::get<klnmf::DenseMatrix>(res.v));
            }
            return out;
        },
        py::arg("n"), py::arg("t"), py::arg("rank"), py::arg("density") = 1.0, py::arg("seed") = 0,
        py::arg("noise") = "none",
        "Synthesize a low-rank non-negative matrix with optional Poisson noise.");

#ifdef KLNMF_VERSION
    m.attr("__version__") = KLNMF_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
