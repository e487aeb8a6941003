#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "klnmf/driver.hpp"
#include "klnmf/generate.hpp"
#include "klnmf/io.hpp"
#include "oracles.hpp"

using klnmf::DenseMatrix;
using klnmf::MatrixFormat;
using klnmf::SparseMatrix;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("klnmf_io_" + name)).string();
}

void put_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string get_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

} // namespace

TEST_CASE("coordinate file with a single entry") {
    const auto path = tmp_path("single.mtx");
    put_file(path, "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 3.0\n");
    const auto m = klnmf::read_matrix(path);
    REQUIRE(std::holds_alternative<SparseMatrix>(m));
    const auto& s = std::get<SparseMatrix>(m);
    CHECK(s.rows() == 2);
    CHECK(s.cols() == 2);
    CHECK(s.nnz() == 1);
    CHECK(s.row_index(0) == 0);
    CHECK(s.value(0) == 3.0);
}

TEST_CASE("duplicate coordinate entries are summed") {
    const auto path = tmp_path("dups.mtx");
    put_file(path,
             "%%MatrixMarket matrix coordinate real general\n% comment line\n3 3 3\n"
             "2 2 1.5\n2 2 0.5\n1 3 2\n");
    const auto m = klnmf::read_matrix(path);
    const auto& s = std::get<SparseMatrix>(m);
    CHECK(s.nnz() == 2);
    CHECK(s.to_dense()(1, 1) == 2.0);
    CHECK(s.to_dense()(0, 2) == 2.0);
}

TEST_CASE("malformed files raise distinct errors") {
    const auto path = tmp_path("bad.mtx");

    put_file(path, "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 2\n");
    CHECK_THROWS_AS(klnmf::read_matrix(path), klnmf::FormatError);

    // declared five entries, contains four
    put_file(path, "%%MatrixMarket matrix coordinate real general\n4 4 5\n"
                   "1 1 1\n2 2 1\n3 3 1\n4 4 1\n");
    CHECK_THROWS_AS(klnmf::read_matrix(path), klnmf::FormatError);

    // declared one entry, contains two
    put_file(path, "%%MatrixMarket matrix coordinate real general\n4 4 1\n1 1 1\n2 2 1\n");
    CHECK_THROWS_AS(klnmf::read_matrix(path), klnmf::FormatError);

    put_file(path, "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
    CHECK_THROWS_AS(klnmf::read_matrix(path), klnmf::FormatError);

    put_file(path, "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 -4\n");
    CHECK_THROWS_AS(klnmf::read_matrix(path), klnmf::FormatError);

    put_file(path, "1,2\n3,-4\n");
    CHECK_THROWS_AS(klnmf::read_matrix(path), klnmf::FormatError);

    put_file(path, "1,2\n3\n");
    CHECK_THROWS_AS(klnmf::read_matrix(path), klnmf::FormatError);

    put_file(path, "");
    CHECK_THROWS_AS(klnmf::read_matrix(path), klnmf::FormatError);

    CHECK_THROWS_AS(klnmf::read_matrix(tmp_path("does_not_exist.mtx")), klnmf::IoError);
}

TEST_CASE("reader survives arbitrary garbage with typed errors only") {
    klnmf::Pcg32 rng(996677);
    const char alphabet[] = "0123456789.eE+- %,\nMatrixmarket coordinate array real general\t";
    const auto path = tmp_path("fuzz.any");
    for (int round = 0; round < 300; ++round) {
        std::string content;
        const std::size_t len = rng.next_u32() % 160;
        for (std::size_t i = 0; i < len; ++i)
            content += alphabet[rng.next_u32() % (sizeof(alphabet) - 1)];
        if (round % 3 == 0) content = "%%MatrixMarket matrix coordinate real general\n" + content;
        if (round % 3 == 1) content = "%%MatrixMarket matrix array real general\n" + content;
        put_file(path, content);
        try {
            const auto m = klnmf::read_matrix(path); // success is fine too
            (void)klnmf::matrix_rows(m);
        } catch (const klnmf::FormatError&) {
        } catch (const klnmf::ValueError&) {
        }
    }
}

TEST_CASE("dense identity renders as minimal CSV") {
    const auto path = tmp_path("eye.csv");
    klnmf::write_matrix(DenseMatrix::from_rows({{1, 0}, {0, 1}}), path, MatrixFormat::csv_dense);
    CHECK(get_file(path) == "1,0\n0,1\n");
}

TEST_CASE("empty sparse matrix writes a valid header and empty body") {
    const auto path = tmp_path("empty.mtx");
    const SparseMatrix empty(4, 3, {0, 0, 0, 0}, {}, {});
    klnmf::write_matrix(empty, path, MatrixFormat::matrixmarket_coordinate);
    CHECK(get_file(path) == "%%MatrixMarket matrix coordinate real general\n4 3 0\n");
    CHECK(std::get<SparseMatrix>(klnmf::read_matrix(path)) == empty);
}

TEST_CASE("one-by-one coordinate file has one stored entry") {
    const auto path = tmp_path("tiny.mtx");
    const auto s = SparseMatrix::from_triplets(1, 1, {{0, 0, 0.5}});
    klnmf::write_matrix(s, path, MatrixFormat::matrixmarket_coordinate);
    const auto info = klnmf::probe_matrix(path);
    CHECK(info.nnz == 1);
    CHECK(info.rows == 1);
    CHECK(std::get<SparseMatrix>(klnmf::read_matrix(path)) == s);
}

TEST_CASE("round trips are exact in every format") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        klnmf::Pcg32 rng(4000 + seed);
        const std::size_t n = 1 + rng.next_u32() % 8;
        const std::size_t t = 1 + rng.next_u32() % 8;
        DenseMatrix d(n, t);
        for (std::size_t j = 0; j < t; ++j)
            for (std::size_t i = 0; i < n; ++i)
                d(i, j) = rng.next_double() < 0.3
                              ? 0.0
                              : rng.next_positive() * std::pow(10.0, 8.0 * rng.next_double() - 4.0);

        const auto csv = tmp_path("rt.csv");
        klnmf::write_matrix(d, csv, MatrixFormat::csv_dense);
        CHECK(std::get<DenseMatrix>(klnmf::read_matrix(csv)) == d);

        const auto arr = tmp_path("rt_arr.mtx");
        klnmf::write_matrix(d, arr, MatrixFormat::matrixmarket_array);
        CHECK(std::get<DenseMatrix>(klnmf::read_matrix(arr)) == d);

        std::vector<std::tuple<std::size_t, std::size_t, double>> trips;
        for (std::size_t j = 0; j < t; ++j)
            for (std::size_t i = 0; i < n; ++i)
                if (d(i, j) != 0.0) trips.emplace_back(i, j, d(i, j));
        const auto sp = SparseMatrix::from_triplets(n, t, trips);
        const auto coo = tmp_path("rt.mtx");
        klnmf::write_matrix(sp, coo, MatrixFormat::matrixmarket_coordinate);
        CHECK(std::get<SparseMatrix>(klnmf::read_matrix(coo)) == sp);
    }
}

TEST_CASE("convergence log format") {
    std::vector<klnmf::ConvergenceRecord> records(1);
    records[0].iteration = 0;
    records[0].objective.total = 1.5;
    records[0].wall_ms = 2.0;
    const auto path = tmp_path("log.csv");
    klnmf::write_convergence_log(records, path);
    CHECK(get_file(path) == "iteration,objective,wall_ms,dna_wins_h,dna_wins_w\n0,1.5,2,0,0\n");
}

TEST_CASE("written logs from real runs have a non-increasing objective column") {
    klnmf::GenConfig gen;
    gen.rows = 18;
    gen.cols = 14;
    gen.rank = 3;
    gen.seed = 21;
    gen.noise = klnmf::NoiseKind::poisson;
    const auto generated = klnmf::generate(gen);
    const auto& v = std::get<DenseMatrix>(generated.v);
    klnmf::SolverConfig cfg;
    cfg.rank = 3;
    cfg.max_iters = 40;
    cfg.algorithm = klnmf::Algorithm::dna;
    const auto res = klnmf::run(v, cfg);
    const auto path = tmp_path("run_log.csv");
    klnmf::write_convergence_log(res.records, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line); // header
    double prev = std::numeric_limits<double>::infinity();
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double obj = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(obj <= prev + 1e-12 * std::abs(prev));
        prev = obj;
        ++rows;
    }
    CHECK(rows == res.records.size());
}

TEST_CASE("svg plot renders one polyline per run") {
    std::vector<klnmf::RunTrace> runs(2);
    runs[0].label = "mu";
    runs[1].label = "dna";
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < 10; ++i) {
            klnmf::ConvergenceRecord rec;
            rec.iteration = i;
            rec.objective.total = 100.0 / static_cast<double>(i + 1 + k * 3);
            rec.wall_ms = static_cast<double>(i) * (k ? 2.5 : 1.0);
            runs[k].records.push_back(rec);
        }
    const auto path = tmp_path("plot.svg");
    klnmf::write_svg_plot(runs, path);
    const auto svg = get_file(path);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1))
        ++polylines;
    CHECK(polylines == 4); // two runs on each of the two panels
    CHECK(svg.find("#1f77b4") != std::string::npos);
    CHECK(svg.find("#d62728") != std::string::npos);

    CHECK_THROWS_AS(klnmf::write_svg_plot({}, path), klnmf::ValueError);
}
