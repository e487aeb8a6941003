#pragma once

#include <string>
#include <vector>

#include "klnmf/driver.hpp"
#include "klnmf/matrix.hpp"

namespace klnmf {

enum class MatrixFormat { matrixmarket_coordinate, matrixmarket_array, csv_dense };

/// Parsed header of a matrix file.
struct MatrixFileInfo {
    MatrixFormat format = MatrixFormat::csv_dense;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t nnz = 0; // coordinate files only
};

/// Auto-detects the format: a "%%MatrixMarket" banner selects coordinate or
/// array, anything else is read as dense CSV. Coordinate input becomes a
/// SparseMatrix (1-based indices converted, duplicates summed), the other two
/// a DenseMatrix. Negative values are rejected in every format.
AnyMatrix read_matrix(const std::string& path);
MatrixFileInfo probe_matrix(const std::string& path);

/// Values are printed with a round-trip-exact representation and in a fixed
/// column-major order, so write/read is an exact identity.
void write_matrix(const DenseMatrix& m, const std::string& path, MatrixFormat format);
void write_matrix(const SparseMatrix& m, const std::string& path, MatrixFormat format);
void write_matrix(const AnyMatrix& m, const std::string& path);

/// Picks the conventional format for a path: ".csv" is dense CSV, everything
/// else MatrixMarket (coordinate when sparse, array when dense).
MatrixFormat format_for_path(const std::string& path, bool sparse);

/// CSV with header iteration,objective,wall_ms,dna_wins_h,dna_wins_w.
void write_convergence_log(const std::vector<ConvergenceRecord>& records, const std::string& path);

struct RunTrace {
    std::string label;
    std::vector<ConvergenceRecord> records;
};

/// Self-contained SVG: log-scale objective vs iteration on the left panel and
/// vs cumulative solver time on the right, one polyline per run.
void write_svg_plot(const std::vector<RunTrace>& runs, const std::string& path);

} // namespace klnmf
