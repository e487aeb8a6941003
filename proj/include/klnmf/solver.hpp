#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "klnmf/kernels.hpp"
#include "klnmf/matrix.hpp"
#include "klnmf/objective.hpp"

namespace klnmf {

enum class Algorithm { mu, dna };

/// Clamps on the diagonal-Newton multiplicative gain: the shrink branch is
/// floored at epsilon, the growth branch is ceiled at a gain of 1 + alpha.
struct DnaParams {
    double epsilon = 0.01;
    double alpha = 4.0;
};

/// Normalized gradient surrogate:
///   a(r,t) = (basis^t q)(r,t) / (colsum(basis)(r) + reg) - 1.
/// Zero at interior stationary points. Throws DeadComponentError if some
/// basis column sums to zero while reg is zero.
DenseMatrix compute_a(const DenseMatrix& basis, const DenseMatrix& q, double reg,
                      std::size_t threads = 1);
DenseMatrix compute_a(const DenseMatrix& basis, const SparseMatrix& q, double reg,
                      std::size_t threads = 1);

/// Normalized diagonal curvature:
///   b(r,t) = (basis.^2)^t qbar (r,t) / (colsum(basis)(r) + reg)
/// with qbar the masked ratio of the data against the squared reconstruction.
/// Non-negative everywhere, strictly positive where the data column has
/// support overlapping the basis column.
DenseMatrix compute_b(const DenseMatrix& basis, const DenseMatrix& qbar, double reg,
                      std::size_t threads = 1);
DenseMatrix compute_b(const DenseMatrix& basis, const SparseMatrix& qbar, double reg,
                      std::size_t threads = 1);

/// As compute_a / compute_b, but a vanished component yields a = -1 and b = 0
/// instead of an error, which pins its factor row at zero under either
/// update. This is what the iteration loop uses so a component that decays
/// away mid-run stays dead without aborting the run.
DenseMatrix compute_a_pinned(const DenseMatrix& basis, const DenseMatrix& q, double reg,
                             std::size_t threads = 1);
DenseMatrix compute_a_pinned(const DenseMatrix& basis, const SparseMatrix& q, double reg,
                             std::size_t threads = 1);
DenseMatrix compute_b_pinned(const DenseMatrix& basis, const DenseMatrix& qbar, double reg,
                             std::size_t threads = 1);
DenseMatrix compute_b_pinned(const DenseMatrix& basis, const SparseMatrix& qbar, double reg,
                             std::size_t threads = 1);

/// Fixed-point update x .* (1 + a); zero entries stay zero.
DenseMatrix mu_update(const DenseMatrix& x, const DenseMatrix& a);

/// One element-wise diagonal-Newton step:
///   a < 0:  x * max(x*b / (x*b - a), epsilon)        (denominator > 0)
///   a >= 0: x + min(a/b, alpha*x)
///   x = 0:  0 (fixed point), b = 0: fall back to the fixed-point update.
double dna_step_scalar(double x, double a, double b, const DnaParams& params);
DenseMatrix dna_step(const DenseMatrix& x, const DenseMatrix& a, const DenseMatrix& b,
                     const DnaParams& params);

/// Scale every column of x so that sum_r den[r] * x(r,t) == target[t].
/// Columns whose weighted sum is zero are left untouched; their indices are
/// returned so the caller can flag them.
std::vector<std::size_t> renormalize_columns(DenseMatrix& x, std::span<const double> den,
                                             std::span<const double> target);

/// A candidate factor with the reconstruction and per-column scores needed by
/// the safety net.
struct Candidate {
    DenseMatrix factor;
    DenseMatrix recon;
    SelectionScores scores;
};

/// Per-column winner-take-all between the fixed-point and Newton candidates;
/// ties go to the fixed-point update. The merged reconstruction is spliced
/// column-wise, which is exact because each reconstruction column depends on
/// its factor column only.
Candidate select_best(const Candidate& mu, const Candidate& dna, std::size_t* dna_wins = nullptr);

struct PhaseStats {
    std::size_t dna_wins = 0;
    // Sum of the selected per-column scores == KL divergence after the phase.
    double kl = std::numeric_limits<double>::quiet_NaN();
};

/// One half-step of the alternating optimization, column orientation:
/// data (N x T) ~ basis (N x R) * x (R x T), x updated in place. The row
/// phase is this same routine applied to the transposed problem. Column
/// subproblems are independent and parallelized over `threads`; accumulation
/// order inside a column is fixed, so results do not depend on the worker
/// count, and the dense and sparse overloads agree bit-for-bit.
PhaseStats update_factor(const DenseMatrix& data, const DenseMatrix& basis, DenseMatrix& x,
                         double reg, Algorithm algo, const DnaParams& params, bool with_scores,
                         std::size_t threads = 1);
PhaseStats update_factor(const SparseMatrix& data, const DenseMatrix& basis, DenseMatrix& x,
                         double reg, Algorithm algo, const DnaParams& params, bool with_scores,
                         std::size_t threads = 1);

/// Values of (basis * x) at the support of v, aligned with v.values().
std::vector<double> reconstruction_at_support(const SparseMatrix& v, const DenseMatrix& basis,
                                              const DenseMatrix& x, std::size_t threads = 1);

/// Sparse matrix with v's pattern and entries v / max(z, floor) (or the
/// squared variant) for z aligned with v.values().
SparseMatrix masked_ratio_from_support(const SparseMatrix& v, std::span<const double> z);
SparseMatrix masked_ratio_squared_from_support(const SparseMatrix& v, std::span<const double> z);

} // namespace klnmf
