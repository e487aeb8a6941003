"""KL-divergence non-negative matrix factorization.

Two interchangeable solvers over dense and compressed-sparse-column data: the
classic multiplicative fixed-point update and a diagonalized Newton update
with a per-column safety net. See the C++ library for the full API; this
package exposes the main operations.
"""

from ._klnmf import (
    __version__,
    factorize,
    factorize_csc,
    generate,
    kkt_residual,
    kl_divergence,
)

__all__ = [
    "__version__",
    "factorize",
    "factorize_csc",
    "generate",
    "kkt_residual",
    "kl_divergence",
]
