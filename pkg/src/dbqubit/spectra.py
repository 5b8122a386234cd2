"""Dense eigendecomposition of small Hamiltonians and block-structure checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockDecomposition
from .errors import DomainError, IntegrityError
from .fermiops import SparseOperator
from .fockspace import pattern_label

__all__ = [
    "DENSE_CAP",
    "RESIDUAL_TOL",
    "OFF_BLOCK_TOL",
    "Spectrum",
    "eigen_spectrum",
    "verify_block_diagonal",
    "block_spectra",
]

DENSE_CAP = 4096
RESIDUAL_TOL = 1e-10
OFF_BLOCK_TOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    basis_id: str
    residual_bound: float
    eigenvectors: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.eigenvalues)


def _check_symmetric(H: SparseOperator) -> None:
    if H.row_basis is not H.col_basis and H.row_basis.states != H.col_basis.states:
        raise DomainError("Hamiltonian must act within a single basis")
    csr = H.tocsr()
    if (csr != csr.T).nnz:
        raise IntegrityError(f"operator {H.label!r} on {H.row_basis.basis_id} is not symmetric")


def _dense_eigh(matrix: np.ndarray, basis_id: str, tol: float, keep_vectors: bool) -> Spectrum:
    if matrix.shape[0] == 0:
        return Spectrum(np.zeros(0), basis_id, 0.0)
    values, vectors = np.linalg.eigh(matrix)
    residual = float(np.abs(matrix @ vectors - vectors * values).max())
    if residual > tol:
        raise IntegrityError(f"eigen-residual {residual:.3e} exceeds tolerance {tol:.1e}")
    return Spectrum(values, basis_id, residual, vectors if keep_vectors else None)


def eigen_spectrum(
    H: SparseOperator,
    tol: float = RESIDUAL_TOL,
    max_dim: int = DENSE_CAP,
    keep_vectors: bool = False,
) -> Spectrum:
    """All eigenvalues (ascending, eV) of a symmetric operator via dense ``eigh``."""
    n_rows, n_cols = H.shape
    if n_rows != n_cols:
        raise DomainError(f"operator must be square, got {H.shape}")
    if n_rows > max_dim:
        raise DomainError(
            f"dimension {n_rows} exceeds dense cap {max_dim}; use block decomposition first"
        )
    _check_symmetric(H)
    return _dense_eigh(H.toarray(), H.row_basis.basis_id, tol, keep_vectors)


def _block_indices(H: SparseOperator, decomposition: BlockDecomposition) -> np.ndarray:
    """Block number of every basis state of ``H``."""
    owner = {}
    for b, (_, states) in enumerate(decomposition):
        for s in states:
            owner[s] = b
    basis = H.row_basis
    if basis.n_pairs != decomposition.n_pairs or len(owner) != len(basis) \
            or any(s not in owner for s in basis):
        raise DomainError(f"basis {basis.basis_id} is not the desired sector of the decomposition")
    return np.array([owner[s] for s in basis], dtype=np.int64)


def verify_block_diagonal(
    H: SparseOperator, decomposition: BlockDecomposition, tol: float = OFF_BLOCK_TOL
) -> tuple[bool, float]:
    """Whether every entry linking different hole-spin blocks is within ``tol``.

    Returns the verdict and the largest off-block magnitude found.
    """
    owner = _block_indices(H, decomposition)
    off = owner[H.rows] != owner[H.cols]
    worst = float(np.abs(H.values[off]).max()) if off.any() else 0.0
    return worst <= tol, worst


def block_spectra(
    H: SparseOperator,
    decomposition: BlockDecomposition,
    tol: float = RESIDUAL_TOL,
) -> dict[str, Spectrum]:
    """Diagonalize each hole-spin block of a desired-sector Hamiltonian separately.

    The off-block part must vanish (checked at ``OFF_BLOCK_TOL``).
    """
    ok, worst = verify_block_diagonal(H, decomposition)
    if not ok:
        raise IntegrityError(f"Hamiltonian is not block diagonal (max off-block {worst:.3e})")
    _check_symmetric(H)
    dense = H.toarray()
    owner = _block_indices(H, decomposition)
    out = {}
    for b, (pattern, _) in enumerate(decomposition):
        idx = np.flatnonzero(owner == b)
        label = pattern_label(pattern)
        out[label] = _dense_eigh(dense[np.ix_(idx, idx)], f"block:{label}", tol, False)
    return out
