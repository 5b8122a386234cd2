"""Fermionic ladder and number operators on Fock-state bitstrings.

Sign convention: acting on orbital ``k`` picks up ``(-1)**m`` where ``m`` is
the number of occupied orbitals with index below ``k``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import CodomainIncompleteError, DomainError
from .fockspace import SectorBasis, SpinOrbital, check_n_pairs, format_state

__all__ = [
    "OperatorKind",
    "SparseOperator",
    "apply_annihilation",
    "apply_creation",
    "build_operator_matrix",
    "operator_shapes",
    "OperatorShapes",
    "write_matrix_market",
]


class OperatorKind(str, enum.Enum):
    ANNIHILATION = "annihilation"
    CREATION = "creation"
    NUMBER = "number"

    @property
    def electron_shift(self) -> int:
        return {"annihilation": -1, "creation": 1, "number": 0}[self.value]


def _orbital_index(orbital: SpinOrbital | int) -> int:
    if isinstance(orbital, SpinOrbital):
        return orbital.linear_index
    if orbital < 0:
        raise DomainError(f"orbital index must be >= 0, got {orbital}")
    return int(orbital)


def _parity_below(state: int, k: int) -> int:
    return -1 if (state & ((1 << k) - 1)).bit_count() & 1 else 1


def apply_annihilation(state: int, orbital: SpinOrbital | int) -> tuple[int, int] | None:
    """Return ``(sign, new_state)`` or ``None`` when the orbital is empty."""
    k = _orbital_index(orbital)
    if not state >> k & 1:
        return None
    return _parity_below(state, k), state & ~(1 << k)


def apply_creation(state: int, orbital: SpinOrbital | int) -> tuple[int, int] | None:
    """Return ``(sign, new_state)`` or ``None`` when the orbital is occupied."""
    k = _orbital_index(orbital)
    if state >> k & 1:
        return None
    return _parity_below(state, k), state | (1 << k)


@dataclass(frozen=True)
class SparseOperator:
    """Real matrix in triplet form between two bases.

    Rows index ``row_basis`` (codomain), columns index ``col_basis`` (domain).
    Triplets are sorted by ``(row, col)`` and contain no duplicates.
    """

    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    row_basis: SectorBasis
    col_basis: SectorBasis
    label: str = ""

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if not (rows.shape == cols.shape == values.shape):
            raise DomainError("rows, cols and values must have equal length")
        if rows.size:
            if rows.min() < 0 or rows.max() >= len(self.row_basis):
                raise DomainError("row index out of bounds")
            if cols.min() < 0 or cols.max() >= len(self.col_basis):
                raise DomainError("column index out of bounds")
            if not np.all(np.isfinite(values)):
                raise DomainError("operator entries must be finite")
        order = np.lexsort((cols, rows))
        rows, cols, values = rows[order], cols[order], values[order]
        if rows.size > 1:
            dup = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
            if dup.any():
                raise DomainError("duplicate (row, col) entries")
        for name, arr in (("rows", rows), ("cols", cols), ("values", values)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_basis), len(self.col_basis)

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def tocsr(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.values, (self.rows, self.cols)), shape=self.shape)

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.rows, self.cols] = self.values
        return out

    def transpose(self, label: str | None = None) -> "SparseOperator":
        return SparseOperator(
            self.cols, self.rows, self.values, self.col_basis, self.row_basis,
            label=self.label + "^T" if label is None else label,
        )

    T = property(transpose)


def build_operator_matrix(
    kind: OperatorKind | str,
    orbital: SpinOrbital | int,
    domain: SectorBasis,
    codomain: SectorBasis | None = None,
) -> SparseOperator:
    """Matrix of one ladder/number operator from ``domain`` to ``codomain``.

    ``codomain`` defaults to ``domain`` for the number operator.  A reached
    state missing from ``codomain`` raises :class:`CodomainIncompleteError`,
    so a restricted codomain must contain the full image of ``domain``.
    """
    kind = OperatorKind(kind)
    k = _orbital_index(orbital)
    if k >= domain.n_orbitals:
        raise DomainError(f"orbital {k} out of range for {domain.n_orbitals} orbitals")
    if codomain is None:
        if kind is not OperatorKind.NUMBER:
            raise DomainError(f"{kind.value} needs an explicit codomain basis")
        codomain = domain
    if codomain.n_pairs != domain.n_pairs:
        raise DomainError("domain and codomain have different widths")
    if domain.n_electrons is not None and codomain.n_electrons is not None:
        if codomain.n_electrons != domain.n_electrons + kind.electron_shift:
            raise DomainError(
                f"{kind.value} maps Ne={domain.n_electrons} to "
                f"Ne={domain.n_electrons + kind.electron_shift}, "
                f"codomain has Ne={codomain.n_electrons}"
            )

    rows, cols, vals = [], [], []
    for c, state in enumerate(domain):
        if kind is OperatorKind.NUMBER:
            if not state >> k & 1:
                continue
            hit = (1, state)
        elif kind is OperatorKind.ANNIHILATION:
            hit = apply_annihilation(state, k)
        else:
            hit = apply_creation(state, k)
        if hit is None:
            continue
        sign, new = hit
        r = codomain.index(new)
        if r is None:
            raise CodomainIncompleteError(new, codomain.label, format_state(new, domain.n_pairs))
        rows.append(r)
        cols.append(c)
        vals.append(float(sign))
    label = f"{kind.value}[{SpinOrbital.from_index(k)}]"
    return SparseOperator(np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                          np.array(vals), codomain, domain, label=label)


@dataclass(frozen=True)
class OperatorShapes:
    number: tuple[int, int]
    annihilation: tuple[int, int]
    creation: tuple[int, int]


def operator_shapes(n_pairs: int, spin_resolved: bool = False) -> OperatorShapes:
    """Closed-form shapes of n, c and c-dagger on the desired space or one block."""
    check_n_pairs(n_pairs)
    n = n_pairs
    if spin_resolved:
        dim, lower = 2 ** n, 5 * n * 2 ** (n - 1)
    else:
        dim, lower = 2 ** (2 * n), 3 * n * 2 ** (2 * n - 1)
    return OperatorShapes((dim, dim), (lower, dim), (dim, lower))


def write_matrix_market(op: SparseOperator, target, comment: str = "") -> None:
    """Write ``op`` as a real general coordinate Matrix Market file.

    ``target`` is a path or a binary file object.
    """
    header = [
        f"kind/orbital: {op.label}",
        f"row basis: {op.row_basis.basis_id}",
        f"col basis: {op.col_basis.basis_id}",
    ]
    if comment:
        header.append(comment)
    matrix = sp.coo_matrix((op.values, (op.rows, op.cols)), shape=op.shape)
    kwargs = dict(comment="\n".join(header), field="real", symmetry="general")
    if hasattr(target, "write"):
        scipy.io.mmwrite(target, matrix, **kwargs)
        return
    # Pass a handle: mmwrite would otherwise append ".mtx" to bare names.
    with open(target, "wb") as fh:
        scipy.io.mmwrite(fh, matrix, **kwargs)
