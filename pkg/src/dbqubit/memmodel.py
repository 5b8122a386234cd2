"""Classical-memory estimates for storing states and operators.

All counts are exact Python integers, so nothing overflows for large N.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Iterable

from .blocks import block_basis
from .errors import DomainError
from .fermiops import build_operator_matrix
from .fockspace import check_n_pairs, desired_basis

__all__ = [
    "MemoryModel",
    "MemoryRow",
    "MemoryReport",
    "memory_fig2",
    "memory_fig3",
    "memory_fig4",
    "memory_fig5",
    "FIGURES",
]


@dataclass(frozen=True)
class MemoryModel:
    """Byte model.

    Defaults: one complex double (16 bytes) per amplitude; a sparse triplet
    packs two 4-byte indices and one 8-byte real (20 bytes).  With
    ``bitstring_storage`` a state costs ``ceil(4N / 8)`` bytes instead of an
    amplitude.
    """

    bytes_per_amplitude: int = 16
    matrix_mode: str = "dense"
    bytes_per_triplet: int = 20
    bitstring_storage: bool = False

    def __post_init__(self):
        if self.bytes_per_amplitude <= 0 or self.bytes_per_triplet <= 0:
            raise DomainError("byte counts must be positive")
        if self.matrix_mode not in ("dense", "triplet"):
            raise DomainError(f"matrix_mode must be 'dense' or 'triplet', got {self.matrix_mode!r}")

    def state_bytes(self, n_pairs: int, count: int) -> int:
        if self.bitstring_storage:
            return count * -(-4 * n_pairs // 8)
        return count * self.bytes_per_amplitude


@dataclass(frozen=True)
class MemoryRow:
    n: int
    quantity: str
    count: int
    bytes: int
    shape: tuple[int, int] | None = None


@dataclass
class MemoryReport:
    rows: list[MemoryRow] = field(default_factory=list)

    def series(self, quantity: str) -> list[MemoryRow]:
        return [r for r in self.rows if r.quantity == quantity]

    @property
    def quantities(self) -> list[str]:
        return list(dict.fromkeys(r.quantity for r in self.rows))

    def filter(self, quantities: Iterable[str]) -> "MemoryReport":
        keep = set(quantities)
        return MemoryReport([r for r in self.rows if r.quantity in keep])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "quantity", "count", "bytes"])
        for r in self.rows:
            writer.writerow([r.n, r.quantity, r.count, r.bytes])
        return buf.getvalue()

    def write_gnuplot(self, directory: str | Path, prefix: str = "memory") -> list[Path]:
        """One ``n bytes`` two-column file per series."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for q in self.quantities:
            path = directory / f"{prefix}_{q}.dat"
            lines = [f"# n bytes ({q})"] + [f"{r.n} {r.bytes}" for r in self.series(q)]
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            paths.append(path)
        return paths


def _n_values(n_range) -> list[int]:
    if isinstance(n_range, int):
        n_range = range(1, n_range + 1)
    values = list(n_range)
    for n in values:
        check_n_pairs(n)
    return values


def _state_rows(n: int, model: MemoryModel, series: dict[str, int]) -> list[MemoryRow]:
    return [MemoryRow(n, q, c, model.state_bytes(n, c)) for q, c in series.items()]


def memory_fig2(n_range, model: MemoryModel = MemoryModel()) -> MemoryReport:
    """Full 3N-electron space, desired space and one spin block."""
    report = MemoryReport()
    for n in _n_values(n_range):
        report.rows += _state_rows(n, model, {
            "full": comb(4 * n, 3 * n),
            "desired": 4 ** n,
            "block": 2 ** n,
        })
    return report


def memory_fig3(n_range, model: MemoryModel = MemoryModel()) -> MemoryReport:
    """States needed to build the Hamiltonian: all, desired-reachable, per block."""
    report = MemoryReport()
    for n in _n_values(n_range):
        report.rows += _state_rows(n, model, {
            "total_lower": comb(4 * n, 3 * n - 1),
            "desired_reachable": 3 * n * 2 ** (2 * n - 1),
            "per_block": 5 * n * 2 ** (n - 1),
        })
    return report


def memory_fig4(n_range, model: MemoryModel = MemoryModel()) -> MemoryReport:
    return memory_fig3(n_range, model).filter(["desired_reachable", "per_block"])


def _number_operator_nnz(n: int, spin_resolved: bool) -> int:
    basis = block_basis(n, "U" * n) if spin_resolved else desired_basis(n)
    diag = [0] * len(basis)
    for k in range(4 * n):
        op = build_operator_matrix("number", k, basis)
        for r, v in zip(op.rows, op.values):
            diag[r] += int(v)
    return sum(1 for d in diag if d)


def memory_fig5(
    n_range, model: MemoryModel = MemoryModel(), materialize_up_to: int = 0
) -> MemoryReport:
    """Total number operator on the desired space vs on one spin block.

    Dense mode stores ``dim**2`` amplitudes.  Triplet mode stores one
    triplet per nonzero; the operator is ``3N`` times the identity on these
    spaces, so ``nnz == dim``.  For ``N <= materialize_up_to`` the nonzeros
    are counted on the built matrices instead.
    """
    report = MemoryReport()
    for n in _n_values(n_range):
        for quantity, dim, spin in (("number_op_full", 4 ** n, False),
                                    ("number_op_block", 2 ** n, True)):
            if model.matrix_mode == "dense":
                count = dim * dim
                nbytes = count * model.bytes_per_amplitude
            else:
                count = _number_operator_nnz(n, spin) if n <= materialize_up_to else dim
                nbytes = count * model.bytes_per_triplet
            report.rows.append(MemoryRow(n, quantity, count, nbytes, (dim, dim)))
    return report


FIGURES = {2: memory_fig2, 3: memory_fig3, 4: memory_fig4, 5: memory_fig5}
