"""Desired/undesired split, hole-spin blocks and annihilation-support counts."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product
from math import comb

from .errors import DomainError, IntegrityError
from .fermiops import apply_annihilation
from .fockspace import (
    SectorBasis,
    Spin,
    check_n_pairs,
    desired_basis,
    hole_spin_pattern,
    pattern_label,
)

__all__ = [
    "DimensionTable",
    "BlockDecomposition",
    "SupportCounts",
    "SupportFormulaReport",
    "DEFAULT_VERIFY_CAP",
    "count_dimensions",
    "decompose_desired",
    "block_basis",
    "reachable_basis",
    "reachable_states",
    "support_counts",
    "brute_force_support",
    "eq2_erratum_check",
]

DEFAULT_VERIFY_CAP = 4


@dataclass(frozen=True)
class DimensionTable:
    n_pairs: int
    total: int
    desired: int
    undesired: int

    def as_row(self) -> tuple[int, int, int]:
        return self.total, self.desired, self.undesired


def count_dimensions(n_pairs: int) -> DimensionTable:
    """Sizes of the 3N-electron space and its desired/undesired parts."""
    check_n_pairs(n_pairs)
    total = comb(4 * n_pairs, 3 * n_pairs)
    desired = 2 ** n_pairs * 2 ** n_pairs
    return DimensionTable(n_pairs, total, desired, total - desired)


@dataclass(frozen=True)
class BlockDecomposition:
    """Desired sector grouped by hole-spin pattern.

    Blocks are ordered by pattern (Up before Down, pair 0 first); states
    within a block keep canonical order.
    """

    n_pairs: int
    blocks: dict[tuple[Spin, ...], tuple[int, ...]]

    def __iter__(self):
        return iter(self.blocks.items())

    def __len__(self) -> int:
        return len(self.blocks)

    def labels(self) -> list[str]:
        return [pattern_label(p) for p in self.blocks]

    def pattern_of(self) -> dict[int, tuple[Spin, ...]]:
        return {s: pat for pat, states in self.blocks.items() for s in states}


def decompose_desired(n_pairs: int) -> BlockDecomposition:
    check_n_pairs(n_pairs)
    grouped = defaultdict(list)
    for state in desired_basis(n_pairs):
        grouped[hole_spin_pattern(state, n_pairs)].append(state)
    blocks = {pat: tuple(grouped[pat]) for pat in product(Spin, repeat=n_pairs)}
    return BlockDecomposition(n_pairs, blocks)


def block_basis(n_pairs: int, pattern: tuple[Spin, ...] | str) -> SectorBasis:
    """Desired states whose hole spins match ``pattern`` (e.g. ``"UD"``)."""
    if isinstance(pattern, str):
        symbols = {"U": Spin.UP, "D": Spin.DOWN}
        if set(pattern.upper()) - set(symbols):
            raise DomainError(f"pattern must be made of U/D, got {pattern!r}")
        pattern = tuple(symbols[ch] for ch in pattern.upper())
    if len(pattern) != n_pairs:
        raise DomainError(f"pattern length {len(pattern)} != n_pairs {n_pairs}")
    pattern = tuple(Spin(s) for s in pattern)
    states = decompose_desired(n_pairs).blocks[pattern]
    return SectorBasis(n_pairs, 3 * n_pairs, states,
                       label=f"block:{pattern_label(pattern)}", restricted=True)


def reachable_states(states) -> set[int]:
    """Distinct states reached by one annihilation from any of ``states``."""
    out = set()
    for s in states:
        for k in range(s.bit_length()):
            hit = apply_annihilation(s, k)
            if hit is not None:
                out.add(hit[1])
    return out


def reachable_basis(source: SectorBasis) -> SectorBasis:
    """Canonical basis of the single-annihilation image of ``source``."""
    ne = None if source.n_electrons is None else source.n_electrons - 1
    label = "reachable" if source.label == "desired" else f"reachable:{source.label}"
    return SectorBasis(source.n_pairs, ne, tuple(sorted(reachable_states(source))),
                       label=label, restricted=True)


@dataclass(frozen=True)
class SupportCounts:
    n_pairs: int
    total_lower: int
    desired_reachable: int
    undesired_lower: int
    per_block: int
    shared: int
    unshared: int
    verified: bool = False
    sharing_degree: dict[int, int] = field(default_factory=dict, compare=False)

    def as_row(self) -> tuple[int, ...]:
        return (self.total_lower, self.desired_reachable, self.undesired_lower,
                self.per_block, self.shared, self.unshared)


def _closed_form_support(n: int) -> SupportCounts:
    total_lower = comb(4 * n, 3 * n - 1)
    reach = 3 * n * 2 ** (2 * n - 1)
    per_block = 5 * n * 2 ** (n - 1)
    shared = 4 * n * 2 ** (n - 1)
    unshared = n * 2 ** (n - 1)
    return SupportCounts(n, total_lower, reach, total_lower - reach, per_block, shared, unshared)


def brute_force_support(n_pairs: int) -> SupportCounts:
    """Every support count recomputed by explicit annihilation reachability.

    ``per_block``/``shared``/``unshared`` must agree across blocks; a block
    that disagrees raises :class:`IntegrityError`.  ``sharing_degree`` maps
    "number of blocks reaching a state" to how many states have it.
    """
    check_n_pairs(n_pairs)
    n_orb = 4 * n_pairs
    total_lower = sum(1 for _ in _combinations_count(n_orb, 3 * n_pairs - 1))
    decomposition = decompose_desired(n_pairs)
    reached_by = defaultdict(set)
    per_block_sets = {}
    for pattern, states in decomposition:
        reach = reachable_states(states)
        per_block_sets[pattern] = reach
        for s in reach:
            reached_by[s].add(pattern)
    desired_reachable = len(reached_by)

    per_block = {len(r) for r in per_block_sets.values()}
    shared = {sum(1 for s in r if len(reached_by[s]) >= 2) for r in per_block_sets.values()}
    unshared = {sum(1 for s in r if len(reached_by[s]) == 1) for r in per_block_sets.values()}
    if len(per_block) != 1 or len(shared) != 1 or len(unshared) != 1:
        raise IntegrityError(
            f"blocks disagree for N={n_pairs}: per_block={sorted(per_block)}, "
            f"shared={sorted(shared)}, unshared={sorted(unshared)}"
        )
    degree = defaultdict(int)
    for patterns in reached_by.values():
        degree[len(patterns)] += 1
    return SupportCounts(
        n_pairs, total_lower, desired_reachable, total_lower - desired_reachable,
        per_block.pop(), shared.pop(), unshared.pop(), verified=True,
        sharing_degree=dict(sorted(degree.items())),
    )


def _combinations_count(n: int, k: int):
    # Explicit walk instead of comb() so the total is brute force too.
    if k < 0 or k > n:
        return
    if k == 0:
        yield 0
        return
    state = (1 << k) - 1
    limit = 1 << n
    while state < limit:
        yield state
        # Gosper's hack: next integer with the same popcount.
        low = state & -state
        ripple = state + low
        state = (((ripple ^ state) >> 2) // low) | ripple


def support_counts(n_pairs: int, verify: bool = False,
                   verify_cap: int = DEFAULT_VERIFY_CAP) -> SupportCounts:
    """Closed-form support counts, optionally checked by brute force."""
    check_n_pairs(n_pairs)
    closed = _closed_form_support(n_pairs)
    if not verify:
        return closed
    if n_pairs > verify_cap:
        raise DomainError(f"brute-force verification capped at N={verify_cap}; got N={n_pairs}")
    brute = brute_force_support(n_pairs)
    if brute.as_row() != closed.as_row():
        raise IntegrityError(
            f"support counts for N={n_pairs}: closed form {closed.as_row()} "
            f"!= brute force {brute.as_row()}"
        )
    return brute


@dataclass(frozen=True)
class SupportFormulaReport:
    n_pairs: int
    binomial: int
    closed_form: int
    difference: int
    undesired_lower: int
    reachable_brute: int | None = None

    @property
    def equal(self) -> bool:
        return self.difference == 0

    @property
    def consistent(self) -> bool | None:
        """Closed form equals the brute-force reachable count (None if not run)."""
        if self.reachable_brute is None:
            return None
        return self.closed_form == self.reachable_brute


def eq2_erratum_check(n_pairs: int, verify: bool | None = None) -> SupportFormulaReport:
    """Compare C(4N, 3N-1) against 3N 2^(2N-1).

    The binomial is the whole (3N-1)-electron space; the closed form only
    counts the part reachable from the desired sector.  With ``verify``
    (default: N within the brute-force cap) the reachable count is
    recomputed by enumeration.
    """
    check_n_pairs(n_pairs)
    binomial = comb(4 * n_pairs, 3 * n_pairs - 1)
    closed = 3 * n_pairs * 2 ** (2 * n_pairs - 1)
    if verify is None:
        verify = n_pairs <= DEFAULT_VERIFY_CAP
    brute = len(reachable_states(desired_basis(n_pairs))) if verify else None
    return SupportFormulaReport(n_pairs, binomial, closed, binomial - closed, binomial - closed, brute)
