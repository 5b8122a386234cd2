"""Occupation-number basis for N dangling-bond pairs.

Each pair holds two sites (Left, Right) and each site two spin-orbitals, so
N pairs give 4N spin-orbitals.  Orbital ``k`` of pair ``p`` sits at linear
index ``4p + 2*side + spin`` and a Fock state is the integer whose bit ``k``
is the occupancy of that orbital.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterator, Sequence

from .errors import DomainError

__all__ = [
    "Side",
    "Spin",
    "SpinOrbital",
    "SectorBasis",
    "n_orbitals",
    "check_n_pairs",
    "check_state",
    "enumerate_sector",
    "full_fock_basis",
    "desired_basis",
    "sector_size",
    "electron_count",
    "pair_occupation",
    "is_desired",
    "total_sz",
    "hole_spin_pattern",
    "pattern_label",
    "format_state",
    "parse_state",
]


class Side(enum.IntEnum):
    LEFT = 0
    RIGHT = 1


class Spin(enum.IntEnum):
    UP = 0
    DOWN = 1

    @property
    def symbol(self) -> str:
        return "U" if self is Spin.UP else "D"


@dataclass(frozen=True, order=True)
class SpinOrbital:
    pair_index: int
    side: Side
    spin: Spin

    def __post_init__(self):
        if self.pair_index < 0:
            raise DomainError(f"pair_index must be >= 0, got {self.pair_index}")
        object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "spin", Spin(self.spin))

    @property
    def linear_index(self) -> int:
        return 4 * self.pair_index + 2 * int(self.side) + int(self.spin)

    @property
    def site(self) -> int:
        return 2 * self.pair_index + int(self.side)

    @classmethod
    def from_index(cls, index: int) -> "SpinOrbital":
        if index < 0:
            raise DomainError(f"orbital index must be >= 0, got {index}")
        return cls(index // 4, Side((index >> 1) & 1), Spin(index & 1))

    def __str__(self) -> str:
        side = "L" if self.side is Side.LEFT else "R"
        return f"{self.pair_index}{side}{self.spin.symbol}"


def n_orbitals(n_pairs: int) -> int:
    return 4 * n_pairs


def check_n_pairs(n_pairs: int) -> None:
    if isinstance(n_pairs, bool) or not isinstance(n_pairs, int) or n_pairs < 1:
        raise DomainError(f"n_pairs must be an integer >= 1, got {n_pairs!r}")


def check_state(state: int, n_pairs: int) -> None:
    if state < 0 or state >> n_orbitals(n_pairs):
        raise DomainError(
            f"state {state:#x} does not fit in {n_orbitals(n_pairs)} orbitals"
        )


def _spin_mask(n_pairs: int, spin: Spin) -> int:
    # Up orbitals sit on even bits, Down on odd bits.
    base = int("01" * (2 * n_pairs), 2) if n_pairs else 0
    return base if spin is Spin.UP else base << 1


def electron_count(state: int) -> int:
    return state.bit_count()


def sector_size(n_pairs: int, n_electrons: int, sz_filter: int | None = None) -> int:
    """Closed-form dimension of a (Ne[, Sz]) sector."""
    m = 2 * n_pairs
    if sz_filter is None:
        return comb(4 * n_pairs, n_electrons)
    if (n_electrons + sz_filter) % 2:
        return 0
    n_up = (n_electrons + sz_filter) // 2
    n_down = n_electrons - n_up
    if n_up < 0 or n_down < 0:
        return 0
    return comb(m, n_up) * comb(m, n_down)


@dataclass(frozen=True)
class SectorBasis:
    """Canonically ordered list of Fock states.

    ``n_electrons`` is ``None`` only for the full Fock space.  ``restricted``
    marks bases that select a subset beyond the conserved quantities (desired
    sector, hole-spin blocks, reachable sets); operators built on them are
    projections.
    """

    n_pairs: int
    n_electrons: int | None
    states: tuple[int, ...]
    sz_filter: int | None = None
    label: str = "sector"
    restricted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if any(b <= a for a, b in zip(self.states, self.states[1:])):
            raise DomainError("basis states must be strictly ascending")

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[int]:
        return iter(self.states)

    def __getitem__(self, i: int) -> int:
        return self.states[i]

    def __contains__(self, state: int) -> bool:
        return self.index(state) is not None

    @property
    def n_orbitals(self) -> int:
        return 4 * self.n_pairs

    def index(self, state: int) -> int | None:
        """Position of ``state`` in the basis or ``None`` (binary search)."""
        i = bisect.bisect_left(self.states, state)
        if i < len(self.states) and self.states[i] == state:
            return i
        return None

    @property
    def basis_id(self) -> str:
        ne = "all" if self.n_electrons is None else str(self.n_electrons)
        sz = "" if self.sz_filter is None else f",sz={self.sz_filter}"
        return f"{self.label}(N={self.n_pairs},Ne={ne}{sz},dim={len(self)})"

    def subset(self, predicate, label: str) -> "SectorBasis":
        return SectorBasis(
            self.n_pairs,
            self.n_electrons,
            tuple(s for s in self.states if predicate(s)),
            sz_filter=self.sz_filter,
            label=label,
            restricted=True,
        )


def _states_with_count(n_orb: int, n_electrons: int) -> list[int]:
    out = []
    for occ in combinations(range(n_orb), n_electrons):
        s = 0
        for k in occ:
            s |= 1 << k
        out.append(s)
    out.sort()
    return out


def enumerate_sector(
    n_pairs: int, n_electrons: int, sz_filter: int | None = None
) -> SectorBasis:
    """All ``n_electrons``-electron states over ``4*n_pairs`` orbitals.

    With ``sz_filter`` only states with ``n_up - n_down == sz_filter`` are
    kept; an unreachable value gives an empty basis.
    """
    check_n_pairs(n_pairs)
    n_orb = n_orbitals(n_pairs)
    if not 0 <= n_electrons <= n_orb:
        raise DomainError(f"n_electrons must lie in [0, {n_orb}], got {n_electrons}")
    states = _states_with_count(n_orb, n_electrons)
    if sz_filter is not None:
        states = [s for s in states if total_sz(s) == sz_filter]
    return SectorBasis(n_pairs, n_electrons, tuple(states), sz_filter=sz_filter, label="full")


def full_fock_basis(n_pairs: int) -> SectorBasis:
    """Every state of the ``2**(4N)``-dimensional Fock space."""
    check_n_pairs(n_pairs)
    return SectorBasis(n_pairs, None, tuple(range(1 << n_orbitals(n_pairs))), label="fock")


def desired_basis(n_pairs: int) -> SectorBasis:
    """The 3N-electron states in which every pair holds exactly three electrons."""
    check_n_pairs(n_pairs)
    # Built pair by pair: each pair picks one of its four orbitals as the hole.
    states = [0]
    for p in range(n_pairs):
        full = 0xF << (4 * p)
        states = [s | (full & ~(1 << (4 * p + h))) for s in states for h in range(4)]
    states.sort()
    return SectorBasis(n_pairs, 3 * n_pairs, tuple(states), label="desired", restricted=True)


def pair_occupation(state: int, pair_index: int, n_pairs: int | None = None) -> int:
    if pair_index < 0 or (n_pairs is not None and pair_index >= n_pairs):
        raise DomainError(f"pair index {pair_index} out of range")
    return ((state >> (4 * pair_index)) & 0xF).bit_count()


def is_desired(state: int, n_pairs: int) -> bool:
    check_n_pairs(n_pairs)
    check_state(state, n_pairs)
    return all(pair_occupation(state, p) == 3 for p in range(n_pairs))


def total_sz(state: int) -> int:
    """``n_up - n_down`` in units of hbar/2."""
    n = max(1, (state.bit_length() + 3) // 4)
    up = (state & _spin_mask(n, Spin.UP)).bit_count()
    return up - (state.bit_count() - up)


def hole_spin_pattern(state: int, n_pairs: int) -> tuple[Spin, ...]:
    """Spin of the single empty orbital in each pair of a desired state."""
    if not is_desired(state, n_pairs):
        raise DomainError(f"{format_state(state, n_pairs)} is not a desired state")
    pattern = []
    for p in range(n_pairs):
        holes = ~(state >> (4 * p)) & 0xF
        pattern.append(Spin((holes.bit_length() - 1) & 1))
    return tuple(pattern)


def pattern_label(pattern: Sequence[Spin]) -> str:
    return "".join(Spin(s).symbol for s in pattern)


def format_state(state: int, n_pairs: int) -> str:
    """Bitstring with orbital 0 leftmost, one 4-bit field per pair."""
    check_state(state, n_pairs)
    bits = "".join("1" if state >> k & 1 else "0" for k in range(n_orbitals(n_pairs)))
    return "|".join(bits[i:i + 4] for i in range(0, len(bits), 4))


def parse_state(text: str) -> tuple[int, int]:
    """Inverse of :func:`format_state`; returns ``(state, n_pairs)``."""
    fields = text.strip().split("|")
    if not fields or any(len(f) != 4 or set(f) - {"0", "1"} for f in fields):
        raise DomainError(f"malformed Fock state text {text!r}")
    bits = "".join(fields)
    state = sum(1 << k for k, b in enumerate(bits) if b == "1")
    return state, len(fields)
