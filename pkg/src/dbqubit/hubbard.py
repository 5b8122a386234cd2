"""Extended Hubbard Hamiltonian for dangling-bond pair arrays.

    H = sum_{i,s} E_i n_is
        - sum_{<ij>,s} T_ij (c+_is c_js + c+_js c_is)
        + sum_i U_i n_iu n_id
        + sum_{<ij>,s,s'} W_isjs' n_is n_js'
        + 1/2 sum_{i<j,s} V_ij (n_is - n_js)

Sites are numbered ``2p + side``; all energies are in eV.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import CodomainIncompleteError, DomainError
from .fermiops import SparseOperator, apply_annihilation, apply_creation
from .fockspace import SectorBasis, check_n_pairs, format_state

__all__ = [
    "HBAR_EV_S",
    "PhysicalConstants",
    "DBP_CONSTANTS",
    "HubbardParams",
    "DBGeometry",
    "linear_array_geometry",
    "params_from_geometry",
    "default_params",
    "load_params_json",
    "build_hamiltonian",
    "energy_to_angular_rate",
]

HBAR_EV_S = 6.582119569e-16


@dataclass(frozen=True)
class PhysicalConstants:
    """Quoted dangling-bond pair values. None of them is computed here."""

    t_intra_ev: float = 0.308
    t_intra_distance: float = 3.84
    u_coulomb_ev: float = 0.583
    t_inter_ev: float = 0.128e-4
    t_inter_distance: float = 17.92
    rate_max_thz: float = 467.0
    rate_max_distance: float = 3.84
    rate_min_thz: float = 0.1
    rate_min_distance: float = 16.0
    p_conduction_loss: float = 1.453e-8
    p_donor_loss: float = 1.11e-5
    min_pair_distance: float = 3.84
    max_pair_distance: float = 16.0


DBP_CONSTANTS = PhysicalConstants()


def _as_site_vector(value, n_sites: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n_sites, float(arr))
    if arr.shape != (n_sites,):
        raise DomainError(f"{name} must have shape ({n_sites},), got {arr.shape}")
    return arr


def _as_site_matrix(value, n_sites: int, name: str) -> np.ndarray:
    if value is None:
        return np.zeros((n_sites, n_sites))
    arr = np.asarray(value, dtype=float)
    if arr.shape != (n_sites, n_sites):
        raise DomainError(f"{name} must have shape ({n_sites}, {n_sites}), got {arr.shape}")
    return arr


@dataclass(frozen=True)
class HubbardParams:
    """Coefficients of the extended Hubbard model on ``n_sites = 2N`` sites.

    ``w_tensor`` (shape ``(n_sites, 2, n_sites, 2)``) overrides the
    spin-independent ``w_matrix`` when given.  Each unordered site pair enters
    the W term once; ``w_double_count`` counts both orders instead.
    """

    e_onsite: np.ndarray
    t_matrix: np.ndarray
    u_onsite: np.ndarray
    w_matrix: np.ndarray | None = None
    v_matrix: np.ndarray | None = None
    w_tensor: np.ndarray | None = None
    w_double_count: bool = False

    def __post_init__(self):
        t = np.asarray(self.t_matrix, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] % 2:
            raise DomainError(f"t_matrix must be square with an even size, got {t.shape}")
        n = t.shape[0]
        fields = {
            "t_matrix": t,
            "e_onsite": _as_site_vector(self.e_onsite, n, "e_onsite"),
            "u_onsite": _as_site_vector(self.u_onsite, n, "u_onsite"),
            "w_matrix": _as_site_matrix(self.w_matrix, n, "w_matrix"),
            "v_matrix": _as_site_matrix(self.v_matrix, n, "v_matrix"),
        }
        for name in ("t_matrix", "w_matrix"):
            m = fields[name]
            if not np.array_equal(m, m.T):
                raise DomainError(f"{name} must be symmetric")
            if np.any(np.diag(m) != 0):
                raise DomainError(f"{name} must have a zero diagonal")
        if np.any(np.tril(fields["v_matrix"]) != 0):
            raise DomainError("v_matrix is read for i < j only; lower triangle must be zero")
        if self.w_tensor is not None:
            wt = np.asarray(self.w_tensor, dtype=float)
            if wt.shape != (n, 2, n, 2):
                raise DomainError(f"w_tensor must have shape ({n}, 2, {n}, 2), got {wt.shape}")
            if not np.array_equal(wt, wt.transpose(2, 3, 0, 1)):
                raise DomainError("w_tensor must satisfy W[i,s,j,t] == W[j,t,i,s]")
            if any(np.any(wt[i, :, i, :] != 0) for i in range(n)):
                raise DomainError("w_tensor must vanish for i == j")
            fields["w_tensor"] = wt
        for name, arr in fields.items():
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} has non-finite entries")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n_sites(self) -> int:
        return self.t_matrix.shape[0]

    @property
    def n_pairs(self) -> int:
        return self.n_sites // 2

    @classmethod
    def zeros(cls, n_pairs: int) -> "HubbardParams":
        check_n_pairs(n_pairs)
        n = 2 * n_pairs
        return cls(np.zeros(n), np.zeros((n, n)), np.zeros(n))

    @classmethod
    def uniform(
        cls,
        n_pairs: int,
        e_onsite: float = 0.0,
        t_intra: float = 0.0,
        t_inter: float = 0.0,
        u: float = 0.0,
        w_intra: float = 0.0,
        w_inter: float = 0.0,
        w_double_count: bool = False,
    ) -> "HubbardParams":
        """Same value on every intra-pair bond and on every inter-pair bond."""
        check_n_pairs(n_pairs)
        n = 2 * n_pairs
        same_pair = np.equal.outer(np.arange(n) // 2, np.arange(n) // 2)
        off = ~np.eye(n, dtype=bool)
        t = np.where(same_pair, t_intra, t_inter) * off
        w = np.where(same_pair, w_intra, w_inter) * off
        return cls(np.full(n, e_onsite), t, np.full(n, u), w, None,
                   w_double_count=w_double_count)

    def with_(self, **changes) -> "HubbardParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class DBGeometry:
    """Site positions in angstrom and the pairing into qubits.

    ``pairs[p] = (a, b)`` puts position ``a`` on the Left site and ``b`` on
    the Right site of pair ``p``.
    """

    positions: np.ndarray
    pairs: tuple[tuple[int, int], ...]
    constants: PhysicalConstants = field(default=DBP_CONSTANTS, repr=False)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise DomainError(f"positions must be a list of (x, y), got shape {pos.shape}")
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        flat = sorted(i for pair in pairs for i in pair)
        if flat != list(range(len(pos))):
            raise DomainError("every site must belong to exactly one pair")
        if not pairs:
            raise DomainError("geometry needs at least one pair")
        c = self.constants
        for a, b in pairs:
            d = round(float(np.linalg.norm(pos[a] - pos[b])), 2)
            if not c.min_pair_distance <= d <= c.max_pair_distance:
                raise DomainError(
                    f"pair ({a}, {b}) separation {d} A outside "
                    f"[{c.min_pair_distance}, {c.max_pair_distance}] A"
                )
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "pairs", pairs)

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    def site_positions(self) -> np.ndarray:
        """Positions reordered to model site order ``2p + side``."""
        return self.positions[[i for pair in self.pairs for i in pair]]

    def distances(self) -> np.ndarray:
        pos = self.site_positions()
        return np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)


def linear_array_geometry(
    n_pairs: int, intra: float = 3.84, spacing: float = 17.92
) -> DBGeometry:
    """Pairs stacked side by side, ``spacing`` apart, each pair ``intra`` wide."""
    check_n_pairs(n_pairs)
    pos = []
    for p in range(n_pairs):
        pos += [(0.0, p * spacing), (intra, p * spacing)]
    return DBGeometry(np.array(pos), tuple((2 * p, 2 * p + 1) for p in range(n_pairs)))


def params_from_geometry(
    geometry: DBGeometry,
    preset: PhysicalConstants = DBP_CONSTANTS,
    overrides: Mapping[str, Any] | None = None,
) -> HubbardParams:
    """Tunneling table lookup by rounded distance plus explicit overrides.

    Recognized override keys: ``t_pairs`` ({(i, j): T} in model site order),
    ``t_by_distance`` ({distance: T}), ``e_onsite``, ``u_onsite``,
    ``w_matrix``, ``w_tensor``, ``v_matrix``, ``w_double_count``.
    """
    overrides = dict(overrides or {})
    t_pairs = {tuple(sorted(k)): float(v) for k, v in overrides.get("t_pairs", {}).items()}
    t_by_distance = {round(float(k), 2): float(v)
                     for k, v in overrides.get("t_by_distance", {}).items()}
    dist = np.round(geometry.distances(), 2)
    n = 2 * geometry.n_pairs
    t = np.zeros((n, n))
    missing = []
    for i in range(n):
        for j in range(i + 1, n):
            d = float(dist[i, j])
            if (i, j) in t_pairs:
                value = t_pairs[(i, j)]
            elif d in t_by_distance:
                value = t_by_distance[d]
            elif i // 2 == j // 2 and d == preset.t_intra_distance:
                value = preset.t_intra_ev
            elif i // 2 != j // 2 and d >= preset.t_inter_distance:
                value = preset.t_inter_ev
            else:
                missing.append(f"sites ({i}, {j}) at {d} A")
                continue
            t[i, j] = t[j, i] = value
    if missing:
        raise DomainError("unparameterized distance: " + "; ".join(missing))
    return HubbardParams(
        e_onsite=overrides.get("e_onsite", 0.0),
        t_matrix=t,
        u_onsite=overrides.get("u_onsite", preset.u_coulomb_ev),
        w_matrix=overrides.get("w_matrix"),
        v_matrix=overrides.get("v_matrix"),
        w_tensor=overrides.get("w_tensor"),
        w_double_count=bool(overrides.get("w_double_count", False)),
    )


def default_params(n_pairs: int) -> HubbardParams:
    """Preset parameters on :func:`linear_array_geometry`."""
    return params_from_geometry(linear_array_geometry(n_pairs))


def load_params_json(source: str | Path | Mapping[str, Any]) -> tuple[HubbardParams, DBGeometry | None]:
    """Read parameters (and an optional geometry) from a JSON document.

    An explicit ``t_matrix`` wins; otherwise ``positions`` and ``pairs`` are
    required and tunneling comes from :func:`params_from_geometry`, with the
    remaining keys acting as overrides.  A 4-index ``w_matrix`` is taken as
    the spin-resolved tensor.
    """
    if isinstance(source, Mapping):
        doc = dict(source)
    else:
        try:
            doc = json.loads(Path(source).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read parameter file {source}: {exc}") from exc
    if not isinstance(doc, dict):
        raise DomainError("parameter document must be a JSON object")

    w = doc.get("w_matrix")
    w_tensor = None
    if w is not None and np.asarray(w).ndim == 4:
        w_tensor, w = w, None
    common = {
        "e_onsite": doc.get("e_onsite", 0.0),
        "w_matrix": w,
        "w_tensor": w_tensor,
        "v_matrix": doc.get("v_matrix"),
        "w_double_count": bool(doc.get("w_double_count", False)),
    }

    geometry = None
    if "positions" in doc or "pairs" in doc:
        if "positions" not in doc or "pairs" not in doc:
            raise DomainError("geometry needs both 'positions' and 'pairs'")
        geometry = DBGeometry(np.asarray(doc["positions"], dtype=float),
                              tuple(tuple(p) for p in doc["pairs"]))

    if "t_matrix" in doc:
        params = HubbardParams(t_matrix=doc["t_matrix"],
                               u_onsite=doc.get("u_onsite", DBP_CONSTANTS.u_coulomb_ev),
                               **common)
    elif geometry is not None:
        overrides = dict(common)
        if "u_onsite" in doc:
            overrides["u_onsite"] = doc["u_onsite"]
        if "t_by_distance" in doc:
            overrides["t_by_distance"] = doc["t_by_distance"]
        params = params_from_geometry(geometry, overrides=overrides)
    else:
        raise DomainError("parameter document needs 't_matrix' or 'positions'/'pairs'")

    if "n_pairs" in doc and int(doc["n_pairs"]) != params.n_pairs:
        raise DomainError(f"n_pairs={doc['n_pairs']} but matrices describe {params.n_pairs} pairs")
    return params, geometry


def _diagonal(params: HubbardParams, state: int) -> float:
    n = params.n_sites
    occ = np.array([(state >> k) & 1 for k in range(2 * n)], dtype=float).reshape(n, 2)
    n_site = occ.sum(axis=1)
    energy = float(params.e_onsite @ n_site)
    energy += float(params.u_onsite @ (occ[:, 0] * occ[:, 1]))
    iu = np.triu_indices(n, 1)
    if params.w_tensor is not None:
        pair_terms = np.einsum("is,isjt,jt->ij", occ, params.w_tensor, occ)
    else:
        pair_terms = params.w_matrix * np.outer(n_site, n_site)
    w_energy = float(pair_terms[iu].sum())
    energy += 2.0 * w_energy if params.w_double_count else w_energy
    diff = n_site[:, None] - n_site[None, :]
    energy += 0.5 * float((params.v_matrix * diff)[iu].sum())
    return energy


def build_hamiltonian(params: HubbardParams, basis: SectorBasis) -> SparseOperator:
    """Hamiltonian matrix on ``basis``.

    On a restricted basis (desired sector, one hole-spin block) the result
    is the projection P H P: hops leaving the basis are dropped.
    """
    if 2 * params.n_sites != basis.n_orbitals:
        raise DomainError(
            f"params describe {params.n_sites} sites but basis has {basis.n_orbitals} orbitals"
        )
    entries: dict[tuple[int, int], float] = {}
    for c, state in enumerate(basis):
        diag = _diagonal(params, state)
        if diag != 0.0:
            entries[(c, c)] = diag

    n = params.n_sites
    bonds = [(i, j, params.t_matrix[i, j]) for i in range(n) for j in range(i + 1, n)
             if params.t_matrix[i, j] != 0.0]
    for c, state in enumerate(basis):
        for i, j, t in bonds:
            for spin in (0, 1):
                a, b = 2 * i + spin, 2 * j + spin
                for src, dst in ((b, a), (a, b)):
                    hit = apply_annihilation(state, src)
                    if hit is None:
                        continue
                    s1, mid = hit
                    hit = apply_creation(mid, dst)
                    if hit is None:
                        continue
                    s2, new = hit
                    r = basis.index(new)
                    if r is None:
                        if basis.restricted:
                            continue
                        raise CodomainIncompleteError(new, basis.label,
                                                      format_state(new, basis.n_pairs))
                    entries[(r, c)] = entries.get((r, c), 0.0) - t * s1 * s2

    keys = sorted(k for k, v in entries.items() if v != 0.0)
    rows = np.array([k[0] for k in keys], dtype=np.int64)
    cols = np.array([k[1] for k in keys], dtype=np.int64)
    vals = np.array([entries[k] for k in keys], dtype=float)
    return SparseOperator(rows, cols, vals, basis, basis, label="hamiltonian")


def energy_to_angular_rate(energy_ev: float) -> float:
    """``E / hbar`` in units of 1e12 s^-1."""
    if energy_ev < 0:
        raise DomainError(f"energy must be >= 0, got {energy_ev}")
    return energy_ev / HBAR_EV_S / 1e12
