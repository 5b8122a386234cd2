"""Acceptance gate: one test per exit criterion.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line per criterion
in the terminal summary.
"""

import time
from math import comb

import numpy as np
import pytest
from scipy import sparse

from dbqubit.blocks import (
    block_basis,
    count_dimensions,
    decompose_desired,
    eq2_erratum_check,
    reachable_basis,
    support_counts,
)
from dbqubit.cli import main
from dbqubit.fermiops import build_operator_matrix, operator_shapes
from dbqubit.fockspace import desired_basis, enumerate_sector, full_fock_basis, is_desired
from dbqubit.hubbard import HubbardParams, build_hamiltonian
from dbqubit.memmodel import MemoryModel, memory_fig2, memory_fig3, memory_fig5
from dbqubit.spectra import block_spectra, eigen_spectrum, verify_block_diagonal

import oracles

SECTOR_DIMS = {1: (4, 4, 0), 2: (28, 16, 12), 3: (220, 64, 156)}
SUPPORT_ROWS = {
    1: (6, 6, 0, 5, 4, 1),
    2: (56, 48, 8, 20, 16, 4),
    3: (495, 288, 207, 60, 48, 12),
}
# N=4: closed forms only, confirmed by brute force below.
SUPPORT_N4 = (4368, 1536, 2832, 160, 128, 32)
GOLDEN_N1 = [0.275, 0.275, 0.891, 0.891]


@pytest.mark.criterion(1, "sector dimensions (closed form N<=6, enumeration N<=5)")
def test_sector_dimensions():
    start = time.perf_counter()
    for n, row in SECTOR_DIMS.items():
        assert count_dimensions(n).as_row() == row
    for n in range(1, 7):
        t = count_dimensions(n)
        assert (t.total, t.desired) == (comb(4 * n, 3 * n), 4 ** n)
        assert t.desired == 2 ** n * 2 ** n and t.total == t.desired + t.undesired
    for n in range(1, 6):
        sector = enumerate_sector(n, 3 * n)
        desired = sum(1 for s in sector if is_desired(s, n))
        assert (len(sector), desired, len(sector) - desired) == count_dimensions(n).as_row()
    assert time.perf_counter() - start < 5.0


@pytest.mark.criterion(2, "single-removal support counts, brute-force verified, N=1..4")
def test_support_counts():
    start = time.perf_counter()
    for n, row in {**SUPPORT_ROWS, 4: SUPPORT_N4}.items():
        closed = support_counts(n)
        verified = support_counts(n, verify=True)
        assert closed.as_row() == row
        assert verified.verified and verified.as_row() == row
    assert SUPPORT_N4 == (comb(16, 11), 3 * 4 * 2 ** 7, comb(16, 11) - 3 * 4 * 2 ** 7,
                         5 * 4 * 2 ** 3, 4 * 4 * 2 ** 3, 4 * 2 ** 3)
    assert time.perf_counter() - start < 30.0


@pytest.mark.criterion(3, "binomial vs closed-form support count (equal only at N=1)")
def test_binomial_vs_closed_form():
    for n in range(1, 5):
        r = eq2_erratum_check(n)
        assert r.equal == (n == 1)
        assert r.consistent
    assert [n for n in range(1, 41) if eq2_erratum_check(n, verify=False).equal] == [1]
    for n in (2, 3):
        assert eq2_erratum_check(n).difference == SUPPORT_ROWS[n][2]


def _check_algebra(n_pairs):
    basis = full_fock_basis(n_pairs)
    n_orb = 4 * n_pairs
    dim = len(basis)

    def mat(kind, k):
        return build_operator_matrix(kind, k, basis, basis).tocsr().astype(np.int64)

    c = [mat("annihilation", k) for k in range(n_orb)]
    cd = [mat("creation", k) for k in range(n_orb)]
    eye = sparse.identity(dim, dtype=np.int64, format="csr")
    for i in range(n_orb):
        num = mat("number", i)
        assert (cd[i] @ c[i] != num).nnz == 0
        for j in range(n_orb):
            anti = c[i] @ cd[j] + cd[j] @ c[i]
            assert (anti != (eye if i == j else 0 * eye)).nnz == 0
            assert (c[i] @ c[j] + c[j] @ c[i]).count_nonzero() == 0


@pytest.mark.criterion(4, "canonical anticommutation relations, N=1 (16-dim) and N=2 (256-dim)")
def test_fermionic_algebra():
    start = time.perf_counter()
    _check_algebra(1)
    _check_algebra(2)
    assert time.perf_counter() - start < 5.0


def _random_params(rng, n):
    d = oracles.random_params(rng, n)
    return HubbardParams(d["e"], d["t"], d["u"], d["w"], d["v"])


@pytest.mark.criterion(5, "Hamiltonian symmetric, sector-preserving, hole-spin block diagonal")
def test_hamiltonian_structure():
    rng = np.random.default_rng(2024)
    for n in (1, 2, 3):
        full = enumerate_sector(n, 3 * n)
        desired = desired_basis(n)
        decomposition = decompose_desired(n)
        idx = [full.index(s) for s in desired]
        for _ in range(10):
            params = _random_params(rng, n)
            # Unrestricted basis: any hop leaving the sector would raise.
            H_full = build_hamiltonian(params, full)
            csr = H_full.tocsr()
            assert (csr != csr.T).nnz == 0
            H = build_hamiltonian(params, desired)
            assert (H.tocsr() != H.tocsr().T).nnz == 0
            assert np.array_equal(H.toarray(), H_full.toarray()[np.ix_(idx, idx)])
            ok, worst = verify_block_diagonal(H, decomposition, tol=0.0)
            assert ok and worst == 0.0


@pytest.mark.criterion(6, "N=1 spectrum oracle and block-wise vs whole-sector spectra")
def test_spectrum_oracle():
    T, U = 0.308, 0.583
    # Hand-assembled in canonical order (holes R-down, R-up, L-down, L-up):
    # diagonal 3*E_os + U + 2W with E_os = W = 0, spin-conserving hops couple
    # R-up<->L-up and R-down<->L-down holes.
    hand = np.array([[U, 0, T, 0], [0, U, 0, T], [T, 0, U, 0], [0, T, 0, U]])
    golden = np.linalg.eigvalsh(hand)
    assert np.max(np.abs(golden - GOLDEN_N1)) <= 1e-10
    params = HubbardParams(np.zeros(2), [[0, T], [T, 0]], [U, U])
    spec = eigen_spectrum(build_hamiltonian(params, desired_basis(1)))
    assert np.max(np.abs(spec.eigenvalues - golden)) <= 1e-10
    assert spec.residual_bound <= 1e-10

    rng = np.random.default_rng(6)
    for n in (1, 2, 3):
        for params in (HubbardParams.uniform(n, t_intra=T, t_inter=0.128e-4, u=U),
                       _random_params(rng, n)):
            H = build_hamiltonian(params, desired_basis(n))
            whole = eigen_spectrum(H).eigenvalues
            parts = block_spectra(H, decompose_desired(n))
            merged = np.sort(np.concatenate([p.eigenvalues for p in parts.values()]))
            assert np.max(np.abs(merged - whole)) <= 1e-10


@pytest.mark.criterion(7, "operator shapes match support counts and materialized matrices")
def test_operator_shapes():
    expected = {
        1: ((4, 4), (6, 4), (2, 2), (5, 2)),
        2: ((16, 16), (48, 16), (4, 4), (20, 4)),
        3: ((64, 64), (288, 64), (8, 8), (60, 8)),
    }
    for n, (num, ann, num_s, ann_s) in expected.items():
        plain, spin = operator_shapes(n, False), operator_shapes(n, True)
        assert (plain.number, plain.annihilation, plain.creation) == (num, ann, ann[::-1])
        assert (spin.number, spin.annihilation, spin.creation) == (num_s, ann_s, ann_s[::-1])

        desired = desired_basis(n)
        reach = reachable_basis(desired)
        full_upper = enumerate_sector(n, 3 * n)
        rows = [full_upper.index(s) for s in desired]
        for k in range(4 * n):
            c = build_operator_matrix("annihilation", k, desired, reach)
            cd = c.transpose()
            nk = build_operator_matrix("number", k, desired)
            assert (c.shape, cd.shape, nk.shape) == (ann, ann[::-1], num)
            # Restricted c-dagger equals the desired rows of the unrestricted one.
            cd_full = build_operator_matrix("creation", k, reach, full_upper).toarray()
            assert np.array_equal(cd.toarray(), cd_full[rows])
            assert np.array_equal(cd.toarray() @ c.toarray(), nk.toarray())
        for pattern, _ in decompose_desired(n):
            block = block_basis(n, pattern)
            breach = reachable_basis(block)
            for k in range(4 * n):
                c = build_operator_matrix("annihilation", k, block, breach)
                nk = build_operator_matrix("number", k, block)
                assert (c.shape, c.transpose().shape, nk.shape) == (ann_s, ann_s[::-1], num_s)
                assert np.array_equal(c.toarray().T @ c.toarray(), nk.toarray())


@pytest.mark.criterion(8, "memory model exact to N=20, 4^N ratio, monotone, dominated")
def test_memory_model():
    ns = range(1, 21)
    fig2 = {(r.n, r.quantity): r for r in memory_fig2(ns).rows}
    fig3 = {(r.n, r.quantity): r for r in memory_fig3(ns).rows}
    fig5 = {(r.n, r.quantity): r for r in memory_fig5(ns).rows}
    bpa = MemoryModel().bytes_per_amplitude
    for n in ns:
        closed2 = {"full": comb(4 * n, 3 * n), "desired": 4 ** n, "block": 2 ** n}
        closed3 = {"total_lower": comb(4 * n, 3 * n - 1),
                   "desired_reachable": 3 * n * 2 ** (2 * n - 1),
                   "per_block": 5 * n * 2 ** (n - 1)}
        for q, c in closed2.items():
            assert fig2[n, q].count == c and fig2[n, q].bytes == c * bpa
        for q, c in closed3.items():
            assert fig3[n, q].count == c and fig3[n, q].bytes == c * bpa
        assert fig5[n, "number_op_full"].bytes == 4 ** (2 * n) * bpa
        assert fig5[n, "number_op_full"].bytes == 4 ** n * fig5[n, "number_op_block"].bytes
    for table, quantities in ((fig2, ("full", "desired", "block")),
                              (fig3, ("total_lower", "desired_reachable", "per_block")),
                              (fig5, ("number_op_full", "number_op_block"))):
        for q in quantities:
            series = [table[n, q].bytes for n in ns]
            assert all(a < b for a, b in zip(series, series[1:])), q
    for n in range(2, 21):
        assert fig2[n, "block"].bytes < fig2[n, "desired"].bytes < fig2[n, "full"].bytes
        assert fig3[n, "per_block"].bytes < fig3[n, "total_lower"].bytes
        assert fig5[n, "number_op_block"].bytes < fig5[n, "number_op_full"].bytes
    ratios = [fig2[n, "desired"].count / fig2[n, "full"].count for n in ns]
    assert all(a > b for a, b in zip(ratios[1:], ratios[2:]))
    for n in range(1, 5):
        brute = support_counts(n, verify=True)
        assert (fig3[n, "desired_reachable"].count, fig3[n, "per_block"].count) == \
            (brute.desired_reachable, brute.per_block)


@pytest.mark.criterion(9, "CLI artifacts are byte-identical across runs")
def test_determinism(tmp_path):
    commands = [
        ["dims", "--qubits", "3"],
        ["blocks", "--qubits", "4", "--verify"],
        ["support", "--qubits", "3", "--verify"],
        ["hamiltonian", "--qubits", "2", "--sector", "full"],
        ["spectrum", "--qubits", "3", "--per-block"],
        ["memory", "--qubits", "20", "--figure", "5", "--matrix-mode", "triplet"],
        ["export", "--qubits", "3", "--kind", "creation", "--orbital", "7"],
    ]
    for i, argv in enumerate(commands):
        a, b = tmp_path / f"{i}a", tmp_path / f"{i}b"
        assert main([*argv, "--out", str(a)]) == 0
        assert main([*argv, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes(), argv
