import numpy as np
import pytest

from dbqubit import DomainError, IntegrityError
from dbqubit.blocks import decompose_desired
from dbqubit.fermiops import SparseOperator
from dbqubit.fockspace import desired_basis, enumerate_sector
from dbqubit.hubbard import HubbardParams, build_hamiltonian
from dbqubit.spectra import block_spectra, eigen_spectrum, verify_block_diagonal

import oracles


def test_zero_matrix():
    H = build_hamiltonian(HubbardParams.zeros(1), desired_basis(1))
    spec = eigen_spectrum(H)
    assert list(spec.eigenvalues) == [0, 0, 0, 0]
    assert spec.residual_bound == 0


def test_tight_binding_pair():
    t = 0.25
    H = build_hamiltonian(HubbardParams.uniform(1, t_intra=t), enumerate_sector(1, 1))
    assert np.allclose(eigen_spectrum(H).eigenvalues, [-t, -t, t, t], atol=1e-14)


def test_n1_preset_spectrum():
    H = build_hamiltonian(HubbardParams.uniform(1, t_intra=0.308, u=0.583), desired_basis(1))
    spec = eigen_spectrum(H)
    assert np.allclose(spec.eigenvalues, [0.275, 0.275, 0.891, 0.891], atol=1e-10)
    assert spec.residual_bound <= 1e-10
    assert spec.basis_id.startswith("desired(N=1")


def test_dense_cap():
    H = build_hamiltonian(HubbardParams.zeros(2), enumerate_sector(2, 4))
    with pytest.raises(DomainError, match="block decomposition"):
        eigen_spectrum(H, max_dim=10)


def test_asymmetric_rejected():
    b = desired_basis(1)
    op = SparseOperator([0], [1], [1.0], b, b)
    with pytest.raises(IntegrityError):
        eigen_spectrum(op)


def test_non_square_rejected():
    op = SparseOperator([], [], [], enumerate_sector(1, 2), enumerate_sector(1, 3))
    with pytest.raises(DomainError):
        eigen_spectrum(op)


@pytest.mark.parametrize("seed", range(3))
def test_block_diagonal_n2_random(seed):
    d = oracles.random_params(np.random.default_rng(seed), 2)
    H = build_hamiltonian(HubbardParams(d["e"], d["t"], d["u"], d["w"], d["v"]), desired_basis(2))
    ok, worst = verify_block_diagonal(H, decompose_desired(2))
    assert ok and worst == 0.0


def test_injected_spin_flip_detected():
    H = build_hamiltonian(HubbardParams.uniform(1, t_intra=0.3, u=0.5), desired_basis(1))
    dec = decompose_desired(1)
    # states 7 (hole R-down) and 11 (hole R-up) sit in different blocks
    rows = np.append(H.rows, [0, 1])
    cols = np.append(H.cols, [1, 0])
    vals = np.append(H.values, [0.05, 0.05])
    bad = SparseOperator(rows, cols, vals, H.row_basis, H.col_basis)
    ok, worst = verify_block_diagonal(bad, dec)
    assert not ok and worst == 0.05
    with pytest.raises(IntegrityError):
        block_spectra(bad, dec)


def test_basis_mismatch():
    H = build_hamiltonian(HubbardParams.zeros(1), enumerate_sector(1, 2))
    with pytest.raises(DomainError):
        verify_block_diagonal(H, decompose_desired(1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_block_spectra_equal_whole_sector(n):
    d = oracles.random_params(np.random.default_rng(40 + n), n)
    H = build_hamiltonian(HubbardParams(d["e"], d["t"], d["u"], d["w"], d["v"]), desired_basis(n))
    whole = eigen_spectrum(H).eigenvalues
    parts = block_spectra(H, decompose_desired(n))
    assert len(parts) == 2 ** n
    merged = np.sort(np.concatenate([s.eigenvalues for s in parts.values()]))
    assert np.max(np.abs(merged - whole)) <= 1e-10


def test_w_double_count_shifts_n1_by_w():
    """W enters the N=1 desired diagonal as 2W once, 4W doubled: spectrum shifts by 2W."""
    base = HubbardParams.uniform(1, t_intra=0.308, u=0.583, w_intra=0.07)
    single = eigen_spectrum(build_hamiltonian(base, desired_basis(1))).eigenvalues
    double = eigen_spectrum(build_hamiltonian(base.with_(w_double_count=True),
                                              desired_basis(1))).eigenvalues
    assert np.allclose(double - single, 2 * 0.07, atol=1e-12)
    assert np.allclose(single, [0.583 - 0.308 + 0.14] * 2 + [0.583 + 0.308 + 0.14] * 2)


@pytest.mark.parametrize("seed", range(5))
def test_n1_degeneracy_two_plus_two(seed):
    rng = np.random.default_rng(seed)
    e, t, u, w = rng.uniform(-1, 1, 4)
    params = HubbardParams.uniform(1, e_onsite=e, t_intra=t, u=u, w_intra=w)
    ev = eigen_spectrum(build_hamiltonian(params, desired_basis(1))).eigenvalues
    assert abs(ev[0] - ev[1]) < 1e-12 and abs(ev[2] - ev[3]) < 1e-12
    assert ev[2] - ev[1] > 1e-6
