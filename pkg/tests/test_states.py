import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdiw.linalg import InvariantError, hermitian_eigenvalues, partial_transpose
from mdiw.states import (
    BlochForm,
    PHI_PLUS,
    PSI_MINUS,
    TABLE1,
    bell_state,
    bloch_compose,
    bloch_decompose,
    gellmann_frame_ensemble,
    psi_minus,
    random_bipartite,
    random_density,
    random_separable,
    table1_ensemble,
    timeshift_state,
    werner_state,
)

seeds = st.integers(0, 2**31 - 1)


def min_pt(rho):
    return hermitian_eigenvalues(partial_transpose(rho, 1))[0]


def test_bell_vectors():
    assert np.allclose(PHI_PLUS, np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert np.allclose(psi_minus().data[1:3, 1:3], [[0.5, -0.5], [-0.5, 0.5]])
    assert abs(bell_state(3).trace() - 1) < 1e-15
    assert np.vdot(PHI_PLUS, PSI_MINUS) == 0


@pytest.mark.parametrize("p, expected", [(0, 0.25), (1 / 3, 0.0), (1, -0.5)])
def test_werner_pt_spectrum(p, expected):
    # lowest PT eigenvalue (1 - 3p)/4
    assert abs(min_pt(werner_state(p)) - expected) < 1e-12


@pytest.mark.parametrize("r", [0.0, 0.3, 0.5, 0.8, 1.0])
def test_timeshift_pt_spectrum(r):
    # PT spectrum {(1-r)/2, (1-r)/2, 1/2, r - 1/2}
    want = sorted([(1 - r) / 2, (1 - r) / 2, 0.5, r - 0.5])
    assert np.allclose(hermitian_eigenvalues(partial_transpose(timeshift_state(r), 1)), want, atol=1e-12)


@pytest.mark.parametrize("bad", [-0.1, 1.2])
def test_family_ranges(bad):
    with pytest.raises(ValueError):
        werner_state(bad)
    with pytest.raises(ValueError):
        timeshift_state(bad)


def test_table1_bloch_and_pairs():
    ens = table1_ensemble()
    assert ens.labels == ("H", "V", "D", "Dbar", "L", "R")
    assert np.allclose(ens.states[0].data, [[1, 0], [0, 0]])
    for s, r in zip(ens.states, TABLE1.values()):
        assert abs(s.purity() - 1) < 1e-12
        assert np.allclose(bloch_decompose(np.kron(s.data, np.eye(2) / 2)).b, r)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_frame_ensemble_is_complete_and_positive(d):
    ens = gellmann_frame_ensemble(d)
    assert len(ens) == d * d
    m = ens.matrices().reshape(d * d, -1)
    assert np.linalg.matrix_rank(m) == d * d
    assert all(np.linalg.eigvalsh(s.data)[0] >= -1e-12 for s in ens.states)


def test_frame_rejects_unsafe_epsilon():
    with pytest.raises(InvariantError):
        gellmann_frame_ensemble(3, eps=2.0)


@given(seeds, st.integers(2, 6))
def test_random_density_valid_and_seeded(seed, d):
    a, b = random_density(d, seed), random_density(d, seed)
    assert np.array_equal(a.data, b.data)
    assert np.linalg.eigvalsh(a.data)[0] > -1e-12


@given(seeds, st.integers(1, 5))
def test_random_separable_is_ppt(seed, terms):
    rho = random_separable(2, 3, terms, seed)
    assert min_pt(rho) > -1e-12


@given(seeds)
def test_bloch_round_trip(seed):
    rho = random_bipartite(2, 2, seed)
    f = bloch_decompose(rho)
    assert np.allclose(bloch_compose(f).data, rho.data, atol=1e-14)


def test_bloch_side_convention():
    up = np.diag([1.0, 0.0])
    f = bloch_decompose(np.kron(up, np.eye(2) / 2))
    assert np.allclose(f.b, [0, 0, 1]) and np.allclose(f.a, 0)
    assert isinstance(f, BlochForm)
