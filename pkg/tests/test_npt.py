from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdiw.linalg import DensityMatrix, hermitian_eigenvalues, partial_transpose
from mdiw.npt import (
    BOUNDARY,
    NPT,
    PPT,
    build_witness,
    classify,
    coefficients,
    elementary_symmetric,
    newton_girard,
    npt_verdict,
    tomography_cost,
    universal_det,
    universal_witness,
    witness_cost,
    witness_expectation,
)
from mdiw.states import psi_minus, random_bipartite, random_separable, werner_state

seeds = st.integers(0, 2**31 - 1)


def pt_spectrum(rho):
    return hermitian_eigenvalues(partial_transpose(rho, 1))


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=8))
def test_elementary_symmetric_vs_poly(lam):
    # np.poly gives prod (x - l) = sum (-1)^k e_k x^{n-k}
    c = np.poly(lam)
    e = elementary_symmetric(lam)
    signs = (-1.0) ** np.arange(len(lam) + 1)
    assert np.allclose(e, signs * c, atol=1e-9)


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=6))
def test_newton_girard_inverts_power_sums(lam):
    lam = np.array(lam)
    p = [np.sum(lam**i) for i in range(1, len(lam) + 1)]
    assert np.allclose(newton_girard(p, len(lam)), elementary_symmetric(lam), atol=1e-9)


def test_singlet_ladder_frozen():
    a = coefficients(psi_minus(), "eigen").coefficients
    assert np.allclose(a, [1, 1, 0, -0.25, -0.0625], atol=1e-14)
    assert npt_verdict(psi_minus()) == (NPT, 3)


def test_maximally_mixed_coefficients():
    rho = DensityMatrix(np.eye(9) / 9, (3, 3))
    rep = coefficients(rho)
    assert np.allclose(rep.coefficients, [comb(9, k) / 9**k for k in range(10)], atol=1e-15)
    assert rep.verdict == PPT


@pytest.mark.parametrize("method", ["eigen", "power_sum", "witness"])
def test_methods_agree_two_qubits(method):
    rho = random_bipartite(2, 2, 3)
    ref = elementary_symmetric(pt_spectrum(rho), 4)
    assert np.allclose(coefficients(rho, method, upto=4).coefficients, ref, atol=1e-12)


def test_witness_path_limits():
    with pytest.raises(ValueError):
        coefficients(random_bipartite(2, 2, 0), "witness", upto=5)
    with pytest.raises(MemoryError):
        build_witness(4, 3, 3)
    with pytest.raises(ValueError):
        build_witness(5, 2, 2)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2)])
def test_witness_expectation_equals_symmetric_polynomial(k, dims):
    rho = random_bipartite(*dims, seed=11)
    w = build_witness(k, *dims)
    assert abs(witness_expectation(w, rho, k) - elementary_symmetric(pt_spectrum(rho), k)[k]) < 1e-12


def test_witnesses_are_state_independent_hermitian():
    w = universal_witness()
    assert w.order == 256
    assert np.allclose(w.data, w.data.conj().T)
    # Tr W = e_4 of the PT spectrum of the (unnormalized) identity: four ones
    assert abs(w.trace() - 1) < 1e-12


@pytest.mark.parametrize(
    "rho, want",
    [
        (DensityMatrix(np.eye(4) / 4, (2, 2)), 1 / 256),
        (psi_minus(), -1 / 16),
        (werner_state(0.5), 1.5**3 * -0.5 / 256),
    ],
)
def test_universal_det_examples(rho, want):
    assert abs(universal_det(rho) - want) < 1e-12


@given(seeds)
def test_universal_det_is_pt_determinant(seed):
    rho = random_bipartite(2, 2, seed)
    assert abs(universal_det(rho) - np.prod(pt_spectrum(rho))) < 1e-12


def test_classify_scaled_band():
    n = 9
    assert classify([1, 1, 0.1, 0.01], n, 1e-9) == (PPT, None)
    assert classify([1, 1, 0.1, -1e-3], n, 1e-9) == (NPT, 3)
    tiny = 1e-9 * comb(n, 3) / n**3 / 2
    assert classify([1, 1, 0.1, -tiny], n, 1e-9) == (BOUNDARY, None)


@given(seeds, st.integers(1, 4))
def test_separable_never_npt(seed, terms):
    assert npt_verdict(random_separable(3, 3, terms, seed))[0] != NPT


def test_costs():
    assert tomography_cost(2) == 15 and tomography_cost(3) == 80
    assert [witness_cost(k) for k in (2, 3, 4)] == [1, 2, 4]
    with pytest.raises(ValueError):
        witness_cost(5)


def test_werner_threshold_is_boundary():
    rep = coefficients(werner_state(1 / 3))
    assert abs(rep.coefficients[4]) < 1e-15
    assert rep.verdict == BOUNDARY


def test_full_rank_separable_with_tiny_product_is_ppt():
    # tiny a_9 from a small but clearly positive PT spectrum is not a boundary case
    rho = random_separable(3, 3, 1, 5088)
    assert pt_spectrum(rho)[0] > 1e-6
    assert npt_verdict(rho) == (PPT, None)


@given(seeds, st.floats(0, 1))
def test_nonnegative_ladder_means_no_negative_eigenvalue(seed, q):
    base = random_bipartite(2, 3, seed)
    rho = DensityMatrix((1 - q) * base.data + q * np.eye(6) / 6, (2, 3))
    a = coefficients(rho).coefficients
    if np.all(a >= 0):
        assert pt_spectrum(rho)[0] >= -1e-9


@pytest.mark.parametrize("p", np.linspace(0, 1, 11))
def test_werner_universal_det_closed_form(p):
    assert abs(universal_det(werner_state(p)) - (1 + p) ** 3 * (1 - 3 * p) / 256) < 1e-14


@given(seeds)
def test_universal_det_sign_is_entanglement(seed):
    rho = random_bipartite(2, 2, seed)
    lam = pt_spectrum(rho)[0]
    if abs(lam) > 1e-8:
        assert (universal_det(rho) < 0) == (lam < 0)


@given(seeds, st.integers(1, 4))
def test_separable_coefficients_nonnegative(seed, terms):
    assert np.all(coefficients(random_separable(2, 2, terms, seed)).coefficients >= -1e-10)
