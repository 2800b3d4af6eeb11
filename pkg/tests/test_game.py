import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdiw.game import (
    PayoffMatrix,
    ProbabilityTable,
    bell_projector,
    flags_entanglement,
    game_value,
    prob_11,
    probability_table,
    reconstruct_witness,
    sample_shots,
    solve_betas,
    table1_betas,
    universal_mdi_run,
)
from mdiw.linalg import DensityMatrix, InvariantError
from mdiw.states import (
    PAULI,
    bloch_ensemble,
    gellmann_frame_ensemble,
    psi_minus,
    qubit_from_bloch,
    random_bipartite,
    random_density,
    table1_ensemble,
    werner_state,
)

seeds = st.integers(0, 2**31 - 1)


def direct_oracle(tau, rho, omega):
    # dense <Phi Phi| tau (x) rho (x) omega |Phi Phi> with explicit reordering
    dA, dB = rho.dims
    full = np.kron(np.kron(tau, rho.data), omega)
    phi_a = np.eye(dA).reshape(-1) / np.sqrt(dA)
    phi_b = np.eye(dB).reshape(-1) / np.sqrt(dB)
    return float(np.real(np.kron(phi_a, phi_b).conj() @ full @ np.kron(phi_a, phi_b)))


def test_bell_projector():
    p2 = bell_projector(2).data
    assert np.allclose(p2[[0, 0, 3, 3], [0, 3, 0, 3]], 0.5)
    assert abs(bell_projector(16).trace() - 1) < 1e-12
    p4 = bell_projector(4).data
    assert np.allclose(p4 @ p4, p4, atol=1e-12)
    assert np.linalg.matrix_rank(p4) == 1
    with pytest.raises(ValueError):
        bell_projector(1)


def test_prob_examples():
    rho = random_bipartite(2, 2, 1)
    half = np.eye(2) / 2
    assert abs(prob_11(half, rho, half) - 1 / 16) < 1e-15
    h = np.diag([1.0, 0.0])
    for mode in ("reduced", "direct"):
        assert abs(prob_11(h, psi_minus(), h, mode)) < 1e-15
    third = np.eye(3) / 3
    assert abs(prob_11(third, DensityMatrix(np.eye(9) / 9, (3, 3)), third) - 1 / 81) < 1e-15


@given(seeds, st.sampled_from([2, 3, 4]))
def test_reduced_direct_agree(seed, d):
    rho = random_bipartite(d, d, seed)
    tau, omega = random_density(d, seed + 1).data, random_density(d, seed + 2).data
    red = prob_11(tau, rho, omega, "reduced")
    assert abs(red - prob_11(tau, rho, omega, "direct")) < 1e-12
    assert abs(red - direct_oracle(tau, rho, omega)) < 1e-12


def test_prob_dimension_mismatch():
    with pytest.raises(ValueError):
        prob_11(np.eye(3) / 3, werner_state(0.5), np.eye(2) / 2)


def test_table1_betas_reconstruct_pauli_witness():
    ens = table1_ensemble()
    w = reconstruct_witness(table1_betas(), ens, ens)
    want = (np.eye(4) + sum(np.kron(s, s) for s in PAULI)) / 4
    assert np.allclose(w, want, atol=1e-12)


def test_min_norm_solution_reconstructs():
    ens = table1_ensemble()
    w = (np.eye(4) + sum(np.kron(s, s) for s in PAULI)) / 4
    beta = solve_betas(w, ens, ens)
    assert np.linalg.norm(reconstruct_witness(beta, ens, ens) - w) < 1e-10
    # minimum norm: no larger than the hand-built payoffs
    assert np.linalg.norm(beta.values) <= np.linalg.norm(table1_betas().values) + 1e-12


def test_identity_witness():
    ens = gellmann_frame_ensemble(2)
    beta = solve_betas(np.eye(4) / 4, ens, ens)
    assert np.linalg.norm(reconstruct_witness(beta, ens, ens) - np.eye(4) / 4) < 1e-12
    # the frame entries are positive combinations; each (tau^T x omega^T) has trace 1
    assert abs(beta.values.sum() - 1) < 1e-12


def test_incomplete_ensemble_rejected():
    five = bloch_ensemble([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0.6, 0.8, 0]])
    with pytest.raises(InvariantError, match="informationally complete"):
        solve_betas(np.eye(4) / 4, five, five)


@given(seeds, st.sampled_from([2, 3]))
def test_game_value_is_witness_expectation(seed, d):
    ens = gellmann_frame_ensemble(d)
    r = np.random.default_rng(seed)
    h = r.normal(size=(d * d, d * d)) + 1j * r.normal(size=(d * d, d * d))
    w = h + h.conj().T
    rho = random_bipartite(d, d, seed)
    v = game_value(solve_betas(w, ens, ens), probability_table(rho, ens, ens))
    assert abs(v - np.trace(w @ rho.data).real) < 1e-9


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 1.0])
def test_werner_game(p):
    ens = table1_ensemble()
    v = game_value(table1_betas(), probability_table(werner_state(p), ens, ens))
    assert abs(v - (1 - 3 * p) / 4) < 1e-12


def test_zero_payoffs_and_flag():
    ens = table1_ensemble()
    zero = PayoffMatrix(np.zeros((6, 6)), ens.labels, ens.labels)
    assert game_value(zero, probability_table(werner_state(1), ens, ens)) == 0
    assert flags_entanglement(-1e-6) and not flags_entanglement(-1e-10)


def test_payoff_shape_checked():
    with pytest.raises(ValueError):
        PayoffMatrix(np.zeros((2, 3)), ("a", "b"), ("c", "d"))
    with pytest.raises(InvariantError):
        ProbabilityTable(np.array([[1.5]]), (2, 2))


@pytest.mark.parametrize(
    "rho, want",
    [(DensityMatrix(np.eye(4) / 4, (2, 2)), 1 / 256), (psi_minus(), -1 / 16), (werner_state(0.5), -27 / 4096)],
)
def test_universal_run_examples(rho, want):
    run = universal_mdi_run(rho, spot_checks=1)
    assert abs(run.value - want) < 1e-10
    for _, _, reduced, direct in run.spot_checks:
        assert abs(reduced - direct) < 1e-10


def test_shots_zero_entry_and_determinism():
    ens = table1_ensemble()
    beta = table1_betas()
    probs = probability_table(werner_state(1), ens, ens)
    assert probs.values[0, 0] == 0
    a = sample_shots(probs, beta, 1000, 5)
    assert a == sample_shots(probs, beta, 1000, 5)
    only_zero = PayoffMatrix(np.eye(6)[:, [0]] @ np.eye(6)[[0]], ens.labels, ens.labels)
    assert sample_shots(probs, only_zero, 1000, 5) == (0.0, 0.0)
    with pytest.raises(ValueError):
        sample_shots(probs, beta, 0, 1)


def test_shot_estimate_is_unbiased():
    ens = table1_ensemble()
    probs = probability_table(werner_state(0.6), ens, ens)
    est = np.mean([sample_shots(probs, table1_betas(), 2000, s)[0] for s in range(200)])
    assert abs(est - (1 - 1.8) / 4) < 0.01
