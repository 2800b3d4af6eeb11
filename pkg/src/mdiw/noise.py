"""Imperfect Bell-state measurements and noisy inputs.

Two noise models are covered.

Optical model (qubits): each player's projector is
``mu |chi><chi| + (1 - mu) I/4`` with ``|chi> = cos D |Phi+> + sin D |Psi->``
(half-wave-plate error ``D``, beam-splitter visibility ``mu``), and the joint
detection probability is scaled by the efficiency ``xi``.

Generalized model (qudits): inputs are mixed with a known noise state,
``tau' = mu_in tau + (1 - mu_in) n.L/d``, and the measurement is
``nu |Phi><Phi| + (1 - nu) m.L/d^2`` with an unknown noise operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import PayoffMatrix, reconstruct_operator, solve_betas, solve_for_operators
from .linalg import (
    DensityMatrix,
    HermitianOperator,
    InvariantError,
    gell_mann_basis,
    is_psd,
    partial_trace,
)
from .states import PHI_PLUS, PSI_MINUS, InputEnsemble, bell_vector, bloch_decompose


def _check_unit(name: str, x: float):
    if not 0 <= x <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def noise_state(n, d: int | None = None) -> np.ndarray:
    """``n.L / d`` for a generalized Bloch vector ``n`` of length ``d^2``."""
    n = np.asarray(n, dtype=float)
    d = int(round(np.sqrt(n.size))) if d is None else d
    if n.size != d * d:
        raise ValueError(f"noise vector of length {n.size} does not fit dimension {d}")
    if abs(n[0] - 1) > 1e-12:
        raise InvariantError("unit trace noise", f"identity coefficient {n[0]}")
    m = np.tensordot(n, gell_mann_basis(d).elements, axes=1) / d
    if not is_psd(m):
        raise InvariantError("positive noise operator", "n.L/d has a negative eigenvalue")
    return m


def white_vector(d: int) -> np.ndarray:
    v = np.zeros(d * d)
    v[0] = 1.0
    return v


@dataclass(frozen=True)
class NoiseParams:
    """All noise knobs; the defaults are noiseless.

    ``delta1``/``delta2`` are the half-wave-plate angle errors ``g2 - g1`` in
    radians. ``input_mu`` is the input-preparation visibility and ``nu`` the
    measurement visibility of the generalized model; ``n1``/``n2`` and
    ``m1``/``m2`` default to white noise.
    """

    xi: float = 1.0
    mu1: float = 1.0
    mu2: float = 1.0
    delta1: float = 0.0
    delta2: float = 0.0
    nu: float = 1.0
    input_mu: float = 1.0
    n1: np.ndarray | None = None
    n2: np.ndarray | None = None
    m1: np.ndarray | None = None
    m2: np.ndarray | None = None

    def __post_init__(self):
        for name in ("xi", "mu1", "mu2", "nu", "input_mu"):
            _check_unit(name, getattr(self, name))
        for name in ("n1", "n2"):
            if getattr(self, name) is not None:
                noise_state(getattr(self, name))
        for name in ("m1", "m2"):
            if getattr(self, name) is not None:
                noise_state(getattr(self, name))

    @classmethod
    def from_angles(cls, g1a: float, g2a: float, g1b: float, g2b: float, **kw) -> "NoiseParams":
        return cls(delta1=g2a - g1a, delta2=g2b - g1b, **kw)

    @classmethod
    def symmetric(cls, xi: float = 1.0, mu: float = 1.0, delta: float = 0.0) -> "NoiseParams":
        return cls(xi=xi, mu1=mu, mu2=mu, delta1=delta, delta2=delta)


# --- optical model -----------------------------------------------------------


def rotated_bell(g1: float, g2: float) -> np.ndarray:
    """``cos(g2 - g1)|Phi+> + sin(g2 - g1)|Psi->``."""
    delta = g2 - g1
    return np.cos(delta) * PHI_PLUS + np.sin(delta) * PSI_MINUS


def noisy_projector(mu: float, delta: float) -> HermitianOperator:
    _check_unit("mu", mu)
    chi = rotated_bell(0.0, delta)
    return HermitianOperator(mu * np.outer(chi, chi.conj()) + (1 - mu) * np.eye(4) / 4, (2, 2))


def _trig(delta: float) -> tuple[float, float]:
    return np.cos(delta), np.sin(delta)


def multiplicative_factor(noise: NoiseParams) -> float:
    """``xi`` times the weight of the ideal-projector-like terms."""
    c1, _ = _trig(noise.delta1)
    c2, _ = _trig(noise.delta2)
    mu1, mu2 = noise.mu1, noise.mu2
    bracket = (
        mu1 * mu2 * c1**2 * c2**2
        + mu1 * (1 - mu2) / 4 * c1**2
        + mu2 * (1 - mu1) / 4 * c2**2
        + (1 - mu1) * (1 - mu2) / 16
    )
    return noise.xi * bracket


def _side_terms(mu: float, delta: float) -> list[tuple[str, float, np.ndarray]]:
    c, s = _trig(delta)
    phi = np.outer(PHI_PLUS, PHI_PLUS)
    psi = np.outer(PSI_MINUS, PSI_MINUS)
    cross = np.outer(PSI_MINUS, PHI_PLUS) + np.outer(PHI_PLUS, PSI_MINUS)
    return [
        ("phi", mu * c**2, phi),
        ("cross", mu * c * s, cross),
        ("psi", mu * s**2, psi),
        ("id", (1 - mu) / 4, np.eye(4)),
    ]


def measurement_expansion(noise: NoiseParams) -> list[tuple[str, str, float, np.ndarray, np.ndarray]]:
    """The sixteen coefficient-weighted terms of ``P_{A_O A} (x) P_{B B_O}``."""
    out = []
    for na, ca, oa in _side_terms(noise.mu1, noise.delta1):
        for nb, cb, ob in _side_terms(noise.mu2, noise.delta2):
            out.append((na, nb, ca * cb, oa, ob))
    return out


def _pair_traces(op_a: np.ndarray, op_b: np.ndarray, rho: np.ndarray, taus: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    """``Tr[(op_a (x) op_b)(tau_s (x) rho (x) omega_t)]`` for all pairs, full 16-dim traces."""
    k = np.kron(op_a, op_b)
    da, db = taus.shape[1], omegas.shape[1]
    n = rho.shape[0]
    # x[s,t] = tau_s (x) rho (x) omega_t, all pairs at once
    x = np.einsum("sab,cd,tef->stacebdf", taus, rho, omegas)
    x = x.reshape(len(taus), len(omegas), da * n * db, da * n * db)
    return np.einsum("ij,stji->st", k, x).real


def _effective_side_ops(proj: np.ndarray, inputs: np.ndarray, side: str) -> np.ndarray:
    """Operators on the shared qubit equivalent to projecting with ``proj``.

    Alice: ``Tr_{A_O}[P (tau (x) I)]``; Bob: ``Tr_{B_O}[P (I (x) omega)]``.
    """
    p4 = proj.reshape(2, 2, 2, 2)
    if side == "A":
        return np.einsum("oapb,spo->sab", p4, inputs)
    return np.einsum("aobp,spo->sab", p4, inputs)


def noisy_probabilities(rho, ens_a: InputEnsemble, ens_b: InputEnsemble, noise: NoiseParams) -> np.ndarray:
    """Un-scaled ``Tr[(P_A (x) P_B)(tau_s (x) rho (x) omega_t)]`` via local effective operators."""
    pa = noisy_projector(noise.mu1, noise.delta1).data
    pb = noisy_projector(noise.mu2, noise.delta2).data
    ea = _effective_side_ops(pa, ens_a.matrices(), "A")
    eb = _effective_side_ops(pb, ens_b.matrices(), "B")
    r = rho.data if isinstance(rho, HermitianOperator) else np.asarray(rho)
    # Tr[(e_a (x) e_b) rho] = sum e_a[a,x] e_b[b,y] rho[x,y,a,b]
    return np.einsum("sax,tby,xyab->st", ea, eb, r.reshape(2, 2, 2, 2)).real


def i_mod(
    rho: DensityMatrix,
    ens_a: InputEnsemble,
    ens_b: InputEnsemble,
    beta: PayoffMatrix,
    noise: NoiseParams,
    mode: str = "simulated",
) -> float:
    """Game value under the optical noise model.

    ``simulated`` traces the noisy projectors against the full six-qubit
    operator and is the reference. ``closed_form`` evaluates the Bloch-vector
    polynomial valid for ``mu1 = mu2`` and ``delta1 = delta2``.
    """
    if tuple(rho.dims) != (2, 2) or ens_a.dim != 2 or ens_b.dim != 2:
        raise ValueError("the optical noise model is defined for qubits")
    if mode == "simulated":
        pa = noisy_projector(noise.mu1, noise.delta1).data
        pb = noisy_projector(noise.mu2, noise.delta2).data
        p = _pair_traces(pa, pb, rho.data, ens_a.matrices(), ens_b.matrices())
        return float(4 * noise.xi * np.sum(beta.values * p))
    if mode == "closed_form":
        if noise.mu1 != noise.mu2 or noise.delta1 != noise.delta2:
            raise ValueError("the closed form assumes mu1 = mu2 and delta1 = delta2")
        if ens_a.bloch is None or ens_b.bloch is None:
            raise ValueError("the closed form needs ensembles with Bloch vectors")
        return closed_form_i_mod(rho, ens_a.bloch, ens_b.bloch, beta.values, noise.xi, noise.mu1, noise.delta1)
    raise ValueError(f"unknown mode {mode!r}")


def i_mod_fast(rho, ens_a, ens_b, beta: PayoffMatrix, noise: NoiseParams) -> float:
    """Same value as ``i_mod(..., "simulated")`` through local effective operators."""
    return float(4 * noise.xi * np.sum(beta.values * noisy_probabilities(rho, ens_a, ens_b, noise)))


def closed_form_i_mod(rho, r_s, r_t, beta, xi: float, mu: float, delta: float) -> float:
    f = bloch_decompose(rho)
    a1, a2, a3 = f.a
    b1, b2, b3 = f.b
    c = f.c
    c11, c12, c13 = c[0]
    c21, c22, c23 = c[1]
    c31, c32, c33 = c[2]
    s2, co2, s4 = np.sin(2 * delta), np.cos(2 * delta), np.sin(4 * delta)
    total = 0.0
    for i, (xs, ys, zs) in enumerate(np.asarray(r_s)):
        for j, (xt, yt, zt) in enumerate(np.asarray(r_t)):
            bst = beta[i][j]
            if bst == 0:
                continue
            term = (
                2 * a3 * mu * s2 * xt
                + 2 * a1 * mu * co2 * xt
                - 2 * a2 * mu * yt
                - 2 * a1 * mu * s2 * zt
                + 2 * a3 * mu * co2 * zt
                + 2 * b1 * mu * (co2 * xs + s2 * zs)
                - 2 * b3 * mu * (s2 * xs - co2 * zs)
                - 2 * b2 * mu * ys
                - 2 * c33 * mu**2 * s2**2 * xs * xt
                + c13 * mu**2 * s4 * xs * xt
                - c31 * mu**2 * s4 * xs * xt
                + 2 * c11 * mu**2 * co2**2 * xs * xt
                - 2 * c23 * mu**2 * s2 * ys * xt
                + 2 * c32 * mu**2 * s2 * xs * yt
                - 2 * c21 * mu**2 * co2 * ys * xt
                - 2 * c12 * mu**2 * co2 * xs * yt
                + 2 * c13 * mu**2 * s2**2 * zs * xt
                + 2 * c31 * mu**2 * s2**2 * xs * zt
                + c11 * mu**2 * s4 * zs * xt
                + c33 * mu**2 * s4 * zs * xt
                - c11 * mu**2 * s4 * xs * zt
                - c33 * mu**2 * s4 * xs * zt
                + 2 * c31 * mu**2 * co2**2 * zs * xt
                + 2 * c13 * mu**2 * co2**2 * xs * zt
                + 2 * c22 * mu**2 * ys * yt
                - 2 * c12 * mu**2 * s2 * zs * yt
                + 2 * c21 * mu**2 * s2 * ys * zt
                - 2 * c32 * mu**2 * co2 * zs * yt
                - 2 * c23 * mu**2 * co2 * ys * zt
                - 2 * c11 * mu**2 * s2**2 * zs * zt
                + c13 * mu**2 * s4 * zs * zt
                - c31 * mu**2 * s4 * zs * zt
                + 2 * c33 * mu**2 * co2**2 * zs * zt
                + 2
            )
            total += bst * term
    return float(xi / 8 * total)


def werner_i_mod(p: float, xi: float, mu: float, delta: float) -> float:
    return xi / 4 * (1 - p * mu**2 - 2 * p * mu**2 * np.cos(4 * delta))


def timeshift_i_mod(r: float, xi: float, mu: float, delta: float) -> float:
    return xi / 4 * ((3 * r - 2) * mu**2 * np.cos(4 * delta) + mu**2 * (r - 1) + 1)


def additional_term(rho, ens_a, ens_b, beta: PayoffMatrix, noise: NoiseParams, clean_value: float) -> float:
    """``I_mod - factor * I`` rebuilt from the sixteen-term measurement expansion.

    The four terms whose operators are products of ``|Phi+><Phi+|`` and the
    identity make up the multiplicative factor; each contributes its deviation
    from ``I``, the other twelve contribute in full.
    """
    bracket = {("phi", "phi"), ("phi", "id"), ("id", "phi"), ("id", "id")}
    taus, omegas = ens_a.matrices(), ens_b.matrices()
    total = 0.0
    for na, nb, coef, oa, ob in measurement_expansion(noise):
        if coef == 0:
            continue
        value = 4 * noise.xi * np.sum(beta.values * _pair_traces(oa, ob, rho.data, taus, omegas))
        total += coef * (value - noise.xi * clean_value) if (na, nb) in bracket else coef * value
    return float(total)


# --- generalized model -----------------------------------------------------


def noisy_input(tau, mu: float, n=None) -> DensityMatrix:
    """``mu tau + (1 - mu) n.L/d``; ``n`` defaults to white noise."""
    _check_unit("mu", mu)
    t = tau.data if isinstance(tau, HermitianOperator) else np.asarray(tau)
    d = t.shape[0]
    n = white_vector(d) if n is None else n
    return DensityMatrix(mu * t + (1 - mu) * noise_state(n, d))


def noisy_measurement(d: int, nu: float, m=None) -> HermitianOperator:
    """``nu |Phi><Phi| + (1 - nu) m.L/d^2`` on ``d x d``; must be positive."""
    _check_unit("nu", nu)
    v = bell_vector(d)
    m = white_vector(d * d) if m is None else m
    op = nu * np.outer(v, v.conj()) + (1 - nu) * noise_state(m, d * d)
    if not is_psd(op):
        raise InvariantError("positive measurement operator", "noisy Bell projector has a negative eigenvalue")
    return HermitianOperator(op, (d, d))


def _effective_alice(tau: np.ndarray, nu: float, m) -> np.ndarray:
    d = tau.shape[0]
    noise = noise_state(white_vector(d * d) if m is None else m, d * d) * d * d
    # Tr_{A_O}[(tau (x) I)(m.L)]
    y = partial_trace(np.kron(tau, np.eye(d)) @ noise, 0, (d, d))
    return nu / d * tau.T + (1 - nu) / d**2 * y


def _effective_bob(omega: np.ndarray, nu: float, m) -> np.ndarray:
    d = omega.shape[0]
    noise = noise_state(white_vector(d * d) if m is None else m, d * d) * d * d
    # Tr_{B_O}[(m.L)(I (x) omega)]
    y = partial_trace(noise @ np.kron(np.eye(d), omega), 1, (d, d))
    return nu / d * omega.T + (1 - nu) / d**2 * y


def effective_noisy_inputs(tau, omega, nu: float, m1=None, m2=None) -> HermitianOperator:
    """Operator ``E`` with ``P_noisy(1,1|s,t) = Tr(E rho)``.

    ``E`` is the four-term expansion of the noisy measurement; it factorizes
    into an Alice part and a Bob part, which is how it is computed.
    """
    _check_unit("nu", nu)
    t = tau.data if isinstance(tau, HermitianOperator) else np.asarray(tau)
    o = omega.data if isinstance(omega, HermitianOperator) else np.asarray(omega)
    ea, eb = _effective_alice(t, nu, m1), _effective_bob(o, nu, m2)
    return HermitianOperator(np.kron(ea, eb), (t.shape[0], o.shape[0]))


def shrunk_inputs(tau, omega, nu: float) -> np.ndarray:
    """White-noise case: ``d^-4 (I + nu G.tr(G tau^T)) (x) (I + nu G.tr(G omega^T))``."""
    t = tau.data if isinstance(tau, HermitianOperator) else np.asarray(tau)
    o = omega.data if isinstance(omega, HermitianOperator) else np.asarray(omega)
    d = t.shape[0]
    g = gell_mann_basis(d).elements[1:]

    def shrink(x):
        tr = np.einsum("ab,iba->i", x.T, g)
        return np.eye(d) + nu * np.tensordot(tr, g, axes=1)

    return np.kron(shrink(t), shrink(o)) / d**4


def noisy_probability_direct(tau, rho, omega, noise: NoiseParams) -> float:
    """``Tr[(M_1 (x) M_2)(tau' (x) rho (x) omega')]`` on the full space."""
    t = noisy_input(tau, noise.input_mu, noise.n1).data
    o = noisy_input(omega, noise.input_mu, noise.n2).data
    dA, dB = rho.dims
    m1 = noisy_measurement(dA, noise.nu, noise.m1).data
    m2 = noisy_measurement(dB, noise.nu, noise.m2).data
    k = np.kron(m1, m2)
    x = np.kron(np.kron(t, rho.data), o)
    return float(np.real(np.sum(k * x.T)))


def noisy_families(ens_a: InputEnsemble, ens_b: InputEnsemble, noise: NoiseParams) -> tuple[np.ndarray, np.ndarray]:
    """``d * e_A(tau'_s)`` and ``d * e_B(omega'_t)``; both reduce to the transposed inputs without noise."""
    fa = [
        ens_a.dim * _effective_alice(noisy_input(s, noise.input_mu, noise.n1).data, noise.nu, noise.m1)
        for s in ens_a.states
    ]
    fb = [
        ens_b.dim * _effective_bob(noisy_input(s, noise.input_mu, noise.n2).data, noise.nu, noise.m2)
        for s in ens_b.states
    ]
    return np.array(fa), np.array(fb)


def noisy_game_value(beta: PayoffMatrix, rho, ens_a, ens_b, noise: NoiseParams) -> float:
    """``D_A D_B sum beta P_noisy`` with every probability traced on the full space."""
    probs = np.array(
        [[noisy_probability_direct(s, rho, o, noise) for o in ens_b.states] for s in ens_a.states]
    )
    return float(ens_a.dim * ens_b.dim * np.sum(beta.values * probs))


def corrected_betas(w, ens_a: InputEnsemble, ens_b: InputEnsemble, noise: NoiseParams) -> PayoffMatrix:
    """Payoffs that undo known input and measurement noise.

    Solved against the effective noisy operator family, so the noisy game
    again reports ``Tr(W rho)``.
    """
    fa, fb = noisy_families(ens_a, ens_b, noise)
    beta = solve_for_operators(w, fa, fb)
    return PayoffMatrix(beta, ens_a.labels, ens_b.labels)


def noisy_witness(w, ens_a: InputEnsemble, ens_b: InputEnsemble, noise: NoiseParams) -> np.ndarray:
    """Operator actually measured when the noise-free payoffs are used."""
    beta = solve_betas(w, ens_a, ens_b)
    fa, fb = noisy_families(ens_a, ens_b, noise)
    return reconstruct_operator(beta, fa, fb)


def uncorrected_error(w, ens_a: InputEnsemble, ens_b: InputEnsemble, noise: NoiseParams, rho) -> float:
    """``Tr[(W'' - W) rho]``: bias of the game value when noise is ignored."""
    wm = w.data if isinstance(w, HermitianOperator) else np.asarray(w)
    w2 = noisy_witness(wm, ens_a, ens_b, noise)
    return float(np.real(np.trace((w2 - wm) @ rho.data)))
