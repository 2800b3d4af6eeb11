"""The measurement-device-independent witness game.

The referee sends ``tau_s`` to Alice and ``omega_t`` to Bob. Each player
projects their input together with their half of the shared state onto a
maximally entangled state, and the probability of the double success event
is ``P(1,1|s,t) = Tr[(tau_s^T (x) omega_t^T) rho] / (D_A D_B)``.

Payoffs ``beta`` are chosen so that ``sum beta_st tau_s^T (x) omega_t^T = W``.
The game value is reported as ``D_A D_B sum beta_st P(1,1|s,t)``, which is
then exactly ``Tr(W rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DensityMatrix,
    HermitianOperator,
    InvariantError,
    current_policy,
    gell_mann_basis,
    kron_apply,
    operator_coefficients,
)
from .npt import universal_witness
from .states import InputEnsemble, bell_vector, gellmann_frame_ensemble, table1_ensemble


@dataclass(frozen=True, eq=False)
class PayoffMatrix:
    values: np.ndarray
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    note: str = "beta"  # "beta-tilde" marks pre-maximization payoffs; never used numerically

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        if v.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError(f"payoff shape {v.shape} vs labels {len(self.row_labels)}x{len(self.col_labels)}")
        if not np.all(np.isfinite(v)):
            raise ValueError("payoffs must be finite")

    def __getitem__(self, key):
        s, t = key
        return self.values[self.row_labels.index(s), self.col_labels.index(t)]


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    values: np.ndarray
    dims: tuple[int, int]
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if np.any(v < -1e-12) or np.any(v > 1 + 1e-12):
            raise InvariantError("probabilities in [0, 1]", f"range [{v.min():.3e}, {v.max():.3e}]")

    @property
    def norm(self) -> int:
        return int(self.dims[0] * self.dims[1])


def bell_projector(D: int) -> HermitianOperator:
    v = bell_vector(D)
    return HermitianOperator(np.outer(v, v.conj()), (D, D))


def table1_betas() -> PayoffMatrix:
    """Payoffs for the six-state polarization game.

    +1/3 on equal inputs, -1/6 on orthogonal pairs, zero elsewhere; these
    realize ``W = V^(2)/2``.
    """
    labels = table1_ensemble().labels
    partner = {"H": "V", "V": "H", "D": "Dbar", "Dbar": "D", "L": "R", "R": "L"}
    beta = np.zeros((6, 6))
    for i, s in enumerate(labels):
        beta[i, i] = 1 / 3
        beta[i, labels.index(partner[s])] = -1 / 6
    return PayoffMatrix(beta, labels, labels)


def group_copies(m, k: int, dA: int, dB: int) -> np.ndarray:
    """Reorder ``A1 B1 ... Ak Bk`` legs into ``(A1..Ak)(B1..Bk)``."""
    m = m.data if isinstance(m, HermitianOperator) else np.asarray(m)
    legs = (dA, dB) * k
    order = [2 * i for i in range(k)] + [2 * i + 1 for i in range(k)]
    t = m.reshape(legs + legs).transpose(order + [2 * k + o for o in order])
    n = (dA * dB) ** k
    return t.reshape(n, n)


def copies_state(rho: DensityMatrix, k: int) -> DensityMatrix:
    """``rho^{(x)k}`` as a two-party state on ``(dA^k, dB^k)``."""
    dA, dB = rho.dims
    full = rho.data
    for _ in range(k - 1):
        full = np.kron(full, rho.data)
    return DensityMatrix(group_copies(full, k, dA, dB), (dA**k, dB**k))


def _direct_vector(dA: int, dB: int, k: int) -> np.ndarray:
    """``|Phi>_{A0:A1..Ak} |Phi>_{B1..Bk:B0}`` on legs ``A0, A1 B1, ..., Ak Bk, B0``."""
    DA, DB = dA**k, dB**k
    phiA = np.eye(DA, dtype=complex).reshape((DA,) + (dA,) * k) / np.sqrt(DA)
    phiB = np.eye(DB, dtype=complex).reshape((dB,) * k + (DB,)) / np.sqrt(DB)
    t = np.multiply.outer(phiA, phiB)
    # axes: A0, A1..Ak, B1..Bk, B0
    order = [0]
    for i in range(k):
        order += [1 + i, 1 + k + i]
    order.append(1 + 2 * k)
    return t.transpose(order).reshape(-1)


def prob_11(tau, rho, omega, mode: str = "reduced", copies: int = 1) -> float:
    """Double-success probability for one input pair.

    ``copies > 1`` shares that many copies of the single-copy ``rho``; the
    inputs then live on ``dA^copies`` and ``dB^copies`` dimensions.
    ``mode="direct"`` contracts ``<Phi Phi|tau (x) rho^{(x)k} (x) omega|Phi Phi>``
    matrix-free; ``mode="reduced"`` uses the transposed-input formula.
    """
    tau = tau.data if isinstance(tau, HermitianOperator) else np.asarray(tau)
    omega = omega.data if isinstance(omega, HermitianOperator) else np.asarray(omega)
    dA, dB = rho.dims
    DA, DB = dA**copies, dB**copies
    if tau.shape != (DA, DA) or omega.shape != (DB, DB):
        raise ValueError(f"inputs {tau.shape}, {omega.shape} do not match party dimensions ({DA}, {DB})")
    if mode == "reduced":
        r = rho.data if copies == 1 else copies_state(rho, copies).data
        p = np.einsum("xa,yb,xyab->", tau, omega, r.reshape(DA, DB, DA, DB)) / (DA * DB)
    elif mode == "direct":
        v = _direct_vector(dA, dB, copies)
        p = np.vdot(v, kron_apply([tau] + [rho.data] * copies + [omega], v))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return float(np.real(p))


def probability_table(rho, ens_a: InputEnsemble, ens_b: InputEnsemble, copies: int = 1) -> ProbabilityTable:
    dA, dB = rho.dims
    DA, DB = dA**copies, dB**copies
    if ens_a.dim != DA or ens_b.dim != DB:
        raise ValueError(f"ensemble dimensions ({ens_a.dim}, {ens_b.dim}) vs ({DA}, {DB})")
    r = rho.data if copies == 1 else copies_state(rho, copies).data
    p = np.einsum("sxa,tyb,xyab->st", ens_a.matrices(), ens_b.matrices(), r.reshape(DA, DB, DA, DB), optimize=True)
    return ProbabilityTable(p.real / (DA * DB), (DA, DB), ens_a.labels, ens_b.labels)


def _frame_pinv(ops: np.ndarray, side: str) -> tuple[np.ndarray, np.ndarray]:
    """Expansion-coefficient matrix of a frame and its pseudo-inverse."""
    d = ops.shape[1]
    g = operator_coefficients(ops, gell_mann_basis(d))
    rank = np.linalg.matrix_rank(g, tol=1e-10 * max(1.0, np.abs(g).max()))
    if rank < d * d:
        raise InvariantError(
            "informationally complete ensemble",
            f"{side} inputs span {rank} of {d * d} operator directions",
        )
    return g, np.linalg.pinv(g)


def witness_coefficients(w: np.ndarray, DA: int, DB: int) -> np.ndarray:
    """``C_ij`` with ``W = sum_ij C_ij L_i (x) L_j``."""
    la, lb = gell_mann_basis(DA).elements, gell_mann_basis(DB).elements
    w4 = w.reshape(DA, DB, DA, DB)
    # Tr[W (L_i x L_j)] = sum W[a,b,a',b'] L_i[a',a] L_j[b',b]
    c = np.einsum("abxy,ixa,jyb->ij", w4, la, lb, optimize=True)
    return c.real / (DA * DB)


def solve_for_operators(w, ops_a: np.ndarray, ops_b: np.ndarray) -> np.ndarray:
    """Minimum-norm ``beta`` with ``sum beta_st A_s (x) B_t = W``.

    The system ``G_A^T beta G_B = C`` is Kronecker structured, so the
    minimum-norm solution is ``pinv(G_A)^T C pinv(G_B)``; only two
    ``D^2``-sized pseudo-inverses are needed.
    """
    wm = w.data if isinstance(w, HermitianOperator) else np.asarray(w)
    DA, DB = ops_a.shape[1], ops_b.shape[1]
    if wm.shape != (DA * DB, DA * DB):
        raise ValueError(f"witness of order {wm.shape[0]} vs inputs {DA}x{DB}")
    _, ga_pinv = _frame_pinv(ops_a, "Alice's")
    _, gb_pinv = _frame_pinv(ops_b, "Bob's")
    c = witness_coefficients(wm, DA, DB)
    return ga_pinv.T @ c @ gb_pinv


def solve_betas(w, ens_a: InputEnsemble, ens_b: InputEnsemble) -> PayoffMatrix:
    beta = solve_for_operators(w, ens_a.transposed(), ens_b.transposed())
    return PayoffMatrix(beta, ens_a.labels, ens_b.labels)


def reconstruct_operator(beta, ops_a: np.ndarray, ops_b: np.ndarray) -> np.ndarray:
    """``sum_st beta_st A_s (x) B_t`` assembled directly from the operators."""
    b = beta.values if isinstance(beta, PayoffMatrix) else np.asarray(beta)
    DA, DB = ops_a.shape[1], ops_b.shape[1]
    t = np.einsum("st,sac,tbd->abcd", b, ops_a, ops_b, optimize=True)
    return t.reshape(DA * DB, DA * DB)


def reconstruct_witness(beta: PayoffMatrix, ens_a: InputEnsemble, ens_b: InputEnsemble) -> np.ndarray:
    return reconstruct_operator(beta, ens_a.transposed(), ens_b.transposed())


def game_value(beta: PayoffMatrix, probs: ProbabilityTable) -> float:
    """``D_A D_B sum_st beta_st P(1,1|s,t)``."""
    if beta.values.shape != probs.values.shape:
        raise ValueError(f"payoff shape {beta.values.shape} vs probability shape {probs.values.shape}")
    if probs.row_labels and (probs.row_labels != beta.row_labels or probs.col_labels != beta.col_labels):
        raise ValueError("payoff and probability tables are indexed by different labels")
    return float(probs.norm * np.sum(beta.values * probs.values))


def flags_entanglement(value: float, tol: float | None = None) -> bool:
    tol = current_policy().decision_tol if tol is None else tol
    return value < -tol


@dataclass
class UniversalRun:
    value: float
    betas: PayoffMatrix
    probs: ProbabilityTable
    spot_checks: list[tuple[str, str, float, float]] = field(default_factory=list)


def universal_mdi_run(
    rho: DensityMatrix,
    ens_a: InputEnsemble | None = None,
    ens_b: InputEnsemble | None = None,
    spot_checks: int = 3,
    seed: int = 0,
) -> UniversalRun:
    """Four-copy game with the universal witness; the value is ``det(rho^{T_B})``.

    ``spot_checks`` random input pairs are re-evaluated in direct mode on the
    full ``16 x 256 x 16`` geometry and reported next to the reduced values.
    """
    if tuple(rho.dims) != (2, 2):
        raise ValueError("the universal run needs a two-qubit state")
    ens_a = gellmann_frame_ensemble(16) if ens_a is None else ens_a
    ens_b = ens_a if ens_b is None else ens_b
    w = group_copies(universal_witness(), 4, 2, 2)
    betas = solve_betas(w, ens_a, ens_b)
    probs = probability_table(rho, ens_a, ens_b, copies=4)
    run = UniversalRun(game_value(betas, probs), betas, probs)
    rng = np.random.default_rng(seed)
    for _ in range(spot_checks):
        s, t = rng.integers(len(ens_a)), rng.integers(len(ens_b))
        direct = prob_11(ens_a.states[s], rho, ens_b.states[t], "direct", copies=4)
        run.spot_checks.append((ens_a.labels[s], ens_b.labels[t], float(probs.values[s, t]), direct))
    return run


def sample_shots(probs: ProbabilityTable, beta: PayoffMatrix, shots: int, seed: int) -> tuple[float, float]:
    """Finite-statistics game value and its standard error.

    Every input pair gets ``shots`` binomial trials from its own generator
    seeded by ``(seed, s, t)``, so results do not depend on evaluation order.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = probs.values
    phat = np.empty_like(p)
    for (s, t), pst in np.ndenumerate(p):
        rng = np.random.default_rng([seed, s, t])
        phat[s, t] = rng.binomial(shots, min(max(pst, 0.0), 1.0)) / shots
    b = beta.values
    est = probs.norm * np.sum(b * phat)
    err = probs.norm * np.sqrt(np.sum(b**2 * phat * (1 - phat)) / shots)
    return float(est), float(err)
