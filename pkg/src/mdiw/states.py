"""Named two-party states, input ensembles and random state generators.

Polarization convention: ``|H> = |0> = (1, 0)^T`` and ``|V> = |1>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DensityMatrix, HermitianOperator, InvariantError, gell_mann_basis, kron

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
I2 = np.eye(2, dtype=complex)


def _ket_to_dm(psi: np.ndarray, dims) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()), dims)


def bell_vector(d: int) -> np.ndarray:
    """``(1/sqrt d) sum_j |jj>`` as a length ``d^2`` vector."""
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


def bell_state(d: int) -> DensityMatrix:
    return _ket_to_dm(bell_vector(d), (d, d))


PHI_PLUS = bell_vector(2)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def psi_minus() -> DensityMatrix:
    """Singlet ``(|HV> - |VH>)/sqrt 2``."""
    return _ket_to_dm(PSI_MINUS, (2, 2))


def werner_state(p: float) -> DensityMatrix:
    """``p |Psi-><Psi-| + (1 - p) I/4``; separable exactly for ``p <= 1/3``."""
    if not 0 <= p <= 1:
        raise ValueError(f"Werner weight must lie in [0, 1], got {p}")
    singlet = np.outer(PSI_MINUS, PSI_MINUS.conj())
    return DensityMatrix(p * singlet + (1 - p) * np.eye(4) / 4, (2, 2))


def timeshift_state(r: float) -> DensityMatrix:
    """``(1 - r)|Psi-><Psi-| + (r/2)(|HH><HH| + |VV><VV|)``; separable for ``r >= 1/2``."""
    if not 0 <= r <= 1:
        raise ValueError(f"mixing weight must lie in [0, 1], got {r}")
    singlet = np.outer(PSI_MINUS, PSI_MINUS.conj())
    classical = np.diag([1, 0, 0, 1]).astype(complex)
    return DensityMatrix((1 - r) * singlet + r / 2 * classical, (2, 2))


def qubit_from_bloch(r) -> DensityMatrix:
    r = np.asarray(r, dtype=float)
    if np.linalg.norm(r) > 1 + 1e-12:
        raise InvariantError("bloch vector inside unit ball", f"|r| = {np.linalg.norm(r)}")
    return DensityMatrix((I2 + np.tensordot(r, PAULI, axes=1)) / 2)


@dataclass(frozen=True, eq=False)
class InputEnsemble:
    """Labelled input states sent by the referee to one player."""

    labels: tuple[str, ...]
    states: tuple[DensityMatrix, ...]
    bloch: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.labels) != len(self.states):
            raise ValueError("one label per state required")
        orders = {s.order for s in self.states}
        if len(orders) != 1:
            raise InvariantError("shared dimension", f"state orders {sorted(orders)}")
        if self.bloch is not None:
            bloch = np.asarray(self.bloch, dtype=float)
            object.__setattr__(self, "bloch", bloch)
            for s, r in zip(self.states, bloch):
                ref = (I2 + np.tensordot(r, PAULI, axes=1)) / 2
                if s.order != 2 or np.max(np.abs(s.data - ref)) > 1e-12:
                    raise InvariantError("state matches bloch vector")

    def __len__(self):
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].order

    def matrices(self) -> np.ndarray:
        return np.array([s.data for s in self.states])

    def transposed(self) -> np.ndarray:
        """Stack of ``tau_s^T``, shape ``(n, d, d)``."""
        return np.transpose(self.matrices(), (0, 2, 1))


TABLE1 = {
    "H": (0, 0, 1),
    "V": (0, 0, -1),
    "D": (1, 0, 0),
    "Dbar": (-1, 0, 0),
    "L": (0, 1, 0),
    "R": (0, -1, 0),
}


def table1_ensemble() -> InputEnsemble:
    """The six polarization states H, V, D, Dbar, L, R."""
    bloch = np.array(list(TABLE1.values()), dtype=float)
    states = [qubit_from_bloch(r) for r in bloch]
    return InputEnsemble(tuple(TABLE1), tuple(states), bloch)


def bloch_ensemble(vectors, labels=None) -> InputEnsemble:
    vectors = np.asarray(vectors, dtype=float)
    labels = labels or [f"r{i}" for i in range(len(vectors))]
    return InputEnsemble(tuple(labels), tuple(qubit_from_bloch(r) for r in vectors), vectors)


def gellmann_frame_ensemble(d: int, eps: float | None = None) -> InputEnsemble:
    """Informationally complete ensemble ``{I/d} U {(I + eps L_i)/d}``.

    ``eps`` defaults to ``1/(d - 1)`` (``1/15`` at ``d = 16``); positivity of
    every member is checked when the states are built.
    """
    basis = gell_mann_basis(d)
    eps = 1.0 / (d - 1) if eps is None else eps
    eye = np.eye(d, dtype=complex)
    states = [DensityMatrix(eye / d)]
    states += [DensityMatrix((eye + eps * basis[i]) / d) for i in range(1, d * d)]
    labels = ["I"] + [f"L{i}" for i in range(1, d * d)]
    return InputEnsemble(tuple(labels), tuple(states))


def random_density(d: int, seed: int, dims=None) -> DensityMatrix:
    """Ginibre-distributed full-rank state ``G G^dagger / Tr(G G^dagger)`` of order ``d``."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    rng = np.random.default_rng(seed)
    return DensityMatrix(_ginibre(rng, d), dims)


def random_bipartite(dA: int, dB: int, seed: int) -> DensityMatrix:
    return random_density(dA * dB, seed, (dA, dB))


def _ginibre(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return m / np.trace(m).real


def random_separable(dA: int, dB: int, terms: int, seed: int) -> DensityMatrix:
    """Dirichlet-weighted mixture of ``terms`` products of independent Ginibre states."""
    if terms < 1:
        raise ValueError("need at least one product term")
    if dA < 1 or dB < 1:
        raise ValueError(f"invalid local dimensions ({dA}, {dB})")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    rho = np.zeros((dA * dB, dA * dB), dtype=complex)
    for w in weights:
        rho += w * np.kron(_ginibre(rng, dA), _ginibre(rng, dB))
    return DensityMatrix(rho / np.trace(rho).real, (dA, dB))


@dataclass(frozen=True)
class BlochForm:
    """``rho = 1/4 (I + a.(I x sigma) + b.(sigma x I) + sum c_ij sigma_i x sigma_j)``.

    ``a`` belongs to the second (B) qubit, ``b`` to the first (A) qubit.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


def bloch_decompose(rho) -> BlochForm:
    m = rho.data if isinstance(rho, HermitianOperator) else np.asarray(rho)
    dims = rho.dims if isinstance(rho, HermitianOperator) else (2, 2)
    if m.shape != (4, 4) or tuple(dims) != (2, 2):
        raise ValueError("Bloch decomposition needs a 2x2 two-qubit operator")
    a = np.array([np.trace(m @ kron(I2, s)).real for s in PAULI])
    b = np.array([np.trace(m @ kron(s, I2)).real for s in PAULI])
    c = np.array([[np.trace(m @ kron(si, sj)).real for sj in PAULI] for si in PAULI])
    return BlochForm(a, b, c)


def bloch_compose(form: BlochForm) -> HermitianOperator:
    m = kron(I2, I2).astype(complex)
    for i in range(3):
        m = m + form.a[i] * kron(I2, PAULI[i]) + form.b[i] * kron(PAULI[i], I2)
        for j in range(3):
            m = m + form.c[i][j] * kron(PAULI[i], PAULI[j])
    return HermitianOperator(m / 4, (2, 2))
