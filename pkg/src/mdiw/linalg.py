"""Dense complex linear algebra on multipartite operators.

Operators are plain numpy arrays paired with a subsystem dimension vector
``dims``. The :class:`HermitianOperator` and :class:`DensityMatrix` wrappers
validate their invariants on construction; the free functions accept either a
wrapper (dims taken from it) or a raw array plus ``dims``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances shared by every validity check and decision rule."""

    herm_tol: float = 1e-10
    trace_tol: float = 1e-10
    psd_tol: float = 1e-10
    decision_tol: float = 1e-9
    dense_limit: int = 4096
    witness_limit: int = 65536


DEFAULT_POLICY = NumericPolicy()


def current_policy() -> NumericPolicy:
    """Default policy with ``MDIW_TOL`` applied to the decision tolerance."""
    tol = os.environ.get("MDIW_TOL")
    if tol is None:
        return DEFAULT_POLICY
    return replace(DEFAULT_POLICY, decision_tol=float(tol))


class InvariantError(ValueError):
    """A matrix failed one of its type invariants.

    ``invariant`` names the violated condition so callers (the CLI in
    particular) can report it verbatim.
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)


def _as_dims(dims, order: int) -> tuple[int, ...]:
    if dims is None:
        return (order,)
    dims = tuple(int(d) for d in np.atleast_1d(dims))
    if any(d < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != order:
        raise ValueError(f"dims {dims} do not multiply to matrix order {order}")
    return dims


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Complex square matrix that is Hermitian within ``herm_tol``."""

    data: np.ndarray
    dims: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise InvariantError("square", f"shape {data.shape}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", _as_dims(self.dims, data.shape[0]))
        err = hermiticity_error(data)
        if err > DEFAULT_POLICY.herm_tol:
            raise InvariantError("hermitian", f"max |M - M^dagger| = {err:.3e}")

    @property
    def order(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


@dataclass(frozen=True, eq=False)
class DensityMatrix(HermitianOperator):
    """Hermitian, unit-trace, positive semidefinite matrix."""

    def __post_init__(self):
        super().__post_init__()
        tr = np.trace(self.data)
        if abs(tr - 1) > DEFAULT_POLICY.trace_tol:
            raise InvariantError("unit trace", f"trace = {tr:.15g}")
        lam = np.linalg.eigvalsh(self.data)[0]
        if lam < -DEFAULT_POLICY.psd_tol:
            raise InvariantError("positive semidefinite", f"min eigenvalue = {lam:.3e}")

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))


def _unwrap(m, dims):
    if isinstance(m, HermitianOperator):
        return m.data, m.dims if dims is None else _as_dims(dims, m.order)
    m = np.asarray(m)
    return m, _as_dims(dims, m.shape[0])


def kron(*mats) -> np.ndarray:
    """Kronecker product of any number of matrices (or vectors)."""
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m))
    return out


def kron_apply(factors: Sequence[np.ndarray], v: np.ndarray) -> np.ndarray:
    """Apply ``F_1 (x) ... (x) F_k`` to ``v`` without assembling the product.

    Each factor is contracted against its own tensor leg, so the cost is
    ``O(sum_i n_i * prod_j n_j)`` and only vectors of length ``prod_j n_j``
    are ever held in memory.
    """
    factors = [np.asarray(f) for f in factors]
    shape = [f.shape[1] for f in factors]
    v = np.asarray(v)
    if int(np.prod(shape)) != v.shape[0]:
        raise ValueError(f"factor orders {shape} do not match vector length {v.shape[0]}")
    t = v.reshape(shape + list(v.shape[1:]))
    for axis, f in enumerate(factors):
        t = np.moveaxis(np.tensordot(f, t, axes=([1], [axis])), 0, axis)
    return t.reshape((-1,) + v.shape[1:])


def _check_sys(sys: int, dims) -> int:
    if not 0 <= sys < len(dims):
        raise IndexError(f"subsystem {sys} out of range for dims {dims}")
    return sys


def partial_transpose(m, sys: int = 1, dims=None):
    """Transpose the indices of subsystem ``sys`` only.

    Wrapped input returns a :class:`HermitianOperator` (the partial transpose
    of a state is in general not a state); raw arrays return arrays.
    """
    data, dims = _unwrap(m, dims)
    _check_sys(sys, dims)
    n = len(dims)
    t = data.reshape(dims + dims)
    t = np.swapaxes(t, sys, n + sys)
    out = t.reshape(data.shape)
    if isinstance(m, HermitianOperator):
        return HermitianOperator(out, dims)
    return out


def partial_trace(m, sys: int = 1, dims=None):
    """Trace out subsystem ``sys``; the remaining factors keep their order."""
    data, dims = _unwrap(m, dims)
    _check_sys(sys, dims)
    n = len(dims)
    t = data.reshape(dims + dims)
    t = np.trace(t, axis1=sys, axis2=n + sys)
    rest = dims[:sys] + dims[sys + 1:]
    size = int(np.prod(rest)) if rest else 1
    out = t.reshape(size, size)
    if isinstance(m, DensityMatrix):
        return DensityMatrix(out, rest or (1,))
    if isinstance(m, HermitianOperator):
        return HermitianOperator(out, rest or (1,))
    return out


def hermitian_eigenvalues(h) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    data, _ = _unwrap(h, None)
    err = hermiticity_error(data)
    if err > DEFAULT_POLICY.herm_tol:
        raise InvariantError("hermitian", f"max |M - M^dagger| = {err:.3e}")
    return np.linalg.eigvalsh(data)


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Generalized Gell-Mann basis with ``Tr(L_i L_j) = d * delta_ij``.

    ``elements[0]`` is the identity. With this normalization an operator
    expands as ``H = sum_i Tr(H L_i) / d * L_i``.
    """

    d: int
    elements: np.ndarray  # shape (d*d, d, d)

    def __len__(self):
        return self.elements.shape[0]

    def __getitem__(self, i):
        return self.elements[i]


@lru_cache(maxsize=8)
def _gell_mann_stack(d: int) -> np.ndarray:
    mats = [np.eye(d, dtype=complex)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            mats += [s, a]
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.diag(np.sqrt(2 / (l * (l + 1))) * diag).astype(complex))
    stack = np.array(mats)
    # textbook elements have Tr = 2; rescale the traceless ones to Tr = d
    stack[1:] *= np.sqrt(d / 2)
    stack.setflags(write=False)
    return stack


def gell_mann_basis(d: int) -> BasisSet:
    """Identity plus the ``d^2 - 1`` generalized Gell-Mann matrices.

    Ordering: identity, then a symmetric/antisymmetric pair for each ``j < k``,
    then the diagonal elements. For ``d = 2`` this is ``(I, X, Y, Z)``.
    """
    if d < 2:
        raise ValueError(f"basis dimension must be >= 2, got {d}")
    return BasisSet(d, _gell_mann_stack(d))


def expand_in_basis(h, basis: BasisSet) -> np.ndarray:
    """Real coefficients ``c_i = Tr(H L_i) / d``."""
    data, _ = _unwrap(h, None)
    if data.shape != (basis.d, basis.d):
        raise ValueError(f"operator of order {data.shape[0]} vs basis dimension {basis.d}")
    # Tr(H L_i) = sum_ab H_ab (L_i)_ba
    c = np.einsum("ab,iba->i", data, basis.elements) / basis.d
    if np.max(np.abs(c.imag)) > DEFAULT_POLICY.herm_tol:
        raise InvariantError("hermitian", "complex expansion coefficients")
    return c.real


def reconstruct_from_coeffs(c, basis: BasisSet) -> HermitianOperator:
    c = np.asarray(c, dtype=float)
    if c.shape != (len(basis),):
        raise ValueError(f"expected {len(basis)} coefficients, got {c.shape}")
    return HermitianOperator(np.tensordot(c, basis.elements, axes=1))


def operator_coefficients(ops: np.ndarray, basis: BasisSet) -> np.ndarray:
    """Row-stacked expansion coefficients for a stack of operators."""
    ops = np.asarray(ops)
    c = np.einsum("sab,iba->si", ops, basis.elements) / basis.d
    return c.real


def is_psd(m, tol: float | None = None) -> bool:
    tol = DEFAULT_POLICY.psd_tol if tol is None else tol
    data, _ = _unwrap(m, None)
    return bool(np.linalg.eigvalsh(data)[0] >= -tol)
