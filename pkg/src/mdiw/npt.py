"""Characteristic-polynomial coefficients of the partial transpose.

For a bipartite state with partial transpose spectrum ``lam``, ``a_k`` is the
k-th elementary symmetric polynomial of ``lam``. ``a_k = Tr(W_k rho^{(x)k})``
for state-independent Hermitian ``W_k``, and the state is NPT exactly when
some ``a_k`` is negative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .linalg import (
    DEFAULT_POLICY,
    DensityMatrix,
    HermitianOperator,
    current_policy,
    hermitian_eigenvalues,
    kron,
    partial_transpose,
)
from .shift import bipartite_shift, pt_symmetric_shift

NPT, PPT, BOUNDARY = "NPT", "PPT", "boundary"
METHODS = ("eigen", "power_sum", "witness")


def _local_dims(rho) -> tuple[int, int]:
    if len(rho.dims) != 2:
        raise ValueError(f"expected a bipartite operator, got dims {rho.dims}")
    return rho.dims


def _witness_size_guard(k: int, dA: int, dB: int):
    size = (dA * dB) ** k
    if size > DEFAULT_POLICY.witness_limit:
        raise MemoryError(
            f"W_{k} on {dA}x{dB} would be {size}x{size}; dense witnesses are limited to "
            f"order {DEFAULT_POLICY.witness_limit}"
        )


def build_witness(k: int, dA: int, dB: int | None = None) -> HermitianOperator:
    """Dense ``W_k`` (k = 2, 3, 4) on k copies laid out ``A1 B1 ... Ak Bk``.

    ``W_4`` is the universal two-qubit witness when ``dA = dB = 2``.
    """
    dB = dA if dB is None else dB
    if k not in (2, 3, 4):
        raise ValueError(f"explicit witnesses exist for k in (2, 3, 4), got {k}")
    if dA < 2 or dB < 2:
        raise ValueError("local dimensions must be >= 2")
    _witness_size_guard(k, dA, dB)
    n = dA * dB
    swap = bipartite_shift(2, dA, dB).dense()
    if k == 2:
        w = (np.eye(n**2) - swap) / 2
    elif k == 3:
        w = (np.eye(n**3) - 3 * kron(np.eye(n), swap) + 2 * pt_symmetric_shift(3, dA, dB).data) / 6
    else:
        w = (
            np.eye(n**4) / 24
            - pt_symmetric_shift(4, dA, dB).data / 4
            + kron(np.eye(n), pt_symmetric_shift(3, dA, dB).data) / 3
            + kron(swap, swap) / 8
            - kron(np.eye(n**2), swap) / 4
        )
    return HermitianOperator(w, (dA, dB) * k)


def universal_witness() -> HermitianOperator:
    return build_witness(4, 2, 2)


def copies(rho, k: int) -> np.ndarray:
    """``rho^{(x)k}`` in the interleaved layout (dense)."""
    m = rho.data
    out = m
    for _ in range(k - 1):
        out = np.kron(out, m)
    return out


def witness_expectation(w, rho, k: int) -> float:
    """``Tr(W rho^{(x)k})``."""
    wm = w.data if isinstance(w, HermitianOperator) else np.asarray(w)
    x = copies(rho, k)
    return float(np.real(np.sum(wm * x.T)))


def elementary_symmetric(lam, upto: int | None = None) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    upto = len(lam) if upto is None else upto
    e = np.zeros(upto + 1)
    e[0] = 1.0
    for x in lam:
        e[1:] = e[1:] + x * e[:-1]
    return e


def newton_girard(power_sums, upto: int) -> np.ndarray:
    """``a_0..a_upto`` from ``p_1..p_upto`` via ``k a_k = sum_i (-1)^{i-1} a_{k-i} p_i``."""
    p = np.asarray(power_sums, dtype=float)
    a = np.zeros(upto + 1)
    a[0] = 1.0
    for k in range(1, upto + 1):
        s = sum((-1) ** (i - 1) * a[k - i] * p[i - 1] for i in range(1, k + 1))
        a[k] = s / k
    return a


def coefficient_scale(n: int, k: int) -> float:
    """``a_k`` of the maximally mixed state of order n, ``C(n,k)/n^k``."""
    return comb(n, k) / n**k


@dataclass
class CoefficientReport:
    dims: tuple[int, int]
    coefficients: np.ndarray
    methods: list[str]
    tol: float = field(default_factory=lambda: current_policy().decision_tol)
    verdict: str = field(init=False)
    first_negative: int | None = field(init=False)

    def __post_init__(self):
        self.verdict, self.first_negative = classify(self.coefficients, int(np.prod(self.dims)), self.tol)

    @property
    def d(self) -> int:
        return self.dims[0]

    def as_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "coefficients": [float(x) for x in self.coefficients],
            "methods": self.methods,
            "verdict": self.verdict,
            "first_negative": self.first_negative,
        }


def classify(a, n: int, tol: float) -> tuple[str, int | None]:
    """NPT if some ``a_k < -tol * C(n,k)/n^k``; boundary if some ``|a_k| <= tol * a_{k-1}``.

    The NPT threshold is scaled by the maximally-mixed value of each
    coefficient because ``a_k`` is homogeneous of degree k. ``a_k / a_{k-1}``
    estimates the root of smallest magnitude (for a positive spectrum
    ``a_n / a_{n-1}`` lies in ``[lam_min/n, lam_min]``), so the band marks a
    PT eigenvalue within about ``tol`` of zero, not merely a small product.
    """
    first = None
    band = False
    for k in range(2, len(a)):
        if a[k] < -tol * coefficient_scale(n, k):
            first = k
            break
        if abs(a[k]) <= tol * abs(a[k - 1]):
            band = True
    if first is not None:
        return NPT, first
    return (BOUNDARY if band else PPT), None


def coefficients(rho: DensityMatrix, method: str = "eigen", upto: int | None = None, tol: float | None = None) -> CoefficientReport:
    dA, dB = _local_dims(rho)
    n = dA * dB
    upto = n if upto is None else upto
    if not 0 <= upto <= n:
        raise ValueError(f"upto must lie in [0, {n}], got {upto}")
    tol = current_policy().decision_tol if tol is None else tol
    if method == "eigen":
        lam = hermitian_eigenvalues(partial_transpose(rho, 1))
        a = elementary_symmetric(lam, upto)
        tags = ["eigen"] * (upto + 1)
    elif method == "power_sum":
        pt = partial_transpose(rho.data, 1, rho.dims)
        p, acc = [], np.eye(n, dtype=complex)
        for _ in range(upto):
            acc = acc @ pt
            p.append(np.trace(acc).real)
        a = newton_girard(p, upto)
        tags = ["power-sum"] * (upto + 1)
    elif method == "witness":
        if upto > 4:
            raise ValueError("the witness path is available for k <= 4 only")
        a = np.zeros(upto + 1)
        a[0] = 1.0
        if upto >= 1:
            a[1] = rho.trace()
        for k in range(2, upto + 1):
            a[k] = witness_expectation(build_witness(k, dA, dB), rho, k)
        tags = ["witness-trace"] * (upto + 1)
    else:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    return CoefficientReport((dA, dB), a, tags, tol)


def npt_verdict(rho: DensityMatrix, tol: float | None = None) -> tuple[str, int | None]:
    """Verdict from the full coefficient ladder and the first negative index.

    The first negative index is the fewest copies that certify NPT.
    """
    rep = coefficients(rho, "eigen", tol=tol)
    return rep.verdict, rep.first_negative


def universal_det(rho: DensityMatrix, witness: HermitianOperator | None = None) -> float:
    """``Tr(W_univ rho^{(x)4})``, which equals ``det(rho^{T_B})`` for two qubits."""
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"the universal witness is defined on 2x2 states, got dims {rho.dims}")
    w = universal_witness() if witness is None else witness
    return witness_expectation(w, rho, 4)


WITNESS_OBSERVABLES = {2: 1, 3: 2, 4: 4}


def tomography_cost(d: int) -> int:
    """Measurement settings for full two-qudit tomography, ``d^4 - 1``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return d**4 - 1


def witness_cost(k: int) -> int:
    """Observables whose expectations fix ``a_k``."""
    try:
        return WITNESS_OBSERVABLES[k]
    except KeyError:
        raise ValueError(f"observable counts are tabulated for k in (2, 3, 4), got {k}") from None
