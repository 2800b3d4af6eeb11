"""Tensor-leg permutation operators: cyclic shifts and their moments.

A :class:`PermutationOperator` acts on a product of legs with dimensions
``dims``. Output leg ``l`` carries what input leg ``src[l]`` carried, so the
cyclic shift ``|phi_1, ..., phi_k> -> |phi_k, phi_1, ..., phi_{k-1}>`` has
``src = (k-1, 0, 1, ..., k-2)``.

Bipartite copies are laid out as ``A1 B1 A2 B2 ... Ak Bk``, one leg per
party per copy.
"""

from __future__ import annotations

from dataclasses import dataclass
from string import ascii_letters
from typing import Sequence

import numpy as np

from .linalg import DEFAULT_POLICY, HermitianOperator


@dataclass(frozen=True)
class PermutationOperator:
    dims: tuple[int, ...]
    src: tuple[int, ...]

    def __post_init__(self):
        dims, src = tuple(self.dims), tuple(self.src)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "src", src)
        if sorted(src) != list(range(len(dims))):
            raise ValueError(f"{src} is not a permutation of {len(dims)} legs")
        if any(dims[l] != dims[s] for l, s in enumerate(src)):
            raise ValueError("a leg can only be moved onto a leg of equal dimension")

    @classmethod
    def identity(cls, dims) -> "PermutationOperator":
        return cls(tuple(dims), tuple(range(len(dims))))

    @property
    def order(self) -> int:
        return int(np.prod(self.dims))

    @property
    def inverse_src(self) -> tuple[int, ...]:
        inv = [0] * len(self.src)
        for l, s in enumerate(self.src):
            inv[s] = l
        return tuple(inv)

    @property
    def T(self) -> "PermutationOperator":
        # real orthogonal: transpose = adjoint = inverse
        return PermutationOperator(self.dims, self.inverse_src)

    dagger = T

    def __matmul__(self, other: "PermutationOperator") -> "PermutationOperator":
        if self.dims != other.dims:
            raise ValueError("leg dimensions differ")
        # (self @ other): out leg l <- other's output leg src[l] <- other.src[src[l]]
        return PermutationOperator(self.dims, tuple(other.src[s] for s in self.src))

    def __pow__(self, n: int) -> "PermutationOperator":
        out = PermutationOperator.identity(self.dims)
        base = self if n >= 0 else self.T
        for _ in range(abs(n)):
            out = base @ out
        return out

    def tensor(self, other: "PermutationOperator") -> "PermutationOperator":
        off = len(self.dims)
        return PermutationOperator(self.dims + other.dims, self.src + tuple(s + off for s in other.src))

    def is_identity(self) -> bool:
        return self.src == tuple(range(len(self.src)))

    def index_map(self) -> np.ndarray:
        """``idx`` with ``(P v)[j] = v[idx[j]]``."""
        return np.arange(self.order).reshape(self.dims).transpose(self.src).reshape(-1)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Matrix-free ``P v``; extra trailing axes of ``v`` are carried along."""
        v = np.asarray(v)
        if v.shape[0] != self.order:
            raise ValueError(f"vector length {v.shape[0]} vs operator order {self.order}")
        return v[self.index_map()]

    def dense(self, limit: int | None = None) -> np.ndarray:
        limit = DEFAULT_POLICY.dense_limit if limit is None else limit
        if self.order > limit:
            raise MemoryError(
                f"refusing to materialize a {self.order}x{self.order} permutation (limit {limit}); "
                "use apply() or expectation() instead"
            )
        m = np.zeros((self.order, self.order))
        m[np.arange(self.order), self.index_map()] = 1.0
        return m

    def expectation(self, factors: Sequence[np.ndarray], legs: Sequence[int] | None = None) -> complex:
        """``Tr(P (F_1 x ... x F_m))`` by a single tensor contraction.

        ``legs[i]`` is the number of consecutive legs factor ``i`` spans
        (default: one leg each). Nothing of size ``order**2`` is formed.
        """
        factors = [np.asarray(f) for f in factors]
        legs = [1] * len(factors) if legs is None else list(legs)
        if sum(legs) != len(self.dims):
            raise ValueError("factor legs do not cover the operator")
        inv = self.inverse_src
        # Tr(P X) = sum_i X[(i_{inv[l]})_l, (i_l)_l]
        letters = ascii_letters
        operands, subs, start = [], [], 0
        for f, n in zip(factors, legs):
            block = range(start, start + n)
            fd = [self.dims[l] for l in block]
            if f.shape != (int(np.prod(fd)),) * 2:
                raise ValueError(f"factor of shape {f.shape} does not fit legs {fd}")
            operands.append(f.reshape(fd + fd))
            subs.append("".join(letters[inv[l]] for l in block) + "".join(letters[l] for l in block))
            start += n
        return complex(np.einsum(",".join(subs) + "->", *operands, optimize=True))


def cyclic_shift(k: int, d: int) -> PermutationOperator:
    """Shift of ``k`` copies of one ``d``-dimensional factor (the tilde shift)."""
    if k < 2:
        raise ValueError(f"a cyclic shift needs k >= 2 copies, got {k}")
    return PermutationOperator((d,) * k, tuple((l - 1) % k for l in range(k)))


tilde_shift = cyclic_shift


def _copy_layout(k: int, dA: int, dB: int) -> tuple[int, ...]:
    return (dA, dB) * k


def split_shift(k: int, dA: int, dB: int, a_power: int = 1, b_power: int = 1) -> PermutationOperator:
    """Shift A copies by ``a_power`` steps and B copies by ``b_power`` steps.

    ``a_power = b_power = 1`` is the bipartite shift; ``b_power = -1`` gives
    the A shift tensored with the transposed B shift.
    """
    if k < 2:
        raise ValueError(f"a cyclic shift needs k >= 2 copies, got {k}")
    src = []
    for l in range(k):
        src += [2 * ((l - a_power) % k), 2 * ((l - b_power) % k) + 1]
    return PermutationOperator(_copy_layout(k, dA, dB), tuple(src))


def bipartite_shift(k: int, dA: int, dB: int) -> PermutationOperator:
    """Cyclic shift of ``k`` copies of the ``dA*dB`` space."""
    return split_shift(k, dA, dB, 1, 1)


def symmetrize(v: PermutationOperator) -> HermitianOperator:
    """``(V + V^dagger)/2`` as a dense Hermitian operator."""
    m = v.dense()
    return HermitianOperator((m + m.T) / 2, v.dims)


def pt_symmetric_shift(k: int, dA: int, dB: int) -> HermitianOperator:
    """``(Vt x Vt^T + Vt^T x Vt)/2`` in the interleaved copy layout (dense)."""
    p = split_shift(k, dA, dB, 1, -1)
    m = p.dense() + p.T.dense()
    return HermitianOperator(m / 2, p.dims)


def trace_power(rho, k: int, method: str = "shift") -> float:
    """``Tr(rho^k)``.

    ``method="shift"`` contracts the cyclic shift against ``k`` copies of
    ``rho`` leg by leg; ``method="matrix"`` uses matrix powers.
    """
    m = rho.data if isinstance(rho, HermitianOperator) else np.asarray(rho)
    if k < 1:
        raise ValueError(f"power must be >= 1, got {k}")
    if method == "matrix":
        return float(np.trace(np.linalg.matrix_power(m, k)).real)
    if method != "shift":
        raise ValueError(f"unknown method {method!r}")
    if k == 1:
        return float(np.trace(m).real)
    return cyclic_shift(k, m.shape[0]).expectation([m] * k).real


def pt_moment(rho, k: int, dims=None) -> float:
    """``Tr((rho^{T_B})^k)`` measured on ``k`` copies of ``rho`` itself.

    Evaluates ``Tr[(Vt x Vt^T) rho^{(x)k}]`` by contraction; the symmetric
    partner ``Vt^T x Vt`` has the same real expectation.
    """
    m = rho.data if isinstance(rho, HermitianOperator) else np.asarray(rho)
    dA, dB = rho.dims if isinstance(rho, HermitianOperator) else dims
    if k == 1:
        return float(np.trace(m).real)
    p = split_shift(k, dA, dB, 1, -1)
    return p.expectation([m] * k, [2] * k).real
