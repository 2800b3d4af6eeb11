"""State files, grid expressions and CSV output."""

from __future__ import annotations

import ast
import csv
import json
import math
import operator
from pathlib import Path

import numpy as np

from .linalg import DensityMatrix, HermitianOperator


class StateFileError(ValueError):
    """Malformed state or operator file."""


def _matrix_payload(m: np.ndarray) -> tuple[list, list]:
    return m.real.tolist(), m.imag.tolist()


def state_payload(op: HermitianOperator, meta: dict | None = None) -> dict:
    re, im = _matrix_payload(np.asarray(op.data, dtype=complex))
    return {"dims": list(op.dims), "re": re, "im": im, "meta": meta or {}}


def write_state(path, op: HermitianOperator, meta: dict | None = None):
    # json writes floats with repr, which round-trips exactly
    Path(path).write_text(json.dumps(state_payload(op, meta), indent=1))


def _parse_payload(text: str, source: str) -> tuple[np.ndarray, tuple[int, ...], dict]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{source}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise StateFileError(f"{source}: top level must be an object")
    missing = [k for k in ("dims", "re") if k not in raw]
    if missing:
        raise StateFileError(f"{source}: missing field(s) {missing}")
    try:
        dims = tuple(int(x) for x in raw["dims"])
        re = np.array(raw["re"], dtype=float)
        im = np.array(raw.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{source}: bad numeric content ({exc})") from None
    if re.ndim != 2 or re.shape != im.shape:
        raise StateFileError(f"{source}: re/im must be matrices of equal shape, got {re.shape} and {im.shape}")
    if int(np.prod(dims)) != re.shape[0]:
        raise StateFileError(f"{source}: dims {list(dims)} do not match a {re.shape[0]}x{re.shape[1]} matrix")
    meta = raw.get("meta") or {}
    return re + 1j * im, dims, meta


def read_state(path) -> tuple[DensityMatrix, dict]:
    """Parse a state file; invariant violations raise ``InvariantError``."""
    m, dims, meta = _parse_payload(_read(path), str(path))
    return DensityMatrix(m, dims), meta


def read_operator(path) -> HermitianOperator:
    m, dims, _ = _parse_payload(_read(path), str(path))
    return HermitianOperator(m, dims)


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc.strerror}") from None


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_number(text: str) -> float:
    """Evaluate arithmetic on numbers and ``pi`` (``"pi/8"``, ``"3*pi/4"``)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError):
        raise ValueError(f"cannot parse number {text!r}") from None


def parse_grid(text: str) -> tuple[float, ...]:
    """``lo:hi:step`` (inclusive of ``hi``), a comma list, or a single value."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be lo:hi:step, got {text!r}")
        lo, hi, step = (parse_number(p) for p in parts)
        if step <= 0:
            raise ValueError(f"step must be positive, got {step}")
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(lo + i * step for i in range(n))
    values = tuple(parse_number(p) for p in text.split(",") if p.strip())
    if not values:
        raise ValueError("empty grid")
    return values


def write_csv(path, header: list[str], rows) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
            n += 1
    return n
