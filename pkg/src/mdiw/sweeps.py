"""Noise sweeps and the canned reproduction studies behind the CLI."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .game import probability_table, table1_betas, game_value
from .io import write_csv
from .noise import (
    NoiseParams,
    closed_form_i_mod,
    i_mod_fast,
    noisy_probabilities,
    timeshift_i_mod,
    werner_i_mod,
)
from .npt import WITNESS_OBSERVABLES, tomography_cost
from .states import table1_ensemble, timeshift_state, werner_state

FAMILIES = {"werner": werner_state, "timeshift": timeshift_state}
CLOSED = {"werner": werner_i_mod, "timeshift": timeshift_i_mod}
MAX_ROWS = 10**6
SWEEP_HEADER = ["family", "param", "xi", "mu", "delta", "i_mod_sim", "i_mod_closed", "abs_diff"]


class ReproductionError(AssertionError):
    """A scientific check of a reproduction study failed."""


def num_threads() -> int:
    raw = os.environ.get("MDIW_NUM_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"MDIW_NUM_THREADS must be an integer, got {raw!r}") from None
        if n < 1:
            raise ValueError("MDIW_NUM_THREADS must be >= 1")
        return n
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class SweepConfig:
    family: str
    params: tuple[float, ...]
    xi: tuple[float, ...] = (1.0,)
    mu: tuple[float, ...] = (1.0,)
    delta: tuple[float, ...] = (0.0,)
    ensemble: str = "table1"
    shots: int = 0
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        if self.ensemble != "table1":
            raise ValueError("noise sweeps use the table1 ensemble")
        for name in ("params", "xi", "mu", "delta"):
            if not getattr(self, name):
                raise ValueError(f"{name} grid is empty")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")
        if self.rows > MAX_ROWS:
            raise ValueError(f"sweep would produce {self.rows} rows (limit {MAX_ROWS})")

    @property
    def rows(self) -> int:
        return len(self.params) * len(self.xi) * len(self.mu) * len(self.delta)

    def points(self):
        for p in self.params:
            for xi in self.xi:
                for mu in self.mu:
                    for d in self.delta:
                        yield p, xi, mu, d


@dataclass
class SweepResult:
    header: list[str]
    rows: list[list] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        i = self.header.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


def _sweep_row(cfg: SweepConfig, index: int, point, ens, beta) -> list:
    p, xi, mu, delta = point
    rho = FAMILIES[cfg.family](p)
    noise = NoiseParams.symmetric(xi, mu, delta)
    sim = i_mod_fast(rho, ens, ens, beta, noise)
    closed = closed_form_i_mod(rho, ens.bloch, ens.bloch, beta.values, xi, mu, delta)
    row = [cfg.family, p, xi, mu, delta, sim, closed, abs(sim - closed)]
    if cfg.shots:
        probs = xi * noisy_probabilities(rho, ens, ens, noise)
        rng = np.random.default_rng([cfg.seed, index])
        phat = rng.binomial(cfg.shots, np.clip(probs, 0, 1)) / cfg.shots
        row.append(float(4 * np.sum(beta.values * phat)))
    return row


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Evaluate every grid point; rows come back in grid order whatever the thread count."""
    ens, beta = table1_ensemble(), table1_betas()
    header = SWEEP_HEADER + (["i_mod_shots"] if cfg.shots else [])
    points = list(cfg.points())
    with ThreadPoolExecutor(max_workers=num_threads()) as pool:
        rows = list(pool.map(lambda ip: _sweep_row(cfg, ip[0], ip[1], ens, beta), enumerate(points)))
    result = SweepResult(header, rows)
    if cfg.out:
        write_csv(cfg.out, header, rows)
    return result


def _check(cond: bool, failures: list[str], message: str):
    if not cond:
        failures.append(message)


def _finish(name: str, out: Path, header, rows, summary: dict, failures: list[str]) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / f"{name}.csv", header, rows)
    summary.update(study=name, passed=not failures, failures=failures)
    (out / f"{name}_summary.json").write_text(json.dumps(summary, indent=1))
    if failures:
        raise ReproductionError(f"{name}: " + "; ".join(failures))
    return summary


def reproduce_werner(out: Path) -> dict:
    """Noiseless Werner game, ``(1 - 3p)/4``, changing sign at ``p = 1/3``."""
    ens, beta = table1_ensemble(), table1_betas()
    ps = [round(0.05 * i, 10) for i in range(21)] + [1 / 3 - 1e-9, 1 / 3, 1 / 3 + 1e-9]
    rows, failures = [], []
    for p in sorted(ps):
        v = game_value(beta, probability_table(werner_state(p), ens, ens))
        rows.append(["werner", p, v, (1 - 3 * p) / 4])
        _check(abs(v - (1 - 3 * p) / 4) <= 1e-9, failures, f"value at p={p} off by {v - (1 - 3 * p) / 4:.3g}")
    below = game_value(beta, probability_table(werner_state(1 / 3 - 1e-9), ens, ens))
    above = game_value(beta, probability_table(werner_state(1 / 3 + 1e-9), ens, ens))
    _check(below > 0 > above, failures, "no sign change bracketed at p = 1/3")
    summary = {"threshold": 1 / 3, "value_below": below, "value_above": above}
    return _finish("werner-mdiew", out, ["family", "p", "game_value", "expected"], rows, summary, failures)


def reproduce_timeshift(out: Path) -> dict:
    """Noiseless ``(2r - 1)/2`` line plus the worst separable value over a noise grid."""
    ens, beta = table1_ensemble(), table1_betas()
    rs = [round(0.05 * i, 10) for i in range(21)]
    grid = [0, 0.25, 0.5, 0.75, 1]
    deltas = [k * np.pi / 8 for k in range(9)]
    rows, failures = [], []
    worst = np.inf
    for r in rs:
        rho = timeshift_state(r)
        v = i_mod_fast(rho, ens, ens, beta, NoiseParams())
        expected = (2 * r - 1) / 2
        _check(abs(v - expected) <= 1e-9, failures, f"noiseless value at r={r} off by {v - expected:.3g}")
        _check((v < -1e-12) == (r < 0.5), failures, f"entanglement flag wrong at r={r}")
        noisy_min = min(
            i_mod_fast(rho, ens, ens, beta, NoiseParams.symmetric(xi, mu, d)) for xi in grid for mu in grid for d in deltas
        )
        if r >= 0.5:
            worst = min(worst, noisy_min)
        rows.append(["timeshift", r, v, expected, noisy_min])
    _check(worst >= -1e-12, failures, f"separable timeshift state flagged under noise ({worst:.3g})")
    summary = {"min_separable_noisy_value": worst}
    header = ["family", "r", "game_value", "expected", "min_noisy_value"]
    return _finish("timeshift-attack", out, header, rows, summary, failures)


def reproduce_tomography(out: Path) -> dict:
    rows, failures = [], []
    for d in (2, 3, 4):
        rows.append([d, tomography_cost(d)] + [WITNESS_OBSERVABLES[k] for k in (2, 3, 4)])
    _check(tomography_cost(2) == 15, failures, "two-qubit tomography should need 15 settings")
    _check(WITNESS_OBSERVABLES == {2: 1, 3: 2, 4: 4}, failures, "observable counts should be 1, 2, 4")
    summary = {"tomography_d2": tomography_cost(2), "observables": {f"a{k}": v for k, v in WITNESS_OBSERVABLES.items()}}
    header = ["d", "tomography_settings", "a2_observables", "a3_observables", "a4_observables"]
    return _finish("tomography-cost", out, header, rows, summary, failures)


STUDIES = {
    "werner-mdiew": reproduce_werner,
    "timeshift-attack": reproduce_timeshift,
    "tomography-cost": reproduce_tomography,
}


def config_dict(cfg: SweepConfig) -> dict:
    return asdict(cfg)
