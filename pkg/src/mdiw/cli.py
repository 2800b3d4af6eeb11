"""``mdiw`` command-line front end.

Exit codes: 0 success, 2 parse or validation error, 3 failed scientific check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .game import (
    probability_table,
    sample_shots,
    solve_betas,
    game_value,
    flags_entanglement,
    table1_betas,
    universal_mdi_run,
)
from .io import StateFileError, parse_grid, read_operator, read_state
from .linalg import InvariantError, hermitian_eigenvalues, partial_transpose
from .npt import coefficients, universal_det
from .states import gellmann_frame_ensemble, table1_ensemble
from .shift import cyclic_shift
from .sweeps import STUDIES, ReproductionError, SweepConfig, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 2, 3
METHOD_NAMES = {"eigen": "eigen", "power-sum": "power_sum", "witness": "witness"}


def _emit(payload: dict, as_json: bool, lines: list[str]):
    if as_json:
        print(json.dumps(payload, indent=1))
    else:
        print("\n".join(lines))


def cmd_witness(args) -> int:
    rho, _ = read_state(args.file)
    n = rho.order
    upto = n if args.copies is None else args.copies
    rep = coefficients(rho, METHOD_NAMES[args.method], upto=upto)
    lam_min = float(hermitian_eigenvalues(partial_transpose(rho, 1))[0])
    payload = rep.as_dict() | {"copies_needed": rep.first_negative, "min_pt_eigenvalue": lam_min}
    lines = [f"state: {args.file} dims={list(rho.dims)}"]
    lines += [f"a_{k} = {a:+.12e}  [{tag}]" for k, (a, tag) in enumerate(zip(rep.coefficients, rep.methods))]
    lines += [
        f"verdict: {rep.verdict}",
        f"first negative index (copies needed): {rep.first_negative}",
        f"min PT eigenvalue: {lam_min:+.12e}",
    ]
    _emit(payload, args.json, lines)
    return EXIT_OK


def _ensemble(name: str, d: int):
    if name == "table1":
        if d != 2:
            raise ValueError("the table1 ensemble is for qubit sides")
        return table1_ensemble()
    return gellmann_frame_ensemble(d)


def _auto_witness(dA: int, dB: int) -> np.ndarray:
    """Half the swap of the two sides; on qubits this is the six-state polarization payoff witness."""
    if dA != dB:
        raise ValueError("the auto witness needs equal local dimensions")
    return cyclic_shift(2, dA).dense() / 2


def cmd_mdi_run(args) -> int:
    rho, _ = read_state(args.state)
    if args.universal:
        run = universal_mdi_run(rho, seed=args.seed)
        det = universal_det(rho)
        payload = {
            "mode": "universal",
            "value": run.value,
            "det_pt": det,
            "entangled": flags_entanglement(run.value),
            "spot_checks": [list(c) for c in run.spot_checks],
        }
        probs, betas = run.probs, run.betas
        lines = [f"I (universal, exact) = {run.value:+.12e}", f"det(rho^T_B)        = {det:+.12e}"]
        lines += [f"spot check {s},{t}: reduced {a:.6e} direct {b:.6e}" for s, t, a, b in run.spot_checks]
    else:
        dA, dB = rho.dims
        ens_a, ens_b = _ensemble(args.ensemble, dA), _ensemble(args.ensemble, dB)
        if args.witness == "auto":
            betas = table1_betas() if args.ensemble == "table1" else solve_betas(_auto_witness(dA, dB), ens_a, ens_b)
        else:
            w = read_operator(args.witness)
            if w.order != dA * dB:
                raise ValueError(f"witness order {w.order} does not match the state order {dA * dB}")
            betas = solve_betas(w.data, ens_a, ens_b)
        probs = probability_table(rho, ens_a, ens_b)
        value = game_value(betas, probs)
        payload = {"mode": "single", "ensemble": args.ensemble, "value": value, "entangled": flags_entanglement(value)}
        lines = [f"I (exact) = {value:+.12e}", f"entangled: {flags_entanglement(value)}"]
    if args.shots:
        est, err = sample_shots(probs, betas, args.shots, args.seed)
        payload |= {"shots": args.shots, "seed": args.seed, "estimate": est, "stderr": err}
        lines.append(f"I (shots={args.shots}, seed={args.seed}) = {est:+.8e} +- {err:.2e}")
    _emit(payload, args.json, lines)
    return EXIT_OK


def cmd_noise_sweep(args) -> int:
    cfg = SweepConfig(
        family=args.family,
        params=parse_grid(args.param),
        xi=parse_grid(args.xi),
        mu=parse_grid(args.mu),
        delta=parse_grid(args.delta),
        shots=args.shots,
        seed=args.seed,
        out=args.out,
    )
    res = run_sweep(cfg)
    diff = res.column("abs_diff")
    sim = res.column("i_mod_sim")
    print(f"{len(res.rows)} rows -> {args.out}")
    print(f"min I_mod = {sim.min():+.6e}, max |simulated - closed| = {diff.max():.3e}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    summary = STUDIES[args.name](Path(args.out))
    print(json.dumps(summary, indent=1))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdiw", description="NPT witnessing and measurement-device-independent games")
    sub = p.add_subparsers(dest="command", required=True)

    w = sub.add_parser("witness", help="coefficient ladder and NPT verdict of a state file")
    w.add_argument("file")
    w.add_argument("--copies", type=int, help="highest coefficient index to compute")
    w.add_argument("--method", choices=sorted(METHOD_NAMES), default="eigen")
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_witness)

    mdi = sub.add_parser("mdi", help="measurement-device-independent game")
    mdi_sub = mdi.add_subparsers(dest="mdi_command", required=True)
    run = mdi_sub.add_parser("run")
    run.add_argument("--state", required=True)
    run.add_argument("--universal", action="store_true", help="four-copy universal two-qubit witness")
    run.add_argument("--ensemble", choices=["table1", "gellmann-frame"], default="table1")
    run.add_argument("--witness", default="auto", help="'auto' or an operator file")
    run.add_argument("--shots", type=int, default=0)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--json", action="store_true")
    run.set_defaults(func=cmd_mdi_run)

    noise = sub.add_parser("noise", help="noisy-measurement studies")
    noise_sub = noise.add_subparsers(dest="noise_command", required=True)
    sw = noise_sub.add_parser("sweep")
    sw.add_argument("--family", choices=["werner", "timeshift"], required=True)
    sw.add_argument("--param", required=True, help="lo:hi:step or comma list")
    sw.add_argument("--xi", default="1")
    sw.add_argument("--mu", default="1")
    sw.add_argument("--delta", default="0", help="radians; pi is accepted, e.g. 0:pi:pi/8")
    sw.add_argument("--shots", type=int, default=0)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--out", required=True)
    sw.set_defaults(func=cmd_noise_sweep)

    rep = sub.add_parser("reproduce", help="canned studies with asserted checks")
    rep.add_argument("name", choices=sorted(STUDIES))
    rep.add_argument("--out", required=True)
    rep.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ReproductionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except InvariantError as exc:
        print(f"invalid input ({exc.invariant}): {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (StateFileError, ValueError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
