"""Command-line front end emitting CSV tables and JSON summaries.

Usage:
    exle roots --p 2 --theta 2
    exle thresholds --grid 1.1:5:0.1 --out thresholds.csv
    exle continue --p 2 --theta 2 --sigma 1 --dim 3 --nodes 256 --out branch.csv
    exle verify --p 2 --theta 3 --samples 200 --seed 1
    exle partial --p 2 --theta 2 --dim 16

Numbers are printed with 12 significant digits and LF line endings, so
identical inputs give byte-identical output.  Exit codes: 0 success,
1 verification failure, 2 domain error, 3 I/O error, 4 budget
exhausted.  A JSON config file (flat keys mirroring the flags) can seed
any command; explicit flags win.  EXLE_NUM_WORKERS caps the thresholds
worker pool.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .diagnostics import energy_report, extremal_extrapolate, souplet_check
from .errors import (
    BudgetError,
    ConfigurationError,
    DiagnosticError,
    DomainError,
    ExleError,
)
from .radial import ContinuationConfig, RadialGrid, continue_ray
from . import thresholds
from .thresholds import ExponentPair, largest_root_L, scaling_exponents, threshold_report

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_BUDGET = 4

_IDENTITY_TOL = 1e-9
_SIGN_GUARD = 1e-6

# Per-command key sets accepted from flags and config files.
_COMMAND_KEYS = {
    "roots": {"p", "theta", "tol"},
    "thresholds": {"grid", "tol", "out"},
    "continue": {
        "p", "theta", "sigma", "dim", "nodes", "tol", "bracket_tol", "s", "out",
        "lambda_init", "growth", "max_iter", "max_steps", "blowup_cap", "eigen_tol",
    },
    "verify": {"p", "theta", "samples", "seed"},
    "partial": {"p", "theta", "dim", "tol"},
}

_DEFAULTS = {
    "tol": 1e-12,
    "bracket_tol": 1e-4,
    "samples": 200,
    "seed": 0,
    "sigma": 1.0,
    "nodes": 256,
    "lambda_init": 1e-3,
    "growth": 2.0,
    "max_iter": 10_000,
    "max_steps": 200,
    "blowup_cap": 1e8,
    "eigen_tol": 1e-10,
}


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".12g")


def _write_lines(path: str | None, lines: list[str]) -> None:
    text = "".join(line + "\n" for line in lines)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _effective(args: argparse.Namespace, command: str) -> dict:
    """Merge documented defaults, config-file values, then explicit flags."""
    allowed = _COMMAND_KEYS[command]
    merged = {k: _DEFAULTS[k] for k in allowed if k in _DEFAULTS}
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigurationError("config file must hold a JSON object")
        unknown = set(raw) - allowed
        if unknown:
            raise ConfigurationError(
                f"unknown config keys for {command}: {', '.join(sorted(unknown))}"
            )
        merged.update(raw)
    for key in allowed:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged

def _require(cfg: dict, command: str, *keys: str) -> None:
    for key in keys:
        if key not in cfg or cfg[key] is None:
            raise DomainError(f"{command} requires --{key.replace('_', '-')}")


def _pair_from(cfg: dict) -> ExponentPair:
    pair = ExponentPair(float(cfg["p"]), float(cfg["theta"]))
    if pair.p > pair.theta:
        lo, hi = pair.canonical()
        print(
            f"# note: canonical order (p, theta) = ({_fmt(lo)}, {_fmt(hi)}) "
            "used for threshold quantities",
            file=sys.stderr,
        )
    return pair


def cmd_roots(args: argparse.Namespace) -> int:
    cfg = _effective(args, "roots")
    _require(cfg, "roots", "p", "theta")
    rep = threshold_report(_pair_from(cfg), float(cfg["tol"]))
    _write_lines(None, [
        "t0,s0,x0,n_cowan,n_new,improvement",
        ",".join(_fmt(x) for x in (rep.t0, rep.s0, rep.x0, rep.n_cowan, rep.n_new, rep.improvement)),
    ])
    return EXIT_OK


def _parse_grid(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise DomainError(f'grid must look like "pmin:pmax:step", got {spec!r}')
    try:
        lo, hi, step = (float(t) for t in parts)
    except ValueError as exc:
        raise DomainError(f"grid values must be numeric: {spec!r}") from exc
    if not (lo < hi) or not (step > 0):
        raise DomainError(f"grid needs pmin < pmax and step > 0, got {spec!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + k * step for k in range(count)]


def _threshold_row(task: tuple[float, float, float]) -> tuple[float, ...]:
    p, theta, tol = task
    rep = threshold_report(ExponentPair(p, theta), tol)
    return (p, theta, rep.t0, rep.s0, rep.x0, rep.n_cowan, rep.n_new, rep.improvement)


def _worker_count(n_tasks: int) -> int:
    raw = os.environ.get("EXLE_NUM_WORKERS")
    if raw is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ConfigurationError(f"EXLE_NUM_WORKERS must be an integer, got {raw!r}") from exc
        if cap < 1:
            raise ConfigurationError(f"EXLE_NUM_WORKERS must be >= 1, got {cap}")
    return max(1, min(cap, n_tasks))


def cmd_thresholds(args: argparse.Namespace) -> int:
    cfg = _effective(args, "thresholds")
    _require(cfg, "thresholds", "grid")
    values = _parse_grid(str(cfg["grid"]))
    tol = float(cfg["tol"])
    tasks = [
        (values[i], values[j], tol)
        for i in range(len(values))
        for j in range(i, len(values))
    ]
    workers = _worker_count(len(tasks))
    if workers == 1:
        rows = [_threshold_row(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_threshold_row, tasks, chunksize=64))
    rows.sort(key=lambda row: (row[0], row[1]))
    lines = ["p,theta,t0,s0,x0,n_cowan,n_new,improvement"]
    lines.extend(",".join(_fmt(x) for x in row) for row in rows)
    _write_lines(cfg.get("out"), lines)
    return EXIT_OK


def cmd_partial(args: argparse.Namespace) -> int:
    cfg = _effective(args, "partial")
    _require(cfg, "partial", "p", "theta", "dim")
    pair = _pair_from(cfg)
    dim = int(cfg["dim"])
    tol = float(cfg["tol"])
    rep = threshold_report(pair, tol)
    bound = thresholds.hausdorff_bound(pair, dim, tol)
    proof_form = thresholds.hausdorff_bound_proof_form(pair, dim, tol)
    _write_lines(None, [
        "dim,n_new,bound,bound_proof_form",
        ",".join(_fmt(x) for x in (dim, rep.n_new, bound, proof_form)),
    ])
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _effective(args, "verify")
    _require(cfg, "verify", "p", "theta")
    pair = _pair_from(cfg)
    samples = int(cfg["samples"])
    seed = int(cfg["seed"])
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")

    report = thresholds.check_polynomial_identities(pair, sample_count=samples, seed=seed)
    lines = []
    failures: list[tuple[str, float]] = []
    for name, value in report.residuals.items():
        ok = value <= _IDENTITY_TOL
        lines.append(f"residual {name} {value:.3e} {'PASS' if ok else 'FAIL'}")
        if not ok:
            failures.append((name, value))
    for name, ok in report.signs.items():
        lines.append(f"sign {name} {'PASS' if ok else 'FAIL'}")
        if not ok:
            failures.append((name, math.inf))

    # Equivalence scan: sign(stability_product - 1) must oppose sign(L(s)).
    p_lo, _ = pair.canonical()
    rng = np.random.default_rng(seed)
    s_values = rng.uniform(p_lo + 1.0 + 1e-6, 1.5 * report.s0, size=samples)
    disagreements = 0
    scanned = 0
    for s in s_values:
        ls = thresholds.eval_L(pair, float(s))
        if abs(ls) <= _SIGN_GUARD:
            continue
        scanned += 1
        if (thresholds.stability_product(pair, float(s)) - 1.0 > 0.0) != (ls < 0.0):
            disagreements += 1
    ok = disagreements == 0
    lines.append(
        f"equivalence_scan disagreements {disagreements} of {scanned} {'PASS' if ok else 'FAIL'}"
    )
    if not ok:
        failures.append(("equivalence_scan", float(disagreements)))

    se = scaling_exponents(pair)
    res_scaling = max(
        abs(se.beta * pair.p - se.alpha - 2.0), abs(se.alpha * pair.theta - se.beta - 2.0)
    ) / (se.alpha + 2.0)
    ok = res_scaling <= _IDENTITY_TOL
    lines.append(f"residual scaling_identity {res_scaling:.3e} {'PASS' if ok else 'FAIL'}")
    if not ok:
        failures.append(("scaling_identity", res_scaling))

    if failures:
        worst = max(failures, key=lambda item: item[1])
        lines.append(f"RESULT FAIL worst {worst[0]} {worst[1]:.3e}")
        _write_lines(None, lines)
        return EXIT_VERIFY
    lines.append("RESULT PASS")
    _write_lines(None, lines)
    return EXIT_OK


def cmd_continue(args: argparse.Namespace) -> int:
    cfg = _effective(args, "continue")
    _require(cfg, "continue", "p", "theta")
    pair = _pair_from(cfg)
    sigma = float(cfg["sigma"])
    dim = int(cfg["dim"]) if "dim" in cfg and cfg["dim"] is not None else 3
    grid = RadialGrid.uniform(dim, int(cfg["nodes"]))
    run = ContinuationConfig(
        lambda_init=float(cfg["lambda_init"]),
        growth=float(cfg["growth"]),
        bracket_tol=float(cfg["bracket_tol"]),
        tol=min(float(cfg["tol"]), 1e-10) if "tol" in cfg else 1e-10,
        max_iter=int(cfg["max_iter"]),
        blowup_cap=float(cfg["blowup_cap"]),
        max_steps=int(cfg["max_steps"]),
        eigen_tol=float(cfg["eigen_tol"]),
    )
    p_lo, _ = pair.canonical()
    s_energy = float(cfg["s"]) if cfg.get("s") is not None else 0.5 * (
        p_lo + 1.0 + largest_root_L(pair)
    )
    out = str(cfg.get("out") or "branch.csv")

    budget_hit = False
    try:
        branch = continue_ray(pair, sigma, grid, run)
    except BudgetError as exc:
        branch = exc.partial
        budget_hit = True

    lines = ["lambda,gamma,sup_u,sup_v,mu1,souplet_margin,energy_J2,iterations"]
    margins = []
    energies = []
    for pt in branch.points:
        margin = souplet_check(pair, pt.state, pt.lam, pt.gam)
        energy = energy_report(pair, pt.state, s_energy, grid).energy_J2
        margins.append(margin)
        energies.append(energy)
        lines.append(",".join(
            _fmt(x)
            for x in (pt.lam, pt.gam, pt.sup_u, pt.sup_v, pt.mu1, margin, energy, pt.iterations)
        ))

    bounded: bool | None
    try:
        bounded = extremal_extrapolate(branch, pair, dim).bounded_looking
    except DiagnosticError:
        bounded = None
    summary = {
        "p": pair.p,
        "theta": pair.theta,
        "sigma": sigma,
        "dim": dim,
        "nodes": grid.m,
        "s_energy": s_energy,
        "lambda_lo": branch.lambda_lo,
        "lambda_hi": branch.lambda_hi,
        "bracket_rel_width": (
            branch.bracket_rel_width if math.isfinite(branch.bracket_rel_width) else None
        ),
        "mu1_min": branch.mu1_min if branch.points else None,
        "souplet_margin_min": min(margins) if margins else None,
        "observed_C_s": max(energies) if energies else None,
        "bounded_looking": bounded,
        "budget_exhausted": budget_hit,
    }
    _write_lines(out, lines)
    summary_path = str(Path(out).with_suffix(".summary.json"))
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return EXIT_BUDGET if budget_hit else EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exle", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=str, default=None, help="JSON config file; flags win")
        return cmd

    roots = add("roots", "threshold constants for one exponent pair")
    roots.add_argument("--p", type=float)
    roots.add_argument("--theta", type=float)
    roots.add_argument("--tol", type=float)

    thresholds_cmd = add("thresholds", "threshold table over an exponent grid")
    thresholds_cmd.add_argument("--grid", type=str, help='"pmin:pmax:step"')
    thresholds_cmd.add_argument("--tol", type=float)
    thresholds_cmd.add_argument("--out", type=str)

    cont = add("continue", "minimal-branch continuation along gamma = sigma*lambda")
    cont.add_argument("--p", type=float)
    cont.add_argument("--theta", type=float)
    cont.add_argument("--sigma", type=float)
    cont.add_argument("--dim", type=int)
    cont.add_argument("--nodes", type=int)
    cont.add_argument("--tol", type=float)
    cont.add_argument("--bracket-tol", type=float, dest="bracket_tol")
    cont.add_argument("--s", type=float, help="energy integrability exponent")
    cont.add_argument("--out", type=str)

    verify = add("verify", "identity and equivalence verification suite")
    verify.add_argument("--p", type=float)
    verify.add_argument("--theta", type=float)
    verify.add_argument("--samples", type=int)
    verify.add_argument("--seed", type=int)

    partial = add("partial", "singular-set dimension bounds")
    partial.add_argument("--p", type=float)
    partial.add_argument("--theta", type=float)
    partial.add_argument("--dim", type=int)
    partial.add_argument("--tol", type=float)

    return parser


_HANDLERS = {
    "roots": cmd_roots,
    "thresholds": cmd_thresholds,
    "continue": cmd_continue,
    "verify": cmd_verify,
    "partial": cmd_partial,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except (DomainError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ExleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


def console_main() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    console_main()
