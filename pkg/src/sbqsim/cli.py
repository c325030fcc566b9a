"""Sweep harness: run one experiment family over a parameter grid and emit
a row per cell comparing the measured quantity against its analytic bound.

A row passes when margin = bound - measured >= -1e-9. For the upper-bound
families (dme, wml, qpca, diamond) the measured column is a certified or
exact error and the bound column is the analytic guarantee; for the
lower-bound families (lb-ham, lb-lind) the measured column is the claimed
theorem value and the bound column is the explicit construction it must not
exceed. Grid cells on which a bound makes no claim are skipped; cells that
violate a stated step-count hypothesis become failed rows with a reason.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .channels import channel_from_unitary, diamond_lower_ascent, difference, unitary_pair_diamond
from .dme import DmeSchedule, dme_bound, dme_error_estimate
from .linalg import random_density, random_unitary
from .lowerbounds import (
    hamiltonian_lb_schedule,
    hamiltonian_lb_theorem,
    hamiltonian_lb_window,
    lindblad_lb_schedule,
    lindblad_lb_theorem,
    lindblad_lb_window,
)
from .qpca import QpcaInstance, qpca_distribution, qpca_total_bound, run_qpca
from .wml import random_lindblad, wml_bound, wml_error_estimate

PASS_SLACK = 1e-9
CSV_HEADER = "experiment,d,t,n,eps,measured,bound,margin,pass"
SEED_ENV = "SBQSIM_SEED"

ALLOWED_DIMS = {
    "dme": (2, 3, 4),
    "wml": (2, 3),
    "lb-ham": (2,),
    "lb-lind": (2,),
    "qpca": (2,),
    "diamond": (2, 3, 4),
}
EXPERIMENTS = tuple(ALLOWED_DIMS)

_LIST_INT_KEYS = ("dims", "n_grid", "seeds")
_LIST_FLOAT_KEYS = ("t_grid", "eps_grid")


@dataclass(frozen=True)
class SweepConfig:
    """Grid and run parameters for one experiment family."""

    experiment: str
    dims: tuple = (2,)
    t_grid: tuple = (1.0,)
    n_grid: tuple = (100,)
    eps_grid: tuple = (0.1,)
    seeds: tuple = (0,)
    restarts: int = 32
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment: {self.experiment}")
        for name in ("dims", "t_grid", "n_grid", "eps_grid", "seeds"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be a non-empty list")
        allowed = ALLOWED_DIMS[self.experiment]
        for d in self.dims:
            if d not in allowed:
                raise ValueError(
                    f"experiment {self.experiment} supports dims {sorted(allowed)}, got {d}"
                )
        if any(t < 0 for t in self.t_grid):
            raise ValueError("t_grid entries must be nonnegative")
        if any(n != int(n) or n < 1 for n in self.n_grid):
            raise ValueError("n_grid entries must be positive integers")
        if any(e <= 0 for e in self.eps_grid):
            raise ValueError("eps_grid entries must be positive")
        if any(s != int(s) or s < 0 for s in self.seeds):
            raise ValueError("seeds must be nonnegative integers")
        if self.restarts != int(self.restarts) or self.restarts < 1:
            raise ValueError("restarts must be a positive integer")


@dataclass(frozen=True)
class ExperimentReport:
    """Sorted result rows plus run metadata."""

    rows: list
    metadata: dict


def parse_config(path: str) -> dict:
    """Read a flat key=value config file; '#' starts a comment, list values
    are comma separated. Unknown keys are rejected."""
    cfg: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key == "experiment":
                cfg[key] = val
            elif key in _LIST_INT_KEYS:
                cfg[key] = tuple(int(x.strip()) for x in val.split(",") if x.strip())
            elif key in _LIST_FLOAT_KEYS:
                cfg[key] = tuple(float(x.strip()) for x in val.split(",") if x.strip())
            elif key == "restarts":
                cfg[key] = int(val)
            elif key == "output_path":
                cfg[key] = val
            else:
                raise ValueError(f"{path}:{lineno}: unknown config key: {key}")
    return cfg


def make_config(
    experiment: str,
    file_cfg: dict | None = None,
    seed: int | None = None,
    restarts: int | None = None,
    output_path: str | None = None,
    env: dict | None = None,
) -> SweepConfig:
    """Merge config-file values with flag overrides; flags win over the file,
    the file wins over the SBQSIM_SEED environment default."""
    file_cfg = dict(file_cfg or {})
    env = os.environ if env is None else env
    named = file_cfg.pop("experiment", None)
    if named is not None and named.replace("_", "-") != experiment:
        raise ValueError(f"config names experiment {named!r} but {experiment!r} was requested")
    kwargs = {"experiment": experiment}
    for key in ("dims", "t_grid", "n_grid", "eps_grid", "seeds", "restarts", "output_path"):
        if key in file_cfg:
            kwargs[key] = file_cfg[key]
    if seed is not None:
        kwargs["seeds"] = (int(seed),)
    elif "seeds" not in kwargs and env.get(SEED_ENV):
        kwargs["seeds"] = (int(env[SEED_ENV]),)
    if restarts is not None:
        kwargs["restarts"] = int(restarts)
    if output_path is not None:
        kwargs["output_path"] = output_path
    return SweepConfig(**kwargs)


# ==================================================================
# sweep runners
# ==================================================================


def _row(experiment, d, t, n, eps, seed, measured, bound, reason=None) -> dict:
    margin = None if measured is None or bound is None else bound - measured
    return {
        "experiment": experiment,
        "d": d,
        "t": t,
        "n": n,
        "eps": eps,
        "seed": seed,
        "measured": measured,
        "bound": bound,
        "margin": margin,
        "pass": margin is not None and margin >= -PASS_SLACK,
        "reason": reason,
    }


def _run_dme(cfg: SweepConfig) -> list:
    rows = []
    for d in cfg.dims:
        for t in cfg.t_grid:
            for n in cfg.n_grid:
                for seed in cfg.seeds:
                    if not n > t:
                        rows.append(
                            _row("dme", d, t, n, None, seed, None, None,
                                 reason=f"hypothesis n > t violated (n={n}, t={t})")
                        )
                        continue
                    sigma = random_density(d, seed)
                    est = dme_error_estimate(
                        sigma, DmeSchedule(t=t, n=n), restarts=cfg.restarts, seed=seed
                    )
                    rows.append(_row("dme", d, t, n, None, seed, est.value, dme_bound(t, n)))
    return rows


def _run_wml(cfg: SweepConfig) -> list:
    rows = []
    for d in cfg.dims:
        for t in cfg.t_grid:
            for n in cfg.n_grid:
                for seed in cfg.seeds:
                    if not n > 2 * d * t:
                        rows.append(
                            _row("wml", d, t, n, None, seed, None, None,
                                 reason=f"hypothesis n > 2dt violated (n={n}, 2dt={2 * d * t})")
                        )
                        continue
                    spec = random_lindblad(d, seed)
                    est = wml_error_estimate(
                        spec, DmeSchedule(t=t, n=n), restarts=cfg.restarts, seed=seed
                    )
                    rows.append(_row("wml", d, t, n, None, seed, est.value, wml_bound(t, n, d)))
    return rows


def _run_lb_ham(cfg: SweepConfig) -> list:
    rows = []
    for t in cfg.t_grid:
        for eps in cfg.eps_grid:
            if not hamiltonian_lb_window(t, eps):
                continue  # the bound makes no claim here
            sched = hamiltonian_lb_schedule(t, eps)
            rows.append(
                _row("lb-ham", 2, t, sched.z, eps, None,
                     hamiltonian_lb_theorem(t, eps), sched.value)
            )
    return rows


def _run_lb_lind(cfg: SweepConfig) -> list:
    rows = []
    for t in cfg.t_grid:
        for eps in cfg.eps_grid:
            if not lindblad_lb_window(t, eps):
                continue  # the bound makes no claim here
            try:
                sched = lindblad_lb_schedule(t, eps)
            except ValueError as e:
                rows.append(_row("lb-lind", 2, t, None, eps, None, None, None, reason=str(e)))
                continue
            rows.append(
                _row("lb-lind", 2, t, sched.m, eps, None,
                     lindblad_lb_theorem(t, eps), sched.value)
            )
    return rows


def _run_qpca(cfg: SweepConfig, shots: int, ideal: bool) -> list:
    rows = []
    big_t = 2
    t_total = 2.0 * math.pi * (2**big_t - 1)
    for m in cfg.n_grid:
        for seed in cfg.seeds:
            rho = random_density(2, seed)
            inst = QpcaInstance(rho=rho, T=big_t, m=m)
            p_ideal = qpca_distribution(inst, ideal=True)
            n = big_t * m
            if ideal:
                hist = run_qpca(inst, shots=shots, seed=seed, ideal=True)
                emp = np.zeros(p_ideal.size)
                for key, count in hist.items():
                    emp[int(key, 2)] = count
                emp /= shots
                measured = 0.5 * float(np.sum(np.abs(emp - p_ideal)))
                bound = 3.0 * 0.5 * float(np.sum(np.sqrt(p_ideal * (1.0 - p_ideal) / shots)))
            else:
                p_step = qpca_distribution(inst, ideal=False)
                measured = 0.5 * float(np.sum(np.abs(p_step - p_ideal)))
                bound = qpca_total_bound(t_total, n)
            rows.append(_row("qpca", 2, t_total, n, None, seed, measured, bound))
    return rows


def _run_diamond(cfg: SweepConfig) -> list:
    rows = []
    for d in cfg.dims:
        for seed in cfg.seeds:
            rng = np.random.default_rng(seed)
            u = random_unitary(d, rng)
            v = random_unitary(d, rng)
            exact = unitary_pair_diamond(u, v, 1).value
            est = diamond_lower_ascent(
                difference(channel_from_unitary(u), channel_from_unitary(v)),
                restarts=cfg.restarts,
                seed=seed,
            )
            rows.append(_row("diamond", d, None, 1, None, seed, est.value, exact))
    return rows


def _sort_key(row: dict):
    return (
        row["experiment"],
        row["d"],
        row["t"] if row["t"] is not None else -1.0,
        row["n"] if row["n"] is not None else -1,
        row["eps"] if row["eps"] is not None else -1.0,
        row["seed"] if row["seed"] is not None else -1,
    )


def run_sweep(cfg: SweepConfig, shots: int = 4096, ideal: bool = False) -> ExperimentReport:
    """Run every grid cell of the configured experiment and collect rows."""
    start = time.perf_counter()
    if cfg.experiment == "dme":
        rows = _run_dme(cfg)
    elif cfg.experiment == "wml":
        rows = _run_wml(cfg)
    elif cfg.experiment == "lb-ham":
        rows = _run_lb_ham(cfg)
    elif cfg.experiment == "lb-lind":
        rows = _run_lb_lind(cfg)
    elif cfg.experiment == "qpca":
        rows = _run_qpca(cfg, shots=shots, ideal=ideal)
    else:
        rows = _run_diamond(cfg)
    rows.sort(key=_sort_key)
    for row in rows:
        row.pop("seed")
    metadata = {
        "version": __version__,
        "seed": list(cfg.seeds),
        "wall_time_ms": (time.perf_counter() - start) * 1000.0,
    }
    return ExperimentReport(rows=rows, metadata=metadata)


# ==================================================================
# emitters
# ==================================================================


def _fmt_float(x) -> str:
    return f"{float(x):.17g}"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return _fmt_float(v)
    return str(v)


def emit_csv(report: ExperimentReport, path: str | None = None) -> str:
    """Serialize the report rows as CSV with the fixed header; floats carry
    17 significant digits. Metadata is not part of the CSV."""
    lines = [CSV_HEADER]
    for row in report.rows:
        lines.append(
            ",".join(
                _csv_cell(row[key])
                for key in ("experiment", "d", "t", "n", "eps", "measured", "bound", "margin", "pass")
            )
        )
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _json_value(v, indent: int) -> str:
    pad = " " * indent
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        inner = ",\n".join(pad + "  " + _json_value(x, indent + 2) for x in v)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(v, dict):
        if not v:
            return "{}"
        inner = ",\n".join(
            pad + "  " + _json_value(str(k), 0) + ": " + _json_value(x, indent + 2)
            for k, x in v.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(v)}")


def emit_json(report: ExperimentReport, path: str | None = None) -> str:
    """Serialize metadata and rows as JSON; floats carry 17 significant
    digits, failed rows carry their reason."""
    payload = {"metadata": report.metadata, "rows": report.rows}
    text = _json_value(payload, 0) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# ==================================================================
# entry point
# ==================================================================


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sbqsim",
        description="sweep sample-based simulation experiments against their analytic bounds",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    helps = {
        "dme": "partial-swap Hamiltonian simulation error vs 4t^2/n",
        "wml": "program-state Lindbladian simulation error vs 3t^2d^2/n",
        "lb-ham": "Hamiltonian copy lower bound claim vs explicit construction",
        "lb-lind": "Lindblad copy lower bound claim vs explicit construction",
        "qpca": "register eigenvalue readout deviation vs schedule bound",
        "diamond": "diamond ascent estimates vs exact unitary-pair values",
    }
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=None, help="single seed, overrides config and env")
        p.add_argument("--restarts", type=int, default=None, help="ascent restarts, overrides config")
        if name == "qpca":
            p.add_argument("--shots", type=int, default=4096)
            p.add_argument(
                "--ideal",
                action="store_true",
                help="sample the exact controlled evolutions instead of the stepped ones",
            )
    args = parser.parse_args(argv)
    try:
        file_cfg = parse_config(args.config) if args.config else {}
        cfg = make_config(
            args.experiment,
            file_cfg,
            seed=args.seed,
            restarts=args.restarts,
            output_path=args.out,
        )
    except (ValueError, OSError) as e:
        print(f"sbqsim: {e}", file=sys.stderr)
        return 2
    report = run_sweep(cfg, shots=getattr(args, "shots", 4096), ideal=getattr(args, "ideal", False))
    text = emit_csv(report) if args.format == "csv" else emit_json(report)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failures = sum(1 for row in report.rows if not row["pass"])
    if failures:
        print(f"{failures} row(s) failed", file=sys.stderr)
        return 1
    return 0
