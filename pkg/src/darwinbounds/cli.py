"""Command-line front-end: sweeps, bound suites, the objectivity witness,
partial-information plots, and random stress runs, emitted as CSV or JSON.

Exit codes: 0 all checks pass, 1 at least one non-conditional check fails,
2 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import bounds as bd
from . import branching as br
from . import correlations as corr
from . import models
from . import qstate as qs
from .qstate import PureState

SCHEMA_VERSION = 1
COLUMNS = (
    "model", "a", "N", "k", "H_S", "H_eps", "I", "J", "D", "delta",
    "bound_name", "lhs", "rhs", "slack", "pass", "method",
)
SEED_ENV_VAR = "DARWINBOUNDS_SEED"
DEFAULT_SEED = 1234
FRAGMENT_CONVENTION = "averages over the exhaustive/sampled fragment set (cap 1024/256)"


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = "simulate"
    model: str = "cmaybe"
    a_grid: list[float] = field(default_factory=lambda: list(np.linspace(0.0, 1.0, 101)))
    n_env: list[int] = field(default_factory=lambda: [4])
    delta_levels: list[float] = field(default_factory=lambda: list(bd.DEFAULT_DELTA_LEVELS))
    seed: int = DEFAULT_SEED
    samples: int = 50
    quantity: str = "I"
    state_file: Optional[str] = None
    output_path: Optional[str] = None
    format: str = "csv"
    dense_cap: int = qs.DENSE_CAP
    restarts: int = 8
    grid_resolution: int = 64
    tolerance: Optional[float] = None

    def validate(self) -> None:
        if not self.a_grid:
            raise ConfigError("a-grid must be nonempty")
        if not self.n_env:
            raise ConfigError("n-env must be nonempty")
        if any(not 0.0 <= a <= 1.0 for a in self.a_grid):
            raise ConfigError("a-grid values must lie in [0, 1]")
        if any(n < 1 for n in self.n_env):
            raise ConfigError("n-env values must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.dense_cap > qs.DENSE_CAP:
            raise ConfigError(f"dense cap above the supported maximum {qs.DENSE_CAP}")

    def optimizer_config(self) -> corr.OptimizerConfig:
        return corr.OptimizerConfig(
            restarts=self.restarts,
            grid_resolution=self.grid_resolution,
            seed=self.seed + 1,
            maxfev_per_param=150,
        )


@dataclass
class SweepRow:
    model: str
    bound_name: str
    lhs: float
    rhs: float
    passed: bool
    method: str
    a: Optional[float] = None
    n_env: Optional[int] = None
    k: Optional[int] = None
    H_S: Optional[float] = None
    H_eps: Optional[float] = None
    I: Optional[float] = None
    J: Optional[float] = None
    D: Optional[float] = None
    delta: Optional[float] = None
    tolerance: float = bd.EXACT_TOL

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def validate(self) -> None:
        numeric = (self.a, self.H_S, self.H_eps, self.I, self.J, self.D,
                   self.delta, self.lhs, self.rhs)
        for v in numeric:
            if v is not None and not math.isfinite(v):
                raise ValueError(f"non-finite value in row {self.bound_name}")
        conditional = "conditional" in self.method
        if not conditional and self.passed != (self.slack >= -self.tolerance):
            raise ValueError(f"pass flag inconsistent with slack in row {self.bound_name}")

    def cells(self) -> list[str]:
        def num(v):
            return "" if v is None else f"{v:.12g}"

        return [
            self.model, num(self.a),
            "" if self.n_env is None else str(self.n_env),
            "" if self.k is None else str(self.k),
            num(self.H_S), num(self.H_eps), num(self.I), num(self.J), num(self.D),
            num(self.delta), self.bound_name, num(self.lhs), num(self.rhs),
            num(self.slack), "true" if self.passed else "false", self.method,
        ]

    def as_dict(self) -> dict:
        return dict(zip(COLUMNS, self.cells()))


def write_rows(rows: Sequence[SweepRow], path: Optional[str], fmt: str, config: RunConfig) -> None:
    for row in rows:
        row.validate()
    if fmt == "csv":
        lines = [f"# schema={SCHEMA_VERSION}", ",".join(COLUMNS)]
        lines += [",".join(row.cells()) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "schema": SCHEMA_VERSION,
            "command": config.command,
            "seed": config.seed,
            "fragment_convention": FRAGMENT_CONVENTION,
            "rows": [row.as_dict() for row in rows],
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# state files


def save_state_file(state: PureState, path: str) -> None:
    """Line format: header 'dims: d0 d1 ...', then 're im' per amplitude."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("dims: " + " ".join(str(d) for d in state.dims) + "\n")
        for amp in state.amplitudes:
            fh.write(f"{amp.real:.17g} {amp.imag:.17g}\n")


def load_state_file(path: str) -> PureState:
    """Parse and validate a state file; no silent renormalization."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read state file {path}: {exc}") from exc
    if not lines or not lines[0].startswith("dims:"):
        raise ConfigError(f"{path}: line 1: expected header 'dims: d0 d1 ...'")
    try:
        dims = [int(tok) for tok in lines[0][len("dims:"):].split()]
    except ValueError as exc:
        raise ConfigError(f"{path}: line 1: bad dimension list ({exc})") from exc
    if not dims or any(d < 1 for d in dims):
        raise ConfigError(f"{path}: line 1: dimensions must be positive integers")
    total = math.prod(dims)
    amps = np.empty(total, dtype=complex)
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != total:
        raise ConfigError(
            f"{path}: expected {total} amplitude lines, found {len(body)}"
        )
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != 2:
            raise ConfigError(f"{path}: line {i + 2}: expected 're im'")
        try:
            amps[i] = complex(float(parts[0]), float(parts[1]))
        except ValueError as exc:
            raise ConfigError(f"{path}: line {i + 2}: bad number ({exc})") from exc
    norm = float(np.linalg.norm(amps))
    if abs(norm - 1.0) > 1e-8:
        raise ConfigError(
            f"{path}: state norm deviates from 1 by {abs(norm - 1.0):.3e}; refusing to renormalize"
        )
    return PureState(dims, amps / norm)


# ---------------------------------------------------------------------------
# corpus construction


def build_corpus(config: RunConfig) -> list[tuple[str, object, Optional[float], int]]:
    """(label, universe, coupling_a, n_env) tuples for the selected model."""
    out = []
    if config.model == "cmaybe":
        for n in config.n_env:
            for a in config.a_grid:
                u = models.cmaybe_universe(models.CMaybeParams(float(a), n))
                out.append(("cmaybe", u, float(a), n))
    elif config.model == "ghz":
        for n in config.n_env:
            out.append(("ghz", models.ghz(n + 1), None, n))
    elif config.model == "random-branching":
        for i in range(config.samples):
            for n in config.n_env:
                u = models.random_branching(n, seed=config.seed + 7919 * i)
                out.append(("random-branching", u, None, n))
    elif config.model == "haar":
        for i in range(config.samples):
            for n in config.n_env:
                if 2 ** (n + 1) > config.dense_cap:
                    raise ConfigError(f"haar universe with N={n} exceeds the dense cap")
                u = models.haar_random_pure((2,) * (n + 1), seed=config.seed + 104729 * i)
                out.append(("haar", u, None, n))
    elif config.model == "file":
        if not config.state_file:
            raise ConfigError("model=file requires --state-file")
        u = load_state_file(config.state_file)
        out.append(("file", u, None, u.n_sites - 1))
    else:
        raise ConfigError(f"unknown model {config.model!r}")
    return out


def _state_summary(table: bd.FragmentTable) -> dict:
    j1, _ = table.j_fragment((1,))
    d1 = table.mutual((1,)) - j1
    delta_bar, _ = table.average_deficit()
    return {
        "H_S": table.h_s,
        "H_eps": table.entropy((1,)),
        "I": table.mutual((1,)),
        "J": j1,
        "D": d1,
        "delta": delta_bar,
    }


def _method_string(check: bd.BoundCheck) -> str:
    return "+".join(sorted(check.method_flags))


def _check_row(label, a, n, check: bd.BoundCheck, summary: dict,
               k: Optional[int] = None, delta: Optional[float] = None) -> SweepRow:
    return SweepRow(
        model=label, bound_name=check.name, lhs=check.lhs, rhs=check.rhs,
        passed=check.passed, method=_method_string(check), a=a, n_env=n, k=k,
        H_S=summary["H_S"], H_eps=summary["H_eps"], I=summary["I"],
        J=summary["J"], D=summary["D"],
        delta=summary["delta"] if delta is None else delta,
        tolerance=check.tolerance,
    )


# ---------------------------------------------------------------------------
# commands


def run_simulate(config: RunConfig) -> tuple[list[SweepRow], int]:
    """One row per (a, N): simulated single-site values, with the agreement
    column (lhs) holding the worst deviation from the closed forms over
    H_S, H_eps, J, D, delta, and the discord-bound curve min(delta H_S, H_eps)."""
    if config.model != "cmaybe":
        raise ConfigError("simulate supports only the cmaybe model")
    tol = config.tolerance if config.tolerance is not None else 1e-6
    rows = []
    status = 0
    for n in config.n_env:
        for a in config.a_grid:
            params = models.CMaybeParams(float(a), n)
            cf = models.closed_forms(params)
            u = models.cmaybe_universe(params)
            table = bd.FragmentTable(u, seed=config.seed)
            h_s = table.h_s
            h_eps = table.entropy((1,))
            j1, _ = table.j_fragment((1,))
            d1 = table.mutual((1,)) - j1
            delta_1, _ = table.delta_frag((1,))
            sim_bound = min(delta_1 * h_s, h_eps)
            closed_bound = min(cf.delta * cf.H_S, cf.H_eps)
            deviation = max(
                abs(h_s - cf.H_S), abs(h_eps - cf.H_eps), abs(j1 - cf.J_bar),
                abs(d1 - cf.D_bar), abs(delta_1 - cf.delta),
                abs(sim_bound - closed_bound),
            )
            passed = deviation <= tol
            status = status if passed else 1
            rows.append(SweepRow(
                model="cmaybe", a=float(a), n_env=n, k=1,
                bound_name="closed-form-agreement",
                lhs=deviation, rhs=tol, passed=passed, tolerance=0.0,
                H_S=h_s, H_eps=h_eps, I=table.mutual((1,)), J=j1, D=d1,
                delta=delta_1, method="rank-two-exact",
            ))
    return rows, status


def run_bounds(config: RunConfig) -> tuple[list[SweepRow], int]:
    rows = []
    status = 0
    for idx, (label, universe, a, n) in enumerate(build_corpus(config)):
        table = bd.FragmentTable(universe, config.optimizer_config(), seed=config.seed + idx)
        summary = _state_summary(table)
        for check, k, level in bd.standard_checks(universe, table, config.delta_levels):
            if config.tolerance is not None:
                passed = check.slack >= -config.tolerance
                check = bd.BoundCheck(check.name, check.lhs, check.rhs, config.tolerance,
                                      passed or check.conditional, check.method_flags, check.note)
            rows.append(_check_row(label, a, n, check, summary, k=k, delta=level))
            if not check.passed and not check.conditional:
                status = 1
    return rows, status


def run_witness(config: RunConfig) -> tuple[list[SweepRow], int]:
    rows = []
    status = 0
    for idx, (label, universe, a, n) in enumerate(build_corpus(config)):
        table = bd.FragmentTable(universe, seed=config.seed + idx)
        h_s = table.h_s
        summary = {"H_S": h_s, "H_eps": table.entropy((1,)), "I": table.mutual((1,)),
                   "J": None, "D": None, "delta": None}
        for level in config.delta_levels:
            result = bd.cmi_objectivity_witness(universe, level, table)
            verdict = (
                f"objective at delta={level:g}, k_delta={result.k_delta}"
                if result.k_delta is not None
                else f"not witnessed at delta={level:g}"
            )
            print(f"{label} N={n}" + (f" a={a:g}" if a is not None else "") + f": {verdict}")
            for k, lo, mean, hi in zip(result.scan.k_values, result.scan.minima,
                                       result.scan.means, result.scan.maxima):
                rows.append(SweepRow(
                    model=label, bound_name="cmi-scan", a=a, n_env=n, k=k,
                    H_S=h_s, I=mean, lhs=hi, rhs=2.0 * level * h_s,
                    passed=hi <= 2.0 * level * h_s + bd.EXACT_TOL,
                    method="exact", delta=level, tolerance=bd.EXACT_TOL,
                ))
            rows.append(_check_row(label, a, n, result.check, summary,
                                   k=result.k_delta, delta=level))
            if not result.check.passed and not result.check.conditional:
                status = 1
    return rows, status


def run_pip(config: RunConfig) -> tuple[list[SweepRow], int]:
    rows = []
    for idx, (label, universe, a, n) in enumerate(build_corpus(config)):
        table = bd.FragmentTable(universe, config.optimizer_config(), seed=config.seed + idx)
        h_s = table.h_s
        for k, lo, mean, hi in bd.partial_information_plot(universe, config.quantity, table):
            row = SweepRow(
                model=label, bound_name=f"pip-{config.quantity}", a=a, n_env=n, k=k,
                H_S=h_s, I=mean, lhs=lo, rhs=hi, passed=True,
                method="exact" if isinstance(universe, br.BranchingState) else "mixed",
                tolerance=math.inf,
            )
            rows.append(row)
    return rows, 0


def run_random_stress(config: RunConfig) -> tuple[list[SweepRow], int]:
    rows = []
    status = 0
    for model in ("haar", "random-branching"):
        sub = RunConfig(**{**config.__dict__, "model": model})
        if model == "haar":
            sub.n_env = [n for n in config.n_env if 2 ** (n + 1) <= config.dense_cap]
        got, st = run_bounds(sub)
        rows += got
        status = max(status, st)
    return rows, status


# ---------------------------------------------------------------------------
# argument parsing


def _parse_floats(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range syntax is start:stop:count, got {text!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ConfigError("range count must be positive")
        return [float(v) for v in np.linspace(start, stop, count)]
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad float list {text!r}: {exc}") from exc


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}: {exc}") from exc


def load_config_file(path: str) -> dict:
    """Flat key=value lines; repeated keys accumulate into lists."""
    out: dict = {}
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for i, line in enumerate(lines):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {i + 1}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in out:
            prev = out[key] if isinstance(out[key], list) else [out[key]]
            out[key] = prev + [value]
        else:
            out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darwinbounds",
        description="Correlation bounds and objectivity witnesses for "
                    "system-environment universes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("simulate", "coupling sweep with closed-form cross-check"),
        ("bounds", "run the inequality checkers over a state corpus"),
        ("witness", "conditional-mutual-information objectivity witness"),
        ("pip", "partial-information plot data"),
        ("random-stress", "seeded random-state stress suite"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--model", default=None,
                       choices=["cmaybe", "ghz", "random-branching", "haar", "file"])
        p.add_argument("--a-grid", default=None, help="comma list or start:stop:count")
        p.add_argument("--n-env", default=None, help="comma list of environment sizes")
        p.add_argument("--delta", default=None, help="comma list of deficit levels")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--quantity", default=None, choices=["I", "J", "D", "J-reversed"])
        p.add_argument("--state-file", default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", default=None, choices=["csv", "json"])
        p.add_argument("--restarts", type=int, default=None)
        p.add_argument("--grid-resolution", type=int, default=None)
        p.add_argument("--dense-cap", type=int, default=None)
        p.add_argument("--tolerance", type=float, default=None)
        p.add_argument("--config", default=None, help="key=value config file")
    return parser


_CONFIG_KEYS = {
    "model": str, "seed": int, "samples": int, "quantity": str, "state_file": str,
    "output_path": str, "format": str, "dense_cap": int, "restarts": int,
    "grid_resolution": int, "tolerance": float,
}


def make_run_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command)
    seed_configured = False
    if args.config:
        raw = load_config_file(args.config)
        for key, value in raw.items():
            attr = key.replace("-", "_")
            if attr == "a_grid":
                vals = value if isinstance(value, list) else [value]
                config.a_grid = [v for item in vals for v in _parse_floats(item)]
            elif attr == "n_env":
                vals = value if isinstance(value, list) else [value]
                config.n_env = [v for item in vals for v in _parse_ints(item)]
            elif attr in ("delta", "delta_levels"):
                vals = value if isinstance(value, list) else [value]
                config.delta_levels = [v for item in vals for v in _parse_floats(item)]
            elif attr in _CONFIG_KEYS:
                if isinstance(value, list):
                    raise ConfigError(f"config key {key} repeated")
                setattr(config, attr, _CONFIG_KEYS[attr](value))
                seed_configured = seed_configured or attr == "seed"
            else:
                raise ConfigError(f"unknown config key {key!r}")
    if args.seed is not None:
        config.seed = args.seed
    elif not seed_configured:
        env_seed = os.environ.get(SEED_ENV_VAR)
        if env_seed is not None:
            try:
                config.seed = int(env_seed)
            except ValueError as exc:
                raise ConfigError(f"bad {SEED_ENV_VAR} value {env_seed!r}") from exc
    if args.a_grid is not None:
        config.a_grid = _parse_floats(args.a_grid)
    if args.n_env is not None:
        config.n_env = _parse_ints(args.n_env)
    if args.delta is not None:
        config.delta_levels = _parse_floats(args.delta)
    for attr in ("model", "samples", "quantity", "state_file", "format",
                 "dense_cap", "restarts", "grid_resolution", "tolerance"):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(config, attr, value)
    if args.out is not None:
        config.output_path = args.out
    config.validate()
    return config


COMMANDS = {
    "simulate": run_simulate,
    "bounds": run_bounds,
    "witness": run_witness,
    "pip": run_pip,
    "random-stress": run_random_stress,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = make_run_config(args)
        rows, status = COMMANDS[config.command](config)
        write_rows(rows, config.output_path, config.format, config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return status


if __name__ == "__main__":
    sys.exit(main())
