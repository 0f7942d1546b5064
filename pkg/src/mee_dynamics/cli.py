"""Command-line runner: scenario traces, finite-boost extraction and the oracle suite.

Exit codes: 0 success, 2 invalid configuration, 3 runtime or I/O failure,
4 oracle-suite failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .baths import BathKind, BathModel
from .dynamics import EventReport, Trajectory, detect_events, integrate, integrate_full
from .entanglement import concurrence
from .errors import InvalidConfig, MeeError, PhysicalityLost, Unphysical
from .filtering import (
    ALPHA_MAX,
    LocalFilter,
    apply_filter,
    filtered_concurrence,
    minimize_F_oracle,
    optimal_boost,
    partial_extraction,
)
from .plotting import line_plot
from .qstate import (
    XStateParams,
    random_density,
    random_x_params,
)

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_ORACLE = 0, 2, 3, 4

CSV_FIELDS = (
    "t", "a", "b", "c", "d", "concurrence", "mee", "mee_singular", "entropy",
    "purity", "C1", "C2", "C3", "alpha", "fidelity_phi1",
)
EXTRACTION_FIELDS = ("t", "concurrence", "extracted")
OUTPUT_KINDS = ("csv", "jsonl", "svg")
CONFIG_KEYS = {"bath", "gamma", "n", "psi", "initial", "t_end", "dt", "outputs", "alpha", "seed"}


@dataclass(frozen=True)
class ScenarioConfig:
    """One experiment. Times ``t_end`` and ``dt`` are in units of ``1/gamma``."""

    bath: str = "independent"
    gamma: float = 1.0
    n: float = 0.0
    psi: float = 0.0
    initial_kind: str = "bell"
    initial: tuple = (1.0, 1.0, -1.0)
    t_end: float = 5.0
    dt: float = 1e-3
    outputs: tuple = ("csv",)
    alpha: Optional[float] = None
    seed: int = 0

    @property
    def model(self) -> BathModel:
        return BathModel(BathKind(self.bath), self.gamma, self.n, self.psi)

    @property
    def x0(self) -> XStateParams:
        if self.initial_kind == "bell":
            return XStateParams.from_bell(*self.initial)
        return XStateParams(*self.initial)

    def to_dict(self) -> dict:
        return {
            "bath": self.bath,
            "gamma": self.gamma,
            "n": self.n,
            "psi": self.psi,
            "initial": {self.initial_kind: list(self.initial)},
            "t_end": self.t_end,
            "dt": self.dt,
            "outputs": list(self.outputs),
            "alpha": self.alpha,
            "seed": self.seed,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _number(doc, key, default, *, low=None, strict=False, integer=False):
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfig(key, f"expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise InvalidConfig(key, f"expected an integer, got {value!r}")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise InvalidConfig(key, f"must be finite, got {value!r}")
    if low is not None and (value <= low if strict else value < low):
        bound = ">" if strict else ">="
        raise InvalidConfig(key, f"must be {bound} {low}, got {value!r}")
    return value


def parse_config(doc: dict) -> ScenarioConfig:
    """Validate a JSON config document; errors name the offending field."""
    if not isinstance(doc, dict):
        raise InvalidConfig("config", "top level must be a JSON object")
    unknown = sorted(set(doc) - CONFIG_KEYS)
    if unknown:
        raise InvalidConfig(unknown[0], "unknown field")
    bath = doc.get("bath", "independent")
    if bath not in {k.value for k in BathKind}:
        raise InvalidConfig("bath", f"expected independent, common or squeezed, got {bath!r}")
    gamma = _number(doc, "gamma", 1.0, low=0, strict=True)
    n = _number(doc, "n", 0.0, low=0)
    psi = _number(doc, "psi", 0.0)
    t_end = _number(doc, "t_end", 5.0, low=0)
    dt = _number(doc, "dt", 1e-3, low=0, strict=True)
    seed = _number(doc, "seed", 0, integer=True)

    initial = doc.get("initial", {"bell": [1.0, 1.0, -1.0]})
    if not (isinstance(initial, dict) and len(initial) == 1):
        raise InvalidConfig("initial", 'expected {"bell": [C1, C2, C3]} or {"x": [a, b, c, d]}')
    (kind, values), = initial.items()
    size = {"bell": 3, "x": 4}.get(kind)
    if size is None:
        raise InvalidConfig("initial", f"unknown initial-state kind {kind!r}")
    if not (
        isinstance(values, list)
        and len(values) == size
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values)
    ):
        raise InvalidConfig("initial", f"{kind} needs {size} numbers, got {values!r}")
    values = tuple(float(v) for v in values)

    outputs = doc.get("outputs", ["csv"])
    if not (isinstance(outputs, list) and all(o in OUTPUT_KINDS for o in outputs)):
        raise InvalidConfig("outputs", f"expected a list drawn from {OUTPUT_KINDS}, got {outputs!r}")
    outputs = tuple(o for o in OUTPUT_KINDS if o in outputs)

    alpha = doc.get("alpha")
    if alpha is not None:
        alpha = _number(doc, "alpha", None)
        if abs(alpha) > ALPHA_MAX:
            raise InvalidConfig("alpha", f"|alpha| must not exceed {ALPHA_MAX:g}")

    cfg = ScenarioConfig(bath, gamma, n, psi, kind, values, t_end, dt, outputs, alpha, seed)
    if not cfg.x0.is_physical():
        raise InvalidConfig("initial", f"{values!r} is not a physical state")
    if t_end > 0 and dt > t_end:
        raise InvalidConfig("dt", f"must not exceed t_end = {t_end!r}")
    if dt * (1 + 2 * n) > 0.1:
        raise InvalidConfig("dt", "dt (1 + 2n) must be at most 0.1")
    return cfg


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    value = float(value)
    if not math.isfinite(value):
        return ""
    return repr(value)


def _json_value(value):
    if value is None or isinstance(value, bool):
        return value
    value = float(value)
    return value if math.isfinite(value) else None


def sample_rows(traj: Trajectory, gamma: float):
    """Rows of the trace schema, time reported as ``gamma t``."""
    for s in traj.samples:
        bell = s.bell.as_tuple() if s.bell is not None else (None, None, None)
        yield dict(
            zip(
                CSV_FIELDS,
                (
                    s.t * gamma, *s.x.as_tuple(), s.concurrence, s.mee, s.mee_singular,
                    s.entropy, s.purity, *bell, s.alpha, s.fidelity_phi1,
                ),
            )
        )


def write_csv(path: Path, fields, rows) -> None:
    lines = [",".join(fields)]
    lines.extend(",".join(_fmt(row[f]) for f in fields) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def write_jsonl(path: Path, fields, rows) -> None:
    lines = [
        json.dumps({f: _json_value(row[f]) for f in fields}, allow_nan=False) for row in rows
    ]
    path.write_text("".join(line + "\n" for line in lines))


def simulate(cfg: ScenarioConfig) -> Trajectory:
    """Integrate a scenario in physical time ``t_end / gamma``."""
    model = cfg.model
    t_end, dt = cfg.t_end / cfg.gamma, cfg.dt / cfg.gamma
    if model.m and abs(model.m * math.sin(model.psi)) > 1e-15:
        return integrate_full(model, cfg.x0.density(), t_end, dt)
    return integrate(model, cfg.x0, t_end, dt)


def format_events(report: EventReport) -> str:
    death = report.sudden_death_time
    lines = ["sudden death: " + ("none" if death is None else f"gamma t = {death:.6g}")]
    for label, windows in (
        ("MEE revivals", report.revival_windows),
        ("concurrence revivals", report.concurrence_revival_windows),
    ):
        lines.append(f"{label}: {len(windows)}")
        lines.extend(f"  [{a:.6g}, {b:.6g}] rise {r:.6g}" for a, b, r in windows)
    return "\n".join(lines)


def _scaled_events(report: EventReport, gamma: float) -> EventReport:
    def scale(ws):
        return [(a * gamma, b * gamma, r) for a, b, r in ws]

    death = report.sudden_death_time
    return EventReport(
        None if death is None else death * gamma,
        scale(report.revival_windows),
        scale(report.concurrence_revival_windows),
    )


def run_scenario(cfg: ScenarioConfig, out_dir: Path, stream=sys.stdout) -> dict:
    """Simulate, write the requested trace files and print the event summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj = simulate(cfg)
    rows = list(sample_rows(traj, cfg.gamma))
    written = {}
    if "csv" in cfg.outputs:
        written["csv"] = out_dir / "trace.csv"
        write_csv(written["csv"], CSV_FIELDS, rows)
    if "jsonl" in cfg.outputs:
        written["jsonl"] = out_dir / "trace.jsonl"
        write_jsonl(written["jsonl"], CSV_FIELDS, rows)
    if "svg" in cfg.outputs:
        written["svg"] = out_dir / "trace.svg"
        t = [r["t"] for r in rows]
        series = [
            ("concurrence", [r["concurrence"] for r in rows]),
            ("MEE", [r["mee"] for r in rows]),
            ("entropy", [r["entropy"] for r in rows]),
        ]
        title = f"{cfg.bath} bath, n = {cfg.n:g}"
        written["svg"].write_text(line_plot(t, series, title, "gamma t"))
    report = _scaled_events(detect_events(traj), cfg.gamma) if len(rows) > 1 else None
    if report is not None:
        print(format_events(report), file=stream)
    return {"trajectory": traj, "events": report, "files": written}


def run_extraction(cfg: ScenarioConfig, out_dir: Path, stream=sys.stdout) -> dict:
    """Concurrence and finite-boost extracted concurrence along a trajectory."""
    if cfg.alpha is None:
        raise InvalidConfig("alpha", "required for extraction runs")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj = simulate(cfg)
    rows = [
        {
            "t": s.t * cfg.gamma,
            "concurrence": s.concurrence,
            "extracted": partial_extraction(s.x, cfg.alpha),
        }
        for s in traj.samples
    ]
    written = {}
    if "csv" in cfg.outputs:
        written["csv"] = out_dir / "extraction.csv"
        write_csv(written["csv"], EXTRACTION_FIELDS, rows)
    if "jsonl" in cfg.outputs:
        written["jsonl"] = out_dir / "extraction.jsonl"
        write_jsonl(written["jsonl"], EXTRACTION_FIELDS, rows)
    if "svg" in cfg.outputs:
        written["svg"] = out_dir / "extraction.svg"
        t = [r["t"] for r in rows]
        series = [
            ("concurrence", [r["concurrence"] for r in rows]),
            (f"extracted, alpha = {cfg.alpha:g}", [r["extracted"] for r in rows]),
        ]
        written["svg"].write_text(line_plot(t, series, f"{cfg.bath} bath, n = {cfg.n:g}", "gamma t"))
    final = rows[-1]
    print(
        f"alpha = {cfg.alpha:g}: at gamma t = {final['t']:.6g} concurrence "
        f"{final['concurrence']:.6g}, extracted {final['extracted']:.6g}",
        file=stream,
    )
    return {"trajectory": traj, "rows": rows, "files": written}


ORACLE_TOLERANCES = {
    "boost_vs_F_oracle": 1e-6,
    "bell_diagonal_alpha": 0.0,
    "concurrence_transformation_law": 1e-9,
    "reduced_vs_full": 1e-8,
}


def run_oracle_suite(seed: int, count: int, tolerance_scale: float = 1.0) -> dict:
    """Cross-check closed forms against independent routes.

    Returns a report with one entry per check, its largest residual and
    whether it met ``tolerance * tolerance_scale``.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    residuals = dict.fromkeys(ORACLE_TOLERANCES, 0.0)

    bell = XStateParams(0.3, -0.2, 0.1, 0.0)
    pair, _ = minimize_F_oracle(bell.correlation(), seed=seed)
    residuals["bell_diagonal_alpha"] = abs(pair.m[3] - optimal_boost(bell).alpha)

    for k in range(count):
        x = random_x_params(rng)
        pair, _ = minimize_F_oracle(x.correlation(), seed=seed + k)
        alpha = optimal_boost(x).alpha
        residuals["boost_vs_F_oracle"] = max(
            residuals["boost_vs_F_oracle"], abs(pair.m[3] - alpha), abs(pair.n[3] - alpha)
        )
        rho = random_density(rng)
        g = rng.normal(size=(2, 2, 2)) + 1j * rng.normal(size=(2, 2, 2))
        f = LocalFilter(g[0], g[1])
        diff = abs(filtered_concurrence(rho, f) - concurrence(apply_filter(rho, f)))
        residuals["concurrence_transformation_law"] = max(
            residuals["concurrence_transformation_law"], diff
        )

    x0 = random_x_params(rng)
    for kind in BathKind:
        model = BathModel(kind, 1.0, 0.05)
        reduced = integrate(model, x0, 1.0, 1e-3)
        full = integrate_full(model, x0.density(), 1.0, 1e-3)
        residuals["reduced_vs_full"] = max(
            residuals["reduced_vs_full"], float(np.abs(reduced.params - full.params).max())
        )

    checks = []
    for name, tol in ORACLE_TOLERANCES.items():
        limit = tol * tolerance_scale
        checks.append(
            {"name": name, "max_residual": residuals[name], "tolerance": limit,
             "passed": bool(residuals[name] <= limit)}
        )
    return {
        "seed": seed,
        "count": count,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


def _load_config(args) -> ScenarioConfig:
    doc = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise InvalidConfig("config", f"cannot read {args.config}: {exc.strerror}")
        except json.JSONDecodeError as exc:
            raise InvalidConfig("config", f"invalid JSON: {exc.msg}")
        if not isinstance(doc, dict):
            raise InvalidConfig("config", "top level must be a JSON object")
    overrides = {
        "bath": args.bath, "n": args.n, "gamma": args.gamma, "psi": args.psi,
        "t_end": args.t_end, "dt": args.dt, "seed": args.seed,
    }
    if getattr(args, "alpha", None) is not None:
        overrides["alpha"] = args.alpha
    if args.bell is not None:
        overrides["initial"] = {"bell": list(args.bell)}
    if args.x is not None:
        overrides["initial"] = {"x": list(args.x)}
    doc.update({k: v for k, v in overrides.items() if v is not None})
    if args.svg:
        doc["outputs"] = list(doc.get("outputs", ["csv"])) + ["svg"]
    if args.jsonl:
        doc["outputs"] = list(doc.get("outputs", ["csv"])) + ["jsonl"]
    return parse_config(doc)


def _scenario_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON scenario file; flags override its fields")
    p.add_argument("--bath", choices=[k.value for k in BathKind])
    p.add_argument("--n", type=float, help="mean thermal photon number")
    p.add_argument("--gamma", type=float, help="decay rate")
    p.add_argument("--psi", type=float, help="squeezing phase (radians)")
    p.add_argument("--t-end", dest="t_end", type=float, help="final time in units of 1/gamma")
    p.add_argument("--dt", type=float, help="step in units of 1/gamma")
    p.add_argument("--seed", type=int)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--bell", type=float, nargs=3, metavar=("C1", "C2", "C3"))
    group.add_argument("--x", type=float, nargs=4, metavar=("A", "B", "C", "D"))
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--svg", action="store_true", help="also write an SVG plot")
    p.add_argument("--jsonl", action="store_true", help="also write JSON lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mee-dynamics",
        description="Entanglement and maximum extractable entanglement of two qubits in baths.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _scenario_arguments(sub.add_parser("evolve", help="integrate a scenario and write traces"))
    ext = sub.add_parser("extract", help="finite-boost extraction along a trajectory")
    _scenario_arguments(ext)
    ext.add_argument("--alpha", type=float, help="boost parameter")
    orc = sub.add_parser("oracle", help="run the closed-form vs oracle checks")
    orc.add_argument("--count", type=int, default=100)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--tolerance-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    orc.add_argument("--out", help="write the JSON report here as well")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.command == "oracle":
            if args.count < 1:
                raise InvalidConfig("count", "must be at least 1")
            report = run_oracle_suite(args.seed, args.count, args.tolerance_scale)
            text = json.dumps(report, indent=2, sort_keys=True)
            print(text)
            if args.out:
                Path(args.out).write_text(text + "\n")
            return EXIT_OK if report["passed"] else EXIT_ORACLE
        cfg = _load_config(args)
        if args.command == "evolve":
            run_scenario(cfg, Path(args.out))
        else:
            run_extraction(cfg, Path(args.out))
        return EXIT_OK
    except InvalidConfig as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MeeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
