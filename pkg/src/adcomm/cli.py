"""Command-line front end.

Every command prints a short human-readable summary and writes a JSON report
holding the configuration, a digest of the inputs, the results block, the
wall-clock time and the package version.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import metadata, resources
from pathlib import Path

import numpy as np

from . import catalog
from .classical import InfeasibleResources, Unachievable as ClassicalUnachievable
from .classical import classical_total, classical_value
from .distributed import (
    DistributedTask,
    OutOfRange,
    ThetaOutOfRange,
    Unachievable as DistributedUnachievable,
    advantage_curve,
    certify_perfect_exclusion,
    classical_bound,
    classical_common_resource,
    curve_csv,
    pbr_optimal_ratio,
    pbr_single_antidist,
    pbr_theta_range,
    product_states,
    quantum_common_resource,
    sufficient_condition,
)
from .geometry.exact import fmt
from .quantum.conic import Infeasible, NumericalFailure
from .quantum.discrimination import antidistinguishability
from .quantum.seesaw import Unachievable as QuantumUnachievable
from .quantum.seesaw import min_total_resource, mixed_total_resource, seesaw, seesaw_samples
from .quantum.states import InvalidPOVM, InvalidState, NonUnit, check_unit, proj
from .quantum.strategy import QuantumStrategy, verify_strategy
from .scenario import (
    DEFAULT_DECODER_CAP,
    DEFAULT_VERTEX_CAP,
    FigureOfMerit,
    ParseError,
    ScenarioSpec,
    SizeOverflow,
    facet_table,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3
EXIT_INPUT = 4

INFEASIBLE_ERRORS = (
    InfeasibleResources,
    ClassicalUnachievable,
    QuantumUnachievable,
    DistributedUnachievable,
    Infeasible,
    OutOfRange,
    ThetaOutOfRange,
)
INPUT_ERRORS = (ParseError, SizeOverflow, InvalidState, InvalidPOVM, NonUnit, json.JSONDecodeError,
                FileNotFoundError, KeyError, ValueError)

logger = logging.getLogger("adcomm")


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def bundled(name: str) -> Path:
    return Path(str(resources.files("adcomm") / "data" / name))


# ---------------------------------------------------------------- config and report

@dataclass
class RunConfig:
    command: str
    scenario: str | None = None
    fom: str | None = None
    resources: str | None = None
    target: float | None = None
    strategy: str | None = None
    states: str | None = None
    N: str | None = None
    n: int | None = None
    theta: float | None = None
    dim: int | None = None
    restarts: int = 20
    seed: int = 42
    tol: float = 1e-7
    product: bool = False
    mixed: bool = False
    out: str | None = None
    cap_decoders: int = DEFAULT_DECODER_CAP
    cap_vertices: int = DEFAULT_VERTEX_CAP

    def __post_init__(self):
        if self.cap_decoders <= 0 or self.cap_vertices <= 0:
            raise ValueError("caps must be positive")


@dataclass
class Report:
    config: dict
    inputs_digest: str
    results: dict
    wall_clock_s: float
    version: str
    lines: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "command": self.config["command"],
            "config": self.config,
            "inputs_digest": self.inputs_digest,
            "results": self.results,
            "wall_clock_s": self.wall_clock_s,
            "version": self.version,
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


# ---------------------------------------------------------------- input helpers

def load_scenario(arg: str | None) -> tuple[ScenarioSpec, str | None, bytes]:
    """A bundled key (``222``, ``322D``, ...) or a path to a scenario JSON."""
    if arg is None:
        raise ParseError("--scenario is required")
    if arg in catalog.SCENARIOS:
        path = bundled(f"scenarios/{arg}.json")
        key = arg
    else:
        path = Path(arg)
        key = None
    raw = path.read_bytes()
    spec = ScenarioSpec.load(path)
    if key is None:
        key = next((k for k, s in catalog.SCENARIOS.items() if s == spec), None)
    return spec, key, raw


def load_fom(arg: str | None, spec: ScenarioSpec, key: str | None) -> FigureOfMerit:
    """A catalog name (``I6``, ``r3``) for bundled scenarios or an expression."""
    if arg is None:
        raise ParseError("--fom is required")
    if key is not None:
        try:
            return FigureOfMerit.parse(catalog.reference(key, arg), spec)
        except KeyError:
            pass
    return FigureOfMerit.parse(arg, spec)


def parse_resources(arg: str | None, N: int) -> list[Fraction]:
    if arg is None:
        raise ParseError("--resources is required")
    try:
        vals = [Fraction(v.strip()) for v in arg.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad resource list {arg!r}") from exc
    if len(vals) != N:
        raise ParseError(f"expected {N} resource values, got {len(vals)}")
    return vals


def parse_range(arg: str | None, default: list[int]) -> list[int]:
    if arg is None:
        return default
    if ".." in arg:
        a, b = arg.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(v) for v in arg.split(",")]


def load_kets(path: str | None) -> list[np.ndarray]:
    p = Path(path) if path else bundled("reference_states.json")
    obj = json.loads(p.read_text())
    return [check_unit(np.array([a + 1j * b for a, b in v])) for v in obj["states"]]


# ---------------------------------------------------------------- commands

def run_facets(cfg: RunConfig) -> tuple[dict, list[str], list[bytes]]:
    spec, key, raw = load_scenario(cfg.scenario)
    table = facet_table(spec, cap_decoders=cfg.cap_decoders, cap_vertices=cfg.cap_vertices)
    res = table.to_json()
    lines = [f"{spec.name} kind={spec.kind}: {table.n_facets} facets, {table.n_trivial} trivial, "
             f"{len(table.nontrivial_classes)} nontrivial classes"]
    for c in table.nontrivial_classes:
        lines.append(f"  [{c.orbit_size:4d}] {c.representative.render(spec)}")
    return res, lines, [raw]


def run_classical_value(cfg):
    spec, key, raw = load_scenario(cfg.scenario)
    fom = load_fom(cfg.fom, spec, key)
    r = parse_resources(cfg.resources, spec.N)
    v = classical_value(spec, fom, r)
    return ({"value": fmt(v), "value_float": float(v), "resources": [fmt(x) for x in r]},
            [f"classical value at {[fmt(x) for x in r]} = {fmt(v)} ({float(v):.10g})"],
            [raw, cfg.fom.encode()])


def run_classical_total(cfg):
    spec, key, raw = load_scenario(cfg.scenario)
    fom = load_fom(cfg.fom, spec, key)
    S = _target(cfg)
    t = classical_total(spec, fom, Fraction(str(S)))
    return ({"target": S, "resources": list(t.resources), "product": t.product},
            [f"classical total at S={S}: product {t.product:.8g} at {tuple(round(r, 8) for r in t.resources)}"],
            [raw, cfg.fom.encode()])


def _target(cfg):
    if cfg.target is None:
        raise ParseError("--target is required")
    return float(cfg.target)


def run_seesaw(cfg):
    spec, key, raw = load_scenario(cfg.scenario)
    fom = load_fom(cfg.fom, spec, key)
    r = parse_resources(cfg.resources, spec.N)
    res = seesaw(spec, fom, [float(x) for x in r], d=cfg.dim or 4, restarts=cfg.restarts, seed=cfg.seed, tol=cfg.tol)
    c = classical_value(spec, fom, r)
    ratio = res.value / float(c) if float(c) > 0 else math.nan
    out = res.to_json()
    out.update({"classical_value": fmt(c), "ratio": ratio})
    return (out, [f"seesaw value {res.value:.8f}, classical {float(c):.8f}, ratio {ratio:.6f}",
                  f"audited resources {tuple(round(a, 8) for a in res.audited_resources)}"],
            [raw, cfg.fom.encode()])


def run_total(cfg):
    spec, key, raw = load_scenario(cfg.scenario)
    fom = load_fom(cfg.fom, spec, key)
    S = _target(cfg)
    c = classical_total(spec, fom, Fraction(str(S)))
    q = min_total_resource(spec, fom, S, d=cfg.dim or 4, restarts=cfg.restarts, seed=cfg.seed,
                           tol=cfg.tol, product=cfg.product)
    out = q.to_json()
    out.update({"target": S, "classical_product": c.product, "classical_resources": list(c.resources),
                "ratio": c.product / q.product})
    lines = [f"total at S={S}: classical {c.product:.8g}, quantum {q.product:.8g}, ratio {c.product / q.product:.6f}"]
    if q.product_variant is not None:
        out["ratio_product_variant"] = c.product / q.product_variant["product"]
        lines.append(f"product variant: {q.product_variant['product']:.8g}, ratio {out['ratio_product_variant']:.6f}")
    if cfg.mixed:
        samples = np.vstack([seesaw_samples(spec, fom, d=cfg.dim or 4, seed=cfg.seed), [[q.value, *q.resources]]])
        m = mixed_total_resource(spec, fom, S, samples)
        out["mixed"] = m.to_json()
        out["ratio_mixed"] = c.product / m.product
        lines.append(f"with shared randomness: {m.product:.8g}, ratio {out['ratio_mixed']:.6f}")
    return out, lines, [raw, cfg.fom.encode()]


def run_verify(cfg):
    path = Path(cfg.strategy) if cfg.strategy else bundled("i6_strategy.json")
    raw = path.read_bytes()
    obj = json.loads(raw)
    scen = cfg.scenario or obj.get("scenario")
    spec, key, sraw = load_scenario(scen)
    fom_arg = cfg.fom or obj.get("fom")
    fom = load_fom(fom_arg, spec, key)
    strat = QuantumStrategy.from_json(obj)
    v = verify_strategy(spec, fom, strat)
    audited = [float(a) for a in v["audited_resources"]]
    # compare against the classical value at the audited resources rounded to 1e-2
    lim = [min(Fraction(round(a, 2)).limit_denominator(100), Fraction(1)) for a in audited]
    c = classical_value(spec, fom, lim)
    ratio = v["value"] / float(c) if float(c) > 0 else math.nan
    return ({"value": v["value"], "audited_resources": audited, "classical_resources": [fmt(x) for x in lim],
             "classical_value": fmt(c), "ratio": ratio},
            [f"strategy value {v['value']:.6f}, audited {tuple(round(a, 6) for a in audited)}",
             f"classical value at {[fmt(x) for x in lim]} = {float(c):.6f}, ratio {ratio:.6f}"],
            [raw, sraw, str(fom_arg).encode()])


def run_antidist(cfg):
    kets = load_kets(cfg.states)
    N = int(cfg.N or 2)
    single = antidistinguishability([proj(k) for k in kets])
    prod = antidistinguishability(product_states(kets, N)) if len(kets) ** N <= 64 else None
    cond = sufficient_condition(kets, N)
    res = {"antidistinguishability": single.value, "gap": single.gap, "N": N,
           "product_antidistinguishability": None if prod is None else prod.value,
           "alpha": cond.alpha, "beta": cond.beta, "cond1": cond.cond1, "cond2": cond.cond2,
           "frob_sq": cond.frob_sq}
    if prod is not None and prod.value >= 1 - 1e-6:
        res["ratio"] = (1.0 / single.value) ** N
    lines = [f"exclusion of {len(kets)} states: {single.value:.6f}"]
    if prod is not None:
        lines.append(f"exclusion of the {len(kets) ** N} products (N={N}): {prod.value:.9f}")
    lines.append(f"alpha={cond.alpha:.4f} beta={cond.beta:.4f} cond1={cond.cond1} cond2={cond.cond2}")
    if "ratio" in res:
        lines.append(f"advantage (A_C/A_Q)^N = {res['ratio']:.6f}")
    return res, lines, [json.dumps([[list(map(float, (z.real, z.imag))) for z in k] for k in kets]).encode()]


def run_distributed(cfg):
    N, n = int(cfg.N or 2), int(cfg.n or 2)
    S = float(cfg.target if cfg.target is not None else 1.0)
    task = DistributedTask(N, n)
    A_c = max(classical_common_resource(S, N), float(task.lower_bound()))
    if cfg.states:
        kets = load_kets(cfg.states)
        A_q = antidistinguishability([proj(k) for k in kets]).value
        value = antidistinguishability(product_states(kets, N)).value
        if value < S - 1e-6:
            raise DistributedUnachievable(f"the given states reach only {value:.8f}")
    else:
        A_q, r = quantum_common_resource(task, S, d=cfg.dim or 2, restarts=cfg.restarts, seed=cfg.seed)
        value = r.value
    ratio = (A_c / A_q) ** N
    res = {"N": N, "n": n, "target": S, "A_Q": A_q, "A_C": A_c, "value": value, "ratio": ratio,
           "classical_bound_at_A_Q": float(classical_bound([A_q] * N, task.priors))}
    return res, [f"N={N} n={n} S={S}: A_Q={A_q:.6f}, A_C={A_c:.6f}, ratio {ratio:.6f}"], []


def run_pbr(cfg):
    Ns = parse_range(cfg.N, list(range(2, 11)))
    rows = []
    lines = ["N  theta_min      A_Q          optimal_ratio   certified"]
    for N in Ns:
        th = pbr_theta_range(N)[0]
        row = {"N": N, "theta_min": th, "A_Q": pbr_single_antidist(th), "optimal_ratio": pbr_optimal_ratio(N)}
        theta = cfg.theta if cfg.theta is not None else th
        if N <= 3:
            row["certificate"] = certify_perfect_exclusion(theta, N).to_json()
        rows.append(row)
        cert = row.get("certificate", {}).get("excluded", "-")
        lines.append(f"{N:<3d}{th:<15.10f}{row['A_Q']:<13.9f}{row['optimal_ratio']:<16.8f}{cert}")
    return {"rows": rows}, lines, []


def run_curve(cfg):
    N, n = int(cfg.N or 2), int(cfg.n or 3)
    pts = advantage_curve(N, n, d=cfg.dim or 2, restarts=cfg.restarts, seed=cfg.seed)
    text = curve_csv(pts)
    res = {"N": N, "n": n, "points": [asdict(p) for p in pts], "csv": text}
    return res, text.strip().splitlines(), []


COMMANDS = {
    "facets": run_facets,
    "classical-value": run_classical_value,
    "classical-total": run_classical_total,
    "seesaw": run_seesaw,
    "total": run_total,
    "verify": run_verify,
    "antidist": run_antidist,
    "distributed": run_distributed,
    "pbr": run_pbr,
    "curve": run_curve,
}


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adcomm", description="Resource-constrained multipartite communication toolkit.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--scenario", help="bundled key (222, 223, 322A, 322D, 224) or scenario JSON path")
    p.add_argument("--fom", help="catalog name (e.g. I6) or linear expression such as 'p(1|2,1)-p(1|2,2)'")
    p.add_argument("--resources", help="comma-separated per-sender resource values (fractions allowed)")
    p.add_argument("--target", type=float, help="target figure-of-merit value")
    p.add_argument("--strategy", help="strategy JSON (verify); defaults to the bundled example")
    p.add_argument("--states", help="JSON file with a 'states' list of kets as [re, im] pairs")
    p.add_argument("--N", help="number of senders, or a range 'a..b' for pbr")
    p.add_argument("--n", type=int, help="inputs per sender (distributed, curve)")
    p.add_argument("--theta", type=float, help="PBR angle for certificates (default: optimal)")
    p.add_argument("--dim", type=int, help="Hilbert-space dimension per sender")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=1e-7, help="SeeSaw sweep tolerance")
    p.add_argument("--product", action="store_true", help="also run the product-minimizing variant (total)")
    p.add_argument("--mixed", action="store_true",
                   help="also mix SeeSaw grid samples with classical strategies (total)")
    p.add_argument("--out", help="JSON report path (default: <command>-report.json)")
    p.add_argument("--cap-decoders", type=int, default=DEFAULT_DECODER_CAP)
    p.add_argument("--cap-vertices", type=int, default=DEFAULT_VERTEX_CAP)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def execute(cfg: RunConfig) -> Report:
    t0 = time.perf_counter()
    results, lines, inputs = COMMANDS[cfg.command](cfg)
    h = hashlib.sha256()
    for blob in inputs:
        h.update(blob)
    return Report(asdict(cfg), h.hexdigest(), _jsonable(results), time.perf_counter() - t0, version(), lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    kw = {k: v for k, v in vars(args).items() if k != "verbose"}
    try:
        cfg = RunConfig(**kw)
        report = execute(cfg)
    except INFEASIBLE_ERRORS as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for line in report.lines:
        print(line)
    out = Path(cfg.out or f"{cfg.command}-report.json")
    out.write_text(json.dumps(report.to_json(), indent=1) + "\n")
    print(f"report written to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
