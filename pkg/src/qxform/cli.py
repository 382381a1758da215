"""Command-line front end.

    qxform transform {tq-to-tm|tm-to-to|to-to-tm|tm-to-tq|tq-to-to} --config job.json
    qxform propagate --config job.json --out traj.csv [--dump-amps]
    qxform verify {algebra|gauge|roundtrip|residual|degeneracy} [--config job.json]
    qxform example {ex1|ex2} [--upsilon U] [--omega W] [--t0 T]

Exit status: 0 success, 2 invalid input, 3 numerical failure.  Failures
print one JSON line on stderr.  Reports are JSON with sorted keys and carry
no timestamps, so identical jobs give identical bytes.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import algebra as alg
from .errors import NumericalError
from .examples import (
    Example1Params,
    Example2Params,
    example1_systems,
    example2_degeneracy_check,
    example2_systems,
    random_smooth_tq,
    run_pipeline,
)
from .propagate import SpatialGrid, gaussian, propagate, residual
from .systems import TMSystem, TOSystem, TQSystem, as_tq, system_from_dict, tm_from_tq
from .timefn import Constant, TimeFunction, from_dict, linspace, sample
from .transforms import (
    GaugeTarget,
    GaugeTriple,
    TransformReport,
    gauge_residuals,
    max_deviation,
    printed_formula_discrepancy,
    solve_gauge,
    time_map_from_f,
    tm_to_to,
    tm_to_tq,
    to_to_tm,
    tq_to_tm,
)

log = logging.getLogger("qxform")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

ACTIONS = {
    "transform": ("tq-to-tm", "tm-to-to", "to-to-tm", "tm-to-tq", "tq-to-to"),
    "verify": ("algebra", "gauge", "roundtrip", "residual", "degeneracy"),
    "example": ("ex1", "ex2"),
    "propagate": (),
}

# ---------------------------------------------------------------------------
# configuration

_NUM = {"type": "number"}
_DOMAIN = {"type": "array", "items": {"type": ["number", "null"]}, "minItems": 2, "maxItems": 2}
_COEF = {
    "type": "object",
    "required": ["kind"],
    "oneOf": [
        {"properties": {"kind": {"const": "constant"}, "value": _NUM, "domain": _DOMAIN},
         "required": ["value"], "additionalProperties": False},
        {"properties": {"kind": {"const": "poly"}, "coeffs": {"type": "array", "items": _NUM, "minItems": 1},
                        "domain": _DOMAIN},
         "required": ["coeffs"], "additionalProperties": False},
        {"properties": {"kind": {"const": "exp"}, "scale": _NUM, "rate": _NUM, "t0": _NUM, "domain": _DOMAIN},
         "required": ["scale", "rate"], "additionalProperties": False},
        {"properties": {"kind": {"const": "power"}, "scale": _NUM, "t0": {"type": "number", "exclusiveMinimum": 0},
                        "exponent": _NUM, "domain": _DOMAIN},
         "required": ["scale", "t0", "exponent"], "additionalProperties": False},
        {"properties": {"kind": {"const": "table"}, "times": {"type": "array", "items": _NUM, "minItems": 4},
                        "values": {"type": "array", "items": _NUM, "minItems": 4},
                        "derivs": {"type": "array", "items": _NUM}, "order": {"enum": [1, 3]}},
         "required": ["times", "values"], "additionalProperties": False},
    ],
}


def _coeff_block(names):
    return {"type": "object", "properties": {n: _COEF for n in names}, "additionalProperties": False}


_SYSTEM = {
    "type": "object",
    "required": ["class"],
    "oneOf": [
        {"properties": {"class": {"const": "TQ"}, "coeffs": _coeff_block(["k", "h", "g", "h2", "h1", "h0"])},
         "additionalProperties": False},
        {"properties": {"class": {"const": "TM"}, "coeffs": _coeff_block(["f", "f2", "f1", "f0"])},
         "additionalProperties": False},
        {"properties": {"class": {"const": "TO"}, "coeffs": _coeff_block(["g2", "g1", "g0"])},
         "additionalProperties": False},
    ],
}

_POS_INT = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(ACTIONS)},
        "action": {"type": "string"},
        "system": _SYSTEM,
        "target": {
            "type": "object",
            "properties": {"kind": {"enum": ["restricted", "to", "tm"]}, "f": _COEF},
            "required": ["kind"],
            "additionalProperties": False,
        },
        "gauge": {
            "type": "object",
            "properties": {"kappa": _COEF, "mu": _COEF, "nu": _COEF},
            "additionalProperties": False,
        },
        "time_map": {"type": "object", "properties": {"f": _COEF}, "required": ["f"],
                     "additionalProperties": False},
        "time_grid": {
            "type": "object",
            "properties": {"t0": _NUM, "t1": _NUM, "n": {"type": "integer", "minimum": 4}},
            "required": ["t0", "t1"],
            "additionalProperties": False,
        },
        "t0_prime": _NUM,
        "space": {
            "type": "object",
            "properties": {"x_min": _NUM, "x_max": _NUM, "n": {"type": "integer", "minimum": 64}},
            "required": ["x_min", "x_max", "n"],
            "additionalProperties": False,
        },
        "initial_state": {
            "type": "object",
            "properties": {"x0": _NUM, "p0": _NUM, "width": {"type": "number", "exclusiveMinimum": 0}},
            "additionalProperties": False,
        },
        "steps": _POS_INT,
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "save_every": _POS_INT,
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "params": {
            "type": "object",
            "properties": {
                "upsilon": _NUM, "omega": {"type": "number", "exclusiveMinimum": 0}, "t0": _NUM,
                "t0_prime": _NUM, "t_end": _NUM, "a": _NUM, "b": _NUM,
                "a_values": {"type": "array", "items": _NUM, "minItems": 1},
            },
            "additionalProperties": False,
        },
        "out": {"type": "string"},
        "dump_amps": {"type": "boolean"},
    },
}


@dataclass
class JobConfig:
    """One CLI job.  Only ``command`` is mandatory; the rest depends on the verb."""

    command: str
    action: Optional[str] = None
    system: Optional[dict] = None
    target: Optional[dict] = None
    gauge: Optional[dict] = None
    time_map: Optional[dict] = None
    time_grid: Optional[dict] = None
    t0_prime: Optional[float] = None
    space: Optional[dict] = None
    initial_state: Optional[dict] = None
    steps: Optional[int] = None
    dt: Optional[float] = None
    save_every: Optional[int] = None
    tol: Optional[float] = None
    seed: Optional[int] = None
    params: Optional[dict] = None
    out: Optional[str] = None
    dump_amps: Optional[bool] = None

    def __post_init__(self):
        validate_config(self.to_dict())
        allowed = ACTIONS[self.command]
        if allowed and self.action not in allowed:
            raise ValueError(f"{self.command} needs one of {list(allowed)}, got {self.action!r}")
        if not allowed and self.action is not None:
            raise ValueError(f"{self.command} takes no action, got {self.action!r}")

    def to_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "JobConfig":
        validate_config(d)
        if "command" not in d:
            raise ValueError("config has no command")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "JobConfig":
        return cls.from_dict(json.loads(text))


class ConfigError(ValueError):
    pass


def validate_config(d: dict) -> None:
    try:
        jsonschema.validate(d, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {e.message}") from None


# ---------------------------------------------------------------------------
# helpers


def _time_grid(cfg: JobConfig, default=(0.0, 5.0), n_default: int = 2000) -> np.ndarray:
    tg = cfg.time_grid or {"t0": default[0], "t1": default[1]}
    n = int(tg.get("n", n_default))
    if not tg["t1"] > tg["t0"]:
        raise ValueError("time_grid needs t1 > t0")
    return linspace(float(tg["t0"]), float(tg["t1"]), n)


def _system(cfg: JobConfig, cls=None):
    if cfg.system is None:
        raise ValueError(f"{cfg.command} {cfg.action or ''} needs a system".replace("  ", " "))
    s = system_from_dict(cfg.system)
    if cls is not None and not isinstance(s, cls):
        raise ValueError(f"expected a {cls.CLASS} system, got {s.CLASS}")
    return s


def _target(cfg: JobConfig) -> GaugeTarget:
    t = cfg.target or {"kind": "restricted"}
    if t["kind"] == "tm":
        if "f" not in t:
            raise ValueError("a tm target needs f")
        return GaugeTarget.tm(from_dict(t["f"]))
    if "f" in t:
        raise ValueError(f"target {t['kind']!r} takes no f")
    return GaugeTarget(t["kind"])


def describe(f: TimeFunction, grid) -> dict:
    """Serializable form; closed forms without a serializable kind are labelled and sampled."""
    try:
        return f.to_dict()
    except TypeError:
        d = sample(f, grid)
        label = getattr(f, "label", "")
        if label:
            d["formula"] = label
        return d


def _describe_system(s, grid) -> dict:
    return {"class": s.CLASS, "coeffs": {k: describe(c, grid) for k, c in s.coeffs().items()}}


def _clean(x):
    """Make a report JSON-safe: numpy scalars to float, non-finite values to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else repr(v)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def dump_report(report: dict, out: Optional[str]) -> str:
    text = json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"
    if out:
        Path(out).write_text(text)
    return text


class VerificationFailed(NumericalError):
    pass


def _check(report: dict, ok: bool, what: str):
    report["passed"] = bool(ok)
    if not ok:
        raise VerificationFailed(f"{what} failed: {json.dumps(_clean(report.get('summary', {})), sort_keys=True)}")


# ---------------------------------------------------------------------------
# verbs


def run_transform(cfg: JobConfig) -> dict:
    a = cfg.action
    grid = _time_grid(cfg)
    t0p = float(cfg.t0_prime or 0.0)
    tol = cfg.tol or 1e-7
    if a == "tq-to-tm":
        s = as_tq(_system(cfg))
        target = _target(cfg)
        gauge = solve_gauge(s, target, grid)
        tm = tq_to_tm(s, gauge, tol)
        res = gauge_residuals(s, gauge, target)
        res["richardson"] = gauge.error_estimate
        return TransformReport("TQ", "TM", tm, gauge, None, res).to_dict()
    if a == "tm-to-to":
        s = _system(cfg, TMSystem)
        m = time_map_from_f(s.f, float(grid[0]), t0p, grid)
        to = tm_to_to(s, m)
        res = {"map_roundtrip": m.max_roundtrip_error(grid)}
        return TransformReport("TM", "TO", to, None, m, res).to_dict()
    if a == "to-to-tm":
        s = _system(cfg, TOSystem)
        if cfg.time_map is None:
            raise ValueError("to-to-tm needs time_map.f (dt'/dt as a function of t)")
        m = time_map_from_f(from_dict(cfg.time_map["f"]), float(grid[0]), t0p, grid)
        tm = to_to_tm(s, m)
        res = {"map_roundtrip": m.max_roundtrip_error(grid)}
        return TransformReport("TO", "TM", tm, None, m, res).to_dict()
    if a == "tm-to-tq":
        s = _system(cfg, TMSystem)
        gspec = cfg.gauge or {}
        zero = {"kind": "constant", "value": 0.0}
        gauge = GaugeTriple.from_functions(*(from_dict(gspec.get(n, zero)) for n in ("kappa", "mu", "nu")))
        tq = tm_to_tq(s, gauge, grid)
        disc = printed_formula_discrepancy(s, gauge, grid)
        return TransformReport("TM", "TQ", tq, None, None, {"inverse_consistency": disc["derived"]["max"]},
                               disc).to_dict()
    if a == "tq-to-to":
        s = as_tq(_system(cfg))
        p = run_pipeline(s, grid, t0p)
        res = gauge_residuals(s, p.gauge, "restricted")
        res["richardson"] = p.gauge.error_estimate
        res["map_roundtrip"] = p.map.max_roundtrip_error(grid)
        return TransformReport("TQ", "TO", p.to, p.gauge, p.map, res).to_dict()
    raise ValueError(f"unknown transform {a!r}")


def _space(cfg: JobConfig) -> SpatialGrid:
    sp = cfg.space or {"x_min": -12.0, "x_max": 12.0, "n": 1024}
    return SpatialGrid.box(float(sp["x_min"]), float(sp["x_max"]), int(sp["n"]))


def _steps(cfg: JobConfig, t0: float, t1: float) -> int:
    if cfg.dt is not None:
        return max(1, int(round((t1 - t0) / cfg.dt)))
    return int(cfg.steps or 2000)


def run_propagate(cfg: JobConfig) -> dict:
    s = _system(cfg)
    grid = _space(cfg)
    tg = cfg.time_grid or {"t0": 0.0, "t1": 1.0}
    t0, t1 = float(tg["t0"]), float(tg["t1"])
    init = cfg.initial_state or {}
    psi0 = gaussian(grid, init.get("x0", 0.0), init.get("p0", 0.0), init.get("width", 1.0), t0)
    n = _steps(cfg, t0, t1)
    traj = propagate(s, psi0, t1, n, save_every=int(cfg.save_every or 1))
    norms = traj.observable("norm")
    report = {
        "system": s.CLASS,
        "steps": n,
        "states": len(traj),
        "norm_drift": float(np.max(np.abs(norms - norms[0]))),
        "final": traj.observables[-1]._asdict(),
        "final_t": traj.times[-1],
    }
    if cfg.out:
        out = Path(cfg.out)
        csv = out if out.suffix == ".csv" else out.with_suffix(".csv")
        traj.to_csv(csv)
        report["csv"] = str(csv)
        if cfg.dump_amps:
            amps = csv.with_suffix(".amps")
            traj.dump_amps(amps)
            report["amps"] = {"path": str(amps), "dtype": "<c8", "shape": [len(traj), grid.n]}
    return report


def verify_algebra(cfg: JobConfig) -> dict:
    tol = cfg.tol or 1e-12
    rng = np.random.default_rng(cfg.seed or 0)
    basis = [alg.AlgebraElement.basis(op) for op in alg.BasisOp]
    brackets = {}
    for a, b, coef, r in alg.BRACKETS:
        got = alg.commutator(basis[a], basis[b])
        brackets[f"[{a.name},{b.name}]"] = float(np.max(np.abs(got.coeffs - coef * basis[r].coeffs)))
    jac = 0.0
    for i in basis:
        for j in basis:
            for k in basis:
                s = (alg.commutator(i, alg.commutator(j, k)) + alg.commutator(j, alg.commutator(k, i))
                     + alg.commutator(k, alg.commutator(i, j)))
                jac = max(jac, float(np.max(np.abs(s.coeffs))))
    conj = 0.0
    for _ in range(200):
        g = alg.GaugeParams(*rng.uniform(-2.0, 2.0, 3))
        for b in basis:
            d = alg.conjugate_element(b, g).coeffs - alg.conjugate_series(b, g).coeffs
            conj = max(conj, float(np.max(np.abs(d))))
    summary = {"brackets_max": max(brackets.values()), "jacobi_max": jac, "conjugation_vs_series": conj}
    report = {"verify": "algebra", "seed": cfg.seed or 0, "draws": 200, "brackets": brackets, "summary": summary}
    _check(report, summary["brackets_max"] == 0.0 and jac == 0.0 and conj <= tol, "algebra")
    return report


def _default_tq(cfg: JobConfig):
    if cfg.system is not None:
        return as_tq(_system(cfg))
    return example1_systems(Example1Params(0.1, 1.0)).tq


def verify_gauge(cfg: JobConfig) -> dict:
    s = _default_tq(cfg)
    grid = _time_grid(cfg)
    target = _target(cfg)
    gauge = solve_gauge(s, target, grid)
    coarse = solve_gauge(s, target, grid[::2])
    res = gauge_residuals(s, gauge, target)
    tol = cfg.tol or 1e-7
    summary = dict(res, richardson=gauge.error_estimate,
                   step_halving_change=max(float(np.max(np.abs(getattr(gauge, n)(grid[::2]) - getattr(coarse, n)(grid[::2]))))
                                           for n in ("kappa", "nu", "mu")))
    report = {"verify": "gauge", "target": target.kind, "gauge_summary": gauge.summary(), "summary": summary}
    _check(report, max(res.values()) <= tol, "gauge")
    return report


def _roundtrip_case(s: TQSystem, grid) -> dict:
    gauge = solve_gauge(s, "restricted", grid)
    tm = tq_to_tm(s, gauge)
    back = tm_to_tq(tm, gauge, grid)
    mids = 0.5 * (grid[:-1] + grid[1:])
    probe = np.sort(np.concatenate([grid, mids]))
    d_tq = max(max_deviation(s, back, probe).values())
    m = time_map_from_f(tm.f, float(grid[0]), 0.0, grid)
    to = tm_to_to(tm, m)
    tm2 = to_to_tm(to, m, grid)
    d_tm = max(max_deviation(tm, tm2, probe).values())
    return {"tq_tm_tq": d_tq, "tm_to_tm": d_tm}


def discrepancy_probe() -> dict:
    """Printed versus derived TM->TQ g formula on a TM system with f1 != 0 and kappa != 0."""
    from .timefn import Polynomial

    grid = linspace(0.0, 1.0, 400)
    tm = TMSystem(f=Polynomial((1.0, 0.2)), f2=Polynomial((0.5, 0.1)), f1=Polynomial((0.3, -0.2)),
                  f0=Constant(0.1))
    gauge = GaugeTriple.from_functions(kappa=Polynomial((0.0, 0.4, 0.1)), mu=Polynomial((0.0, 0.3)),
                                       nu=Polynomial((0.0, -0.2)))
    return printed_formula_discrepancy(tm, gauge, grid)


def verify_roundtrip(cfg: JobConfig) -> dict:
    tol = cfg.tol or 1e-8
    cases = {}
    if cfg.system is not None:
        cases["config"] = _roundtrip_case(_default_tq(cfg), _time_grid(cfg))
    else:
        n = cfg.time_grid.get("n", 2000) if cfg.time_grid else 2000
        cases["ex1"] = _roundtrip_case(example1_systems(Example1Params(0.1, 1.0)).tq, linspace(0.0, 5.0, n))
        cases["ex2"] = _roundtrip_case(example2_systems(Example2Params(2.0, -2.0, 1.0)).tq, linspace(1.0, 10.0, n))
        rng = np.random.default_rng(cfg.seed or 0)
        for i in range(20):
            cases[f"random_{i:02d}"] = _roundtrip_case(random_smooth_tq(rng), linspace(0.0, 1.0, 400))
    disc = discrepancy_probe()
    worst = max(max(c.values()) for c in cases.values())
    summary = {"max_deviation": worst, "printed_g_deviation": disc["printed"]["per_coefficient"]["g"],
               "derived_g_deviation": disc["derived"]["per_coefficient"]["g"]}
    report = {"verify": "roundtrip", "cases": cases, "discrepancies": disc, "summary": summary}
    _check(report, worst < tol and summary["derived_g_deviation"] < tol, "roundtrip")
    return report


def verify_residual(cfg: JobConfig) -> dict:
    s = _system(cfg) if cfg.system is not None else example1_systems(Example1Params(0.1, 1.0)).tq
    grid = _space(cfg)
    tg = cfg.time_grid or {"t0": 0.0, "t1": 1.0}
    t0, t1 = float(tg["t0"]), float(tg["t1"])
    init = cfg.initial_state or {}
    psi0 = gaussian(grid, init.get("x0", 0.0), init.get("p0", 0.0), init.get("width", 1.0), t0)
    n = _steps(cfg, t0, t1)
    r = residual(s, propagate(s, psi0, t1, n))
    tol = cfg.tol or 1e-4
    summary = {"residual": r.value, "C": r.constant, "dt": r.dt_max, "dx": r.dx}
    report = {"verify": "residual", "system": s.CLASS, "steps": n, "summary": summary}
    _check(report, r.value < tol, "residual")
    return report


def verify_degeneracy(cfg: JobConfig) -> dict:
    p = cfg.params or {}
    rep = example2_degeneracy_check(p.get("a_values", [0.5, 2.0, -1.0]), p.get("omega", 1.0), p.get("t0", 1.0),
                                    p.get("t_end"), n=(cfg.time_grid or {}).get("n", 4000))
    tol = cfg.tol or 1e-7
    report = {"verify": "degeneracy", "summary": rep.to_dict()}
    _check(report, rep.max_pairwise_deviation < tol, "degeneracy")
    return report


def run_example(cfg: JobConfig) -> dict:
    p = dict(cfg.params or {})
    if cfg.action == "ex1":
        params = Example1Params(p.get("upsilon", 0.1), p.get("omega", 1.0), p.get("t0", 0.0),
                                p.get("t0_prime", 0.0), p.get("t_end"))
        ex = example1_systems(params)
    else:
        params = Example2Params(p.get("a", 2.0), p.get("b", -2.0), p.get("omega", 1.0), p.get("t0", 1.0),
                                p.get("t0_prime", 0.0), p.get("t_end"))
        ex = example2_systems(params)
    n = (cfg.time_grid or {}).get("n", 2000)
    grid = linspace(params.t0, params.t_end, n)
    pipe = run_pipeline(ex.tq, grid, params.t0_prime)
    tp_lo, tp_hi = pipe.map.tp_domain.lo, pipe.map.tp_domain.hi
    tp_probe = np.linspace(tp_lo, tp_hi, 401)
    probe = np.linspace(params.t0, params.t_end, 401)
    sample_t = np.linspace(params.t0, params.t_end, 11)
    sample_tp = np.atleast_1d(ex.map.forward(sample_t))
    dev = {
        "nu": float(np.max(np.abs(pipe.gauge.nu(probe) - ex.gauge.nu(probe)))),
        "kappa": float(np.max(np.abs(pipe.gauge.kappa(probe)))),
        "mu": float(np.max(np.abs(pipe.gauge.mu(probe)))),
        "tm": max(max_deviation(pipe.tm, ex.tm, probe).values()),
        "map_forward": float(np.max(np.abs(pipe.map.forward(probe) - ex.map.forward(probe)))),
        "map_inverse": float(np.max(np.abs(pipe.map.inverse(tp_probe) - ex.map.inverse(tp_probe)))),
        "to_g2": float(np.max(np.abs(pipe.to.g2(tp_probe) - ex.to.g2(tp_probe)))),
    }
    return {
        "example": cfg.action,
        "params": dataclasses.asdict(params),
        "tq": _describe_system(ex.tq, sample_t),
        "tm": _describe_system(ex.tm, sample_t),
        "to": _describe_system(ex.to, sample_tp),
        "gauge": {"nu": describe(ex.gauge.nu, sample_t), "kappa": 0.0, "mu": 0.0},
        "map": {
            "closed_form": ex.map.closed_form,
            "forward": describe(ex.map.forward, sample_t),
            "inverse": describe(ex.map.inverse, sample_tp),
            "t_domain": ex.map.t_domain.to_dict(),
            "t_prime_domain": ex.map.tp_domain.to_dict(),
        },
        "pipeline_deviation": dev,
    }


VERIFY = {
    "algebra": verify_algebra,
    "gauge": verify_gauge,
    "roundtrip": verify_roundtrip,
    "residual": verify_residual,
    "degeneracy": verify_degeneracy,
}


def run(cfg: JobConfig) -> dict:
    if cfg.command == "transform":
        return run_transform(cfg)
    if cfg.command == "propagate":
        return run_propagate(cfg)
    if cfg.command == "verify":
        return VERIFY[cfg.action](cfg)
    return run_example(cfg)


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON job file")
    common.add_argument("--out", help="report path (propagate: CSV path)")
    common.add_argument("--grid-n", type=int, help="number of time intervals")
    common.add_argument("--dt", type=float, help="propagation step")
    common.add_argument("--tol", type=float, help="pass/fail tolerance")
    common.add_argument("--seed", type=int, help="seed for random draws")
    common.add_argument("--dump-amps", action="store_true", default=None, help="also write complex64 amplitudes")

    p = argparse.ArgumentParser(prog="qxform", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for verb in ("transform", "verify"):
        sp = sub.add_parser(verb, parents=[common])
        sp.add_argument("action", choices=ACTIONS[verb])
    sub.add_parser("propagate", parents=[common])
    ex = sub.add_parser("example", parents=[common])
    ex.add_argument("action", choices=ACTIONS["example"])
    ex.add_argument("--upsilon", type=float)
    ex.add_argument("--omega", type=float)
    ex.add_argument("--t0", type=float)
    ex.add_argument("--t0-prime", type=float)
    ex.add_argument("--t-end", type=float)
    ex.add_argument("--a", type=float)
    ex.add_argument("--b", type=float)
    return p


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    d = {}
    if ns.config:
        try:
            d = json.loads(Path(ns.config).read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from None
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        validate_config(d)
    for key in ("command", "action"):
        given = getattr(ns, key, None)
        if key in d and given is not None and d[key] != given:
            raise ConfigError(f"config {key} {d[key]!r} disagrees with the command line {given!r}")
        if given is not None:
            d[key] = given
    for key in ("out", "dt", "tol", "seed", "dump_amps"):
        v = getattr(ns, key, None)
        if v is not None:
            d[key] = v
    if ns.grid_n is not None:
        tg = dict(d.get("time_grid") or {})
        if d.get("command") == "example" or not tg:
            tg.setdefault("t0", 0.0)
            tg.setdefault("t1", 1.0 if d.get("command") == "propagate" else 5.0)
        tg["n"] = ns.grid_n
        d["time_grid"] = tg
    if d.get("command") == "example":
        params = dict(d.get("params") or {})
        for key in ("upsilon", "omega", "t0", "t0_prime", "t_end", "a", "b"):
            v = getattr(ns, key, None)
            if v is not None:
                params[key] = v
        if params:
            d["params"] = params
    return JobConfig.from_dict(d)


def _configure_logging():
    level = os.environ.get("QXFORM_LOG", "").lower()
    levels = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG, "": logging.WARNING}
    if level not in levels:
        level = ""
    logging.basicConfig(level=levels[level], format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if level == "quiet":
        import warnings

        warnings.simplefilter("ignore")


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": code}) + "\n")
    return code


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        report = run(cfg)
    except NumericalError as e:
        return _fail(EXIT_NUMERICAL, e)
    except (ValueError, TypeError, KeyError, OSError) as e:
        return _fail(EXIT_INVALID, e)
    text = dump_report(report, None if cfg.command == "propagate" else cfg.out)
    if not cfg.out or cfg.command == "propagate":
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
