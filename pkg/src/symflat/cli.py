"""Command-line front end: verify, flow, classify and eval.

Exit codes: 0 success, 1 a check or flow failed, 2 bad input or configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import classification as cl
from .errors import (
    ClassificationError,
    DimensionError,
    DomainMismatchError,
    FlowDivergedError,
    InvalidConnectionError,
    MetricError,
    SceneError,
    StepUnderflowError,
    SymflatError,
)
from .flows import CSV_HEADER, FLOW_KINDS, FlowConfig, flow_run
from .forms import ALGEBRAS, DifferentialForm, Metric, TorusDomain, permutation_sign, random_form
from .functionals import eval_all, eval_cone_ym
from .gauge import Connection
from .presets import Preset, parse_preset
from .verify import SUITES, load_golden, run_suite

OK, FAIL, CONFIG = 0, 1, 2

_TERM = {
    "type": "object",
    "additionalProperties": False,
    "required": ["component"],
    "properties": {
        "component": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "amplitude": {"type": "number"},
        "wave": {"type": "array", "items": {"type": "integer"}},
        "phase": {"enum": ["cos", "sin"]},
        "generator": {"type": "integer", "minimum": 0},
    },
}

SCENE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "preset": {"type": "string"},
        "fields": {
            "type": "object",
            "additionalProperties": False,
            "required": ["a"],
            "properties": {k: {"type": "array", "items": _TERM} for k in ("a", "beta", "B")},
        },
        "dim": {"enum": [2, 4]},
        "resolution": {"type": "integer", "minimum": 4},
        "periods": {"type": "number", "exclusiveMinimum": 0},
        "metric": {"enum": ["flat", "t4_example"]},
        "algebra": {"enum": ["abelian", "su2"]},
        "seed": {"type": "integer", "minimum": 0},
        "perturbation": {
            "type": "object",
            "additionalProperties": False,
            "required": ["amplitude"],
            "properties": {
                "amplitude": {"type": "number", "minimum": 0},
                "max_mode": {"type": "integer", "minimum": 0},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "residual": {"type": "number", "exclusiveMinimum": 0},
                "flow": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
    "oneOf": [{"required": ["preset"]}, {"required": ["fields"]}],
}


class Scene:
    """A validated scene: preset or inline fields, plus metric and tolerances."""

    def __init__(self, doc: dict):
        try:
            jsonschema.validate(doc, SCENE_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SceneError(f"invalid scene: {exc.message}") from exc
        self.doc = doc
        self.tolerances = {"residual": 1e-6, "flow": 1e-8, **doc.get("tolerances", {})}
        self.preset = self._build()

    @classmethod
    def load(cls, path) -> "Scene":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise SceneError(f"cannot read scene {path}: {exc.strerror}") from exc
        try:
            return cls(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SceneError(f"scene {path} is not valid JSON: {exc.msg}") from exc

    def _build(self) -> Preset:
        d = self.doc
        if "preset" in d:
            overrides = {k: d[k] for k in ("resolution",) if k in d}
            if "algebra" in d or "periods" in d or "dim" in d:
                raise SceneError("algebra, periods and dim belong to inline scenes, not presets")
            p = parse_preset(d["preset"], **overrides)
        else:
            p = self._inline()
        if "metric" in d:
            if p.domain.kind != "torus":
                raise SceneError("metric selector needs a torus scene")
            try:
                p.metric = getattr(Metric, d["metric"])(p.domain)
            except MetricError as exc:
                raise SceneError(str(exc)) from exc
        if "perturbation" in d:
            if p.domain.kind != "torus":
                raise SceneError("perturbations need a torus scene")
            rng = np.random.default_rng(d.get("seed", 0))
            pert = d["perturbation"]
            eta = random_form(p.domain, 1, rng, p.connection.algebra, pert["amplitude"], pert.get("max_mode", 1))
            p = Preset(p.name + "+perturbation", p.domain, p.metric, p.connection.shifted(eta), None, None,
                       dict(p.extras))
        return p

    def _inline(self) -> Preset:
        d = self.doc
        dim = d.get("dim", 4)
        D = TorusDomain(dim, d.get("resolution", 16), d.get("periods", 2 * math.pi))
        alg = ALGEBRAS[d.get("algebra", "abelian")]
        f = d["fields"]
        a = _field(D, 1, f["a"], alg)
        beta = _field(D, 2, f["beta"], ALGEBRAS["abelian"]) if "beta" in f else None
        try:
            A = Connection(a, beta)
        except InvalidConnectionError as exc:
            raise SceneError(str(exc)) from exc
        p = Preset("inline", D, Metric.flat(D), A)
        if "B" in f:
            p.extras["B"] = _field(D, 0, f["B"], alg)
        return p

    def cone_B(self) -> DifferentialForm:
        p = self.preset
        if "B" in p.extras:
            return p.extras["B"]
        if p.cone_B is not None:
            return p.cone_B
        return DifferentialForm.zeros(p.domain, 0, p.connection.algebra)


def _field(D, degree, terms, alg) -> DifferentialForm:
    """Sum of amplitude * cos/sin(wave . x) placed on one component and generator."""
    x = D.coordinates()
    comps = {}
    for t in terms:
        I = tuple(t["component"])
        if len(I) != degree or len(set(I)) != degree or any(i >= D.dim for i in I):
            raise SceneError(f"component {list(I)} is not a valid degree-{degree} index in dimension {D.dim}")
        wave = t.get("wave", [0] * D.dim)
        if len(wave) != D.dim:
            raise SceneError(f"wave vector needs {D.dim} entries")
        gen = t.get("generator", 0)
        if gen >= alg.dim:
            raise SceneError(f"generator {gen} out of range for {alg.kind}")
        phase = sum(k * xi * 2 * math.pi / p for k, xi, p in zip(wave, x, D.periods))
        prof = np.broadcast_to(t.get("amplitude", 1.0) * (np.sin if t.get("phase") == "sin" else np.cos)(phase),
                               D.shape)
        key = tuple(sorted(I))
        sign = permutation_sign(I)
        block = comps.setdefault(key, np.zeros((alg.dim,) + D.shape))
        block[gen] += sign * prof
    if alg.dim == 1:
        comps = {k: v[0] for k, v in comps.items()}
    return DifferentialForm.from_components(D, degree, comps, alg)


def _fmt(x) -> str:
    return f"{x:.6e}" if isinstance(x, float) else str(x)


def _print_table(rows, header):
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
    line = "  ".join(h.ljust(w) for h, w in zip(header, widths))
    print(line)
    print("  ".join("-" * w for w in widths))
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        print(f"error: unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return CONFIG
    checks = run_suite(args.suite, args.resolution or 32, args.tolerance or 1e-6)
    if args.json:
        print(json.dumps([c.as_dict() for c in checks], indent=2))
    else:
        rows = [(c.name, c.anchor, _fmt(float(c.measured)), f"{c.op} {c.tolerance:.1e}",
                 "PASS" if c.passed else "FAIL") for c in checks]
        _print_table(rows, ("check", "anchor", "measured", "tolerance", "status"))
        print(f"{sum(c.passed for c in checks)}/{len(checks)} passed")
    return OK if all(c.passed for c in checks) else FAIL


def _load_scene(args) -> Scene:
    if args.scene and args.preset:
        raise SceneError("give either --scene or --preset, not both")
    if args.scene:
        scene = Scene.load(args.scene)
    elif args.preset:
        scene = Scene({"preset": args.preset})
    else:
        raise SceneError("a scene is required: pass --scene FILE or --preset NAME")
    if getattr(args, "resolution", None) is not None:
        doc = dict(scene.doc, resolution=args.resolution)
        scene = Scene(doc)
    if getattr(args, "tolerance", None) is not None:
        scene.tolerances = {k: args.tolerance for k in scene.tolerances}
    return scene


def cmd_flow(args) -> int:
    if not args.out:
        raise SceneError("an output path is required (--out FILE.csv)")
    scene = _load_scene(args)
    p = scene.preset
    cfg = FlowConfig(kind=args.kind, step=args.step, max_steps=args.steps,
                     tolerance=scene.tolerances["flow"], preset=p.name)
    B0 = scene.cone_B() if args.kind == "cone" else None
    try:
        state, trace = flow_run(p.connection, cfg, p.metric, B0)
    except (FlowDivergedError, StepUnderflowError) as exc:
        print(f"flow aborted: {exc}", file=sys.stderr)
        return FAIL
    trace.to_csv(args.out)
    last = trace.rows[-1]
    print(f"steps: {trace.steps}")
    print(f"halvings: {trace.halvings}")
    for k, v in zip(CSV_HEADER, last):
        print(f"final {k}: {v:.10e}")
    print(f"monotone: {trace.is_monotone()}")
    return OK


def cmd_classify(args) -> int:
    if args.irrational_ratio and args.c2 is not None:
        raise ClassificationError("give c2 or --irrational-ratio, not both")
    if not args.irrational_ratio and args.c2 is None:
        raise ClassificationError("c2 is required unless --irrational-ratio is given")
    c1 = cl.parse_period(args.c1)
    c2 = cl.irrational_ratio(c1) if args.irrational_ratio else cl.parse_period(args.c2)
    report = cl.classify_u1_t4(c1, c2)
    print(json.dumps(report.as_dict(), indent=2) if args.json else report.render())
    return OK


def cmd_eval(args) -> int:
    scene = _load_scene(args)
    p = scene.preset
    tol = scene.tolerances["residual"]
    if args.kind == "cone":
        results = {"cone": eval_cone_ym(p.connection, scene.cone_B(), p.metric, tol)}
    else:
        results = eval_all(p.connection, p.metric, tol)
        if args.kind != "all":
            results = {args.kind: results[args.kind]}
    out = {"scene": p.name, "functionals": {k: v.as_dict() for k, v in results.items()}}
    if p.name.startswith("t4_yang_mills_example") and args.kind == "all" and p.metric.name == "t4_example":
        golden = load_golden()
        rel = {k: abs(results[k].value - v) / abs(v) for k, v in golden["values"].items()}
        out["golden"] = {"relative_error": rel, "tolerance": golden["relative_tolerance"],
                         "passed": all(r <= golden["relative_tolerance"] for r in rel.values())}
    if args.json:
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(f"scene: {p.name}")
        for k, v in results.items():
            res = ", ".join(f"{n} = {r:.6e}" for n, r in v.residuals.items())
            print(f"{k}: value = {v.value:.12e}  residuals: {res}  critical: {v.critical}")
        if "golden" in out:
            g = out["golden"]
            errs = ", ".join(f"{k} {e:.2e}" for k, e in g["relative_error"].items())
            print(f"golden: {'PASS' if g['passed'] else 'FAIL'} (relative errors {errs})")
    return FAIL if "golden" in out and not out["golden"]["passed"] else OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symflat", description="Symplectic flatness toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the example reproduction checks")
    v.add_argument("--suite", default="all")
    v.add_argument("--resolution", type=int)
    v.add_argument("--tolerance", type=float)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    def scene_flags(p):
        p.add_argument("--scene", help="scene JSON file")
        p.add_argument("--preset", help="preset expression, e.g. 'flat_wilson(0.1, 0.2)'")
        p.add_argument("--resolution", type=int)
        p.add_argument("--tolerance", type=float)

    f = sub.add_parser("flow", help="run a gradient flow and write a CSV trace")
    scene_flags(f)
    f.add_argument("--kind", choices=FLOW_KINDS, default="pym")
    f.add_argument("--steps", type=int, default=500)
    f.add_argument("--step", type=float)
    f.add_argument("--out")
    f.set_defaults(func=cmd_flow)

    c = sub.add_parser("classify", help="classify zeta-flat U(1) bundles over T^4")
    c.add_argument("c1")
    c.add_argument("c2", nargs="?")
    c.add_argument("--irrational-ratio", action="store_true")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_classify)

    e = sub.add_parser("eval", help="evaluate functionals and residuals on a scene")
    scene_flags(e)
    e.add_argument("--kind", choices=("ym", "pym", "phi", "cone", "all"), default="all")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return CONFIG if exc.code else OK
    try:
        return args.func(args)
    except (SceneError, ClassificationError, DomainMismatchError, DimensionError, MetricError,
            InvalidConnectionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG
    except SymflatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())
