"""Declarative run configuration.

A run config is a YAML document with one nested table per section:

    curve:    {kind: circle, radius: 1.0}
    initial:  {type: constant, value: 0.5}
    solver:   {n: 512, dt: auto, t_end: 3.0, snapshot_every: 10}
    forcing:  {C: auto}
    outputs:  {kinds: [csv, json], out_dir: out}
    checks:   {names: [barrier], barrier_tol: 1.0e-8}

Unknown sections or keys are rejected. Initial data must map into the open
admissible interval of the configured curve; this is validated here, before
any run starts. Expression initial data uses a minimal arithmetic grammar
over u with sin, cos, exp, the constants pi and L, and numeric literals.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

import numpy as np
import yaml

from .chart import admissible_interval
from .curves import CurveSpec, build_target
from .errors import ParseError, ValidationError

_CURVE_KEYS = {
    "circle": {"radius"},
    "ellipse": {"a", "b"},
    "bean": set(),
    "fourier": {"x_cos", "x_sin", "y_cos", "y_sin"},
}
_INITIAL_KEYS = {
    "constant": {"value"},
    "sine": {"amplitude", "mode"},
    "expression": {"formula"},
}
_SOLVER_KEYS = {"n", "dt", "t_end", "snapshot_every", "tol_stop"}
_FORCING_KEYS = {"C"}
_OUTPUT_KINDS = {"csv", "json", "svg_field", "svg_evolution"}
_OUTPUT_KEYS = {"kinds", "out_dir"}
_CHECK_NAMES = {"barrier", "gradient_envelope", "second_derivative_envelope",
                "higher_derivative_decay", "oracle"}
_CHECK_KEYS = {"names", "barrier_tol", "barrier_r1", "barrier_r2",
               "gradient_slack", "second_slack", "oracle_tol", "oracle_dt"}
_SECTIONS = {"curve", "initial", "solver", "forcing", "outputs", "checks"}

_ALLOWED_CALLS = {"sin", "cos", "exp"}
_ALLOWED_NAMES = {"u", "L", "pi"}


@dataclass(frozen=True)
class InitialSpec:
    type: str
    value: float = 0.0
    amplitude: float = 0.0
    mode: int = 1
    formula: str = ""


@dataclass(frozen=True)
class RunConfig:
    curve: CurveSpec
    initial: InitialSpec
    n: int = 512
    dt: object = "auto"
    t_end: float = 3.0
    snapshot_every: int = 10
    tol_stop: object = 1e-12
    C: object = "auto"
    outputs: tuple = ()
    out_dir: str = "."
    checks: tuple = ()
    check_params: tuple = ()   # sorted (key, value) pairs

    def check_param(self, key, default=None):
        return dict(self.check_params).get(key, default)


def compile_expression(text):
    """Compile an initial-data formula over u into a vectorized callable.

    Grammar: +, -, *, /, **, parentheses, numeric literals, names u/L/pi and
    calls sin/cos/exp. Anything else is rejected.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"initial.formula: {exc.msg} (column {exc.offset})") from exc
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.BinOp, ast.UnaryOp,
                             ast.UAdd, ast.USub, ast.Add, ast.Sub, ast.Mult,
                             ast.Div, ast.Pow, ast.Load)):
            continue
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            continue
        if isinstance(node, ast.Name) and node.id in _ALLOWED_NAMES:
            continue
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _ALLOWED_CALLS and not node.keywords
                and len(node.args) == 1):
            continue
        raise ValidationError(
            f"initial.formula: disallowed element {type(node).__name__}")
    code = compile(tree, "<initial>", "eval")
    env = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "pi": np.pi}

    def evaluate(u, L):
        return np.asarray(eval(code, {"__builtins__": {}},
                               dict(env, u=u, L=L)), float)

    return evaluate


def build_initial(initial, curve):
    """Sample the configured initial data on the curve's arclength grid."""
    u = curve.u
    if initial.type == "constant":
        return np.full(curve.n, float(initial.value))
    if initial.type == "sine":
        return initial.amplitude * np.sin(2.0 * np.pi * initial.mode * u / curve.length)
    r0 = compile_expression(initial.formula)(u, curve.length)
    return np.broadcast_to(r0, (curve.n,)).astype(float)


def _require_keys(section, mapping, allowed, required=()):
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ValidationError(f"{section}: unknown key(s) {sorted(unknown)}")
    for key in required:
        if key not in mapping:
            raise ValidationError(f"{section}: missing required key {key!r}")


def _as_number(section, key, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{section}.{key}: expected a number, got {value!r}")
    if kind is int and value != int(value):
        raise ValidationError(f"{section}.{key}: expected an integer, got {value!r}")
    return kind(value)


def parse_config(text):
    """Parse and fully validate a YAML run configuration."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1})" if mark else ""
        raise ParseError(f"malformed config{where}: {exc}") from exc
    if raw is None:
        raise ParseError("empty config")
    if not isinstance(raw, dict):
        raise ParseError("config must be a mapping of sections")
    unknown = set(raw) - _SECTIONS
    if unknown:
        raise ValidationError(f"unknown section(s) {sorted(unknown)}")
    for name in ("curve", "initial"):
        if name not in raw:
            raise ValidationError(f"missing required section {name!r}")
    for name, sec in raw.items():
        if not isinstance(sec, dict):
            raise ValidationError(f"section {name!r} must be a table")

    cur = dict(raw["curve"])
    kind = cur.pop("kind", None)
    if kind not in _CURVE_KEYS:
        raise ValidationError(f"curve.kind must be one of {sorted(_CURVE_KEYS)}")
    _require_keys("curve", cur, _CURVE_KEYS[kind], _CURVE_KEYS[kind])
    try:
        curve_spec = CurveSpec(kind, cur)
    except ValueError as exc:
        raise ValidationError(f"curve: {exc}") from exc

    ini = dict(raw["initial"])
    itype = ini.pop("type", None)
    if itype not in _INITIAL_KEYS:
        raise ValidationError(f"initial.type must be one of {sorted(_INITIAL_KEYS)}")
    _require_keys("initial", ini, _INITIAL_KEYS[itype], _INITIAL_KEYS[itype])
    if itype == "constant":
        initial = InitialSpec("constant", value=_as_number("initial", "value", ini["value"]))
    elif itype == "sine":
        initial = InitialSpec("sine",
                              amplitude=_as_number("initial", "amplitude", ini["amplitude"]),
                              mode=int(_as_number("initial", "mode", ini["mode"])))
    else:
        if not isinstance(ini["formula"], str):
            raise ValidationError("initial.formula must be a string")
        compile_expression(ini["formula"])
        initial = InitialSpec("expression", formula=ini["formula"])

    sol = dict(raw.get("solver", {}))
    _require_keys("solver", sol, _SOLVER_KEYS)
    n = int(_as_number("solver", "n", sol.get("n", 512), int))
    if n < 64 or (n & (n - 1)) != 0:
        raise ValidationError("solver.n must be a power of two with n >= 64")
    dt = sol.get("dt", "auto")
    if dt != "auto":
        dt = _as_number("solver", "dt", dt)
        if dt <= 0:
            raise ValidationError("solver.dt must be positive or 'auto'")
    t_end = _as_number("solver", "t_end", sol.get("t_end", 3.0))
    if t_end <= 0:
        raise ValidationError("solver.t_end must be positive")
    snapshot_every = int(_as_number("solver", "snapshot_every",
                                    sol.get("snapshot_every", 10), int))
    if snapshot_every < 1:
        raise ValidationError("solver.snapshot_every must be >= 1")
    tol_stop = sol.get("tol_stop", 1e-12)
    if tol_stop is not None:
        tol_stop = _as_number("solver", "tol_stop", tol_stop)

    frc = dict(raw.get("forcing", {}))
    _require_keys("forcing", frc, _FORCING_KEYS)
    C = frc.get("C", "auto")
    if C != "auto":
        C = _as_number("forcing", "C", C)
        if C <= 0:
            raise ValidationError("forcing.C must be positive or 'auto'")

    out = dict(raw.get("outputs", {}))
    _require_keys("outputs", out, _OUTPUT_KEYS)
    kinds = tuple(out.get("kinds", ()))
    bad = set(kinds) - _OUTPUT_KINDS
    if bad:
        raise ValidationError(f"outputs.kinds: unknown kind(s) {sorted(bad)}")
    out_dir = str(out.get("out_dir", "."))

    chk = dict(raw.get("checks", {}))
    _require_keys("checks", chk, _CHECK_KEYS)
    names = tuple(chk.pop("names", ()))
    bad = set(names) - _CHECK_NAMES
    if bad:
        raise ValidationError(f"checks.names: unknown check(s) {sorted(bad)}")
    for key, val in chk.items():
        chk[key] = _as_number("checks", key, val)
    check_params = tuple(sorted(chk.items()))

    cfg = RunConfig(curve_spec, initial, n, dt, t_end, snapshot_every,
                    tol_stop, C, kinds, out_dir, names, check_params)
    _validate_initial_range(cfg)
    return cfg


def _validate_initial_range(cfg):
    """Initial data must map into the open admissible interval."""
    curve = build_target(cfg.curve, cfg.n)
    r_lo, r_hi = curve.graph_interval()
    r0 = build_initial(cfg.initial, curve)
    if np.max(r0) >= r_hi or np.min(r0) <= r_lo:
        raise ValidationError(
            f"initial data range [{np.min(r0):.6g}, {np.max(r0):.6g}] leaves "
            f"the admissible interval ({r_lo:.6g}, {r_hi:.6g})")


def _config_dict(cfg):
    curve = {"kind": cfg.curve.kind}
    curve.update({k: (list(v) if isinstance(v, (list, tuple)) else v)
                  for k, v in cfg.curve.params.items()})
    initial = {"type": cfg.initial.type}
    if cfg.initial.type == "constant":
        initial["value"] = cfg.initial.value
    elif cfg.initial.type == "sine":
        initial["amplitude"] = cfg.initial.amplitude
        initial["mode"] = cfg.initial.mode
    else:
        initial["formula"] = cfg.initial.formula
    doc = {
        "curve": curve,
        "initial": initial,
        "solver": {"n": cfg.n, "dt": cfg.dt, "t_end": cfg.t_end,
                   "snapshot_every": cfg.snapshot_every, "tol_stop": cfg.tol_stop},
        "forcing": {"C": cfg.C},
        "outputs": {"kinds": list(cfg.outputs), "out_dir": cfg.out_dir},
        "checks": dict({"names": list(cfg.checks)}, **dict(cfg.check_params)),
    }
    return doc


def serialize_config(cfg):
    """Canonical YAML text; parse_config(serialize_config(cfg)) == cfg."""
    return yaml.safe_dump(_config_dict(cfg), sort_keys=True,
                          default_flow_style=False)
