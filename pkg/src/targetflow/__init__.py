"""targetflow: a forced curve-shortening flow onto a prescribed target curve.

Build a target curve, take its tubular chart and forcing constant, evolve
normal-graphical initial data with the graph solver (or the front-tracking
oracle), and check the exponential-decay claims on the recorded trace:

    >>> import targetflow as tf
    >>> curve = tf.build_target(tf.CurveSpec("circle", {"radius": 1.0}), 256)
    >>> chart = tf.admissible_interval(curve)
    >>> cfg = tf.select_C(curve, chart)
    >>> trace = tf.run(0.5 + 0.0 * curve.u, curve, cfg,
    ...                tf.SolverConfig(dt=1e-3, t_end=1.0))
"""

from .analysis import (
    CheckResult,
    FlowTrace,
    barrier_check,
    fit_decay_rate,
    first_time_below,
    gradient_envelope_check,
    higher_derivative_decay,
    second_derivative_envelope_check,
    t_epsilon,
    tail_window,
)
from .ambient import (
    AmbientPolygon,
    ambient_step,
    hausdorff,
    polygon_curvature,
    run_ambient,
)
from .chart import AdmissibleChart, admissible_interval, project, project_batch, to_ambient
from .config import RunConfig, build_initial, parse_config, serialize_config
from .curves import (
    CurveSpec,
    TargetCurve,
    build_target,
    curvature_profile,
    periodic_derivative,
    polygon_is_simple,
)
from .emit import emit_csv, emit_svg_evolution, emit_svg_field
from .flow import GraphState, SolverConfig, auto_dt, rhs, rhs_values, run, step
from .forcing import ForcingConfig, eval_V, f_scalar, select_C
from . import errors

__version__ = "0.1.0"

__all__ = [
    "AdmissibleChart", "AmbientPolygon", "CheckResult", "CurveSpec",
    "FlowTrace", "ForcingConfig", "GraphState", "RunConfig", "SolverConfig",
    "TargetCurve", "admissible_interval", "ambient_step", "auto_dt",
    "barrier_check", "build_initial", "build_target", "curvature_profile",
    "emit_csv", "emit_svg_evolution", "emit_svg_field", "errors", "eval_V",
    "f_scalar", "first_time_below", "fit_decay_rate",
    "gradient_envelope_check", "hausdorff", "higher_derivative_decay",
    "parse_config", "periodic_derivative", "polygon_curvature",
    "polygon_is_simple", "project", "project_batch", "rhs", "rhs_values",
    "run", "run_ambient", "second_derivative_envelope_check", "select_C",
    "serialize_config", "step", "t_epsilon", "tail_window", "to_ambient",
]
