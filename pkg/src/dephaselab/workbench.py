"""Experiment orchestration: configs, figure datasets, and CSV emission.

A config names one of seven experiments and fills in model parameters, the
state pair, and the grid; everything not supplied falls back to the
documented defaults (g = 1, d = 0, 400 grid intervals per period of the
dephasing factor).  Each experiment produces a :class:`Dataset`, a plain
table plus a metadata mapping, which :func:`emit_csv` renders byte-stably:
``#``-prefixed ``key=value`` header lines, a column-name row, then numbers
formatted with 17 significant digits and LF endings.  Running the same
config twice yields identical bytes; plotting is left to external tools.

Experiments
-----------
``fig3``
    Concurrence of both models' joint states versus time for one initial
    system state.  The environment-diagonal model stays at zero.
``fig4``
    Trace distance between the two models' joint states and between their
    environment marginals, versus time, for one shared initial state.
``fig5``
    Distinguishability gain ``delta_S(s, t_ref)`` and both models' budget
    totals on an (r, s) grid over the state family ``psi_minus_r``.
``fig6``
    The fig5 slice at a single r.
``fig7``
    All three budget terms for both models versus s at a single r.
``equivalence``
    Dephasing-factor trajectories of both models plus verdict metadata.
``blp``
    Distinguishability trajectory of the best backflow pair plus the
    discretized backflow measure.
"""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from dephaselab import (
    __version__,
    correlate,
    dephasing,
    equivalence,
    infoflow,
    matrixcore,
    qstate,
)
from dephaselab._kernels import BACKEND
from dephaselab.dephasing import DephasingModel, QubitModelParams
from dephaselab.errors import (
    CsvWriteError,
    ParseError,
    UnsupportedModelError,
    ValidationError,
)
from dephaselab.infoflow import StatePair
from dephaselab.qstate import DensityMatrix

FIGURES = ("fig3", "fig4", "fig5", "fig6", "fig7", "equivalence", "blp")

# Grid density when n_points is not given: intervals per period pi/g of the
# two-level dephasing factor.
POINTS_PER_PERIOD = 400
# The s-grids of fig5/fig6/fig7 default to this many points on [0, pi/(2g)].
BUDGET_GRID_POINTS = 100
DEFAULT_R = 0.4
DEFAULT_R_SAMPLES = 50
ZERO_CONCURRENCE_TOL = 1e-10

_STATE_PRESETS = ("psi_plus", "psi_minus", "psi_minus_r")

_CONFIG_KEYS = frozenset({
    "figure", "c", "d", "g", "r", "t_max", "n_points", "grid", "r_samples",
    "pair", "pairs", "model_a", "model_b", "tol", "steps", "out",
})


@dataclass(frozen=True)
class ExperimentConfig:
    figure: str
    c: float = 0.0
    d: float = 0.0
    g: float = 1.0
    g_supplied: bool = False
    r: float = DEFAULT_R
    t_max: float | None = None
    n_points: int | None = None
    r_samples: int = DEFAULT_R_SAMPLES
    pair: tuple = ("psi_plus", {"preset": "psi_minus_r"})
    pairs: tuple | None = None
    model_a: object | None = None
    model_b: object | None = None
    tol: float = 1e-9
    steps: int | None = None
    out: str | None = None


@dataclass
class Dataset:
    """One experiment's table: column names, float rows, metadata mapping."""

    columns: tuple
    rows: np.ndarray
    metadata: dict = field(default_factory=dict)


def _matrix_from_json(obj, what, problems):
    """Nested lists with entries either a real number or an [re, im] pair."""
    try:
        rows = []
        for row in obj:
            cells = []
            for cell in row:
                if isinstance(cell, (int, float)):
                    cells.append(complex(cell))
                else:
                    re, im = cell
                    cells.append(complex(float(re), float(im)))
            rows.append(cells)
        m = np.array(rows, dtype=np.complex128)
    except (TypeError, ValueError):
        problems.append(f"{what}: expected a matrix of numbers or [re, im] pairs")
        return None
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        problems.append(f"{what}: expected a nonempty square matrix")
        return None
    return m


def _model_from_spec(spec, what, default_g, problems):
    """A model description: qubit parameters or explicit operators."""
    if not isinstance(spec, dict):
        problems.append(f"{what}: expected an object")
        return None
    if "alpha" in spec or "eta" in spec:
        extra = sorted(set(spec) - {"alpha", "eta", "g"})
        if extra:
            problems.append(f"{what}: unknown keys: {', '.join(extra)}")
            return None
        try:
            alpha = tuple(float(x) for x in spec["alpha"])
            eta = tuple(float(x) for x in spec["eta"])
            g = float(spec.get("g", default_g))
        except (KeyError, TypeError, ValueError):
            problems.append(f"{what}: need alpha and eta as 3-vectors")
            return None
        if len(alpha) != 3 or len(eta) != 3:
            problems.append(f"{what}: alpha and eta must have 3 components")
            return None
        return QubitModelParams(alpha=alpha, eta=eta, g=g)
    extra = sorted(set(spec) - {"h_e", "b_list", "rho_e0"})
    if extra:
        problems.append(f"{what}: unknown keys: {', '.join(extra)}")
        return None
    if not {"h_e", "b_list", "rho_e0"} <= set(spec):
        problems.append(f"{what}: need either alpha/eta or h_e/b_list/rho_e0")
        return None
    h_e = _matrix_from_json(spec["h_e"], f"{what}.h_e", problems)
    rho = _matrix_from_json(spec["rho_e0"], f"{what}.rho_e0", problems)
    if not isinstance(spec["b_list"], list) or not spec["b_list"]:
        problems.append(f"{what}.b_list: expected a nonempty list of matrices")
        return None
    bs = [_matrix_from_json(b, f"{what}.b_list[{k}]", problems)
          for k, b in enumerate(spec["b_list"])]
    if h_e is None or rho is None or any(b is None for b in bs):
        return None
    try:
        return dephasing.build_model(d_s=len(bs), h_e=h_e, b_list=bs,
                                     rho_e0=DensityMatrix(rho, (rho.shape[0],)))
    except Exception as exc:
        problems.append(f"{what}: {exc}")
        return None


def _state_spec_ok(spec, what, problems):
    if isinstance(spec, str):
        if spec not in _STATE_PRESETS:
            problems.append(f"{what}: unknown preset {spec!r}")
        return
    if isinstance(spec, dict):
        if "bloch" in spec:
            extra = sorted(set(spec) - {"bloch"})
            if extra:
                problems.append(f"{what}: unknown keys: {', '.join(extra)}")
                return
            vec = spec["bloch"]
            if (not isinstance(vec, list) or len(vec) != 3
                    or not all(isinstance(x, (int, float)) for x in vec)):
                problems.append(f"{what}: bloch must be a 3-vector of numbers")
            elif sum(float(x) ** 2 for x in vec) > 1.0 + 1e-12:
                problems.append(f"{what}: bloch vector lies outside the unit ball")
            return
        if spec.get("preset") in _STATE_PRESETS:
            extra = sorted(set(spec) - {"preset", "r"})
            if extra:
                problems.append(f"{what}: unknown keys: {', '.join(extra)}")
            elif "r" in spec and not 0.0 <= float(spec["r"]) <= 1.0:
                problems.append(f"{what}: r must lie in [0, 1]")
            return
    problems.append(f"{what}: expected a preset name, bloch vector, or preset object")


def _float_field(data, key, default, problems):
    if key not in data or data[key] is None:
        return default
    try:
        return float(data[key])
    except (TypeError, ValueError):
        problems.append(f"{key}: expected a number")
        return default


def _int_field(data, key, default, problems):
    if key not in data or data[key] is None:
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        problems.append(f"{key}: expected an integer")
        return default
    return value


def config_from_mapping(data) -> ExperimentConfig:
    """Validate a flat mapping and produce a config with defaults applied."""
    if not isinstance(data, dict):
        raise ValidationError("config root must be an object")
    problems = []
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        problems.append(f"unknown keys: {', '.join(unknown)}")

    figure = data.get("figure")
    if figure not in FIGURES:
        problems.append(f"figure must be one of {', '.join(FIGURES)}; got {figure!r}")

    c = _float_field(data, "c", 0.0, problems)
    d = _float_field(data, "d", 0.0, problems)
    g = _float_field(data, "g", 1.0, problems)
    r = _float_field(data, "r", DEFAULT_R, problems)
    tol = _float_field(data, "tol", 1e-9, problems)

    grid = data.get("grid", {})
    if not isinstance(grid, dict):
        problems.append("grid: expected an object with t_max/n_points")
        grid = {}
    else:
        bad = sorted(set(grid) - {"t_max", "n_points"})
        if bad:
            problems.append(f"grid: unknown keys: {', '.join(bad)}")
    t_max = _float_field({**grid, **data}, "t_max", None, problems)
    n_points = _int_field({**grid, **data}, "n_points", None, problems)
    r_samples = _int_field(data, "r_samples", DEFAULT_R_SAMPLES, problems)
    steps = _int_field(data, "steps", None, problems)

    if not 0.0 <= r <= 1.0:
        problems.append(f"r must lie in [0, 1]; got {r}")
    if g <= 0.0:
        problems.append(f"g must be positive; got {g}")
    if t_max is not None and t_max <= 0.0:
        problems.append(f"t_max must be positive; got {t_max}")
    if n_points is not None and n_points < 2:
        problems.append(f"n_points must be at least 2; got {n_points}")
    if r_samples < 1:
        problems.append(f"r_samples must be at least 1; got {r_samples}")
    if steps is not None and steps < 1:
        problems.append(f"steps must be at least 1; got {steps}")
    if tol <= 0.0:
        problems.append(f"tol must be positive; got {tol}")

    model_a = model_b = None
    if "model_a" in data:
        model_a = _model_from_spec(data["model_a"], "model_a", g, problems)
    if "model_b" in data:
        model_b = _model_from_spec(data["model_b"], "model_b", g, problems)
    if model_a is None or model_b is None:
        # The derived pair needs valid population bias and transverse shift.
        if c * c + d * d > 1.0 + 1e-12:
            problems.append(f"(c, d) = ({c}, {d}) lies outside the unit disk")
        elif c >= 1.0:
            problems.append(f"c must be < 1 to construct the partner; got {c}")

    pair = ExperimentConfig.pair
    if "pair" in data:
        spec = data["pair"]
        if not isinstance(spec, dict) or not {"first", "second"} <= set(spec):
            problems.append("pair: expected an object with first and second")
        else:
            bad = sorted(set(spec) - {"first", "second", "r"})
            if bad:
                problems.append(f"pair: unknown keys: {', '.join(bad)}")
            _state_spec_ok(spec["first"], "pair.first", problems)
            _state_spec_ok(spec["second"], "pair.second", problems)
            if "r" in spec:
                try:
                    pr = float(spec["r"])
                except (TypeError, ValueError):
                    problems.append("pair.r: expected a number")
                    pr = DEFAULT_R
                if not 0.0 <= pr <= 1.0:
                    problems.append(f"pair.r must lie in [0, 1]; got {pr}")
                r = pr
            pair = (spec["first"], spec["second"])

    pairs = None
    if "pairs" in data:
        spec = data["pairs"]
        if isinstance(spec, dict) and set(spec) == {"antipodal"}:
            count = spec["antipodal"]
            if not isinstance(count, int) or isinstance(count, bool) or count < 1:
                problems.append("pairs.antipodal: expected a positive integer")
            else:
                pairs = ("antipodal", count)
        elif isinstance(spec, list) and spec:
            for k, entry in enumerate(spec):
                if not isinstance(entry, dict) or not {"first", "second"} <= set(entry):
                    problems.append(f"pairs[{k}]: expected an object with first and second")
                    continue
                _state_spec_ok(entry["first"], f"pairs[{k}].first", problems)
                _state_spec_ok(entry["second"], f"pairs[{k}].second", problems)
            pairs = ("list", tuple((e.get("first"), e.get("second"), e.get("r"))
                                   for e in spec if isinstance(e, dict)))
        else:
            problems.append("pairs: expected a nonempty list or {\"antipodal\": n}")

    out = data.get("out")
    if out is not None and not isinstance(out, str):
        problems.append("out: expected a path string")

    if problems:
        raise ValidationError("; ".join(problems))
    return ExperimentConfig(
        figure=figure, c=c, d=d, g=g, g_supplied="g" in data, r=r,
        t_max=t_max, n_points=n_points, r_samples=r_samples, pair=pair,
        pairs=pairs, model_a=model_a, model_b=model_b, tol=tol, steps=steps,
        out=out,
    )


def load_config(source) -> ExperimentConfig:
    """Read a JSON config from a path or stream and validate it."""
    if isinstance(source, (str, os.PathLike)):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read config: {exc}") from exc
    else:
        text = source.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"config line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return config_from_mapping(data)


def _resolve_state(spec, r):
    """State spec to (DensityMatrix, label)."""
    if isinstance(spec, dict) and "bloch" in spec:
        vec = tuple(float(x) for x in spec["bloch"])
        label = "bloch(%.17g,%.17g,%.17g)" % vec
        return qstate.from_bloch(vec), label
    if isinstance(spec, dict):
        preset = spec["preset"]
        r = float(spec.get("r", r))
    else:
        preset = spec
    if preset == "psi_plus":
        return qstate.pure_state([1.0, 1.0]), "psi_plus"
    if preset == "psi_minus":
        return qstate.pure_state([1.0, -1.0]), "psi_minus"
    amp = [r, -float(np.sqrt(max(0.0, 1.0 - r * r)))]
    return qstate.pure_state(amp), "psi_minus_r(r=%.17g)" % r


def _resolve_pair(cfg: ExperimentConfig, r=None) -> StatePair:
    r = cfg.r if r is None else r
    first, lab1 = _resolve_state(cfg.pair[0], r)
    second, lab2 = _resolve_state(cfg.pair[1], r)
    return StatePair(first, second, label=f"{lab1}|{lab2}")


def _describe_model(model_or_params) -> str:
    if isinstance(model_or_params, QubitModelParams):
        p = model_or_params
        return ("qubit(alpha=(%.17g,%.17g,%.17g), eta=(%.17g,%.17g,%.17g), g=%.17g)"
                % (*p.alpha, *p.eta, p.g))
    return f"custom(d_s={model_or_params.d_s}, d_e={model_or_params.d_e})"


def _models(cfg: ExperimentConfig):
    """Both models plus their metadata descriptions.

    Unless overridden, model_a is the environment-diagonal family member
    (alpha = (0,0,c), eta = (0,0,1)) and model_b its pure-environment
    partner with the same reduced dynamics.
    """
    if cfg.model_a is None:
        pa = QubitModelParams(alpha=(0.0, 0.0, cfg.c), eta=(0.0, 0.0, 1.0), g=cfg.g)
    else:
        pa = cfg.model_a
    if cfg.model_b is None:
        pb = equivalence.construct_partner(cfg.c, cfg.d, cfg.g)
    else:
        pb = cfg.model_b
    ma = dephasing.qubit_model(pa) if isinstance(pa, QubitModelParams) else pa
    mb = dephasing.qubit_model(pb) if isinstance(pb, QubitModelParams) else pb
    return ma, mb, _describe_model(pa), _describe_model(pb)


def _time_grid(cfg: ExperimentConfig, default_t_max: float):
    t_max = default_t_max if cfg.t_max is None else cfg.t_max
    if cfg.n_points is None:
        period = np.pi / cfg.g
        n = max(2, int(round(POINTS_PER_PERIOD * t_max / period)) + 1)
    else:
        n = cfg.n_points
    return np.linspace(0.0, t_max, n)


def _s_grid(cfg: ExperimentConfig):
    t_ref = np.pi / (2.0 * cfg.g) if cfg.t_max is None else cfg.t_max
    n = BUDGET_GRID_POINTS if cfg.n_points is None else cfg.n_points
    return np.linspace(0.0, t_ref, n), t_ref


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _base_metadata(cfg: ExperimentConfig, desc_a=None, desc_b=None) -> dict:
    md = {
        "tool": "dephaselab",
        "version": __version__,
        "kernel_backend": BACKEND,
        "figure": cfg.figure,
        "coupling_g": _fmt(cfg.g),
        # Times are quoted in units of the inverse coupling unless the
        # caller supplied g explicitly.
        "coupling_default_assumed": "false" if cfg.g_supplied else "true",
        "free_system_hamiltonians": "assumed-identical",
    }
    if desc_a is not None:
        md["model_a"] = desc_a
    if desc_b is not None:
        md["model_b"] = desc_b
    return md


def _distance(a: np.ndarray, b: np.ndarray) -> float:
    w = matrixcore.eigvals_hermitian(a - b)
    return 0.5 * float(np.abs(w).sum())


def _require_two_level_env(ma: DephasingModel, mb: DephasingModel, figure: str):
    if ma.d_s != 2 or mb.d_s != 2 or ma.d_e != 2 or mb.d_e != 2:
        raise ValidationError(
            f"{figure} needs two-level systems and environments; "
            f"got d_s={ma.d_s}/{mb.d_s}, d_e={ma.d_e}/{mb.d_e}"
        )


def _spot_validate(*states: DensityMatrix):
    # Cheap invariant sweep on representative states of a run; a failure
    # here is a bug in the propagation pipeline, not in the caller's input.
    for s in states:
        s.validate()


def _fig3(cfg: ExperimentConfig) -> Dataset:
    ma, mb, da, db = _models(cfg)
    _require_two_level_env(ma, mb, "fig3")
    ts = _time_grid(cfg, 2.0 * np.pi / cfg.g)
    psi, label = _resolve_state(cfg.pair[0], cfg.r)
    ga = dephasing.global_state_trajectory(ma, psi, ts, cfg.steps)
    gb = dephasing.global_state_trajectory(mb, psi, ts, cfg.steps)
    rows = np.empty((ts.size, 3))
    for k, t in enumerate(ts):
        rows[k, 0] = t
        rows[k, 1] = correlate.concurrence(DensityMatrix(ga[k], (2, 2)))
        rows[k, 2] = correlate.concurrence(DensityMatrix(gb[k], (2, 2)))
    _spot_validate(DensityMatrix(ga[-1], (2, 2)), DensityMatrix(gb[-1], (2, 2)))
    md = _base_metadata(cfg, da, db)
    md["state"] = label
    md["t_max"] = _fmt(ts[-1])
    md["n_points"] = str(ts.size)
    zeros = ts[rows[:, 2] <= ZERO_CONCURRENCE_TOL]
    md["zero_concurrence_times_model_b"] = ";".join(format(t, ".6g") for t in zeros)
    md["zero_concurrence_tol"] = _fmt(ZERO_CONCURRENCE_TOL)
    return Dataset(("t", "concurrence_model_a", "concurrence_model_b"), rows, md)


def _fig4(cfg: ExperimentConfig) -> Dataset:
    ma, mb, da, db = _models(cfg)
    if (ma.d_s, ma.d_e) != (mb.d_s, mb.d_e):
        raise ValidationError(
            "fig4 compares joint states; both models need equal dimensions"
        )
    ts = _time_grid(cfg, np.pi / cfg.g)
    psi, label = _resolve_state(cfg.pair[0], cfg.r)
    ga = dephasing.global_state_trajectory(ma, psi, ts, cfg.steps)
    gb = dephasing.global_state_trajectory(mb, psi, ts, cfg.steps)
    dims = (ma.d_s, ma.d_e)
    rows = np.empty((ts.size, 3))
    for k, t in enumerate(ts):
        env_a = matrixcore.partial_trace(ga[k], dims, keep=1)
        env_b = matrixcore.partial_trace(gb[k], dims, keep=1)
        rows[k, 0] = t
        rows[k, 1] = _distance(ga[k], gb[k])
        rows[k, 2] = _distance(env_a, env_b)
    _spot_validate(DensityMatrix(ga[-1], dims), DensityMatrix(gb[-1], dims))
    md = _base_metadata(cfg, da, db)
    md["state"] = label
    md["t_max"] = _fmt(ts[-1])
    md["n_points"] = str(ts.size)
    return Dataset(("t", "D_global", "D_env"), rows, md)


def _budget_columns(cfg, ma, mb, pair, s_grid, t_ref):
    """delta_S plus both models' budget totals on one s-grid."""
    with_ref = np.append(s_grid, t_ref)
    d_traj = infoflow.distance_trajectory(ma, pair, with_ref, cfg.steps)
    delta = d_traj[-1] - d_traj[:-1]
    env_a, c1_a, c2_a = infoflow.budget_trajectory(ma, pair, s_grid, cfg.steps)
    env_b, c1_b, c2_b = infoflow.budget_trajectory(mb, pair, s_grid, cfg.steps)
    return delta, env_a + c1_a + c2_a, env_b + c1_b + c2_b


def _fig5(cfg: ExperimentConfig) -> Dataset:
    ma, mb, da, db = _models(cfg)
    s_grid, t_ref = _s_grid(cfg)
    rs = np.linspace(0.0, 1.0, cfg.r_samples)
    first_spec = cfg.pair[0]
    rows = np.empty((rs.size * s_grid.size, 5))
    for i, r in enumerate(rs):
        first, _ = _resolve_state(first_spec, float(r))
        second, _ = _resolve_state({"preset": "psi_minus_r", "r": float(r)}, float(r))
        pair = StatePair(first, second)
        delta, ise_a, ise_b = _budget_columns(cfg, ma, mb, pair, s_grid, t_ref)
        block = slice(i * s_grid.size, (i + 1) * s_grid.size)
        rows[block, 0] = r
        rows[block, 1] = s_grid
        rows[block, 2] = delta
        rows[block, 3] = ise_a
        rows[block, 4] = ise_b
    last = dephasing.global_state(ma, _resolve_state(first_spec, 1.0)[0],
                                  float(t_ref), cfg.steps)
    _spot_validate(last)
    md = _base_metadata(cfg, da, db)
    md["t_ref"] = _fmt(t_ref)
    md["n_points"] = str(s_grid.size)
    md["r_samples"] = str(rs.size)
    md["pair"] = "psi_plus|psi_minus_r(r scan)" if first_spec == "psi_plus" else "custom"
    return Dataset(("r", "s", "delta_S", "I_SE_model_a", "I_SE_model_b"), rows, md)


def _fig6(cfg: ExperimentConfig) -> Dataset:
    ma, mb, da, db = _models(cfg)
    s_grid, t_ref = _s_grid(cfg)
    pair = _resolve_pair(cfg)
    delta, ise_a, ise_b = _budget_columns(cfg, ma, mb, pair, s_grid, t_ref)
    rows = np.column_stack([s_grid, delta, ise_a, ise_b])
    _spot_validate(dephasing.global_state(ma, pair.first, float(t_ref), cfg.steps),
                   dephasing.global_state(mb, pair.second, float(t_ref), cfg.steps))
    md = _base_metadata(cfg, da, db)
    md["pair"] = pair.label
    md["r"] = _fmt(cfg.r)
    md["t_ref"] = _fmt(t_ref)
    md["n_points"] = str(s_grid.size)
    md["min_saturation_gap_model_a"] = _fmt(float(np.min(ise_a - delta)))
    return Dataset(("s", "delta_S", "I_SE_model_a", "I_SE_model_b"), rows, md)


def _fig7(cfg: ExperimentConfig) -> Dataset:
    ma, mb, da, db = _models(cfg)
    s_grid, t_ref = _s_grid(cfg)
    pair = _resolve_pair(cfg)
    env_a, c1_a, c2_a = infoflow.budget_trajectory(ma, pair, s_grid, cfg.steps)
    env_b, c1_b, c2_b = infoflow.budget_trajectory(mb, pair, s_grid, cfg.steps)
    rows = np.column_stack([
        s_grid,
        env_a, c1_a, c2_a, env_a + c1_a + c2_a,
        env_b, c1_b, c2_b, env_b + c1_b + c2_b,
    ])
    _spot_validate(dephasing.global_state(ma, pair.first, float(t_ref), cfg.steps),
                   dephasing.global_state(mb, pair.second, float(t_ref), cfg.steps))
    md = _base_metadata(cfg, da, db)
    md["pair"] = pair.label
    md["r"] = _fmt(cfg.r)
    md["t_ref"] = _fmt(t_ref)
    md["n_points"] = str(s_grid.size)
    return Dataset(
        ("s",
         "env_term_model_a", "corr_term_1_model_a", "corr_term_2_model_a",
         "I_SE_model_a",
         "env_term_model_b", "corr_term_1_model_b", "corr_term_2_model_b",
         "I_SE_model_b"),
        rows, md,
    )


def _equivalence(cfg: ExperimentConfig) -> Dataset:
    ma, mb, da, db = _models(cfg)
    if ma.d_s != mb.d_s:
        raise ValidationError("equivalence needs equal system dimensions")
    ts = _time_grid(cfg, 2.0 * np.pi / cfg.g)
    fa = dephasing.factor_trajectory(ma, 1, 0, ts, cfg.steps)
    fb = dephasing.factor_trajectory(mb, 1, 0, ts, cfg.steps)
    rows = np.column_stack([ts, fa.real, fa.imag, fb.real, fb.imag, np.abs(fa - fb)])
    verdict = equivalence.time_domain_check(ma, mb, grid=ts, tol=cfg.tol,
                                            steps=cfg.steps)
    md = _base_metadata(cfg, da, db)
    md["t_max"] = _fmt(ts[-1])
    md["n_points"] = str(ts.size)
    md["factor_indices"] = "n=1,m=0"
    md["time_domain_equivalent"] = str(verdict.equivalent).lower()
    md["time_domain_max_discrepancy"] = _fmt(verdict.max_discrepancy)
    md["time_domain_borderline"] = str(verdict.borderline).lower()
    try:
        mo = equivalence.moment_check(ma, mb, tol=cfg.tol)
        md["moment_equivalent"] = str(mo.equivalent).lower()
        md["moment_max_discrepancy"] = _fmt(mo.max_discrepancy)
    except UnsupportedModelError:
        md["moment_equivalent"] = "not-applicable"
    if isinstance(cfg.model_a, (QubitModelParams, type(None))) and \
            isinstance(cfg.model_b, (QubitModelParams, type(None))):
        pa = cfg.model_a or QubitModelParams((0.0, 0.0, cfg.c), (0.0, 0.0, 1.0), cfg.g)
        pb = cfg.model_b or equivalence.construct_partner(cfg.c, cfg.d, cfg.g)
        ip = equivalence.qubit_condition(pa, pb, tol=cfg.tol)
        md["inner_product_equivalent"] = str(ip.equivalent).lower()
        md["inner_product_discrepancy"] = _fmt(ip.max_discrepancy)
    return Dataset(
        ("t", "factor_model_a_re", "factor_model_a_im",
         "factor_model_b_re", "factor_model_b_im", "abs_difference"),
        rows, md,
    )


def _blp_pairs(cfg: ExperimentConfig):
    if cfg.pairs is None:
        return [StatePair(qstate.pure_state([1.0, 1.0]),
                          qstate.pure_state([1.0, -1.0]),
                          label="psi_plus|psi_minus")]
    kind, payload = cfg.pairs
    if kind == "antipodal":
        return infoflow.antipodal_pairs(payload)
    out = []
    for first, second, pr in payload:
        r = cfg.r if pr is None else float(pr)
        f, lab1 = _resolve_state(first, r)
        s, lab2 = _resolve_state(second, r)
        out.append(StatePair(f, s, label=f"{lab1}|{lab2}"))
    return out


def _blp(cfg: ExperimentConfig) -> Dataset:
    ma, _, da, db = _models(cfg)
    ts = _time_grid(cfg, np.pi / cfg.g)
    pairs = _blp_pairs(cfg)
    measure, best = infoflow.blp_measure(ma, pairs, ts, cfg.steps)
    d_traj = infoflow.distance_trajectory(ma, best, ts, cfg.steps)
    rows = np.column_stack([ts, d_traj])
    _spot_validate(dephasing.reduced_state(ma, best.first, float(ts[-1]), cfg.steps))
    md = _base_metadata(cfg, da, db)
    md["t_max"] = _fmt(ts[-1])
    md["n_points"] = str(ts.size)
    md["n_pairs"] = str(len(pairs))
    md["best_pair"] = best.label
    md["blp_measure"] = _fmt(measure)
    return Dataset(("t", "D_S"), rows, md)


_BUILDERS = {
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
    "equivalence": _equivalence,
    "blp": _blp,
}


def run_experiment(cfg: ExperimentConfig) -> Dataset:
    """Build the dataset for the configured experiment."""
    if cfg.figure not in _BUILDERS:
        raise ValidationError(f"figure must be one of {', '.join(FIGURES)}")
    return _BUILDERS[cfg.figure](cfg)


def emit_csv(dataset: Dataset, out) -> None:
    """Write the dataset byte-stably; identical inputs give identical files."""
    rows = np.asarray(dataset.rows)
    if rows.size == 0:
        raise CsvWriteError("refusing to write an empty dataset")
    if rows.ndim != 2 or rows.shape[1] != len(dataset.columns):
        raise CsvWriteError(
            f"rows have {rows.shape} entries, expected (*, {len(dataset.columns)})"
        )
    lines = [f"# {key}={value}" for key, value in dataset.metadata.items()]
    lines.append(",".join(dataset.columns))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    text = "\n".join(lines) + "\n"
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CsvWriteError(f"cannot write {out}: {exc}") from exc
