"""Experiment runner: config ingestion, orchestration, serialization, CLI.

Experiments are described by a JSON config with a ``kind`` plus the parameter
blocks the kind needs (grid, state, partition, interval, kernel, thresholds).
Every module precondition is checked here, before any computation, so module
errors cannot originate from an accepted config.  Results are written as one
JSON file (scalars, config echo, provenance) plus one CSV per named vector or
matrix result, with 17-significant-digit reals; repeated runs of the same
config produce bit-identical files.

CLI::

    arrival <kind> --config cfg.json [--set key.path=value ...]
            [--out DIR] [--workers N]

Exit codes: 0 success, 2 config error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import copy
import datetime
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .backflow import (
    backflow_state,
    build_kernel,
    interference_witness,
    min_eigenvalue,
    natural_momentum_scale,
)
from .current import current_trace, integrated_current, semiclassical_crossing_probability
from .errors import ConfigError, NumericalError
from .histories import (
    EXACT_MODE,
    SEMICLASSICAL_MODE,
    HistoryPartition,
    decoherence_analysis,
    exact_branches,
    semiclassical_branches,
    zeno_reflection_scan,
)
from .qgrid import free_evolve, make_grid, momentum_probabilities, norm_sq, required_half_width
from .states import GaussianSpec, gaussian, negative_momentum_fraction, overlap_matrix, superpose
from .timescales import regime_check, zeno_time_general

__all__ = [
    "ExperimentConfig",
    "ResultRecord",
    "Table",
    "run",
    "scan",
    "main",
]

KINDS = ("evolve", "branches", "decoherence", "current", "backflow", "zeno", "scan")

_DEFAULT_EPS_DEC = 0.1
_DEFAULT_DT_J_FACTOR = 20.0


# ---------------------------------------------------------------------------
# config access helpers
# ---------------------------------------------------------------------------


def _get(cfg: dict, path: str, default=None, required: bool = False):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(f"{path}: required field is missing")
            return default
        node = node[part]
    return node


def _number(cfg: dict, path: str, *, default=None, required=False, positive=False,
            nonnegative=False) -> float | None:
    val = _get(cfg, path, default=default, required=required)
    if val is None:
        return None
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {val!r}")
    val = float(val)
    if not np.isfinite(val):
        raise ConfigError(f"{path}: must be finite, got {val}")
    if positive and not val > 0:
        raise ConfigError(f"{path}: must be > 0, got {val}")
    if nonnegative and val < 0:
        raise ConfigError(f"{path}: must be >= 0, got {val}")
    return val


def _integer(cfg: dict, path: str, *, default=None, required=False, minimum=None) -> int | None:
    val = _get(cfg, path, default=default, required=required)
    if val is None:
        return None
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{path}: expected an integer, got {val!r}")
    if minimum is not None and val < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}, got {val}")
    return val


def _boolean(cfg: dict, path: str, *, default: bool) -> bool:
    val = _get(cfg, path, default=default)
    if not isinstance(val, bool):
        raise ConfigError(f"{path}: expected true/false, got {val!r}")
    return val


def _coefficient(raw, path: str) -> complex:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return complex(raw)
    if (
        isinstance(raw, (list, tuple))
        and len(raw) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)
    ):
        return complex(raw[0], raw[1])
    raise ConfigError(f"{path}: expected a number or [re, im] pair, got {raw!r}")


# ---------------------------------------------------------------------------
# typed config
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridParams:
    n_points: int
    half_width: float
    mass: float = 1.0


@dataclass(frozen=True)
class StateTerm:
    coefficient: complex
    q0: float
    p0: float
    sigma: float


@dataclass(frozen=True)
class PartitionParams:
    epsilon: float
    n_steps: int
    coarse_factor: int = 1
    origin: float = 0.0


@dataclass(frozen=True)
class KernelParams:
    n_nodes: int
    t1: float
    t2: float
    p_max: float  # resolved; defaults to 10 in units sqrt(mass / (t2 - t1))


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated parameters of one experiment (or a sweep of them)."""

    kind: str
    grid: GridParams | None = None
    state: tuple[StateTerm, ...] = ()
    partition: PartitionParams | None = None
    mode: str = EXACT_MODE
    include_non_crossing: bool = True
    eps_dec: float = _DEFAULT_EPS_DEC
    dt_j: float | None = None
    dt_j_factor: float = _DEFAULT_DT_J_FACTOR
    time: float | None = None
    t1: float | None = None
    t2: float | None = None
    tau: float | None = None
    epsilons: tuple[float, ...] = ()
    kernel: KernelParams | None = None
    sweep: SweepSpec | None = None
    base: dict | None = None
    echo: dict = field(default_factory=dict, compare=False)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _validate_grid(cfg: dict) -> GridParams:
    n = _integer(cfg, "grid.n_points", required=True)
    if n < 256 or (n & (n - 1)) != 0:
        raise ConfigError(f"grid.n_points: must be a power of two >= 256, got {n}")
    half_width = _number(cfg, "grid.half_width", required=True, positive=True)
    mass = _number(cfg, "grid.mass", default=1.0, positive=True)
    return GridParams(n_points=n, half_width=half_width, mass=mass)


def _validate_state(cfg: dict, grid: GridParams) -> tuple[StateTerm, ...]:
    terms_raw = _get(cfg, "state.terms", required=True)
    if not isinstance(terms_raw, list) or not terms_raw:
        raise ConfigError("state.terms: expected a non-empty list of packet terms")
    p_max = np.pi * grid.n_points / (2.0 * grid.half_width)
    terms = []
    for i, term in enumerate(terms_raw):
        base = f"state.terms[{i}]"
        if not isinstance(term, dict):
            raise ConfigError(f"{base}: expected an object")
        coeff = _coefficient(term.get("coefficient", 1.0), f"{base}.coefficient")
        q0 = _number(term, "q0", required=True, positive=True)
        p0 = _number(term, "p0", required=True)
        sigma = _number(term, "sigma", required=True, positive=True)
        if q0 < 5.0 * sigma:
            raise ConfigError(
                f"{base}: q0 = {q0:g} violates the leakage guard q0 >= 5 sigma"
            )
        if abs(p0) + 2.0 / sigma >= p_max:
            raise ConfigError(
                f"{base}: momentum support |p0| + 2/sigma = {abs(p0) + 2.0 / sigma:g} "
                f"exceeds the grid Nyquist bound {p_max:g}"
            )
        if q0 + 5.0 * sigma > grid.half_width:
            raise ConfigError(
                f"{base}: packet does not fit inside grid.half_width = {grid.half_width:g}"
            )
        terms.append(StateTerm(coefficient=coeff, q0=q0, p0=p0, sigma=sigma))
    return tuple(terms)


def _check_box(grid: GridParams, terms: tuple[StateTerm, ...], horizon: float, label: str):
    if horizon <= 0:
        return
    need = max(
        required_half_width(t.q0, t.p0, t.sigma, horizon, grid.mass) for t in terms
    )
    if grid.half_width < need:
        raise ConfigError(
            f"grid.half_width: {grid.half_width:g} is too small for the {label} "
            f"horizon {horizon:g}; need at least {need:.6g} to keep wrap-around "
            f"leakage negligible"
        )


def _validate_partition(cfg: dict) -> PartitionParams:
    eps = _number(cfg, "partition.epsilon", required=True, positive=True)
    n = _integer(cfg, "partition.n_steps", required=True, minimum=1)
    mcg = _integer(cfg, "partition.coarse_factor", default=1, minimum=1)
    origin = _number(cfg, "partition.origin", default=0.0, nonnegative=True)
    if n % mcg != 0:
        raise ConfigError(
            f"partition.coarse_factor: {mcg} does not divide n_steps = {n}"
        )
    return PartitionParams(epsilon=eps, n_steps=n, coarse_factor=mcg, origin=origin)


def _validate_mode(cfg: dict) -> str:
    mode = _get(cfg, "mode", default=EXACT_MODE)
    aliases = {
        "exact": EXACT_MODE,
        EXACT_MODE: EXACT_MODE,
        "semiclassical": SEMICLASSICAL_MODE,
        SEMICLASSICAL_MODE: SEMICLASSICAL_MODE,
    }
    if mode not in aliases:
        raise ConfigError(
            f"mode: expected 'exact' or 'semiclassical', got {mode!r}"
        )
    return aliases[mode]


def _validate_interval(cfg: dict, prefix: str = "interval") -> tuple[float, float]:
    t1 = _number(cfg, f"{prefix}.t1", required=True)
    t2 = _number(cfg, f"{prefix}.t2", required=True)
    if t2 <= t1:
        raise ConfigError(f"{prefix}.t2: must be greater than {prefix}.t1")
    return t1, t2


def validate_config(raw: dict) -> ExperimentConfig:
    """Check a raw config dict against every module precondition it touches."""
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    kind = _get(raw, "kind", required=True)
    if kind not in KINDS:
        raise ConfigError(f"kind: expected one of {KINDS}, got {kind!r}")

    if kind == "scan":
        return _validate_scan(raw)

    thresholds_eps = _number(raw, "thresholds.eps_dec", default=_DEFAULT_EPS_DEC, positive=True)
    dt_j_factor = _number(raw, "thresholds.dt_j_factor", default=_DEFAULT_DT_J_FACTOR, positive=True)

    if kind == "backflow":
        grid = _validate_grid(raw)
        n_nodes = _integer(raw, "kernel.n_nodes", required=True, minimum=1)
        t1, t2 = _validate_interval(raw, "kernel")
        p_max = _number(raw, "kernel.p_max", positive=True)
        if p_max is None:
            p_max = 10.0 * natural_momentum_scale(t1, t2, grid.mass)
        grid_p_max = np.pi * grid.n_points / (2.0 * grid.half_width)
        if p_max >= grid_p_max:
            raise ConfigError(
                f"kernel.p_max: {p_max:g} exceeds the grid Nyquist bound {grid_p_max:g}"
            )
        dp = np.pi / grid.half_width
        if dp > p_max / n_nodes:
            raise ConfigError(
                f"grid.half_width: momentum resolution {dp:g} is coarser than the "
                f"kernel cell width {p_max / n_nodes:g}; enlarge grid.half_width"
            )
        echo = {
            "kind": kind,
            "grid": vars(grid),
            "kernel": {"n_nodes": n_nodes, "t1": t1, "t2": t2, "p_max": p_max},
            "thresholds": {"dt_j_factor": dt_j_factor},
        }
        return ExperimentConfig(
            kind=kind,
            grid=grid,
            kernel=KernelParams(n_nodes=n_nodes, t1=t1, t2=t2, p_max=p_max),
            dt_j_factor=dt_j_factor,
            echo=echo,
        )

    grid = _validate_grid(raw)
    terms = _validate_state(raw, grid)
    echo: dict = {
        "kind": kind,
        "grid": vars(grid),
        "state": {
            "terms": [
                {
                    "coefficient": [t.coefficient.real, t.coefficient.imag],
                    "q0": t.q0,
                    "p0": t.p0,
                    "sigma": t.sigma,
                }
                for t in terms
            ]
        },
    }

    if kind == "evolve":
        time = _number(raw, "time", required=True)
        _check_box(grid, terms, abs(time), "evolution")
        echo["time"] = time
        return ExperimentConfig(kind=kind, grid=grid, state=terms, time=time, echo=echo)

    if kind in ("branches", "decoherence"):
        part = _validate_partition(raw)
        mode = _validate_mode(raw)
        horizon = part.origin + part.epsilon * part.n_steps
        _check_box(grid, terms, horizon, "history")
        include_nc = _boolean(raw, "include_non_crossing", default=True)
        echo["partition"] = vars(part)
        echo["mode"] = mode
        if kind == "decoherence":
            echo["include_non_crossing"] = include_nc
            echo["thresholds"] = {"eps_dec": thresholds_eps}
        return ExperimentConfig(
            kind=kind,
            grid=grid,
            state=terms,
            partition=part,
            mode=mode,
            include_non_crossing=include_nc,
            eps_dec=thresholds_eps,
            echo=echo,
        )

    if kind == "current":
        t1, t2 = _validate_interval(raw)
        dt_j = _number(raw, "interval.dt_j", positive=True)
        _check_box(grid, terms, max(abs(t1), abs(t2)), "current")
        echo["interval"] = {"t1": t1, "t2": t2, "dt_j": dt_j}
        echo["thresholds"] = {"dt_j_factor": dt_j_factor}
        return ExperimentConfig(
            kind=kind, grid=grid, state=terms, t1=t1, t2=t2, dt_j=dt_j,
            dt_j_factor=dt_j_factor, echo=echo,
        )

    if kind == "zeno":
        tau = _number(raw, "tau", required=True, positive=True)
        eps_raw = _get(raw, "epsilons", required=True)
        if not isinstance(eps_raw, list) or not eps_raw:
            raise ConfigError("epsilons: expected a non-empty list of step sizes")
        epsilons = []
        for i, e in enumerate(eps_raw):
            if isinstance(e, bool) or not isinstance(e, (int, float)) or not e > 0:
                raise ConfigError(f"epsilons[{i}]: must be a positive number, got {e!r}")
            n = round(tau / e)
            if n < 1 or abs(n * e - tau) > 1e-9 * max(tau, 1.0):
                raise ConfigError(f"epsilons[{i}]: {e} does not divide tau = {tau}")
            epsilons.append(float(e))
        _check_box(grid, terms, tau, "monitoring")
        echo["tau"] = tau
        echo["epsilons"] = epsilons
        return ExperimentConfig(
            kind=kind, grid=grid, state=terms, tau=tau, epsilons=tuple(epsilons),
            echo=echo,
        )

    raise ConfigError(f"kind: unhandled kind {kind!r}")  # pragma: no cover


def _validate_scan(raw: dict) -> ExperimentConfig:
    base = _get(raw, "base", required=True)
    if not isinstance(base, dict):
        raise ConfigError("base: expected an object holding the swept experiment")
    if base.get("kind") == "scan":
        raise ConfigError("base.kind: nested scans are not supported")
    sweep = _get(raw, "sweep", required=True)
    if not isinstance(sweep, dict):
        raise ConfigError("sweep: expected an object with 'axis' and 'values'")
    extra = set(sweep) - {"axis", "values"}
    if extra:
        raise ConfigError(
            f"sweep: unexpected keys {sorted(extra)}; exactly one swept axis "
            "with 'axis' and 'values' is supported"
        )
    axis = sweep.get("axis")
    if not isinstance(axis, str) or not axis:
        raise ConfigError("sweep.axis: expected a non-empty key path")
    values = sweep.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values: expected a non-empty list")
    # Validate every point now so no error can surface mid-sweep.
    for i, v in enumerate(values):
        try:
            validate_config(_substitute(base, axis, v))
        except ConfigError as exc:
            raise ConfigError(f"sweep point {i} (value {v!r}): {exc}") from exc
    echo = {
        "kind": "scan",
        "base": copy.deepcopy(base),
        "sweep": {"axis": axis, "values": copy.deepcopy(values)},
    }
    return ExperimentConfig(
        kind="scan", sweep=SweepSpec(axis=axis, values=tuple(values)), base=base,
        echo=echo,
    )


def _substitute(base: dict, axis: str, value) -> dict:
    cfg = copy.deepcopy(base)
    node = cfg
    parts = axis.split(".")
    for key in parts[:-1]:
        nxt = node.get(key)
        if not isinstance(nxt, dict):
            nxt = {}
            node[key] = nxt
        node = nxt
    node[parts[-1]] = copy.deepcopy(value)
    return cfg


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass
class Table:
    """Named columns over a 2D float array; serialized as one CSV."""

    columns: list[str]
    data: np.ndarray
    allow_nan: bool = False

    def __post_init__(self):
        self.data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if self.data.shape[1] != len(self.columns):
            raise ValueError("column count does not match data width")


@dataclass
class ResultRecord:
    """Outcome of one experiment: scalars, tables, config echo, provenance."""

    kind: str
    config: dict
    scalars: dict
    vectors: dict
    provenance: dict

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "scalars": self.scalars,
            "vectors": {name: f"{name}.csv" for name in sorted(self.vectors)},
            "provenance": self.provenance,
        }

    def write(self, out_dir: str, stem: str = "result") -> str:
        os.makedirs(out_dir, exist_ok=True)
        json_path = os.path.join(out_dir, f"{stem}.json")
        payload = self.to_json_dict()
        payload["vectors"] = {
            name: f"{stem}_{name}.csv" for name in sorted(self.vectors)
        }
        with open(json_path, "w", newline="\n") as f:
            json.dump(payload, f, sort_keys=True, indent=2, allow_nan=False)
            f.write("\n")
        for name, table in self.vectors.items():
            _write_csv(os.path.join(out_dir, f"{stem}_{name}.csv"), table)
        return json_path


def _fmt_real(x: float) -> str:
    return "%.17g" % x


def _write_csv(path: str, table: Table):
    if not table.allow_nan and not np.all(np.isfinite(table.data)):
        raise NumericalError(f"non-finite values in result table {path}")
    with open(path, "w", newline="\n") as f:
        f.write(",".join(table.columns) + "\n")
        for row in table.data:
            f.write(",".join(_fmt_real(v) for v in row) + "\n")


def _provenance() -> dict:
    # A wall-clock stamp would break bit-identical reruns; only an explicit
    # SOURCE_DATE_EPOCH is honored.
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    stamp = None
    if epoch is not None:
        stamp = datetime.datetime.fromtimestamp(
            int(epoch), tz=datetime.timezone.utc
        ).isoformat()
    return {"artifact_version": __version__, "timestamp": stamp}


def _check_finite_scalars(scalars: dict):
    for key, val in scalars.items():
        if isinstance(val, (bool, np.bool_)):
            scalars[key] = bool(val)
        elif isinstance(val, (int, np.integer)):
            scalars[key] = int(val)
        elif isinstance(val, (float, np.floating)):
            if not np.isfinite(val):
                raise NumericalError(f"scalar result {key} is not finite: {val}")
            scalars[key] = float(val)


# ---------------------------------------------------------------------------
# experiment pipelines
# ---------------------------------------------------------------------------


def _build_state(cfg: ExperimentConfig):
    grid = make_grid(cfg.grid.n_points, cfg.grid.half_width, cfg.grid.mass)
    packets = [gaussian(GaussianSpec(t.q0, t.p0, t.sigma), grid) for t in cfg.state]
    if len(packets) == 1 and cfg.state[0].coefficient == 1.0:
        return grid, packets[0], packets
    psi = superpose([(t.coefficient, pk) for t, pk in zip(cfg.state, packets)])
    return grid, psi, packets


def _complex_matrix_tables(name: str, mat: np.ndarray) -> dict:
    cols = [f"c{i}" for i in range(mat.shape[1])]
    return {
        f"{name}_re": Table(cols, mat.real.copy()),
        f"{name}_im": Table(cols, mat.imag.copy()),
    }


def _run_evolve(cfg: ExperimentConfig) -> ResultRecord:
    grid, psi0, _ = _build_state(cfg)
    psi_t = free_evolve(psi0, cfg.time)
    dens = np.abs(psi_t.amplitudes) ** 2
    p, prob = momentum_probabilities(psi_t)
    order = np.argsort(p)
    scalars = {
        "time": cfg.time,
        "norm": float(np.sqrt(norm_sq(psi_t))),
        "x_mean": float(grid.dx * np.sum(grid.x * dens)),
        "p_mean": float(np.dot(p, prob)),
        "negative_momentum_fraction": negative_momentum_fraction(psi_t),
    }
    vectors = {
        "position_density": Table(
            ["x", "re", "im", "density"],
            np.column_stack(
                [grid.x, psi_t.amplitudes.real, psi_t.amplitudes.imag, dens]
            ),
        ),
        "momentum_density": Table(
            ["p", "probability"], np.column_stack([p[order], prob[order]])
        ),
    }
    _check_finite_scalars(scalars)
    return ResultRecord(cfg.kind, cfg.echo, scalars, vectors, _provenance())


def _make_branch_set(cfg: ExperimentConfig):
    grid, psi0, packets = _build_state(cfg)
    part = HistoryPartition(
        epsilon=cfg.partition.epsilon,
        n_steps=cfg.partition.n_steps,
        coarse_factor=cfg.partition.coarse_factor,
        origin=cfg.partition.origin,
    )
    builder = exact_branches if cfg.mode == EXACT_MODE else semiclassical_branches
    return grid, psi0, packets, part, builder(psi0, part)


def _interval_table(part: HistoryPartition, values: dict) -> Table:
    bounds = np.array([part.interval_bounds(a) for a in range(part.n_intervals)])
    cols = ["t_start", "t_end"] + list(values)
    data = np.column_stack([bounds[:, 0], bounds[:, 1]] + list(values.values()))
    return Table(cols, data)


def _run_branches(cfg: ExperimentConfig) -> ResultRecord:
    grid, psi0, _, part, bs = _make_branch_set(cfg)
    probs = np.array([b.norm_sq() for b in bs.crossing_branches])
    scalars = {
        "mode": bs.mode,
        "horizon": part.origin + part.tau,
        "delta": part.delta,
        "non_crossing_survival": bs.non_crossing.norm_sq(),
        "total_crossing_probability": float(probs.sum()),
        "negative_momentum_fraction": negative_momentum_fraction(psi0),
    }
    if bs.mode == EXACT_MODE:
        acc = bs.non_crossing.amplitudes.copy()
        for b in bs.crossing_branches:
            acc = acc + b.amplitudes
        scalars["identity_residual"] = float(
            np.sqrt(grid.dx * np.sum(np.abs(acc - psi0.amplitudes) ** 2))
        )
    vectors = {"interval_probabilities": _interval_table(part, {"probability": probs})}
    _check_finite_scalars(scalars)
    return ResultRecord(cfg.kind, cfg.echo, scalars, vectors, _provenance())


def _run_decoherence(cfg: ExperimentConfig) -> ResultRecord:
    grid, psi0, packets, part, bs = _make_branch_set(cfg)
    report = decoherence_analysis(bs, include_nc=cfg.include_non_crossing, eps_dec=cfg.eps_dec)
    n_int = part.n_intervals
    scalars = {
        "mode": report.mode,
        "includes_non_crossing": report.includes_non_crossing,
        "eps_dec": report.eps_dec,
        "max_offdiag": report.max_offdiag,
        "decoherent": report.decoherent,
        "sum_rule_residual": report.sum_rule_residual,
        "linearity_residual": report.linearity_residual,
        "non_crossing_probability": bs.non_crossing.norm_sq(),
    }
    if len(cfg.state) == 1 and cfg.state[0].p0 < 0:
        ts = regime_check(
            GaussianSpec(cfg.state[0].q0, cfg.state[0].p0, cfg.state[0].sigma),
            part,
            grid.mass,
        )
        scalars.update(
            arrival_time=ts.arrival_time,
            zeno_time=ts.zeno_time,
            zeno_time_general=ts.zeno_time_general,
            regime_margin=ts.margin,
            momentum_peaking=ts.momentum_peaking,
            regime_ok=ts.regime_ok,
        )
    if len(packets) > 1:
        ov = overlap_matrix(packets)
        off = np.abs(ov[~np.eye(len(packets), dtype=bool)])
        scalars["max_component_overlap"] = float(off.max())
    vectors = {
        "interval_probabilities": _interval_table(
            part,
            {
                "p": report.p[:n_int],
                "q_re": report.q.real[:n_int],
                "q_im": report.q.imag[:n_int],
            },
        ),
        "normalized_offdiag": Table(
            [f"c{i}" for i in range(report.normalized_offdiag.shape[1])],
            report.normalized_offdiag,
            allow_nan=True,
        ),
    }
    vectors.update(_complex_matrix_tables("decoherence_functional", report.D))
    _check_finite_scalars(scalars)
    return ResultRecord(cfg.kind, cfg.echo, scalars, vectors, _provenance())


def _run_current(cfg: ExperimentConfig) -> ResultRecord:
    grid, psi0, _ = _build_state(cfg)
    dt_j = cfg.dt_j
    if dt_j is None:
        dt_j = zeno_time_general(psi0) / cfg.dt_j_factor
    trace = current_trace(psi0, cfg.t1, cfg.t2, dt_j)
    integrated = integrated_current(psi0, cfg.t1, cfg.t2, dt_j)
    endpoint = semiclassical_crossing_probability(psi0, cfg.t1, cfg.t2)
    scalars = {
        "t1": cfg.t1,
        "t2": cfg.t2,
        "dt_j": trace.dt_J,
        "integrated_current": integrated,
        "endpoint_probability": endpoint,
        "difference": integrated - endpoint,
        "negative_momentum_fraction": negative_momentum_fraction(psi0),
    }
    vectors = {
        "current_trace": Table(["time", "J"], np.column_stack([trace.times, trace.J]))
    }
    _check_finite_scalars(scalars)
    return ResultRecord(cfg.kind, cfg.echo, scalars, vectors, _provenance())


def _run_backflow(cfg: ExperimentConfig) -> ResultRecord:
    grid = make_grid(cfg.grid.n_points, cfg.grid.half_width, cfg.grid.mass)
    kp = cfg.kernel
    kernel = build_kernel(kp.n_nodes, kp.p_max, kp.t1, kp.t2, cfg.grid.mass)
    evals = np.linalg.eigvalsh(kernel.K)
    lam, vec = min_eigenvalue(kernel)
    psi = backflow_state(kernel, vec, grid)
    dt_j = zeno_time_general(psi) / cfg.dt_j_factor
    crossing = integrated_current(psi, kp.t1, kp.t2, dt_j)
    witness = interference_witness(psi, kp.t1, kp.t2)
    scalars = {
        "lambda_min": lam,
        "lambda_max": float(evals[-1]),
        "kernel_trace": float(np.trace(kernel.K).real),
        "crossing_probability": crossing,
        "kernel_mismatch": float((crossing - lam) / abs(lam)),
        "expC": witness.expC,
        "expC2": witness.expC2,
        "witness": witness.witness,
        "negative_momentum_fraction": negative_momentum_fraction(psi),
        "dt_j": dt_j,
    }
    vectors = {
        "spectrum": Table(["eigenvalue"], evals[:, None]),
        "eigenvector": Table(
            ["p", "weight", "re", "im"],
            np.column_stack([kernel.p_nodes, kernel.weights, vec.real, vec.imag]),
        ),
    }
    _check_finite_scalars(scalars)
    return ResultRecord(cfg.kind, cfg.echo, scalars, vectors, _provenance())


def _run_zeno(cfg: ExperimentConfig) -> ResultRecord:
    grid, psi0, _ = _build_state(cfg)
    sweep = zeno_reflection_scan(psi0, cfg.tau, list(cfg.epsilons))
    data = np.array(sweep)
    scalars = {
        "tau": cfg.tau,
        "max_survival": float(data[:, 1].max()),
        "negative_momentum_fraction": negative_momentum_fraction(psi0),
    }
    vectors = {"survival": Table(["epsilon", "survival"], data)}
    _check_finite_scalars(scalars)
    return ResultRecord(cfg.kind, cfg.echo, scalars, vectors, _provenance())


_PIPELINES = {
    "evolve": _run_evolve,
    "branches": _run_branches,
    "decoherence": _run_decoherence,
    "current": _run_current,
    "backflow": _run_backflow,
    "zeno": _run_zeno,
}


def run(config: dict | ExperimentConfig) -> ResultRecord:
    """Validate (if needed) and execute a single-experiment config."""
    cfg = validate_config(config) if isinstance(config, dict) else config
    if cfg.kind == "scan":
        raise ConfigError("kind: use scan() for sweep configs")
    try:
        return _PIPELINES[cfg.kind](cfg)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"linear algebra failure: {exc}") from exc


def _run_point(raw: dict) -> ResultRecord:
    return run(validate_config(raw))


def scan(config: dict | ExperimentConfig, workers: int = 1) -> list[ResultRecord]:
    """Run a one-axis sweep; records are ordered as the values are listed."""
    cfg = validate_config(config) if isinstance(config, dict) else config
    if cfg.kind != "scan":
        raise ConfigError("kind: scan() requires a scan config")
    points = [_substitute(cfg.base, cfg.sweep.axis, v) for v in cfg.sweep.values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_point, points))
    return [_run_point(p) for p in points]


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def _parse_set(expr: str) -> tuple[str, object]:
    if "=" not in expr:
        raise ConfigError(f"--set {expr!r}: expected key.path=value")
    key, _, raw = expr.partition("=")
    key = key.strip()
    if not key:
        raise ConfigError(f"--set {expr!r}: empty key path")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _load_config(path: str) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config: file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}")


def _summarize(record: ResultRecord, out: str):
    print(f"[{record.kind}] wrote {out}")
    for key in sorted(record.scalars):
        val = record.scalars[key]
        if isinstance(val, float):
            print(f"  {key} = {val:.12g}")
        else:
            print(f"  {key} = {val}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="arrival",
        description="Arrival-time experiments: histories, currents, backflow.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run a {kind} experiment")
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config field (dotted path, JSON value)",
        )
        sp.add_argument("--out", default="arrival_out", help="output directory")
        sp.add_argument(
            "--workers", type=int, default=1, help="parallel workers (scan only)"
        )
    args = parser.parse_args(argv)

    try:
        raw = _load_config(args.config)
        for expr in args.set:
            key, value = _parse_set(expr)
            raw = _substitute(raw, key, value)
        raw.setdefault("kind", args.kind)
        if raw["kind"] != args.kind:
            raise ConfigError(
                f"kind: config says {raw['kind']!r} but the {args.kind!r} "
                "subcommand was invoked"
            )
        if args.workers < 1:
            raise ConfigError(f"--workers: must be >= 1, got {args.workers}")
        cfg = validate_config(raw)
        if cfg.kind == "scan":
            records = scan(cfg, workers=args.workers)
            os.makedirs(args.out, exist_ok=True)
            index = {
                "kind": "scan",
                "sweep": {"axis": cfg.sweep.axis, "values": list(cfg.sweep.values)},
                "records": [f"result_{i:03d}.json" for i in range(len(records))],
                "provenance": _provenance(),
            }
            with open(os.path.join(args.out, "scan.json"), "w", newline="\n") as f:
                json.dump(index, f, sort_keys=True, indent=2, allow_nan=False)
                f.write("\n")
            for i, rec in enumerate(records):
                path = rec.write(args.out, stem=f"result_{i:03d}")
                _summarize(rec, path)
        else:
            record = run(cfg)
            path = record.write(args.out, stem="result")
            _summarize(record, path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
