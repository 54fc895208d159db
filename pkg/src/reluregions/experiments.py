"""Monte Carlo experiment harness.

Grids over (n, d1) estimate, per cell, either the probability that a random
initialization lands in a region with full-rank Jacobian, or the probability
that it lands in a region containing a zero-loss global minimum.  Each trial
is a pure function of (config, cell index, trial index, attempt), with its
generator seeded by a counter-based split of the master seed, so results are
bit-reproducible regardless of worker count.  Draws that hit a region
boundary (degenerate pattern) are never scored; they are resampled with a
fresh attempt counter and reported.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import ceil

import numpy as np

from .errors import InputError, InvariantViolation
from .exact import binary_matrix_is_singular
from .linalg import Tol, as_matrix
from .model import Params, activation_pattern, forward, jacobian_full_rank
from .optimize import region_global_min_report

__all__ = [
    "ExperimentConfig",
    "CellResult",
    "GridResult",
    "resolve_d0",
    "gen_gaussian_data",
    "gen_cube_data",
    "gen_labels",
    "init_params",
    "run_rank_grid",
    "run_globalmin_grid",
    "run_singularity_study",
    "grid_csv_text",
    "grid_svg_text",
    "read_grid_csv",
    "emit_outputs",
]

CSV_HEADER = "experiment,d0,d1,n,trials,seed,metric,value,resamples"
MAX_N = 30
MAX_D1 = 400
D0_RULES = ("n/4", "n/2", "n", "2n")
INIT_SCHEMES = ("sqrtd1", "he")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def resolve_d0(rule: str, n: int) -> int:
    """Turn a d0 rule (fixed integer or ratio of n) into a concrete value."""
    rule = str(rule).strip()
    if rule == "n/4":
        return ceil(n / 4)
    if rule == "n/2":
        return ceil(n / 2)
    if rule == "n":
        return n
    if rule == "2n":
        return 2 * n
    try:
        d0 = int(rule)
    except ValueError:
        raise InputError(f"unknown d0 rule {rule!r}; expected an integer or one of {D0_RULES}")
    if d0 < 1:
        raise InputError("d0 must be at least 1")
    return d0


def _reject_duplicate_columns(X: np.ndarray, rng: np.random.Generator, draw) -> np.ndarray:
    # Duplicate columns are a measure-zero event but would break the sorted
    # 1-d path, so they are resampled rather than trusted away.
    for _ in range(100):
        _, first = np.unique(X.T, axis=0, return_index=True)
        if first.shape[0] == X.shape[1]:
            return X
        dup = np.setdiff1d(np.arange(X.shape[1]), first)
        X[:, dup] = draw(rng, X.shape[0], dup.shape[0])
    raise InvariantViolation("could not draw distinct data columns")


def gen_gaussian_data(d0: int, n: int, seed) -> np.ndarray:
    """d0 x n matrix of iid standard normal entries, distinct columns."""
    rng = _rng(seed)
    X = rng.standard_normal((d0, n))
    return _reject_duplicate_columns(X, rng, lambda r, d, m: r.standard_normal((d, m)))


def gen_cube_data(d0: int, n: int, seed) -> np.ndarray:
    """d0 x n matrix of iid uniform entries on [-1, 1], distinct columns."""
    rng = _rng(seed)
    X = rng.uniform(-1.0, 1.0, (d0, n))
    return _reject_duplicate_columns(X, rng, lambda r, d, m: r.uniform(-1.0, 1.0, (d, m)))


def parse_labels_kind(kind: str) -> tuple[str, int | None]:
    kind = str(kind).strip()
    if kind in ("random", "teacher"):
        return kind, None
    if kind.startswith("poly:"):
        try:
            degree = int(kind.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad polynomial degree in labels kind {kind!r}")
        if degree < 0:
            raise InputError("polynomial degree must be nonnegative")
        return "poly", degree
    raise InputError(f"unknown labels kind {kind!r}; expected poly:<deg>, teacher or random")


def gen_labels(kind: str, X, seed, d1: int | None = None, init: str = "he", bias: bool = True) -> np.ndarray:
    """Targets for the columns of X.

    poly:<deg>  evaluates a random polynomial of total degree <deg> with
                coefficients uniform on [-1, 1];
    teacher     runs a freshly initialized network of the same architecture
                (requires d1);
    random      draws iid uniform targets on [-1, 1].
    """
    X = as_matrix(X, name="X")
    rng = _rng(seed)
    base, degree = parse_labels_kind(kind)
    if base == "random":
        return rng.uniform(-1.0, 1.0, X.shape[1])
    if base == "teacher":
        if d1 is None:
            raise InputError("teacher labels need the hidden width d1")
        teacher = init_params(init, X.shape[0], d1, rng, bias=bias)
        return forward(teacher, X)
    d0 = X.shape[0]
    y = np.zeros(X.shape[1])
    for total in range(degree + 1):
        for combo in combinations_with_replacement(range(d0), total):
            coeff = rng.uniform(-1.0, 1.0)
            term = np.full(X.shape[1], coeff)
            for var in combo:
                term = term * X[var]
            y += term
    return y


def init_params(scheme: str, d0: int, d1: int, seed, bias: bool = True) -> Params:
    """Random first layer with the fixed alternating +-1 output head.

    sqrtd1: weights and biases iid uniform on [-1/sqrt(d1), 1/sqrt(d1)].
    he:     iid uniform on [-sqrt(6/d0), sqrt(6/d0)] (uniform He, fan-in d0).
    """
    if scheme not in INIT_SCHEMES:
        raise InputError(f"unknown init scheme {scheme!r}; expected one of {INIT_SCHEMES}")
    rng = _rng(seed)
    bound = 1.0 / np.sqrt(d1) if scheme == "sqrtd1" else np.sqrt(6.0 / d0)
    W = rng.uniform(-bound, bound, (d1, d0))
    b = rng.uniform(-bound, bound, d1) if bias else None
    v = np.where(np.arange(d1) % 2 == 0, 1.0, -1.0)
    return Params(W, b, v)


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid definition plus sampling scheme for one Monte Carlo experiment."""

    n_values: tuple
    d1_values: tuple
    d0_rule: str = "1"
    trials: int = 100
    seed: int = 0
    labels: str = "random"
    init: str = "sqrtd1"
    bias: bool = True
    tol: Tol = field(default_factory=Tol)
    workers: int = 1
    max_resample: int = 100

    def __post_init__(self) -> None:
        n_values = tuple(int(n) for n in self.n_values)
        d1_values = tuple(int(d) for d in self.d1_values)
        if not n_values or not d1_values:
            raise InputError("grid must contain at least one n and one d1 value")
        if min(n_values) < 1 or max(n_values) > MAX_N:
            raise InputError(f"n values must lie in [1, {MAX_N}]")
        if min(d1_values) < 1 or max(d1_values) > MAX_D1:
            raise InputError(f"d1 values must lie in [1, {MAX_D1}]")
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        if self.seed < 0:
            raise InputError("seed must be nonnegative")
        if self.workers < 1:
            raise InputError("workers must be at least 1")
        if self.init not in INIT_SCHEMES:
            raise InputError(f"unknown init scheme {self.init!r}")
        parse_labels_kind(self.labels)
        for n in n_values:
            resolve_d0(self.d0_rule, n)
        object.__setattr__(self, "n_values", n_values)
        object.__setattr__(self, "d1_values", d1_values)

    def cells(self) -> list:
        return [
            (n, resolve_d0(self.d0_rule, n), d1)
            for n in self.n_values
            for d1 in self.d1_values
        ]


@dataclass(frozen=True)
class CellResult:
    n: int
    d0: int
    d1: int
    trials: int
    value: float
    resamples: int


@dataclass(frozen=True)
class GridResult:
    experiment: str
    metric: str
    seed: int
    cells: tuple


def _trial_rng(cfg: ExperimentConfig, cell_index: int, trial_index: int, attempt: int):
    seq = np.random.SeedSequence(entropy=(cfg.seed, cell_index, trial_index, attempt))
    return np.random.default_rng(seq)


def _rank_trial(cfg: ExperimentConfig, cell, cell_index: int, trial_index: int):
    n, d0, d1 = cell
    for attempt in range(cfg.max_resample):
        rng = _trial_rng(cfg, cell_index, trial_index, attempt)
        X = gen_gaussian_data(d0, n, rng)
        params = init_params(cfg.init, d0, d1, rng, bias=cfg.bias)
        pattern, degenerate = activation_pattern(params, X, cfg.tol)
        if degenerate:
            continue
        return jacobian_full_rank(pattern, X, cfg.tol), attempt
    raise InvariantViolation("exceeded resample budget for degenerate patterns")


def _globalmin_trial(cfg: ExperimentConfig, cell, cell_index: int, trial_index: int):
    n, d0, d1 = cell
    for attempt in range(cfg.max_resample):
        rng = _trial_rng(cfg, cell_index, trial_index, attempt)
        X = gen_cube_data(d0, n, rng)
        y = gen_labels(cfg.labels, X, rng, d1=d1, init=cfg.init, bias=cfg.bias)
        params = init_params(cfg.init, d0, d1, rng, bias=cfg.bias)
        pattern, degenerate = activation_pattern(params, X, cfg.tol)
        if degenerate:
            continue
        report = region_global_min_report(pattern, X, y, params.v, tol=cfg.tol)
        return report.contains_zero_loss, attempt
    raise InvariantViolation("exceeded resample budget for degenerate patterns")


def _run_grid(cfg: ExperimentConfig, trial, experiment: str, metric: str) -> GridResult:
    cells = cfg.cells()
    tasks = [(ci, ti) for ci in range(len(cells)) for ti in range(cfg.trials)]

    def one(task):
        ci, ti = task
        return trial(cfg, cells[ci], ci, ti)

    if cfg.workers == 1:
        outcomes = [one(task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(one, tasks))

    hits = [0] * len(cells)
    resamples = [0] * len(cells)
    for (ci, _), (ok, extra) in zip(tasks, outcomes):
        hits[ci] += int(ok)
        resamples[ci] += extra
    results = tuple(
        CellResult(n, d0, d1, cfg.trials, hits[ci] / cfg.trials, resamples[ci])
        for ci, (n, d0, d1) in enumerate(cells)
    )
    return GridResult(experiment, metric, cfg.seed, results)


def run_rank_grid(cfg: ExperimentConfig) -> GridResult:
    """Fraction of random initializations whose region has full-rank Jacobian."""
    return _run_grid(cfg, _rank_trial, "rank-grid", "full_rank_fraction")


def run_globalmin_grid(cfg: ExperimentConfig) -> GridResult:
    """Fraction of sampled regions containing a zero-loss global minimum."""
    return _run_grid(cfg, _globalmin_trial, "globalmin-grid", "zero_loss_fraction")


def run_singularity_study(dims, trials: int, seed: int) -> GridResult:
    """Empirical singularity probability of square iid 0/1 matrices.

    Rank decisions are exact (integer elimination), so the only noise is
    Monte Carlo.  Reported through the common grid schema with d0 = 0 and
    n = d1 = matrix dimension.
    """
    dims = [int(d) for d in dims]
    if not dims or min(dims) < 1:
        raise InputError("dims must be a nonempty list of positive integers")
    if trials < 1:
        raise InputError("trials must be at least 1")
    if seed < 0:
        raise InputError("seed must be nonnegative")
    cells = []
    for di, d in enumerate(dims):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, di)))
        singular = 0
        for _ in range(trials):
            M = rng.integers(0, 2, size=(d, d))
            singular += int(binary_matrix_is_singular(M))
        cells.append(CellResult(n=d, d0=0, d1=d, trials=trials, value=singular / trials, resamples=0))
    return GridResult("singularity", "singular_fraction", seed, tuple(cells))


def _fmt(value: float) -> str:
    return format(float(value), ".6g")


def grid_csv_text(result: GridResult) -> str:
    """CSV serialization: fixed header, one row per cell, LF endings."""
    lines = [CSV_HEADER]
    for c in result.cells:
        lines.append(
            f"{result.experiment},{c.d0},{c.d1},{c.n},{c.trials},{result.seed},"
            f"{result.metric},{_fmt(c.value)},{c.resamples}"
        )
    return "\n".join(lines) + "\n"


def read_grid_csv(path) -> GridResult:
    """Parse a grid CSV back into a GridResult."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER.split(","):
        raise InputError(f"unexpected CSV header in {path}")
    cells = []
    experiment = metric = None
    seed = 0
    for row in reader:
        experiment = row["experiment"]
        metric = row["metric"]
        seed = int(row["seed"])
        cells.append(
            CellResult(
                n=int(row["n"]),
                d0=int(row["d0"]),
                d1=int(row["d1"]),
                trials=int(row["trials"]),
                value=float(row["value"]),
                resamples=int(row["resamples"]),
            )
        )
    if experiment is None:
        raise InputError(f"no data rows in {path}")
    return GridResult(experiment, metric, seed, tuple(cells))


_VIRIDIS = (
    (0.267, 0.005, 0.329),
    (0.283, 0.141, 0.458),
    (0.254, 0.265, 0.530),
    (0.207, 0.372, 0.553),
    (0.164, 0.471, 0.558),
    (0.128, 0.567, 0.551),
    (0.135, 0.659, 0.518),
    (0.267, 0.749, 0.441),
    (0.478, 0.821, 0.318),
    (0.741, 0.873, 0.150),
    (0.993, 0.906, 0.144),
)


def _shade(value: float) -> str:
    v = min(max(float(value), 0.0), 1.0)
    pos = v * (len(_VIRIDIS) - 1)
    lo = int(pos)
    hi = min(lo + 1, len(_VIRIDIS) - 1)
    t = pos - lo
    rgb = tuple(
        round(255 * ((1.0 - t) * _VIRIDIS[lo][c] + t * _VIRIDIS[hi][c])) for c in range(3)
    )
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def grid_svg_text(result: GridResult, cell_px: int = 28) -> str:
    """Heatmap: n on the x-axis, d1 on the y-axis, one rect per cell."""
    ns = sorted({c.n for c in result.cells})
    d1s = sorted({c.d1 for c in result.cells})
    left, top, right, bottom = 64, 34, 16, 46
    width = left + cell_px * len(ns) + right
    height = top + cell_px * len(d1s) + bottom
    xpos = {n: left + i * cell_px for i, n in enumerate(ns)}
    ypos = {d1: top + (len(d1s) - 1 - i) * cell_px for i, d1 in enumerate(d1s)}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" style="background:#ffffff">',
        f'<title>{result.experiment}: {result.metric}</title>',
        f'<text x="{left}" y="{top - 14}" font-family="monospace" font-size="12">'
        f"{result.experiment} {result.metric} (seed {result.seed})</text>",
    ]
    for c in result.cells:
        x = xpos[c.n]
        y = ypos[c.d1]
        parts.append(
            f'<rect x="{x}" y="{y}" width="{cell_px}" height="{cell_px}" '
            f'fill="{_shade(c.value)}"><title>n={c.n} d1={c.d1} d0={c.d0} '
            f"value={_fmt(c.value)}</title></rect>"
        )
    for n in ns:
        parts.append(
            f'<text x="{xpos[n] + cell_px / 2:.1f}" y="{top + cell_px * len(d1s) + 16}" '
            f'font-family="monospace" font-size="11" text-anchor="middle">{n}</text>'
        )
    for d1 in d1s:
        parts.append(
            f'<text x="{left - 6}" y="{ypos[d1] + cell_px / 2 + 4:.1f}" '
            f'font-family="monospace" font-size="11" text-anchor="end">{d1}</text>'
        )
    parts.append(
        f'<text x="{left + cell_px * len(ns) / 2:.1f}" y="{height - 12}" '
        f'font-family="monospace" font-size="12" text-anchor="middle">n</text>'
    )
    parts.append(
        f'<text x="14" y="{top + cell_px * len(d1s) / 2:.1f}" font-family="monospace" '
        f'font-size="12" text-anchor="middle" transform="rotate(-90 14 '
        f'{top + cell_px * len(d1s) / 2:.1f})">d1</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_outputs(result: GridResult, csv_path=None, svg_path=None) -> None:
    """Write the CSV and/or SVG artifacts; I/O errors carry the path."""
    for path, text in ((csv_path, grid_csv_text), (svg_path, grid_svg_text)):
        if path is None:
            continue
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text(result))
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc}")
