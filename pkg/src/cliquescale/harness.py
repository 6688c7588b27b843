"""Experiment grids: seeded sampling, censuses, averaging and CSV output.

Sample ``j`` of grid point ``i`` uses the seed drawn from
``SeedSequence([seed_base, i, j])``, so results do not depend on scheduling
or on ``jobs``.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import er_expected_total, localization_exponent
from .errors import BudgetExceeded, ParameterError
from .mce import count_maximal_cliques, maximal_cliques_of_size
from .models import (
    Family,
    ModelParams,
    WeightMode,
    WeightWindow,
    calibrate_mu_girg,
    sample_graph,
    sample_window_subgraph,
)
from .witness import superdense_witness

__all__ = [
    "Experiment",
    "ExperimentSpec",
    "ResultRow",
    "LocalizationProfile",
    "LocalizationFit",
    "sample_seed",
    "core_window",
    "localization_profile",
    "run_experiment",
    "run_girg_irg_core",
    "run_dense_gnp",
    "run_localization",
    "emit_csv",
    "parse_csv",
    "divided_second_differences",
    "linear_fit",
]


class Experiment(str, enum.Enum):
    DENSE_GNP = "DENSE_GNP"
    SUPERDENSE_GNP = "SUPERDENSE_GNP"
    GIRG_IRG_CORE = "GIRG_IRG_CORE"
    LOCALIZATION = "LOCALIZATION"


_LIST_FIELDS = ("n", "p", "c", "tau", "T", "families", "windows")


@dataclass
class ExperimentSpec:
    experiment: Experiment
    n: list[int]
    p: list[float] = field(default_factory=list)
    c: list[float] = field(default_factory=list)
    tau: list[float] = field(default_factory=list)
    T: list[float] = field(default_factory=lambda: [0.0])
    families: list[str] = field(default_factory=lambda: ["IRG"])
    windows: list[str] = field(default_factory=lambda: ["core", "wide"])
    samples: int = 10
    seed_base: int = 0
    out: str | None = None
    d: int = 1
    mu: float = 1.0
    weight_mode: WeightMode = WeightMode.DETERMINISTIC
    window_factor: float = 0.5
    k: int = 3
    eps: float = 0.1
    budget_seconds: float | None = None
    budget_cliques: int | None = None
    witness_M: int = 3

    def __post_init__(self):
        self.experiment = Experiment(self.experiment)
        self.weight_mode = WeightMode(self.weight_mode)
        if not self.n:
            raise ParameterError("grid needs at least one n")
        if self.samples < 1:
            raise ParameterError("samples must be at least 1")
        needs = {
            Experiment.DENSE_GNP: "p",
            Experiment.SUPERDENSE_GNP: "c",
            Experiment.GIRG_IRG_CORE: "tau",
            Experiment.LOCALIZATION: "tau",
        }[self.experiment]
        if not getattr(self, needs):
            raise ParameterError(f"{self.experiment.value} grid needs at least one {needs}")

    @classmethod
    def from_text(cls, text: str) -> ExperimentSpec:
        """Parse ``key=value`` lines; list fields are comma-separated; ``#`` starts a comment."""
        kw: dict = {}
        types = {f.name: f.type for f in fields(cls)}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in types:
                raise ParameterError(f"bad spec line {raw!r}")
            kw[key] = _parse_value(key, value)
        return cls(**kw)


def _parse_value(key: str, value: str):
    if key in _LIST_FIELDS:
        items = [v.strip() for v in value.split(",") if v.strip()]
        if key == "n":
            return [int(float(v)) for v in items]
        if key in ("families", "windows"):
            return items
        return [float(v) for v in items]
    if key in ("samples", "seed_base", "d", "k", "witness_M", "budget_cliques"):
        return int(float(value))
    if key in ("mu", "window_factor", "eps", "budget_seconds"):
        return float(value)
    return value


@dataclass
class ResultRow:
    experiment: str
    family: str
    n: int
    param: float  # p, c or tau depending on the experiment
    T: float
    mu: float
    window: str
    n_prime: float
    mean: float
    stderr: float
    samples: list
    complete: int  # samples finished within budget
    status: str
    expected: float = math.nan
    witness_size: float = math.nan
    fraction: float = math.nan  # localization: mean in-window share of maximal k-cliques
    wall_time: float = 0.0

    def __eq__(self, other):
        if not isinstance(other, ResultRow):
            return NotImplemented
        return _row_key(self) == _row_key(other)


def _row_key(row: ResultRow):
    # wall time is run metadata, not data
    return tuple(repr(v) for k, v in asdict(row).items() if k != "wall_time")


@dataclass(frozen=True)
class LocalizationProfile:
    k: int
    weights: np.ndarray  # (cliques, k), each row sorted ascending
    rescaled: np.ndarray
    in_window: np.ndarray


@dataclass
class LocalizationFit:
    n: list
    fraction: list  # nan where no maximal k-clique appeared
    fraction_stderr: list
    mean_count: list
    slope: float
    expected_slope: float


def sample_seed(seed_base: int, point: int, sample: int) -> int:
    state = np.random.SeedSequence([seed_base, point, sample]).generate_state(2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


def core_window(n: int, mu: float, name: str, factor: float = 0.5) -> WeightWindow:
    """``core`` = [f sqrt(mu n), sqrt(mu n)], ``wide`` = [f sqrt(mu n), n], ``top`` = [sqrt(mu n), inf)."""
    root = math.sqrt(mu * n)
    if name == "core":
        return WeightWindow(factor * root, root, True, True)
    if name == "wide":
        return WeightWindow(factor * root, float(n), True, True)
    if name == "top":
        return WeightWindow(root, math.inf, True, False)
    lo, sep, hi = name.partition(":")
    if sep:
        return WeightWindow(float(lo), float(hi))
    raise ParameterError(f"unknown window {name!r}")


def _stats(values) -> tuple[float, float]:
    if not values:
        return math.nan, math.nan
    arr = np.asarray(values, dtype=float)
    se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return float(arr.mean()), se


# --- per-sample workers (module level so they pickle) ----------------------------


def _census_total(g, budget_seconds, budget_cliques):
    try:
        return count_maximal_cliques(g, budget_seconds=budget_seconds, budget_cliques=budget_cliques).total, True
    except BudgetExceeded as exc:
        return exc.census.total, False


def _core_sample(params: ModelParams, window: WeightWindow, budget_seconds, budget_cliques):
    g, _ = sample_window_subgraph(params, window)
    total, done = _census_total(g, budget_seconds, budget_cliques)
    return g.n, total, done, math.nan


def _gnp_sample(params: ModelParams, budget_seconds, budget_cliques, witness_M):
    g, _ = sample_graph(params)
    total, done = _census_total(g, budget_seconds, budget_cliques)
    wsize = math.nan
    if params.family is Family.GNP_SUPERDENSE:
        wsize = superdense_witness(g, params.c, witness_M).witness_size
    return g.n, total, done, wsize


def _run_tasks(tasks, jobs: int):
    if jobs <= 1:
        return [fn(*args) for fn, args in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *args) for fn, args in tasks]
        return [f.result() for f in futures]


def _collect(points, results, samples, experiment):
    rows = []
    for i, (meta, wall) in enumerate(points):
        chunk = results[i * samples : (i + 1) * samples]
        done = [r[1] for r in chunk if r[2]]
        mean, se = _stats(done)
        wit = [r[3] for r in chunk if not math.isnan(r[3])]
        rows.append(
            ResultRow(
                experiment=experiment.value,
                samples=[r[1] for r in chunk],
                complete=len(done),
                status="ok" if len(done) == samples else "budget",
                n_prime=float(np.mean([r[0] for r in chunk])),
                mean=mean,
                stderr=se,
                witness_size=float(np.mean(wit)) if wit else math.nan,
                **meta,
            )
        )
    return rows


# --- experiments -------------------------------------------------------------------

_MU_CACHE: dict = {}


def _calibrated_mu(irg: ModelParams, girg: ModelParams, window: WeightWindow) -> float:
    key = (girg.family, girg.n, girg.tau, girg.T, girg.d, girg.weight_mode, irg.mu, window)
    if key not in _MU_CACHE:
        _MU_CACHE[key] = calibrate_mu_girg(irg, girg, window)
    return _MU_CACHE[key]


def run_girg_irg_core(spec: ExperimentSpec, jobs: int = 1) -> list[ResultRow]:
    """Census of weight-window subgraphs for every (family, tau, T, n, window) grid point."""
    tasks, points = [], []
    idx = 0
    for fam_name in spec.families:
        fam = Family(fam_name)
        if not fam.weighted:
            raise ParameterError(f"{fam.value} is not an IRG/GIRG family")
        temps = [0.0] if fam is Family.IRG else spec.T
        for tau in spec.tau:
            for T in temps:
                for n in spec.n:
                    for wname in spec.windows:
                        window = core_window(n, spec.mu, wname, spec.window_factor)
                        irg = ModelParams(Family.IRG, n, tau=tau, mu=spec.mu, weight_mode=spec.weight_mode)
                        params = irg
                        if fam is not Family.IRG:
                            params = ModelParams(fam, n, tau=tau, T=T, d=spec.d if fam is Family.GIRG_TORUS else 2, weight_mode=spec.weight_mode)
                            params = replace(params, mu=_calibrated_mu(irg, params, window))
                        for j in range(spec.samples):
                            p = params.with_seed(sample_seed(spec.seed_base, idx, j))
                            tasks.append((_core_sample, (p, window, spec.budget_seconds, spec.budget_cliques)))
                        meta = dict(family=fam.value, n=n, param=tau, T=T, mu=params.mu, window=wname)
                        points.append((meta, 0.0))
                        idx += 1
    return _timed_collect(points, tasks, spec, jobs)


def _timed_collect(points, tasks, spec, jobs):
    t0 = time.perf_counter()
    results = _run_tasks(tasks, jobs)
    rows = _collect(points, results, spec.samples, spec.experiment)
    per_row = (time.perf_counter() - t0) / max(1, len(rows))
    for row in rows:
        row.wall_time = per_row
    return rows


def run_dense_gnp(spec: ExperimentSpec, jobs: int = 1) -> list[ResultRow]:
    """Census of G(n, p) (constant p) or G(n, 1 - c/n) samples per grid point."""
    superdense = spec.experiment is Experiment.SUPERDENSE_GNP
    values = spec.c if superdense else spec.p
    tasks, points = [], []
    idx = 0
    for val in values:
        for n in spec.n:
            if superdense:
                params = ModelParams(Family.GNP_SUPERDENSE, n, c=val)
                expected = math.nan
            else:
                params = ModelParams(Family.GNP, n, p=val)
                expected = er_expected_total(n, val) if n else 0.0
            for j in range(spec.samples):
                p = params.with_seed(sample_seed(spec.seed_base, idx, j))
                tasks.append((_gnp_sample, (p, spec.budget_seconds, spec.budget_cliques, spec.witness_M)))
            meta = dict(family=params.family.value, n=n, param=val, T=0.0, mu=math.nan, window="all", expected=expected)
            points.append((meta, 0.0))
            idx += 1
    return _timed_collect(points, tasks, spec, jobs)


def localization_profile(weights: np.ndarray, tau: float, n: int, mu: float, eps: float) -> LocalizationProfile:
    """Rescale clique weights: the two smallest by ``(mu n)^((tau-2)/(tau-1))``, the rest by ``(mu n)^(1/(tau-1))``."""
    w = np.sort(np.atleast_2d(np.asarray(weights, dtype=float)), axis=1)
    k = w.shape[1]
    scale = np.full(k, (mu * n) ** (1 / (tau - 1)))
    scale[:2] = (mu * n) ** ((tau - 2) / (tau - 1))
    y = w / scale
    inside = np.all((y >= eps) & (y <= 1 / eps), axis=1)
    return LocalizationProfile(k, w, y, inside)


def _localization_sample(params: ModelParams, k: int, eps: float):
    g, pts = sample_graph(params)
    count, cliques = maximal_cliques_of_size(g, k, emit=True)
    if count == 0:
        return 0, math.nan
    prof = localization_profile(pts.weights[cliques], params.tau, params.n, params.mu, eps)
    return count, float(prof.in_window.mean())


def run_localization(spec: ExperimentSpec, eps: float | None = None, jobs: int = 1) -> tuple[list[ResultRow], LocalizationFit]:
    """In-window fraction and count of maximal k-cliques per n, plus the log-log count slope.

    Uses random weights regardless of ``spec.weight_mode``. Only the first
    ``tau`` of the grid is used.
    """
    eps = spec.eps if eps is None else eps
    tau = spec.tau[0]
    tasks = []
    for i, n in enumerate(spec.n):
        params = ModelParams(Family.IRG, n, tau=tau, mu=spec.mu, weight_mode=WeightMode.RANDOM)
        for j in range(spec.samples):
            tasks.append((_localization_sample, (params.with_seed(sample_seed(spec.seed_base, i, j)), spec.k, eps)))
    t0 = time.perf_counter()
    results = _run_tasks(tasks, jobs)
    wall = (time.perf_counter() - t0) / len(spec.n)
    rows, fracs, fses, means = [], [], [], []
    for i, n in enumerate(spec.n):
        chunk = results[i * spec.samples : (i + 1) * spec.samples]
        counts = [r[0] for r in chunk]
        fr = [r[1] for r in chunk if not math.isnan(r[1])]
        mean, se = _stats(counts)
        fmean, fse = _stats(fr)
        fracs.append(fmean)
        fses.append(fse)
        means.append(mean)
        rows.append(
            ResultRow(
                experiment=Experiment.LOCALIZATION.value,
                family=Family.IRG.value,
                n=n,
                param=tau,
                T=0.0,
                mu=spec.mu,
                window=f"eps={eps}",
                n_prime=float(n),
                mean=mean,
                stderr=se,
                samples=counts,
                complete=len(counts),
                status="ok" if fr else "missing",
                expected=localization_exponent(tau),
                fraction=fmean,
                wall_time=wall,
            )
        )
    good = [(n, m) for n, m in zip(spec.n, means) if m > 0]
    slope = linear_fit(np.log([g[0] for g in good]), np.log([g[1] for g in good]))[0] if len(good) >= 2 else math.nan
    fit = LocalizationFit(list(spec.n), fracs, fses, means, slope, localization_exponent(tau))
    return rows, fit


def run_experiment(spec: ExperimentSpec, jobs: int = 1):
    if spec.experiment is Experiment.GIRG_IRG_CORE:
        return run_girg_irg_core(spec, jobs)
    if spec.experiment in (Experiment.DENSE_GNP, Experiment.SUPERDENSE_GNP):
        return run_dense_gnp(spec, jobs)
    return run_localization(spec, jobs=jobs)[0]


# --- statistics helpers -------------------------------------------------------------


def linear_fit(x, y) -> tuple[float, float, float]:
    """Least-squares ``(slope, intercept, r_squared)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def divided_second_differences(x, y) -> np.ndarray:
    """Second divided differences; positive entries mean locally convex."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = np.diff(y) / np.diff(x)
    return np.diff(s) / (x[2:] - x[:-2]) * 2


# --- CSV -----------------------------------------------------------------------------

CSV_COLUMNS = [f.name for f in fields(ResultRow) if f.name != "wall_time"]


def _fmt(v) -> str:
    if isinstance(v, list):
        return ";".join(str(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(rows, path, *, seed_base: int = 0, experiment: str = "", append: bool = False) -> None:
    """Write rows with a comment header carrying run metadata.

    Wall times go to ``# timing`` comment lines so the data lines are
    reproducible byte for byte. With ``append`` the column header is only
    written when the file is new.
    """
    path = Path(path)
    rows = list(rows)
    new = not (append and path.exists() and path.stat().st_size > 0)
    buf = io.StringIO()
    buf.write(f"# cliquescale {__version__} experiment={experiment} seed_base={seed_base}\n")
    writer = csv.writer(buf, lineterminator="\n")
    if new:
        writer.writerow(CSV_COLUMNS)
    for i, row in enumerate(rows):
        writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])
    for i, row in enumerate(rows):
        buf.write(f"# timing,{i},{row.wall_time!r}\n")
    try:
        with path.open("a" if not new else "w") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


_INT_COLS = {"n", "complete"}
_STR_COLS = {"experiment", "family", "window", "status"}


def _parse_cell(col: str, text: str):
    if col in _STR_COLS:
        return text
    if col in _INT_COLS:
        return int(text)
    if col == "samples":
        return [int(v) if v.lstrip("-").isdigit() else float(v) for v in text.split(";")] if text else []
    return float(text)


def parse_csv(path) -> list[ResultRow]:
    path = Path(path)
    rows: list[ResultRow] = []
    timing: list[tuple[int, float]] = []
    block_start = 0
    header = None
    with path.open() as fh:
        for line in fh:
            if line.startswith("# timing,"):
                _, i, t = line.strip().split(",")
                timing.append((block_start + int(i), float(t)))
                continue
            if line.startswith("#"):
                block_start = len(rows)
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = cells
                continue
            rows.append(ResultRow(**{c: _parse_cell(c, v) for c, v in zip(header, cells)}))
    for i, t in timing:
        rows[i].wall_time = t
    return rows
