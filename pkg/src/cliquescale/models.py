"""Seeded samplers for G(n, p), Chung-Lu style IRGs and GIRGs.

Randomness comes from Philox generators keyed by ``SeedSequence(seed,
spawn_key=...)``. Fixed stream keys keep every piece of a sample independent
and replayable:

=========  ==============================================
key        stream
=========  ==============================================
(0,)       vertex weights
(1,)       vertex positions
(2, b)     edge coins for row block ``b`` of the pair loop
(3,)       uniforms for the geometric-skip IRG sampler
(4,)       window vertex count
=========  ==============================================
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, optimize

from . import _kernels
from .errors import CalibrationError, ParameterError
from .graph import Graph, _from_canonical

__all__ = [
    "Family",
    "WeightMode",
    "ModelParams",
    "WeightWindow",
    "WeightedPointSet",
    "rng_for",
    "powerlaw_quantile",
    "powerlaw_cdf",
    "sample_weight_powerlaw",
    "powerlaw_weights",
    "deterministic_weights",
    "connection_prob_irg",
    "connection_prob_girg",
    "girg_prob_from_ratio",
    "torus_distance",
    "euclidean_distance",
    "sample_graph",
    "sample_window_points",
    "sample_window_subgraph",
    "sample_edges",
    "expected_pair_prob_girg",
    "expected_pair_prob_quadrature",
    "square_distance_cdf",
    "calibrate_mu_girg",
    "expected_window_degree",
]

SKIP_SAMPLER_MIN_N = 20_000


class Family(str, enum.Enum):
    GNP = "GNP"
    GNP_SUPERDENSE = "GNP_SUPERDENSE"
    IRG = "IRG"
    GIRG_TORUS = "GIRG_TORUS"
    GIRG_SQUARE = "GIRG_SQUARE"

    @property
    def weighted(self) -> bool:
        return self in (Family.IRG, Family.GIRG_TORUS, Family.GIRG_SQUARE)

    @property
    def geometric(self) -> bool:
        return self in (Family.GIRG_TORUS, Family.GIRG_SQUARE)


class WeightMode(str, enum.Enum):
    RANDOM = "RANDOM"
    DETERMINISTIC = "DETERMINISTIC"


def _check_tau(tau) -> None:
    if tau is None or not 2 < tau < 3:
        raise ParameterError(f"tau must lie in (2, 3), got {tau}")


@dataclass(frozen=True)
class ModelParams:
    family: Family
    n: int
    p: float | None = None
    c: float | None = None
    tau: float | None = None
    mu: float = 1.0
    T: float = 0.0
    d: int | None = None
    weight_mode: WeightMode = WeightMode.RANDOM
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "weight_mode", WeightMode(self.weight_mode))
        if self.d is None:
            object.__setattr__(self, "d", 2 if self.family is Family.GIRG_SQUARE else 1)
        if self.n < 0:
            raise ParameterError("n must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        fam = self.family
        if fam is Family.GNP:
            if self.p is None or not 0 <= self.p <= 1:
                raise ParameterError(f"GNP needs 0 <= p <= 1, got {self.p}")
        elif fam is Family.GNP_SUPERDENSE:
            if self.c is None or self.c <= 0 or (self.n and self.c / self.n > 1):
                raise ParameterError(f"GNP_SUPERDENSE needs c > 0 and c/n <= 1, got c={self.c}")
        else:
            _check_tau(self.tau)
            if not self.mu > 0:
                raise ParameterError(f"mu must be positive, got {self.mu}")
            if not 0 <= self.T < 1:
                raise ParameterError(f"temperature must lie in [0, 1), got {self.T}")
            if fam is Family.GIRG_SQUARE and self.d != 2:
                raise ParameterError("the square geometry is two-dimensional")
            if self.d < 1:
                raise ParameterError("dimension must be at least 1")

    @property
    def edge_prob(self) -> float:
        if self.family is Family.GNP:
            return self.p
        if self.family is Family.GNP_SUPERDENSE:
            return 1.0 - self.c / self.n if self.n else 1.0
        raise ParameterError(f"{self.family.value} has no single edge probability")

    def with_seed(self, seed: int) -> ModelParams:
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class WeightWindow:
    lo: float
    hi: float = math.inf
    lo_closed: bool = True
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ParameterError(f"window lower end {self.lo} exceeds upper end {self.hi}")

    def contains(self, w):
        w = np.asarray(w, dtype=float)
        above = w >= self.lo if self.lo_closed else w > self.lo
        below = w <= self.hi if self.hi_closed else w < self.hi
        return above & below

    @property
    def is_empty(self) -> bool:
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    @classmethod
    def parse(cls, text: str) -> WeightWindow:
        """``"LO:HI"``; either end may be ``inf``."""
        lo, _, hi = text.partition(":")
        return cls(float(lo), float(hi) if hi else math.inf)


@dataclass
class WeightedPointSet:
    weights: np.ndarray
    positions: np.ndarray | None = None
    geometry: str | None = None  # "torus" | "square" | None for IRG
    ids: np.ndarray | None = None  # vertex ids in the full model, when known
    extra: dict = field(default_factory=dict)

    @property
    def norm(self) -> str | None:
        return {"torus": "MAX_NORM_TORUS", "square": "EUCLIDEAN_SQUARE"}.get(self.geometry)

    def __len__(self) -> int:
        return len(self.weights)


# --- weights -----------------------------------------------------------------


def rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=tuple(key))))


def powerlaw_cdf(w, tau):
    """``P(W <= w) = 1 - w**(1 - tau)`` for ``w >= 1``, zero below."""
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(w < 1, 0.0, 1.0 - np.power(np.maximum(w, 1.0), 1.0 - tau))


def powerlaw_quantile(u, tau):
    """Inverse of the tail: ``u**(-1/(tau-1))`` for ``u`` in (0, 1]."""
    return np.power(u, -1.0 / (tau - 1.0))


def sample_weight_powerlaw(tau: float, rng: np.random.Generator) -> float:
    _check_tau(tau)
    return float(powerlaw_quantile(1.0 - rng.random(), tau))


def powerlaw_weights(n: int, tau: float, rng: np.random.Generator) -> np.ndarray:
    _check_tau(tau)
    return powerlaw_quantile(1.0 - rng.random(n), tau)


def deterministic_weights(n: int, tau: float) -> np.ndarray:
    """``w_v = (n / v)**(1/(tau-1))`` for ``v = 1..n``; decreasing, ``w_n = 1``."""
    if n < 1:
        raise ParameterError("n must be at least 1")
    if not tau > 1:
        raise ParameterError("tau must exceed 1")
    v = np.arange(1, n + 1, dtype=float)
    w = np.power(n / v, 1.0 / (tau - 1.0))
    w[-1] = 1.0
    return w


def _det_index_range(n: int, tau: float, window: WeightWindow) -> tuple[int, int]:
    """1-based inclusive range of ``v`` whose deterministic weight lies in ``window``."""

    def weight(v):
        return (n / v) ** (1.0 / (tau - 1.0))

    # w_v >= lo  <=>  v <= n lo^(1-tau);  w_v <= hi  <=>  v >= n hi^(1-tau)
    v_max = n if window.lo <= 1 else min(n, int(math.floor(n * window.lo ** (1.0 - tau))) + 2)
    v_min = 1 if math.isinf(window.hi) else max(1, int(math.ceil(n * window.hi ** (1.0 - tau))) - 2)
    while v_max >= 1 and not window.contains(weight(v_max)):
        v_max -= 1
        if v_max < v_min:
            break
    while v_min <= v_max and not window.contains(weight(v_min)):
        v_min += 1
    return v_min, v_max


# --- connection probabilities ------------------------------------------------


def connection_prob_irg(w_u, w_v, mu, n):
    return np.minimum(np.asarray(w_u, dtype=float) * w_v / (mu * n), 1.0)


def torus_distance(x_u, x_v):
    """Maximum-norm distance on the unit torus (last axis = coordinates)."""
    diff = np.abs(np.asarray(x_u, dtype=float) - np.asarray(x_v, dtype=float))
    return np.max(np.minimum(diff, 1.0 - diff), axis=-1)


def euclidean_distance(x_u, x_v):
    diff = np.asarray(x_u, dtype=float) - np.asarray(x_v, dtype=float)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def girg_prob_from_ratio(ratio, T: float):
    """``min(ratio**(1/T), 1)``; for ``T == 0`` the indicator ``ratio >= 1``."""
    ratio = np.asarray(ratio, dtype=float)
    if T == 0:
        return (ratio >= 1.0).astype(float)
    with np.errstate(over="ignore"):
        return np.minimum(np.power(ratio, 1.0 / T), 1.0)


def _girg_prob(w_u, w_v, dist, n, mu, T, d):
    num = np.asarray(w_u, dtype=float) * w_v
    den = n * mu * np.power(dist, d)
    if T == 0:
        return (num >= den).astype(float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(den == 0, 1.0, np.minimum(np.power(num / np.where(den == 0, 1.0, den), 1.0 / T), 1.0))


def connection_prob_girg(w_u, w_v, x_u, x_v, params: ModelParams):
    if not params.family.geometric:
        raise ParameterError("connection_prob_girg needs a GIRG family")
    dist = (torus_distance if params.family is Family.GIRG_TORUS else euclidean_distance)(x_u, x_v)
    return _girg_prob(w_u, w_v, dist, params.n, params.mu, params.T, params.d)


# --- pair loop ---------------------------------------------------------------


def _pair_loop(m: int, seed: int, block_prob, coins: bool) -> np.ndarray:
    """Edges ``(i, j), i < j`` over ``m`` vertices, one row block at a time.

    ``block_prob(rows, cols)`` returns the connection probabilities for the
    index arrays; with ``coins`` false the probabilities must be 0/1.
    """
    if m < 2:
        return np.empty((0, 2), dtype=np.int64)
    rows_per_block = max(1, (1 << 22) // m)
    out = []
    for b, r0 in enumerate(range(0, m - 1, rows_per_block)):
        r1 = min(m - 1, r0 + rows_per_block)
        rows = np.arange(r0, r1)
        cols = np.arange(m)
        prob = block_prob(rows[:, None], cols[None, :])
        upper = cols[None, :] > rows[:, None]
        if coins:
            hit = rng_for(seed, 2, b).random(prob.shape) < prob
        else:
            hit = prob >= 1.0
        i, j = np.nonzero(hit & upper)
        out.append(np.stack([i + r0, j], axis=1))
    return np.concatenate(out).astype(np.int64)


def _irg_skip_edges(weights: np.ndarray, total: float, seed: int) -> np.ndarray:
    order = np.argsort(-weights, kind="stable")
    w = np.ascontiguousarray(weights[order])
    cap = int(1.2 * float(w.sum()) ** 2 / (2.0 * total)) + 1024
    gen = rng_for(seed, 3)
    unif = gen.random(2 * cap + 2 * len(w))
    while True:
        edges = np.empty((cap, 2), dtype=np.int64)
        status, m = _kernels.chung_lu_skip(w, total, unif, edges)
        if status == 0:
            break
        if status == 1:
            unif = np.concatenate([unif, gen.random(len(unif))])
        else:
            cap *= 2
    e = order[edges[:m]]
    e.sort(axis=1)
    return e


def sample_edges(points: WeightedPointSet, params: ModelParams, seed: int | None = None, method: str = "auto"):
    """Edges among ``points`` under the family rule of ``params`` (``params.n`` is the full model size)."""
    seed = params.seed if seed is None else seed
    w = points.weights
    m = len(w)
    fam = params.family
    if fam is Family.IRG:
        total = params.mu * params.n
        if method == "skip" or (method == "auto" and m >= SKIP_SAMPLER_MIN_N):
            e = _irg_skip_edges(w, total, seed)
            return np.unique(e, axis=0) if len(e) else e
        return _pair_loop(m, seed, lambda r, c: np.minimum(w[r] * w[c] / total, 1.0), True)
    if fam.geometric:
        x = points.positions
        dist_fn = torus_distance if fam is Family.GIRG_TORUS else euclidean_distance

        def prob(r, c):
            dist = dist_fn(x[r], x[c])
            return _girg_prob(w[r], w[c], dist, params.n, params.mu, params.T, params.d)

        return _pair_loop(m, seed, prob, params.T > 0)
    raise ParameterError(f"{fam.value} has no weighted point set")


def sample_graph(params: ModelParams, method: str = "auto") -> tuple[Graph, WeightedPointSet | None]:
    """Sample one graph; vertices are numbered in sampling order."""
    n = params.n
    fam = params.family
    if fam in (Family.GNP, Family.GNP_SUPERDENSE):
        p = params.edge_prob
        edges = _pair_loop(n, params.seed, lambda r, c: np.full(np.broadcast(r, c).shape, p), 0 < p < 1)
        return _from_canonical(n, _sorted(edges)), None
    if params.weight_mode is WeightMode.DETERMINISTIC:
        w = deterministic_weights(n, params.tau) if n else np.empty(0)
        ids = np.arange(n)
    else:
        w = powerlaw_weights(n, params.tau, rng_for(params.seed, 0))
        ids = None
    points = _with_positions(WeightedPointSet(w, ids=ids), params)
    edges = sample_edges(points, params, method=method)
    return _from_canonical(n, _sorted(edges)), points


def _sorted(edges: np.ndarray) -> np.ndarray:
    if len(edges) == 0:
        return edges.reshape(0, 2)
    key = edges[:, 0] * (int(edges.max()) + 1) + edges[:, 1]
    if np.all(key[1:] > key[:-1]):
        return edges
    return edges[np.argsort(key, kind="stable")]


def _with_positions(points: WeightedPointSet, params: ModelParams) -> WeightedPointSet:
    if params.family.geometric:
        points.positions = rng_for(params.seed, 1).random((len(points.weights), params.d))
        points.geometry = "torus" if params.family is Family.GIRG_TORUS else "square"
    return points


def sample_window_points(params: ModelParams, window: WeightWindow) -> WeightedPointSet:
    """Weights (and positions) of exactly the vertices whose weight lies in ``window``."""
    if not params.family.weighted:
        raise ParameterError("window sampling needs an IRG or GIRG family")
    tau = params.tau
    if params.weight_mode is WeightMode.DETERMINISTIC:
        v0, v1 = _det_index_range(params.n, tau, window) if params.n else (1, 0)
        v = np.arange(v0, v1 + 1, dtype=np.int64)
        w = np.power(params.n / v.astype(float), 1.0 / (tau - 1.0))
        w[v == params.n] = 1.0
        points = WeightedPointSet(w, ids=v - 1)
    else:
        f_lo = float(powerlaw_cdf(window.lo, tau))
        f_hi = float(powerlaw_cdf(window.hi, tau))
        mass = max(0.0, f_hi - f_lo)
        count = int(rng_for(params.seed, 4).binomial(params.n, mass)) if mass > 0 else 0
        u = f_lo + mass * rng_for(params.seed, 0).random(count)
        w = powerlaw_quantile(1.0 - u, tau)
        points = WeightedPointSet(w)
    points.extra["window"] = window
    return _with_positions(points, params)


def sample_window_subgraph(params: ModelParams, window: WeightWindow, method: str = "auto"):
    """Sample only the window vertices and connect them with the full-model rule."""
    points = sample_window_points(params, window)
    edges = sample_edges(points, params, method=method)
    return _from_canonical(len(points), _sorted(edges)), points


# --- expected connection probabilities over random positions ------------------


def square_distance_cdf(l):
    """CDF of the distance between two uniform points of the unit square."""
    l = np.asarray(l, dtype=float)
    l2 = l * l
    inner = np.pi * l2 - 8.0 / 3.0 * l2 * l + l2 * l2 / 2.0
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.sqrt(np.maximum(l2 - 1.0, 0.0))
        inv = 1.0 / np.maximum(l, 1.0)
        outer = (
            1.0 / 3.0
            - 2.0 * l2
            - l2 * l2 / 2.0
            + 4.0 / 3.0 * (2.0 * l2 + 1.0) * s
            + 2.0 * l2 * (np.arcsin(inv) - np.arccos(inv))
        )
    out = np.where(l <= 1.0, inner, outer)
    return np.clip(np.where(l <= 0, 0.0, np.where(l >= math.sqrt(2.0), 1.0, out)), 0.0, 1.0)


def expected_pair_prob_girg(ratio0, T: float, d: int = 1, geometry: str = "torus"):
    """Expected connection probability over uniform positions.

    ``ratio0 = w_u w_v / (mu n)``. On the torus the max-norm distance ``D``
    has ``D**d`` uniform on ``[0, 2**-d]``, which gives a closed form for
    every ``T``. On the square the ``T == 0`` case is the distance CDF at
    ``sqrt(ratio0)``; ``T > 0`` falls back to quadrature.
    """
    r = np.asarray(ratio0, dtype=float)
    if geometry == "torus":
        cap = 2.0**-d
        if T == 0:
            return np.minimum(r / cap, 1.0)
        a = 1.0 / T
        rc = np.minimum(r, cap)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            tail = (rc - np.power(rc, a) * cap ** (1.0 - a)) / (a - 1.0)
        val = (rc + np.where(rc > 0, tail, 0.0)) / cap
        return np.where(r >= cap, 1.0, val)
    if geometry == "square":
        if d != 2:
            raise ParameterError("the square geometry is two-dimensional")
        if T == 0:
            return square_distance_cdf(np.sqrt(r))
        return np.vectorize(lambda x: expected_pair_prob_quadrature(x, T, 2, "square"))(r)
    raise ParameterError(f"unknown geometry {geometry!r}")


def expected_pair_prob_quadrature(ratio0: float, T: float, d: int = 1, geometry: str = "torus") -> float:
    """Same quantity as :func:`expected_pair_prob_girg` by adaptive quadrature."""

    def p(dist):
        return float(_girg_prob(1.0, ratio0, dist, 1.0, 1.0, T, d))

    if geometry == "torus":
        # D**d uniform on [0, 2**-d]; integrate over v = D**d
        cap = 2.0**-d
        brk = [min(ratio0, cap)] if 0 < ratio0 < cap else None
        val, _ = integrate.quad(lambda v: p(v ** (1.0 / d)), 0.0, cap, points=brk, limit=200)
        return val / cap
    # square: E p(D) = p(sqrt2) - int_a^sqrt2 F(l) p'(l) dl, with p == 1 below a = sqrt(ratio0)
    top = math.sqrt(2.0)
    a = math.sqrt(ratio0)
    if a >= top:
        return 1.0
    if T == 0:
        return float(square_distance_cdf(a))
    alpha = 2.0 / T

    def integrand(l):
        dp = -alpha * ratio0 ** (1.0 / T) * l ** (-alpha - 1.0)
        return float(square_distance_cdf(l)) * dp

    brk = [1.0] if a < 1.0 else None
    val, _ = integrate.quad(integrand, a, top, points=brk, limit=200)
    return p(top) - val


class _PairMeasure:
    """Products ``w_u w_v`` of window pairs with their probability mass."""

    def __init__(self, products: np.ndarray, mass: np.ndarray):
        self.products = products
        self.mass = mass / mass.sum() if mass.sum() > 0 else mass

    @classmethod
    def from_weights(cls, w: np.ndarray) -> _PairMeasure:
        iu, iv = np.triu_indices(len(w), k=1)
        prod = w[iu] * w[iv]
        return cls(prod, np.ones_like(prod))

    @classmethod
    def from_window(cls, tau: float, window: WeightWindow, nodes: int = 96) -> _PairMeasure:
        f_lo = float(powerlaw_cdf(window.lo, tau))
        f_hi = float(powerlaw_cdf(window.hi, tau))
        x, wt = np.polynomial.legendre.leggauss(nodes)
        u = f_lo + (f_hi - f_lo) * (x + 1) / 2
        w = powerlaw_quantile(1.0 - u, tau)
        return cls(np.outer(w, w).ravel(), np.outer(wt, wt).ravel())


def _window_pairs(params: ModelParams, window: WeightWindow) -> tuple[_PairMeasure, int]:
    if params.weight_mode is WeightMode.DETERMINISTIC:
        w = sample_window_points(replace(params, family=Family.IRG, T=0.0, d=1), window).weights
        return _PairMeasure.from_weights(w), len(w)
    expected_count = params.n * (float(powerlaw_cdf(window.hi, params.tau)) - float(powerlaw_cdf(window.lo, params.tau)))
    return _PairMeasure.from_window(params.tau, window), expected_count


def _girg_mean_prob(pairs: _PairMeasure, mu: float, n: int, T: float, d: int, geometry: str, table=None) -> float:
    r = pairs.products / (mu * n)
    if geometry == "square" and T > 0:
        probs = table(r)
    else:
        probs = expected_pair_prob_girg(r, T, d, geometry)
    return float(np.dot(probs, pairs.mass))


def _square_table(T: float, r_min: float):
    grid = np.geomspace(max(r_min, 1e-12), 2.0, 400)
    vals = np.array([expected_pair_prob_quadrature(x, T, 2, "square") for x in grid])
    lg, lv = np.log(grid), np.log(np.maximum(vals, 1e-300))

    def table(r):
        r = np.asarray(r, dtype=float)
        out = np.exp(np.interp(np.log(np.clip(r, grid[0], grid[-1])), lg, lv))
        return np.where(r >= 2.0, 1.0, out)

    return table


def calibrate_mu_girg(irg_params: ModelParams, girg_params: ModelParams, window: WeightWindow) -> float:
    """GIRG ``mu`` whose expected average degree in ``window`` matches the IRG's.

    The expectation is over random positions (weights fixed when
    deterministic, integrated over the window when random). Average degree
    is monotone decreasing in ``mu``; the root is found by Brent's method on
    ``log mu``. When the IRG window is fully wired, the largest ``mu`` that
    wires every GIRG window pair is returned.
    """
    if irg_params.family is not Family.IRG or not girg_params.family.geometric:
        raise ParameterError("calibration needs an IRG and a GIRG parameter set")
    if irg_params.n != girg_params.n or irg_params.tau != girg_params.tau:
        raise ParameterError("IRG and GIRG must share n and tau")
    pairs, _ = _window_pairs(irg_params, window)
    if len(pairs.products) == 0:
        raise CalibrationError("window contains fewer than two vertices", achieved_range=(0.0, 0.0))
    n = girg_params.n
    target = float(np.dot(connection_prob_irg(pairs.products, 1.0, irg_params.mu, n), pairs.mass))
    T, d = girg_params.T, girg_params.d
    geometry = "torus" if girg_params.family is Family.GIRG_TORUS else "square"
    sat_ratio = 2.0**-d if geometry == "torus" else 2.0
    mu_sat = float(pairs.products.min()) / (n * sat_ratio)
    if target >= 1.0 - 1e-12:
        return mu_sat
    table = _square_table(T, float(pairs.products.min()) / (n * mu_sat * 1e8)) if geometry == "square" and T > 0 else None

    def gap(log_mu):
        return _girg_mean_prob(pairs, math.exp(log_mu), n, T, d, geometry, table) - target

    lo = math.log(mu_sat)
    hi = lo + 1.0
    for _ in range(200):
        if gap(hi) < 0:
            break
        hi += 2.0
    g_lo, g_hi = gap(lo), gap(hi)
    if not (g_lo >= 0 >= g_hi):
        raise CalibrationError(
            f"target mean pair probability {target:.6g} outside achievable range",
            achieved_range=(g_hi + target, g_lo + target),
        )
    return math.exp(optimize.brentq(gap, lo, hi, xtol=1e-14, rtol=1e-12))


def expected_window_degree(params: ModelParams, window: WeightWindow) -> float:
    """Expected average degree inside ``window`` (over coins, and positions for GIRGs)."""
    pairs, count = _window_pairs(params, window)
    if len(pairs.products) == 0:
        return 0.0
    if params.family is Family.IRG:
        mean = float(np.dot(connection_prob_irg(pairs.products, 1.0, params.mu, params.n), pairs.mass))
    else:
        geometry = "torus" if params.family is Family.GIRG_TORUS else "square"
        table = _square_table(params.T, float(pairs.products.min()) / (params.n * params.mu)) if geometry == "square" and params.T > 0 else None
        mean = _girg_mean_prob(pairs, params.mu, params.n, params.T, params.d, geometry, table)
    return mean * (count - 1)
