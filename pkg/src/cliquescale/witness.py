"""Co-matching witnesses: evenly spaced torus boxes, circle segments and induced matchings.

A layout is a family of ``2k`` regions plus a weight window. One window
vertex per region, with opposite regions ``i`` and ``i + k``, induces the
complement of a perfect matching, which has ``2**k`` maximal cliques.
Regions are half-open (lower edge in, upper edge out) so they never overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleLayoutError, ParameterError
from .graph import Graph, complement, induced_subgraph
from .models import (
    Family,
    ModelParams,
    WeightedPointSet,
    WeightWindow,
    connection_prob_girg,
    euclidean_distance,
    powerlaw_cdf,
)

__all__ = [
    "BoxLayout",
    "CircleLayout",
    "WitnessReport",
    "box_window",
    "box_layout",
    "build_box_layout",
    "circle_layout",
    "build_circle_layout",
    "chord_half_width",
    "arc_length",
    "planted_points",
    "region_occupancy",
    "verify_box_comatching",
    "verify_circle_comatching",
    "greedy_induced_matching",
    "is_induced_matching",
    "superdense_witness",
]


def _window_size(window: WeightWindow, n: int, tau: float) -> float:
    return n * float(powerlaw_cdf(window.hi, tau) - powerlaw_cdf(window.lo, tau))


# --- torus boxes ---------------------------------------------------------------


def box_window(n: float, d: int, mu: float, g: float, h: float, T: float = 0.0) -> WeightWindow:
    """``[(1/2 - g)^(d/2) sqrt(mu n), (1/2 - (T/d + 1) h)^(d/2) sqrt(mu n))``."""
    scale = math.sqrt(mu * n)
    lo = (0.5 - g) ** (d / 2) * scale
    hi = (0.5 - (T / d + 1) * h) ** (d / 2) * scale
    if not lo < hi:
        raise InfeasibleLayoutError(f"empty weight window: lower {lo} >= upper {hi}")
    return WeightWindow(lo, hi, lo_closed=True, hi_closed=False)


@dataclass(frozen=True)
class BoxLayout:
    n: int
    d: int
    mu: float
    h: float
    g: float
    num_boxes: int
    window: WeightWindow
    T: float = 0.0
    c: float | None = None

    geometry = "torus"

    @property
    def num_regions(self) -> int:
        return self.num_boxes

    @property
    def k(self) -> int:
        return self.num_boxes // 2

    @property
    def spacing(self) -> float:
        return self.g + self.h

    def box(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Lower and upper corners of box ``i`` (0-based)."""
        lo = np.zeros(self.d)
        hi = np.full(self.d, 0.5 - self.g)
        lo[0] = i * self.spacing
        hi[0] = lo[0] + self.h
        return lo, hi

    @property
    def boxes(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [self.box(i) for i in range(self.num_boxes)]

    def opposite(self, i: int) -> int:
        return (i + self.k) % self.num_boxes

    def region_of(self, positions: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(positions, dtype=float))
        idx = np.floor(x[:, 0] / self.spacing).astype(np.int64)
        inside = (x[:, 0] - idx * self.spacing < self.h) & (idx >= 0) & (idx < self.num_boxes)
        if self.d > 1:
            inside &= np.all((x[:, 1:] >= 0) & (x[:, 1:] < 0.5 - self.g), axis=1)
        return np.where(inside, idx, -1)

    @property
    def region_volume(self) -> float:
        return self.h * (0.5 - self.g) ** (self.d - 1)

    def expected_occupancy(self, tau: float) -> float:
        """Expected number of window vertices in one box."""
        return self.region_volume * _window_size(self.window, self.n, tau)

    def region_centers(self) -> np.ndarray:
        return np.array([(lo + hi) / 2 for lo, hi in self.boxes])

    def distance_range(self, i: int, j: int) -> tuple[float, float]:
        """Exact min and max max-norm torus distance between points of boxes ``i`` and ``j``."""
        (alo, ahi), (blo, bhi) = self.box(i), self.box(j)
        mins, maxs = [], []
        for t in range(self.d):
            lo, hi = blo[t] - ahi[t], bhi[t] - alo[t]
            ends = [_tent(lo), _tent(hi)]
            has_int = math.floor(hi) >= math.ceil(lo)
            has_half = math.floor(hi - 0.5) >= math.ceil(lo - 0.5)
            mins.append(0.0 if has_int else min(ends))
            maxs.append(0.5 if has_half else max(ends))
        return max(mins), max(maxs)


def _tent(delta: float) -> float:
    r = delta % 1.0
    return min(r, 1.0 - r)


def box_layout(num_boxes: int, h: float, n: int, d: int = 1, mu: float = 1.0, T: float = 0.0) -> BoxLayout:
    """Layout with ``num_boxes`` boxes of height ``h``; the gap fills the rest of the spacing."""
    if num_boxes < 2 or num_boxes % 2:
        raise InfeasibleLayoutError(f"need an even number of at least 2 boxes, got {num_boxes}")
    if d < 1:
        raise ParameterError("dimension must be at least 1")
    g = 1.0 / num_boxes - h
    if not 0 < h < g:
        raise InfeasibleLayoutError(f"need 0 < h < g, got h={h}, g={g}")
    return BoxLayout(n, d, mu, h, g, num_boxes, box_window(n, d, mu, g, h, T), T)


def build_box_layout(n: int, d: int, tau: float, mu: float, eps: float, s: float, T: float = 0.0) -> BoxLayout:
    """Evenly spaced boxes sized for a co-matching of about ``s n^((3-tau)/4 - eps)`` vertices.

    The free constant is solved from the target box count, rounded down to
    even. For ``T > 0`` the heights follow the temperature construction,
    ``h ~ n^(-(3-tau)/5) / (2s)`` and ``g = h sqrt(eps log n)``, and the
    window top shrinks to ``(1/2 - (T/d + 1) h)``.
    """
    if not 2 < tau < 3:
        raise ParameterError(f"tau must lie in (2, 3), got {tau}")
    if not (eps > 0 and s > 0):
        raise ParameterError("eps and s must be positive")
    if not 0 <= T < 1:
        raise ParameterError("temperature must lie in [0, 1)")
    if T == 0:
        alpha = (3 - tau) / 4
        target = s * n ** (alpha - eps)
        ratio = n**eps  # g / h
    else:
        h0 = n ** (-(3 - tau) / 5) / (2 * s)
        ratio = math.sqrt(eps * math.log(n))
        target = 1.0 / (h0 * (1 + ratio))
        alpha = (3 - tau) / 5
    num = 2 * int(math.floor(target / 2))
    if num < 2:
        raise InfeasibleLayoutError(f"n={n} too small: target box count {target:.3g} < 2")
    if ratio <= 1:
        raise InfeasibleLayoutError(f"n={n} too small for the gap to exceed the height")
    h = 1.0 / (num * (1 + ratio))
    c = h * n**alpha
    layout = box_layout(num, h, n, d, mu, T)
    return BoxLayout(n, d, mu, layout.h, layout.g, num, layout.window, T, c)


# --- circle segments on the square ---------------------------------------------


def chord_half_width(h: float, a: float) -> float:
    """Half chord of a segment of height ``h`` on a circle of radius ``a/2 + h``."""
    return math.sqrt(h * (h + a))


def arc_length(chord: float, R: float) -> float:
    return 2 * R * math.asin(chord / (2 * R))


@dataclass(frozen=True)
class CircleLayout:
    n: int
    mu: float
    a: float
    h: float
    num_segments: int
    window: WeightWindow
    beta: float | None = None
    gamma: float | None = None
    c: float | None = None
    T: float = 0.0

    geometry = "square"
    d = 2

    @property
    def R(self) -> float:
        return self.a / 2 + self.h

    @property
    def center(self) -> np.ndarray:
        return np.array([0.5, 0.5])

    @property
    def num_regions(self) -> int:
        return self.num_segments

    @property
    def k(self) -> int:
        return self.num_segments // 2

    @property
    def half_angle(self) -> float:
        return math.acos((self.R - self.h) / self.R)

    @property
    def chord_half_width(self) -> float:
        return chord_half_width(self.h, self.a)

    @property
    def opposite_distance(self) -> float:
        """Smallest distance between opposite segments (their chord midpoints)."""
        return 2 * (self.R - self.h)

    @property
    def nonopposite_max_distance(self) -> float:
        """Largest distance between points of non-opposite segments."""
        if self.num_segments == 2:
            return 0.0
        return 2 * self.R * math.cos(math.pi / self.num_segments - self.half_angle)

    @property
    def region_volume(self) -> float:
        R, h = self.R, self.h
        return R * R * math.acos((R - h) / R) - (R - h) * math.sqrt(2 * R * h - h * h)

    def axis(self, i: int) -> np.ndarray:
        ang = 2 * math.pi * i / self.num_segments
        return np.array([math.cos(ang), math.sin(ang)])

    def opposite(self, i: int) -> int:
        return (i + self.k) % self.num_segments

    def region_of(self, positions: np.ndarray) -> np.ndarray:
        v = np.atleast_2d(np.asarray(positions, dtype=float)) - self.center
        r = np.hypot(v[:, 0], v[:, 1])
        ang = np.arctan2(v[:, 1], v[:, 0])
        step = 2 * math.pi / self.num_segments
        idx = np.round(ang / step).astype(np.int64) % self.num_segments
        axes = np.array([self.axis(i) for i in range(self.num_segments)])
        depth = np.einsum("ij,ij->i", v, axes[idx])
        inside = (depth >= self.R - self.h) & (r < self.R)
        return np.where(inside, idx, -1)

    def expected_occupancy(self, tau: float) -> float:
        return self.region_volume * _window_size(self.window, self.n, tau)

    def region_centers(self) -> np.ndarray:
        return np.array([self.center + (self.R - self.h / 2) * self.axis(i) for i in range(self.num_segments)])


def circle_layout(a: float, h: float, num_segments: int, n: int, mu: float = 1.0, ell: float | None = None, T: float = 0.0) -> CircleLayout:
    """Segments of height ``h`` on the circle of radius ``a/2 + h`` centered in the square.

    The window is ``[ell sqrt(mu n), a sqrt(mu n))``; ``ell`` defaults to the
    actual largest non-opposite distance.
    """
    if not 0 < a < 0.25:
        raise ParameterError(f"a must lie in (0, 1/4), got {a}")
    if num_segments < 2 or num_segments % 2:
        raise InfeasibleLayoutError(f"need an even number of at least 2 segments, got {num_segments}")
    if not 0 < h or a / 2 + h >= 0.25:
        raise InfeasibleLayoutError(f"need h > 0 and radius a/2 + h < 1/4, got h={h}")
    proto = CircleLayout(n, mu, a, h, num_segments, WeightWindow(0.0, 1.0), T=T)
    if proto.half_angle >= math.pi / num_segments:
        raise InfeasibleLayoutError("segments overlap: half-angle exceeds half the spacing")
    actual = proto.nonopposite_max_distance
    ell = actual if ell is None else ell
    if ell < actual - 1e-12:
        raise InfeasibleLayoutError(f"ell={ell} below the non-opposite distance {actual}")
    if not ell < a:
        raise InfeasibleLayoutError(f"non-opposite distance {ell} must stay below a={a}")
    scale = math.sqrt(mu * n)
    window = WeightWindow(ell * scale, a * scale, lo_closed=True, hi_closed=False)
    return CircleLayout(n, mu, a, h, num_segments, window, T=T)


def build_circle_layout(n: int, tau: float, mu: float, eps: float, a: float = 0.2, c: float = 0.02, T: float = 0.0) -> CircleLayout:
    """Segments with ``h = c n^-gamma`` and non-opposite distance ``a sqrt(1 - c n^-beta)``.

    ``beta = (3-tau)/5 - eps`` and ``gamma = (3-tau)/5``. The segment count is
    the largest even number whose non-opposite pairs stay within that distance.
    """
    if not 2 < tau < 3:
        raise ParameterError(f"tau must lie in (2, 3), got {tau}")
    gamma = (3 - tau) / 5
    if not 0 < eps < gamma:
        raise ParameterError(f"eps must lie in (0, {gamma})")
    if not c > 0:
        raise ParameterError("c must be positive")
    beta = gamma - eps
    h = c * n**-gamma
    shrink = c * n**-beta
    if shrink >= 1:
        raise InfeasibleLayoutError(f"n={n} too small: c n^-beta = {shrink} >= 1")
    ell = a * math.sqrt(1 - shrink)
    R = a / 2 + h
    theta = math.acos((R - h) / R)
    phi = math.acos(ell / (2 * R))
    num = 2 * int(math.floor(math.pi / (theta + phi) / 2))
    if num < 2:
        raise InfeasibleLayoutError(f"n={n} admits fewer than 2 segments")
    base = circle_layout(a, h, num, n, mu, ell=ell, T=T)
    return CircleLayout(n, mu, a, h, num, base.window, beta, gamma, c, T)


# --- verification ------------------------------------------------------------------


@dataclass
class WitnessReport:
    layout: object
    occupancy: np.ndarray
    selected: np.ndarray  # vertex per region, -1 if unoccupied
    verified: bool
    reason: str = ""
    pair_found: np.ndarray | None = None  # T > 0 opposite-pair search result
    witness_size: int = 0  # co-matching pairs (k) when verified
    extra: dict = field(default_factory=dict)

    @property
    def num_regions(self) -> int:
        return len(self.occupancy)

    @property
    def occupied(self) -> int:
        return int(np.count_nonzero(self.occupancy))

    @property
    def vertices(self) -> np.ndarray:
        return self.selected[self.selected >= 0]


def planted_points(layout, weight: float | None = None) -> WeightedPointSet:
    """One vertex per region, at the region's center with a mid-window weight."""
    w = 0.5 * (layout.window.lo + layout.window.hi) if weight is None else weight
    pos = layout.region_centers()
    return WeightedPointSet(np.full(len(pos), float(w)), pos, layout.geometry)


def region_occupancy(points: WeightedPointSet, layout) -> tuple[np.ndarray, np.ndarray]:
    """Per-region count of window vertices and the region index of every vertex (-1 if none)."""
    region = layout.region_of(points.positions)
    region = np.where(layout.window.contains(points.weights), region, -1)
    counts = np.bincount(region[region >= 0], minlength=layout.num_regions)
    return counts, region


def _select(region: np.ndarray, num_regions: int) -> np.ndarray:
    sel = np.full(num_regions, -1, dtype=np.int64)
    for v in np.flatnonzero(region >= 0)[::-1]:
        sel[region[v]] = v
    return sel


def _check_rule(points, layout, params, sel) -> tuple[bool, str]:
    w, x = points.weights, points.positions
    for i in range(layout.num_regions):
        for j in range(i + 1, layout.num_regions):
            u, v = sel[i], sel[j]
            p = float(connection_prob_girg(w[u], w[v], x[u], x[v], params))
            if j == layout.opposite(i):
                if p != 0.0:
                    return False, f"opposite regions {i} and {j} connected"
            elif p != 1.0:
                return False, f"regions {i} and {j} not connected"
    return True, ""


def _check_graph(g: Graph, layout, sel) -> tuple[bool, str]:
    for i in range(layout.num_regions):
        for j in range(i + 1, layout.num_regions):
            adj = g.has_edge(int(sel[i]), int(sel[j]))
            if j == layout.opposite(i) and adj:
                return False, f"opposite regions {i} and {j} adjacent"
            if j != layout.opposite(i) and not adj:
                return False, f"regions {i} and {j} not adjacent"
    return True, ""


def _verify(points, layout, params, graph) -> WitnessReport:
    counts, region = region_occupancy(points, layout)
    sel = _select(region, layout.num_regions)
    report = WitnessReport(layout, counts, sel, False)
    if np.any(counts == 0):
        report.reason = "unoccupied region"
        return report
    if params.T == 0:
        ok, why = _check_rule(points, layout, params, sel)
    elif graph is None:
        raise ParameterError("a realized graph is needed to verify a T > 0 instance")
    else:
        ok, why = _check_graph(graph, layout, sel)
    report.verified, report.reason = ok, why
    report.witness_size = layout.k if ok else 0
    return report


def verify_box_comatching(points: WeightedPointSet, layout: BoxLayout, params: ModelParams, graph: Graph | None = None) -> WitnessReport:
    """Select the lowest-id window vertex per box and check the co-matching pattern.

    ``T == 0`` uses the connection rule. ``T > 0`` checks the realized
    ``graph`` instead.
    """
    if params.family is not Family.GIRG_TORUS:
        raise ParameterError("box witnesses live on the torus")
    return _verify(points, layout, params, graph)


def verify_circle_comatching(points: WeightedPointSet, layout: CircleLayout, params: ModelParams, graph: Graph | None = None) -> WitnessReport:
    """Segment version of :func:`verify_box_comatching`.

    For ``T > 0`` every opposite segment pair is searched for a realized
    non-edge between window vertices at distance at least ``a + h``;
    ``pair_found`` records the outcome per pair.
    """
    if params.family is not Family.GIRG_SQUARE:
        raise ParameterError("segment witnesses live on the square")
    if params.T == 0:
        return _verify(points, layout, params, graph)
    if graph is None:
        raise ParameterError("a realized graph is needed to verify a T > 0 instance")
    counts, region = region_occupancy(points, layout)
    sel = _select(region, layout.num_regions)
    found = np.zeros(layout.k, dtype=bool)
    x = points.positions
    for i in range(layout.k):
        us = np.flatnonzero(region == i)
        vs = np.flatnonzero(region == layout.opposite(i))
        for u in us:
            far = vs[euclidean_distance(x[u], x[vs]) >= layout.a + layout.h]
            if any(not graph.has_edge(int(u), int(v)) for v in far):
                found[i] = True
                break
    report = WitnessReport(layout, counts, sel, False, pair_found=found)
    if np.any(counts == 0):
        report.reason = "unoccupied region"
    elif not found.all():
        report.reason = f"no far non-edge for {int((~found).sum())} opposite pairs"
    else:
        report.verified = True
        report.witness_size = layout.k
    return report


# --- super-dense G(n, p) -------------------------------------------------------------


def greedy_induced_matching(g: Graph, M: int) -> list[tuple[int, int]]:
    """Greedy induced matching among vertices of degree 1..M.

    Edges are scanned in lexicographic order; each pick deletes both
    endpoints and all their neighbors.
    """
    if M < 1:
        raise ParameterError("M must be at least 1")
    deg = g.degree()
    low = (deg >= 1) & (deg <= M)
    alive = low.copy()
    out = []
    for u, v in g.edges.tolist():
        if alive[u] and alive[v]:
            out.append((u, v))
            alive[g.neighbors(u)] = False
            alive[g.neighbors(v)] = False
            alive[u] = alive[v] = False
    return out


def is_induced_matching(g: Graph, pairs) -> bool:
    verts = [v for e in pairs for v in e]
    if len(set(verts)) != len(verts):
        return False
    if not all(g.has_edge(u, v) for u, v in pairs):
        return False
    sub, _ = induced_subgraph(g, verts)
    return sub.m == len(pairs)


def superdense_witness(g: Graph, c: float | None = None, M: int = 3) -> WitnessReport:
    """Co-matching in ``g`` from a greedy induced matching of its complement."""
    comp = complement(g)
    pairs = greedy_induced_matching(comp, M)
    verts = np.array(sorted(v for e in pairs for v in e), dtype=np.int64)
    ok = is_induced_matching(comp, pairs)
    report = WitnessReport(None, np.array([len(pairs)]), verts, ok, "" if ok else "not an induced matching")
    report.witness_size = len(pairs) if ok else 0
    report.extra.update(zeta=len(pairs) / g.n if g.n else 0.0, c=c, M=M, pairs=pairs)
    return report
