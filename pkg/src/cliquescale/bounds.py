"""Closed-form expectations, exponents and lower bounds on maximal-clique counts.

Every logarithm here is natural. Log-space evaluation uses ``math.lgamma``;
:func:`er_expected_maximal_k_exact` is a rational cross-check for small inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import ParameterError

__all__ = [
    "Formula",
    "BoundQuery",
    "LogBound",
    "WindowCount",
    "er_expected_maximal_k",
    "er_expected_maximal_k_exact",
    "er_expected_total",
    "er_lower_bound_exponent",
    "er_lower_bound_log",
    "er_lower_bound_log_via_k",
    "ER_LOWER_PREFACTOR",
    "er_sparse_exponent",
    "GIRG_VARIANTS",
    "girg_exponent",
    "girg_log_lower_bounds",
    "irg_exponent",
    "irg_log_lower_bound",
    "localization_exponent",
    "kclique_exponent",
    "expected_window_count",
    "maximality_prob_bounds",
    "evaluate",
    "sweep",
    "figure_rows",
]

# the (1 - o(1)) / e factor of the dense G(n, p) lower bound, kept out of the log value
ER_LOWER_PREFACTOR = 1.0 / math.e


def _log_choose(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _check_p(p, open_=False):
    if open_ and not 0 < p < 1:
        raise ParameterError(f"p must lie in (0, 1), got {p}")
    if not 0 <= p <= 1:
        raise ParameterError(f"p must lie in [0, 1], got {p}")


def _check_tau(tau):
    if not 2 < tau < 3:
        raise ParameterError(f"tau must lie in (2, 3), got {tau}")


# --- G(n, p) ------------------------------------------------------------------


def er_expected_maximal_k(n: int, p: float, k: int) -> float:
    """``E N_k = C(n,k) p^(k(k-1)/2) (1-p^k)^(n-k)`` for G(n, p)."""
    _check_p(p)
    if not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= n, got k={k}, n={n}")
    edges = k * (k - 1) // 2
    if edges and p == 0:
        return 0.0
    pk = p**k
    if n > k and pk == 1.0:
        return 0.0
    log_val = _log_choose(n, k)
    if edges:
        log_val += edges * math.log(p)
    if n > k:
        log_val += (n - k) * math.log1p(-pk)
    return math.exp(log_val)


def er_expected_maximal_k_exact(n: int, p, k: int) -> Fraction:
    """Exact rational value of :func:`er_expected_maximal_k` for rational ``p``."""
    p = Fraction(p)
    _check_p(p)
    if not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= n, got k={k}, n={n}")
    return math.comb(n, k) * p ** (k * (k - 1) // 2) * (1 - p**k) ** (n - k)


def er_expected_total(n: int, p: float) -> float:
    return math.fsum(er_expected_maximal_k(n, p, k) for k in range(1, n + 1))


def er_lower_bound_exponent(n: float, p: float) -> float:
    """Exponent of ``n`` in the dense G(n, p) lower bound."""
    _check_p(p, open_=True)
    if n < 3:
        raise ParameterError("need n >= 3")
    ln = math.log(n)
    lq = math.log(1.0 / p)
    return (ln / 2.0 - math.log(ln) + math.log(lq)) / lq


def er_lower_bound_log(n: float, p: float) -> float:
    """Log of the bound's leading expression (without :data:`ER_LOWER_PREFACTOR`)."""
    return er_lower_bound_exponent(n, p) * math.log(n)


def er_lower_bound_log_via_k(n: float, p: float) -> float:
    """Same value written as ``(k/2) log n - k log k`` with ``k = log n / log(1/p)``."""
    _check_p(p, open_=True)
    if n < 3:
        raise ParameterError("need n >= 3")
    k = math.log(n) / math.log(1.0 / p)
    return k / 2.0 * math.log(n) - k * math.log(k)


def er_sparse_exponent(a: float) -> tuple[float, int]:
    """Degree ``x`` of the polynomial bound for ``p = n^-a`` and the maximizing clique size."""
    if not 0 < a <= 1:
        raise ParameterError(f"a must lie in (0, 1], got {a}")
    k = math.ceil(1.0 / a - 1e-12)
    return k - a * (k * (k - 1) / 2.0), k


# --- GIRG / IRG ---------------------------------------------------------------


class LogBound(NamedTuple):
    log_value: float
    n_exponent: float
    label: str


GIRG_VARIANTS = ("torus", "torus_temp", "square", "square_temp", "square_temp_table")

_GIRG_LABELS = {
    "torus": "torus T=0: b^(n^((3-tau)/4-eps))",
    "torus_temp": "torus T>0: b^(n^((3-tau)/5) (eps log n)^(-1/2))",
    "square": "square T=0: C b^(n^((3-tau)/10-eps))",
    "square_temp": "square T>0 (theorem statement): b^(n^((3-tau)/12-eps) log(n)^(1-eps))",
    "square_temp_table": "square T>0 (summary table): b^(n^((3-tau)/10-eps)); disagrees with square_temp",
}


def girg_exponent(tau: float, eps: float, variant: str) -> float:
    """Exponent of ``n`` in the requested GIRG bound; ``eps = 0`` is the limit value."""
    _check_tau(tau)
    if eps < 0:
        raise ParameterError("eps must be non-negative")
    base = {
        "torus": (3 - tau) / 4 - eps,
        "torus_temp": (3 - tau) / 5,
        "square": (3 - tau) / 10 - eps,
        "square_temp": (3 - tau) / 12 - eps,
        "square_temp_table": (3 - tau) / 10 - eps,
    }
    if variant not in base:
        raise ParameterError(f"unknown variant {variant!r}; choose from {GIRG_VARIANTS}")
    return base[variant]


def girg_log_lower_bounds(tau: float, eps: float, b: float, n: float, variant: str, C: float = 1.0) -> LogBound:
    """Natural log of the GIRG lower bound for ``variant`` plus its ``n``-exponent."""
    if not b > 1:
        raise ParameterError("b must exceed 1")
    if n <= 1:
        raise ParameterError("n must exceed 1")
    x = girg_exponent(tau, eps, variant)
    ln = math.log(n)
    caps = {
        "torus": (3 - tau) / 4,
        "square": (3 - tau) / 10,
        "square_temp": (3 - tau) / 12,
        "square_temp_table": (3 - tau) / 10,
    }
    if variant == "torus_temp":
        if eps <= 0:
            raise ParameterError("the temperature torus bound needs eps > 0")
        val = n**x * (eps * ln) ** -0.5 * math.log(b)
    else:
        if eps >= caps[variant]:
            raise ParameterError(f"eps must lie below {caps[variant]} for variant {variant}")
        val = n**x * math.log(b)
        if variant == "square":
            if not C > 0:
                raise ParameterError("C must be positive")
            val += math.log(C)
        elif variant == "square_temp":
            val *= ln ** (1 - eps)
    return LogBound(val, x, _GIRG_LABELS[variant])


def irg_exponent(tau: float, eps: float = 0.0) -> float:
    _check_tau(tau)
    return (3 - tau) / 4 - eps


def irg_log_lower_bound(tau: float, eps: float, b: float, n: float) -> float:
    """``n^((3-tau)/4-eps) log n log b``."""
    _check_tau(tau)
    if not 0 < eps < (3 - tau) / 4:
        raise ParameterError(f"eps must lie in (0, {(3 - tau) / 4})")
    if not b > 1:
        raise ParameterError("b must exceed 1")
    return n ** irg_exponent(tau, eps) * math.log(n) * math.log(b)


def localization_exponent(tau: float) -> float:
    """Growth exponent of the maximal-k-clique count in the IRG."""
    _check_tau(tau)
    return (3 - tau) * (2 * tau - 3) / (tau - 1)


def kclique_exponent(tau: float, k: int) -> float:
    """Growth exponent of the total number of (not necessarily maximal) k-cliques."""
    _check_tau(tau)
    if k < 3:
        raise ParameterError("k must be at least 3")
    return k * (3 - tau) / 2


class WindowCount(NamedTuple):
    exact: float
    leading: float
    lo: float
    hi: float


def expected_window_count(n: float, tau: float, mu: float, a_geom: float, b_geom: float, g: float, h: float) -> WindowCount:
    """Expected number of vertices with weight in ``[(a-g)^b sqrt(mu n), (a-h)^b sqrt(mu n))``.

    ``exact`` is ``n (F(hi) - F(lo))`` with the power-law CDF ``F``.
    ``leading`` is the first-order expansion in the gap, ``(g - h) b (tau-1)
    a^(b(1-tau)-1) mu^((1-tau)/2) n^((3-tau)/2)``.
    """
    _check_tau(tau)
    if not (g < a_geom and h < a_geom):
        raise ParameterError("g and h must be smaller than a")
    if g < h:
        raise ParameterError("g must be at least h")
    scale = math.sqrt(mu * n)
    lo = (a_geom - g) ** b_geom * scale
    hi = (a_geom - h) ** b_geom * scale

    def tail(w):
        return 1.0 if w <= 1 else w ** (1 - tau)

    exact = n * (tail(lo) - tail(hi))
    leading = (g - h) * b_geom * (tau - 1) * a_geom ** (b_geom * (1 - tau) - 1) * mu ** ((1 - tau) / 2) * n ** ((3 - tau) / 2)
    return WindowCount(exact, leading, lo, hi)


def maximality_prob_bounds(n, tau, mu, x1, x2, C1: float = 1.0, C2: float = 1.0) -> tuple[float, float]:
    """Envelope ``(exp(-C1 X), exp(-C2 X))`` with ``X = n^(2-tau) mu^(1-tau) x1 x2^(tau-2)``.

    The constants are unnormalized; ``C1 >= C2`` keeps lower <= upper.
    """
    _check_tau(tau)
    if x1 > x2:
        raise ParameterError("need x1 <= x2")
    if x1 < 1:
        raise ParameterError("weights must be at least 1")
    if not (C1 > 0 and C2 > 0) or C1 < C2:
        raise ParameterError("need C1 >= C2 > 0")
    X = n ** (2 - tau) * mu ** (1 - tau) * x1 * x2 ** (tau - 2)
    return math.exp(-C1 * X), math.exp(-C2 * X)


# --- query dispatch and sweeps ----------------------------------------------


class Formula(str, enum.Enum):
    ER_EXPECT_NK = "ER_EXPECT_NK"
    ER_LOWER = "ER_LOWER"
    ER_SPARSE_EXPONENT = "ER_SPARSE_EXPONENT"
    GIRG_TORUS_LOG_LB = "GIRG_TORUS_LOG_LB"
    GIRG_TEMP_LOG_LB = "GIRG_TEMP_LOG_LB"
    GIRG_SQUARE_LOG_LB = "GIRG_SQUARE_LOG_LB"
    GIRG_SQUARE_TEMP_LOG_LB = "GIRG_SQUARE_TEMP_LOG_LB"
    IRG_LOG_LB = "IRG_LOG_LB"
    LOCALIZATION_EXPONENT = "LOCALIZATION_EXPONENT"
    KCLIQUE_EXPONENT = "KCLIQUE_EXPONENT"
    WINDOW_COUNT = "WINDOW_COUNT"


@dataclass
class BoundQuery:
    which: Formula
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.which = Formula(self.which)


_GIRG_FORMULA_VARIANT = {
    Formula.GIRG_TORUS_LOG_LB: "torus",
    Formula.GIRG_TEMP_LOG_LB: "torus_temp",
    Formula.GIRG_SQUARE_LOG_LB: "square",
    Formula.GIRG_SQUARE_TEMP_LOG_LB: "square_temp",
}


def evaluate(query: BoundQuery) -> float:
    """Scalar value of ``query`` (the log value for log-bounds, ``exact`` for window counts)."""
    q = dict(query.params)
    w = query.which
    try:
        if w is Formula.ER_EXPECT_NK:
            return er_expected_maximal_k(int(q["n"]), q["p"], int(q["k"]))
        if w is Formula.ER_LOWER:
            return er_lower_bound_log(q["n"], q["p"])
        if w is Formula.ER_SPARSE_EXPONENT:
            return er_sparse_exponent(q["a"])[0]
        if w in _GIRG_FORMULA_VARIANT:
            variant = q.get("variant", _GIRG_FORMULA_VARIANT[w])
            return girg_log_lower_bounds(q["tau"], q.get("eps", 0.0), q.get("b", 2.0), q["n"], variant, q.get("C", 1.0)).log_value
        if w is Formula.IRG_LOG_LB:
            return irg_log_lower_bound(q["tau"], q["eps"], q.get("b", 2.0), q["n"])
        if w is Formula.LOCALIZATION_EXPONENT:
            return localization_exponent(q["tau"])
        if w is Formula.KCLIQUE_EXPONENT:
            return kclique_exponent(q["tau"], int(q["k"]))
        if w is Formula.WINDOW_COUNT:
            return expected_window_count(q["n"], q["tau"], q.get("mu", 1.0), q["a_geom"], q["b_geom"], q["g"], q["h"]).exact
    except KeyError as exc:
        raise ParameterError(f"{w.value} needs parameter {exc.args[0]}") from None
    raise ParameterError(f"unhandled formula {w}")


def sweep(query: BoundQuery, name: str, values) -> list[tuple[float, float]]:
    """``(value of name, formula value)`` for each point of the sweep."""
    out = []
    for v in values:
        params = dict(query.params, **{name: float(v)})
        out.append((float(v), evaluate(BoundQuery(query.which, params))))
    return out


def figure_rows(figure: str, taus, eps: float = 0.0, ks=(3, 4, 5)) -> list[dict]:
    """Exponent curves against ``tau``.

    ``"bounds"`` gives the ``n``-exponents of every GIRG/IRG lower bound;
    ``"localization"`` gives the maximal-clique exponent with the k-clique
    exponents for comparison.
    """
    rows = []
    for tau in np.asarray(taus, dtype=float):
        t = float(tau)
        if figure == "bounds":
            row = {"tau": t, "irg": irg_exponent(t, eps)}
            for variant in GIRG_VARIANTS:
                row[variant] = girg_exponent(t, eps, variant)
        elif figure == "localization":
            row = {"tau": t, "maximal": localization_exponent(t)}
            for k in ks:
                row[f"kclique_{k}"] = kclique_exponent(t, k)
        else:
            raise ParameterError(f"unknown figure {figure!r}; choose 'bounds' or 'localization'")
        rows.append(row)
    return rows
