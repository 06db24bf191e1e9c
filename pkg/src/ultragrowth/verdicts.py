r"""Tri-state verdicts and finite-window trend estimation.

Every quantified statement in this package ("there is a constant C with
v_p <= log C for all p", "r_p tends to -infinity", "the series converges")
is decided on a finite window, so outcomes are three-valued:

* ``holds`` with a fitted witness,
* ``fails`` with a concrete counterexample,
* ``inconclusive`` when the window does not separate the two.

The shared decision rules live here.  Windows are split geometrically:
the growth phenomena this package probes live on multiplicative scales
(index ladders Q^n, log-spaced t grids), so "late" always means the upper
geometric part of the window.  A sup is considered stable when the late
part of the window does not push the fitted constant up by more than the
stability fraction; a late excursion above everything the rest of the
window supports is the concrete counterexample that turns a bound into a
failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import LOG_TOL, STABILITY

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

__all__ = [
    "Status",
    "Verdict",
    "combine",
    "bounded_above",
    "bounded_below",
    "tends_to_minus_inf",
    "grows_without_bound",
    "series_summability",
    "integral_convergence",
]

_INF = float("inf")


class Status(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"

    def __str__(self) -> str:  # keep CLI output plain
        return self.value


@dataclass(frozen=True)
class Verdict:
    """Outcome of one finite-window check."""

    status: Status
    witness: dict | None = None
    counterexample: dict | None = None
    window: dict | None = None
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "witness": _jsonable(self.witness),
            "counterexample": _jsonable(self.counterexample),
            "window": _jsonable(self.window),
            "detail": self.detail,
        }


def _jsonable(obj):
    if obj is None:
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Status):
        return obj.value
    if isinstance(obj, Verdict):
        return obj.to_json()
    return obj


def combine(*verdicts: Verdict, detail: str = "") -> Verdict:
    """Conjunction: any failure fails, else any open question stays open."""
    vs = list(verdicts)
    if not vs:
        raise ValueError("combine() needs at least one verdict")
    for v in vs:
        if v.status is Status.FAILS:
            return Verdict(Status.FAILS, counterexample=v.counterexample,
                           window=v.window, detail=detail or v.detail)
    for v in vs:
        if v.status is Status.INCONCLUSIVE:
            return Verdict(Status.INCONCLUSIVE, window=v.window,
                           detail=detail or v.detail)
    witness = {}
    for i, v in enumerate(vs):
        if v.witness:
            witness[f"part_{i}"] = v.witness
    return Verdict(Status.HOLDS, witness=witness or None, detail=detail)


# ---------------------------------------------------------------------------
# window plumbing
# ---------------------------------------------------------------------------


def _clean(x, v):
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape or x.ndim != 1:
        raise ValueError("x and v must be 1-d arrays of equal length")
    keep = np.isfinite(x) & (x > 0) & ~np.isnan(v) & (v < _INF)
    return x[keep], v[keep], int(np.sum(np.isposinf(v)))


def _window_meta(x) -> dict:
    return {"x_min": float(x[0]), "x_max": float(x[-1]), "count": int(len(x))}


def _quarter_stats(x, v, reducer):
    """Reducer (max/argmax or min/argmin) of v over geometric quarters of x."""
    edges = np.geomspace(x[0], x[-1], 5)
    out = []
    for i in range(4):
        lo, hi = edges[i], edges[i + 1]
        mask = (x >= lo) & (x <= hi) if i == 3 else (x >= lo) & (x < hi)
        if not np.any(mask):
            out.append(None)
            continue
        idx = np.nonzero(mask)[0]
        j = idx[reducer(v[idx])]
        out.append((float(x[j]), float(v[j])))
    return out


def _margin(reference: float, stability: float, abs_tol: float) -> float:
    return max(abs_tol, stability * max(1.0, abs(reference)))


# ---------------------------------------------------------------------------
# sup-boundedness
# ---------------------------------------------------------------------------


def bounded_above(x, v, *, stability: float = STABILITY, abs_tol: float = LOG_TOL,
                  witness_key: str = "sup", detail: str = "") -> Verdict:
    """Decide whether v stays below a constant across the window.

    Holds when the sup settles in the early geometric half and the tail
    stays put below it, or when the late records approach a ceiling with
    vanishing prominence over the rest of the window.  Fails when a late
    point sticks out above everything the window supports away from it by
    more than twice the stability margin; that point is the counterexample.
    A tail that is still climbing back toward the records at the window end
    leaves the question open.
    """
    x, v, n_inf = _clean(x, v)
    if n_inf:
        return Verdict(Status.FAILS,
                       counterexample={"reason": "infinite value in window"},
                       detail=detail or "unbounded value encountered")
    if len(x) == 0:
        return Verdict(Status.INCONCLUSIVE, detail=detail or "empty window")
    win = _window_meta(x)
    i_star = int(np.argmax(v))
    sup = float(v[i_star])
    x_star = float(x[i_star])
    witness = {witness_key: sup, "at": x_star}
    if len(x) < 8 or x[-1] <= x[0]:
        # Too short for trend analysis; only a flat or falling profile is safe.
        if sup <= v[0] + abs_tol:
            return Verdict(Status.HOLDS, witness=witness, window=win, detail=detail)
        return Verdict(Status.INCONCLUSIVE, window=win,
                       detail=detail or "window too short")

    x_mid = float(np.sqrt(x[0] * x[-1]))
    tail = x >= x_mid
    margin = _margin(sup, stability, abs_tol)
    if x_star < x_mid:
        # Sup settled early; safe unless the tail is climbing back up at the
        # window end without having resolved where it stops.
        tail_min = float(np.min(v[tail]))
        end_rise = float(v[-1]) - tail_min
        if end_rise > margin:
            return Verdict(Status.INCONCLUSIVE, witness=witness, window=win,
                           detail=detail or "tail still rising at window end")
        return Verdict(Status.HOLDS, witness=witness, window=win, detail=detail)

    # Late argmax: measure its prominence over the window away from a
    # geometric neighbourhood of the peak.
    zone = (x[-1] / x[0]) ** 0.25
    right_edge = x_star * zone
    if right_edge >= x[-1] and x_star < x[-1]:
        # nothing right of the zone; let the settled tail speak for itself
        right_edge = float(np.sqrt(x_star * x[-1]))
    outside = (x < x_star / zone) | (x > right_edge)
    if not np.any(outside):
        return Verdict(Status.INCONCLUSIVE, witness=witness, window=win,
                       detail=detail or "peak neighbourhood covers the window")
    baseline = float(np.max(v[outside]))
    excess = sup - baseline
    margin = _margin(baseline, stability, abs_tol)
    if excess <= margin:
        return Verdict(Status.HOLDS, witness=witness, window=win, detail=detail)
    if excess <= 2.0 * margin:
        return Verdict(Status.INCONCLUSIVE, witness=witness, window=win,
                       detail=detail or "late growth inside the stability band")
    return Verdict(
        Status.FAILS,
        counterexample={"at": x_star, "value": sup,
                        "exceeds_rest_by": float(excess)},
        window=win,
        detail=detail or "late excursion above every stable constant",
    )


def bounded_below(x, v, *, stability: float = STABILITY, abs_tol: float = LOG_TOL,
                  witness_key: str = "inf", detail: str = "") -> Verdict:
    """Decide whether v stays above a constant (mirror of :func:`bounded_above`)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    flipped = bounded_above(x, -v, stability=stability, abs_tol=abs_tol,
                            witness_key=witness_key, detail=detail)
    witness = None
    if flipped.witness is not None:
        witness = dict(flipped.witness)
        witness[witness_key] = -witness[witness_key]
    counter = None
    if flipped.counterexample is not None:
        counter = dict(flipped.counterexample)
        if "value" in counter:
            counter["value"] = -counter["value"]
    return Verdict(flipped.status, witness=witness, counterexample=counter,
                   window=flipped.window, detail=flipped.detail)


# ---------------------------------------------------------------------------
# divergence trends
# ---------------------------------------------------------------------------


def tends_to_minus_inf(x, v, *, stability: float = STABILITY,
                       abs_tol: float = LOG_TOL, detail: str = "") -> Verdict:
    """Decide whether v drifts to -infinity along the window.

    Holds when the geometric-quarter minima keep stepping down by more than
    the stability margin.  Fails when the tail stops declining (flat floor
    or late rise); the late maximum is the counterexample.
    """
    x, v, n_inf = _clean(x, v)
    if n_inf:
        return Verdict(Status.FAILS,
                       counterexample={"reason": "infinite value in window"},
                       detail=detail or "ratio blew up inside the window")
    if len(x) < 8:
        return Verdict(Status.INCONCLUSIVE, detail=detail or "window too short")
    win = _window_meta(x)
    mins = _quarter_stats(x, v, np.argmin)
    maxs = _quarter_stats(x, v, np.argmax)
    present = [q for q in mins if q is not None]
    if len(present) < 3:
        return Verdict(Status.INCONCLUSIVE, window=win,
                       detail=detail or "degenerate window split")
    lows = [q[1] for q in mins if q is not None]
    steps = np.diff(lows)
    margin = _margin(lows[-2], stability, abs_tol)
    if all(s <= -margin for s in steps[-2:]):
        return Verdict(Status.HOLDS,
                       witness={"tail_value": lows[-1],
                                "last_step": float(steps[-1])},
                       window=win, detail=detail)
    # no real decline late in the window: the tail max is a concrete witness
    # that the quantity stays bounded below along the grid
    tail_max = maxs[-1] if maxs[-1] is not None else maxs[-2]
    if steps[-1] >= -abs_tol:
        return Verdict(Status.FAILS,
                       counterexample={"at": tail_max[0], "value": tail_max[1],
                                       "last_step": float(steps[-1])},
                       window=win,
                       detail=detail or "tail stopped declining")
    return Verdict(Status.INCONCLUSIVE, window=win,
                   detail=detail or "decline too slow to separate from a floor")


def grows_without_bound(x, v, *, stability: float = STABILITY,
                        abs_tol: float = LOG_TOL, detail: str = "") -> Verdict:
    """Decide whether v drifts to +infinity (mirror of tends_to_minus_inf)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(np.isposinf(v)):
        # +inf here is evidence *for* unbounded growth, not against it.
        first = float(x[np.argmax(np.isposinf(v))])
        return Verdict(Status.HOLDS, witness={"infinite_from": first},
                       detail=detail or "window reaches +inf")
    flipped = tends_to_minus_inf(x, -v, stability=stability,
                                 abs_tol=abs_tol, detail=detail)
    witness = None
    if flipped.witness is not None:
        witness = {k: -val if isinstance(val, float) else val
                   for k, val in flipped.witness.items()}
    counter = None
    if flipped.counterexample is not None:
        counter = dict(flipped.counterexample)
        for key in ("value", "last_step"):
            if key in counter:
                counter[key] = -counter[key]
    return Verdict(flipped.status, witness=witness, counterexample=counter,
                   window=flipped.window, detail=flipped.detail)


# ---------------------------------------------------------------------------
# summability
# ---------------------------------------------------------------------------

_SLOPE_BAND = 0.1          # ambiguous band around the critical exponent
_BLOCK_DIVERGENT = 0.99    # dyadic block-sum ratio at/above this: divergent
_BLOCK_CONVERGENT = 0.93   # and at/below this: convergent


def _fit_slope(log_x, log_y) -> float:
    if len(log_x) < 3 or np.ptp(log_x) <= 0:
        return float("nan")
    return float(np.polyfit(log_x, log_y, 1)[0])


def series_summability(p, terms, *, detail: str = "") -> Verdict:
    """Decide convergence of sum(terms[p]) over the window.

    Primary rule: least-squares slope of log(terms) against log(p) on the
    last index quartile; slope below -1.1 converges, above -0.9 diverges.
    Inside the band a dyadic block-sum ratio refines the call: successive
    half-window block sums with ratio about 1 (the harmonic signature)
    diverge, a clearly shrinking ratio converges.
    """
    p = np.asarray(p, dtype=float)
    terms = np.asarray(terms, dtype=float)
    keep = (p > 0) & np.isfinite(terms) & (terms > 0)
    p, terms = p[keep], terms[keep]
    if len(p) < 16:
        return Verdict(Status.INCONCLUSIVE, detail=detail or "window too short")
    win = _window_meta(p)
    partial = float(np.sum(terms))
    q = len(p) * 3 // 4
    slope = _fit_slope(np.log(p[q:]), np.log(terms[q:]))
    if not np.isfinite(slope):
        return Verdict(Status.INCONCLUSIVE, window=win,
                       detail=detail or "degenerate tail fit")
    if slope < -1.0 - _SLOPE_BAND:
        tail_est = terms[-1] * p[-1] / (-slope - 1.0)
        return Verdict(Status.HOLDS,
                       witness={"partial_sum": partial, "tail_slope": slope,
                                "tail_estimate": float(tail_est)},
                       window=win, detail=detail)
    if slope > -1.0 + _SLOPE_BAND:
        return Verdict(Status.FAILS,
                       counterexample={"tail_slope": slope,
                                       "partial_sum": partial},
                       window=win,
                       detail=detail or "terms decay too slowly to sum")
    # boundary band: compare dyadic block sums near the window end
    hi, mid, lo = p[-1], p[-1] / 2.0, p[-1] / 4.0
    s0 = float(np.sum(terms[(p > mid) & (p <= hi)]))
    s1 = float(np.sum(terms[(p > lo) & (p <= mid)]))
    if s1 <= 0:
        return Verdict(Status.INCONCLUSIVE, window=win,
                       detail=detail or "empty dyadic block")
    ratio = s0 / s1
    if ratio >= _BLOCK_DIVERGENT:
        return Verdict(Status.FAILS,
                       counterexample={"tail_slope": slope,
                                       "block_sum_ratio": ratio,
                                       "partial_sum": partial},
                       window=win,
                       detail=detail or "dyadic block sums do not shrink")
    if ratio <= _BLOCK_CONVERGENT:
        tail_est = s0 * ratio / (1.0 - ratio)
        return Verdict(Status.HOLDS,
                       witness={"partial_sum": partial, "tail_slope": slope,
                                "block_sum_ratio": ratio,
                                "tail_estimate": tail_est},
                       window=win, detail=detail)
    return Verdict(Status.INCONCLUSIVE,
                   witness={"tail_slope": slope, "block_sum_ratio": ratio},
                   window=win, detail=detail or "critical decay rate")


def integral_convergence(t, integrand, *, detail: str = "") -> Verdict:
    """Decide convergence of integral(integrand dt) over the sampled tail.

    Same scheme as :func:`series_summability` with the decade playing the
    role of the dyadic block: slope of log(t * integrand) against log(t)
    classifies, the last two decade integrals refine the boundary band.
    """
    t = np.asarray(t, dtype=float)
    f = np.asarray(integrand, dtype=float)
    keep = (t > 0) & np.isfinite(f) & (f >= 0)
    t, f = t[keep], f[keep]
    pos = f > 0
    if np.count_nonzero(pos) < 16:
        return Verdict(Status.INCONCLUSIVE,
                       detail=detail or "integrand vanishes on the window")
    win = _window_meta(t)
    partial = float(_trapezoid(f, t))
    tp, fp = t[pos], f[pos]
    q = len(tp) * 3 // 4
    slope = _fit_slope(np.log(tp[q:]), np.log(tp[q:] * fp[q:]))
    if not np.isfinite(slope):
        return Verdict(Status.INCONCLUSIVE, window=win,
                       detail=detail or "degenerate tail fit")
    if slope < -_SLOPE_BAND:
        return Verdict(Status.HOLDS,
                       witness={"partial_integral": partial,
                                "tail_slope": slope},
                       window=win, detail=detail)
    if slope > _SLOPE_BAND:
        return Verdict(Status.FAILS,
                       counterexample={"tail_slope": slope,
                                       "partial_integral": partial},
                       window=win,
                       detail=detail or "integrand tail too heavy")
    hi, mid, lo = t[-1], t[-1] / 10.0, t[-1] / 100.0
    m0 = (t > mid) & (t <= hi)
    m1 = (t > lo) & (t <= mid)
    if np.count_nonzero(m0) < 4 or np.count_nonzero(m1) < 4:
        return Verdict(Status.INCONCLUSIVE, window=win,
                       detail=detail or "tail too short for decade blocks")
    d0 = float(_trapezoid(f[m0], t[m0]))
    d1 = float(_trapezoid(f[m1], t[m1]))
    if d1 <= 0:
        return Verdict(Status.INCONCLUSIVE, window=win,
                       detail=detail or "empty decade block")
    ratio = d0 / d1
    if ratio >= _BLOCK_DIVERGENT:
        return Verdict(Status.FAILS,
                       counterexample={"decade_ratio": ratio,
                                       "partial_integral": partial},
                       window=win,
                       detail=detail or "decade integrals do not shrink")
    if ratio <= _BLOCK_CONVERGENT:
        return Verdict(Status.HOLDS,
                       witness={"partial_integral": partial,
                                "decade_ratio": ratio},
                       window=win, detail=detail)
    return Verdict(Status.INCONCLUSIVE,
                   witness={"decade_ratio": ratio}, window=win,
                   detail=detail or "critical decay rate")
