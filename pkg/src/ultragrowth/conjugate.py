r"""Young conjugates of weight functions and the matrices they generate.

The conjugate lives in the logarithmic variable: with phi(y) = w(e^y),

    conj(s) = sup_{y >= 0} (s y - phi(y)),

a convex, nondecreasing function of s >= 0 that is infinite once s
overtakes the terminal slope of phi.  Matrices arise by reading the
conjugate along arithmetic progressions: level lam holds the sequence
exp((1/lam) conj(lam p)).  Convexity of the conjugate makes every level
log-convex, monotone in lam, and submultiplicative against the doubled
level, which is what the matrix checks downstream consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assocfn import WeightFn, sup_linear_minus_phi
from .config import DEFAULT_CONFIG, RunConfig
from .matrices import WeightMatrix
from .seqcore import LogSequence

__all__ = [
    "ConjugateTable",
    "young_conjugate",
    "conjugate_table",
    "matrix_of_weight",
]

# widen the y-window until the tail slope clears every coefficient or
# stops moving; curvature past e^4096 reads as saturation
_Y_START = 64.0
_Y_CAP = 4096.0
_VAL_TOL = 1e-6


def _conjugate_values(w: WeightFn, s: np.ndarray,
                      config: RunConfig) -> np.ndarray:
    """conj at each s >= 0, +inf where the objective keeps climbing."""
    if np.any(s < 0):
        raise ValueError("the conjugate is defined for s >= 0 only")
    points = max(4096, 8 * config.points_per_decade)
    y_top = _Y_START
    prev_slope = -math.inf
    while True:
        y = np.linspace(0.0, y_top, points + 1)
        phi = w.phi(y)
        keep = np.isfinite(phi)
        y_f, phi_f = y[keep], phi[keep]
        if len(y_f) < 16:
            raise ValueError("weight has too small a finite domain")
        cut = y_f[-1] - math.log(10.0)
        i = min(int(np.searchsorted(y_f, cut)), len(y_f) - 2)
        slope = (phi_f[-1] - phi_f[i]) / (y_f[-1] - y_f[i])
        undecided = float(np.max(s)) > slope and y_top < _Y_CAP
        improving = slope > prev_slope + 1e-9
        if not (undecided and improving):
            break
        prev_slope = slope
        y_top = min(2.0 * y_top, _Y_CAP)
    vals, _ = sup_linear_minus_phi(w, s, y_f, phi_f)
    return vals


def young_conjugate(w: WeightFn, s: float, *,
                    config: RunConfig = DEFAULT_CONFIG) -> float:
    """The conjugate sup_{y>=0}(s y - w(e^y)) at one coefficient."""
    s = float(s)
    if s < 0:
        raise ValueError("the conjugate is defined for s >= 0 only")
    return float(_conjugate_values(w, np.array([s]), config)[0])


@dataclass(frozen=True)
class ConjugateTable:
    """Tabulated conjugate with its finiteness edge.

    ``finite_threshold`` is the last grid coefficient with a finite
    value, or +inf when the whole table is finite.  Construction checks
    the shape a conjugate must have: nondecreasing and convex on the
    finite region, with value/s nondecreasing for s > 0.
    """

    source: str
    s_grid: np.ndarray
    values: np.ndarray
    finite_threshold: float = math.inf

    def __post_init__(self) -> None:
        s = np.asarray(self.s_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if s.ndim != 1 or s.shape != v.shape or len(s) < 2:
            raise ValueError("need matching s and value arrays, length >= 2")
        if s[0] < 0 or np.any(np.diff(s) <= 0):
            raise ValueError("s grid must be nonnegative and increasing")
        fin = np.isfinite(v)
        if not fin.any():
            raise ValueError("table has no finite values")
        if (~fin & ~np.isposinf(v)).any():
            raise ValueError("values must be finite or +inf")
        if not fin.all() and fin[int(np.argmin(fin)):].any():
            raise ValueError("values must be finite up to a threshold, +inf beyond")
        sf, vf = s[fin], v[fin]
        scale = max(1.0, float(np.max(np.abs(vf))))
        if np.any(np.diff(vf) < -1e-9 * scale):
            raise ValueError("conjugate values must be nondecreasing")
        if len(vf) >= 3:
            slopes = np.diff(vf) / np.diff(sf)
            if np.any(np.diff(slopes) < -_VAL_TOL * scale):
                raise ValueError("conjugate values must be convex")
        pos = sf > 0
        if pos.sum() >= 2:
            ratio = vf[pos] / sf[pos]
            if np.any(np.diff(ratio) < -_VAL_TOL * scale):
                raise ValueError("value/s must be nondecreasing for s > 0")
        s.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "s_grid", s)
        object.__setattr__(self, "values", v)
        thr = math.inf if fin.all() else float(sf[-1])
        object.__setattr__(self, "finite_threshold", thr)

    def __len__(self) -> int:
        return len(self.s_grid)


def conjugate_table(w: WeightFn, s_grid=None, *,
                    config: RunConfig = DEFAULT_CONFIG) -> ConjugateTable:
    """Tabulate the conjugate on a coefficient grid (default 1/8 .. 128)."""
    if s_grid is None:
        s_grid = np.concatenate([[0.0], np.geomspace(0.125, 128.0, 121)])
    s = np.asarray(s_grid, dtype=float)
    vals = _conjugate_values(w, s, config)
    return ConjugateTable(source=w.spec or w.name or w.kind,
                          s_grid=s, values=vals)


def matrix_of_weight(w: WeightFn, lambdas=None, P: int | None = None, *,
                     config: RunConfig = DEFAULT_CONFIG) -> WeightMatrix:
    """The weight matrix with levels exp((1/lam) conj(lam p)).

    The weight is normalized first, so every level starts at 1 and the
    whole family is monotone in the level (value/s monotonicity of the
    conjugate).  Levels may run into +inf entries; those rows are kept
    with their terminal infinite segment.
    """
    if lambdas is None:
        lambdas = config.lambdas
    lams = sorted(float(x) for x in lambdas)
    if not lams:
        raise ValueError("need at least one level")
    if any(x <= 0 for x in lams):
        raise ValueError("levels must be positive")
    if P is None:
        P = config.truncation
    if P < 8:
        raise ValueError("need P >= 8")
    wn = w.normalize()
    p = np.arange(P + 1, dtype=float)
    entries = {}
    for lam in lams:
        vals = _conjugate_values(wn, lam * p, config) / lam
        inf_seen = False
        for k in range(P + 1):
            if np.isposinf(vals[k]):
                inf_seen = True
            elif inf_seen:
                vals[k] = np.inf
        vals[0] = 0.0
        entries[lam] = LogSequence(vals, name=f"W^{lam:g}[{w.name or w.kind}]",
                                   provenance="generated-from-weight")
    return WeightMatrix(entries, name=f"W[{w.name or w.kind}]")
