r"""Weight functions, associated functions, recovery, and weight conditions.

A weight function w is evaluated through two equivalent views: omega(t) on
t >= 0 and phi(y) = omega(e^y) on the log axis.  All growth comparisons
happen in the y view, where the associated function of a sequence is a
piecewise-linear convex envelope: omega_M(e^y) = max_p (p*y - logm[p]).
The maximizing p only grows with y, so evaluation is a binary search over
the envelope's slope ladder (the quotient logs), and recovery of the
sequence is the inverse envelope logm[p] = sup_y (p*y - phi(y)).

Five kinds are supported: the closed forms t^a, log(1+t), max(0, log t),
the associated function of a LogSequence, and a sampled table.  A
normalizing wrapper clamps any weight to 0 on [0, 1] after subtracting its
value at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .seqcore import LogSequence, quotients
from .verdicts import (
    Status,
    Verdict,
    bounded_above,
    bounded_below,
    grows_without_bound,
    integral_convergence,
    tends_to_minus_inf,
)

__all__ = [
    "WeightFn",
    "WEIGHT_CONDITIONS",
    "power",
    "shifted_log",
    "trunc_log",
    "associated",
    "sampled_weight",
    "omega_of_sequence",
    "sequence_of_omega",
    "sup_linear_minus_phi",
    "check_weight_condition",
    "classify_triviality",
]

WEIGHT_CONDITIONS = ("alpha", "beta", "gamma", "delta", "omega6", "om7",
                     "omega_nqa")

# end-slope margin that separates "+inf" from "finite but saturated"
_INF_SLOPE_MARGIN = 1e-6


def _upper_hull(logm: np.ndarray):
    """Indices of the lower convex hull of (p, logm[p]) on the finite part.

    The sup defining the associated function only sees the convex minorant
    of the sequence, so non-convex inputs are reduced to their hull first.
    """
    finite = np.isfinite(logm)
    ps = np.nonzero(finite)[0]
    hull: list[int] = []
    for p in ps:
        while len(hull) >= 2:
            p1, p2 = hull[-2], hull[-1]
            # keep slopes strictly increasing
            if ((logm[p2] - logm[p1]) * (p - p2)
                    >= (logm[p] - logm[p2]) * (p2 - p1)):
                hull.pop()
            else:
                break
        hull.append(int(p))
    return np.asarray(hull, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class WeightFn:
    """A weight function with stable evaluation on both the t and y axes."""

    kind: str
    a: float | None = None
    seq: LogSequence | None = None
    grid: np.ndarray | None = None
    values: np.ndarray | None = None
    base: "WeightFn | None" = None
    name: str = ""
    spec: str = ""
    normalized: bool = False
    saturated_above: float = math.inf

    def __post_init__(self) -> None:
        if self.kind == "associated":
            hull = _upper_hull(self.seq.logm)
            logm = self.seq.logm
            slopes = np.diff(logm[hull]) / np.diff(hull)
            object.__setattr__(self, "_hull_p", hull)
            object.__setattr__(self, "_hull_logm", logm[hull])
            object.__setattr__(self, "_hull_slopes", slopes)
            if len(slopes):
                object.__setattr__(self, "saturated_above",
                                    float(np.exp(slopes[-1])))
        if self.kind == "sampled":
            g = np.asarray(self.grid, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if g.ndim != 1 or g.shape != v.shape or len(g) < 2:
                raise ValueError("sampled weight needs matching t and value arrays")
            if np.any(np.diff(g) <= 0) or g[0] <= 0:
                raise ValueError("sampled grid must be positive and increasing")
            object.__setattr__(self, "grid", g)
            object.__setattr__(self, "values", v)
            object.__setattr__(self, "saturated_above", float(g[-1]))

    # -- evaluation -----------------------------------------------------

    def phi(self, y):
        """phi(y) = omega(e^y), evaluated without forming e^y where possible."""
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        if self.kind == "power":
            with np.errstate(over="ignore"):
                out = np.exp(self.a * y)
        elif self.kind == "shifted_log":
            out = np.logaddexp(0.0, y)
        elif self.kind == "trunc_log":
            out = np.maximum(0.0, y)
        elif self.kind == "associated":
            idx = np.searchsorted(self._hull_slopes, y, side="right")
            p = self._hull_p[idx]
            with np.errstate(invalid="ignore"):
                out = p * y - self._hull_logm[idx]
            # left of every slope the p = first hull point line rules
            out = np.where(np.isneginf(y), -self._hull_logm[0], out)
        elif self.kind == "sampled":
            ylog = np.log(self.grid)
            out = np.interp(y, ylog, self.values,
                            left=self.values[0], right=self.values[-1])
        elif self.kind == "normalized":
            shift = self.base.phi(0.0)
            out = np.maximum(0.0, self.base.phi(np.maximum(y, 0.0)) - shift)
            out = np.where(y <= 0.0, 0.0, out)
        else:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        return float(out[0]) if scalar else out

    def omega(self, t):
        """omega(t) for t >= 0."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if np.any(t < 0):
            raise ValueError("weight functions take t >= 0")
        with np.errstate(divide="ignore"):
            out = self.phi(np.log(t))
        return float(out[0]) if scalar else out

    def __call__(self, t):
        return self.omega(t)

    def normalize(self) -> "WeightFn":
        """Clamp to 0 on [0,1] and subtract the value at 1."""
        if self.normalized:
            return self
        return WeightFn(kind="normalized", base=self,
                        name=f"norm[{self.name or self.kind}]",
                        normalized=True, saturated_above=self.saturated_above)

    def __repr__(self) -> str:
        return f"WeightFn({self.name or self.kind})"


# -- constructors --------------------------------------------------------


def power(a: float, spec: str = "") -> WeightFn:
    """omega(t) = t^a."""
    if not (a > 0) or not math.isfinite(a):
        raise ValueError("power weight needs a finite exponent a > 0")
    return WeightFn(kind="power", a=float(a), name=f"t^{a:g}",
                    spec=spec or f"t^{a:g}")


def shifted_log(spec: str = "") -> WeightFn:
    """omega(t) = log(1 + t)."""
    return WeightFn(kind="shifted_log", name="log1p", spec=spec or "log1p")


def trunc_log(spec: str = "") -> WeightFn:
    """omega(t) = max(0, log t); the degenerate weight of the appendix regime."""
    return WeightFn(kind="trunc_log", name="logtrunc", spec=spec or "logtrunc",
                    normalized=True)


def associated(M: LogSequence, spec: str = "") -> WeightFn:
    """The associated function omega_M(t) = sup_p log(t^p / M_p)."""
    logmu = quotients(M).logmu
    normalized = bool(abs(M.logm[0]) == 0.0 and len(logmu) > 1
                      and logmu[1] >= 0.0)
    return WeightFn(kind="associated", seq=M, name=f"assoc[{M.name or 'seq'}]",
                    spec=spec, normalized=normalized)


def sampled_weight(t_grid, values, name: str = "sampled",
                   spec: str = "") -> WeightFn:
    """A weight given by a sampled table, log-linearly interpolated."""
    return WeightFn(kind="sampled", grid=np.asarray(t_grid, dtype=float),
                    values=np.asarray(values, dtype=float), name=name,
                    spec=spec)


# -- associated function and recovery -------------------------------------


def omega_of_sequence(M: LogSequence, t) -> float | np.ndarray:
    """omega_M at one or many t values; envelope evaluation, t >= 0."""
    return associated(M).omega(t)


def _phi_end_slope(y: np.ndarray, phi: np.ndarray) -> float:
    """Slope of phi over the final grid step.

    The objective c*y - phi(y) still climbs at the boundary exactly when c
    exceeds this slope.  A decade-scale average is wrong here: a truncated
    hull whose terminal corner falls inside the last decade averages below
    the top recoverable coefficient and would flag it as unbounded.
    """
    dy = y[-1] - y[-2]
    return float((phi[-1] - phi[-2]) / dy) if dy > 0 else math.inf


def sup_linear_minus_phi(w: WeightFn, coeffs: np.ndarray, y: np.ndarray,
                         phi: np.ndarray):
    """sup_y (c*y - phi(y)) over the grid per coefficient c.

    Coarse grid argmax plus a vectorized ternary refinement one grid cell
    wide on each side (the objective is concave for convex phi; for other
    weights the coarse grid value is kept as a floor).  A coefficient whose
    objective still climbs at the grid end with slope above the margin is
    reported unbounded.  Returns (values, unbounded_mask).
    """
    end_slope = _phi_end_slope(y, phi)
    coeffs = np.asarray(coeffs, dtype=float)
    unbounded = coeffs - end_slope > _INF_SLOPE_MARGIN
    vals = np.full(len(coeffs), np.inf)
    todo = ~unbounded
    if todo.any():
        ct = coeffs[todo]
        best_idx = np.empty(len(ct), dtype=np.int64)
        for lo in range(0, len(ct), 256):
            chunk = ct[lo:lo + 256, None]
            g = chunk * y[None, :] - phi[None, :]
            best_idx[lo:lo + 256] = np.argmax(g, axis=1)
        lo_i = np.maximum(best_idx - 1, 0)
        hi_i = np.minimum(best_idx + 1, len(y) - 1)
        a = y[lo_i].astype(float)
        b = y[hi_i].astype(float)
        for _ in range(90):
            m1 = a + (b - a) / 3.0
            m2 = b - (b - a) / 3.0
            g1 = ct * m1 - w.phi(m1)
            g2 = ct * m2 - w.phi(m2)
            left = g1 > g2
            b = np.where(left, m2, b)
            a = np.where(left, a, m1)
        mid = 0.5 * (a + b)
        vals[todo] = np.maximum(ct * mid - w.phi(mid),
                                ct * y[best_idx] - phi[best_idx])
    return vals, unbounded


def sequence_of_omega(w: WeightFn, P: int,
                      config: RunConfig = DEFAULT_CONFIG) -> LogSequence:
    """Recover logm[p] = sup_t (p log t - w(t)) for p = 0..P.

    The sup is taken over the configured t-grid with a vectorized ternary
    refinement around the grid argmax (the objective is concave in log t
    for convex phi).  When the objective still climbs at the grid end with
    slope above the margin the entry is +inf, and entries stay +inf from
    the first such p on.
    """
    if P < 8:
        raise ValueError("need P >= 8")
    y = np.log(config.t_grid())
    phi = w.phi(y)
    keep = np.isfinite(phi)
    y, phi = y[keep], phi[keep]
    if len(y) < 16:
        raise ValueError("weight has too small a finite domain")
    ps = np.arange(P + 1, dtype=float)
    logm, _ = sup_linear_minus_phi(w, ps, y, phi)
    # +inf entries form a terminal segment by monotonicity of the end slope;
    # enforce it anyway to absorb float ties
    inf_seen = False
    for p in range(P + 1):
        if np.isposinf(logm[p]):
            inf_seen = True
        elif inf_seen:
            logm[p] = np.inf
    return LogSequence(logm, name=f"seq[{w.name or w.kind}]",
                       provenance="generated-from-weight")


# -- weight conditions -----------------------------------------------------


def _tail_grid(config: RunConfig, start: float = 1.0,
               cap: float = math.inf) -> np.ndarray:
    t = config.t_grid()
    return t[(t >= start) & (t <= cap)]


def _t_cap(w: WeightFn, config: RunConfig) -> float:
    """Upper end of the trustworthy window (envelope saturation cutoff)."""
    return min(config.t_max, w.saturated_above)


def check_weight_condition(w: WeightFn, cond: str, *,
                           config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Decide one weight-function condition on the configured t-grid.

    Conditions: ``alpha`` (w(2t) <= L(w(t)+1)), ``beta`` (w(t) = O(t^2)),
    ``gamma`` (log t = o(w(t))), ``delta`` (y -> w(e^y) convex), ``omega6``
    (2w(t) <= w(Ht) + H for some H), ``om7`` (w(t^2) = O(w(Ht))), and
    ``omega_nqa`` (integral of w(t)/t^2 converges).
    """
    if cond not in WEIGHT_CONDITIONS:
        raise ValueError(f"unknown condition {cond!r}")
    stability = config.stability
    abs_tol = config.log_tol

    cap = _t_cap(w, config)

    if cond == "alpha":
        t = _tail_grid(config, start=0.01, cap=cap / 2.0)
        ratio = w.omega(2.0 * t) / (w.omega(t) + 1.0)
        v = bounded_above(t, ratio, stability=stability, abs_tol=abs_tol,
                          witness_key="L", detail="sup of w(2t)/(w(t)+1)")
        return v

    if cond == "beta":
        t = _tail_grid(config, cap=cap)
        return bounded_above(t, w.omega(t) / t**2, stability=stability,
                             abs_tol=abs_tol, witness_key="C",
                             detail="sup of w(t)/t^2")

    if cond == "gamma":
        t = _tail_grid(config, start=math.e, cap=cap)
        return grows_without_bound(t, w.omega(t) / np.log(t),
                                   stability=stability, abs_tol=abs_tol,
                                   detail="trend of w(t)/log t")

    if cond == "delta":
        y = np.linspace(math.log(0.01), math.log(cap), 4096)
        ph = w.phi(y)
        d2 = ph[2:] - 2.0 * ph[1:-1] + ph[:-2]
        win = {"x_min": float(y[0]), "x_max": float(y[-1]), "count": len(y)}
        bad = d2 < -1e-9
        if bad.any():
            i = int(np.argmax(bad)) + 1
            return Verdict(Status.FAILS,
                           counterexample={"y": float(y[i]),
                                           "second_difference": float(d2[i - 1])},
                           window=win, detail="phi is not convex")
        return Verdict(Status.HOLDS,
                       witness={"min_second_difference": float(d2.min())},
                       window=win)

    if cond == "omega6":
        # additive slack H lets huge H pass vacuously on a finite window,
        # so certification also needs a stable floor for the scale-free
        # margin (w(Ht)+H)/w(t) - 2, and failure is its drift below 0.
        t_all = _tail_grid(config, cap=cap)
        h_max = min(2.0**10, math.sqrt(config.t_max))
        drift_flags = []
        h = 2.0
        while h <= h_max:
            t = t_all[h * t_all <= cap]
            raw = w.omega(h * t) + h - 2.0 * w.omega(t)
            big = w.omega(t) >= 1.0
            if np.count_nonzero(big) < 16:
                h *= 2.0
                continue
            rho = (w.omega(h * t[big]) + h) / w.omega(t[big]) - 2.0
            floor = bounded_below(t[big], rho, stability=stability,
                                  abs_tol=abs_tol, witness_key="floor")
            if float(raw.min()) >= -abs_tol and floor.holds:
                return Verdict(Status.HOLDS,
                               witness={"H": h, "min_margin": float(raw.min())},
                               window={"x_min": float(t[0]),
                                       "x_max": float(t[-1]), "count": len(t)})
            drift_flags.append((h, float(raw.min()),
                                tends_to_minus_inf(t[big], rho).holds))
            h *= 2.0
        if drift_flags and all(d for _, _, d in drift_flags):
            worst = min(drift_flags, key=lambda a: a[1])
            return Verdict(Status.FAILS,
                           counterexample={"best_H": worst[0],
                                           "margin": worst[1]},
                           detail="relative margin collapses for every H")
        return Verdict(Status.INCONCLUSIVE,
                       detail="no H certified on the grid, drift unclear")

    if cond == "om7":
        t_all = _tail_grid(config, start=1.0 + 1e-9)
        t_all = t_all[t_all**2 <= cap]
        statuses = []
        h = 1.0
        while h <= 2.0**6:
            t = t_all[h * t_all <= cap]
            denom = w.omega(h * t)
            good = denom > 0
            if np.count_nonzero(good) < 16:
                h *= 2.0
                continue
            ratio = w.omega(t[good] ** 2) / denom[good]
            v = bounded_above(t[good], ratio, stability=stability,
                              abs_tol=abs_tol, witness_key="C")
            if v.holds:
                witness = dict(v.witness)
                witness["H"] = h
                return Verdict(Status.HOLDS, witness=witness, window=v.window)
            statuses.append(v.status)
            h *= 2.0
        if statuses and all(s is Status.FAILS for s in statuses):
            return Verdict(Status.FAILS,
                           detail="ratio w(t^2)/w(Ht) grows for every H",
                           counterexample={"H_grid": "1..64"})
        return Verdict(Status.INCONCLUSIVE,
                       detail="no H certified on the grid")

    # omega_nqa
    t = _tail_grid(config, cap=cap)
    return integral_convergence(t, w.omega(t) / t**2,
                                detail="integral of w(t)/t^2 from 1")


def classify_triviality(w: WeightFn, case: str, *,
                        config: RunConfig = DEFAULT_CONFIG) -> str:
    """Nontrivial/trivial/unknown against the critical growth t^2.

    Beurling: w(t)/t^2 -> 0 means nontrivial, liminf > 0 means trivial.
    Roumieu: w(t) = O(t^2) means nontrivial, t^2 = o(w(t)) means trivial.
    """
    if case not in ("Beurling", "Roumieu"):
        raise ValueError("case must be 'Beurling' or 'Roumieu'")
    t = _tail_grid(config, start=math.e, cap=_t_cap(w, config))
    with np.errstate(divide="ignore"):
        log_ratio = np.log(np.maximum(w.omega(t), 1e-300)) - 2.0 * np.log(t)
    stability = config.stability
    abs_tol = config.log_tol
    if case == "Beurling":
        if tends_to_minus_inf(t, log_ratio, stability=stability,
                              abs_tol=abs_tol).holds:
            return "nontrivial"
        if bounded_below(t, log_ratio, stability=stability,
                         abs_tol=abs_tol).holds:
            return "trivial"
        return "unknown"
    if bounded_above(t, log_ratio, stability=stability, abs_tol=abs_tol).holds:
        return "nontrivial"
    if grows_without_bound(t, log_ratio, stability=stability,
                           abs_tol=abs_tol).holds:
        return "trivial"
    return "unknown"
