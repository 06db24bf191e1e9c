r"""Log-domain weight sequences, quotients, and single-sequence conditions.

A weight sequence M = (M_p)_{p>=0} is held exclusively through the natural
logs logm[p] = log M_p; no raw M_p value is ever formed, so sequences like
p!^2 at p = 4096 stay comfortably inside double precision.  The value +inf
is a first-class citizen (it encodes M_p = +inf for the degenerate sequences
recovered from weights that grow too slowly), -inf and NaN are rejected.

Three representations live here:

* :class:`LogSequence` -- a dense array of logs up to a truncation index P.
* :class:`QuotientView` -- the quotient logs log mu_p = logm[p] - logm[p-1]
  with the convention mu_0 = 1.
* :class:`BlockSequence` -- a dense head plus geometric blocks on which
  log mu advances by a constant step per index, supporting closed-form
  evaluation at astronomically large indices via arithmetic-series sums.

The single-sequence regularity conditions (log-convexity, derivation
closedness, moderate growth, the algebra inequality, the (c(p+1))^p lower
bound, root divergence, non-quasianalyticity) are decided on the finite
window with the tri-state semantics of :mod:`ultragrowth.verdicts`.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .config import LOG_TOL, STABILITY
from .verdicts import (
    Status,
    Verdict,
    bounded_above,
    bounded_below,
    grows_without_bound,
    series_summability,
)

__all__ = [
    "LogSequence",
    "QuotientView",
    "Block",
    "BlockSequence",
    "SEQUENCE_CONDITIONS",
    "make_gevrey",
    "quotients",
    "check_sequence_condition",
    "check_LC",
    "eval_block",
]

PROVENANCES = ("explicit", "gevrey", "generated-from-weight", "oscillator")

SEQUENCE_CONDITIONS = (
    "normalized",
    "M1",
    "M2prime",
    "M2",
    "algebra",
    "M0",
    "root_divergence",
    "nonquasianalytic",
)

# conditions that stay meaningful when the sequence has +inf entries
_EXOTIC_CONDITIONS = frozenset({"normalized", "M1"})

# full pairwise scans are O(P^2); beyond this many diagonals the moderate
# growth and algebra scans switch to probe splits (documented below)
_PAIR_SCAN_CAP = 4096


@dataclass(frozen=True)
class LogSequence:
    """Natural logs of a weight sequence M_p for p = 0..P."""

    logm: np.ndarray
    name: str = ""
    provenance: str = "explicit"
    s: float | None = None

    def __post_init__(self) -> None:
        arr = np.array(self.logm, dtype=float)
        if arr.ndim != 1 or len(arr) < 9:
            raise ValueError("a sequence needs entries for p = 0..P with P >= 8")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if np.isnan(arr).any():
            raise ValueError("NaN entries are not sequence values")
        if np.isneginf(arr).any():
            raise ValueError("-inf entries would mean M_p = 0; not a weight sequence")
        if not np.isfinite(arr[0]):
            raise ValueError("M_0 must be finite")
        inf = np.isposinf(arr)
        if inf.any():
            if self.provenance != "generated-from-weight":
                raise ValueError(
                    "+inf entries are reserved for sequences recovered from a weight")
            if not inf[int(np.argmax(inf)):].all():
                raise ValueError("+inf entries must form a terminal segment")
        arr.setflags(write=False)
        object.__setattr__(self, "logm", arr)

    @property
    def truncation(self) -> int:
        """Largest index P carried by the sequence."""
        return len(self.logm) - 1

    @property
    def is_exotic(self) -> bool:
        """True when the tail is +inf (weight-recovery degenerate case)."""
        return bool(np.isposinf(self.logm[-1]))

    @property
    def finite_truncation(self) -> int:
        """Largest index with a finite value."""
        finite = np.isfinite(self.logm)
        return int(np.nonzero(finite)[0][-1])

    def __len__(self) -> int:
        return len(self.logm)

    def __repr__(self) -> str:
        label = self.name or self.provenance
        return f"LogSequence({label}, P={self.truncation})"


@dataclass(frozen=True)
class QuotientView:
    """Quotient logs log mu_p with mu_0 := 1.

    Float subtraction is lossy, so the view keeps the source sequence and
    :meth:`reconstruct` returns it directly; the cumulative sum of logmu is
    only an approximation of the source and is never used to rebuild it.
    """

    logmu: np.ndarray
    source: LogSequence

    def reconstruct(self) -> np.ndarray:
        """The exact logm array the view was derived from."""
        return self.source.logm

    def __len__(self) -> int:
        return len(self.logmu)


def make_gevrey(s: float, P: int) -> LogSequence:
    """The sequence p!^s via the log-gamma function, logm[p] = s*logGamma(p+1)."""
    s = float(s)
    if not (s > 0) or not math.isfinite(s):
        raise ValueError("the exponent s must be a positive real")
    if P < 8:
        raise ValueError("truncation must be at least 8")
    logm = s * gammaln(np.arange(P + 1, dtype=float) + 1.0)
    return LogSequence(logm, name=f"G^{s:g}", provenance="gevrey", s=s)


def quotients(M: LogSequence) -> QuotientView:
    """Quotient view with logmu[p] = logm[p] - logm[p-1] and logmu[0] = 0.

    Wherever logm[p] = +inf the quotient is +inf as well (this covers the
    inf - inf gaps inside the degenerate tail).
    """
    logm = M.logm
    with np.errstate(invalid="ignore"):
        d = np.diff(logm)
    tail_inf = np.isposinf(logm[1:])
    if tail_inf.any():
        d = np.where(tail_inf, np.inf, d)
    logmu = np.concatenate(([0.0], d))
    logmu.setflags(write=False)
    return QuotientView(logmu, M)


# ---------------------------------------------------------------------------
# pairwise scans (moderate growth and the algebra inequality)
# ---------------------------------------------------------------------------


def _diagonal_extrema(logm: np.ndarray, kmax: int):
    """Min and max of logm[p] + logm[k-p] over 1 <= p <= k-1 for each k."""
    ks = np.arange(2, kmax + 1)
    mn = np.empty(len(ks))
    mx = np.empty(len(ks))
    for i in range(len(ks)):
        k = i + 2
        s = logm[1:k] + logm[k - 1:0:-1]
        mn[i] = s.min()
        mx[i] = s.max()
    return ks, mn, mx


def _probe_splits(P: int, cap: int) -> np.ndarray:
    """Log-spaced diagonal indices in (cap, P] for the probe regime."""
    count = min(256, P - cap)
    ks = np.unique(np.geomspace(cap + 1, P, count).astype(np.int64))
    return ks


def _check_m2(M: LogSequence, stability: float, abs_tol: float) -> Verdict:
    """Moderate growth M_{p+q} <= C^{p+q} M_p M_q, decided by two routes.

    Route 1 scans pair sums directly (every diagonal up to the cap, then
    balanced splits p = floor(k/2) on log-spaced larger diagonals).  Route 2
    checks the quotient criterion mu_p <= A (M_p)^{1/p}, which is equivalent
    for log-convex sequences.  The verdict is only decisive when both routes
    agree; a split decision is reported as inconclusive.
    """
    logm = M.logm
    P = M.truncation
    kmax = min(P, _PAIR_SCAN_CAP)
    ks, mn, _ = _diagonal_extrema(logm, kmax)
    v = (logm[ks] - mn) / ks
    if P > kmax:
        extra = _probe_splits(P, kmax)
        lo = extra // 2
        v_extra = (logm[extra] - logm[lo] - logm[extra - lo]) / extra
        ks = np.concatenate([ks, extra])
        v = np.concatenate([v, v_extra])
    direct = bounded_above(ks, v, stability=stability, abs_tol=abs_tol,
                           witness_key="log_C",
                           detail="pair scan of logm[p+q] - logm[p] - logm[q]")

    x = np.arange(1, P + 1, dtype=float)
    logmu = quotients(M).logmu
    quot = bounded_above(x, logmu[1:] - logm[1:] / x,
                         stability=stability, abs_tol=abs_tol,
                         witness_key="log_A",
                         detail="quotient criterion mu_p <= A (M_p)^{1/p}")

    if direct.status is not quot.status:
        return Verdict(
            Status.INCONCLUSIVE,
            witness={"pair_scan": direct.status.value,
                     "quotient_criterion": quot.status.value},
            window=direct.window,
            detail=(f"routes disagree: pair scan {direct.status}, "
                    f"quotient criterion {quot.status}"),
        )
    if direct.status is Status.HOLDS:
        log_c = direct.witness["log_C"]
        log_a = quot.witness["log_A"]
        return Verdict(
            Status.HOLDS,
            witness={"C": math.exp(log_c), "log_C": log_c,
                     "A": math.exp(log_a), "log_A": log_a},
            window=direct.window,
            detail="pair scan and quotient criterion agree",
        )
    return Verdict(direct.status, counterexample=direct.counterexample,
                   window=direct.window,
                   detail="pair scan and quotient criterion agree")


def _check_algebra(M: LogSequence, abs_tol: float) -> Verdict:
    """The inequality M_p * M_q <= M_{p+q} on all scanned pairs."""
    logm = M.logm
    P = M.truncation
    kmax = min(P, _PAIR_SCAN_CAP)
    ks, _, mx = _diagonal_extrema(logm, kmax)
    margins = logm[ks] - mx
    i = int(np.argmin(margins))
    worst_margin = float(margins[i])
    worst_k = int(ks[i])
    if P > kmax:
        # probe larger diagonals at a bundle of unbalanced and balanced splits
        extra = _probe_splits(P, kmax)
        splits = [np.full(extra.shape, p0, dtype=np.int64) for p0 in range(1, 33)]
        splits.append(extra // 2)
        for ps in splits:
            m = logm[extra] - logm[ps] - logm[extra - ps]
            i = int(np.argmin(m))
            if float(m[i]) < worst_margin:
                worst_margin = float(m[i])
                worst_k = int(extra[i])
    win = {"x_min": 2.0, "x_max": float(min(P, max(worst_k, kmax))), "count": len(ks)}
    if worst_margin >= -abs_tol:
        return Verdict(Status.HOLDS, witness={"min_margin": worst_margin},
                       window=win)
    # recover the offending split for the counterexample
    k = worst_k
    s = logm[1:k] + logm[k - 1:0:-1]
    p = int(np.argmax(s)) + 1
    return Verdict(
        Status.FAILS,
        counterexample={"p": p, "q": k - p, "deficit": float(logm[k] - s[p - 1])},
        window=win,
        detail="product exceeds the shifted entry",
    )


# ---------------------------------------------------------------------------
# condition dispatch
# ---------------------------------------------------------------------------


def check_sequence_condition(M: LogSequence, cond: str, *,
                             stability: float = STABILITY,
                             abs_tol: float = LOG_TOL) -> Verdict:
    """Decide one single-sequence regularity condition on the window [1, P].

    Conditions: ``normalized`` (1 = M_0 <= M_1), ``M1`` (log-convexity),
    ``M2prime`` (M_{p+1} <= D^{p+1} M_p), ``M2`` (moderate growth),
    ``algebra`` (M_p M_q <= M_{p+q}), ``M0`` ((c(p+1))^p <= M_p),
    ``root_divergence`` ((M_p)^{1/p} -> inf), ``nonquasianalytic``
    (sum 1/mu_p < inf).  Sequences with +inf entries admit only
    ``normalized`` and ``M1``; anything else raises.
    """
    if cond not in SEQUENCE_CONDITIONS:
        raise ValueError(f"unknown condition {cond!r}")
    if M.is_exotic and cond not in _EXOTIC_CONDITIONS:
        raise ValueError(
            f"condition {cond!r} is undefined for sequences with +inf entries")

    logm = M.logm
    P = M.truncation

    if cond == "normalized":
        win = {"x_min": 0.0, "x_max": 1.0, "count": 2}
        if abs(logm[0]) > abs_tol:
            return Verdict(Status.FAILS,
                           counterexample={"p": 0, "logm": float(logm[0])},
                           window=win, detail="M_0 differs from 1")
        if logm[1] < -abs_tol:
            return Verdict(Status.FAILS,
                           counterexample={"p": 1, "logm": float(logm[1])},
                           window=win, detail="M_1 below M_0 = 1")
        return Verdict(Status.HOLDS,
                       witness={"logm0": float(logm[0]), "logm1": float(logm[1])},
                       window=win)

    logmu = quotients(M).logmu

    if cond == "M1":
        # quotients must be nondecreasing from p = 1 on; +inf plateaus count
        # as nondecreasing
        with np.errstate(invalid="ignore"):
            steps = logmu[2:] - logmu[1:-1]
            ok = (steps >= -abs_tol) | np.isposinf(logmu[2:])
        win = {"x_min": 1.0, "x_max": float(P), "count": P}
        if ok.all():
            finite = np.isfinite(steps)
            least = float(steps[finite].min()) if finite.any() else math.inf
            return Verdict(Status.HOLDS, witness={"min_step": least}, window=win)
        p = int(np.argmin(ok)) + 1
        return Verdict(
            Status.FAILS,
            counterexample={"p": p, "logmu_p": float(logmu[p]),
                            "logmu_next": float(logmu[p + 1])},
            window=win, detail="quotient sequence decreases",
        )

    x = np.arange(1, P + 1, dtype=float)

    if cond == "M2prime":
        v = bounded_above(x, logmu[1:] / x, stability=stability,
                          abs_tol=abs_tol, witness_key="log_D",
                          detail="sup of logmu[p]/p")
        if v.holds:
            log_d = v.witness["log_D"]
            witness = dict(v.witness)
            witness["D"] = math.exp(log_d)
            return Verdict(v.status, witness=witness, window=v.window,
                           detail=v.detail)
        return v

    if cond == "M2":
        return _check_m2(M, stability, abs_tol)

    if cond == "algebra":
        return _check_algebra(M, abs_tol)

    if cond == "M0":
        v = bounded_below(x, logm[1:] / x - np.log(x + 1.0),
                          stability=stability, abs_tol=abs_tol,
                          witness_key="log_c",
                          detail="inf of logm[p]/p - log(p+1)")
        if v.holds:
            witness = dict(v.witness)
            witness["c"] = math.exp(witness["log_c"])
            return Verdict(v.status, witness=witness, window=v.window,
                           detail=v.detail)
        return v

    if cond == "root_divergence":
        return grows_without_bound(x, logm[1:] / x, stability=stability,
                                   abs_tol=abs_tol,
                                   detail="trend of logm[p]/p")

    # nonquasianalytic
    terms = np.exp(-logmu[1:])
    return series_summability(x, terms, detail="sum of 1/mu_p")


def check_LC(M: LogSequence) -> Verdict:
    """Membership in the base class: normalized + log-convex + (M_p)^{1/p} -> inf."""
    parts = {
        "normalized": check_sequence_condition(M, "normalized"),
        "M1": check_sequence_condition(M, "M1"),
        "root_divergence": check_sequence_condition(M, "root_divergence"),
    }
    detail = ", ".join(f"{k}={v.status}" for k, v in parts.items())
    for key, v in parts.items():
        if v.status is Status.FAILS:
            return Verdict(Status.FAILS, counterexample={key: v.counterexample},
                           window=v.window, detail=detail)
    for key, v in parts.items():
        if v.status is Status.INCONCLUSIVE:
            return Verdict(Status.INCONCLUSIVE, window=v.window, detail=detail)
    witness = {k: v.witness for k, v in parts.items() if v.witness}
    return Verdict(Status.HOLDS, witness=witness or None, detail=detail)


# ---------------------------------------------------------------------------
# block-encoded sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    """Quotient ramp: for start < p <= end, logmu[p] = logmu[start] + (p-start)*log_beta."""

    start: int
    end: int
    log_beta: float

    def __post_init__(self) -> None:
        if self.end <= self.start:
            raise ValueError("block must cover at least one index")
        if not math.isfinite(self.log_beta):
            raise ValueError("block step must be finite")


def _int_float(n: int) -> float:
    # Python int -> nearest double; exact below 2^53, relative 2^-53 above,
    # plenty for log-domain closed forms
    return float(n)


@dataclass(frozen=True)
class BlockSequence:
    """A dense head plus quotient-ramp blocks reaching astronomical indices.

    The head is authoritative on [0, head.truncation]; beyond it, evaluation
    uses the arithmetic-series closed form anchored at block starts.  Counts
    are held as unbounded Python ints, magnitudes as doubles.
    """

    head: LogSequence
    blocks: tuple
    anchors: tuple = ()

    def __post_init__(self) -> None:
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValueError("need at least one block")
        for a, b in zip(blocks, blocks[1:]):
            if b.start != a.end:
                raise ValueError("blocks must tile contiguously")
        first = blocks[0].start
        if first > self.head.truncation:
            raise ValueError("head must reach the first block start")
        if first < 1:
            raise ValueError("blocks start at index >= 1")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "anchors", tuple(self.anchors))

        head_mu = quotients(self.head).logmu
        object.__setattr__(self, "_head_logmu", head_mu)
        # closed-form state (log mu, log M) at each block start
        mu = float(head_mu[first])
        mv = float(self.head.logm[first])
        mus = [mu]
        Ms = [mv]
        starts = []
        for blk in blocks:
            starts.append(blk.start)
            n = blk.end - blk.start
            nf = _int_float(n)
            tri = _int_float(n * (n + 1) // 2)
            mv = mv + nf * mu + blk.log_beta * tri
            mu = mu + nf * blk.log_beta
            mus.append(mu)
            Ms.append(mv)
        object.__setattr__(self, "_starts", starts)
        object.__setattr__(self, "_mu_at_start", mus)
        object.__setattr__(self, "_M_at_start", Ms)

    @property
    def coverage_end(self) -> int:
        """Largest index reachable by closed-form evaluation."""
        return self.blocks[-1].end

    def eval(self, p: int):
        """(log mu_p, log M_p); head values verbatim, closed form beyond."""
        if p < 0:
            raise IndexError("negative index")
        if p <= self.head.truncation:
            return float(self._head_logmu[p]), float(self.head.logm[p])
        return self._closed(p)

    def eval_closed(self, p: int):
        """(log mu_p, log M_p) by block arithmetic even inside the head.

        The materialized head accumulates one rounding per index; landing
        checks at block-scale indices need the drift-free closed form.
        """
        if p < self.blocks[0].start:
            return self.eval(p)
        return self._closed(p)

    def _closed(self, p: int):
        if p > self.coverage_end:
            raise IndexError(f"index {p} beyond block coverage {self.coverage_end}")
        i = bisect_right(self._starts, p) - 1
        blk = self.blocks[i]
        k = p - blk.start
        kf = _int_float(k)
        tri = _int_float(k * (k + 1) // 2)
        mu0 = self._mu_at_start[i]
        logmu = mu0 + kf * blk.log_beta
        logM = self._M_at_start[i] + kf * mu0 + blk.log_beta * tri
        return logmu, logM


def eval_block(M: BlockSequence, p: int):
    """(log mu_p, log M_p) at any covered index, however large."""
    return M.eval(p)
