r"""Growth relations between sequences and between weight functions.

The sequence relations compare root-normalized ratios r_p =
(log M_p - log N_p)/p: domination (some C^p absorbs the ratio), strict
smallness (r_p drifts to -inf), and two-sided equivalence.  The weight
relations compare v(t)/w(t) on the shared grid tail.  A transfer
cross-check recomputes sequence domination through the associated
functions, and an oscillation probe scores liminf/limsup behavior at a
ladder of anchor indices, which is the only honest way to exhibit
incomparability evidence that lives beyond any materializable window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .seqcore import BlockSequence, LogSequence, eval_block, check_LC
from .assocfn import WeightFn, associated, _t_cap
from .verdicts import (
    Status,
    Verdict,
    _jsonable,
    bounded_above,
    combine,
    tends_to_minus_inf,
)

__all__ = [
    "RelationReport",
    "SEQ_RELATIONS",
    "WF_RELATIONS",
    "seq_relate",
    "wf_relate",
    "crosscheck_transfer",
    "oscillation_probe",
]

SEQ_RELATIONS = ("preceq", "triangleleft", "equiv")
WF_RELATIONS = ("preceq", "triangleleft", "sim")

_TRACE_CAP = 4097


@dataclass(frozen=True)
class RelationReport:
    """Outcome of one relation check plus the sampled evidence."""

    relation: str
    verdict: Verdict
    ratio_trace: tuple = field(default_factory=tuple)
    liminf_est: float = math.nan
    limsup_est: float = math.nan

    def __post_init__(self) -> None:
        lo, hi = self.liminf_est, self.limsup_est
        if not (math.isnan(lo) or math.isnan(hi)) and lo > hi:
            raise ValueError("liminf estimate exceeds limsup estimate")

    @property
    def holds(self) -> bool:
        return self.verdict.holds

    def to_json(self) -> dict:
        return {
            "relation": self.relation,
            "verdict": self.verdict.to_json(),
            "ratio_trace": [[_jsonable(x), _jsonable(r)]
                            for x, r in self.ratio_trace],
            "liminf_est": _jsonable(self.liminf_est),
            "limsup_est": _jsonable(self.limsup_est),
        }


def _log_indices(lo: int, hi: int, cap: int = _TRACE_CAP) -> np.ndarray:
    """Distinct integers covering [lo, hi] roughly uniformly in log scale."""
    if hi < lo:
        return np.array([], dtype=np.int64)
    raw = np.geomspace(lo, hi, min(cap, hi - lo + 1))
    return np.unique(np.round(raw).astype(np.int64))


def _ratio_series(M: LogSequence, N: LogSequence):
    P = min(M.finite_truncation, N.finite_truncation)
    p = _log_indices(1, P)
    r = (M.logm[p] - N.logm[p]) / p
    return p.astype(float), r


def _estimates(r: np.ndarray):
    """liminf/limsup estimates of (M_p/N_p)^{1/p} from the sampled tail."""
    if len(r) == 0:
        return math.nan, math.nan
    tail = r[len(r) // 2:]
    return float(np.exp(np.min(tail))), float(np.exp(np.max(tail)))


def seq_relate(M: LogSequence, N: LogSequence,
               rel: str = "preceq") -> RelationReport:
    """Decide M against N on the shared finite window.

    ``preceq``: M_p <= C^p N_p for a stable C = exp(sup r_p).
    ``triangleleft``: (M_p/N_p)^{1/p} -> 0, i.e. r_p drifts to -inf.
    ``equiv``: preceq in both directions.
    """
    if rel not in SEQ_RELATIONS:
        raise ValueError(f"unknown sequence relation {rel!r}")
    p, r = _ratio_series(M, N)
    lo, hi = _estimates(r)
    trace = tuple(zip(p.tolist(), r.tolist()))
    if rel == "preceq":
        v = bounded_above(p, r, witness_key="log_C")
        if v.holds:
            witness = dict(v.witness)
            witness["C"] = float(np.exp(witness["log_C"]))
            v = Verdict(v.status, witness=witness, window=v.window,
                        detail=v.detail)
        return RelationReport("preceq", v, trace, lo, hi)
    if rel == "triangleleft":
        v = tends_to_minus_inf(p, r, detail="root ratio drift")
        return RelationReport("triangleleft", v, trace, lo, hi)
    fwd = seq_relate(M, N, "preceq")
    bwd = seq_relate(N, M, "preceq")
    v = combine(fwd.verdict, bwd.verdict, detail="preceq both ways")
    if v.holds:
        v = Verdict(Status.HOLDS,
                    witness={"C_forward": fwd.verdict.witness["C"],
                             "C_backward": bwd.verdict.witness["C"]},
                    window=fwd.verdict.window, detail=v.detail)
    return RelationReport("equiv", v, trace, lo, hi)


def wf_relate(w: WeightFn, v: WeightFn, rel: str = "preceq",
              config: RunConfig = DEFAULT_CONFIG) -> RelationReport:
    """Decide w against v through the ratio v(t)/w(t) on the grid tail.

    ``preceq``: v(t) = O(w(t)); ``triangleleft``: v(t) = o(w(t));
    ``sim``: O in both directions.
    """
    if rel not in WF_RELATIONS:
        raise ValueError(f"unknown weight relation {rel!r}")
    cap = min(_t_cap(w, config), _t_cap(v, config))
    t = config.t_grid()
    t = t[(t >= math.e) & (t <= cap)]
    wt, vt = w.omega(t), v.omega(t)
    if len(t) == 0 or float(np.max(wt)) <= 0.0:
        return RelationReport(rel, Verdict(
            Status.INCONCLUSIVE, detail="first weight vanishes on the tail"))
    good = wt > 0
    t, wt, vt = t[good], wt[good], vt[good]
    ratio = vt / wt
    step = max(1, len(t) // _TRACE_CAP)
    trace = tuple(zip(t[::step].tolist(), ratio[::step].tolist()))
    tail = ratio[len(ratio) // 2:]
    lo, hi = float(np.min(tail)), float(np.max(tail))
    if rel == "preceq":
        verdict = bounded_above(t, ratio, witness_key="C",
                                detail="sup of v(t)/w(t)")
        return RelationReport("preceq", verdict, trace, lo, hi)
    if rel == "triangleleft":
        with np.errstate(divide="ignore"):
            verdict = tends_to_minus_inf(t, np.log(np.maximum(ratio, 0.0)),
                                         detail="log of v(t)/w(t)")
        return RelationReport("triangleleft", verdict, trace, lo, hi)
    fwd = bounded_above(t, ratio, witness_key="C", detail="v/w")
    with np.errstate(divide="ignore"):
        bwd = bounded_above(t, np.where(ratio > 0, 1.0 / ratio, np.inf),
                            witness_key="C", detail="w/v")
    verdict = combine(fwd, bwd, detail="bounded both ways")
    if verdict.holds:
        verdict = Verdict(Status.HOLDS,
                          witness={"C_forward": fwd.witness["C"],
                                   "C_backward": bwd.witness["C"]},
                          window=fwd.window, detail=verdict.detail)
    return RelationReport("sim", verdict, trace, lo, hi)


def _transfer_side(M: LogSequence, N: LogSequence, *,
                   scales, config: RunConfig) -> Verdict:
    """Search A, B with omega_N(t) <= omega_M(A t) + B on the grid.

    A shift B absorbs any interior hump of d(t) = omega_N(t) -
    omega_M(At), so only an ascent into the window end disqualifies a
    scale: the last geometric quarter must not rise above the rest by
    more than one unit plus the stability fraction.  Scales other than
    1 are admissible only when the shifted envelope keeps a factor two of
    data headroom beyond the scale, which blocks vacuous certificates
    from windows the scale itself exhausted.
    """
    wM, wN = associated(M), associated(N)
    sat_ratio = wM.saturated_above / wN.saturated_above
    t_all = config.t_grid()
    evaluated, middling = 0, 0
    worst = None
    for A in scales:
        if A != 1.0 and 2.0 * A > sat_ratio:
            continue
        cap = min(_t_cap(wN, config), _t_cap(wM, config) / A)
        t = t_all[t_all <= cap]
        if len(t) < 16:
            continue
        evaluated += 1
        d = wN.omega(t) - wM.omega(A * t)
        quarter = t >= t[0] * (t[-1] / t[0]) ** 0.75
        body = d[~quarter]
        b_cand = float(np.max(body)) if len(body) else float(d[0])
        end_max = float(np.max(d[quarter]))
        margin = max(1.0, config.stability * max(abs(b_cand), abs(end_max)))
        excess = end_max - b_cand
        if excess <= margin:
            return Verdict(Status.HOLDS,
                           witness={"A": float(A),
                                    "B": max(0.0, float(np.max(d)))},
                           window={"x_min": float(t[0]), "x_max": float(t[-1]),
                                   "count": len(t)})
        if excess <= 2.0 * margin:
            middling += 1
        if worst is None or excess > worst[1]:
            worst = (float(A), excess)
    if evaluated == 0:
        return Verdict(Status.INCONCLUSIVE,
                       detail="no admissible scale with a usable window")
    if middling:
        return Verdict(Status.INCONCLUSIVE,
                       detail="end ascent inside the stability band")
    return Verdict(Status.FAILS,
                   counterexample={"A": worst[0], "end_excess": worst[1]},
                   detail="every admissible scale ends ascending")


def crosscheck_transfer(M: LogSequence, N: LogSequence,
                        config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Check M preceq N through two independent routes and compare.

    Route one is the direct ratio decision, route two searches scales A
    and shifts B with omega_N(t) <= omega_M(A t) + B.  Agreement (both
    affirm or both deny) is the holding state; a split decision fails;
    an open verdict on either side leaves the cross-check open.
    """
    for S, tag in ((M, "first"), (N, "second")):
        if not check_LC(S).holds:
            raise ValueError(f"{tag} sequence is not LC-certified")
    direct = seq_relate(M, N, "preceq").verdict
    transfer = _transfer_side(M, N, scales=(1.0, 2.0, 4.0, 8.0),
                              config=config)
    detail = (f"direct={direct.status.value}, "
              f"transfer={transfer.status.value}")
    if Status.INCONCLUSIVE in (direct.status, transfer.status):
        return Verdict(Status.INCONCLUSIVE, detail=detail)
    if direct.status is transfer.status:
        witness = {"agreement": direct.status.value}
        if transfer.witness:
            witness.update({k: transfer.witness[k]
                            for k in ("A", "B") if k in transfer.witness})
        if direct.holds and direct.witness:
            witness["C"] = direct.witness["C"]
        return Verdict(Status.HOLDS, witness=witness, detail=detail)
    return Verdict(Status.FAILS,
                   counterexample={"direct": direct.status.value,
                                   "transfer": transfer.status.value},
                   detail="routes disagree: " + detail)


def _log_n_at(N, p: int) -> float:
    """log N_p at a possibly astronomical index."""
    if callable(N):
        return float(N(p))
    if isinstance(N, LogSequence):
        if N.s is not None:
            return float(N.s) * math.lgamma(float(p) + 1.0)
        if p <= N.truncation:
            return float(N.logm[p])
        raise IndexError(f"index {p} beyond truncation without a closed form")
    raise TypeError("target must be a LogSequence or a callable p -> log N_p")


def _log_nu_at(N, p: int) -> float:
    """log of the p-th quotient of N at a possibly astronomical index."""
    if isinstance(N, LogSequence) and N.s is not None:
        return float(N.s) * math.log(float(p))
    return _log_n_at(N, p) - _log_n_at(N, p - 1)


def oscillation_probe(M, N, anchors=None) -> RelationReport:
    """Score oscillation of M around N across an anchor ladder.

    The proxy d_j = log mu(k_j) - log nu(k_j) is exact at anchors even
    when the true ratio r_p cannot be materialized.  The probe holds when
    the running maximum over odd-position anchors improves at least twice
    and the running minimum over even-position anchors improves at least
    twice: records on both sides keep breaking, which is the observable
    trace of liminf 0 and limsup +inf.  Estimates report exp of the true
    r at the anchors.
    """
    if anchors is None:
        if isinstance(M, BlockSequence):
            anchors = M.anchors
        else:
            anchors = tuple(int(p) for p in _log_indices(2, M.truncation, 64))
    anchors = tuple(int(a) for a in anchors)
    if len(anchors) < 4:
        return RelationReport("incomparable-probe", Verdict(
            Status.INCONCLUSIVE, detail="fewer than 4 usable anchors"))

    d_vals, r_vals = [], []
    for k in anchors:
        if isinstance(M, BlockSequence):
            log_mu, log_m = eval_block(M, k)
        else:
            if k > M.finite_truncation or k < 1:
                raise IndexError(f"anchor {k} outside the finite window")
            log_mu = float(M.logm[k] - M.logm[k - 1])
            log_m = float(M.logm[k])
        d_vals.append(log_mu - _log_nu_at(N, k))
        r_vals.append((log_m - _log_n_at(N, k)) / k)

    odd = d_vals[0::2]
    even = d_vals[1::2]
    tol = 1e-12
    max_improvements = sum(
        1 for i in range(1, len(odd)) if odd[i] > max(odd[:i]) + tol)
    min_improvements = sum(
        1 for i in range(1, len(even)) if even[i] < min(even[:i]) - tol)
    trace = tuple(zip(map(float, anchors), r_vals))
    lo = float(np.exp(min(r_vals)))
    hi = float(np.exp(max(r_vals)))
    window = {"anchors": len(anchors), "first": float(anchors[0]),
              "last": float(anchors[-1])}
    detail = (f"record improvements: {max_improvements} up, "
              f"{min_improvements} down")
    if max_improvements >= 2 and min_improvements >= 2:
        verdict = Verdict(Status.HOLDS,
                          witness={"up_records": max_improvements,
                                   "down_records": min_improvements,
                                   "d_first": d_vals[0],
                                   "d_last": d_vals[-1]},
                          window=window, detail=detail)
    else:
        verdict = Verdict(Status.FAILS,
                          counterexample={"up_records": max_improvements,
                                          "down_records": min_improvements},
                          window=window, detail=detail)
    return RelationReport("incomparable-probe", verdict, trace, lo, hi)
