r"""Weight matrices: the data model, regularity conditions, and relations.

A weight matrix is an ordered family of log sequences indexed by a
positive level, nondecreasing in the level at every index.  Conditions
come in paired flavors: the Roumieu forms search a witness level above
the given one, the Beurling forms below it.  Every two-index condition
collapses to the boundedness of a normalized excess

    F(k) = (left-hand side on a split of k  -  right-hand side at k) / k

over diagonals p + q = k, which reuses the stability machinery: fitted
constants are exponentials of the stable sup.  Quantifiers over levels
resolve against the finite grid and verdicts are grid-relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .seqcore import LogSequence, check_LC, check_sequence_condition
from .relations import seq_relate
from .verdicts import Status, Verdict, bounded_above, combine

__all__ = [
    "WeightMatrix",
    "MATRIX_CONDITIONS",
    "constant_matrix",
    "check_matrix_condition",
    "relate_matrices",
    "matrix_nqa",
]

MATRIX_CONDITIONS = ("c12L2R", "c37LR", "M2primeR", "M2R",
                     "c12L2B", "c37LB", "M2primeB", "M2B",
                     "beurling_square", "monotone", "constant",
                     "standard_log_convex")

_TOL = 1e-9


@dataclass(frozen=True)
class WeightMatrix:
    """Ordered family of log sequences, nondecreasing in the level."""

    entries: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("a weight matrix needs at least one level")
        levels = sorted(float(lam) for lam in self.entries)
        if any(lam <= 0 for lam in levels):
            raise ValueError("levels must be positive")
        ordered = {lam: self.entries[lam] for lam in levels}
        object.__setattr__(self, "entries", ordered)
        P = None
        for lam, seq in ordered.items():
            if not isinstance(seq, LogSequence):
                raise TypeError("matrix entries must be LogSequence values")
            if P is None:
                P = seq.truncation
            elif seq.truncation != P:
                raise ValueError("entries must share one truncation")
            if abs(seq.logm[0]) > _TOL:
                raise ValueError(f"entry at level {lam:g} has logm[0] != 0")
        prev = None
        for lam, seq in ordered.items():
            if prev is not None:
                with np.errstate(invalid="ignore"):
                    drop = prev.logm - seq.logm
                drop = drop[np.isfinite(drop)]
                if len(drop) and float(np.max(drop)) > _TOL:
                    raise ValueError(
                        f"entries decrease between levels below {lam:g}")
            prev = seq

    @property
    def lambdas(self) -> tuple:
        return tuple(self.entries)

    @property
    def truncation(self) -> int:
        return next(iter(self.entries.values())).truncation

    def entry(self, lam: float) -> LogSequence:
        return self.entries[float(lam)]

    def __repr__(self) -> str:
        lams = ", ".join(f"{lam:g}" for lam in self.entries)
        return f"WeightMatrix({self.name or 'matrix'}; levels {lams})"


def constant_matrix(S: LogSequence, lambdas,
                    name: str = "") -> WeightMatrix:
    """The matrix holding the same sequence at every level."""
    return WeightMatrix({float(lam): S for lam in lambdas},
                        name=name or f"const[{S.name or 'seq'}]")


# -- diagonal scans ---------------------------------------------------------


def _half_log_power(P: int) -> np.ndarray:
    """g(p) = (p/2) log p, the isotropic trace of the p^{p/2} factor."""
    p = np.arange(P + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = 0.5 * p * np.log(p)
    g[0] = 0.0
    return g


def _split_sup_series(g: np.ndarray, h: np.ndarray, right: np.ndarray):
    """F(k) = (max_{p+q=k} g[p] + h[q]  -  right[k]) / k per diagonal."""
    P = len(right) - 1
    ks, vals = [], []
    for k in range(1, P + 1):
        rk = right[k]
        if np.isposinf(rk):
            continue
        p = np.arange(0, k + 1)
        with np.errstate(invalid="ignore"):
            lhs = g[p] + h[k - p]
        lhs = lhs[~np.isnan(lhs)]
        if not len(lhs):
            continue
        ks.append(float(k))
        vals.append((float(np.max(lhs)) - rk) / k)
    return np.asarray(ks), np.asarray(vals)


def _merge_sup_series(left: np.ndarray, right: np.ndarray):
    """F(k) = (left[k] - min_{p+q=k} right[p] + right[q]) / k per diagonal."""
    P = len(left) - 1
    ks, vals = [], []
    for k in range(2, P + 1):
        lk = left[k]
        p = np.arange(1, k)
        with np.errstate(invalid="ignore"):
            rhs = right[p] + right[k - p]
        rhs = rhs[~np.isnan(rhs)]
        mn = float(np.min(rhs)) if len(rhs) else math.inf
        if np.isposinf(lk) and np.isposinf(mn):
            continue
        ks.append(float(k))
        vals.append((lk - mn) / k)
    return np.asarray(ks), np.asarray(vals)


def _shift_series(left: np.ndarray, right: np.ndarray):
    """F(p) = (left[p+1] - right[p]) / (p+1)."""
    P = len(left) - 1
    p = np.arange(0, P)
    with np.errstate(invalid="ignore"):
        v = (left[p + 1] - right[p]) / (p + 1)
    keep = ~np.isnan(v)
    return (p[keep] + 1).astype(float), v[keep]


def _square_series(small: np.ndarray, big: np.ndarray):
    """F(p) = (2 small[p] - big[p]) / p."""
    P = len(small) - 1
    p = np.arange(1, P + 1)
    with np.errstate(invalid="ignore"):
        v = (2.0 * small[p] - big[p]) / p
    keep = ~np.isnan(v)
    return p[keep].astype(float), v[keep]


_PAIRWISE = {
    "c12L2R": ("R", "split"), "c37LR": ("R", "pair"),
    "M2primeR": ("R", "shift"), "M2R": ("R", "merge"),
    "c12L2B": ("B", "split"), "c37LB": ("B", "pair"),
    "M2primeB": ("B", "shift"), "M2B": ("B", "merge"),
    "beurling_square": ("B", "square"),
}


def _condition_series(kind: str, small: np.ndarray, big: np.ndarray,
                      half_power: np.ndarray):
    # the level searched by the quantifier always sits on the large side
    if kind == "split":
        return _split_sup_series(half_power, small, big)
    if kind == "pair":
        return _split_sup_series(small, small, big)
    if kind == "shift":
        return _shift_series(small, big)
    if kind == "merge":
        return _merge_sup_series(small, big)
    return _square_series(small, big)


def _fit_slack_per_factor(small, big, half_power, log_h, factors):
    """Fitted log B per fixed C for the split condition with H frozen."""
    P = len(big) - 1
    out = {}
    for c in factors:
        log_c = math.log(c)
        best = -math.inf
        for k in range(1, P + 1):
            rk = big[k]
            if np.isposinf(rk):
                continue
            p = np.arange(0, k + 1)
            with np.errstate(invalid="ignore"):
                lhs = half_power[p] + small[k - p] - p * log_c
            lhs = lhs[~np.isnan(lhs)]
            if len(lhs):
                best = max(best, float(np.max(lhs)) - rk - k * log_h)
        out[f"{c:g}"] = float(best)
    return out


def check_matrix_condition(M: WeightMatrix, cond: str, *,
                           config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Decide one matrix condition with grid-relative level quantifiers."""
    if cond not in MATRIX_CONDITIONS:
        raise ValueError(f"unknown matrix condition {cond!r}")
    lams = list(M.lambdas)

    if cond == "monotone":
        worst = math.inf
        for lo, hi in zip(lams, lams[1:]):
            with np.errstate(invalid="ignore"):
                gap = M.entry(hi).logm - M.entry(lo).logm
            gap = gap[np.isfinite(gap)]
            if len(gap):
                m = float(np.min(gap))
                if m < worst:
                    worst = m
                if m < -_TOL:
                    p = int(np.argmin(gap))
                    return Verdict(Status.FAILS,
                                   counterexample={"lambda": lo, "kappa": hi,
                                                   "at": p, "drop": m})
        return Verdict(Status.HOLDS, witness={"min_gap": worst})

    if cond == "constant":
        if len(lams) == 1:
            return Verdict(Status.HOLDS, witness={"C": 1.0})
        worst_c = 1.0
        verdicts = []
        for lo, hi in zip(lams, lams[1:]):
            rep = seq_relate(M.entry(hi), M.entry(lo), "equiv")
            verdicts.append(rep.verdict)
            if rep.verdict.holds:
                worst_c = max(worst_c, rep.verdict.witness["C_forward"],
                              rep.verdict.witness["C_backward"])
        v = combine(*verdicts, detail="adjacent levels equivalent")
        if v.holds:
            return Verdict(Status.HOLDS, witness={"C": worst_c})
        return v

    if cond == "standard_log_convex":
        verdicts = []
        for lam in lams:
            v = check_LC(M.entry(lam))
            if not v.holds:
                detail = f"level {lam:g}: {v.detail}"
                return Verdict(v.status, counterexample=v.counterexample,
                               detail=detail)
            verdicts.append(v)
        return Verdict(Status.HOLDS, witness={"levels": len(lams)})

    direction, kind = _PAIRWISE[cond]
    half_power = _half_log_power(M.truncation)
    table = {}
    for lam in lams:
        if direction == "R":
            candidates = [k for k in lams if k >= lam]
        else:
            candidates = [k for k in reversed(lams) if k <= lam]
        chosen = None
        fallback = None
        for kappa in candidates:
            if direction == "R":
                small, big = M.entry(lam).logm, M.entry(kappa).logm
            else:
                small, big = M.entry(kappa).logm, M.entry(lam).logm
            x, F = _condition_series(kind, small, big, half_power)
            if len(x) == 0:
                continue
            v = bounded_above(x, F, stability=config.stability,
                              abs_tol=config.log_tol, witness_key="log_A")
            if v.holds:
                entry = {"kappa": kappa,
                         "log_A": v.witness["log_A"],
                         "A": float(np.exp(v.witness["log_A"]))}
                if cond == "c12L2B":
                    log_h = max(0.0, v.witness["log_A"])
                    entry["log_B_per_C"] = _fit_slack_per_factor(
                        small, big, half_power, log_h, (1.0, 2.0, 4.0))
                    entry["log_H"] = log_h
                chosen = entry
                break
            if fallback is None or v.fails:
                fallback = (kappa, v)
        if chosen is None:
            kappa, v = fallback if fallback else (lam, Verdict(
                Status.INCONCLUSIVE, detail="no usable diagonal"))
            if v.fails:
                cex = dict(v.counterexample or {})
                cex.update({"lambda": lam, "kappa": kappa})
                side = "above" if direction == "R" else "below"
                return Verdict(Status.FAILS, counterexample=cex,
                               detail=f"no level {side} satisfies the bound")
            return Verdict(Status.INCONCLUSIVE,
                           detail=f"grid exhausted for level {lam:g}")
        table[f"{lam:g}"] = chosen
    return Verdict(Status.HOLDS, witness={"per_lambda": table})


def relate_matrices(M: WeightMatrix, N: WeightMatrix,
                    mode: str = "roumieu") -> Verdict:
    """Matrix growth relations with level quantifiers over the grids.

    ``roumieu``: every level of M is dominated by some level of N.
    ``beurling``: below every level of N sits some dominated level of M.
    ``strong``: strict smallness for every pair of levels.
    """
    if mode not in ("roumieu", "beurling", "strong"):
        raise ValueError(f"unknown matrix relation mode {mode!r}")
    if mode == "strong":
        verdicts = []
        for lam in M.lambdas:
            for kappa in N.lambdas:
                rep = seq_relate(M.entry(lam), N.entry(kappa), "triangleleft")
                if rep.verdict.fails:
                    return Verdict(Status.FAILS,
                                   counterexample={"lambda": lam,
                                                   "kappa": kappa},
                                   detail="pair not strictly smaller")
                verdicts.append(rep.verdict)
        return combine(*verdicts, detail="all level pairs strictly smaller")

    table = {}
    for lam in (M.lambdas if mode == "roumieu" else N.lambdas):
        chosen = None
        open_seen = False
        grid = M.lambdas if mode == "beurling" else N.lambdas
        # the matching level first (the natural certificate), then the rest
        # from the sharp end so the reported witness is the strongest one
        rest = sorted((k for k in grid if k != lam),
                      reverse=(mode == "beurling"))
        for kappa in ([lam] if lam in grid else []) + rest:
            if mode == "roumieu":
                rep = seq_relate(M.entry(lam), N.entry(kappa), "preceq")
            else:
                rep = seq_relate(M.entry(kappa), N.entry(lam), "preceq")
            if rep.verdict.holds:
                chosen = {"kappa": kappa, "C": rep.verdict.witness["C"]}
                break
            if not rep.verdict.fails:
                open_seen = True
        if chosen is None:
            if open_seen:
                return Verdict(Status.INCONCLUSIVE,
                               detail=f"grid exhausted for level {lam:g}")
            return Verdict(Status.FAILS,
                           counterexample={"lambda": lam},
                           detail="no partner level dominates")
        table[f"{lam:g}"] = chosen
    return Verdict(Status.HOLDS, witness={"per_lambda": table})


def matrix_nqa(M: WeightMatrix, mode: str = "roumieu") -> Verdict:
    """Non-quasianalyticity of a matrix, level-quantified.

    ``roumieu`` asks for one level whose quotient reciprocals sum,
    ``beurling`` asks it of every level.
    """
    if mode not in ("roumieu", "beurling"):
        raise ValueError(f"unknown mode {mode!r}")
    for lam in M.lambdas:
        if M.entry(lam).is_exotic:
            raise ValueError("matrix has non-finite entries")
    statuses = {}
    for lam in M.lambdas:
        v = check_sequence_condition(M.entry(lam), "nonquasianalytic")
        statuses[lam] = v
        if mode == "roumieu" and v.holds:
            return Verdict(Status.HOLDS, witness={"lambda0": lam,
                                                  **(v.witness or {})})
        if mode == "beurling" and v.fails:
            return Verdict(Status.FAILS,
                           counterexample={"lambda": lam,
                                           **(v.counterexample or {})},
                           detail="a level has divergent quotient sum")
    if mode == "roumieu":
        if all(v.fails for v in statuses.values()):
            return Verdict(Status.FAILS,
                           counterexample={"levels": len(statuses)},
                           detail="every level has divergent quotient sum")
        return Verdict(Status.INCONCLUSIVE, detail="no level certified")
    if all(v.holds for v in statuses.values()):
        witness = {f"{lam:g}": v.witness.get("partial_sum")
                   for lam, v in statuses.items()}
        return Verdict(Status.HOLDS, witness={"partial_sums": witness})
    return Verdict(Status.INCONCLUSIVE, detail="some level undecided")
