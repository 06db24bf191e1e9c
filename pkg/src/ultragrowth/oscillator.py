r"""Weight sequences that oscillate around a reference target.

The construction walks an anchor ladder k_1 < k_2 < ... with k_{j+1} =
Q^{n_j} k_j.  Between anchors the quotient sequence ramps geometrically
with one constant step per Q-power block, tuned so the anchors land at
prescribed offsets from the target quotients nu: a bootstrap descent to
nu/4, then alternating overshoots 2^j nu (odd stages) and undershoots
nu/j (even stages).  Block products telescope, so every Q-fold quotient
ratio mu_{Qj}/mu_j is a convex combination of adjacent block constants;
keeping those constants in (1, A_cap] yields the uniform bounds the
verification sub-checks certify.  Anchor values are exact in the log
domain however large the index, via the block closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .config import DEFAULT_CONFIG, RunConfig
from .relations import _log_indices, _log_nu_at, oscillation_probe
from .seqcore import (
    Block,
    BlockSequence,
    LogSequence,
    check_LC,
    check_sequence_condition,
    make_gevrey,
    quotients,
)
from .verdicts import Status, Verdict, bounded_above, bounded_below

__all__ = [
    "OscillatorPlan",
    "OscillatorResult",
    "validate_target",
    "plan",
    "build",
    "verify",
    "critical_case",
]

_STAGE_CAP = 10 ** 6
_ANCHOR_TOL = 1e-9
_LOG2 = math.log(2.0)
_LOG4 = math.log(4.0)


def _expected_gap(j: int, log_nu_k1: float) -> float:
    """Planned log(mu/nu) at anchor j."""
    if j == 1:
        return _LOG4 - 0.5 * log_nu_k1
    if j == 2:
        return -_LOG4
    if j % 2 == 1:
        return j * _LOG2
    return -math.log(float(j))


def _stage_case(j: int) -> str:
    if j == 1:
        return "64-rule"
    if j == 2:
        return "32-rule"
    return "I" if j % 2 == 1 else "II"


@dataclass(frozen=True)
class OscillatorPlan:
    """Anchor ladder, stage exponents, and per-block quotient constants.

    ``alpha_blocks[n]`` is log alpha for the block covering (Q^n, Q^{n+1}];
    every value is positive, and from the second stage on (n >= 2) stays
    below log A_cap.  The two bootstrap blocks carry the fixed constant
    4 sqrt(nu_{k_1}), which may exceed the cap; only finiteness matters
    for the uniform bounds there.
    """

    Q: int
    J: int
    eps_hat: float
    B: float
    log_step: float
    A_cap: float
    anchors: tuple
    stage_exponents: tuple
    alpha_blocks: tuple
    target_name: str = ""

    def __post_init__(self) -> None:
        if self.Q < 3:
            raise ValueError("need Q >= 3")
        if self.J < 2 or len(self.anchors) != self.J:
            raise ValueError("need one anchor per stage boundary, J >= 2")
        if self.eps_hat <= 0:
            raise ValueError("need a positive oscillation margin")
        if len(self.stage_exponents) != self.J - 1:
            raise ValueError("need one exponent per stage")
        if self.anchors[0] != self.Q:
            raise ValueError("the ladder starts at k_1 = Q")
        for j, n in enumerate(self.stage_exponents):
            if n < 2:
                raise ValueError("stage exponents must be >= 2")
            if self.anchors[j + 1] != self.Q ** n * self.anchors[j]:
                raise ValueError("anchors must satisfy k_{j+1} = Q^{n_j} k_j")
        m_top = 1 + sum(self.stage_exponents)
        if len(self.alpha_blocks) != m_top:
            raise ValueError("need one block constant per Q-power exponent")
        log_cap = math.log(self.A_cap)
        for n, la in enumerate(self.alpha_blocks):
            if not la > 0.0:
                raise ValueError(f"block {n} has alpha <= 1")
            if n >= 2 and la > log_cap + 1e-9:
                raise ValueError(f"block {n} exceeds the uniform cap")
        object.__setattr__(self, "anchors", tuple(int(k) for k in self.anchors))
        object.__setattr__(self, "stage_exponents",
                           tuple(int(n) for n in self.stage_exponents))
        object.__setattr__(self, "alpha_blocks",
                           tuple(float(a) for a in self.alpha_blocks))

    @property
    def log_alpha_min(self) -> float:
        return min(self.alpha_blocks)

    @property
    def log_alpha_max(self) -> float:
        return max(self.alpha_blocks)

    @property
    def exponents(self) -> tuple:
        """m_j with k_j = Q^{m_j}."""
        out = [1]
        for n in self.stage_exponents:
            out.append(out[-1] + n)
        return tuple(out)


@dataclass(frozen=True)
class OscillatorResult:
    """Built sequence, per-anchor trace, and the plan that produced it."""

    M: BlockSequence
    plan: OscillatorPlan
    trace: tuple
    target: LogSequence | object

    def __post_init__(self) -> None:
        log_nu_k1 = self.trace[0]["log_nu"]
        for row in self.trace:
            want = _expected_gap(row["j"], log_nu_k1)
            got = row["log_mu"] - row["log_nu"]
            if abs(got - want) > _ANCHOR_TOL * max(1.0, abs(want)):
                raise ValueError(
                    f"anchor {row['j']} misses its planned offset: "
                    f"{got:.12g} instead of {want:.12g}")


def _doubling_stat(N, window: int, config: RunConfig):
    """Verdict and fitted sup for log nu_{2j} - log nu_j."""
    js = _log_indices(1, window // 2)
    r = np.array([_log_nu_at(N, 2 * int(j)) - _log_nu_at(N, int(j))
                  for j in js])
    v = bounded_above(js.astype(float), r, stability=config.stability,
                      abs_tol=config.log_tol, witness_key="log_B",
                      detail="sup of log nu_{2j} - log nu_j")
    sup = float(v.witness["log_B"]) if v.witness else math.nan
    return v, sup


def _qstep_stat(N, Q: int, window: int, config: RunConfig):
    """Trend of log nu_{Qj} - log nu_j: liminf margin and fitted sup."""
    js = _log_indices(1, window // Q)
    r = np.array([_log_nu_at(N, Q * int(j)) - _log_nu_at(N, int(j))
                  for j in js])
    lo = bounded_below(js.astype(float), r, stability=config.stability,
                       abs_tol=config.log_tol, witness_key="log_margin",
                       detail="inf of log nu_{Qj} - log nu_j")
    hi = bounded_above(js.astype(float), r, stability=config.stability,
                       abs_tol=config.log_tol, witness_key="log_step")
    margin = float(lo.witness["log_margin"]) if lo.witness else math.nan
    step = float(hi.witness["log_step"]) if hi.witness else math.nan
    return lo, margin, step


def _probe_window(N, config: RunConfig) -> int:
    if isinstance(N, LogSequence) and N.s is None:
        return N.finite_truncation
    return max(config.truncation, 65536)


def validate_target(N, *, config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Eligibility of a target: Q-fold quotient lift and doubling bound.

    Searches Q = 2..8 for a positive stable margin of log nu_{Qj} - log
    nu_j and requires log nu_{2j} - log nu_j bounded.  The witness names
    the smallest admissible Q >= 3 plus the fitted oscillation margin
    (half the lift) and doubling constant B.
    """
    if isinstance(N, LogSequence):
        lc = check_LC(N)
        if not lc.holds:
            raise ValueError(f"target is not LC-certified: {lc.detail}")
    window = _probe_window(N, config)
    v_sup, log_b = _doubling_stat(N, window, config)
    if v_sup.fails:
        return Verdict(Status.FAILS, counterexample=v_sup.counterexample,
                       detail="doubling ratio of quotients is unbounded")
    admissible = []
    margins = {}
    undecided = False
    for Q in range(2, 9):
        lo, margin, _ = _qstep_stat(N, Q, window, config)
        if lo.holds and margin > config.log_tol:
            admissible.append(Q)
            margins[Q] = margin
        elif not lo.fails:
            undecided = True
    chosen = next((Q for Q in admissible if Q >= 3), None)
    if chosen is None:
        if undecided or not v_sup.holds:
            return Verdict(Status.INCONCLUSIVE,
                           detail="no Q-fold lift settled on the window")
        return Verdict(Status.FAILS,
                       counterexample={"tried_Q": "2..8"},
                       detail="no Q-fold quotient lift stays above 1")
    if not v_sup.holds:
        return Verdict(Status.INCONCLUSIVE,
                       detail="doubling bound unsettled on the window")
    margin = margins[chosen]
    return Verdict(Status.HOLDS, witness={
        "Q": chosen,
        "eps_hat": math.expm1(margin / 2.0),
        "B": math.exp(log_b),
        "log_liminf_margin": margin,
        "admissible": tuple(admissible),
    })


def _min_exponent_strict(rhs: float, eps_log: float) -> int:
    """Smallest n >= 2 with n * eps_log > rhs."""
    n = max(2, math.floor(rhs / eps_log) + 1)
    if n > _STAGE_CAP:
        raise ValueError("stage exponent exceeds the search cap")
    return n


def _min_exponent_cap(log_const: float, room: float) -> int:
    """Smallest n >= 2 with log_const / n <= room."""
    if room <= 0:
        raise ValueError("uniform cap leaves no room above the step growth")
    n = max(2, math.ceil(log_const / room - 1e-12))
    if n > _STAGE_CAP:
        raise ValueError("stage exponent exceeds the search cap")
    return n


def plan(N, Q: int, J: int, *,
         config: RunConfig = DEFAULT_CONFIG) -> OscillatorPlan:
    """Choose anchors, stage exponents, and block constants for a target.

    Stage 1 descends to nu/4 once the Q-run gains a factor 64; stage 2
    climbs to 8 nu with the cap rule; odd stages overshoot to 2^j nu
    under the margin rule, even stages descend to nu/j under the cap
    rule.  The second stage stretches until every later stage gain
    meets the planned margin, which realizes "k_3 large enough".
    """
    if J < 2:
        raise ValueError("need at least two anchors")
    window = _probe_window(N, config)
    lo, margin, log_step = _qstep_stat(N, Q, window, config)
    if not lo.holds or margin <= config.log_tol:
        raise ValueError(f"target does not admit oscillation at Q={Q}")
    v_sup, log_b = _doubling_stat(N, window, config)
    if not v_sup.holds:
        raise ValueError("target doubling bound is not certified")
    eps_log = margin / 2.0
    c = max(1, math.ceil(math.log2(Q)))
    log_cap = _LOG2 + c * log_b
    room = log_cap - log_step

    def nu(p: int) -> float:
        return _log_nu_at(N, p)

    log_a0 = _LOG4 + 0.5 * nu(Q)

    # stage 1: minimal run with a 64-fold quotient gain
    n1 = 2
    while nu(Q ** (n1 + 1)) - nu(Q) <= math.log(64.0):
        n1 += 1
        if n1 > _STAGE_CAP:
            raise ValueError("no 64-fold gain within the search cap")

    def lay_out(n2: int):
        anchors = [Q, Q ** (n1 + 1)]
        stage_n = [n1]
        alphas = [log_a0, log_a0]
        dv1 = nu(anchors[1]) - nu(anchors[0])
        alphas += [(dv1 - math.log(64.0)) / (n1 - 1)] * (n1 - 1)
        gaps = [_expected_gap(1, nu(Q)), -_LOG4]
        for j in range(2, J):
            if j == 2:
                n_j = max(n2, _min_exponent_cap(math.log(32.0), room))
            elif j % 2 == 1:
                n_j = _min_exponent_strict(j * _LOG2 + math.log(j + 1.0),
                                           eps_log)
            else:
                n_j = _min_exponent_cap((j + 1) * _LOG2 + math.log(float(j)),
                                        room)
            k_next = Q ** n_j * anchors[-1]
            gaps.append(_expected_gap(j + 1, nu(Q)))
            dv = nu(k_next) - nu(anchors[-1])
            alphas += [(dv + gaps[-1] - gaps[-2]) / n_j] * n_j
            anchors.append(k_next)
            stage_n.append(n_j)
        return anchors, stage_n, alphas

    n2 = 2
    while True:
        anchors, stage_n, alphas = lay_out(n2)
        short = [j for j in range(3, J)
                 if nu(anchors[j]) - nu(anchors[j - 1])
                 < stage_n[j - 1] * eps_log - 1e-12]
        if not short:
            break
        n2 += 1
        if n2 > _STAGE_CAP:
            raise ValueError("stage gains never meet the planned margin")

    return OscillatorPlan(
        Q=Q, J=J, eps_hat=math.expm1(eps_log), B=math.exp(log_b),
        log_step=log_step, A_cap=math.exp(log_cap),
        anchors=tuple(anchors), stage_exponents=tuple(stage_n),
        alpha_blocks=tuple(alphas),
        target_name=getattr(N, "name", "") or "target")


def build(pl: OscillatorPlan, N, *,
          config: RunConfig = DEFAULT_CONFIG) -> OscillatorResult:
    """Materialize the head, lay the blocks, and trace the anchors."""
    Q = pl.Q
    k3 = pl.anchors[2] if pl.J >= 3 else pl.anchors[-1]
    H = max(8, min(config.truncation, k3))

    blocks = []
    logmu = np.zeros(H + 1)
    mu_start = 0.0
    for n, la in enumerate(pl.alpha_blocks):
        start, end = Q ** n, Q ** (n + 1)
        count = end - start
        log_beta = la / float(count)
        blocks.append(Block(start=start, end=end, log_beta=log_beta))
        if start < H:
            hi = min(end, H)
            idx = np.arange(start + 1, hi + 1)
            logmu[idx] = mu_start + (idx - start) * log_beta
        mu_start += la

    logm = np.concatenate([[0.0], np.cumsum(logmu[1:])])
    head = LogSequence(logm, name=f"osc[{pl.target_name}]",
                       provenance="oscillator")
    M = BlockSequence(head=head, blocks=tuple(blocks), anchors=pl.anchors)

    trace = []
    for j, k in enumerate(pl.anchors, start=1):
        # anchors can sit inside a deep materialized head, where cumsum
        # drift would spoil the 1e-9 landing check; use block arithmetic
        log_mu, log_m = M.eval_closed(k)
        trace.append({
            "j": j,
            "k": k,
            "log_mu": log_mu,
            "log_M": log_m,
            "log_nu": _log_nu_at(N, k),
            "case": _stage_case(j),
            "n": pl.stage_exponents[j - 1] if j < pl.J else None,
        })
    return OscillatorResult(M=M, plan=pl, trace=tuple(trace), target=N)


def verify(result: OscillatorResult, *,
           config: RunConfig = DEFAULT_CONFIG) -> dict:
    """Per-claim verdicts for a built oscillator."""
    pl = result.plan
    M = result.M
    Q = pl.Q
    head = M.head
    lo_a, hi_a = pl.log_alpha_min, pl.log_alpha_max
    tol = config.log_tol

    logmu = quotients(head).logmu
    j_top = head.truncation // Q
    js = np.arange(1, j_top + 1)
    r = logmu[Q * js] - logmu[js]
    out = {}

    # (a) the Q-fold quotient ratio stays inside the block-constant band
    bad = np.where((r < lo_a - tol) | (r > hi_a + tol))[0]
    anchor_ok = True
    exps = pl.exponents
    for j, k in enumerate(pl.anchors[:-1]):
        got = M.eval(Q * k)[0] - M.eval(k)[0]
        if abs(got - pl.alpha_blocks[exps[j]]) > tol:
            anchor_ok = False
    if len(bad) or not anchor_ok:
        at = int(js[bad[0]]) if len(bad) else "anchor"
        out["claim_I"] = Verdict(Status.FAILS,
                                 counterexample={"at": at},
                                 detail="quotient ratio leaves the band")
    else:
        out["claim_I"] = Verdict(Status.HOLDS, witness={
            "alpha_min": math.exp(lo_a), "alpha_max": math.exp(hi_a),
            "head_min": float(np.min(r)), "head_max": float(np.max(r))})

    # (b) quotients strictly increase and Q-power values stack the minimum
    steps = np.diff(logmu[1:])
    increasing = bool(np.all(steps > 0.0))
    stacked = True
    acc = 0.0
    for n, la in enumerate(pl.alpha_blocks):
        acc += la
        if acc < (n + 1) * lo_a - tol:
            stacked = False
    if increasing and stacked:
        out["claim_II"] = Verdict(Status.HOLDS,
                                  witness={"min_step": float(np.min(steps))})
    else:
        out["claim_II"] = Verdict(Status.FAILS,
                                  detail="quotients fail to climb uniformly")

    # (c) anchor offsets land exactly where planned
    gaps = {}
    worst = 0.0
    log_nu_k1 = result.trace[0]["log_nu"]
    for row in result.trace:
        d = row["log_mu"] - row["log_nu"]
        gaps[row["j"]] = d
        worst = max(worst, abs(d - _expected_gap(row["j"], log_nu_k1)))
    status = Status.HOLDS if worst <= _ANCHOR_TOL else Status.FAILS
    out["anchors"] = Verdict(status, witness={"gaps": gaps, "max_err": worst})

    # (d) moderate growth via the uniform Q-step bound, cross-checked
    head_m2 = check_sequence_condition(head, "M2", stability=config.stability,
                                       abs_tol=config.log_tol)
    p = np.arange(1, head.truncation + 1)
    root = head.logm[1:] / p
    sandwich_lo = float(np.min(logmu[1:] - root))
    root_factor = float(np.max(logmu[1:] - root))
    if head_m2.fails or out["claim_I"].fails or sandwich_lo < -tol:
        out["moderate_growth"] = Verdict(Status.FAILS,
                                         detail="head contradicts the bound")
    else:
        out["moderate_growth"] = Verdict(Status.HOLDS, witness={
            "A_step": math.exp(hi_a), "head_M2": str(head_m2.status),
            "A_root": math.exp(root_factor)})

    # (e) quotient doubling condition: the Q-fold ratio stays above 1
    v = bounded_below(js.astype(float), r, stability=config.stability,
                      abs_tol=tol, witness_key="log_liminf")
    if v.holds and v.witness["log_liminf"] > tol:
        out["alpha_condition"] = Verdict(Status.HOLDS, witness={
            "liminf_est": math.exp(v.witness["log_liminf"])})
    elif v.fails:
        out["alpha_condition"] = v
    else:
        out["alpha_condition"] = Verdict(Status.INCONCLUSIVE,
                                         detail="no positive stable margin")

    # (f) record-breaking oscillation across the anchors
    out["probe"] = oscillation_probe(M, result.target).verdict
    return out


def critical_case(J: int, *, config: RunConfig = DEFAULT_CONFIG) -> dict:
    """The full run against the square-root factorial target.

    Builds the oscillator, verifies the claims, then adds the three
    consequences: the root gap dips below the 1/j envelope at even
    anchors, the lower normalization bound fails for the head, and the
    head is order-incomparable with the target in both directions.
    """
    if J < 5:
        raise ValueError("need at least five stages")
    N = make_gevrey(0.5, config.truncation)
    vt = validate_target(N, config=config)
    if not vt.holds:
        raise ValueError("square-root factorial target failed validation")
    pl = plan(N, vt.witness["Q"], J, config=config)
    res = build(pl, N, config=config)
    checks = verify(res, config=config)
    checks["target"] = vt

    # thin limit: (M_p / N_p)^{1/p} <= A/j along even anchors
    vals = {}
    ok = True
    prev = math.inf
    for row in res.trace:
        j, k = row["j"], row["k"]
        if j < 4 or j % 2 == 1:
            continue
        val = float(row["log_M"] - 0.5 * gammaln(float(k) + 1.0)) / float(k)
        vals[j] = val
        if val > math.log(pl.A_cap) - math.log(j) or val >= prev:
            ok = False
        prev = val
    checks["thin_limit"] = Verdict(
        Status.HOLDS if ok and vals else Status.FAILS,
        witness={"root_gap_at": vals},
        detail="root gap falls below the 1/j envelope")

    checks["M0"] = check_sequence_condition(res.M.head, "M0")
    checks["incomparability"] = checks["probe"]
    return {"plan": pl, "result": res, "checks": checks}
