"""Oscillator construction tests.

The flagship run targets the square-root factorial with Q = 3.  Its
quotients are nu_p = sqrt(p), so every planned constant has a closed
form in log 2 and log 3: those are frozen below as oracles, and the
planner, builder, and verifier are all checked against them.  Head
values get a second, independent route: a plain per-block walk summed
with math.fsum.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from ultragrowth.oscillator import (
    OscillatorPlan,
    OscillatorResult,
    build,
    critical_case,
    plan,
    validate_target,
    verify,
)
from ultragrowth.seqcore import LogSequence, make_gevrey, quotients

LOG2 = math.log(2.0)
LOG3 = math.log(3.0)

# Flagship closed forms (Q = 3, nu_p = p^(1/2)):
#   per-step gain log nu_{3j} - log nu_j = log(3)/2, margin half of that;
#   doubling constant B = 2^(1/2), c = ceil(log2 3) = 2, cap 2 B^c = 4.
EPS_LOG = LOG3 / 4.0
ROOM = 2.0 * LOG2 - LOG3 / 2.0
LOG_ALPHA_BOOT = 2.0 * LOG2 + LOG3 / 4.0
LOG_ALPHA_S1 = (4.0 * LOG3 - 6.0 * LOG2) / 7.0
LOG_ALPHA_S2 = LOG2 + LOG3 / 2.0
STAGE_N = (8, 5, 13, 6, 20, 8, 26)
EXPONENTS = (1, 9, 14, 27, 33, 53, 61, 87)
GAPS = {
    1: 2.0 * LOG2 - LOG3 / 4.0,
    2: -2.0 * LOG2,
    3: 3.0 * LOG2,
    4: -2.0 * LOG2,
    5: 5.0 * LOG2,
    6: -math.log(6.0),
    7: 7.0 * LOG2,
    8: -3.0 * LOG2,
}


def oracle_stage_exponents(J):
    """Re-derive the flagship exponents from the stage rules alone."""
    n = [math.floor(12.0 * LOG2 / LOG3) + 1]
    for j in range(2, J):
        if j % 2 == 0:
            const = math.log(32.0) if j == 2 else (j + 1) * LOG2 + math.log(j)
            n.append(max(2, math.ceil(const / ROOM - 1e-12)))
        else:
            n.append(max(2, math.floor((j * LOG2 + math.log(j + 1.0))
                                       / EPS_LOG) + 1))
    return tuple(n)


def brute_log_mu(p, pl):
    """Walk the block list directly, no cumulative shortcuts."""
    for n, la in enumerate(pl.alpha_blocks):
        start, end = 3 ** n, 3 ** (n + 1)
        if p <= end:
            return math.fsum(pl.alpha_blocks[:n]) + (p - start) * la / (end - start)
    raise IndexError(p)


@pytest.fixture(scope="module")
def target():
    return make_gevrey(0.5, 512)


@pytest.fixture(scope="module")
def flagship_plan(target):
    return plan(target, 3, 8)


@pytest.fixture(scope="module")
def flagship(target, flagship_plan):
    return build(flagship_plan, target)


@pytest.fixture(scope="module")
def flagship_checks(flagship):
    return verify(flagship)


@pytest.fixture(scope="module")
def report():
    return critical_case(8)


class TestValidateTarget:
    def test_root_factorial_closed_forms(self, target):
        v = validate_target(target)
        assert v.holds
        w = v.witness
        assert w["Q"] == 3
        assert w["eps_hat"] == pytest.approx(3.0 ** 0.25 - 1.0, rel=1e-12)
        assert w["B"] == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert w["log_liminf_margin"] == pytest.approx(LOG3 / 2.0, rel=1e-12)
        assert w["admissible"] == (2, 3, 4, 5, 6, 7, 8)

    def test_factorial_closed_forms(self):
        v = validate_target(make_gevrey(1.0, 512))
        assert v.holds
        assert v.witness["Q"] == 3
        assert v.witness["B"] == pytest.approx(2.0, rel=1e-12)
        assert v.witness["eps_hat"] == pytest.approx(math.sqrt(3.0) - 1.0,
                                                     rel=1e-12)

    def test_geometric_quotients_fail_the_doubling_bound(self):
        p = np.arange(513, dtype=float)
        geo = LogSequence(LOG2 * p * (p + 1.0) / 2.0, name="geometric")
        v = validate_target(geo)
        assert v.fails
        assert "doubling" in v.detail

    def test_uncertified_targets_are_rejected(self):
        flat = LogSequence(np.zeros(17), name="flat")
        with pytest.raises(ValueError, match="LC"):
            validate_target(flat)

    def test_callable_quotients_match_the_closed_form(self, target):
        v = validate_target(lambda p: 0.5 * float(gammaln(p + 1.0)))
        assert v.holds
        assert v.witness["Q"] == 3
        assert v.witness["log_liminf_margin"] == pytest.approx(LOG3 / 2.0,
                                                               rel=1e-9)


class TestPlan:
    def test_stage_exponents_match_the_rules(self, flagship_plan):
        assert flagship_plan.stage_exponents == STAGE_N
        assert oracle_stage_exponents(8) == STAGE_N

    def test_block_constants_match_closed_forms(self, flagship_plan):
        a = flagship_plan.alpha_blocks
        assert len(a) == 1 + sum(STAGE_N)
        for n in (0, 1):
            assert a[n] == pytest.approx(LOG_ALPHA_BOOT, rel=1e-12)
        for n in range(2, 9):
            assert a[n] == pytest.approx(LOG_ALPHA_S1, rel=1e-12)
        for n in range(9, 14):
            assert a[n] == pytest.approx(LOG_ALPHA_S2, rel=1e-12)
        # first overshoot stage: gain (13/2) log3 less the planned 8(j+1)
        want = (6.5 * LOG3 - 5.0 * LOG2) / 13.0
        for n in range(14, 27):
            assert a[n] == pytest.approx(want, rel=1e-12)

    def test_fitted_constants(self, flagship_plan):
        pl = flagship_plan
        assert pl.eps_hat == pytest.approx(3.0 ** 0.25 - 1.0, rel=1e-12)
        assert pl.B == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert pl.A_cap == pytest.approx(4.0, rel=1e-12)
        assert pl.log_step == pytest.approx(LOG3 / 2.0, rel=1e-12)

    def test_anchor_ladder_is_exact_integer_arithmetic(self, flagship_plan):
        pl = flagship_plan
        assert pl.exponents == EXPONENTS
        assert pl.anchors == tuple(3 ** m for m in EXPONENTS)
        assert pl.anchors[-1] == 3 ** 87
        for j, n in enumerate(pl.stage_exponents):
            assert pl.anchors[j + 1] == 3 ** n * pl.anchors[j]

    def test_stage_gains_meet_the_planned_margin(self, flagship_plan):
        # what the second-stage stretch loop enforces for j >= 3
        pl = flagship_plan
        for j in range(3, pl.J):
            gain = 0.5 * (pl.exponents[j] - pl.exponents[j - 1]) * LOG3
            assert gain >= pl.stage_exponents[j - 1] * EPS_LOG - 1e-12

    def test_small_q_is_rejected(self, target):
        with pytest.raises(ValueError, match="Q >= 3"):
            plan(target, 2, 5)

    def test_unbounded_target_is_rejected(self):
        p = np.arange(513, dtype=float)
        geo = LogSequence(LOG2 * p * (p + 1.0) / 2.0, name="geometric")
        with pytest.raises(ValueError, match="doubling"):
            plan(geo, 3, 5)


class TestPlanInvariants:
    def test_tampered_anchors_are_rejected(self, flagship_plan):
        pl = flagship_plan
        bad = pl.anchors[:-1] + (pl.anchors[-1] + 3,)
        with pytest.raises(ValueError, match="k_"):
            OscillatorPlan(Q=pl.Q, J=pl.J, eps_hat=pl.eps_hat, B=pl.B,
                           log_step=pl.log_step, A_cap=pl.A_cap,
                           anchors=bad, stage_exponents=pl.stage_exponents,
                           alpha_blocks=pl.alpha_blocks)

    def test_flat_blocks_are_rejected(self, flagship_plan):
        pl = flagship_plan
        bad = (0.0,) + pl.alpha_blocks[1:]
        with pytest.raises(ValueError, match="alpha"):
            OscillatorPlan(Q=pl.Q, J=pl.J, eps_hat=pl.eps_hat, B=pl.B,
                           log_step=pl.log_step, A_cap=pl.A_cap,
                           anchors=pl.anchors,
                           stage_exponents=pl.stage_exponents,
                           alpha_blocks=bad)

    def test_cap_violations_are_rejected(self, flagship_plan):
        pl = flagship_plan
        bad = pl.alpha_blocks[:9] + (math.log(pl.A_cap) + 0.5,) \
            + pl.alpha_blocks[10:]
        with pytest.raises(ValueError, match="cap"):
            OscillatorPlan(Q=pl.Q, J=pl.J, eps_hat=pl.eps_hat, B=pl.B,
                           log_step=pl.log_step, A_cap=pl.A_cap,
                           anchors=pl.anchors,
                           stage_exponents=pl.stage_exponents,
                           alpha_blocks=bad)

    def test_bootstrap_blocks_may_exceed_the_cap(self, flagship_plan):
        assert flagship_plan.alpha_blocks[0] > math.log(flagship_plan.A_cap)


class TestBuild:
    def test_head_matches_the_block_walk(self, flagship, flagship_plan):
        logmu = quotients(flagship.M.head).logmu
        for p in (1, 2, 3, 4, 9, 27, 28, 100, 729, 2187, 4000, 4096):
            assert logmu[p] == pytest.approx(brute_log_mu(p, flagship_plan),
                                             abs=1e-10)

    def test_cumulative_values_match_a_brute_sum(self, flagship,
                                                 flagship_plan):
        for p in (3, 27, 2187, 4096):
            want = math.fsum(brute_log_mu(q, flagship_plan)
                             for q in range(1, p + 1))
            assert flagship.M.head.logm[p] == pytest.approx(want, abs=1e-9)

    def test_closed_form_agrees_beyond_the_head(self, flagship,
                                                flagship_plan):
        p = 3 ** 8
        assert p > flagship.M.head.truncation
        log_mu, log_m = flagship.M.eval(p)
        assert log_mu == pytest.approx(brute_log_mu(p, flagship_plan),
                                       abs=1e-9)
        want = math.fsum(brute_log_mu(q, flagship_plan)
                         for q in range(1, p + 1))
        assert log_m == pytest.approx(want, abs=1e-9)

    def test_normalization(self, flagship):
        head = flagship.M.head
        assert head.logm[0] == 0.0
        assert head.logm[1] == 0.0
        assert flagship.M.eval(1) == (0.0, 0.0)

    def test_block_boundaries_chain_the_alpha_products(self, flagship,
                                                       flagship_plan):
        for n in range(1, len(flagship_plan.alpha_blocks) + 1):
            want = math.fsum(flagship_plan.alpha_blocks[:n])
            assert flagship.M.eval(3 ** n)[0] == pytest.approx(want,
                                                               abs=1e-12)

    def test_blocks_tile_the_ladder(self, flagship):
        blocks = flagship.M.blocks
        assert blocks[0].start == 1
        assert blocks[-1].end == 3 ** 87
        total = sum(b.end - b.start for b in blocks)
        assert total == 3 ** 87 - 1
        for n, b in enumerate(blocks):
            assert b.end - b.start == 2 * 3 ** n

    def test_anchor_landings(self, flagship):
        by_j = {row["j"]: row for row in flagship.trace}
        for j, want in GAPS.items():
            got = by_j[j]["log_mu"] - by_j[j]["log_nu"]
            assert got == pytest.approx(want, abs=1e-9)
        # descent and overshoot anchors, pinned tighter
        assert by_j[2]["log_mu"] - by_j[2]["log_nu"] == pytest.approx(
            -math.log(4.0), abs=1e-12)
        assert by_j[3]["log_mu"] - by_j[3]["log_nu"] == pytest.approx(
            math.log(8.0), abs=1e-12)

    def test_trace_cases_alternate(self, flagship):
        cases = [row["case"] for row in flagship.trace]
        assert cases == ["64-rule", "32-rule", "I", "II", "I", "II", "I",
                         "II"]

    def test_forged_anchor_traces_are_rejected(self, flagship):
        forged = tuple(dict(row, log_mu=row["log_mu"] + 0.1)
                       if row["j"] == 2 else row for row in flagship.trace)
        with pytest.raises(ValueError, match="offset"):
            OscillatorResult(M=flagship.M, plan=flagship.plan, trace=forged,
                             target=flagship.target)


class TestVerify:
    def test_all_checks_hold(self, flagship_checks):
        for key in ("claim_I", "claim_II", "anchors", "moderate_growth",
                    "alpha_condition", "probe"):
            assert flagship_checks[key].holds, key

    def test_quotient_band(self, flagship_checks):
        w = flagship_checks["claim_I"].witness
        assert w["alpha_max"] == pytest.approx(4.0 * 3.0 ** 0.25, rel=1e-12)
        assert w["head_max"] == pytest.approx(LOG_ALPHA_BOOT, abs=1e-9)
        assert w["head_min"] == pytest.approx(LOG_ALPHA_S1, abs=1e-9)

    def test_first_anchor_ratio_is_the_bootstrap_constant(self, flagship):
        got = flagship.M.eval(3)[0] - flagship.M.eval(1)[0]
        assert got == pytest.approx(LOG_ALPHA_BOOT, abs=1e-12)

    def test_anchor_identities_are_exact(self, flagship_checks):
        assert flagship_checks["anchors"].witness["max_err"] < 1e-12

    def test_root_sandwich(self, flagship, flagship_checks):
        w = flagship_checks["moderate_growth"].witness
        assert w["A_root"] >= 1.0
        head = flagship.M.head
        p = np.arange(1, head.truncation + 1)
        gap = quotients(head).logmu[1:] - head.logm[1:] / p
        assert float(np.min(gap)) >= -1e-12
        assert float(np.max(gap)) == pytest.approx(math.log(w["A_root"]),
                                                   abs=1e-12)

    def test_probe_records(self, flagship_checks):
        w = flagship_checks["probe"].witness
        assert w["up_records"] == 3
        assert w["down_records"] == 2

    def test_quotient_liminf_stays_above_one(self, flagship_checks):
        w = flagship_checks["alpha_condition"].witness
        assert w["liminf_est"] > 1.0
        assert w["liminf_est"] == pytest.approx(math.exp(LOG_ALPHA_S1),
                                                abs=1e-6)


class TestExactnessAtScale:
    @pytest.mark.parametrize("J", [5, 12])
    def test_anchor_arithmetic_never_degrades(self, target, J):
        pl = plan(target, 3, J)
        res = build(pl, target)
        ck = verify(res)
        assert ck["anchors"].holds
        assert ck["anchors"].witness["max_err"] < 1e-9

    def test_twelve_stage_ladder_is_astronomical(self, target):
        pl = plan(target, 3, 12)
        assert pl.stage_exponents == (8, 5, 13, 6, 20, 8, 26, 10, 32, 12, 37)
        assert pl.anchors[-1] == 3 ** 178


class TestCriticalCase:
    def test_requires_five_stages(self):
        with pytest.raises(ValueError, match="five"):
            critical_case(4)

    def test_construction_checks_hold(self, report):
        checks = report["checks"]
        for key in ("claim_I", "claim_II", "anchors", "moderate_growth",
                    "alpha_condition", "probe", "target"):
            assert checks[key].holds, key

    def test_root_gap_dips_below_the_envelope(self, report):
        v = report["checks"]["thin_limit"]
        assert v.holds
        gaps = v.witness["root_gap_at"]
        assert sorted(gaps) == [4, 6, 8]
        for j, val in gaps.items():
            assert val <= math.log(4.0) - math.log(j)
        assert gaps[4] > gaps[6] > gaps[8]

    def test_lower_normalization_bound_fails(self, report):
        assert report["checks"]["M0"].fails

    def test_incomparability_probe_holds(self, report):
        assert report["checks"]["incomparability"].holds


@settings(max_examples=25, deadline=None)
@given(s=st.floats(0.25, 2.0), Q=st.sampled_from([3, 4, 5]),
       J=st.sampled_from([5, 6]))
def test_planned_ladders_land_on_their_offsets(s, Q, J):
    N = make_gevrey(s, 64)
    pl = plan(N, Q, J)
    assert pl.anchors[0] == Q
    for j, n in enumerate(pl.stage_exponents):
        assert pl.anchors[j + 1] == Q ** n * pl.anchors[j]
    res = build(pl, N)
    for row in res.trace:
        j = row["j"]
        if j == 1:
            want = math.log(4.0) - 0.5 * s * math.log(Q)
        elif j == 2 or j == 4:
            want = -math.log(4.0)
        elif j % 2 == 1:
            want = j * LOG2
        else:
            want = -math.log(float(j))
        assert row["log_mu"] - row["log_nu"] == pytest.approx(want, abs=1e-9)
