"""Sequence container, quotients, block closed forms, and condition checks.

Oracle policy: log-gamma values are cross-checked against math.lgamma and
against plain summation of logs; the moderate-growth witness is checked
against an exact binomial-coefficient scan; block closed forms are checked
against naive materialization.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ultragrowth import (
    Block,
    BlockSequence,
    LogSequence,
    Status,
    check_LC,
    check_sequence_condition,
    eval_block,
    make_gevrey,
    quotients,
)

LOG2 = math.log(2.0)


# --- oracles, frozen before the implementation ------------------------------

# 2 * sum_{k=1..10} log k, summed with math.log only
GEVREY2_LOGM10 = 30.208825146151032

# 0.5 * log 2
GEVREY_HALF_LOGM2 = 0.34657359027997264


class TestMakeGevrey:
    def test_matches_lgamma_oracle(self):
        g = make_gevrey(2.0, 64)
        for p in (0, 1, 2, 10, 33, 64):
            assert g.logm[p] == pytest.approx(2.0 * math.lgamma(p + 1), rel=1e-14)

    def test_matches_log_summation_oracle(self):
        g = make_gevrey(2.0, 64)
        assert g.logm[10] == pytest.approx(GEVREY2_LOGM10, abs=1e-10)
        half = make_gevrey(0.5, 16)
        assert half.logm[2] == pytest.approx(GEVREY_HALF_LOGM2, abs=1e-15)
        assert half.logm[0] == 0.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            make_gevrey(0.0, 64)
        with pytest.raises(ValueError):
            make_gevrey(-1.0, 64)
        with pytest.raises(ValueError):
            make_gevrey(1.0, 7)

    def test_metadata(self):
        g = make_gevrey(0.5, 32)
        assert g.name == "G^0.5"
        assert g.provenance == "gevrey"
        assert g.s == 0.5
        assert g.truncation == 32


class TestLogSequenceValidation:
    def test_rejects_nan_and_neginf(self):
        with pytest.raises(ValueError):
            LogSequence([0.0] * 8 + [np.nan])
        with pytest.raises(ValueError):
            LogSequence([0.0] * 8 + [-np.inf])

    def test_rejects_infinite_m0(self):
        with pytest.raises(ValueError):
            LogSequence([np.inf] + [0.0] * 8)

    def test_rejects_short_sequences(self):
        with pytest.raises(ValueError):
            LogSequence([0.0] * 8)

    def test_plus_inf_needs_weight_provenance(self):
        with pytest.raises(ValueError):
            LogSequence([0.0, 0.0] + [np.inf] * 7)
        exotic = LogSequence([0.0, 0.0] + [np.inf] * 7,
                             provenance="generated-from-weight")
        assert exotic.is_exotic
        assert exotic.finite_truncation == 1

    def test_plus_inf_must_be_terminal(self):
        with pytest.raises(ValueError):
            LogSequence([0.0, np.inf, 0.0] + [np.inf] * 6,
                        provenance="generated-from-weight")

    def test_array_is_immutable(self):
        g = make_gevrey(1.0, 16)
        with pytest.raises(ValueError):
            g.logm[0] = 1.0


class TestQuotients:
    def test_gevrey_quotients_are_s_log_p(self):
        g = make_gevrey(0.5, 128)
        q = quotients(g)
        p = np.arange(1, 129, dtype=float)
        assert q.logmu[0] == 0.0
        np.testing.assert_allclose(q.logmu[1:], 0.5 * np.log(p), rtol=1e-12)

    def test_reconstruction_is_exact(self):
        g = make_gevrey(2.0, 512)
        assert np.array_equal(quotients(g).reconstruct(), g.logm)

    def test_cumsum_approximates_source(self):
        g = make_gevrey(1.0, 512)
        q = quotients(g)
        back = g.logm[0] + np.cumsum(q.logmu)
        np.testing.assert_allclose(back, g.logm, atol=1e-9)

    def test_exotic_quotients_are_inf_on_the_inf_tail(self):
        exotic = LogSequence([0.0, 0.5] + [np.inf] * 7,
                             provenance="generated-from-weight")
        q = quotients(exotic)
        assert q.logmu[1] == 0.5
        assert np.isposinf(q.logmu[2:]).all()


class TestConditionChecks:
    def test_normalized(self):
        assert check_sequence_condition(make_gevrey(1.0, 64), "normalized").holds
        shifted = LogSequence(np.arange(9, dtype=float) + 1.0)
        v = check_sequence_condition(shifted, "normalized")
        assert v.status is Status.FAILS
        assert v.counterexample["p"] == 0

    def test_m1_log_convexity(self):
        assert check_sequence_condition(make_gevrey(1.0, 256), "M1").holds
        bumpy = LogSequence([0, 0, 5, 5.5, 6, 6.5, 7, 7.5, 8, 8.5],
                            name="bumpy")
        v = check_sequence_condition(bumpy, "M1")
        assert v.status is Status.FAILS
        assert v.counterexample["p"] == 2  # mu_2 = e^5 but mu_3 = e^0.5

    def test_m2prime_witness_for_gevrey_half(self):
        v = check_sequence_condition(make_gevrey(0.5, 4096), "M2prime")
        assert v.holds
        # sup of (0.5 log p)/p sits at p = 3: D = 3^(1/6)
        assert v.witness["D"] == pytest.approx(3.0 ** (1.0 / 6.0), rel=1e-12)

    def test_m2_witness_against_binomial_oracle(self):
        v = check_sequence_condition(make_gevrey(0.5, 4096), "M2")
        assert v.holds
        # oracle: the exact scan maximum over p+q <= 256 via integer binomials
        oracle = max(
            0.5 * math.log(math.comb(k, k // 2)) / k for k in range(2, 257)
        )
        assert v.witness["log_C"] >= oracle - 1e-12
        assert v.witness["C"] <= math.sqrt(2.0) + 1e-6
        # quotient-route witness: mu_p <= A (M_p)^{1/p} with A -> sqrt(e)
        assert v.witness["A"] == pytest.approx(math.sqrt(math.e), abs=2e-3)

    def test_m2_fitted_constants_track_two_to_the_s(self):
        for s in (0.25, 1.0, 2.0):
            v = check_sequence_condition(make_gevrey(s, 2048), "M2")
            assert v.holds
            assert v.witness["C"] == pytest.approx(2.0**s, rel=2e-2)

    def test_algebra_holds_with_log2_margin_for_gevrey(self):
        v = check_sequence_condition(make_gevrey(1.0, 512), "algebra")
        assert v.holds
        assert v.witness["min_margin"] == pytest.approx(LOG2, abs=1e-12)

    def test_algebra_failure_pinpoints_a_pair(self):
        # concave logm = -p^2: products exceed shifted entries everywhere
        decaying = LogSequence(np.concatenate([[0.0], -np.arange(1, 10.0) ** 2]),
                               name="decaying")
        v = check_sequence_condition(decaying, "algebra")
        assert v.status is Status.FAILS
        p, q = v.counterexample["p"], v.counterexample["q"]
        logm = decaying.logm
        assert logm[p] + logm[q] > logm[p + q]

    def test_m0_fails_for_root_gevrey_and_holds_for_gevrey(self):
        assert check_sequence_condition(make_gevrey(0.5, 4096), "M0").fails
        v = check_sequence_condition(make_gevrey(1.0, 4096), "M0")
        assert v.holds
        # c -> 1/e for p!: (c(p+1))^p <= p!
        assert 0.3 < v.witness["c"] < 0.42

    def test_root_divergence(self):
        assert check_sequence_condition(make_gevrey(0.25, 4096),
                                        "root_divergence").holds
        flat = LogSequence(np.zeros(4097), name="ones")
        assert check_sequence_condition(flat, "root_divergence").fails

    def test_nonquasianalytic_battery(self):
        # sum p^(-s) converges iff s > 1
        assert check_sequence_condition(make_gevrey(0.5, 4096),
                                        "nonquasianalytic").fails
        assert check_sequence_condition(make_gevrey(1.0, 4096),
                                        "nonquasianalytic").fails
        assert check_sequence_condition(make_gevrey(2.0, 4096),
                                        "nonquasianalytic").holds

    def test_exotic_gate(self):
        exotic = LogSequence([0.0, 0.0] + [np.inf] * 7,
                             provenance="generated-from-weight")
        assert check_sequence_condition(exotic, "M1").holds
        assert check_sequence_condition(exotic, "normalized").holds
        with pytest.raises(ValueError):
            check_sequence_condition(exotic, "nonquasianalytic")

    def test_unknown_condition_rejected(self):
        with pytest.raises(ValueError):
            check_sequence_condition(make_gevrey(1.0, 16), "M3")


class TestCheckLC:
    def test_gevrey_family_is_lc(self):
        for s in (0.25, 0.5, 1.0, 2.0):
            assert check_LC(make_gevrey(s, 1024)).holds

    def test_constant_sequence_fails_root_divergence(self):
        v = check_LC(LogSequence(np.zeros(1025), name="ones"))
        assert v.status is Status.FAILS
        assert "root_divergence" in v.counterexample


# --- hypothesis property tests ----------------------------------------------

normalized_lc = st.lists(
    st.floats(min_value=0.0, max_value=2.0), min_size=10, max_size=80
).map(lambda steps: LogSequence(
    np.concatenate([[0.0], np.cumsum(np.cumsum(np.asarray(steps)))])))
# double cumsum: nonnegative increasing quotient logs => normalized log-convex


class TestLogConvexProperties:
    @given(normalized_lc)
    def test_algebra_follows_from_normalized_log_convexity(self, M):
        assert check_sequence_condition(M, "algebra").holds

    @given(normalized_lc)
    def test_m1_detected(self, M):
        assert check_sequence_condition(M, "M1").holds

    @given(normalized_lc)
    def test_roots_below_quotients(self, M):
        # (M_p)^{1/p} <= mu_p for normalized log-convex sequences
        p = np.arange(1, len(M.logm), dtype=float)
        roots = M.logm[1:] / p
        mus = quotients(M).logmu[1:]
        assert np.all(roots <= mus + 1e-9)

    @given(st.integers(min_value=2, max_value=40),
           st.floats(min_value=0.05, max_value=3.0))
    def test_geometric_scaling_shifts_witness(self, P, c):
        # multiplying M_p by c^p shifts every quotient by log c
        g = make_gevrey(1.0, max(P, 8))
        shifted = LogSequence(g.logm + np.arange(len(g.logm)) * math.log(c))
        q0 = quotients(g).logmu[1:]
        q1 = quotients(shifted).logmu[1:]
        np.testing.assert_allclose(q1 - q0, math.log(c), atol=1e-9)


# --- block sequences ---------------------------------------------------------


def _head(P=64):
    from scipy.special import gammaln
    return LogSequence(gammaln(np.arange(P + 1, dtype=float) + 1.0),
                       name="head", provenance="oscillator")


class TestBlockSequence:
    def test_head_values_verbatim(self):
        head = _head()
        bs = BlockSequence(head, (Block(64, 1000, 0.001),))
        for p in (0, 1, 7, 33, 64):
            mu, mv = eval_block(bs, p)
            assert mv == head.logm[p]
            assert mu == quotients(head).logmu[p]

    def test_closed_form_matches_naive_materialization(self):
        head = _head()
        blocks = (Block(64, 200, 0.01), Block(200, 1500, 0.002))
        bs = BlockSequence(head, blocks)
        # naive: extend quotients step by step
        logmu = list(quotients(head).logmu)
        logm = list(head.logm)
        for blk in blocks:
            for p in range(blk.start + 1, blk.end + 1):
                logmu.append(logmu[-1] + blk.log_beta)
                logm.append(logm[-1] + logmu[-1])
        for p in (65, 100, 200, 201, 777, 1500):
            mu, mv = eval_block(bs, p)
            assert mu == pytest.approx(logmu[p], rel=1e-12)
            assert mv == pytest.approx(logm[p], rel=1e-12)

    def test_astronomical_indices_stay_finite(self):
        head = _head()
        huge = 10**40
        bs = BlockSequence(head, (Block(64, huge, 1e-39),))
        mu, mv = eval_block(bs, huge)
        k = huge - 64
        assert mu == pytest.approx(quotients(head).logmu[64] + k * 1e-39, rel=1e-12)
        assert math.isfinite(mv)

    def test_arithmetic_progression_closed_form(self):
        head = _head()
        bs = BlockSequence(head, (Block(64, 10**6, 2e-6),))
        mu_start = quotients(head).logmu[64]
        n = 10**6 - 64
        mu_end, _ = eval_block(bs, 10**6)
        assert mu_end == pytest.approx(mu_start + n * 2e-6, rel=1e-13)

    def test_out_of_coverage_raises(self):
        bs = BlockSequence(_head(), (Block(64, 128, 0.1),))
        with pytest.raises(IndexError):
            eval_block(bs, 129)

    def test_blocks_must_tile(self):
        with pytest.raises(ValueError):
            BlockSequence(_head(), (Block(64, 100, 0.1), Block(101, 200, 0.1)))

    def test_block_must_advance(self):
        with pytest.raises(ValueError):
            Block(10, 10, 0.5)
