"""Weight matrix model, conditions, and relations.

Fitted constants are diagnostics, so the oracle here is certificate
replay: take the witness a check returns and verify the raw inequality
it claims on a sweep of index pairs.  Closed forms (binomial sums via
lgamma) pin the suprema where the scaled Gevrey families admit them.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import gammaln

from ultragrowth.seqcore import LogSequence, make_gevrey
from ultragrowth.matrices import (
    MATRIX_CONDITIONS,
    WeightMatrix,
    check_matrix_condition,
    constant_matrix,
    matrix_nqa,
    relate_matrices,
)

P = 512
LAMS = (0.25, 0.5, 1.0, 2.0, 4.0)


def scaled_gevrey(s: float, lams=LAMS, P: int = P,
                  name: str = "") -> WeightMatrix:
    """Levels lam^p (p!)^s: the hand-made stand-in for generated matrices."""
    p = np.arange(P + 1, dtype=float)
    entries = {}
    for lam in lams:
        logm = p * np.log(lam) + s * gammaln(p + 1)
        logm[0] = 0.0
        entries[lam] = LogSequence(logm, name=f"{lam:g}^p*G^{s:g}")
    return WeightMatrix(entries, name=name or f"scaled-G^{s:g}")


def flat_exotic() -> WeightMatrix:
    """Levels that are 1 up to a threshold and infinite beyond it."""
    entries = {}
    for lam, thr in ((0.25, 4), (0.5, 2), (1.0, 1)):
        logm = np.where(np.arange(13) <= thr, 0.0, np.inf)
        entries[lam] = LogSequence(logm, provenance="generated-from-weight")
    return WeightMatrix(entries, name="flat-exotic")


MH = scaled_gevrey(0.5)
M1 = scaled_gevrey(1.0)


class TestWeightMatrixModel:
    def test_levels_sorted_and_shared_truncation(self):
        m = WeightMatrix({4.0: make_gevrey(1.0, P), 1.0: make_gevrey(1.0, P)})
        assert m.lambdas == (1.0, 4.0)
        assert m.truncation == P
        assert m.entry(4.0) is m.entries[4.0]

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="at least one level"):
            WeightMatrix({})

    def test_rejects_nonpositive_level(self):
        with pytest.raises(ValueError, match="positive"):
            WeightMatrix({0.0: make_gevrey(1.0, 16)})

    def test_rejects_mixed_truncation(self):
        with pytest.raises(ValueError, match="truncation"):
            WeightMatrix({1.0: make_gevrey(1.0, 16),
                          2.0: make_gevrey(1.0, 32)})

    def test_rejects_unnormalized_start(self):
        bad = LogSequence(np.linspace(1.0, 9.0, 17))
        with pytest.raises(ValueError, match="logm\\[0\\]"):
            WeightMatrix({1.0: bad})

    def test_rejects_level_decrease(self):
        lo = make_gevrey(1.0, 16)
        hi = LogSequence(lo.logm * 0.5)
        with pytest.raises(ValueError, match="decrease"):
            WeightMatrix({1.0: lo, 2.0: hi})

    def test_exotic_levels_admitted_when_monotone(self):
        m = flat_exotic()
        assert m.entry(1.0).is_exotic
        assert m.lambdas == (0.25, 0.5, 1.0)

    def test_constant_matrix_builder(self):
        m = constant_matrix(make_gevrey(0.5, P), LAMS)
        assert m.lambdas == LAMS
        assert all(m.entry(lam) is m.entry(1.0) for lam in LAMS)


def replay_pair_certificate(M, lam, wit, lhs_of, rhs_of):
    """Check the claimed inequality on a grid of (p, q) pairs."""
    kappa = wit["kappa"]
    small, big = M.entry(lam).logm, M.entry(kappa).logm
    ps = np.arange(0, 65)
    for p in ps:
        q = np.arange(0, 65 - p)
        lhs = lhs_of(small, p, q)
        rhs = rhs_of(big, wit, p, q)
        ok = (lhs <= rhs + 1e-9) | np.isposinf(rhs)
        assert ok.all(), (lam, kappa, p, q[~ok][:3])


class TestPairConditions:
    def test_c37LR_holds_with_matching_level_and_unit_constant(self):
        v = check_matrix_condition(MH, "c37LR")
        assert v.holds
        for lam in LAMS:
            wit = v.witness["per_lambda"][f"{lam:g}"]
            assert wit["kappa"] == lam
            assert wit["A"] == 1.0

    def test_c37LR_certificate_replays(self):
        v = check_matrix_condition(MH, "c37LR")
        for lam in LAMS:
            replay_pair_certificate(
                MH, lam, v.witness["per_lambda"][f"{lam:g}"],
                lambda s, p, q: s[p] + s[q],
                lambda b, w, p, q: (p + q) * w["log_A"] + b[p + q])

    def test_M2R_supremum_matches_central_binomial(self):
        v = check_matrix_condition(MH, "M2R")
        assert v.holds
        wit = v.witness["per_lambda"]["1"]
        assert wit["kappa"] == 1.0
        # worst diagonal is the last one, split in the middle
        want = 0.5 * (gammaln(P + 1) - 2 * gammaln(P // 2 + 1)) / P
        assert wit["log_A"] == pytest.approx(want, rel=1e-12)

    def test_M2R_certificate_replays(self):
        v = check_matrix_condition(M1, "M2R")
        assert v.holds
        for lam in LAMS:
            replay_pair_certificate(
                M1, lam, v.witness["per_lambda"][f"{lam:g}"],
                lambda s, p, q: s[p + q],
                lambda b, w, p, q: (p + q) * w["log_A"] + b[p] + b[q])

    def test_M2primeR_and_B_hold_on_scaled_family(self):
        for cond in ("M2primeR", "M2primeB"):
            v = check_matrix_condition(MH, cond)
            assert v.holds, cond
            wit = v.witness["per_lambda"]["2"]
            assert wit["kappa"] == 2.0
            # shifted-by-one bound: log A fitted over (log lam + s log(p+1))/(p+1)
            p = np.arange(0, P)
            want = np.max((math.log(2.0) + 0.5 * np.log(p + 1.0)) / (p + 1))
            assert wit["log_A"] == pytest.approx(want, rel=1e-12)

    def test_c12L2R_holds_for_root_factorial_growth(self):
        v = check_matrix_condition(MH, "c12L2R")
        assert v.holds
        wit = v.witness["per_lambda"]["1"]
        replay_pair_certificate(
            MH, 1.0, wit,
            lambda s, p, q: 0.5 * p * np.log(np.maximum(p, 1)) + s[q],
            lambda b, w, p, q: (p + q) * w["log_A"] + b[p + q])

    def test_c12L2R_fails_below_root_factorial(self):
        thin = scaled_gevrey(0.25)
        v = check_matrix_condition(thin, "c12L2R")
        assert v.fails
        assert "lambda" in v.counterexample

    def test_c12L2B_reports_slack_per_fixed_factor(self):
        v = check_matrix_condition(MH, "c12L2B")
        assert v.holds
        wit = v.witness["per_lambda"]["1"]
        slack = wit["log_B_per_C"]
        assert set(slack) == {"1", "2", "4"}
        # larger C only loosens the bound
        assert slack["1"] >= slack["2"] >= slack["4"]

    def test_beurling_square_fails_on_constant_gevrey_half(self):
        m = constant_matrix(make_gevrey(0.5, P), LAMS)
        v = check_matrix_condition(m, "beurling_square")
        assert v.fails

    def test_beurling_square_holds_for_root_power_levels(self):
        entries = {
            lam: LogSequence(np.concatenate(
                [[0.0], lam * np.sqrt(np.arange(1.0, P + 1))]))
            for lam in LAMS
        }
        v = check_matrix_condition(WeightMatrix(entries), "beurling_square")
        assert v.holds
        wit = v.witness["per_lambda"]["4"]
        assert wit["kappa"] <= 4.0
        small = entries[wit["kappa"]].logm
        big = entries[4.0].logm
        p = np.arange(1, P + 1)
        assert np.all(2 * small[p] <= p * wit["log_A"] + big[p] + 1e-9)

    def test_exotic_matrix_passes_pair_bound_with_unit_constant(self):
        v = check_matrix_condition(flat_exotic(), "c37LR")
        assert v.holds
        assert all(w["A"] == 1.0 for w in v.witness["per_lambda"].values())

    def test_exotic_matrix_fails_merge_bound(self):
        # an infinite entry cannot be split into two finite ones
        v = check_matrix_condition(flat_exotic(), "M2R")
        assert v.fails

    def test_unknown_condition_rejected(self):
        with pytest.raises(ValueError, match="unknown matrix condition"):
            check_matrix_condition(MH, "M3")


class TestStructuralConditions:
    def test_monotone_holds_with_gap_witness(self):
        v = check_matrix_condition(MH, "monotone")
        assert v.holds
        assert v.witness["min_gap"] >= 0.0

    def test_constant_holds_for_scaled_levels(self):
        # levels differ by lam^p only, which equivalence absorbs
        v = check_matrix_condition(MH, "constant")
        assert v.holds
        assert v.witness["C"] >= 1.0

    def test_constant_fails_across_growth_classes(self):
        entries = {1.0: make_gevrey(0.5, P), 2.0: make_gevrey(1.0, P)}
        v = check_matrix_condition(WeightMatrix(entries), "constant")
        assert v.fails

    def test_standard_log_convex_needs_normalized_levels(self):
        good = scaled_gevrey(1.0, lams=(1.0, 2.0, 4.0))
        assert check_matrix_condition(good, "standard_log_convex").holds
        v = check_matrix_condition(MH, "standard_log_convex")
        assert v.fails
        assert "0.25" in v.detail


class TestRelateMatrices:
    def test_reflexive_roumieu_uses_matching_level(self):
        v = relate_matrices(MH, MH, "roumieu")
        assert v.holds
        for lam in LAMS:
            wit = v.witness["per_lambda"][f"{lam:g}"]
            assert wit["kappa"] == lam
            assert wit["C"] == pytest.approx(1.0, abs=1e-12)

    def test_reflexive_beurling_uses_matching_level(self):
        v = relate_matrices(MH, MH, "beurling")
        assert v.holds
        assert v.witness["per_lambda"]["2"]["kappa"] == 2.0

    def test_roumieu_across_growth_classes(self):
        assert relate_matrices(MH, M1, "roumieu").holds
        v = relate_matrices(M1, MH, "roumieu")
        assert v.fails
        assert "lambda" in v.counterexample

    def test_beurling_across_growth_classes(self):
        assert relate_matrices(MH, M1, "beurling").holds
        assert relate_matrices(M1, MH, "beurling").fails

    def test_strong_relation_between_growth_classes(self):
        assert relate_matrices(MH, M1, "strong").holds
        assert relate_matrices(M1, MH, "strong").fails
        # equivalence is not strict smallness
        assert not relate_matrices(MH, MH, "strong").holds

    def test_roumieu_witnesses_compose_transitively(self):
        A, B, C = scaled_gevrey(0.25), scaled_gevrey(0.5), scaled_gevrey(1.0)
        rab = relate_matrices(A, B, "roumieu")
        rbc = relate_matrices(B, C, "roumieu")
        rac = relate_matrices(A, C, "roumieu")
        assert rab.holds and rbc.holds and rac.holds
        for lam in LAMS:
            c1 = rab.witness["per_lambda"][f"{lam:g}"]
            mid = c1["kappa"]
            c2 = rbc.witness["per_lambda"][f"{mid:g}"]
            direct = rac.witness["per_lambda"][f"{lam:g}"]
            assert direct["C"] <= c1["C"] * c2["C"] + 1e-9

    def test_inconclusive_when_partner_search_is_open(self):
        # a ratio that climbs gently right at the window end stays
        # undecided, so the existential search cannot settle either way
        base = make_gevrey(1.0, P)
        bump = np.zeros(P + 1)
        tail = np.arange(P + 1) > 0.9 * P
        bump[tail] = np.linspace(0.0, 0.08 * P, tail.sum())
        high = LogSequence(base.logm + bump)
        M = WeightMatrix({1.0: high})
        N = WeightMatrix({1.0: base})
        v = relate_matrices(M, N, "roumieu")
        assert v.status.name == "INCONCLUSIVE"
        assert "grid exhausted" in v.detail

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="unknown matrix relation"):
            relate_matrices(MH, MH, "mixed")


class TestMatrixNqa:
    def test_constant_gevrey_one_fails_both_modes(self):
        m = constant_matrix(make_gevrey(1.0, 4096), LAMS)
        assert matrix_nqa(m, "roumieu").fails
        assert matrix_nqa(m, "beurling").fails

    def test_constant_gevrey_two_holds_both_modes(self):
        m = constant_matrix(make_gevrey(2.0, 4096), LAMS)
        v = matrix_nqa(m, "roumieu")
        assert v.holds
        assert v.witness["lambda0"] == 0.25
        vb = matrix_nqa(m, "beurling")
        assert vb.holds
        assert set(vb.witness["partial_sums"]) == {"0.25", "0.5", "1", "2", "4"}

    def test_scaled_family_keeps_level_quantifier_honest(self):
        m = scaled_gevrey(2.0, P=4096)
        assert matrix_nqa(m, "roumieu").holds
        assert matrix_nqa(m, "beurling").holds

    def test_exotic_matrix_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            matrix_nqa(flat_exotic(), "roumieu")

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="unknown mode"):
            matrix_nqa(MH, "strong")


@given(st.lists(st.floats(min_value=0.1, max_value=8.0),
                min_size=1, max_size=5, unique=True))
def test_constant_matrices_pass_structure_checks(lams):
    m = constant_matrix(make_gevrey(0.5, 64), sorted(lams))
    assert check_matrix_condition(m, "monotone").holds
    assert check_matrix_condition(m, "constant").holds
    v = relate_matrices(m, m, "roumieu")
    assert v.holds
    assert all(w["C"] == pytest.approx(1.0, abs=1e-12)
               for w in v.witness["per_lambda"].values())


@given(st.floats(min_value=0.3, max_value=3.0),
       st.floats(min_value=0.3, max_value=1.0))
def test_strong_relation_tracks_growth_gap(s, gap):
    # gaps well below 0.3 drift too slowly for a P=512 window to call
    lams = (0.5, 1.0, 2.0)
    lo = scaled_gevrey(s, lams=lams, P=P)
    hi = scaled_gevrey(s + gap, lams=lams, P=P)
    assert relate_matrices(lo, hi, "strong").holds
    assert not relate_matrices(hi, lo, "strong").holds


def test_all_conditions_have_a_decision_path():
    for cond in MATRIX_CONDITIONS:
        v = check_matrix_condition(MH, cond)
        assert v.status.name in ("HOLDS", "FAILS", "INCONCLUSIVE"), cond
