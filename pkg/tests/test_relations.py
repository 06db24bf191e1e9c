"""Relation deciders: ratio verdicts, transfer cross-check, oscillation probe.

Stirling gives the oracle for Gevrey ratios: r_p between G^a and G^b is
(a-b)*lgamma(p+1)/p, which drifts like (a-b)*(log p - 1).  Values frozen
below were computed from that closed form.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ultragrowth.seqcore import LogSequence, make_gevrey
from ultragrowth.assocfn import power, sampled_weight, trunc_log
from ultragrowth.relations import (
    RelationReport,
    crosscheck_transfer,
    oscillation_probe,
    seq_relate,
    wf_relate,
)
from ultragrowth.verdicts import Status, Verdict

GH = make_gevrey(0.5, 4096)
G1 = make_gevrey(1.0, 4096)
G2 = make_gevrey(2.0, 4096)
GQ = make_gevrey(0.25, 4096)

# 0.5 * lgamma(4097) / 4096
R_END_G1_VS_GH = 3.6595029371147523


class TestSeqRelate:
    def test_smaller_gevrey_dominated_with_unit_constant(self):
        rep = seq_relate(GH, G1, "preceq")
        assert rep.verdict.holds
        assert rep.verdict.witness["C"] == pytest.approx(1.0, abs=1e-12)

    def test_strict_smallness_of_gevrey_gap(self):
        assert seq_relate(GH, G1, "triangleleft").verdict.holds

    def test_reverse_direction_fails_with_pinpointed_index(self):
        rep = seq_relate(G1, GH, "preceq")
        assert rep.verdict.fails
        cex = rep.verdict.counterexample
        assert cex["at"] == 4096.0
        assert cex["value"] == pytest.approx(R_END_G1_VS_GH, rel=1e-12)

    def test_reflexive_equivalence(self):
        rep = seq_relate(GH, GH, "equiv")
        assert rep.verdict.holds
        assert rep.verdict.witness["C_forward"] == pytest.approx(1.0)
        assert rep.verdict.witness["C_backward"] == pytest.approx(1.0)
        assert rep.liminf_est == pytest.approx(1.0)
        assert rep.limsup_est == pytest.approx(1.0)

    def test_distinct_indices_are_not_equivalent(self):
        assert seq_relate(GH, G2, "equiv").verdict.fails

    def test_strictness_implies_domination_on_corpus(self):
        for M, N in [(GQ, GH), (GH, G1), (G1, G2), (GQ, G2)]:
            if seq_relate(M, N, "triangleleft").verdict.holds:
                assert seq_relate(M, N, "preceq").verdict.holds

    def test_estimates_are_ordered(self):
        rep = seq_relate(G1, GH, "preceq")
        assert rep.liminf_est <= rep.limsup_est

    def test_unknown_relation_rejected(self):
        with pytest.raises(ValueError):
            seq_relate(GH, G1, "subset")

    @given(st.floats(0.5, 2.0))
    def test_scaling_target_rescales_witness_without_flip(self, c):
        scaled = LogSequence(G1.logm + np.arange(4097) * math.log(c),
                             name="scaled")
        base = seq_relate(GH, G1, "preceq")
        moved = seq_relate(GH, scaled, "preceq")
        assert moved.verdict.status is base.verdict.status
        assert moved.verdict.witness["C"] == pytest.approx(
            base.verdict.witness["C"] / c, rel=1e-9)

    def test_report_serializes_with_full_trace(self):
        rep = seq_relate(GH, G1, "preceq")
        js = rep.to_json()
        assert js["relation"] == "preceq"
        assert len(js["ratio_trace"]) == len(rep.ratio_trace)
        assert js["verdict"]["status"] == "holds"

    def test_report_rejects_crossed_estimates(self):
        with pytest.raises(ValueError):
            RelationReport("preceq", Verdict(Status.HOLDS, witness={"C": 1.0}),
                           liminf_est=2.0, limsup_est=1.0)


class TestWfRelate:
    def test_same_weight_is_equivalent(self):
        assert wf_relate(power(2.0), power(2.0), "sim").verdict.holds

    def test_lower_power_is_dominated(self):
        rep = wf_relate(power(2.0), power(1.5), "preceq")
        assert rep.verdict.holds
        rep = wf_relate(power(2.0), power(1.5), "triangleleft")
        assert rep.verdict.holds

    def test_higher_power_is_not_dominated(self):
        assert wf_relate(power(1.5), power(2.0), "preceq").verdict.fails

    def test_vanishing_weight_is_inconclusive(self):
        zero = sampled_weight(np.geomspace(0.1, 1e5, 50), np.zeros(50))
        rep = wf_relate(zero, power(2.0), "preceq")
        assert rep.verdict.status is Status.INCONCLUSIVE

    def test_log_weight_strictly_below_power(self):
        assert wf_relate(power(1.0), trunc_log(), "triangleleft").verdict.holds


class TestCrosscheckTransfer:
    def test_corpus_agreement_all_ordered_pairs(self):
        corpus = [GQ, GH, G1, G2]
        for M in corpus:
            for N in corpus:
                if M is N:
                    continue
                v = crosscheck_transfer(M, N)
                assert v.holds, (M.name, N.name, v.detail)

    def test_reflexive_with_identity_scale(self):
        v = crosscheck_transfer(GH, GH)
        assert v.holds
        assert v.witness["A"] == 1.0
        assert v.witness["B"] == 0.0

    def test_requires_lc_inputs(self):
        bumpy = LogSequence(np.array([0.0, 2.0, 2.1, 6.0, 6.05, 11.0, 11.02,
                                      18.0, 18.01, 26.0]))
        with pytest.raises(ValueError):
            crosscheck_transfer(bumpy, GH)


class TestOscillationProbe:
    def test_identical_sequences_pin_unit_estimates(self):
        rep = oscillation_probe(GH, GH)
        assert rep.liminf_est == pytest.approx(1.0, abs=1e-9)
        assert rep.limsup_est == pytest.approx(1.0, abs=1e-9)
        assert rep.verdict.fails

    def test_monotone_gap_shows_no_oscillation(self):
        rep = oscillation_probe(GH, G1)
        assert rep.verdict.fails
        assert rep.limsup_est <= 1.0
        assert rep.liminf_est < 0.1

    def test_too_few_anchors_is_inconclusive(self):
        rep = oscillation_probe(GH, G1, anchors=(4, 16, 64))
        assert rep.verdict.status is Status.INCONCLUSIVE

    def test_growing_records_hold(self):
        # quotients equal the G^1 targets except at six anchor indices,
        # where the gap alternates with growing amplitude on both sides
        anchors = (16, 64, 256, 1024, 2048, 4000)
        bumps = (1.0, -1.0, 2.0, -2.0, 3.0, -3.0)
        p = np.arange(1, 4097, dtype=float)
        logmu = np.log(p)
        for a, b in zip(anchors, bumps):
            logmu[a - 1] += b
        M = LogSequence(np.concatenate([[0.0], np.cumsum(logmu)]))
        rep = oscillation_probe(M, G1, anchors=anchors)
        assert rep.verdict.holds
        assert rep.verdict.witness["up_records"] == 2
        assert rep.verdict.witness["down_records"] == 2

    def test_anchor_beyond_window_raises(self):
        with pytest.raises(IndexError):
            oscillation_probe(GH, G1, anchors=(16, 64, 256, 10**9))
