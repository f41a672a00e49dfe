import math
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from sitcov.faults import FaultId, apply_fault, catalog, tightens
from sitcov.simulator.config import PerceptionParams
from sitcov.simulator.perception import Detection, aeb_decision

DEFAULTS = PerceptionParams()


class TestCatalog:
    def test_four_entries_in_order(self):
        assert [s.id for s in catalog()] == [FaultId.NONE, FaultId.F1, FaultId.F2, FaultId.F3]

    def test_f1_mentions_probability_threshold(self):
        assert "probability threshold" in catalog()[1].description

    def test_each_fault_tightens_one_gate(self):
        fields = [s.field for s in catalog()[1:]]
        assert sorted(fields) == ["centering_limit", "prob_threshold", "size_threshold"]
        assert all(tightens(DEFAULTS, s) for s in catalog()[1:])
        assert not tightens(DEFAULTS, catalog()[0])


class TestApplyFault:
    def test_none_is_identity(self):
        assert apply_fault(DEFAULTS, FaultId.NONE) == DEFAULTS

    def test_f1(self):
        p = apply_fault(DEFAULTS, "f1")
        assert p == replace(DEFAULTS, prob_threshold=0.95)

    def test_f2(self):
        p = apply_fault(DEFAULTS, FaultId.F2)
        assert p.centering_limit == pytest.approx(math.radians(10.0))
        assert p.centering_limit < DEFAULTS.centering_limit
        assert (p.prob_threshold, p.size_threshold) == (DEFAULTS.prob_threshold,
                                                        DEFAULTS.size_threshold)

    def test_f3(self):
        p = apply_fault(DEFAULTS, FaultId.F3)
        assert p.size_threshold == 0.20 > DEFAULTS.size_threshold

    def test_original_untouched(self):
        p = PerceptionParams()
        apply_fault(p, FaultId.F1)
        assert p == PerceptionParams()

    def test_unknown_fault(self):
        with pytest.raises(ValueError):
            apply_fault(DEFAULTS, "f9")

    @given(st.booleans(), st.floats(0, 1), st.floats(0, 1), st.floats(-math.pi, math.pi),
           st.sampled_from(list(FaultId)))
    def test_gate_tightening(self, visible, conf, size, bearing, fault):
        d = Detection(visible, conf if visible else 0.0, size, bearing)
        if aeb_decision(d, apply_fault(DEFAULTS, fault)):
            assert aeb_decision(d, DEFAULTS)
