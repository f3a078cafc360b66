import math

import pytest

from acnmap.errors import InvariantViolation
from acnmap.model import (
    AcnDiagnostics,
    EvalResult,
    MappedAcn,
    NeuronSpec,
    SplitWeights,
    TechConstraints,
)


class TestNeuronSpec:
    def test_valid(self):
        s = NeuronSpec(weights=(0.5, -0.25), bias=0.1, name="a")
        assert s.n == 2
        assert s.quantization == "real"

    def test_empty_weights_rejected(self):
        with pytest.raises(InvariantViolation):
            NeuronSpec(weights=())

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
    def test_nonfinite_weight_rejected(self, bad):
        with pytest.raises(InvariantViolation):
            NeuronSpec(weights=(1.0, bad))

    def test_nonfinite_bias_rejected(self):
        with pytest.raises(InvariantViolation):
            NeuronSpec(weights=(1.0,), bias=float("nan"))

    def test_binary_requires_unit_weights(self):
        NeuronSpec(weights=(1.0, -1.0), quantization="binary")
        with pytest.raises(InvariantViolation):
            NeuronSpec(weights=(1.0, 0.5), quantization="binary")

    def test_kbit_requires_bits(self):
        NeuronSpec(weights=(0.25,), quantization="kbit", bits=4)
        with pytest.raises(InvariantViolation):
            NeuronSpec(weights=(0.25,), quantization="kbit")

    def test_unknown_quantization_rejected(self):
        with pytest.raises(InvariantViolation):
            NeuronSpec(weights=(1.0,), quantization="ternary")


class TestSplitWeights:
    def test_cover_must_be_disjoint_and_complete(self):
        with pytest.raises(InvariantViolation):
            SplitWeights(positive={0: 1.0}, negative={0: 1.0}, zeros=frozenset(),
                         wT_pos=1.0, wT_neg=1.0, wT=2.0)
        with pytest.raises(InvariantViolation):
            SplitWeights(positive={0: 1.0}, negative={2: 1.0}, zeros=frozenset(),
                         wT_pos=1.0, wT_neg=1.0, wT=2.0)

    def test_totals_checked(self):
        with pytest.raises(InvariantViolation):
            SplitWeights(positive={0: 1.0}, negative={}, zeros=frozenset({1}),
                         wT_pos=2.0, wT_neg=0.0, wT=2.0)


def _simple_mapped(**overrides):
    fields = dict(
        name="m", n=2,
        cap_pos={0: 75.0}, cap_neg={1: 25.0},
        cb_pos=0.0, cb_neg=0.0, cd_pos=0.0, cd_neg=50.0,
        ct=100.0, ct_pos=75.0, ct_neg=25.0,
        mapping_kind="conditional",
        diagnostics=AcnDiagnostics(delta=0.5, ca_pos=75.0, ca_neg=75.0),
    )
    fields.update(overrides)
    return MappedAcn(**fields)


class TestMappedAcn:
    def test_valid(self):
        m = _simple_mapped()
        assert m.sum_cd == 50.0
        assert m.total_capacitance == 150.0

    def test_negative_capacitance_rejected(self):
        with pytest.raises(InvariantViolation):
            _simple_mapped(cd_pos=-1.0)

    def test_synapse_index_bounds(self):
        with pytest.raises(InvariantViolation):
            _simple_mapped(cap_pos={5: 1.0})

    def test_index_on_both_trees_rejected(self):
        with pytest.raises(InvariantViolation):
            _simple_mapped(cap_neg={0: 25.0},
                           diagnostics=AcnDiagnostics(0.5, 75.0, 75.0))

    def test_ct_split_checked_for_conditional(self):
        with pytest.raises(InvariantViolation):
            _simple_mapped(ct_pos=80.0,
                           diagnostics=AcnDiagnostics(0.5, 80.0, 75.0))

    def test_diagnostics_consistency_checked(self):
        with pytest.raises(InvariantViolation):
            _simple_mapped(diagnostics=AcnDiagnostics(0.5, 75.0, 80.0))


class TestTechConstraints:
    def test_defaults_valid(self):
        t = TechConstraints()
        assert t.c_min > 0

    def test_bounds(self):
        with pytest.raises(InvariantViolation):
            TechConstraints(c_min=0.0)
        with pytest.raises(InvariantViolation):
            TechConstraints(v_max=-1.0)
        with pytest.raises(InvariantViolation):
            TechConstraints(pillar_bias=-0.1)


class TestEvalResult:
    def test_tie_resolves_to_one(self):
        r = EvalResult(vm_pos=0.5, vm_neg=0.5, delta_vm=0.0, output=1)
        assert r.output == 1
        with pytest.raises(InvariantViolation):
            EvalResult(vm_pos=0.5, vm_neg=0.5, delta_vm=0.0, output=0)

    def test_sign_consistency(self):
        with pytest.raises(InvariantViolation):
            EvalResult(vm_pos=0.4, vm_neg=0.5, delta_vm=-0.1, output=1)
        r = EvalResult(vm_pos=0.4, vm_neg=0.5, delta_vm=-0.1, output=0)
        assert math.isclose(r.delta_vm, -0.1)
