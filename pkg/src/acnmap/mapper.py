"""Lowering passes from abstract neuron weights to ACN capacitance values.

The central pass is the conditional mapping: it preserves the comparator
condition w.x >= tau rather than absolute voltage levels, which makes it
optimal in the sense of minimum total ballast and maximum normalized
capacitance magnitude. The alternative passes (vectored bias, balanced,
ReLU) trade those optima for other properties, and the remaining passes
handle technology constraints: pillars, parasitic compensation, scaling
constant selection, pruning and a realizability audit.

Every pass is a pure function returning a new ``MappedAcn``; pipelines
compose by plain function application.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AllZeroWeights, InvariantViolation, WeightNormExceedsVmax
from .model import (
    AcnDiagnostics,
    MappedAcn,
    NeuronSpec,
    SplitWeights,
    TechConstraints,
    _ascending_sum,
)


def _require_finite(name: str, **caps: float) -> None:
    """Extreme bias/weight scale ratios can push a bias or ballast value
    past the float range; fail with the cause rather than an opaque
    invalid-netlist error."""
    for label, value in caps.items():
        if not math.isfinite(value):
            raise InvariantViolation(
                f"{name}: {label} overflows the representable capacitance"
                f" range; the bias-to-weight scale ratio is too extreme"
                f" for this mapping"
            )


def split_weights(spec: NeuronSpec) -> SplitWeights:
    """Resolve a weight vector into positive-tree and negative-tree
    magnitude maps plus the per-tree scaling totals.

    Raises AllZeroWeights when every weight and the bias are zero: such a
    neuron has no comparator condition to preserve.
    """
    positive: dict[int, float] = {}
    negative: dict[int, float] = {}
    zeros: set[int] = set()
    for i, w in enumerate(spec.weights):
        if w > 0.0:
            positive[i] = w
        elif w < 0.0:
            negative[i] = -w
        else:
            zeros.add(i)
    if not positive and not negative and spec.bias == 0.0:
        raise AllZeroWeights(f"{spec.name}: all weights and bias are zero")
    wT_pos = _ascending_sum(positive[i] for i in sorted(positive))
    wT_neg = _ascending_sum(negative[i] for i in sorted(negative))
    return SplitWeights(
        positive=positive,
        negative=negative,
        zeros=frozenset(zeros),
        wT_pos=wT_pos,
        wT_neg=wT_neg,
        wT=wT_pos + wT_neg,
    )


def _synapse_caps(split: SplitWeights, ct: float) -> tuple[dict, dict, float, float]:
    """Proportional synapse sizing C_i = ct * |w_i| / w_T, evaluated per
    nonzero weight only. Returns the two maps and their ascending sums."""
    cap_pos = {i: ct * split.positive[i] / split.wT for i in sorted(split.positive)}
    cap_neg = {i: ct * split.negative[i] / split.wT for i in sorted(split.negative)}
    ct_pos = _ascending_sum(cap_pos.values())
    ct_neg = _ascending_sum(cap_neg.values())
    return cap_pos, cap_neg, ct_pos, ct_neg


def _bias_caps(tau: float, ct: float, wT: float) -> tuple[float, float]:
    """Bias capacitor on the tree opposing the threshold sign."""
    if tau >= 0.0:
        return 0.0, tau * ct / wT
    return -tau * ct / wT, 0.0


def _bias_only_netlist(spec: NeuronSpec, ct: float, kind: str) -> MappedAcn:
    """Degenerate neuron with no nonzero weights but a nonzero bias: one
    tree carries the full budget as an always-on bias capacitor, the other
    carries an equal ballast, reproducing y = (tau <= 0) at any supply."""
    tau = spec.bias
    cb_pos, cb_neg = (ct, 0.0) if tau < 0.0 else (0.0, ct)
    cd_pos, cd_neg = (0.0, ct) if tau < 0.0 else (ct, 0.0)
    return MappedAcn(
        name=spec.name,
        n=spec.n,
        cap_pos={},
        cap_neg={},
        cb_pos=cb_pos,
        cb_neg=cb_neg,
        cd_pos=cd_pos,
        cd_neg=cd_neg,
        ct=ct,
        ct_pos=0.0,
        ct_neg=0.0,
        mapping_kind=kind,
        diagnostics=AcnDiagnostics(
            delta=0.0, ca_pos=cb_pos + cd_pos, ca_neg=cb_neg + cd_neg
        ),
    )


def conditional_map(spec: NeuronSpec, ct: float) -> MappedAcn:
    """Map preserving only the comparator condition.

    Synapses scale proportionally into each tree; the bias lands on the
    tree opposing the threshold sign; a single ballast capacitor sized by
    the tree-weight difference equalizes the two tree totals, so exactly
    one of the ballasts equals the opposite tree's bias value.
    """
    if not (ct > 0.0):
        raise ValueError("ct must be positive")
    split = split_weights(spec)
    if split.wT == 0.0:
        return _bias_only_netlist(spec, ct, "conditional")
    cap_pos, cap_neg, ct_pos, ct_neg = _synapse_caps(split, ct)
    cb_pos, cb_neg = _bias_caps(spec.bias, ct, split.wT)
    delta = split.wT_pos - split.wT_neg
    if delta >= 0.0:
        cd_neg = delta * ct / split.wT + cb_pos
        cd_pos = cb_neg
    else:
        cd_pos = -delta * ct / split.wT + cb_neg
        cd_neg = cb_pos
    _require_finite(spec.name, cb_pos=cb_pos, cb_neg=cb_neg,
                    cd_pos=cd_pos, cd_neg=cd_neg)
    return MappedAcn(
        name=spec.name,
        n=spec.n,
        cap_pos=cap_pos,
        cap_neg=cap_neg,
        cb_pos=cb_pos,
        cb_neg=cb_neg,
        cd_pos=cd_pos,
        cd_neg=cd_neg,
        ct=ct,
        ct_pos=ct_pos,
        ct_neg=ct_neg,
        mapping_kind="conditional",
        diagnostics=AcnDiagnostics(
            delta=delta,
            ca_pos=ct_pos + cb_pos + cd_pos,
            ca_neg=ct_neg + cb_neg + cd_neg,
        ),
    )


def _augmented(spec: NeuronSpec) -> NeuronSpec:
    """Fold the bias into an (N+1)-th always-on weight of -tau."""
    return NeuronSpec(
        weights=spec.weights + (-spec.bias,),
        bias=0.0,
        name=spec.name,
        quantization="real",
    )


def _reclassify_bias_slot(
    cap_pos: dict, cap_neg: dict, slot: int
) -> tuple[dict, dict, float, float]:
    """Pull the augmented always-on slot out of the synapse maps; it is
    physically the bias capacitor of its tree."""
    cb_pos = cb_neg = 0.0
    if slot in cap_pos:
        cb_pos = cap_pos.pop(slot)
    elif slot in cap_neg:
        cb_neg = cap_neg.pop(slot)
    return cap_pos, cap_neg, cb_pos, cb_neg


def vectored_bias_map(spec: NeuronSpec, ct: float) -> MappedAcn:
    """Conditional mapping of the bias-augmented weight vector.

    The -tau slot becomes the always-on bias capacitor of its tree, and
    because the augmented vector has no separate threshold, at least one
    ballast capacitor is a no-fit (zero).
    """
    if not (ct > 0.0):
        raise ValueError("ct must be positive")
    split_weights(spec)  # surfaces AllZeroWeights on the original vector
    aug = _augmented(spec)
    split = split_weights(aug)
    cap_pos, cap_neg, _, _ = _synapse_caps(split, ct)
    cap_pos, cap_neg, cb_pos, cb_neg = _reclassify_bias_slot(cap_pos, cap_neg, spec.n)
    ct_pos = _ascending_sum(cap_pos.values())
    ct_neg = _ascending_sum(cap_neg.values())
    delta = split.wT_pos - split.wT_neg
    if delta >= 0.0:
        cd_neg, cd_pos = delta * ct / split.wT, 0.0
    else:
        cd_pos, cd_neg = -delta * ct / split.wT, 0.0
    return MappedAcn(
        name=spec.name,
        n=spec.n,
        cap_pos=cap_pos,
        cap_neg=cap_neg,
        cb_pos=cb_pos,
        cb_neg=cb_neg,
        cd_pos=cd_pos,
        cd_neg=cd_neg,
        ct=ct,
        ct_pos=ct_pos,
        ct_neg=ct_neg,
        mapping_kind="conditional_vectored_bias",
        diagnostics=AcnDiagnostics(
            delta=delta,
            ca_pos=ct_pos + cb_pos + cd_pos,
            ca_neg=ct_neg + cb_neg + cd_neg,
        ),
    )


def balanced_map(spec: NeuronSpec, ct: float) -> MappedAcn:
    """Mapping with ballast on both trees.

    Costs more total capacitance than the conditional mapping (the ballast
    total is at least ct) and shrinks the differential voltage, but keeps
    every capacitor populated, which can simplify layout.
    """
    if not (ct > 0.0):
        raise ValueError("ct must be positive")
    split = split_weights(spec)
    if split.wT == 0.0:
        return _bias_only_netlist(spec, ct, "balanced")
    cap_pos, cap_neg, ct_pos, ct_neg = _synapse_caps(split, ct)
    cb_pos, cb_neg = _bias_caps(spec.bias, ct, split.wT)
    cd_pos = split.wT_neg * ct / split.wT + cb_neg
    cd_neg = split.wT_pos * ct / split.wT + cb_pos
    _require_finite(spec.name, cb_pos=cb_pos, cb_neg=cb_neg,
                    cd_pos=cd_pos, cd_neg=cd_neg)
    return MappedAcn(
        name=spec.name,
        n=spec.n,
        cap_pos=cap_pos,
        cap_neg=cap_neg,
        cb_pos=cb_pos,
        cb_neg=cb_neg,
        cd_pos=cd_pos,
        cd_neg=cd_neg,
        ct=ct,
        ct_pos=ct_pos,
        ct_neg=ct_neg,
        mapping_kind="balanced",
        diagnostics=AcnDiagnostics(
            delta=split.wT_pos - split.wT_neg,
            ca_pos=ct_pos + cb_pos + cd_pos,
            ca_neg=ct_neg + cb_neg + cd_neg,
        ),
    )


def relu_map(spec: NeuronSpec, ct: float, v_max: float) -> MappedAcn:
    """Mapping that reproduces the dot product itself, not just its sign:
    v_max * (C . x) equals w.x - tau for every binary input.

    Uses the bias-augmented vector, so feasibility requires both augmented
    tree totals to stay within the peak supply voltage.
    """
    if not (ct > 0.0):
        raise ValueError("ct must be positive")
    if not (v_max > 0.0):
        raise ValueError("v_max must be positive")
    split_weights(spec)
    aug = _augmented(spec)
    split = split_weights(aug)
    if split.wT_pos > v_max or split.wT_neg > v_max:
        raise WeightNormExceedsVmax(
            f"{spec.name}: tree weight totals ({split.wT_pos:.6g}, "
            f"{split.wT_neg:.6g}) exceed v_max={v_max:.6g}"
        )
    cap_pos, cap_neg, _, _ = _synapse_caps(split, ct)
    cap_pos, cap_neg, cb_pos, cb_neg = _reclassify_bias_slot(cap_pos, cap_neg, spec.n)
    ct_pos = _ascending_sum(cap_pos.values())
    ct_neg = _ascending_sum(cap_neg.values())
    cd_pos = ct * (v_max - split.wT_pos) / split.wT
    cd_neg = ct * (v_max - split.wT_neg) / split.wT
    _require_finite(spec.name, cd_pos=cd_pos, cd_neg=cd_neg)
    return MappedAcn(
        name=spec.name,
        n=spec.n,
        cap_pos=cap_pos,
        cap_neg=cap_neg,
        cb_pos=cb_pos,
        cb_neg=cb_neg,
        cd_pos=cd_pos,
        cd_neg=cd_neg,
        ct=ct,
        ct_pos=ct_pos,
        ct_neg=ct_neg,
        mapping_kind="relu",
        diagnostics=AcnDiagnostics(
            delta=split.wT_pos - split.wT_neg,
            ca_pos=ct_pos + cb_pos + cd_pos,
            ca_neg=ct_neg + cb_neg + cd_neg,
        ),
    )


MAPPERS = {
    "conditional": conditional_map,
    "vectored": vectored_bias_map,
    "conditional_vectored_bias": vectored_bias_map,
    "balanced": balanced_map,
    "relu": relu_map,
}


def map_neuron(spec: NeuronSpec, kind: str, ct: float, v_max: float = 1.0) -> MappedAcn:
    """Dispatch to one of the four mapping algorithms by name."""
    try:
        fn = MAPPERS[kind]
    except KeyError:
        raise ValueError(f"unknown mapping kind {kind!r}") from None
    if fn is relu_map:
        return relu_map(spec, ct, v_max)
    return fn(spec, ct)


def _rebalanced(m: MappedAcn, cb_pos, cb_neg, cd_pos, cd_neg) -> MappedAcn:
    return m.replace(
        cb_pos=cb_pos,
        cb_neg=cb_neg,
        cd_pos=cd_pos,
        cd_neg=cd_neg,
        diagnostics=AcnDiagnostics(
            delta=m.diagnostics.delta,
            ca_pos=m.ct_pos + cb_pos + cd_pos,
            ca_neg=m.ct_neg + cb_neg + cd_neg,
        ),
    )


def apply_pillars(m: MappedAcn, tech: TechConstraints) -> MappedAcn:
    """Add equal bias/ballast capacitance to both trees.

    Pillars cancel computationally (the comparator output is unchanged for
    every input) while shifting the membrane voltage swing and lifting
    sub-c_min bias/ballast values into the realizable range.
    """
    pb, pd = tech.pillar_bias, tech.pillar_ballast
    if pb == 0.0 and pd == 0.0:
        return m
    return _rebalanced(m, m.cb_pos + pb, m.cb_neg + pb, m.cd_pos + pd, m.cd_neg + pd)


def compensate_parasitics(m: MappedAcn, tech: TechConstraints) -> MappedAcn:
    """Absorb estimated membrane-node parasitics into the ballast values.

    Parasitic capacitance to ground sits in parallel with the ballast, so
    the installed ballast is reduced by the estimate. If an estimate
    exceeds the available ballast, an equal ballast pillar (which cannot
    change any output) is first added to both trees so the installed
    values stay non-negative. Note the stored netlist then carries the
    balance in situ: installed ballast plus parasitic, not the bare
    fields, matches across trees.
    """
    par_pos, par_neg = tech.parasitic_pos, tech.parasitic_neg
    if par_pos == 0.0 and par_neg == 0.0:
        return m
    pillar = max(0.0, par_pos - m.cd_pos, par_neg - m.cd_neg)
    cd_pos = m.cd_pos + pillar - par_pos
    cd_neg = m.cd_neg + pillar - par_neg
    # accumulation dust from the pillar arithmetic
    if cd_pos < 0.0:
        cd_pos = 0.0
    if cd_neg < 0.0:
        cd_neg = 0.0
    return _rebalanced(m, m.cb_pos, m.cb_neg, cd_pos, cd_neg)


def with_parasitic_load(m: MappedAcn, tech: TechConstraints) -> MappedAcn:
    """Physical view of a netlist: parasitic estimates added back onto the
    ballast nodes. Simulating this view of a compensated netlist must
    reproduce the pre-compensation outputs."""
    if tech.parasitic_pos == 0.0 and tech.parasitic_neg == 0.0:
        return m
    return _rebalanced(
        m,
        m.cb_pos,
        m.cb_neg,
        m.cd_pos + tech.parasitic_pos,
        m.cd_neg + tech.parasitic_neg,
    )


def select_ct(spec: NeuronSpec, tech: TechConstraints) -> float:
    """Choose the scaling constant so the smallest nonzero weight maps to
    exactly the minimum realizable capacitance."""
    split = split_weights(spec)
    if split.wT == 0.0:
        raise AllZeroWeights(f"{spec.name}: no nonzero weight to scale against")
    min_mag = min(min(split.positive.values(), default=math.inf),
                  min(split.negative.values(), default=math.inf))
    ct = tech.c_min * split.wT / min_mag
    # nudge up over rounding so the audit never flags a mapped synapse
    while ct * min_mag / split.wT < tech.c_min:
        ct = math.nextafter(ct, math.inf)
    return ct


def prune(spec: NeuronSpec, threshold: float) -> NeuronSpec:
    """Zero out weights with magnitude below the threshold.

    Destructive but effective against unrealizably small synapses. A
    binary-tagged neuron that loses weights is retagged real, since the
    all-(+/-1) invariant no longer holds.
    """
    if threshold < 0.0:
        raise ValueError("threshold must be >= 0")
    weights = tuple(0.0 if abs(w) < threshold else w for w in spec.weights)
    if all(w == 0.0 for w in weights) and spec.bias == 0.0:
        raise AllZeroWeights(f"{spec.name}: pruning removed every weight")
    quantization, bits = spec.quantization, spec.bits
    if quantization == "binary" and any(w == 0.0 for w in weights):
        quantization, bits = "real", None
    return NeuronSpec(
        weights=weights,
        bias=spec.bias,
        name=spec.name,
        quantization=quantization,
        bits=bits,
    )


@dataclass(frozen=True)
class CapViolation:
    """One capacitor whose nonzero value falls below c_min."""

    neuron: str
    role: str  # synapse | bias | ballast
    tree: str  # pos | neg
    index: int | None
    value: float


def check_realizable(m: MappedAcn, tech: TechConstraints) -> list[CapViolation]:
    """Audit every capacitor against the technology minimum.

    Zero-valued bias/ballast entries are no-fits and pass; an empty list
    means the netlist is realizable as stored.
    """
    violations = []
    for tree, caps in (("pos", m.cap_pos), ("neg", m.cap_neg)):
        for i in sorted(caps):
            v = caps[i]
            if 0.0 < v < tech.c_min:
                violations.append(CapViolation(m.name, "synapse", tree, i, v))
    for role, tree, v in (
        ("bias", "pos", m.cb_pos),
        ("bias", "neg", m.cb_neg),
        ("ballast", "pos", m.cd_pos),
        ("ballast", "neg", m.cd_neg),
    ):
        if 0.0 < v < tech.c_min:
            violations.append(CapViolation(m.name, role, tree, None, v))
    return violations
