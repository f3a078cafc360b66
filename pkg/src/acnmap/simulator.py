"""Idealized behavioral models: the abstract neuron, the dual-tree
switched-capacitor neuron (capacitive dividers plus comparator), and the
equivalence verifier between them.

Time is abstracted away: the comparator is evaluated directly at the
supply peak, with no delays, offset or noise. Ties resolve to 1.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, TooLargeForExhaustive
from .model import EvalResult, MappedAcn, NeuronSpec

EXHAUSTIVE_MAX_BITS = 24

_EVAL_BLOCK = 1 << 16


def _check_bits(x, n: int) -> None:
    if len(x) != n:
        raise DimensionMismatch(f"input has {len(x)} bits, neuron expects {n}")
    for b in x:
        if b not in (0, 1):
            raise DimensionMismatch(f"input bit {b!r} is not 0/1")


def an_output(spec: NeuronSpec, x) -> int:
    """Abstract neuron: 1 iff w.x >= tau."""
    _check_bits(x, spec.n)
    acc = 0.0
    for i in range(spec.n):
        acc = acc + spec.weights[i] * float(x[i])
    return 1 if acc - spec.bias >= 0.0 else 0


def _tree_on_sum(caps: dict[int, float], x) -> float:
    acc = 0.0
    for i in sorted(caps):
        acc = acc + caps[i] * float(x[i])
    return acc


def membrane_voltages(m: MappedAcn, x, v_pc: float, v_b: float = 0.0) -> tuple[float, float]:
    """Sampled membrane voltage of each tree by capacitive division.

    The always-on bias capacitor contributes to the on-path regardless of
    input; a tree with no capacitance at all floats at the reset voltage.
    """
    _check_bits(x, m.n)
    if v_pc < 0.0:
        raise ValueError("v_pc must be >= 0")
    s_pos = _tree_on_sum(m.cap_pos, x)
    s_neg = _tree_on_sum(m.cap_neg, x)
    ca_pos, ca_neg = m.ca_pos, m.ca_neg
    vm_pos = v_b + (v_pc * (s_pos + m.cb_pos)) / ca_pos if ca_pos > 0.0 else v_b
    vm_neg = v_b + (v_pc * (s_neg + m.cb_neg)) / ca_neg if ca_neg > 0.0 else v_b
    return vm_pos, vm_neg


def delta_vm(m: MappedAcn, x, v_max: float) -> float:
    """Differential membrane voltage at the supply peak (reset voltage
    cancels in the difference)."""
    vm_pos, vm_neg = membrane_voltages(m, x, v_max, 0.0)
    return vm_pos - vm_neg


def acn_output(m: MappedAcn, x, v_max: float = 1.0, v_b: float = 0.0) -> EvalResult:
    """Comparator view of one input. The output bit is invariant to the
    supply magnitude (any v_pc > 0 gives the same sign)."""
    vm_pos, vm_neg = membrane_voltages(m, x, v_max, v_b)
    d = vm_pos - vm_neg
    return EvalResult(vm_pos=vm_pos, vm_neg=vm_neg, delta_vm=d,
                      output=1 if d >= 0.0 else 0)


def dense_netlist(m: MappedAcn) -> tuple[np.ndarray, np.ndarray]:
    """Per-index synapse arrays (zeros where a tree has no capacitor)."""
    cap_pos = np.zeros(m.n, dtype=np.float64)
    cap_neg = np.zeros(m.n, dtype=np.float64)
    for i, c in m.cap_pos.items():
        cap_pos[i] = c
    for i, c in m.cap_neg.items():
        cap_neg[i] = c
    return cap_pos, cap_neg


def normalized_cap_vector(m: MappedAcn) -> np.ndarray:
    """Signed effective capacitance vector: positive-tree synapses over
    that tree's total capacitance, negative-tree synapses flipped over
    theirs. Netlists with an always-on bias capacitor (vectored or not)
    carry its contribution as an extra trailing slot, so the differential
    voltage is v_max times this vector dotted with the slot-extended
    input (the slot bit is always 1)."""
    slot = (m.mapping_kind in ("conditional_vectored_bias", "relu")
            or m.cb_pos > 0.0 or m.cb_neg > 0.0)
    out = np.zeros(m.n + 1 if slot else m.n, dtype=np.float64)
    if m.ca_pos > 0.0:
        for i, c in m.cap_pos.items():
            out[i] = c / m.ca_pos
    if m.ca_neg > 0.0:
        for i, c in m.cap_neg.items():
            out[i] = -c / m.ca_neg
    if slot:
        out[m.n] = bias_offset(m)
    return out


def bias_offset(m: MappedAcn) -> float:
    """Constant term of the affine divider difference: the always-on bias
    contribution to delta_vm per volt of supply."""
    term_pos = m.cb_pos / m.ca_pos if m.ca_pos > 0.0 else 0.0
    term_neg = m.cb_neg / m.ca_neg if m.ca_neg > 0.0 else 0.0
    return term_pos - term_neg


@dataclass(frozen=True)
class Mismatch:
    """One input where the abstract neuron and the netlist disagree,
    with the divider voltage and the dot-product margin for triage."""

    index: int
    x: tuple[int, ...]
    delta_vm: float
    margin: float


def _kernel_args(spec: NeuronSpec, m: MappedAcn, v_max: float):
    if spec.n != m.n:
        raise DimensionMismatch(
            f"netlist width {m.n} does not match neuron width {spec.n}"
        )
    cap_pos, cap_neg = dense_netlist(m)
    weights = np.asarray(spec.weights, dtype=np.float64)
    return (cap_pos, cap_neg, m.cb_pos, m.cb_neg, m.ca_pos, m.ca_neg,
            weights, spec.bias, v_max)


def _code_bits(code: int, n: int) -> tuple[int, ...]:
    return tuple((code >> i) & 1 for i in range(n))


def verify_equivalence(
    spec: NeuronSpec,
    m: MappedAcn,
    strategy: str = "exhaustive",
    *,
    count: int = 1024,
    seed: int = 0,
    v_max: float = 1.0,
) -> list[Mismatch]:
    """Compare abstract and netlist outputs over an input set.

    ``exhaustive`` enumerates all 2**N codes (bit i of the code is x_i)
    and is guarded at N <= 24; ``sampled`` draws ``count`` uniform inputs
    from a counter-based stream keyed by (seed, neuron name), so runs are
    reproducible and independent per neuron. The returned list is sorted
    by input index and empty exactly when the mapping is equivalent.
    """
    args = _kernel_args(spec, m, v_max)
    mismatches: list[Mismatch] = []
    if strategy == "exhaustive":
        if spec.n > EXHAUSTIVE_MAX_BITS:
            raise TooLargeForExhaustive(
                f"2**{spec.n} inputs exceed the exhaustive guardrail"
            )
        total = 1 << spec.n
        for start in range(0, total, _EVAL_BLOCK):
            stop = min(start + _EVAL_BLOCK, total)
            delta, margin = kernels.exhaustive_eval(*args, start, stop)
            bad = np.nonzero((margin >= 0.0) != (delta >= 0.0))[0]
            for k in bad:
                code = start + int(k)
                mismatches.append(Mismatch(code, _code_bits(code, spec.n),
                                           float(delta[k]), float(margin[k])))
    elif strategy == "sampled":
        rng = sample_stream(seed, spec.name)
        x = (rng.random((count, spec.n)) < 0.5).astype(np.uint8)
        delta, margin = kernels.corpus_eval(*args, x)
        bad = np.nonzero((margin >= 0.0) != (delta >= 0.0))[0]
        for k in bad:
            mismatches.append(Mismatch(int(k), tuple(int(b) for b in x[k]),
                                       float(delta[k]), float(margin[k])))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return mismatches


def sample_stream(seed: int, name: str) -> np.random.Generator:
    """Counter-based generator keyed by (seed, neuron name)."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, zlib.crc32(name.encode())],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))

