"""Domain value types for the AN-to-ACN mapping toolchain.

Conventions used throughout the package:

* capacitances are femtofarads (fF), stored as 64-bit floats;
* voltages are volts;
* weights and biases are dimensionless;
* both capacitive trees share a single reset voltage V_B.

All types are immutable after construction and safe to share between
concurrent tasks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InvariantViolation

QUANTIZATION_KINDS = ("real", "kbit", "binary")

MAPPING_KINDS = ("conditional", "conditional_vectored_bias", "balanced", "relu")

# Mapping kinds whose positive and negative trees carry equal total
# capacitance by construction.
BALANCED_TREE_KINDS = ("conditional", "conditional_vectored_bias", "balanced")


def _ascending_sum(values) -> float:
    """Index-ascending accumulation. Fixing the order keeps every derived
    statistic reproducible across runs and backends."""
    acc = 0.0
    for v in values:
        acc = acc + v
    return acc


@dataclass(frozen=True)
class NeuronSpec:
    """Abstract artificial neuron: weight vector, threshold bias and
    quantization metadata (metadata only; it never changes the math)."""

    weights: tuple[float, ...]
    bias: float = 0.0
    name: str = "an"
    quantization: str = "real"
    bits: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "bias", float(self.bias))
        if not self.weights:
            raise InvariantViolation(f"{self.name}: weight vector is empty")
        for i, w in enumerate(self.weights):
            if not math.isfinite(w):
                raise InvariantViolation(f"{self.name}: weight[{i}] = {w} is not finite")
        if not math.isfinite(self.bias):
            raise InvariantViolation(f"{self.name}: bias {self.bias} is not finite")
        if self.quantization not in QUANTIZATION_KINDS:
            raise InvariantViolation(
                f"{self.name}: unknown quantization {self.quantization!r}"
            )
        if self.quantization == "kbit" and (self.bits is None or self.bits < 1):
            raise InvariantViolation(f"{self.name}: kbit quantization requires bits >= 1")
        if self.quantization == "binary":
            for i, w in enumerate(self.weights):
                if w not in (-1.0, 1.0):
                    raise InvariantViolation(
                        f"{self.name}: binary weight[{i}] = {w} is not +/-1"
                    )

    @property
    def n(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class SplitWeights:
    """Weight vector resolved into its positive and negative parts.

    ``positive``/``negative`` hold magnitudes keyed by original index;
    zero weights are tracked separately and never become capacitors.
    """

    positive: dict[int, float]
    negative: dict[int, float]
    zeros: frozenset[int]
    wT_pos: float
    wT_neg: float
    wT: float

    def __post_init__(self):
        object.__setattr__(self, "zeros", frozenset(self.zeros))
        n = len(self.positive) + len(self.negative) + len(self.zeros)
        covered = set(self.positive) | set(self.negative) | set(self.zeros)
        if len(covered) != n or covered != set(range(n)):
            raise InvariantViolation("split index sets must disjointly cover 0..N-1")
        for label, total, values in (
            ("wT_pos", self.wT_pos, self.positive.values()),
            ("wT_neg", self.wT_neg, self.negative.values()),
        ):
            expect = _ascending_sum(values)
            if abs(total - expect) > 1e-12 * max(1.0, abs(expect)):
                raise InvariantViolation(f"{label} inconsistent with stored magnitudes")

    @property
    def n(self) -> int:
        return len(self.positive) + len(self.negative) + len(self.zeros)


@dataclass(frozen=True)
class AcnDiagnostics:
    """Mapping byproducts useful for triage: the tree-imbalance scalar
    (signed total-weight difference that sized the ballast) and the total
    per-tree capacitance C_A = C_T + C_b + C_d."""

    delta: float
    ca_pos: float
    ca_neg: float


@dataclass(frozen=True)
class MappedAcn:
    """Physical ACN netlist for one neuron.

    Sparse synapse maps are keyed by the original input index; indices
    absent from both trees carried zero weight. ``ct`` is the design
    scaling constant; ``ct_pos``/``ct_neg`` are the realized per-tree
    synapse totals (their sum is below ``ct`` for vectored mappings,
    where one augmented slot became the bias capacitor).
    """

    name: str
    n: int
    cap_pos: dict[int, float]
    cap_neg: dict[int, float]
    cb_pos: float
    cb_neg: float
    cd_pos: float
    cd_neg: float
    ct: float
    ct_pos: float
    ct_neg: float
    mapping_kind: str
    diagnostics: AcnDiagnostics

    def __post_init__(self):
        if self.mapping_kind not in MAPPING_KINDS:
            raise InvariantViolation(f"unknown mapping kind {self.mapping_kind!r}")
        if self.n < 1:
            raise InvariantViolation("neuron width must be >= 1")
        for tree, caps in (("pos", self.cap_pos), ("neg", self.cap_neg)):
            for i, c in caps.items():
                if not (0 <= i < self.n):
                    raise InvariantViolation(f"synapse index {i} outside 0..{self.n - 1}")
                if not (c >= 0.0) or not math.isfinite(c):
                    raise InvariantViolation(f"C_{tree}[{i}] = {c} fF is invalid")
        if set(self.cap_pos) & set(self.cap_neg):
            raise InvariantViolation("a synapse index appears on both trees")
        for label, c in (
            ("cb_pos", self.cb_pos),
            ("cb_neg", self.cb_neg),
            ("cd_pos", self.cd_pos),
            ("cd_neg", self.cd_neg),
            ("ct", self.ct),
            ("ct_pos", self.ct_pos),
            ("ct_neg", self.ct_neg),
        ):
            if not (c >= 0.0) or not math.isfinite(c):
                raise InvariantViolation(f"{label} = {c} fF is invalid")
        # bias-only netlists (no synapses) keep ct as the scale of their
        # bias/ballast values, so the synapse-total identity is vacuous
        if self.mapping_kind in ("conditional", "balanced") and (self.cap_pos or self.cap_neg):
            if abs(self.ct_pos + self.ct_neg - self.ct) > 1e-12 * max(1.0, self.ct):
                raise InvariantViolation("ct_pos + ct_neg must equal ct")
        for label, stored, expect in (
            ("ca_pos", self.diagnostics.ca_pos, self.ct_pos + self.cb_pos + self.cd_pos),
            ("ca_neg", self.diagnostics.ca_neg, self.ct_neg + self.cb_neg + self.cd_neg),
        ):
            if abs(stored - expect) > 1e-12 * max(1.0, abs(expect)):
                raise InvariantViolation(f"diagnostics.{label} inconsistent with fields")

    @property
    def ca_pos(self) -> float:
        return self.diagnostics.ca_pos

    @property
    def ca_neg(self) -> float:
        return self.diagnostics.ca_neg

    @property
    def sum_cd(self) -> float:
        return self.cd_pos + self.cd_neg

    @property
    def total_capacitance(self) -> float:
        """Everything that occupies floor space on this neuron."""
        return (
            self.ct_pos
            + self.ct_neg
            + self.cb_pos
            + self.cb_neg
            + self.cd_pos
            + self.cd_neg
        )

    def replace(self, **changes) -> MappedAcn:
        return replace(self, **changes)


@dataclass(frozen=True)
class TechConstraints:
    """Technology limits and layout estimates for a target process."""

    c_min: float = 2.0
    pillar_bias: float = 0.0
    pillar_ballast: float = 0.0
    v_max: float = 1.0
    parasitic_pos: float = 0.0
    parasitic_neg: float = 0.0
    v_bias: float = 0.0

    def __post_init__(self):
        if not (self.c_min > 0):
            raise InvariantViolation("c_min must be positive")
        if not (self.v_max > 0):
            raise InvariantViolation("v_max must be positive")
        for label, v in (
            ("pillar_bias", self.pillar_bias),
            ("pillar_ballast", self.pillar_ballast),
            ("parasitic_pos", self.parasitic_pos),
            ("parasitic_neg", self.parasitic_neg),
        ):
            if not (v >= 0):
                raise InvariantViolation(f"{label} must be >= 0")


@dataclass(frozen=True)
class EvalResult:
    """Comparator view of one input: sampled membrane voltages, their
    difference, and the output bit (ties resolve to 1)."""

    vm_pos: float
    vm_neg: float
    delta_vm: float
    output: int

    def __post_init__(self):
        if self.output != (1 if self.delta_vm >= 0 else 0):
            raise InvariantViolation("output bit must equal (delta_vm >= 0)")


@dataclass(frozen=True)
class NeuronMetrics:
    """Per-neuron hardware figures of merit."""

    name: str
    n: int
    ct: float
    sum_cd: float
    cap_vec_norm: float
    total_capacitance: float
    swing_pos: tuple[float, float]
    swing_neg: tuple[float, float]
    psi: float | None = None


@dataclass(frozen=True)
class LayerAggregates:
    """Deterministic reductions over per-neuron records (population
    deviations, index-ascending summation)."""

    count: int
    mean_sum_cd: float
    dev_sum_cd: float
    mean_cap_vec_norm: float
    dev_cap_vec_norm: float
    mean_ct: float
    dev_ct: float
    total_capacitance: float


@dataclass(frozen=True)
class MappingReport:
    """Per-neuron metric records plus layer aggregates; sweep runs also
    carry equivalence-check and mapping-rejection tallies.

    ``mismatches`` are genuine disagreements; ``boundary_ties`` counts
    inputs whose dot product ties the threshold exactly, where the ideal
    divider arithmetic lands within one ulp of zero and the resolved sign
    is rounding noise, not a mapping error."""

    records: tuple[NeuronMetrics, ...]
    aggregates: LayerAggregates
    mismatches: int = 0
    boundary_ties: int = 0
    checks: int = 0
    rejected: int = 0
    label: str = ""
