"""Experiment harness: random-vector Monte Carlo sweeps, layer-level
evaluation of imported networks against the abstract software model, and
the unit-capacitor tiling plan for array layout.

Randomness is counter-based throughout: every weight vector gets its own
Philox stream keyed by (seed, vector index), so sweeps are reproducible
and trivially parallelizable, and results never depend on draw order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, metrics
from .errors import NotUnitQuantized, SchemaMismatch, WeightNormExceedsVmax
from .mapper import apply_pillars, map_neuron, select_ct
from .model import MappedAcn, MappingReport, NeuronSpec, TechConstraints
from .simulator import dense_netlist, verify_equivalence


def binarize_weights(spec: NeuronSpec) -> NeuronSpec:
    """Collapse weights to their signs ({-1,+1}); zero maps to +1."""
    weights = tuple(1.0 if w >= 0.0 else -1.0 for w in spec.weights)
    return NeuronSpec(weights=weights, bias=spec.bias, name=spec.name,
                      quantization="binary")


@dataclass(frozen=True)
class SweepConfig:
    """One Monte Carlo mapping experiment: ``count`` weight vectors of
    width ``n`` drawn i.i.d. from N(0, sigma^2)."""

    n: int
    count: int
    sigma: float = 0.1
    tau: float = 0.0
    mapping: str = "conditional"
    ct: float = 100.0
    pillar_bias: float = 0.0
    pillar_ballast: float = 0.0
    seed: int = 0
    binarize: bool = False
    v_max: float = 1.0
    verify: str = "auto"  # auto | exhaustive | sampled | none
    samples: int = 256
    exhaustive_limit: int = 12
    label: str = ""

    def __post_init__(self):
        if self.count < 1 or self.n < 1:
            raise ValueError("count and n must be >= 1")
        if self.verify not in ("auto", "exhaustive", "sampled", "none"):
            raise ValueError(f"unknown verify mode {self.verify!r}")

    def resolve_verify(self) -> str:
        if self.verify == "auto":
            return "exhaustive" if self.n <= self.exhaustive_limit else "sampled"
        return self.verify


def _vector_stream(seed: int, index: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def draw_spec(config: SweepConfig, index: int) -> NeuronSpec:
    rng = _vector_stream(config.seed, index)
    weights = rng.standard_normal(config.n) * config.sigma
    spec = NeuronSpec(weights=tuple(weights), bias=config.tau,
                      name=f"v{index:05d}")
    return binarize_weights(spec) if config.binarize else spec


def sweep_random(config: SweepConfig) -> MappingReport:
    """Map ``count`` random vectors, verify each against the abstract
    neuron, and aggregate the hardware metrics.

    Mapping rejections (infeasible ReLU vectors) are tallied rather than
    fatal; rejected vectors contribute no metrics or checks.
    """
    tech = TechConstraints(pillar_bias=config.pillar_bias,
                           pillar_ballast=config.pillar_ballast,
                           v_max=config.v_max)
    strategy = config.resolve_verify()
    records = []
    mismatches = 0
    boundary_ties = 0
    checks = 0
    rejected = 0
    for index in range(config.count):
        spec = draw_spec(config, index)
        try:
            m = map_neuron(spec, config.mapping, config.ct, config.v_max)
        except WeightNormExceedsVmax:
            rejected += 1
            continue
        m = apply_pillars(m, tech)
        if strategy != "none":
            found = verify_equivalence(spec, m, strategy,
                                       count=config.samples,
                                       seed=config.seed,
                                       v_max=config.v_max)
            # an exact dot-product tie leaves the divider one ulp from
            # zero; the flip is rounding noise, tallied separately
            ties = sum(1 for mm in found if mm.margin == 0.0)
            boundary_ties += ties
            mismatches += len(found) - ties
            checks += (1 << config.n) if strategy == "exhaustive" else config.samples
        records.append(metrics.neuron_metrics(m, v_max=config.v_max))
    if not records:
        raise WeightNormExceedsVmax("every vector in the sweep failed to map")
    return MappingReport(
        records=tuple(records),
        aggregates=metrics.aggregate(records),
        mismatches=mismatches,
        boundary_ties=boundary_ties,
        checks=checks,
        rejected=rejected,
        label=config.label,
    )


@dataclass(frozen=True)
class TilePlan:
    """Unit-capacitor tile counts per role and tree for array layout."""

    unit: float
    synapse_pos: dict[int, int]
    synapse_neg: dict[int, int]
    bias_pos: int
    bias_neg: int
    ballast_pos: int
    ballast_neg: int

    @property
    def total_tiles(self) -> int:
        return (sum(self.synapse_pos.values()) + sum(self.synapse_neg.values())
                + self.bias_pos + self.bias_neg
                + self.ballast_pos + self.ballast_neg)


def _tiles(value: float, unit: float, what: str) -> int:
    q = value / unit
    k = round(q)
    if abs(q - k) > 1e-6 * max(1.0, abs(q)):
        raise NotUnitQuantized(
            f"{what} = {value:.9g} fF is not a multiple of {unit:.9g} fF"
        )
    return int(k)


def tile_plan(m: MappedAcn, unit: float) -> TilePlan:
    """Decompose every capacitor into equally-sized unit tiles.

    Requires every capacitance to be an integer multiple of the unit
    (within 1e-6 relative); real-valued mappings generally are not, which
    is the point of quantized training."""
    if not (unit > 0.0):
        raise ValueError("unit must be positive")
    return TilePlan(
        unit=unit,
        synapse_pos={i: _tiles(c, unit, f"C_pos[{i}]") for i, c in sorted(m.cap_pos.items())},
        synapse_neg={i: _tiles(c, unit, f"C_neg[{i}]") for i, c in sorted(m.cap_neg.items())},
        bias_pos=_tiles(m.cb_pos, unit, "bias_pos"),
        bias_neg=_tiles(m.cb_neg, unit, "bias_neg"),
        ballast_pos=_tiles(m.cd_pos, unit, "ballast_pos"),
        ballast_neg=_tiles(m.cd_neg, unit, "ballast_neg"),
    )


@dataclass(frozen=True)
class LayerEvaluation:
    """Hardware-vs-software comparison of one network over a corpus."""

    mapped: tuple[MappedAcn, ...]
    hidden_hw: np.ndarray  # (images, neurons) uint8
    hidden_sw: np.ndarray
    predictions_hw: np.ndarray  # (images,) int
    predictions_sw: np.ndarray
    agreement: float  # fraction of identical hidden bits
    psi: float | None  # corpus-wide instability
    report: MappingReport


def _acn_layer_bits(mapped, x, v_max):
    """Hardware hidden bits plus pooled |delta_vm| samples."""
    rows = x.shape[0]
    bits = np.zeros((rows, len(mapped)), dtype=np.uint8)
    deltas = np.zeros((rows, len(mapped)), dtype=np.float64)
    for j, m in enumerate(mapped):
        cap_pos, cap_neg = dense_netlist(m)
        zeros = np.zeros(m.n, dtype=np.float64)
        delta, _ = kernels.corpus_eval(cap_pos, cap_neg, m.cb_pos, m.cb_neg,
                                       m.ca_pos, m.ca_neg, zeros, 0.0, v_max, x)
        bits[:, j] = delta >= 0.0
        deltas[:, j] = delta
    return bits, deltas


def _an_layer_bits(neurons, x):
    rows = x.shape[0]
    bits = np.zeros((rows, len(neurons)), dtype=np.uint8)
    for j, spec in enumerate(neurons):
        weights = np.asarray(spec.weights, dtype=np.float64)
        _, margin = kernels.corpus_eval(np.zeros(spec.n), np.zeros(spec.n),
                                        0.0, 0.0, 1.0, 1.0,
                                        weights, spec.bias, 1.0, x)
        bits[:, j] = margin >= 0.0
    return bits


def evaluate_layer(network, images, *, mapping: str = "conditional",
                   tech: TechConstraints = TechConstraints(),
                   tol: float = metrics.DEFAULT_INSTABILITY_TOL) -> LayerEvaluation:
    """Replace a network's binary hidden layer with its mapped hardware
    model and compare against the software forward pass.

    Expects one binary-activation hidden layer followed by one linear
    output layer (kept as real-valued post-processing; classification is
    the argmax over output units). Each hidden neuron gets its own scaling
    constant from the technology minimum, then pillars.
    """
    hidden, output = _evaluable_layers(network)
    x = np.ascontiguousarray(images, dtype=np.uint8)
    if x.ndim != 2 or (x.size and x.shape[1] != hidden.neurons[0].n):
        raise SchemaMismatch(
            f"corpus width {x.shape[1] if x.ndim == 2 else '?'} does not match "
            f"hidden width {hidden.neurons[0].n}"
        )

    mapped = []
    for spec in hidden.neurons:
        ct = select_ct(spec, tech)
        mapped.append(apply_pillars(map_neuron(spec, mapping, ct, tech.v_max), tech))
    mapped = tuple(mapped)

    rows = x.shape[0]
    if rows == 0:
        empty_bits = np.zeros((0, len(mapped)), dtype=np.uint8)
        empty_pred = np.zeros(0, dtype=np.int64)
        return LayerEvaluation(
            mapped=mapped, hidden_hw=empty_bits, hidden_sw=empty_bits,
            predictions_hw=empty_pred, predictions_sw=empty_pred,
            agreement=1.0, psi=None,
            report=metrics.layer_stats(list(mapped), v_max=tech.v_max,
                                       label=getattr(network, "name", "")),
        )

    hw_bits, deltas = _acn_layer_bits(mapped, x, tech.v_max)
    sw_bits = _an_layer_bits(hidden.neurons, x)
    agreement = float(np.count_nonzero(hw_bits == sw_bits)) / hw_bits.size
    psi = float(np.count_nonzero(np.abs(deltas) < tol)) / deltas.size

    w_out = np.array([out.weights for out in output.neurons], dtype=np.float64)
    b_out = np.array([out.bias for out in output.neurons], dtype=np.float64)
    pred_hw = np.argmax(hw_bits @ w_out.T - b_out, axis=1)
    pred_sw = np.argmax(sw_bits @ w_out.T - b_out, axis=1)

    report = metrics.layer_stats(list(mapped), v_max=tech.v_max, inputs=x,
                                 tol=tol, label=getattr(network, "name", ""))
    return LayerEvaluation(
        mapped=mapped, hidden_hw=hw_bits, hidden_sw=sw_bits,
        predictions_hw=pred_hw, predictions_sw=pred_sw,
        agreement=agreement, psi=psi, report=report,
    )


def _evaluable_layers(network):
    layers = network.layers
    if len(layers) != 2:
        raise SchemaMismatch(f"expected 2 layers (hidden + output), got {len(layers)}")
    hidden, output = layers
    if hidden.activation != "binary":
        raise SchemaMismatch("hidden layer must have binary activation")
    if output.activation != "linear":
        raise SchemaMismatch("output layer must have linear activation")
    widths = {spec.n for spec in hidden.neurons}
    if len(widths) != 1:
        raise SchemaMismatch("hidden neurons disagree on input width")
    out_widths = {spec.n for spec in output.neurons}
    if out_widths != {len(hidden.neurons)}:
        raise SchemaMismatch("output layer width does not match hidden neuron count")
    return hidden, output


def ballast_direction_curve(ct: float = 100.0, steps: int = 360):
    """Ballast sizes of a two-weight neuron as the weight direction turns
    through a full circle (magnitude does not matter). Directions that
    land exactly on an axis are skipped: a single-weight neuron has
    nothing to balance against."""
    phis, cd_pos, cd_neg = [], [], []
    for k in range(steps):
        phi = 360.0 * k / steps
        w = (math.cos(math.radians(phi)), math.sin(math.radians(phi)))
        spec = NeuronSpec(weights=w, name=f"phi{k}")
        m = map_neuron(spec, "conditional", ct)
        phis.append(phi)
        cd_pos.append(m.cd_pos)
        cd_neg.append(m.cd_neg)
    return np.array(phis), np.array(cd_pos), np.array(cd_neg)


def cos_theta_samples(mapped, images, v_max: float = 1.0) -> np.ndarray:
    """Angle cosines between each neuron's normalized capacitance vector
    and each input, pooled over the corpus (zero inputs skipped)."""
    from .simulator import normalized_cap_vector

    x = np.ascontiguousarray(images, dtype=np.uint8)
    out = []
    for m in mapped:
        c = normalized_cap_vector(m)
        for row in x:
            v = row
            if c.shape[0] == m.n + 1:
                v = np.concatenate([row, [1]])
            nv = float(np.linalg.norm(v))
            if nv == 0.0:
                continue
            out.append(float(np.dot(c, v)) / (float(np.linalg.norm(c)) * nv))
    return np.array(out)
