"""Hardware figures of merit over mapped neurons and input corpora.

Reported deviations are population standard deviations (divisor n), and
all reductions run in index-ascending order so reports are reproducible
bit-for-bit.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .model import (
    LayerAggregates,
    MappedAcn,
    MappingReport,
    NeuronMetrics,
    _ascending_sum,
)
from .simulator import dense_netlist, normalized_cap_vector

# Comparator resolution assumed when none is given: 5 mV.
DEFAULT_INSTABILITY_TOL = 0.005


def corpus_delta_vm(m: MappedAcn, inputs, v_max: float = 1.0) -> np.ndarray:
    """Differential membrane voltage for each input row."""
    x = np.ascontiguousarray(inputs, dtype=np.uint8)
    if x.ndim != 2 or x.shape[1] != m.n:
        raise ValueError(f"corpus must have shape (rows, {m.n})")
    cap_pos, cap_neg = dense_netlist(m)
    zeros = np.zeros(m.n, dtype=np.float64)
    delta, _ = kernels.corpus_eval(cap_pos, cap_neg, m.cb_pos, m.cb_neg,
                                   m.ca_pos, m.ca_neg, zeros, 0.0, v_max, x)
    return delta


def instability(m: MappedAcn, inputs, tol: float = DEFAULT_INSTABILITY_TOL,
                v_max: float = 1.0) -> float:
    """Fraction of inputs whose differential voltage magnitude falls below
    the comparator tolerance; monotone non-decreasing in the tolerance."""
    if not (tol > 0.0):
        raise ValueError("tol must be positive")
    delta = corpus_delta_vm(m, inputs, v_max)
    if delta.size == 0:
        raise ValueError("corpus must be non-empty")
    return float(np.count_nonzero(np.abs(delta) < tol)) / delta.size


def cap_vec_norm(m: MappedAcn) -> float:
    """Euclidean magnitude of the normalized capacitance vector; the
    larger it is, the larger the differential voltages the comparator
    sees."""
    c = normalized_cap_vector(m)
    return float(np.sqrt(np.dot(c, c)))


def swing_range(m: MappedAcn, v_max: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """Membrane voltage interval per tree, reached at the all-zeros and
    all-ones inputs: the bias capacitor sets the floor, the ballast pulls
    down the ceiling (no ballast means a full-supply swing)."""
    if not (v_max > 0.0):
        raise ValueError("v_max must be positive")

    def tree(ct_tree, cb, cd):
        ca = ct_tree + cb + cd
        if ca <= 0.0:
            return (0.0, 0.0)
        return ((v_max * cb) / ca, (v_max * (ct_tree + cb)) / ca)

    return (tree(m.ct_pos, m.cb_pos, m.cd_pos),
            tree(m.ct_neg, m.cb_neg, m.cd_neg))


def cos_theta(vec, x) -> float:
    """Cosine of the angle between a signed vector and an input vector."""
    a = np.asarray(vec, dtype=np.float64)
    b = np.asarray(x, dtype=np.float64)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cos_theta requires nonzero vectors")
    return float(min(1.0, max(-1.0, float(np.dot(a, b)) / (na * nb))))


def _mean_dev(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = _ascending_sum(values) / n
    var = _ascending_sum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def neuron_metrics(m: MappedAcn, *, v_max: float = 1.0, psi: float | None = None) -> NeuronMetrics:
    swing_pos, swing_neg = swing_range(m, v_max)
    return NeuronMetrics(
        name=m.name,
        n=m.n,
        ct=m.ct,
        sum_cd=m.sum_cd,
        cap_vec_norm=cap_vec_norm(m),
        total_capacitance=m.total_capacitance,
        swing_pos=swing_pos,
        swing_neg=swing_neg,
        psi=psi,
    )


def aggregate(records: list[NeuronMetrics]) -> LayerAggregates:
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    mean_cd, dev_cd = _mean_dev([r.sum_cd for r in records])
    mean_norm, dev_norm = _mean_dev([r.cap_vec_norm for r in records])
    mean_ct, dev_ct = _mean_dev([r.ct for r in records])
    return LayerAggregates(
        count=len(records),
        mean_sum_cd=mean_cd,
        dev_sum_cd=dev_cd,
        mean_cap_vec_norm=mean_norm,
        dev_cap_vec_norm=dev_norm,
        mean_ct=mean_ct,
        dev_ct=dev_ct,
        total_capacitance=_ascending_sum(r.total_capacitance for r in records),
    )


def layer_stats(layer: list[MappedAcn], *, v_max: float = 1.0, inputs=None,
                tol: float = DEFAULT_INSTABILITY_TOL, label: str = "") -> MappingReport:
    """Per-neuron records plus layer aggregates; with an input corpus the
    per-neuron instability metric is included."""
    if not layer:
        raise ValueError("layer must be non-empty")
    records = []
    for m in layer:
        psi = None
        if inputs is not None and len(inputs) > 0:
            psi = instability(m, inputs, tol, v_max)
        records.append(neuron_metrics(m, v_max=v_max, psi=psi))
    records = tuple(records)
    return MappingReport(records=records, aggregates=aggregate(list(records)),
                         label=label)
