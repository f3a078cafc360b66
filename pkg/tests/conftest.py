"""Shared helpers: random spec factories and independent oracles.

The oracles deliberately use different algebra than the package code
(fsum for totals, the on/off-capacitance form of the divider equation,
plain matrix products for the abstract neuron) so agreement is evidence,
not tautology.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from acnmap.model import MappedAcn, NeuronSpec

FIXTURES = Path(__file__).parent / "fixtures"


def random_spec(rng: np.random.Generator, n: int, tau: float = 0.0,
                sigma: float = 0.1, name: str = "spec") -> NeuronSpec:
    return NeuronSpec(weights=tuple(rng.standard_normal(n) * sigma),
                      bias=tau, name=name)


def exhaustive_inputs(n: int) -> np.ndarray:
    """All 2**n bit rows; bit i of the row index is x_i."""
    codes = np.arange(1 << n, dtype=np.uint64)
    return ((codes[:, None] >> np.arange(n, dtype=np.uint64)) & 1).astype(np.uint8)


def oracle_an(spec: NeuronSpec, x) -> int:
    """Independent abstract-neuron output via exact summation."""
    return 1 if math.fsum(w * b for w, b in zip(spec.weights, x)) >= spec.bias else 0


def oracle_membrane(m: MappedAcn, x, v_pc: float, v_b: float = 0.0):
    """Independent divider evaluation using the on/off-capacitance form:
    vm = v_b + v_pc * C_on / (C_on + C_off)."""

    def tree(caps, cb, cd, ct_tree):
        c_on = math.fsum(caps[i] for i in caps if x[i]) + cb
        c_off = math.fsum(caps[i] for i in caps if not x[i]) + cd
        if c_on + c_off == 0.0:
            return v_b
        return v_b + v_pc * c_on / (c_on + c_off)

    return (tree(m.cap_pos, m.cb_pos, m.cd_pos, m.ct_pos),
            tree(m.cap_neg, m.cb_neg, m.cd_neg, m.ct_neg))


def oracle_delta(m: MappedAcn, x, v_max: float) -> float:
    vp, vn = oracle_membrane(m, x, v_max, 0.0)
    return vp - vn


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
