#!/usr/bin/env python3
"""Regenerate the committed test fixtures: two small two-layer networks
(real-valued and binary hidden weights), a 100-image corpus, and expected
hidden bits / predictions from an independent numpy forward pass.

The expected values are the oracle the test suite compares the mapped
hardware model against; they are computed here with plain matrix algebra,
not with any package simulation code.

Run from the repository root:  python scripts/make_fixtures.py
"""

import hashlib
import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from acnmap.interchange import Layer, Network, save_corpus, save_network  # noqa: E402
from acnmap.model import NeuronSpec  # noqa: E402

OUT = ROOT / "tests" / "fixtures"

N_INPUTS = 16
N_HIDDEN = 16
N_OUTPUT = 4
N_IMAGES = 100
SEED = 20240817


def forward_oracle(w_hidden, tau_hidden, w_out, tau_out, images):
    """Independent software forward pass: hidden bit is w.x >= tau, output
    score is w.h - tau, prediction is the argmax."""
    hidden = (images @ w_hidden.T >= tau_hidden).astype(np.uint8)
    scores = hidden @ w_out.T - tau_out
    return hidden, np.argmax(scores, axis=1)


def build_network(name, w_hidden, tau_hidden, quantization, w_out, tau_out):
    hidden = Layer(
        name="hidden",
        activation="binary",
        neurons=tuple(
            NeuronSpec(weights=tuple(w_hidden[j]), bias=float(tau_hidden[j]),
                       name=f"h{j:02d}", quantization=quantization)
            for j in range(w_hidden.shape[0])
        ),
    )
    output = Layer(
        name="output",
        activation="linear",
        neurons=tuple(
            NeuronSpec(weights=tuple(w_out[j]), bias=float(tau_out[j]),
                       name=f"o{j}")
            for j in range(w_out.shape[0])
        ),
    )
    return Network(name=name, layers=(hidden, output))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)

    images = (rng.random((N_IMAGES, N_INPUTS)) < 0.5).astype(np.uint8)

    # real-valued hidden weights, trained-like scale
    w_real = rng.standard_normal((N_HIDDEN, N_INPUTS)) * 0.1
    tau_real = rng.standard_normal(N_HIDDEN) * 0.05

    # binary hidden weights with the fixed half-unit threshold that keeps
    # the differential voltage away from zero
    w_bin = np.where(rng.random((N_HIDDEN, N_INPUTS)) < 0.5, -1.0, 1.0)
    tau_bin = np.full(N_HIDDEN, 0.5)

    w_out = rng.standard_normal((N_OUTPUT, N_HIDDEN)) * 0.5
    tau_out = rng.standard_normal(N_OUTPUT) * 0.1

    save_corpus(images, OUT / "corpus16.json")

    for label, w_h, tau_h, quant in (
        ("real16", w_real, tau_real, "real"),
        ("bin16", w_bin, tau_bin, "binary"),
    ):
        network = build_network(label, w_h, tau_h, quant, w_out, tau_out)
        save_network(network, OUT / f"network_{label}.json")
        hidden, pred = forward_oracle(w_h, tau_h, w_out, tau_out, images)
        expected = {
            "network": label,
            "hidden_bits": [[int(b) for b in row] for row in hidden],
            "predictions": [int(p) for p in pred],
        }
        with open(OUT / f"expected_{label}.json", "w", encoding="utf-8") as fh:
            json.dump(expected, fh, indent=2, sort_keys=True)
            fh.write("\n")

    for name in ("network_real16.json", "network_bin16.json", "corpus16.json"):
        digest = hashlib.sha256((OUT / name).read_bytes()).hexdigest()
        print(f"{name}: sha256 {digest}")


if __name__ == "__main__":
    main()
