"""Versioned JSON interchange formats and report emission.

Four file kinds share a common envelope (format name, version, units):

* ``acn-network``  — layers of abstract neurons. Weights and biases are
  decimal strings so files never drift across platforms.
* ``acn-netlist``  — mapped capacitor lists plus provenance.
* ``acn-corpus``   — binary input vectors.
* ``acn-report``   — per-neuron metrics and layer aggregates.

Serialization is deterministic: keys are sorted, capacitors are ordered
by (tree, role, index), and floats round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, SchemaVersionError
from .model import (
    AcnDiagnostics,
    EvalResult,
    LayerAggregates,
    MappedAcn,
    MappingReport,
    NeuronMetrics,
    NeuronSpec,
    TechConstraints,
)

FORMAT_VERSION = 1
UNITS = {"capacitance": "fF", "voltage": "V"}

_ROLE_ORDER = {"synapse": 0, "bias": 1, "ballast": 2}


def _envelope(format_name: str) -> dict:
    return {"format": format_name, "version": FORMAT_VERSION, "units": dict(UNITS)}


def _check_envelope(data: dict, format_name: str, path) -> None:
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    if data.get("format") != format_name:
        raise SchemaVersionError(
            f"{path}: expected format {format_name!r}, found {data.get('format')!r}"
        )
    if data.get("version") != FORMAT_VERSION:
        raise SchemaVersionError(
            f"{path}: unsupported version {data.get('version')!r}"
        )


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None


def _dump_json(data: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_decimal(text, what: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ParseError(f"{what}: cannot parse decimal {text!r}") from None


# ---------------------------------------------------------------- neurons


def neuron_to_dict(spec: NeuronSpec) -> dict:
    out = {
        "name": spec.name,
        "weights": [repr(w) for w in spec.weights],
        "bias": repr(spec.bias),
        "quantization": spec.quantization,
    }
    if spec.bits is not None:
        out["bits"] = spec.bits
    return out


def neuron_from_dict(data: dict) -> NeuronSpec:
    try:
        weights = tuple(_parse_decimal(w, "weight") for w in data["weights"])
        bias = _parse_decimal(data["bias"], "bias")
        name = data["name"]
        quantization = data.get("quantization", "real")
    except KeyError as exc:
        raise ParseError(f"neuron entry missing key {exc}") from None
    return NeuronSpec(weights=weights, bias=bias, name=name,
                      quantization=quantization, bits=data.get("bits"))


@dataclass(frozen=True)
class Layer:
    name: str
    activation: str  # binary | linear
    neurons: tuple[NeuronSpec, ...]


@dataclass(frozen=True)
class Network:
    name: str
    layers: tuple[Layer, ...]


def network_to_dict(network: Network) -> dict:
    data = _envelope("acn-network")
    data["name"] = network.name
    data["layers"] = [
        {
            "name": layer.name,
            "activation": layer.activation,
            "neurons": [neuron_to_dict(s) for s in layer.neurons],
        }
        for layer in network.layers
    ]
    return data


def network_from_dict(data: dict, path="<memory>") -> Network:
    _check_envelope(data, "acn-network", path)
    layers = []
    try:
        for layer in data["layers"]:
            if layer["activation"] not in ("binary", "linear"):
                raise ParseError(
                    f"{path}: unknown activation {layer['activation']!r}"
                )
            layers.append(Layer(
                name=layer["name"],
                activation=layer["activation"],
                neurons=tuple(neuron_from_dict(d) for d in layer["neurons"]),
            ))
    except KeyError as exc:
        raise ParseError(f"{path}: missing key {exc}") from None
    return Network(name=data.get("name", ""), layers=tuple(layers))


def load_network(path) -> Network:
    """Validated network load; quantization metadata is preserved and
    checked (a binary tag with a non-(+/-1) weight is rejected)."""
    return network_from_dict(_load_json(path), path)


def save_network(network: Network, path) -> None:
    _dump_json(network_to_dict(network), path)


# ---------------------------------------------------------------- netlists


def _capacitor_rows(m: MappedAcn) -> list[dict]:
    rows = []
    for tree, caps in (("pos", m.cap_pos), ("neg", m.cap_neg)):
        for i in sorted(caps):
            rows.append({"role": "synapse", "tree": tree, "index": i, "fF": caps[i]})
    rows.append({"role": "bias", "tree": "pos", "index": None, "fF": m.cb_pos})
    rows.append({"role": "bias", "tree": "neg", "index": None, "fF": m.cb_neg})
    rows.append({"role": "ballast", "tree": "pos", "index": None, "fF": m.cd_pos})
    rows.append({"role": "ballast", "tree": "neg", "index": None, "fF": m.cd_neg})
    rows.sort(key=lambda r: (r["tree"], _ROLE_ORDER[r["role"]],
                             -1 if r["index"] is None else r["index"]))
    return rows


def mapped_to_dict(m: MappedAcn) -> dict:
    return {
        "name": m.name,
        "n": m.n,
        "mapping": m.mapping_kind,
        "ct": m.ct,
        "ct_pos": m.ct_pos,
        "ct_neg": m.ct_neg,
        "diagnostics": {
            "delta": m.diagnostics.delta,
            "ca_pos": m.diagnostics.ca_pos,
            "ca_neg": m.diagnostics.ca_neg,
        },
        "capacitors": _capacitor_rows(m),
    }


def mapped_from_dict(data: dict) -> MappedAcn:
    try:
        cap_pos: dict[int, float] = {}
        cap_neg: dict[int, float] = {}
        scalars = {("bias", "pos"): 0.0, ("bias", "neg"): 0.0,
                   ("ballast", "pos"): 0.0, ("ballast", "neg"): 0.0}
        for row in data["capacitors"]:
            role, tree, value = row["role"], row["tree"], row["fF"]
            if role == "synapse":
                target = cap_pos if tree == "pos" else cap_neg
                target[int(row["index"])] = float(value)
            else:
                scalars[(role, tree)] = float(value)
        diag = data["diagnostics"]
        return MappedAcn(
            name=data["name"],
            n=int(data["n"]),
            cap_pos=cap_pos,
            cap_neg=cap_neg,
            cb_pos=scalars[("bias", "pos")],
            cb_neg=scalars[("bias", "neg")],
            cd_pos=scalars[("ballast", "pos")],
            cd_neg=scalars[("ballast", "neg")],
            ct=float(data["ct"]),
            ct_pos=float(data["ct_pos"]),
            ct_neg=float(data["ct_neg"]),
            mapping_kind=data["mapping"],
            diagnostics=AcnDiagnostics(
                delta=float(diag["delta"]),
                ca_pos=float(diag["ca_pos"]),
                ca_neg=float(diag["ca_neg"]),
            ),
        )
    except KeyError as exc:
        raise ParseError(f"netlist neuron missing key {exc}") from None


def save_mapping(layer, path, provenance: dict | None = None) -> None:
    """Write a netlist file: every capacitor with role, tree, index and
    value, in stable order, plus run provenance."""
    data = _envelope("acn-netlist")
    data["provenance"] = dict(provenance or {})
    data["neurons"] = [mapped_to_dict(m) for m in layer]
    _dump_json(data, path)


def load_mapping(path) -> tuple[list[MappedAcn], dict]:
    data = _load_json(path)
    _check_envelope(data, "acn-netlist", path)
    try:
        neurons = [mapped_from_dict(d) for d in data["neurons"]]
    except KeyError as exc:
        raise ParseError(f"{path}: missing key {exc}") from None
    return neurons, data.get("provenance", {})


# ---------------------------------------------------------------- corpora


def save_corpus(inputs, path) -> None:
    data = _envelope("acn-corpus")
    arr = np.asarray(inputs, dtype=np.uint8)
    data["inputs"] = [[int(b) for b in row] for row in arr]
    _dump_json(data, path)


def load_corpus(path) -> np.ndarray:
    data = _load_json(path)
    _check_envelope(data, "acn-corpus", path)
    try:
        rows = data["inputs"]
    except KeyError as exc:
        raise ParseError(f"{path}: missing key {exc}") from None
    arr = np.asarray(rows, dtype=np.uint8)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ParseError(f"{path}: corpus entries must be bits")
    return arr.reshape((len(rows), -1)) if arr.size else arr.reshape((0, 0))


# ---------------------------------------------------------------- reports


def _metrics_to_dict(r: NeuronMetrics) -> dict:
    out = {
        "name": r.name,
        "n": r.n,
        "ct": r.ct,
        "sum_cd": r.sum_cd,
        "cap_vec_norm": r.cap_vec_norm,
        "total_capacitance": r.total_capacitance,
        "swing_pos": list(r.swing_pos),
        "swing_neg": list(r.swing_neg),
    }
    if r.psi is not None:
        out["psi"] = r.psi
    return out


def _metrics_from_dict(d: dict) -> NeuronMetrics:
    return NeuronMetrics(
        name=d["name"], n=d["n"], ct=d["ct"], sum_cd=d["sum_cd"],
        cap_vec_norm=d["cap_vec_norm"],
        total_capacitance=d["total_capacitance"],
        swing_pos=tuple(d["swing_pos"]), swing_neg=tuple(d["swing_neg"]),
        psi=d.get("psi"),
    )


def report_to_dict(report: MappingReport) -> dict:
    data = _envelope("acn-report")
    a = report.aggregates
    data["label"] = report.label
    data["mismatches"] = report.mismatches
    data["boundary_ties"] = report.boundary_ties
    data["checks"] = report.checks
    data["rejected"] = report.rejected
    data["aggregates"] = {
        "count": a.count,
        "mean_sum_cd": a.mean_sum_cd,
        "dev_sum_cd": a.dev_sum_cd,
        "mean_cap_vec_norm": a.mean_cap_vec_norm,
        "dev_cap_vec_norm": a.dev_cap_vec_norm,
        "mean_ct": a.mean_ct,
        "dev_ct": a.dev_ct,
        "total_capacitance": a.total_capacitance,
    }
    data["records"] = [_metrics_to_dict(r) for r in report.records]
    return data


def report_from_dict(data: dict, path="<memory>") -> MappingReport:
    _check_envelope(data, "acn-report", path)
    a = data["aggregates"]
    return MappingReport(
        records=tuple(_metrics_from_dict(d) for d in data["records"]),
        aggregates=LayerAggregates(
            count=a["count"], mean_sum_cd=a["mean_sum_cd"],
            dev_sum_cd=a["dev_sum_cd"],
            mean_cap_vec_norm=a["mean_cap_vec_norm"],
            dev_cap_vec_norm=a["dev_cap_vec_norm"],
            mean_ct=a["mean_ct"], dev_ct=a["dev_ct"],
            total_capacitance=a["total_capacitance"],
        ),
        mismatches=data.get("mismatches", 0),
        boundary_ties=data.get("boundary_ties", 0),
        checks=data.get("checks", 0),
        rejected=data.get("rejected", 0),
        label=data.get("label", ""),
    )


def save_report(report: MappingReport, path) -> None:
    _dump_json(report_to_dict(report), path)


def load_report(path) -> MappingReport:
    return report_from_dict(_load_json(path), path)


# ------------------------------------------------------------- misc types


def tech_to_dict(tech: TechConstraints) -> dict:
    return {
        "c_min": tech.c_min,
        "pillar_bias": tech.pillar_bias,
        "pillar_ballast": tech.pillar_ballast,
        "v_max": tech.v_max,
        "parasitic_pos": tech.parasitic_pos,
        "parasitic_neg": tech.parasitic_neg,
        "v_bias": tech.v_bias,
    }


def tech_from_dict(data: dict) -> TechConstraints:
    return TechConstraints(**data)


def eval_result_to_dict(r: EvalResult) -> dict:
    return {"vm_pos": r.vm_pos, "vm_neg": r.vm_neg,
            "delta_vm": r.delta_vm, "output": r.output}


def eval_result_from_dict(data: dict) -> EvalResult:
    return EvalResult(**data)


# ------------------------------------------------------------------- CSV

SWEEP_CSV_COLUMNS = [
    "label", "mapping", "n", "count", "sigma", "tau", "ct_fF",
    "pillar_bias_fF", "pillar_ballast_fF", "binarized", "seed",
    "mean_cd_fF", "dev_cd_fF", "mean_c_norm", "dev_c_norm",
    "rejected", "mismatches", "boundary_ties", "checks",
]

REPORT_CSV_COLUMNS = [
    "name", "n", "ct_fF", "sum_cd_fF", "c_norm", "total_fF",
    "swing_pos_lo_V", "swing_pos_hi_V", "swing_neg_lo_V", "swing_neg_hi_V",
    "psi",
]


def sweep_csv_row(config, report: MappingReport) -> dict:
    a = report.aggregates
    return {
        "label": report.label or config.label,
        "mapping": config.mapping,
        "n": config.n,
        "count": config.count,
        "sigma": repr(config.sigma),
        "tau": repr(config.tau),
        "ct_fF": repr(config.ct),
        "pillar_bias_fF": repr(config.pillar_bias),
        "pillar_ballast_fF": repr(config.pillar_ballast),
        "binarized": int(config.binarize),
        "seed": config.seed,
        "mean_cd_fF": repr(a.mean_sum_cd),
        "dev_cd_fF": repr(a.dev_sum_cd),
        "mean_c_norm": repr(a.mean_cap_vec_norm),
        "dev_c_norm": repr(a.dev_cap_vec_norm),
        "rejected": report.rejected,
        "mismatches": report.mismatches,
        "boundary_ties": report.boundary_ties,
        "checks": report.checks,
    }


def report_csv_rows(report: MappingReport) -> list[dict]:
    rows = []
    for r in report.records:
        rows.append({
            "name": r.name,
            "n": r.n,
            "ct_fF": repr(r.ct),
            "sum_cd_fF": repr(r.sum_cd),
            "c_norm": repr(r.cap_vec_norm),
            "total_fF": repr(r.total_capacitance),
            "swing_pos_lo_V": repr(r.swing_pos[0]),
            "swing_pos_hi_V": repr(r.swing_pos[1]),
            "swing_neg_lo_V": repr(r.swing_neg[0]),
            "swing_neg_hi_V": repr(r.swing_neg[1]),
            "psi": "" if r.psi is None else repr(r.psi),
        })
    return rows


def write_csv(rows: list[dict], columns: list[str], path) -> None:
    """Deterministic CSV: fixed column order, '\\n' line endings, repr
    floats (deviations are population, capacitances fF, voltages V)."""
    text = csv_text(rows, columns)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def csv_text(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
