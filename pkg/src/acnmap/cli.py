"""Command-line surface: map, verify, sweep, report, tile.

Every run writes a machine-readable manifest alongside its primary output
(inputs with content hashes, resolved flags, seed, tool version) so any
result can be regenerated exactly.

Exit codes:
    0  success
    1  unexpected internal error
    2  usage error (bad flags)
    3  parse error / unsupported format version
    4  data invariant violation / network shape mismatch
    5  all-zero weight vector (nothing to map)
    6  verification found mismatches
    7  weight totals exceed v_max (ReLU mapping infeasible)
    8  capacitances not unit-quantized (tile)
    9  input set too large or dimension mismatch
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, interchange, kernels, metrics
from .errors import (
    AllZeroWeights,
    DimensionMismatch,
    InvariantViolation,
    NotUnitQuantized,
    ParseError,
    SchemaMismatch,
    SchemaVersionError,
    TooLargeForExhaustive,
    WeightNormExceedsVmax,
)
from .harness import SweepConfig, sweep_random, tile_plan
from .mapper import (
    apply_pillars,
    check_realizable,
    compensate_parasitics,
    map_neuron,
    prune,
    select_ct,
)
from .model import TechConstraints
from .simulator import verify_equivalence

EXIT_CODES = {
    ParseError: 3,
    SchemaVersionError: 3,
    InvariantViolation: 4,
    SchemaMismatch: 4,
    AllZeroWeights: 5,
    WeightNormExceedsVmax: 7,
    NotUnitQuantized: 8,
    TooLargeForExhaustive: 9,
    DimensionMismatch: 9,
}

# Published experiment configurations, reproducible by name. Table-1
# presets map 10,000 random width-8 vectors at ct=100 fF and check all
# 256 input patterns; table-2 presets compare real against binarized
# weights across widths.
_T1 = dict(n=8, count=10000, sigma=0.1, ct=100.0, seed=20240801,
           verify="exhaustive")
PRESETS: dict[str, list[SweepConfig]] = {
    "table1-row1": [SweepConfig(mapping="conditional", tau=0.0, label="conditional tau=0.0", **_T1)],
    "table1-row2": [SweepConfig(mapping="vectored", tau=0.1, label="conditional vectored-bias tau=0.1", **_T1)],
    "table1-row3": [SweepConfig(mapping="conditional", tau=0.1, label="conditional tau=0.1", **_T1)],
    "table1-row4": [SweepConfig(mapping="conditional", tau=0.1, pillar_bias=2.0,
                                pillar_ballast=5.0, label="conditional tau=0.1 pillars", **_T1)],
    "table1-row5": [SweepConfig(mapping="conditional", tau=-0.1, label="conditional tau=-0.1", **_T1)],
    "table1-row6": [SweepConfig(mapping="balanced", tau=0.1, label="balanced tau=0.1", **_T1)],
    "table1-row7": [SweepConfig(mapping="relu", tau=0.1, v_max=1.0, label="relu tau=0.1 vmax=1.0", **_T1)],
}
for _n in (8, 16, 32, 64, 784):
    PRESETS[f"table2-n{_n}"] = [
        SweepConfig(n=_n, count=10000, sigma=0.1, tau=0.0, ct=100.0,
                    mapping="conditional", seed=20240801, binarize=b,
                    verify="auto", exhaustive_limit=8,
                    samples=64 if _n > 64 else 256,
                    label=f"n={_n} {'binarized' if b else 'real'}")
        for b in (False, True)
    ]
PRESETS["table1"] = [cfg for row in range(1, 8) for cfg in PRESETS[f"table1-row{row}"]]
PRESETS["table2"] = [cfg for _n in (8, 16, 32, 64) for cfg in PRESETS[f"table2-n{_n}"]]


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_path, args: argparse.Namespace, inputs: list, extra: dict | None = None) -> None:
    manifest = {
        "tool": f"acnmap {__version__}",
        "backend": kernels.backend_name(),
        "command": args.command,
        "options": {k: v for k, v in sorted(vars(args).items()) if k != "command"},
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs if p],
    }
    if extra:
        manifest.update(extra)
    path = Path(str(out_path) + ".manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _pick_layer(network, name: str | None):
    if name is None:
        for layer in network.layers:
            if layer.activation == "binary":
                return layer
        raise SchemaMismatch("network has no binary-activation layer")
    for layer in network.layers:
        if layer.name == name:
            return layer
    raise SchemaMismatch(f"no layer named {name!r}")


def _tech_from_args(args) -> TechConstraints:
    return TechConstraints(
        c_min=args.cmin,
        pillar_bias=args.pillar_bias,
        pillar_ballast=args.pillar_ballast,
        v_max=args.vmax,
        parasitic_pos=getattr(args, "parasitic_pos", 0.0),
        parasitic_neg=getattr(args, "parasitic_neg", 0.0),
    )


def _cmd_map(args) -> int:
    network = interchange.load_network(args.network)
    layer = _pick_layer(network, args.layer)
    tech = _tech_from_args(args)
    mapping = args.mapping
    if args.tau_vectored and mapping == "conditional":
        mapping = "vectored"

    mapped = []
    violations = []
    for spec in layer.neurons:
        if args.prune is not None:
            spec = prune(spec, args.prune)
        ct = args.ct if args.ct is not None else select_ct(spec, tech)
        m = map_neuron(spec, mapping, ct, tech.v_max)
        m = apply_pillars(m, tech)
        m = compensate_parasitics(m, tech)
        violations.extend(check_realizable(m, tech))
        mapped.append(m)

    provenance = {
        "tool": f"acnmap {__version__}",
        "network": str(args.network),
        "layer": layer.name,
        "mapping": mapping,
        "ct_fF": args.ct if args.ct is not None else "per-neuron (cmin)",
        "cmin_fF": args.cmin,
        "pillar_bias_fF": args.pillar_bias,
        "pillar_ballast_fF": args.pillar_ballast,
        "prune_threshold": args.prune,
        "v_max_V": args.vmax,
    }
    interchange.save_mapping(mapped, args.out, provenance)
    for v in violations:
        print(f"warning: {v.neuron} {v.role} ({v.tree}"
              f"{'' if v.index is None else f', index {v.index}'}) ="
              f" {v.value:.6g} fF is below c_min={tech.c_min:g} fF",
              file=sys.stderr)
    _write_manifest(args.out, args, [args.network],
                    {"realizability_violations": len(violations)})
    print(f"mapped {len(mapped)} neurons -> {args.out}"
          f" ({len(violations)} realizability warnings)")
    return 0


def _cmd_verify(args) -> int:
    network = interchange.load_network(args.network)
    layer = _pick_layer(network, args.layer)
    mapped, _ = interchange.load_mapping(args.netlist)
    if len(mapped) != len(layer.neurons):
        raise SchemaMismatch(
            f"netlist has {len(mapped)} neurons, layer has {len(layer.neurons)}"
        )
    total_mismatches = 0
    total_ties = 0
    total_checks = 0
    for spec, m in zip(layer.neurons, mapped):
        if spec.name != m.name:
            raise SchemaMismatch(f"neuron order differs: {spec.name} vs {m.name}")
        strategy = args.strategy
        if strategy == "exhaustive" and spec.n > args.exhaustive_limit:
            strategy = "sampled"
        found = verify_equivalence(spec, m, strategy, count=args.samples,
                                   seed=args.seed, v_max=args.vmax)
        total_checks += (1 << spec.n) if strategy == "exhaustive" else args.samples
        # exact-tie flips are divider rounding noise, not mapping errors
        ties = sum(1 for mm in found if mm.margin == 0.0)
        total_ties += ties
        total_mismatches += len(found) - ties
        for mm in found[:10]:
            print(f"mismatch {spec.name} x={mm.x} delta_vm={mm.delta_vm:.3e}"
                  f" margin={mm.margin:.3e}", file=sys.stderr)
    _write_manifest(f"{args.netlist}.verify", args, [args.network, args.netlist],
                    {"mismatches": total_mismatches, "boundary_ties": total_ties,
                     "checks": total_checks})
    print(f"verified {len(mapped)} neurons over {total_checks} checks:"
          f" {total_mismatches} mismatches, {total_ties} exact-tie flips")
    return 0 if total_mismatches == 0 else 6


def _parse_config_file(path) -> list[SweepConfig]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        # plain key=value lines
        data = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"{path}: bad config line {line!r}") from None
            key, value = line.split("=", 1)
            data[key.strip()] = value.strip()
    if isinstance(data, list):
        return [_coerce_config(d, path) for d in data]
    return [_coerce_config(data, path)]


def _coerce_config(data: dict, path) -> SweepConfig:
    fields = {
        "n": int, "count": int, "sigma": float, "tau": float,
        "mapping": str, "ct": float, "pillar_bias": float,
        "pillar_ballast": float, "seed": int,
        "binarize": lambda v: str(v).lower() in ("1", "true", "yes"),
        "v_max": float, "verify": str, "samples": int,
        "exhaustive_limit": int, "label": str,
    }
    kwargs = {}
    for key, value in data.items():
        if key not in fields:
            raise ParseError(f"{path}: unknown sweep option {key!r}")
        kwargs[key] = fields[key](value)
    try:
        return SweepConfig(**kwargs)
    except TypeError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _cmd_sweep(args) -> int:
    if args.preset:
        if args.preset not in PRESETS:
            raise ParseError(f"unknown preset {args.preset!r}; have"
                             f" {', '.join(sorted(PRESETS))}")
        configs = PRESETS[args.preset]
    else:
        configs = _parse_config_file(args.config)
    if args.seed is not None:
        import dataclasses
        configs = [dataclasses.replace(c, seed=args.seed) for c in configs]

    rows = []
    reports = []
    for config in configs:
        report = sweep_random(config)
        reports.append((config, report))
        rows.append(interchange.sweep_csv_row(config, report))
        a = report.aggregates
        print(f"{report.label or config.mapping}: mean Cd {a.mean_sum_cd:.1f} fF"
              f" (dev {a.dev_sum_cd:.1f}), mean |C| {a.mean_cap_vec_norm:.3f}"
              f" (dev {a.dev_cap_vec_norm:.3f}), rejected {report.rejected},"
              f" mismatches {report.mismatches}/{report.checks}"
              + (f" (+{report.boundary_ties} exact-tie flips)"
                 if report.boundary_ties else ""))

    out_csv = args.out_csv
    if out_csv:
        interchange.write_csv(rows, interchange.SWEEP_CSV_COLUMNS, out_csv)
    _write_manifest(out_csv or "acnmap-sweep", args,
                    [args.config] if args.config else [])
    if args.out_json:
        payload = interchange._envelope("acn-report")
        payload["sweeps"] = [interchange.report_to_dict(r) for _, r in reports]
        interchange._dump_json(payload, args.out_json)
    if args.plots:
        _sweep_plots(reports, Path(args.plots))
    return 0


def _sweep_plots(reports, outdir: Path) -> None:
    from . import plots
    from .harness import ballast_direction_curve

    outdir.mkdir(parents=True, exist_ok=True)
    phi, cd_pos, cd_neg = ballast_direction_curve()
    plots.ballast_direction_plot(phi, cd_pos, cd_neg,
                                 outdir / "ballast_vs_direction.svg")
    for config, report in reports:
        stem = (report.label or config.mapping).replace(" ", "_").replace("=", "")
        norms = [r.cap_vec_norm for r in report.records]
        plots.histogram(norms, outdir / f"cap_norm_{stem}.svg",
                        "|C|", label=report.label)


def _cmd_report(args) -> int:
    mapped, _ = interchange.load_mapping(args.netlist)
    corpus = interchange.load_corpus(args.corpus) if args.corpus else None
    tol = args.tolerance_mv / 1000.0
    report = metrics.layer_stats(mapped, v_max=args.vmax, inputs=corpus,
                                 tol=tol, label=args.label)
    a = report.aggregates
    print(f"neurons {a.count}: mean Cd {a.mean_sum_cd:.2f} fF, mean |C|"
          f" {a.mean_cap_vec_norm:.4f}, mean Ct {a.mean_ct:.1f} fF,"
          f" layer capacitance {a.total_capacitance / 1000.0:.2f} pF")
    if corpus is not None and len(corpus) and report.records[0].psi is not None:
        psis = [r.psi for r in report.records]
        print(f"instability psi(tol={args.tolerance_mv:g} mV):"
              f" mean {sum(psis) / len(psis):.4f}")
        magnitudes = np.concatenate([
            np.abs(metrics.corpus_delta_vm(m, corpus, args.vmax)) for m in mapped
        ])
        print(f"|delta_vm|: mean {1e3 * float(np.mean(magnitudes)):.1f} mV,"
              f" max {1e3 * float(np.max(magnitudes)):.1f} mV")
    if args.out_csv:
        interchange.write_csv(interchange.report_csv_rows(report),
                              interchange.REPORT_CSV_COLUMNS, args.out_csv)
    _write_manifest(args.out_csv or "acnmap-report", args,
                    [args.netlist] + ([args.corpus] if args.corpus else []))
    if args.out_json:
        interchange.save_report(report, args.out_json)
    if args.plots and corpus is not None and len(corpus):
        from . import plots
        from .harness import cos_theta_samples

        outdir = Path(args.plots)
        outdir.mkdir(parents=True, exist_ok=True)
        plots.cos_theta_histogram(cos_theta_samples(mapped, corpus),
                                  outdir / "cos_theta.svg", label=args.label)
    return 0


def _cmd_tile(args) -> int:
    mapped, _ = interchange.load_mapping(args.netlist)
    plans = []
    for m in mapped:
        plan = tile_plan(m, args.unit)
        plans.append({
            "name": m.name,
            "unit_fF": plan.unit,
            "synapse_pos": {str(k): v for k, v in plan.synapse_pos.items()},
            "synapse_neg": {str(k): v for k, v in plan.synapse_neg.items()},
            "bias_tiles": [plan.bias_pos, plan.bias_neg],
            "ballast_tiles": [plan.ballast_pos, plan.ballast_neg],
            "total_tiles": plan.total_tiles,
        })
        print(f"{m.name}: ballast tiles pos={plan.ballast_pos}"
              f" neg={plan.ballast_neg}, total {plan.total_tiles}")
    if args.out:
        data = interchange._envelope("acn-tile-plan")
        data["plans"] = plans
        interchange._dump_json(data, args.out)
    _write_manifest(args.out or "acnmap-tile", args, [args.netlist])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acnmap",
        description="Map abstract neuron weights onto dual-tree "
                    "switched-capacitor neuron netlists, verify them and "
                    "report hardware metrics.",
    )
    parser.add_argument("--version", action="version",
                        version=f"acnmap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="lower a network layer to a netlist")
    p_map.add_argument("--network", required=True)
    p_map.add_argument("--layer", default=None,
                       help="layer name (default: first binary layer)")
    p_map.add_argument("--mapping", default="conditional",
                       choices=["conditional", "vectored", "balanced", "relu"])
    p_map.add_argument("--ct", type=float, default=None,
                       help="explicit scaling constant in fF"
                            " (default: per-neuron from --cmin)")
    p_map.add_argument("--cmin", type=float, default=2.0,
                       help="minimum realizable capacitance in fF")
    p_map.add_argument("--prune", type=float, default=None,
                       help="zero weights below this magnitude first")
    p_map.add_argument("--pillar-bias", type=float, default=0.0)
    p_map.add_argument("--pillar-ballast", type=float, default=0.0)
    p_map.add_argument("--parasitic-pos", type=float, default=0.0)
    p_map.add_argument("--parasitic-neg", type=float, default=0.0)
    p_map.add_argument("--vmax", type=float, default=1.0)
    p_map.add_argument("--tau-vectored", action="store_true",
                       help="fold the bias into an always-on (N+1)-th weight"
                            " (same as --mapping vectored)")
    p_map.add_argument("--out", required=True)
    p_map.set_defaults(func=_cmd_map)

    p_verify = sub.add_parser("verify",
                              help="check a netlist against its source layer")
    p_verify.add_argument("--network", required=True)
    p_verify.add_argument("--layer", default=None)
    p_verify.add_argument("--netlist", required=True)
    p_verify.add_argument("--strategy", default="exhaustive",
                          choices=["exhaustive", "sampled"])
    p_verify.add_argument("--samples", type=int, default=1024)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--exhaustive-limit", type=int, default=16,
                          help="widest neuron checked exhaustively;"
                               " wider ones fall back to sampling")
    p_verify.add_argument("--vmax", type=float, default=1.0)
    p_verify.set_defaults(func=_cmd_verify)

    p_sweep = sub.add_parser("sweep", help="random-vector mapping experiment")
    group = p_sweep.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", default=None,
                       help=f"one of: {', '.join(sorted(PRESETS))}")
    group.add_argument("--config", default=None,
                       help="JSON or key=value sweep configuration file")
    p_sweep.add_argument("--seed", type=int, default=None,
                         help="override the configured seed")
    p_sweep.add_argument("--out-csv", default=None)
    p_sweep.add_argument("--out-json", default=None)
    p_sweep.add_argument("--plots", default=None,
                         help="directory for SVG plots")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_report = sub.add_parser("report", help="metrics over a mapped layer")
    p_report.add_argument("--netlist", required=True)
    p_report.add_argument("--corpus", default=None)
    p_report.add_argument("--tolerance-mv", type=float, default=5.0,
                          help="comparator tolerance for the instability"
                               " metric, in millivolts")
    p_report.add_argument("--vmax", type=float, default=1.0)
    p_report.add_argument("--label", default="")
    p_report.add_argument("--out-csv", default=None)
    p_report.add_argument("--out-json", default=None)
    p_report.add_argument("--plots", default=None)
    p_report.set_defaults(func=_cmd_report)

    p_tile = sub.add_parser("tile", help="unit-capacitor tiling plan")
    p_tile.add_argument("--netlist", required=True)
    p_tile.add_argument("--unit", type=float, required=True,
                        help="unit capacitor size in fF")
    p_tile.add_argument("--out", default=None)
    p_tile.set_defaults(func=_cmd_tile)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except tuple(EXIT_CODES) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES[type(exc)]
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
