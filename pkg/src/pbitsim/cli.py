"""Command-line front end: scenario runs, sweeps, gate verification and synthesis.

A scenario is a JSON document naming a network (a shipped gate, a raw
coupling matrix, or one of the composite builders), a clamp plan, timing
parameters and a run budget. ``run`` executes it and writes ``histogram.csv``
plus ``report.json`` (and optionally ``trace.csv``) into the output
directory; the sweep subcommands write ``distance.csv``.

Exit codes: 0 success, 2 configuration/validation error, 3 verification or
synthesis failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import analysis, dynamics
from .core import QuantizationConfig
from .errors import CapacityError, ConfigurationError, SynthesisError, VerificationError
from .networks import (
    GateSpec,
    NetworkSpec,
    build_factorizer,
    build_full_adder,
    build_rca4,
    ground_state_report,
    load_gate,
    load_gate_file,
    normal_retention_plan,
    save_gate,
    synthesize_gate,
    synthesize_gate_lp,
    verify_ground_states,
)
from .oracle import euclidean_distance

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["name", "network", "seed"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "network": {
            "type": "object",
            "required": ["kind", "i0"],
            "additionalProperties": False,
            "properties": {
                "kind": {
                    "enum": ["gate", "matrix", "full_adder", "rca4", "factorizer"]
                },
                "gate": {"type": "string"},
                "j": {"type": "array"},
                "h": {"type": "array"},
                "labels": {"type": "object"},
                "i0": {"type": "number", "minimum": 0},
                "tau_sample_us": {"type": "integer", "minimum": 1},
                "dac_bits": {"type": "integer", "minimum": 0},
                "adc_bits": {"type": "integer", "minimum": 0},
                "vref": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "clamps": {
            "type": "object",
            "additionalProperties": {"type": "integer", "enum": [0, 1]},
        },
        "retention_us": {
            "oneOf": [
                {"type": "integer", "minimum": 1},
                {"type": "array", "items": {"type": "integer", "minimum": 1}},
            ]
        },
        "retention_normal": {
            "type": "object",
            "required": ["seed"],
            "additionalProperties": False,
            "properties": {
                "seed": {"type": "integer", "minimum": 0},
                "mean_us": {"type": "integer", "minimum": 1},
                "lo_us": {"type": "integer", "minimum": 1},
                "hi_us": {"type": "integer", "minimum": 1},
                "sigma_us": {"type": "integer", "minimum": 1},
            },
        },
        "jitter_fraction": {"type": "number", "minimum": 0, "maximum": 1},
        "phases_us": {
            "oneOf": [
                {"type": "integer", "minimum": 0},
                {"type": "array", "items": {"type": "integer", "minimum": 0}},
            ]
        },
        "seed": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "updates": {"type": "integer", "minimum": 1},
        "burn_in": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "histogram_over": {
            "type": "array",
            "items": {"type": "string"},
            "minItems": 1,
        },
        "record_trace": {"type": "boolean"},
        "compare_oracle": {"type": "boolean"},
        "serialization_window_us": {"type": "integer", "minimum": 1},
    },
}

GATE_INPUT_SCHEMA = {
    "type": "object",
    "required": ["name", "table"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "table": {"type": "array", "minItems": 1, "items": {"type": "array"}},
        "n_aux": {"type": "integer", "minimum": 0},
        "labels": {"type": "array", "items": {"type": "string"}},
        "inputs": {"type": "array", "items": {"type": "string"}},
        "outputs": {"type": "array", "items": {"type": "string"}},
        "method": {"enum": ["lp", "exhaustive"]},
        "aux_assignments": {"type": "array"},
        "max_weight": {"type": "number", "exclusiveMinimum": 0},
    },
}


def load_scenario(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    jsonschema.validate(doc, SCENARIO_SCHEMA)
    if "samples" not in doc and "updates" not in doc:
        raise ConfigurationError("scenario needs a 'samples' or 'updates' budget")
    return doc


def _matrix_network(spec: dict) -> NetworkSpec:
    if "j" not in spec or "h" not in spec:
        raise ConfigurationError("matrix networks need 'j' and 'h'")
    j = np.asarray(spec["j"], dtype=float)
    h = np.asarray(spec["h"], dtype=float)
    n = len(h)
    labels = {str(k): int(v) for k, v in spec.get("labels", {}).items()}
    if not labels:
        labels = {f"pbit_{k}": k for k in range(n)}
    gate = GateSpec(
        name="matrix",
        visible=labels,
        inputs=[],
        outputs=[],
        auxiliary=[],
        truth_table=[],
        j=j.tolist(),
        h=h.tolist(),
        verified=True,  # raw machines carry no truth table to verify against
    )
    from .networks import single_machine_network

    return single_machine_network(gate, spec["i0"])


def build_network(doc: dict) -> NetworkSpec:
    """Instantiate the scenario's network with every override applied."""
    spec = doc["network"]
    kind = spec["kind"]
    i0 = spec["i0"]
    if kind == "gate":
        if "gate" not in spec:
            raise ConfigurationError("gate networks need a 'gate' name")
        from .networks import single_machine_network

        net = single_machine_network(verify_ground_states(load_gate(spec["gate"])), i0)
    elif kind == "matrix":
        net = _matrix_network(spec)
    elif kind == "full_adder":
        net = build_full_adder(i0)
    elif kind == "rca4":
        net = build_rca4(i0)
    else:
        net = build_factorizer(i0)

    if "tau_sample_us" in spec:
        net.set_tau_sample(spec["tau_sample_us"])
    if spec.get("dac_bits") or spec.get("adc_bits"):
        net.set_quantization(
            QuantizationConfig(
                dac_bits=spec.get("dac_bits", 0),
                adc_bits=spec.get("adc_bits", 0),
                vref=spec.get("vref", 5.0),
            )
        )
    if "retention_us" in doc:
        net.set_retention(doc["retention_us"])
    if "retention_normal" in doc:
        kw = dict(doc["retention_normal"])
        net.set_retention(normal_retention_plan(net.n_total, kw.pop("seed"), **kw))
    if "jitter_fraction" in doc:
        net.set_jitter(doc["jitter_fraction"])
    if "phases_us" in doc:
        net.set_phases(doc["phases_us"])
    if doc.get("clamps"):
        net = net.with_clamps(doc["clamps"])
    net.validate()
    return net


def _histogram_labels(doc: dict, net: NetworkSpec) -> dict:
    wanted = doc.get("histogram_over", list(net.visible_labels))
    missing = [lab for lab in wanted if lab not in net.visible_labels]
    if missing:
        raise ConfigurationError(f"unknown histogram labels {missing}")
    return {lab: net.visible_labels[lab] for lab in wanted}


def cmd_run(args) -> int:
    doc = load_scenario(args.scenario)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.samples is not None:
        doc["samples"] = args.samples
    if args.burn_in is not None:
        doc["burn_in"] = args.burn_in
    net = build_network(doc)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    record_updates = "serialization_window_us" in doc
    trace = dynamics.run(
        net,
        doc["seed"],
        max_samples=doc.get("samples"),
        max_updates=doc.get("updates"),
        record_updates=record_updates,
    )
    burn_in = doc.get("burn_in", 0.1)
    emp = analysis.histogram(trace, _histogram_labels(doc, net), burn_in)
    emp.to_csv(outdir / "histogram.csv")
    if doc.get("record_trace"):
        trace.to_csv(outdir / "trace.csv")

    report = {
        "name": doc["name"],
        "seed": doc["seed"],
        "n_units": net.n_total,
        "samples": len(trace),
        "burn_in_discarded": emp.burn_in_discarded,
        "final_time_us": int(trace.final_time_us),
        "update_counts": [int(x) for x in trace.update_counts],
        "one_fractions": [
            float(o) / c if c else 0.0
            for o, c in zip(trace.one_counts, trace.update_counts)
        ],
        "modes": analysis.mode_report(emp, args.top),
    }
    if doc.get("compare_oracle"):
        exact = analysis.single_machine_oracle(net)
        all_units = {f"pbit_{k}": k for k in range(net.n_total)}
        full = analysis.histogram(trace, all_units, burn_in)
        report["oracle_distance"] = float(
            euclidean_distance(full.probabilities, exact.probabilities)
        )
    if record_updates:
        w = doc["serialization_window_us"]
        total = len(trace.update_events)
        first = dynamics.serialization_metric(trace, net, w, 0, min(1000, total))
        last = dynamics.serialization_metric(trace, net, w, max(0, total - 2000), total)
        report["serialization_initial"] = first
        report["serialization_final"] = last
    with open(outdir / "report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(f"{doc['name']}: {len(trace)} samples, {net.n_total} units")
        for row in report["modes"]:
            print(f"  state {row['label']} ({row['state']}): {row['probability']:.4f}")
        if "oracle_distance" in report:
            print(f"  oracle distance: {report['oracle_distance']:.4f}")
    return 0


def cmd_sweep_tau(args) -> int:
    doc = load_scenario(args.scenario)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.samples is not None:
        doc["samples"] = args.samples
    if args.burn_in is not None:
        doc["burn_in"] = args.burn_in
    net = build_network(doc)
    taus = [int(x) for x in args.taus.split(",")]
    rows = analysis.sweep_sampling_time(
        net, doc["seed"], taus, doc["samples"], doc.get("burn_in", 0.1)
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    analysis.distance_rows_to_csv(rows, outdir / "distance.csv")
    if args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        for row in rows:
            print(f"tau={row['tau_us']}us ratio={row['tau_ratio']:g} distance={row['distance']:.4f}")
    return 0


def cmd_sweep_retention(args) -> int:
    doc = load_scenario(args.scenario)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.samples is not None:
        doc["samples"] = args.samples
    if args.burn_in is not None:
        doc["burn_in"] = args.burn_in
    net = build_network(doc)
    plans_doc = args.plans
    if Path(plans_doc).exists():
        with open(plans_doc) as fh:
            plans = json.load(fh)
    else:
        plans = json.loads(plans_doc)
    if not isinstance(plans, list) or not plans:
        raise ConfigurationError("plans must be a non-empty JSON list")
    rows = analysis.sweep_retention_spread(
        net, doc["seed"], plans, doc["samples"], doc.get("burn_in", 0.1)
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "distance.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["plan", "tau_ratio", "distance"])
        for row in rows:
            writer.writerow(
                [
                    " ".join(str(x) for x in row["plan"]),
                    repr(float(row["tau_ratio"])),
                    repr(float(row["distance"])),
                ]
            )
    if args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        for row in rows:
            print(f"plan={row['plan']} distance={row['distance']:.4f}")
    return 0


def cmd_verify(args) -> int:
    gate = load_gate_file(args.gatespec)
    report = ground_state_report(gate)
    if args.format == "json":
        printable = dict(report)
        printable["spurious_states"] = [int(w) for w in report.get("spurious_states", [])]
        print(json.dumps(printable, indent=2, sort_keys=True, default=str))
    else:
        print(
            f"{gate.name}: {'ok' if report['ok'] else 'FAILED'} "
            f"gap={report['gap']} spurious={report['spurious']} missing={report['missing']}"
        )
    verify_ground_states(gate)  # raises VerificationError -> exit 3
    return 0


def cmd_synth(args) -> int:
    with open(args.truthtable) as fh:
        doc = json.load(fh)
    jsonschema.validate(doc, GATE_INPUT_SCHEMA)
    table = [tuple(int(b) for b in row) for row in doc["table"]]
    kwargs = dict(
        name=doc["name"],
        labels=doc.get("labels"),
        inputs=doc.get("inputs"),
        outputs=doc.get("outputs"),
    )
    if doc.get("aux_assignments"):
        kwargs["aux_assignments"] = [tuple(a) for a in doc["aux_assignments"]]
    method = doc.get("method", "lp")
    n_aux = doc.get("n_aux", 0)
    if method == "lp":
        if doc.get("max_weight"):
            kwargs["bound"] = float(doc["max_weight"])
        gate = synthesize_gate_lp(table, n_aux=n_aux, **kwargs)
    else:
        if doc.get("max_weight"):
            kwargs["search_bound"] = int(doc["max_weight"])
        kwargs.pop("aux_assignments", None)
        gate = synthesize_gate(table, n_aux=n_aux, **kwargs)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"{gate.name}.json"
    save_gate(gate, path)
    report = ground_state_report(gate)
    print(f"{gate.name}: {gate.n} units, gap={report['gap']}, wrote {path}")
    return 0


def cmd_report(args) -> int:
    with open(args.histogram) as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigurationError("histogram file is empty")
    rows.sort(key=lambda r: (-float(r["probability"]), int(r["state"])))
    top = rows[: args.top]
    if args.format == "json":
        print(
            json.dumps(
                [
                    {
                        "state": int(r["state"]),
                        "label": r["label"],
                        "probability": float(r["probability"]),
                    }
                    for r in top
                ],
                indent=2,
            )
        )
    else:
        for r in top:
            print(f"state {r['label']} ({r['state']}): {float(r['probability']):.4f}")
    return 0


def _add_common(parser, samples=True):
    parser.add_argument("--seed", type=int, default=None, help="override scenario seed")
    if samples:
        parser.add_argument(
            "--samples", type=int, default=None, help="override sample budget"
        )
        parser.add_argument(
            "--burn-in", type=float, default=None, help="override burn-in fraction"
        )
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbitsim",
        description="Discrete-event simulation of stochastic p-bit networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario")
    p.add_argument("scenario")
    p.add_argument("--top", type=int, default=8, help="modes listed in the report")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-tau", help="oracle distance vs sampling period")
    p.add_argument("scenario")
    p.add_argument("--taus", required=True, help="comma-separated periods in us")
    _add_common(p)
    p.set_defaults(func=cmd_sweep_tau)

    p = sub.add_parser("sweep-retention", help="oracle distance vs retention plans")
    p.add_argument("scenario")
    p.add_argument("--plans", required=True, help="JSON list of plans, or a file path")
    _add_common(p)
    p.set_defaults(func=cmd_sweep_retention)

    p = sub.add_parser("verify", help="ground-state verification of a gate file")
    p.add_argument("gatespec")
    _add_common(p, samples=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth", help="synthesize a gate Hamiltonian from a truth table")
    p.add_argument("truthtable")
    _add_common(p, samples=False)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="top states of an existing histogram.csv")
    p.add_argument("histogram")
    p.add_argument("--top", type=int, default=8)
    _add_common(p, samples=False)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (VerificationError, SynthesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (
        ConfigurationError,
        CapacityError,
        jsonschema.ValidationError,
        json.JSONDecodeError,
        FileNotFoundError,
    ) as exc:
        msg = getattr(exc, "message", None) or str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
