"""Command-line front end: metrics, simulate, sweep, minimize.

Output goes to stdout or --out as CSV or JSON.  JSON outputs embed the run
manifest; writing to a file additionally drops a <out>.manifest.json sidecar
that adds a wall-clock timestamp (kept out of the main output so identical
seeds produce byte-identical files).  Non-finite metric values are always
serialized as the string "divergent" next to a boolean divergent column,
never as infinity literals.

Exit codes: 0 success, 2 configuration error, 3 runtime error.  Errors are
printed to stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import secrets
import sys
from datetime import datetime, timezone

from . import __version__
from .aoi import avg_aoi, avg_paoi, exp_y, exp_z
from .channel import lcr, snr_cdf
from .config import (
    ConfigError,
    LinkConfig,
    ProtocolConfig,
    load_config,
    parse_link,
    parse_power,
    parse_protocol,
    parse_sim,
)
from .pep import pep
from .report import METRIC_FIELDS, compute_report
from .simkit import simulate_fading_process, simulate_packet_process
from .sweep import (
    OUTPUT_FIELDS,
    evaluate_point,
    minimize_eta,
    minimize_spec_from_doc,
    run_sweep,
    sweep_spec_from_doc,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_DEFAULT_FORMAT = {"metrics": "json", "simulate": "csv",
                   "sweep": "csv", "minimize": "json"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agelink",
        description="Non-linear age-of-information and energy metrics of a "
                    "stop-and-wait status-update link over Rician fading.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, metavar="PATH",
                       help="JSON configuration file")
        p.add_argument("--out", metavar="PATH",
                       help="output file (default stdout); also writes a "
                            "<out>.manifest.json sidecar")
        p.add_argument("--format", choices=("csv", "json"),
                       help="output format (default depends on the command)")

    p = sub.add_parser("metrics", help="closed-form metrics at one operating point")
    add_common(p)

    p = sub.add_parser("simulate", help="Monte-Carlo oracle run")
    add_common(p)
    p.add_argument("--oracle", choices=("packet", "channel"), required=True,
                   help="packet: slot-level renewal process; "
                        "channel: sum-of-sinusoids fading process")
    p.add_argument("--seed", type=int, metavar="N",
                   help="RNG seed; auto-generated and recorded when omitted")
    p.add_argument("--workers", type=int, default=1, metavar="K",
                   help="replications evaluated in parallel (default 1)")

    p = sub.add_parser("sweep", help="metrics over a parameter grid")
    add_common(p)
    p.add_argument("--normalize", action="store_true",
                   help="append eta/min(eta) columns over the finite rows")
    p.add_argument("--plot", action="store_true",
                   help="render a figure next to --out")
    p.add_argument("--workers", type=int, default=1, metavar="K")

    p = sub.add_parser("minimize", help="1-D minimization of eta or eta_p")
    add_common(p)
    p.add_argument("--plot", action="store_true",
                   help="render the objective curve next to --out")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        _dispatch(args)
    except ConfigError as exc:
        _print_error(exc, EXIT_CONFIG)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, OSError) as exc:
        _print_error(exc, EXIT_RUNTIME)
        return EXIT_RUNTIME
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


def _dispatch(args: argparse.Namespace) -> None:
    args.format = args.format or _DEFAULT_FORMAT[args.command]
    doc = load_config(args.config)
    runner = {"metrics": _cmd_metrics, "simulate": _cmd_simulate,
              "sweep": _cmd_sweep, "minimize": _cmd_minimize}[args.command]
    runner(args, doc)


# ----------------------------------------------------------------------
# commands

def _cmd_metrics(args: argparse.Namespace, doc: dict) -> None:
    link, protocol, power = parse_link(doc), parse_protocol(doc), parse_power(doc)
    rep = compute_report(link, protocol, power)
    manifest = _manifest(args, seed=None)
    if args.format == "json":
        text = _dump_json({"manifest": manifest, "metrics": rep.as_dict()})
    else:
        header = METRIC_FIELDS + ("divergent",)
        row = [getattr(rep, f) for f in METRIC_FIELDS] + [rep.divergent]
        text = _csv_text(header, [row])
        for note in rep.regime_notes:
            print(f"note: {note}", file=sys.stderr)
    _write_output(text, args, manifest)


def _cmd_simulate(args: argparse.Namespace, doc: dict) -> None:
    if args.seed is not None and args.seed < 0:
        raise ConfigError("--seed", "must be a non-negative integer")
    if args.workers < 1:
        raise ConfigError("--workers", "must be >= 1")
    link, protocol = parse_link(doc), parse_protocol(doc)
    seed = args.seed if args.seed is not None else secrets.randbits(32)
    cfg = parse_sim(doc, seed)
    sim_sec = doc.get("sim", {})

    if args.oracle == "packet":
        if cfg.n_packets is None:
            raise ConfigError("sim.n_packets", "required for the packet oracle")
        if "p" in sim_sec:
            p = sim_sec["p"]
            if isinstance(p, bool) or not isinstance(p, (int, float)) \
                    or not 0.0 <= p < 1.0:
                raise ConfigError("sim.p", f"must be a number in [0, 1), got {p!r}")
            p = float(p)
            p_from = "config"
        else:
            p = pep(link.fading_params(), link.packet_params(), link.gamma_th)
            p_from = "channel_model"
            if p >= 1.0:
                raise ValueError(
                    "channel model gives p = 1; the packet oracle cannot "
                    "reach any successful reception")
        params = protocol.aoi_params(link.t_packet_s)
        out = simulate_packet_process(p, params, cfg, workers=args.workers)
        closed = {"avg_aoi": avg_aoi(p, params), "avg_paoi": avg_paoi(p, params),
                  "exp_y": exp_y(p), "exp_z": exp_z(p, protocol.max_tx)}
        extra = {"oracle": "packet", "p": p, "p_from": p_from}
    else:
        if cfg.sim_duration_s is None:
            raise ConfigError("sim.sim_duration_s", "required for the channel oracle")
        fp, pp = link.fading_params(), link.packet_params()
        gamma_th = link.gamma_th
        out = simulate_fading_process(fp, pp, gamma_th, cfg, workers=args.workers)
        closed = {"snr_cdf": snr_cdf(fp, gamma_th), "lcr": lcr(fp, gamma_th),
                  "pep": pep(fp, pp, gamma_th)}
        extra = {"oracle": "channel"}

    rows = [
        {"metric": name, "estimate": res.estimate, "std_error": res.std_error,
         "n_samples": res.n_samples, "closed_form": closed[name],
         "divergence_detected": res.divergence_detected}
        for name, res in zip(out._fields, out)
    ]
    manifest = _manifest(args, seed=seed)
    if args.format == "json":
        text = _dump_json({"manifest": manifest, **extra, "rows": rows})
    else:
        header = ("metric", "estimate", "std_error", "n_samples",
                  "closed_form", "divergence_detected")
        text = _csv_text(header, [[r[k] for k in header] for r in rows])
    _write_output(text, args, manifest)


def _cmd_sweep(args: argparse.Namespace, doc: dict) -> None:
    if args.workers < 1:
        raise ConfigError("--workers", "must be >= 1")
    if args.plot and not args.out:
        raise ConfigError("--plot", "requires --out to name the figure file")
    link, protocol, power = parse_link(doc), parse_protocol(doc), parse_power(doc)
    spec = sweep_spec_from_doc(doc, link, protocol, power)
    rows = run_sweep(spec, workers=args.workers)

    fields = [f for f in OUTPUT_FIELDS if f in spec.outputs]
    norm = {}
    if args.normalize:
        for name in ("eta", "eta_p"):
            if name in fields:
                finite = [getattr(r, name) for r in rows
                          if math.isfinite(getattr(r, name))]
                norm[name + "_norm"] = min(finite) if finite else None

    manifest = _manifest(args, seed=None)
    if args.format == "json":
        payload_rows = []
        for r in rows:
            d = {spec.variable: r.value}
            d.update({f: getattr(r, f) for f in fields})
            for col, ref in norm.items():
                v = getattr(r, col[:-5])
                d[col] = v / ref if ref and math.isfinite(v) else math.inf
            d["divergent"] = r.divergent
            payload_rows.append(d)
        text = _dump_json({"manifest": manifest, "variable": spec.variable,
                           "rows": payload_rows})
    else:
        header = [spec.variable] + fields + list(norm) + ["divergent"]
        table = []
        for r in rows:
            row = [r.value] + [getattr(r, f) for f in fields]
            for col, ref in norm.items():
                v = getattr(r, col[:-5])
                row.append(v / ref if ref and math.isfinite(v) else math.inf)
            row.append(r.divergent)
            table.append(row)
        text = _csv_text(header, table)
    _write_output(text, args, manifest)

    if args.plot:
        from .plotting import render_sweep_figure

        render_sweep_figure(rows, spec.variable, fields, _figure_path(args.out))


def _cmd_minimize(args: argparse.Namespace, doc: dict) -> None:
    if args.plot and not args.out:
        raise ConfigError("--plot", "requires --out to name the figure file")
    link, protocol, power = parse_link(doc), parse_protocol(doc), parse_power(doc)
    kw = minimize_spec_from_doc(doc)
    res = minimize_eta(kw["objective"], kw["variable"], kw["bracket"],
                       link, protocol, power, coarse_points=kw["coarse_points"],
                       couple_a_to_p=kw["couple_a_to_p"])

    manifest = _manifest(args, seed=None)
    result = {"objective": kw["objective"], "variable": kw["variable"],
              "argmin": res.argmin, "min_value": res.min_value,
              "bracket": list(res.bracket), "evaluations": res.evaluations}
    if args.format == "json":
        text = _dump_json({"manifest": manifest, "result": result})
    else:
        header = ("objective", "variable", "argmin", "min_value",
                  "bracket_lo", "bracket_hi", "evaluations")
        row = [kw["objective"], kw["variable"], res.argmin, res.min_value,
               res.bracket[0], res.bracket[1], res.evaluations]
        text = _csv_text(header, [row])
    _write_output(text, args, manifest)

    if args.plot:
        from .plotting import render_minimize_figure

        lo, hi = res.bracket
        xs = [lo + i * (hi - lo) / 256 for i in range(257)]
        ys = [getattr(evaluate_point(kw["variable"], x, link, protocol, power,
                                     kw["couple_a_to_p"]), kw["objective"])
              for x in xs]
        render_minimize_figure(xs, ys, res.argmin, res.min_value,
                               kw["objective"], kw["variable"],
                               _figure_path(args.out))


# ----------------------------------------------------------------------
# serialization plumbing

def _manifest(args: argparse.Namespace, seed: int | None) -> dict:
    return {
        "command": args.command,
        "config_path": args.config,
        "output_path": args.out,
        "seed": seed,
        "format": args.format,
        "tool_version": __version__,
    }


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "divergent"
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def _dump_json(payload: dict) -> str:
    return json.dumps(_json_safe(payload), indent=2, sort_keys=True,
                      allow_nan=False) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else "divergent"
    return str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _figure_path(out_path: str) -> str:
    root, _ = os.path.splitext(out_path)
    return root + ".png"


def _write_output(text: str, args: argparse.Namespace, manifest: dict) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        sidecar = dict(manifest)
        sidecar["timestamp"] = datetime.now(timezone.utc).isoformat()
        with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(text)


def _print_error(exc: Exception, code: int) -> None:
    payload = {"error": {
        "type": type(exc).__name__,
        "message": str(exc),
        "field": getattr(exc, "field", None),
        "exit_code": code,
    }}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    entry()
