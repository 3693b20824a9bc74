"""
Command-line entry point.

Subcommands: lower, optimize, verify, metrics, speedups, irb-sim, bench,
model, pipeline. Every subcommand accepts --seed, --tol and --format.

Exit status: 0 success, 1 semantic failure (non-equivalence, failed check),
2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .circuit import Circuit, CircuitError, Gate, Kind, format_angle, parse_circuit
from .decomp import SwapStrategy, lower_circuit, lower_swap
from .device import DeviceError, circuit_metrics, load_device, speedup_table
from .noise import NoiseError, load_noise
from .passes import PassError, ledger, optimize_pipeline
from .unitary import CNOT, NOTC, SWAP, circuit_unitary, dump_matrix_csv, equal_up_to_global_phase, load_matrix_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# Expected single-SWAP coefficients per stage: (t1q layers, CR layers, external, internal)
EXPECTED_STAGES = {
    "standard": (5, 3, 990.0, 540.0),
    "orientation": (4, 3, 900.0, 540.0),
    "cross_gate_cancellation": (3, 3, 720.0, 540.0),
    "commute_through_cr": (3, 3, 450.0, 540.0),
    "polarity_switch": (2, 3, 270.0, 540.0),
    "x90_form": (2, 3, 270.0, 540.0),
}


class UsageError(Exception):
    pass


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write_text(path, text: str) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _circuit(path) -> Circuit:
    return parse_circuit(_read_text(path))


def _device(path):
    if not Path(path).exists():
        raise UsageError(f"cannot read {path}: no such file")
    return load_device(path)


def _emit(args, rows: list[dict], text: str | None = None, extra: dict | None = None) -> None:
    if args.format == "json":
        print(json.dumps({"seed": args.seed, "rows": rows, **(extra or {})}, indent=2, sort_keys=True))
    elif args.format == "csv":
        from .report import rows_to_csv

        sys.stdout.write(rows_to_csv(rows))
    else:
        print(text if text is not None else "\n".join(json.dumps(r, sort_keys=True) for r in rows))


def _report(args, kind: str, rows: list[dict], config: dict, extra: dict | None = None) -> None:
    if not getattr(args, "out", None):
        return
    from .report import Report, ReportError, emit_report

    out = Path(args.out)
    try:
        paths = emit_report(Report(kind, rows, config, args.seed, extra or {}), out.parent, out.stem)
    except ReportError as exc:
        raise UsageError(str(exc)) from None
    print(f"wrote {', '.join(str(p) for p in paths)}", file=sys.stderr)


# ---------------------------------------------------------------------------


def cmd_lower(args) -> int:
    dev = _device(args.device)
    strategy = SwapStrategy.parse(args.strategy)
    if args.input:
        native = lower_circuit(_circuit(args.input), dev, strategy)
    elif args.edge:
        a, b = _int_list(args.edge)
        native = lower_swap(a, b, strategy, dev)
    else:
        raise UsageError("lower needs --in or --edge")
    text = native.to_text()
    if args.output:
        _write_text(args.output, text)
    if args.format == "text":
        sys.stdout.write(text)
    else:
        _emit(args, [{"circuit": text, "gates": len(native), **circuit_metrics(native, dev).to_dict()}])
    return EXIT_OK


def cmd_optimize(args) -> int:
    c = _circuit(args.input)
    dev = _device(args.device)
    out, reports = optimize_pipeline(c, dev, args.tol)
    rows = [r.to_dict() for r in reports]
    if args.report:
        _write_text(args.report, json.dumps({"seed": args.seed, "passes": rows, "circuit": out.to_text()},
                                            indent=2, sort_keys=True) + "\n")
    if args.output:
        _write_text(args.output, out.to_text())
    if args.format == "text":
        sys.stdout.write(out.to_text())
    else:
        _emit(args, rows, extra={"circuit": out.to_text()})
    return EXIT_OK if all(r.verified for r in reports) else EXIT_FAIL


_TARGETS = {"cnot": CNOT, "notc": NOTC, "swap": SWAP}


def _active_wires(c: Circuit) -> Circuit:
    """Relabel the wires c touches to 0..k-1 (ascending); idle wires act as identity."""
    used = sorted({w for g in c.gates for w in g.wires})
    index = {w: i for i, w in enumerate(used)}
    return Circuit(len(used), tuple(Gate(g.kind, tuple(index[w] for w in g.wires), g.angle, g.polarity)
                                    for g in c.gates))


def cmd_verify(args) -> int:
    c = _circuit(args.input)
    if args.target.lower() in _TARGETS and c.n_wires > 2:
        # device-wide lowered files: compare on the touched wires only
        c = _active_wires(c)
    u = circuit_unitary(c)
    if args.dump:
        _write_text(args.dump, dump_matrix_csv(u))
    if args.target.lower() in _TARGETS:
        target = _TARGETS[args.target.lower()]
    else:
        try:
            target = load_matrix_csv(_read_text(args.target))
        except ValueError as exc:
            raise UsageError(f"{args.target}: {exc}") from None
    if target.shape != u.shape:
        print(f"dimension mismatch: circuit is {u.shape[0]}x{u.shape[0]}, target is {target.shape[0]}x{target.shape[0]}")
        return EXIT_FAIL
    eq = equal_up_to_global_phase(target, u, args.tol)
    row = {"equivalent": eq.equal, "phase_rad": eq.phase, "deficit": eq.deficit, "tol": args.tol}
    text = (f"{'EQUIVALENT' if eq.equal else 'NOT EQUIVALENT'} up to global phase\n"
            f"phase {eq.phase:.12g} rad\ndeficit {eq.deficit:.3e} (tol {args.tol:g})")
    _emit(args, [row], text)
    return EXIT_OK if eq.equal else EXIT_FAIL


def cmd_metrics(args) -> int:
    c = _circuit(args.input)
    dev = _device(args.device)
    m = circuit_metrics(c, dev)
    text = (f"depth {m.depth_str}\nduration {m.duration_dt} dt = {m.duration_ns:.2f} ns\n"
            f"active rotation {m.rotation_str}")
    _emit(args, [m.to_dict()], text)
    return EXIT_OK


def cmd_speedups(args) -> int:
    dev = _device(args.device)
    rows, mean = speedup_table(dev)
    if not rows:
        raise UsageError(f"{dev.name} has no edges")
    if args.csv:
        from .report import rows_to_csv

        _write_text(args.csv, rows_to_csv(rows))
    lines = [f"{r['control']}->{r['target']}  t1q={r['t1q_dt']}  tCR={r['tcr_dt']}  "
             f"orientation {r['orientation_speedup']:.4f}  optimized {r['optimized_speedup']:.4f}" for r in rows]
    lines.append(f"mean optimized speedup {mean:.4f}")
    _emit(args, rows, "\n".join(lines), {"mean_optimized_speedup": mean})
    _report(args, "speedups", rows, {"device": dev.name}, {"mean_optimized_speedup": mean})
    return EXIT_OK


def _edge(dev, spec):
    if spec is None:
        if not dev.edges:
            raise UsageError(f"{dev.name} has no edges")
        return dev.edges[-1]
    e = dev.edge(*spec)
    if e is None:
        raise UsageError(f"qubits {spec[0]} and {spec[1]} are not connected on {dev.name}")
    return e


def cmd_irb(args) -> int:
    from .noise import average_gate_error
    from .rb import IRBConfig, run_irb_experiment

    dev = _device(args.device)
    noise = load_noise(args.noise, args.seed)
    e = _edge(dev, args.edge)
    pair = dev.subdevice([e.control, e.target])
    cfg = IRBConfig(tuple(args.lengths), args.k, args.seed)
    arms = {"standard": SwapStrategy.SLOW_ORIENTATION, "optimized": SwapStrategy.OPTIMIZED_X90}
    chosen = list(arms) if args.swap == "both" else [args.swap]
    results, rows = {}, []
    for name in chosen:
        swap = lower_swap(0, 1, arms[name], pair)
        res = run_irb_experiment(swap, pair, noise, cfg)
        direct = average_gate_error(swap, SWAP, noise, pair)
        results[name] = res.to_dict()
        rows.append({"control": e.control, "target": e.target, "swap": name, "gate_error": res.gate_error,
                     "sigma": res.gate_error_sigma, "direct_error": direct,
                     "alpha_rb": res.alpha_rb.alpha, "alpha_int": res.alpha_int.alpha})
    extra = {"irb": results}
    if len(rows) == 2:
        std, opt = rows
        red = std["gate_error"] / opt["gate_error"] if opt["gate_error"] > 0 else float("nan")
        extra["pair"] = {"control": e.control, "target": e.target, "error_std": std["gate_error"],
                         "error_opt": opt["gate_error"], "reduction": red,
                         "sigma": red * float(np.hypot(std["sigma"] / std["gate_error"], opt["sigma"] / opt["gate_error"]))
                         if opt["gate_error"] > 0 and std["gate_error"] > 0 else float("nan")}
    lines = [f"{r['swap']:9s} IRB error {r['gate_error']:.5f} +- {r['sigma']:.5f}  (direct {r['direct_error']:.5f})"
             for r in rows]
    if "pair" in extra:
        lines.append(f"reduction factor {extra['pair']['reduction']:.4f}")
    _emit(args, rows, "\n".join(lines), extra)
    config = {"device": dev.name, "edge": [e.control, e.target], "noise": noise.to_dict(),
              "lengths": list(cfg.lengths), "k_per_length": cfg.k_per_length}
    _report(args, "irb", rows, config, extra)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def cmd_bench(args) -> int:
    from .bench import Benchmark, BenchmarkName, run_benchmark

    dev = _device(args.device)
    noise = load_noise(args.noise, args.seed)
    name = BenchmarkName.parse(args.name)
    strategies = [SwapStrategy.parse(s) for s in args.strategies.split(",")]
    placement = _int_list(args.placement) if args.placement else None
    rows = []
    for n in _int_list(args.n):
        for s in strategies:
            rows.append(run_benchmark(Benchmark(name, n), dev, noise, s, placement).to_dict())
    lines = [f"{r['name']} n={r['n']} {r['strategy']:14s} success {r['success']:.5f}  swaps {r['swaps_total']}  "
             f"{r['duration_ns']:.1f} ns" for r in rows]
    _emit(args, rows, "\n".join(lines))
    _report(args, "bench", rows, {"device": dev.name, "noise": noise.to_dict(), "name": name.value,
                                  "strategies": [s.value for s in strategies]})
    return EXIT_OK


def cmd_model(args) -> int:
    from .bench import ImprovementParams, improvement_model

    try:
        p = ImprovementParams(args.error_opt, args.error_std, args.k, args.dt_us, args.t1_us, args.t2_us, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    f = improvement_model(p)
    _emit(args, [{**p.__dict__, "improvement": f}], f"{f:.6g}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    dev = _device(args.device)
    if not dev.edges:
        raise UsageError(f"{dev.name} has no edges: nothing to optimize")
    rows, ok = [], True
    for e in dev.edges:
        c = Circuit(2, (Gate(Kind.SWAP, (0, 1)),))
        sub = dev.subdevice([e.control, e.target])
        for r in ledger(c, sub, args.tol):
            want = EXPECTED_STAGES[r["stage"]]
            got = (r["depth_t1q"], r["depth_tcr"], r["external_rotation_deg"], r["internal_rotation_deg"])
            match = got == want and r["verified"]
            ok &= match
            rows.append({"control": e.control, "target": e.target, **r, "stage_match": match})
    lines = []
    for r in rows:
        lines.append(f"{r['control']}->{r['target']}  {r['stage']:24s} {r['depth']:10s} {r['duration_dt']:5d} dt "
                     f"{r['duration_ns']:7.1f} ns  {format_angle(r['external_rotation_deg'])} + "
                     f"{format_angle(r['internal_rotation_deg'])}  verified={r['verified']}")
    _emit(args, rows, "\n".join(lines))
    _report(args, "ledger", rows, {"device": dev.name})
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = argparse.ArgumentParser(prog="nativeswap", description="Native-gate SWAP lowering and analysis.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lower", parents=[common], help="lower a circuit to the native gateset")
    s.add_argument("--in", dest="input", help="circuit file to lower")
    s.add_argument("--edge", help="lower a single SWAP on this edge instead, e.g. 5,6")
    s.add_argument("--device", required=True)
    s.add_argument("--strategy", default="fast", help="SWAP strategy (slow, fast, cgpc, commuted, optimized, x90)")
    s.add_argument("--out", dest="output")
    s.set_defaults(func=cmd_lower)

    s = sub.add_parser("optimize", parents=[common], help="run the verified optimization pipeline")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--device", required=True)
    s.add_argument("--report")
    s.add_argument("--out", dest="output")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("verify", parents=[common], help="check equivalence up to global phase")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--target", required=True, help="cnot, notc, swap or a matrix CSV file")
    s.add_argument("--dump", help="write the circuit unitary as CSV")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("metrics", parents=[common], help="depth, duration and active rotation")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--device", required=True)
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("speedups", parents=[common], help="per-edge analytic speedups")
    s.add_argument("--device", required=True)
    s.add_argument("--csv")
    s.add_argument("--out", help="report JSON path; CSV and figures are written beside it")
    s.set_defaults(func=cmd_speedups)

    s = sub.add_parser("irb-sim", parents=[common], help="simulated interleaved RB of the SWAP lowerings")
    s.add_argument("--device", required=True)
    s.add_argument("--noise", required=True)
    s.add_argument("--swap", choices=("standard", "optimized", "both"), default="both")
    s.add_argument("--edge", type=int, nargs=2, metavar=("A", "B"))
    s.add_argument("--lengths", type=_int_list, default=[1, 2, 3, 5, 8, 12, 17, 23, 30])
    s.add_argument("--k", type=int, default=12, help="sequences per length")
    s.add_argument("--out")
    s.set_defaults(func=cmd_irb)

    s = sub.add_parser("bench", parents=[common], help="application benchmark success probabilities")
    s.add_argument("--name", required=True, help="long-swap or bv")
    s.add_argument("--n", required=True, help="qubit counts, e.g. 4 or 2-6 or 2,4")
    s.add_argument("--device", required=True)
    s.add_argument("--noise", required=True)
    s.add_argument("--strategies", default="slow,optimized")
    s.add_argument("--placement", help="logical wire -> device qubit, comma separated")
    s.add_argument("--out")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("model", parents=[common], help="improvement factor of the Optimized SWAP")
    s.add_argument("--error-opt", type=float, required=True)
    s.add_argument("--error-std", type=float, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--dt-us", type=float, required=True)
    s.add_argument("--t1-us", type=float, required=True)
    s.add_argument("--t2-us", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_model)

    s = sub.add_parser("pipeline", parents=[common], help="per-edge stage ledger of the SWAP optimizations")
    s.add_argument("--device", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, CircuitError, DeviceError, NoiseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PassError, RuntimeError) as exc:  # failed pass check, routing or fit
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
