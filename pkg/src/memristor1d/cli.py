"""Command-line front end.

    memristor1d simulate        one run of the configured waveform
    memristor1d c2c             contiguous cycles of one device
    memristor1d d2d             independent devices, one cycle each
    memristor1d amplitude-study sinusoidal drive at several amplitudes
    memristor1d analyze CSV...  metrics of previously written traces
    memristor1d defaults        print every config key with its default

Exit codes: 0 success, 2 config error, 3 solver failure, 4 I/O or input-data error.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import math
import sys
import time
import warnings
from pathlib import Path

from . import analysis, engine
from . import io as trace_io
from .errors import (AlignmentError, BracketingError, ConfigError, ConvergenceError,
                     DegenerateStateError, InsufficientDataError, SimmonsRangeWarning,
                     TraceIOError)
from .params import config_dict, defaults_table, dump_config, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

log = logging.getLogger("memristor1d")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="flat JSON config file")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override one config key (repeatable)")
    p.add_argument("--seed", type=int, help="PRNG seed (unsigned 64-bit)")
    p.add_argument("--delta", type=float, help="perturbation amplitude, e.g. 0.05")
    p.add_argument("--cycles", type=int, help="number of waveform periods")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--ion-trace", action="store_true", help="also write <stem>_ions.csv")
    p.add_argument("--grid-dump", action="store_true",
                   help="write the solved grid of every step to <stem>_grid.csv")
    p.add_argument("--json", action="store_true",
                   help="write traces as JSON documents instead of CSV")
    p.add_argument("--workers", type=int, default=1,
                   help="processes for multi-run commands (results do not depend on it)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="memristor1d",
                                     description="1D PIC simulation of a double-barrier "
                                                 "memristive device")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="one run of the configured waveform")
    sub.add_parser("c2c", parents=[common], help="cycle-to-cycle run of one device")
    p = sub.add_parser("d2d", parents=[common], help="device-to-device runs")
    p.add_argument("--devices", type=int, default=4)
    p = sub.add_parser("amplitude-study", parents=[common], help="sinusoid amplitude sweep")
    p.add_argument("--amplitudes", type=float, nargs="+", default=[2.0, 2.5, 3.0, 5.0])
    p = sub.add_parser("analyze", parents=[common], help="metrics of existing trace CSVs")
    p.add_argument("traces", type=Path, nargs="+")
    p.add_argument("--read-voltage", type=float, default=0.5)
    p.add_argument("--reset-voltage", type=float, default=-1.0)
    sub.add_parser("defaults", parents=[common], help="print config keys and defaults")
    return parser


def resolve_config(args):
    """Config file, then ``--set`` overrides, then the dedicated flags."""
    doc = {}
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise TraceIOError(f"cannot read {args.config}: {exc.strerror or exc}",
                               path=str(args.config)) from exc
        doc = config_dict(*load_config(text))
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        doc[key.strip()] = _parse_value(value.strip())
    for key in ("seed", "delta", "cycles"):
        value = getattr(args, key)
        if value is not None:
            doc[key] = value
    return load_config(doc)


def _stem_path(out: Path, stem: str, as_json: bool) -> Path:
    return out / (stem + (".json" if as_json else ".csv"))


def _write(trace, out: Path, stem: str, args) -> list[Path]:
    path = _stem_path(out, stem, args.json)
    if args.json:
        written = [trace_io.write_trace_json(trace, path)]
    else:
        written = trace_io.write_trace_csv(trace, path, ion_trace=args.ion_trace)
    written.append(trace_io.write_metadata(trace, path))
    return written


@contextlib.contextmanager
def _grid_dump(args, out: Path, stem: str):
    if not args.grid_dump:
        yield None
        return
    with trace_io.GridDumpWriter(out / f"{stem}_grid.csv") as writer:
        yield writer


def _fmt(x: float) -> str:
    return "nan" if not math.isfinite(x) else f"{x:.6g}"


def _metrics_line(label: str, m: analysis.RunMetrics) -> str:
    return (f"{label}: loop_area={_fmt(m.loop_area)} V*A  R_on={_fmt(m.R_on)} ohm  "
            f"R_off={_fmt(m.R_off)} ohm  on/off={_fmt(m.onoff_ratio)}"
            + ("  [degenerate]" if m.degenerate else ""))


def _try_metrics(trace, **kw):
    try:
        return analysis.compute_metrics(trace, **kw)
    except InsufficientDataError as exc:
        log.warning("no metrics: %s", exc)
        return None


def cmd_simulate(args, device, stochastic, sim) -> int:
    with _grid_dump(args, args.out, "trace") as dump:
        trace = engine.run(device, stochastic, sim, keep_ions=args.ion_trace, on_grid=dump)
    for path in _write(trace, args.out, "trace", args):
        print(f"wrote {path}")
    m = _try_metrics(trace)
    if m is not None:
        print(_metrics_line("run", m))
    return EXIT_OK


def _print_variability(cycles) -> None:
    try:
        rep = analysis.variability_report(cycles)
    except (InsufficientDataError, AlignmentError) as exc:
        log.warning("no variability report: %s", exc)
        return
    print(f"RSD set-branch current:   {_fmt(rep.rsd_set)}")
    print(f"RSD reset-branch current: {_fmt(rep.rsd_reset)}")
    print("cycle  R_on  R_off  on/off")
    for k, r_on, r_off, ratio in rep.onoff_table():
        print(f"{k}  {_fmt(r_on)}  {_fmt(r_off)}  {_fmt(ratio)}")


def cmd_c2c(args, device, stochastic, sim) -> int:
    cycles = args.cycles if args.cycles is not None else 4
    with _grid_dump(args, args.out, "c2c") as dump:
        trace = engine.run_c2c(device, stochastic, sim, cycles=cycles,
                               keep_ions=args.ion_trace, on_grid=dump)
    for path in _write(trace, args.out, "c2c", args):
        print(f"wrote {path}")
    _print_variability(analysis.split_cycles(trace))
    return EXIT_OK


def cmd_d2d(args, device, stochastic, sim) -> int:
    if args.grid_dump:
        log.warning("--grid-dump is ignored for d2d")
    traces = engine.run_d2d(device, stochastic, sim, n_devices=args.devices,
                            workers=args.workers, keep_ions=args.ion_trace)
    for k, trace in enumerate(traces):
        for path in _write(trace, args.out, f"d2d_device{k}", args):
            print(f"wrote {path}")
    _print_variability(traces)
    return EXIT_OK


def cmd_amplitude_study(args, device, stochastic, sim) -> int:
    if args.grid_dump:
        log.warning("--grid-dump is ignored for amplitude-study")
    traces = engine.run_amplitude_study(device, stochastic, sim, amplitudes=args.amplitudes,
                                        workers=args.workers, keep_ions=args.ion_trace)
    for amp, trace in zip(args.amplitudes, traces):
        for path in _write(trace, args.out, f"amplitude_{amp:g}V", args):
            print(f"wrote {path}")
        m = _try_metrics(trace)
        if m is not None:
            print(_metrics_line(f"{amp:g} V", m))
    return EXIT_OK


def cmd_analyze(args, device, stochastic, sim) -> int:
    cycles = []
    for path in args.traces:
        if path.suffix == ".json":
            trace = trace_io.read_trace_json(path)
        else:
            trace = trace_io.read_trace_csv(path, ions=False)
        parts = analysis.split_cycles(trace)
        if not parts:
            raise InsufficientDataError(f"{path} does not contain a full voltage cycle")
        for k, part in enumerate(parts):
            m = analysis.compute_metrics(part, args.read_voltage, args.reset_voltage)
            print(_metrics_line(f"{path.name}[{k}]", m))
        cycles.extend(parts)
    if len(cycles) > 1:
        rep = analysis.variability_report(cycles, args.read_voltage, args.reset_voltage)
        print(f"RSD set-branch current:   {_fmt(rep.rsd_set)}")
        print(f"RSD reset-branch current: {_fmt(rep.rsd_reset)}")
    return EXIT_OK


def cmd_defaults(args, device, stochastic, sim) -> int:
    if args.json:
        print(dump_config(device, stochastic, sim))
    else:
        sys.stdout.write(defaults_table())
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "c2c": cmd_c2c,
    "d2d": cmd_d2d,
    "amplitude-study": cmd_amplitude_study,
    "analyze": cmd_analyze,
    "defaults": cmd_defaults,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    warnings.simplefilter("once", SimmonsRangeWarning)
    try:
        device, stochastic, sim = resolve_config(args)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1", key="workers")
        if args.command not in ("analyze", "defaults"):
            args.out.mkdir(parents=True, exist_ok=True)
        t0 = time.perf_counter()
        code = COMMANDS[args.command](args, device, stochastic, sim)
        log.info("%s finished in %.2f s", args.command, time.perf_counter() - t0)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, BracketingError, DegenerateStateError) as exc:
        step = getattr(exc, "step", None)
        where = f" at step {step}" if step is not None else ""
        print(f"solver error{where}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (TraceIOError, OSError, InsufficientDataError, AlignmentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
