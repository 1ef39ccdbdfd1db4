"""Command line interface.

Subcommands:

* ``analyze``      WAV in, coefficient dump (npz with magnitude/phase) out
* ``reconstruct``  WAV or magnitude dump in, phase-reconstructed WAV out
* ``evaluate``     config JSON in, report.json + timings.json + artifacts out
* ``compare``      one signal/bank: iterative-baseline trace CSV vs heap integration

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .baseline import fgla
from .core import RealSignal
from .errors import (ConfigurationError, DegenerateInputError,
                     FrameConditioningError, ParameterError)
from .experiment import (BANK_PRESETS, bank_spec_from_preset, run_experiment,
                         write_csv, write_report_files)
from .filterbank import analyze, build_filterbank, redundancy
from .heapint import reconstruct
from .metrics import spectral_difference
from .scales import FilterBankSpec, FrequencyScale
from .signals import SIGNAL_KINDS, SignalKind, gen_signal
from .wavio import read_wav, write_wav

USAGE_ERROR, DATA_ERROR, NUMERICAL_ERROR = 1, 2, 3

_SCALE_ALIASES = {"logq": "log10q"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _add_bank_args(p):
    p.add_argument("--fb-preset", choices=sorted(BANK_PRESETS),
                   help="builtin bank preset (overrides the scale arguments)")
    p.add_argument("--fb-scale", default="erb",
                   choices=["erb", "logq", "log10q", "sqrt4", "quart", "linear"])
    p.add_argument("--bins", type=float, default=1.0, help="filters per scale unit")
    p.add_argument("--bw", type=float, default=2.0, help="bandwidth in scale units")
    p.add_argument("--fmin", type=float, default=0.0)
    p.add_argument("--fmax", type=float, default=None, help="default: Nyquist")
    p.add_argument("--decimation", type=int, default=8)


def _bank_for(args, sample_rate, length):
    if args.fb_preset:
        spec = bank_spec_from_preset(args.fb_preset, sample_rate)
    else:
        fmax = args.fmax if args.fmax is not None else sample_rate / 2
        kind = _SCALE_ALIASES.get(args.fb_scale, args.fb_scale)
        spec = FilterBankSpec(FrequencyScale(kind), args.bins, args.bw,
                              args.fmin, fmax, args.decimation, sample_rate)
    a = spec.decimation
    return build_filterbank(spec, ((length + a - 1) // a) * a)


def build_parser():
    parser = _Parser(prog="fbpghi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="dump filter bank coefficients of a WAV file")
    p.add_argument("input", help="input WAV file")
    p.add_argument("output", help="output .npz dump")
    _add_bank_args(p)

    p = sub.add_parser("reconstruct", help="phase-reconstruct a WAV file or magnitude dump")
    p.add_argument("input", help="input WAV file or .npz magnitude dump")
    p.add_argument("output", help="output WAV file")
    _add_bank_args(p)
    p.add_argument("--method", choices=["fbpghi", "fgla"], default="fbpghi")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=30)
    p.add_argument("--alpha", type=float, default=0.99)

    p = sub.add_parser("evaluate", help="run the experiment described by a config JSON")
    p.add_argument("config", help="config JSON file")
    p.add_argument("--output-dir", default=None, help="overrides output_dir in the config")

    p = sub.add_parser("compare", help="iterative-baseline convergence trace vs heap integration")
    p.add_argument("signal", choices=[k for k in SIGNAL_KINDS if k != "wav"])
    p.add_argument("output", help="output CSV")
    _add_bank_args(p)
    p.add_argument("--duration", type=float, default=1.0)
    p.add_argument("--sample-rate", type=float, default=44100.0)
    p.add_argument("--iterations", type=int, default=30)
    p.add_argument("--alpha", type=float, default=0.99)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_analyze(args):
    signal = read_wav(args.input)
    fb = _bank_for(args, signal.sample_rate, len(signal))
    grid = analyze(fb, signal.padded_to_multiple(fb.a))
    np.savez(
        args.output,
        magnitude=np.abs(grid),
        phase=np.angle(grid),
        centers=fb.centers,
        gammas=fb.gammas,
        decimation=fb.a,
        sample_rate=signal.sample_rate,
        original_length=len(signal),
    )
    print(f"wrote {args.output}: {grid.shape[0]} frames x {grid.shape[1]} channels, "
          f"redundancy {redundancy(fb):.2f}")
    return 0


def _cmd_reconstruct(args):
    if args.input.endswith(".npz"):
        with np.load(args.input) as dump:
            m = dump["magnitude"]
            sample_rate = float(dump["sample_rate"])
            length = int(dump["original_length"])
        fb = _bank_for(args, sample_rate, length)
        if m.shape != (fb.N, fb.K):
            raise ParameterError(
                f"dump shape {m.shape} does not match the bank ({fb.N}, {fb.K}); "
                "use the same bank arguments as for analyze")
    else:
        signal = read_wav(args.input)
        sample_rate = signal.sample_rate
        length = len(signal)
        fb = _bank_for(args, sample_rate, length)
        m = np.abs(analyze(fb, signal.padded_to_multiple(fb.a)))
    if args.method == "fbpghi":
        restored = reconstruct(m, fb, tol=args.tol, seed=args.seed)
    else:
        restored, _ = fgla(m, fb, args.iterations, alpha=args.alpha, seed=args.seed)
    write_wav(args.output, RealSignal(restored.samples[:length], sample_rate))
    print(f"wrote {args.output} ({args.method}, {fb.K} channels, a={fb.a})")
    return 0


def _cmd_evaluate(args):
    try:
        config = json.loads(Path(args.config).read_text())
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid config JSON: {exc}") from exc
    if args.output_dir is not None:
        config["output_dir"] = args.output_dir
    report = run_experiment(config)
    if not config.get("output_dir"):
        sys.stdout.write(report.to_json())
    else:
        print(f"wrote report to {config['output_dir']}")
    failures = [c for c in report.cells if c.status != "ok"]
    for cell in failures:
        print(f"cell {cell.signal}/{cell.filterbank}/{cell.method} failed: {cell.error}",
              file=sys.stderr)
    return 0


def _cmd_compare(args):
    kind = SignalKind(kind=args.signal, duration=args.duration,
                      sample_rate=args.sample_rate, seed=args.seed)
    signal = gen_signal(kind)
    fb = _bank_for(args, signal.sample_rate, len(signal))
    padded = signal.padded_to_multiple(fb.a)
    grid = analyze(fb, padded)
    m = np.abs(grid)
    restored = reconstruct(m, fb, tol=args.tol, seed=args.seed)
    heap_db = spectral_difference(grid, analyze(fb, restored))
    _, trace = fgla(m, fb, args.iterations, alpha=args.alpha, seed=args.seed)
    write_csv(args.output, ["iteration", "fgla_e_spec_db", "fbpghi_e_spec_db"],
              [(i, v, heap_db) for i, v in enumerate(trace.e_spec_db)])
    print(f"wrote {args.output}; fbpghi reaches {heap_db:.2f} dB, "
          f"fgla after {args.iterations} iterations {trace.e_spec_db[-1]:.2f} dB")
    return 0


_COMMANDS = {
    "analyze": _cmd_analyze,
    "reconstruct": _cmd_reconstruct,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FrameConditioningError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except (ParameterError, ConfigurationError, DegenerateInputError,
            FileNotFoundError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
