"""Experiment runner: batch phase reconstruction with metrics and reports.

A JSON config names signals, filter banks and reconstruction methods; every
combination is evaluated (analyze, strip phase, reconstruct, re-analyze,
spectral difference). Results are serialized deterministically: report.json
never contains wall-clock times (those go to timings.json) so identical
configs and seeds give byte-identical reports.
"""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baseline import fgla
from .core import RealSignal
from .errors import ConfigurationError, ParameterError
from .filterbank import FilterBank, analyze, build_filterbank, redundancy
from .heapint import reconstruct
from .metrics import phase_difference_map, spectral_difference
from .scales import FilterBankSpec, FrequencyScale
from .signals import SignalKind, gen_signal

# Builtin bank presets: ERB banks over the full band, a constant-Q bank from
# 30 Hz, and two power-law-scale banks, each with its decimation factor.
BANK_PRESETS = {
    "fb1": dict(scale="erb", bins=1, bw=2.0, fmin=0.0, fmax=22050.0, decimation=8),
    "fb2": dict(scale="erb", bins=4, bw=0.5, fmin=0.0, fmax=22050.0, decimation=36),
    "fb3": dict(scale="log10q", bins=4, bw=0.5, fmin=30.0, fmax=22050.0, decimation=20),
    "fb4": dict(scale="sqrt4", bins=4, bw=0.5, fmin=0.0, fmax=22050.0, decimation=73),
    "fb5": dict(scale="quart", bins=4, bw=0.5, fmin=0.0, fmax=22050.0, decimation=33),
}

_CONFIG_KEYS = {"signals", "filterbanks", "methods", "seeds", "output_dir", "artifacts"}
_SIGNAL_KEYS = {"kind", "duration", "sample_rate", "seed", "path", "name"}
_BANK_KEYS = {"preset", "name", "scale", "bins", "bw", "fmin", "fmax", "decimation"}
_METHOD_KEYS = {"name", "tol", "seed", "iterations", "alpha"}
_SEED_KEYS = {"signal", "method"}


def bank_spec_from_preset(name, sample_rate=44100.0) -> FilterBankSpec:
    """FilterBankSpec for one of the builtin presets fb1..fb5."""
    if name not in BANK_PRESETS:
        raise ConfigurationError(f"unknown filter bank preset {name!r}")
    p = BANK_PRESETS[name]
    return FilterBankSpec(
        scale=FrequencyScale(p["scale"]),
        bins=p["bins"],
        bw=p["bw"],
        fmin=p["fmin"],
        fmax=p["fmax"],
        decimation=p["decimation"],
        sample_rate=sample_rate,
    )


def _reject_unknown(d, allowed, where):
    unknown = set(d) - allowed
    if unknown:
        raise ConfigurationError(f"unknown keys in {where}: {sorted(unknown)}")


def parse_config(config: dict):
    """Validate a config dict; unknown keys are rejected at every level."""
    if not isinstance(config, dict):
        raise ConfigurationError("config must be a JSON object")
    _reject_unknown(config, _CONFIG_KEYS, "config")
    seeds = config.get("seeds", {})
    _reject_unknown(seeds, _SEED_KEYS, "seeds")
    signal_seed = int(seeds.get("signal", 0))
    method_seed = int(seeds.get("method", 0))

    signals = []
    for i, entry in enumerate(config.get("signals", [])):
        _reject_unknown(entry, _SIGNAL_KEYS, f"signals[{i}]")
        kind = SignalKind(
            kind=entry["kind"],
            duration=float(entry.get("duration", 1.0)),
            sample_rate=float(entry.get("sample_rate", 44100.0)),
            seed=int(entry.get("seed", signal_seed)),
            path=entry.get("path"),
        )
        signals.append((entry.get("name", entry["kind"]), kind))

    banks = []
    for i, entry in enumerate(config.get("filterbanks", [])):
        _reject_unknown(entry, _BANK_KEYS, f"filterbanks[{i}]")
        if "preset" in entry:
            banks.append((entry.get("name", entry["preset"]), entry["preset"], None))
        else:
            required = {"scale", "bins", "bw", "fmin", "fmax", "decimation"}
            missing = required - set(entry)
            if missing:
                raise ConfigurationError(f"filterbanks[{i}] missing keys: {sorted(missing)}")
            params = {k: entry[k] for k in required}
            banks.append((entry.get("name", f"bank{i}"), None, params))

    methods = []
    for i, entry in enumerate(config.get("methods", [{"name": "fbpghi"}])):
        _reject_unknown(entry, _METHOD_KEYS, f"methods[{i}]")
        name = entry.get("name")
        if name not in ("fbpghi", "fgla"):
            raise ConfigurationError(f"methods[{i}]: unknown method {name!r}")
        methods.append(dict(entry, seed=int(entry.get("seed", method_seed))))

    return signals, banks, methods, config.get("output_dir"), bool(config.get("artifacts", False))


def _build_bank(bank_entry, sample_rate, L):
    _, preset, params = bank_entry
    if preset is not None:
        spec = bank_spec_from_preset(preset, sample_rate)
    else:
        spec = FilterBankSpec(
            scale=FrequencyScale(params["scale"]),
            bins=float(params["bins"]),
            bw=float(params["bw"]),
            fmin=float(params["fmin"]),
            fmax=float(params["fmax"]),
            decimation=int(params["decimation"]),
            sample_rate=sample_rate,
        )
    a = spec.decimation
    return build_filterbank(spec, ((L + a - 1) // a) * a)


@dataclass
class EvalCell:
    signal: str
    filterbank: str
    method: str
    status: str = "ok"
    error: str | None = None
    e_spec_db: float | None = None
    redundancy: float | None = None
    channels: int | None = None
    decimation: int | None = None
    seed: int | None = None
    trace_db: list | None = None
    runtime_ms: float | None = None


@dataclass
class EvalReport:
    """All cells of one experiment, exactly one per configured combination."""

    cells: list
    config: dict

    def to_json(self) -> str:
        # echo only the scientific part of the config; output_dir and the
        # artifacts switch must not affect report bytes
        echoed = {k: v for k, v in self.config.items()
                  if k not in ("output_dir", "artifacts")}
        payload = {
            "cells": [
                {
                    "signal": c.signal,
                    "filterbank": c.filterbank,
                    "method": c.method,
                    "status": c.status,
                    "error": c.error,
                    "e_spec_db": c.e_spec_db,
                    "redundancy": c.redundancy,
                    "channels": c.channels,
                    "decimation": c.decimation,
                    "seed": c.seed,
                    "trace_db": c.trace_db,
                }
                for c in self.cells
            ],
            "config": echoed,
            "version": 1,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def timings_json(self) -> str:
        payload = {
            f"{c.signal}/{c.filterbank}/{c.method}": c.runtime_ms for c in self.cells
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _run_cell(signal: RealSignal, fb: FilterBank, method: dict, artifacts=None):
    c_ref = analyze(fb, signal)
    m = np.abs(c_ref)
    if method["name"] == "fbpghi":
        tol = float(method.get("tol", 1e-7))
        restored = reconstruct(m, fb, tol=tol, seed=method["seed"])
        trace = None
    else:
        iterations = int(method.get("iterations", 30))
        alpha = float(method.get("alpha", 0.99))
        restored, fg_trace = fgla(m, fb, iterations, alpha=alpha, seed=method["seed"])
        trace = [round(v, 6) for v in fg_trace.e_spec_db]
    c_est = analyze(fb, restored)
    e_spec = spectral_difference(c_ref, c_est)
    if artifacts is not None:
        artifacts["phase_map"] = phase_difference_map(np.angle(c_ref), np.angle(c_est))
    return round(e_spec, 6), trace


def run_experiment(config: dict) -> EvalReport:
    """Evaluate every signal x filter bank x method combination in the config.

    Per-cell errors are recorded and the run continues. Deterministic for
    fixed config and seeds.
    """
    signals, banks, methods, output_dir, want_artifacts = parse_config(config)
    cells = []
    artifact_grids = {}
    for sig_name, kind in signals:
        try:
            signal = gen_signal(kind)
        except Exception as exc:
            for bank_entry in banks:
                for method in methods:
                    cells.append(EvalCell(sig_name, bank_entry[0], _method_label(method),
                                          status="error", error=str(exc)))
            continue
        for bank_entry in banks:
            bank_name = bank_entry[0]
            try:
                fb = _build_bank(bank_entry, signal.sample_rate, len(signal))
                padded = signal.padded_to_multiple(fb.a)
            except Exception as exc:
                for method in methods:
                    cells.append(EvalCell(sig_name, bank_name, _method_label(method),
                                          status="error", error=str(exc)))
                continue
            for method in methods:
                label = _method_label(method)
                cell = EvalCell(sig_name, bank_name, label,
                                redundancy=round(redundancy(fb), 6),
                                channels=fb.K, decimation=fb.a, seed=method["seed"])
                sink = {} if want_artifacts and method["name"] == "fbpghi" else None
                start = time.perf_counter()
                try:
                    cell.e_spec_db, cell.trace_db = _run_cell(padded, fb, method, sink)
                except Exception as exc:
                    cell.status = "error"
                    cell.error = str(exc)
                cell.runtime_ms = (time.perf_counter() - start) * 1e3
                if sink:
                    artifact_grids[f"{sig_name}_{bank_name}"] = sink.get("phase_map")
                cells.append(cell)
    report = EvalReport(cells=cells, config=config)
    if output_dir:
        write_report_files(report, output_dir, artifact_grids)
    return report


def _method_label(method: dict) -> str:
    if method["name"] == "fgla":
        return f"fgla@{int(method.get('iterations', 30))}"
    return "fbpghi"


def write_report_files(report: EvalReport, output_dir, artifact_grids=None):
    """Write report.json, timings.json and any artifact CSV/PGM files."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    (out / "timings.json").write_text(report.timings_json())
    for cell in report.cells:
        if cell.trace_db is not None:
            path = out / f"trace_{cell.signal}_{cell.filterbank}_{cell.method.replace('@', '_')}.csv"
            write_csv(path, ["iteration", "e_spec_db"],
                      [(i, v) for i, v in enumerate(cell.trace_db)])
    for name, grid in (artifact_grids or {}).items():
        if grid is None:
            continue
        write_csv_matrix(out / f"phase_diff_{name}.csv", grid)
        write_pgm(out / f"phase_diff_{name}.pgm", grid)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(repr(v) if isinstance(v, float) else str(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def write_csv_matrix(path, matrix):
    lines = [",".join(repr(float(v)) for v in row) for row in np.asarray(matrix)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_pgm(path, matrix):
    """8-bit grayscale PGM (P5) of a matrix scaled from its value range."""
    m = np.asarray(matrix, dtype=np.float64)
    lo, hi = float(m.min()), float(m.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    pixels = np.round((m - lo) * scale).astype(np.uint8)
    header = f"P5\n{m.shape[1]} {m.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + pixels.tobytes())
