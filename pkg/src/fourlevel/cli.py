"""Command line front end: run one sweep, write CSV plus a JSON sidecar.

Each subcommand names the sweep kind; parameters come from either a
bundled preset or a JSON config file.  Data artifacts are CSV with a
mandatory header, comma separators, LF line endings and 17 significant
digits, so reruns of the same config are byte-identical regardless of
thread count.  The sidecar records the echoed config, the tool version,
grid metadata and the wall time (the one field that may differ between
reruns); when a run fails, the error is serialized into the sidecar and
the exit status is nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .cavity import bistability_thresholds, cavity_sweep, cooperation_to_mirror
from .config import KINDS, RunConfig, parse_config, preset, to_document
from .errors import ConfigError
from .experiments import probe_spectrum, sa_rsa_curve, switching_curve
from .propagation import CONTROL_SOURCES
from .pulse import pulse_transmission
from .steady import steady_state

__all__ = ["main", "run", "write_csv"]

_ARTIFACTS = {
    "spectrum": "spectrum.csv",
    "switch": "switch.csv",
    "cavity": "cavity.csv",
    "pulse": "pulse.csv",
    "sa-rsa": "sa_rsa.csv",
    "steady-state": "steady_state.json",
}


def _format(value: float) -> str:
    return format(float(value), ".17g")


def write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    """Write named columns with full double precision and LF endings."""
    rows = zip(*columns)
    lines = [",".join(header)]
    lines.extend(",".join(_format(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", newline="\n")


def _run_spectrum(config: RunConfig):
    result = probe_spectrum(
        config.system(), config.drives, config.medium, config.grid.values(),
        config.control_source, config.threads,
    )
    return ("delta2_over_gamma", "T2"), (result.axis, result.column("T2")), {}


def _run_switch(config: RunConfig):
    result = switching_curve(
        config.system(), config.drives, config.medium, config.grid.values(),
        config.control_source, config.threads,
    )
    return (
        ("control_intensity_over_gamma2", "T2"),
        (result.axis, result.column("T2")),
        {},
    )


def _run_cavity(config: RunConfig):
    system = config.system()
    mirror = cooperation_to_mirror(
        config.cavity.cooperation, config.medium, system.decays[(2, 3)],
        config.cavity.phase,
    )
    curve = cavity_sweep(
        system, config.drives, mirror, config.medium, config.grid.values(),
        config.control_source, config.threads,
    )
    extras = {
        "mirror": {
            "reflectance": mirror.reflectance,
            "transmittance": mirror.transmittance,
        },
        "thresholds": bistability_thresholds(curve),
    }
    return (
        ("x_over_gamma", "input_intensity", "output_intensity"),
        (curve.x, curve.input_intensity, curve.output_intensity),
        extras,
    )


def _run_pulse(config: RunConfig):
    result = pulse_transmission(
        config.pulse.to_spec(), config.system(), config.drives, config.medium,
        config.control_source, config.threads,
    )
    # tau is in 1/gamma; gamma = 2 pi gamma_mhz rad/us
    tau_us = result.tau / (2.0 * np.pi * config.gamma_mhz)
    peak = np.abs(result.input_trace).max()
    extras = {
        "peak_ratio": result.peak_ratio,
        "regime_warning": result.regime_warning,
        "transfer_center": {
            "re": result.transfer_center.real,
            "im": result.transfer_center.imag,
        },
    }
    return (
        ("tau_us", "input_norm", "output_norm"),
        (
            tau_us,
            np.abs(result.input_trace) ** 2 / peak**2,
            np.abs(result.output_trace) ** 2 / peak**2,
        ),
        extras,
    )


def _run_sa_rsa(config: RunConfig):
    system = config.system()
    grid = config.grid.values()
    curves = [
        sa_rsa_curve(
            system, config.drives, config.medium, grid, control_on,
            config.control_source, config.threads,
        )
        for control_on in (False, True)
    ]
    return (
        ("probe_intensity_over_gamma2", "T_off", "T_on"),
        (curves[0].axis, curves[0].column("T"), curves[1].column("T")),
        {},
    )


_RUNNERS = {
    "spectrum": _run_spectrum,
    "switch": _run_switch,
    "cavity": _run_cavity,
    "pulse": _run_pulse,
    "sa-rsa": _run_sa_rsa,
}


def _sidecar_path(out_dir: Path, artifact: str) -> Path:
    stem = artifact.rsplit(".", 1)[0]
    suffix = ".json" if artifact.endswith(".csv") else ".run.json"
    return out_dir / (stem + suffix)


def _write_json(path: Path, payload: Dict[str, Any]) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", newline="\n")


def run(config: RunConfig, out_dir: Optional[str] = None) -> Path:
    """Execute one sweep and write its artifact and sidecar files.

    Returns the artifact path.  On failure the sidecar still gets
    written, carrying the serialized error, and the exception is
    re-raised for the caller to turn into an exit status.
    """
    out = Path(out_dir) if out_dir is not None else Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    artifact = _ARTIFACTS[config.kind]
    sidecar: Dict[str, Any] = {
        "version": __version__,
        "artifact": artifact,
        "config": to_document(config),
    }
    started = time.perf_counter()
    try:
        if config.kind == "steady-state":
            rho = steady_state(config.system(), config.drives)
            payload = {"re": rho.real.tolist(), "im": rho.imag.tolist()}
            _write_json(out / artifact, payload)
            sidecar["grid"] = None
        else:
            header, columns, extras = _RUNNERS[config.kind](config)
            write_csv(out / artifact, header, columns)
            sidecar["columns"] = list(header)
            sidecar["grid"] = {
                "rows": int(len(columns[0])),
                "start": config.grid.start if config.grid else None,
                "stop": config.grid.stop if config.grid else None,
                "count": config.grid.count if config.grid else None,
                "spacing": config.grid.spacing if config.grid else None,
            }
            sidecar.update(extras)
    except Exception as err:
        sidecar["error"] = {"type": type(err).__name__, "message": str(err)}
        sidecar["wall_time_s"] = time.perf_counter() - started
        _write_json(_sidecar_path(out, artifact), sidecar)
        raise
    sidecar["wall_time_s"] = time.perf_counter() - started
    _write_json(_sidecar_path(out, artifact), sidecar)
    return out / artifact


def _load_config(args: argparse.Namespace) -> RunConfig:
    if (args.preset is None) == (args.config is None):
        raise ConfigError("pass exactly one of --preset or --config")
    if args.preset is not None:
        config = preset(args.preset)
    else:
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err}") from None
        config = parse_config(text)
    if config.kind != args.kind:
        if args.kind == "steady-state":
            # any sweep's parameter set defines a single steady state
            config = replace(config, kind="steady-state", grid=None,
                             cavity=None, pulse=None)
        else:
            raise ConfigError(
                f"config is a {config.kind!r} run; the {args.kind!r} "
                "subcommand cannot use it"
            )
    return config


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    drives = config.drives
    if args.g1 is not None:
        drives = replace(drives, coupling=args.g1)
    if args.g2 is not None:
        drives = replace(drives, probe=args.g2)
    if args.g is not None:
        drives = replace(drives, control=args.g)
    if drives is not config.drives:
        config = replace(config, drives=drives)
    if args.g2 is not None and config.pulse is not None:
        config = replace(config, pulse=replace(config.pulse, peak=args.g2))
    if args.steps is not None:
        config = replace(config, medium=replace(config.medium, steps=args.steps))
    if args.threads is not None:
        config = replace(config, threads=args.threads)
    if args.control_source is not None:
        config = replace(config, control_source=args.control_source)
    if args.out is not None:
        config = replace(config, out=args.out)
    return config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Steady-state sweeps of a four-level medium, written as CSV/JSON.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sub = subparsers.add_parser(kind, help=f"run a {kind} sweep")
        sub.add_argument("--preset", help="bundled scenario name, e.g. fig2a")
        sub.add_argument("--config", help="path to a JSON config file")
        sub.add_argument("--out", help="output directory (default: from config)")
        sub.add_argument("--threads", type=int, help="worker threads; 1 = sequential")
        sub.add_argument("--steps", type=int, help="override medium z steps")
        sub.add_argument("--g1", type=float, help="override coupling amplitude")
        sub.add_argument("--g2", type=float,
                         help="override probe amplitude (and pulse peak)")
        sub.add_argument("--g", type=float, help="override control amplitude")
        sub.add_argument("--control-source", choices=CONTROL_SOURCES,
                         dest="control_source",
                         help="coherence feeding the control field equation")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _apply_overrides(_load_config(args), args)
    except Exception as err:
        print(f"simulate: error: {err}", file=sys.stderr)
        if args.out is not None:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            _write_json(out / "error.json", {
                "version": __version__,
                "error": {"type": type(err).__name__, "message": str(err)},
            })
        return 1
    try:
        path = run(config, args.out)
    except Exception as err:
        print(f"simulate: error: {err}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
