"""Command-line front end.

Each subcommand resolves its parameters from built-in defaults, then an
optional ``--config`` file, then flags (highest priority), runs one sweep,
and writes CSV tables plus a ``<subcommand>_manifest.json`` into ``--out``.
Exit status is 0 on success, 2 for bad flags or parameters, 1 for errors
raised while computing.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import bloch_tls, coupled_modes, driven_mode, mist_sim, transmission_lines, transmon
from .config import ConfigError, load_config, parse_bool, parse_float_list
from .constants import TWO_PI
from .output import RunManifest, write_csv, write_manifest
from .sweep import WORKERS_ENV, default_workers

__all__ = ["main", "run", "SUBCOMMANDS"]

PROG = "balanced-coupling"
log = logging.getLogger(PROG)


class ParameterError(ValueError):
    """A parameter value failed validation; the message names the parameter."""


@dataclass(frozen=True)
class Param:
    name: str
    parse: Callable
    default: object
    help: str
    choices: Optional[tuple] = None

    @property
    def flag(self) -> str:
        return "--" + self.name


def _positive_int(text) -> int:
    v = int(text)
    if v < 1:
        raise ValueError(f"expected a positive integer, got {text!r}")
    return v


def _finite(text) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"expected a finite number, got {text!r}")
    return v


def _positive(text) -> float:
    v = _finite(text)
    if not v > 0:
        raise ValueError(f"expected a positive number, got {text!r}")
    return v


def _nonneg(text) -> float:
    v = _finite(text)
    if v < 0:
        raise ValueError(f"expected a non-negative number, got {text!r}")
    return v


def _optional_str(text):
    return None if text in (None, "", "none") else str(text)


def _optional(parse: Callable) -> Callable:
    def inner(text):
        return None if text in (None, "", "none") else parse(text)

    return inner


def _str_list(text) -> tuple:
    if isinstance(text, (tuple, list)):
        return tuple(text)
    items = tuple(s.strip() for s in str(text).split(",") if s.strip())
    if not items:
        raise ValueError(f"expected a comma-separated list, got {text!r}")
    return items


# Subcommand parameter tables ---------------------------------------------------------

DRIVE_PARAMS = (
    Param("omega0", _positive, 1.0, "mode frequency in cycles per unit time"),
    Param("g", _nonneg, 0.1, "drive strength in cycles per unit time (G for a cosine drive, G_d when balanced)"),
    Param("balanced", parse_bool, False, "drive with equal electric and magnetic parts in quadrature"),
    Param("omega_d", _optional(_positive), None, "drive frequency in cycles per unit time (default: omega0)"),
    Param("phi_d", _finite, 0.0, "drive phase (rad)"),
    Param("periods", _positive, 10.0, "duration in mode periods"),
    Param("samples_per_period", _positive_int, 200, "output samples per mode period"),
)

TLS_PARAMS = (
    Param("omega0", _positive, 1.0, "transition frequency in cycles per unit time"),
    Param("g", _nonneg, 0.1, "drive strength in cycles per unit time (G_x for unbalanced, G_d for balanced)"),
    Param("variant", str, "unbalanced", "drive variant", ("balanced", "unbalanced", "rwa")),
    Param("omega_d", _optional(_positive), None, "drive frequency in cycles per unit time (default: omega0)"),
    Param("phi_d", _finite, 0.0, "drive phase (rad)"),
    Param("periods", _positive, 20.0, "duration in transition periods"),
    Param("samples_per_period", _positive_int, 100, "output samples per transition period"),
)

EIGEN_PARAMS = (
    Param("sweep", str, "g", "swept quantity", ("g", "omega_b")),
    Param("omega", _positive, 10.0, "partial frequency omega_a (and omega_b when g is swept)"),
    Param("kinds", _str_list, ("capacitive", "inductive", "balanced", "antibalanced"), "coupling kinds, comma-separated"),
    Param("g", _nonneg, 0.2, "coupling strength when omega_b is swept"),
    Param("g_max", _positive, 2.0, "largest coupling when g is swept"),
    Param("omega_b_min", _positive, 8.0, "lowest omega_b when omega_b is swept"),
    Param("omega_b_max", _positive, 12.0, "highest omega_b when omega_b is swept"),
    Param("points", _positive_int, 201, "number of sweep points"),
)

FIG5_PARAMS = (
    Param("k", lambda s: int(s), 3, "transmon level k"),
    Param("n", lambda s: int(s), 20, "resonator photon number n"),
    Param("g_c_mhz", _positive, 180.0, "capacitive coupling g_c/2pi (MHz)"),
    Param("lam", _nonneg, 0.013, "anharmonicity parameter lambda"),
    Param("ratio_min", _finite, -3.0, "lowest g_l/g_c"),
    Param("ratio_max", _finite, 5.0, "highest g_l/g_c"),
    Param("points", _positive_int, 161, "number of ratio points"),
    Param("dim", _positive_int, 30, "oscillator basis dimension"),
)

COUPLER_PARAMS = (
    Param("z_a", _positive, 50.0, "line a impedance (ohm)"),
    Param("z_b", _positive, 50.0, "line b impedance (ohm)"),
    Param("v_a", _positive, 1.0e8, "line a phase velocity (m/s)"),
    Param("v_b", _positive, 1.0e8, "line b phase velocity (m/s)"),
    Param("l_g", _nonneg, 2.5e-7, "mutual inductance per length (H/m)"),
    Param("c_g", _nonneg, 1.0e-10, "mutual capacitance per length (F/m)"),
    Param("length", _nonneg, 0.01, "coupled length (m)"),
    Param("f_min", _positive, 1.0e9, "lowest frequency (Hz)"),
    Param("f_max", _positive, 10.0e9, "highest frequency (Hz)"),
    Param("points", _positive_int, 181, "number of frequency points"),
)

_PANELS = tuple(c.label for c in mist_sim.default_panels())

MIST_PARAMS = (
    Param("panels", _str_list, _PANELS, "series to run, comma-separated"),
    Param("omega_r_ghz", _positive, 6.0, "resonator frequency (GHz)"),
    Param("kappa", _positive, 1.0 / 15.0, "resonator energy decay rate (1/ns)"),
    Param("e_c_ghz", _positive, 0.2, "transmon charging energy E_C/h (GHz)"),
    Param("f_min_ghz", _positive, 4.0, "lowest qubit frequency (GHz)"),
    Param("f_max_ghz", _positive, 5.0, "highest qubit frequency (GHz)"),
    Param("n_freqs", _positive_int, 10, "number of qubit frequencies"),
    Param("n_g_points", _positive_int, 20, "gate charges, evenly spaced on [-0.5, 0]"),
    Param("photon_numbers", parse_float_list, (1.0, 5.0, 10.0, 20.0, 40.0, 80.0), "steady-state photon numbers"),
    Param("duration", _positive, 200.0, "pulse length (ns)"),
    Param("ramp", _positive, 2.0, "pulse edge length (ns)"),
    Param("ringdown", _nonneg, 120.0, "free decay after the pulse before leakage is read (ns)"),
    Param("n_levels", _positive_int, 22, "transmon levels kept"),
    Param("n_max", _positive_int, 30, "charge basis cutoff"),
    Param("dt", _positive, 0.01, "integrator step (ns)"),
    Param("workers", _optional(_positive_int), None, f"worker processes (default: ${WORKERS_ENV} or the CPU count)"),
    Param("checkpoint_dir", _optional_str, None, "directory of per-point checkpoints for resuming"),
)

SELFTEST_PARAMS: tuple = ()


def _resolve(params: tuple, ns: argparse.Namespace) -> dict:
    """Defaults, then config file, then flags; every value goes through its parser."""
    raw = {p.name: (p.default, "default") for p in params}
    if ns.config is not None:
        cfg = load_config(ns.config)
        known = {p.name for p in params}
        for key, value in cfg.items():
            if key not in known:
                raise ConfigError(f"{ns.config}: unknown parameter {key!r} for {ns.subcommand}")
            raw[key] = (value, f"config {ns.config}")
    for p in params:
        value = getattr(ns, p.name)
        if value is not None:
            raw[p.name] = (value, "flag " + p.flag)
    out = {}
    for p in params:
        value, origin = raw[p.name]
        if value is None:
            out[p.name] = None
            continue
        try:
            parsed = p.parse(value) if isinstance(value, str) or origin != "default" else value
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"parameter {p.name!r} ({origin}): {exc}") from None
        if p.choices is not None and parsed not in p.choices:
            raise ParameterError(f"parameter {p.name!r} ({origin}): must be one of {', '.join(p.choices)}, got {parsed!r}")
        out[p.name] = parsed
    return out


def _check(cond: bool, name: str, message: str):
    if not cond:
        raise ParameterError(f"parameter {name!r}: {message}")


# Subcommands ---------------------------------------------------------------------


def cmd_drive(p: dict, out: Path, man: RunManifest):
    omega0 = TWO_PI * p["omega0"]
    omega_d = omega0 if p["omega_d"] is None else TWO_PI * p["omega_d"]
    G = TWO_PI * p["g"]
    if p["balanced"]:
        w = driven_mode.DriveWaveform.balanced_drive(G, omega_d, p["phi_d"])
    else:
        w = driven_mode.DriveWaveform.linear(G, omega_d, p["phi_d"])
    period = 1.0 / p["omega0"]
    span = (0.0, p["periods"] * period)
    dt = period / p["samples_per_period"]
    frame = driven_mode.FrameSpec(omega_d)
    tr = driven_mode.evolve(0.0, omega0, w, frame, span, dt)
    detuning = omega0 - omega_d
    if p["balanced"]:
        ref = driven_mode.analytic_balanced(tr.t, G, detuning, p["phi_d"])
    elif detuning == 0.0 and p["phi_d"] == 0.0:
        ref = driven_mode.analytic_unbalanced(tr.t, G, omega0)
    else:
        ref = np.full(tr.t.shape, np.nan + 0j)
    cols = dict(tr.columns())
    cols["re_a_closed_form"] = ref.real
    cols["im_a_closed_form"] = ref.imag
    man.outputs.append(write_csv(out / "drive.csv", cols, {"subcommand": "drive", **p}))
    try:
        rm = driven_mode.ripple_metrics(tr)
        man.metrics.update(ripple_amplitude=rm.amplitude, ripple_frequency=rm.frequency)
    except driven_mode.TrajectoryTooShortError as exc:
        log.info("ripple metrics skipped: %s", exc)
    finite = np.isfinite(ref)
    if np.any(finite):
        err = np.abs(tr.a - ref)[finite]
        man.metrics["max_abs_error_vs_closed_form"] = float(err.max())


def cmd_tls(p: dict, out: Path, man: RunManifest):
    omega0 = TWO_PI * p["omega0"]
    omega_d = omega0 if p["omega_d"] is None else TWO_PI * p["omega_d"]
    G = TWO_PI * p["g"]
    period = 1.0 / p["omega0"]
    n = int(round(p["periods"] * p["samples_per_period"]))
    t = np.linspace(0.0, p["periods"] * period, n + 1)
    frame = driven_mode.FrameSpec(omega_d)
    state0 = bloch_tls.BlochState.ground()
    if p["variant"] == "balanced":
        w = driven_mode.DriveWaveform.balanced_drive(G, omega_d, p["phi_d"])
    else:
        w = driven_mode.DriveWaveform.linear(G, omega_d, p["phi_d"])
    if p["variant"] == "rwa":
        rho = bloch_tls.rwa_rabi_solution(state0, w.G_d, p["phi_d"], omega0 - omega_d, t)
        cols = {"t": t, "rho_x": rho[:, 0], "rho_y": rho[:, 1], "rho_z": rho[:, 2]}
    else:
        tr = bloch_tls.tls_drive(state0, omega0, w, frame, t)
        cols = tr.columns()
        try:
            man.metrics["nutation_amplitude"] = bloch_tls.nutation_amplitude(tr)
        except bloch_tls.SpanTooShortError as exc:
            log.info("nutation metric skipped: %s", exc)
    man.outputs.append(write_csv(out / "tls.csv", cols, {"subcommand": "tls", **p}))


def cmd_eigen(p: dict, out: Path, man: RunManifest):
    for k in p["kinds"]:
        coupled_modes.coupling_rates(k, 1.0, 1.0, 0.0)  # rejects unknown kinds early
    if p["sweep"] == "g":
        xs = np.linspace(0.0, p["g_max"], p["points"])
        pairs = [(p["omega"], p["omega"], x) for x in xs]
    else:
        _check(p["omega_b_max"] > p["omega_b_min"], "omega_b_max", "must exceed omega_b_min")
        xs = np.linspace(p["omega_b_min"], p["omega_b_max"], p["points"])
        pairs = [(p["omega"], x, p["g"]) for x in xs]
    blocks = {k: [] for k in ("kind", p["sweep"])}
    parts = []
    for kind in p["kinds"]:
        rates = [coupled_modes.coupling_rates(kind, wa, wb, g) for wa, wb, g in pairs]
        try:
            parts.append(coupled_modes.spectrum_sweep(rates))
        except coupled_modes.InstabilityError as exc:
            raise ParameterError(f"parameter 'g_max': the {kind} circuit becomes unstable inside the sweep ({exc})") from None
        blocks["kind"].extend([kind] * len(xs))
        blocks[p["sweep"]].extend(xs)
    cols = {"kind": np.array(blocks["kind"]), p["sweep"]: np.array(blocks[p["sweep"]])}
    for key in parts[0]:
        cols[key] = np.concatenate([d[key] for d in parts])
    man.outputs.append(write_csv(out / "eigen.csv", cols, {"subcommand": "eigen", **p}))


def cmd_fig5(p: dict, out: Path, man: RunManifest):
    _check(p["ratio_max"] > p["ratio_min"], "ratio_max", "must exceed ratio_min")
    _check(p["k"] >= 0, "k", "must be non-negative")
    _check(p["n"] >= 1, "n", "must be at least 1")
    model = (p["lam"], p["dim"])
    g_c = TWO_PI * 1e-3 * p["g_c_mhz"]  # rad/ns
    ratios = np.linspace(p["ratio_min"], p["ratio_max"], p["points"])
    e1, e3 = [], []
    for r in ratios:
        e = transmon.strip_matrix_elements(model, p["k"], p["n"], transmon.CouplingSpec.from_ratio(g_c, r))
        e1.append(abs(e.elem_k1_n1))
        e3.append(abs(e.elem_k3_nm1))
    to_mhz = 1e3 / TWO_PI
    cols = {
        "ratio_gl_gc": ratios,
        "abs_elem_k1_n1_mhz": np.asarray(e1) * to_mhz,
        "abs_elem_k3_nm1_mhz": np.asarray(e3) * to_mhz,
    }
    man.outputs.append(write_csv(out / "fig5.csv", cols, {"subcommand": "fig5", **p}))
    man.metrics["zero_crossing_k1"] = transmon.zero_crossing_ratio(model, p["k"], "k+1")
    man.metrics["zero_crossing_k3"] = transmon.zero_crossing_ratio(model, p["k"], "k+3")


def _db(x):
    mag = np.abs(np.asarray(x))
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(mag)


def cmd_coupler(p: dict, out: Path, man: RunManifest):
    _check(p["f_max"] >= p["f_min"], "f_max", "must not be below f_min")
    lines = transmission_lines.LineParams.from_impedances(p["z_a"], p["z_b"], p["v_a"], p["v_b"], p["l_g"], p["c_g"])
    freqs = np.linspace(p["f_min"], p["f_max"], p["points"])
    res = [transmission_lines.coupler_response(lines, TWO_PI * f, p["length"]) for f in freqs]
    cols = {
        "freq_hz": freqs,
        "through_db": _db([r.through for r in res]),
        "coupled_db": _db([r.coupled for r in res]),
        "isolated_db": _db([r.isolated for r in res]),
        "reflected_db": _db([r.reflected for r in res]),
    }
    man.outputs.append(write_csv(out / "coupler.csv", cols, {"subcommand": "coupler", **p}))
    kc = transmission_lines.kappa_chi(lines, TWO_PI * freqs[0])
    man.metrics.update(kappa_over_omega=kc.kappa / (TWO_PI * freqs[0]), chi_over_omega=kc.chi / (TWO_PI * freqs[0]), Z_g=lines.Z_g)


def mist_configs(p: dict) -> list:
    _check(p["f_max_ghz"] >= p["f_min_ghz"], "f_max_ghz", "must not be below f_min_ghz")
    try:
        pulse = mist_sim.PulseSpec(p["duration"], p["ramp"], p["ringdown"])
        base = mist_sim.ReadoutConfig(
            omega_r=TWO_PI * p["omega_r_ghz"],
            kappa=p["kappa"],
            E_C=TWO_PI * p["e_c_ghz"],
            qubit_freqs=tuple(TWO_PI * np.linspace(p["f_min_ghz"], p["f_max_ghz"], p["n_freqs"])),
            n_g_grid=tuple(np.linspace(-0.5, 0.0, p["n_g_points"])),
            photon_numbers=tuple(p["photon_numbers"]),
            pulse=pulse,
            n_levels=p["n_levels"],
            n_max=p["n_max"],
            dt=p["dt"],
        )
    except ValueError as exc:
        raise ParameterError(str(exc)) from None
    panels = {c.label: c for c in mist_sim.default_panels(base)}
    unknown = [name for name in p["panels"] if name not in panels]
    _check(not unknown, "panels", f"unknown series {unknown}; choose from {', '.join(panels)}")
    return [panels[name] for name in p["panels"]]


def cmd_mist(p: dict, out: Path, man: RunManifest):
    configs = mist_configs(p)
    workers = default_workers() if p["workers"] is None else p["workers"]
    man.metrics["workers"] = workers

    def progress(done, total):
        if done == total or done % 50 == 0:
            log.info("mist: %d/%d grid points", done, total)

    maps = mist_sim.sweep(configs, workers=workers, checkpoint_dir=p["checkpoint_dir"], progress=progress)
    # Worker count and checkpoint location do not change the numbers, so they stay out of the CSV header.
    header = {k: v for k, v in p.items() if k not in ("workers", "checkpoint_dir")}
    summary = {"series": [], "initial_state": [], "leakage_mean": [], "max_norm_error": [], "max_chi_mismatch": []}
    for m in maps:
        man.outputs.append(write_csv(out / f"mist_{m.label}.csv", m.columns(), {"subcommand": "mist", "series": m.label, **header}))
        for s in (0, 1):
            summary["series"].append(m.label)
            summary["initial_state"].append(s)
            summary["leakage_mean"].append(float(m.mean[:, :, s].mean()))
            summary["max_norm_error"].append(m.max_norm_error)
            summary["max_chi_mismatch"].append(max(c.chi_mismatch for c in m.couplings))
    man.outputs.append(write_csv(out / "mist_summary.csv", {k: np.asarray(v) for k, v in summary.items()}, {"subcommand": "mist", **header}))


def cmd_selftest(p: dict, out: Path, man: RunManifest):
    from .selftest import run_selftest

    if not run_selftest(print):
        raise RuntimeError("selftest failed")


SUBCOMMANDS = {
    "drive": (DRIVE_PARAMS, cmd_drive, "driven resonator trajectory, numerical and closed form"),
    "tls": (TLS_PARAMS, cmd_tls, "driven two-level Bloch trajectory"),
    "eigen": (EIGEN_PARAMS, cmd_eigen, "full and co-rotating normal-mode frequencies of two coupled resonators"),
    "fig5": (FIG5_PARAMS, cmd_fig5, "transmon strip-changing matrix elements against g_l/g_c"),
    "coupler": (COUPLER_PARAMS, cmd_coupler, "coupled-line directional coupler port response"),
    "mist": (MIST_PARAMS, cmd_mist, "gate-charge averaged readout leakage maps"),
    "selftest": (SELFTEST_PARAMS, cmd_selftest, "run the built-in limiting-case checks"),
}


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*a, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog=PROG,
        description="Driven and coupled resonator simulations with balanced electric and magnetic coupling.",
        epilog=f"Environment: {WORKERS_ENV} sets the default number of worker processes for mist.",
    )
    parser.add_argument("--log-level", default="WARNING", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, (params, _, text) in SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=text, description=text)
        if name != "selftest":
            sp.add_argument("--config", default=None, help="flat 'name = value' config file; flags override it")
            sp.add_argument("--out", default=".", help="output directory (default: current directory)")
        for prm in params:
            extra = f" (one of: {', '.join(prm.choices)})" if prm.choices else ""
            default = prm.default if not isinstance(prm.default, tuple) else ",".join(map(str, prm.default))
            helptext = f"{prm.help}{extra}" if "(default:" in prm.help else f"{prm.help}{extra}; default {default}"
            flags = [prm.flag] + ([prm.flag.replace("_", "-")] if "_" in prm.name else [])
            if prm.parse is parse_bool:
                sp.add_argument(*flags, dest=prm.name, action=argparse.BooleanOptionalAction, default=None, help=helptext)
            else:
                sp.add_argument(*flags, dest=prm.name, default=None, metavar=prm.name.upper(), help=helptext)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    logging.basicConfig(level=getattr(logging, ns.log_level), format=f"{PROG}: %(message)s")
    params, fn, _ = SUBCOMMANDS[ns.subcommand]
    if ns.subcommand == "selftest":
        try:
            fn({}, Path("."), None)
        except RuntimeError as exc:
            print(f"{PROG} selftest: {exc}", file=sys.stderr)
            return 1
        return 0
    try:
        resolved = _resolve(params, ns)
    except (ConfigError, ParameterError) as exc:
        print(f"{PROG} {ns.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    out = Path(ns.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"{PROG} {ns.subcommand}: error: cannot create output directory {str(out)!r}: {exc.strerror}", file=sys.stderr)
        return 2
    man = RunManifest(ns.subcommand, dict(resolved))
    try:
        fn(resolved, out, man)
        write_manifest(man, out)
    except ParameterError as exc:
        print(f"{PROG} {ns.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"{PROG} {ns.subcommand}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
