"""Command-line front end.

Exit codes: 0 success, 2 configuration, 3 derivation, 4 instability,
5 unphysical covariance matrix, 6 I/O, 7 validity check failed.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

from . import __version__, gaussian, model, output, presets
from .config import COMMANDS, PARAM_DEFAULTS, ConfigError, load_config
from .constants import TWO_PI
from .errors import DomainError, MagnomechError, NotApplicableError
from .linalg import lyapunov_residual, lyapunov_solve
from .sweep import MODE_LABELS, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DERIVATION = 3
EXIT_UNSTABLE = 4
EXIT_UNPHYSICAL = 5
EXIT_IO = 6
EXIT_INVALID = 7


class CommandError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _emit(lines, out=None):
    out = out or sys.stdout
    width = max(len(k) for k, _ in lines) + 2
    for key, value in lines:
        out.write(f"{key:<{width}}{value}\n")


def _g(x):
    if x is None:
        return "n/a"
    if isinstance(x, bool):
        return "yes" if x else "no"
    return format(x, ".6g")


def _derive(cfg):
    p = cfg.params()
    try:
        return p, model.derive(p, cfg.thresholds["low_excitation"], cfg.thresholds["kerr"])
    except MagnomechError as exc:
        raise CommandError(EXIT_DERIVATION, f"derivation failed: {exc}") from exc


def cmd_derive(cfg, out=None):
    p, d = _derive(cfg)
    physical = p.is_physical
    v = d.validity
    m_exact = d.m_mean
    m_approx = d.m_mean_approx
    rel = None
    if physical and not math.isnan(m_approx.real):
        rel = model.relative_difference(m_exact, m_approx)
    lines = [
        ("coupling_mode", "physical" if physical else "direct"),
        ("n_therm_a", _g(d.n_therm_a)),
        ("n_therm_m", _g(d.n_therm_m)),
        ("n_therm_b", _g(d.n_therm_b)),
        ("n_spins", _g(d.n_spins)),
        ("rabi_omega [rad/s]", _g(d.rabi_omega)),
        ("m_mean_exact", "n/a" if m_exact is None else f"{m_exact.real:.6g}{m_exact.imag:+.6g}j"),
        ("abs_m_mean_exact", _g(None if m_exact is None else abs(m_exact))),
        ("m_mean_approx", "n/a" if m_approx is None else f"{m_approx.real:.6g}{m_approx.imag:+.6g}j"),
        ("abs_m_mean_approx", _g(None if m_approx is None else abs(m_approx))),
        ("m_mean_rel_diff", _g(rel)),
        ("q_mean", _g(d.q_mean)),
        ("magnon_occupation", _g(d.magnon_occupation)),
        ("five_n", _g(None if not physical else 2 * p.coupling.spin_s * d.n_spins)),
        ("g_mb_eff/2pi [Hz]", _g(d.g_mb_eff / TWO_PI)),
        ("low_excitation_ratio", _g(v and v.low_excitation_ratio)),
        ("kerr_coefficient/2pi [Hz]", _g(v and v.kerr_coefficient / TWO_PI)),
        ("kerr_term [rad/s]", _g(v and v.kerr_term)),
        ("kerr_ratio", _g(v and v.kerr_ratio)),
        ("low_excitation_ok", _g(v and v.low_excitation_ok)),
        ("kerr_ok", _g(v and v.kerr_ok)),
    ]
    _emit(lines, out)
    if cfg.out is not None:
        os.makedirs(cfg.out, exist_ok=True)
        with open(os.path.join(cfg.out, "derive.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["quantity", "value"])
            writer.writerows(lines)
    return EXIT_OK


def _stability(cfg):
    p, d = _derive(cfg)
    a = model.drift_matrix(p, d.g_mb_eff)
    try:
        verdict = model.stability_check(a, cfg.thresholds["stability_margin"])
    except MagnomechError as exc:
        raise CommandError(EXIT_DERIVATION, f"eigenvalue computation failed: {exc}") from exc
    return p, d, a, verdict


def cmd_stability(cfg, out=None):
    _, _, _, verdict = _stability(cfg)
    eigs = sorted(verdict.eigenvalues, key=lambda z: (z.real, z.imag))
    lines = [(f"eigenvalue[{i}] / omega_b", f"{z.real:.6g}{z.imag:+.6g}j") for i, z in enumerate(eigs)]
    lines += [
        ("max_real_eig / omega_b", _g(verdict.max_real_part)),
        ("stable", _g(verdict.stable)),
    ]
    _emit(lines, out)
    return EXIT_OK if verdict.stable else EXIT_UNSTABLE


def cmd_entangle(cfg, out=None):
    p, d, a, verdict = _stability(cfg)
    if not verdict.stable:
        raise CommandError(
            EXIT_UNSTABLE, f"no steady state: max real eigenvalue {verdict.max_real_part:.6g} omega_b"
        )
    dm = model.diffusion_matrix(p, d)
    try:
        cm = gaussian.CovarianceMatrix(lyapunov_solve(a, dm), MODE_LABELS)
    except MagnomechError as exc:
        raise CommandError(EXIT_DERIVATION, f"Lyapunov solve failed: {exc}") from exc
    if not cm.is_physical():
        raise CommandError(EXIT_UNPHYSICAL, "steady-state covariance matrix is unphysical")
    part = gaussian.ModePartition
    e_am = gaussian.log_negativity(cm, part(0, (1,)))
    e_mb = gaussian.log_negativity(cm, part(1, (2,)))
    e_ab = gaussian.log_negativity(cm, part(0, (2,)))
    r = gaussian.residual_contangles(cm)
    r_min = gaussian.clamp_residual(min(r))
    _emit(
        [
            ("stable", "yes"),
            ("max_real_eig / omega_b", _g(verdict.max_real_part)),
            ("e_am", _g(e_am)),
            ("e_mb", _g(e_mb)),
            ("e_ab", _g(e_ab)),
            ("r_a|mb", _g(r[0])),
            ("r_m|ab", _g(r[1])),
            ("r_b|am", _g(r[2])),
            ("r_min", _g(r_min)),
            ("genuine_tripartite", _g(gaussian.is_genuinely_tripartite(r_min, cfg.thresholds["tripartite"]))),
            ("lyapunov_residual", _g(lyapunov_residual(a, cm.matrix, dm))),
            ("low_excitation_ok", _g(d.low_excitation_ok)),
            ("kerr_ok", _g(d.kerr_ok)),
        ],
        out,
    )
    return EXIT_OK


def cmd_validate(cfg, out=None):
    p, d = _derive(cfg)
    if not p.is_physical:
        raise CommandError(EXIT_DERIVATION, "validity checks need coupling_mode 'physical'")
    v = d.validity
    t = cfg.thresholds
    kerr = "no drive" if v.no_drive else f"{v.kerr_ratio:.6g} (< {t['kerr']:g})"
    _emit(
        [
            ("magnon_occupation", _g(d.magnon_occupation)),
            ("five_n", _g(2 * p.coupling.spin_s * d.n_spins)),
            ("low_excitation_ratio", f"{v.low_excitation_ratio:.6g} (< {t['low_excitation']:g})"),
            ("low_excitation", "pass" if v.low_excitation_ok else "FAIL"),
            ("kerr_term [rad/s]", _g(v.kerr_term)),
            ("rabi_omega [rad/s]", _g(d.rabi_omega)),
            ("kerr_ratio", kerr),
            ("kerr", "pass" if v.kerr_ok else "FAIL"),
        ],
        out,
    )
    return EXIT_OK if v.ok else EXIT_INVALID


def _write_and_summarize(result, directory, stem, figure, out):
    try:
        csv_path, meta_path = output.write_result(result, directory, stem, figure)
    except OSError as exc:
        raise CommandError(EXIT_IO, f"cannot write output: {exc}") from exc
    s = output.summary(result)
    lines = [
        ("csv", csv_path),
        ("meta", meta_path),
        ("points", str(s["points"])),
        ("stable_fraction", _g(s["stable_fraction"])),
        ("failures", str(s["failures"])),
    ]
    for name, info in s["measures"].items():
        where = "n/a" if info["argmax"] is None else ", ".join(
            f"{k}={v:.6g}" for k, v in info["argmax"].items()
        )
        lines.append((f"max {name}", f"{_g(info['max'])} at {where}"))
    _emit(lines, out)
    return EXIT_OK


def cmd_sweep(cfg, out=None):
    result = run_sweep(cfg.sweep_spec(), workers=cfg.workers)
    return _write_and_summarize(result, cfg.out or ".", "sweep", None, out)


def cmd_reproduce(cfg, out=None):
    try:
        spec = presets.figure_preset(cfg.figure)
    except DomainError as exc:
        raise ConfigError("figure", str(exc)) from exc
    result = run_sweep(spec, workers=cfg.workers)
    return _write_and_summarize(result, cfg.out or ".", cfg.figure, cfg.figure, out)


HANDLERS = {
    "derive": cmd_derive,
    "stability": cmd_stability,
    "entangle": cmd_entangle,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
    "validate": cmd_validate,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, help="worker processes for sweeps")
    common.add_argument("--figure", choices=presets.FIGURES, help="figure preset (reproduce)")
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override a configuration key (repeatable; dotted keys reach nested objects)",
    )
    for key, default in PARAM_DEFAULTS.items():
        flag = "--" + key.replace("_", "-")
        if key == "coupling_mode":
            common.add_argument(flag, dest=key, choices=("direct", "physical"))
        else:
            common.add_argument(flag, dest=key, type=float, metavar="X", help=f"default {default:g}")

    parser = argparse.ArgumentParser(
        prog="magnomech",
        description="Steady-state magnon-photon-phonon entanglement.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    flags = {key: getattr(args, key) for key in PARAM_DEFAULTS}
    flags.update(workers=args.workers, out=args.out, figure=args.figure)
    try:
        cfg = load_config(args.command, args.config, args.set, flags)
        return HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NotApplicableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DERIVATION
