"""Command-line entry point: ``omitlab <subcommand> [options]``.

Every rate on the command line (ranges, ``--delta``, ``--set`` values) is
in units of 1e6 s^-1, the same as configuration files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from .effective import lit_shift_report
from .errors import ConfigError, InvalidSpec, OmitlabError
from .optics import exceptional_point, numeric_tp_scan, track_supermodes, turning_point
from .params import RATE_UNIT, SystemConfig, config_from_mapping, config_to_mapping, load_config, parse_assignment
from .params import probe_power_for_ratio
from .steady import solve_steady_state
from .sweep import SweepSpec, emit, emit_errors, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_CELLS = 0, 1, 2

# subcommand -> (observable, default axis path, default range in document units)
SPECTRA = {
    "optical-spectrum": ("optical_T", "Delta_P", (-30.0, 30.0, 601)),
    "lit-scan": ("optical_T", "gamma_tip", (0.0, 51.44, 161)),
    "omit-spectrum": ("T_P", "Delta_P", (-20.0, 20.0, 801)),
    "group-delay": ("tau_g", "Delta_P", (-20.0, 20.0, 801)),
    "sideband2": ("eta", "Delta_P", (-20.0, 20.0, 801)),
}


# ---------------------------------------------------------------------------
# helpers


def _config(args) -> SystemConfig:
    cfg = load_config(Path(args.config).read_text()) if args.config else SystemConfig()
    if args.set:
        cfg = config_from_mapping(dict(parse_assignment(s) for s in args.set), base=cfg)
    return cfg


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(header, rows, fmt) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _record(data: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(data, indent=1) + "\n"
    return _table(["key", "value"], [(k, v) for k, v in data.items()], "csv")


def _cplx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _emit_sweep(result, args, out=None) -> int:
    out = out if out is not None else args.out
    _write(emit(result, args.format), out)
    if not result.errors:
        return EXIT_OK
    if args.format == "csv":
        table = emit_errors(result)
        if out:
            Path(out).with_suffix(".errors.csv").write_text(table)
        else:
            sys.stderr.write(table)
    print(f"{len(result.errors)} cell(s) failed", file=sys.stderr)
    return EXIT_CELLS


def _axis(args, default):
    start, stop, count = default
    return {
        "path": args.axis or SPECTRA[args.command][1],
        "start": start if args.start is None else args.start,
        "stop": stop if args.stop is None else args.stop,
        "count": count if args.count is None else args.count,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_steady_state(args) -> int:
    cfg = _config(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ss = solve_steady_state(cfg)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    data = {
        "x_s": ss.x_s,
        "beta": ss.beta,
        "photons": ss.photons,
        "residual": ss.residual,
        "bistable": ss.bistable,
        "roots": list(ss.roots),
    }
    if args.format == "json":
        data["a1_s"], data["a2_s"] = _cplx(ss.a1_s), _cplx(ss.a2_s)
    else:
        data.update(re_a1_s=ss.a1_s.real, im_a1_s=ss.a1_s.imag, re_a2_s=ss.a2_s.real, im_a2_s=ss.a2_s.imag)
        data["roots"] = " ".join(format(r, ".17g") for r in ss.roots)
    _write(_record(data, args.format), args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = _config(args)
    observable, _, default = SPECTRA[args.command]
    spec = SweepSpec.from_dict(
        {
            "observable": observable,
            "axis1": _axis(args, default),
            "base": config_to_mapping(cfg),
            "Delta_P": args.delta,
        }
    )
    if args.command == "lit-scan":
        delta = args.delta * RATE_UNIT
        tp = turning_point(cfg, delta, delta)
        print(f"turning point (closed form): {tp.gamma_tp / RATE_UNIT:.12g} x 1e6 s^-1"
              + (" [approximate]" if tp.approximate else ""), file=sys.stderr)
        lo, hi = spec.axis1.start * RATE_UNIT, spec.axis1.stop * RATE_UNIT
        if spec.axis1.path == "gamma_tip":
            try:
                g_min, t_min = numeric_tp_scan(cfg, delta, delta, (lo, hi))
                print(f"turning point (scan): {g_min / RATE_UNIT:.12g} x 1e6 s^-1, T_min = {t_min:.3e}",
                      file=sys.stderr)
            except OmitlabError as exc:
                print(f"turning point (scan): {exc}", file=sys.stderr)
    return _emit_sweep(run_sweep(spec, workers=args.workers), args)


def cmd_eigenmodes(args) -> int:
    cfg = _config(args)
    start = 0.0 if args.start is None else args.start
    stop = 51.44 if args.stop is None else args.stop
    count = 161 if args.count is None else args.count
    tips = np.linspace(start, stop, count) * RATE_UNIT
    plus, minus = track_supermodes(cfg, 0.0, 0.0, tips)
    print(f"exceptional point: {exceptional_point(cfg) / RATE_UNIT:.12g} x 1e6 s^-1", file=sys.stderr)
    rows = [
        (float(g / RATE_UNIT), float(p.real), float(p.imag), float(m.real), float(m.imag))
        for g, p, m in zip(tips, plus, minus)
    ]
    header = ["gamma_tip", "re_plus", "im_plus", "re_minus", "im_minus"]
    _write(_table(header, rows, args.format), args.out)
    return EXIT_OK


def cmd_shift_report(args) -> int:
    cfg = _config(args)
    rep = lit_shift_report(cfg)
    data = {
        "shift": rep.shift,
        "shift2": rep.shift2,
        "shift_resonant": rep.shift_resonant,
        "shift2_at_lit": rep.shift2_at_lit,
        "lit_detunings": list(rep.lit_detunings),
    }
    if args.format == "csv":
        data["lit_detunings"] = " ".join(format(v, ".17g") for v in rep.lit_detunings)
    _write(_record(data, args.format), args.out)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    from .oracle import integrate, oracle_observables
    from .sideband import sideband_efficiency
    from .omit import probe_transmission

    cfg = _config(args)
    cfg = cfg.replace(P_in=probe_power_for_ratio(cfg, args.eps_ratio))
    start = -15.0 if args.start is None else args.start
    stop = 15.0 if args.stop is None else args.stop
    count = 7 if args.count is None else args.count
    grid = np.linspace(start, stop, count)
    rows = []
    worst = 0.0
    for d in grid:
        delta = float(d) * RATE_UNIT
        T_a = probe_transmission(cfg, delta)[1]
        eta_a = sideband_efficiency(cfg, delta).eta
        T_o, eta_o = oracle_observables(cfg, delta)
        eT, ee = abs(T_o - T_a) / abs(T_a), abs(eta_o - eta_a) / abs(eta_a)
        worst = max(worst, eT / 1e-3, ee / 5e-3)
        rows.append((float(d), T_a, T_o, eT, eta_a, eta_o, ee))
    header = ["Delta_P", "T_P", "T_P_oracle", "T_P_rel_err", "eta", "eta_oracle", "eta_rel_err"]
    _write(_table(header, rows, args.format), args.out)
    if args.trace:
        epsilon = grid[0] * RATE_UNIT + cfg.pump_detuning
        integrate(cfg, epsilon, t_final=args.trace_time * 1e-6).to_csv(args.trace)
    ok = worst <= 1.0
    print(f"oracle agreement {'within' if ok else 'OUTSIDE'} tolerance (T_P 1e-3, eta 5e-3)", file=sys.stderr)
    return EXIT_OK if ok else EXIT_CELLS


def cmd_sweep(args) -> int:
    text = Path(args.spec).read_text()
    try:
        import yaml

        data = yaml.safe_load(text)
    except Exception as exc:  # noqa: BLE001 - any parse failure is a bad spec
        raise InvalidSpec(f"cannot parse {args.spec}: {exc}") from exc
    if args.config or args.set:
        data = dict(data or {})
        data["base"] = {**config_to_mapping(_config(args)), **(data.get("base") or {})}
    return _emit_sweep(run_sweep(SweepSpec.from_dict(data), workers=args.workers), args)


def available_figures() -> list[str]:
    folder = resources.files("omitlab") / "recipes"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_recipe(figure: str) -> dict:
    if figure not in available_figures():
        raise InvalidSpec(f"unknown figure {figure!r}; choose from {available_figures()}")
    return json.loads((resources.files("omitlab") / "recipes" / f"{figure}.json").read_text())


def cmd_reproduce_figure(args) -> int:
    recipe = load_recipe(args.figure)
    base = config_to_mapping(_config(args)) if (args.config or args.set) else {}
    panels = recipe["panels"]
    code = EXIT_OK
    for name, panel in panels.items():
        panel = dict(panel)
        panel["base"] = {**base, **(panel.get("base") or {})}
        result = run_sweep(SweepSpec.from_dict(panel), workers=args.workers)
        if len(panels) == 1:
            out = args.out
        elif args.out:
            p = Path(args.out)
            out = str(p.with_name(f"{p.stem}_{name}{p.suffix}"))
        else:
            sys.stdout.write(f"# panel {name}\n")
            out = None
        code = max(code, _emit_sweep(result, args, out=out))
    return code


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML configuration file (rates in 1e6 s^-1)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config value (repeatable)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _ranged(p: argparse.ArgumentParser) -> None:
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--count", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omitlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady-state", help="self-consistent operating point")
    _common(p)
    p.set_defaults(func=cmd_steady_state)

    for name, (observable, path, _) in SPECTRA.items():
        p = sub.add_parser(name, help=f"{observable} along one axis (default {path})")
        _common(p)
        _ranged(p)
        p.add_argument("--axis", help="parameter to sweep (config field or Delta_P)")
        p.add_argument("--delta", type=float, default=0.0, help="fixed Delta_P when the axis is not Delta_P")
        p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("eigenmodes", help="supermode frequencies versus tip loss")
    _common(p)
    _ranged(p)
    p.set_defaults(func=cmd_eigenmodes)

    p = sub.add_parser("shift-report", help="effective frequency shifts at first and second order")
    _common(p)
    p.set_defaults(func=cmd_shift_report)

    p = sub.add_parser("oracle-check", help="compare analytic T_P and eta with the time-domain integrator")
    _common(p)
    _ranged(p)
    p.add_argument("--eps-ratio", type=float, default=1e-3, help="probe to pump field ratio")
    p.add_argument("--trace", help="also dump the trajectory at the first grid point to this CSV")
    p.add_argument("--trace-time", type=float, default=50.0, help="trajectory length in microseconds")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("sweep", help="run a sweep spec file (JSON or YAML)")
    _common(p)
    p.add_argument("--spec", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce-figure", help="run a checked-in figure recipe")
    _common(p)
    p.add_argument("figure", help="figure id, e.g. fig3f")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_reproduce_figure)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidSpec, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OmitlabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CELLS


if __name__ == "__main__":
    sys.exit(main())
