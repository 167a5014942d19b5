"""Command-line front end: ``pqfronts <command> [options]``.

Every command reads an optional INI file (``--config``) whose sections
mirror the library objects, applies ``--set section.key=value`` and the
per-command shortcut flags on top, and echoes the fully resolved
configuration in its output.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
failure, 3 competitive domain breach.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import io
from .bounds import (BoundSet, competitive_bounds, lower_bound, numeric_cplus,
                     speed_bounds, upper_bound_cplus)
from .errors import (BlowUp, BoundaryContamination, BoundUndefined, BracketFailure,
                     DomainBreach, IntegrationFailure, NoCertificate)
from .figures import FIGURE_IDS, figure_data
from .operator import Mode, OperatorSpec
from .pdesim import GridSpec, run, suggested_domain
from .profile import profile_on_grid, reconstruct_profile
from .reaction import ReactionSpec, load_tabulated_csv
from .shooting import (Classification, ShootSettings, classify_speed, competitive_window,
                       critical_speed, integrate_backward)

log = logging.getLogger("pqfronts")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_BREACH = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def _floats(text):
    text = text.strip()
    if not text:
        return []
    return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]


def _bool(text):
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text):
    return None if text.strip().lower() in ("", "none") else float(text)


_SOLVER_TYPES = {f.name: (str if f.type in ("str", str) else
                          int if f.type in ("int", int) else float)
                 for f in fields(ShootSettings)}

SCHEMA = {
    "operator": {"p": float, "q": float, "mode": str},
    "reaction": {"family": str, "a": float, "gamma": float, "H": float, "table": str},
    "solver": _SOLVER_TYPES,
    "bounds": {"L0": _opt_float, "L_plus": _opt_float, "numeric": _bool},
    "classify": {"c": float},
    "critical_speed": {"n_scan": int, "scan_cap": _opt_float},
    "profile": {"c": float, "tail_tol": float, "anchor": float},
    "simulate": {"c": _opt_float, "initial": str, "nx": int, "t_end": float,
                 "x_min": _opt_float, "x_max": _opt_float, "dt": _opt_float,
                 "snapshot_stride": int, "margin": float},
    "figure": {"id": int},
    "sweep": {"p": _floats, "q": _floats, "mode": str, "task": str, "c": _floats,
              "L_plus": _floats, "workers": int},
}

DEFAULTS = {
    "operator": {"p": 4.0, "q": 2.0, "mode": "cooperative"},
    "reaction": {"family": "matched", "a": 1.0, "H": 1.0},
    "solver": {f.name: f.default for f in fields(ShootSettings)},
    "bounds": {"L0": None, "L_plus": None, "numeric": True},
    "critical_speed": {"n_scan": 11, "scan_cap": None},
    "profile": {"tail_tol": 1e-6, "anchor": 0.5},
    "simulate": {"c": None, "initial": "profile", "nx": 4000, "t_end": 20.0, "x_min": None,
                 "x_max": None, "dt": None, "snapshot_stride": 500, "margin": 40.0},
    "figure": {},
    "sweep": {"p": [], "q": [], "mode": "cooperative", "task": "critical_speed", "c": [],
              "L_plus": [], "workers": 1},
    "classify": {},
}


def _set(cfg, section, key, raw):
    if section not in SCHEMA:
        raise ConfigError(f"unknown section [{section}]")
    conv = SCHEMA[section].get(key)
    if conv is None:
        raise ConfigError(f"unknown key {key!r} in [{section}]")
    try:
        cfg[section][key] = conv(raw) if isinstance(raw, str) else raw
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None


def load_config(path=None, overrides=()) -> dict:
    """Resolve defaults, the INI file at ``path`` and ``section.key=value`` overrides."""
    cfg = {s: dict(v) for s, v in DEFAULTS.items()}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        for section in parser.sections():
            for key, raw in parser.items(section):
                _set(cfg, section, key, raw)
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        lhs, raw = item.split("=", 1)
        section, key = lhs.split(".", 1)
        _set(cfg, section.strip(), key.strip(), raw.strip())
    return cfg


def build_operator(cfg) -> OperatorSpec:
    o = cfg["operator"]
    try:
        return OperatorSpec(o["p"], o["q"], Mode(o["mode"]))
    except ValueError as exc:
        raise ConfigError(f"[operator] {exc}") from None


def build_reaction(cfg, op: OperatorSpec) -> ReactionSpec:
    r = cfg["reaction"]
    fam = r["family"]
    qp = op.q_conj
    try:
        if fam == "matched":
            return ReactionSpec.matched(qp, r["a"], r["H"])
        if fam == "power_logistic":
            if "gamma" not in r:
                raise ConfigError("[reaction] power_logistic needs gamma")
            return ReactionSpec.power_logistic(r["gamma"], r["a"], r["H"], qp)
        if fam == "classical_logistic":
            return ReactionSpec.classical_logistic(r["a"], r["H"], qp)
        if fam == "tabulated":
            if "table" not in r:
                raise ConfigError("[reaction] tabulated needs table = PATH")
            return load_tabulated_csv(r["table"], qp)
    except (ValueError, OSError) as exc:
        raise ConfigError(f"[reaction] {exc}") from None
    raise ConfigError(f"[reaction] unknown family {fam!r}")


def build_settings(cfg) -> ShootSettings:
    try:
        return ShootSettings(**cfg["solver"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[solver] {exc}") from None


def _require(cfg, section, key):
    if cfg[section].get(key) is None:
        raise ConfigError(f"missing {section}.{key} (config file, --set or shortcut flag)")
    return cfg[section][key]


def _echo(cfg, sections):
    return {s: cfg[s] for s in sections}


class Result:
    """What a command produced: a JSON record, an optional table, an exit code."""

    def __init__(self, name, record, header=None, rows=None, code=EXIT_OK, extra=None):
        self.name = name
        self.record = record
        self.header = header
        self.rows = rows
        self.code = code
        self.extra = extra


# commands ---------------------------------------------------------------

def cmd_bounds(cfg) -> Result:
    op = build_operator(cfg)
    b = cfg["bounds"]
    echo = _echo(cfg, ["operator", "reaction", "bounds"])
    if b["L0"] is None and b["L_plus"] is None:
        r = build_reaction(cfg, op)
        bs = speed_bounds(op, r, numeric=b["numeric"])
    else:
        L0 = b["L0"] if b["L0"] is not None else b["L_plus"]
        Lp = b["L_plus"] if b["L_plus"] is not None else b["L0"]
        echo["reaction"] = None
        bs = _bounds_from_constants(op, L0, Lp, b["numeric"])
    rec = {"command": "bounds", "config": echo, "bounds": bs.to_record()}
    win = bs.competitive_window or (None, None)
    row = [bs.lower, bs.upper_analytic, bs.upper_case, bs.upper_numeric, win[0], win[1],
           bs.window_empty]
    header = ["lower", "upper_analytic", "upper_case", "upper_numeric", "window_lo",
              "window_hi", "window_empty"]
    return Result("bounds", rec, header, [row])


def _bounds_from_constants(op, L0, Lp, numeric=True) -> BoundSet:
    lower = lower_bound(op, L0)
    if op.mode is Mode.COMPETITIVE:
        cb = competitive_bounds(op, L0, Lp)
        num = None
        if numeric:
            try:
                num = numeric_cplus(op, Lp)
            except NoCertificate:
                num = None
        return BoundSet(lower, cb.c_upper, "competitive", num, (cb.c_upper, cb.c_max),
                        cb.window_empty)
    up, case = upper_bound_cplus(op, Lp)
    return BoundSet(lower, up, case, numeric_cplus(op, Lp) if numeric else None)


def cmd_classify(cfg) -> Result:
    op = build_operator(cfg)
    r = build_reaction(cfg, op)
    st = build_settings(cfg)
    c = _require(cfg, "classify", "c")
    out = integrate_backward(op, r, c, st)
    cls = classify_speed(op, r, c, st)
    rec = {"command": "classify", "config": _echo(cfg, ["operator", "reaction", "solver",
                                                        "classify"]),
           "classification": cls.value, "shoot": out.summary()}
    code = EXIT_BREACH if cls is Classification.DOMAIN_BREACH else EXIT_OK
    return Result("classify", rec, ["v", "y", "phi"], list(zip(out.u, out.y, out.phi)), code)


def cmd_critical_speed(cfg) -> Result:
    op = build_operator(cfg)
    r = build_reaction(cfg, op)
    st = build_settings(cfg)
    echo = _echo(cfg, ["operator", "reaction", "solver", "critical_speed"])
    if op.mode is Mode.COMPETITIVE:
        cs = cfg["critical_speed"]
        w = competitive_window(op, r, st, n_scan=cs["n_scan"], scan_cap=cs["scan_cap"])
        rec = {"command": "critical-speed", "config": echo, "window": w.to_record(),
               "bounds": speed_bounds(op, r).to_record()}
        breach = any(k is Classification.DOMAIN_BREACH for k in w.classifications)
        code = EXIT_BREACH if w.empty and breach else EXIT_OK
        rows = [(c, k.value) for c, k in zip(w.speeds, w.classifications)]
        return Result("critical_speed", rec, ["c", "classification"], rows, code)
    res = critical_speed(op, r, st)
    rec = {"command": "critical-speed", "config": echo, "result": res.to_record()}
    rows = [(c, k.value) for c, k in res.history]
    return Result("critical_speed", rec, ["c", "classification"], rows)


def cmd_profile(cfg) -> Result:
    op = build_operator(cfg)
    r = build_reaction(cfg, op)
    st = build_settings(cfg)
    p = cfg["profile"]
    c = _require(cfg, "profile", "c")
    out = integrate_backward(op, r, c, st)
    echo = _echo(cfg, ["operator", "reaction", "solver", "profile"])
    if out.classification is not Classification.ADMISSIBLE:
        rec = {"command": "profile", "config": echo, "shoot": out.summary(),
               "error": f"speed {c} is {out.classification.value}; no profile"}
        code = EXIT_BREACH if out.classification is Classification.DOMAIN_BREACH else EXIT_NUMERIC
        return Result("profile", rec, code=code)
    prof = reconstruct_profile(out, tail_tol=p["tail_tol"], anchor=p["anchor"])
    rec = {"command": "profile", "config": echo, "shoot": out.summary(),
           "z_span": list(prof.z_span), "n_samples": int(prof.z.size)}
    return Result("profile", rec, ["z", "u", "du_dz"], list(zip(prof.z, prof.u, prof.du_dz)))


def cmd_simulate(cfg) -> Result:
    op = build_operator(cfg)
    r = build_reaction(cfg, op)
    st = build_settings(cfg)
    s = cfg["simulate"]
    c = s["c"]
    if s["initial"] == "profile":
        if c is None:
            raise ConfigError("simulate.c is required with initial = profile")
    elif s["initial"] != "step":
        raise ConfigError(f"[simulate] initial must be 'profile' or 'step', got {s['initial']!r}")
    c_dom = c if c is not None else speed_bounds(op, r, numeric=False).upper_analytic
    lo, hi = suggested_domain(c_dom, s["t_end"], s["margin"])
    x_min = s["x_min"] if s["x_min"] is not None else lo
    x_max = s["x_max"] if s["x_max"] is not None else hi
    try:
        grid = GridSpec(x_min, x_max, s["nx"], s["t_end"], s["dt"], s["snapshot_stride"])
    except ValueError as exc:
        raise ConfigError(f"[simulate] {exc}") from None
    if s["initial"] == "profile":
        shoot = integrate_backward(op, r, c, st)
        if shoot.classification is not Classification.ADMISSIBLE:
            code = (EXIT_BREACH if shoot.classification is Classification.DOMAIN_BREACH
                    else EXIT_NUMERIC)
            rec = {"command": "simulate", "config": _echo(cfg, ["operator", "reaction",
                                                              "solver", "simulate"]),
                   "error": f"speed {c} is {shoot.classification.value}; no profile"}
            return Result("simulate", rec, code=code)
        u0 = profile_on_grid(reconstruct_profile(shoot), grid.x)
    else:
        u0 = np.where(grid.x > 0.0, r.H, 0.0)
    res = run(u0, op, r, grid)
    echo = _echo(cfg, ["operator", "reaction", "solver", "simulate"])
    rec = {"command": "simulate", "config": echo, "grid": grid.to_record(),
           "steps": res.steps, "fitted_speed": res.track.fitted_speed,
           "fit_residual": res.track.fit_residual, "target_speed": c}
    rows = list(zip(res.track.times, res.track.positions))
    return Result("simulate", rec, ["t", "position"], rows, extra=res)


def cmd_figure(cfg) -> Result:
    fid = _require(cfg, "figure", "id")
    if fid not in FIGURE_IDS:
        raise ConfigError(f"figure id must be one of {FIGURE_IDS}")
    st = build_settings(cfg)
    fd = figure_data(fid, st)
    rec = {"command": "figure", "config": _echo(cfg, ["solver", "figure"]), "figure": fid,
           "meta": fd.meta}
    return Result(f"figure{fid}", rec, fd.header, fd.rows)


SWEEP_HEADER = ["p", "q", "mode", "c", "L_plus", "lower", "upper_analytic", "upper_case",
                "upper_numeric", "c_star", "classification", "error"]


def _sweep_row(args):
    p, q, mode, c, Lp, task, solver, reaction = args
    row = dict.fromkeys(SWEEP_HEADER)
    row.update(p=p, q=q, mode=mode, c=c, L_plus=Lp)
    try:
        op = OperatorSpec(p, q, Mode(mode))
        cfg = {"operator": {}, "reaction": dict(reaction), "solver": solver}
        st = build_settings(cfg)
        if Lp is not None:
            bs = _bounds_from_constants(op, Lp, Lp)
        else:
            r = build_reaction(cfg, op)
            bs = speed_bounds(op, r)
        row.update(lower=bs.lower, upper_analytic=bs.upper_analytic,
                   upper_case=bs.upper_case, upper_numeric=bs.upper_numeric)
        if task == "critical_speed" and Lp is None:
            if op.mode is Mode.COMPETITIVE:
                w = competitive_window(op, r, st)
                row["classification"] = "empty" if w.empty else "window"
                row["c_star"] = None if w.empty else w.interval[0]
            else:
                row["c_star"] = critical_speed(op, r, st, bounds=bs).c_star
        elif task == "classify" and Lp is None:
            row["classification"] = classify_speed(op, r, c, st).value
    except Exception as exc:  # each row stands alone
        row["error"] = f"{type(exc).__name__}: {exc}"
    return [row[k] for k in SWEEP_HEADER]


def cmd_sweep(cfg) -> Result:
    s = cfg["sweep"]
    if s["task"] not in ("bounds", "critical_speed", "classify"):
        raise ConfigError("sweep.task must be bounds, critical_speed or classify")
    if s["task"] == "classify" and not s["c"]:
        raise ConfigError("sweep.task = classify needs a list sweep.c")
    cs = s["c"] if s["task"] == "classify" else [None]
    Ls = s["L_plus"] or [None]
    jobs = [(p, q, s["mode"], c, L, s["task"], cfg["solver"], cfg["reaction"])
            for p in s["p"] for q in s["q"] for c in cs for L in Ls]
    if s["workers"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=s["workers"]) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    n_err = sum(1 for r in rows if r[-1])
    rec = {"command": "sweep", "config": _echo(cfg, ["reaction", "solver", "sweep"]),
           "rows": [dict(zip(SWEEP_HEADER, r)) for r in rows], "n_rows": len(rows),
           "n_errors": n_err}
    code = EXIT_OK if (not rows or n_err < len(rows)) else EXIT_NUMERIC
    return Result("sweep", rec, SWEEP_HEADER, rows, code)


COMMANDS = {
    "bounds": cmd_bounds,
    "classify": cmd_classify,
    "critical-speed": cmd_critical_speed,
    "profile": cmd_profile,
    "simulate": cmd_simulate,
    "figure": cmd_figure,
    "sweep": cmd_sweep,
}


# argument parsing ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_SHORTCUTS = {
    "p": ("operator", "p"), "q": ("operator", "q"), "mode": ("operator", "mode"),
    "family": ("reaction", "family"), "a": ("reaction", "a"), "gamma": ("reaction", "gamma"),
    "H": ("reaction", "H"), "table": ("reaction", "table"),
    "seed_delta": ("solver", "seed_delta"),
}


def _add_common(sp):
    g = sp.add_argument_group("operator and reaction")
    g.add_argument("--p")
    g.add_argument("--q")
    g.add_argument("--mode", choices=[m.value for m in Mode])
    g.add_argument("--family",
                   choices=["matched", "power_logistic", "classical_logistic", "tabulated"])
    g.add_argument("--a")
    g.add_argument("--gamma")
    g.add_argument("--H")
    g.add_argument("--table", help="CSV with header u,f")
    g.add_argument("--seed-delta", dest="seed_delta")


def build_parser() -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    parent.add_argument("--config", help="INI configuration file")
    parent.add_argument("--out", help="directory for output files (default: stdout)")
    parent.add_argument("--format", choices=["csv", "json"], default="json")
    parent.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one configuration value (repeatable)")
    parent.add_argument("-v", "--verbose", action="store_true")

    ap = _Parser(prog="pqfronts", description=__doc__.splitlines()[0],
                 parents=[parent])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("bounds", parents=[parent], help="analytic and numeric speed bounds")
    _add_common(sp)
    sp.add_argument("--L0", dest="L0")
    sp.add_argument("--L-plus", dest="L_plus")

    sp = sub.add_parser("classify", parents=[parent], help="classify one speed by shooting")
    _add_common(sp)
    sp.add_argument("--c", dest="classify_c")

    sp = sub.add_parser("critical-speed", parents=[parent], help="bisect for c*")
    _add_common(sp)

    sp = sub.add_parser("profile", parents=[parent], help="reconstruct the wave profile")
    _add_common(sp)
    sp.add_argument("--c", dest="profile_c")
    sp.add_argument("--tail-tol", dest="profile_tail_tol")

    sp = sub.add_parser("simulate", parents=[parent], help="finite-difference PDE run")
    _add_common(sp)
    sp.add_argument("--c", dest="simulate_c")
    sp.add_argument("--initial", dest="simulate_initial", choices=["profile", "step"])
    sp.add_argument("--nx", dest="simulate_nx")
    sp.add_argument("--t-end", dest="simulate_t_end")

    sp = sub.add_parser("figure", parents=[parent], help="data behind a reference figure")
    sp.add_argument("id", type=int, choices=FIGURE_IDS)

    sp = sub.add_parser("sweep", parents=[parent], help="parameter sweep over (p, q)")
    sp.add_argument("--p-list", dest="sweep_p")
    sp.add_argument("--q-list", dest="sweep_q")
    sp.add_argument("--task", dest="sweep_task", choices=["bounds", "critical_speed",
                                                          "classify"])
    sp.add_argument("--workers", dest="sweep_workers")
    return ap


def _overrides(ns) -> list:
    out = list(ns.set)
    for attr, (section, key) in _SHORTCUTS.items():
        val = getattr(ns, attr, None)
        if val is not None:
            out.append(f"{section}.{key}={val}")
    for attr in ("L0", "L_plus"):
        val = getattr(ns, attr, None)
        if val is not None:
            out.append(f"bounds.{attr}={val}")
    for name, val in vars(ns).items():
        for section in ("classify", "profile", "simulate", "sweep"):
            if name.startswith(section + "_") and val is not None:
                out.append(f"{section}.{name[len(section) + 1:]}={val}")
    if ns.command == "figure":
        out.append(f"figure.id={ns.id}")
    return out


def _emit(result: Result, fmt: str, out_dir):
    record = result.record
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        io.dump_json(record, out / f"{result.name}.json")
        if fmt == "csv" and result.header is not None:
            io.write_table(out / f"{result.name}.csv", result.header, result.rows)
        if result.extra is not None and hasattr(result.extra, "snapshots"):
            io.write_snapshots(result.extra, out / "snapshots", record)
        return
    if fmt == "json" or result.header is None:
        sys.stdout.write(io.dump_json(record))
        return
    sys.stdout.write("# config: " + io.dump_json(record["config"]).replace("\n", " ").strip()
                     + "\n")
    io.write_table(sys.stdout, result.header, result.rows)


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(ns.config, _overrides(ns))
        result = COMMANDS[ns.command](cfg)
    except (ConfigError, BoundUndefined) as exc:
        print(f"pqfronts: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainBreach as exc:
        print(f"pqfronts: domain breach: {exc}", file=sys.stderr)
        return EXIT_BREACH
    except (IntegrationFailure, BracketFailure, BlowUp, BoundaryContamination,
            NoCertificate, FloatingPointError) as exc:
        print(f"pqfronts: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(result, ns.format, ns.out)
    if result.code:
        err = result.record.get("error")
        if err:
            print(f"pqfronts: {err}", file=sys.stderr)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
