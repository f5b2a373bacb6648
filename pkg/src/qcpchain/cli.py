"""Command-line driver: subcommands spectrum | sweep | fit | corr |
entropy | hermitian | oracle.

Configuration comes from an optional flat key=value file (--config) with
every key overridable by the matching CLI flag; flags win.  Exit codes:
0 success, 2 config error, 3 solver failure, 4 fit failure.
"""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .criticality import (FitError, extrapolate_gc, fit_beta, fit_gamma,
                          fit_nu, fit_xi)
from .csvio import (CORR_COLUMNS, ENTROPY_COLUMNS, SPECTRUM_COLUMNS,
                    SWEEP_COLUMNS, CsvFormatError, read_csv, write_csv)
from .eigensolver import DENSE_CEILING, SolverError, eig_full
from .models import ModelParams, build_heff
from .oracle import run_checks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_FIT = 4

OBSERVABLE_NAMES = ("mx", "my", "mz", "nup", "chi", "gap", "svn")


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def load_config_file(path):
    """Parse a flat key=value config file ('#' starts a comment)."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{ln}: expected key=value, got "
                                  f"{raw.strip()!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _resolve(args, filecfg, key, cast, default=None, required=False):
    """Flag value if given, else config-file value, else default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in filecfg:
        try:
            return cast(filecfg[key])
        except ValueError as exc:
            raise ConfigError(f"config key {key}: {exc}") from exc
    if required and default is None:
        raise ConfigError(f"missing required option: {key}")
    return default


def _gamma_grid(cfg):
    if cfg.get("gamma_min") is None or cfg.get("gamma_max") is None:
        return None
    if cfg["steps"] is None:
        raise ConfigError("grid needs steps when gamma_min/gamma_max given")
    if cfg["steps"] < 2:
        raise ConfigError("steps must be >= 2")
    if not cfg["gamma_min"] < cfg["gamma_max"]:
        raise ConfigError("gamma_min must be < gamma_max")
    return np.linspace(cfg["gamma_min"], cfg["gamma_max"], cfg["steps"])


def _comment_cfg(cfg):
    """Config entries recorded in the output header: everything that
    determines the data, excluding execution details (destination path,
    worker count)."""
    return {k: v for k, v in cfg.items()
            if v is not None and k not in ("out", "workers")}


def _parse_observables(text):
    if text is None:
        return set(OBSERVABLE_NAMES)
    names = {t.strip() for t in text.split(",") if t.strip()}
    bad = names - set(OBSERVABLE_NAMES)
    if bad:
        raise ConfigError(f"unknown observables: {sorted(bad)}; "
                          f"valid: {OBSERVABLE_NAMES}")
    return names


def _spectrum_worker(job):
    L, omega, gamma_re, gamma_im, boundary = job
    params = ModelParams(L=L, omega=omega,
                         gamma=complex(gamma_re, gamma_im),
                         boundary=boundary)
    spec = eig_full(build_heff(params))
    return [(float(e.real), float(e.imag)) for e in spec.values]


def cmd_spectrum(args, filecfg):
    cfg = {
        "L": _resolve(args, filecfg, "L", int, required=True),
        "omega": _resolve(args, filecfg, "omega", float, 1.0),
        "gamma_re": _resolve(args, filecfg, "gamma_re", float, 0.0),
        "gamma_im": _resolve(args, filecfg, "gamma_im", float),
        "gamma_min": _resolve(args, filecfg, "gamma_min", float),
        "gamma_max": _resolve(args, filecfg, "gamma_max", float),
        "steps": _resolve(args, filecfg, "steps", int),
        "boundary": _resolve(args, filecfg, "boundary", str, "periodic"),
        "workers": _resolve(args, filecfg, "workers", int, 1),
        "out": _resolve(args, filecfg, "out", str, "-"),
    }
    grid = _gamma_grid(cfg)
    if grid is None:
        if cfg["gamma_im"] is None:
            raise ConfigError("spectrum needs gamma_im or a "
                              "gamma_min/gamma_max/steps grid")
        grid = np.array([cfg["gamma_im"]])
    if 2 ** cfg["L"] > DENSE_CEILING:
        raise SolverError(f"dense spectrum at L={cfg['L']} exceeds the "
                          f"dense ceiling {DENSE_CEILING}")
    jobs = [(cfg["L"], cfg["omega"], cfg["gamma_re"], g, cfg["boundary"])
            for g in grid]
    if cfg["workers"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            results = list(pool.map(_spectrum_worker, jobs))
    else:
        results = [_spectrum_worker(j) for j in jobs]
    rows = []
    for g, values in zip(grid, results):
        for e_re, e_im in values:
            rows.append({"L": cfg["L"], "omega": cfg["omega"],
                         "gamma_re": cfg["gamma_re"], "gamma_im": float(g),
                         "e_re": e_re, "e_im": e_im})
    text = write_csv(cfg["out"], SPECTRUM_COLUMNS, rows,
                     _comment_cfg(cfg),
                     __version__)
    if cfg["out"] == "-":
        sys.stdout.write(text)
    return EXIT_OK


def _run_sweep(args, filecfg, axis):
    from .observables import sweep_observables

    cfg = {
        "L": _resolve(args, filecfg, "L", int, required=True),
        "omega": _resolve(args, filecfg, "omega", float, 1.0),
        "gamma_re": _resolve(args, filecfg, "gamma_re", float, 0.0),
        "gamma_im": _resolve(args, filecfg, "gamma_im", float, 0.0),
        "gamma_min": _resolve(args, filecfg, "gamma_min", float,
                              required=True),
        "gamma_max": _resolve(args, filecfg, "gamma_max", float,
                              required=True),
        "steps": _resolve(args, filecfg, "steps", int, required=True),
        "boundary": _resolve(args, filecfg, "boundary", str, "periodic"),
        "dh": _resolve(args, filecfg, "dh", float, 1e-5),
        "solver": _resolve(args, filecfg, "solver", str, "auto"),
        "observables": _resolve(args, filecfg, "observables", str),
        "out": _resolve(args, filecfg, "out", str, "-"),
        "axis": axis,
    }
    grid = _gamma_grid(cfg)
    wanted = _parse_observables(cfg["observables"])
    fixed = cfg["gamma_im"] if axis == "re" else cfg["gamma_re"]
    params = ModelParams(
        L=cfg["L"], omega=cfg["omega"],
        gamma=complex(0.0, fixed) if axis == "re" else complex(fixed, 0.0),
        boundary=cfg["boundary"])
    rows = sweep_observables(params, grid, axis=axis, dh=cfg["dh"],
                             solver=cfg["solver"],
                             with_chi="chi" in wanted,
                             with_entropy="svn" in wanted)
    drop = {"svn": "svn_half"}
    for row in rows:
        for name in OBSERVABLE_NAMES:
            if name not in wanted:
                row[drop.get(name, name)] = None
    text = write_csv(cfg["out"], SWEEP_COLUMNS, rows,
                     _comment_cfg(cfg),
                     __version__)
    if cfg["out"] == "-":
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args, filecfg):
    return _run_sweep(args, filecfg, axis="im")


def cmd_hermitian(args, filecfg):
    return _run_sweep(args, filecfg, axis="re")


def cmd_corr(args, filecfg):
    from .groundstate import sweep
    from .observables import correlation_profile

    cfg = {
        "L": _resolve(args, filecfg, "L", int, required=True),
        "omega": _resolve(args, filecfg, "omega", float, 1.0),
        "gammas": _resolve(args, filecfg, "gammas", str, required=True),
        "boundary": _resolve(args, filecfg, "boundary", str, "open"),
        "solver": _resolve(args, filecfg, "solver", str, "auto"),
        "track_from": _resolve(args, filecfg, "track_from", float),
        "track_step": _resolve(args, filecfg, "track_step", float, 0.05),
        "with_xi": bool(getattr(args, "with_xi", False)),
        "window_lo": _resolve(args, filecfg, "window_lo", float),
        "window_hi": _resolve(args, filecfg, "window_hi", float),
        "out": _resolve(args, filecfg, "out", str, "-"),
    }
    xi_window = None
    if cfg["window_lo"] is not None and cfg["window_hi"] is not None:
        xi_window = (cfg["window_lo"], cfg["window_hi"])
    try:
        targets = sorted(float(t) for t in cfg["gammas"].split(","))
    except ValueError as exc:
        raise ConfigError(f"bad gammas list: {exc}") from exc
    if not targets:
        raise ConfigError("gammas must name at least one value")
    start = cfg["track_from"]
    if start is None:
        start = targets[0]
    ladder = np.arange(start, targets[-1], cfg["track_step"])
    grid = np.unique(np.concatenate([ladder, np.asarray(targets)]))
    params = ModelParams(L=cfg["L"], omega=cfg["omega"],
                         boundary=cfg["boundary"])
    trace = sweep(params, grid, axis="im", solver=cfg["solver"])
    want = set()
    for t in targets:
        want.add(int(np.argmin(np.abs(grid - t))))
    columns = list(CORR_COLUMNS) + (["xi"] if cfg["with_xi"] else [])
    rows = []
    for idx in sorted(want):
        rec = trace.records[idx]
        ns, values = correlation_profile(rec.state, cfg["L"])
        xi = None
        if cfg["with_xi"]:
            try:
                xi = fit_xi(ns, values, window=xi_window).value
            except ValueError as exc:
                raise FitError(str(exc)) from exc
        for n, v in zip(ns, values):
            row = {"L": cfg["L"], "gamma": rec.gamma.imag, "n": int(n),
                   "value": float(v)}
            if cfg["with_xi"]:
                row["xi"] = xi
            rows.append(row)
    text = write_csv(cfg["out"], columns, rows,
                     _comment_cfg(cfg),
                     __version__)
    if cfg["out"] == "-":
        sys.stdout.write(text)
    return EXIT_OK


def cmd_entropy(args, filecfg):
    from .groundstate import sweep as run_sweep
    from .observables import entanglement_entropy

    cfg = {
        "L": _resolve(args, filecfg, "L", int, required=True),
        "omega": _resolve(args, filecfg, "omega", float, 1.0),
        "gamma_re": _resolve(args, filecfg, "gamma_re", float, 0.0),
        "gamma_min": _resolve(args, filecfg, "gamma_min", float,
                              required=True),
        "gamma_max": _resolve(args, filecfg, "gamma_max", float,
                              required=True),
        "steps": _resolve(args, filecfg, "steps", int, required=True),
        "boundary": _resolve(args, filecfg, "boundary", str, "periodic"),
        "solver": _resolve(args, filecfg, "solver", str, "auto"),
        "cut": _resolve(args, filecfg, "cut", str),
        "kind": _resolve(args, filecfg, "kind", str, "biorthogonal"),
        "out": _resolve(args, filecfg, "out", str, "-"),
    }
    from .observables import ENTROPY_KINDS
    if cfg["kind"] not in ENTROPY_KINDS:
        raise ConfigError(f"kind must be one of {ENTROPY_KINDS}")
    grid = _gamma_grid(cfg)
    L = cfg["L"]
    if cfg["cut"] in (None, "half"):
        cuts = [L // 2]
    elif cfg["cut"] == "all":
        cuts = list(range(1, L))
    else:
        try:
            cuts = [int(cfg["cut"])]
        except ValueError as exc:
            raise ConfigError(f"bad cut: {cfg['cut']!r}") from exc
    params = ModelParams(L=L, omega=cfg["omega"],
                         gamma=complex(cfg["gamma_re"], 0.0),
                         boundary=cfg["boundary"])
    rows = []

    def on_point(rec, values, vectors):
        for cut in cuts:
            rows.append({"L": L, "omega": cfg["omega"],
                         "gamma_re": rec.gamma.real,
                         "gamma_im": rec.gamma.imag, "cut": cut,
                         "svn": entanglement_entropy(rec.state, L, cut,
                                                     kind=cfg["kind"])})

    run_sweep(params, grid, axis="im", solver=cfg["solver"],
              on_point=on_point)
    text = write_csv(cfg["out"], ENTROPY_COLUMNS, rows,
                     _comment_cfg(cfg),
                     __version__)
    if cfg["out"] == "-":
        sys.stdout.write(text)
    return EXIT_OK


def _rows_floats(rows, names, path):
    out = []
    for idx, row in enumerate(rows):
        try:
            out.append(tuple(float(row[n]) for n in names))
        except KeyError as exc:
            raise CsvFormatError(path, idx + 3, f"missing column {exc}")
        except ValueError:
            continue  # empty or non-numeric cell: row not part of series
    return out


def cmd_fit(args, filecfg):
    cfg = {
        "kind": args.kind,
        "input": _resolve(args, filecfg, "input", str, required=True),
        "gamma_c": _resolve(args, filecfg, "gamma_c", float),
        "window_lo": _resolve(args, filecfg, "window_lo", float),
        "window_hi": _resolve(args, filecfg, "window_hi", float),
        "gamma": _resolve(args, filecfg, "gamma", float),
        "out": _resolve(args, filecfg, "out", str),
    }
    _, columns, rows = read_csv(cfg["input"])
    window = None
    if cfg["window_lo"] is not None and cfg["window_hi"] is not None:
        window = (cfg["window_lo"], cfg["window_hi"])
    kind = cfg["kind"]
    if kind in ("beta", "gamma"):
        if cfg["gamma_c"] is None:
            raise ConfigError(f"fit {kind} needs gamma_c")
        col = "mx" if kind == "beta" else "chi"
        series = _rows_floats(rows, ("gamma_im", col), cfg["input"])
        gc = cfg["gamma_c"]
        if kind == "beta":
            series = [(g, v) for g, v in series if g < gc]
            result = fit_beta(series, gc, **({"window": window} if window
                                             else {}))
        else:
            series = [(g, v) for g, v in series
                      if g > gc and np.isfinite(v)]
            result = fit_gamma(series, gc, **({"window": window} if window
                                              else {}))
    elif kind == "xi":
        data = _rows_floats(rows, ("gamma", "n", "value"), cfg["input"])
        gammas = sorted({g for g, _, _ in data})
        if cfg["gamma"] is not None:
            gammas = [min(gammas, key=lambda g: abs(g - cfg["gamma"]))]
        elif len(gammas) > 1:
            raise ConfigError("input holds several gammas; pass --gamma")
        sel = [(n, v) for g, n, v in data if g == gammas[0]]
        ns = np.array([n for n, _ in sel])
        vals = np.array([v for _, v in sel])
        result = fit_xi(ns, vals, window=window)
    elif kind == "nu":
        if cfg["gamma_c"] is None:
            raise ConfigError("fit nu needs gamma_c")
        if "xi" not in columns:
            raise ConfigError("fit nu needs a corr CSV with the xi column")
        data = _rows_floats(rows, ("gamma", "xi"), cfg["input"])
        pairs = sorted(set(data))
        result = fit_nu(pairs, cfg["gamma_c"], window=window)
    elif kind == "extrapolate":
        pairs = _rows_floats(rows, ("L", "gamma_c"), cfg["input"])
        result = extrapolate_gc(pairs)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown fit kind {kind!r}")

    payload = {
        "kind": result.kind, "value": result.value,
        "amplitude": result.amplitude, "window": list(result.window),
        "normr": result.normr, "points_used": result.points_used,
        "low_confidence": result.low_confidence, "meta": result.meta,
        "version": __version__,
    }
    line = (f"{result.kind},{result.value:.17e},{result.amplitude:.17e},"
            f"{result.window[0]:.17e},{result.window[1]:.17e},"
            f"{result.normr:.17e},{result.points_used}")
    sys.stdout.write(line + "\n")
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_oracle(args, filecfg):
    scale = _resolve(args, filecfg, "tolerance", float, 1.0)
    rows = run_checks()
    failed = False
    for r in rows:
        ok = r["max_err"] < r["tol"] * scale
        failed |= not ok
        sys.stdout.write(f"{'ok  ' if ok else 'FAIL'} {r['name']}: "
                         f"max_err={r['max_err']:.3e} "
                         f"tol={r['tol'] * scale:g}\n")
    sys.stdout.write("oracle: " + ("all checks passed\n" if not failed
                                   else "MISMATCH\n"))
    return EXIT_OK if not failed else EXIT_SOLVER


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qcpchain",
        description="Dissipative contact-process chain toolkit")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=True):
        p.add_argument("--config", default=None)
        p.add_argument("--L", type=int, default=None)
        p.add_argument("--omega", type=float, default=None)
        p.add_argument("--boundary", choices=("periodic", "open"),
                       default=None)
        p.add_argument("--out", default=None)
        if grid:
            p.add_argument("--gamma-re", dest="gamma_re", type=float,
                           default=None)
            p.add_argument("--gamma-im", dest="gamma_im", type=float,
                           default=None)
            p.add_argument("--gamma-min", dest="gamma_min", type=float,
                           default=None)
            p.add_argument("--gamma-max", dest="gamma_max", type=float,
                           default=None)
            p.add_argument("--steps", type=int, default=None)

    p = sub.add_parser("spectrum", help="full eigenvalue clouds (dense)")
    common(p)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="tracked ground-state decay sweep")
    common(p)
    p.add_argument("--dh", type=float, default=None)
    p.add_argument("--solver", choices=("dense", "targeted", "auto"),
                   default=None)
    p.add_argument("--observables", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("hermitian", help="real-Gamma counterpart sweep")
    common(p)
    p.add_argument("--dh", type=float, default=None)
    p.add_argument("--solver", choices=("dense", "targeted", "auto"),
                   default=None)
    p.add_argument("--observables", default=None)
    p.set_defaults(func=cmd_hermitian)

    p = sub.add_parser("corr", help="connected x-x correlation profiles")
    common(p, grid=False)
    p.add_argument("--gammas", default=None,
                   help="comma-separated decay strengths")
    p.add_argument("--solver", choices=("dense", "targeted", "auto"),
                   default=None)
    p.add_argument("--track-from", dest="track_from", type=float,
                   default=None)
    p.add_argument("--track-step", dest="track_step", type=float,
                   default=None)
    p.add_argument("--with-xi", dest="with_xi", action="store_true")
    p.add_argument("--window-lo", dest="window_lo", type=float,
                   default=None)
    p.add_argument("--window-hi", dest="window_hi", type=float,
                   default=None)
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("entropy", help="bipartite entanglement entropy")
    common(p)
    p.add_argument("--solver", choices=("dense", "targeted", "auto"),
                   default=None)
    p.add_argument("--cut", default=None, help="half | all | integer")
    p.add_argument("--kind", choices=("biorthogonal", "right"),
                   default=None)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("fit", help="power-law fits and extrapolation")
    p.add_argument("kind", choices=("beta", "gamma", "xi", "nu",
                                    "extrapolate"))
    p.add_argument("--config", default=None)
    p.add_argument("--input", default=None)
    p.add_argument("--gamma-c", dest="gamma_c", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--window-lo", dest="window_lo", type=float,
                   default=None)
    p.add_argument("--window-hi", dest="window_hi", type=float,
                   default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("oracle", help="two-site closed-form self-test")
    p.add_argument("--config", default=None)
    p.add_argument("--check", action="store_true", default=True)
    p.add_argument("--tolerance", type=float, default=None,
                   help="multiplier loosening the check thresholds")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        filecfg = load_config_file(args.config) if args.config else {}
        return args.func(args, filecfg)
    except (ConfigError, OSError) as exc:
        if isinstance(exc, OSError) and getattr(args, "command", "") == \
                "fit":
            print(f"qcpchain: {exc}", file=sys.stderr)
            return EXIT_FIT
        print(f"qcpchain: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"qcpchain: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (FitError, CsvFormatError) as exc:
        print(f"qcpchain: fit failure: {exc}", file=sys.stderr)
        return EXIT_FIT
    except ValueError as exc:
        code = EXIT_FIT if getattr(args, "command", "") == "fit" \
            else EXIT_CONFIG
        print(f"qcpchain: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
