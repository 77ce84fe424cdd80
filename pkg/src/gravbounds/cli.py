"""Command-line sweeps: ``gravbounds <command> [options]``.

Options may also come from a ``--config`` file of ``key = value`` lines
(``#`` starts a comment); flags given on the command line win.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

from . import __version__
from .bouncer import BouncerQfi, impact_time, stationary_qfi_numeric
from .errors import GravBoundsError, NumericError
from .fisher import f_loc_closed, fisher_freefall, fisher_position
from .freefall import PhysParams
from .multiparam import (analytic_matrices, log_r_quantumness, r_quantumness, scalar_bound,
                         t_quantumness, WeightSpec, _rescaled)
from .qfi import (freefall_qfi_numeric, h_loc_closed, h_stationary, h_sup_closed,
                  superposition_qfi_numeric)
from .numerics import airy_zeros
from .states import GaussianSpec, SuperpositionSpec, WaveGrid

COMMANDS = ("qfi-sweep", "bouncer-compare", "fisher-ratios", "stationary", "multiparam", "validate")


def _float_list(text):
    try:
        values = tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _format(text):
    if text not in ("csv", "json"):
        raise argparse.ArgumentTypeError(f"format must be csv or json, got {text!r}")
    return text


# key -> (converter, help)
KEYS = {
    "m": (float, "probe mass"),
    "g": (float, "gravitational acceleration"),
    "sigma": (_float_list, "packet width(s), comma separated"),
    "a": (float, "half separation of the two packets"),
    "p0": (float, "momentum kick of the two packets"),
    "h": (float, "drop height above the floor"),
    "t": (float, "evolution time"),
    "t_min": (float, "first time of a sweep"),
    "t_max": (float, "last time of a sweep"),
    "steps": (int, "number of sweep intervals"),
    "t_values": (_float_list, "times, comma separated"),
    "w": (_float_list, "weights w of Diag(1, w), comma separated"),
    "a_max": (float, "largest half separation"),
    "a_steps": (int, "number of separations"),
    "n_modes": (int, "bouncer eigenmodes"),
    "n_max": (int, "highest eigenstate index"),
    "n_points": (int, "grid points"),
    "rel_step": (float, "relative finite-difference step for g"),
    "output": (str, "output path, - for stdout"),
    "format": (_format, "csv or json"),
}

COMMON = {"output": "-", "format": "csv", "n_points": 4097, "rel_step": 1e-4}
DEFAULTS = {
    "qfi-sweep": {"m": 0.5, "g": 1.0, "sigma": (0.5,), "a": 1.0, "p0": 0.0,
                  "t_min": 0.0, "t_max": 2.0, "steps": 20},
    "bouncer-compare": {"m": 2 ** -0.5, "g": 1.0, "sigma": (1.0,), "a": 0.0, "p0": 0.0,
                        "h": 20.0, "steps": 40, "n_modes": 120},
    "fisher-ratios": {"m": 0.5, "g": 1.0, "t": 1.0, "sigma": (0.2, 0.25, 0.3, 0.35, 0.4, 0.5),
                      "p0": 0.0, "a_max": 2.0, "a_steps": 20},
    "stationary": {"m": 0.5, "g": 1.0, "t": 0.0, "n_max": 3},
    "multiparam": {"m": 9.31, "g": 2.15e-32, "sigma": (5.1e-6,), "t_values": (1.0, 1e10, 1e20),
                   "w": (1e-6, 1.0, 1e6)},
    "validate": {},
}
USED = {cmd: set(d) | set(COMMON) for cmd, d in DEFAULTS.items()}
USED["bouncer-compare"] |= {"t_max"}

COLUMNS = {
    "qfi-sweep": ("t", "H_loc_closed", "H_loc_numeric", "H_sup_closed", "H_sup_numeric"),
    "bouncer-compare": ("t", "t_over_impact", "H_bouncer", "H_nofloor", "rel_deviation"),
    "fisher-ratios": ("sigma", "a", "gamma_S", "gamma_H", "F_sup", "F_loc", "H_sup"),
    "stationary": ("n", "z_n", "H_closed", "H_numeric", "F_position"),
    "multiparam": ("t", "w", "H_gg", "H_gm", "H_mm", "D_gm", "R", "log10_R", "T", "C_S",
                   "nuisance_penalty"),
    "validate": ("check", "passed", "value", "threshold"),
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    m: float = None
    g: float = None
    sigma: tuple = None
    a: float = None
    p0: float = None
    h: float = None
    t: float = None
    t_min: float = None
    t_max: float = None
    steps: int = None
    t_values: tuple = None
    w: tuple = None
    a_max: float = None
    a_steps: int = None
    n_modes: int = None
    n_max: int = None
    n_points: int = None
    rel_step: float = None
    output: str = None
    format: str = None

    def echo(self):
        """Settings that matter for ``command``, for the JSON meta block."""
        d = asdict(self)
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()
                if k == "command" or (k in USED[self.command] and k not in ("output",))}


def read_config_file(path):
    """Parse ``key = value`` lines into a dict of converted values."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    out = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}; valid keys: {', '.join(KEYS)}")
        try:
            out[key] = KEYS[key][0](value)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}")
    return out


def build_parser():
    parser = argparse.ArgumentParser(prog="gravbounds",
                                     description="Precision bounds for quantum gravimetry probes.")
    parser.add_argument("--version", action="version", version=f"gravbounds {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", help="file of key = value lines")
        for key in sorted(USED[cmd]):
            conv, help_text = KEYS[key]
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=conv, default=None,
                            help=help_text)
    return parser


def _validate(cfg):
    def need(cond, msg):
        if not cond:
            raise UsageError(msg)

    cmd = cfg.command
    if cfg.m is not None:
        need(cfg.m > 0, "m must be positive")
    if cfg.g is not None:
        need(cfg.g >= 0 if cmd == "qfi-sweep" else cfg.g > 0, "g must be positive")
    if cfg.sigma is not None:
        need(all(s > 0 for s in cfg.sigma), "sigma must be positive")
        if cmd in ("qfi-sweep", "bouncer-compare", "multiparam"):
            need(len(cfg.sigma) == 1, f"{cmd} takes a single sigma")
    for key in ("a", "h", "t", "t_min"):
        v = getattr(cfg, key)
        if v is not None:
            need(v >= 0, f"{key} must be non-negative")
    for key in ("steps", "a_steps", "n_modes", "n_max"):
        v = getattr(cfg, key)
        if v is not None:
            need(v >= 1, f"{key} must be at least 1")
    if cfg.n_points is not None:
        need(cfg.n_points >= 16, "n_points must be at least 16")
    if cfg.rel_step is not None:
        need(0 < cfg.rel_step < 0.1, "rel_step must lie in (0, 0.1)")
    if cfg.t_max is not None:
        need(cfg.t_max > (cfg.t_min or 0.0), "t_max must exceed t_min")
    if cfg.a_max is not None:
        need(cfg.a_max > 0, "a_max must be positive")
    if cfg.t_values is not None:
        tv = cfg.t_values
        need(all(x > 0 for x in tv) and all(x < y for x, y in zip(tv, tv[1:])),
             "t_values must be positive and increasing")
    if cfg.w is not None:
        need(all(x >= 0 for x in cfg.w), "w must be non-negative")
    if cmd == "bouncer-compare":
        need(cfg.h >= 8 * cfg.sigma[0] + cfg.a, "h must be at least 8 sigma + a")


def parse_config(argv):
    """argv (without the program name) -> resolved RunConfig."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    values = dict(COMMON)
    values.update(DEFAULTS[ns.command])
    if ns.config:
        from_file = read_config_file(ns.config)
        unused = sorted(set(from_file) - USED[ns.command])
        if unused:
            raise UsageError(f"keys not used by {ns.command}: {', '.join(unused)}")
        values.update(from_file)
    for key in USED[ns.command]:
        v = getattr(ns, key, None)
        if v is not None:
            values[key] = v
    cfg = RunConfig(command=ns.command, **values)
    _validate(cfg)
    return cfg


def thread_count(env=None):
    """GRAVBOUNDS_THREADS: unset or 0 means one worker per CPU."""
    env = os.environ if env is None else env
    raw = env.get("GRAVBOUNDS_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"GRAVBOUNDS_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise UsageError("GRAVBOUNDS_THREADS must be non-negative")
    return n or (os.cpu_count() or 1)


def _ordered_map(fn, items, threads):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _grid(lo, hi, steps):
    return [lo + (hi - lo) * k / steps for k in range(steps + 1)]


def rows_qfi_sweep(cfg, threads):
    sigma = cfg.sigma[0]
    loc = GaussianSpec(0.0, 0.0, sigma)

    def row(t):
        p = PhysParams(cfg.m, cfg.g, t)
        return (t, h_loc_closed(cfg.m, sigma, t), freefall_qfi_numeric(loc, p, cfg.n_points, cfg.rel_step),
                h_sup_closed(cfg.m, sigma, t, cfg.a, cfg.p0),
                superposition_qfi_numeric(cfg.m, sigma, t, cfg.a, cfg.p0, cfg.g, cfg.n_points))

    return _ordered_map(row, _grid(cfg.t_min, cfg.t_max, cfg.steps), threads)


def rows_bouncer_compare(cfg, threads):
    sigma = cfg.sigma[0]
    if cfg.a > 0 or cfg.p0 != 0:
        init = SuperpositionSpec(cfg.a, cfg.p0, sigma, cfg.h)
    else:
        init = GaussianSpec(cfg.h, 0.0, sigma)
    model = BouncerQfi(init, cfg.m, cfg.g, cfg.n_modes, cfg.rel_step)
    t_imp = impact_time(init, cfg.g)
    t_end = cfg.t_max if cfg.t_max is not None else 1.2 * t_imp
    times = _grid(0.0, t_end, cfg.steps)[1:]
    model(times[0])  # fills the basis cache before any worker starts

    def row(t):
        hb, hn = model(t), model.nofloor(t)
        return (t, t / t_imp, hb, hn, (hb - hn) / hn)

    return _ordered_map(row, times, threads)


def rows_fisher_ratios(cfg, threads):
    a_values = [cfg.a_max * k / cfg.a_steps for k in range(1, cfg.a_steps + 1)]
    jobs = [(s, a) for s in cfg.sigma for a in a_values]
    p = PhysParams(cfg.m, cfg.g, cfg.t)

    def row(job):
        s, a = job
        spec = SuperpositionSpec(a, cfg.p0, s, 0.0)
        f_sup = fisher_freefall(spec, p, cfg.n_points).value
        f_loc = f_loc_closed(cfg.m, s, cfg.t)
        h_sup = superposition_qfi_numeric(cfg.m, s, cfg.t, a, cfg.p0, cfg.g, cfg.n_points)
        return (s, a, f_sup / f_loc, f_sup / h_sup, f_sup, f_loc, h_sup)

    return _ordered_map(row, jobs, threads)


def rows_stationary(cfg, threads):
    from .bouncer import bouncer_grid, build_basis, eigenstate_family
    zeros = airy_zeros(cfg.n_max)

    def row(n):
        x, dx = bouncer_grid(build_basis(cfg.m, cfg.g, n))
        fam = eigenstate_family(n, cfg.m, cfg.t, x)
        f_pos = fisher_position(lambda gv: WaveGrid(0.0, dx, fam(gv)), cfg.g, cfg.rel_step * cfg.g)
        return (n, zeros[n - 1], h_stationary(n, cfg.g),
                stationary_qfi_numeric(n, cfg.m, cfg.g, cfg.t, cfg.rel_step), f_pos)

    return _ordered_map(row, range(1, cfg.n_max + 1), threads)


def rows_multiparam(cfg, threads):
    sigma = cfg.sigma[0]
    rows = []
    for t in cfg.t_values:
        b = analytic_matrices(cfg.g, cfg.m, sigma, t)
        r = r_quantumness(b.h, b.d)
        log10_r = log_r_quantumness(b.h, b.d) / math.log(10.0)
        q = _rescaled(b.h, b.d)[3]
        for w in cfg.w:
            ws = WeightSpec(w)
            rows.append((t, w, b.h[0, 0], b.h[0, 1], b.h[1, 1], b.d[0, 1], r, log10_r,
                         t_quantumness(b.h, b.d, ws), scalar_bound(b.h, ws), q / (1.0 - q)))
    return rows


def rows_validate(cfg, threads):
    from .validation import run_all
    return [(c.name, "pass" if c.passed else "FAIL", c.value, c.threshold) for c in run_all()]


RUNNERS = {
    "qfi-sweep": rows_qfi_sweep,
    "bouncer-compare": rows_bouncer_compare,
    "fisher-ratios": rows_fisher_ratios,
    "stationary": rows_stationary,
    "multiparam": rows_multiparam,
    "validate": rows_validate,
}


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    v = float(v)
    if not math.isfinite(v):
        raise NumericError(f"non-finite value {v} in output row")
    return "%.16e" % v


def render_csv(command, rows):
    buf = io.StringIO()
    buf.write(f"# gravbounds {__version__} {command}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS[command])
    for r in rows:
        writer.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, str) or (isinstance(v, int) and not isinstance(v, bool)):
        return v
    v = float(v)
    if not math.isfinite(v):
        raise NumericError(f"non-finite value {v} in output row")
    return v


def render_json(cfg, rows):
    cols = COLUMNS[cfg.command]
    doc = {
        "meta": {"version": __version__, "command": cfg.command, "columns": list(cols),
                 "config": cfg.echo()},
        "rows": [{c: _json_value(v) for c, v in zip(cols, r)} for r in rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def compute_rows(cfg, threads=None):
    return RUNNERS[cfg.command](cfg, thread_count() if threads is None else threads)


def render(cfg, threads=None):
    rows = compute_rows(cfg, threads)
    return render_csv(cfg.command, rows) if cfg.format == "csv" else render_json(cfg, rows)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
        text = render(cfg)
    except UsageError as exc:
        print(f"gravbounds: error: {exc}", file=sys.stderr)
        return 2
    except GravBoundsError as exc:
        print(f"gravbounds: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if cfg.output == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(cfg.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"gravbounds: error: cannot write {cfg.output}: {exc}", file=sys.stderr)
            return 2
    if cfg.command == "validate":
        failed = "FAIL" in text
        if cfg.output != "-":
            for line in text.splitlines()[2:]:
                name, status = line.split(",")[:2]
                print(f"{status:4s} {name}")
        return 1 if failed else 0
    return 0
