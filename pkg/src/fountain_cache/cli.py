"""Command-line front end.

Scenario configs are JSON files::

    {
      "n": 100, "k": 10, "q": [2, 4, 16], "M": 10, "alpha": 0.8,
      "gamma": {"1": 0.2907, "2": 0.6591, "3": 0.0430, "4": 0.0072},
      "sweep": {"variable": "M", "values": [0, 10, 20]},
      "sim": {"trials": 100000, "seed": 1}
    }

``k`` and ``q`` may be scalars or lists.  Instead of ``gamma`` a
``geometry`` object ``{"r": 60, "d": 45, "resolution": 2001}`` derives the
connectivity from a square hub grid; giving both is an error.

Exit status: 0 on success, 1 for configuration or usage errors, 2 when the
scenario is infeasible.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass

from . import lrfc, placement, rate, sim
from .gf import SUPPORTED_ORDERS, FieldError
from .popularity import zipf
from .topology import ConnectivityDist, GridGeometry, connectivity_explicit, connectivity_from_grid

SWEEP_VARIABLES = ("M", "alpha", "n", "r")
SWEEP_COLUMNS = ["sweep_var", "value", "scheme", "e_t", "t_hat", "e_delta", "sim_mean", "sim_stderr"]
DEFAULT_QS = (2, 4, 8, 16, 32, 64, 128)

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


def _as_list(v) -> list:
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _int(cfg: dict, key: str, minimum: int = 0) -> int:
    if key not in cfg:
        raise ConfigError(f"missing key {key!r}")
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"{key!r} must be an integer >= {minimum}, got {v!r}")
    return v


@dataclass
class Scenario:
    """Parsed, validated config (before placement)."""

    n: int
    ks: list[int]
    qs: list[int]
    M: int
    alpha: float
    conn: ConnectivityDist
    raw: dict

    @property
    def pop(self):
        return zipf(self.n, self.alpha)


def _connectivity(cfg: dict) -> ConnectivityDist:
    has_gamma, has_geom = "gamma" in cfg, "geometry" in cfg
    if has_gamma == has_geom:
        raise ConfigError("exactly one of 'gamma' and 'geometry' must be given")
    try:
        if has_gamma:
            g = cfg["gamma"]
            pairs = [(int(h), float(p)) for h, p in (g.items() if isinstance(g, dict) else g)]
            return connectivity_explicit(pairs)
        geo = cfg["geometry"]
        return connectivity_from_grid(
            GridGeometry(float(geo["r"]), float(geo["d"]), int(geo.get("resolution", 2001)))
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad connectivity: {exc}") from exc


def parse_config(cfg: dict) -> Scenario:
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    n = _int(cfg, "n", 1)
    M = _int(cfg, "M", 0)
    ks = _as_list(cfg.get("k"))
    qs = _as_list(cfg.get("q"))
    for k in ks:
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise ConfigError(f"'k' must be positive integers, got {cfg.get('k')!r}")
    for q in qs:
        if q not in SUPPORTED_ORDERS:
            raise ConfigError(f"unsupported field order {q!r}; expected one of {SUPPORTED_ORDERS}")
    alpha = cfg.get("alpha")
    if not isinstance(alpha, (int, float)) or isinstance(alpha, bool) or alpha < 0:
        raise ConfigError(f"'alpha' must be a nonnegative number, got {alpha!r}")
    return Scenario(n, ks, qs, M, float(alpha), _connectivity(cfg), cfg)


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# -- commands ----------------------------------------------------------------


def cmd_overhead_table(qs=DEFAULT_QS, k: int = 100, tail_tol: float = lrfc.DEFAULT_TAIL_TOL, digits: int = 4) -> str:
    rows = []
    for q in qs:
        if q not in SUPPORTED_ORDERS:
            raise ConfigError(f"unsupported field order {q}")
        rows.append([q, f"{lrfc.avg_overhead(k, q, tail_tol):.{digits}f}", f"{lrfc.avg_overhead_bound(q):.{digits}f}"])
    return _csv(["q", "e_delta", "delta_u"], rows)


def cmd_connectivity(cfg: dict) -> str:
    conn = _connectivity(cfg)
    rows = [[h, g] for h, g in conn.as_dict().items()]
    return _csv(["h", "gamma"], rows)


def cmd_optimize(cfg: dict) -> str:
    sc = parse_config(cfg)
    rows = []
    for k in sc.ks:
        x = placement.optimize_bound(sc.pop, sc.conn, k, sc.M)
        rows += [[k, j + 1, int(v)] for j, v in enumerate(x.x)]
    return _csv(["k", "file", "x"], rows)


def cmd_rate(cfg: dict) -> str:
    sc = parse_config(cfg)
    pop = sc.pop
    rows = []
    for k in sc.ks:
        x = placement.optimize_bound(pop, sc.conn, k, sc.M)
        for q in sc.qs:
            r = rate.report(x, pop, sc.conn, k, q)
            rows.append([
                q, k, sc.M, r.e_delta, r.e_t_exact, r.e_t_bound, r.e_t_mds,
                r.t_hat_exact, r.t_hat_bound, r.t_hat_mds,
            ])
    header = ["q", "k", "M", "e_delta", "e_t_exact", "e_t_bound", "e_t_mds",
              "t_hat_exact", "t_hat_bound", "t_hat_mds"]
    return _csv(header, rows)


def _sim_settings(cfg: dict, trials: int | None, seed: int | None) -> tuple[int, int]:
    sim_cfg = cfg.get("sim") or {}
    trials = trials if trials is not None else sim_cfg.get("trials")
    seed = seed if seed is not None else sim_cfg.get("seed", 0)
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise ConfigError(f"trials must be a positive integer, got {trials!r}")
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}")
    return trials, seed


def cmd_simulate(cfg: dict, trials: int | None = None, seed: int | None = None, workers: int = 1) -> str:
    sc = parse_config(cfg)
    trials, seed = _sim_settings(cfg, trials, seed)
    pop = sc.pop
    rows = []
    for k in sc.ks:
        x = placement.optimize_bound(pop, sc.conn, k, sc.M)
        for q in sc.qs:
            res = sim.simulate(sim.Scenario(pop, sc.conn, x, q), trials, seed, workers=workers)
            r = rate.report(x, pop, sc.conn, k, q)
            dev = abs(res.mean_t - r.e_t_exact)
            ok = dev <= 3 * res.std_err
            hist = ";".join(f"{t}:{c}" for t, c in res.histogram.items())
            rows.append([
                q, k, sc.M, trials, seed, res.mean_t, res.std_err,
                r.e_t_exact, r.e_t_bound, r.e_t_mds, res.mean_t / k, r.t_hat_exact,
                "PASS" if ok else "FAIL", hist,
            ])
    header = ["q", "k", "M", "trials", "seed", "sim_mean", "sim_stderr", "e_t_exact", "e_t_bound",
              "e_t_mds", "t_hat_sim", "t_hat_exact", "within_3se", "histogram"]
    return _csv(header, rows)


def _sweep_point(cfg: dict, var: str, value) -> dict:
    point = dict(cfg)
    point.pop("sweep", None)
    if var == "r":
        if "geometry" not in cfg:
            raise ConfigError("an r sweep needs a 'geometry' block")
        point["geometry"] = dict(cfg["geometry"], r=value)
    else:
        point[var] = value
    return point


def sweep_rows(cfg: dict, trials: int | None = None, seed: int | None = None) -> list[list]:
    sw = cfg.get("sweep")
    if not isinstance(sw, dict) or sw.get("variable") not in SWEEP_VARIABLES:
        raise ConfigError(f"'sweep.variable' must be one of {SWEEP_VARIABLES}")
    values = sw.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("'sweep.values' must be a nonempty list")
    var = sw["variable"]
    do_sim = "sim" in cfg or trials is not None
    if do_sim:
        trials, seed = _sim_settings(cfg, trials, seed)

    rows = []
    for value in values:
        sc = parse_config(_sweep_point(cfg, var, value))
        pop = sc.pop
        for k in sc.ks:
            x = placement.optimize_bound(pop, sc.conn, k, sc.M)
            mds = rate.expected_backhaul_mds(x, pop, sc.conn, k)
            rows.append([var, value, f"mds_k{k}", mds, mds / k, None, None, None])
            for q in sc.qs:
                r = rate.report(x, pop, sc.conn, k, q)
                sim_mean = sim_se = None
                if do_sim:
                    res = sim.simulate(sim.Scenario(pop, sc.conn, x, q), trials, seed)
                    sim_mean, sim_se = res.mean_t, res.std_err
                name = f"lrfc_q{q}_k{k}"
                rows.append([var, value, name, r.e_t_exact, r.t_hat_exact, r.e_delta, sim_mean, sim_se])
                rows.append([var, value, name + "_bound", r.e_t_bound, r.t_hat_bound, r.e_delta, None, None])
    rows.sort(key=lambda row: (row[1], row[2]))
    return rows


def cmd_sweep(cfg: dict, trials: int | None = None, seed: int | None = None) -> str:
    return _csv(SWEEP_COLUMNS, sweep_rows(cfg, trials, seed))


# -- entry point -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fountain-cache", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_out(sp):
        sp.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
        return sp

    t = with_out(sub.add_parser("overhead-table", help="mean decoding overhead per field order"))
    t.add_argument("--k", type=_positive_int, default=100)
    t.add_argument("--q", default=",".join(map(str, DEFAULT_QS)), help="comma-separated field orders")
    t.add_argument("--tail-tol", type=float, default=lrfc.DEFAULT_TAIL_TOL)
    t.add_argument("--digits", type=_nonneg_int, default=4)

    for name, help_ in [
        ("connectivity", "hub-count distribution"),
        ("optimize", "cache placement minimizing the rate bound"),
        ("rate", "exact, bound and MDS backhaul rates"),
    ]:
        with_out(sub.add_parser(name, help=help_)).add_argument("--config", required=True, metavar="PATH")

    for name, help_ in [("simulate", "Monte-Carlo check of the rate"), ("sweep", "figure sweeps")]:
        sp = with_out(sub.add_parser(name, help=help_))
        sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--seed", type=_nonneg_int)
        sp.add_argument("--trials", type=_positive_int)
        if name == "simulate":
            sp.add_argument("--workers", type=_positive_int, default=1)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "overhead-table":
            try:
                qs = [int(v) for v in args.q.split(",") if v.strip()]
            except ValueError as exc:
                raise ConfigError(f"bad --q list: {args.q!r}") from exc
            out = cmd_overhead_table(qs, args.k, args.tail_tol, args.digits)
        else:
            cfg = load_config(args.config)
            if args.command == "connectivity":
                out = cmd_connectivity(cfg)
            elif args.command == "optimize":
                out = cmd_optimize(cfg)
            elif args.command == "rate":
                out = cmd_rate(cfg)
            elif args.command == "simulate":
                out = cmd_simulate(cfg, args.trials, args.seed, args.workers)
            else:
                out = cmd_sweep(cfg, args.trials, args.seed)
    except placement.InfeasiblePlacement as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, FieldError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
