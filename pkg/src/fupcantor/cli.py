"""Command line front end.

Subcommands
-----------

``beta``            restriction-norm and exponent table for one alphabet
``sweep``           exponent statistics over alphabet spaces
``concentration``   empirical tails of a statistic versus the proven bound
``goodset``         complement measure of the good set of alphabets
``oqm``             open quantum map norms, radii, and candidate gaps
``verify``          run the built-in invariant checks

Option precedence is flags over the ``--config`` JSON file over
defaults.  Every report starts with two comment lines recording the
generation timestamp and the resolved configuration, so a stored CSV
is reproducible from its own header.  Exit codes: 0 success, 1 invalid
input, 2 resource cap exceeded, 3 invariant violation or failed
verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

from . import alphabets as alph
from . import experiments, oqm, spectral
from .cantor import Alphabet, alphabet_to_string, parse_alphabet
from .errors import CapExceeded, InvariantViolation, ValidationError


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors surface as validation errors."""

    def error(self, message):
        raise ValidationError(message)


@dataclass
class RunConfig:
    """Resolved options shared by every subcommand."""

    seed: int = 0
    threads: int = 1
    tol: float = 1e-10
    fmt: str = "csv"
    output: str | None = None
    n_cap: int = 2 ** 40
    n_cap_explicit: bool = False
    tol_explicit: bool = False
    enum_cap: int = 10 ** 7

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "threads": self.threads,
            "tol": self.tol,
            "format": self.fmt,
            "output": self.output,
            "n_cap": self.n_cap,
            "enum_cap": self.enum_cap,
        }


_CONFIG_KEYS = {"seed", "threads", "tol", "format", "output", "n_cap", "enum_cap"}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValidationError(
            f"unknown config keys: {', '.join(sorted(unknown))}"
        )
    return data


def _resolve_config(args) -> RunConfig:
    # The shared options use SUPPRESS defaults (see build_parser), so an
    # option the user never typed is simply absent from the namespace.
    flag = lambda name: getattr(args, name, None)
    file_cfg = _load_config(flag("config"))
    cfg = RunConfig()

    def pick(value, key, default):
        if value is not None:
            return value
        if key in file_cfg:
            return file_cfg[key]
        return default

    cfg.seed = int(pick(flag("seed"), "seed", cfg.seed))
    threads = flag("threads")
    if threads is None and "threads" not in file_cfg:
        env = os.environ.get("FUP_THREADS")
        if env is not None:
            try:
                threads = int(env)
            except ValueError:
                raise ValidationError(
                    f"FUP_THREADS must be an integer, got {env!r}"
                )
    cfg.threads = int(pick(threads, "threads", cfg.threads))
    if cfg.threads < 1:
        raise ValidationError("thread count must be at least 1")
    cfg.tol_explicit = flag("tol") is not None or "tol" in file_cfg
    cfg.tol = float(pick(flag("tol"), "tol", cfg.tol))
    if not cfg.tol > 0:
        raise ValidationError("tolerance must be positive")
    cfg.fmt = str(pick(flag("format"), "format", cfg.fmt))
    if cfg.fmt not in ("csv", "json"):
        raise ValidationError(f"format must be csv or json, got {cfg.fmt!r}")
    cfg.output = pick(flag("output"), "output", None)
    cfg.n_cap_explicit = flag("n_cap") is not None or "n_cap" in file_cfg
    cfg.n_cap = int(pick(flag("n_cap"), "n_cap", cfg.n_cap))
    cfg.enum_cap = int(pick(None, "enum_cap", cfg.enum_cap))
    return cfg


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, complex):
        return f"{value.real!r}{value.imag:+}j"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit(cfg: RunConfig, command: str, columns: list[str], rows: list[list]):
    stamp = datetime.now(timezone.utc).isoformat()
    config_line = json.dumps(
        {"command": command, **cfg.as_dict()}, sort_keys=True
    )
    if cfg.fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# generated: {stamp}\n")
        buf.write(f"# config: {config_line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])
        text = buf.getvalue()
    else:
        doc = {
            "generated": stamp,
            "config": json.loads(config_line),
            "columns": columns,
            "rows": [dict(zip(columns, row)) for row in rows],
        }
        text = json.dumps(doc, indent=2, sort_keys=True, default=_format_cell)
        text += "\n"
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_k_range(text: str) -> list[int]:
    """Accept ``3``, ``2..5``, or ``2,3,5``."""
    text = text.strip()
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        if "," in text:
            return [int(p) for p in text.split(",")]
        return [int(text)]
    except ValueError:
        raise ValidationError(
            f"cannot parse order range {text!r}; use K, K1..K2, or K1,K2,..."
        )


def _trivial_note(a: Alphabet) -> str:
    if a.card_a == a.base_m:
        return "trivial: full alphabet, r_k = 1"
    if a.card_a == 1:
        return "trivial: singleton, r_k = N^(-1/2)"
    return ""


def cmd_beta(args, cfg: RunConfig) -> int:
    a = parse_alphabet(args.alphabet)
    ks = _parse_k_range(args.k)
    if min(ks) < 1:
        raise ValidationError("orders must be at least 1")
    schur = spectral.schur_bound(a)
    note = _trivial_note(a)
    columns = spectral.SPECTRAL_CSV_COLUMNS + [
        "schur_bound",
        "lower_envelope",
        "upper_envelope",
        "note",
    ]
    rows = []
    for k in ks:
        if k == 1:
            rep = spectral.r1_dense(a)
        else:
            rep = spectral.rk_power(
                a, k, tol=cfg.tol, seed=cfg.seed, n_cap=cfg.n_cap
            )
        lower, upper = spectral.envelopes(a, k)
        rows.append(
            spectral.spectral_report_row(rep) + [schur, lower, upper, note]
        )
    _emit(cfg, "beta", columns, rows)
    return 0


def cmd_sweep(args, cfg: RunConfig) -> int:
    mode = "mc" if args.mc is not None else "exact"
    sweep_cap = cfg.n_cap if cfg.n_cap_explicit else experiments.EXPERIMENT_N_CAP
    if not cfg.tol_explicit:
        cfg.tol = experiments.SWEEP_TOL  # echoed in the output header
    if args.figure1:
        if mode == "mc":
            raise ValidationError(
                "--figure1 enumerates every alphabet; drop --mc"
            )
        m_values = _parse_k_range(args.m_range)
        if min(m_values) < 3:
            raise ValidationError("figure-1 sweeps need bases of at least 3")
        points = experiments.figure1_dataset(
            m_values=m_values,
            k_max=args.kmax,
            tol=cfg.tol,
            seed=cfg.seed,
            threads=cfg.threads,
            n_cap=sweep_cap,
        )
    else:
        if args.m is None or args.a is None:
            raise ValidationError(
                "sweep needs --m and --a, or --figure1 with --m-range"
            )
        points = [
            experiments.expectation_experiment(
                args.m,
                args.a,
                k_max=args.kmax,
                mode=mode,
                trials=args.mc,
                tol=cfg.tol,
                seed=cfg.seed,
                threads=cfg.threads,
                n_cap=sweep_cap,
            )
        ]
    rows = [experiments.curve_point_row(p) for p in points]
    _emit(cfg, "sweep", experiments.CURVE_CSV_COLUMNS, rows)
    above = sum(1 for p in points if p.mean_ge_red_line)
    print(
        f"sweep: {len(points)} point(s), {above} above the expectation red line",
        file=sys.stderr,
    )
    return 0


def cmd_concentration(args, cfg: RunConfig) -> int:
    mode = "mc" if args.mc is not None else "exact"
    grid = None
    if args.grid_max is not None or args.grid_points is not None:
        top = args.grid_max if args.grid_max is not None else 2.0 * args.a
        count = args.grid_points if args.grid_points is not None else 50
        if top <= 0 or count < 2:
            raise ValidationError("tail grid needs a positive range")
        import numpy as np

        grid = np.linspace(0.0, top, count)
    report = experiments.concentration_experiment(
        args.m,
        args.a,
        args.freq,
        t_grid=grid,
        mode=mode,
        trials=args.mc,
        seed=cfg.seed,
    )
    rows = alph.tail_report_rows(report)
    _emit(cfg, "concentration", alph.TAIL_CSV_COLUMNS, rows)
    return 0


def cmd_goodset(args, cfg: RunConfig) -> int:
    mode = "mc" if args.mc is not None else "exact"
    rep = alph.good_set_complement_measure(
        args.m,
        args.a,
        args.L,
        mode=mode,
        samples=args.mc,
        seed=cfg.seed,
        cap=cfg.enum_cap,
    )
    columns = [
        "m",
        "a",
        "big_l",
        "complement_measure",
        "bound_chained",
        "bound_per_freq",
        "mode",
        "samples",
        "seed",
    ]
    rows = [[
        args.m,
        args.a,
        rep.big_l,
        rep.complement_measure,
        rep.bound_chained,
        rep.bound_per_freq,
        rep.mode,
        rep.samples,
        cfg.seed,
    ]]
    _emit(cfg, "goodset", columns, rows)
    return 0


def cmd_oqm(args, cfg: RunConfig) -> int:
    a = parse_alphabet(args.alphabet)
    ks = _parse_k_range(args.k)
    if min(ks) < 2:
        raise ValidationError("open quantum maps need order at least 2")
    rows = oqm.gap_report(a, ks, epsilon=args.epsilon, seed=cfg.seed)
    _emit(cfg, "oqm", oqm.GAP_CSV_COLUMNS, [oqm.gap_row_values(r) for r in rows])
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    from .verify import run_checks

    results = run_checks(quick=args.quick)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<{width}}  {r.detail}  [{r.seconds:.2f}s]")
        failed += 0 if r.passed else 1
    total = len(results)
    print(f"{total - failed}/{total} checks passed")
    if failed:
        raise InvariantViolation(f"{failed} verification check(s) failed")
    return 0


def build_parser() -> _Parser:
    # Shared options ride on the main parser and every subparser so both
    # "fupcantor --seed 7 sweep ..." and "fupcantor sweep ... --seed 7"
    # work.  Defaults are SUPPRESS because a subparser re-parses into a
    # fresh namespace and would otherwise overwrite values the main
    # parser already set; _resolve_config reads them with getattr.
    sup = argparse.SUPPRESS
    common = _Parser(add_help=False)
    common.add_argument(
        "--config", default=sup, help="JSON file with default options"
    )
    common.add_argument(
        "--seed", type=int, default=sup, help="master random seed"
    )
    common.add_argument(
        "--threads",
        type=int,
        default=sup,
        help="worker processes (or FUP_THREADS)",
    )
    common.add_argument(
        "--tol", type=float, default=sup, help="iteration tolerance"
    )
    common.add_argument(
        "--format", choices=("csv", "json"), default=sup, help="output format"
    )
    common.add_argument(
        "--output", default=sup, help="write the report to this path"
    )
    common.add_argument(
        "--n-cap",
        type=int,
        dest="n_cap",
        default=sup,
        help="largest admissible N = M^k",
    )

    parser = _Parser(
        prog="fupcantor",
        description="Fourier restriction norms on discrete Cantor sets",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_beta = sub.add_parser(
        "beta",
        help="restriction norms and exponents for one alphabet",
        parents=[common],
    )
    p_beta.add_argument("alphabet", help='alphabet such as "3:0,2"')
    p_beta.add_argument(
        "--k", default="1..3", help="orders: K, K1..K2, or a comma list"
    )
    p_beta.set_defaults(func=cmd_beta)

    p_sweep = sub.add_parser(
        "sweep",
        help="exponent statistics over an alphabet space",
        parents=[common],
    )
    p_sweep.add_argument("--m", type=int, help="base")
    p_sweep.add_argument("--a", type=int, help="alphabet cardinality")
    p_sweep.add_argument(
        "--kmax", type=int, default=4, help="largest order in each maximum"
    )
    p_sweep.add_argument(
        "--mc",
        type=int,
        default=None,
        metavar="TRIALS",
        help="Monte Carlo with this many samples instead of enumeration",
    )
    p_sweep.add_argument(
        "--figure1",
        action="store_true",
        help="sweep every cardinality over a range of bases",
    )
    p_sweep.add_argument(
        "--m-range", default="3..10", help="bases for --figure1"
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_conc = sub.add_parser(
        "concentration",
        help="tail probabilities versus the proven bound",
        parents=[common],
    )
    p_conc.add_argument("--m", type=int, required=True, help="base")
    p_conc.add_argument(
        "--a", type=int, required=True, help="alphabet cardinality"
    )
    p_conc.add_argument(
        "--freq", type=int, required=True, help="frequency of the trace sum"
    )
    p_conc.add_argument(
        "--grid-max", type=float, default=None, help="largest threshold"
    )
    p_conc.add_argument(
        "--grid-points", type=int, default=None, help="thresholds in the grid"
    )
    p_conc.add_argument(
        "--mc", type=int, default=None, metavar="TRIALS",
        help="Monte Carlo with this many samples instead of enumeration",
    )
    p_conc.set_defaults(func=cmd_concentration)

    p_good = sub.add_parser(
        "goodset",
        help="complement measure of the good set",
        parents=[common],
    )
    p_good.add_argument("--m", type=int, required=True, help="base")
    p_good.add_argument(
        "--a", type=int, required=True, help="alphabet cardinality"
    )
    p_good.add_argument(
        "--L", type=float, required=True, help="good-set threshold"
    )
    p_good.add_argument(
        "--mc", type=int, default=None, metavar="TRIALS",
        help="Monte Carlo with this many samples instead of enumeration",
    )
    p_good.set_defaults(func=cmd_goodset)

    p_oqm = sub.add_parser(
        "oqm",
        help="open quantum map norms and spectral radii",
        parents=[common],
    )
    p_oqm.add_argument("alphabet", help='alphabet such as "3:0,2"')
    p_oqm.add_argument(
        "--k", default="2..4", help="orders: K, K1..K2, or a comma list"
    )
    p_oqm.add_argument(
        "--epsilon", type=float, default=0.1, help="exponent margin"
    )
    p_oqm.set_defaults(func=cmd_oqm)

    p_verify = sub.add_parser("verify", help="run the invariant checks", parents=[common])
    p_verify.add_argument(
        "--quick", action="store_true", help="smaller parameter grids"
    )
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve_config(args)
        return args.func(args, cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
