"""Command line driver: ``finite-blt <subcommand> ...``.

Subcommands
    blt-sweep       alpha, beta, Riesz bounds and the certified lower bound over N
    certify         dyadic jump certificate of a stored generator
    quantitative    tail-bound chain for one (Q, R) or a CSV sweep over a grid
    make-generator  write a generator to JSON
    self-test       quick numerical diagnostics

Exit codes: 0 success, 2 bad configuration or violated precondition,
3 a checked inequality failed (an internal bug).

Sizes accept ``8..128`` (doubling), ``8..32/8`` (step 8) and comma lists.
``--config file.json`` supplies defaults for any flag, keyed by flag name.
The worker count for sweeps comes from FINITE_BLT_WORKERS.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .bridge import gaussian_function, poisson_fourier_check, poisson_zak_check, tv_domination_check
from .errors import PreconditionError, TheoremViolation
from .functionals import sandwich_check
from .generators import (
    DEFAULT_TAU,
    PhaseSpec,
    bcgp_generator,
    gaussian_generator,
    gaussian_zero_misses_grid,
    random_unimodular_generator,
)
from .jumps import LEMMA_COUNTEREXAMPLE, certify, certify_rect, lemma_jump_scan
from .lattice import LatticeParams, Signal, box, fourier_forward, fourier_inverse
from .quantitative import rho_derivative_l1, scaled_rho, verify_quantitative
from .zak import fourier_zak_discrepancy, zak_forward, zak_inverse

__all__ = ["main", "build_parser", "parse_range", "make_generator", "run_blt_sweep", "SWEEP_COLUMNS"]

EXIT_OK, EXIT_CONFIG, EXIT_VIOLATION = 0, 2, 3
FAMILIES = ("bcgp", "gaussian", "random", "box")
SWEEP_COLUMNS = (
    "family",
    "seed",
    "M",
    "N",
    "alpha",
    "beta",
    "A",
    "B",
    "alpha_over_logN",
    "beta_over_logN",
    "certificate",
)
QUANT_COLUMNS = (
    "Q",
    "R",
    "time_tail",
    "freq_tail",
    "lhs",
    "lhs_times_QR",
    "jump_set_size",
    "promised_size",
    "recentered",
)


class ConfigError(ValueError):
    """Invalid flag or config value."""


def parse_range(text) -> list[int]:
    """'8..128' doubles, '8..32/8' steps, '8,16,20' lists; mixtures allowed."""
    if isinstance(text, int):
        return [text]
    if isinstance(text, (list, tuple)):
        return sorted({v for t in text for v in parse_range(t)})
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo_s, hi_s = part.split("..", 1)
                step = None
                if "/" in hi_s:
                    hi_s, step_s = hi_s.split("/", 1)
                    step = int(step_s)
                lo, hi = int(lo_s), int(hi_s)
                if lo < 1 or hi < lo or (step is not None and step < 1):
                    raise ConfigError(f"bad range {part!r}")
                if step is None:
                    v = lo
                    while v <= hi:
                        out.append(v)
                        v *= 2
                else:
                    out.extend(range(lo, hi + 1, step))
            else:
                out.append(int(part))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"cannot parse {part!r} as an integer range") from exc
    if not out:
        raise ConfigError(f"empty range {text!r}")
    if min(out) < 1:
        raise ConfigError(f"sizes must be positive, got {text!r}")
    return sorted(set(out))


def _workers() -> int:
    raw = os.environ.get("FINITE_BLT_WORKERS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"FINITE_BLT_WORKERS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError("FINITE_BLT_WORKERS must be >= 1")
    return n


def make_generator(family: str, N: int, M: int | None = None, tau: float = DEFAULT_TAU,
                   seed: int = 0, variant: str = "piecewise-linear") -> Signal:
    M = N if M is None else M
    if family == "bcgp":
        return bcgp_generator(N, PhaseSpec.named(variant), M=M)
    if family == "gaussian":
        if not gaussian_zero_misses_grid(N, tau, M):
            raise PreconditionError(f"the Zak zero of the Gaussian (tau={tau}) sits on the ({M}, {N}) grid")
        return gaussian_generator(N, tau, M=M)
    if family == "random":
        return random_unimodular_generator(N, seed, M=M)
    if family == "box":
        return box(LatticeParams(M, N))
    raise ConfigError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


# --------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _write_table(rows: list[dict], columns, fmt: str, out) -> None:
    buf = io.StringIO()
    if fmt == "json":
        json.dump(rows, buf, indent=2, default=float)
        buf.write("\n")
    else:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
    _emit(buf.getvalue(), out)


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# --------------------------------------------------------------------------
# subcommands


def _sweep_row(task) -> dict:
    family, seed, M, N, tau, variant = task
    b = make_generator(family, N, M, tau=tau, seed=seed, variant=variant)
    rep = sandwich_check(b)
    cert = None
    if min(M, N) >= 5 and rep.bounds.A > 0:
        cert = certify(b).certificate if M == N else certify_rect(b).certificate
        if cert > rep.beta * (1 + 1e-12):
            raise TheoremViolation(f"certificate {cert} exceeds beta {rep.beta} for {family} at ({M}, {N})")
    log_n = math.log(min(M, N))
    return {
        "family": family,
        "seed": seed if family == "random" else None,
        "M": M,
        "N": N,
        "alpha": rep.alpha,
        "beta": rep.beta,
        "A": rep.bounds.A,
        "B": rep.bounds.B,
        "alpha_over_logN": rep.alpha / log_n,
        "beta_over_logN": rep.beta / log_n,
        "certificate": cert,
    }


def _shapes(args) -> list[tuple[int, int]]:
    Ns = parse_range(args.N)
    if args.M is None:
        return [(n, n) for n in Ns]
    Ms = parse_range(args.M)
    return [(m, n) for m in Ms for n in Ns]


def run_blt_sweep(args) -> list[dict]:
    families = []
    for item in args.family:
        for fam in str(item).split(","):
            fam = fam.strip()
            if fam not in FAMILIES:
                raise ConfigError(f"--family: unknown family {fam!r}")
            families.append(fam)
    if args.seeds < 1:
        raise ConfigError("--seeds must be >= 1")
    tasks = []
    for fam in dict.fromkeys(families):
        seeds = range(args.seed, args.seed + args.seeds) if fam == "random" else [0]
        for M, N in _shapes(args):
            if min(M, N) < 2:
                raise ConfigError(f"--N/--M: sizes must be >= 2, got ({M}, {N})")
            for s in seeds:
                tasks.append((fam, s, M, N, args.tau, args.variant))
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        rows = list(pool.map(_sweep_row, tasks))
    rows.sort(key=lambda r: (r["family"], r["seed"] or 0, r["M"], r["N"]))
    return rows


def _cmd_blt_sweep(args) -> int:
    rows = run_blt_sweep(args)
    _write_table(rows, SWEEP_COLUMNS, args.format, args.out)
    return EXIT_OK


def _load_generator(path) -> Signal:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"--in: cannot read generator from {path}: {exc}") from exc
    try:
        return Signal.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"--in: {path} is not a generator file: {exc}") from exc


def _cmd_certify(args) -> int:
    b = _load_generator(args.input)
    M, N = b.lattice.M, b.lattice.N
    if M == N:
        c = certify(b)
        out = c.as_dict()
    else:
        c = certify_rect(b)
        out = {"M": M, "N": N, "tiles": c.tiles, "certificate": c.certificate, "beta": c.beta, "ratio": c.ratio}
    if args.format == "json":
        _emit(json.dumps(out, indent=2) + "\n", args.out)
    else:
        _write_table([out], list(out), "csv", args.out)
    return EXIT_OK


def _cmd_quantitative(args) -> int:
    Ns = parse_range(args.N)
    if len(Ns) != 1:
        raise ConfigError("--N: quantitative takes a single size")
    N = Ns[0]
    M = N if args.M is None else parse_range(args.M)[0]
    b = make_generator(args.family, N, M, tau=args.tau, seed=args.seed, variant=args.variant)
    Qs, Rs = parse_range(args.Q), parse_range(args.R)
    grid = [(q, r) for q in Qs for r in Rs]
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        reports = list(pool.map(lambda qr: verify_quantitative(b, qr[0], qr[1], args.recenter), grid))
    rows = [r.as_dict() for r in reports]
    if len(rows) == 1 and args.format != "csv":
        _emit(json.dumps(rows[0], indent=2) + "\n", args.out)
        return EXIT_OK
    scaled = [r.scaled_lhs for r in reports]
    if args.format == "json":
        summary = {"empirical_C": min(scaled), "spread": max(scaled) / min(scaled), "rows": rows}
        _emit(json.dumps(summary, indent=2) + "\n", args.out)
    else:
        columns = list(QUANT_COLUMNS) + [k for k in rows[0] if k not in QUANT_COLUMNS]
        _write_table(rows, columns, "csv", args.out)
    return EXIT_OK


def _cmd_make_generator(args) -> int:
    N = parse_range(args.N)
    if len(N) != 1:
        raise ConfigError("--N: make-generator takes a single size")
    M = None if args.M is None else parse_range(args.M)[0]
    b = make_generator(args.family, N[0], M, tau=args.tau, seed=args.seed, variant=args.variant)
    data = {"family": args.family, "tau": args.tau, "seed": args.seed, "variant": args.variant, **b.to_json()}
    _emit(json.dumps(data) + "\n", args.out)
    return EXIT_OK


def self_test(verbose: bool = True) -> list[tuple[str, bool, str]]:
    """Fast numerical diagnostics; each entry is (name, passed, detail)."""
    rng = np.random.default_rng(0)
    results = []

    def record(name, ok, detail):
        results.append((name, bool(ok), detail))
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

    worst_fz = worst_inv = worst_unit = 0.0
    for M, N in [(2, 2), (5, 3), (8, 8), (4, 9), (12, 20)]:
        lat = LatticeParams(M, N)
        for _ in range(10):
            a = Signal(lat, rng.standard_normal(lat.d) + 1j * rng.standard_normal(lat.d))
            worst_fz = max(worst_fz, fourier_zak_discrepancy(a))
            worst_inv = max(worst_inv, float(np.max(np.abs(zak_inverse(zak_forward(a)).values - a.values))))
            worst_inv = max(worst_inv, float(np.max(np.abs(fourier_inverse(fourier_forward(a)).values - a.values))))
            worst_unit = max(worst_unit, abs(zak_forward(a).norm_sq() - a.norm_sq()) / a.norm_sq())
    record("fourier-zak relation", worst_fz < 1e-10, f"max residual {worst_fz:.2e}")
    record("inversion round trips", worst_inv < 1e-10, f"max residual {worst_inv:.2e}")
    record("zak unitarity", worst_unit < 1e-12, f"max relative error {worst_unit:.2e}")

    g = gaussian_function(DEFAULT_TAU)
    rz = max(poisson_zak_check(g, LatticeParams(m, n)) for m, n in [(8, 8), (4, 9)])
    rf = max(poisson_fourier_check(g, LatticeParams(m, n)) for m, n in [(8, 8), (4, 9)])
    rr = max(poisson_fourier_check(scaled_rho(s), LatticeParams(16, 16)) for s in (1, 2))
    record("poisson identities", max(rz, rf, rr) < 1e-10, f"zak {rz:.2e}, fourier {rf:.2e}, rho {rr:.2e}")
    lhs, rhs = tv_domination_check(g, LatticeParams(16, 16))
    record("variation domination", lhs <= rhs, f"{lhs:.6f} <= {rhs:.6f}")

    tv = rho_derivative_l1()
    record("kernel variation", tv <= 9.67, f"int |rho'| = {tv:.6f}")

    rep = sandwich_check(bcgp_generator(32))
    record("sandwich (bcgp, N=32)", True, f"alpha {rep.alpha:.4f}, beta {rep.beta:.4f}")
    cert = certify(bcgp_generator(32))
    record("certificate <= beta (bcgp, N=32)", cert.certificate <= cert.beta, f"{cert.certificate:.4f} <= {cert.beta:.4f}")

    H = np.asarray(LEMMA_COUNTEREXAMPLE["H"])
    miss = lemma_jump_scan(H, 0.25) is None
    hit = lemma_jump_scan(H, 0.25 - 0.25 / LEMMA_COUNTEREXAMPLE["L"]) is not None
    record("jump threshold", miss and hit, "1/4 can be missed, 1/4 - 1/(4L) is met")
    return results


def _cmd_self_test(args) -> int:
    results = self_test(verbose=not args.quiet)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_VIOLATION


# --------------------------------------------------------------------------
# parser


def _add_common(p, *, sizes_required=True):
    p.add_argument("--N", required=sizes_required, help="size(s) N: 8..128, 8..32/8 or 8,16,32")
    p.add_argument("--M", default=None, help="size(s) M (default: M = N)")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU, help="Gaussian center offset")
    p.add_argument("--seed", type=int, default=0, help="seed for the random family")
    p.add_argument("--variant", default="piecewise-linear", choices=["piecewise-linear", "smoothstep"])
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finite-blt", description="Finite Balian-Low experiments.")
    parser.add_argument("--config", default=None, help="JSON file of flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("blt-sweep", help="alpha/beta/certificate table over N")
    p.add_argument("--family", action="append", default=None, help="bcgp, gaussian, random, box (repeatable)")
    _add_common(p)
    p.add_argument("--seeds", type=int, default=1, help="number of random seeds (random family)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=_cmd_blt_sweep)

    p = sub.add_parser("certify", help="jump certificate of a generator file")
    p.add_argument("--in", dest="input", required=True, help="generator JSON from make-generator")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("quantitative", help="tail-bound chain for Q, R")
    p.add_argument("--family", default="bcgp", choices=FAMILIES)
    _add_common(p)
    p.add_argument("--Q", default="1", help="Q value(s)")
    p.add_argument("--R", default="1", help="R value(s)")
    p.add_argument("--recenter", action="store_true", help="take the tails of the recentered translate")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.set_defaults(func=_cmd_quantitative)

    p = sub.add_parser("make-generator", help="write a generator to JSON")
    p.add_argument("--family", required=True, choices=FAMILIES)
    _add_common(p)
    p.set_defaults(func=_cmd_make_generator)

    p = sub.add_parser("self-test", help="quick numerical diagnostics")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_self_test)
    return parser


def _apply_config(parser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return
    try:
        cfg = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"--config: cannot read {known.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("--config: expected a JSON object")
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    cfg = {k.lstrip("-").replace("-", "_"): v for k, v in cfg.items()}
    cfg.pop("command", None)
    if "in" in cfg:
        cfg["input"] = cfg.pop("in")
    for name, sp in subparsers.choices.items():
        dests = {a.dest for a in sp._actions}
        usable = {k: v for k, v in cfg.items() if k in dests}
        if name == "blt-sweep" and "family" in usable and not isinstance(usable["family"], list):
            usable["family"] = [usable["family"]]
        sp.set_defaults(**usable)
        for action in sp._actions:
            if action.dest in usable:
                action.required = False
    every = set().union(*({a.dest for a in sp._actions} for sp in subparsers.choices.values()))
    unknown = sorted(set(cfg) - every)
    if unknown:
        raise ConfigError(f"--config: unknown key(s) {', '.join(unknown)}")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if getattr(args, "family", "") is None:
            args.family = ["bcgp"]
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    except TheoremViolation as exc:
        print(f"error: inequality violated: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (ConfigError, PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
