"""Command-line driver: ``octlab build|check|report``.

Exit codes: 0 all checks pass, 1 a claim was falsified, 2 configuration or
IO error, 3 resource bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .algebra import Sign, build_herm, cache_path, cache_text
from .checks import CHECK_NAMES, CheckConfig, Record, run_acceptance, run_checks, verdict_ok
from .deltader import DEFAULT_DELTAS
from .errors import ConfigError, ResourceBoundExceeded
from .exactnum import FieldSpec, field_make, parse_rational, scalar_to_str
from .structure import DEFAULT_PRIMES

EXIT_OK, EXIT_FALSIFIED, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3
MAX_ORDER = 8
DEFAULT_CEILING = 4

log = logging.getLogger("octlab")


@dataclass
class RunConfig:
    n: int
    signs: tuple
    field_desc: str
    deltas: tuple
    primes: tuple
    seed: int
    trials: int
    product_trials: int
    cache_dir: Path
    out: Path | None
    exploratory_char3: bool
    max_n: int
    time_box: float
    workers: int

    def echo(self) -> dict:
        return {
            "n": self.n,
            "sign": [s.value for s in self.signs],
            "field": self.field_desc,
            "deltas": [scalar_to_str(d) for d in self.deltas],
            "primes": list(self.primes),
            "seed": self.seed,
            "trials": self.trials,
            "product_trials": self.product_trials,
            "cache_dir": str(self.cache_dir),
            "out": None if self.out is None else str(self.out),
            "exploratory_char3": self.exploratory_char3,
            "max_n": self.max_n,
            "time_box": self.time_box,
            "workers": self.workers,
        }


def _parse_signs(text: str) -> tuple:
    t = text.lower()
    if t == "both":
        return (Sign.PLUS, Sign.MINUS)
    if t in ("plus", "minus"):
        return (Sign(t),)
    raise ConfigError(f"sign must be plus, minus or both, not {text!r}")


def _parse_deltas(text: str | None) -> tuple:
    if text is None:
        return DEFAULT_DELTAS
    vals = tuple(parse_rational(x) for x in text.split(",") if x.strip())
    if len(set(vals)) != len(vals):
        raise ConfigError("delta values must be pairwise distinct")
    return vals


def _parse_primes(text: str | None) -> tuple:
    if text is None:
        return DEFAULT_PRIMES
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"bad prime list {text!r}") from None
    for p in vals:
        field_make(FieldSpec.prime(p))
    return vals


def make_config(args: argparse.Namespace) -> RunConfig:
    if not 1 <= args.n <= MAX_ORDER:
        raise ConfigError(f"order n must lie in 1..{MAX_ORDER}")
    if args.seed is None:
        raise ConfigError("a seed is required")
    spec = FieldSpec.parse(args.field, exploratory=args.exploratory_char3)
    field_make(spec)
    cfg = RunConfig(
        n=args.n, signs=_parse_signs(args.sign), field_desc=spec.descriptor(),
        deltas=_parse_deltas(args.delta), primes=_parse_primes(args.primes), seed=args.seed,
        trials=args.trials, product_trials=args.product_trials, cache_dir=Path(args.cache_dir),
        out=None if args.out is None else Path(args.out), exploratory_char3=args.exploratory_char3,
        max_n=args.max_n, time_box=args.time_box, workers=args.workers)
    if cfg.n > cfg.max_n:
        raise ResourceBoundExceeded(f"n = {cfg.n} exceeds the ceiling {cfg.max_n}; raise --max-n to run it")
    return cfg


def check_config(cfg: RunConfig) -> CheckConfig:
    field = field_make(FieldSpec.parse(cfg.field_desc, exploratory=cfg.exploratory_char3))
    return CheckConfig(n=cfg.n, signs=cfg.signs, field=field, deltas=cfg.deltas, primes=cfg.primes,
                       seed=cfg.seed, trials=cfg.trials, product_trials=cfg.product_trials,
                       time_box=cfg.time_box)


def build_report(cfg: RunConfig, records: list[Record]) -> dict:
    return {"version": __version__, "config": cfg.echo(), "records": [r.to_json() for r in records]}


def write_report(report: dict, out: Path | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def summarize(records) -> str:
    lines = []
    for r in records:
        r = r if isinstance(r, dict) else r.to_json()
        lines.append(f"{r['verdict'].upper():8} {r['id']}  [{r['anchor']}]  {r['ms']} ms")
    return "\n".join(lines)


def cmd_build(cfg: RunConfig) -> int:
    field = field_make(FieldSpec.parse(cfg.field_desc, exploratory=cfg.exploratory_char3))
    for s in cfg.signs:
        alg = build_herm(cfg.n, s, field)
        path = cache_path(cfg.cache_dir, cfg.n, s, field)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(cache_text(alg), encoding="utf-8")
        print(f"{path}  dim={alg.dim}")
    return EXIT_OK


def cmd_check(cfg: RunConfig, checks: list[str]) -> int:
    ccfg = check_config(cfg)
    if checks == ["full-suite"]:
        records = run_acceptance(ccfg)
    else:
        unknown = [c for c in checks if c not in CHECK_NAMES]
        if unknown:
            raise ConfigError(f"unknown checks {unknown}; choose from {', '.join(CHECK_NAMES)} or full-suite")
        records = run_checks(checks, ccfg)
    write_report(build_report(cfg, records), cfg.out)
    print(summarize(records), file=sys.stderr)
    if verdict_ok(records):
        return EXIT_OK
    first = next(r for r in records if r.verdict not in ("pass", "info"))
    print(f"first failing record: {first.id}", file=sys.stderr)
    return EXIT_FALSIFIED


def cmd_report(path: Path) -> int:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        records = data["records"]
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read report {path}: {exc}") from None
    print(f"octlab report {data.get('version')}  seed={data.get('config', {}).get('seed')}")
    print(summarize(records))
    bad = [r for r in records if r["verdict"] not in ("pass", "info")]
    print(f"{len(records) - len(bad)}/{len(records)} records pass or informational")
    return EXIT_OK if not bad else EXIT_FALSIFIED


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=2, help="matrix order (1..8)")
    p.add_argument("--sign", default="both", help="plus, minus or both")
    p.add_argument("--field", default="q", help="q or fp:<prime>")
    p.add_argument("--delta", default=None, help="comma-separated exact rationals, e.g. 1,1/2,-1")
    p.add_argument("--primes", default=None, help="comma-separated primes for modular certificates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20, help="random generators for ideal closures")
    p.add_argument("--product-trials", type=int, default=500)
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.add_argument("--cache-dir", default=".octlab-cache")
    p.add_argument("--exploratory-char3", action="store_true")
    p.add_argument("--max-n", type=int, default=DEFAULT_CEILING, help="resource ceiling on n")
    p.add_argument("--time-box", type=float, default=600.0, help="seconds for time-boxed suite items")
    p.add_argument("--workers", type=int, default=1, help="accepted for compatibility; checks run in order")


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="octlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    b = sub.add_parser("build", help="write the structure-constant cache")
    _common(b)
    c = sub.add_parser("check", help="run checks and write a JSON report")
    c.add_argument("checks", nargs="+", help=f"any of {', '.join(CHECK_NAMES)}, or full-suite")
    _common(c)
    r = sub.add_parser("report", help="summarize a JSON report")
    r.add_argument("path")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "report":
            return cmd_report(Path(args.path))
        cfg = make_config(args)
        if args.command == "build":
            return cmd_build(cfg)
        return cmd_check(cfg, args.checks)
    except ResourceBoundExceeded as exc:
        print(f"resource bound: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
