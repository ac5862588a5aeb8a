"""Command line entry point: ``spherical-hecke {emit,verify,reconstruct}``.

Every command writes its files under ``--out`` and prints a JSON report on
stdout.  Exit status: 0 success, 1 verification failure, 2 usage or budget
error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .oracle.enumerate import (
    BUDGET_ENV, BudgetExceeded, count_by_pattern, enumerate_cosets, projected_count,
)
from .oracle.spherical import NORMALIZATIONS, Normalization, classify_cosets
from .poly import MultiPoly
from .series import (
    GENUS2_PRIMES, SeriesError, compare_prefixes, expand, genus_rf, numeric_numerator,
    oracle_prefix, reconstruct_genus2,
)
from .sym_table import (
    CONVENTIONS, KTable, build_Q, build_P4, check_functional_equation, check_remark_relation,
    git_blob_hash, ktable_bytes, latex_table, load_ktable, load_ktable_file,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class Config:
    out: Path
    workers: int = 1
    budget: Optional[int] = None
    format: str = "json"
    convention: str = "orbit"
    normalization: str = "descending"
    ktable: Optional[Path] = None
    timing: bool = False

    @classmethod
    def from_args(cls, args) -> "Config":
        return cls(Path(args.out), args.workers, args.budget, getattr(args, "format", "json"),
                   args.convention, args.normalization,
                   Path(args.ktable) if args.ktable else None, args.timing)

    def table(self) -> KTable:
        return load_ktable_file(self.ktable) if self.ktable else load_ktable()

    def table_hash(self) -> str:
        data = self.ktable.read_bytes() if self.ktable else ktable_bytes()
        return git_blob_hash(data)


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _rf_obj(genus: int, P: Optional[MultiPoly], factors: List[MultiPoly]) -> dict:
    return {
        "genus": genus,
        "numerator": None if P is None else P.to_json_obj(),
        "denominator": [f.to_json_obj() for f in factors],
    }


def _finish(cfg: Config, name: str, report: dict, started: float) -> int:
    report = {"check": name, "ktable_hash": cfg.table_hash(), "version": __version__, **report}
    if cfg.timing:
        report["seconds"] = round(time.perf_counter() - started, 3)
    text = _dump(report)
    _write(cfg.out / f"{name}.json", text)
    sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _residual_report(residuals: Dict[int, MultiPoly], key: str) -> dict:
    rows = [{key: k, "residual_zero": r.is_zero()} for k, r in sorted(residuals.items())]
    report = {"passed": all(r["residual_zero"] for r in rows), "results": rows}
    bad = next(((k, r) for k, r in sorted(residuals.items()) if not r.is_zero()), None)
    if bad is not None:
        report["first_failure"] = {key: bad[0], "residual": bad[1].to_json_obj()}
    return report


# -- emit ----------------------------------------------------------------------------

def cmd_emit(cfg: Config, genus: int) -> int:
    if not 1 <= genus <= 4:
        raise UsageError(f"unsupported genus {genus}")
    fmt = cfg.format
    files = []
    if genus == 4:
        kt = cfg.table()
        if fmt == "json":
            files.append(_write(cfg.out / "ktable-genus4.json", _dump(kt.to_json_obj())))
            rf = genus_rf(4, kt, cfg.convention)
            files.append(_write(cfg.out / "rf-genus4.json",
                                _dump(_rf_obj(4, rf.numerator, list(rf.denominator_factors)))))
        elif fmt == "latex":
            files.append(_write(cfg.out / "ktable-genus4.tex", latex_table(kt)))
        else:
            lines = [f"K_{k} = {kt.K(k, cfg.convention)}" for k in range(len(kt))]
            files.append(_write(cfg.out / "ktable-genus4.txt", "\n".join(lines) + "\n"))
    else:
        factors = build_Q(genus)
        P = None
        if genus == 1:
            P = MultiPoly.const(1)
        elif genus == 3:
            P = genus_rf(3, cfg.table(), cfg.convention).numerator
        if fmt == "json":
            files.append(_write(cfg.out / f"rf-genus{genus}.json", _dump(_rf_obj(genus, P, factors))))
        elif fmt == "text":
            lines = [f"P = {P if P is not None else 'not shipped; see reconstruct'}"]
            lines += [f"Q[{i}] = {f}" for i, f in enumerate(factors)]
            files.append(_write(cfg.out / f"rf-genus{genus}.txt", "\n".join(lines) + "\n"))
        else:
            raise UsageError("latex output is only available for the genus-4 table")
    sys.stdout.write(_dump({"emitted": [str(f) for f in files]}))
    return EXIT_OK


# -- verify --------------------------------------------------------------------------

def verify_funceq(cfg: Config, args) -> int:
    t = time.perf_counter()
    res = check_functional_equation(cfg.table(), cfg.convention)
    report = _residual_report(res.residuals, "k")
    report["params"] = {"convention": cfg.convention}
    return _finish(cfg, "funceq", report, t)


def verify_remark(cfg: Config, args) -> int:
    t = time.perf_counter()
    P = build_P4(cfg.table(), cfg.convention)
    res = check_remark_relation(P, 4, invert_p=args.invert_p)
    report = _residual_report(res.residuals, "X_degree")
    report["passed"] = res.passed
    report["params"] = {"convention": cfg.convention, "genus": 4, "invert_p": args.invert_p}
    return _finish(cfg, "remark", report, t)


def _oracle_report(cfg: Config, genus: int, p: int, max_delta: int, kt: KTable) -> dict:
    rf = genus_rf(genus, kt, cfg.convention)
    norm = Normalization.named(cfg.normalization, genus)
    oracle = oracle_prefix(genus, p, max_delta, cfg.workers, cfg.budget, norm)
    expected = expand(rf.specialize(p=p), max_delta, genus)
    report = _residual_report(compare_prefixes(expected, oracle), "delta")
    for row in report["results"]:
        row["oracle"] = oracle[row["delta"]].to_json_obj()
    return report


def verify_oracle(cfg: Config, args) -> int:
    t = time.perf_counter()
    genus = args.genus or 4
    max_delta = 2 if args.max_delta is None else args.max_delta
    report = _oracle_report(cfg, genus, args.p, max_delta, cfg.table())
    report["params"] = {"genus": genus, "p": args.p, "max_delta": max_delta,
                        "convention": cfg.convention, "normalization": cfg.normalization}
    return _finish(cfg, "oracle", report, t)


def verify_siegel(cfg: Config, args) -> int:
    t = time.perf_counter()
    max_delta = 3 if args.max_delta is None else args.max_delta
    kt = cfg.table()
    Q3 = genus_rf(3, kt, cfg.convention).denominator_factors
    report = _oracle_report(cfg, 3, args.p, max_delta, kt)
    report["projected_denominator_matches"] = sorted(map(str, Q3)) == sorted(map(str, build_Q(3)))
    report["passed"] = report["passed"] and report["projected_denominator_matches"]
    report["params"] = {"p": args.p, "max_delta": max_delta, "convention": cfg.convention}
    return _finish(cfg, "siegel", report, t)


def verify_counts(cfg: Config, args) -> int:
    t = time.perf_counter()
    genus = args.genus or 4
    max_delta = 1 if args.max_delta is None else args.max_delta
    rows = []
    for delta in range(1, max_delta + 1):
        counted = sum(count_by_pattern(genus, args.p, delta, cfg.workers, cfg.budget).values())
        expected = projected_count(genus, args.p, delta)
        row = {"delta": delta, "count": counted, "block_formula": expected}
        ok = counted == expected
        if delta == 1:
            closed = 1
            for i in range(1, genus + 1):
                closed *= args.p ** i + 1
            row["product_formula"] = closed
            ok = ok and counted == closed
        row["match"] = ok
        rows.append(row)
        if args.classes:
            for chain, (n, _) in classify_cosets(genus, args.p, delta, cfg.budget).items():
                print(f"class={chain.label()} count={n}", file=sys.stderr)
        if args.dump:
            path = cfg.out / f"cosets-g{genus}-p{args.p}-d{delta}.txt"
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w") as fh:
                for rep in enumerate_cosets(genus, args.p, delta, cfg.budget):
                    fh.write(rep.dump_line() + "\n")
    report = {"passed": all(r["match"] for r in rows), "results": rows,
              "params": {"genus": genus, "p": args.p, "max_delta": max_delta}}
    return _finish(cfg, "counts", report, t)


VERIFY = {
    "funceq": verify_funceq,
    "remark": verify_remark,
    "oracle": verify_oracle,
    "siegel": verify_siegel,
    "counts": verify_counts,
}


# -- reconstruct ---------------------------------------------------------------------

def cmd_reconstruct(cfg: Config, args) -> int:
    t = time.perf_counter()
    genus = args.genus
    if not 1 <= genus <= 4:
        raise UsageError(f"unsupported genus {genus}")
    degP = 2 ** genus - 2 if args.degP is None else args.degP
    report: dict = {"params": {"genus": genus, "degP": degP}}
    if args.symbolic:
        if genus > 2:
            raise UsageError("symbolic reconstruction is available for genus 1 and 2")
        if genus == 1:
            primes = args.primes or [2, 3, 5]
            for q in primes:
                if numeric_numerator(1, q, max(degP, 2), degP, cfg.workers, cfg.budget) != MultiPoly.const(1):
                    raise SeriesError(f"genus-1 numerator at p={q} is not 1")
            P = MultiPoly.const(1)
        else:
            primes = args.primes or list(GENUS2_PRIMES)
            P = reconstruct_genus2(primes, workers=cfg.workers, budget=cfg.budget).P
        report["params"]["primes"] = primes
        res = check_remark_relation(P, genus)
        report["remark_relation"] = res.passed
        report["passed"] = res.passed
        report["numerator"] = P.to_json_obj()
        report["numerator_text"] = str(P)
        _write(cfg.out / f"P{genus}.json", _dump(P.to_json_obj()))
        return _finish(cfg, "reconstruct", report, t)

    primes = [args.p] if args.p else (args.primes or [2])
    max_delta = degP if args.max_delta is None else max(degP, args.max_delta)
    report["params"].update({"primes": primes, "max_delta": max_delta})
    out = {}
    for q in primes:
        P = numeric_numerator(genus, q, max_delta, degP, cfg.workers, cfg.budget)
        out[str(q)] = {"numerator": P.to_json_obj(), "numerator_text": str(P)}
        _write(cfg.out / f"P{genus}-p{q}.json", _dump(P.to_json_obj()))
    report["numerators"] = out
    report["passed"] = True
    return _finish(cfg, "reconstruct", report, t)


# -- argument parsing ----------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--budget", type=_positive, default=None,
                        help=f"coset budget per enumeration (default 10^8 or ${BUDGET_ENV})")
    common.add_argument("--convention", choices=CONVENTIONS, default="orbit",
                        help="meaning of sym_(i1 i2 i3 i4) (default: orbit)")
    common.add_argument("--normalization", choices=NORMALIZATIONS, default="descending",
                        help="p-weights of the spherical map (default: descending)")
    common.add_argument("--ktable", default=None, help="alternative K-table JSON file")
    common.add_argument("--timing", action="store_true", help="record wall time in reports")

    ap = argparse.ArgumentParser(prog="spherical-hecke", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    em = sub.add_parser("emit", parents=[common], help="write P/Q data")
    em.add_argument("--genus", type=int, default=4)
    em.add_argument("--format", choices=("json", "latex", "text"), default="json")

    ve = sub.add_parser("verify", parents=[common], help="run a verification")
    ve.add_argument("check", choices=sorted(VERIFY))
    ve.add_argument("--p", type=int, default=2)
    ve.add_argument("--genus", type=int, default=None)
    ve.add_argument("--max-delta", type=int, default=None)
    ve.add_argument("--invert-p", action="store_true",
                    help="remark: also invert p and X instead of X -> p/X")
    ve.add_argument("--classes", action="store_true",
                    help="counts: print class=<chain> count=<n> lines on stderr")
    ve.add_argument("--dump", action="store_true", help="counts: write every HNF representative")

    re_ = sub.add_parser("reconstruct", parents=[common], help="recover numerators from the oracle")
    re_.add_argument("--genus", type=int, default=1)
    re_.add_argument("--symbolic", action="store_true")
    re_.add_argument("--p", type=int, default=None)
    re_.add_argument("--primes", type=lambda s: [int(v) for v in s.split(",")], default=None)
    re_.add_argument("--degP", type=int, default=None)
    re_.add_argument("--max-delta", type=int, default=None)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cfg = Config.from_args(args)
    try:
        if args.command == "emit":
            return cmd_emit(cfg, args.genus)
        if args.command == "verify":
            return VERIFY[args.check](cfg, args)
        return cmd_reconstruct(cfg, args)
    except (UsageError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL if isinstance(exc, SeriesError) else EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
