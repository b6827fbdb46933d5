"""Command line front end: batch computations with reproducible output.

Results go to standard output (or --output), logs to standard error.
The verify subcommand exits 0 only if every requested check passes, so
the tool can anchor shell pipelines and CI jobs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction

from .exact import parse_rat, rat_str
from .partitions import Partition
from .qseries import (LEMMA1_INSTANCES, check_lemma1,
                      check_tail_closed_forms, first_mismatch,
                      random_lemma1_instances, theorem_rhs)
from .reduction import (InconsistencyError, build_An, cross_check,
                        module_spec, pivots_up_to, quotient_basis,
                        refined_character, resolve_threads, rref)
from .virasoro import singular_vectors, verma

log = logging.getLogger("ising_pbw")

MODULES = ("h0", "h1/2", "h1/16")
SCHEMA = 1


@dataclass
class RunConfig:
    module_label: str | None
    max_weight: int | None
    q_truncation: int | None
    output_format: str
    output_path: str | None
    threads: int

    def weight_for(self, label: str) -> int:
        if self.max_weight is not None:
            return self.max_weight
        return module_spec(label).default_max_weight

    def q_trunc(self, floor: int = 0) -> int:
        if self.q_truncation is not None:
            return self.q_truncation
        return max(25, floor)

    def check(self) -> None:
        if self.module_label is not None and self.module_label not in MODULES:
            raise SystemExit(f"unknown module {self.module_label!r}; "
                             f"choose from {', '.join(MODULES)}")
        if self.max_weight is not None and self.max_weight < 0:
            raise SystemExit("--max-weight must be nonnegative")
        if (self.q_truncation is not None and self.max_weight is not None
                and self.q_truncation < self.max_weight):
            raise SystemExit("--q-trunc must be at least --max-weight")


def _config(args) -> RunConfig:
    cfg = RunConfig(
        module_label=getattr(args, "module", None),
        max_weight=getattr(args, "max_weight", None),
        q_truncation=getattr(args, "q_trunc", None),
        output_format=args.output_format,
        output_path=args.output,
        threads=resolve_threads(args.threads),
    )
    cfg.check()
    return cfg


def fmt_partition(lam: Partition) -> str:
    return "+".join(map(str, lam)) if lam else "-"


def _emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output_path:
        try:
            with open(cfg.output_path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise SystemExit(f"cannot write {cfg.output_path}: {exc}")
    else:
        sys.stdout.write(text)


def _emit_json(cfg: RunConfig, payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    _emit(cfg, json.dumps(payload, indent=2))


# -- pivots / basis ------------------------------------------------------

def cmd_pivots(cfg: RunConfig) -> int:
    spec = module_spec(cfg.module_label)
    N = cfg.weight_for(spec.label)
    log.info("computing pivots for %s up to weight %d", spec.label, N)
    results = pivots_up_to(spec, N, cfg.threads)
    if cfg.output_format == "json":
        _emit_json(cfg, {"command": "pivots", "label": spec.label,
                         "max_weight": N,
                         "weights": [results[n].to_json()
                                     for n in range(N + 1)]})
        return 0
    if cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "kind", "partition"])
        for n in range(N + 1):
            for lam in results[n].pivots:
                w.writerow([n, "pivot", fmt_partition(lam)])
            for lam in results[n].non_pivots:
                w.writerow([n, "basis", fmt_partition(lam)])
        _emit(cfg, buf.getvalue())
        return 0
    lines = []
    for n in range(N + 1):
        res = results[n]
        lines.append(f"n={n}")
        lines.append("  pivots: " + (" ".join(fmt_partition(p)
                                              for p in res.pivots) or "(none)"))
        lines.append("  basis:  " + (" ".join(fmt_partition(p)
                                              for p in res.non_pivots)
                                     or "(none)"))
    _emit(cfg, "\n".join(lines))
    return 0


def cmd_basis(cfg: RunConfig) -> int:
    spec = module_spec(cfg.module_label)
    N = cfg.weight_for(spec.label)
    log.info("computing quotient basis for %s up to weight %d", spec.label, N)
    basis = quotient_basis(spec, N, cfg.threads)
    if cfg.output_format == "json":
        _emit_json(cfg, {"command": "basis", "label": spec.label,
                         "max_weight": N,
                         "weights": [{"label": spec.label, "n": n,
                                      "basis": [list(p) for p in basis[n]]}
                                     for n in range(N + 1)]})
        return 0
    if cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "partition"])
        for n in range(N + 1):
            for lam in basis[n]:
                w.writerow([n, fmt_partition(lam)])
        _emit(cfg, buf.getvalue())
        return 0
    lines = [f"n={n}: " + (" ".join(fmt_partition(p) for p in basis[n])
                           or "(none)")
             for n in range(N + 1)]
    _emit(cfg, "\n".join(lines))
    return 0


# -- matrix --------------------------------------------------------------

def _matrix_csv(res) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow([fmt_partition(lam) for lam in res.column_order])
    for vec in res.rows:
        w.writerow([rat_str(vec.terms.get(lam, 0))
                    for lam in res.column_order])
    return buf.getvalue()


def cmd_matrix(cfg: RunConfig, dump: str | None) -> int:
    spec = module_spec(cfg.module_label)
    n = cfg.weight_for(spec.label)
    log.info("building weight matrix for %s at weight %d", spec.label, n)
    res = rref(build_An(spec, n))
    if dump:
        try:
            with open(dump, "w") as fh:
                fh.write(_matrix_csv(res))
        except OSError as exc:
            raise SystemExit(f"cannot write {dump}: {exc}")
        log.info("wrote RREF CSV to %s", dump)
    if cfg.output_format == "json":
        _emit_json(cfg, {"command": "matrix", "label": spec.label, "n": n,
                         "columns": [list(p) for p in res.column_order],
                         "pivots": [list(p) for p in res.pivots],
                         "rows": [[rat_str(vec.terms.get(lam, 0))
                                   for lam in res.column_order]
                                  for vec in res.rows]})
    elif cfg.output_format == "csv" or not dump:
        _emit(cfg, _matrix_csv(res))
    return 0


# -- singular ------------------------------------------------------------

def _render_vector(vec) -> str:
    return " + ".join(f"{rat_str(c)}·L[{fmt_partition(lam)}]"
                      for lam, c in vec.sorted_terms())


def cmd_singular(cfg: RunConfig, c: str, h: str, level: int) -> int:
    vs = verma(parse_rat(c), parse_rat(h))
    log.info("solving singular vectors at c=%s h=%s level %d", c, h, level)
    kernel = singular_vectors(vs, level)
    if cfg.output_format == "json":
        _emit_json(cfg, {"command": "singular", "c": c, "h": h,
                         "level": level,
                         "kernel": [v.to_json() for v in kernel]})
        return 0
    if not kernel:
        _emit(cfg, "(empty)")
        return 0
    _emit(cfg, "\n".join(_render_vector(v) for v in kernel))
    return 0


# -- verify --------------------------------------------------------------

def _check_characters(cfg: RunConfig, labels) -> list[dict]:
    checks = []
    for label in labels:
        spec = module_spec(label)
        N = cfg.weight_for(label)
        log.info("character identity for %s up to weight %d", label, N)
        lhs = refined_character(spec, N, cfg.threads)
        rhs = theorem_rhs(spec.theorem, N)
        diff = first_mismatch(lhs, rhs)
        entry = {"name": f"character:{label}", "max_weight": N,
                 "passed": diff is None}
        if diff is not None:
            t, q, lc, rc = diff
            entry["mismatch"] = {"t_exp": t, "q_exp": str(Fraction(q)),
                                 "lhs": rat_str(lc), "rhs": rat_str(rc)}
        checks.append(entry)
    return checks


def _check_theorems(cfg: RunConfig, labels) -> tuple[list[dict], list[str]]:
    checks = []
    tables = []
    for label in labels:
        spec = module_spec(label)
        N = cfg.weight_for(label)
        log.info("pivot cross-check for %s up to weight %d", label, N)
        report = cross_check(spec, N, cfg.threads)
        rows = ["\t".join(("n", "basis_match", "pivot_match", "count_match",
                           "status"))]
        for wc in report:
            rows.append("\t".join((
                str(wc.n), str(wc.basis_match).lower(),
                str(wc.pivot_match).lower(), str(wc.count_match).lower(),
                "pass" if wc.passed else "FAIL")))
        tables.append(f"# cross-check {label}\n" + "\n".join(rows))
        entry = {"name": f"cross_check:{label}", "max_weight": N,
                 "passed": all(wc.passed for wc in report),
                 "weights": [wc.to_json() for wc in report]}
        checks.append(entry)
    checks.extend(_check_characters(cfg, labels))
    return checks, tables


def _check_lemma1_suite(cfg: RunConfig) -> list[dict]:
    N = cfg.q_trunc()
    checks = []
    log.info("identity instances at truncation %d", N)
    for variant, params, extra in LEMMA1_INSTANCES:
        ok = check_lemma1(variant, params, extra, N)
        checks.append({"name": f"lemma1:{variant}:{tuple(params)}:{extra}",
                       "passed": ok})
    for variant, params, extra in random_lemma1_instances():
        ok = check_lemma1(variant, params, extra, N)
        checks.append({"name": f"lemma1:random:{variant}:{tuple(params)}:"
                               f"{extra}", "passed": ok})
    return checks


def _check_tails(cfg: RunConfig) -> list[dict]:
    which = cfg.module_label if cfg.module_label in ("h1/2", "h1/16") \
        else "all"
    N = cfg.q_trunc()
    log.info("tail closed forms (%s) at truncation %d", which, N)
    out = []
    for tc in check_tail_closed_forms(which, N):
        entry = tc.to_json()
        entry["name"] = f"tail:{tc.label}:{tc.tail}"
        out.append(entry)
    return out


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    labels = [cfg.module_label] if cfg.module_label else list(MODULES)
    checks: list[dict] = []
    tables: list[str] = []
    if suite in ("tails", "all"):
        checks.extend(_check_tails(cfg))
    if suite in ("lemma1", "all"):
        checks.extend(_check_lemma1_suite(cfg))
    if suite in ("characters",):
        checks.extend(_check_characters(cfg, labels))
    if suite in ("theorems", "all"):
        got, tables = _check_theorems(cfg, labels)
        checks.extend(got)
    passed = all(c["passed"] for c in checks)
    summary = {"command": "verify", "suite": suite, "passed": passed,
               "total": len(checks),
               "failed": sum(1 for c in checks if not c["passed"])}
    if cfg.output_format == "json":
        _emit_json(cfg, {**summary, "checks": checks})
    elif cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["name", "passed"])
        for c in checks:
            w.writerow([c["name"], str(c["passed"]).lower()])
        _emit(cfg, buf.getvalue())
    else:
        lines = []
        for c in checks:
            status = "PASS" if c["passed"] else "FAIL"
            detail = ""
            if not c["passed"] and "mismatch" in c:
                detail = f"  first mismatch: {c['mismatch']}"
            lines.append(f"{status} {c['name']}{detail}")
        lines.extend(tables)
        lines.append(json.dumps({"schema": SCHEMA, **summary}))
        _emit(cfg, "\n".join(lines))
    return 0 if passed else 1


# -- argument parsing ----------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--module", choices=MODULES,
                        help="module label (h0, h1/2, h1/16)")
    common.add_argument("--max-weight", type=int, default=None,
                        help="largest conformal weight to process "
                             "(default 15, or 25 for h1/16)")
    common.add_argument("--q-trunc", type=int, default=None,
                        help="q-series truncation order (default 25; "
                             "must be >= --max-weight)")
    common.add_argument("--output-format", choices=("text", "json", "csv"),
                        default="text")
    common.add_argument("--output", default=None,
                        help="write results to this file instead of stdout")
    common.add_argument("--threads", type=int, default=None,
                        help="parallel workers over weights; 0 = one per "
                             "CPU (env ISING_PBW_THREADS)")

    ap = argparse.ArgumentParser(
        prog="ising-pbw",
        description="Exact quotient bases, pivot partitions and q-series "
                    "identities for the three irreducible modules of the "
                    "c=1/2 Virasoro algebra.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pivots", parents=[common],
                       help="pivot and basis partitions per weight")
    p.set_defaults(func=lambda a: cmd_pivots(_config(a)))

    p = sub.add_parser("basis", parents=[common],
                       help="quotient basis partitions per weight")
    p.set_defaults(func=lambda a: cmd_basis(_config(a)))

    p = sub.add_parser("matrix", parents=[common],
                       help="RREF of the weight matrix at --max-weight")
    p.add_argument("--dump", default=None, metavar="PATH",
                   help="write the RREF as CSV to PATH")
    p.set_defaults(func=lambda a: cmd_matrix(_config(a), a.dump))

    p = sub.add_parser("singular", parents=[common],
                       help="singular vectors of a Verma module")
    p.add_argument("--c", required=True, help="central charge, e.g. 1/2")
    p.add_argument("--h", required=True, help="highest weight, e.g. 1/16")
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=lambda a: cmd_singular(_config(a), a.c, a.h, a.level))

    p = sub.add_parser("verify", parents=[common],
                       help="run a verification suite; exit 0 iff all pass")
    p.add_argument("--suite", required=True,
                   choices=("characters", "lemma1", "tails", "theorems",
                            "all"))
    p.set_defaults(func=lambda a: cmd_verify(_config(a), a.suite))
    return ap


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    args = _build_parser().parse_args(argv)
    for name in ("pivots", "basis", "matrix"):
        if args.command == name and not args.module:
            raise SystemExit(f"{name} requires --module")
    try:
        return args.func(args)
    except InconsistencyError as exc:
        log.error("inconsistent result: %s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
