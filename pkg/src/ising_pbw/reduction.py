"""Weight matrices of singular-vector submodules and their exact RREF.

For a module configuration (Verma spec, generators u_k, pattern set R^h)
the matrix A_n has rows apply_word(mu, u_k) over all partitions mu of
n - weight(u_k), expanded in the PBW basis of weight n.  Pivot columns of
its RREF are the monomials absorbed by the submodule; the complement
descends to a basis of the irreducible quotient and is compared against
the pattern-avoiding enumeration.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import ONE, QQ, rat_str
from .linalg import rref_sparse
from .partitions import (PATTERN_SETS, Partition, PatternSet, enumerate_P,
                         in_P, length, sort_pbw, weight, weight_basis)
from .qseries import BiPoly
from .virasoro import (PBWVector, VermaSpec, apply_mode, apply_word,
                       pbw_vector, singular_vectors, verma)


class InconsistencyError(Exception):
    """A computed result contradicts a structural expectation."""


@dataclass(frozen=True)
class ModuleSpec:
    """Configuration of one irreducible quotient computation."""
    label: str
    verma: VermaSpec
    generators: tuple[PBWVector, ...]
    patterns: PatternSet
    theorem: str            # matching refined-character label in qseries
    default_max_weight: int


_MODULE_CACHE: dict[str, ModuleSpec] = {}


def module_spec(label: str) -> ModuleSpec:
    """The three built-in module configurations, checked at construction."""
    if label in _MODULE_CACHE:
        return _MODULE_CACHE[label]
    if label == "h1/2":
        vs = verma(QQ(1, 2), QQ(1, 2))
        gens = (
            pbw_vector(vs, 2, {(1, 1): 1, (2,): QQ(-4, 3)}),
            pbw_vector(vs, 3, {(1, 1, 1): 1, (2, 1): -3, (3,): QQ(3, 4)}),
        )
        ms = ModuleSpec(label, vs, gens, PATTERN_SETS[label], "T3", 15)
    elif label == "h1/16":
        vs = verma(QQ(1, 2), QQ(1, 16))
        gens = (
            pbw_vector(vs, 2, {(2,): 1, (1, 1): QQ(-4, 3)}),
            pbw_vector(vs, 4, {(2, 2): 1, (2, 1, 1): QQ(-600, 49),
                               (1, 1, 1, 1): QQ(144, 49),
                               (3, 1): QQ(264, 49), (4,): QQ(-36, 49)}),
        )
        ms = ModuleSpec(label, vs, gens, PATTERN_SETS[label], "T5", 25)
    elif label == "h0":
        vs = verma(QQ(1, 2), QQ(0))
        sing6 = singular_vectors(vs, 6)
        if len(sing6) != 1:
            raise InconsistencyError(
                f"expected a unique weight-6 singular vector, got {len(sing6)}")
        gens = (pbw_vector(vs, 1, {(1,): 1}), sing6[0])
        ms = ModuleSpec(label, vs, gens, PATTERN_SETS[label], "T1", 15)
    else:
        raise ValueError(f"unknown module label {label!r}")
    for g in ms.generators:
        if apply_mode(1, g) or apply_mode(2, g):
            raise InconsistencyError(
                f"generator at weight {g.weight} of {label} is not singular")
    _MODULE_CACHE[label] = ms
    return ms


@dataclass
class WeightMatrix:
    """A_n with labelled rows, materialized (used at small weights)."""
    spec: ModuleSpec
    weight: int
    columns: list[Partition]
    rows: list[tuple[tuple[int, Partition], dict[int, QQ]]]


@dataclass
class EchelonResult:
    """Canonical RREF of A_n in the PBW column order."""
    label: str
    weight: int
    column_order: list[Partition]
    rows: list[PBWVector]          # pivot coefficient 1, aligned with pivots
    pivots: list[Partition]
    non_pivots: list[Partition]

    @property
    def rank(self) -> int:
        return len(self.rows)

    def row_for(self, pivot: Partition) -> PBWVector:
        return self.rows[self.pivots.index(pivot)]

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "n": self.weight,
            "pivots": [list(p) for p in self.pivots],
            "basis": [list(p) for p in self.non_pivots],
        }


def _vector_row(vec: PBWVector, index: dict[Partition, int]) -> dict:
    return {index[lam]: c for lam, c in vec.terms.items()}


def build_An(spec: ModuleSpec, n: int) -> WeightMatrix:
    """Materialized A_n: generator blocks stacked in configuration order,
    rows within a block in descending PBW order of mu."""
    cols = weight_basis(n)
    index = {lam: i for i, lam in enumerate(cols)}
    rows = []
    for k, gen in enumerate(spec.generators):
        if gen.weight > n:
            continue
        for mu in weight_basis(n - gen.weight):
            vec = apply_word(mu, gen)
            rows.append(((k, mu), _vector_row(vec, index)))
    return WeightMatrix(spec, n, cols, rows)


def _result_from_rows(spec: ModuleSpec, n: int, cols: list[Partition],
                      red_rows: list[dict], pivots_idx: list[int]
                      ) -> EchelonResult:
    pivot_set = set(pivots_idx)
    rows = []
    for red in red_rows:
        terms = {cols[i]: c for i, c in red.items()}
        rows.append(PBWVector(spec.verma, n, terms))
    return EchelonResult(
        label=spec.label,
        weight=n,
        column_order=cols,
        rows=rows,
        pivots=[cols[j] for j in pivots_idx],
        non_pivots=[cols[j] for j in range(len(cols))
                    if j not in pivot_set],
    )


def rref(matrix: WeightMatrix) -> EchelonResult:
    """Canonical RREF of a materialized weight matrix."""
    red, piv = rref_sparse((row for _, row in matrix.rows),
                           len(matrix.columns))
    return _result_from_rows(matrix.spec, matrix.weight, matrix.columns,
                             red, piv)


def _stream_rows(gen: PBWVector, remaining: int, min_part: int, visit) -> None:
    """Emit apply_word(mu, gen) for every partition mu of `remaining` with
    parts >= min_part, sharing the computation along common small-part
    suffixes (parts are applied smallest first, i.e. rightmost first)."""
    if remaining == 0:
        visit(gen)
        return
    for p in range(min_part, remaining + 1):
        _stream_rows(apply_mode(-p, gen), remaining - p, p, visit)


_ECHELON_CACHE: dict[tuple[str, int], EchelonResult] = {}


def echelon(spec: ModuleSpec, n: int) -> EchelonResult:
    """RREF of A_n, generating rows along the shared-suffix tree rather
    than through build_An; results are cached per (label, n)."""
    key = (spec.label, n)
    hit = _ECHELON_CACHE.get(key)
    if hit is not None:
        return hit
    cols = weight_basis(n)
    index = {lam: i for i, lam in enumerate(cols)}
    raw: list[dict] = []

    def visit(vec: PBWVector) -> None:
        raw.append(_vector_row(vec, index))

    for gen in spec.generators:
        if gen.weight <= n:
            _stream_rows(gen, n - gen.weight, 1, visit)
    red, piv = rref_sparse(raw, len(cols))
    res = _result_from_rows(spec, n, cols, red, piv)
    _ECHELON_CACHE[key] = res
    return res


def _echelon_task(label: str, n: int) -> EchelonResult:
    return echelon(module_spec(label), n)


def resolve_threads(threads: int | None) -> int:
    """Thread count: explicit flag wins, then ISING_PBW_THREADS, then
    serial; a value of 0 means one worker per CPU."""
    if threads is None:
        threads = int(os.environ.get("ISING_PBW_THREADS", "1") or 1)
    if threads == 0:
        threads = os.cpu_count() or 1
    return max(1, threads)


def pivots_up_to(spec: ModuleSpec, N: int,
                 threads: int = 1) -> dict[int, EchelonResult]:
    """EchelonResult for every weight n <= N.

    Weights are independent; with threads > 1 they are processed in a
    process pool and merged by weight, so results are identical to the
    serial run (all arithmetic is exact).
    """
    threads = max(1, threads)
    todo = [n for n in range(N + 1) if (spec.label, n) not in _ECHELON_CACHE]
    if threads > 1 and len(todo) > 1:
        # big weights first so the pool stays busy
        order = sorted(todo, key=lambda n: -n)
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for res in pool.map(_echelon_task, [spec.label] * len(order),
                                order):
                _ECHELON_CACHE[(spec.label, res.weight)] = res
    else:
        for n in todo:
            echelon(spec, n)
    return {n: _ECHELON_CACHE[(spec.label, n)] for n in range(N + 1)}


def quotient_basis(spec: ModuleSpec, N: int,
                   threads: int = 1) -> dict[int, list[Partition]]:
    """non_pivots(n) for n <= N: the basis partitions of the quotient.

    For h0 every basis partition must be free of parts equal to 1 (they
    are all absorbed by the L_{-1} generator); a violation would
    contradict the expected structure and raises InconsistencyError.
    """
    results = pivots_up_to(spec, N, threads)
    out = {}
    for n, res in results.items():
        if spec.label == "h0":
            bad = [lam for lam in res.non_pivots if lam and lam[-1] == 1]
            if bad:
                raise InconsistencyError(
                    f"h0 weight {n}: basis partitions {bad} contain part 1")
        out[n] = list(res.non_pivots)
    return out


def refined_character(spec: ModuleSpec, N: int, threads: int = 1) -> BiPoly:
    """Sum of t^length(lam) q^(h + weight(lam)) over all basis partitions
    with weight <= N, on the 1/16-integral q-scale."""
    den = 16
    offset = Fraction(spec.verma.h.numerator, spec.verma.h.denominator) * den
    assert offset.denominator == 1
    offset = int(offset)
    results = pivots_up_to(spec, N, threads)
    terms: dict = {}
    for n, res in results.items():
        for lam in res.non_pivots:
            k = (length(lam), offset + den * n)
            terms[k] = terms.get(k, 0) + 1
    out = BiPoly.zero(0, den)
    out.trunc_scaled = offset + den * N
    out.terms = {k: QQ(v) for k, v in terms.items()}
    return out


@dataclass
class WeightCheck:
    """Cross-check of one weight: pivot complement vs pattern enumeration."""
    n: int
    basis_match: bool
    pivot_match: bool
    count_match: bool
    missing_basis: list[Partition] = field(default_factory=list)
    extra_basis: list[Partition] = field(default_factory=list)
    unexpected_pivots: list[Partition] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.basis_match and self.pivot_match and self.count_match

    def to_json(self) -> dict:
        out = {"n": self.n, "basis_match": self.basis_match,
               "pivot_match": self.pivot_match,
               "count_match": self.count_match, "passed": self.passed}
        if self.missing_basis:
            out["missing_basis"] = [list(p) for p in self.missing_basis]
        if self.extra_basis:
            out["extra_basis"] = [list(p) for p in self.extra_basis]
        if self.unexpected_pivots:
            out["unexpected_pivots"] = [list(p) for p in self.unexpected_pivots]
        return out


def cross_check(spec: ModuleSpec, N: int,
                threads: int = 1) -> list[WeightCheck]:
    """Per-weight verification that (1) non-pivots equal the
    pattern-avoiding enumeration, (2) pivots equal its complement, and
    (3) rank + basis size = p(n).  An unexpected pivot (one avoiding R^h)
    would contradict the theorems and is reported explicitly."""
    results = pivots_up_to(spec, N, threads)
    report = []
    for n in range(N + 1):
        res = results[n]
        expected = enumerate_P(spec.patterns, n)
        got = set(res.non_pivots)
        exp = set(expected)
        complement = [lam for lam in res.column_order
                      if not in_P(lam, spec.patterns)]
        unexpected = sorted(set(res.pivots) & exp)
        report.append(WeightCheck(
            n=n,
            basis_match=got == exp,
            pivot_match=set(res.pivots) == set(complement),
            count_match=len(res.non_pivots) + res.rank == len(res.column_order),
            missing_basis=sorted(exp - got),
            extra_basis=sorted(got - exp),
            unexpected_pivots=unexpected,
        ))
    return report


def uK_fixtures(spec: ModuleSpec) -> list[tuple[Partition, PBWVector]]:
    """Length-graded leading parts of the RREF rows at the exceptional
    pivots: keep the monomials whose length equals the pivot's length."""
    if spec.label != "h1/2":
        raise ValueError("uK fixtures are defined for the h1/2 module")
    out = []
    for lam in spec.patterns.exceptional:
        res = echelon(spec, weight(lam))
        row = res.row_for(lam)
        led = length(lam)
        kept = {mu: c for mu, c in row.terms.items() if length(mu) == led}
        out.append((lam, PBWVector(spec.verma, res.weight, kept)))
    return out


def clear_echelon_cache() -> None:
    _ECHELON_CACHE.clear()
