"""Weight matrices, pivot extraction and the quotient-module bases."""

import random

import pytest

from ising_pbw.exact import QQ
from ising_pbw.partitions import enumerate_P, length, partitions_of
from ising_pbw.qseries import theorem_rhs, first_mismatch
from ising_pbw.reduction import (build_An, cross_check, echelon, module_spec,
                                 quotient_basis, refined_character,
                                 resolve_threads, rref, uK_fixtures)
from ising_pbw.virasoro import apply_mode

LABELS = ("h0", "h1/2", "h1/16")


def test_module_specs_are_singular():
    for label in LABELS:
        spec = module_spec(label)
        for gen in spec.generators:
            assert not apply_mode(1, gen), f"{label} generator at {gen.weight}"
            assert not apply_mode(2, gen), f"{label} generator at {gen.weight}"
    with pytest.raises(ValueError):
        module_spec("h3/2")


def test_weight4_reduced_matrix():
    res = rref(build_An(module_spec("h1/2"), 4))
    assert res.pivots == [(2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert res.non_pivots == [(3, 1), (4,)]
    assert res.rows[0].terms == {(2, 2): QQ(1), (3, 1): QQ(-3, 16),
                                 (4,): QQ(-15, 8)}
    assert res.rows[1].terms == {(2, 1, 1): QQ(1), (3, 1): QQ(-1, 4),
                                 (4,): QQ(-5, 2)}
    assert res.rows[2].terms == {(1, 1, 1, 1): QQ(1), (3, 1): QQ(-3),
                                 (4,): QQ(-6)}


def test_streamed_equals_materialized():
    # echelon() generates rows along the shared-suffix tree; the result
    # must be identical to reducing the materialized matrix
    for label in LABELS:
        spec = module_spec(label)
        for n in range(8):
            a = echelon(spec, n)
            b = rref(build_An(spec, n))
            assert a.pivots == b.pivots, f"{label} n={n}"
            assert [r.terms for r in a.rows] == [r.terms for r in b.rows], \
                f"{label} n={n}"


def test_row_permutation_invariance():
    spec = module_spec("h1/2")
    matrix = build_An(spec, 6)
    base = rref(matrix)
    rng = random.Random(4)
    for _ in range(3):
        rng.shuffle(matrix.rows)
        again = rref(matrix)
        assert again.pivots == base.pivots
        assert [r.terms for r in again.rows] == [r.terms for r in base.rows]


def test_rref_rows_are_reduced():
    for label in LABELS:
        spec = module_spec(label)
        res = echelon(spec, 7)
        pivset = set(res.pivots)
        for lam, row in zip(res.pivots, res.rows):
            assert row.terms[lam] == 1, f"{label}: pivot coefficient at {lam}"
            assert row.leading_monomial() == lam, f"{label}: lead at {lam}"
            assert set(row.terms) & pivset == {lam}, \
                f"{label}: row at {lam} touches another pivot column"


def test_rank_plus_nullity():
    counts = [1, 1, 2, 3, 5, 7, 11, 15, 22]
    for label in LABELS:
        spec = module_spec(label)
        for n in range(9):
            res = echelon(spec, n)
            assert res.rank + len(res.non_pivots) == counts[n], \
                f"{label} n={n}"


def test_quotient_basis_matches_enumeration():
    spec = module_spec("h0")
    basis = quotient_basis(spec, 8)
    dims = [1, 0, 1, 1, 2, 2, 3, 3, 5]
    for n in range(9):
        assert basis[n] == enumerate_P(spec.patterns, n), f"n={n}"
        assert len(basis[n]) == dims[n]
        assert all(1 not in lam for lam in basis[n])


def test_refined_character_smoke():
    spec = module_spec("h1/2")
    f = refined_character(spec, 0)
    assert f.terms == {(0, 8): QQ(1)}, "just t^0 q^(1/2)"
    f = refined_character(spec, 6)
    # t-degrees record the modified length of each basis partition
    expected = {}
    for n in range(7):
        for lam in enumerate_P(spec.patterns, n):
            k = (length(lam), 8 + 16 * n)
            expected[k] = expected.get(k, 0) + 1
    assert f.terms == {k: QQ(v) for k, v in expected.items()}
    assert first_mismatch(f, theorem_rhs("T3", 6)) is None


def test_cross_check_clean():
    report = cross_check(module_spec("h1/16"), 6)
    assert all(wc.passed for wc in report)
    assert all(not wc.unexpected_pivots for wc in report)
    as_json = report[-1].to_json()
    assert as_json["n"] == 6 and as_json["passed"] is True


def test_uk_fixtures_smoke():
    fixtures = dict(uK_fixtures(module_spec("h1/2")))
    assert fixtures[(2,)].terms == {(2,): QQ(1), (1, 1): QQ(-3, 4)}
    assert fixtures[(1, 1, 1)].terms == {(1, 1, 1): QQ(1)}
    with pytest.raises(ValueError):
        uK_fixtures(module_spec("h0"))


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("ISING_PBW_THREADS", raising=False)
    assert resolve_threads(None) == 1
    assert resolve_threads(3) == 3
    assert resolve_threads(0) >= 1
    monkeypatch.setenv("ISING_PBW_THREADS", "5")
    assert resolve_threads(None) == 5
    assert resolve_threads(2) == 2, "explicit flag beats the environment"


def test_echelon_results_are_cached():
    spec = module_spec("h1/2")
    assert echelon(spec, 5) is echelon(spec, 5)
