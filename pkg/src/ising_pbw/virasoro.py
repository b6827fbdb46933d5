"""Verma modules over the Virasoro algebra with exact arithmetic.

Vectors live in M(c, h) and are stored in the PBW basis: the partition
(lam_1 >= ... >= lam_m) indexes L_{-lam_1} ... L_{-lam_m} |h>.  Modes act
by the commutation rule

    [L_j, L_k] = (j - k) L_{j+k} + delta_{j,-k} (j^3 - j)/12 * c,

straightened recursively; results of L_k on a basis monomial are memoized
per (c, h) since the row computations reuse them heavily.
"""

from __future__ import annotations

from typing import NamedTuple

from .exact import ONE, QQ, as_fraction, parse_rat, rat_str
from .linalg import nullspace
from .partitions import (Partition, compare_pbw, sort_pbw, weight,
                         weight_basis)


class VermaSpec(NamedTuple):
    """Central charge and highest weight, as exact rationals."""
    c: QQ
    h: QQ


def verma(c, h) -> VermaSpec:
    return VermaSpec(QQ(c), QQ(h))


class PBWVector:
    """Element of a single weight space M(c,h)_{h+weight}.

    terms maps partitions of `weight` to nonzero coefficients.  The zero
    vector still carries its weight (which may be negative, for the image
    of a raising mode past the top of the module).
    """

    __slots__ = ("spec", "weight", "terms")

    def __init__(self, spec: VermaSpec, weight_: int, terms: dict):
        self.spec = spec
        self.weight = weight_
        clean = {}
        for lam, coef in terms.items():
            if weight(lam) != weight_:
                raise ValueError(
                    f"monomial {lam} has weight {weight(lam)}, not {weight_}")
            if coef:
                clean[lam] = QQ(coef)
        self.terms = clean

    def __add__(self, other: "PBWVector") -> "PBWVector":
        if self.spec != other.spec or self.weight != other.weight:
            raise ValueError("can only add vectors of equal spec and weight")
        out = dict(self.terms)
        for lam, c in other.terms.items():
            s = out.get(lam, 0) + c
            if s:
                out[lam] = s
            else:
                del out[lam]
        v = PBWVector.__new__(PBWVector)
        v.spec, v.weight, v.terms = self.spec, self.weight, out
        return v

    def __sub__(self, other: "PBWVector") -> "PBWVector":
        return self + (-1) * other

    def __mul__(self, scalar) -> "PBWVector":
        c = QQ(scalar)
        v = PBWVector.__new__(PBWVector)
        v.spec, v.weight = self.spec, self.weight
        v.terms = {lam: c * x for lam, x in self.terms.items()} if c else {}
        return v

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PBWVector):
            return NotImplemented
        return (self.spec == other.spec and self.weight == other.weight
                and self.terms == other.terms)

    def __hash__(self):  # pragma: no cover
        return hash((self.spec, self.weight, frozenset(self.terms)))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self) -> list[tuple[Partition, QQ]]:
        """Terms in descending PBW order of the monomial."""
        order = sort_pbw(self.terms, reverse=True)
        return [(lam, self.terms[lam]) for lam in order]

    def leading_monomial(self) -> Partition | None:
        if not self.terms:
            return None
        return self.sorted_terms()[0][0]

    def normalized(self) -> "PBWVector":
        """Scale so the PBW-largest monomial has coefficient 1."""
        lm = self.leading_monomial()
        if lm is None:
            return self
        return self * (1 / self.terms[lm])

    def is_multiple_of(self, other: "PBWVector") -> bool:
        """True iff self = s * other for some nonzero scalar s."""
        if set(self.terms) != set(other.terms):
            return False
        if not self.terms:
            return True
        lam = next(iter(self.terms))
        s = self.terms[lam] / other.terms[lam]
        return all(c == s * other.terms[m] for m, c in self.terms.items())

    def __repr__(self) -> str:
        parts = [f"{rat_str(c)}*L{list(lam) if lam else '[]'}"
                 for lam, c in self.sorted_terms()]
        body = " + ".join(parts) if parts else "0"
        return f"<{body} at weight {self.weight}>"

    def to_json(self) -> dict:
        return {
            "h": rat_str(self.spec.h),
            "c": rat_str(self.spec.c),
            "weight": self.weight,
            "terms": [[list(lam), rat_str(c)]
                      for lam, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PBWVector":
        spec = verma(parse_rat(data["c"]), parse_rat(data["h"]))
        terms = {tuple(lam): parse_rat(c) for lam, c in data["terms"]}
        return cls(spec, data["weight"], terms)


def pbw_vector(spec: VermaSpec, weight_: int, terms: dict) -> PBWVector:
    return PBWVector(spec, weight_, {tuple(k): v for k, v in terms.items()})


# -- mode action --------------------------------------------------------

# (c, h) -> {(k, monomial) -> {monomial: coefficient}}
_MODE_CACHE: dict[VermaSpec, dict] = {}


def clear_caches() -> None:
    _MODE_CACHE.clear()


def _acc(out: dict, key, val) -> None:
    s = out.get(key, 0) + val
    if s:
        out[key] = s
    else:
        out.pop(key, None)


def _mode(spec: VermaSpec, k: int, mu: Partition, memo: dict | None) -> dict:
    """Terms of L_k applied to the basis monomial mu, straightened."""
    if memo is not None:
        hit = memo.get((k, mu))
        if hit is not None:
            return hit
    if not mu:
        if k > 0:
            out = {}
        elif k == 0:
            out = {(): spec.h} if spec.h else {}
        else:
            out = {(-k,): ONE}
    elif k == 0:
        out = {mu: spec.h + weight(mu)}
    elif k < 0 and -k >= mu[0]:
        out = {(-k,) + mu: ONE}
    else:
        # L_k L_{-m} = L_{-m} L_k + (k + m) L_{k-m} + delta_{k,m} (k^3-k)/12 c
        m, rest = mu[0], mu[1:]
        out: dict = {}
        for nu, cf in _mode(spec, k, rest, memo).items():
            for nu2, cf2 in _mode(spec, -m, nu, memo).items():
                _acc(out, nu2, cf * cf2)
        if k != -m:  # (k + m) is nonzero
            cf0 = QQ(k + m)
            for nu, cf in _mode(spec, k - m, rest, memo).items():
                _acc(out, nu, cf0 * cf)
        if k == m:
            central = QQ(k ** 3 - k, 12) * spec.c
            if central:
                _acc(out, rest, central)
    if memo is not None:
        memo[(k, mu)] = out
    return out


def apply_mode(k: int, v: PBWVector, use_cache: bool = True) -> PBWVector:
    """L_k applied to v; the result has weight v.weight - k."""
    memo = _MODE_CACHE.setdefault(v.spec, {}) if use_cache else None
    out: dict = {}
    for mu, cf in v.terms.items():
        for nu, cf2 in _mode(v.spec, k, mu, memo).items():
            _acc(out, nu, cf * cf2)
    res = PBWVector.__new__(PBWVector)
    res.spec, res.weight, res.terms = v.spec, v.weight - k, out
    return res


def apply_word(mu: Partition, v: PBWVector, use_cache: bool = True) -> PBWVector:
    """L_{-mu_1} ... L_{-mu_m} applied to v, rightmost factor first."""
    for part in reversed(mu):
        v = apply_mode(-part, v, use_cache)
    return v


def singular_vectors(spec: VermaSpec, n: int) -> list[PBWVector]:
    """Basis of the singular vectors of M(c,h) at weight h + n.

    Computed as the joint kernel of L_1 and L_2 (which generate all
    positive modes) on the weight-n space; each vector is normalized so
    its PBW-largest monomial has coefficient 1.
    """
    cols = weight_basis(n)
    targets: dict[tuple[int, Partition], int] = {}
    rows: dict[int, dict] = {}
    for k in (1, 2):
        if n - k < 0:
            continue
        for tau in weight_basis(n - k):
            targets[(k, tau)] = len(targets)
    for j, lam in enumerate(cols):
        v = PBWVector(spec, n, {lam: ONE})
        for k in (1, 2):
            if n - k < 0:
                continue
            img = apply_mode(k, v)
            for tau, cf in img.terms.items():
                rows.setdefault(targets[(k, tau)], {})[j] = cf
    kernel = nullspace(list(rows.values()), len(cols))
    out = []
    for vec in kernel:
        terms = {cols[j]: c for j, c in vec.items()}
        out.append(PBWVector(spec, n, terms).normalized())
    return out
