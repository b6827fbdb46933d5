"""Partitions, pattern avoidance and the PBW monomial order.

A partition is a weakly decreasing tuple of positive integers; it indexes
the PBW monomial L_{-lam_1} ... L_{-lam_m}.  Parts >= 2 play the role of
the commutative power product in L_{-2}, L_{-3}, ..., while the trailing
ones record the power of L_{-1}.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

Partition = tuple[int, ...]

EMPTY: Partition = ()


def partition(parts: Iterable[int]) -> Partition:
    """Validate and normalize to a tuple; parts must be weakly decreasing."""
    lam = tuple(parts)
    for i, p in enumerate(lam):
        if p < 1:
            raise ValueError(f"parts must be positive, got {p} in {lam}")
        if i and lam[i - 1] < p:
            raise ValueError(f"parts must be weakly decreasing, got {lam}")
    return lam


def length(lam: Partition) -> int:
    """Modified length 2m + n, with m parts >= 2 and n parts equal to 1."""
    return sum(2 if p >= 2 else 1 for p in lam)


def weight(lam: Partition) -> int:
    return sum(lam)


def ones(lam: Partition) -> int:
    return sum(1 for p in lam if p == 1)


def partitions_of(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of n with parts <= max_part, largest first part first."""
    if n < 0:
        return
    if n == 0:
        yield EMPTY
        return
    if max_part is None or max_part > n:
        max_part = n
    for first in range(max_part, 0, -1):
        for rest in partitions_of(n - first, first):
            yield (first,) + rest


def contains(lam: Partition, eta: Partition) -> bool:
    """Containment: eta occurs as a contiguous window of lam."""
    k = len(eta)
    if k == 0:
        return True
    return any(lam[i:i + k] == eta for i in range(len(lam) - k + 1))


def u_divides(eta: Partition, lam: Partition) -> bool:
    """Monomial divisibility u_eta | u_lam: same number of ones, and the
    parts >= 2 of eta form a sub-multiset of those of lam."""
    if ones(eta) != ones(lam):
        return False
    big = Counter(p for p in lam if p >= 2)
    big.subtract(p for p in eta if p >= 2)
    return all(v >= 0 for v in big.values())


def compare_pbw(lam: Partition, eta: Partition) -> int:
    """Total order on PBW monomials: -1, 0 or 1 for lam <, =, > eta.

    Primary key is the modified length.  Ties are broken by degree reverse
    lexicographic order on the power products in L_{-2} > L_{-3} > ...:
    higher total degree wins; on equal degree, scan part values from the
    largest down and the monomial with fewer copies at the first differing
    value wins.  A final ones-count tie-break (more trailing L_{-1} wins)
    is kept for completeness although equal power products of equal length
    force equal partitions.
    """
    if lam == eta:
        return 0
    la, le = length(lam), length(eta)
    if la != le:
        return -1 if la < le else 1
    big_l = [p for p in lam if p >= 2]
    big_e = [p for p in eta if p >= 2]
    if len(big_l) != len(big_e):
        return -1 if len(big_l) < len(big_e) else 1
    cl, ce = Counter(big_l), Counter(big_e)
    for v in sorted(set(cl) | set(ce), reverse=True):
        d = cl.get(v, 0) - ce.get(v, 0)
        if d:
            return 1 if d < 0 else -1
    ol, oe = len(lam) - len(big_l), len(eta) - len(big_e)
    if ol != oe:
        return -1 if ol < oe else 1
    return 0


def sort_pbw(items: Iterable[Partition], reverse: bool = False) -> list[Partition]:
    """Sort partitions by compare_pbw (ascending unless reverse)."""
    items = list(items)
    universe = max((lam[0] for lam in items if lam), default=2)

    def key(lam: Partition):
        mults = [0] * (universe + 1)
        big = 0
        ones_ = 0
        for p in lam:
            if p >= 2:
                mults[p] += 1
                big += 1
            else:
                ones_ += 1
        # larger key = larger monomial; fewer copies at the largest
        # differing value wins, hence the negated multiplicities
        return (2 * big + ones_, big,
                tuple(-mults[v] for v in range(universe, 1, -1)), ones_)

    return sorted(items, key=key, reverse=reverse)


def weight_basis(n: int) -> list[Partition]:
    """All partitions of n in descending PBW order (the column order)."""
    return sort_pbw(partitions_of(n), reverse=True)


@dataclass(frozen=True)
class PatternSet:
    """A set of forbidden patterns: ordinary families [template + r] with a
    minimum r, plus finitely many exceptional partitions."""

    label: str  # one of "h0", "h1/2", "h1/16"
    ordinary: tuple[tuple[tuple[int, ...], int], ...]
    exceptional: tuple[Partition, ...]

    def members_up_to(self, max_weight: int) -> Iterator[Partition]:
        """All members of weight <= max_weight (finitely many)."""
        for offsets, min_r in self.ordinary:
            k = len(offsets)
            base = sum(offsets)
            r = min_r
            while base + k * r <= max_weight:
                yield tuple(o + r for o in offsets)
                r += 1
        for lam in self.exceptional:
            if weight(lam) <= max_weight:
                yield lam


# Shared templates of the ordinary families, as offsets added to r.
_ORDINARY_OFFSETS: tuple[tuple[int, ...], ...] = (
    (0, 0, 0),
    (1, 0, 0),
    (1, 1, 0),
    (2, 1, 0),
    (2, 2, 0),
    (2, 0, 0),
    (3, 3, 0, 0),
    (4, 3, 0, 0),
    (4, 3, 1, 0),
    (4, 4, 1, 0),
    (6, 5, 3, 1, 0),
)

# For the vacuum module the families start at r = 2 except [r+2, r, r].
R_H0 = PatternSet(
    label="h0",
    ordinary=tuple((offs, 3 if offs == (2, 0, 0) else 2)
                   for offs in _ORDINARY_OFFSETS),
    exceptional=((5, 4, 2, 2), (7, 6, 4, 2, 2), (7, 7, 4, 2, 2),
                 (9, 8, 6, 4, 2, 2)),
)

R_H12 = PatternSet(
    label="h1/2",
    ordinary=tuple((offs, 3) for offs in _ORDINARY_OFFSETS),
    exceptional=((2,), (1, 1, 1), (3, 1, 1), (3, 3), (4, 3, 1), (4, 4, 1),
                 (5, 4, 1, 1), (6, 5, 3, 1)),
)

R_H116 = PatternSet(
    label="h1/16",
    ordinary=tuple((offs, 3) for offs in _ORDINARY_OFFSETS),
    exceptional=((2,), (1, 1, 1, 1), (3, 1, 1, 1), (3, 3, 1), (4, 3, 1),
                 (4, 4, 1, 1), (5, 4, 1, 1, 1), (5, 5, 1, 1, 1),
                 (6, 5, 3, 1, 1), (6, 6, 3, 1, 1), (7, 6, 4, 1, 1, 1),
                 (8, 7, 5, 3, 1, 1)),
)

PATTERN_SETS = {ps.label: ps for ps in (R_H0, R_H12, R_H116)}


def in_P(lam: Partition, R: PatternSet) -> bool:
    """True iff lam avoids every member of R (and has parts >= 2 for h0).

    Ordinary families are instantiated only while the instantiated weight
    stays <= weight(lam); heavier patterns cannot be contained.
    """
    if R.label == "h0" and lam and lam[-1] == 1:
        return False
    w = weight(lam)
    return not any(contains(lam, eta) for eta in R.members_up_to(w))


def enumerate_P(R: PatternSet, n: int) -> list[Partition]:
    """Partitions of n avoiding R, in descending PBW order."""
    return [lam for lam in weight_basis(n) if in_P(lam, R)]


class Gt(NamedTuple):
    """Tail constraint: the part must be strictly greater than v."""
    v: int


class Eq(NamedTuple):
    """Tail constraint: the part must equal v."""
    v: int


@dataclass(frozen=True)
class TailPattern:
    """Constraints on the final parts of a partition, e.g. (Gt(5), Eq(4))
    for the family written with subscript ">5,4"."""

    items: tuple

    def __post_init__(self):
        if not self.items:
            raise ValueError("TailPattern needs at least one item")

    def matches(self, lam: Partition) -> bool:
        """Right-align the constraints on the final parts.  Constraints
        falling off the left edge of a short partition hold vacuously when
        they are Gt and fail when they are Eq: this reproduces both
        "lam_m > 2 or lam = empty" and the stripping recursions (removing
        a trailing 1 from [1] must land on the empty partition)."""
        k = len(self.items)
        off = k - len(lam)
        for i, item in enumerate(self.items):
            if i < off:
                if not isinstance(item, Gt):
                    return False
                continue
            part = lam[len(lam) - k + i]
            if isinstance(item, Gt):
                if part <= item.v:
                    return False
            elif part != item.v:
                return False
        return True

    def __str__(self) -> str:
        return ",".join(f">{it.v}" if isinstance(it, Gt) else str(it.v)
                        for it in self.items)


def enumerate_tail(R: PatternSet, tp: TailPattern, n: int) -> list[Partition]:
    """Members of enumerate_P(R, n) whose tail matches tp."""
    return [lam for lam in enumerate_P(R, n) if tp.matches(lam)]
