"""Exact rational scalars shared by every module.

All arithmetic in this package is exact.  Internally we prefer gmpy2's
mpq (much faster than Fraction on long elimination runs); the public
behaviour is identical because mpq and Fraction mix freely in Python
arithmetic, compare equal and hash alike.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    QQ = Fraction

ZERO = QQ(0)
ONE = QQ(1)


def rat_str(x) -> str:
    """Canonical lowest-terms string "num/den" with den > 0."""
    q = QQ(x)
    return f"{q.numerator}/{q.denominator}"


def parse_rat(s: str):
    """Parse "num/den" or a bare integer string into an exact rational."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return QQ(int(num), int(den))
    return QQ(int(s))


def as_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))
