"""Sparse exact linear algebra over the rationals.

Two reduction strategies produce the same canonical RREF:

* `Elimination`: incremental Gauss-Jordan on sparse rational rows.  The
  echelon is kept fully reduced at all times, so it is simple and fully
  exact, but intermediate coefficient growth makes it slow past a few
  hundred columns.

* `_rref_multimodular`: dense elimination modulo word-size primes
  (numpy), Chinese-remaindered and lifted to rationals, then certified
  exactly: a witness prime proves rank >= r via a nonvanishing minor,
  and an exact rational reduction of every input row to zero against
  the lifted rows proves the row space is contained in their span.
  Together with the reduced-echelon shape this pins down the canonical
  RREF, so the result does not depend on the primes used; a failed
  certificate only ever adds more primes.

`rref_sparse` picks the strategy by matrix width.
"""

from __future__ import annotations

import numpy as np
from gmpy2 import invert, isqrt, lcm, mpz, next_prime

from .exact import ONE, QQ

_EXACT_COLS = 200          # widest matrix handled by pure Gauss-Jordan
_PRIME_START = 2 ** 29     # keeps a*b + slack inside int64 during numpy ops


class Elimination:
    """Incremental reduced row echelon form."""

    def __init__(self):
        self.rows: dict[int, dict[int, QQ]] = {}  # pivot column -> row

    def reduce(self, row: dict) -> dict:
        """Fully reduce a row against the current echelon (fresh dict).

        Stored rows carry no pivot column except their own, so one pass
        over the pivot columns in the support eliminates them all and
        introduces only non-pivot columns.
        """
        row = dict(row)
        rows = self.rows
        for j in [k for k in row if k in rows]:
            c = row.pop(j)
            for k, v in rows[j].items():
                if k == j:
                    continue
                s = row.get(k, 0) - c * v
                if s:
                    row[k] = s
                else:
                    del row[k]
        return row

    def add_row(self, row: dict) -> int | None:
        """Insert a row; returns its pivot column or None if dependent."""
        row = self.reduce(row)
        if not row:
            return None
        j = min(row)
        c = row[j]
        if c != 1:
            inv = 1 / c
            row = {k: v * inv for k, v in row.items()}
            row[j] = ONE
        # clear column j from every stored row so the echelon stays reduced
        tail = [(k, v) for k, v in row.items() if k != j]
        for other in self.rows.values():
            c2 = other.pop(j, None)
            if c2 is None:
                continue
            for k, v in tail:
                s = other.get(k, 0) - c2 * v
                if s:
                    other[k] = s
                else:
                    del other[k]
        self.rows[j] = row
        return j

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)


def rref(rows, ncols: int) -> tuple[list[dict], list[int]]:
    """RREF of the matrix given as an iterable of sparse rational rows.

    Returns (rows ordered by pivot column, sorted pivot columns).
    """
    elim = Elimination()
    for row in rows:
        elim.add_row(row)
    pivots = elim.pivots
    return [elim.rows[j] for j in pivots], pivots


def nullspace(rows, ncols: int) -> list[dict]:
    """Basis of {x : A x = 0} for A given by sparse rows.

    One vector per free column f: x_f = 1 and x_p = -row_p[f] for each
    pivot p, ordered by free column index.
    """
    red, pivots = rref(rows, ncols)
    by_pivot = dict(zip(pivots, red))
    pivot_set = set(pivots)
    out = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        vec = {f: ONE}
        for p in pivots:
            c = by_pivot[p].get(f)
            if c:
                vec[p] = -c
        out.append(vec)
    return out


# -- multimodular route -------------------------------------------------

def _int_rows(rows) -> list[dict]:
    """Clear denominators row by row; entries become mpz."""
    out = []
    for row in rows:
        den = mpz(1)
        for c in row.values():
            den = lcm(den, c.denominator)
        out.append({j: mpz(c.numerator) * (den // c.denominator)
                    for j, c in row.items()})
    return out


def _mod_rref(int_rows: list[dict], ncols: int, p: int):
    """Dense RREF mod p; returns (pivot tuple, r x ncols int64 array)."""
    m = len(int_rows)
    A = np.zeros((m, ncols), dtype=np.int64)
    for i, row in enumerate(int_rows):
        for j, v in row.items():
            A[i, j] = v % p
    r = 0
    pivots = []
    for j in range(ncols):
        if r == m:
            break
        nz = np.nonzero(A[r:, j])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        inv = pow(int(A[r, j]), p - 2, p)
        if inv != 1:
            A[r, j:] = A[r, j:] * inv % p
        below = np.nonzero(A[r + 1:, j])[0]
        if below.size:
            sub = A[r + 1:, j:]
            mult = sub[below, 0]
            sub[below] = (sub[below] - mult[:, None] * A[r, j:]) % p
        pivots.append(j)
        r += 1
    for i in range(r - 1, 0, -1):
        j = pivots[i]
        above = np.nonzero(A[:i, j])[0]
        if above.size:
            sub = A[:i, j:]
            mult = sub[above, 0]
            sub[above] = (sub[above] - mult[:, None] * A[i, j:]) % p
    return tuple(pivots), A[:r]


def _rat_reconstruct(u, M, bound):
    """Rational n/d with u*d = n (mod M), |n|, d <= bound, or None."""
    v0, v1 = M, u % M
    x0, x1 = mpz(0), mpz(1)
    while v1 > bound:
        q = v0 // v1
        v0, v1 = v1, v0 - q * v1
        x0, x1 = x1, x0 - q * x1
    if x1 == 0 or abs(x1) > bound:
        return None
    q = QQ(v1, x1)          # reduces; sign normalizes
    if (u * q.denominator - q.numerator) % M:
        return None
    return q


def _lift_rows(residues: list[dict], moduli: list[int], pivots, ncols):
    """CRT-combine per-prime RREF rows and lift entries to rationals."""
    M = mpz(1)
    comb: dict = {}
    for rows, p in zip(residues, moduli):
        if not comb:
            comb = {k: mpz(v) for k, v in rows.items()}
            M = mpz(p)
            continue
        Minv = invert(M % p, p)
        newM = M * p
        nxt = {}
        for k in comb.keys() | rows.keys():
            a = comb.get(k, mpz(0))
            b = rows.get(k, 0)
            nxt[k] = (a + M * ((b - a) * Minv % p)) % newM
        comb, M = nxt, newM
    bound = isqrt(M // 2)
    out = [dict() for _ in pivots]
    for (i, j), u in comb.items():
        q = _rat_reconstruct(u, M, bound)
        if q is None:
            return None
        if q:
            out[i][j] = q
    for i, j in enumerate(pivots):
        out[i][j] = ONE
    return out


def _shape_ok(R_rows, pivots) -> bool:
    """Reduced-echelon shape: each row leads at its own pivot with 1 and
    carries no other pivot column."""
    pivset = set(pivots)
    for j, row in zip(pivots, R_rows):
        if row.get(j) != 1 or min(row) != j:
            return False
        if len(set(row) & pivset) != 1:
            return False
    return True


def _spans(int_rows, R_rows, pivots) -> bool:
    """Exact check that every input row reduces to zero against R."""
    by_pivot = dict(zip(pivots, R_rows))
    pivset = set(pivots)
    for row in int_rows:
        resid: dict = {}
        for j, v in row.items():
            if j in pivset:
                for k, w in by_pivot[j].items():
                    if k != j:
                        resid[k] = resid.get(k, 0) - v * w
            else:
                resid[j] = resid.get(j, 0) + v
        if any(resid.values()):
            return False
    return True


def _prime_budget(int_rows: list[dict], ncols: int) -> int:
    """How many ~29-bit primes could ever be needed.

    RREF entries are ratios of minors of the integer matrix, so numerator
    and denominator are bounded by the Hadamard bound H; reconstruction
    is guaranteed once the CRT modulus exceeds 2 H^2, and only finitely
    many primes divide any fixed pivot minor.  The budget is a safety rail
    against logic errors, not a working figure: certified results land
    after a handful of primes."""
    n = min(len(int_rows), ncols)
    b = max((abs(v).bit_length() for row in int_rows for v in row.values()),
            default=1)
    h_bits = n * (b + ncols.bit_length())
    return max(8, (2 * h_bits) // 29 + 4)


def _rref_multimodular(rows: list[dict], ncols: int):
    int_rows = _int_rows(rows)
    if not any(int_rows):
        return [], []
    budget = _prime_budget(int_rows, ncols)
    prime = _PRIME_START
    runs: list[tuple[int, tuple, dict]] = []   # (p, pivots, sparse rows)
    while len(runs) < budget:
        want = min(budget, 3 if not runs else 2 * len(runs))
        while len(runs) < want:
            prime = int(next_prime(prime))
            piv, dense = _mod_rref(int_rows, ncols, prime)
            ii, jj = np.nonzero(dense)
            vals = dense[ii, jj]
            sparse = {(int(i), int(j)): int(v)
                      for i, j, v in zip(ii, jj, vals)}
            runs.append((prime, piv, sparse))
        # the true pivot sequence has maximal rank and is lexicographically
        # smallest; modularly degenerate primes only lose rank or shift
        # pivots right, and the certificate below catches a wrong guess
        best = max((len(piv), tuple(-j for j in piv)) for _, piv, _ in runs)
        good = [(p, piv, s) for p, piv, s in runs
                if (len(piv), tuple(-j for j in piv)) == best]
        pivots = list(good[0][1])
        lifted = _lift_rows([s for _, _, s in good], [p for p, _, _ in good],
                            pivots, ncols)
        if lifted is not None and _shape_ok(lifted, pivots) \
                and _spans(int_rows, lifted, pivots):
            # rank >= len(pivots) is witnessed by the good primes (the
            # pivot minor is invertible mod p), so span containment makes
            # `lifted` the canonical RREF of the row space
            return lifted, pivots
    raise RuntimeError(f"multimodular RREF did not stabilize "
                       f"after {budget} primes")


def rref_sparse(rows, ncols: int) -> tuple[list[dict], list[int]]:
    """Canonical RREF of sparse rational rows: (rows by pivot, pivots)."""
    rows = list(rows)
    if ncols <= _EXACT_COLS:
        return rref(rows, ncols)
    return _rref_multimodular(rows, ncols)
