"""Exact rank and linear solves over a :class:`~billiards.field.Field`.

Vectors and matrix rows are sparse dicts ``{index: coefficient}``.  Over Q the
rank uses fraction-free integer elimination (rows are kept primitive by
dividing out their content); over F_p ordinary elimination modulo p.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .field import Field


def _integer_row(row: dict) -> dict[int, int]:
    den = 1
    for v in row.values():
        den = lcm(den, Fraction(v).denominator)
    out = {}
    for k, v in row.items():
        iv = Fraction(v) * den
        if iv:
            out[k] = int(iv)
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    return row


def _reduce_integer(row: dict[int, int], pivots: dict[int, dict[int, int]]) -> dict[int, int]:
    while row:
        c = min(row)
        prow = pivots.get(c)
        if prow is None:
            return row
        a, b = prow[c], row[c]
        g = gcd(a, b)
        a, b = a // g, b // g
        new = {k: a * v for k, v in row.items()}
        for k, v in prow.items():
            w = new.get(k, 0) - b * v
            if w:
                new[k] = w
            else:
                new.pop(k, None)
        row = _primitive(new)
    return row


def _reduce_mod(row: dict[int, int], pivots: dict[int, dict[int, int]], p: int) -> dict[int, int]:
    # pivot rows are normalised to leading coefficient 1
    while row:
        c = min(row)
        prow = pivots.get(c)
        if prow is None:
            return row
        f = row[c]
        for k, v in prow.items():
            w = (row.get(k, 0) - f * v) % p
            if w:
                row[k] = w
            else:
                row.pop(k, None)
    return row


class EchelonBasis:
    """Incrementally built row echelon form; ``rank`` is the number of pivots."""

    def __init__(self, field: Field):
        self.field = field
        self.pivots: dict[int, dict] = {}

    def reduce(self, row: dict) -> dict:
        if self.field.p == 0:
            return _reduce_integer(_integer_row(row), self.pivots)
        p = self.field.p
        r = {k: v % p for k, v in ((k, self.field(v)) for k, v in row.items()) if v % p}
        return _reduce_mod(r, self.pivots, p)

    def add(self, row: dict) -> bool:
        """Insert ``row``; True when it was independent of the rows so far."""
        r = self.reduce(row)
        if not r:
            return False
        c = min(r)
        if self.field.p:
            inv = pow(r[c], -1, self.field.p)
            r = {k: v * inv % self.field.p for k, v in r.items()}
        self.pivots[c] = r
        return True

    def contains(self, row: dict) -> bool:
        return not self.reduce(row)

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rank(rows, field: Field) -> int:
    eb = EchelonBasis(field)
    for row in rows:
        eb.add(row)
    return eb.rank


def solve(columns: list[dict], target: dict, field: Field):
    """Find coefficients x with ``sum(x_j * columns[j]) == target``.

    Dense Gauss-Jordan on the augmented system.  Returns a list of field
    elements (free variables set to zero) or ``None`` if inconsistent.
    """
    F = field
    index = sorted(set().union(*[c.keys() for c in columns], target.keys()))
    pos = {k: i for i, k in enumerate(index)}
    ncols = len(columns)
    M = [[F.zero] * (ncols + 1) for _ in index]
    for j, col in enumerate(columns):
        for k, v in col.items():
            M[pos[k]][j] = F(v)
    for k, v in target.items():
        M[pos[k]][ncols] = F(v)

    pivot_cols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, v) for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(M[i], M[r])]
        pivot_cols.append(c)
        r += 1
    if any(M[i][ncols] != 0 for i in range(r, len(M))):
        return None
    x = [F.zero] * ncols
    for i, c in enumerate(pivot_cols):
        x[c] = M[i][ncols]
    return x
