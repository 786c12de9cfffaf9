"""The bigraded differential algebra E_m computing H*(G(S^m; A, B, n)).

Generators are ``s_0..s_n`` of bidegree (0, m-1) and ``u_1..u_n`` of
bidegree (m, 0), subject to

* graded commutativity with Koszul signs (total degree), ``s_i^2 = u_j^2 = 0``;
* ``s_0 s_1 ... s_n = 0``;
* ``u_1 s_0 = 0``, ``u_n s_n = 0`` and ``u_i s_i = u_{i+1} s_i``.

A monomial is kept in normal form: s-indices ascending, then u-indices
ascending, each u replaced by the smallest slot of its block in the interval
partition of {0..n+1} generated by ``i ~ i+1`` for every s_i present.

The same class with ``with_u=False`` is the algebra generated by the s_i
alone (the cohomology of the open string configuration space of R^m).
"""

from __future__ import annotations

import re
from functools import lru_cache
from itertools import combinations
from typing import NamedTuple

from .field import QQ, Field


class AlgebraError(ValueError):
    pass


class Monomial(NamedTuple):
    s: tuple[int, ...] = ()
    u: tuple[int, ...] = ()

    def bidegree(self, m: int) -> tuple[int, int]:
        return m * len(self.u), (m - 1) * len(self.s)

    def degree(self, m: int) -> int:
        return m * len(self.u) + (m - 1) * len(self.s)

    def __str__(self) -> str:
        if not self.s and not self.u:
            return "1"
        return " ".join([f"s{i}" for i in self.s] + [f"u{j}" for j in self.u])


ONE = Monomial()


def blocks(sset, n: int) -> list[tuple[int, int]]:
    """Interval partition of {0..n+1} generated by i ~ i+1 for i in ``sset``, as (first, last) pairs."""
    present = set(sset)
    out = []
    start = 0
    for i in range(n + 1):
        if i not in present:
            out.append((start, i))
            start = i + 1
    out.append((start, n + 1))
    return out


def free_slots(sset, n: int) -> list[int]:
    """Representatives of the blocks touching neither 0 nor n+1 (where a u may survive)."""
    return [a for a, b in blocks(sset, n) if a != 0 and b != n + 1]


def _representative(j: int, sset: tuple, n: int) -> int | None:
    present = set(sset)
    lo = j
    while lo - 1 in present:  # s_{lo-1} joins slot lo-1 to lo
        lo -= 1
    hi = j
    while hi in present:
        hi += 1
    if lo == 0 or hi == n + 1:
        return None
    return lo


class Algebra:
    """E_m for X = S^m with n reflection slots, over ``field``."""

    def __init__(self, m: int, n: int, field: Field = QQ, with_u: bool = True):
        if m < 2:
            raise AlgebraError(f"need m >= 2, got {m}")
        if n < 1:
            raise AlgebraError(f"need n >= 1, got {n}")
        self.m = m
        self.n = n
        self.field = field
        self.with_u = with_u
        self._mul_cache: dict = {}
        self._d_cache: dict = {}

    def __repr__(self):
        kind = "E" if self.with_u else "Rm"
        return f"Algebra({kind}, m={self.m}, n={self.n}, field={self.field})"

    def __eq__(self, other):
        return (
            isinstance(other, Algebra)
            and (self.m, self.n, self.field, self.with_u) == (other.m, other.n, other.field, other.with_u)
        )

    def __hash__(self):
        return hash((self.m, self.n, self.field, self.with_u))

    # -- generators and degrees

    @property
    def s_degree(self) -> int:
        return self.m - 1

    @property
    def u_degree(self) -> int:
        return self.m

    def gen_degree(self, kind: str) -> int:
        return self.s_degree if kind == "s" else self.u_degree

    def _check(self, kind: str, i: int) -> None:
        if kind == "s":
            if not 0 <= i <= self.n:
                raise AlgebraError(f"s index {i} out of range 0..{self.n}")
        elif kind == "u":
            if not self.with_u:
                raise AlgebraError("this algebra has no u generators")
            if not 1 <= i <= self.n:
                raise AlgebraError(f"u index {i} out of range 1..{self.n}")
        else:
            raise AlgebraError(f"unknown generator kind {kind!r}")

    # -- normal form

    def normalize(self, word):
        """Bring a word of generators ``[('s', i) | ('u', j), ...]`` to normal form.

        Returns ``(Monomial, sign)`` or ``None`` when the word is zero in E_m.
        """
        word = list(word)
        for kind, i in word:
            self._check(kind, i)
        sign = 1
        # bubble sort into (s ascending, u ascending), one Koszul sign per swap
        key = lambda g: (0 if g[0] == "s" else 1, g[1])
        for end in range(len(word) - 1, 0, -1):
            for k in range(end):
                a, b = word[k], word[k + 1]
                if key(a) > key(b):
                    word[k], word[k + 1] = b, a
                    if (self.gen_degree(a[0]) * self.gen_degree(b[0])) % 2:
                        sign = -sign
        s = tuple(i for kind, i in word if kind == "s")
        u = [j for kind, j in word if kind == "u"]
        if len(set(s)) != len(s) or len(s) == self.n + 1:
            return None
        reps = []
        for j in u:
            r = _representative(j, s, self.n)
            if r is None:
                return None
            reps.append(r)
        # reps are in the order of the original u-sort; re-sort, sign (-1)^{m*m} per swap
        u_sign_odd = (self.u_degree * self.u_degree) % 2 == 1
        for end in range(len(reps) - 1, 0, -1):
            for k in range(end):
                if reps[k] > reps[k + 1]:
                    reps[k], reps[k + 1] = reps[k + 1], reps[k]
                    if u_sign_odd:
                        sign = -sign
        if len(set(reps)) != len(reps):
            return None
        return Monomial(s, tuple(reps)), sign

    def monomial_product(self, a: Monomial, b: Monomial):
        key = (a, b)
        if key not in self._mul_cache:
            word = [("s", i) for i in a.s] + [("u", j) for j in a.u] + [("s", i) for i in b.s] + [("u", j) for j in b.u]
            self._mul_cache[key] = self.normalize(word)
        return self._mul_cache[key]

    # -- elements

    def element(self, terms=None) -> AlgebraElement:
        return AlgebraElement(self, terms or {})

    def one(self) -> AlgebraElement:
        return self.element({ONE: 1})

    def zero(self) -> AlgebraElement:
        return self.element({})

    def s(self, i: int) -> AlgebraElement:
        self._check("s", i)
        return self.element({Monomial((i,), ()): 1})

    def u(self, j: int) -> AlgebraElement:
        self._check("u", j)
        res = self.normalize([("u", j)])
        return self.element({res[0]: res[1]} if res else {})

    def word(self, word, coeff=1) -> AlgebraElement:
        res = self.normalize(word)
        if res is None:
            return self.zero()
        mono, sign = res
        return self.element({mono: sign * self.field(coeff)})

    def parse(self, text: str) -> AlgebraElement:
        """Inverse of ``str``: e.g. ``'-1*s0 s1 u2 + 2*s3'``."""
        text = text.strip()
        if text in ("", "0"):
            return self.zero()
        total = self.zero()
        for sgn, body in re.findall(r"([+-]?)\s*([^+-]+)", text):
            body = body.strip()
            if "*" in body:
                coeff_txt, gens = body.split("*", 1)
            elif re.fullmatch(r"[0-9/]+", body):
                coeff_txt, gens = body, ""
            else:
                coeff_txt, gens = "1", body
            coeff = self.field.parse(coeff_txt)
            if sgn == "-":
                coeff = self.field.neg(coeff)
            word = []
            for tok in gens.split():
                if tok == "1":
                    continue
                mt = re.fullmatch(r"([su])(\d+)", tok)
                if not mt:
                    raise AlgebraError(f"bad generator {tok!r}")
                word.append((mt.group(1), int(mt.group(2))))
            total = total + self.word(word, coeff)
        return total

    # -- differential

    def d_generator(self, i: int) -> dict[int, int]:
        """d(s_i) as ``{u index: coefficient}``, following the sign tables for odd and even m."""
        n = self.n
        odd = self.m % 2 == 1
        if i == 0:
            return {1: -1 if odd else 1}
        if i == n:
            return {n: 1}
        return {i: 1, i + 1: -1 if odd else 1}

    def d_monomial(self, mono: Monomial) -> dict[Monomial, object]:
        if not self.with_u:
            return {}
        if mono in self._d_cache:
            return self._d_cache[mono]
        F = self.field
        out: dict[Monomial, object] = {}
        for pos, i in enumerate(mono.s):
            koszul = -1 if (pos * self.s_degree) % 2 else 1
            for j, c in self.d_generator(i).items():
                # replace s_i by u_j in place: s_..., u_j, s_..., u...
                word = (
                    [("s", k) for k in mono.s[:pos]]
                    + [("u", j)]
                    + [("s", k) for k in mono.s[pos + 1:]]
                    + [("u", k) for k in mono.u]
                )
                res = self.normalize(word)
                if res is None:
                    continue
                m2, sign = res
                out[m2] = F.add(out.get(m2, F.zero), F(koszul * sign * c))
        out = {k: v for k, v in out.items() if v != 0}
        self._d_cache[mono] = out
        return out

    # -- basis

    def all_monomials(self) -> list[Monomial]:
        n = self.n
        out = []
        for r in range(n + 1):  # |S| = n+1 is the excluded full product
            for sset in combinations(range(n + 1), r):
                slots = free_slots(sset, n) if self.with_u else []
                for t in range(len(slots) + 1):
                    for uset in combinations(slots, t):
                        out.append(Monomial(sset, uset))
        out.sort()
        return out

    def basis(self, degree: int | None = None) -> list[Monomial]:
        """Normal-form monomials, ordered by s-set then u-set; all degrees when ``degree`` is None."""
        return _basis_cached(self.m, self.n, self.with_u, degree)

    def bidegree_basis(self, n_s: int, n_u: int) -> list[Monomial]:
        return [b for b in _basis_cached(self.m, self.n, self.with_u, None) if len(b.s) == n_s and len(b.u) == n_u]

    def max_degree(self) -> int:
        return max(b.degree(self.m) for b in self.basis())


@lru_cache(maxsize=None)
def _basis_cached(m: int, n: int, with_u: bool, degree):
    alg = Algebra(m, n, QQ, with_u)
    mons = alg.all_monomials()
    if degree is None:
        return tuple(mons)
    return tuple(b for b in mons if b.degree(m) == degree)


class AlgebraElement:
    """Finite linear combination of normal-form monomials; immutable."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: Algebra, terms: dict):
        F = algebra.field
        clean = {}
        for mono, c in terms.items():
            c = F(c)
            if c != 0:
                clean[mono] = c
        self.algebra = algebra
        self.terms = clean

    def _same(self, other: AlgebraElement) -> None:
        if not isinstance(other, AlgebraElement) or other.algebra != self.algebra:
            raise AlgebraError("elements belong to different algebras")

    def __add__(self, other):
        self._same(other)
        F = self.algebra.field
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = F.add(out.get(k, F.zero), v)
        return AlgebraElement(self.algebra, out)

    def __neg__(self):
        F = self.algebra.field
        return AlgebraElement(self.algebra, {k: F.neg(v) for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> AlgebraElement:
        F = self.algebra.field
        c = F(c)
        return AlgebraElement(self.algebra, {k: F.mul(c, v) for k, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        self._same(other)
        alg = self.algebra
        F = alg.field
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                res = alg.monomial_product(a, b)
                if res is None:
                    continue
                mono, sign = res
                c = F.mul(ca, cb)
                out[mono] = F.add(out.get(mono, F.zero), c if sign > 0 else F.neg(c))
        return AlgebraElement(alg, out)

    def __pow__(self, k: int):
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, AlgebraElement) and other.algebra == self.algebra and other.terms == self.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def d(self) -> AlgebraElement:
        alg = self.algebra
        F = alg.field
        out: dict = {}
        for mono, c in self.terms.items():
            for m2, c2 in alg.d_monomial(mono).items():
                out[m2] = F.add(out.get(m2, F.zero), F.mul(c, c2))
        return AlgebraElement(alg, out)

    def degrees(self) -> set[int]:
        return {mono.degree(self.algebra.m) for mono in self.terms}

    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) != 1:
            raise AlgebraError(f"element is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def coefficient(self, mono: Monomial):
        return self.terms.get(mono, self.algebra.field.zero)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms):
            parts.append(f"{self.terms[mono]}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def normalize(word, m: int, n: int):
    """Normal form of a generator word in E_m; see :meth:`Algebra.normalize`."""
    return Algebra(m, n).normalize(word)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b


def differential(a: AlgebraElement) -> AlgebraElement:
    return a.d()


def basis(m: int, n: int, total_degree: int | None = None) -> list[Monomial]:
    return list(_basis_cached(m, n, True, total_degree))
