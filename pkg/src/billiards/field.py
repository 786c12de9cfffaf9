"""Exact coefficient fields: the rationals and prime fields F_p."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Field:
    """Coefficient field; ``p == 0`` means Q, otherwise F_p.

    Elements are plain Python values: :class:`fractions.Fraction` over Q and
    ints in ``range(p)`` over F_p.  Calling the field coerces a value into it.
    """

    p: int = 0

    def __post_init__(self):
        if self.p != 0 and not _is_prime(self.p):
            raise ValueError(f"F_p needs p prime, got {self.p}")

    @property
    def name(self) -> str:
        return "q" if self.p == 0 else f"f{self.p}"

    @property
    def characteristic(self) -> int:
        return self.p

    def __call__(self, x):
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator % self.p) * pow(x.denominator % self.p, -1, self.p) % self.p
        return int(x) % self.p

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def add(self, a, b):
        return a + b if self.p == 0 else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p == 0 else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p == 0 else (a * b) % self.p

    def neg(self, a):
        return -a if self.p == 0 else (-a) % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a) if self.p == 0 else pow(a, -1, self.p)

    def to_str(self, a) -> str:
        return str(a)

    def parse(self, text: str):
        return self(Fraction(text))

    @classmethod
    def from_name(cls, name: str) -> Field:
        """Parse ``q``, ``Q``, ``f2``, ``F3``, ``2`` ..."""
        key = name.strip().lower()
        if key in ("q", "qq", "rational", "0"):
            return cls(0)
        if key.startswith("f"):
            key = key[1:]
        try:
            return cls(int(key))
        except ValueError:
            raise ValueError(f"unknown field {name!r}") from None

    def __str__(self) -> str:
        return "Q" if self.p == 0 else f"F{self.p}"


QQ = Field(0)
GF2 = Field(2)
