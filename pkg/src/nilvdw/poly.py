"""Exact integer-coefficient univariate polynomials.

A polynomial is stored densely as a tuple of coefficients in ascending
degree, ``(1, 2, 1)`` being ``x**2 + 2*x + 1``.  Trailing zeros are
always stripped, so the zero polynomial is the empty tuple and equality
of values is equality of coefficient tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence


def _normalize(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = list(coeffs)
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


@dataclass(frozen=True, slots=True)
class Polynomial:
    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        for c in self.coeffs:
            if not isinstance(c, int) or isinstance(c, bool):
                raise TypeError(f"coefficients must be integers, got {c!r}")
        object.__setattr__(self, "coeffs", _normalize(self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int]) -> "Polynomial":
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return poly_add(self, other)

    def __neg__(self) -> "Polynomial":
        return poly_neg(self)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return poly_add(self, poly_neg(other))

    def __call__(self, t: int) -> int:
        return poly_eval_int(self, t)

    def shift(self, a: int) -> "Polynomial":
        return poly_shift(self, a)

    def to_json(self) -> list[int]:
        return list(self.coeffs)

    @classmethod
    def from_json(cls, data: Sequence[int]) -> "Polynomial":
        return cls(tuple(int(c) for c in data))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                var = "x" if i == 1 else f"x^{i}"
                body = var if mag == 1 else f"{mag}{var}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)})"


ZERO = Polynomial()
ONE = Polynomial((1,))


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    a, b = p.coeffs, q.coeffs
    if len(a) < len(b):
        a, b = b, a
    res = list(a)
    for i, c in enumerate(b):
        res[i] += c
    return Polynomial(tuple(res))


def poly_neg(p: Polynomial) -> Polynomial:
    return Polynomial(tuple(-c for c in p.coeffs))


def poly_sub(p: Polynomial, q: Polynomial) -> Polynomial:
    return poly_add(p, poly_neg(q))


def poly_shift(p: Polynomial, a: int) -> Polynomial:
    """Return ``p(x + a)``.

    Uses ``sum_i c_i (x+a)^i = sum_j x^j sum_{i>=j} c_i C(i,j) a^(i-j)``.
    """
    if a == 0 or len(p.coeffs) <= 1:
        return p
    c = p.coeffs
    n = len(c)
    powers = [1] * n
    for e in range(1, n):
        powers[e] = powers[e - 1] * a
    out = [0] * n
    for i in range(n):
        ci = c[i]
        if not ci:
            continue
        for j in range(i + 1):
            out[j] += ci * comb(i, j) * powers[i - j]
    return Polynomial(tuple(out))


def monomial(k: int) -> Polynomial:
    if k < 0:
        raise ValueError(f"monomial degree must be nonnegative, got {k}")
    return Polynomial((0,) * k + (1,))


def poly_eval_int(p: Polynomial, t: int) -> int:
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * t + c
    return acc
