"""Shift/offset transformation groups acting on Z[x]^m.

Every element acts coordinatewise as ``p -> p(x + a) + q``; the pair
``(a, q)`` is its normal form on that coordinate.  The generators are

* ``R_i``: add ``x**k`` on coordinate ``i``  -> ``(0, x**k)``
* ``S_i``: substitute ``x -> x + 1`` on coordinate ``i``  -> ``(1, 0)``

with letters mapped as ``2i-1 -> R_i``, ``2i -> S_i`` and, for odd rank
``d``, letter ``d -> R_m`` acting on the last coordinate.

``compose(g, h)`` is ``g o h``: ``h`` acts first.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .poly import ZERO, Polynomial, monomial, poly_add, poly_neg, poly_shift


class ArityError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class CoordAffine:
    shift: int = 0
    offset: Polynomial = ZERO

    def is_identity(self) -> bool:
        return self.shift == 0 and self.offset.is_zero()

    def __str__(self) -> str:
        return f"({self.shift}, {self.offset})"


IDENTITY_COORD = CoordAffine()


@dataclass(frozen=True, slots=True)
class GroupElement:
    coords: tuple[CoordAffine, ...]

    def __post_init__(self):
        if not self.coords:
            raise ArityError("a group element needs at least one coordinate")
        object.__setattr__(self, "coords", tuple(self.coords))

    @property
    def arity(self) -> int:
        return len(self.coords)

    @property
    def shifts(self) -> tuple[int, ...]:
        return tuple(c.shift for c in self.coords)

    def is_identity(self) -> bool:
        return all(c.is_identity() for c in self.coords)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def to_json(self) -> dict:
        return {
            "coords": [
                {"shift": c.shift, "offset": c.offset.to_json()} for c in self.coords
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "GroupElement":
        try:
            coords = data["coords"]
            return cls(
                tuple(
                    CoordAffine(int(c["shift"]), Polynomial.from_json(c["offset"]))
                    for c in coords
                )
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed group element encoding: {data!r}") from exc

    def __str__(self) -> str:
        return "[" + ", ".join(str(c) for c in self.coords) + "]"


@dataclass(frozen=True)
class GroupConfig:
    """Parameters ``k`` (degree of the added monomial) and rank ``d``."""

    k: int
    d: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")

    @property
    def m(self) -> int:
        return (self.d + 1) // 2

    def coordinate_of(self, letter: int) -> int:
        """0-based coordinate block acted on by ``letter``."""
        if not 1 <= letter <= self.d:
            raise ValueError(f"letter index {letter} outside 1..{self.d}")
        return (letter - 1) // 2


def identity(m: int) -> GroupElement:
    return GroupElement((IDENTITY_COORD,) * m)


def _single(m: int, i: int, coord: CoordAffine) -> GroupElement:
    coords = [IDENTITY_COORD] * m
    coords[i] = coord
    return GroupElement(tuple(coords))


def generator(cfg: GroupConfig, letter_index: int) -> GroupElement:
    i = cfg.coordinate_of(letter_index)
    if letter_index % 2 == 1:
        coord = CoordAffine(0, monomial(cfg.k))
    else:
        coord = CoordAffine(1, ZERO)
    return _single(cfg.m, i, coord)


def generators(cfg: GroupConfig) -> list[GroupElement]:
    return [generator(cfg, j) for j in range(1, cfg.d + 1)]


def _check_arity(g: GroupElement, h: GroupElement) -> None:
    if g.arity != h.arity:
        raise ArityError(f"arity mismatch: {g.arity} vs {h.arity}")


def _compose_coord(g: CoordAffine, h: CoordAffine) -> CoordAffine:
    # g(h(p)) = (p(x+a2) + q2)(x+a1) + q1
    if h.is_identity():
        return g
    if g.is_identity():
        return h
    return CoordAffine(g.shift + h.shift, poly_add(poly_shift(h.offset, g.shift), g.offset))


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    _check_arity(g, h)
    return GroupElement(tuple(_compose_coord(a, b) for a, b in zip(g.coords, h.coords)))


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(
        tuple(
            CoordAffine(-c.shift, poly_neg(poly_shift(c.offset, -c.shift)))
            for c in g.coords
        )
    )


def product_of(elements: Iterable[GroupElement], m: int) -> GroupElement:
    """Left-to-right product ``e1 * e2 * ... * en`` (``en`` acts first)."""
    acc = identity(m)
    for e in elements:
        acc = compose(acc, e)
    return acc


def apply(g: GroupElement, polys: Sequence[Polynomial]) -> tuple[Polynomial, ...]:
    if len(polys) != g.arity:
        raise ArityError(f"expected {g.arity} polynomials, got {len(polys)}")
    return tuple(
        poly_add(poly_shift(p, c.shift), c.offset) for p, c in zip(polys, g.coords)
    )


def commutator(g: GroupElement, h: GroupElement) -> GroupElement:
    """``[g, h] = g h g^-1 h^-1``."""
    _check_arity(g, h)
    return compose(g, compose(h, compose(inverse(g), inverse(h))))


def left_normed(elements: Sequence[GroupElement]) -> GroupElement:
    """``[g1, g2, ..., gn] = [[...[g1, g2], g3], ..., gn]``; a single entry is itself."""
    if not elements:
        raise ValueError("left-normed commutator needs at least one entry")
    acc = elements[0]
    for e in elements[1:]:
        acc = commutator(acc, e)
    return acc


@dataclass(frozen=True)
class ClassCheck:
    holds: bool
    c: int
    # 1-based letter indices of a nontrivial left-normed commutator of weight c+1
    witness_letters: tuple[int, ...] | None = None
    witness: GroupElement | None = None


def _commutator_layers(cfg: GroupConfig):
    """Yield ``(weight, {element: letters})`` for weights 2, 3, ...

    Each layer holds the distinct nontrivial left-normed generator
    commutators of that weight, keyed to the first letter sequence (in
    lexicographic order) producing them.  Trivial commutators are dropped
    since ``[1, g] = 1``.  Stops after the first empty layer.
    """
    gens = generators(cfg)
    layer: dict[GroupElement, tuple[int, ...]] = {}
    for i, j in product(range(1, cfg.d + 1), repeat=2):
        z = commutator(gens[i - 1], gens[j - 1])
        if not z.is_identity() and z not in layer:
            layer[z] = (i, j)
    weight = 2
    while True:
        yield weight, layer
        if not layer:
            return
        nxt: dict[GroupElement, tuple[int, ...]] = {}
        for z, letters in layer.items():
            for j in range(1, cfg.d + 1):
                w = commutator(z, gens[j - 1])
                if not w.is_identity() and w not in nxt:
                    nxt[w] = letters + (j,)
        layer = nxt
        weight += 1


def verify_class_at_most(cfg: GroupConfig, c: int) -> ClassCheck:
    """Decide whether the group generated by ``generators(cfg)`` has class <= c.

    Class <= c holds iff every left-normed commutator of weight c+1 in the
    generators is trivial.  For this family that reduction is exact: the
    shift map is a homomorphism onto an abelian group, so the derived
    subgroup lies in the abelian zero-shift subgroup, on which conjugation
    by an element with shift ``a`` acts as ``q -> q(x+a)``.  The lower
    central terms are then ``I^(n-2)`` times the module spanned by the
    ``[x_i, x_j]``, with ``I`` the augmentation ideal generated by the
    generator shift-differences, and ``[z, x_j]`` is exactly such a
    difference applied to ``z``.
    """
    if c < 1:
        raise ValueError(f"c must be >= 1, got {c}")
    for weight, layer in _commutator_layers(cfg):
        if weight == c + 1 or not layer:
            if not layer:
                return ClassCheck(True, c)
            z, letters = next(iter(layer.items()))
            return ClassCheck(False, c, letters, z)
    raise AssertionError("unreachable")


def nilpotency_class(cfg: GroupConfig) -> tuple[int, ClassCheck]:
    """Return the exact class and the failing check at ``class - 1``.

    The second item is None for an abelian group (class 1).
    """
    last_nontrivial: ClassCheck | None = None
    for weight, layer in _commutator_layers(cfg):
        if not layer:
            return weight - 1, last_nontrivial
        z, letters = next(iter(layer.items()))
        last_nontrivial = ClassCheck(False, weight - 1, letters, z)
    raise AssertionError("unreachable")
