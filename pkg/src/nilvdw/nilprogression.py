"""Nilprogressions ``A = {w(x_1, ..., x_d) * a : w in words}`` and searches for them.

Containment searches are relative to finite generator and base pools;
nothing here says anything about elements outside those pools.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from ._parallel import chunked_map
from .nilgroup import GroupConfig, GroupElement, compose, generators, identity, inverse
from .words import (
    DEFAULT_CONVENTION,
    WordConvention,
    class_key,
    count_words,
    enumerate_letters,
    evaluate_letters,
)


@dataclass(frozen=True)
class ProgressionSpec:
    step: int
    length: int
    rank: int

    def __post_init__(self):
        for name in ("step", "length", "rank"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")

    def to_json(self) -> dict:
        return {"step": self.step, "length": self.length, "rank": self.rank}


@dataclass(frozen=True)
class Nilprogression:
    spec: ProgressionSpec
    generators: tuple[GroupElement, ...]
    base: GroupElement
    conv: WordConvention
    # distinct elements in order of first occurrence over the enumerated words
    elements: tuple[GroupElement, ...]
    word_count: int
    # every word class maps to a single element (always true for raw words)
    well_defined: bool = True

    @property
    def element_set(self) -> frozenset[GroupElement]:
        return frozenset(self.elements)


def element_sort_key(g: GroupElement):
    return tuple((c.shift, c.offset.coeffs) for c in g.coords)


def _check_assignment(spec: ProgressionSpec, gens: Sequence[GroupElement], base: GroupElement) -> None:
    if len(gens) != spec.rank:
        raise ValueError(f"expected {spec.rank} generators, got {len(gens)}")
    arities = {g.arity for g in gens} | {base.arity}
    if len(arities) != 1:
        raise ValueError(f"generators and base must share one arity, got {sorted(arities)}")


def _evaluate_chunk(chunk, gens, base):
    return [compose(evaluate_letters(w, gens), base) for w in chunk]


def build(
    spec: ProgressionSpec,
    gens: Sequence[GroupElement],
    base: GroupElement,
    conv: WordConvention = DEFAULT_CONVENTION,
    workers: int = 1,
) -> Nilprogression:
    gens = tuple(gens)
    _check_assignment(spec, gens, base)
    words = enumerate_letters(spec.rank, spec.length, conv.include_empty)
    values = chunked_map(_evaluate_chunk, words, workers, gens, base)

    seen: dict[GroupElement, None] = {}
    by_class: dict = {}
    well_defined = True
    for w, g in zip(words, values):
        seen.setdefault(g, None)
        key = class_key(w, spec.rank, conv.equivalence)
        if by_class.setdefault(key, g) != g:
            well_defined = False
    return Nilprogression(
        spec=spec,
        generators=gens,
        base=base,
        conv=conv,
        elements=tuple(seen),
        word_count=count_words(spec.rank, spec.length, conv),
        well_defined=well_defined,
    )


def is_nondegenerate(np: Nilprogression) -> bool:
    return np.well_defined and len(np.elements) == np.word_count


def _scan(
    V: frozenset[GroupElement],
    spec: ProgressionSpec,
    gens: tuple[GroupElement, ...],
    base: GroupElement,
    conv: WordConvention,
    word_count: int,
) -> Nilprogression | None:
    """Build the progression word by word, bailing out at the first element
    outside ``V`` or the first sign of degeneracy."""
    d, k = spec.rank, spec.length
    elem_class: dict[GroupElement, object] = {}
    class_elem: dict[object, GroupElement] = {}
    level = [((), (0,) * d, identity(base.arity))]
    first = True
    while level:
        for letters, _, prefix in level:
            if first and not conv.include_empty:
                continue
            g = compose(prefix, base)
            if g not in V:
                return None
            key = class_key(letters, d, conv.equivalence)
            if elem_class.setdefault(g, key) != key:
                return None
            if class_elem.setdefault(key, g) != g:
                return None
        first = False
        nxt = []
        for letters, counts, prefix in level:
            for a in range(d):
                if counts[a] < k:
                    c = list(counts)
                    c[a] += 1
                    nxt.append((letters + (a + 1,), tuple(c), compose(prefix, gens[a])))
        level = nxt
    if len(elem_class) != word_count:
        return None
    return Nilprogression(spec, gens, base, conv, tuple(elem_class), word_count, True)


def _scan_chunk(assignments, V, spec, conv, word_count):
    found = []
    for gens, base in assignments:
        np = _scan(V, spec, gens, base, conv, word_count)
        if np is not None:
            found.append(np)
    return found


def find_in(
    V: Iterable[GroupElement],
    spec: ProgressionSpec,
    gen_pool: Sequence[GroupElement],
    base_pool: Sequence[GroupElement],
    conv: WordConvention = DEFAULT_CONVENTION,
    limit: int | None = None,
    workers: int = 1,
) -> list[Nilprogression]:
    """Non-degenerate progressions contained in ``V`` over the given pools.

    Assignments are tried in the order ``product(gen_pool, repeat=rank)``
    then ``base_pool``; results follow that order whatever ``workers`` is.
    """
    V = frozenset(V)
    word_count = count_words(spec.rank, spec.length, conv)
    if len(V) < word_count or not gen_pool or not base_pool:
        return []
    assignments = [
        (tuple(gens), base)
        for gens in product(gen_pool, repeat=spec.rank)
        for base in base_pool
    ]
    arity = assignments[0][1].arity
    if any(g.arity != arity for g in V):
        # elements of another arity can never be hit
        V = frozenset(g for g in V if g.arity == arity)
    found: list[Nilprogression] = []
    if limit is None or workers > 1:
        found = chunked_map(_scan_chunk, assignments, workers, V, spec, conv, word_count)
    else:
        for gens, base in assignments:
            np = _scan(V, spec, gens, base, conv, word_count)
            if np is not None:
                found.append(np)
                if len(found) >= limit:
                    break
    return found if limit is None else found[:limit]


def verify_absence(
    V: Iterable[GroupElement],
    spec: ProgressionSpec,
    gen_pool: Sequence[GroupElement],
    base_pool: Sequence[GroupElement],
    conv: WordConvention = DEFAULT_CONVENTION,
    workers: int = 1,
) -> tuple[bool, Nilprogression | None]:
    found = find_in(V, spec, gen_pool, base_pool, conv, limit=1, workers=workers)
    if found:
        return False, found[0]
    return True, None


def standard_gen_pool(cfg: GroupConfig) -> list[GroupElement]:
    """The generators, then their inverses, then the identity."""
    gens = generators(cfg)
    return gens + [inverse(g) for g in gens] + [identity(cfg.m)]


def progression_report(np: Nilprogression) -> dict:
    return {
        "spec": np.spec.to_json(),
        "convention": {
            "include_empty": np.conv.include_empty,
            "equivalence": np.conv.equivalence,
        },
        "generators": [g.to_json() for g in np.generators],
        "base": np.base.to_json(),
        "elements": [g.to_json() for g in np.elements],
        "size": len(np.elements),
        "word_count": np.word_count,
        "well_defined": np.well_defined,
        "nondegenerate": is_nondegenerate(np),
    }

