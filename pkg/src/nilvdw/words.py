"""Words over ``*1..*d`` with each letter used at most ``k`` times.

Enumeration order is by length, then lexicographic on letter indices.
Two equivalence notions are supported: ``raw`` (literal equality) and
``coordinate-canonical`` (equality of the per-coordinate subwords, i.e.
words that differ only by swapping letters acting on different
coordinates are identified).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator, Sequence

from ._parallel import chunked_map
from .nilgroup import (
    GroupConfig,
    GroupElement,
    apply,
    compose,
    generators,
    identity,
)
from .poly import monomial

RAW = "raw"
CANONICAL = "coordinate-canonical"
EQUIVALENCES = (RAW, CANONICAL)


@dataclass(frozen=True, slots=True)
class Word:
    letters: tuple[int, ...]
    d: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        counts = [0] * (self.d + 1)
        for a in self.letters:
            if not 1 <= a <= self.d:
                raise ValueError(f"letter *{a} outside *1..*{self.d}")
            counts[a] += 1
            if counts[a] > self.k:
                raise ValueError(f"letter *{a} occurs more than {self.k} times")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_letters(self.letters)

    @classmethod
    def parse(cls, text: str, d: int, k: int) -> "Word":
        return cls(parse_letters(text), d, k)


_TOKEN = re.compile(r"\*(\d+)")


def format_letters(letters: Sequence[int]) -> str:
    if not letters:
        return "e"
    return "".join(f"*{a}" for a in letters)


def parse_letters(text: str) -> tuple[int, ...]:
    s = text.strip()
    if s in ("e", ""):
        return ()
    letters = []
    pos = 0
    for m in _TOKEN.finditer(s):
        if m.start() != pos:
            break
        letters.append(int(m.group(1)))
        pos = m.end()
    if pos != len(s):
        raise ValueError(f"cannot parse word {text!r}; expected e.g. '*1*2*1' or 'e'")
    return tuple(letters)


@dataclass(frozen=True)
class WordConvention:
    include_empty: bool = True
    equivalence: str = CANONICAL

    def __post_init__(self):
        if self.equivalence not in EQUIVALENCES:
            raise ValueError(
                f"equivalence must be one of {EQUIVALENCES}, got {self.equivalence!r}"
            )


DEFAULT_CONVENTION = WordConvention()


def iter_letter_levels(d: int, k: int) -> Iterator[list[tuple[int, ...]]]:
    """Yield the lists of letter tuples of length 0, 1, ..., d*k, each sorted."""
    level: list[tuple[tuple[int, ...], tuple[int, ...]]] = [((), (0,) * d)]
    while level:
        yield [w for w, _ in level]
        nxt = []
        for w, counts in level:
            for a in range(d):
                if counts[a] < k:
                    c = list(counts)
                    c[a] += 1
                    nxt.append((w + (a + 1,), tuple(c)))
        level = nxt


def enumerate_letters(d: int, k: int, include_empty: bool = True) -> list[tuple[int, ...]]:
    out = []
    for level in iter_letter_levels(d, k):
        out.extend(level)
    return out if include_empty else out[1:]


def enumerate_words(d: int, k: int, conv: WordConvention = DEFAULT_CONVENTION) -> list[Word]:
    if d < 1 or k < 0:
        raise ValueError(f"need d >= 1 and k >= 0, got d={d}, k={k}")
    return [Word(w, d, k) for w in enumerate_letters(d, k, conv.include_empty)]


def _raw_count(d: int, k: int) -> int:
    # sum over lengths n of n! [t^n] (sum_{j<=k} t^j / j!)^d
    base = [Fraction(1, factorial(j)) for j in range(k + 1)]
    series = [Fraction(1)]
    for _ in range(d):
        nxt = [Fraction(0)] * (len(series) + k)
        for i, a in enumerate(series):
            if a:
                for j, b in enumerate(base):
                    nxt[i + j] += a * b
        series = nxt
    total = sum(c * factorial(n) for n, c in enumerate(series))
    assert total.denominator == 1
    return int(total)


def block_letters(d: int) -> list[tuple[int, ...]]:
    """Letters grouped by the coordinate they act on: (1,2), (3,4), ..., (d,) if d odd."""
    return [tuple(range(i, min(i + 2, d + 1))) for i in range(1, d + 1, 2)]


def count_words(d: int, k: int, conv: WordConvention = DEFAULT_CONVENTION) -> int:
    """Size of the word set, or number of classes under the canonical convention."""
    if d < 1 or k < 0:
        raise ValueError(f"need d >= 1 and k >= 0, got d={d}, k={k}")
    if conv.equivalence == RAW:
        total = _raw_count(d, k)
    else:
        total = 1
        for block in block_letters(d):
            total *= _raw_count(len(block), k)
    return total if conv.include_empty else total - 1


def _check_conforms(w: Word, cfg: GroupConfig) -> None:
    if w.d != cfg.d or w.k > cfg.k:
        raise ValueError(f"word {w} (d={w.d}, k={w.k}) does not conform to {cfg}")


def evaluate_letters(letters: Sequence[int], gens: Sequence[GroupElement]) -> GroupElement:
    """Product ``gens[l1-1] * gens[l2-1] * ...`` of an arbitrary assignment."""
    acc = identity(gens[0].arity)
    for a in letters:
        acc = compose(acc, gens[a - 1])
    return acc


def evaluate_word(w: Word, cfg: GroupConfig) -> GroupElement:
    _check_conforms(w, cfg)
    return evaluate_letters(w.letters, generators(cfg))


def factor_letters(letters: Sequence[int], d: int) -> tuple[tuple[int, ...], ...]:
    blocks: list[list[int]] = [[] for _ in range((d + 1) // 2)]
    for a in letters:
        blocks[(a - 1) // 2].append(a)
    return tuple(tuple(b) for b in blocks)


def coordinate_factorize(w: Word, cfg: GroupConfig) -> tuple[Word, ...]:
    _check_conforms(w, cfg)
    return tuple(Word(b, w.d, w.k) for b in factor_letters(w.letters, w.d))


def class_key(letters: Sequence[int], d: int, equivalence: str):
    if equivalence == RAW:
        return tuple(letters)
    return factor_letters(letters, d)


def words_equivalent(w1: Word, w2: Word, cfg: GroupConfig, conv: WordConvention = DEFAULT_CONVENTION) -> bool:
    _check_conforms(w1, cfg)
    _check_conforms(w2, cfg)
    return class_key(w1.letters, cfg.d, conv.equivalence) == class_key(
        w2.letters, cfg.d, conv.equivalence
    )


def evaluation_point(cfg: GroupConfig):
    return (monomial(cfg.k),) * cfg.m


def _evaluate_chunk(letters_chunk, gens, point):
    out = []
    for letters in letters_chunk:
        g = evaluate_letters(letters, gens)
        out.append((g, apply(g, point)))
    return out


def evaluate_all(cfg: GroupConfig, letters_list, workers: int = 1):
    """Evaluate each letter tuple; returns ``[(element, image at (x^k,...,x^k)), ...]``."""
    return chunked_map(
        _evaluate_chunk, letters_list, workers, generators(cfg), evaluation_point(cfg)
    )


def _partition(keys) -> set[frozenset[int]]:
    groups: dict = {}
    for i, key in enumerate(keys):
        groups.setdefault(key, []).append(i)
    return {frozenset(v) for v in groups.values()}


def injectivity_report(cfg: GroupConfig, conv: WordConvention = DEFAULT_CONVENTION, workers: int = 1) -> dict:
    """Compare the word partitions induced by evaluation, by the value at
    ``(x^k, ..., x^k)`` and by both equivalence conventions."""
    letters_list = enumerate_letters(cfg.d, cfg.k, conv.include_empty)
    evaluated = evaluate_all(cfg, letters_list, workers)
    elements = [g for g, _ in evaluated]
    images = [img for _, img in evaluated]
    by_element = _partition(elements)
    by_point = _partition(images)
    by_raw = _partition(tuple(w) for w in letters_list)
    by_canonical = _partition(factor_letters(w, cfg.d) for w in letters_list)
    return {
        "k": cfg.k,
        "d": cfg.d,
        "include_empty": conv.include_empty,
        "raw_count": count_words(cfg.d, cfg.k, WordConvention(conv.include_empty, RAW)),
        "canonical_count": count_words(cfg.d, cfg.k, WordConvention(conv.include_empty, CANONICAL)),
        "enumerated": len(letters_list),
        "distinct_elements": len(by_element),
        "distinct_point_images": len(by_point),
        "injective_raw": by_element == by_raw,
        "injective_canonical": by_element == by_canonical,
        "point_separates": by_point == by_element,
    }
