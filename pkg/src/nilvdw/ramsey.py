"""Partition-regularity certification over finite ground sets.

A pattern family is a list of edges (index sets into the ground set).
``certify`` decides, for a fixed number of colors ``r``, whether every
r-coloring of the ground set makes some edge monochromatic.  Colorings
may leave classes empty, so "r colors" means "at most r classes".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any, Hashable, Iterable, Sequence

import numpy as np

from ._parallel import ordered_imap
from .nilgroup import GroupElement
from .nilprogression import (
    Nilprogression,
    ProgressionSpec,
    build,
    element_sort_key,
    find_in,
    is_nondegenerate,
    progression_report,
    verify_absence,
)
from .words import DEFAULT_CONVENTION, WordConvention

log = logging.getLogger(__name__)

PARTITION_REGULAR = "partition_regular"
COUNTEREXAMPLE = "counterexample"

# Number of leading points colored before the search is split into
# independent subtrees.  Fixed so that statistics do not depend on workers.
SPLIT_DEPTH = 6


@dataclass(frozen=True)
class GroundSet:
    items: tuple
    index: dict = field(compare=False, hash=False, repr=False)

    @classmethod
    def of(cls, items: Iterable[Hashable]) -> "GroundSet":
        items = tuple(items)
        index = {}
        for i, x in enumerate(items):
            if x in index:
                raise ValueError(f"duplicate ground-set point {x}")
            index[x] = i
        return cls(items, index)

    @classmethod
    def of_integers(cls, values: Iterable[int]) -> "GroundSet":
        return cls.of(sorted(set(values)))

    @classmethod
    def of_elements(cls, values: Iterable[GroupElement]) -> "GroundSet":
        return cls.of(sorted(set(values), key=element_sort_key))

    def __len__(self) -> int:
        return len(self.items)

    def to_json(self) -> list:
        return [x.to_json() if isinstance(x, GroupElement) else x for x in self.items]


@dataclass(frozen=True)
class PatternFamily:
    edges: tuple[tuple[int, ...], ...]
    provenance: tuple[Any, ...] = ()

    @classmethod
    def of(cls, edges: Iterable[Iterable[int]], provenance: Iterable[Any] | None = None) -> "PatternFamily":
        """Normalize edges to sorted tuples and drop repeated sets."""
        edges = list(edges)
        prov = list(provenance) if provenance is not None else [None] * len(edges)
        seen = set()
        out_e, out_p = [], []
        for e, p in zip(edges, prov):
            t = tuple(sorted(set(e)))
            if len(t) < 2:
                raise ValueError(f"edge {t} has fewer than 2 points")
            if t not in seen:
                seen.add(t)
                out_e.append(t)
                out_p.append(p)
        return cls(tuple(out_e), tuple(out_p))

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Certificate:
    outcome: str
    r: int
    nodes_explored: int
    coloring: tuple[int, ...] | None = None

    @property
    def partition_regular(self) -> bool:
        return self.outcome == PARTITION_REGULAR

    def to_json(self) -> dict:
        out = {"outcome": self.outcome, "r": self.r, "nodes_explored": self.nodes_explored}
        if self.coloring is not None:
            out["coloring"] = list(self.coloring)
        return out


def ap_patterns(V: GroundSet, k: int) -> PatternFamily:
    """All k-term arithmetic progressions with positive difference inside V."""
    if k < 3:
        raise ValueError(f"AP length must be >= 3, got {k}")
    values = V.items
    edges, prov = [], []
    for i, a in enumerate(values):
        for b in values[i + 1 :]:
            diff = b - a
            if diff <= 0:
                continue
            terms = [a + j * diff for j in range(k)]
            if all(t in V.index for t in terms):
                edges.append([V.index[t] for t in terms])
                prov.append({"start": a, "difference": diff})
    order = sorted(range(len(edges)), key=lambda j: (prov[j]["start"], prov[j]["difference"]))
    return PatternFamily.of([edges[j] for j in order], [prov[j] for j in order])


def nilprogression_patterns(
    V: GroundSet,
    spec: ProgressionSpec,
    gen_pool: Sequence[GroupElement],
    base_pool: Sequence[GroupElement] | None = None,
    conv: WordConvention = DEFAULT_CONVENTION,
    workers: int = 1,
) -> PatternFamily:
    if base_pool is None:
        base_pool = V.items
    found = find_in(V.items, spec, gen_pool, base_pool, conv, workers=workers)
    edges = [[V.index[g] for g in prog.elements] for prog in found]
    prov = [
        {"generators": [g.to_json() for g in prog.generators], "base": prog.base.to_json()}
        for prog in found
    ]
    return PatternFamily.of(edges, prov)


def is_avoiding(fam: PatternFamily, coloring: Sequence[int]) -> bool:
    """True iff no edge is monochromatic under ``coloring``."""
    for e in fam.edges:
        c = coloring[e[0]]
        if all(coloring[j] == c for j in e[1:]):
            return False
    return True


def _edges_by_last(n: int, fam: PatternFamily) -> list[list[tuple[int, ...]]]:
    by_last: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for e in fam.edges:
        if any(not 0 <= j < n for j in e):
            raise ValueError(f"edge {e} references a point outside 0..{n - 1}")
        by_last[e[-1]].append(e[:-1])
    return by_last


def _dfs(by_last, r, coloring, i, stop, used, counter) -> bool:
    """Extend ``coloring`` (colored up to ``i``) to points ``i..stop-1``.

    Colors are introduced in first-appearance order.  With ``stop < n`` it
    collects every valid partial coloring of length ``stop`` into
    ``counter[1]`` instead of returning at the first success.
    """
    if i == stop:
        if counter[1] is not None:
            counter[1].append((tuple(coloring), used))
            return False
        return True
    for c in range(min(r, used + 1)):
        counter[0] += 1
        ok = True
        for rest in by_last[i]:
            if all(coloring[j] == c for j in rest):
                ok = False
                break
        if not ok:
            continue
        coloring.append(c)
        if _dfs(by_last, r, coloring, i + 1, stop, max(used, c + 1), counter):
            return True
        coloring.pop()
    return False


def _subtree(task):
    by_last, r, n, prefix, used = task
    coloring = list(prefix)
    counter = [0, None]
    found = _dfs(by_last, r, coloring, len(prefix), n, used, counter)
    return (tuple(coloring) if found else None), counter[0]


def certify(V: GroundSet | int, fam: PatternFamily, r: int, workers: int = 1) -> Certificate:
    """Backtracking search for a coloring with no monochromatic edge.

    The first ``SPLIT_DEPTH`` points are colored up front; each surviving
    prefix is an independent subtree.  Subtrees are consumed in order, so
    the certificate is identical for every worker count.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    n = V if isinstance(V, int) else len(V)
    by_last = _edges_by_last(n, fam)
    depth = min(n, SPLIT_DEPTH)
    counter = [0, []]
    _dfs(by_last, r, [], 0, depth, 0, counter)
    nodes, prefixes = counter
    if depth == n:
        if prefixes:
            return Certificate(COUNTEREXAMPLE, r, nodes, prefixes[0][0])
        return Certificate(PARTITION_REGULAR, r, nodes)
    tasks = ((by_last, r, n, p, used) for p, used in prefixes)
    for coloring, sub_nodes in ordered_imap(_subtree, tasks, workers):
        nodes += sub_nodes
        if coloring is not None:
            return Certificate(COUNTEREXAMPLE, r, nodes, coloring)
    return Certificate(PARTITION_REGULAR, r, nodes)


def naive_certify(V: GroundSet | int, fam: PatternFamily, r: int) -> Certificate:
    """Reference answer by enumerating all r**n colorings in lexicographic order.

    No pruning and no symmetry reduction; ``nodes_explored`` is the number
    of complete colorings examined.
    """
    n = V if isinstance(V, int) else len(V)
    _edges_by_last(n, fam)
    total = r**n
    if n == 0:
        return Certificate(COUNTEREXAMPLE, r, 1, ())
    colorings = np.indices((r,) * n, dtype=np.int8).reshape(n, total).T
    mono = np.zeros(total, dtype=bool)
    for e in fam.edges:
        cols = colorings[:, list(e)]
        mono |= (cols == cols[:, :1]).all(axis=1)
    avoiding = np.flatnonzero(~mono)
    if avoiding.size:
        j = int(avoiding[0])
        return Certificate(COUNTEREXAMPLE, r, j + 1, tuple(int(c) for c in colorings[j]))
    return Certificate(PARTITION_REGULAR, r, total)


class InvariantViolation(RuntimeError):
    pass


def checked_certify(V: GroundSet | int, fam: PatternFamily, r: int, workers: int = 1) -> Certificate:
    """``certify`` plus an independent re-check of any counterexample."""
    cert = certify(V, fam, r, workers)
    if cert.coloring is not None:
        n = V if isinstance(V, int) else len(V)
        if len(cert.coloring) != n or not is_avoiding(fam, cert.coloring):
            raise InvariantViolation("counterexample coloring failed re-validation")
    return cert


@dataclass
class RestrictedReport:
    baseline: str
    k: int
    r: int
    absence_holds: bool
    regularity: Certificate
    edges: int
    absence_witness: dict | None = None
    scope: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.absence_holds and self.regularity.partition_regular

    def to_json(self) -> dict:
        out = {
            "baseline": self.baseline,
            "k": self.k,
            "r": self.r,
            "absence_holds": self.absence_holds,
            "regularity_holds": self.regularity.partition_regular,
            "holds": self.holds,
            "edges": self.edges,
            "regularity": self.regularity.to_json(),
            "scope": self.scope,
        }
        if self.absence_witness is not None:
            out["witness"] = self.absence_witness
        return out


def certify_restricted_ap(V: GroundSet, k: int, r: int, workers: int = 1) -> RestrictedReport:
    """No (k+1)-term AP in V, and every r-coloring has a monochromatic k-term AP."""
    longer = ap_patterns(V, k + 1)
    witness = None
    if longer.edges:
        witness = {
            "terms": [V.items[j] for j in longer.edges[0]],
            **longer.provenance[0],
        }
    fam = ap_patterns(V, k)
    cert = checked_certify(V, fam, r, workers)
    return RestrictedReport(
        baseline="ap",
        k=k,
        r=r,
        absence_holds=not longer.edges,
        regularity=cert,
        edges=len(fam),
        absence_witness=witness,
        scope={
            "colors": r,
            "note": "regularity is certified for exactly this number of colors",
        },
    )


def certify_restricted(
    V: GroundSet,
    spec_k: ProgressionSpec,
    r: int,
    gen_pool: Sequence[GroupElement],
    base_pool: Sequence[GroupElement] | None = None,
    conv: WordConvention = DEFAULT_CONVENTION,
    workers: int = 1,
) -> RestrictedReport:
    """Both halves of the restricted property for nilprogression patterns.

    Absence of length ``spec_k.length + 1`` progressions and the presence
    of monochromatic length ``spec_k.length`` ones are checked over the
    same pools; ``base_pool`` defaults to the points of V.
    """
    if base_pool is None:
        base_pool = V.items
    spec_k1 = ProgressionSpec(spec_k.step, spec_k.length + 1, spec_k.rank)
    absent, witness = verify_absence(V.items, spec_k1, gen_pool, base_pool, conv, workers)
    if witness is not None:
        rebuilt = build(spec_k1, witness.generators, witness.base, conv)
        if not is_nondegenerate(rebuilt) or not rebuilt.element_set <= set(V.items):
            raise InvariantViolation("absence witness failed re-validation")
    fam = nilprogression_patterns(V, spec_k, gen_pool, base_pool, conv, workers)
    cert = checked_certify(V, fam, r, workers)
    return RestrictedReport(
        baseline="nilprogression",
        k=spec_k.length,
        r=r,
        absence_holds=absent,
        regularity=cert,
        edges=len(fam),
        absence_witness=progression_report(witness) if witness is not None else None,
        scope={
            "colors": r,
            "gen_pool": [g.to_json() for g in gen_pool],
            "base_pool": "ground set" if base_pool is V.items else [g.to_json() for g in base_pool],
            "convention": {"include_empty": conv.include_empty, "equivalence": conv.equivalence},
            "note": "absence and containment are relative to the listed pools; "
            "regularity is certified for exactly this number of colors",
        },
    )


@dataclass
class SearchResult:
    found: GroundSet | None
    report: RestrictedReport | None
    candidates_checked: int
    scope: dict

    def to_json(self) -> dict:
        out = {
            "found": self.found is not None,
            "candidates_checked": self.candidates_checked,
            "scope": self.scope,
        }
        if self.found is not None:
            out["ground_set"] = self.found.to_json()
            out["report"] = self.report.to_json()
        else:
            out["notice"] = "search space exhausted without a witness"
        return out


def search_restricted_witness_ap(
    k: int,
    r: int,
    size_bound: int,
    range_bound: int,
    require_absence: bool = True,
    workers: int = 1,
) -> SearchResult:
    """Subsets of ``1..range_bound`` with at most ``size_bound`` points, by
    size then lexicographically; returns the first satisfying both halves
    (only the regularity half when ``require_absence`` is False)."""
    scope = {
        "baseline": "ap",
        "k": k,
        "r": r,
        "size_bound": size_bound,
        "range_bound": range_bound,
        "require_absence": require_absence,
    }
    checked = 0
    universe = range(1, range_bound + 1)
    for size in range(1, min(size_bound, range_bound) + 1):
        for subset in combinations(universe, size):
            checked += 1
            if checked % 1000 == 0:
                log.info("search-witness: %d candidates checked (size %d)", checked, size)
            V = GroundSet.of(subset)
            if require_absence and ap_patterns(V, k + 1).edges:
                continue
            report = certify_restricted_ap(V, k, r, workers)
            if report.regularity.partition_regular and (report.absence_holds or not require_absence):
                return SearchResult(V, report, checked, scope)
    return SearchResult(None, None, checked, scope)


def pool_progressions(
    spec: ProgressionSpec,
    gen_pool: Sequence[GroupElement],
    base_pool: Sequence[GroupElement],
    conv: WordConvention = DEFAULT_CONVENTION,
) -> list[Nilprogression]:
    """Distinct non-degenerate progressions over the pools, first occurrence kept."""
    out, seen = [], set()
    for gens in product(gen_pool, repeat=spec.rank):
        for base in base_pool:
            prog = build(spec, gens, base, conv)
            if is_nondegenerate(prog) and prog.element_set not in seen:
                seen.add(prog.element_set)
                out.append(prog)
    return out


def search_restricted_witness_nil(
    spec_k: ProgressionSpec,
    r: int,
    max_union: int,
    gen_pool: Sequence[GroupElement],
    base_pool: Sequence[GroupElement],
    conv: WordConvention = DEFAULT_CONVENTION,
    require_absence: bool = True,
    workers: int = 1,
) -> SearchResult:
    """Candidates are unions of up to ``max_union`` pool-generated length-k
    progressions; the restricted check uses the same generator pool."""
    scope = {
        "baseline": "nilprogression",
        "spec": spec_k.to_json(),
        "r": r,
        "max_union": max_union,
        "gen_pool": [g.to_json() for g in gen_pool],
        "base_pool": [g.to_json() for g in base_pool],
        "require_absence": require_absence,
    }
    blocks = pool_progressions(spec_k, gen_pool, base_pool, conv)
    checked = 0
    seen: set[frozenset] = set()
    for size in range(1, max_union + 1):
        for combo in combinations(blocks, size):
            points = frozenset().union(*(p.element_set for p in combo))
            if points in seen:
                continue
            seen.add(points)
            checked += 1
            if checked % 100 == 0:
                log.info("search-witness: %d candidates checked", checked)
            V = GroundSet.of_elements(points)
            report = certify_restricted(V, spec_k, r, gen_pool, None, conv, workers)
            if report.regularity.partition_regular and (report.absence_holds or not require_absence):
                return SearchResult(V, report, checked, scope)
    return SearchResult(None, None, checked, scope)
