import random
from itertools import product

import pytest

from nilvdw.nilgroup import CoordAffine, GroupConfig, GroupElement, compose, generators, identity, inverse
from nilvdw.nilprogression import (
    ProgressionSpec,
    build,
    find_in,
    is_nondegenerate,
    progression_report,
    standard_gen_pool,
    verify_absence,
)
from nilvdw.poly import Polynomial
from nilvdw.words import CANONICAL, RAW, WordConvention, count_words, enumerate_words, evaluate_word, words_equivalent

P = Polynomial.from_coeffs
CANON = WordConvention(True, CANONICAL)
RAWC = WordConvention(True, RAW)


def el(*pairs):
    return GroupElement(tuple(CoordAffine(a, P(q)) for a, q in pairs))


@pytest.fixture
def rs1():
    cfg = GroupConfig(1, 2)
    R, S = generators(cfg)
    return cfg, R, S, identity(1)


def test_build_standard_k1(rs1):
    cfg, R, S, I = rs1
    np = build(ProgressionSpec(2, 1, 2), (R, S), I)
    assert set(np.elements) == {I, el((0, [0, 1])), el((1, [])), el((1, [0, 1])), el((1, [1, 1]))}
    assert len(np.elements) == 5 and np.word_count == 5
    assert is_nondegenerate(np)


def test_build_identity_generators_collapses(rs1):
    cfg, R, S, I = rs1
    b = el((3, [1, 2]))
    np = build(ProgressionSpec(2, 1, 2), (I, I), b)
    assert np.elements == (b,)
    assert not is_nondegenerate(np)


def test_build_repeated_generator(rs1):
    cfg, R, S, I = rs1
    np = build(ProgressionSpec(2, 1, 2), (R, R), I)
    assert set(np.elements) == {I, R, compose(R, R)}
    assert not is_nondegenerate(np)


def test_build_base_on_the_right(rs1):
    cfg, R, S, I = rs1
    b = el((2, [0, 0, 1]))
    np = build(ProgressionSpec(2, 1, 2), (R, S), b)
    plain = build(ProgressionSpec(2, 1, 2), (R, S), I)
    assert set(np.elements) == {compose(g, b) for g in plain.elements}


def test_build_validation(rs1):
    cfg, R, S, I = rs1
    with pytest.raises(ValueError):
        build(ProgressionSpec(2, 1, 2), (R,), I)
    with pytest.raises(ValueError):
        build(ProgressionSpec(2, 1, 2), (R, S), identity(2))
    with pytest.raises(ValueError):
        ProgressionSpec(0, 1, 2)


def test_nondegenerate_k2_d4_canonical():
    cfg = GroupConfig(2, 4)
    np = build(ProgressionSpec(2, 2, 4), generators(cfg), identity(2), CANON)
    assert len(np.elements) == np.word_count == 361
    assert is_nondegenerate(np)
    raw = build(ProgressionSpec(2, 2, 4), generators(cfg), identity(2), RAWC)
    assert raw.word_count == 7365 and not is_nondegenerate(raw)


def test_canonical_with_noncommuting_assignment_is_not_well_defined():
    cfg = GroupConfig(1, 2)
    R, S = generators(cfg)
    # *1 and *3 sit in different blocks but R and S do not commute
    np = build(ProgressionSpec(2, 1, 4), (R, identity(1), S, identity(1)), identity(1), CANON)
    assert not np.well_defined
    assert not is_nondegenerate(np)


@pytest.mark.parametrize("d,k", [(d, k) for d in (2, 3, 4) for k in (1, 2)])
@pytest.mark.parametrize("conv", [CANON, RAWC])
def test_size_matches_pairwise_injectivity(d, k, conv):
    cfg = GroupConfig(k, d)
    np = build(ProgressionSpec(k, k, d), generators(cfg), identity(cfg.m), conv)
    words = enumerate_words(d, k, conv)
    values = [evaluate_word(w, cfg) for w in words]
    injective_on_classes = all(
        (values[i] == values[j]) == words_equivalent(words[i], words[j], cfg, conv)
        for i in range(len(words))
        for j in range(i + 1, min(len(words), i + 400))
    )
    assert (len(np.elements) == np.word_count) == injective_on_classes
    assert is_nondegenerate(np) == injective_on_classes


def test_find_in_self_containment(rs1):
    cfg, R, S, I = rs1
    spec = ProgressionSpec(2, 1, 2)
    V = build(spec, (R, S), I).elements
    found = find_in(V, spec, [R, S, I], [I])
    assert any(np.generators == (R, S) and np.base == I for np in found)
    for np in found:
        assert np.element_set <= set(V) and is_nondegenerate(np)


def test_find_in_after_removal(rs1):
    cfg, R, S, I = rs1
    spec = ProgressionSpec(2, 1, 2)
    V = set(build(spec, (R, S), I).elements)
    V.discard(el((1, [0, 1])))
    found = find_in(V, spec, [R, S, I], [I])
    assert not any(np.generators == (R, S) and np.base == I for np in found)
    assert found == []


def test_find_in_trivial_ground_set(rs1):
    cfg, R, S, I = rs1
    assert find_in({I}, ProgressionSpec(2, 1, 2), [R, S, I], [I]) == []


def test_find_in_limit(rs1):
    cfg, R, S, I = rs1
    spec = ProgressionSpec(2, 1, 2)
    V = build(spec, (R, S), I).elements
    assert len(find_in(V, spec, [R, S, I], [I], limit=1)) == 1


def test_verify_absence_cardinality_bound(rs1):
    cfg, R, S, I = rs1
    V = build(ProgressionSpec(2, 1, 2), (R, S), I).elements
    spec2 = ProgressionSpec(2, 2, 2)
    assert count_words(2, 2, CANON) == 19
    assert verify_absence(V, spec2, [R, S, I], [I]) == (True, None)
    assert verify_absence(set(), spec2, [R, S, I], [I]) == (True, None)


def test_verify_absence_finds_witness():
    cfg = GroupConfig(2, 2)
    R, S = generators(cfg)
    I = identity(1)
    spec2 = ProgressionSpec(3, 2, 2)
    V = build(spec2, (R, S), I).elements
    absent, witness = verify_absence(V, spec2, [R, S, I], [I])
    assert not absent
    rebuilt = build(spec2, witness.generators, witness.base)
    assert is_nondegenerate(rebuilt) and rebuilt.element_set <= set(V)


def naive_find(V, spec, gen_pool, base_pool, conv):
    V = set(V)
    out = []
    for gens in product(gen_pool, repeat=spec.rank):
        for base in base_pool:
            np = build(spec, gens, base, conv)
            if is_nondegenerate(np) and np.element_set <= V:
                out.append(np)
    return out


def _random_instance(rng):
    k = rng.choice([1, 2])
    cfg = GroupConfig(k, 2)
    pool = standard_gen_pool(cfg)
    spec = ProgressionSpec(k + 1, k, 2)
    V = set()
    for _ in range(rng.randint(1, 3)):
        gens = [rng.choice(pool) for _ in range(2)]
        base = rng.choice(pool)
        V |= build(spec, gens, base).element_set
    V = [g for g in V if rng.random() > 0.1]
    base_pool = sorted(V, key=str)[: rng.randint(1, 6)] + [identity(1)]
    return V, spec, pool, base_pool


def test_pruned_search_matches_naive():
    rng = random.Random(7)
    for _ in range(25):
        V, spec, pool, base_pool = _random_instance(rng)
        for conv in (CANON, RAWC):
            fast = find_in(V, spec, pool, base_pool, conv)
            slow = naive_find(V, spec, pool, base_pool, conv)
            assert fast == slow
            absent, witness = verify_absence(V, spec, pool, base_pool, conv)
            assert absent == (not fast)
            if witness is not None:
                assert witness == fast[0]


def test_find_in_worker_independent():
    cfg = GroupConfig(1, 2)
    pool = standard_gen_pool(cfg)
    spec = ProgressionSpec(2, 1, 2)
    V = set()
    for b in pool:
        V |= build(spec, generators(cfg), b).element_set
    one = find_in(V, spec, pool, sorted(V, key=str), workers=1)
    four = find_in(V, spec, pool, sorted(V, key=str), workers=4)
    assert one == four and len(one) > 1


def test_standard_pool():
    cfg = GroupConfig(1, 3)
    pool = standard_gen_pool(cfg)
    assert len(pool) == 7
    assert pool[3] == inverse(pool[0]) and pool[-1] == identity(2)


def test_report_shape(rs1):
    cfg, R, S, I = rs1
    rep = progression_report(build(ProgressionSpec(2, 1, 2), (R, S), I))
    assert rep["spec"] == {"step": 2, "length": 1, "rank": 2}
    assert rep["word_count"] == 5 and rep["nondegenerate"] is True
    assert rep["generators"][0] == {"coords": [{"shift": 0, "offset": [0, 1]}]}
    assert len(rep["elements"]) == 5
