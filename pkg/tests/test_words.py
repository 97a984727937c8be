from collections import Counter
from itertools import product
from math import factorial

import pytest

from nilvdw.nilgroup import CoordAffine, GroupConfig, GroupElement, apply, compose, generators, identity
from nilvdw.poly import Polynomial, monomial
from nilvdw.words import (
    CANONICAL,
    RAW,
    Word,
    WordConvention,
    coordinate_factorize,
    count_words,
    enumerate_letters,
    enumerate_words,
    evaluate_word,
    format_letters,
    injectivity_report,
    parse_letters,
    words_equivalent,
)

RAW_CONV = WordConvention(True, RAW)
P = Polynomial.from_coeffs


def brute_force_words(d, k):
    """Every sequence of length <= d*k, filtered by the multiplicity bound."""
    out = []
    for n in range(d * k + 1):
        for seq in product(range(1, d + 1), repeat=n):
            if all(c <= k for c in Counter(seq).values()):
                out.append(seq)
    return out


def multinomial_count(d, k):
    total = 0
    for ms in product(range(k + 1), repeat=d):
        x = factorial(sum(ms))
        for m in ms:
            x //= factorial(m)
        total += x
    return total


def test_smallest_case():
    words = enumerate_words(1, 1, RAW_CONV)
    assert [str(w) for w in words] == ["e", "*1"]


def test_d2_k1_enumeration():
    words = enumerate_words(2, 1, RAW_CONV)
    assert [w.letters for w in words] == [(), (1,), (2,), (1, 2), (2, 1)]
    assert {w.letters for w in words} == set(brute_force_words(2, 1))


def test_d2_k2_count():
    assert multinomial_count(2, 2) == 19
    assert len(brute_force_words(2, 2)) == 19
    assert len(enumerate_words(2, 2, RAW_CONV)) == 19
    assert count_words(2, 2, RAW_CONV) == 19


def test_count_examples():
    assert count_words(2, 1, RAW_CONV) == len(brute_force_words(2, 1)) == 5
    assert multinomial_count(2, 3) == len(brute_force_words(2, 3)) == 69
    assert count_words(2, 3, RAW_CONV) == 69
    assert count_words(1, 0, RAW_CONV) == 1


def test_empty_word_excluded():
    conv = WordConvention(include_empty=False, equivalence=RAW)
    words = enumerate_words(2, 1, conv)
    assert len(words) == count_words(2, 1, conv) == 4
    assert all(len(w) > 0 for w in words)


def test_order_is_length_then_lex():
    letters = enumerate_letters(3, 2)
    assert letters == sorted(letters, key=lambda w: (len(w), w))


@pytest.mark.parametrize("d,k", [(d, k) for d in range(1, 5) for k in range(0, 3)])
def test_enumeration_matches_brute_force(d, k):
    words = enumerate_letters(d, k)
    assert sorted(words) == sorted(brute_force_words(d, k))
    assert count_words(d, k, RAW_CONV) == len(words) == multinomial_count(d, k)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_enumeration_k3_invariants(d):
    words = enumerate_letters(d, 3)
    assert len(set(words)) == len(words)
    assert all(max(Counter(w).values(), default=0) <= 3 for w in words)
    assert count_words(d, 3, RAW_CONV) == len(words) == multinomial_count(d, 3)


def test_canonical_count_is_product_over_blocks():
    assert count_words(4, 2, WordConvention(True, CANONICAL)) == 19 * 19
    assert count_words(3, 2, WordConvention(True, CANONICAL)) == 19 * 3
    assert count_words(3, 2, WordConvention(False, CANONICAL)) == 19 * 3 - 1


def test_word_validation_and_text_format():
    assert str(Word((1, 2, 1), 2, 2)) == "*1*2*1"
    assert str(Word((), 2, 2)) == "e"
    assert Word.parse("*1*2*1", 2, 2).letters == (1, 2, 1)
    assert Word.parse("e", 2, 2).letters == ()
    assert parse_letters("*10*3") == (10, 3)
    assert format_letters((10, 3)) == "*10*3"
    with pytest.raises(ValueError):
        Word((1, 1), 2, 1)
    with pytest.raises(ValueError):
        Word((3,), 2, 2)
    with pytest.raises(ValueError):
        parse_letters("*1x*2")


def _el(*pairs):
    return GroupElement(tuple(CoordAffine(a, P(q)) for a, q in pairs))


def test_evaluate_examples():
    cfg = GroupConfig(1, 2)
    assert evaluate_word(Word((1, 2), 2, 1), cfg) == _el((1, [0, 1]))
    assert evaluate_word(Word((2, 1), 2, 1), cfg) == _el((1, [1, 1]))
    assert evaluate_word(Word((), 2, 1), cfg) == identity(1)
    assert evaluate_word(Word((), 5, 3), GroupConfig(3, 5)) == identity(3)


def test_evaluate_rejects_nonconforming():
    with pytest.raises(ValueError):
        evaluate_word(Word((1,), 3, 1), GroupConfig(1, 2))
    with pytest.raises(ValueError):
        evaluate_word(Word((1, 1), 2, 2), GroupConfig(1, 2))


def test_factorize_examples():
    cfg = GroupConfig(1, 4)
    w1, w2 = coordinate_factorize(Word((1, 3, 2), 4, 1), cfg)
    assert w1.letters == (1, 2) and w2.letters == (3,)
    assert all(f.letters == () for f in coordinate_factorize(Word((), 4, 1), cfg))
    (only,) = coordinate_factorize(Word((2, 1, 1), 2, 2), GroupConfig(2, 2))
    assert only.letters == (2, 1, 1)


@pytest.mark.parametrize("d,k", [(d, k) for d in (2, 3, 4) for k in (1, 2)])
def test_factorization_is_sound(d, k):
    cfg = GroupConfig(k, d)
    for w in enumerate_words(d, k):
        factors = coordinate_factorize(w, cfg)
        acc = identity(cfg.m)
        for f in factors:
            acc = compose(acc, evaluate_word(f, cfg))
        assert acc == evaluate_word(w, cfg)


def test_equivalence_examples():
    cfg4 = GroupConfig(1, 4)
    a, b = Word((1, 3), 4, 1), Word((3, 1), 4, 1)
    assert not words_equivalent(a, b, cfg4, RAW_CONV)
    assert words_equivalent(a, b, cfg4, WordConvention(True, CANONICAL))
    assert evaluate_word(a, cfg4) == evaluate_word(b, cfg4)
    cfg2 = GroupConfig(1, 2)
    a, b = Word((1, 2), 2, 1), Word((2, 1), 2, 1)
    for conv in (RAW_CONV, WordConvention(True, CANONICAL)):
        assert not words_equivalent(a, b, cfg2, conv)
        assert words_equivalent(a, a, cfg2, conv)
    assert evaluate_word(a, cfg2) != evaluate_word(b, cfg2)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_rank2_injectivity(k):
    cfg = GroupConfig(k, 2)
    images = {evaluate_word(w, cfg) for w in enumerate_words(2, k)}
    assert len(images) == count_words(2, k, RAW_CONV)


@pytest.mark.parametrize("d,k", [(d, k) for d in (2, 3, 4) for k in (1, 2)])
def test_evaluation_equality_iff_canonical_equivalence(d, k):
    cfg = GroupConfig(k, d)
    words = enumerate_words(d, k)
    values = [evaluate_word(w, cfg) for w in words]
    point = (monomial(k),) * cfg.m
    images = [apply(g, point) for g in values]
    conv = WordConvention(True, CANONICAL)
    if len(words) <= 300:
        for i in range(len(words)):
            for j in range(i, len(words)):
                eq = values[i] == values[j]
                assert eq == words_equivalent(words[i], words[j], cfg, conv)
                assert eq == (images[i] == images[j])
    report = injectivity_report(cfg)
    assert report["injective_canonical"] and report["point_separates"]
    assert report["distinct_elements"] == report["canonical_count"] == count_words(d, k, conv)
    assert report["injective_raw"] == (d == 2)


@pytest.mark.parametrize("k,d", [(1, 2), (2, 2), (2, 3), (2, 4)])
def test_counts_independent_of_composition_convention(k, d):
    cfg = GroupConfig(k, d)
    gens = generators(cfg)

    def opposite(letters):
        acc = identity(cfg.m)
        for a in letters:
            acc = compose(gens[a - 1], acc)
        return acc

    letters = enumerate_letters(d, k)
    forward = {evaluate_word(Word(w, d, k), cfg) for w in letters}
    backward = {opposite(w) for w in letters}
    assert len(forward) == len(backward)


def test_report_is_worker_independent():
    cfg = GroupConfig(2, 3)
    assert injectivity_report(cfg, workers=1) == injectivity_report(cfg, workers=3)
