import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from thompson.dyadic_core import (
    HALF, ONE, ZERO, BinaryTree, Dyadic, PLMap, TreePair, Word, compose,
    concat_maps, conjugate, dyadic_interval_map, extend_partial, generator,
    is_dyadic, is_normal_form, log2_exact, map_partition, mpq, normal_form,
    normal_form_product, plmap_from_tree_pair, plmap_to_word, power,
    random_element, random_word, rational_from_json, rational_to_json,
    tree_pair_from_plmap, word, word_equal, word_to_plmap,
    word_to_plmap_direct,
)

letters = st.lists(st.tuples(st.integers(0, 6), st.sampled_from((1, -1))), max_size=24)


def test_x0_breakpoints():
    f = generator(0)
    assert f.xs == (ZERO, HALF, mpq(3, 4), ONE)
    assert f.ys == (ZERO, mpq(1, 4), HALF, ONE)


def test_x1_fixes_left_half():
    f = generator(1)
    assert f(mpq(1, 3)) == mpq(1, 3)
    assert f(mpq(3, 4)) == mpq(5, 8)


def test_rightmost_letter_acts_first():
    x0, x1 = generator(0), generator(1)
    t = mpq(7, 8)
    assert word_to_plmap("x0 x1")(t) == x0(x1(t))


def test_relation_small():
    for k in range(3):
        for n in range(k + 1, 5):
            lhs = conjugate(generator(n), generator(k))
            assert lhs == generator(n + 1)


def test_dyadic_helpers():
    assert is_dyadic(mpq(3, 8)) and not is_dyadic(mpq(1, 3))
    assert log2_exact(mpq(1, 8)) == -3
    assert log2_exact(mpq(3, 8)) is None
    d = Dyadic.from_fraction(mpq(5, 16))
    assert d.to_fraction() == mpq(5, 16)
    assert Dyadic.from_json(d.to_json()) == d


def test_rational_json_round_trip():
    for t in (mpq(0), mpq(5, 16), mpq(1, 3), mpq(-7, 2)):
        assert rational_from_json(rational_to_json(t)) == t
    assert rational_to_json(mpq(3, 8)) == {"num": "3", "exp": 3}


def test_plmap_json_round_trip():
    f = word_to_plmap("x0 x2^-1 x1")
    g = PLMap.from_json(json.loads(json.dumps(f.to_json())))
    assert g == f


def test_plmap_rejects_decreasing():
    with pytest.raises(ValueError):
        PLMap([0, HALF, ONE], [0, mpq(3, 4), HALF])


def test_parse_and_print():
    w = word("x1 x0^-1 x3^2")
    assert w.letters == ((1, 1), (0, -1), (3, 1), (3, 1))
    assert str(Word.parse(str(w))) == str(w)
    with pytest.raises(ValueError):
        word("x1 y2")


def test_normal_form_examples():
    assert str(normal_form(word("x3 x0"))) == "x0 x4"
    assert str(normal_form(word("x0^-1 x3"))) == "x4 x0^-1"
    assert str(normal_form(word("x1 x1^-1"))) == ""
    # an x0 ... x0^-1 pair with no x1 between is removed and the rest shifted down
    assert str(normal_form(word("x0 x3 x2^-1 x0^-1"))) == "x2 x1^-1"
    assert str(normal_form(word("x0 x2 x1^-1 x0^-1"))) == "x0 x2 x1^-1 x0^-1"


def test_normal_form_idempotent():
    rng = random.Random(3)
    for _ in range(200):
        w = random_word(rng.randint(0, 30), 5, rng)
        z = normal_form(w)
        assert is_normal_form(z)
        assert normal_form(z) == z


@settings(max_examples=150, deadline=None)
@given(letters)
def test_two_routes_to_a_map_agree(ls):
    w = Word(ls)
    assert word_to_plmap(w) == word_to_plmap_direct(w)


@settings(max_examples=100, deadline=None)
@given(letters, letters)
def test_word_equal_matches_maps(a, b):
    u, v = Word(a), Word(b)
    assert word_equal(u, v) == (word_to_plmap_direct(u) == word_to_plmap_direct(v))
    assert word_equal(u * v.inverse() * v, u)


@settings(max_examples=100, deadline=None)
@given(letters, letters, letters)
def test_normal_form_product_matches_concatenation(a, b, c):
    parts = [Word(a), Word(b), Word(c)]
    assert normal_form_product(*parts) == normal_form(parts[0] * parts[1] * parts[2])


def test_compose_and_inverse():
    rng = random.Random(0)
    for _ in range(50):
        f, g, h = (random_element(rng.randint(0, 6), rng) for _ in range(3))
        assert compose(f, compose(g, h)) == compose(compose(f, g), h)
        assert compose(f, f.inverse()).is_identity()
        assert power(f, 3) == compose(f, compose(f, f))
        assert power(f, -2) == power(f.inverse(), 2)


def test_tree_pair_round_trip():
    rng = random.Random(1)
    for _ in range(100):
        f = random_element(rng.randint(0, 8), rng)
        t = tree_pair_from_plmap(f)
        assert plmap_from_tree_pair(t) == f
        assert word_to_plmap(plmap_to_word(f)) == f


def test_tree_pair_is_reduced():
    x0 = tree_pair_from_plmap(generator(0))
    assert x0.carets == 2
    assert TreePair(BinaryTree("100"), BinaryTree("100")).carets == 1
    assert tree_pair_from_plmap(PLMap.identity()).carets == 0


def test_restrict_and_concat():
    f = generator(1)
    left, right = f.restrict(0, HALF), f.restrict(HALF, 1)
    assert left.is_identity()
    assert concat_maps([left, right]) == f


def test_dyadic_interval_map():
    g = dyadic_interval_map(0, mpq(3, 4), mpq(1, 4), ONE)
    assert g(0) == mpq(1, 4) and g(mpq(3, 4)) == ONE
    assert g.is_pl2()


def test_map_partition_hits_points():
    src = [0, mpq(1, 8), mpq(5, 8), 1]
    dst = [0, mpq(1, 2), mpq(3, 4), 1]
    g = map_partition(src, dst)
    assert [g(t) for t in src] == [mpq(t) for t in dst]
    assert g.in_F()
    with pytest.raises(ValueError):
        map_partition([0, mpq(1, 3), 1], [0, HALF, 1])


def test_extend_partial():
    g = dyadic_interval_map(mpq(1, 4), HALF, mpq(1, 8), HALF)
    e = extend_partial(g, 0, 1)
    assert e.in_F()
    assert e(mpq(3, 8)) == g(mpq(3, 8))
