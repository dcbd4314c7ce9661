import csv
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from thompson import growth
from thompson.dyadic_core import Word, random_word, word_equal, word_to_plmap
from thompson.growth import (
    ForestDiagram, ValidationMismatch, bfs_ball, bfs_ball_tree_pairs,
    bfs_positive_counts, bfs_sphere, bfs_sphere_sizes, certify_identities,
    forest_from_element, forest_from_word, forest_to_word, is_positive,
    is_positive_shape, length, positive_count, slice_params,
    sphere_count_recursive, to_x0x1, tree_code, tree_from_code,
)

GOLDEN = Path(__file__).parent / "golden" / "sphere_sizes.csv"

x01 = st.lists(st.tuples(st.integers(0, 1), st.sampled_from((1, -1))), max_size=16)


def golden_spheres():
    with open(GOLDEN) as fh:
        return [int(row["sphere_size"]) for row in csv.DictReader(fh)]


def test_sphere_sizes_match_golden():
    gold = golden_spheres()
    assert list(bfs_sphere_sizes(len(gold) - 1)) == gold


def test_tree_pair_bfs_agrees():
    assert list(bfs_ball_tree_pairs(7)) == list(bfs_sphere_sizes(7))


def test_small_lengths():
    cases = {"": 0, "x0": 1, "x1": 1, "x2": 3, "x3": 5, "x0 x1": 2,
             "x0 x1^-1": 2, "x2 x1^-1": 4, "x1 x1": 2}
    for w, n in cases.items():
        assert length(forest_from_element(w)) == n, w


def test_length_equals_bfs_distance_on_ball():
    ball = bfs_ball(6)
    for key, d in ball.items():
        assert length(ForestDiagram.from_key(key)) == d


@settings(max_examples=80, deadline=None)
@given(x01)
def test_length_bounded_by_word_length(ls):
    w = Word(ls)
    f = forest_from_word(w)
    assert length(f) <= len(w)
    assert length(f) % 2 == len(w) % 2


@settings(max_examples=80, deadline=None)
@given(x01)
def test_forest_round_trip(ls):
    w = Word(ls)
    f = forest_from_word(w)
    back = forest_to_word(f)
    assert word_equal(back, w)
    assert forest_from_word(back) == f


def test_to_x0x1():
    w = to_x0x1("x3 x1^-1")
    assert all(i <= 1 for i, _ in w.letters)
    assert word_to_plmap(w) == word_to_plmap("x3 x1^-1")


def test_inverse_diagram():
    rng = random.Random(0)
    for _ in range(30):
        w = random_word(10, 1, rng)
        f = forest_from_word(w)
        assert f.inverse() == forest_from_word(w.inverse())
        assert length(f.inverse()) == length(f)


def test_tree_codes():
    for code in ("0", "100", "11000", "10100"):
        assert tree_code(tree_from_code(code)) == code


def test_positive_series():
    assert [positive_count(n) for n in range(10)] == [1, 2, 4, 9, 20, 45, 101, 227, 510, 1146]


def test_positive_counts_by_bfs():
    assert list(bfs_positive_counts(8)) == [positive_count(n) for n in range(9)]


def test_positivity_shape_matches_normal_form():
    for key in bfs_ball(6):
        f = ForestDiagram.from_key(key)
        assert is_positive_shape(f) == is_positive(f)


def test_slice_params():
    f = forest_from_element("x2 x1^-1")
    i, j, p, q = slice_params(f)
    assert (i, j) == (1, 0)


def test_recurrence_base_cases():
    assert sphere_count_recursive(0) == 1
    assert sphere_count_recursive(1) == 4


def test_recurrence_validation_raises(monkeypatch):
    monkeypatch.setattr(growth, "bfs_sphere", lambda n: -1)
    with pytest.raises(ValidationMismatch):
        sphere_count_recursive(1)


def test_recurrence_budget():
    with pytest.raises(ValueError):
        sphere_count_recursive(growth.BFS_BUDGET + 1)


def test_structural_identities_hold():
    rep = certify_identities(6)
    for name in ("inverse", "both_pointers_left", "bottom_pointer_left"):
        checked, failures, _ = rep[name]
        assert checked > 0 and failures == 0, name


def test_bfs_sphere_bound():
    # each layer is at most three times the previous one (four generators, one back edge)
    s = bfs_sphere_sizes(9)
    assert all(s[k + 1] <= 3 * s[k] for k in range(1, 9))
    assert bfs_sphere(1) == 4
