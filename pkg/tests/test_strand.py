import json
import random

from hypothesis import given, settings, strategies as st

from thompson.dyadic_core import (
    Word, conjugate, generator, random_element, random_word, word_to_plmap,
)
from thompson.pl_dynamics import conjugate_pl
from thompson.strand import (
    canonical_form, close_and_reduce, concatenate, conjugate_strand,
    diagram_to_plmap, fixed_point_report, identity_diagram, inverse_diagram,
    min_rotation, reduce_strand, strand_from_plmap, strand_from_word,
)

letters = st.lists(st.tuples(st.integers(0, 4), st.sampled_from((1, -1))), max_size=14)


def test_generator_diagram_reads_back():
    for k in range(4):
        assert diagram_to_plmap(strand_from_word(f"x{k}")) == generator(k)


def test_evaluate_bits_x0():
    d = strand_from_word("x0")
    # x0 sends [0,1/2] to [0,1/4], [1/2,3/4] to [1/4,1/2], [3/4,1] to [1/2,1]
    assert d.evaluate_bits("0") == "00"
    assert d.evaluate_bits("10") == "01"
    assert d.evaluate_bits("11") == "1"


def test_concatenate_puts_second_on_top():
    a, b = strand_from_word("x0"), strand_from_word("x1")
    assert diagram_to_plmap(concatenate(a, b)) == word_to_plmap("x0 x1")


@settings(max_examples=60, deadline=None)
@given(letters)
def test_reduction_preserves_element(ls):
    w = Word(ls)
    d = strand_from_word(w)
    assert diagram_to_plmap(reduce_strand(d)) == word_to_plmap(w)


@settings(max_examples=40, deadline=None)
@given(letters)
def test_inverse_cancels(ls):
    d = strand_from_word(Word(ls))
    assert reduce_strand(concatenate(d, inverse_diagram(d))) == identity_diagram()


def test_reduced_form_is_unique():
    rng = random.Random(5)
    for _ in range(30):
        f = random_element(rng.randint(1, 6), rng)
        w = Word(list(random_word(6, 3, rng).letters))
        padded = w * Word(list(reversed([(i, -s) for i, s in w.letters])))
        d1 = reduce_strand(strand_from_plmap(f))
        d2 = reduce_strand(concatenate(strand_from_plmap(f), strand_from_word(padded)))
        assert d1 == d2


def test_min_rotation():
    assert min_rotation("1010100") == "0010101"
    assert min_rotation("") == ""
    assert min_rotation("111") == "111"


def test_fixed_point_report_x0():
    rep = fixed_point_report("x0")
    assert [r["kind"] for r in rep] == ["attractor", "repeller"]
    assert rep[0]["slope"] == "2^-1"


def test_fixed_point_report_x1_has_interval():
    rep = fixed_point_report("x1")
    assert rep[0] == {"kind": "interval", "slope": "1", "tail": None}
    assert close_and_reduce("x1").free_loops() == 1


def test_relation_conjugates():
    for k in range(3):
        for n in range(k + 1, 5):
            assert conjugate_strand(f"x{n}", f"x{n + 1}")
    assert not conjugate_strand("x0", "x1")
    assert not conjugate_strand("x0", "x0^-1")


def test_canonical_form_is_conjugacy_invariant():
    rng = random.Random(11)
    for _ in range(40):
        y = random_element(rng.randint(1, 5), rng)
        g = random_element(rng.randint(1, 5), rng)
        assert canonical_form(y) == canonical_form(conjugate(y, g))


def test_strand_matches_witness_search():
    rng = random.Random(12)
    for _ in range(60):
        y = random_element(rng.randint(1, 4), rng)
        z = random_element(rng.randint(1, 4), rng)
        assert conjugate_strand(y, z) == (conjugate_pl(y, z) is not None)


def test_exports():
    d = strand_from_word("x0 x1^-1")
    dot = d.to_dot()
    assert dot.startswith("digraph")
    js = json.loads(json.dumps(d.to_json()))
    assert {v["kind"] for v in js["vertices"]} >= {"split", "merge"}
    a = close_and_reduce(d)
    assert "loops" in a.to_json()
    assert a.to_dot().startswith("digraph")
