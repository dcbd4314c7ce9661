import json
import random

import pytest

from thompson.crypto import (
    ProtocolParams, Transcript, attack, attack_kolee, attack_transitivity,
    in_A, in_B, membership_AsBs, nf, phi, random_public_word,
    random_subgroup_element, run_protocol,
)
from thompson.dyadic_core import Word, compose, mpq, word, word_to_plmap


def test_phi():
    assert phi(3) == mpq(15, 16)
    assert phi(0) == mpq(1, 2)


def test_params_ranges():
    ProtocolParams(3, 256)
    ProtocolParams(8, 320)
    for s, M in ((2, 256), (9, 256), (4, 255), (4, 322), (4, 257)):
        with pytest.raises(ValueError):
            ProtocolParams(s, M)
    ProtocolParams(2, 20, strict=False)


def test_subgroup_supports():
    s = 4
    p = phi(s)
    rng = random.Random(0)
    a = word_to_plmap(random_subgroup_element("A", s, 40, rng))
    b = word_to_plmap(random_subgroup_element("B", s, 40, rng))
    assert a.restrict(p, 1).is_identity()
    assert b.restrict(0, p).is_identity()
    assert compose(a, b) == compose(b, a)


def test_sampler_lengths():
    rng = random.Random(1)
    z = random_subgroup_element("A", 5, 64, rng)
    assert 56 <= len(z) <= 72
    w = random_public_word(5, 64, rng)
    assert len(w) == 64
    assert max(i for i, _ in w.letters) <= 5 + 2 + 64


def test_membership_decomposition():
    rng = random.Random(2)
    s = 4
    for _ in range(20):
        a = random_subgroup_element("A", s, 30, rng)
        b = random_subgroup_element("B", s, 30, rng)
        ra, rb = membership_AsBs(nf(a, b), s)
        assert ra == a and rb == b
        assert in_A(a, s) and in_B(b, s)
    assert membership_AsBs(word("x0"), s) is None
    assert not in_B(word("x3"), s)


def test_protocol_keys_agree():
    for seed in range(3):
        run = run_protocol(ProtocolParams(4, 256, seed))
        sec = run.secrets
        t = run.transcript
        assert nf(sec["a1"], t.w, sec["b1"]) == t.u1
        assert run.K == nf(sec["a1"], t.u2, sec["b1"])


def test_protocol_is_seeded():
    a = run_protocol(ProtocolParams(5, 280, 9))
    b = run_protocol(ProtocolParams(5, 280, 9))
    assert a.transcript.to_json() == b.transcript.to_json()
    assert a.K == b.K


def test_transcript_json_round_trip():
    t = run_protocol(ProtocolParams(3, 256, 1)).transcript
    back = Transcript.from_json(json.loads(json.dumps(t.to_json())))
    assert back.w == t.w and back.u1 == t.u1 and back.u2 == t.u2 and back.s == t.s


@pytest.mark.parametrize("seed", range(5))
def test_su_attack(seed):
    rng = random.Random(seed)
    run = run_protocol(ProtocolParams(rng.randint(3, 8), 2 * rng.randint(128, 160), seed))
    assert attack(run.transcript).K == run.K


@pytest.mark.parametrize("seed", range(5))
def test_transitivity_attack(seed):
    rng = random.Random(seed)
    run = run_protocol(ProtocolParams(rng.randint(3, 8), 2 * rng.randint(128, 160), seed))
    assert attack_transitivity(run.transcript).K == run.K


@pytest.mark.parametrize("seed", range(5))
def test_kolee_attack(seed):
    rng = random.Random(seed)
    run = run_protocol(ProtocolParams(rng.randint(3, 8), 2 * rng.randint(128, 160), seed),
                       "kolee")
    assert attack_kolee(run.transcript).K == run.K


def test_small_parameters():
    run = run_protocol(ProtocolParams(2, 24, 3, strict=False))
    assert attack(run.transcript).K == run.K


def test_attack_rejects_garbage():
    t = Transcript(word("x0"), word("x1 x0"), Word(), 3)
    with pytest.raises((RuntimeError, AssertionError)):
        attack(t)
