"""A decomposition-problem key exchange over F and attacks that break it.

The public subgroups are A_s = <x0 x1^-1, ..., x0 xs^-1>, the maps supported
on [0, phi(s)], and B_s = <x_{s+1}, ..., x_{2s}>, the maps supported on
[phi(s), 1].  They commute elementwise, which is what makes the shared key
agree, and their disjoint supports are what the attacks exploit.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .dyadic_core import (
    PLMap, Word, compose, concat_maps, extend_partial, map_partition, mpq,
    normal_form, normal_form_product, plmap_to_word, pow2, word, word_to_plmap,
)


def phi(s: int) -> mpq:
    if s < 0:
        raise ValueError("s must be non-negative")
    return 1 - pow2(-(s + 1))


@dataclass
class ProtocolParams:
    s: int
    M: int
    seed: int = 0
    strict: bool = True  # enforce the published parameter ranges

    def __post_init__(self):
        if self.strict:
            if not 3 <= self.s <= 8:
                raise ValueError("s must lie in [3, 8]")
            if self.M % 2 or not 256 <= self.M <= 320:
                raise ValueError("M must be an even integer in [256, 320]")
        elif self.s < 2 or self.M < 2:
            raise ValueError("need s >= 2 and M >= 2")


@dataclass
class Transcript:
    """What the eavesdropper sees: the public word and the two messages."""

    w: Word
    u1: Word
    u2: Word
    s: int
    variant: str = "su"

    def to_json(self) -> dict:
        return {"w": str(self.w), "u1": str(self.u1), "u2": str(self.u2),
                "s": self.s, "variant": self.variant}

    @classmethod
    def from_json(cls, obj) -> "Transcript":
        return cls(word(obj["w"]), word(obj["u1"]), word(obj["u2"]), int(obj["s"]),
                   obj.get("variant", "su"))


@dataclass
class RecoveredKey:
    """A pair flanking w in one of the messages, and the key it yields.

    For the su variant (a, b) satisfies a w b = u1 (Alice) or b w a = u2
    (Bob); for the Ko-Lee variant both factors come from one party's
    subgroup and a w b reproduces that party's message.
    """

    a: Word
    b: Word
    K: Word
    which_party: str

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "K": str(self.K),
                "party": self.which_party}


@dataclass
class ProtocolRun:
    transcript: Transcript
    K: Word
    secrets: dict = field(default_factory=dict)


def nf(*parts) -> Word:
    return normal_form_product(*parts)


# ---------------------------------------------------------------------------
# sampling

def _generators(group: str, s: int) -> list:
    if group == "A":
        return [Word([(0, 1), (k, -1)]) for k in range(1, s + 1)]
    if group == "B":
        return [Word([(k, 1)]) for k in range(s + 1, 2 * s + 1)]
    if group == "W":
        return [Word([(k, 1)]) for k in range(0, s + 3)]
    raise ValueError(f"unknown group {group!r}")


def _random_reduced(gens: list, n: int, rng: random.Random) -> Word:
    letters = []
    last = None
    for _ in range(n):
        while True:
            i = rng.randrange(len(gens))
            e = rng.choice((1, -1))
            if last != (i, -e):
                break
        last = (i, e)
        g = gens[i] if e == 1 else gens[i].inverse()
        letters.extend(g.letters)
    return Word(letters)


def _sample(group: str, s: int, M: int, rng: random.Random, lo: int, hi: int,
            tries: int = 20000) -> Word:
    """Normal form of a random reduced word, resampled until its length is in [lo, hi]."""
    gens = _generators(group, s)
    n = max(1, M // 2)
    for _ in range(tries):
        z = normal_form(_random_reduced(gens, n, rng))
        length = len(z)
        if lo <= length <= hi:
            return z
        # steer the word length towards the target
        target = n * M / max(length, 1)
        n = max(1, int(round((n + target) / 2 + rng.uniform(-1, 1))))
    raise RuntimeError(f"could not sample a {group} element of length about {M}")


def random_subgroup_element(group: str, s: int, M: int, rng: random.Random,
                            band: int = 8) -> Word:
    """Normal-form element of A_s or B_s with length in [M - band, M + band]."""
    return _sample(group, s, M, rng, M - band, M + band)


def random_public_word(s: int, M: int, rng: random.Random, tries: int = 1000) -> Word:
    """Element of <x0, ..., x_{s+2}> whose normal form has length exactly M.

    A word near the target length is adjusted one letter at a time:
    random letters are appended while too short, trailing letters dropped
    while too long.
    """
    z = _sample("W", s, M, rng, M - 8, M + 8)
    for _ in range(tries):
        if len(z) == M:
            return z
        if len(z) < M:
            z = nf(z, Word([(rng.randrange(s + 3), rng.choice((1, -1)))]))
        else:
            z = nf(Word(z.letters[:-1]))
    raise RuntimeError(f"could not reach normal-form length {M}")


# ---------------------------------------------------------------------------
# subgroup membership

def in_B(z: Word, s: int) -> bool:
    """Normal forms of B_s use only indices >= s+1."""
    return all(i >= s + 1 for i, _ in z.letters)


def membership_AsBs(z, s: int):
    """(a, b) with z = a b, a in A_s, b in B_s, or None."""
    z = word(z)
    if not z.is_normal:
        z = normal_form(z)
    pos, neg = z.split_normal()
    r = 0
    while r < len(pos) and r < len(neg) and pos[r] - (r + 1) < s and neg[r] - (r + 1) < s:
        r += 1
    rest_pos = [i - r for i in pos[r:]]
    rest_neg = [j - r for j in neg[r:]]
    if any(i < s + 1 for i in rest_pos + rest_neg):
        return None
    a = Word.from_normal(pos[:r], neg[:r])
    b = Word.from_normal(rest_pos, rest_neg)
    return a, b


def in_A(z: Word, s: int) -> bool:
    m = membership_AsBs(z, s)
    return m is not None and len(m[1]) == 0


# ---------------------------------------------------------------------------
# the protocol

def run_protocol(params: ProtocolParams, variant: str = "su") -> ProtocolRun:
    rng = random.Random(params.seed)
    s, M = params.s, params.M
    w = random_public_word(s, M, rng)
    a1 = random_subgroup_element("A", s, M, rng)
    b1 = random_subgroup_element("B", s, M, rng)
    a2 = random_subgroup_element("A", s, M, rng)
    b2 = random_subgroup_element("B", s, M, rng)
    if variant == "su":
        u1, u2 = nf(a1, w, b1), nf(b2, w, a2)
        KA, KB = nf(a1, u2, b1), nf(b2, u1, a2)
    elif variant == "kolee":
        u1, u2 = nf(a1, w, a2), nf(b1, w, b2)
        KA, KB = nf(a1, u2, a2), nf(b1, u1, b2)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if KA != KB:
        raise AssertionError("shared keys differ")
    t = Transcript(w, u1, u2, s, variant)
    return ProtocolRun(t, KA, {"a1": a1, "b1": b1, "a2": a2, "b2": b2})


# ---------------------------------------------------------------------------
# attacks

def attack(t: Transcript, s: int | None = None) -> RecoveredKey:
    """Recover a private pair from the normal forms of u1 w^-1 and w^-1 u2."""
    s = t.s if s is None else s
    w, u1, u2 = t.w, t.u1, t.u2
    winv = w.inverse()
    results = []
    m2 = membership_AsBs(nf(winv, u2), s)
    if m2 is not None:
        a = m2[0]
        b = nf(u2, a.inverse(), winv)
        results.append(RecoveredKey(a, b, nf(b, u1, a), "Bob"))
    m1 = membership_AsBs(nf(u1, winv), s)
    if m1 is not None:
        a = m1[0]
        b = nf(winv, a.inverse(), u1)
        results.append(RecoveredKey(a, b, nf(a, u2, b), "Alice"))
    if not results:
        raise RuntimeError("neither quotient factors through A_s B_s")
    if len(results) == 2 and results[0].K != results[1].K:
        raise AssertionError("the two branches disagree on the key")
    key = results[0]
    _check_su(t, key, s)
    return key


def _check_su(t: Transcript, key: RecoveredKey, s: int):
    if not (in_A(key.a, s) and in_B(key.b, s)):
        raise AssertionError("recovered factors are outside the subgroups")
    if key.which_party == "Alice":
        ok = nf(key.a, t.w, key.b) == t.u1
    else:
        ok = nf(key.b, t.w, key.a) == t.u2
    if not ok:
        raise AssertionError("recovered pair does not reproduce the message")


def _pad(g: PLMap, lo, hi) -> PLMap:
    """Extend g, defined on a sub-interval [lo, hi], by the identity to [0, 1]."""
    pieces = []
    if lo > 0:
        pieces.append(PLMap.identity(0, lo))
    pieces.append(g)
    if hi < 1:
        pieces.append(PLMap.identity(hi, 1))
    return concat_maps(pieces)


def _extend_on_A(abar: PLMap, s: int) -> PLMap:
    """An element of A_s agreeing with abar, a map on [0, c] with c <= phi(s)."""
    p = phi(s)
    return _pad(extend_partial(abar, 0, p), 0, p)


def attack_transitivity(t: Transcript, s: int | None = None) -> RecoveredKey:
    """Attack the party not reachable by the quotient test, via extension in A_s."""
    s = t.s if s is None else s
    p = phi(s)
    wf = word_to_plmap(t.w)
    if wf(p) <= p:
        # u1 = a1 w on [0, phi], so a1 = u1 w^-1 on [0, w(phi)]
        u1f = word_to_plmap(t.u1)
        abar = compose(u1f, wf.inverse()).restrict(0, wf(p))
        a = plmap_to_word(_extend_on_A(abar, s))
        b = nf(t.w.inverse(), a.inverse(), t.u1)
        key = RecoveredKey(a, b, nf(a, t.u2, b), "Alice")
    else:
        # same argument on u2^-1 = a2^-1 w^-1 b2^-1
        winv = wf.inverse()
        u2inv = word_to_plmap(t.u2).inverse()
        abar = compose(u2inv, wf).restrict(0, winv(p))
        a_inv = plmap_to_word(_extend_on_A(abar, s))
        a = a_inv.inverse()
        b = nf(t.u2, a_inv, t.w.inverse())
        key = RecoveredKey(normal_form(a), b, nf(b, t.u1, a), "Bob")
    _check_su(t, key, s)
    return key


def attack_kolee(t: Transcript, s: int | None = None) -> RecoveredKey:
    """Attack the variant u1 = a1 w a2, u2 = b1 w b2."""
    s = t.s if s is None else s
    p = phi(s)
    wf = word_to_plmap(t.w)
    winv = wf.inverse()
    c = winv(p)
    if wf(p) <= p:
        # Bob: normalize b2 so it fixes c = w^-1(phi) >= phi
        u2f = word_to_plmap(t.u2)
        q = u2f.inverse()(p)
        b0 = PLMap.identity() if q == c else map_partition([0, p, q, 1], [0, p, c, 1])
        u2n = compose(u2f, b0.inverse())
        b2n = compose(winv, u2n).restrict(0, c)
        sigma2 = _pad(b2n, 0, c)
        sigma1 = compose(compose(u2n, sigma2.inverse()), winv)
        left = plmap_to_word(sigma1)
        right = plmap_to_word(compose(sigma2, b0))
        if not (in_B(left, s) and in_B(right, s)):
            raise AssertionError("recovered factors are outside B_s")
        if nf(left, t.w, right) != t.u2:
            raise AssertionError("recovered pair does not reproduce the message")
        return RecoveredKey(left, right, nf(left, t.u1, right), "Bob")
    # Alice: normalize a2 so it fixes c = w^-1(phi) < phi
    u1f = word_to_plmap(t.u1)
    q = u1f.inverse()(p)
    a0 = PLMap.identity() if q == c else map_partition([0, q, p, 1], [0, c, p, 1])
    u1n = compose(u1f, a0.inverse())
    a2n = compose(winv, u1n).restrict(c, 1)
    sigma2 = _pad(a2n, c, 1)
    sigma1 = compose(compose(u1n, sigma2.inverse()), winv)
    left = plmap_to_word(sigma1)
    right = plmap_to_word(compose(sigma2, a0))
    if not (in_A(left, s) and in_A(right, s)):
        raise AssertionError("recovered factors are outside A_s")
    if nf(left, t.w, right) != t.u1:
        raise AssertionError("recovered pair does not reproduce the message")
    return RecoveredKey(left, right, nf(left, t.u2, right), "Alice")
