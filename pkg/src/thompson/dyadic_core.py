"""Exact arithmetic and the basic representations of Thompson's group F.

Elements are handled as words in the infinite generating set x_0, x_1, ...,
as reduced tree pairs, and as piecewise-linear maps of [0, 1] with exact
rational breakpoints.

Product convention: a word ``a b`` is the function ``a o b``, so the rightmost
letter acts first.  With the concrete generators below this is the only
reading under which x_k^-1 x_n x_k = x_{n+1} holds for k < n.
"""
from __future__ import annotations

import random
import re
from bisect import bisect_left, bisect_right
from functools import lru_cache
from typing import Iterable, Sequence

from gmpy2 import mpq

# exact rationals (gmpy2.mpq behaves like fractions.Fraction, only faster)
Rational = mpq

ZERO = mpq(0)
ONE = mpq(1)
HALF = mpq(1, 2)


# ---------------------------------------------------------------------------
# numbers

def is_dyadic(t) -> bool:
    t = mpq(t)
    d = t.denominator
    return d & (d - 1) == 0


def log2_exact(t) -> int | None:
    """Return k when t == 2**k, else None."""
    t = mpq(t)
    if t <= 0:
        return None
    n, d = t.numerator, t.denominator
    if n & (n - 1) == 0 and d == 1:
        return n.bit_length() - 1
    if n == 1 and d & (d - 1) == 0:
        return -(d.bit_length() - 1)
    return None


def pow2(k: int) -> mpq:
    return mpq(1 << k) if k >= 0 else mpq(1, 1 << -k)


class Dyadic:
    """A number num / 2**exp with num odd (or zero, with exp = 0)."""

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int, exponent: int = 0):
        numerator = int(numerator)
        exponent = int(exponent)
        if numerator == 0:
            exponent = 0
        else:
            while exponent > 0 and numerator % 2 == 0:
                numerator //= 2
                exponent -= 1
            while exponent < 0:
                numerator *= 2
                exponent += 1
        self.numerator = numerator
        self.exponent = exponent

    @classmethod
    def from_fraction(cls, t) -> "Dyadic":
        t = mpq(t)
        if not is_dyadic(t):
            raise ValueError(f"{t} is not a dyadic rational")
        return cls(t.numerator, t.denominator.bit_length() - 1)

    def to_fraction(self) -> mpq:
        return mpq(self.numerator, 1 << self.exponent)

    def to_json(self) -> dict:
        return {"num": str(self.numerator), "exp": self.exponent}

    @classmethod
    def from_json(cls, obj) -> "Dyadic":
        return cls(int(obj["num"]), int(obj["exp"]))

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.numerator == other.numerator and self.exponent == other.exponent
        try:
            return self.to_fraction() == mpq(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __lt__(self, other):
        return self.to_fraction() < _frac(other)

    def __le__(self, other):
        return self.to_fraction() <= _frac(other)

    def __gt__(self, other):
        return self.to_fraction() > _frac(other)

    def __ge__(self, other):
        return self.to_fraction() >= _frac(other)

    def __add__(self, other):
        return Dyadic.from_fraction(self.to_fraction() + _frac(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Dyadic.from_fraction(self.to_fraction() - _frac(other))

    def __rsub__(self, other):
        return Dyadic.from_fraction(_frac(other) - self.to_fraction())

    def __mul__(self, other):
        return Dyadic.from_fraction(self.to_fraction() * _frac(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Dyadic(-self.numerator, self.exponent)

    def __truediv__(self, other):
        # quotients of dyadics are dyadic only for power-of-two divisors
        return Dyadic.from_fraction(self.to_fraction() / _frac(other))

    def __repr__(self):
        return f"Dyadic({self.numerator}, {self.exponent})"

    def __str__(self):
        if self.exponent == 0:
            return str(self.numerator)
        return f"{self.numerator}/{1 << self.exponent}"


def _frac(t) -> mpq:
    if isinstance(t, Dyadic):
        return t.to_fraction()
    return mpq(t)


as_rational = _frac


def rational_to_json(t) -> dict:
    t = _frac(t)
    if is_dyadic(t):
        return Dyadic.from_fraction(t).to_json()
    return {"num": str(t.numerator), "den": str(t.denominator)}


def rational_from_json(obj) -> mpq:
    if "den" in obj:
        return mpq(int(obj["num"]), int(obj["den"]))
    return Dyadic.from_json(obj).to_fraction()


# ---------------------------------------------------------------------------
# piecewise-linear maps

class PLMap:
    """Increasing piecewise-linear bijection [xs[0], xs[-1]] -> [ys[0], ys[-1]].

    Stored as parallel tuples of exact rational breakpoints, always in canonical
    form: collinear neighbouring segments are merged, so two maps are equal
    exactly when their breakpoint tuples are equal.
    """

    __slots__ = ("xs", "ys", "_slopes")

    def __init__(self, xs, ys, canonical: bool = False):
        xs = tuple(mpq(x) for x in xs) if not canonical else tuple(xs)
        ys = tuple(mpq(y) for y in ys) if not canonical else tuple(ys)
        if not canonical:
            if len(xs) != len(ys) or len(xs) < 2:
                raise ValueError("a PL map needs at least two breakpoints")
            for i in range(len(xs) - 1):
                if not (xs[i] < xs[i + 1] and ys[i] < ys[i + 1]):
                    raise ValueError("breakpoints must be strictly increasing")
            xs, ys = _merge_collinear(xs, ys)
        self.xs = xs
        self.ys = ys
        self._slopes = None

    @classmethod
    def identity(cls, a=ZERO, b=ONE) -> "PLMap":
        a, b = _frac(a), _frac(b)
        return cls((a, b), (a, b), canonical=True)

    @classmethod
    def linear(cls, a, b, c, d) -> "PLMap":
        """The affine map [a, b] -> [c, d]."""
        return cls((_frac(a), _frac(b)), (_frac(c), _frac(d)))

    @property
    def domain(self):
        return (self.xs[0], self.xs[-1])

    @property
    def image(self):
        return (self.ys[0], self.ys[-1])

    @property
    def slopes(self):
        if self._slopes is None:
            xs, ys = self.xs, self.ys
            self._slopes = tuple((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
                                 for i in range(len(xs) - 1))
        return self._slopes

    def breakpoints(self):
        """Interior points where the slope changes."""
        return self.xs[1:-1]

    def __len__(self):
        return len(self.xs) - 1

    def __call__(self, t):
        t = _frac(t)
        xs = self.xs
        if t < xs[0] or t > xs[-1]:
            raise ValueError(f"{t} outside domain [{xs[0]}, {xs[-1]}]")
        i = bisect_right(xs, t) - 1
        if i >= len(xs) - 1:
            return self.ys[-1]
        if xs[i] == t:
            return self.ys[i]
        return self.ys[i] + (t - xs[i]) * self.slopes[i]

    def slope_right(self, t) -> mpq:
        """One-sided slope just to the right of t."""
        t = _frac(t)
        i = bisect_right(self.xs, t) - 1
        if i >= len(self.xs) - 1:
            raise ValueError("no segment to the right of the domain end")
        return self.slopes[i]

    def slope_left(self, t) -> mpq:
        t = _frac(t)
        i = bisect_left(self.xs, t) - 1
        if i < 0:
            raise ValueError("no segment to the left of the domain start")
        return self.slopes[i]

    def inverse(self) -> "PLMap":
        return PLMap(self.ys, self.xs, canonical=True)

    def __invert__(self):
        return self.inverse()

    def __mul__(self, other: "PLMap") -> "PLMap":
        return compose(self, other)

    def __pow__(self, n: int) -> "PLMap":
        return power(self, n)

    def __eq__(self, other):
        if not isinstance(other, PLMap):
            return NotImplemented
        return self.xs == other.xs and self.ys == other.ys

    def __hash__(self):
        return hash((self.xs, self.ys))

    def __repr__(self):
        pts = ", ".join(f"({x}, {y})" for x, y in zip(self.xs, self.ys))
        return f"PLMap([{pts}])"

    def is_identity(self) -> bool:
        return len(self.xs) == 2 and self.xs == self.ys

    def restrict(self, a, b) -> "PLMap":
        """Restriction to [a, b], a sub-interval of the domain."""
        a, b = _frac(a), _frac(b)
        if not (self.xs[0] <= a < b <= self.xs[-1]):
            raise ValueError(f"[{a}, {b}] is not inside the domain")
        i = bisect_right(self.xs, a)
        j = bisect_left(self.xs, b)
        xs = (a,) + self.xs[i:j] + (b,)
        ys = (self(a),) + self.ys[i:j] + (self(b),)
        return PLMap(xs, ys, canonical=True)

    def is_pl2(self) -> bool:
        """Dyadic breakpoints and power-of-two slopes."""
        if any(log2_exact(s) is None for s in self.slopes):
            return False
        return all(is_dyadic(x) for x in self.xs[1:-1])

    def in_F(self) -> bool:
        return self.xs[0] == 0 and self.xs[-1] == 1 and self.ys[0] == 0 \
            and self.ys[-1] == 1 and self.is_pl2()

    def to_json(self) -> dict:
        return {
            "domain": [rational_to_json(self.xs[0]), rational_to_json(self.xs[-1])],
            "breakpoints": [[rational_to_json(x), rational_to_json(y)]
                            for x, y in zip(self.xs, self.ys)],
        }

    @classmethod
    def from_json(cls, obj) -> "PLMap":
        pts = obj["breakpoints"]
        return cls([rational_from_json(p[0]) for p in pts],
                   [rational_from_json(p[1]) for p in pts])


def _merge_collinear(xs, ys):
    if len(xs) <= 2:
        return tuple(xs), tuple(ys)
    ox, oy = [xs[0]], [ys[0]]
    for i in range(1, len(xs) - 1):
        x0, y0 = ox[-1], oy[-1]
        x1, y1 = xs[i], ys[i]
        x2, y2 = xs[i + 1], ys[i + 1]
        if (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0):
            continue
        ox.append(x1)
        oy.append(y1)
    ox.append(xs[-1])
    oy.append(ys[-1])
    return tuple(ox), tuple(oy)


def compose(f: PLMap, g: PLMap) -> PLMap:
    """The map t -> f(g(t)); g's image must lie inside f's domain."""
    gx, gy = g.xs, g.ys
    fx, fy = f.xs, f.ys
    if gy[0] < fx[0] or gy[-1] > fx[-1]:
        raise ValueError("domain mismatch in composition")
    fs = f.slopes
    rx, ry = [], []
    j = bisect_right(fx, gy[0]) - 1
    if j >= len(fx) - 1:
        j = len(fx) - 2
    last = len(gx) - 1
    for k in range(last):
        x0, y0 = gx[k], gy[k]
        y1 = gy[k + 1]
        while fx[j + 1] <= y0 and j < len(fx) - 2:
            j += 1
        rx.append(x0)
        ry.append(fy[j] + (y0 - fx[j]) * fs[j])
        # f-breakpoints strictly inside (y0, y1)
        if fx[j + 1] < y1:
            inv = (gx[k + 1] - x0) / (y1 - y0)
            while fx[j + 1] < y1:
                j += 1
                rx.append(x0 + (fx[j] - y0) * inv)
                ry.append(fy[j])
    x0, y0 = gx[last], gy[last]
    while fx[j + 1] < y0 and j < len(fx) - 2:
        j += 1
    rx.append(x0)
    ry.append(fy[j] + (y0 - fx[j]) * fs[j])
    xs, ys = _merge_collinear(rx, ry)
    return PLMap(xs, ys, canonical=True)


def inverse(f: PLMap) -> PLMap:
    return f.inverse()


def power(f: PLMap, n: int) -> PLMap:
    if n == 0:
        return PLMap.identity(*f.domain)
    if n < 0:
        f, n = f.inverse(), -n
    result = None
    base = f
    while n:
        if n & 1:
            result = base if result is None else compose(result, base)
        n >>= 1
        if n:
            base = compose(base, base)
    return result


def evaluate(f: PLMap, t) -> mpq:
    return f(t)


def equal(f: PLMap, g: PLMap) -> bool:
    return f == g


def conjugate(f: PLMap, g: PLMap) -> PLMap:
    """g^-1 o f o g."""
    return compose(g.inverse(), compose(f, g))


def concat_maps(pieces: Sequence[PLMap]) -> PLMap:
    """Glue maps on consecutive intervals into a single map."""
    xs, ys = list(pieces[0].xs), list(pieces[0].ys)
    for p in pieces[1:]:
        if p.xs[0] != xs[-1] or p.ys[0] != ys[-1]:
            raise ValueError("pieces do not fit together")
        xs.extend(p.xs[1:])
        ys.extend(p.ys[1:])
    xs, ys = _merge_collinear(xs, ys)
    return PLMap(xs, ys, canonical=True)


# ---------------------------------------------------------------------------
# generators

_X0 = PLMap((ZERO, HALF, mpq(3, 4), ONE),
            (ZERO, mpq(1, 4), HALF, ONE), canonical=True)


@lru_cache(maxsize=256)
def generator(k: int) -> PLMap:
    """x_k: x_0 squeezed onto [1 - 2^-k, 1], identity to the left."""
    if k < 0:
        raise ValueError("generator index must be non-negative")
    if k == 0:
        return _X0
    a = 1 - pow2(-k)
    L = pow2(-k)
    return PLMap((ZERO, a, a + L / 2, a + 3 * L / 4, ONE),
                 (ZERO, a, a + L / 4, a + L / 2, ONE), canonical=True)


# ---------------------------------------------------------------------------
# words

_TOKEN = re.compile(r"^x(\d+)(?:\^(-?\d+))?$")


class Word:
    """A word in the letters x_k^{+-1}, stored as (index, sign) pairs."""

    __slots__ = ("letters", "is_normal")

    def __init__(self, letters: Iterable = (), is_normal: bool = False):
        self.letters = tuple((int(i), int(s)) for i, s in letters)
        for i, s in self.letters:
            if i < 0 or s not in (1, -1):
                raise ValueError(f"bad letter {(i, s)}")
        self.is_normal = is_normal

    @classmethod
    def parse(cls, text: str) -> "Word":
        letters = []
        for tok in text.replace("*", " ").split():
            if tok in ("1", "e", "id"):
                continue
            m = _TOKEN.match(tok)
            if not m:
                raise ValueError(f"cannot parse token {tok!r}")
            idx = int(m.group(1))
            e = int(m.group(2)) if m.group(2) is not None else 1
            sign = 1 if e > 0 else -1
            letters.extend([(idx, sign)] * abs(e))
        return cls(letters)

    @classmethod
    def from_normal(cls, pos: Sequence[int], neg: Sequence[int]) -> "Word":
        """x_{pos[0]} ... x_{pos[-1]} x_{neg[-1]}^-1 ... x_{neg[0]}^-1."""
        letters = [(i, 1) for i in pos] + [(j, -1) for j in reversed(neg)]
        return cls(letters, is_normal=True)

    def __str__(self):
        if not self.letters:
            return ""
        return " ".join(f"x{i}" if s == 1 else f"x{i}^-1" for i, s in self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word((i, -s) for i, s in reversed(self.letters))

    def shift(self, r: int) -> "Word":
        return Word(((i + r, s) for i, s in self.letters), self.is_normal)

    def split_normal(self):
        """(pos, neg) index lists of a word in normal form."""
        pos = [i for i, s in self.letters if s == 1]
        neg = [i for i, s in reversed(self.letters) if s == -1]
        return pos, neg

    def max_index(self) -> int:
        return max((i for i, _ in self.letters), default=-1)


def word(text) -> Word:
    if isinstance(text, Word):
        return text
    return Word.parse(text)


def word_to_plmap_direct(w: Word) -> PLMap:
    """Compose generator maps letter by letter (reference route)."""
    w = word(w)
    maps = [generator(i) if s == 1 else generator(i).inverse() for i, s in w.letters]
    if not maps:
        return PLMap.identity()
    # pairwise products keep the intermediate maps small
    while len(maps) > 1:
        nxt = [compose(maps[i], maps[i + 1]) for i in range(0, len(maps) - 1, 2)]
        if len(maps) % 2:
            nxt.append(maps[-1])
        maps = nxt
    return maps[0]


# ---------------------------------------------------------------------------
# normal forms

def _merge_positive(a: list, b: list) -> list:
    """Sorted index list of the positive product (x_a...)(x_b...)."""
    out = []
    i = j = c = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        ae = a[i] + c
        if b[j] < ae:
            out.append(b[j])
            j += 1
            c += 1
        else:
            out.append(ae)
            i += 1
    while i < na:
        out.append(a[i] + c)
        i += 1
    out.extend(b[j:])
    return out


def _pass_through(neg: list, pos: list):
    """Rewrite N^-1 P as P' N'^-1 with both parts sorted."""
    out_p, out_n = [], []
    i = j = 0
    off_n = off_p = 0
    nn, np_ = len(neg), len(pos)
    while i < nn and j < np_:
        n = neg[i] + off_n
        p = pos[j] + off_p
        if n == p:
            i += 1
            j += 1
        elif n < p:
            out_n.append(n)
            i += 1
            off_p += 1
        else:
            out_p.append(p)
            j += 1
            off_n += 1
    while i < nn:
        out_n.append(neg[i] + off_n)
        i += 1
    while j < np_:
        out_p.append(pos[j] + off_p)
        j += 1
    return out_p, out_n


def _combine(left, right):
    p1, n1 = left
    p2, n2 = right
    pp, nn = _pass_through(n1, p2)
    return _merge_positive(p1, pp), _merge_positive(n2, nn)


def semi_normal(w: Word):
    """Sorted (pos, neg) lists with P N^-1 equal to w, not yet reduced."""
    parts = [([i], []) if s == 1 else ([], [i]) for i, s in w.letters]
    if not parts:
        return [], []
    while len(parts) > 1:
        nxt = []
        for k in range(0, len(parts) - 1, 2):
            nxt.append(_combine(parts[k], parts[k + 1]))
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def _remove_bad_pairs(pos: list, neg: list):
    """Delete pairs x_i ... x_i^-1 with no x_{i+1}^{+-1} present, top down."""
    p, q = len(pos) - 1, len(neg) - 1
    removed = 0
    out_p, out_n = [], []  # (index, removals seen at emission)

    def next_exists(cur):
        if out_p and out_p[-1][0] - (removed - out_p[-1][1]) == cur + 1:
            return True
        if out_n and out_n[-1][0] - (removed - out_n[-1][1]) == cur + 1:
            return True
        return False

    while p >= 0 or q >= 0:
        cp = pos[p] if p >= 0 else -1
        cq = neg[q] if q >= 0 else -1
        cur = cp if cp > cq else cq
        kp = 0
        while p >= 0 and pos[p] == cur:
            kp += 1
            p -= 1
        kn = 0
        while q >= 0 and neg[q] == cur:
            kn += 1
            q -= 1
        while kp and kn and not next_exists(cur):
            kp -= 1
            kn -= 1
            removed += 1
        out_p.extend([(cur, removed)] * kp)
        out_n.extend([(cur, removed)] * kn)
    fp = [i - (removed - r) for i, r in reversed(out_p)]
    fn = [i - (removed - r) for i, r in reversed(out_n)]
    return fp, fn


def normal_form_parts(w: Word):
    w = word(w)
    pos, neg = semi_normal(w)
    return _remove_bad_pairs(pos, neg)


def normal_form(w) -> Word:
    """Unique normal form x_{i1}..x_{iu} x_{jv}^-1..x_{j1}^-1."""
    w = word(w)
    if w.is_normal:
        return w
    pos, neg = normal_form_parts(w)
    return Word.from_normal(pos, neg)


def _sorted_parts(w: Word):
    """(pos, neg) if w already reads P N^-1 with both parts sorted, else None."""
    pos, neg = [], []
    for i, s in w.letters:
        if s == 1:
            if neg or (pos and pos[-1] > i):
                return None
            pos.append(i)
        else:
            if neg and neg[-1] < i:
                return None
            neg.append(i)
    neg.reverse()
    return pos, neg


def normal_form_product(*words) -> Word:
    """Normal form of a product of words.

    Factors that are already semi-normal, such as normal forms and their
    inverses, are merged directly without being split into letters.
    """
    parts = []
    for w in words:
        w = word(w)
        sp = _sorted_parts(w)
        parts.append(sp if sp is not None else semi_normal(w))
    if not parts:
        return Word((), is_normal=True)
    while len(parts) > 1:
        nxt = [_combine(parts[k], parts[k + 1]) for k in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    pos, neg = _remove_bad_pairs(*parts[0])
    return Word.from_normal(pos, neg)


def is_normal_form(w: Word) -> bool:
    pos, neg = word(w).split_normal()
    letters = word(w).letters
    # positive letters must all come first
    seen_neg = False
    for _, s in letters:
        if s == -1:
            seen_neg = True
        elif seen_neg:
            return False
    if pos != sorted(pos) or neg != sorted(neg):
        return False
    ps, ns = set(pos), set(neg)
    for i in ps & ns:
        if i + 1 not in ps and i + 1 not in ns:
            return False
    return True


def multiply(*words) -> Word:
    out = []
    for w in words:
        out.extend(word(w).letters)
    return normal_form(Word(out))


def word_equal(u, v) -> bool:
    return normal_form(u) == normal_form(v)


def random_word(length: int, max_index: int, rng: random.Random) -> Word:
    return Word((rng.randint(0, max_index), rng.choice((1, -1))) for _ in range(length))


# ---------------------------------------------------------------------------
# trees

class BinaryTree:
    """Finite rooted binary tree, stored as its preorder caret string.

    '1' marks a caret and '0' a leaf.  Leaves correspond to the standard
    dyadic intervals of a subdivision of [0, 1].
    """

    __slots__ = ("code",)

    def __init__(self, code: str = "0"):
        self.code = code

    @classmethod
    def leaf(cls):
        return cls("0")

    @classmethod
    def caret(cls, left: "BinaryTree", right: "BinaryTree"):
        return cls("1" + left.code + right.code)

    @property
    def carets(self) -> int:
        return self.code.count("1")

    @property
    def leaves(self) -> int:
        return self.code.count("0")

    def __eq__(self, other):
        return isinstance(other, BinaryTree) and self.code == other.code

    def __hash__(self):
        return hash(self.code)

    def __repr__(self):
        return f"BinaryTree({self.code!r})"

    def subdivision(self) -> list:
        """Breakpoints 0 = a_0 < a_1 < ... < a_n = 1 of the leaf intervals."""
        pts = [ZERO]
        pos = ZERO
        length = ONE
        stack = []  # lengths of pending right halves
        for ch in self.code:
            if ch == "1":
                length = length / 2
                stack.append(length)
            else:
                pos = pos + length
                pts.append(pos)
                if stack:
                    length = stack.pop()
        return pts

    @classmethod
    def from_subdivision(cls, pts: Sequence) -> "BinaryTree":
        """Tree whose leaves are the given standard dyadic intervals."""
        pts = [_frac(p) for p in pts]
        if pts[0] != 0 or pts[-1] != 1:
            raise ValueError("a subdivision must run from 0 to 1")
        code = []
        k = 0  # next leaf index
        stack = [(ZERO, ONE)]
        while stack:
            a, b = stack.pop()
            if k >= len(pts) - 1 or pts[k] != a:
                raise ValueError("not a standard dyadic subdivision")
            if pts[k + 1] == b:
                code.append("0")
                k += 1
            elif pts[k + 1] < b:
                m = (a + b) / 2
                code.append("1")
                stack.append((m, b))
                stack.append((a, m))
            else:
                raise ValueError("not a standard dyadic subdivision")
        if k != len(pts) - 1:
            raise ValueError("not a standard dyadic subdivision")
        return cls("".join(code))

    def exponents(self) -> list:
        """Leaf exponents a_k of the positive word x_0^a0 x_1^a1 ... of the tree."""
        pts = self.subdivision()
        out = []
        for k in range(len(pts) - 1):
            a, b = pts[k], pts[k + 1]
            L = b - a
            cnt = 0
            while L < 1:
                # left child of its parent?
                if (a / (2 * L)).denominator != 1:
                    break
                if a + 2 * L == 1:
                    break
                cnt += 1
                L = 2 * L
            out.append(cnt)
        return out

    @classmethod
    def from_exponents(cls, exps: Sequence[int], min_leaves: int = 0) -> "BinaryTree":
        """Tree T with positive word q(T) = x_0^e0 x_1^e1 ...  (inverse of exponents)."""
        exps = list(exps)
        while exps and exps[-1] == 0:
            exps.pop()
        m = len(exps)
        # enough trailing leaves that the rightmost leaf is never consumed
        need = 1
        tail = 0
        for k in range(m - 1, -1, -1):
            avail = (m - 1 - k) - tail
            need = max(need, exps[k] + 1 - avail)
            tail += exps[k]
        extra = max(need, 1)
        n = max(m + extra, min_leaves)
        stack = [cls.leaf() for _ in range(n - m)]
        for k in range(m - 1, -1, -1):
            cur = "0"
            for _ in range(exps[k]):
                cur = "1" + cur + stack.pop().code
            stack.append(cls(cur))
        # right vine over the stack, top of stack is leftmost
        code = []
        trees = stack[::-1]
        for t in trees[:-1]:
            code.append("1")
            code.append(t.code)
        code.append(trees[-1].code)
        return cls("".join(code))

    def expand_leaf(self, k: int) -> "BinaryTree":
        """Attach a caret to leaf k."""
        idx = -1
        out = []
        for ch in self.code:
            if ch == "0":
                idx += 1
                if idx == k:
                    out.append("100")
                    continue
            out.append(ch)
        return BinaryTree("".join(out))


class TreePair:
    """Pair (domain, range) of trees with equal leaf counts."""

    __slots__ = ("domain", "range", "reduced")

    def __init__(self, domain: BinaryTree, range_: BinaryTree, reduced: bool = False):
        if domain.leaves != range_.leaves:
            raise ValueError("trees must have the same number of leaves")
        self.domain = domain
        self.range = range_
        self.reduced = reduced

    def __eq__(self, other):
        return isinstance(other, TreePair) and self.domain == other.domain \
            and self.range == other.range

    def __hash__(self):
        return hash((self.domain.code, self.range.code))

    def __repr__(self):
        return f"TreePair({self.domain.code!r}, {self.range.code!r})"

    def key(self) -> bytes:
        return (self.domain.code + "|" + self.range.code).encode()

    @property
    def carets(self) -> int:
        return self.domain.carets

    def expand(self, k: int) -> "TreePair":
        return TreePair(self.domain.expand_leaf(k), self.range.expand_leaf(k))


def tree_pair_from_plmap(f: PLMap) -> TreePair:
    """Reduced tree pair of an element of F."""
    if not f.in_F():
        raise ValueError("map is not an element of F on [0, 1]")
    xs = f.xs
    code = []
    rng_pts = [ZERO]
    stack = [(ZERO, ONE)]
    while stack:
        a, b = stack.pop()
        i = bisect_right(xs, a)
        linear = not (i < len(xs) and xs[i] < b)
        ok = False
        if linear:
            fa, fb = f(a), f(b)
            L = fb - fa
            if log2_exact(L) is not None and (fa / L).denominator == 1:
                ok = True
        if ok:
            code.append("0")
            rng_pts.append(fb)
        else:
            code.append("1")
            m = (a + b) / 2
            stack.append((m, b))
            stack.append((a, m))
    d = BinaryTree("".join(code))
    r = BinaryTree.from_subdivision(rng_pts)
    return TreePair(d, r, reduced=True)


def plmap_from_tree_pair(t: TreePair) -> PLMap:
    return PLMap(t.domain.subdivision(), t.range.subdivision())


def reduce_tree_pair(t: TreePair) -> TreePair:
    """Cancel opposing caret pairs until none remain."""
    return tree_pair_from_plmap(plmap_from_tree_pair(t))


def reduce_tree_pair_local(t: TreePair) -> TreePair:
    """Reduction by repeatedly deleting exposed caret pairs (reference route)."""
    dom = t.domain.subdivision()
    rng = t.range.subdivision()
    changed = True
    while changed:
        changed = False
        k = 0
        while k + 2 < len(dom):
            if _is_caret(dom, k) and _is_caret(rng, k):
                del dom[k + 1]
                del rng[k + 1]
                changed = True
            else:
                k += 1
    return TreePair(BinaryTree.from_subdivision(dom), BinaryTree.from_subdivision(rng),
                    reduced=True)


def _is_caret(pts, k):
    a, m, b = pts[k], pts[k + 1], pts[k + 2]
    if m - a != b - m:
        return False
    return (a / (b - a)).denominator == 1


def tree_pair_from_word(w) -> TreePair:
    pos, neg = normal_form_parts(word(w))
    r_exps = _counts(pos)
    d_exps = _counts(neg)
    r = BinaryTree.from_exponents(r_exps)
    d = BinaryTree.from_exponents(d_exps)
    n = max(r.leaves, d.leaves)
    if r.leaves < n:
        r = BinaryTree.from_exponents(r_exps, n)
    if d.leaves < n:
        d = BinaryTree.from_exponents(d_exps, n)
    return TreePair(d, r)


def _counts(idx: list) -> list:
    if not idx:
        return []
    out = [0] * (max(idx) + 1)
    for i in idx:
        out[i] += 1
    return out


def word_to_plmap(w) -> PLMap:
    """Exact PL map of a word, via its normal form and tree pair."""
    return plmap_from_tree_pair(tree_pair_from_word(w))


def word_from_tree_pair(t: TreePair) -> Word:
    pos = []
    for k, e in enumerate(t.range.exponents()):
        pos.extend([k] * e)
    neg = []
    for k, e in enumerate(t.domain.exponents()):
        neg.extend([k] * e)
    return normal_form(Word.from_normal(pos, neg))


def plmap_to_word(f: PLMap) -> Word:
    return word_from_tree_pair(tree_pair_from_plmap(f))


def random_tree(leaves: int, rng: random.Random) -> BinaryTree:
    """Random tree by repeatedly splitting a uniformly chosen leaf."""
    t = BinaryTree.leaf()
    for _ in range(leaves - 1):
        t = t.expand_leaf(rng.randrange(t.leaves))
    return t


def random_element(carets: int, rng: random.Random) -> PLMap:
    d = random_tree(carets + 1, rng)
    r = random_tree(carets + 1, rng)
    return plmap_from_tree_pair(TreePair(d, r))


# ---------------------------------------------------------------------------
# dyadic rearrangements

def standard_pieces(a, b) -> list:
    """Greedy split of [a, b] (dyadic ends) into standard dyadic intervals."""
    a, b = _frac(a), _frac(b)
    if not (is_dyadic(a) and is_dyadic(b)) or a >= b:
        raise ValueError("need dyadic endpoints a < b")
    out = []
    pos = a
    while pos < b:
        L = pow2(0)
        # largest 2^-k with pos aligned and pos + L <= b
        while (pos / L).denominator != 1 or pos + L > b:
            L = L / 2
        # grow back while still aligned and inside
        while (pos / (2 * L)).denominator == 1 and pos + 2 * L <= b:
            L = 2 * L
        out.append((pos, pos + L))
        pos = pos + L
    return out


def dyadic_interval_map(a, b, c, d) -> PLMap:
    """An element of PL_2 carrying [a, b] onto [c, d] (all endpoints dyadic)."""
    src = standard_pieces(a, b)
    dst = standard_pieces(c, d)
    while len(src) != len(dst):
        short = src if len(src) < len(dst) else dst
        k = max(range(len(short)), key=lambda i: short[i][1] - short[i][0])
        u, v = short[k]
        m = (u + v) / 2
        short[k:k + 1] = [(u, m), (m, v)]
    xs = [p[0] for p in src] + [src[-1][1]]
    ys = [p[0] for p in dst] + [dst[-1][1]]
    return PLMap(xs, ys)


def map_partition(src: Sequence, dst: Sequence) -> PLMap:
    """g in PL_2 with g(src[i]) = dst[i]; both lists increasing and dyadic."""
    src = [_frac(s) for s in src]
    dst = [_frac(s) for s in dst]
    if len(src) != len(dst) or len(src) < 2:
        raise ValueError("lists must have equal length >= 2")
    for lst in (src, dst):
        for t in lst:
            if not is_dyadic(t):
                raise ValueError(f"{t} is not dyadic")
        for i in range(len(lst) - 1):
            if not lst[i] < lst[i + 1]:
                raise ValueError("lists must be strictly increasing")
    pieces = [dyadic_interval_map(src[i], src[i + 1], dst[i], dst[i + 1])
              for i in range(len(src) - 1)]
    return concat_maps(pieces)


def extend_partial(g: PLMap, eta, zeta) -> PLMap:
    """Extend a PL_2 map between dyadic intervals inside [eta, zeta] to all of it."""
    eta, zeta = _frac(eta), _frac(zeta)
    a, b = g.domain
    c, d = g.image
    pieces = []
    if a > eta:
        pieces.append(dyadic_interval_map(eta, a, eta, c))
    pieces.append(g)
    if b < zeta:
        pieces.append(dyadic_interval_map(b, zeta, d, zeta))
    return concat_maps(pieces)
