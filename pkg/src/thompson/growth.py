"""Word length and sphere sizes in F with respect to {x0, x1}.

Elements are handled as reduced forest diagrams: a top and a bottom forest
over a common row of leaves, each with a pointer at one of its trees.  Left
multiplication by a generator only touches the top forest.  A tree is either
``None`` (a single leaf) or a pair ``(left, right)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .dyadic_core import Word, normal_form, word

LEAF = None


class ValidationMismatch(Exception):
    def __init__(self, n, got, expected):
        super().__init__(f"sphere {n}: recurrence gives {got}, BFS gives {expected}")
        self.n, self.got, self.expected = n, got, expected


# ---------------------------------------------------------------------------
# trees

@lru_cache(maxsize=None)
def n_leaves(t) -> int:
    return 1 if t is None else n_leaves(t[0]) + n_leaves(t[1])


@lru_cache(maxsize=None)
def n_carets(t) -> int:
    return 0 if t is None else 1 + n_carets(t[0]) + n_carets(t[1])


def right_arm(t) -> int:
    k = 0
    while t is not None:
        t = t[1]
        k += 1
    return k


@lru_cache(maxsize=None)
def left_leaf_flags(t) -> tuple:
    """For each leaf of t, whether it is the left leaf of its caret."""
    if t is None:
        return (False,)
    flags = []
    for side, sub in ((True, t[0]), (False, t[1])):
        if sub is None:
            flags.append(side)
        else:
            flags.extend(left_leaf_flags(sub))
    return tuple(flags)


def _siblings(t, k) -> bool:
    """Are leaves k and k+1 of t the two leaves of one caret?"""
    while t is not None:
        if t == (None, None):
            return k == 0
        m = n_leaves(t[0])
        if k + 1 < m:
            t = t[0]
        elif k >= m:
            t, k = t[1], k - m
        else:
            return False
    return False


def _collapse(t, k):
    """Replace the caret over leaves k, k+1 of t by a leaf."""
    if t == (None, None):
        return None
    m = n_leaves(t[0])
    if k + 1 < m:
        return (_collapse(t[0], k), t[1])
    return (t[0], _collapse(t[1], k - m))


def _expand(t, k):
    """Replace leaf k of t by a caret."""
    if t is None:
        return (None, None)
    m = n_leaves(t[0])
    if k < m:
        return (_expand(t[0], k), t[1])
    return (t[0], _expand(t[1], k - m))


def _locate(forest, k):
    """(tree index, local leaf index) of global leaf k."""
    for i, t in enumerate(forest):
        m = n_leaves(t)
        if k < m:
            return i, k
        k -= m
    raise IndexError(k)


def _offset(forest, i) -> int:
    return sum(n_leaves(t) for t in forest[:i])


def tree_code(t) -> str:
    return "0" if t is None else "1" + tree_code(t[0]) + tree_code(t[1])


def tree_from_code(code: str):
    pos = 0

    def rec():
        nonlocal pos
        c = code[pos]
        pos += 1
        if c == "0":
            return None
        left = rec()
        return (left, rec())

    t = rec()
    if pos != len(code):
        raise ValueError("trailing characters in tree code")
    return t


# ---------------------------------------------------------------------------
# forest diagrams

@dataclass(frozen=True)
class ForestDiagram:
    """A forest diagram restricted to its support.

    ``top`` and ``bottom`` are tuples of trees covering the same leaves,
    ``tp`` and ``bp`` index the pointed trees.  Diagrams built through
    ``make`` are trimmed, so equal elements give equal objects.
    """

    top: tuple
    bottom: tuple
    tp: int
    bp: int

    @classmethod
    def make(cls, top, bottom, tp, bp) -> "ForestDiagram":
        top, bottom = list(top), list(bottom)
        while len(top) > 1 and len(bottom) > 1 and top[0] is None and bottom[0] is None \
                and tp > 0 and bp > 0:
            top.pop(0)
            bottom.pop(0)
            tp -= 1
            bp -= 1
        while len(top) > 1 and len(bottom) > 1 and top[-1] is None and bottom[-1] is None \
                and tp < len(top) - 1 and bp < len(bottom) - 1:
            top.pop()
            bottom.pop()
        return cls(tuple(top), tuple(bottom), tp, bp)

    @classmethod
    def identity(cls) -> "ForestDiagram":
        return cls((None,), (None,), 0, 0)

    def inverse(self) -> "ForestDiagram":
        return ForestDiagram(self.bottom, self.top, self.bp, self.tp)

    @property
    def n_leaves(self) -> int:
        return sum(n_leaves(t) for t in self.top)

    def carets(self) -> int:
        return sum(n_carets(t) for t in self.top) + sum(n_carets(t) for t in self.bottom)

    def is_x0_power(self) -> bool:
        return all(t is None for t in self.top) and all(t is None for t in self.bottom)

    def key(self) -> str:
        return (".".join(map(tree_code, self.top)) + "|" + ".".join(map(tree_code, self.bottom))
                + f"|{self.tp}|{self.bp}")

    @classmethod
    def from_key(cls, key: str) -> "ForestDiagram":
        t, b, tp, bp = key.split("|")
        return cls(tuple(tree_from_code(c) for c in t.split(".")),
                   tuple(tree_from_code(c) for c in b.split(".")), int(tp), int(bp))

    def is_reduced(self) -> bool:
        n = self.n_leaves
        for k in range(n - 1):
            i, a = _locate(self.top, k)
            if _siblings(self.top[i], a):
                j, c = _locate(self.bottom, k)
                if _siblings(self.bottom[j], c):
                    return False
        return True

    # left multiplication by generators
    def left_mul(self, gen: int, sign: int = 1) -> "ForestDiagram":
        top, bottom, tp, bp = list(self.top), list(self.bottom), self.tp, self.bp
        if gen == 0:
            tp += sign
            if tp == len(top):
                top.append(None)
                bottom.append(None)
            elif tp < 0:
                top.insert(0, None)
                bottom.insert(0, None)
                tp, bp = 0, bp + 1
        elif gen == 1 and sign == 1:
            if tp + 1 == len(top):
                top.append(None)
                bottom.append(None)
            a, b = top[tp], top[tp + 1]
            if a is None and b is None:
                k = _offset(top, tp)
                j, c = _locate(bottom, k)
                if _siblings(bottom[j], c):
                    # the new caret opposes a grounded bottom caret
                    del top[tp + 1]
                    bottom[j] = _collapse(bottom[j], c)
                    return ForestDiagram.make(top, bottom, tp, bp)
            top[tp:tp + 2] = [(a, b)]
        elif gen == 1 and sign == -1:
            t = top[tp]
            if t is None:
                k = _offset(top, tp)
                j, c = _locate(bottom, k)
                bottom[j] = _expand(bottom[j], c)
                t = (None, None)
            top[tp:tp + 1] = [t[0], t[1]]
        else:
            raise ValueError("only x0 and x1 act on forest diagrams")
        return ForestDiagram.make(top, bottom, tp, bp)

    def right_mul(self, gen: int, sign: int = 1) -> "ForestDiagram":
        return self.inverse().left_mul(gen, -sign).inverse()

    def neighbours(self):
        return [self.left_mul(g, s) for g in (0, 1) for s in (1, -1)]

    # length formula
    def labels(self, which: str) -> list:
        """Labels of the spaces of the top or bottom forest, left to right."""
        forest, ptr = (self.top, self.tp) if which == "top" else (self.bottom, self.bp)
        out = []
        for i, t in enumerate(forest):
            flags = left_leaf_flags(t)
            # interior spaces of t: the leaf to the right is flags[1:]
            for f in flags[1:]:
                out.append("N" if f else "I")
            if i + 1 < len(forest):
                if i < ptr:
                    out.append("L")
                else:
                    nxt = left_leaf_flags(forest[i + 1])[0]
                    out.append("N" if nxt else "R")
        return out

    def space_pairs(self) -> list:
        return list(zip(self.labels("top"), self.labels("bottom")))

    def to_json(self) -> dict:
        return {"top": [tree_code(t) for t in self.top],
                "bottom": [tree_code(t) for t in self.bottom],
                "top_pointer": self.tp, "bottom_pointer": self.bp}


# rows: top-forest label, columns: bottom-forest label
WEIGHTS = {
    "N": {"N": 2, "I": 2, "R": 2, "L": 1},
    "I": {"N": 2, "I": 0, "R": 0, "L": 1},
    "R": {"N": 2, "I": 0, "R": 2, "L": 1},
    "L": {"N": 1, "I": 1, "R": 1, "L": 2},
}


@dataclass(frozen=True)
class SpaceLabelPair:
    top_label: str
    bottom_label: str

    @property
    def weight(self) -> int:
        return WEIGHTS[self.top_label][self.bottom_label]


def length(f: ForestDiagram) -> int:
    """Word length in {x0, x1}: carets plus the weights of the space pairs."""
    if not f.is_reduced():
        raise ValueError("forest diagram is not reduced")
    return f.carets() + sum(WEIGHTS[a][b] for a, b in f.space_pairs())


# ---------------------------------------------------------------------------
# conversions

def forest_from_word(w) -> ForestDiagram:
    """Diagram of a word in x0, x1 (the rightmost letter acts first)."""
    w = word(w)
    for i, _ in w.letters:
        if i > 1:
            raise ValueError("forest_from_word takes letters x0 and x1 only; "
                             "rewrite x_k with to_x0x1 first")
    f = ForestDiagram.identity()
    for i, s in reversed(w.letters):
        f = f.left_mul(i, s)
    return f


def to_x0x1(w) -> Word:
    """Rewrite x_k as x0^(1-k) x1 x0^(k-1)."""
    out = []
    for i, s in word(w).letters:
        if i <= 1:
            out.append((i, s))
        else:
            out.extend([(0, -1)] * (i - 1) + [(1, s)] + [(0, 1)] * (i - 1))
    return Word(out)


def forest_from_element(w) -> ForestDiagram:
    return forest_from_word(to_x0x1(w))


def _build_ops(forest, ptr) -> list:
    """Generator moves, in order of application, that grow ``forest`` on a
    trivial top forest whose pointer starts at the leftmost leaf."""
    ops = []

    def build(t):
        if t is None:
            return
        build(t[0])
        ops.append((0, 1))
        build(t[1])
        ops.append((0, -1))
        ops.append((1, 1))

    for i, t in enumerate(forest):
        build(t)
        if i + 1 < len(forest):
            ops.append((0, 1))
    ops.extend([(0, -1)] * (len(forest) - 1 - ptr))
    return ops


def forest_to_word(f: ForestDiagram) -> Word:
    """A word in x0, x1 for f: build the bottom forest, invert, build the top."""
    low = Word(list(reversed(_build_ops(f.bottom, f.bp))))
    high = Word(list(reversed(_build_ops(f.top, f.tp))))
    return high * low.inverse()


def is_positive(f: ForestDiagram) -> bool:
    """Is f in the monoid generated by x0, x1, x2, ...?"""
    pos, neg = normal_form(forest_to_word(f)).split_normal()
    return not neg


# ---------------------------------------------------------------------------
# breadth-first search

BFS_BUDGET = 12


def bfs_layers(n: int, budget: int = BFS_BUDGET):
    """Yield the spheres 0..n of the Cayley graph as sets of diagram keys.

    Relators of F have even length, so the graph is bipartite and a new
    layer only needs to be checked against the two previous ones.
    """
    if n > budget:
        raise ValueError(f"BFS radius {n} exceeds the budget {budget}")
    prev, cur = set(), {ForestDiagram.identity().key()}
    yield cur
    for _ in range(n):
        nxt = set()
        for k in cur:
            for g in ForestDiagram.from_key(k).neighbours():
                gk = g.key()
                if gk not in prev and gk not in cur:
                    nxt.add(gk)
        prev, cur = cur, nxt
        yield cur


@lru_cache(maxsize=None)
def bfs_sphere_sizes(n: int) -> tuple:
    return tuple(len(layer) for layer in bfs_layers(n))


def bfs_sphere(n: int) -> int:
    return bfs_sphere_sizes(n)[n]


def bfs_ball(n: int) -> dict:
    """Every element of B_n with its distance, keyed by diagram key."""
    out = {}
    for d, layer in enumerate(bfs_layers(n)):
        for k in layer:
            out[k] = d
    return out


def bfs_ball_tree_pairs(n: int) -> list:
    """Sphere sizes from a breadth-first search over reduced tree pairs.

    Independent of the forest diagrams: the generators act as PL maps.
    """
    from .dyadic_core import compose, generator
    gens = [generator(0), generator(1)]
    gens += [g.inverse() for g in gens]
    one = generator(0).identity()

    def key(f):
        return (tuple(f.xs), tuple(f.ys))

    seen = {key(one)}
    layer = [one]
    sizes = [1]
    for _ in range(n):
        nxt = []
        for f in layer:
            for g in gens:
                h = compose(g, f)
                k = key(h)
                if k not in seen:
                    seen.add(k)
                    nxt.append(h)
        layer = nxt
        sizes.append(len(layer))
    return sizes


# ---------------------------------------------------------------------------
# positive elements

def positive_count(n: int) -> int:
    """Coefficient of x^n in (1 - x^2) / (1 - 2x - x^2 + x^3)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    num = [1, 0, -1]
    p = []
    for k in range(n + 1):
        v = num[k] if k < len(num) else 0
        v += 2 * (p[k - 1] if k >= 1 else 0) + (p[k - 2] if k >= 2 else 0) \
            - (p[k - 3] if k >= 3 else 0)
        p.append(v)
    return p[n]


def is_positive_shape(f: ForestDiagram) -> bool:
    """Positivity read off the diagram: trivial bottom forest, and neither
    the top pointer nor any top caret lies left of the bottom pointer."""
    if any(t is not None for t in f.bottom):
        return False
    starts = [_offset(f.top, i) for i, t in enumerate(f.top) if t is not None]
    return f.bp <= min(starts + [_offset(f.top, f.tp)])


@lru_cache(maxsize=None)
def bfs_positive_counts(n: int) -> tuple:
    out = []
    for layer in bfs_layers(n):
        out.append(sum(1 for k in layer if is_positive_shape(ForestDiagram.from_key(k))))
    return tuple(out)


# ---------------------------------------------------------------------------
# slices of the spheres

def critical_leaf(f: ForestDiagram) -> int:
    """Rightmost leaf lying in a nontrivial tree of either forest."""
    best = -1
    for forest in (f.top, f.bottom):
        off = 0
        for t in forest:
            off += n_leaves(t)
            if t is not None:
                best = max(best, off - 1)
    if best < 0:
        raise ValueError("powers of x0 have no critical leaf")
    return best


def slice_params(f: ForestDiagram):
    """(b, c, u, w): right arms of the trees ending at the critical leaf and
    the pointer positions, counted in trees leftwards from those trees."""
    k = critical_leaf(f)
    ti, _ = _locate(f.top, k)
    bi, _ = _locate(f.bottom, k)
    return right_arm(f.top[ti]), right_arm(f.bottom[bi]), ti - f.tp, bi - f.bp


@lru_cache(maxsize=None)
def bfs_slice_counts(n: int) -> dict:
    """|Z_{i,j,p,q,m}| for m <= n, classified from the BFS spheres."""
    out = {}
    for m, layer in enumerate(bfs_layers(n)):
        for k in layer:
            f = ForestDiagram.from_key(k)
            if f.is_x0_power():
                continue
            key = slice_params(f) + (m,)
            out[key] = out.get(key, 0) + 1
    return out


# ---------------------------------------------------------------------------
# the slice recurrence

def _element(w) -> ForestDiagram:
    return forest_from_element(word(w))


@lru_cache(maxsize=None)
def _singleton(p: int, q: int, n: int, i: int = 1, j: int = 0) -> int:
    """1 if x_{p+1} x0^(p+1-q) lies in Z_{i,j,p,q,n}, else 0.

    These are the elements whose shortening is a power of x0.
    """
    letters = [(p + 1, 1)] + [(0, 1 if p + 1 - q > 0 else -1)] * abs(p + 1 - q)
    f = _element(Word(letters))
    if f.is_x0_power() or slice_params(f) != (i, j, p, q):
        return 0
    return int(length(f) == n)


@lru_cache(maxsize=None)
def z_value(p: int, q: int, n: int) -> int:
    """z(p, q, n) = |Z_{1,0,p,q+1,n}| from the three-variable recurrence.

    Sums with an empty range contribute zero.  Two summands in the printed
    form carry a stray index; here the one over i drops j and the one over
    j drops i.
    """
    if p < 0 or q < 0 or n < 0:
        return 0
    v, s = min(p, q), max(p, q)
    z = z_value
    total = _singleton(p, q + 1, n)
    for r in range(v):
        for i in range(n + 1):
            for j in range(n + 1 - i):
                total += z(p - r + i - 1, q - r + j - 1, n - 2 * r - i - j)
        total += z(p - r - 1, q - r - 1, n - 2 * r)
    for r in range(v, s):
        for i in range(1, n + 1):
            for j in range(n + 1):
                total += z(i - 1, s - r + j - 1, n - v - r - i - j)
        for j in range(1, n + 1):
            total += z(0, s - r + j, n - v - r - j - 1)
    for r in range(s, s + n + 1):
        m = n - v + s - 2 * r
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                total += z(i - 1, j - 1, m - i - j)
            total += z(i - 1, 0, m - i - 1)
        for j in range(1, n + 1):
            total += z(0, j - 1, m - j - 1)
    return total


@lru_cache(maxsize=None)
def slice_size(i: int, j: int, p: int, q: int, n: int) -> int:
    """|Z_{i,j,p,q,n}| reduced through the pointer moves, the shortening map
    and the inverse symmetry down to z-values."""
    if n < 0 or i < 0 or j < 0 or (i, j) == (0, 0) or i > n or j > n:
        return 0
    if p < 0 and q < 0:
        return slice_size(i, j, p + 1, q + 1, n - 2)
    if q < 0:
        return slice_size(i, j, p, q + 1, n - 1)
    if p < 0:
        return slice_size(i, j, p + 1, q, n - 1)
    if i >= 1 and j >= 1:
        return slice_size(i - 1, j, p + 1, q, n - 1)
    if i >= 2:
        return slice_size(i - 1, 0, p + 1, q, n - 1)
    if j >= 2:
        return slice_size(0, j - 1, p, q + 1, n - 1)
    if j == 1:
        return slice_size(1, 0, q, p, n)
    if q >= 1:
        return z_value(p, q - 1, n)
    # q = 0: the critical line moves left after shortening
    if n < 1:
        return 0
    total = _singleton(p, 0, n)
    for c in range(n + 1):
        for d in range(n + 1):
            if max(c, d) == 0:
                continue
            for r in range(-n, 0):
                total += slice_size(c, d, r + p + 1, r, n - 1)
    return total


def sphere_count_recursive(n: int, validate: bool = True, budget: int = BFS_BUDGET) -> int:
    """Sphere size from the powers of x0 plus every slice reduced to z-values.

    With ``validate`` the result is compared with breadth-first search and a
    ValidationMismatch is raised on disagreement.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > budget:
        raise ValueError(f"n = {n} exceeds the budget {budget}")
    total = 1 if n == 0 else 2
    for i in range(n + 1):
        for j in range(n + 1):
            for p in range(-n, n + 1):
                for q in range(-n, n + 1):
                    total += slice_size(i, j, p, q, n)
    if validate:
        expected = bfs_sphere(n)
        if total != expected:
            raise ValidationMismatch(n, total, expected)
    return total


def _critical_image(S, p: int, q: int, n: int) -> int:
    """Size of the claimed shortening image of Z_{1,0,p,q,n}, from slice sizes S.

    When the bottom pointer sits left of the critical line the image spreads
    over the slices where the line lands r trees further left, each skipped
    empty space costing two.
    """
    total = _singleton(p, q, n)
    for c in range(n + 1):
        for d in range(n + 1):
            if max(c, d) == 0:
                continue
            if q == 0:
                for r in range(-n, 0):
                    total += S(c, d, r + p + 1, r, n - 1)
                continue
            for r in range(q):
                total += S(c, d, r + p + 1 - q, r, n - 2 * (q - 1 - r) - 1)
            for r in range(-n, 0):
                total += S(c, d, r + p + 1 - q, r, n - 2 * (q - 1) - 1)
    return total


def certify_identities(n: int) -> dict:
    """Check each slice identity used above against BFS-classified slices.

    Returns name -> (cells checked, failures, first failing cell).
    """
    Z = bfs_slice_counts(n)

    def S(i, j, p, q, m):
        return Z.get((i, j, p, q, m), 0)

    cells = [(i, j, p, q, m) for m in range(n + 1) for i in range(m + 1) for j in range(m + 1)
             for p in range(-m, m + 1) for q in range(-m, m + 1) if (i, j) != (0, 0)]
    checks = {
        "inverse": (lambda i, j, p, q, m: True,
                    lambda i, j, p, q, m: S(j, i, q, p, m)),
        "both_pointers_left": (lambda i, j, p, q, m: p < 0 and q < 0,
                               lambda i, j, p, q, m: S(i, j, p + 1, q + 1, m - 2)),
        "bottom_pointer_left": (lambda i, j, p, q, m: q < 0 <= p,
                                lambda i, j, p, q, m: S(i, j, p, q + 1, m - 1)),
        "shorten_top": (lambda i, j, p, q, m: p >= 0 and q >= 0 and i >= 1 and (j >= 1 or i >= 2),
                        lambda i, j, p, q, m: S(i - 1, j, p + 1, q, m - 1)),
        "commute_pointers": (lambda i, j, p, q, m: (i, j) == (1, 0) and p >= 0 and q >= 1,
                             lambda i, j, p, q, m: S(1, 0, q - 1, p + 1, m)),
        "shorten_critical_q0": (lambda i, j, p, q, m: (i, j) == (1, 0) and p >= 0 and q == 0 and m >= 1,
                                lambda i, j, p, q, m: _critical_image(S, p, q, m)),
        "shorten_critical": (lambda i, j, p, q, m: (i, j) == (1, 0) and p >= 0 and q >= 1,
                             lambda i, j, p, q, m: _critical_image(S, p, q, m)),
        "recurrence": (lambda i, j, p, q, m: p >= -m and q >= -m,
                       lambda i, j, p, q, m: slice_size(i, j, p, q, m)),
    }
    report = {}
    for name, (cond, rhs) in checks.items():
        checked = failures = 0
        first = None
        for c in cells:
            if not cond(*c):
                continue
            checked += 1
            if S(*c) != rhs(*c):
                failures += 1
                if first is None:
                    first = c
        report[name] = (checked, failures, first)
    return report
