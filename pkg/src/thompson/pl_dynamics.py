"""Decision procedures for PL_2 maps of an interval.

Fixed sets, orbits of rational points, the stair construction of
conjugators between maps without interior fixed points, ordinary, power and
simultaneous conjugacy, roots, centralizers, and the Mather invariant of a
one-bump map.

Conjugation is written g^-1 y g, i.e. the map t -> g^-1(y(g(t))).  Every
answer returned as a map is re-verified by exact composition before it is
handed back.
"""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field

from .dyadic_core import (
    PLMap, ZERO, ONE, as_rational, compose, concat_maps, conjugate,
    dyadic_interval_map, is_dyadic, log2_exact, map_partition, mpq, pow2, power,
    random_tree, BinaryTree,
)


# ---------------------------------------------------------------------------
# fixed sets

@dataclass
class FixedSet:
    """Ordered disjoint components (a, b) of {t : f(t) = t}; a == b for points."""

    components: list
    domain: tuple

    @property
    def boundary(self) -> list:
        pts = []
        for a, b in self.components:
            pts.append(a)
            if b != a:
                pts.append(b)
        return pts

    @property
    def dyadic_boundary(self) -> list:
        return [t for t in self.boundary if is_dyadic(t)]

    @property
    def points(self) -> list:
        return [a for a, b in self.components if a == b]

    @property
    def intervals(self) -> list:
        return [(a, b) for a, b in self.components if a != b]

    def __contains__(self, t) -> bool:
        t = as_rational(t)
        return any(a <= t <= b for a, b in self.components)

    def shape(self) -> tuple:
        return tuple(a == b for a, b in self.components)

    def to_json(self):
        from .dyadic_core import rational_to_json
        return [[rational_to_json(a), rational_to_json(b)] for a, b in self.components]


def fixed_set(f: PLMap) -> FixedSet:
    xs, ys = f.xs, f.ys
    raw = []
    for i in range(len(xs) - 1):
        x0, x1 = xs[i], xs[i + 1]
        d0, d1 = ys[i] - x0, ys[i + 1] - x1
        if d0 == 0 and d1 == 0:
            raw.append((x0, x1))
        elif d0 == 0:
            raw.append((x0, x0))
        elif d1 == 0:
            raw.append((x1, x1))
        elif (d0 < 0) != (d1 < 0):
            t = x0 + (x1 - x0) * d0 / (d0 - d1)
            raw.append((t, t))
    comps = []
    for a, b in raw:
        if comps and a <= comps[-1][1]:
            if b > comps[-1][1]:
                comps[-1] = (comps[-1][0], b)
        else:
            comps.append((a, b))
    return FixedSet(comps, f.domain)


def _cuts(f: PLMap) -> list:
    """Domain ends together with the dyadic boundary of the fixed set."""
    a, b = f.domain
    return sorted(set([a, b] + fixed_set(f).dyadic_boundary))


def _interior_fixed_points(f: PLMap) -> list:
    a, b = f.domain
    return [p for p in fixed_set(f).points if a < p < b]


def _direction(f: PLMap) -> int:
    """+1 if f(t) > t on the open domain, -1 if f(t) < t; ValueError otherwise."""
    xs, ys = f.xs, f.ys
    if len(xs) == 2:
        raise ValueError("map is linear, so it is the identity on its domain")
    if f.ys[0] != f.xs[0] or f.ys[-1] != f.xs[-1]:
        raise ValueError("map does not fix the ends of its domain")
    sign = 0
    for i in range(1, len(xs) - 1):
        d = ys[i] - xs[i]
        s = (d > 0) - (d < 0)
        if s == 0 or (sign and s != sign):
            raise ValueError("map touches the diagonal inside its domain")
        sign = s
    return sign


def reflect(f: PLMap) -> PLMap:
    """t -> -f(-t), the map seen through the reflection t -> -t."""
    return PLMap(tuple(-x for x in reversed(f.xs)),
                 tuple(-y for y in reversed(f.ys)), canonical=True)


def one_bump_direction(f: PLMap):
    """+1/-1 when f has no fixed points inside its domain, else None."""
    try:
        return _direction(f)
    except ValueError:
        return None


# ---------------------------------------------------------------------------
# orbits of rational points

def _dlog2(target: int, n: int):
    """Some e >= 0 with 2^e = target (mod n), by baby-step giant-step."""
    target %= n
    m = math.isqrt(n) + 1
    table = {}
    cur = 1 % n
    for j in range(m):
        table.setdefault(cur, j)
        cur = cur * 2 % n
    factor = pow(2, -m, n)
    gamma = target
    for i in range(m + 1):
        if gamma in table:
            return i * m + table[gamma]
        gamma = gamma * factor % n
    return None


def _split_den(t):
    den = int(t.denominator)
    tz = (den & -den).bit_length() - 1
    return int(t.numerator), tz, den >> tz


def _local_linear(alpha, beta):
    """(e, c) with beta = 2^e alpha + c, c dyadic; None if no such pair."""
    A, t, n = _split_den(alpha)
    B, k, n2 = _split_den(beta)
    if n != n2:
        return None
    if n == 1:
        return 0, beta - alpha
    target = B * pow(2, t, n) * pow(A * pow(2, k, n), -1, n) % n
    e = _dlog2(target, n)
    if e is None:
        return None
    c = beta - pow2(e) * alpha
    assert is_dyadic(c)
    return e, c


def map_points(src, dst, lo=ZERO, hi=ONE):
    """g in PL_2([lo, hi]) with g(src[i]) = dst[i], or None if impossible.

    Dyadic points are matched directly; a non-dyadic point is matched by a
    local linear piece t -> 2^e t + c that carries it to its target.
    """
    src = [as_rational(s) for s in src]
    dst = [as_rational(s) for s in dst]
    lo, hi = as_rational(lo), as_rational(hi)
    if len(src) != len(dst):
        raise ValueError("point lists differ in length")
    feats = []
    for s, d in zip(src, dst):
        if not (lo < s < hi and lo < d < hi):
            raise ValueError("points must lie strictly inside the interval")
        if is_dyadic(s) != is_dyadic(d):
            return None
        if is_dyadic(s):
            feats.append((s, d, None))
        else:
            loc = _local_linear(s, d)
            if loc is None:
                return None
            feats.append((s, d, loc))
    for i in range(len(src) - 1):
        if not (src[i] < src[i + 1] and dst[i] < dst[i + 1]):
            raise ValueError("point lists must be increasing")
    if not feats:
        return PLMap.identity(lo, hi)
    K = 2
    while True:
        K += 1
        w = pow2(-K)
        s_iv, d_iv = [], []
        for s, d, loc in feats:
            if loc is None:
                s_iv.append((s, s))
                d_iv.append((d, d))
            else:
                e, c = loc
                p = mpq(math.floor(s / w)) * w
                q = p + w
                s_iv.append((p, q))
                d_iv.append((pow2(e) * p + c, pow2(e) * q + c))
        if _ordered(s_iv, lo, hi) and _ordered(d_iv, lo, hi):
            break
    pieces = []
    prev_s, prev_d = lo, lo
    for (sa, sb), (da, db) in zip(s_iv, d_iv):
        pieces.append(dyadic_interval_map(prev_s, sa, prev_d, da))
        if sa != sb:
            pieces.append(PLMap.linear(sa, sb, da, db))
        prev_s, prev_d = sb, db
    pieces.append(dyadic_interval_map(prev_s, hi, prev_d, hi))
    g = concat_maps(pieces)
    for s, d in zip(src, dst):
        assert g(s) == d
    return g


def _ordered(ivs, lo, hi) -> bool:
    prev = lo
    for a, b in ivs:
        if not a > prev:
            return False
        prev = b
    return prev < hi


def same_orbit(alpha, beta):
    """g in F with g(alpha) = beta, or None."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    if not (0 < alpha < 1 and 0 < beta < 1):
        raise ValueError("points must lie in the open unit interval")
    if is_dyadic(alpha) and is_dyadic(beta):
        return map_partition([0, alpha, 1], [0, beta, 1])
    return map_points([alpha], [beta])


def _fixed_pairs(y: PLMap, z: PLMap):
    """Matched boundary points (of D(z), of D(y)) or an obstruction string."""
    Dy, Dz = fixed_set(y), fixed_set(z)
    if Dy.shape() != Dz.shape():
        return None, (f"fixed sets have different shapes: {len(Dy.components)} vs "
                      f"{len(Dz.components)} components")
    eta, zeta = y.domain
    pairs = []
    for s, d in zip(Dz.boundary, Dy.boundary):
        if (s in (eta, zeta)) or (d in (eta, zeta)):
            if s != d:
                return None, f"fixed point {d} at the domain end has no partner"
            continue
        if is_dyadic(s) != is_dyadic(d):
            return None, f"boundary points {d} and {s} lie in different orbits"
        pairs.append((s, d))
    return pairs, None


def fixed_set_obstruction(y: PLMap, z: PLMap):
    """A reason why no g can carry D(z) onto D(y), or None."""
    pairs, why = _fixed_pairs(y, z)
    if pairs is None:
        return why
    if align_fixed_sets(y, z) is None:
        return "non-dyadic boundary points lie in different orbits"
    return None


def align_fixed_sets(y: PLMap, z: PLMap):
    """h with D(h^-1 y h) = D(z), or None."""
    if y.domain != z.domain:
        raise ValueError("maps have different domains")
    pairs, _ = _fixed_pairs(y, z)
    if pairs is None:
        return None
    eta, zeta = y.domain
    if not pairs:
        return PLMap.identity(eta, zeta)
    return map_points([p[0] for p in pairs], [p[1] for p in pairs], eta, zeta)


# ---------------------------------------------------------------------------
# the stair construction

@dataclass
class StairResult:
    g: PLMap
    r: int
    alpha: object
    beta: object
    p: object  # z^-r(alpha); g = y^-r g0 z^r on [eta, p]
    swapped: bool = False
    inverted: bool = False


def _stair(y: PLMap, z: PLMap, q):
    eta, zeta = y.domain
    if z.domain != (eta, zeta):
        raise ValueError("maps have different domains")
    dy, dz = _direction(y), _direction(z)
    if dy != dz:
        return None
    q = as_rational(q)
    if q <= 0:
        raise ValueError("initial slope must be positive")
    if dy > 0:
        res = _stair(y.inverse(), z.inverse(), q)
        if res is not None:
            res.inverted = True
        return res
    if q > 1:
        res = _stair(z, y, 1 / q)
        if res is None:
            return None
        res.g = res.g.inverse()
        res.swapped = True
        return res
    if y.slopes[0] != z.slopes[0] or y.slopes[-1] != z.slopes[-1]:
        return None
    alpha = min(y.xs[1], z.xs[1])
    beta = max(y.xs[-2], z.xs[-2])
    A = eta + q * (alpha - eta)
    yi, zi = y.inverse(), z.inverse()
    a_pts, b_pts = [alpha], [A]
    while min(a_pts[-1], b_pts[-1]) <= beta:
        a_pts.append(zi(a_pts[-1]))
        b_pts.append(yi(b_pts[-1]))
    r = len(a_pts) - 1
    h = PLMap.linear(eta, alpha, eta, A)
    for i in range(1, r + 1):
        tmp = compose(h, z.restrict(eta, a_pts[i]))
        h = compose(yi.restrict(eta, b_pts[i - 1]), tmp)
    p, gp = a_pts[r], b_pts[r]
    if not gp < zeta:
        return None
    g = concat_maps([h, PLMap.linear(p, zeta, gp, zeta)])
    if compose(y, g) != compose(g, z):
        return None
    return StairResult(g, r, alpha, beta, p)


def stair_conjugator(y: PLMap, z: PLMap, q):
    """The unique g with g^-1 y g = z and initial slope q, or None.

    y and z live on the same interval and have no fixed points inside it.
    """
    res = _stair(y, z, q)
    return None if res is None else res.g


def stair_data(y: PLMap, z: PLMap, q):
    """Like stair_conjugator but also reports r, alpha, beta of the construction."""
    return _stair(y, z, q)


def backward_stair(y: PLMap, z: PLMap, q):
    """Conjugator fixed by its slope q at the right end of the interval."""
    res = _stair(reflect(y), reflect(z), q)
    return None if res is None else reflect(res.g)


def _chain(y: PLMap, z: PLMap, pts: list, idx: int, s):
    """Conjugator of y to z through the fixed points pts, slope s at pts[idx].

    Between consecutive points y and z have no fixed points; a PL_2 map is
    linear around non-dyadic points, so the slope carries over unchanged.
    """
    pieces = [None] * (len(pts) - 1)
    q = s
    for i in range(idx, len(pts) - 1):
        a, b = pts[i], pts[i + 1]
        res = _stair(y.restrict(a, b), z.restrict(a, b), q)
        if res is None:
            return None
        pieces[i] = res.g
        q = res.g.slopes[-1]
    q = s
    for i in range(idx - 1, -1, -1):
        a, b = pts[i], pts[i + 1]
        g = backward_stair(y.restrict(a, b), z.restrict(a, b), q)
        if g is None:
            return None
        pieces[i] = g
        q = g.slopes[0]
    return concat_maps(pieces)


def _slope_exp(f: PLMap, t=None, side="right"):
    if t is None:
        t = f.domain[0]
    s = f.slope_right(t) if side == "right" else f.slope_left(t)
    return log2_exact(s)


def _conjugate_moving(y: PLMap, z: PLMap):
    """Conjugator on an interval where y, z move every non-fixed point.

    Both maps share their interior fixed points, all non-dyadic.  The initial
    slopes of conjugators form a coset of the slopes of the centralizer,
    whose exponents are multiples of a divisor of u, so one residue system
    mod u holds every candidate.
    """
    a, b = z.domain
    u = _slope_exp(y)
    if u is None or u != _slope_exp(z) or u == 0:
        return None
    pts = [a] + _interior_fixed_points(z) + [b]
    cands = range(u, 0) if u < 0 else range(1, u + 1)
    for e in cands:
        g = _chain(y, z, pts, 0, pow2(e))
        if g is not None and g.is_pl2():
            return g
    return None


def conjugate_pl(y: PLMap, z: PLMap):
    """g in PL_2 with g^-1 y g = z, or None."""
    if y.domain != z.domain:
        raise ValueError("maps have different domains")
    h = align_fixed_sets(y, z)
    if h is None:
        return None
    yh = conjugate(y, h)
    cuts = _cuts(z)
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        yr, zr = yh.restrict(a, b), z.restrict(a, b)
        if zr.is_identity() or yr.is_identity():
            if yr != zr:
                return None
            pieces.append(PLMap.identity(a, b))
            continue
        g = _conjugate_moving(yr, zr)
        if g is None:
            return None
        pieces.append(g)
    g = compose(h, concat_maps(pieces))
    if conjugate(y, g) != z:
        raise AssertionError("conjugator failed verification")
    return g


def is_conjugate(y: PLMap, z: PLMap) -> bool:
    return conjugate_pl(y, z) is not None


# ---------------------------------------------------------------------------
# roots and centralizers

def _divisors(n: int) -> list:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0]


def _minimal_root(f: PLMap):
    """Generator of the (cyclic) centralizer of a moving map on its domain."""
    a, b = f.domain
    u = _slope_exp(f)
    pts = [a] + _interior_fixed_points(f) + [b]
    sign = 1 if u > 0 else -1
    for M in _divisors(u):
        g = _chain(f, f, pts, 0, pow2(sign * M))
        if g is not None and g.is_pl2():
            return g
    raise AssertionError("the map itself should centralize itself")


def nth_root(f: PLMap, n: int):
    """The h with h^n = f, or None."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return f
    cuts = _cuts(f)
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        fr = f.restrict(a, b)
        if fr.is_identity():
            pieces.append(fr)
            continue
        u = _slope_exp(fr)
        if u is None or u % n:
            return None
        pts = [a] + _interior_fixed_points(fr) + [b]
        h = _chain(fr, fr, pts, 0, pow2(u // n))
        if h is None or not h.is_pl2() or power(h, n) != fr:
            return None
        pieces.append(h)
    h = concat_maps(pieces)
    assert power(h, n) == f
    return h


FULL, CYCLIC, TRIVIAL = "FullGroup", "Cyclic", "Trivial"


@dataclass
class CentralizerPiece:
    a: object
    b: object
    kind: str
    generator: PLMap | None = None

    def to_json(self):
        from .dyadic_core import rational_to_json
        out = {"interval": [rational_to_json(self.a), rational_to_json(self.b)],
               "kind": self.kind}
        if self.generator is not None:
            out["generator"] = self.generator.to_json()
        return out


@dataclass
class CentralizerDescription:
    pieces: list = field(default_factory=list)

    def kinds(self) -> list:
        return [p.kind for p in self.pieces]

    def piece_at(self, a, b):
        for p in self.pieces:
            if p.a <= a and b <= p.b:
                return p
        return None

    def element(self, choices) -> PLMap:
        """Assemble an element from one choice per piece.

        A choice is an integer power for Cyclic pieces, a map of the piece for
        FullGroup pieces, and ignored for Trivial ones.
        """
        maps = []
        for p, c in zip(self.pieces, choices):
            if p.kind == CYCLIC:
                maps.append(power(p.generator, c))
            elif p.kind == FULL and c is not None:
                maps.append(c)
            else:
                maps.append(PLMap.identity(p.a, p.b))
        return concat_maps(maps)

    def sample(self, rng: random.Random, size: int = 3) -> PLMap:
        choices = []
        for p in self.pieces:
            if p.kind == CYCLIC:
                choices.append(rng.randint(-size, size))
            elif p.kind == FULL:
                choices.append(_random_map_on(p.a, p.b, size, rng))
            else:
                choices.append(None)
        return self.element(choices)

    def contains(self, g: PLMap) -> bool:
        for p in self.pieces:
            if g(p.a) != p.a or g(p.b) != p.b:
                return False
            gr = g.restrict(p.a, p.b)
            if p.kind == TRIVIAL and not gr.is_identity():
                return False
            if p.kind == CYCLIC and not gr.is_identity():
                e = _slope_exp(gr)
                m = _slope_exp(p.generator)
                if e is None or e % m or power(p.generator, e // m) != gr:
                    return False
        return True

    def to_json(self):
        return [p.to_json() for p in self.pieces]


def _random_map_on(a, b, carets, rng):
    """Random element of PL_2([a, b]) for dyadic a < b."""
    d = random_tree(carets + 1, rng)
    r = random_tree(carets + 1, rng)
    g = PLMap(d.subdivision(), r.subdivision())
    to01 = dyadic_interval_map(a, b, 0, 1)
    return compose(to01.inverse(), compose(g, to01))


def centralizer(f: PLMap) -> CentralizerDescription:
    cuts = _cuts(f)
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        fr = f.restrict(a, b)
        if fr.is_identity():
            pieces.append(CentralizerPiece(a, b, FULL))
        else:
            pieces.append(CentralizerPiece(a, b, CYCLIC, _minimal_root(fr)))
    return CentralizerDescription(pieces)


def centralizer_intersection(fs) -> CentralizerDescription:
    fs = list(fs)
    if not fs:
        raise ValueError("need at least one map")
    dom = fs[0].domain
    cut_set = set()
    for f in fs:
        if f.domain != dom:
            raise ValueError("maps have different domains")
        cut_set.update(_cuts(f))
    cuts = sorted(cut_set)
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        kind, gen = FULL, None
        for f in fs:
            if f(a) != a or f(b) != b:
                kind, gen = TRIVIAL, None
                break
            fr = f.restrict(a, b)
            if fr.is_identity():
                continue
            rho = _minimal_root(fr)
            if kind == FULL:
                kind, gen = CYCLIC, rho
            elif compose(gen, rho) == compose(rho, gen):
                if abs(_slope_exp(rho)) > abs(_slope_exp(gen)):
                    gen = rho
            else:
                kind, gen = TRIVIAL, None
                break
        pieces.append(CentralizerPiece(a, b, kind, gen))
    return CentralizerDescription(pieces)


# ---------------------------------------------------------------------------
# orbits under a single map and the power equation

def orbit_power(h: PLMap, tau, mu):
    """The n with h^n(tau) = mu, or None."""
    tau, mu = as_rational(tau), as_rational(mu)
    if tau == mu:
        return 0
    ht = h(tau)
    if ht == tau:
        return None
    comps = fixed_set(h).components
    # fixed points bounding the orbit of tau
    left = max((b for a, b in comps if b < tau), default=None)
    right = min((a for a, b in comps if a > tau), default=None)
    if left is None or right is None or not left < mu < right:
        return None
    up = ht > tau
    if (mu > tau) == up:
        step, sign = h, 1
    else:
        step, sign = h.inverse(), -1
    t, n = tau, 0
    while (t < mu) if mu > tau else (t > mu):
        t = step(t)
        n += 1
    return sign * n if t == mu else None


def _first_difference(f: PLMap, g: PLMap):
    """(theta, psi): f = g on [start, theta], f != g on (theta, psi]; None if f == g."""
    pts = sorted(set(f.xs) | set(g.xs))
    for u, v in zip(pts, pts[1:]):
        if f(v) != g(v) or f(u) != g(u):
            return u, (u + v) / 2
    return None


def _upper_bound(x: PLMap, g: PLMap, y: PLMap) -> int:
    """Every k with x^k = g y^k satisfies k < returned value.

    x, y are below the diagonal with equal slopes at the left end, and g is
    the identity near the left end.
    """
    c, d = x.domain
    diff = _first_difference(x, y)
    theta_xy, psi = diff
    theta_g = d if g.is_identity() else g.xs[1]
    theta = min(theta_xy, theta_g)
    k0, t = 0, psi
    while not t < theta:
        t = y(t)
        k0 += 1
    return k0


def _power_range(x: PLMap, g: PLMap, y: PLMap):
    """Closed range [lo, hi] containing every k with x^k = g y^k on the domain."""
    if _direction(x) > 0:
        lo, hi = _power_range(x.inverse(), g, y.inverse())
        return -hi, -lo
    hi = _upper_bound(x, g, y) - 1
    xhat = conjugate(x, g)
    lo = 1 - _upper_bound(y, g, xhat)
    return lo, hi


def solve_power_equation(X: PLMap, G0: PLMap, Y: PLMap, cap: int = 10 ** 4):
    """Some k with X^k = G0 o Y^k, or None."""
    a, b = X.domain
    if X == Y:
        return 0 if G0.is_identity() else None
    if G0.slope_right(a) != 1:
        raise ValueError("G0 must have slope 1 at the left end")

    def works(k):
        return power(X, k) == compose(G0, power(Y, k))

    fx = _interior_fixed_points(X)
    fy = _interior_fixed_points(Y)
    if fixed_set(X).intervals or fixed_set(Y).intervals:
        raise ValueError("maps must have isolated fixed points")
    if fx != fy:
        tau = min(set(fx) ^ set(fy))
        if tau in fy:
            k = orbit_power(X, tau, G0(tau))
        else:
            k = orbit_power(Y, tau, G0.inverse()(tau))
        return k if k is not None and works(k) else None
    pts = [a] + fx + [b]
    if any(G0(p) != p for p in pts):
        return None
    lo, hi = None, None
    forced = set()
    for c, d in zip(pts, pts[1:]):
        x, y, g = X.restrict(c, d), Y.restrict(c, d), G0.restrict(c, d)
        if x == y:
            if not g.is_identity():
                return None
            continue
        done = False
        for t, side in ((c, "right"), (d, "left")):
            ex, ey = _slope_exp(x, t, side), _slope_exp(y, t, side)
            if ex != ey:
                eg = _slope_exp(g, t, side)
                if eg % (ex - ey):
                    return None
                forced.add(eg // (ex - ey))
                done = True
                break
        if done:
            continue
        l, h = _power_range(x, g, y)
        lo = l if lo is None else max(lo, l)
        hi = h if hi is None else min(hi, h)
    if len(forced) > 1:
        return None
    if forced:
        k = forced.pop()
        if lo is not None and not lo <= k <= hi:
            return None
        return k if works(k) else None
    if lo is None:
        return 0
    if hi < lo:
        return None
    if hi - lo > cap:
        raise RuntimeError(f"power search range {hi - lo} exceeds cap {cap}")
    xk, yk = power(X, lo), power(Y, lo)
    for k in range(lo, hi + 1):
        if xk == compose(G0, yk):
            return k
        xk, yk = compose(xk, X), compose(yk, Y)
    return None


def power_conjugate(y: PLMap, z: PLMap):
    """(m, n, g) with m > 0 minimal and g^-1 y^m g = z^n, or None."""
    if y.is_identity() and z.is_identity():
        return 1, 1, PLMap.identity(*y.domain)
    if y.is_identity() or z.is_identity():
        return None

    def first_exp(f):
        cuts = _cuts(f)
        for a, b in zip(cuts, cuts[1:]):
            fr = f.restrict(a, b)
            if not fr.is_identity():
                return _slope_exp(fr)
        return None

    ea, eb = first_exp(y), first_exp(z)
    if ea is None or eb is None:
        return None
    d = math.gcd(ea, eb)
    m = abs(eb) // d
    n = ea * (1 if eb > 0 else -1) // d
    g = conjugate_pl(power(y, m), power(z, n))
    if g is None:
        return None
    return m, n, g


# ---------------------------------------------------------------------------
# simultaneous conjugacy

def _ext_gcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _cyclic_case(rho: PLMap, y: PLMap, z: PLMap):
    """k with rho^-k y rho^k = z on rho's domain, returned as the map rho^k."""
    g0 = _conjugate_moving(y, z)
    if g0 is None:
        return None
    w = _minimal_root(z)
    # conjugators are g0 w^n; look for one equal to rho^m
    al, be, ga = _slope_exp(rho), _slope_exp(w), _slope_exp(g0)
    d = math.gcd(al, be)
    if ga % d:
        return None
    _, s, t = _ext_gcd(al, be)
    m0, n0 = s * (ga // d), -t * (ga // d)
    assert al * m0 - be * n0 == ga
    X = power(rho, be // d)
    Y = power(w, al // d)
    G0 = compose(power(rho, -m0), compose(g0, power(w, n0)))
    k = solve_power_equation(X, G0, Y)
    if k is None:
        return None
    c = power(rho, (be // d) * k + m0)
    return c if conjugate(y, c) == z else None


def restricted_conjugate(W, y: PLMap, z: PLMap):
    """c commuting with every map in W and with c^-1 y c = z, or None."""
    desc = centralizer_intersection(W)
    eta, zeta = y.domain
    pairs, _ = _fixed_pairs(y, z)
    if pairs is None:
        return None
    # align the fixed sets inside the centralizer
    c0_pieces = []
    forced_zero = {}
    for piece in desc.pieces:
        a, b = piece.a, piece.b
        inside = [(s, d) for s, d in pairs if a <= s <= b or a <= d <= b]
        for s, d in inside:
            if s in (a, b) or d in (a, b):
                if s != d:
                    return None
            elif not (a < s < b and a < d < b):
                return None
        inner = [(s, d) for s, d in inside if a < s < b]
        if piece.kind == TRIVIAL:
            if any(s != d for s, d in inner):
                return None
            c0_pieces.append(PLMap.identity(a, b))
        elif piece.kind == FULL:
            h = map_points([s for s, _ in inner], [d for _, d in inner], a, b)
            if h is None:
                return None
            c0_pieces.append(h)
        else:
            rho = piece.generator
            ks = set()
            moved = False
            for s, d in inner:
                if rho(s) == s:
                    if d != s:
                        return None
                else:
                    moved = True
                    k = orbit_power(rho, s, d)
                    if k is None:
                        return None
                    ks.add(k)
            if len(ks) > 1:
                return None
            forced_zero[(a, b)] = moved
            c0_pieces.append(power(rho, ks.pop() if ks else 0))
    c0 = concat_maps(c0_pieces)
    y1 = conjugate(y, c0)
    P = sorted({p.a for p in desc.pieces} | {p.b for p in desc.pieces})
    cuts = _cuts(z)
    c1_pieces = []
    for a, b in zip(cuts, cuts[1:]):
        yr, zr = y1.restrict(a, b), z.restrict(a, b)
        if zr.is_identity() or yr.is_identity():
            if yr != zr:
                return None
            c1_pieces.append(PLMap.identity(a, b))
            continue
        pins = [p for p in P if a < p < b]
        if pins:
            c = _pinned(yr, zr, pins[0])
            if c is None or not _respects(c, desc, pins):
                return None
        else:
            piece = desc.piece_at(a, b)
            if piece.kind == TRIVIAL or (piece.kind == CYCLIC and (
                    (piece.a, piece.b) != (a, b) or forced_zero.get((a, b)))):
                if yr != zr:
                    return None
                c = PLMap.identity(a, b)
            elif piece.kind == FULL:
                c = _conjugate_moving(yr, zr)
            else:
                c = _cyclic_case(piece.generator, yr, zr)
            if c is None:
                return None
        c1_pieces.append(c)
    c = compose(c0, concat_maps(c1_pieces))
    if conjugate(y, c) != z:
        return None
    if any(compose(w, c) != compose(c, w) for w in W):
        return None
    return c


def _pinned(y: PLMap, z: PLMap, lam):
    """Conjugator fixing the moved point lam; its slope is forced by the orbit of lam."""
    a, b = z.domain
    pts = [a] + _interior_fixed_points(z) + [b]
    i = bisect_right(pts, lam) - 1
    zl, yl = z(lam), y(lam)
    if (zl < lam) != (yl < lam):
        return None
    if zl < lam:
        idx, tau = i, pts[i]
        zone_z = z.xs[bisect_right(z.xs, tau)]
        zone_y = y.xs[bisect_right(y.xs, tau)]
        inside = lambda u, v: u <= zone_y and v <= zone_z
    else:
        idx, tau = i + 1, pts[i + 1]
        zone_z = z.xs[bisect_right(z.xs, tau) - 2] if tau == b else z.xs[bisect_right(z.xs, tau) - 1]
        zone_y = y.xs[bisect_right(y.xs, tau) - 2] if tau == b else y.xs[bisect_right(y.xs, tau) - 1]
        inside = lambda u, v: u >= zone_y and v >= zone_z
    if tau in z.xs[1:-1] or tau in y.xs[1:-1]:
        return None
    u, v = lam, lam
    while not inside(u, v):
        u, v = y(u), z(v)
    s = (u - tau) / (v - tau)
    if log2_exact(s) is None:
        return None
    c = _chain(y, z, pts, idx, s)
    if c is None or not c.is_pl2():
        return None
    return c


def _respects(c: PLMap, desc: CentralizerDescription, pins) -> bool:
    """Does c, defined on a sub-interval, agree with the centralizer pieces?"""
    a, b = c.domain
    if any(c(p) != p for p in pins):
        return False
    for piece in desc.pieces:
        lo, hi = max(a, piece.a), min(b, piece.b)
        if not lo < hi:
            continue
        part = c.restrict(lo, hi)
        if piece.kind == TRIVIAL:
            if not part.is_identity():
                return False
        elif piece.kind == CYCLIC:
            if (piece.a, piece.b) != (lo, hi):
                if not part.is_identity():
                    return False
            elif not part.is_identity():
                e, m = _slope_exp(part), _slope_exp(piece.generator)
                if e is None or e % m or power(piece.generator, e // m) != part:
                    return False
    return True


def simultaneous_conjugate(xs, ys):
    """g with g^-1 xs[i] g = ys[i] for every i, or None."""
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys) or not xs:
        raise ValueError("tuples must have the same positive length")
    G = conjugate_pl(xs[0], ys[0])
    if G is None:
        return None
    for j in range(1, len(xs)):
        u = conjugate(xs[j], G)
        c = restricted_conjugate(ys[:j], u, ys[j])
        if c is None:
            return None
        G = compose(G, c)
    for x, y in zip(xs, ys):
        if conjugate(x, G) != y:
            raise AssertionError("simultaneous conjugator failed verification")
    return G


# ---------------------------------------------------------------------------
# Mather invariant

@dataclass
class CircleMapPL:
    """Lift on [0, m] of a PL map R/mZ -> R/nZ; F(t + m) = F(t) + n."""

    m: int
    n: int
    lift: PLMap

    def __call__(self, t):
        t = as_rational(t)
        k = math.floor(t / self.m)
        return self.lift(t - k * self.m) + k * self.n

    def rotated(self, a: int) -> PLMap:
        """t -> F(t + a) on [0, m]."""
        a %= self.m
        if a == 0:
            return self.lift
        F = self.lift
        left = F.restrict(a, self.m)
        right = F.restrict(0, a)
        p1 = PLMap([x - a for x in left.xs], left.ys, canonical=True)
        p2 = PLMap([x + self.m - a for x in right.xs], [y + self.n for y in right.ys],
                   canonical=True)
        return concat_maps([p1, p2])

    def to_json(self):
        return {"m": self.m, "n": self.n, "lift": self.lift.to_json()}


def _plog(s):
    """Piecewise-linear logarithm: [2^k, 2^(k+1)] -> [k, k+1] linearly."""
    s = as_rational(s)
    k = math.floor(math.log2(s)) if s > 0 else None
    # correct float rounding exactly
    while pow2(k) > s:
        k -= 1
    while pow2(k + 1) <= s:
        k += 1
    return k + (s - pow2(k)) / pow2(k)


def mather_invariant(f: PLMap) -> CircleMapPL:
    if f.domain != (ZERO, ONE) or not f.is_pl2():
        raise ValueError("expected an element of F")
    if one_bump_direction(f) != 1:
        raise ValueError("expected a one-bump map above the diagonal")
    m = log2_exact(f.slopes[0])
    n = -log2_exact(f.slopes[-1])
    if m <= 0 or n <= 0:
        raise ValueError("wrong slope signs at the ends")
    eps0, b1 = f.xs[1], f.xs[-2]
    K = 0
    while pow2(-K) > eps0:
        K += 1
    t0 = pow2(-K)
    t1 = pow2(m - K)
    N, s = 0, t0
    while s < b1:
        s = f(s)
        N += 1
    # f^N on the fundamental domain [t0, t1]
    h = PLMap.identity(t0, t1)
    for _ in range(N):
        lo, hi = h.image
        h = compose(f.restrict(lo, hi), h)
    A = PLMap([mpq(j) for j in range(-K, m - K + 1)],
              [pow2(j) for j in range(-K, m - K + 1)])
    lo, hi = h.image
    xs = [lo]
    j = -1
    while 1 - pow2(j) <= lo:
        j -= 1
    while 1 - pow2(j) < hi:
        xs.append(1 - pow2(j))
        j -= 1
    xs.append(hi)
    D = PLMap(xs, [-_plog(1 - t) for t in xs])
    F = compose(D, compose(h, A))
    F = PLMap([x + K for x in F.xs], F.ys)
    shift = math.floor(F.ys[0] / n) * n
    F = PLMap(F.xs, [y - shift for y in F.ys])
    return CircleMapPL(m, n, F)


def mather_conjugate(f: PLMap, g: PLMap) -> bool:
    """Conjugacy of two one-bump maps in F, decided by their Mather invariants."""
    df, dg = one_bump_direction(f), one_bump_direction(g)
    if df is None or dg is None:
        raise ValueError("both maps must be one-bump")
    if df != dg:
        return False
    if df < 0:
        f, g = f.inverse(), g.inverse()
    Fi, Gi = mather_invariant(f), mather_invariant(g)
    if (Fi.m, Fi.n) != (Gi.m, Gi.n):
        return False
    F = Fi.lift
    for a in range(Fi.m):
        Ga = Gi.rotated(a)
        if Ga.xs != F.xs:
            continue
        c = Ga.ys[0] - F.ys[0]
        if c.denominator != 1:
            continue
        if all(gy - fy == c for gy, fy in zip(Ga.ys, F.ys)):
            return True
    return False
