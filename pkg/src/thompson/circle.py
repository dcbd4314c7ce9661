"""Piecewise-linear homeomorphisms of the circle R/Z.

A circle map is stored through a lift L restricted to [0, 1]: breakpoints
xs with 0 = xs[0] < ... < xs[-1] = 1 and values ys with ys[-1] = ys[0] + 1.
Off [0, 1] the lift is extended by L(x + 1) = L(x) + 1.  The stored lift is
normalized so that 0 <= L(0) < 1.
"""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .dyadic_core import (
    HALF, ONE, ZERO, PLMap, _merge_collinear, dyadic_interval_map, is_dyadic, log2_exact, mpq,
    pow2, rational_from_json, rational_to_json,
)


def _floor(t) -> int:
    return int(math.floor(t)) if not isinstance(t, int) else t


# ---------------------------------------------------------------------------
# lifts as raw breakpoint data

def _lift_eval(xs, ys, x):
    k = _floor(x)
    r = x - k
    i = bisect_right(xs, r) - 1
    if i >= len(xs) - 1:
        i = len(xs) - 2
    x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
    return y0 + (y1 - y0) * (r - x0) / (x1 - x0) + k


def _lift_inv_eval(xs, ys, y):
    k = _floor(y - ys[0])
    r = y - k
    i = bisect_right(ys, r) - 1
    if i >= len(ys) - 1:
        i = len(ys) - 2
    x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
    return x0 + (x1 - x0) * (r - y0) / (y1 - y0) + k


def _lift_compose(f, g):
    """Breakpoint data of the lift f o g on [0, 1]."""
    fx, fy = f
    gx, gy = g
    lo, hi = gy[0], gy[-1]
    base = _floor(lo)
    pts = set(gx)
    for m in (base, base + 1):
        for b in fx:
            y = b + m
            if lo < y < hi:
                pts.add(_lift_inv_eval(gx, gy, y))
    ts = sorted(pts)
    vals = [_lift_eval(fx, fy, _lift_eval(gx, gy, t)) for t in ts]
    return _merge_collinear(ts, vals)


def _lift_inverse(f):
    fx, fy = f
    pts = {ZERO, ONE}
    base = _floor(fy[0])
    for y in fy:
        for m in (base - 1, base, base + 1):
            t = y - m
            if 0 < t < 1:
                pts.add(t)
    ts = sorted(pts)
    vals = [_lift_inv_eval(fx, fy, t) for t in ts]
    return _merge_collinear(ts, vals)


def _lift_power(f, n):
    if n < 0:
        f, n = _lift_inverse(f), -n
    out = ((ZERO, ONE), (ZERO, ONE))
    base = f
    while n:
        if n & 1:
            out = _lift_compose(out, base)
        n >>= 1
        if n:
            base = _lift_compose(base, base)
    return out


# ---------------------------------------------------------------------------
# circle maps

class CircleMap:
    """A PL homeomorphism of R/Z given by a normalized lift."""

    __slots__ = ("xs", "ys")

    def __init__(self, xs, ys):
        xs = [mpq(t) for t in xs]
        ys = [mpq(t) for t in ys]
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("need matching breakpoint lists of length >= 2")
        if xs[0] != 0 or xs[-1] != 1:
            raise ValueError("lift must be given on [0, 1]")
        if ys[-1] != ys[0] + 1:
            raise ValueError("lift must satisfy L(1) = L(0) + 1")
        for i in range(len(xs) - 1):
            if not (xs[i] < xs[i + 1] and ys[i] < ys[i + 1]):
                raise ValueError("lift must be strictly increasing")
        shift = _floor(ys[0])
        ys = [y - shift for y in ys]
        self.xs, self.ys = _merge_collinear(xs, ys)

    @classmethod
    def _from_lift(cls, lift) -> "CircleMap":
        return cls(lift[0], lift[1])

    @classmethod
    def rotation(cls, a) -> "CircleMap":
        a = mpq(a)
        a -= _floor(a)
        return cls([ZERO, ONE], [a, a + 1])

    @classmethod
    def identity(cls) -> "CircleMap":
        return cls.rotation(0)

    @classmethod
    def from_interval_map(cls, f: PLMap) -> "CircleMap":
        """An element of F, or any homeomorphism of [0, 1], with 0 ~ 1."""
        return cls(list(f.xs), list(f.ys))

    @classmethod
    def from_partition(cls, points, shift: int) -> "CircleMap":
        """Map the i-th interval of a partition of [0, 1] linearly onto the
        (i + shift)-th, indices taken cyclically."""
        pts = [mpq(t) for t in points]
        m = len(pts) - 1
        if pts[0] != 0 or pts[-1] != 1 or m < 1:
            raise ValueError("partition must run from 0 to 1")
        ys = []
        for i in range(m + 1):
            j = i + shift
            ys.append(pts[j % m] + j // m)
        return cls(pts, ys)

    @property
    def lift(self):
        return self.xs, self.ys

    def lift_eval(self, x):
        return _lift_eval(self.xs, self.ys, mpq(x))

    def __call__(self, x):
        y = self.lift_eval(x)
        return y - _floor(y)

    def __mul__(self, other: "CircleMap") -> "CircleMap":
        return CircleMap._from_lift(_lift_compose(self.lift, other.lift))

    def inverse(self) -> "CircleMap":
        return CircleMap._from_lift(_lift_inverse(self.lift))

    def __pow__(self, n: int) -> "CircleMap":
        return CircleMap._from_lift(_lift_power(self.lift, n))

    def __eq__(self, other):
        if not isinstance(other, CircleMap):
            return NotImplemented
        return self.xs == other.xs and self.ys == other.ys

    def __hash__(self):
        return hash((self.xs, self.ys))

    def __repr__(self):
        return f"CircleMap({len(self.xs) - 1} pieces, L(0)={self.ys[0]})"

    def is_identity(self) -> bool:
        return self.xs == (ZERO, ONE) and self.ys == (ZERO, ONE)

    def slopes(self) -> list:
        return [(self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])
                for i in range(len(self.xs) - 1)]

    def is_pl2(self) -> bool:
        """Dyadic breakpoints and slopes powers of 2 (an element of T)."""
        return (all(is_dyadic(t) for t in self.xs + self.ys)
                and all(log2_exact(s) is not None for s in self.slopes()))

    def has_fixed_point(self) -> bool:
        d = [y - x for x, y in zip(self.xs, self.ys)]
        return min(d) <= 0 <= max(d) or min(d) <= 1 <= max(d)

    def to_json(self) -> dict:
        """PLMap layout for the lift on [0, 1], plus a wrap flag."""
        return {"domain": [rational_to_json(ZERO), rational_to_json(ONE)],
                "breakpoints": [[rational_to_json(x), rational_to_json(y)]
                                for x, y in zip(self.xs, self.ys)],
                "wrap": True}

    @classmethod
    def from_json(cls, obj) -> "CircleMap":
        if not obj.get("wrap", False):
            raise ValueError("expected a circle map (wrap flag)")
        pts = obj["breakpoints"]
        return cls([rational_from_json(p[0]) for p in pts],
                   [rational_from_json(p[1]) for p in pts])


def conjugate(f: CircleMap, g: CircleMap) -> CircleMap:
    """g^-1 f g."""
    return g.inverse() * f * g


# ---------------------------------------------------------------------------
# rotation numbers

@dataclass
class RotationResult:
    """Either an exact rational p/q with a periodic point s of the lift,
    L^q(s) = s + p, or an interval [lo, hi] containing the rotation number."""

    exact: bool
    value: Fraction | None = None
    p: int | None = None
    q: int | None = None
    point: mpq | None = None
    lo: Fraction | None = None
    hi: Fraction | None = None

    def verify(self, f: CircleMap) -> bool:
        if not self.exact:
            return True
        lift = _lift_power(f.lift, self.q)
        return _lift_eval(*lift, self.point) == self.point + self.p

    def to_json(self) -> dict:
        if self.exact:
            return {"exact": True, "value": str(self.value), "p": int(self.p), "q": int(self.q),
                    "point": rational_to_json(self.point)}
        return {"exact": False, "lo": str(self.lo), "hi": str(self.hi)}


def _crossing(xs, ys, p):
    """A point t of [0, 1] with L(t) - t = p, if there is one."""
    d = [y - x for x, y in zip(xs, ys)]
    for i in range(len(xs) - 1):
        a, b = d[i] - p, d[i + 1] - p
        if a == 0:
            return xs[i]
        if (a < 0) != (b < 0) or b == 0:
            return xs[i] + (xs[i + 1] - xs[i]) * a / (a - b)
    return None


def rotation_number(f: CircleMap, q_max: int = 64) -> RotationResult:
    """Rotation number in [0, 1), exact whenever a periodic orbit of period
    at most q_max exists."""
    if q_max < 1:
        raise ValueError("q_max must be at least 1")
    lift = f.lift
    power = lift
    for q in range(1, q_max + 1):
        xs, ys = power
        d = [y - x for x, y in zip(xs, ys)]
        lo, hi = min(d), max(d)
        p = math.ceil(lo)
        if p <= hi:
            s = _crossing(xs, ys, p)
            res = RotationResult(True, Fraction(p % q, q), p, q, s)
            if not res.verify(f):
                raise AssertionError("periodic point certificate failed")
            return res
        if q < q_max:
            power = _lift_compose(power, lift)
    xs, ys = power
    d = [y - x for x, y in zip(xs, ys)]
    lo, hi = Fraction(min(d)) / q_max, Fraction(max(d)) / q_max
    return RotationResult(False, lo=lo, hi=hi)


def is_torsion(f: CircleMap, q_max: int = 64):
    """Smallest q <= q_max with f^q = id, or None."""
    power = f.lift
    for q in range(1, q_max + 1):
        xs, ys = power
        if len(xs) == 2 and ys[0] == _floor(ys[0]) and ys[1] - ys[0] == 1:
            return q
        power = _lift_compose(power, f.lift)
    return None


def rot_arithmetic_checks(f: CircleMap, g: CircleMap, powers=range(-3, 4), q_max: int = 64) -> dict:
    """Conjugation invariance and power multiplicativity on exact values."""
    report = {"skipped": [], "conjugation": None, "powers": {}}
    rf = rotation_number(f, q_max)
    if not rf.exact:
        report["skipped"].append("rotation number of f is not certified rational")
        return report
    rc = rotation_number(conjugate(f, g), q_max)
    if rc.exact:
        report["conjugation"] = rc.value == rf.value
    else:
        report["skipped"].append("rotation number of the conjugate is not certified")
    for k in powers:
        rk = rotation_number(f ** k, q_max)
        if rk.exact:
            report["powers"][k] = rk.value == (k * rf.value) % 1
        else:
            report["skipped"].append(f"rotation number of f^{k} is not certified")
    report["ok"] = (report["conjugation"] is not False
                    and all(report["powers"].values()))
    return report


# ---------------------------------------------------------------------------
# torsion elements

def _dyadic_partition(m: int) -> list:
    """Cut [0, 1] into m intervals whose lengths are powers of 2."""
    k = m.bit_length() - 1  # 2^k <= m < 2^(k+1)
    long_ = 2 ** (k + 1) - m if m != 2 ** k else m
    lengths = [pow2(-k)] * long_ + [pow2(-(k + 1))] * (m - long_)
    pts = [ZERO]
    for a in lengths:
        pts.append(pts[-1] + a)
    return pts


def shift_by_two(points) -> CircleMap:
    """Send each interval of an even partition two intervals to the right."""
    if (len(points) - 1) % 2:
        raise ValueError("need an even number of intervals")
    return CircleMap.from_partition(points, 2)


def construct_torsion(n: int) -> CircleMap:
    """Element of T of order n and rotation number 1/n."""
    if n < 1:
        raise ValueError("n must be positive")
    return shift_by_two(_dyadic_partition(2 * n))


def proportions(n: int) -> list:
    """Lengths 1/2, 1/4, ..., 1/2^(2n-2), 1/2^(2n-2): 2n-1 intervals of [0, 1]."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return [ONE]
    return [pow2(-k) for k in range(1, 2 * n - 1)] + [pow2(-(2 * n - 2))]


def factorial_partition(n: int) -> list:
    """Points of the partition J_1, I_1, ..., J_{n!}, I_{n!} carrying X_n."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return [ZERO, HALF, ONE]
    pts = [mpq(i, 4) for i in range(5)]
    for m in range(2, n):
        # keep each J, cut each I into 2m+1 pieces
        props = proportions(m + 1)
        new = [ZERO]
        for i in range(len(pts) - 1):
            a, b = pts[i], pts[i + 1]
            if i % 2 == 0:
                new.append(b)
            else:
                t = a
                for c in props:
                    t = t + c * (b - a)
                    new.append(t)
        pts = new
    return pts



def construct_X(n: int) -> CircleMap:
    """X_n: the shift by two on 2 n! intervals, rotation number 1/n!.

    X_1 is the identity, X_2 the half turn, and (X_{n+1})^(n+1) = X_n.
    """
    return shift_by_two(factorial_partition(n))


# ---------------------------------------------------------------------------
# conjugating a torsion element to a translation

@dataclass
class StretchMap:
    """A lift H: R -> R with H(x + 1) = H(x) + q, stored on [0, 1]."""

    xs: tuple
    ys: tuple
    q: int

    def __call__(self, x):
        x = mpq(x)
        k = _floor(x)
        r = x - k
        i = bisect_right(self.xs, r) - 1
        if i >= len(self.xs) - 1:
            i = len(self.xs) - 2
        x0, x1, y0, y1 = self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]
        return y0 + (y1 - y0) * (r - x0) / (x1 - x0) + self.q * k

    def to_json(self) -> dict:
        return {"xs": [rational_to_json(t) for t in self.xs],
                "ys": [rational_to_json(t) for t in self.ys], "period": self.q}


def conjugate_torsion_to_shift(f: CircleMap, q_max: int = 64):
    """(H, g, k) with g = f^k of rotation number 1/q and H(g(x)) = H(x) + 1.

    H carries the fundamental domain [0, g(0)] onto [0, 1] by a map in
    PL_2 and is extended by H(g^j(x)) = H(x) + j.
    """
    q = is_torsion(f, q_max)
    if q is None:
        raise ValueError(f"not a torsion element of order <= {q_max}")
    if q == 1:
        raise ValueError("the identity has no fundamental domain")
    rot = rotation_number(f, q)
    p = rot.value.numerator
    k = pow(p, -1, q)
    g = f ** k
    gx, gy = g.lift
    g0 = gy[0]
    if not 0 < g0 < 1:
        raise AssertionError("lift of a rotation by 1/q should move 0 into (0, 1)")
    if is_dyadic(g0):
        h0 = dyadic_interval_map(ZERO, g0, ZERO, ONE)
    else:
        h0 = PLMap([ZERO, g0], [ZERO, ONE])
    # H on [g^j(0), g^(j+1)(0)] is H0 o g^-j + j
    xs, ys = [], []
    ginv = _lift_inverse(g.lift)
    orbit = [ZERO]
    for j in range(q):
        orbit.append(_lift_eval(gx, gy, orbit[-1]))
    if orbit[-1] != 1:
        raise AssertionError("orbit of 0 should close after one turn")
    back = ((ZERO, ONE), (ZERO, ONE))
    for j in range(q):
        a, b = orbit[j], orbit[j + 1]
        # breakpoints: images under g^j of the breakpoints of H0, plus those of g^-j on [a, b]
        fwd = _lift_power(g.lift, j)
        pts = {a, b}
        for t in h0.xs:
            pts.add(_lift_eval(*fwd, t))
        bx, by = back
        base = _floor(a)
        for t in bx:
            for m in (base, base + 1):
                if a < t + m < b:
                    pts.add(t + m)
        for t in sorted(pts):
            if xs and t == xs[-1]:
                continue
            xs.append(t)
            ys.append(h0(_lift_eval(bx, by, t)) + j)
        back = _lift_compose(back, ginv)
    xs, ys = _merge_collinear(xs, ys)
    H = StretchMap(tuple(xs), tuple(ys), q)
    return H, g, k


def verify_stretch(H: StretchMap, g: CircleMap, points) -> bool:
    return all(H(g.lift_eval(x)) == H(x) + 1 for x in points)


def random_points(count: int, rng: random.Random, denominator_bits: int = 20) -> list:
    """Exact rationals in [0, 1): a mix of dyadic and non-dyadic values."""
    out = []
    for i in range(count):
        if i % 2:
            d = 1 << rng.randint(1, denominator_bits)
        else:
            d = rng.randint(2, 1 << denominator_bits)
        out.append(mpq(rng.randrange(d), d))
    return out
