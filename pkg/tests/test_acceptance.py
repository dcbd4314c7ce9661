"""End-to-end acceptance checks, one test per criterion (or criterion part).

Each test records its outcome through the ``acceptance`` fixture; the
terminal summary prints one PASS/FAIL line per criterion.
"""
import math
import random
import statistics
import time
from fractions import Fraction

from thompson import circle, crypto, growth, pl_dynamics, strand
from thompson.cli import main as cli_main
from thompson.dyadic_core import (
    HALF, ONE, ZERO, Word, compose, conjugate, generator, is_normal_form,
    normal_form, power, random_element, random_word, word_equal,
    word_to_plmap, word_to_plmap_direct,
)


def _fit_exponent(xs, ys):
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    mx, my = statistics.fmean(lx), statistics.fmean(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den


# ---------------------------------------------------------------------------
# 1. presentation soundness

def test_criterion_1_relations(acceptance):
    bad = []
    for n in range(1, 9):
        for k in range(n):
            lhs = conjugate(generator(n), generator(k))
            if lhs != generator(n + 1):
                bad.append((k, n))
            w = Word([(k, -1), (n, 1), (k, 1)])
            if word_to_plmap_direct(w) != word_to_plmap(f"x{n + 1}"):
                bad.append((k, n))
    acceptance(1, "x_k^-1 x_n x_k = x_{n+1}, 0 <= k < n <= 8", not bad, f"failures {bad}")
    assert not bad


def test_criterion_1_normal_form(acceptance):
    rng = random.Random(1)
    start = time.perf_counter()
    failures = 0
    equal_pairs = 0
    for i in range(10_000):
        w = random_word(rng.randint(0, 64), 8, rng)
        if i % 2:
            # insert a conjugated relator: same element, different word
            pos = rng.randint(0, len(w))
            n = rng.randint(1, 8)
            k = rng.randrange(n)
            rel = Word([(k, -1), (n, 1), (k, 1), (n + 1, -1)])
            if rng.random() < 0.5:
                rel = rel.inverse()
            v = Word(w.letters[:pos] + rel.letters + w.letters[pos:])
        else:
            v = random_word(rng.randint(0, 64), 8, rng)
        fw, fv = word_to_plmap_direct(w), word_to_plmap_direct(v)
        same = fw == fv
        equal_pairs += same
        z = normal_form(w)
        if word_equal(w, v) != same or word_to_plmap_direct(z) != fw or not is_normal_form(z):
            failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 60
    acceptance(1, "normal form vs PL equality on 10^4 words", ok,
               f"{failures} failures, {equal_pairs} equal pairs, {elapsed:.1f} s")
    assert failures == 0
    assert elapsed < 60


# ---------------------------------------------------------------------------
# 2. three conjugacy engines

def _one_bump(rng):
    g = random_element(rng.randint(0, 4), rng)
    return conjugate(power(generator(0), rng.choice((1, -1, 2, -2))), g)


def _element(rng, bump):
    return _one_bump(rng) if bump else random_element(rng.randint(1, 6), rng)


def test_criterion_2_engines_agree(acceptance):
    rng = random.Random(2)
    pairs = 1000
    disagreements = unverified = yes = mather_checked = 0
    for i in range(pairs):
        bump = i % 3 == 0
        y = _element(rng, bump)
        if i % 2 == 0:
            z = conjugate(y, random_element(rng.randint(1, 6), rng))
        else:
            z = _element(rng, bump)
        g = pl_dynamics.conjugate_pl(y, z)
        stair = g is not None
        by_strand = strand.conjugate_strand(y, z)
        answers = {stair, by_strand}
        if pl_dynamics.one_bump_direction(y) and pl_dynamics.one_bump_direction(z):
            answers.add(pl_dynamics.mather_conjugate(y, z))
            mather_checked += 1
        if len(answers) > 1:
            disagreements += 1
        if stair:
            yes += 1
            if conjugate(y, g) != z:
                unverified += 1
        if i % 2 == 0 and not stair:
            disagreements += 1
    ok = disagreements == 0 and unverified == 0
    acceptance(2, "strand / stair / Mather agreement", ok,
               f"{pairs} pairs, {yes} yes, {mather_checked} with Mather, "
               f"{disagreements} disagreements, {unverified} unverified")
    assert ok


# ---------------------------------------------------------------------------
# 3. orbit example

def test_criterion_3_same_orbit(acceptance):
    a, b, c = Fraction(1, 17), Fraction(13, 17), Fraction(3, 17)
    g = pl_dynamics.same_orbit(a, b)
    ok_yes = g is not None and g.in_F() and g(a) == b
    ok_no = pl_dynamics.same_orbit(a, c) is None
    acceptance(3, "same_orbit(1/17, 13/17) and (1/17, 3/17)", ok_yes and ok_no,
               f"witness verified: {ok_yes}, none certified: {ok_no}")
    assert ok_yes and ok_no


# ---------------------------------------------------------------------------
# 4. simultaneous conjugacy

def _tuple(rng, k):
    f = random_element(rng.randint(1, 5), rng)
    xs = [f]
    c = pl_dynamics.centralizer(f)
    for _ in range(k - 1):
        r = rng.random()
        if r < 0.3:
            xs.append(c.sample(rng, 2))
        elif r < 0.5:
            xs.append(power(f, rng.choice((-2, 2, 3))))
        else:
            xs.append(random_element(rng.randint(1, 5), rng))
    return xs


def test_criterion_4_simultaneous(acceptance):
    rng = random.Random(4)
    recovered = certified_none = failures = 0
    for t in range(200):
        k = (2, 3, 4)[t % 3]
        xs = _tuple(rng, k)
        g = random_element(rng.randint(1, 5), rng)
        ys = [conjugate(x, g) for x in xs]
        h = pl_dynamics.simultaneous_conjugate(xs, ys)
        if h is not None and all(conjugate(x, h) == y for x, y in zip(xs, ys)):
            recovered += 1
        else:
            failures += 1
        # perturb one coordinate by an element not conjugate to it
        i = rng.randrange(k)
        while True:
            bad = random_element(rng.randint(1, 5), rng)
            if pl_dynamics.conjugate_pl(xs[i], bad) is None:
                break
        ys2 = list(ys)
        ys2[i] = bad
        if pl_dynamics.simultaneous_conjugate(xs, ys2) is None:
            certified_none += 1
        else:
            failures += 1
    acceptance(4, "simultaneous conjugacy on 200 tuples", failures == 0,
               f"{recovered} recovered, {certified_none} perturbed tuples rejected")
    assert failures == 0


# ---------------------------------------------------------------------------
# 5. roots and centralizers

def test_criterion_5_roots_centralizers(acceptance):
    rng = random.Random(5)
    root_fail = 0
    for _ in range(100):
        f = random_element(rng.randint(1, 6), rng)
        n = rng.randint(1, 4)
        fn = power(f, n)
        h = pl_dynamics.nth_root(fn, n)
        if h is None or power(h, n) != fn:
            root_fail += 1
    c0 = pl_dynamics.centralizer(generator(0))
    ok0 = c0.kinds() == [pl_dynamics.CYCLIC] and c0.pieces[0].generator == generator(0)
    c1 = pl_dynamics.centralizer(generator(1))
    ok1 = (c1.kinds() == [pl_dynamics.FULL, pl_dynamics.CYCLIC]
           and (c1.pieces[0].a, c1.pieces[0].b) == (ZERO, HALF)
           and c1.pieces[1].generator == generator(1).restrict(HALF, ONE))
    commute_fail = 0
    samples = [generator(0), generator(1)] + [random_element(rng.randint(1, 6), rng)
                                              for _ in range(30)]
    for f in samples:
        c = pl_dynamics.centralizer(f)
        for _ in range(5):
            g = c.sample(rng)
            if compose(f, g) != compose(g, f):
                commute_fail += 1
    ok = root_fail == 0 and ok0 and ok1 and commute_fail == 0
    acceptance(5, "roots and centralizers", ok,
               f"root failures {root_fail}, C(x0) ok {ok0}, C(x1) ok {ok1}, "
               f"non-commuting samples {commute_fail}")
    assert ok


# ---------------------------------------------------------------------------
# 6. cryptanalysis

def _params(seed):
    rng = random.Random(seed)
    return crypto.ProtocolParams(rng.randint(3, 8), 2 * rng.randint(128, 160), seed)


def _attack_many(variant, attack, seeds, runs=None):
    ok = 0
    slowest = 0.0
    for seed in seeds:
        run = runs[seed] if runs is not None else crypto.run_protocol(_params(seed), variant)
        t0 = time.perf_counter()
        try:
            key = attack(run.transcript)
            good = key.K == run.K
        except (RuntimeError, AssertionError):
            good = False
        slowest = max(slowest, time.perf_counter() - t0)
        ok += good
    return ok, slowest


def test_criterion_6_attacks(acceptance):
    seeds = range(100)
    su_runs = {s: crypto.run_protocol(_params(s), "su") for s in seeds}
    su_ok, su_t = _attack_many("su", crypto.attack, seeds, su_runs)
    tr_ok, tr_t = _attack_many("su", crypto.attack_transitivity, seeds, su_runs)
    kl_ok, kl_t = _attack_many("kolee", crypto.attack_kolee, seeds)
    slowest = max(su_t, tr_t, kl_t)
    ok = su_ok == tr_ok == kl_ok == 100 and slowest < 1.0
    acceptance(6, "attacks on 100 transcripts each", ok,
               f"su {su_ok}/100, transitivity {tr_ok}/100, Ko-Lee {kl_ok}/100, "
               f"slowest {slowest:.3f} s")
    assert ok


def test_criterion_6_scaling(acceptance):
    Ms = (256, 512, 1024, 2048)
    medians = []
    for M in Ms:
        times = []
        for seed in range(5):
            run = crypto.run_protocol(crypto.ProtocolParams(5, M, seed, strict=False))
            t0 = time.perf_counter()
            crypto.attack(run.transcript)
            times.append(time.perf_counter() - t0)
        medians.append(statistics.median(times))
    model = [M * math.log(M) for M in Ms]
    c = statistics.fmean(t / m for t, m in zip(medians, model))
    ratios = [t / (c * m) for t, m in zip(medians, model)]
    ok = all(0.5 <= r <= 2.0 for r in ratios)
    acceptance(6, "su attack time ~ c M log M within 2x", ok,
               "medians " + ", ".join(f"{t * 1000:.1f} ms" for t in medians)
               + "; ratios " + ", ".join(f"{r:.2f}" for r in ratios))
    assert ok


# ---------------------------------------------------------------------------
# 7. growth

def test_criterion_7_length_formula(acceptance):
    ball = growth.bfs_ball(8)
    bad = sum(1 for key, d in ball.items()
              if growth.length(growth.ForestDiagram.from_key(key)) != d)
    acceptance(7, "length formula = BFS distance on B_8", bad == 0,
               f"{len(ball)} elements, {bad} mismatches")
    assert bad == 0


def test_criterion_7_positive_counts(acceptance):
    series = [growth.positive_count(n) for n in range(13)]
    bfs = list(growth.bfs_positive_counts(12))
    ok = series == bfs
    acceptance(7, "positive counts: series = BFS for n <= 12", ok, f"series {series}")
    assert ok


def test_criterion_7_recurrence(acceptance):
    rows = []
    mismatches = []
    for n in range(11):
        try:
            got = growth.sphere_count_recursive(n)
        except growth.ValidationMismatch as exc:
            got = exc.got
            mismatches.append(n)
        rows.append(f"{n}:{got}/{growth.bfs_sphere(n)}")
    # the command-line form of the same check
    codes = [cli_main(["growth", "sphere", "-n", "5", "--method", m]) for m in ("bfs", "recurrence")]
    ok = not mismatches and codes == [0, 0]
    acceptance(7, "sphere_count_recursive(n) = BFS for n <= 10", ok,
               f"mismatch at n = {mismatches}; recurrence/BFS " + " ".join(rows)
               + f"; CLI exit codes {codes}")
    assert not mismatches, f"ValidationMismatch for n in {mismatches}"
    assert codes == [0, 0]


# ---------------------------------------------------------------------------
# 8. circle maps

def test_criterion_8_torsion_rotation(acceptance):
    bad = []
    for n in range(1, 9):
        f = circle.construct_torsion(n)
        for k in range(n):
            r = circle.rotation_number(f ** k)
            if not (r.exact and r.verify(f ** k) and r.value == Fraction(k, n)):
                bad.append((n, k))
    acceptance(8, "rot(c_n^k) = k/n for n <= 8", not bad, f"failures {bad}")
    assert not bad


def test_criterion_8_factorial_tower(acceptance):
    bad = [n for n in range(1, 7)
           if circle.construct_X(n + 1) ** (n + 1) != circle.construct_X(n)]
    acceptance(8, "(X_{n+1})^{n+1} = X_n for n <= 6", not bad, f"failures {bad}")
    assert not bad


def test_criterion_8_stretch(acceptance):
    rng = random.Random(8)
    cases = [circle.construct_torsion(3), circle.construct_torsion(5) ** 2,
             circle.construct_X(3)]
    g = circle.CircleMap.rotation(Fraction(3, 8)) * circle.CircleMap.from_interval_map(
        random_element(4, rng))
    cases.append(circle.conjugate(circle.construct_torsion(4), g))
    total = bad = 0
    for f in cases:
        H, gk, _ = circle.conjugate_torsion_to_shift(f)
        pts = circle.random_points(1000, rng)
        total += len(pts)
        bad += sum(1 for x in pts if H(gk.lift_eval(x)) != H(x) + 1)
    acceptance(8, "H(f(x)) = H(x) + 1 at exact points", bad == 0,
               f"{total} points over {len(cases)} maps, {bad} failures")
    assert bad == 0


# ---------------------------------------------------------------------------
# 9. strand scaling

def test_criterion_9_strand_scaling(acceptance):
    rng = random.Random(9)
    Ls = (1_000, 10_000, 100_000)
    times = []
    for L in Ls:
        u = random_word(L // 2, 3, rng)
        g = random_word(L // 4, 3, rng)
        v = g.inverse() * u * g
        t0 = time.perf_counter()
        assert strand.conjugate_strand(u, v)
        times.append(time.perf_counter() - t0)
    e = _fit_exponent(Ls, times)
    acceptance(9, "strand conjugacy time exponent <= 1.2", e <= 1.2,
               f"exponent {e:.2f}; times " + ", ".join(f"{t:.2f} s" for t in times))
    assert e <= 1.2
