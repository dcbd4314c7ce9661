"""Command-line front end.

Exit codes: 0 for "yes" or success (any witness printed has been re-checked
by exact arithmetic), 1 for a certified "no", 2 for usage errors and
malformed input, 3 when an internal consistency check fails.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import circle, crypto, growth, pl_dynamics, strand
from .dyadic_core import (
    PLMap, Word, compose, conjugate, mpq, normal_form, plmap_to_word, power,
    rational_to_json, word, word_to_plmap,
)

YES, NO, USAGE, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InternalError(Exception):
    pass


def _word(text: str) -> Word:
    try:
        return word(text)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"malformed word {text!r}: {exc}") from None


def _map(text: str) -> PLMap:
    return word_to_plmap(_word(text))


def _rational(text: str):
    try:
        return mpq(text)
    except (ValueError, TypeError):
        raise UsageError(f"malformed rational {text!r}") from None


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None


def _emit(args, text: str, payload: dict):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _fmt(t) -> str:
    return str(t)


def _check_conjugator(y: PLMap, z: PLMap, g: PLMap):
    if conjugate(y, g) != z:
        raise InternalError("conjugator failed re-verification")


# ---------------------------------------------------------------------------
# dyadic_core

def cmd_nf(args) -> int:
    w = _word(" ".join(args.word))
    z = normal_form(w)
    if word_to_plmap(z) != word_to_plmap(w):
        raise InternalError("normal form changed the element")
    _emit(args, str(z) or "1", {"input": str(w), "normal_form": str(z), "length": len(z)})
    return YES


def cmd_eval(args) -> int:
    f = _map(args.word)
    t = _rational(args.point)
    if not 0 <= t <= 1:
        raise UsageError("point must lie in [0, 1]")
    v = f(t)
    _emit(args, _fmt(v), {"point": rational_to_json(t), "value": rational_to_json(v)})
    return YES


# ---------------------------------------------------------------------------
# conjugacy, roots, centralizers

def cmd_conj(args) -> int:
    u, v = _word(args.u), _word(args.v)
    y, z = word_to_plmap(u), word_to_plmap(v)
    if args.engine == "strand":
        decision = strand.conjugate_strand(u, v)
    elif args.engine == "mather":
        try:
            decision = pl_dynamics.mather_conjugate(y, z)
        except ValueError as exc:
            raise UsageError(f"mather engine: {exc}") from None
    else:
        decision = None
    g = pl_dynamics.conjugate_pl(y, z)
    if decision is None:
        decision = g is not None
    if decision != (g is not None):
        raise InternalError(f"{args.engine} engine disagrees with the witness search")
    if not decision:
        _emit(args, "no", {"conjugate": False, "engine": args.engine})
        return NO
    _check_conjugator(y, z, g)
    gw = plmap_to_word(g)
    _emit(args, f"yes\ng = {gw or '1'}",
          {"conjugate": True, "engine": args.engine, "conjugator": str(gw),
           "conjugator_map": g.to_json()})
    return YES


def cmd_simconj(args) -> int:
    if len(args.xs) != len(args.ys):
        raise UsageError("--xs and --ys need the same number of words")
    xs = [_map(t) for t in args.xs]
    ys = [_map(t) for t in args.ys]
    g = pl_dynamics.simultaneous_conjugate(xs, ys)
    if g is None:
        _emit(args, "no", {"conjugate": False})
        return NO
    for y, z in zip(xs, ys):
        _check_conjugator(y, z, g)
    gw = plmap_to_word(g)
    _emit(args, f"yes\ng = {gw or '1'}",
          {"conjugate": True, "conjugator": str(gw), "conjugator_map": g.to_json()})
    return YES


def cmd_root(args) -> int:
    if args.n < 1:
        raise UsageError("-n must be positive")
    f = _map(args.word)
    h = pl_dynamics.nth_root(f, args.n)
    if h is None:
        _emit(args, "no root", {"root": None, "n": args.n})
        return NO
    if power(h, args.n) != f:
        raise InternalError("root failed re-verification")
    hw = plmap_to_word(h)
    _emit(args, f"h = {hw or '1'}", {"root": str(hw), "n": args.n, "root_map": h.to_json()})
    return YES


def cmd_centralizer(args) -> int:
    f = _map(args.word)
    desc = pl_dynamics.centralizer(f)
    lines = []
    for p in desc.pieces:
        line = f"[{_fmt(p.a)}, {_fmt(p.b)}] {p.kind}"
        if p.generator is not None:
            g = p.generator
            if compose(g, f.restrict(p.a, p.b)) != compose(f.restrict(p.a, p.b), g):
                raise InternalError("cyclic generator does not commute")
            line += f" generator breakpoints {[(_fmt(x), _fmt(y)) for x, y in zip(g.xs, g.ys)]}"
        lines.append(line)
    _emit(args, "\n".join(lines), {"pieces": desc.to_json()})
    return YES


# ---------------------------------------------------------------------------
# crypto

def cmd_crypto_run(args) -> int:
    try:
        params = crypto.ProtocolParams(args.s, args.M, args.seed, strict=not args.loose)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    run = crypto.run_protocol(params, args.variant)
    out = run.transcript.to_json()
    if args.show_key:
        out["K"] = str(run.K)
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        for k in ("variant", "s", "w", "u1", "u2", "K"):
            if k in out:
                print(f"{k}: {out[k]}")
    return YES


_ATTACKS = {"su": crypto.attack, "transitivity": crypto.attack_transitivity,
            "kolee": crypto.attack_kolee}


def cmd_crypto_attack(args) -> int:
    obj = _load_json(args.transcript)
    try:
        t = crypto.Transcript.from_json(obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"malformed transcript: {exc}") from None
    method = args.variant or ("kolee" if t.variant == "kolee" else "su")
    if (method == "kolee") != (t.variant == "kolee"):
        raise UsageError(f"attack {method!r} does not apply to a {t.variant!r} transcript")
    try:
        key = _ATTACKS[method](t)
    except RuntimeError as exc:
        _emit(args, f"attack failed: {exc}", {"recovered": False, "reason": str(exc)})
        return NO
    out = key.to_json()
    if "K" in obj and str(key.K) != obj["K"]:
        raise InternalError("recovered key differs from the transcript's key")
    _emit(args, f"party: {key.which_party}\na: {key.a}\nb: {key.b}\nK: {key.K}",
          dict(out, recovered=True, method=method))
    return YES


# ---------------------------------------------------------------------------
# growth

def cmd_growth_sphere(args) -> int:
    n = args.n
    if n < 0:
        raise UsageError("-n must be non-negative")
    if args.method == "bfs":
        if n > growth.BFS_BUDGET:
            raise UsageError(f"BFS is limited to n <= {growth.BFS_BUDGET}")
        value = growth.bfs_sphere(n)
    else:
        try:
            value = growth.sphere_count_recursive(n, validate=not args.no_validate)
        except growth.ValidationMismatch as exc:
            print(f"validation mismatch: {exc}", file=sys.stderr)
            return INTERNAL
    _emit(args, str(value), {"n": n, "method": args.method, "sphere": value})
    return YES


def cmd_growth_length(args) -> int:
    w = _word(args.word)
    f = growth.forest_from_element(w)
    n = growth.length(f)
    _emit(args, str(n), {"word": str(w), "length": n})
    return YES


# ---------------------------------------------------------------------------
# circle

def cmd_rot(args) -> int:
    obj = _load_json(args.map)
    try:
        f = circle.CircleMap.from_json(obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"malformed circle map: {exc}") from None
    if args.qmax < 1:
        raise UsageError("--qmax must be positive")
    r = circle.rotation_number(f, args.qmax)
    if not r.verify(f):
        raise InternalError("rotation certificate failed re-verification")
    if r.exact:
        text = f"{r.value} (exact: L^{r.q}({r.point}) = {r.point} + {r.p})"
    else:
        text = f"in [{r.lo}, {r.hi}]"
    _emit(args, text, r.to_json())
    return YES


def cmd_torsion_build(args) -> int:
    if args.n < 1 or args.n > 12:
        raise UsageError("-n must lie in [1, 12]")
    f = circle.construct_X(args.n) if args.factorial else circle.construct_torsion(args.n)
    print(json.dumps(f.to_json(), sort_keys=True))
    return YES


# ---------------------------------------------------------------------------
# export

def cmd_export(args) -> int:
    w = _word(args.word)
    d = strand.strand_from_word(w)
    if args.closed:
        d = strand.close_and_reduce(d)
    elif args.reduce:
        d = strand.reduce_strand(d)
    if args.format == "dot":
        print(d.to_dot())
    else:
        print(json.dumps(d.to_json(), sort_keys=True))
    return YES


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="thompson", description="Exact computations in Thompson's group F.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("nf", parents=[common], help="normal form of a word")
    s.add_argument("word", nargs="+")
    s.set_defaults(func=cmd_nf)

    s = sub.add_parser("eval", parents=[common], help="evaluate a word at a point of [0, 1]")
    s.add_argument("word")
    s.add_argument("point")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("conj", parents=[common], help="decide conjugacy, print g with g^-1 u g = v")
    s.add_argument("u")
    s.add_argument("v")
    s.add_argument("--engine", choices=("stair", "strand", "mather"), default="stair")
    s.set_defaults(func=cmd_conj)

    s = sub.add_parser("simconj", parents=[common], help="simultaneous conjugacy of tuples")
    s.add_argument("--xs", nargs="+", required=True)
    s.add_argument("--ys", nargs="+", required=True)
    s.set_defaults(func=cmd_simconj)

    s = sub.add_parser("root", parents=[common], help="n-th root")
    s.add_argument("word")
    s.add_argument("-n", type=int, required=True)
    s.set_defaults(func=cmd_root)

    s = sub.add_parser("centralizer", parents=[common], help="centralizer structure")
    s.add_argument("word")
    s.set_defaults(func=cmd_centralizer)

    s = sub.add_parser("crypto", help="key exchange and attacks")
    csub = s.add_subparsers(dest="action", required=True)
    c = csub.add_parser("run", parents=[common], help="run the protocol, print the transcript")
    c.add_argument("--s", type=int, required=True)
    c.add_argument("--M", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--variant", choices=("su", "kolee"), default="su")
    c.add_argument("--show-key", action="store_true", help="include the shared key")
    c.add_argument("--loose", action="store_true", help="allow parameters outside the standard ranges")
    c.set_defaults(func=cmd_crypto_run)
    c = csub.add_parser("attack", parents=[common], help="recover the key from a transcript")
    c.add_argument("transcript", help="transcript JSON file, or - for stdin")
    c.add_argument("--variant", choices=("su", "transitivity", "kolee"))
    c.set_defaults(func=cmd_crypto_attack)

    s = sub.add_parser("growth", help="word metric growth")
    gsub = s.add_subparsers(dest="action", required=True)
    g = gsub.add_parser("sphere", parents=[common], help="number of elements of length n")
    g.add_argument("-n", type=int, required=True)
    g.add_argument("--method", choices=("bfs", "recurrence"), default="bfs")
    g.add_argument("--no-validate", action="store_true",
                   help="skip the BFS cross-check of the recurrence")
    g.set_defaults(func=cmd_growth_sphere)
    g = gsub.add_parser("length", parents=[common], help="word length in {x0, x1}")
    g.add_argument("word")
    g.set_defaults(func=cmd_growth_length)

    s = sub.add_parser("rot", parents=[common], help="rotation number of a circle map")
    s.add_argument("map", help="circle-map JSON file, or - for stdin")
    s.add_argument("--qmax", type=int, default=64)
    s.set_defaults(func=cmd_rot)

    s = sub.add_parser("torsion", help="torsion circle maps")
    tsub = s.add_subparsers(dest="action", required=True)
    t = tsub.add_parser("build", help="print a torsion element as JSON")
    t.add_argument("-n", type=int, required=True)
    t.add_argument("--factorial", action="store_true",
                   help="build X_n (rotation 1/n!) instead of the order-n shift")
    t.set_defaults(func=cmd_torsion_build, json=True)

    s = sub.add_parser("export", help="strand diagram of a word")
    s.add_argument("word")
    s.add_argument("--format", choices=("dot", "json"), default="dot")
    s.add_argument("--reduce", action="store_true", help="reduce before export")
    s.add_argument("--closed", action="store_true", help="close into an annular diagram and reduce")
    s.set_defaults(func=cmd_export, json=False)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
