"""Strand diagrams for F: stack-machine evaluation, reduction, annular closure.

A diagram is a directed graph of splits and merges read from top to bottom.
A number entering a split leaves by the port given by its first binary
digit, which is consumed; a number entering a merge gets the port bit
prepended.  Concatenation puts the right factor on top, so the diagram of
the product a*b applies b first, matching the composition of PL maps.

Annular diagrams are stored together with a cutting path: every edge
crossing of the path is a degree-two vertex of kind CROSS, and the
crossings are kept in a doubly linked list ordered from the outer boundary
of the annulus to the inner one.  The ordering fixes the radial position of
every component and loop, which the plain graph cannot record.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .dyadic_core import (
    PLMap, TreePair, Word, generator, mpq, tree_pair_from_plmap, word,
)

SOURCE, SINK, SPLIT, MERGE, CROSS, DEAD = 0, 1, 2, 3, 4, -1
KIND_NAMES = {SOURCE: "source", SINK: "sink", SPLIT: "split", MERGE: "merge",
              CROSS: "cross"}

# a port is encoded as 2*vertex + index


class NeedMoreBits(Exception):
    """A split asked for a digit beyond the end of the input."""


class StrandDiagram:
    """Mutable graph storage with index arrays.

    succ0/succ1 hold the in-port reached from out-port 0/1, pred0/pred1 the
    out-port feeding in-port 0/1; -1 means unused.
    """

    def __init__(self):
        self.kind = []
        self.succ0, self.succ1 = [], []
        self.pred0, self.pred1 = [], []
        self.xnext, self.xprev = {}, {}
        self.xhead = -1
        self.source = -1
        self.sink = -1
        self.reduced = False

    # -- construction ------------------------------------------------------
    def add(self, kind: int) -> int:
        self.kind.append(kind)
        self.succ0.append(-1)
        self.succ1.append(-1)
        self.pred0.append(-1)
        self.pred1.append(-1)
        return len(self.kind) - 1

    def connect(self, out_port: int, in_port: int):
        u, p = out_port >> 1, out_port & 1
        w, q = in_port >> 1, in_port & 1
        if p:
            self.succ1[u] = in_port
        else:
            self.succ0[u] = in_port
        if q:
            self.pred1[w] = out_port
        else:
            self.pred0[w] = out_port

    def succ(self, out_port: int) -> int:
        u = out_port >> 1
        return self.succ1[u] if out_port & 1 else self.succ0[u]

    def pred(self, in_port: int) -> int:
        w = in_port >> 1
        return self.pred1[w] if in_port & 1 else self.pred0[w]

    def vertices(self):
        return [v for v, k in enumerate(self.kind) if k != DEAD]

    def count(self, kind: int) -> int:
        return sum(1 for k in self.kind if k == kind)

    def copy(self) -> "StrandDiagram":
        d = StrandDiagram()
        d.kind = list(self.kind)
        d.succ0, d.succ1 = list(self.succ0), list(self.succ1)
        d.pred0, d.pred1 = list(self.pred0), list(self.pred1)
        d.xnext, d.xprev = dict(self.xnext), dict(self.xprev)
        d.xhead, d.source, d.sink = self.xhead, self.source, self.sink
        d.reduced = self.reduced
        return d

    # -- cut list ------------------------------------------------------------
    def _cut_insert_before(self, x: int, anchor: int):
        p = self.xprev[anchor]
        self.xprev[x] = p
        self.xnext[x] = anchor
        self.xprev[anchor] = x
        if p == -1:
            self.xhead = x
        else:
            self.xnext[p] = x

    def _cut_remove(self, x: int):
        p, n = self.xprev.pop(x), self.xnext.pop(x)
        if p == -1:
            self.xhead = n
        else:
            self.xnext[p] = n
        if n != -1:
            self.xprev[n] = p

    def cut_order(self) -> list:
        out = []
        x = self.xhead
        while x != -1:
            out.append(x)
            x = self.xnext[x]
        return out

    # -- semantics -----------------------------------------------------------
    def evaluate_bits(self, prefix: str) -> str:
        if self.source < 0:
            raise ValueError("only (1,1) diagrams can be evaluated")
        stack = [int(b) for b in reversed(prefix)]
        port = self.succ0[self.source]
        kind, succ0, succ1 = self.kind, self.succ0, self.succ1
        while True:
            v, q = port >> 1, port & 1
            k = kind[v]
            if k == SINK:
                break
            if k == SPLIT:
                if not stack:
                    raise NeedMoreBits(prefix)
                port = succ1[v] if stack.pop() else succ0[v]
            elif k == MERGE:
                stack.append(q)
                port = succ0[v]
            else:
                port = succ0[v]
        return "".join(str(b) for b in reversed(stack))

    def code(self) -> tuple:
        """Traversal code of a (1,1) diagram from its source; equal codes mean
        the diagrams are the same up to relabelling of vertices."""
        return tuple(_bfs_code(self, self.source, _real_neighbours(self)))

    def __eq__(self, other):
        return isinstance(other, StrandDiagram) and self.code() == other.code()

    def __hash__(self):
        return hash(self.code())

    def to_json(self) -> dict:
        live = self.vertices()
        idx = {v: i for i, v in enumerate(live)}

        def port(c):
            return None if c < 0 else [idx[c >> 1], c & 1]

        verts = []
        for v in live:
            verts.append({"id": idx[v], "kind": KIND_NAMES[self.kind[v]],
                          "out": [port(self.succ0[v]), port(self.succ1[v])],
                          "in": [port(self.pred0[v]), port(self.pred1[v])]})
        out = {"vertices": verts}
        if self.xhead != -1:
            out["cut"] = [idx[x] for x in self.cut_order()]
        return out

    def to_dot(self) -> str:
        lines = ["digraph strand {", "  node [shape=point];"]
        for v in self.vertices():
            k = self.kind[v]
            shape = {SOURCE: "triangle", SINK: "invtriangle", SPLIT: "circle",
                     MERGE: "box", CROSS: "diamond"}[k]
            lines.append(f'  v{v} [shape={shape}, label="{KIND_NAMES[k][0]}"];')
        for v in self.vertices():
            for p, c in enumerate((self.succ0[v], self.succ1[v])):
                if c >= 0:
                    tail = {0: "sw", 1: "se"}[p] if self.kind[v] == SPLIT else "s"
                    head = {0: "nw", 1: "ne"}[c & 1] if self.kind[c >> 1] == MERGE else "n"
                    lines.append(f"  v{v}:{tail} -> v{c >> 1}:{head};")
        lines.append("}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# building diagrams

def _append_tree_pair(d: StrandDiagram, top: int, dom: str, rng: str) -> int:
    """Glue the diagram of the pair (dom, rng) below out-port top.

    Returns the out-port at the bottom of the glued piece.
    """
    leaves = []
    stack = [top]
    for ch in dom:
        port = stack.pop()
        if ch == "1":
            v = d.add(SPLIT)
            d.connect(port, 2 * v)
            stack.append(2 * v + 1)
            stack.append(2 * v)
        else:
            leaves.append(port)
    it = iter(leaves)
    # build merges bottom-up from the preorder code of the range tree
    work = []  # entries: [pending_children_ports] per open caret
    result = None
    for ch in rng:
        if ch == "1":
            work.append([])
            continue
        port = next(it)
        while True:
            if not work:
                result = port
                break
            work[-1].append(port)
            if len(work[-1]) < 2:
                break
            left, right = work.pop()
            m = d.add(MERGE)
            d.connect(left, 2 * m)
            d.connect(right, 2 * m + 1)
            port = 2 * m
    return result


_LETTER_CACHE = {}


def _letter_codes(k: int, s: int):
    key = (k, s)
    if key not in _LETTER_CACHE:
        t = tree_pair_from_plmap(generator(k))
        dom, rng = t.domain.code, t.range.code
        _LETTER_CACHE[key] = (dom, rng) if s == 1 else (rng, dom)
    return _LETTER_CACHE[key]


def _new_11() -> tuple:
    d = StrandDiagram()
    d.source = d.add(SOURCE)
    return d, 2 * d.source


def _finish_11(d: StrandDiagram, bottom: int) -> StrandDiagram:
    d.sink = d.add(SINK)
    d.connect(bottom, 2 * d.sink)
    return d


def strand_from_tree_pair(t: TreePair) -> StrandDiagram:
    d, top = _new_11()
    return _finish_11(d, _append_tree_pair(d, top, t.domain.code, t.range.code))


def strand_from_word(w) -> StrandDiagram:
    """Unreduced diagram: the generator diagrams stacked, last letter on top."""
    w = word(w)
    d, port = _new_11()
    for k, s in reversed(w.letters):
        dom, rng = _letter_codes(k, s)
        port = _append_tree_pair(d, port, dom, rng)
    return _finish_11(d, port)


def strand_from_plmap(f: PLMap) -> StrandDiagram:
    return strand_from_tree_pair(tree_pair_from_plmap(f))


def identity_diagram() -> StrandDiagram:
    d, top = _new_11()
    return _finish_11(d, top)


def _embed(d: StrandDiagram, other: StrandDiagram, top: int) -> int:
    """Copy the (1,1) diagram other below out-port top; return its bottom port."""
    remap = {}
    for v, k in enumerate(other.kind):
        if k in (SPLIT, MERGE):
            remap[v] = d.add(k)
    def tr(c):
        v = c >> 1
        if v == other.source:
            return top
        return 2 * remap[v] + (c & 1)

    bottom = None
    for v, k in enumerate(other.kind):
        if k in (SOURCE, SPLIT, MERGE):
            for c_out, c_in in ((2 * v, other.succ0[v]), (2 * v + 1, other.succ1[v])):
                if c_in < 0:
                    continue
                if c_in >> 1 == other.sink:
                    bottom = tr(c_out)
                else:
                    d.connect(tr(c_out), 2 * remap[c_in >> 1] + (c_in & 1))
    return bottom


def concatenate(a: StrandDiagram, b: StrandDiagram) -> StrandDiagram:
    """Diagram of the product a*b (b on top, applied first)."""
    d, top = _new_11()
    mid = _embed(d, b, top)
    return _finish_11(d, _embed(d, a, mid))


def inverse_diagram(a: StrandDiagram) -> StrandDiagram:
    """Reflect top to bottom: splits become merges and edges reverse."""
    d = StrandDiagram()
    remap = {}
    swap = {SOURCE: SINK, SINK: SOURCE, SPLIT: MERGE, MERGE: SPLIT}
    for v, k in enumerate(a.kind):
        if k in swap:
            remap[v] = d.add(swap[k])
    d.source, d.sink = remap[a.sink], remap[a.source]
    for v, k in enumerate(a.kind):
        if k not in swap:
            continue
        for p, c in enumerate((a.succ0[v], a.succ1[v])):
            if c >= 0:
                d.connect(2 * remap[c >> 1] + (c & 1), 2 * remap[v] + p)
    return d


# ---------------------------------------------------------------------------
# reduction

class _Reducer:
    def __init__(self, d: StrandDiagram, rng: random.Random | None = None):
        self.d = d
        self.rng = rng

    def fwd(self, in_port: int):
        """Follow crossings forward from an in-port: (in-port of a real vertex, crossings)."""
        d = self.d
        chain = []
        while d.kind[in_port >> 1] == CROSS:
            x = in_port >> 1
            chain.append(x)
            in_port = d.succ0[x]
            if len(chain) > len(d.kind):
                return in_port, None  # free loop
        return in_port, chain

    def back(self, out_port: int):
        d = self.d
        chain = []
        while d.kind[out_port >> 1] == CROSS:
            x = out_port >> 1
            chain.append(x)
            out_port = d.pred0[x]
            if len(chain) > len(d.kind):
                return out_port, None
        chain.reverse()
        return out_port, chain

    def real_around(self, v: int) -> list:
        """v itself if real, otherwise the real vertices at both ends of its chain."""
        d = self.d
        if d.kind[v] != CROSS:
            return [v] if d.kind[v] != DEAD else []
        a, ca = self.back(2 * v)
        b, cb = self.fwd(2 * v)
        if ca is None or cb is None:
            return []
        return [a >> 1, b >> 1]

    def type1(self, s: int) -> list | None:
        d = self.d
        e0, ch0 = self.fwd(d.succ0[s])
        e1, ch1 = self.fwd(d.succ1[s])
        if ch0 is None or ch1 is None:
            return None
        m = e0 >> 1
        if m != e1 >> 1 or d.kind[m] != MERGE or e0 & 1 or not e1 & 1:
            return None
        if len(ch0) != len(ch1):
            return None  # the bigon winds around the hole
        for x in ch1:
            d._cut_remove(x)
            d.kind[x] = DEAD
        a = d.pred0[s]
        c = d.succ0[m]
        d.kind[s] = d.kind[m] = DEAD
        for i in range(len(ch0) - 1):
            d.connect(2 * ch0[i], 2 * ch0[i + 1])
        if a >> 1 == m:
            if not ch0:
                raise AssertionError("contractible free loop")
            d.connect(2 * ch0[-1], 2 * ch0[0])
            return []
        if ch0:
            d.connect(a, 2 * ch0[0])
            d.connect(2 * ch0[-1], c)
        else:
            d.connect(a, c)
        return [a >> 1, c >> 1]

    def type2(self, m: int) -> list | None:
        d = self.d
        e, chain = self.fwd(d.succ0[m])
        if chain is None:
            return None
        s = e >> 1
        if d.kind[s] != SPLIT:
            return None
        left = []
        for x in chain:
            y = d.add(CROSS)
            d._cut_insert_before(y, x)
            left.append(y)
        strands = [(d.pred0[m], left, d.succ0[s]), (d.pred1[m], chain, d.succ1[s])]
        d.kind[m] = d.kind[s] = DEAD
        touched = []
        seen = set()

        def link(seq):
            for i in range(len(seq) - 1):
                d.connect(2 * seq[i], 2 * seq[i + 1])

        for i in (0, 1):
            start = strands[i][0]
            if start >> 1 == s:
                continue
            seq, k = [], i
            while True:
                seen.add(k)
                seq.extend(strands[k][1])
                end = strands[k][2]
                if end >> 1 == m:
                    k = end & 1
                    continue
                break
            link(seq)
            if seq:
                d.connect(start, 2 * seq[0])
                d.connect(2 * seq[-1], end)
            else:
                d.connect(start, end)
            touched += [start >> 1, end >> 1]
        for i in (0, 1):
            if i in seen:
                continue
            seq, k = [], i
            while k not in seen:
                seen.add(k)
                seq.extend(strands[k][1])
                k = strands[k][2] & 1
            if not seq:
                raise AssertionError("contractible free loop")
            link(seq)
            d.connect(2 * seq[-1], 2 * seq[0])
        return touched

    def try_at(self, v: int):
        d = self.d
        k = d.kind[v]
        if k == SPLIT:
            r = self.type1(v)
            if r is not None:
                return r
            p, chain = self.back(d.pred0[v])
            if chain is not None and d.kind[p >> 1] == MERGE:
                return self.type2(p >> 1)
        elif k == MERGE:
            r = self.type2(v)
            if r is not None:
                return r
            p0, c0 = self.back(d.pred0[v])
            p1, c1 = self.back(d.pred1[v])
            if c0 is not None and c1 is not None and p0 >> 1 == p1 >> 1 \
                    and d.kind[p0 >> 1] == SPLIT and not p0 & 1 and p1 & 1:
                return self.type1(p0 >> 1)
        return None

    def run(self):
        d = self.d
        work = [v for v, k in enumerate(d.kind) if k in (SPLIT, MERGE)]
        if self.rng is not None:
            self.rng.shuffle(work)
        while work:
            v = work.pop()
            if d.kind[v] not in (SPLIT, MERGE):
                continue
            touched = self.try_at(v)
            if touched is None:
                continue
            new = []
            for u in touched:
                new.extend(self.real_around(u))
            if self.rng is not None:
                self.rng.shuffle(new)
            work.extend(u for u in new if d.kind[u] in (SPLIT, MERGE))


def reduce_strand(d: StrandDiagram, rng: random.Random | None = None) -> StrandDiagram:
    """Reduced diagram equivalent to d; rng randomizes the order of the moves."""
    out = d.copy()
    _Reducer(out, rng).run()
    out.reduced = True
    return out


def _compact(d: StrandDiagram) -> StrandDiagram:
    """Drop dead vertices and renumber."""
    live = d.vertices()
    idx = {v: i for i, v in enumerate(live)}
    n = StrandDiagram()
    for v in live:
        n.add(d.kind[v])
    for v in live:
        for p, c in enumerate((d.succ0[v], d.succ1[v])):
            if c >= 0:
                n.connect(2 * idx[v] + p, 2 * idx[c >> 1] + (c & 1))
    if d.source >= 0:
        n.source, n.sink = idx[d.source], idx[d.sink]
    prev = -1
    for x in d.cut_order():
        y = idx[x]
        n.xprev[y] = prev
        n.xnext[y] = -1
        if prev == -1:
            n.xhead = y
        else:
            n.xnext[prev] = y
        prev = y
    n.reduced = d.reduced
    return n


# ---------------------------------------------------------------------------
# annular diagrams

def _real_neighbours(d: StrandDiagram):
    """Port-by-port neighbours with crossing chains contracted.

    Returns a function v -> list of (neighbour, neighbour port, side) tuples in
    a fixed port order: in-ports first, then out-ports.
    """
    red = _Reducer(d)
    cache = {}

    def nb(v):
        if v in cache:
            return cache[v]
        k = d.kind[v]
        out = []
        n_in = {SOURCE: 0, SINK: 1, SPLIT: 1, MERGE: 2}[k]
        n_out = {SOURCE: 1, SINK: 0, SPLIT: 2, MERGE: 1}[k]
        for q in range(n_in):
            p, _ = red.back(d.pred1[v] if q else d.pred0[v])
            out.append((p >> 1, p & 1))
        for p in range(n_out):
            c, _ = red.fwd(d.succ1[v] if p else d.succ0[v])
            out.append((c >> 1, c & 1))
        cache[v] = out
        return out

    return nb


def _bfs_code(d: StrandDiagram, start: int, nb):
    ids = {start: 0}
    queue = [start]
    i = 0
    kind = d.kind
    while i < len(queue):
        v = queue[i]
        i += 1
        yield kind[v]
        for w, port in nb(v):
            j = ids.get(w)
            if j is None:
                j = ids[w] = len(queue)
                queue.append(w)
            yield j
            yield port


def _min_code(d: StrandDiagram, starts: list, nb) -> tuple:
    """Lexicographically least traversal code over the given start vertices.

    Candidates are advanced in lockstep and dropped as soon as they emit a
    larger token, so only symmetric starts run to the end.
    """
    gens = [_bfs_code(d, s, nb) for s in starts]
    out = []
    while True:
        toks = [next(g, -1) for g in gens]
        best = min(toks)
        if best == -1:
            return tuple(out)
        out.append(best)
        gens = [g for g, t in zip(gens, toks) if t == best]


@dataclass
class Loop:
    kind: str          # "free", "split" or "merge"
    vertices: list     # travel order starting after the crossing
    bits: str          # port bits read along the loop
    crossing: int      # cut crossing on the loop

    @property
    def size(self) -> int:
        return len(self.vertices)


@dataclass
class Component:
    vertices: list
    crossings: list
    loops: list        # ordered outermost to innermost


@dataclass(frozen=True)
class CanonicalForm:
    components: tuple

    def to_bytes(self) -> bytes:
        parts = []
        for comp in self.components:
            parts.append(",".join(str(t) for t in comp))
        return ";".join(parts).encode()


class AnnularDiagram:
    """A closed diagram with its cutting path; see the module docstring."""

    def __init__(self, d: StrandDiagram):
        self.d = d
        self._components = None

    @property
    def reduced(self) -> bool:
        return self.d.reduced

    def free_loops(self) -> int:
        return sum(1 for c in self.components() if c.loops and c.loops[0].kind == "free")

    def components(self) -> list:
        if self._components is None:
            self._components = _analyse(self.d)
        return self._components

    def loops(self) -> list:
        return [lp for c in self.components() for lp in c.loops]

    def canonical_form(self) -> CanonicalForm:
        if not self.reduced:
            raise ValueError("canonical form needs a reduced diagram")
        nb = _real_neighbours(self.d)
        codes = []
        for comp in self.components():
            first = comp.loops[0]
            if first.kind == "free":
                codes.append(("F",))
            else:
                codes.append(_min_code(self.d, first.vertices, nb))
        return CanonicalForm(tuple(codes))

    def fixed_point_report(self) -> list:
        if not self.reduced:
            raise ValueError("fixed point report needs a reduced diagram")
        out = []
        for lp in self.loops():
            if lp.kind == "free":
                out.append({"kind": "interval", "slope": "1", "tail": None})
            elif lp.kind == "merge":
                out.append({"kind": "attractor", "slope": f"2^-{lp.size}",
                            "tail": min_rotation(lp.bits)})
            else:
                out.append({"kind": "repeller", "slope": f"2^{lp.size}",
                            "tail": min_rotation(lp.bits)})
        return out

    def to_json(self) -> dict:
        out = self.d.to_json()
        out["loops"] = [{"kind": lp.kind, "size": lp.size, "bits": lp.bits,
                         "winding": 1} for lp in self.loops()]
        return out

    def to_dot(self) -> str:
        return self.d.to_dot()


def min_rotation(s: str) -> str:
    """Least rotation of s (Booth's algorithm)."""
    if not s:
        return s
    t = s + s
    f = [-1] * len(t)
    k = 0
    for j in range(1, len(t)):
        c = t[j]
        i = f[j - k - 1]
        while i != -1 and c != t[k + i + 1]:
            if c < t[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if c != t[k + i + 1]:
            if c < t[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return t[k:k + len(s)]


def _analyse(d: StrandDiagram) -> list:
    """Components in radial order with their loops."""
    order = d.cut_order()
    pos = {x: i for i, x in enumerate(order)}
    comp_of = {}
    comps = []
    for x in order:
        if x in comp_of:
            continue
        # undirected flood fill over all live vertices
        cid = len(comps)
        stack = [x]
        comp_of[x] = cid
        members = []
        while stack:
            v = stack.pop()
            members.append(v)
            for c in (d.succ0[v], d.succ1[v], d.pred0[v], d.pred1[v]):
                if c >= 0:
                    w = c >> 1
                    if w not in comp_of:
                        comp_of[w] = cid
                        stack.append(w)
        comps.append(members)
    # contiguity of components along the cut
    last = -1
    for x in order:
        c = comp_of[x]
        if c < last:
            raise AssertionError("components interleave along the cut")
        last = c
    out = []
    for members in comps:
        crossings = sorted((v for v in members if d.kind[v] == CROSS), key=pos.get)
        real = [v for v in members if d.kind[v] != CROSS]
        if not real:
            x = crossings[0]
            out.append(Component([], crossings, [Loop("free", [], "", x)]))
            continue
        loops = _find_loops(d, real)
        loops.sort(key=lambda lp: pos[lp.crossing])
        out.append(Component(real, crossings, loops))
    return out


def _find_loops(d: StrandDiagram, real: list) -> list:
    """Directed cycles through real vertices, via Tarjan's algorithm."""
    red = _Reducer(d)
    succ = {}
    for v in real:
        outs = []
        for c in (d.succ0[v], d.succ1[v]):
            if c >= 0:
                e, chain = red.fwd(c)
                outs.append((e >> 1, e & 1, chain))
        succ[v] = outs
    index, low, on, stack, sccs = {}, {}, set(), [], []
    counter = 0
    for root in real:
        if root in index:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on.add(root)
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i][0]
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, 0))
                elif w in on:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    sccs.append(comp)
    loops = []
    for comp in sccs:
        cset = set(comp)
        v0 = comp[0]
        if len(comp) == 1 and all(w != v0 for w, _, _ in succ[v0]):
            continue
        # the crossing on the cycle fixes where reading starts
        v = v0
        crossing = None
        while True:
            nxt = [(p, w, ch) for p, (w, q, ch) in enumerate(succ[v]) if w in cset]
            if len(nxt) != 1:
                raise AssertionError("directed cycles must be simple and disjoint")
            p, w, ch = nxt[0]
            if ch:
                if crossing is not None or len(ch) != 1:
                    raise AssertionError("a directed cycle must cross the cut once")
                crossing = (ch[0], w)
            v = w
            if v == v0:
                break
        if crossing is None:
            raise AssertionError("directed cycle misses the cut")
        x, first = crossing
        verts, bits = [], []
        v = first
        while True:
            verts.append(v)
            p, (w, q, _) = next((p, t) for p, t in enumerate(succ[v]) if t[0] in cset)
            bits.append((p, q))
            v = w
            if v == first:
                break
        if d.kind[v0] == SPLIT:
            # each split consumes the digit naming the port that stays on the loop
            tail = "".join(str(p) for p, _ in bits)
            loops.append(Loop("split", verts, tail, x))
        else:
            # merges prepend the entry port, so digits come out in reverse
            entry = [bits[i - 1][1] for i in range(len(bits))]
            tail = "".join(str(q) for q in reversed(entry))
            loops.append(Loop("merge", verts, tail, x))
    return loops


def close_and_reduce(d) -> AnnularDiagram:
    """Identify source and sink, then reduce with all three moves."""
    if isinstance(d, (str, Word)):
        d = strand_from_word(d)
    if d.source < 0:
        raise ValueError("expected a (1,1) diagram")
    a = d.copy()
    top = a.succ0[a.source]
    bottom = a.pred0[a.sink]
    x = a.add(CROSS)
    a.kind[a.source] = a.kind[a.sink] = DEAD
    if top >> 1 == a.sink:
        a.connect(2 * x, 2 * x)
    else:
        a.connect(bottom, 2 * x)
        a.connect(2 * x, top)
    a.source = a.sink = -1
    a.xhead = x
    a.xprev[x] = a.xnext[x] = -1
    _Reducer(a).run()
    _merge_free_loops(a)
    a.reduced = True
    return AnnularDiagram(_compact(a))


def _merge_free_loops(d: StrandDiagram):
    """Type III moves: adjacent free loops along the cut become one."""
    x = d.xhead
    prev_free = False
    while x != -1:
        nxt = d.xnext[x]
        free = d.succ0[x] >> 1 == x
        if free and prev_free:
            d._cut_remove(x)
            d.kind[x] = DEAD
        else:
            prev_free = free
        x = nxt


# ---------------------------------------------------------------------------
# conjugacy

def _as_diagram(u) -> StrandDiagram:
    if isinstance(u, StrandDiagram):
        return u
    if isinstance(u, PLMap):
        return strand_from_plmap(u)
    if isinstance(u, TreePair):
        return strand_from_tree_pair(u)
    return strand_from_word(u)


def canonical_form(a) -> CanonicalForm:
    if not isinstance(a, AnnularDiagram):
        a = close_and_reduce(_as_diagram(a))
    return a.canonical_form()


def conjugate_strand(u, v) -> bool:
    """Are u and v conjugate in F?  Accepts words, strings, maps or diagrams."""
    return canonical_form(u) == canonical_form(v)


def fixed_point_report(a) -> list:
    if not isinstance(a, AnnularDiagram):
        a = close_and_reduce(_as_diagram(a))
    return a.fixed_point_report()


def evaluate_bits(d: StrandDiagram, prefix: str) -> str:
    return d.evaluate_bits(prefix)


def diagram_to_plmap(d: StrandDiagram) -> PLMap:
    """Read the map back by running every leaf interval through the machine.

    Inputs are refined until the machine stops asking for digits, so the
    result is exact.
    """
    xs, ys = [], []
    work = [""]
    pieces = []
    while work:
        p = work.pop()
        try:
            out = d.evaluate_bits(p)
        except NeedMoreBits:
            work.append(p + "1")
            work.append(p + "0")
            continue
        pieces.append((p, out))
    pieces.sort()

    def val(bits):
        return mpq(int(bits, 2), 1 << len(bits)) if bits else mpq(0)

    for p, out in pieces:
        # the input interval [p] maps linearly onto [out]
        xs.append(val(p))
        ys.append(val(out))
    xs.append(mpq(1))
    ys.append(mpq(1))
    return PLMap(xs, ys)
