"""Splice diagrams: acyclic, partially directed multigraphs of link labels.

A vertex carries a link label; each label component is consumed either by an
edge end or by an external name.  Edge orientations are stored as
``"to0"``/``"to1"`` (pointing at ``ends[0]``/``ends[1]``), ``"none"`` or
``None`` when not yet derived.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import TYPE_CHECKING, Any, Iterable, Mapping

from splicegraph.errors import SpliceError
from splicegraph.links import (
    AtomRef,
    BrunnianSet,
    KeyChain,
    LinkLabel,
    SeifertLink,
    Unlink,
    canonical_label,
    label_symmetry_classes,
    strong_brunnian,
)

if TYPE_CHECKING:
    from splicegraph.atomdb import AtomDatabase

End = tuple[str, str]
ORIENTS = ("none", "to0", "to1")


@dataclass(frozen=True)
class Vertex:
    id: str
    label: LinkLabel
    flips: frozenset[str] = frozenset()

    def sign(self, c: str) -> int:
        return -1 if c in self.flips else 1


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple[End, End]
    orient: str | None = None

    def other(self, v: str) -> End:
        a, b = self.ends
        return b if a[0] == v else a

    def side_of(self, v: str) -> int:
        return 0 if self.ends[0][0] == v else 1

    def points_at(self) -> str | None:
        """Vertex the arrow points at, if oriented."""
        if self.orient == "to0":
            return self.ends[0][0]
        if self.orient == "to1":
            return self.ends[1][0]
        return None


@dataclass(frozen=True)
class SpliceDiagram:
    vertices: Mapping[str, Vertex]
    edges: Mapping[str, Edge]
    externals: Mapping[str, End]
    _adj: dict = field(default=None, compare=False, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        adj: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in sorted(self.edges.values(), key=lambda e: e.id):
            for v, _ in e.ends:
                if v in adj and e not in adj[v]:
                    adj[v].append(e)
        object.__setattr__(self, "_adj", adj)

    def incident(self, v: str) -> list[Edge]:
        return self._adj[v]

    def label(self, v: str) -> LinkLabel:
        return self.vertices[v].label

    def attachment(self, v: str, c: str) -> tuple[str, str] | None:
        """``("ext", name)`` or ``("edge", id)`` for the slot ``(v, c)``."""
        for e in self._adj[v]:
            if (v, c) in e.ends:
                return ("edge", e.id)
        for name, end in self.externals.items():
            if end == (v, c):
                return ("ext", name)
        return None

    def with_orientations(self, orients: Mapping[str, str | None]) -> SpliceDiagram:
        edges = {k: Edge(e.id, e.ends, orients.get(k, e.orient)) for k, e in self.edges.items()}
        return SpliceDiagram(dict(self.vertices), edges, dict(self.externals))

    def connected_components(self, subset: Iterable[str] | None = None) -> list[frozenset[str]]:
        return _components(self, set(self.vertices if subset is None else subset))

    def __repr__(self) -> str:
        return f"SpliceDiagram({len(self.vertices)} vertices, {len(self.edges)} edges)"


# ---------------------------------------------------------------------------
# construction


def build(
    vertices: Iterable[Vertex | tuple],
    edges: Iterable[Edge | tuple],
    externals: Mapping[str, End] | Iterable[tuple[str, End]],
) -> SpliceDiagram:
    """Assemble and check a diagram.

    Errors: ``CYCLE``, ``DANGLING_COMPONENT``, ``DUPLICATE_LABEL``.
    """
    vs: dict[str, Vertex] = {}
    for v in vertices:
        if not isinstance(v, Vertex):
            v = Vertex(*v)
        if v.id in vs:
            raise SpliceError("DUPLICATE_LABEL", f"vertex id {v.id!r} used twice")
        vs[v.id] = v
    es: dict[str, Edge] = {}
    for e in edges:
        if not isinstance(e, Edge):
            e = Edge(e[0], (tuple(e[1][0]), tuple(e[1][1])), *e[2:])  # type: ignore[arg-type]
        if e.id in es:
            raise SpliceError("DUPLICATE_LABEL", f"edge id {e.id!r} used twice")
        if e.orient is not None and e.orient not in ORIENTS:
            raise SpliceError("BAD_ORIENTATION", f"edge {e.id}: {e.orient!r}")
        es[e.id] = Edge(e.id, (tuple(e.ends[0]), tuple(e.ends[1])), e.orient)  # type: ignore[arg-type]
    exts = dict(externals.items() if isinstance(externals, Mapping) else externals)
    exts = {k: tuple(v) for k, v in exts.items()}
    d = SpliceDiagram(vs, es, exts)  # type: ignore[arg-type]
    check(d)
    return d


def check(d: SpliceDiagram) -> None:
    clash = set(d.edges) & set(d.externals)
    if clash:
        raise SpliceError("DUPLICATE_LABEL", f"names used both as edge and external: {sorted(clash)}")
    used: dict[End, str] = {}

    def claim(end: End, who: str) -> None:
        v, c = end
        if v not in d.vertices:
            raise SpliceError("DANGLING_COMPONENT", f"{who} refers to unknown vertex {v!r}")
        if c not in d.vertices[v].label.components:
            raise SpliceError(
                "DANGLING_COMPONENT", f"{who}: {c!r} is not a component of vertex {v!r}"
            )
        if end in used:
            raise SpliceError("DUPLICATE_LABEL", f"slot {v}.{c} used by {used[end]} and {who}")
        used[end] = who

    for e in d.edges.values():
        if e.ends[0][0] == e.ends[1][0]:
            raise SpliceError("CYCLE", f"edge {e.id} is a loop")
        for end in e.ends:
            claim(end, f"edge {e.id}")
    for name, end in d.externals.items():
        claim(end, f"external {name}")
    for v in d.vertices.values():
        for c in v.label.components:
            if (v.id, c) not in used:
                raise SpliceError("DANGLING_COMPONENT", f"component {c!r} of {v.id!r} is unused")
    parent = {v: v for v in d.vertices}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in sorted(d.edges.values(), key=lambda e: e.id):
        a, b = find(e.ends[0][0]), find(e.ends[1][0])
        if a == b:
            raise SpliceError("CYCLE", f"edge {e.id} closes a cycle")
        parent[a] = b


def single_vertex(label: LinkLabel, names: Mapping[str, str] | None = None, vid: str = "v") -> SpliceDiagram:
    """One-vertex diagram; ``names`` maps components to external names (default: same)."""
    names = dict(names or {c: c for c in label.components})
    return build([Vertex(vid, label)], [], {n: (vid, c) for c, n in names.items()})


def _components(d: SpliceDiagram, subset: set[str]) -> list[frozenset[str]]:
    seen: set[str] = set()
    out: list[frozenset[str]] = []
    for start in sorted(subset):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for e in d.incident(v):
                w = e.other(v)[0]
                if w in subset and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def split_sides(
    d: SpliceDiagram, edge_id: str, within: Iterable[str] | None = None
) -> tuple[frozenset[str], frozenset[str]]:
    """Vertex sets on the ``ends[0]`` and ``ends[1]`` sides of an edge."""
    e = d.edges[edge_id]
    pool = set(d.vertices if within is None else within)

    def reach(start: str) -> frozenset[str]:
        side = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for f in d.incident(v):
                if f.id == edge_id:
                    continue
                w = f.other(v)[0]
                if w in pool and w not in side:
                    side.add(w)
                    stack.append(w)
        return frozenset(side)

    return reach(e.ends[0][0]), reach(e.ends[1][0])


# ---------------------------------------------------------------------------
# companions and Brunnian algebra


def boundary_names(d: SpliceDiagram, subset: frozenset[str]) -> dict[str, End]:
    """Index set of the companion on ``subset``: externals inside plus boundary edges."""
    names = {n: end for n, end in d.externals.items() if end[0] in subset}
    for e in d.edges.values():
        inside = [end for end in e.ends if end[0] in subset]
        if len(inside) == 1:
            names[e.id] = inside[0]
    return names


def companion(d: SpliceDiagram, subset: Iterable[str]) -> SpliceDiagram:
    """Sub-diagram on ``subset`` with boundary edges promoted to externals (named by edge id)."""
    s = frozenset(subset)
    if not s or not s <= set(d.vertices):
        raise SpliceError("BAD_SUBGRAPH", "subset must be a nonempty set of vertices")
    if len(_components(d, set(s))) != 1:
        raise SpliceError("DISCONNECTED", "companion needs a connected subgraph")
    edges = {k: e for k, e in d.edges.items() if e.ends[0][0] in s and e.ends[1][0] in s}
    return SpliceDiagram({v: d.vertices[v] for v in s}, edges, boundary_names(d, s))


class _BrunnianOracle:
    """Membership oracle for the strong Brunnian set of companions of ``d``."""

    def __init__(self, d: SpliceDiagram, db: AtomDatabase | None) -> None:
        self.d = d
        self.db = db
        self.memo: dict[tuple[frozenset[str], frozenset[str]], bool] = {}
        self.labels: dict[str, BrunnianSet] = {}

    def vertex_set(self, v: str) -> BrunnianSet:
        if v not in self.labels:
            self.labels[v] = strong_brunnian(self.d.label(v), self.db)
        return self.labels[v]

    def member(self, s: frozenset[str], b: frozenset[str], force: str | None = None) -> bool:
        if not b:
            return True
        key = (s, b)
        if force is None and key in self.memo:
            return self.memo[key]
        d = self.d
        parts = _components(d, set(s))
        if len(parts) > 1:
            res = True
            for part in parts:
                names = boundary_names(d, part)
                sub_b = frozenset(x for x in b if x in names)
                res = res and self.member(part, sub_b, force if force and _edge_in(d, force, part) else None)
        elif len(s) == 1:
            (v,) = s
            names = boundary_names(d, s)
            res = frozenset(names[x][1] for x in b) in self.vertex_set(v)
        else:
            eid = force or min(k for k, e in d.edges.items() if e.ends[0][0] in s and e.ends[1][0] in s)
            s1, s2 = split_sides(d, eid, s)
            n1, n2 = boundary_names(d, s1), boundary_names(d, s2)
            b1 = frozenset(x for x in b if x in n1)
            b2 = frozenset(x for x in b if x in n2)
            e = frozenset({eid})
            res = (self.member(s1, b1 | e) and self.member(s2, b2)) or (
                self.member(s1, b1) and self.member(s2, b2 | e)
            )
        if force is None:
            self.memo[key] = res
        return res


def _edge_in(d: SpliceDiagram, eid: str, part: frozenset[str]) -> bool:
    return d.edges[eid].ends[0][0] in part


def global_brunnian(
    d: SpliceDiagram, db: AtomDatabase | None = None, split_edge: str | None = None
) -> BrunnianSet:
    """Strong Brunnian set over the external names, by recursive edge splitting.

    ``split_edge`` forces the first split, which lets callers compare choices.
    """
    oracle = _BrunnianOracle(d, db)
    names = sorted(d.externals)
    allv = frozenset(d.vertices)
    members = []
    for r in range(1, len(names) + 1):
        for combo in combinations(names, r):
            if oracle.member(allv, frozenset(combo), split_edge):
                members.append(combo)
    return BrunnianSet.of(names, members)


def is_unlink_subset(d: SpliceDiagram, names: Iterable[str], db: AtomDatabase | None = None) -> bool:
    return _BrunnianOracle(d, db).member(frozenset(d.vertices), frozenset(names))


def derive_orientations(
    d: SpliceDiagram, db: AtomDatabase | None = None, check_stored: bool = True
) -> SpliceDiagram:
    """Recompute every edge orientation from the Brunnian sets of the two sides.

    Stored orientations are treated as a cache: a disagreement raises
    ``ORIENTATION_MISMATCH`` unless ``check_stored`` is false.
    """
    oracle = _BrunnianOracle(d, db)
    orients: dict[str, str] = {}
    for eid in sorted(d.edges):
        s1, s2 = split_sides(d, eid)
        e = frozenset({eid})
        u1, u2 = oracle.member(s1, e), oracle.member(s2, e)
        if u1 and u2:
            o = "none"
        elif u2:
            o = "to1"
        elif u1:
            o = "to0"
        else:
            raise SpliceError("NOT_REALIZABLE", f"edge {eid}: neither side is unknotted at the edge")
        stored = d.edges[eid].orient
        if check_stored and stored is not None and stored != o:
            raise SpliceError("ORIENTATION_MISMATCH", f"edge {eid}: stored {stored}, derived {o}")
        orients[eid] = o
    return d.with_orientations(orients)


@dataclass
class ValidityReport:
    per_vertex: dict[str, bool]
    violations: list[tuple[str, int, frozenset[str]]]

    @property
    def valid(self) -> bool:
        return not self.violations


def edge_classes(d: SpliceDiagram, v: str) -> tuple[set[str], set[str], set[str]]:
    """(in, out, unoriented) components of ``v`` consumed by edges."""
    a1: set[str] = set()
    a2: set[str] = set()
    a3: set[str] = set()
    for e in d.incident(v):
        c = e.ends[e.side_of(v)][1]
        tgt = e.points_at()
        if e.orient == "none":
            a3.add(c)
        elif tgt == v:
            a1.add(c)
        elif tgt is not None:
            a2.add(c)
    return a1, a2, a3


def validate_local_brunnian(d: SpliceDiagram, db: AtomDatabase | None = None) -> ValidityReport:
    if any(e.orient is None for e in d.edges.values()):
        d = derive_orientations(d, db)
    per: dict[str, bool] = {}
    bad: list[tuple[str, int, frozenset[str]]] = []
    for v in sorted(d.vertices):
        ub = strong_brunnian(d.label(v), db)
        a1, a2, a3 = edge_classes(d, v)
        ok = True
        if frozenset(a1) not in ub:
            bad.append((v, 1, frozenset(a1)))
            ok = False
        for a in sorted(a2):
            if frozenset(a1 | {a}) in ub:
                bad.append((v, 2, frozenset(a1 | {a})))
                ok = False
        for a in sorted(a3):
            if frozenset(a1 | {a}) not in ub:
                bad.append((v, 3, frozenset(a1 | {a})))
                ok = False
        per[v] = ok
    return ValidityReport(per, bad)


# ---------------------------------------------------------------------------
# splitting and deletion


def split_at(d: SpliceDiagram, v: str) -> SpliceDiagram:
    """Replace a split vertex (an unlink of 2 or more components) by one vertex per component."""
    lab = d.label(v)
    if not isinstance(lab, Unlink) or lab.n < 2:
        raise SpliceError("NOT_SPLIT", f"vertex {v} ({lab}) is not split")
    verts = {k: x for k, x in d.vertices.items() if k != v}
    home = {}
    for i, c in enumerate(lab.components):
        nid = f"{v}.{i}"
        while nid in verts or nid in d.vertices:
            nid += "'"
        verts[nid] = Vertex(nid, Unlink(1), frozenset({"0"}) if c in d.vertices[v].flips else frozenset())
        home[(v, c)] = (nid, "0")
    return _rehome(d, verts, home)


def _rehome(d: SpliceDiagram, verts: dict[str, Vertex], home: Mapping[End, End]) -> SpliceDiagram:
    edges = {
        k: Edge(e.id, (home.get(e.ends[0], e.ends[0]), home.get(e.ends[1], e.ends[1])), e.orient)
        for k, e in d.edges.items()
    }
    exts = {n: home.get(end, end) for n, end in d.externals.items()}
    return SpliceDiagram(verts, edges, exts)


@dataclass(frozen=True)
class SublinkLabel:
    """Result of removing one component from a label."""

    label: LinkLabel | None
    cmap: dict[str, str]
    flips: frozenset[str] = frozenset()


def label_minus(label: LinkLabel, c: str) -> SublinkLabel:
    """Sublink label obtained by forgetting component ``c`` (not for atoms)."""
    from splicegraph.links import KEYRING, STAR1, STAR2, fiber, is_fiber, key

    comps = label.components
    if c not in comps:
        raise SpliceError("UNKNOWN_COMPONENT", f"{c!r} is not a component of {label}")
    rest = [x for x in comps if x != c]
    if not rest:
        return SublinkLabel(None, {})
    if isinstance(label, SeifertLink):
        if c in (STAR1, STAR2):
            return SublinkLabel(SeifertLink(label.p, label.q, label.X - {c}), {x: x for x in rest})
        g = label.gcd
        fibres = [x for x in rest if is_fiber(x)]
        cmap = {x: fiber(i) for i, x in enumerate(fibres)}
        if g >= 2:
            pp, qq = label.p // g, label.q // g
            cmap.update({s: s for s in label.X})
            return SublinkLabel(SeifertLink(label.p - pp, label.q - qq, label.X), cmap)
        # the only regular fibre is removed: the singular fibres remain
        if label.X == {STAR1, STAR2}:
            return SublinkLabel(SeifertLink(2, 2), {STAR1: fiber(0), STAR2: fiber(1)})
        (s,) = tuple(label.X)
        return SublinkLabel(SeifertLink(1, 1), {s: fiber(0)})
    if isinstance(label, KeyChain):
        if c == KEYRING:
            return SublinkLabel(Unlink(label.p), {key(i): str(i) for i in range(label.p)})
        i = int(c[4:-1])
        neg = label.neg - (1 if i < label.neg else 0)
        keys = [x for x in rest if x != KEYRING]
        cmap = {x: key(j) for j, x in enumerate(keys)}
        cmap[KEYRING] = KEYRING
        return SublinkLabel(KeyChain(label.p - 1, neg), cmap)
    if isinstance(label, Unlink):
        return SublinkLabel(Unlink(label.n - 1), {x: str(j) for j, x in enumerate(rest)})
    raise SpliceError("NO_SUBLINK_RECORD", f"use the atom database to delete from {label}")


def remove_component(
    d: SpliceDiagram, v: str, c: str, db: AtomDatabase | None = None
) -> SpliceDiagram:
    """Forget component ``c`` of vertex ``v``; its slot must already be detached."""
    vert = d.vertices[v]
    lab = vert.label
    verts = {k: x for k, x in d.vertices.items() if k != v}
    if isinstance(lab, AtomRef):
        return _graft_atom_sublink(d, v, c, db)
    sub = label_minus(lab, c)
    if sub.label is None:
        return SpliceDiagram(verts, dict(d.edges), dict(d.externals))
    flips = frozenset(sub.cmap[x] for x in vert.flips if x in sub.cmap) ^ sub.flips
    verts[v] = Vertex(v, sub.label, flips)
    home = {(v, old): (v, new) for old, new in sub.cmap.items()}
    return _rehome(d, verts, home)


def _graft_atom_sublink(d: SpliceDiagram, v: str, c: str, db: AtomDatabase | None) -> SpliceDiagram:
    from splicegraph.atomdb import default_db
    from splicegraph.dsl import evaluate_text

    db = db or default_db()
    lab = d.label(v)
    assert isinstance(lab, AtomRef)
    rest = [x for x in lab.components if x != c]
    if not rest:
        verts = {k: x for k, x in d.vertices.items() if k != v}
        return SpliceDiagram(verts, dict(d.edges), dict(d.externals))
    expr = db.resolve_sublink(lab.name, rest)
    sub = evaluate_text(expr, db)
    if sorted(sub.externals) == sorted(rest):
        names = {x: x for x in rest}
    elif len(sub.externals) == len(rest):
        names = dict(zip(sorted(rest), sorted(sub.externals)))
    else:
        raise SpliceError(
            "NO_SUBLINK_RECORD", f"sublink of {lab.name} on {rest} has externals {sorted(sub.externals)}"
        )
    prefix = f"{v}/"
    verts = {k: x for k, x in d.vertices.items() if k != v}
    for k, x in sub.vertices.items():
        verts[prefix + k] = Vertex(prefix + k, x.label, x.flips)
    edges = dict(d.edges)
    for k, e in sub.edges.items():
        edges[prefix + k] = Edge(
            prefix + k, ((prefix + e.ends[0][0], e.ends[0][1]), (prefix + e.ends[1][0], e.ends[1][1])), None
        )
    home = {(v, x): (prefix + sub.externals[names[x]][0], sub.externals[names[x]][1]) for x in rest}
    out = _rehome(SpliceDiagram(verts, edges, dict(d.externals)), verts, home)
    return out


def delete_component(d: SpliceDiagram, a: str, db: AtomDatabase | None = None) -> SpliceDiagram:
    """Forget the external component ``a``; the result is generally not reduced."""
    if a not in d.externals:
        raise SpliceError("UNKNOWN_EXTERNAL", f"{a!r} is not an external label")
    v, c = d.externals[a]
    exts = {k: x for k, x in d.externals.items() if k != a}
    d2 = SpliceDiagram(dict(d.vertices), dict(d.edges), exts)
    return remove_component(d2, v, c, db)


# ---------------------------------------------------------------------------
# canonical forms


def canonicalize_labels(d: SpliceDiagram) -> SpliceDiagram:
    verts: dict[str, Vertex] = {}
    home: dict[End, End] = {}
    for v, x in d.vertices.items():
        canon = canonical_label(x.label)
        flips = frozenset(canon.cmap[c] for c in x.flips) ^ frozenset(canon.cmap[c] for c in canon.flip)
        verts[v] = Vertex(v, canon.label, flips)
        home.update({(v, old): (v, new) for old, new in canon.cmap.items()})
    return _rehome(d, verts, home)


def _centroids(d: SpliceDiagram, comp: frozenset[str]) -> list[str]:
    n = len(comp)
    best: list[str] = []
    best_w = n + 1
    for v in sorted(comp):
        worst = 0
        for e in d.incident(v):
            s1, s2 = split_sides(d, e.id, comp)
            worst = max(worst, len(s2) if v in s1 else len(s1))
        if worst < best_w:
            best, best_w = [v], worst
        elif worst == best_w:
            best.append(v)
    return best


def _esc(name: str) -> str:
    return json.dumps(name, ensure_ascii=False)


class _Encoder:
    def __init__(self, d: SpliceDiagram, db: AtomDatabase | None) -> None:
        self.d = d
        self.db = db

    def group(self, lab: AtomRef) -> list[tuple[int, ...]]:
        from splicegraph.atomdb import default_db

        return (self.db or default_db()).lookup(lab.name).permutation_group()

    def att(self, v: str, c: str, parent: str | None) -> str:
        if c == parent:
            return "^"
        vert = self.d.vertices[v]
        for e in self.d.incident(v):
            if (v, c) in e.ends:
                w, cw = e.other(v)
                tgt = e.points_at()
                o = "-" if e.orient == "none" else "?" if tgt is None else ("<" if tgt == v else ">")
                s = "+" if vert.sign(c) * self.d.vertices[w].sign(cw) > 0 else "-"
                return f"e{o}{s}" + self.enc(w, cw)
        for name, end in self.d.externals.items():
            if end == (v, c):
                return "x" + _esc(name)
        raise SpliceError("DANGLING_COMPONENT", f"{v}.{c}")

    def enc(self, v: str, parent: str | None) -> str:
        lab = self.d.label(v)
        if isinstance(lab, AtomRef):
            comps = lab.components
            atts = [self.att(v, c, parent) for c in comps]
            body = min("|".join(atts[p[i]] for i in range(len(comps))) for p in self.group(lab))
            return f"{lab}({body})"
        parts = []
        for cls in label_symmetry_classes(lab):
            parts.append("{" + "|".join(sorted(self.att(v, c, parent) for c in cls)) + "}")
        return f"{lab}(" + ",".join(parts) + ")"


def canonical_text(d: SpliceDiagram, db: AtomDatabase | None = None) -> str:
    d = canonicalize_labels(d)
    enc = _Encoder(d, db)
    trees = []
    for comp in d.connected_components():
        trees.append(min(enc.enc(r, None) for r in _centroids(d, comp)))
    return " + ".join(sorted(trees)) if trees else "EMPTY"


def canonical_form(d: SpliceDiagram, db: AtomDatabase | None = None) -> bytes:
    """Byte string that agrees for two diagrams exactly when they are equivalent."""
    return canonical_text(d, db).encode("utf-8")


def equivalent(d1: SpliceDiagram, d2: SpliceDiagram, db: AtomDatabase | None = None) -> bool:
    return canonical_form(d1, db) == canonical_form(d2, db)


# ---------------------------------------------------------------------------
# JSON and DOT

_LABEL_RE = re.compile(
    r"^(?:S\((?P<sp>-?\d+),(?P<sq>-?\d+)\|(?P<sx>[*12,]*)\)"
    r"|H\((?P<hp>\d+)(?:;neg=(?P<hn>\d+))?\)"
    r"|U\((?P<un>\d+)\)"
    r"|atom\((?P<an>.+)\))$"
)


def label_to_text(label: LinkLabel) -> str:
    return str(label)


def label_from_text(text: str, db: AtomDatabase | None = None) -> LinkLabel:
    from splicegraph.links import STAR1, STAR2, atom_ref

    m = _LABEL_RE.match(text.replace(" ", ""))
    if not m:
        raise SpliceError("BAD_LABEL", f"cannot parse label {text!r}")
    if m["sp"] is not None:
        flags = {f for f in m["sx"].split(",") if f}
        if not flags <= {"*1", "*2"}:
            raise SpliceError("BAD_LABEL", f"bad flags in {text!r}")
        X = frozenset(STAR1 if f == "*1" else STAR2 for f in flags)
        return SeifertLink(int(m["sp"]), int(m["sq"]), X)
    if m["hp"] is not None:
        return KeyChain(int(m["hp"]), int(m["hn"] or 0))
    if m["un"] is not None:
        return Unlink(int(m["un"]))
    return atom_ref(m["an"], db)


def to_json(d: SpliceDiagram) -> dict[str, Any]:
    verts = []
    for v in sorted(d.vertices):
        x = d.vertices[v]
        item: dict[str, Any] = {"id": v, "label": label_to_text(x.label)}
        if x.flips:
            item["signs"] = {c: -1 for c in sorted(x.flips)}
        verts.append(item)
    edges = [
        {"id": e.id, "ends": [list(e.ends[0]), list(e.ends[1])], "orient": e.orient}
        for e in sorted(d.edges.values(), key=lambda e: e.id)
    ]
    exts = {n: list(d.externals[n]) for n in sorted(d.externals)}
    return {"vertices": verts, "edges": edges, "externals": exts}


def dumps(d: SpliceDiagram) -> str:
    return json.dumps(to_json(d), indent=2, ensure_ascii=False) + "\n"


def from_json(data: Mapping[str, Any] | str, db: AtomDatabase | None = None) -> SpliceDiagram:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        verts = [
            Vertex(
                str(v["id"]),
                label_from_text(v["label"], db),
                frozenset(c for c, s in (v.get("signs") or {}).items() if s == -1),
            )
            for v in data["vertices"]
        ]
        edges = [
            Edge(str(e["id"]), (tuple(e["ends"][0]), tuple(e["ends"][1])), e.get("orient"))
            for e in data.get("edges", [])
        ]
        exts = {str(k): tuple(v) for k, v in data.get("externals", {}).items()}
    except (KeyError, TypeError, IndexError) as exc:
        raise SpliceError("BAD_JSON", f"malformed diagram: {exc}") from None
    return build(verts, edges, exts)  # type: ignore[arg-type]


def to_dot(d: SpliceDiagram) -> str:
    lines = ["digraph splice {", "  node [shape=box];"]
    for v in sorted(d.vertices):
        lines.append(f"  {_esc(v)} [label={_esc(label_to_text(d.label(v)))}];")
    for e in sorted(d.edges.values(), key=lambda e: e.id):
        (a, ca), (b, cb) = e.ends
        if e.orient == "to0":
            a, b, ca, cb = b, a, cb, ca
        attrs = [f"label={_esc(e.id)}", f"taillabel={_esc(ca)}", f"headlabel={_esc(cb)}"]
        if e.orient in ("none", None):
            attrs.append("dir=none")
        lines.append(f"  {_esc(a)} -> {_esc(b)} [{', '.join(attrs)}];")
    for n in sorted(d.externals):
        v, c = d.externals[n]
        node = _esc("ext:" + n)
        lines.append(f"  {node} [shape=plaintext, label={_esc(n)}];")
        lines.append(f"  {_esc(v)} -> {node} [dir=none, style=dashed, taillabel={_esc(c)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
