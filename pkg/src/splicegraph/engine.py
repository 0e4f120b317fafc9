"""Splicing, the exceptional-splice rewrite system and knot companionship trees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

from splicegraph.diagram import (
    Edge,
    SpliceDiagram,
    Vertex,
    canonical_text,
    canonicalize_labels,
    check,
    derive_orientations,
    is_unlink_subset,
    remove_component,
    single_vertex,
    split_at,
)
from splicegraph.errors import SpliceError
from splicegraph.links import (
    HOPF,
    KEYRING,
    STAR1,
    STAR2,
    UNKNOT,
    AtomRef,
    KeyChain,
    LinkLabel,
    SeifertLink,
    Unlink,
    atom_ref,
    fiber,
    fibre_slope,
    is_fiber,
    is_key,
    key,
    seifert_orbit,
    strong_brunnian,
)

if TYPE_CHECKING:
    from splicegraph.atomdb import AtomDatabase

KNOT = "*"


# ---------------------------------------------------------------------------
# splicing


def _fresh(name: str, taken: set[str]) -> str:
    while name in taken:
        name += "'"
    return name


def _fresh_edge_id(taken: set[str]) -> str:
    i = 0
    while f"e{i}" in taken:
        i += 1
    return f"e{i}"


def juxtapose(
    d1: SpliceDiagram, a1: str, d2: SpliceDiagram, a2: str
) -> tuple[SpliceDiagram, str]:
    """Join slot ``a1`` of ``d1`` to slot ``a2`` of ``d2`` by a new unoriented edge.

    Clashing ids on the right are primed.  Returns the diagram and the new edge id.
    """
    for d, a in ((d1, a1), (d2, a2)):
        if a not in d.externals:
            raise SpliceError("UNKNOWN_EXTERNAL", f"{a!r} is not an external label")
    vtaken = set(d1.vertices)
    vren: dict[str, str] = {}
    for v in sorted(d2.vertices):
        vren[v] = _fresh(v, vtaken)
        vtaken.add(vren[v])
    names = set(d1.edges) | set(d1.externals)
    eren: dict[str, str] = {}
    for e in sorted(d2.edges):
        eren[e] = _fresh(e, names)
        names.add(eren[e])
    xren: dict[str, str] = {}
    for x in sorted(d2.externals):
        if x == a2:
            continue
        xren[x] = _fresh(x, names - {a1})
        names.add(xren[x])
    verts = dict(d1.vertices)
    for v, vert in d2.vertices.items():
        verts[vren[v]] = Vertex(vren[v], vert.label, vert.flips)
    edges = dict(d1.edges)
    for e, edge in d2.edges.items():
        (u, cu), (w, cw) = edge.ends
        edges[eren[e]] = Edge(eren[e], ((vren[u], cu), (vren[w], cw)), edge.orient)
    exts = {x: end for x, end in d1.externals.items() if x != a1}
    for x, (v, c) in d2.externals.items():
        if x != a2:
            exts[xren[x]] = (vren[v], c)
    new_id = _fresh_edge_id(names | set(edges))
    v2, c2 = d2.externals[a2]
    edges[new_id] = Edge(new_id, (d1.externals[a1], (vren[v2], c2)), None)
    out = SpliceDiagram(verts, edges, exts)
    check(out)
    return out, new_id


def splice(
    d1: SpliceDiagram, a1: str, d2: SpliceDiagram, a2: str, db: AtomDatabase | None = None
) -> SpliceDiagram:
    """Splice along ``a1`` and ``a2`` and reduce to a companionship diagram."""
    if a1 not in d1.externals or a2 not in d2.externals:
        raise SpliceError("UNKNOWN_EXTERNAL", f"cannot splice along {a1!r} and {a2!r}")
    if not (is_unlink_subset(d1, [a1], db) or is_unlink_subset(d2, [a2], db)):
        raise SpliceError(
            "PRECONDITION_BRUNNIAN", f"neither {a1!r} nor {a2!r} is an unknotted component"
        )
    joined, _ = juxtapose(d1, a1, d2, a2)
    return reduce(joined, db)


# ---------------------------------------------------------------------------
# rewriting


@dataclass(frozen=True, order=True)
class Rewrite:
    """One applicable elementary reduction.

    ``kind`` is ``split``, ``unknot`` (rule 5), ``hopf`` (rule 4),
    ``keychain`` (rule 3) or ``seifert`` (rules 1 and 2); ``target`` is a
    vertex id for the first three and an edge id for the last two.
    """

    priority: tuple = field(compare=True)
    kind: str = field(compare=False)
    target: str = field(compare=False)


_KIND_ORDER = {"split": 0, "unknot": 1, "hopf": 2, "keychain": 3, "seifert": 4}


def _is_unknot(lab: LinkLabel) -> bool:
    return lab == UNKNOT


def _is_hopf(lab: LinkLabel) -> bool:
    return lab == HOPF


def _reciprocal(d: SpliceDiagram, e: Edge) -> bool:
    (u, cu), (v, cv) = e.ends
    lu, lv = d.label(u), d.label(v)
    if not (isinstance(lu, (SeifertLink, KeyChain)) and isinstance(lv, (SeifertLink, KeyChain))):
        return False
    if _is_unknot(lu) or _is_unknot(lv) or _is_hopf(lu) or _is_hopf(lv):
        return False
    return fibre_slope(lu, cu).reciprocal_of(fibre_slope(lv, cv))


def applicable_rewrites(d: SpliceDiagram) -> list[Rewrite]:
    """All reductions available on ``d`` (labels must be canonical), leaf-ward first."""
    out: list[Rewrite] = []

    def add(kind: str, target: str, touched: Iterable[str]) -> None:
        inner = min(len(d.incident(v)) for v in touched) > 1
        out.append(Rewrite((inner, _KIND_ORDER[kind], target), kind, target))

    for v in sorted(d.vertices):
        lab = d.label(v)
        if isinstance(lab, Unlink) and lab.n >= 2:
            add("split", v, [v])
        elif _is_unknot(lab) and d.incident(v):
            add("unknot", v, [v])
        elif _is_hopf(lab) and d.incident(v):
            add("hopf", v, [v])
    for eid in sorted(d.edges):
        e = d.edges[eid]
        ends = [x[0] for x in e.ends]
        if not _reciprocal(d, e):
            continue
        labs = [d.label(x) for x in ends]
        if all(isinstance(x, KeyChain) for x in labs):
            add("keychain", eid, ends)
        elif all(isinstance(x, SeifertLink) for x in labs):
            add("seifert", eid, ends)
    return sorted(out)


def apply_rewrite(d: SpliceDiagram, rw: Rewrite, db: AtomDatabase | None = None) -> SpliceDiagram:
    if rw.kind == "split":
        out = split_at(d, rw.target)
    elif rw.kind == "unknot":
        out = _rule_unknot(d, rw.target, db)
    elif rw.kind == "hopf":
        out = _rule_hopf(d, rw.target)
    elif rw.kind == "keychain":
        out = _rule_keychain(d, rw.target)
    elif rw.kind == "seifert":
        out = _rule_seifert(d, rw.target)
    else:
        raise SpliceError("INTERNAL", f"unknown rewrite {rw.kind}")
    return canonicalize_labels(out)


def reduce(d: SpliceDiagram, db: AtomDatabase | None = None, orient: bool = True) -> SpliceDiagram:
    """Apply elementary reductions and splittings until none is available."""
    d = canonicalize_labels(d)
    while True:
        rws = applicable_rewrites(d)
        if not rws:
            break
        d = apply_rewrite(d, rws[0], db)
    _check_no_reciprocal(d)
    check(d)
    if orient:
        d = derive_orientations(d, db, check_stored=False)
    return d


def _check_no_reciprocal(d: SpliceDiagram) -> None:
    for e in d.edges.values():
        if _reciprocal(d, e):
            raise SpliceError("INTERNAL", f"edge {e.id} still joins reciprocal fibre slopes")


def _without(d: SpliceDiagram, vertex: str, edge_ids: Iterable[str]) -> tuple[dict, dict, dict]:
    drop = set(edge_ids)
    verts = {k: x for k, x in d.vertices.items() if k != vertex}
    edges = {k: e for k, e in d.edges.items() if k not in drop}
    exts = {k: x for k, x in d.externals.items() if x[0] != vertex}
    return verts, edges, exts


def _rule_unknot(d: SpliceDiagram, u: str, db: AtomDatabase | None) -> SpliceDiagram:
    (e,) = d.incident(u)
    w, cw = e.other(u)
    verts, edges, exts = _without(d, u, [e.id])
    return remove_component(SpliceDiagram(verts, edges, exts), w, cw, db)


def _rule_hopf(d: SpliceDiagram, h: str) -> SpliceDiagram:
    e = d.incident(h)[0]
    hc = e.ends[e.side_of(h)][1]
    other = fiber(1) if hc == fiber(0) else fiber(0)
    lv, lc = e.other(h)
    hv = d.vertices[h]
    left = hv.sign(fiber(0)) * hv.sign(fiber(1)) < 0
    rest = [f for f in d.incident(h) if f.id != e.id]
    verts, edges, exts = _without(d, h, [e.id] + [f.id for f in rest])
    if left:
        lvert = verts[lv]
        verts[lv] = Vertex(lv, lvert.label, lvert.flips ^ {lc})
    if rest:
        (f,) = rest
        w_end = f.other(h)
        edges[f.id] = Edge(f.id, ((lv, lc), w_end), None)
    else:
        for name, end in d.externals.items():
            if end == (h, other):
                exts[name] = (lv, lc)
    return SpliceDiagram(verts, edges, exts)


def _rule_keychain(d: SpliceDiagram, eid: str) -> SpliceDiagram:
    e = d.edges[eid]
    (a, ca), (b, cb) = e.ends
    if ca == KEYRING:
        (a, ca), (b, cb) = (b, cb), (a, ca)
    la, lb = d.label(a), d.label(b)
    assert isinstance(la, KeyChain) and isinstance(lb, KeyChain)
    if la.neg == 0 and lb.neg == 0:
        neg = 0
    elif la.neg == la.p and lb.neg == lb.p:
        neg = la.p + lb.p - 1
    else:
        raise SpliceError(
            "UNSUPPORTED_MIXED_KEYCHAIN", f"cannot merge {la} and {lb} with mixed clasp handedness"
        )
    keys_a = [c for c in la.components if is_key(c) and c != ca]
    keys_b = [c for c in lb.components if is_key(c)]
    home: dict[tuple[str, str], tuple[str, str]] = {}
    for i, c in enumerate(keys_a):
        home[(a, c)] = (a, key(i))
    for j, c in enumerate(keys_b):
        home[(b, c)] = (a, key(len(keys_a) + j))
    home[(a, KEYRING)] = (a, KEYRING)
    flips = frozenset(home[(a, c)][1] for c in d.vertices[a].flips if (a, c) in home)
    flips |= frozenset(home[(b, c)][1] for c in d.vertices[b].flips if (b, c) in home)
    return _merge_vertices(d, e, a, b, Vertex(a, KeyChain(la.p + lb.p - 1, neg), flips), home)


def _merge_vertices(
    d: SpliceDiagram, e: Edge, keep: str, gone: str, new: Vertex, home: dict
) -> SpliceDiagram:
    verts = {k: x for k, x in d.vertices.items() if k != gone}
    verts[keep] = new
    edges = {}
    for k, f in d.edges.items():
        if k == e.id:
            continue
        edges[k] = Edge(k, (home.get(f.ends[0], f.ends[0]), home.get(f.ends[1], f.ends[1])), None)
    exts = {n: home.get(end, end) for n, end in d.externals.items()}
    return SpliceDiagram(verts, edges, exts)


def _role_maps(label: SeifertLink, orbit_map: dict[str, str], pinned: dict[str, str]) -> Iterator[dict[str, str]]:
    """Compose ``orbit_map`` with fibre permutations so that ``pinned`` holds.

    ``pinned`` sends original components to required representative components
    (or to ``"fiber"`` for any regular fibre).
    """
    fibres = [c for c in label.components if is_fiber(c)]
    images = [orbit_map[c] for c in fibres]
    for perm in _fibre_choices(fibres, images, pinned):
        m = dict(orbit_map)
        m.update(perm)
        ok = True
        for c, want in pinned.items():
            got = m[c]
            if want == "fiber":
                ok = ok and is_fiber(got)
            else:
                ok = ok and got == want
        if ok:
            yield m


def _fibre_choices(fibres: list[str], images: list[str], pinned: dict[str, str]) -> Iterator[dict[str, str]]:
    pinned_fibres = [c for c in fibres if c in pinned]
    if not pinned_fibres:
        yield {}
        return
    # choose distinct source fibres whose images play the pinned roles
    for picks in permutations(range(len(fibres)), len(pinned_fibres)):
        perm = {}
        chosen = set(picks)
        for c, i in zip(pinned_fibres, picks):
            perm[c] = images[i]
        free_src = [c for c in fibres if c not in pinned]
        free_img = [images[i] for i in range(len(fibres)) if i not in chosen]
        perm.update(zip(free_src, free_img))
        yield perm


def seifert_merge(
    lu: SeifertLink, cu: str, lv: SeifertLink, cv: str
) -> tuple[SeifertLink, dict[str, str], dict[str, str]] | None:
    """Result of exceptional splices (1)/(2) joining ``lu.cu`` to ``lv.cv``.

    Returns the merged label and component maps for the surviving components
    of each side, or ``None`` when no representative matches either rule.
    """
    orbit_u = seifert_orbit(lu)
    orbit_v = seifert_orbit(lv)
    for swap in (False, True):
        A, ca, B, cb = (lv, cv, lu, cu) if swap else (lu, cu, lv, cv)
        oa, ob = (orbit_v, orbit_u) if swap else (orbit_u, orbit_v)
        for (ra, ma0), (rb, mb0) in product(oa, ob):
            res = _try_rule1(A, ca, ra, ma0, B, cb, rb, mb0) or _try_rule2(A, ca, ra, ma0, B, cb, rb, mb0)
            if res:
                lab, mapa, mapb = res
                return (lab, mapb, mapa) if swap else (lab, mapa, mapb)
    return None


def _try_rule1(A, ca, ra, ma0, B, cb, rb, mb0):
    # S(a,b|X) at a regular fibre, S(p,q|{*1}) at *1, with q/p = a'b'
    if rb.X != {STAR1}:
        return None
    ga, gb = ra.gcd, rb.gcd
    if Fraction(rb.q, rb.p) != Fraction(ra.p * ra.q, ga * ga):
        return None
    for ma in _role_maps(A, ma0, {ca: "fiber"}):
        for mb in _role_maps(B, mb0, {cb: STAR1}):
            k = ga + gb - 1
            lab = SeifertLink(k * (ra.p // ga), k * (ra.q // ga), ra.X)
            fib_a = sorted((c for c in A.components if c != ca and is_fiber(ma[c])), key=lambda c: ma[c])
            mapa = {c: fiber(i) for i, c in enumerate(fib_a)}
            mapa.update({c: ma[c] for c in A.components if c != ca and not is_fiber(ma[c])})
            fib_b = sorted((c for c in B.components if c != cb), key=lambda c: mb[c])
            mapb = {c: fiber(ga - 1 + j) for j, c in enumerate(fib_b)}
            return lab, mapa, mapb
    return None


def _try_rule2(A, ca, ra, ma0, B, cb, rb, mb0):
    # S(p,q|X+*1) at *1, S(a,b|Z+*2) at *2, with p/q = a/b; B supplies (a,b)
    if STAR1 not in ra.X or STAR2 not in rb.X:
        return None
    if Fraction(ra.p, ra.q) != Fraction(rb.p, rb.q):
        return None
    for ma in _role_maps(A, ma0, {ca: STAR1}):
        for mb in _role_maps(B, mb0, {cb: STAR2}):
            gp, gab = ra.gcd, rb.gcd
            k = gab + gp
            X = (ra.X - {STAR1}) | (rb.X - {STAR2})
            lab = SeifertLink(k * (rb.p // gab), k * (rb.q // gab), X)
            fib_b = sorted((c for c in B.components if c != cb and is_fiber(mb[c])), key=lambda c: mb[c])
            fib_a = sorted((c for c in A.components if c != ca and is_fiber(ma[c])), key=lambda c: ma[c])
            mapb = {c: fiber(i) for i, c in enumerate(fib_b)}
            mapb.update({c: STAR1 for c in B.components if c != cb and mb[c] == STAR1})
            mapa = {c: fiber(gab + j) for j, c in enumerate(fib_a)}
            mapa.update({c: STAR2 for c in A.components if c != ca and ma[c] == STAR2})
            return lab, mapa, mapb
    return None


def _rule_seifert(d: SpliceDiagram, eid: str) -> SpliceDiagram:
    e = d.edges[eid]
    (u, cu), (v, cv) = e.ends
    lu, lv = d.label(u), d.label(v)
    assert isinstance(lu, SeifertLink) and isinstance(lv, SeifertLink)
    res = seifert_merge(lu, cu, lv, cv)
    if res is None:
        raise SpliceError("INTERNAL", f"reciprocal slopes at {eid} but no exceptional rule matches")
    lab, mu, mv = res
    home = {(u, c): (u, n) for c, n in mu.items()}
    home.update({(v, c): (u, n) for c, n in mv.items()})
    flips = frozenset(mu[c] for c in d.vertices[u].flips if c in mu)
    flips |= frozenset(mv[c] for c in d.vertices[v].flips if c in mv)
    return _merge_vertices(d, e, u, v, Vertex(u, lab, flips), home)


# ---------------------------------------------------------------------------
# knot companionship trees


@dataclass
class KnotTreeReport:
    violations: list[tuple[int, str]]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def items(self) -> set[int]:
        return {i for i, _ in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "PASS"
        return "FAIL(" + ",".join(str(i) for i in sorted(self.items)) + ")"


def _seifert_roles_ok(lab: SeifertLink, ins: list[str], out: str | None) -> bool:
    """Can ``lab`` be read as S(p,q|{*1}) with gcd 1, p not dividing q, in-comp *1, out-comp a fibre?"""
    if len(lab.components) != 2 or len(ins) != 1 or out is None:
        return False
    for rep, m0 in seifert_orbit(lab):
        if rep.X != {STAR1} or rep.gcd != 1 or rep.q % rep.p == 0:
            continue
        for _ in _role_maps(lab, m0, {ins[0]: STAR1, out: "fiber"}):
            return True
    return False


def _allowed_kind(lab: LinkLabel, db: AtomDatabase | None) -> str | None:
    if isinstance(lab, SeifertLink):
        if lab == UNKNOT:
            return "unknot"
        comps = lab.components
        if len(comps) == 1:
            g = lab.gcd
            if g == 1 and abs(lab.p) >= 2 and abs(lab.q) >= 2:
                return "torus"
            return None
        if len(comps) == 2 and any(
            r.X == {STAR1} and r.gcd == 1 and r.q % r.p != 0 for r, _ in seifert_orbit(lab)
        ):
            return "cable"
        return None
    if isinstance(lab, KeyChain):
        return "keychain" if lab.p >= 2 and lab.neg == 0 else None
    if isinstance(lab, AtomRef):
        from splicegraph.atomdb import default_db

        rec = (db or default_db()).lookup(lab.name)
        if rec.volume is None:
            return None
        ub = rec.brunnian()
        if any(frozenset(c for c in lab.components if c != b) in ub for b in lab.components):
            return "atom"
    return None


def validate_knot_tree(d: SpliceDiagram, db: AtomDatabase | None = None) -> KnotTreeReport:
    """Check the companionship-tree conditions and report the numbered items that fail."""
    bad: list[tuple[int, str]] = []
    if len(d.externals) != 1:
        return KnotTreeReport([(0, "a knot tree has exactly one external label")])
    d = canonicalize_labels(d)
    ((_, (root, root_comp)),) = d.externals.items()
    if len(d.connected_components()) != 1:
        bad.append((2, "tree is not connected"))
    for e in d.edges.values():
        if e.points_at() is None:
            bad.append((2, f"edge {e.id} is not oriented"))
    nv = len(d.vertices)
    for v in sorted(d.vertices):
        lab = d.label(v)
        kind = _allowed_kind(lab, db)
        ins: list[str] = []
        outs: list[str] = []
        for e in d.incident(v):
            c = e.ends[e.side_of(v)][1]
            tgt = e.points_at()
            if tgt == v:
                ins.append(c)
            elif tgt is not None:
                outs.append(c)
        if v == root:
            if outs:
                bad.append((2, f"root {v} has an outgoing edge"))
            out = root_comp
        else:
            if len(outs) != 1:
                bad.append((2, f"vertex {v} has {len(outs)} outgoing edges"))
            out = outs[0] if len(outs) == 1 else None
        if kind is None:
            bad.append((1, f"vertex {v} label {lab} is not an allowed companion"))
        elif kind == "unknot":
            if nv > 1:
                bad.append((4, f"unknot at {v} in a tree with {nv} vertices"))
        elif kind == "cable":
            assert isinstance(lab, SeifertLink)
            if not _seifert_roles_ok(lab, ins, out):
                bad.append((2, f"vertex {v}: edges do not match the Seifert roles"))
        elif kind == "keychain":
            if out != KEYRING:
                bad.append((2, f"vertex {v}: the keyring must be the distinguished component"))
        elif kind == "atom":
            ub = strong_brunnian(lab, db)
            if out is None or frozenset(c for c in lab.components if c != out) not in ub:
                bad.append((2, f"vertex {v}: non-distinguished components are not an unlink"))
        if isinstance(lab, KeyChain):
            for e in d.incident(v):
                w = e.other(v)[0]
                if e.points_at() == v and isinstance(d.label(w), KeyChain):
                    bad.append((3, f"key-chain {v} has key-chain child {w}"))
    return KnotTreeReport(bad)


# ---------------------------------------------------------------------------
# constructors


def unknot() -> SpliceDiagram:
    return single_vertex(UNKNOT, {fiber(0): KNOT})


def torus_knot(p: int, q: int) -> SpliceDiagram:
    if p == 0 or q == 0 or math.gcd(p, q) != 1:
        raise SpliceError("INVALID_PARAM", f"T({p},{q}) is not a knot")
    return reduce(single_vertex(SeifertLink(p, q), {fiber(0): KNOT}))


def atom_knot(name: str, distinguished: str, db: AtomDatabase | None = None) -> SpliceDiagram:
    lab = atom_ref(name, db)
    return single_vertex(lab, {c: (KNOT if c == distinguished else c) for c in lab.components})


def connected_sum(*trees: SpliceDiagram, db: AtomDatabase | None = None) -> SpliceDiagram:
    if not trees:
        raise SpliceError("INVALID_PARAM", "connected sum needs at least one operand")
    if len(trees) == 1:
        return trees[0]
    n = len(trees)
    names = {key(i): f"#{i}" for i in range(n)}
    names[KEYRING] = KNOT
    d = single_vertex(KeyChain(n), names)
    for i, t in enumerate(trees):
        d = splice(d, f"#{i}", t, _knot_end(t), db)
    return d


def _knot_end(t: SpliceDiagram) -> str:
    if len(t.externals) != 1:
        raise SpliceError("NOT_A_KNOT", "operand must have exactly one external label")
    return next(iter(t.externals))


def cable(p: int, q: int, tree: SpliceDiagram, db: AtomDatabase | None = None) -> SpliceDiagram:
    if math.gcd(p, q) != 1 or abs(p) < 2:
        raise SpliceError("INVALID_PARAM", f"cable parameters ({p},{q}) need gcd 1 and p not dividing q")
    root = single_vertex(SeifertLink(p, q, frozenset({STAR1})), {fiber(0): KNOT, STAR1: "#c"})
    return splice(root, "#c", tree, _knot_end(tree), db)


def whitehead_double(tree: SpliceDiagram, db: AtomDatabase | None = None) -> SpliceDiagram:
    lab = atom_ref("W", db)
    root = single_vertex(lab, {"0": KNOT, "1": "#w"})
    return splice(root, "#w", tree, _knot_end(tree), db)


# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class _Template:
    label: LinkLabel
    out: str
    ins: tuple[str, ...]


def _templates(bound: int, atoms: Sequence[str], keychains: bool, max_children: int, db) -> list[_Template]:
    out: list[_Template] = []
    seen: set[SeifertLink] = set()
    for p in range(2, bound + 1):
        for q in range(-bound, bound + 1):
            if q == 0 or math.gcd(p, q) != 1:
                continue
            lab = SeifertLink(p, q, frozenset({STAR1}))
            if lab not in seen:
                seen.add(lab)
                out.append(_Template(lab, fiber(0), (STAR1,)))
    if keychains:
        for n in range(2, max_children + 1):
            kc = KeyChain(n)
            out.append(_Template(kc, KEYRING, kc.components[:-1]))
    for name in atoms:
        rec = db.lookup(name)
        if rec.volume is None or len(rec.components) < 2:
            continue
        b = rec.is_KGL_for
        if b is None:
            continue
        ins = tuple(c for c in rec.components if c != b)
        if len(ins) <= max_children:
            out.append(_Template(AtomRef(rec.name, rec.components), b, ins))
    return out


def _leaves(bound: int, atoms: Sequence[str], db) -> list[SpliceDiagram]:
    out = []
    for p in range(2, bound + 1):
        for q in range(-bound, bound + 1):
            if abs(q) >= 2 and math.gcd(p, q) == 1:
                out.append(single_vertex(SeifertLink(p, q), {fiber(0): KNOT}))
    for name in atoms:
        rec = db.lookup(name)
        if len(rec.components) == 1 and rec.volume is not None:
            out.append(single_vertex(AtomRef(rec.name, rec.components), {rec.components[0]: KNOT}))
    return out


def _graft(t: _Template, children: Sequence[SpliceDiagram]) -> SpliceDiagram:
    verts = {"r": Vertex("r", t.label)}
    edges: dict[str, Edge] = {}
    for i, (slot, child) in enumerate(zip(t.ins, children)):
        pre = f"{i}."
        for v, x in child.vertices.items():
            verts[pre + v] = Vertex(pre + v, x.label, x.flips)
        for k, e in child.edges.items():
            (a, ca), (b, cb) = e.ends
            edges[pre + k] = Edge(pre + k, ((pre + a, ca), (pre + b, cb)), e.orient)
        (cv, cc) = next(iter(child.externals.values()))
        edges[f"{i}"] = Edge(f"{i}", ((pre + cv, cc), ("r", slot)), "to1")
    return SpliceDiagram(verts, edges, {KNOT: ("r", t.out)})


def _root_kind(t: SpliceDiagram) -> LinkLabel:
    ((v, _),) = t.externals.values()
    return t.label(v)


def _slope_clash(t: _Template, slot: str, child: SpliceDiagram) -> bool:
    ((v, c),) = child.externals.values()
    lc = child.label(v)
    if not isinstance(t.label, (SeifertLink, KeyChain)) or not isinstance(lc, (SeifertLink, KeyChain)):
        return False
    return fibre_slope(t.label, slot).reciprocal_of(fibre_slope(lc, c))


def enumerate_knot_trees(
    max_vertices: int,
    parameter_bound: int,
    atoms: Sequence[str] | None = None,
    keychains: bool = True,
    db: AtomDatabase | None = None,
) -> Iterator[SpliceDiagram]:
    """Knot companionship trees up to the given size, deduplicated, in canonical order."""
    from splicegraph.atomdb import default_db

    db = db or default_db()
    atoms = list(db.names() if atoms is None else atoms)
    by_size: dict[int, list[SpliceDiagram]] = {1: _leaves(parameter_bound, atoms, db)}
    templates = _templates(parameter_bound, atoms, keychains, max(0, max_vertices - 1), db)
    for size in range(2, max_vertices + 1):
        found: list[SpliceDiagram] = []
        for t in templates:
            k = len(t.ins)
            for split in _compositions(size - 1, k):
                pools = [by_size.get(s, []) for s in split]
                for kids in product(*pools):
                    if isinstance(t.label, KeyChain) and any(
                        isinstance(_root_kind(c), KeyChain) for c in kids
                    ):
                        continue
                    if any(_slope_clash(t, s, c) for s, c in zip(t.ins, kids)):
                        continue
                    found.append(_graft(t, kids))
        by_size[size] = found
    results = {canonical_text(unknot(), db): unknot()}
    for size in range(1, max_vertices + 1):
        for tree in by_size.get(size, []):
            results.setdefault(canonical_text(tree, db), tree)
    for text in sorted(results):
        yield results[text]


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
