"""Invariants of knot trees and diagrams: Alexander polynomial and Gromov norm."""

from __future__ import annotations

import math
from decimal import Decimal
from typing import TYPE_CHECKING

from splicegraph.diagram import SpliceDiagram, canonicalize_labels
from splicegraph.errors import SpliceError
from splicegraph.laurent import LaurentPoly
from splicegraph.links import AtomRef, KeyChain, SeifertLink, Unlink, is_fiber, linking_number

if TYPE_CHECKING:
    from splicegraph.atomdb import AtomDatabase


def torus_knot_alexander(p: int, q: int) -> LaurentPoly:
    """Normalised (t^pq - 1)(t - 1) / ((t^p - 1)(t^q - 1)), by exact division."""
    if p == 0 or q == 0 or math.gcd(p, q) != 1:
        raise SpliceError("INVALID_PARAM", f"T({p},{q}) is not a knot")
    p, q = abs(p), abs(q)
    if p == 1 or q == 1:
        return LaurentPoly.one()

    def t_minus_1(k: int) -> LaurentPoly:
        return LaurentPoly({k: 1, 0: -1})

    num = t_minus_1(p * q) * t_minus_1(1)
    return num.exact_div(t_minus_1(p) * t_minus_1(q)).normalized()


def _db(db: AtomDatabase | None) -> AtomDatabase:
    from splicegraph.atomdb import default_db

    return db or default_db()


def component_alexander(label, c: str, db: AtomDatabase | None = None) -> LaurentPoly:
    """Alexander polynomial of component ``c`` of ``label`` viewed as a knot."""
    if isinstance(label, SeifertLink):
        if not is_fiber(c):
            return LaurentPoly.one()
        g = label.gcd
        return torus_knot_alexander(label.p // g, label.q // g)
    if isinstance(label, (KeyChain, Unlink)):
        return LaurentPoly.one()
    if isinstance(label, AtomRef):
        return _db(db).lookup(label.name).alexander_of(c)
    raise SpliceError("NO_ALEXANDER_DATA", f"unsupported label {label}")


def alexander(d: SpliceDiagram, db: AtomDatabase | None = None) -> LaurentPoly:
    """Alexander polynomial of a knot tree via the splice formula."""
    from splicegraph.engine import validate_knot_tree

    report = validate_knot_tree(d, db)
    if not report.ok:
        raise SpliceError("NOT_A_KNOT_TREE", f"invalid knot tree: {report}")
    d = canonicalize_labels(d)
    ((root, root_comp),) = d.externals.values()

    def poly(v: str, out: str, parent_edge: str | None) -> LaurentPoly:
        lab = d.label(v)
        result = component_alexander(lab, out, db)
        for e in d.incident(v):
            if e.id == parent_edge:
                continue
            c = e.ends[e.side_of(v)][1]
            w, cw = e.other(v)
            lk = linking_number(lab, out, c, db)
            result = result * poly(w, cw, e.id).substitute_power(lk)
        return result

    return poly(root, root_comp, None).normalized()


def gromov_norm(d: SpliceDiagram, db: AtomDatabase | None = None) -> Decimal:
    """Sum of the hyperbolic volumes of the atom vertices; Seifert pieces add 0."""
    total = Decimal(0)
    for v in sorted(d.vertices):
        lab = d.label(v)
        if isinstance(lab, AtomRef):
            vol = _db(db).lookup(lab.name).volume_decimal()
            if vol is None:
                raise SpliceError("MISSING_VOLUME", f"atom {lab.name} has no volume")
            total += vol
    return total
