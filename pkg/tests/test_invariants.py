from __future__ import annotations

from decimal import Decimal
from math import gcd

import pytest

from oracles import burau_alexander, cable_braid, fox_connected_sum, fox_figure_eight, fox_torus, is_knot_braid, torus_braid
from splicegraph import engine
from splicegraph.diagram import canonical_form, delete_component
from splicegraph.dsl import evaluate_text
from splicegraph.errors import SpliceError
from splicegraph.invariants import alexander, gromov_norm, torus_knot_alexander
from splicegraph.laurent import LaurentPoly

ST1 = (
    "splice(splice(splice(H(2).keyring, cable(2,5,T(2,-3))).key[0], "
    "rename(atom(W),0->1,1->a).comp[a]).key[1], rename(atom(W),0->2,1->b).comp[b])"
)


def coeffs(p: LaurentPoly) -> dict[int, int]:
    return p.normalized().coeffs


@pytest.mark.parametrize("p, q", [(p, q) for p in range(2, 8) for q in range(2, 10) if gcd(p, q) == 1])
def test_torus_polynomial_matches_fox(p, q):
    assert coeffs(torus_knot_alexander(p, q)) == fox_torus(p, q)
    assert torus_knot_alexander(p, q).degree_span() == (p - 1) * (q - 1)
    assert abs(torus_knot_alexander(p, q).evaluate(1)) == 1


def test_torus_polynomial_examples():
    assert str(torus_knot_alexander(2, 3)) == "1 - t + t^2"
    assert str(torus_knot_alexander(2, 5)) == "1 - t + t^2 - t^3 + t^4"
    with pytest.raises(SpliceError):
        torus_knot_alexander(2, 4)


@pytest.mark.parametrize("a, b", [((2, 3), (2, 5)), ((2, 3), (3, 4)), ((2, 5), (3, 5))])
def test_connected_sum_matches_fox_amalgam(a, b):
    d = engine.connected_sum(engine.torus_knot(*a), engine.torus_knot(*b))
    assert coeffs(alexander(d)) == fox_connected_sum(a, b)


def test_sum_with_figure_eight():
    d = evaluate_text("sum(T(2,3), atom(F8))")
    want = LaurentPoly({0: 1, 1: -1, 2: 1}) * LaurentPoly(fox_figure_eight())
    assert alexander(d) == want.normalized()
    assert str(alexander(d)) == "1 - 4*t + 5*t^2 - 4*t^3 + t^4"


@pytest.mark.parametrize("p, q", [(2, 3), (2, 5), (3, 4), (2, 17), (3, -2)])
def test_cable_of_trefoil_matches_burau(p, q):
    n, word = cable_braid(p, q, *torus_braid(2, 3))
    assert is_knot_braid(n, word)
    d = engine.cable(p, q, engine.torus_knot(2, 3))
    assert coeffs(alexander(d)) == burau_alexander(n, word)


def test_cable_formula_with_mirror_companion():
    d = evaluate_text("cable(2,17, T(-3,2))")
    want = torus_knot_alexander(2, 17) * torus_knot_alexander(3, 2).substitute_power(2)
    assert alexander(d) == want.normalized()


def test_unknot_and_whitehead_double():
    assert alexander(engine.unknot()) == LaurentPoly.one()
    assert alexander(evaluate_text("whitehead(T(2,3))")) == LaurentPoly.one()


def test_alexander_rejects_non_trees():
    with pytest.raises(SpliceError) as exc:
        alexander(evaluate_text("H(2)"))
    assert exc.value.code == "NOT_A_KNOT_TREE"


def test_alexander_invariant_under_re_presentation():
    a = evaluate_text("sum(T(2,3), cable(2,5,atom(F8)))")
    b = evaluate_text("sum(cable(2,5,atom(F8)), T(-2,-3))")
    assert canonical_form(a) == canonical_form(b)
    assert alexander(a) == alexander(b)


def test_gromov_values():
    assert gromov_norm(evaluate_text("cable(2,17, T(-3,2))")) == 0
    assert gromov_norm(evaluate_text("atom(voleg)")) == Decimal("42.7594")
    st1 = gromov_norm(evaluate_text(ST1))
    assert abs(st1 - Decimal("7.326")) <= Decimal("2e-3")


@pytest.mark.parametrize(
    "expr, strict",
    [("atom(voleg)", True), (ST1, True), ("splice(atom(W).comp[0], T(2,3))", True), ("H(3)", False)],
)
def test_gromov_monotone_under_deletion(expr, strict):
    d = evaluate_text(expr)
    for a in sorted(d.externals):
        try:
            smaller = engine.reduce(delete_component(d, a))
        except SpliceError as exc:
            assert exc.code == "NO_SUBLINK_RECORD"
            continue
        assert gromov_norm(smaller) <= gromov_norm(d)
        if strict:
            assert gromov_norm(smaller) < gromov_norm(d)


def test_missing_volume():
    from splicegraph.atomdb import AtomDatabase, default_db, record_from_json

    rec = default_db().lookup("W").to_json()
    rec["volume"] = None
    rec["name"] = "Wnovol"
    db = default_db().merged(AtomDatabase([record_from_json(rec)]))
    with pytest.raises(SpliceError) as exc:
        gromov_norm(evaluate_text("atom(Wnovol)", db), db)
    assert exc.value.code == "MISSING_VOLUME"
