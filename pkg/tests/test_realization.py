"""Linear-pencil realizations, series expansion, and the equality oracle."""

from __future__ import annotations

import random

import pytest

from ncinv import CMatrix, cyclo, zeta
from ncinv._rat import QQ
from ncinv.config import Budget
from ncinv.errors import DegeneracyNotWitnessed, SingularAtPoint
from ncinv.ncalg import add, const, eval_expr, inv, mul, neg, parse_expr, scale, var
from ncinv.realization import (
    Distinct,
    EqualProbable,
    EqualProven,
    Pencil,
    Realization,
    find_witness,
    nc_equal,
    realize,
    series,
)

INTRO_IDENTITY = "4*inv(x + y - (x-y)^2 * inv((x-y)*(x+y)*(x-y)) * (x-y)^2)"

X, Y = var("x"), var("y")
COMM = mul(X, Y) - mul(Y, X)


def rand_point(names, n, rng):
    return {
        s: CMatrix([[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)])
        for s in names
    }


# ---------------------------------------------------------------------------
# construction


def test_variable_realization_layout():
    r = realize(var("x"))
    assert r.size == 2
    assert r.c == CMatrix.column([1, 0])
    assert r.b == CMatrix.column([0, 1])
    assert r.pencil.A0 == CMatrix.identity(2)
    assert r.pencil.coeffs["x"] == CMatrix([[0, -1], [0, 0]])


def test_size_formulas():
    x, y = var("x"), var("y")
    assert realize(const(5)).size == 1
    assert realize(x).size == 2
    assert realize(add(x, y)).size == 4
    assert realize(mul(x, y)).size == 4
    assert realize(inv(x)).size == 3
    assert realize(scale(3, x)).size == 2
    assert realize(add(mul(x, y), neg(mul(y, x)))).size == 8


def test_eval_matches_expression():
    rng = random.Random(21)
    exprs = [
        COMM,
        mul(X, inv(add(X, Y))),
        add(inv(X), inv(Y)),
        parse_expr(INTRO_IDENTITY, ["x", "y"]),
        inv(COMM),
    ]
    for e in exprs:
        r = realize(e)
        hits = 0
        while hits < 3:
            point = rand_point(["x", "y"], 2, rng)
            try:
                direct = eval_expr(e, point)
            except SingularAtPoint:
                continue
            try:
                via = r.eval(point)
            except SingularAtPoint:
                continue
            assert via == direct
            hits += 1


def test_intro_identity_scalar_eval_through_realization():
    r = realize(parse_expr(INTRO_IDENTITY, ["x", "y"]))
    point = {"x": CMatrix([[1]]), "y": CMatrix([[2]])}
    assert r.eval(point) == CMatrix([[QQ(3, 2)]])


def test_realize_attaches_witness():
    r = realize(inv(COMM))
    assert r.witness is not None
    # the commutator vanishes at scalars, so the witness needs size >= 2
    some = next(iter(r.witness.values()))
    assert some.nrows >= 2
    assert r.pencil.eval(r.witness).rank() == r.size * some.nrows


def test_witness_deterministic():
    r1 = realize(inv(COMM))
    r2 = realize(inv(COMM))
    assert r1.witness == r2.witness


def test_find_witness_scalar_shortcut():
    p = Pencil(CMatrix.identity(2), {"x": CMatrix.zero(2, 2)})
    w = find_witness(p, Budget())
    assert w is not None
    assert w["x"] == CMatrix([[0]])


def test_degeneracy_not_witnessed():
    # inv(0) has no evaluation point at all
    with pytest.raises(DegeneracyNotWitnessed):
        realize(inv(const(0) * var("x")), budget=Budget(witness_size=2, witness_attempts=4))


def test_adjoint_realization():
    r = realize(COMM)
    ra = r.adjoint()
    assert ra.size == r.size
    rng = random.Random(3)
    raw = rand_point(["x", "y"], 2, rng)
    point = {s: m + m.adjoint() for s, m in raw.items()}
    assert ra.eval(point) == r.eval(point).adjoint()


# ---------------------------------------------------------------------------
# series


def test_geometric_series():
    r = realize(inv(const(1) - var("x")))
    t = series(r, degree=5)
    assert t.letters == ("x",)
    assert all(c.is_zero for c in t.center)
    for k in range(6):
        assert t.coeffs.get((0,) * k) == cyclo(1)
    assert len(t.coeffs) == 6


def test_monomial_series():
    r = realize(mul(var("x1"), var("x2")))
    t = series(r, degree=4)
    assert t.letters == ("x1", "x2")
    assert t.coeffs == {(0, 1): cyclo(1)}


def test_series_matches_polynomial_coefficients():
    # (x + 2y)^2 = xx + 2xy + 2yx + 4yy
    e = mul(add(X, scale(2, Y)), add(X, scale(2, Y)))
    t = series(realize(e), degree=3)
    assert t.coeffs == {
        (0, 0): cyclo(1),
        (0, 1): cyclo(2),
        (1, 0): cyclo(2),
        (1, 1): cyclo(4),
    }


# ---------------------------------------------------------------------------
# equality oracle


def test_intro_identity_equal_proven():
    lhs = parse_expr("inv(x) + inv(y)", ["x", "y"])
    rhs = parse_expr(INTRO_IDENTITY, ["x", "y"])
    v = nc_equal(lhs, rhs)
    assert isinstance(v, EqualProven)
    assert isinstance(nc_equal(rhs, lhs), EqualProven)


def test_reflexive():
    e = inv(COMM)
    assert isinstance(nc_equal(e, e), EqualProven)


def test_commutator_products_distinct():
    v = nc_equal(mul(var("x1"), var("x2")), mul(var("x2"), var("x1")))
    assert isinstance(v, Distinct)
    p = v.witness
    e1 = mul(var("x1"), var("x2"))
    e2 = mul(var("x2"), var("x1"))
    assert eval_expr(e1, p) != eval_expr(e2, p)


def test_double_inverse_equal():
    assert isinstance(nc_equal(inv(inv(X)), X), EqualProven)


def test_binomial_expansion_equal():
    lhs = mul(add(X, Y), add(X, Y))
    rhs = add(mul(X, X), mul(X, Y), mul(Y, X), mul(Y, Y))
    assert isinstance(nc_equal(lhs, rhs), EqualProven)


def test_scalar_mismatch_distinct():
    v = nc_equal(X, scale(2, X))
    assert isinstance(v, Distinct)


def test_probable_route_when_no_scalar_center():
    # inv(comm)*comm = 1 wherever defined, but no scalar point is regular
    e = mul(inv(COMM), COMM)
    v = nc_equal(e, const(1))
    assert isinstance(v, EqualProbable)
    assert v.points >= 8


def test_probable_route_distinct():
    e = mul(inv(COMM), COMM)
    v = nc_equal(e, const(2))
    assert isinstance(v, Distinct)
    p = v.witness
    assert eval_expr(e, p) != eval_expr(const(2), p, size=next(iter(p.values())).nrows)


def test_equal_proven_with_cyclotomic_coefficients():
    w = zeta(3)
    lhs = mul(scale(w, X), scale(w * w, Y))
    rhs = mul(X, Y)
    assert isinstance(nc_equal(lhs, rhs), EqualProven)
    assert isinstance(nc_equal(mul(scale(w, X), scale(w, Y)), mul(X, Y)), Distinct)
