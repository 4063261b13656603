"""Expression DAGs, parsing, evaluation, group action, free generators."""

from __future__ import annotations

import random

import pytest

from ncinv import CMatrix, cyclo, zeta
from ncinv._rat import QQ
from ncinv.errors import ExprSyntaxError, SingularAtPoint, UnknownSymbol
from ncinv.ncalg import (
    Adj,
    Const,
    Inv,
    NcPoly,
    Prod,
    Scale,
    Sum,
    SymbolTable,
    Var,
    act,
    add,
    adjoint_expr,
    adj,
    const,
    eval_expr,
    inv,
    mul,
    neg,
    parse_expr,
    scale,
    var,
)
from ncinv.words import free_reduce, schreier_free_generators, signed_word_to_expr

INTRO_IDENTITY = "4*inv(x + y - (x-y)^2 * inv((x-y)*(x+y)*(x-y)) * (x-y)^2)"


def rand_matrices(names, n, rng, lo=-4, hi=4):
    return {
        s: CMatrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])
        for s in names
    }


# ---------------------------------------------------------------------------
# construction and normalization


def test_smart_constructors_normalize():
    x, y = var("x"), var("y")
    assert add(x, y) == add(y, x)  # canonical sum order
    assert mul(x, y) != mul(y, x)  # products stay ordered
    assert add(x) == x
    assert mul(x) == x
    assert add() == const(0)
    assert mul() == const(1)
    assert scale(1, x) == x
    assert scale(0, x) == const(0)
    assert neg(neg(x)) == x
    assert add(x, const(2), const(3)) == add(x, const(5))
    assert mul(const(2), x, const(3), y) == scale(6, mul(x, y))


def test_no_double_inverse_collapse():
    x = var("x")
    e = inv(inv(x))
    assert isinstance(e, Inv)
    assert isinstance(e.body, Inv)


def test_adjoint_involution_on_bare_vars():
    x = var("x")
    assert adj(x) == x  # the involution fixes base letters
    assert adj(adj(mul(x, var("y")))) == mul(x, var("y"))


def test_pow():
    x, y = var("x"), var("y")
    e = add(x, y)
    assert e ** 2 == mul(e, e)
    assert e ** 1 == e
    assert e ** 0 == const(1)
    assert x ** -1 == inv(x)


# ---------------------------------------------------------------------------
# parsing


def test_parse_commutator_structure():
    e = parse_expr("x1*x2 - x2*x1", ["x1", "x2"])
    built = add(mul(var("x1"), var("x2")), neg(mul(var("x2"), var("x1"))))
    assert e == built
    assert isinstance(e, Sum)


def test_parse_inv_atom():
    e = parse_expr("inv(x1)", ["x1"])
    assert isinstance(e, Inv)
    assert e.body == var("x1")


def test_parse_caret_inverse_and_square():
    assert parse_expr("x^-1", ["x"]) == inv(var("x"))
    x, y = var("x"), var("y")
    assert parse_expr("(x+y)^2", ["x", "y"]) == mul(add(x, y), add(x, y))


def test_parse_scalar_coefficients():
    e = parse_expr("1/2*x", ["x"])
    assert e == scale(QQ(1, 2), var("x"))
    e = parse_expr("z3*x", ["x"])
    assert e == scale(zeta(3), var("x"))


def test_declared_symbol_shadows_zeta_literal():
    e = parse_expr("z3", ["z3"])
    assert e == var("z3")
    e = parse_expr("z3", ["x"])
    assert e == const(zeta(3))


def test_parse_adj():
    e = parse_expr("adj(x*y)", ["x", "y"])
    assert e == mul(var("y"), var("x"))  # pushed through immediately


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        parse_expr("x + q", ["x"])


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as err:
        parse_expr("x + * y", ["x", "y"])
    assert err.value.pos is not None


def test_intro_identity_round_trips():
    e = parse_expr(INTRO_IDENTITY, ["x", "y"])
    again = parse_expr(str(e), ["x", "y"])
    assert again == e


def test_round_trip_random_expressions():
    rng = random.Random(3)
    names = ["x", "y"]

    def build(depth):
        if depth == 0:
            return rng.choice([var(rng.choice(names)), const(rng.randint(-3, 3))])
        op = rng.choice(["add", "mul", "inv", "scale", "adjvar"])
        if op == "add":
            return add(build(depth - 1), build(depth - 1))
        if op == "mul":
            return mul(build(depth - 1), build(depth - 1))
        if op == "inv":
            return inv(build(depth - 1))
        if op == "scale":
            return scale(zeta(4), build(depth - 1))
        return build(depth - 1)

    for _ in range(20):
        e = build(3)
        assert parse_expr(str(e), names) == e


# ---------------------------------------------------------------------------
# evaluation


def test_eval_commutator_on_nilpotents():
    e = parse_expr("x1*x2 - x2*x1", ["x1", "x2"])
    point = {
        "x1": CMatrix([[0, 1], [0, 0]]),
        "x2": CMatrix([[0, 0], [1, 0]]),
    }
    assert eval_expr(e, point) == CMatrix.diag([1, -1])


def test_eval_inverse_at_identity():
    e = parse_expr("inv(x1)", ["x1"])
    assert eval_expr(e, {"x1": CMatrix.identity(2)}) == CMatrix.identity(2)


def test_intro_identity_scalar_point():
    lhs = parse_expr("inv(x) + inv(y)", ["x", "y"])
    rhs = parse_expr(INTRO_IDENTITY, ["x", "y"])
    point = {"x": CMatrix([[1]]), "y": CMatrix([[2]])}
    expected = CMatrix([[QQ(3, 2)]])
    assert eval_expr(lhs, point) == expected
    assert eval_expr(rhs, point) == expected


def test_intro_identity_matrix_points():
    lhs = parse_expr("inv(x) + inv(y)", ["x", "y"])
    rhs = parse_expr(INTRO_IDENTITY, ["x", "y"])
    rng = random.Random(11)
    hits = 0
    while hits < 3:
        point = rand_matrices(["x", "y"], 3, rng)
        try:
            a, b = eval_expr(lhs, point), eval_expr(rhs, point)
        except SingularAtPoint:
            continue
        assert a == b
        hits += 1


def test_singular_point_identifies_node():
    e = parse_expr("inv(x)", ["x"])
    with pytest.raises(SingularAtPoint) as err:
        eval_expr(e, {"x": CMatrix.zero(2, 2)})
    assert err.value.node is e


def test_eval_adjoint_conjugate_transpose():
    # the involution fixes the letters, so on hermitian points the
    # evaluation of adj(e) is the conjugate-transpose of the evaluation
    e = adj(mul(var("x"), var("y")))
    rng = random.Random(5)
    raw = rand_matrices(["x", "y"], 2, rng)
    point = {s: m + m.adjoint() for s, m in raw.items()}
    direct = (point["x"] @ point["y"]).adjoint()
    assert eval_expr(e, point) == direct
    # with a complex scalar in the mix
    e2 = adjoint_expr(scale(zeta(4), var("x")))
    assert eval_expr(e2, point) == point["x"].adjoint().scale(zeta(4, 3))


def test_eval_homomorphism_random():
    rng = random.Random(9)
    x, y = var("x"), var("y")
    e1 = add(mul(x, y), x)
    e2 = mul(add(x, y), y)
    for _ in range(4):
        point = rand_matrices(["x", "y"], 2, rng)
        assert eval_expr(add(e1, e2), point) == eval_expr(e1, point) + eval_expr(
            e2, point
        )
        assert eval_expr(mul(e1, e2), point) == eval_expr(e1, point) @ eval_expr(
            e2, point
        )


def test_derived_symbol_binding():
    table = SymbolTable(["x", "y"])
    table.declare("a", binding=add(var("x"), var("y")))
    point = {"x": CMatrix([[1]]), "y": CMatrix([[5]])}
    assert eval_expr(var("a"), point, symbols=table) == CMatrix([[6]])
    # a direct value for the derived symbol wins over its binding
    point2 = dict(point)
    point2["a"] = CMatrix([[100]])
    assert eval_expr(var("a"), point2, symbols=table) == CMatrix([[100]])


def test_eval_missing_symbol():
    with pytest.raises(UnknownSymbol):
        eval_expr(var("x"), {"y": CMatrix.identity(1)})


# ---------------------------------------------------------------------------
# group action


def test_act_swap_symmetric_sum():
    swap = CMatrix([[0, 1], [1, 0]])
    e = add(var("x"), var("y"))
    assert act(swap, e, ["x", "y"]) == e


def test_act_swap_on_square_difference():
    swap = CMatrix([[0, 1], [1, 0]])
    d = add(var("x"), neg(var("y")))
    e = mul(d, d)
    moved = act(swap, e, ["x", "y"])
    rng = random.Random(2)
    for _ in range(3):
        point = rand_matrices(["x", "y"], 2, rng)
        assert eval_expr(moved, point) == eval_expr(e, point)


def test_act_diagonal_character():
    g = CMatrix.diag([zeta(3), zeta(3, 2)])
    e = mul(var("x"), var("y"))
    assert act(g, e, ["x", "y"]) == e  # omega * omega^2 = 1


def test_act_composition_convention():
    # act(g, act(h, e)) agrees with act(h @ g, e): substitution composes
    # through the transpose, so the composite matrix is h*g.
    rng = random.Random(4)
    g = CMatrix([[1, 1], [0, 1]])
    h = CMatrix([[1, 0], [2, 1]])
    e = mul(var("x"), add(var("x"), var("y")))
    lhs = act(g, act(h, e, ["x", "y"]), ["x", "y"])
    rhs = act(h @ g, e, ["x", "y"])
    for _ in range(3):
        point = rand_matrices(["x", "y"], 2, rng)
        assert eval_expr(lhs, point) == eval_expr(rhs, point)


def test_act_expands_bindings():
    table = SymbolTable(["x", "y"])
    table.declare("a", binding=add(var("x"), neg(var("y"))))
    swap = CMatrix([[0, 1], [1, 0]])
    moved = act(swap, var("a"), ["x", "y"], symbols=table)
    assert moved == add(var("y"), neg(var("x")))


# ---------------------------------------------------------------------------
# adjoint involution


def test_adjoint_reverses_products():
    assert adjoint_expr(mul(var("x1"), var("x2"))) == mul(var("x2"), var("x1"))


def test_adjoint_conjugates_constants():
    e = adjoint_expr(scale(zeta(3), var("x1")))
    assert e == scale(zeta(3, 2), var("x1"))


def test_adjoint_fixes_inverse_of_letter():
    assert adjoint_expr(inv(var("x1"))) == inv(var("x1"))


def test_adjoint_keeps_bound_symbols_atomic():
    table = SymbolTable(["x"])
    table.declare("v", binding=scale(zeta(4), var("x")))
    e = adjoint_expr(var("v"), symbols=table)
    assert isinstance(e, Adj)
    # evaluation still resolves correctly through the binding
    point = {"x": CMatrix([[1, 2], [3, 4]])}
    expected = point["x"].scale(zeta(4)).adjoint()
    assert eval_expr(e, point, symbols=table) == expected


# ---------------------------------------------------------------------------
# noncommutative polynomials


def test_ncpoly_ring_ops():
    x = NcPoly.variable(0, 2)
    y = NcPoly.variable(1, 2)
    comm = x * y - y * x
    assert comm.terms == {(0, 1): cyclo(1), (1, 0): cyclo(-1)}
    assert (x + y) * (x + y) == x * x + x * y + y * x + y * y
    assert (2 * x).terms == {(0,): cyclo(2)}
    assert (x - x).is_zero
    assert NcPoly.one(2) * x == x
    assert x ** 3 == x * x * x


def test_ncpoly_adjoint():
    x = NcPoly.variable(0, 2)
    y = NcPoly.variable(1, 2)
    p = zeta(4) * x * y
    q = p.adjoint()
    assert q == zeta(4, 3) * y * x
    assert q.adjoint() == p


def test_ncpoly_act_exact():
    x = NcPoly.variable(0, 2)
    y = NcPoly.variable(1, 2)
    swap = CMatrix([[0, 1], [1, 0]])
    p = (x - y) * (x - y)
    assert p.act(swap) == p
    g = CMatrix.diag([zeta(3), zeta(3, 2)])
    assert (x * y).act(g) == x * y
    assert x.act(g) == zeta(3) * x


def test_ncpoly_to_expr_matches_eval():
    x = NcPoly.variable(0, 2)
    y = NcPoly.variable(1, 2)
    p = x * y - y * x + 3 * NcPoly.one(2)
    e = p.to_expr(["x", "y"])
    rng = random.Random(8)
    point = rand_matrices(["x", "y"], 2, rng)
    direct = (
        point["x"] @ point["y"]
        - point["y"] @ point["x"]
        + CMatrix.identity(2).scale(3)
    )
    assert eval_expr(e, point) == direct


# ---------------------------------------------------------------------------
# Schreier free generators


def znmul(n):
    return lambda a, b: (a + b) % n


def test_schreier_trivial_group():
    gens = schreier_free_generators([0, 0, 0], mul=znmul(1), identity=0)
    assert gens == [((0, 1),), ((1, 1),), ((2, 1),)]


def test_schreier_z3_two_letters():
    # letters mapping to 1 and 2 in Z_3; BFS transversal is {e, x, y}
    gens = schreier_free_generators([1, 2], mul=znmul(3), identity=0)
    assert gens == [
        ((0, 1), (0, 1), (1, -1)),
        ((0, 1), (1, 1)),
        ((1, 1), (0, 1)),
        ((1, 1), (1, 1), (0, -1)),
    ]
    assert len(gens) == 3 * (2 - 1) + 1


def test_schreier_sign_pair():
    # letters with characters (trivial, sign): the two-letter reflection case
    gens = schreier_free_generators([0, 1], mul=znmul(2), identity=0)
    assert gens == [
        ((0, 1),),
        ((1, 1), (0, 1), (1, -1)),
        ((1, 1), (1, 1)),
    ]


def test_schreier_count_and_kernel_membership():
    rng = random.Random(13)
    for _ in range(10):
        n = rng.randint(1, 6)
        d = rng.randint(1, 4)
        chars = [rng.randrange(n) for _ in range(d)]
        image = {0}
        while True:
            new = {(a + c) % n for a in image for c in chars} | image
            if new == image:
                break
            image = new
        gens = schreier_free_generators(chars, mul=znmul(n), identity=0)
        assert len(gens) == len(image) * (d - 1) + 1
        for w in gens:
            total = 0
            for idx, e in w:
                total = (total + e * chars[idx]) % n
            assert total == 0
            assert w == free_reduce(w)


def test_free_reduce():
    assert free_reduce(((0, 1), (0, -1), (1, 1))) == ((1, 1),)
    assert free_reduce(((0, 1), (1, 1), (1, -1), (0, -1))) == ()


def test_signed_word_to_expr():
    letters = [var("u"), var("v")]
    e = signed_word_to_expr(((0, 1), (1, -1), (0, 1)), letters)
    assert e == mul(var("u"), inv(var("v")), var("u"))
    assert signed_word_to_expr((), letters) == const(1)
