"""Linear-pencil realizations r = c* L^{-1} b and the equality oracle.

The constructions are the standard inductive ones (no minimization);
equality of expressions is decided by expanding both realizations as
noncommutative power series around a common scalar regular point and
comparing them through a finite closure, which is sound and complete for
the unminimized size bound.  When no scalar center exists the oracle
falls back to randomized evaluation and reports the weaker verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ._rat import QQ
from .config import Budget, DEFAULT_BUDGET
from .errors import (
    DegeneracyNotWitnessed,
    InconsistentSystem,
    NoScalarCenter,
    SingularAtPoint,
    UnknownSymbol,
)
from .field import Cyclotomic, ONE, ZERO, cyclo
from .linalg import CMatrix, solve_linear
from .ncalg import (
    Adj,
    Const,
    Inv,
    Prod,
    RatExpr,
    Scale,
    Sum,
    Var,
    eval_expr,
)


class Pencil:
    """An affine matrix pencil A0 + sum_i A_i x_i over named letters."""

    __slots__ = ("A0", "coeffs")

    def __init__(self, A0: CMatrix, coeffs: Mapping[str, CMatrix]):
        n = A0.nrows
        if A0.ncols != n:
            raise ValueError("pencil constant term must be square")
        for s, a in coeffs.items():
            if a.shape != (n, n):
                raise ValueError(f"coefficient for {s!r} has shape {a.shape}")
        self.A0 = A0
        self.coeffs = dict(coeffs)

    @property
    def size(self) -> int:
        return self.A0.nrows

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(sorted(self.coeffs))

    def eval(self, point: Mapping[str, CMatrix]) -> CMatrix:
        """A0 (x) I + sum A_i (x) X_i at a tuple of m-by-m matrices."""
        m = None
        for s in self.coeffs:
            if s not in point:
                raise UnknownSymbol(f"no value for pencil letter {s!r}")
            if m is None:
                m = point[s].nrows
        if m is None:
            m = 1
        acc = self.A0.kron(CMatrix.identity(m))
        for s in sorted(self.coeffs):
            x = point[s]
            if x.shape != (m, m):
                raise ValueError("pencil point matrices must share a size")
            if not self.coeffs[s].is_zero:
                acc = acc + self.coeffs[s].kron(x)
        return acc

    def eval_scalar(self, t: Mapping[str, Cyclotomic]) -> CMatrix:
        acc = self.A0
        for s in sorted(self.coeffs):
            ts = t[s]
            if not ts.is_zero:
                acc = acc + self.coeffs[s].scale(ts)
        return acc

    def adjoint(self) -> "Pencil":
        return Pencil(
            self.A0.adjoint(), {s: a.adjoint() for s, a in self.coeffs.items()}
        )


class Realization:
    """r = c* L^{-1} b with an optional invertibility witness point."""

    __slots__ = ("c", "pencil", "b", "witness")

    def __init__(
        self,
        c: CMatrix,
        pencil: Pencil,
        b: CMatrix,
        witness: dict[str, CMatrix] | None = None,
    ):
        n = pencil.size
        if c.shape != (n, 1) or b.shape != (n, 1):
            raise ValueError("c and b must be column vectors of the pencil size")
        self.c = c
        self.pencil = pencil
        self.b = b
        self.witness = witness

    @property
    def size(self) -> int:
        return self.pencil.size

    def eval(self, point: Mapping[str, CMatrix]) -> CMatrix:
        m = 1
        for s in self.pencil.coeffs:
            m = point[s].nrows
            break
        big = self.pencil.eval(point)
        rhs = self.b.kron(CMatrix.identity(m))
        try:
            x = solve_linear(big, rhs)
        except InconsistentSystem:
            raise SingularAtPoint(
                "realization pencil is singular at this point"
            ) from None
        return self.c.kron(CMatrix.identity(m)).adjoint() @ x

    def adjoint(self) -> "Realization":
        witness = None
        if self.witness is not None:
            witness = {s: m.adjoint() for s, m in self.witness.items()}
        return Realization(self.b, self.pencil.adjoint(), self.c, witness)


# ---------------------------------------------------------------------------
# inductive constructions


def _zero(n: int) -> CMatrix:
    return CMatrix.zero(n, n)


def _r_const(value: Cyclotomic) -> Realization:
    return Realization(
        CMatrix.column([1]),
        Pencil(CMatrix.identity(1), {}),
        CMatrix.column([value]),
    )


def _r_var(name: str) -> Realization:
    a = CMatrix([[0, -1], [0, 0]])
    return Realization(
        CMatrix.column([1, 0]),
        Pencil(CMatrix.identity(2), {name: a}),
        CMatrix.column([0, 1]),
    )


def _merged_letters(p1: Pencil, p2: Pencil) -> list[str]:
    return sorted(set(p1.coeffs) | set(p2.coeffs))


def _r_sum(r1: Realization, r2: Realization) -> Realization:
    n1, n2 = r1.size, r2.size
    p1, p2 = r1.pencil, r2.pencil
    A0 = CMatrix.block([[p1.A0, _zero(n1) if n1 == n2 else CMatrix.zero(n1, n2)],
                        [CMatrix.zero(n2, n1), p2.A0]])
    coeffs = {}
    for s in _merged_letters(p1, p2):
        a = p1.coeffs.get(s, _zero(n1))
        b = p2.coeffs.get(s, _zero(n2))
        coeffs[s] = CMatrix.block(
            [[a, CMatrix.zero(n1, n2)], [CMatrix.zero(n2, n1), b]]
        )
    c = CMatrix.block([[r1.c], [r2.c]])
    b = CMatrix.block([[r1.b], [r2.b]])
    return Realization(c, Pencil(A0, coeffs), b)


def _r_prod(r1: Realization, r2: Realization) -> Realization:
    n1, n2 = r1.size, r2.size
    p1, p2 = r1.pencil, r2.pencil
    coupling = -(r1.b @ r2.c.adjoint())  # n1 x n2, constant
    A0 = CMatrix.block([[p1.A0, coupling], [CMatrix.zero(n2, n1), p2.A0]])
    coeffs = {}
    for s in _merged_letters(p1, p2):
        a = p1.coeffs.get(s, _zero(n1))
        b = p2.coeffs.get(s, _zero(n2))
        coeffs[s] = CMatrix.block(
            [[a, CMatrix.zero(n1, n2)], [CMatrix.zero(n2, n1), b]]
        )
    c = CMatrix.block([[r1.c], [CMatrix.zero(n2, 1)]])
    b = CMatrix.block([[CMatrix.zero(n1, 1)], [r2.b]])
    return Realization(c, Pencil(A0, coeffs), b)


def _r_inv(r: Realization) -> Realization:
    n = r.size
    p = r.pencil
    A0 = CMatrix.block(
        [[CMatrix.zero(1, 1), r.c.adjoint()], [r.b, p.A0]]
    )
    coeffs = {
        s: CMatrix.block(
            [[CMatrix.zero(1, 1), CMatrix.zero(1, n)], [CMatrix.zero(n, 1), a]]
        )
        for s, a in p.coeffs.items()
    }
    e1 = CMatrix.column([1] + [0] * n)
    return Realization(e1, Pencil(A0, coeffs), -e1)


def _r_scale(s: Cyclotomic, r: Realization) -> Realization:
    return Realization(r.c.scale(s.conjugate()), r.pencil, r.b, r.witness)


def realize(
    e: RatExpr, budget: Budget | None = None, with_witness: bool = True
) -> Realization:
    """Build a realization by the standard inductive constructions.

    Sizes: constants 1, variables 2, sum/product n1+n2, inverse n+1,
    scaling free.  When with_witness is set (the default), a pencil
    invertibility witness is searched for and DegeneracyNotWitnessed is
    raised if none is found within the budget -- which is failure to
    certify, not proof of degeneracy.
    """
    budget = budget or DEFAULT_BUDGET
    memo: dict[int, Realization] = {}

    def rec(node: RatExpr) -> Realization:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Const):
            out = _r_const(node.value)
        elif isinstance(node, Var):
            out = _r_var(node.name)
        elif isinstance(node, Sum):
            out = rec(node.terms[0])
            for t in node.terms[1:]:
                out = _r_sum(out, rec(t))
        elif isinstance(node, Prod):
            out = rec(node.factors[0])
            for f in node.factors[1:]:
                out = _r_prod(out, rec(f))
        elif isinstance(node, Scale):
            out = _r_scale(node.coeff, rec(node.body))
        elif isinstance(node, Inv):
            out = _r_inv(rec(node.body))
        elif isinstance(node, Adj):
            raise TypeError(
                "adjoint leaves must be expanded to base letters before realization"
            )
        else:  # pragma: no cover
            raise TypeError(type(node).__name__)
        memo[id(node)] = out
        return out

    r = rec(e)
    if with_witness:
        w = find_witness(r.pencil, budget)
        if w is None:
            raise DegeneracyNotWitnessed(
                f"no invertible evaluation point found within budget "
                f"(sizes up to {budget.witness_size}, {budget.witness_attempts} "
                f"attempts each); the expression may be degenerate or merely hard"
            )
        r = Realization(r.c, r.pencil, r.b, w)
    return r


# ---------------------------------------------------------------------------
# witness and center search


def _scalar_candidates(d: int, budget: Budget, rng: random.Random):
    yield tuple(QQ(0) for _ in range(d))
    yield tuple(QQ(1) for _ in range(d))
    yield tuple(QQ(i + 1) for i in range(d))
    yield tuple(QQ((i + 1) * (1 if i % 2 == 0 else -1)) for i in range(d))
    yield tuple(QQ(2 * i + 1) for i in range(d))
    for _ in range(budget.scalar_attempts):
        yield tuple(QQ(rng.randint(-5, 5)) for _ in range(d))
    for _ in range(budget.scalar_attempts // 2):
        yield tuple(QQ(rng.randint(-9, 9), 2) for _ in range(d))


def find_scalar_center(
    pencils: Sequence[Pencil], budget: Budget | None = None
) -> dict[str, Cyclotomic] | None:
    """A scalar tuple at which every given pencil is invertible, or None."""
    budget = budget or DEFAULT_BUDGET
    letters = sorted({s for p in pencils for s in p.coeffs})
    rng = random.Random(budget.seed)
    seen = set()
    for cand in _scalar_candidates(len(letters), budget, rng):
        if cand in seen:
            continue
        seen.add(cand)
        t = {s: cyclo(c) for s, c in zip(letters, cand)}
        if all(p.eval_scalar(t).rank() == p.size for p in pencils):
            return t
    return None


def find_witness(
    pencil: Pencil, budget: Budget | None = None
) -> dict[str, CMatrix] | None:
    """An evaluation point where the pencil is exactly invertible, or None.

    Scalar tuples are tried first, then random integer-entry matrix
    tuples of growing size.  Failure is not a degeneracy proof.
    """
    budget = budget or DEFAULT_BUDGET
    center = find_scalar_center([pencil], budget)
    if center is not None:
        return {s: CMatrix([[c]]) for s, c in center.items()}
    letters = pencil.letters
    n = pencil.size
    rng = random.Random(budget.seed + 1)
    for m in range(2, budget.witness_size + 1):
        for _ in range(budget.witness_attempts):
            point = {
                s: CMatrix(
                    [[rng.randint(-5, 5) for _ in range(m)] for _ in range(m)]
                )
                for s in letters
            }
            if pencil.eval(point).rank() == n * m:
                return point
    return None


# ---------------------------------------------------------------------------
# series expansion


@dataclass(frozen=True)
class SeriesTable:
    """Power-series coefficients of a realization around a scalar center."""

    letters: tuple[str, ...]
    center: tuple[Cyclotomic, ...]
    degree: int
    coeffs: dict


def _series_data(r: Realization, center: Mapping[str, Cyclotomic]):
    """(u, {B_i}, v) with r(center + x) = sum_w u B_w v x^w."""
    a0 = r.pencil.eval_scalar(center)
    a0_inv = a0.inverse()
    letters = r.pencil.letters
    bs = [-(a0_inv @ r.pencil.coeffs[s]) for s in letters]
    return r.c.adjoint(), bs, a0_inv @ r.b


def series(
    r: Realization,
    degree: int,
    center: Mapping[str, Cyclotomic] | None = None,
    budget: Budget | None = None,
) -> SeriesTable:
    """Expand c*(L(center + x))^{-1} b as an exact nc power series."""
    if center is None:
        center = find_scalar_center([r.pencil], budget)
        if center is None:
            raise NoScalarCenter(
                "no scalar regular point found for series expansion"
            )
    letters = r.pencil.letters
    u, bs, v = _series_data(r, center)
    coeffs: dict[tuple, Cyclotomic] = {}
    frontier: list[tuple[tuple, CMatrix]] = [((), u)]
    for _ in range(degree + 1):
        next_frontier = []
        for word, row in frontier:
            val = (row @ v)[0, 0]
            if not val.is_zero:
                coeffs[word] = val
            if len(word) < degree:
                for i, bi in enumerate(bs):
                    nxt = row @ bi
                    if not nxt.is_zero:
                        next_frontier.append((word + (i,), nxt))
        if not next_frontier:
            break
        frontier = next_frontier
    return SeriesTable(
        letters=letters,
        center=tuple(center[s] for s in letters),
        degree=degree,
        coeffs=coeffs,
    )


# ---------------------------------------------------------------------------
# equality oracle


@dataclass(frozen=True)
class EqualProven:
    detail: str = ""


@dataclass(frozen=True)
class EqualProbable:
    points: int
    detail: str = "randomized agreement only; no scalar regular point found"


@dataclass(frozen=True)
class Distinct:
    witness: dict
    word: tuple | None = None


class _RowSpan:
    """Incremental row-space membership over exact scalars."""

    def __init__(self, width: int):
        self._rows: list[list[Cyclotomic]] = []
        self._pivots: list[int] = []
        self._width = width

    def add(self, row: CMatrix) -> bool:
        """Reduce against the span; add and return True if independent."""
        vec = [row[0, j] for j in range(self._width)]
        for pivot, basis in zip(self._pivots, self._rows):
            f = vec[pivot]
            if not f.is_zero:
                vec = [x - f * y for x, y in zip(vec, basis)]
        lead = next((j for j, x in enumerate(vec) if not x.is_zero), None)
        if lead is None:
            return False
        inv = vec[lead].inv()
        vec = [inv * x for x in vec]
        self._rows.append(vec)
        self._pivots.append(lead)
        return True


def _shift_point(
    letters: Sequence[str], center: Mapping[str, Cyclotomic], word: Sequence[int]
) -> dict[str, CMatrix]:
    """Upper-triangular point t*I + shift pattern that reads off the
    series coefficient of `word` in the corner entry."""
    m = len(word) + 1
    point = {}
    for idx, s in enumerate(letters):
        rows = [
            [
                center[s] if i == j else (ONE if (j == i + 1 and word[i] == idx) else ZERO)
                for j in range(m)
            ]
            for i in range(m)
        ]
        point[s] = CMatrix(rows)
    return point


def nc_equal(
    e1: RatExpr, e2: RatExpr, budget: Budget | None = None
) -> EqualProven | EqualProbable | Distinct:
    """Decide equality of two nondegenerate rational expressions.

    With a common scalar regular point the decision is exact: both are
    expanded as series there and compared through a right-multiplication
    closure (dimension bound n1+n2).  Otherwise k random matrix points
    are compared and the verdict is only probable.
    """
    budget = budget or DEFAULT_BUDGET
    if e1 == e2:
        return EqualProven(detail="structurally identical")
    r1 = realize(e1, budget, with_witness=False)
    r2 = realize(e2, budget, with_witness=False)
    letters = sorted(set(r1.pencil.coeffs) | set(r2.pencil.coeffs))
    center = find_scalar_center([r1.pencil, r2.pencil], budget)
    if center is not None:
        full = dict(center)
        u1, bs1, v1 = _series_data(r1, {s: full[s] for s in r1.pencil.letters})
        u2, bs2, v2 = _series_data(r2, {s: full[s] for s in r2.pencil.letters})
        n1, n2 = r1.size, r2.size

        def block_b(s: str) -> CMatrix:
            a = (
                bs1[r1.pencil.letters.index(s)]
                if s in r1.pencil.coeffs
                else CMatrix.zero(n1, n1)
            )
            b = (
                bs2[r2.pencil.letters.index(s)]
                if s in r2.pencil.coeffs
                else CMatrix.zero(n2, n2)
            )
            return CMatrix.block(
                [[a, CMatrix.zero(n1, n2)], [CMatrix.zero(n2, n1), b]]
            )

        bs = [block_b(s) for s in letters]
        u = CMatrix.block([[u1, u2]])
        v = CMatrix.block([[v1], [-v2]])
        span = _RowSpan(n1 + n2)
        queue: list[tuple[tuple, CMatrix]] = []
        if span.add(u):
            queue.append(((), u))
        qi = 0
        while qi < len(queue):
            word, row = queue[qi]
            qi += 1
            if not ((row @ v)[0, 0]).is_zero:
                witness = _shift_point(letters, full, word)
                return Distinct(witness=witness, word=word)
            for i, bi in enumerate(bs):
                nxt = row @ bi
                if not nxt.is_zero and span.add(nxt):
                    queue.append((word + (i,), nxt))
        return EqualProven(
            detail=f"series closure at scalar center over {len(letters)} letters"
        )
    # randomized fallback
    rng = random.Random(budget.seed + 2)
    bound = max(2, min(max(r1.size, r2.size), 8))
    agreements = 0
    attempts = 0
    max_attempts = 60 * budget.random_points
    while agreements < budget.random_points and attempts < max_attempts:
        attempts += 1
        m = rng.randint(1, bound)
        point = {
            s: CMatrix([[rng.randint(-5, 5) for _ in range(m)] for _ in range(m)])
            for s in letters
        }
        try:
            a = eval_expr(e1, point, size=m)
            b = eval_expr(e2, point, size=m)
        except SingularAtPoint:
            continue
        if a != b:
            return Distinct(witness=point)
        agreements += 1
    if agreements < budget.random_points:
        raise DegeneracyNotWitnessed(
            "could not sample enough common-domain points for the randomized "
            "equality check"
        )
    return EqualProbable(points=agreements)
