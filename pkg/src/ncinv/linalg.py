"""Exact dense linear algebra over cyclotomic scalars.

Everything here is deterministic: elimination is plain reduced row
echelon form (which is mathematically unique), kernel and eigenspace
bases are RREF-normalized, and joint eigenspaces are ordered by the
root-of-unity exponent of their eigenvalues.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ._rat import QQ
from .errors import InconsistentSystem, NotCommuting, NotFiniteOrder
from .field import Cyclotomic, ONE, ZERO, cyclo, zeta


class CMatrix:
    """A dense rectangular matrix of Cyclotomic entries (immutable)."""

    __slots__ = ("_rows", "_m", "_n")

    def __init__(self, rows: Iterable[Iterable], _trusted: bool = False):
        if _trusted:
            data = rows
        else:
            data = tuple(tuple(cyclo(x) for x in row) for row in rows)
            widths = {len(r) for r in data}
            if len(widths) > 1:
                raise ValueError("ragged rows in matrix")
        self._rows = data
        self._m = len(data)
        self._n = len(data[0]) if data else 0

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, m: int, n: int) -> "CMatrix":
        return cls(tuple(tuple(ZERO for _ in range(n)) for _ in range(m)), _trusted=True)

    @classmethod
    def identity(cls, n: int) -> "CMatrix":
        return cls(
            tuple(
                tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)
            ),
            _trusted=True,
        )

    @classmethod
    def diag(cls, entries: Sequence) -> "CMatrix":
        entries = [cyclo(e) for e in entries]
        n = len(entries)
        return cls(
            tuple(
                tuple(entries[i] if i == j else ZERO for j in range(n))
                for i in range(n)
            ),
            _trusted=True,
        )

    @classmethod
    def permutation(cls, images: Sequence[int]) -> "CMatrix":
        """The matrix sending basis vector e_j to e_images[j]."""
        n = len(images)
        if sorted(images) != list(range(n)):
            raise ValueError("not a permutation")
        return cls(
            tuple(
                tuple(ONE if images[j] == i else ZERO for j in range(n))
                for i in range(n)
            ),
            _trusted=True,
        )

    @classmethod
    def column(cls, entries: Sequence) -> "CMatrix":
        return cls(tuple((cyclo(e),) for e in entries), _trusted=True)

    @classmethod
    def row_vector(cls, entries: Sequence) -> "CMatrix":
        return cls((tuple(cyclo(e) for e in entries),), _trusted=True)

    @classmethod
    def from_columns(cls, cols: Sequence["CMatrix"], nrows: int | None = None) -> "CMatrix":
        if not cols:
            if nrows is None:
                raise ValueError("nrows required for an empty column list")
            return cls(tuple(() for _ in range(nrows)), _trusted=True)
        m = cols[0].nrows
        return cls(
            tuple(tuple(c[i, 0] for c in cols) for i in range(m)), _trusted=True
        )

    @classmethod
    def block(cls, grid: Sequence[Sequence["CMatrix"]]) -> "CMatrix":
        rows = []
        for band in grid:
            height = band[0].nrows
            if any(b.nrows != height for b in band):
                raise ValueError("inconsistent block heights")
            for i in range(height):
                row: list = []
                for b in band:
                    row.extend(b._rows[i])
                rows.append(tuple(row))
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError("inconsistent block widths")
        return cls(tuple(rows), _trusted=True)

    # -- structure ----------------------------------------------------------

    @property
    def nrows(self) -> int:
        return self._m

    @property
    def ncols(self) -> int:
        return self._n

    @property
    def shape(self) -> tuple[int, int]:
        return self._m, self._n

    @property
    def rows(self) -> tuple:
        return self._rows

    def __getitem__(self, key):
        i, j = key
        return self._rows[i][j]

    def row(self, i: int) -> "CMatrix":
        return CMatrix((self._rows[i],), _trusted=True)

    def col(self, j: int) -> "CMatrix":
        return CMatrix(tuple((r[j],) for r in self._rows), _trusted=True)

    def columns(self) -> list["CMatrix"]:
        return [self.col(j) for j in range(self._n)]

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "CMatrix":
        return CMatrix(
            tuple(tuple(self._rows[i][j] for j in col_idx) for i in row_idx),
            _trusted=True,
        )

    def __eq__(self, other):
        if not isinstance(other, CMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for r in self._rows for e in r)

    @property
    def is_identity(self) -> bool:
        return self._m == self._n and self == CMatrix.identity(self._n)

    def is_hermitian(self) -> bool:
        return self._m == self._n and self == self.adjoint()

    def is_unitary(self) -> bool:
        return self._m == self._n and (self @ self.adjoint()).is_identity

    def entries_real(self) -> bool:
        return all(e.is_real for r in self._rows for e in r)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "CMatrix") -> "CMatrix":
        if not isinstance(other, CMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        return CMatrix(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self._rows, other._rows)
            ),
            _trusted=True,
        )

    def __sub__(self, other: "CMatrix") -> "CMatrix":
        return self + (-other)

    def __neg__(self) -> "CMatrix":
        return CMatrix(
            tuple(tuple(-a for a in r) for r in self._rows), _trusted=True
        )

    def scale(self, s) -> "CMatrix":
        s = cyclo(s)
        return CMatrix(
            tuple(tuple(s * a for a in r) for r in self._rows), _trusted=True
        )

    def __mul__(self, other):
        if isinstance(other, CMatrix):
            return self @ other
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __matmul__(self, other: "CMatrix") -> "CMatrix":
        if not isinstance(other, CMatrix):
            return NotImplemented
        if self._n != other._m:
            raise ValueError(
                f"shape mismatch in product: {self.shape} @ {other.shape}"
            )
        bt = tuple(zip(*other._rows)) if other._rows else ()
        out = []
        for ra in self._rows:
            row = []
            for cb in bt:
                acc = ZERO
                for a, b in zip(ra, cb):
                    if not (a.is_zero or b.is_zero):
                        acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        if not bt:
            out = [()] * self._m
        return CMatrix(tuple(out), _trusted=True)

    def __pow__(self, k: int) -> "CMatrix":
        if self._m != self._n:
            raise ValueError("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = CMatrix.identity(self._n)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def transpose(self) -> "CMatrix":
        return CMatrix(tuple(zip(*self._rows)) if self._rows else (), _trusted=True)

    def conjugate(self) -> "CMatrix":
        return CMatrix(
            tuple(tuple(a.conjugate() for a in r) for r in self._rows),
            _trusted=True,
        )

    def adjoint(self) -> "CMatrix":
        return self.transpose().conjugate()

    def kron(self, other: "CMatrix") -> "CMatrix":
        out = []
        for ra in self._rows:
            for rb in other._rows:
                out.append(tuple(a * b for a in ra for b in rb))
        return CMatrix(tuple(out), _trusted=True)

    def trace(self) -> Cyclotomic:
        if self._m != self._n:
            raise ValueError("trace of a non-square matrix")
        acc = ZERO
        for i in range(self._n):
            acc = acc + self._rows[i][i]
        return acc

    # -- elimination --------------------------------------------------------

    def rref(self) -> tuple["CMatrix", tuple[int, ...]]:
        """Reduced row echelon form and the pivot columns (both canonical)."""
        rows = [list(r) for r in self._rows]
        pivots = []
        r = 0
        for c in range(self._n):
            pivot_row = next(
                (i for i in range(r, self._m) if not rows[i][c].is_zero), None
            )
            if pivot_row is None:
                continue
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            inv = rows[r][c].inv()
            rows[r] = [inv * x for x in rows[r]]
            for i in range(self._m):
                if i != r and not rows[i][c].is_zero:
                    f = rows[i][c]
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == self._m:
                break
        return CMatrix(tuple(tuple(row) for row in rows), _trusted=True), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> "CMatrix":
        """Columns form a basis of the right kernel, each normalized so its
        first nonzero coordinate is 1."""
        red, pivots = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self._n) if c not in pivot_set]
        cols = []
        for f in free:
            v = [ZERO] * self._n
            v[f] = ONE
            for r, c in enumerate(pivots):
                v[c] = -red[r, f]
            lead = next(x for x in v if not x.is_zero)
            if lead != ONE:
                inv = lead.inv()
                v = [inv * x for x in v]
            cols.append(CMatrix.column(v))
        return CMatrix.from_columns(cols, nrows=self._n)

    def inverse(self) -> "CMatrix":
        if self._m != self._n:
            raise ValueError("inverse of a non-square matrix")
        sol = solve_linear(self, CMatrix.identity(self._n))
        return sol

    def charpoly(self) -> list[Cyclotomic]:
        """Characteristic polynomial coefficients, ascending, monic."""
        if self._m != self._n:
            raise ValueError("charpoly of a non-square matrix")
        n = self._n
        coeffs = [ZERO] * n + [ONE]
        m = CMatrix.identity(n)
        for k in range(1, n + 1):
            am = self @ m
            c = -(am.trace() / cyclo(k))
            coeffs[n - k] = c
            if k < n:
                m = am + CMatrix.identity(n).scale(c)
        return coeffs

    def det(self) -> Cyclotomic:
        if self._n == 0:
            return ONE
        c0 = self.charpoly()[0]
        return -c0 if self._n % 2 else c0

    def is_psd(self) -> bool:
        """Exact positive semidefiniteness of a hermitian matrix.

        All eigenvalues are >= 0 iff every elementary symmetric function
        of them is, and those are (+/-) the charpoly coefficients.
        """
        if not self.is_hermitian():
            raise ValueError("PSD test requires a hermitian matrix")
        coeffs = self.charpoly()
        n = self._n
        for j in range(1, n + 1):
            e_j = coeffs[n - j] if j % 2 == 0 else -coeffs[n - j]
            if e_j.real_sign() < 0:
                return False
        return True

    # -- printing -----------------------------------------------------------

    def __str__(self) -> str:
        if not self._rows:
            return "[]"
        cells = [[str(e) for e in r] for r in self._rows]
        width = max((len(c) for row in cells for c in row), default=0)
        lines = [
            "[" + ", ".join(c.rjust(width) for c in row) + "]" for row in cells
        ]
        return "[" + "\n ".join(lines) + "]"

    def __repr__(self) -> str:
        return f"CMatrix({self._m}x{self._n})"


# ---------------------------------------------------------------------------
# solving


def solve_linear(A: CMatrix, B: CMatrix | None = None) -> CMatrix:
    """Solve A X = B exactly, or return a right-kernel basis when B is None.

    The returned solution sets all free variables to zero; raises
    InconsistentSystem when no solution exists.
    """
    if B is None:
        return A.kernel()
    if A.nrows != B.nrows:
        raise ValueError("incompatible right-hand side")
    aug = CMatrix.block([[A, B]])
    red, pivots = aug.rref()
    for c in pivots:
        if c >= A.ncols:
            raise InconsistentSystem(
                "linear system has no solution (pivot in right-hand block)"
            )
    out = [[ZERO] * B.ncols for _ in range(A.ncols)]
    for r, c in enumerate(pivots):
        for j in range(B.ncols):
            out[c][j] = red[r, A.ncols + j]
    return CMatrix(tuple(tuple(row) for row in out), _trusted=True)


# ---------------------------------------------------------------------------
# joint diagonalization


def _row_space_basis(vectors: list[CMatrix]) -> list[CMatrix]:
    """RREF-canonical basis of the span of the given column vectors."""
    if not vectors:
        return []
    stacked = CMatrix(tuple(tuple(v[i, 0] for i in range(v.nrows)) for v in vectors))
    red, pivots = stacked.rref()
    return [
        CMatrix.column([red[r, j] for j in range(red.ncols)])
        for r in range(len(pivots))
    ]


def simultaneous_eigenbasis(
    mats: Sequence[CMatrix], order: int
) -> tuple[CMatrix, list[tuple[Cyclotomic, ...]]]:
    """Jointly diagonalize commuting matrices of finite multiplicative order.

    Returns (basis, eigs): the columns of `basis` are joint eigenvectors
    spanning the whole space, and eigs[j] is the tuple of eigenvalues of
    the input matrices on column j.  Eigenvalues are order-th roots of
    unity; eigenspaces are listed by ascending root-of-unity exponent
    (so the all-ones eigenvalue tuple comes first) and each eigenspace
    basis is RREF-normalized.
    """
    mats = list(mats)
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].nrows
    for a in mats:
        if a.shape != (n, n):
            raise ValueError("matrices must be square of equal size")
    for i, a in enumerate(mats):
        for b in mats[i + 1 :]:
            if a @ b != b @ a:
                raise NotCommuting("input matrices do not commute")
    roots = [zeta(order, k) for k in range(order)]
    inv_order = cyclo(QQ(1, order))
    # subspaces: list of (eigenvalue-tuple-so-far, basis column vectors)
    subspaces: list[tuple[tuple, list[CMatrix]]] = [
        ((), [CMatrix.identity(n).col(j) for j in range(n)])
    ]
    for a in mats:
        powers = [CMatrix.identity(n)]
        for _ in range(order - 1):
            powers.append(powers[-1] @ a)
        if powers[-1] @ a != CMatrix.identity(n):
            raise NotFiniteOrder(
                f"matrix does not satisfy A^{order} = I"
            )
        refined: list[tuple[tuple, list[CMatrix]]] = []
        for tag, basis in subspaces:
            images = [[p @ v for p in powers] for v in basis]
            found = 0
            for k in range(order):
                projected = []
                for img in images:
                    acc = CMatrix.zero(n, 1)
                    for j in range(order):
                        acc = acc + img[j].scale(roots[(-k * j) % order])
                    acc = acc.scale(inv_order)
                    if not acc.is_zero:
                        projected.append(acc)
                piece = _row_space_basis(projected)
                if piece:
                    refined.append((tag + (roots[k],), piece))
                    found += len(piece)
            if found != len(basis):  # pragma: no cover - internal consistency
                raise ArithmeticError("eigenspace refinement lost dimensions")
        subspaces = refined
    basis_cols: list[CMatrix] = []
    eigs: list[tuple[Cyclotomic, ...]] = []
    for tag, basis in subspaces:
        for v in basis:
            basis_cols.append(v)
            eigs.append(tag)
    return CMatrix.from_columns(basis_cols, nrows=n), eigs
