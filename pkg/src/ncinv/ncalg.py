"""Noncommutative rational expressions, polynomials, and group actions.

Expressions are immutable DAGs built through smart constructors that
apply only safe, domain-preserving normalizations (flattening, constant
folding, canonical sum order via a deterministic structural key).  No
attempt is made to decide semantic equality here -- that is the
realization module's job.
"""

from __future__ import annotations

import struct
from hashlib import blake2b
from typing import Callable, Iterable, Mapping, Sequence

from ._rat import is_rat_like, qq
from .errors import ExprSyntaxError, InconsistentSystem, SingularAtPoint, UnknownSymbol
from .field import Cyclotomic, ONE, ZERO, cyclo, parse_scalar, zeta
from .linalg import CMatrix


def _mk_key(tag: bytes, *parts: bytes) -> bytes:
    h = blake2b(digest_size=16)
    h.update(tag)
    for p in parts:
        h.update(struct.pack("<I", len(p)))
        h.update(p)
    return h.digest()


class RatExpr:
    """Base class for expression nodes; equality and hash are structural."""

    __slots__ = ("_key",)

    @property
    def key(self) -> bytes:
        return self._key

    def __eq__(self, other):
        if isinstance(other, RatExpr):
            return self._key == other._key
        return NotImplemented

    def __hash__(self):
        return hash(self._key)

    # operator sugar ---------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(_as_expr(other)))

    def __rsub__(self, other):
        return add(_as_expr(other), neg(self))

    def __neg__(self):
        return neg(self)

    def __mul__(self, other):
        if isinstance(other, RatExpr):
            return mul(self, other)
        if isinstance(other, Cyclotomic) or is_rat_like(other):
            return scale(other, self)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Cyclotomic) or is_rat_like(other):
            return scale(other, self)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return inv(self) ** (-k)
        if k == 0:
            return const(1)
        out = self
        for _ in range(k - 1):
            out = mul(out, self)
        return out

    def __str__(self):
        return _render(self, 0)

    def __repr__(self):
        return f"<{type(self).__name__} {self}>"


class Const(RatExpr):
    __slots__ = ("value",)

    def __init__(self, value: Cyclotomic):
        self.value = value
        self._key = _mk_key(b"C", str(value).encode())


class Var(RatExpr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._key = _mk_key(b"V", name.encode())


class Sum(RatExpr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        self.terms = terms
        self._key = _mk_key(b"S", *(t._key for t in terms))


class Prod(RatExpr):
    __slots__ = ("factors",)

    def __init__(self, factors: tuple):
        self.factors = factors
        self._key = _mk_key(b"P", *(f._key for f in factors))


class Scale(RatExpr):
    __slots__ = ("coeff", "body")

    def __init__(self, coeff: Cyclotomic, body: RatExpr):
        self.coeff = coeff
        self.body = body
        self._key = _mk_key(b"L", str(coeff).encode(), body._key)


class Inv(RatExpr):
    __slots__ = ("body",)

    def __init__(self, body: RatExpr):
        self.body = body
        self._key = _mk_key(b"I", body._key)


class Adj(RatExpr):
    __slots__ = ("body",)

    def __init__(self, body: RatExpr):
        self.body = body
        self._key = _mk_key(b"A", body._key)


# ---------------------------------------------------------------------------
# smart constructors

_ZERO_EXPR = Const(ZERO)
_ONE_EXPR = Const(ONE)


def _as_expr(x) -> RatExpr:
    if isinstance(x, RatExpr):
        return x
    if isinstance(x, Cyclotomic) or is_rat_like(x):
        return const(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as an expression")


def const(c) -> Const:
    c = cyclo(c)
    if c.is_zero:
        return _ZERO_EXPR
    if c == ONE:
        return _ONE_EXPR
    return Const(c)


def var(name: str) -> Var:
    return Var(name)


def add(*terms) -> RatExpr:
    flat: list[RatExpr] = []
    acc = ZERO
    for t in terms:
        t = _as_expr(t)
        if isinstance(t, Sum):
            children = t.terms
        else:
            children = (t,)
        for c in children:
            if isinstance(c, Const):
                acc = acc + c.value
            else:
                flat.append(c)
    if not acc.is_zero:
        flat.append(const(acc))
    if not flat:
        return _ZERO_EXPR
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=lambda e: e._key)
    return Sum(tuple(flat))


def mul(*factors) -> RatExpr:
    coeff = ONE
    flat: list[RatExpr] = []
    for f in factors:
        f = _as_expr(f)
        if isinstance(f, Scale):
            coeff = coeff * f.coeff
            f = f.body
        if isinstance(f, Const):
            coeff = coeff * f.value
        elif isinstance(f, Prod):
            flat.extend(f.factors)
        else:
            flat.append(f)
    if coeff.is_zero:
        return _ZERO_EXPR
    if not flat:
        return const(coeff)
    core = flat[0] if len(flat) == 1 else Prod(tuple(flat))
    return scale(coeff, core)


def scale(c, e) -> RatExpr:
    c = cyclo(c)
    e = _as_expr(e)
    if isinstance(e, Scale):
        c = c * e.coeff
        e = e.body
    if isinstance(e, Const):
        return const(c * e.value)
    if c.is_zero:
        return _ZERO_EXPR
    if c == ONE:
        return e
    return Scale(c, e)


def neg(e) -> RatExpr:
    return scale(-ONE, e)


def inv(e) -> RatExpr:
    e = _as_expr(e)
    if isinstance(e, Const) and not e.value.is_zero:
        return const(e.value.inv())
    if isinstance(e, Scale):
        return scale(e.coeff.inv(), Inv(e.body))
    return Inv(e)


def adjoint_expr(e: RatExpr, symbols: "SymbolTable | None" = None) -> RatExpr:
    """The involution fixing base letters: reverses products, conjugates
    scalars.  Symbols bound in `symbols` stay atomic under an Adj node."""
    e = _as_expr(e)
    if isinstance(e, Const):
        return const(e.value.conjugate())
    if isinstance(e, Var):
        if symbols is not None and symbols.binding(e.name) is not None:
            return Adj(e)
        return e
    if isinstance(e, Adj):
        return e.body
    if isinstance(e, Sum):
        return add(*(adjoint_expr(t, symbols) for t in e.terms))
    if isinstance(e, Prod):
        return mul(*(adjoint_expr(f, symbols) for f in reversed(e.factors)))
    if isinstance(e, Scale):
        return scale(e.coeff.conjugate(), adjoint_expr(e.body, symbols))
    if isinstance(e, Inv):
        return inv(adjoint_expr(e.body, symbols))
    raise TypeError(type(e).__name__)  # pragma: no cover


adj = adjoint_expr


# ---------------------------------------------------------------------------
# symbol tables


_IDENT_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


def _valid_ident(name: str) -> bool:
    return bool(name) and name[0].isalpha() and all(ch in _IDENT_OK for ch in name)


class SymbolTable:
    """Ordered symbol declarations with optional bindings to expressions.

    Unbound symbols are the base alphabet; bound ones are derived
    generators (a = x + y and the like).
    """

    def __init__(self, names: Iterable[str] = ()):
        self._names: list[str] = []
        self._bindings: dict[str, RatExpr | None] = {}
        for n in names:
            self.declare(n)

    def declare(self, name: str, binding: RatExpr | None = None) -> str:
        if not _valid_ident(name):
            raise ValueError(f"invalid symbol name {name!r}")
        if name in self._bindings:
            raise ValueError(f"symbol {name!r} already declared")
        self._names.append(name)
        self._bindings[name] = binding
        return name

    def __contains__(self, name: str) -> bool:
        return name in self._bindings

    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def base_names(self) -> tuple[str, ...]:
        return tuple(n for n in self._names if self._bindings[n] is None)

    def binding(self, name: str) -> RatExpr | None:
        return self._bindings.get(name)

    def index(self, name: str) -> int:
        return self._names.index(name)

    def copy(self) -> "SymbolTable":
        out = SymbolTable()
        out._names = list(self._names)
        out._bindings = dict(self._bindings)
        return out


# ---------------------------------------------------------------------------
# evaluation


def eval_expr(
    e: RatExpr,
    point: Mapping[str, CMatrix],
    symbols: SymbolTable | None = None,
    size: int | None = None,
) -> CMatrix:
    """Evaluate at a tuple of square matrices of common size.

    Derived symbols absent from the point are resolved through their
    bindings; a value given directly for a bound symbol wins.  Raises
    SingularAtPoint (carrying the offending node) when an Inverse node
    meets a singular matrix -- the point is outside the domain.
    """
    if size is None:
        for v in point.values():
            size = v.nrows
            break
        else:
            size = 1
    n = size
    eye = CMatrix.identity(n)
    memo: dict[int, CMatrix] = {}

    def rec(node: RatExpr) -> CMatrix:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Const):
            val = eye.scale(node.value)
        elif isinstance(node, Var):
            if node.name in point:
                val = point[node.name]
                if val.shape != (n, n):
                    raise ValueError(
                        f"value for {node.name} has shape {val.shape}, expected {(n, n)}"
                    )
            else:
                binding = symbols.binding(node.name) if symbols else None
                if binding is None:
                    raise UnknownSymbol(f"no value or binding for symbol {node.name!r}")
                val = rec(binding)
        elif isinstance(node, Sum):
            val = rec(node.terms[0])
            for t in node.terms[1:]:
                val = val + rec(t)
        elif isinstance(node, Prod):
            val = rec(node.factors[0])
            for f in node.factors[1:]:
                val = val @ rec(f)
        elif isinstance(node, Scale):
            val = rec(node.body).scale(node.coeff)
        elif isinstance(node, Inv):
            body = rec(node.body)
            try:
                val = body.inverse()
            except InconsistentSystem:
                raise SingularAtPoint(
                    "inverse of a singular matrix at this evaluation point",
                    node=node,
                ) from None
        elif isinstance(node, Adj):
            val = rec(node.body).adjoint()
        else:  # pragma: no cover
            raise TypeError(type(node).__name__)
        memo[id(node)] = val
        return val

    return rec(e)


# ---------------------------------------------------------------------------
# group action


def expand_bindings(e: RatExpr, symbols: SymbolTable | None) -> RatExpr:
    """Replace every bound symbol by its binding, recursively; Adj nodes
    are pushed through once their bodies are over base letters."""
    if symbols is None:
        return e
    memo: dict[int, RatExpr] = {}

    def rec(node: RatExpr) -> RatExpr:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Var):
            binding = symbols.binding(node.name)
            out = rec(binding) if binding is not None else node
        elif isinstance(node, (Const,)):
            out = node
        elif isinstance(node, Sum):
            out = add(*(rec(t) for t in node.terms))
        elif isinstance(node, Prod):
            out = mul(*(rec(f) for f in node.factors))
        elif isinstance(node, Scale):
            out = scale(node.coeff, rec(node.body))
        elif isinstance(node, Inv):
            out = inv(rec(node.body))
        elif isinstance(node, Adj):
            out = adjoint_expr(rec(node.body))
        else:  # pragma: no cover
            raise TypeError(type(node).__name__)
        memo[id(node)] = out
        return out

    return rec(e)


def act(
    g: CMatrix,
    e: RatExpr,
    alphabet: Sequence[str],
    symbols: SymbolTable | None = None,
) -> RatExpr:
    """Apply the linear substitution x_i -> sum_j g[i,j] x_j.

    Derived symbols are expanded through their bindings first.  Note the
    composition rule act(g, act(h, e)) = act(h*g, e).
    """
    alphabet = list(alphabet)
    index = {name: i for i, name in enumerate(alphabet)}
    d = len(alphabet)
    if g.shape != (d, d):
        raise ValueError(f"action matrix is {g.shape}, alphabet has {d} letters")
    e = expand_bindings(e, symbols)
    images = [
        add(
            *(
                scale(g[i, j], Var(alphabet[j]))
                for j in range(d)
                if not g[i, j].is_zero
            )
        )
        for i in range(d)
    ]
    memo: dict[int, RatExpr] = {}

    def rec(node: RatExpr) -> RatExpr:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Const):
            out = node
        elif isinstance(node, Var):
            if node.name not in index:
                raise UnknownSymbol(
                    f"symbol {node.name!r} is not in the action alphabet"
                )
            out = images[index[node.name]]
        elif isinstance(node, Sum):
            out = add(*(rec(t) for t in node.terms))
        elif isinstance(node, Prod):
            out = mul(*(rec(f) for f in node.factors))
        elif isinstance(node, Scale):
            out = scale(node.coeff, rec(node.body))
        elif isinstance(node, Inv):
            out = inv(rec(node.body))
        else:  # pragma: no cover - Adj is gone after expansion
            raise TypeError(type(node).__name__)
        memo[id(node)] = out
        return out

    return rec(e)


# ---------------------------------------------------------------------------
# printing

_SUM_CTX, _PROD_CTX = 0, 1


def _render(e: RatExpr, ctx: int) -> str:
    if isinstance(e, Const):
        s = str(e.value)
        if ctx >= _PROD_CTX and (" " in s or s.startswith("-")):
            return f"({s})"
        return s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Inv):
        return f"inv({_render(e.body, _SUM_CTX)})"
    if isinstance(e, Adj):
        return f"adj({_render(e.body, _SUM_CTX)})"
    if isinstance(e, Prod):
        s = "*".join(_render(f, _PROD_CTX) for f in e.factors)
        return s
    if isinstance(e, Scale):
        if e.coeff == -ONE:
            body = _render(e.body, _PROD_CTX)
            s = f"-{body}"
            return f"({s})" if ctx >= _PROD_CTX else s
        cs = str(e.coeff)
        if " " in cs or cs.startswith("-"):
            cs = f"({cs})"
        return f"{cs}*{_render(e.body, _PROD_CTX)}"
    if isinstance(e, Sum):
        parts = [_render(t, _SUM_CTX) for t in e.terms]
        out = parts[0]
        for p in parts[1:]:
            if p.startswith("-") and not p.startswith("-("):
                out += f" - {p[1:]}"
            elif p.startswith("-"):
                out += f" + {p}"
            else:
                out += f" + {p}"
        return f"({out})" if ctx >= _PROD_CTX else out
    raise TypeError(type(e).__name__)  # pragma: no cover


# ---------------------------------------------------------------------------
# parsing

_KEYWORDS = {"inv", "adj"}


def _tokenize_expr(text: str):
    i, size = 0, len(text)
    while i < size:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < size and text[j].isdigit():
                j += 1
            yield ("int", int(text[i:j]), i)
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < size and text[j] in _IDENT_OK:
                j += 1
            yield ("ident", text[i:j], i)
            i = j
            continue
        if ch in "+-*/^()":
            yield (ch, ch, i)
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", pos=i)
    yield ("end", None, size)


class _ExprParser:
    def __init__(self, text: str, symbols: SymbolTable):
        self._toks = list(_tokenize_expr(text))
        self._pos = 0
        self._symbols = symbols

    def peek(self):
        return self._toks[self._pos]

    def take(self, kind: str | None = None):
        tok = self._toks[self._pos]
        if kind is not None and tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind}, found {tok[0]}", pos=tok[2])
        self._pos += 1
        return tok

    def parse(self) -> RatExpr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError("trailing input", pos=tok[2])
        return e

    def expr(self) -> RatExpr:
        e = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            t = self.term()
            e = add(e, t if op == "+" else neg(t))
        return e

    def term(self) -> RatExpr:
        e = self.factor()
        while self.peek()[0] == "*":
            self.take()
            e = mul(e, self.factor())
        return e

    def factor(self) -> RatExpr:
        if self.peek()[0] == "-":
            self.take()
            return neg(self.factor())
        e = self.atom()
        if self.peek()[0] == "^":
            self.take()
            negative = False
            if self.peek()[0] == "-":
                self.take()
                negative = True
            k = int(self.take("int")[1])
            e = e ** (-k if negative else k)
        return e

    def atom(self) -> RatExpr:
        kind, value, pos = self.peek()
        if kind == "int":
            self.take()
            if self.peek()[0] == "/":
                self.take()
                den = int(self.take("int")[1])
                if den == 0:
                    raise ExprSyntaxError("zero denominator", pos=pos)
                return const(qq(value) / qq(den))
            return const(value)
        if kind == "ident":
            self.take()
            if value in _KEYWORDS:
                self.take("(")
                body = self.expr()
                self.take(")")
                return inv(body) if value == "inv" else adjoint_expr(
                    body, self._symbols
                )
            if value in self._symbols:
                return Var(value)
            if value[0] == "z" and value[1:].isdigit():
                return const(zeta(int(value[1:])))
            raise UnknownSymbol(f"undeclared symbol {value!r}")
        if kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        raise ExprSyntaxError(f"unexpected token {kind}", pos=pos)


def parse_expr(text: str, symbols: SymbolTable | Sequence[str]) -> RatExpr:
    """Parse the expression grammar over a declared alphabet.

    Grammar: sums of products of factors; a factor is an atom optionally
    raised to an integer power (^-1 is inverse), and atoms are scalars
    (cyclotomic literal syntax), declared symbols, parenthesized
    expressions, or inv(...)/adj(...) calls.  An undeclared ident of the
    shape z<N> is the root of unity zeta_N; declared symbols shadow it.
    """
    if not isinstance(symbols, SymbolTable):
        symbols = SymbolTable(symbols)
    return _ExprParser(text, symbols).parse()


# ---------------------------------------------------------------------------
# noncommutative polynomials


class NcPoly:
    """Polynomial in noncommuting variables with cyclotomic coefficients.

    Terms map words (tuples of letter indices) to nonzero coefficients.
    """

    __slots__ = ("_d", "_terms")

    def __init__(self, d: int, terms: Mapping[tuple, object] | None = None):
        self._d = d
        clean: dict[tuple, Cyclotomic] = {}
        if terms:
            for w, c in terms.items():
                c = cyclo(c)
                if not c.is_zero:
                    clean[tuple(w)] = c
        self._terms = clean

    @classmethod
    def zero(cls, d: int) -> "NcPoly":
        return cls(d)

    @classmethod
    def one(cls, d: int) -> "NcPoly":
        return cls(d, {(): ONE})

    @classmethod
    def variable(cls, i: int, d: int) -> "NcPoly":
        if not 0 <= i < d:
            raise ValueError("variable index out of range")
        return cls(d, {(i,): ONE})

    @property
    def d(self) -> int:
        return self._d

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self._d == other._d and self._terms == other._terms

    def __hash__(self):
        return hash((self._d, frozenset(self._terms.items())))

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for w, c in other._terms.items():
            s = out.get(w, ZERO) + c
            if s.is_zero:
                out.pop(w, None)
            else:
                out[w] = s
        return NcPoly(self._d, out)

    __radd__ = __add__

    def __neg__(self):
        return NcPoly(self._d, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict[tuple, Cyclotomic] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                s = out.get(w, ZERO) + c1 * c2
                if s.is_zero:
                    out.pop(w, None)
                else:
                    out[w] = s
        return NcPoly(self._d, out)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomial")
        out = NcPoly.one(self._d)
        for _ in range(k):
            out = out * self
        return out

    def _coerce(self, other) -> "NcPoly | None":
        if isinstance(other, NcPoly):
            if other._d != self._d:
                raise ValueError("alphabet size mismatch")
            return other
        if isinstance(other, Cyclotomic) or is_rat_like(other):
            return NcPoly(self._d, {(): cyclo(other)})
        return None

    def adjoint(self) -> "NcPoly":
        return NcPoly(
            self._d,
            {tuple(reversed(w)): c.conjugate() for w, c in self._terms.items()},
        )

    def act(self, g: CMatrix) -> "NcPoly":
        """Exact expansion of the substitution x_i -> sum_j g[i,j] x_j."""
        if g.shape != (self._d, self._d):
            raise ValueError("action matrix size mismatch")
        out: dict[tuple, Cyclotomic] = {}
        for word, coeff in self._terms.items():
            partial = {(): coeff}
            for letter in word:
                grown: dict[tuple, Cyclotomic] = {}
                for w, c in partial.items():
                    for j in range(self._d):
                        gij = g[letter, j]
                        if gij.is_zero:
                            continue
                        key = w + (j,)
                        s = grown.get(key, ZERO) + c * gij
                        if s.is_zero:
                            grown.pop(key, None)
                        else:
                            grown[key] = s
                partial = grown
            for w, c in partial.items():
                s = out.get(w, ZERO) + c
                if s.is_zero:
                    out.pop(w, None)
                else:
                    out[w] = s
        return NcPoly(self._d, out)

    def to_expr(self, names: Sequence[str]) -> RatExpr:
        if len(names) != self._d:
            raise ValueError("need one name per letter")
        terms = []
        for w in sorted(self._terms, key=lambda w: (len(w), w)):
            c = self._terms[w]
            terms.append(scale(c, mul(*(Var(names[i]) for i in w))))
        return add(*terms)

    def __str__(self):
        if not self._terms:
            return "0"
        bits = []
        for w in sorted(self._terms, key=lambda w: (len(w), w)):
            c = self._terms[w]
            mono = "*".join(f"x{i}" for i in w) if w else "1"
            bits.append(f"({c})*{mono}")
        return " + ".join(bits)

    def __repr__(self):
        return f"NcPoly({self})"
