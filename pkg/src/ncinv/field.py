"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Values are kept in the power basis zeta_N^0 .. zeta_N^(phi(N)-1) reduced
modulo the N-th cyclotomic polynomial, with N always the minimal
conductor of the value (in particular N is never congruent to 2 mod 4).
This makes equality structural and hashing cheap, which the rest of the
package leans on for canonical orderings.
"""

from __future__ import annotations

import functools
from typing import Iterator, Sequence

import mpmath

from ._rat import QQ, QQ_ONE, QQ_ZERO, is_rat_like, qq
from .errors import ExprSyntaxError


# ---------------------------------------------------------------------------
# integer / polynomial helpers


@functools.lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 as ((p, multiplicity), ...) ascending."""
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    out = 1
    for p, e in factorize(n):
        out *= (p - 1) * p ** (e - 1)
    return out


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (ascending coefficients)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c // den[-1]
        if c:
            for j, d in enumerate(den):
                num[k + j] -= out[k] * d
    return out


@functools.lru_cache(maxsize=None)
def _cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, ascending, monic, length phi(n)+1."""
    if n == 1:
        return (-1, 1)
    num = [0] * (n + 1)
    num[0], num[n] = -1, 1
    for d in range(1, n):
        if n % d == 0:
            num = _poly_div_exact(num, list(_cyclotomic_poly(d)))
    return tuple(num)


@functools.lru_cache(maxsize=None)
def _reduction_rows(n: int) -> tuple[tuple[int, ...], ...]:
    """Row e-phi(n) holds the coefficients of zeta_n^e reduced mod Phi_n."""
    phi = euler_phi(n)
    poly = _cyclotomic_poly(n)
    cur = [-c for c in poly[:phi]]
    rows = [tuple(cur)]
    for _ in range(phi + 1, n):
        top = cur[phi - 1]
        cur = [0] + cur[: phi - 1]
        if top:
            cur = [c + top * r for c, r in zip(cur, rows[0])]
        rows.append(tuple(cur))
    return tuple(rows)


def _reduce_mod_phi(n: int, coeffs: Sequence) -> list:
    """Reduce an exponent vector (any length) to the power basis of Q(zeta_n)."""
    folded = [QQ_ZERO] * n
    for e, c in enumerate(coeffs):
        if c:
            folded[e % n] += c
    if n == 1:
        return [folded[0]]
    phi = euler_phi(n)
    rows = _reduction_rows(n)
    out = folded[:phi]
    for e in range(phi, n):
        c = folded[e]
        if c:
            for j, r in enumerate(rows[e - phi]):
                if r:
                    out[j] += c * r
    return out


def _fold_twice_odd(n: int, coeffs: Sequence) -> tuple[int, list]:
    """Rewrite an exponent vector at conductor n = 2m (m odd) to conductor m."""
    m = n // 2
    half = (m + 1) // 2
    out = [QQ_ZERO] * m
    for i, c in enumerate(coeffs):
        if c:
            j = (i * half) % m
            if i % 2:
                out[j] -= c
            else:
                out[j] += c
    return m, out


def _galois_apply(n: int, vec: Sequence, a: int) -> list:
    out = [QQ_ZERO] * n
    for i, c in enumerate(vec):
        if c:
            out[(a * i) % n] += c
    return _reduce_mod_phi(n, out)


@functools.lru_cache(maxsize=None)
def _primitive_root(p: int) -> int:
    order = p - 1
    fac = [q for q, _ in factorize(order)]
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in fac):
            return g
    raise ValueError(f"no primitive root mod {p}")


def _descend_trace(n: int, p: int, vec: Sequence) -> list:
    """Express a Gal-fixed value at conductor n = p*n' (p odd, p not | n') at n'."""
    sub = n // p
    k0 = (-pow(sub, -1, p)) % p
    a0 = (1 + k0 * sub) % n
    scale = QQ(1, p - 1)
    out = [QQ_ZERO] * sub
    for i, c in enumerate(vec):
        if not c:
            continue
        if i % p == 0:
            out[(i // p) % sub] += c
        else:
            out[(i * a0 % n) // p] -= c * scale
    return _reduce_mod_phi(sub, out)


def _minimize(n: int, vec: list) -> tuple[int, tuple]:
    """Shrink (n, vec) to the minimal conductor representation."""
    while n > 1:
        if not any(vec):
            return 1, (QQ_ZERO,)
        progressed = False
        for p, _ in factorize(n):
            sub = n // p
            if euler_phi(n) == p * euler_phi(sub):
                # The subfield power basis is coordinate-aligned: membership
                # means vanishing of every coordinate off the p-grid.
                if all(not vec[i] for i in range(len(vec)) if i % p):
                    vec = [vec[i] for i in range(0, len(vec), p)]
                    n = sub
                    if n % 4 == 2:
                        n, folded = _fold_twice_odd(n, vec)
                        vec = _reduce_mod_phi(n, folded)
                    progressed = True
                    break
            elif p != 2:
                g = _primitive_root(p)
                a1 = (1 + sub * ((g - 1) * pow(sub, -1, p) % p)) % n
                if _galois_apply(n, vec, a1) == list(vec):
                    vec = _descend_trace(n, p, vec)
                    n = sub
                    progressed = True
                    break
        if not progressed:
            break
    return n, tuple(vec)


# ---------------------------------------------------------------------------
# the scalar type


class Cyclotomic:
    """An element of some Q(zeta_N), stored at its minimal conductor."""

    __slots__ = ("_n", "_c")

    def __init__(self, conductor: int, coeffs: tuple, _trusted: bool = False):
        if not _trusted:
            other = cyclo_normalize(conductor, coeffs)
            conductor, coeffs = other._n, other._c
        self._n = conductor
        self._c = coeffs

    # -- structure ----------------------------------------------------------

    @property
    def conductor(self) -> int:
        return self._n

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def is_zero(self) -> bool:
        return self._n == 1 and not self._c[0]

    @property
    def is_rational(self) -> bool:
        return self._n == 1

    def as_rational(self) -> QQ:
        if self._n != 1:
            raise ValueError(f"{self} is not rational")
        return self._c[0]

    @property
    def is_real(self) -> bool:
        return self.conjugate() == self

    def sort_key(self):
        return (self._n, self._c)

    def __hash__(self):
        if self._n == 1:
            return hash(self._c[0])
        return hash((self._n, self._c))

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            return self._n == other._n and self._c == other._c
        if is_rat_like(other):
            return self._n == 1 and self._c[0] == qq(other)
        return NotImplemented

    def __bool__(self):
        return not self.is_zero

    # -- arithmetic ---------------------------------------------------------

    def _joined(self, other: "Cyclotomic") -> tuple[int, list, list]:
        n1, n2 = self._n, other._n
        if n1 == n2:
            return n1, list(self._c), list(other._c)
        lcm = n1 * n2 // _gcd(n1, n2)
        return lcm, _embed(self, lcm), _embed(other, lcm)

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self._n == 1 and other._n == 1:
            return _rat(self._c[0] + other._c[0])
        n, a, b = self._joined(other)
        vec = [x + y for x, y in zip(a, b)]
        return Cyclotomic(*_minimize(n, vec), _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self._n, tuple(-c for c in self._c), _trusted=True)

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self._n == 1:
            q = self._c[0]
            if not q:
                return ZERO
            if other._n == 1:
                return _rat(q * other._c[0])
            return Cyclotomic(other._n, tuple(q * c for c in other._c), _trusted=True)
        if other._n == 1:
            q = other._c[0]
            if not q:
                return ZERO
            return Cyclotomic(self._n, tuple(q * c for c in self._c), _trusted=True)
        n, a, b = self._joined(other)
        prod = [QQ_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        vec = _reduce_mod_phi(n, prod)
        return Cyclotomic(*_minimize(n, vec), _trusted=True)

    __rmul__ = __mul__

    def inv(self) -> "Cyclotomic":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero cyclotomic")
        if self._n == 1:
            return _rat(QQ_ONE / self._c[0])
        vec = _poly_invmod(list(self._c), self._n)
        return Cyclotomic(*_minimize(self._n, vec), _trusted=True)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inv() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base_needed = k >> 1
            if base_needed:
                base = base * base
            k = base_needed
        return result

    def conjugate(self) -> "Cyclotomic":
        if self._n == 1:
            return self
        vec = _galois_apply(self._n, self._c, self._n - 1)
        return Cyclotomic(self._n, tuple(vec), _trusted=True)

    # -- numerics (sanity checks and sign fixing only) ----------------------

    def _interval(self, prec: int, fn) -> tuple:
        ctx = mpmath.iv
        old = ctx.prec
        try:
            ctx.prec = prec
            total = ctx.mpf(0)
            two_pi = 2 * ctx.pi
            for k, c in enumerate(self._c):
                if c:
                    angle = two_pi * k / self._n
                    total += fn(ctx, angle) * ctx.mpf(int(c.numerator)) / ctx.mpf(
                        int(c.denominator)
                    )
            return total.a, total.b
        finally:
            ctx.prec = old

    def interval_re(self, prec: int = 64):
        return self._interval(prec, lambda ctx, t: ctx.cos(t))

    def interval_im(self, prec: int = 64):
        return self._interval(prec, lambda ctx, t: ctx.sin(t))

    def real_sign(self) -> int:
        """Sign of a real value, certified by interval arithmetic."""
        if self.is_zero:
            return 0
        if not self.is_real:
            raise ValueError(f"{self} is not real")
        prec = 64
        while True:
            lo, hi = self.interval_re(prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2
            if prec > 1 << 16:  # pragma: no cover - defensive
                raise ArithmeticError(f"sign of {self} not separable from 0")

    def as_root_of_unity(self, e: int) -> int | None:
        """Exponent k with self = zeta_e^k, or None."""
        return _root_powers(e).get(self)

    # -- printing -----------------------------------------------------------

    def __str__(self) -> str:
        if self._n == 1:
            return _format_rat(self._c[0])
        parts = []
        for k, c in enumerate(self._c):
            if not c:
                continue
            if k == 0:
                body = _format_rat(abs(c))
            else:
                power = f"z{self._n}" if k == 1 else f"z{self._n}^{k}"
                if abs(c) == 1:
                    body = power
                else:
                    body = f"{_format_rat(abs(c))}*{power}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Cyclotomic({self})"


def _format_rat(q: QQ) -> str:
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _embed(v: Cyclotomic, target: int) -> list:
    step = target // v._n
    out = [QQ_ZERO] * target
    for i, c in enumerate(v._c):
        if c:
            out[i * step] += c
    return _reduce_mod_phi(target, out)


def _poly_invmod(vec: list, n: int) -> list:
    """Inverse of vec modulo Phi_n over Q via extended Euclid."""
    modulus = [qq(c) for c in _cyclotomic_poly(n)]
    r0, r1 = modulus, _trim(vec)
    s0, s1 = [QQ_ZERO], [QQ_ONE]
    while len(r1) > 1:
        q, rem = _poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if not r1 or not r1[0]:
        raise ZeroDivisionError("value is zero modulo the cyclotomic polynomial")
    c = r1[0]
    inv = [x / c for x in s1]
    return _reduce_mod_phi(n, inv)


def _trim(p: list) -> list:
    while len(p) > 1 and not p[-1]:
        p = p[:-1]
    return list(p)


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    db, lead = len(b) - 1, b[-1]
    if db == 0:
        return [x / lead for x in a], [QQ_ZERO]
    q = [QQ_ZERO] * max(len(a) - db, 1)
    for k in range(len(a) - db - 1, -1, -1):
        coeff = a[k + db] / lead
        q[k] = coeff
        if coeff:
            for j, bj in enumerate(b):
                a[k + j] -= coeff * bj
    return q, _trim(a[:db])


def _poly_mul(a: list, b: list) -> list:
    out = [QQ_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _trim(out)


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = a + [QQ_ZERO] * (n - len(a))
    b = b + [QQ_ZERO] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


# ---------------------------------------------------------------------------
# constructors

ZERO = Cyclotomic(1, (QQ_ZERO,), _trusted=True)
ONE = Cyclotomic(1, (QQ_ONE,), _trusted=True)


def _rat(q: QQ) -> Cyclotomic:
    return Cyclotomic(1, (q,), _trusted=True)


def _coerce(x) -> Cyclotomic | None:
    if isinstance(x, Cyclotomic):
        return x
    if is_rat_like(x):
        return _rat(qq(x))
    return None


def cyclo(x) -> Cyclotomic:
    """Coerce an int / rational / Cyclotomic to Cyclotomic."""
    v = _coerce(x)
    if v is None:
        raise TypeError(f"cannot coerce {type(x).__name__} to Cyclotomic")
    return v


def cyclo_normalize(conductor: int, coeffs: Sequence) -> Cyclotomic:
    """Canonicalize a raw (conductor, exponent-coefficient sequence) pair.

    The sequence assigns coefficient coeffs[i] to zeta_conductor^i; any
    length is accepted (exponents are folded mod the conductor).
    """
    if conductor < 1:
        raise ValueError("conductor must be >= 1")
    folded = [QQ_ZERO] * conductor
    for e, c in enumerate(coeffs):
        c = qq(c)
        if c:
            folded[e % conductor] += c
    n = conductor
    if n % 4 == 2:
        n, folded = _fold_twice_odd(n, folded)
    vec = _reduce_mod_phi(n, folded)
    return Cyclotomic(*_minimize(n, vec), _trusted=True)


def zeta(n: int, k: int = 1) -> Cyclotomic:
    """The root of unity zeta_n^k."""
    k %= n
    return cyclo_normalize(n, [0] * k + [1])


@functools.lru_cache(maxsize=None)
def _root_powers(e: int) -> dict:
    out = {}
    w = zeta(e)
    cur = ONE
    for k in range(e):
        out.setdefault(cur, k)
        cur = cur * w
    return out


@functools.lru_cache(maxsize=None)
def sqrt_nat(n: int) -> Cyclotomic:
    """The positive square root of a natural number, as a cyclotomic.

    Built from quadratic Gauss sums over the odd prime factors (and
    zeta_8 + zeta_8^-1 for 2), so the conductor divides 4n; the branch is
    fixed by certified interval embedding.
    """
    if n < 1:
        raise ValueError("sqrt_nat requires n >= 1")
    out = ONE
    for p, e in factorize(n):
        if e // 2:
            out = out * cyclo(p ** (e // 2))
        if e % 2:
            out = out * _sqrt_prime(p)
    return out


@functools.lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> Cyclotomic:
    if p == 2:
        cand = zeta(8) + zeta(8, 7)
    else:
        gauss = ZERO
        for a in range(1, p):
            legendre = 1 if pow(a, (p - 1) // 2, p) == 1 else -1
            gauss = gauss + legendre * zeta(p, a)
        if p % 4 == 1:
            cand = gauss
        else:
            cand = gauss * zeta(4, 3)
    if cand.real_sign() < 0:
        cand = -cand
    if cand * cand != cyclo(p):  # pragma: no cover - internal consistency
        raise ArithmeticError(f"Gauss sum construction failed for {p}")
    return cand


# ---------------------------------------------------------------------------
# scalar literal syntax: `a/b` rationals, z<N> for zeta_N, e.g. 1/2*z8^3 - 1/2*z8


def _tokenize_scalar(text: str) -> Iterator[tuple[str, object, int]]:
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
        if ch == "z" and i + 1 < size and text[i + 1].isdigit():
            j = i + 1
            while j < size and text[j].isdigit():
                j += 1
            yield ("zeta", int(text[i + 1 : j]), i)
            i = j
            continue
        if ch in "+-*/^()":
            yield (ch, ch, i)
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", pos=i)
    yield ("end", None, size)


class _ScalarParser:
    def __init__(self, text: str):
        self._toks = list(_tokenize_scalar(text))
        self._pos = 0

    def peek(self):
        return self._toks[self._pos]

    def take(self, kind: str | None = None):
        tok = self._toks[self._pos]
        if kind is not None and tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind}, found {tok[0]}", pos=tok[2])
        self._pos += 1
        return tok

    def parse(self) -> Cyclotomic:
        v = self.sum()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError("trailing input", pos=tok[2])
        return v

    def sum(self) -> Cyclotomic:
        v = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self) -> Cyclotomic:
        v = self.factor()
        while self.peek()[0] in "*/":
            op = self.take()[0]
            w = self.factor()
            if op == "/":
                if w.is_zero:
                    raise ExprSyntaxError("division by zero in scalar literal")
                v = v / w
            else:
                v = v * w
        return v

    def factor(self) -> Cyclotomic:
        if self.peek()[0] == "-":
            self.take()
            return -self.factor()
        v = self.atom()
        if self.peek()[0] == "^":
            self.take()
            negative = False
            if self.peek()[0] == "-":
                self.take()
                negative = True
            k = int(self.take("int")[1])
            v = v ** (-k if negative else k)
        return v

    def atom(self) -> Cyclotomic:
        kind, value, pos = self.peek()
        if kind == "int":
            self.take()
            return cyclo(value)
        if kind == "zeta":
            self.take()
            if value < 1:
                raise ExprSyntaxError("zeta index must be >= 1", pos=pos)
            return zeta(value)
        if kind == "(":
            self.take()
            v = self.sum()
            self.take(")")
            return v
        raise ExprSyntaxError(f"unexpected token {kind}", pos=pos)


def parse_scalar(text: str) -> Cyclotomic:
    """Parse the scalar literal syntax; inverse of str() on Cyclotomic."""
    return _ScalarParser(text).parse()
