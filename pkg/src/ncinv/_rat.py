"""Rational scalar substrate: gmpy2.mpq when available, fractions.Fraction otherwise."""

from __future__ import annotations

try:
    from gmpy2 import mpq as QQ

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as QQ

    HAVE_GMPY2 = False

QQ_ZERO = QQ(0)
QQ_ONE = QQ(1)


def qq(x) -> QQ:
    """Coerce an int / rational-like value to the canonical rational type."""
    if isinstance(x, QQ):
        return x
    if isinstance(x, int):
        return QQ(x)
    # fractions.Fraction instances (or gmpy2.mpq under the fallback) expose
    # numerator/denominator; floats are rejected to keep arithmetic exact.
    num = getattr(x, "numerator", None)
    den = getattr(x, "denominator", None)
    if num is not None and den is not None and not isinstance(x, float):
        return QQ(int(num), int(den))
    raise TypeError(f"cannot coerce {type(x).__name__} to an exact rational")


def is_rat_like(x) -> bool:
    if isinstance(x, (int, QQ)):
        return True
    return (
        not isinstance(x, float)
        and hasattr(x, "numerator")
        and hasattr(x, "denominator")
        and not hasattr(x, "conductor")
    )
