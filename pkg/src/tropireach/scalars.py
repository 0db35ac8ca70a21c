"""Exact scalar carriers for max-plus arithmetic.

Finite values are plain ``int`` or ``fractions.Fraction`` (ints are kept as
ints; a Fraction with denominator 1 collapses to int).  The two infinities are
distinct singleton objects, not sentinel numbers: ``EPS`` is minus infinity
(the max-plus zero) and ``INF`` is plus infinity (used only by difference
bounds, never inside max-plus vectors).

Both singletons implement rich comparisons against ints and Fractions, so
``max``, ``min`` and ``sorted`` work directly on mixed values.  They do not
implement ``+``: every addition convention involving infinities is explicit
in the operation that needs it (``mp_mul``, ``bound_add``), which keeps the
conflicting -inf-absorbing and +inf-dominating rules from colliding.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union


class _NegInf:
    """Minus infinity: the max-plus zero element."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "-inf"

    def __lt__(self, other: object) -> bool:
        return other is not self

    def __le__(self, other: object) -> bool:
        return True

    def __gt__(self, other: object) -> bool:
        return False

    def __ge__(self, other: object) -> bool:
        return other is self

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("tropireach.-inf")

    def __reduce__(self):  # keep the singleton under pickling
        return (_neg_inf_instance, ())


class _PosInf:
    """Plus infinity: the neutral difference bound magnitude."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "inf"

    def __lt__(self, other: object) -> bool:
        return False

    def __le__(self, other: object) -> bool:
        return other is self

    def __gt__(self, other: object) -> bool:
        return other is not self

    def __ge__(self, other: object) -> bool:
        return True

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("tropireach.+inf")

    def __reduce__(self):
        return (_pos_inf_instance, ())


EPS = _NegInf()
INF = _PosInf()


def _neg_inf_instance() -> _NegInf:
    return EPS


def _pos_inf_instance() -> _PosInf:
    return INF


#: A max-plus scalar: a finite rational or -inf.
Scalar = Union[int, Fraction, _NegInf]

#: A difference-bound magnitude: a finite rational or either infinity.
ExtScalar = Union[int, Fraction, _NegInf, _PosInf]


def is_finite(x: ExtScalar) -> bool:
    return x is not EPS and x is not INF


def as_scalar(value: object) -> Scalar:
    """Coerce ``value`` into an exact max-plus scalar.

    Accepts int, Fraction, the EPS singleton, and strings: an integer
    literal, ``"p/q"``, or ``"-inf"``.  Floats are rejected; exactness is a
    hard requirement and callers must spell rationals as fractions.
    """
    if value is EPS:
        return EPS
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value if value.denominator != 1 else int(value)
    if isinstance(value, float):
        raise TypeError(f"floats are not exact; write {value!r} as 'p/q'")
    if isinstance(value, str):
        text = value.strip()
        if text in ("-inf", "-Inf", "-INF"):
            return EPS
        try:
            frac = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad scalar literal {value!r}") from exc
        return frac if frac.denominator != 1 else int(frac)
    raise TypeError(f"cannot interpret {type(value).__name__} as a scalar")


def format_scalar(x: ExtScalar) -> str:
    """Render a scalar the way problem/result files spell it."""
    if x is EPS:
        return "-inf"
    if x is INF:
        return "inf"
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def scalar_to_json(x: Scalar) -> object:
    """JSON form: ints stay numbers, everything else is a string."""
    if x is EPS:
        return "-inf"
    if isinstance(x, int):
        return x
    return f"{x.numerator}/{x.denominator}"


def sort_key(x: ExtScalar) -> tuple:
    """A total-order key usable across ints, Fractions and infinities."""
    if x is EPS:
        return (0, 0, 0)
    if x is INF:
        return (2, 0, 0)
    return (1, Fraction(x), 0)
