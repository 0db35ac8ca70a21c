"""Max-plus (tropical) vectors and matrices with exact rational entries.

The semiring is (Q u {-inf}, max, +): addition is max with neutral element
EPS, multiplication is + with neutral element 0 and EPS absorbing.  Vectors
are plain tuples of scalars and matrices are tuples of row tuples; both are
immutable and hashable so generator sets can be deduplicated directly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .scalars import EPS, Scalar, as_scalar, sort_key

Vector = tuple  # tuple[Scalar, ...]
Matrix = tuple  # tuple[tuple[Scalar, ...], ...]

ZERO: Scalar = 0  # multiplicative unit


def mp_add(a: Scalar, b: Scalar) -> Scalar:
    """Tropical sum: max(a, b)."""
    return a if b < a else b


def mp_mul(a: Scalar, b: Scalar) -> Scalar:
    """Tropical product: a + b, with EPS absorbing."""
    if a is EPS or b is EPS:
        return EPS
    return a + b


def mp_sum(values: Iterable[Scalar]) -> Scalar:
    """Tropical sum of an iterable; the empty sum is EPS."""
    best: Scalar = EPS
    for v in values:
        if best < v:
            best = v
    return best


def vector(entries: Sequence[object]) -> Vector:
    return tuple(as_scalar(e) for e in entries)


def matrix(rows: Sequence[Sequence[object]]) -> Matrix:
    out = tuple(vector(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def eps_vector(n: int) -> Vector:
    return (EPS,) * n


def unit_vector(n: int, i: int, value: Scalar = 0) -> Vector:
    if not 0 <= i < n:
        raise ValueError(f"unit index {i} out of range for dimension {n}")
    return (EPS,) * i + (value,) + (EPS,) * (n - i - 1)


def vec_add(x: Vector, y: Vector) -> Vector:
    if len(x) != len(y):
        raise ValueError(f"dimension mismatch: {len(x)} vs {len(y)}")
    return tuple(a if b < a else b for a, b in zip(x, y))


def vec_scale(lam: Scalar, x: Vector) -> Vector:
    if lam is EPS:
        return (EPS,) * len(x)
    return tuple(EPS if e is EPS else lam + e for e in x)


def vec_leq(x: Vector, y: Vector) -> bool:
    """Entry-wise partial order x <= y."""
    if len(x) != len(y):
        raise ValueError(f"dimension mismatch: {len(x)} vs {len(y)}")
    return all(a <= b for a, b in zip(x, y))


def support(x: Vector) -> frozenset:
    """Indices of the finite entries."""
    return frozenset(i for i, e in enumerate(x) if e is not EPS)


def scalar_product(a: Vector, x: Vector) -> Scalar:
    """max over i of a_i + x_i (EPS when the supports are disjoint)."""
    if len(a) != len(x):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(x)}")
    best: Scalar = EPS
    for u, v in zip(a, x):
        if u is EPS or v is EPS:
            continue
        s = u + v
        if best < s:
            best = s
    return best


def argmax_product(a: Vector, x: Vector) -> frozenset:
    """Indices where a_i + x_i attains the scalar product (empty if EPS)."""
    best = scalar_product(a, x)
    if best is EPS:
        return frozenset()
    hits = []
    for i, (u, v) in enumerate(zip(a, x)):
        if u is not EPS and v is not EPS and u + v == best:
            hits.append(i)
    return frozenset(hits)


def mat_identity(n: int) -> Matrix:
    return tuple(unit_vector(n, i) for i in range(n))


def mat_eps(rows: int, cols: int) -> Matrix:
    return ((EPS,) * cols,) * rows


def mat_apply(a: Matrix, x: Vector) -> Vector:
    """Matrix-vector product: (A (x) x)_i = max_j A_ij + x_j."""
    if a and len(a[0]) != len(x):
        raise ValueError(f"dimension mismatch: {len(a[0])} vs {len(x)}")
    return tuple(scalar_product(row, x) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return ()
    if len(a[0]) != len(b):
        raise ValueError(f"dimension mismatch: {len(a[0])} vs {len(b)}")
    cols = tuple(zip(*b))
    return tuple(tuple(scalar_product(row, col) for col in cols) for row in a)


def mat_power(a: Matrix, k: int) -> Matrix:
    """k-fold product; k = 0 gives the identity."""
    if not a or len(a) != len(a[0]):
        raise ValueError("matrix power needs a square matrix")
    if k < 0:
        raise ValueError("negative power")
    out = mat_identity(len(a))
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def mat_hstack(*blocks: Matrix) -> Matrix:
    rows = len(blocks[0])
    if any(len(b) != rows for b in blocks):
        raise ValueError("row-count mismatch in hstack")
    return tuple(sum((b[i] for b in blocks), ()) for i in range(rows))


def mat_vstack(*blocks: Matrix) -> Matrix:
    out = [r for b in blocks for r in b]
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("column-count mismatch in vstack")
    return tuple(out)


def head(x: Vector, k: int) -> Vector:
    """First k coordinates."""
    return x[:k]


def tail(x: Vector, k: int) -> Vector:
    """Coordinates k .. end."""
    return x[k:]


def residuation_coeff(x: Vector, w: Vector) -> Scalar:
    """Greatest lambda with lambda (x) w <= x.

    Equals min over the support of w of x_i - w_i; EPS when some finite w_i
    faces x_i = EPS.  A w with empty support has no greatest scalar (every
    lambda works), which is a caller error.
    """
    if len(x) != len(w):
        raise ValueError(f"dimension mismatch: {len(x)} vs {len(w)}")
    best: Scalar | None = None
    for xi, wi in zip(x, w):
        if wi is EPS:
            continue
        if xi is EPS:
            return EPS
        d = xi - wi
        if best is None or d < best:
            best = d
    if best is None:
        raise ValueError("residuation against the all-eps vector")
    return best


def parse_vector(entries: Sequence[object], n: int, what: str = "vector") -> Vector:
    v = vector(entries)
    if len(v) != n:
        raise ValueError(f"{what} must have {n} entries, got {len(v)}")
    return v


def vec_sort_key(x: Vector) -> tuple:
    return tuple(sort_key(e) for e in x)


def frac(p: int, q: int = 1) -> Scalar:
    """Convenience constructor for exact rational literals in tests."""
    return as_scalar(Fraction(p, q))
