"""Exact arithmetic: Gaussian rationals, field-generic Gaussian elimination,
and certified rational root bounds.

Everything in this module is float-free.  The linear algebra routines are
generic over any exact field whose elements support +, -, *, / and compare
equal to the integer 0 (``fractions.Fraction`` and :class:`QQi` both do).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def as_fraction(x) -> Fraction:
    """Coerce int/Fraction to Fraction.  Floats are refused on purpose."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"exact arithmetic requires int or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class QQi:
    """Gaussian rational re + im*i with exact Fraction parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    @staticmethod
    def of(x) -> "QQi":
        if isinstance(x, QQi):
            return x
        return QQi(as_fraction(x))

    @staticmethod
    def from_complex(z: complex, max_denominator: int | None = None) -> "QQi":
        """Rationalize a float complex.  Conversion from float is exact;
        an optional denominator cap keeps subsequent arithmetic small."""
        re, im = Fraction(float(z.real)), Fraction(float(z.imag))
        if max_denominator is not None:
            re = re.limit_denominator(max_denominator)
            im = im.limit_denominator(max_denominator)
        return QQi(re, im)

    def __add__(self, other):
        o = QQi.of(other)
        return QQi(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = QQi.of(other)
        return QQi(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return QQi.of(other).__sub__(self)

    def __mul__(self, other):
        o = QQi.of(other)
        return QQi(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QQi.of(other)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi((self.re * o.re + self.im * o.im) / d,
                   (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        return QQi.of(other).__truediv__(self)

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("QQi powers must be nonnegative integers")
        out = QQi(Fraction(1))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def abs2(self) -> Fraction:
        """|z|^2, exactly rational."""
        return self.re * self.re + self.im * self.im

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self):
        return f"{self.re},{self.im}"

    @staticmethod
    def parse(text: str) -> "QQi":
        re, im = text.split(",")
        return QQi(Fraction(re), Fraction(im))


# ---------------------------------------------------------------------------
# field-generic elimination

def _reduce(rows: list[list], ncols: int) -> list[int]:
    """In-place forward elimination over the first `ncols` columns.
    First-nonzero pivoting (exact field, no stability concern).
    Returns the list of pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        width = len(rows[r])
        for i in range(r + 1, nrows):
            f = rows[i][c]
            if f != 0:
                f = f / piv
                ri, rr = rows[i], rows[r]
                for j in range(c, width):
                    ri[j] = ri[j] - f * rr[j]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def mat_rank(a) -> int:
    rows = [list(r) for r in a]
    if not rows:
        return 0
    return len(_reduce(rows, len(rows[0])))


def solve_linear(a, b):
    """Solve A x = b over an exact field.

    Returns (status, x) where status is one of "unique", "inconsistent",
    "underdetermined"; x is a list only when unique.
    """
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    rows = [list(ra) + [bv] for ra, bv in zip(a, b)]
    if nrows == 0:
        return ("unique", []) if ncols == 0 else ("underdetermined", None)
    pivots = _reduce(rows, ncols)
    rank = len(pivots)
    for i in range(rank, nrows):
        if rows[i][ncols] != 0:
            return "inconsistent", None
    if rank < ncols:
        return "underdetermined", None
    # back substitution; pivots are exactly columns 0..ncols-1 here
    x = [None] * ncols
    for i in range(rank - 1, -1, -1):
        c = pivots[i]
        acc = rows[i][ncols]
        for j in range(c + 1, ncols):
            if rows[i][j] != 0:
                acc = acc - rows[i][j] * x[j]
        x[c] = acc / rows[i][c]
    return "unique", x


def solve_many(a, rhs_columns):
    """Solve A X = B for square invertible A with several right-hand sides.
    Returns the list of solution columns, or None if A is singular."""
    n = len(a)
    k = len(rhs_columns)
    rows = [list(a[i]) + [col[i] for col in rhs_columns] for i in range(n)]
    pivots = _reduce(rows, n)
    if len(pivots) < n:
        return None
    sols = []
    for t in range(k):
        x = [None] * n
        for i in range(n - 1, -1, -1):
            acc = rows[i][n + t]
            for j in range(i + 1, n):
                if rows[i][j] != 0:
                    acc = acc - rows[i][j] * x[j]
            x[i] = acc / rows[i][i]
        sols.append(x)
    return sols


def inverse_rows(a):
    """Exact inverse of a square matrix given as rows; None if singular."""
    n = len(a)
    one = 1
    cols = solve_many(a, [[one if i == j else 0 for i in range(n)] for j in range(n)])
    if cols is None:
        return None
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def mat_vec(a, v):
    out = []
    for row in a:
        acc = 0
        for x, y in zip(row, v):
            if x != 0 and y != 0:
                acc = acc + x * y
        out.append(acc)
    return out


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[sum_products(row, col) for col in bt] for row in a]


def sum_products(xs, ys):
    acc = 0
    for x, y in zip(xs, ys):
        if x != 0 and y != 0:
            acc = acc + x * y
    return acc


# ---------------------------------------------------------------------------
# certified rational root bounds

def isqrt_ceil(n: int) -> int:
    s = math.isqrt(n)
    return s if s * s == n else s + 1


def rsqrt_up(x: Fraction) -> Fraction:
    """Rational upper bound on sqrt(x); exact when x is a perfect square."""
    if x < 0:
        raise ValueError("negative radicand")
    p, q = x.numerator, x.denominator
    return Fraction(isqrt_ceil(p * q), q)


def rsqrt_down(x: Fraction) -> Fraction:
    """Rational lower bound on sqrt(x)."""
    if x < 0:
        raise ValueError("negative radicand")
    p, q = x.numerator, x.denominator
    return Fraction(math.isqrt(p * q), q)


def _iroot_floor(n: int, r: int) -> int:
    """floor(n^(1/r)) for n >= 0, r >= 1, integer Newton iteration."""
    if n < 0 or r < 1:
        raise ValueError("bad root arguments")
    if r == 1 or n in (0, 1):
        return n
    x = 1 << -(-n.bit_length() // r)  # >= true root
    while True:
        y = ((r - 1) * x + n // x ** (r - 1)) // r
        if y >= x:
            break
        x = y
    while x ** r > n:
        x -= 1
    return x


def root_up(x: Fraction, r: int) -> Fraction:
    """Rational upper bound on x^(1/r) for x >= 0."""
    if x < 0:
        raise ValueError("negative radicand")
    if r == 1:
        return x
    p, q = x.numerator, x.denominator
    m = p * q ** (r - 1)  # x = m / q^r
    root = _iroot_floor(m, r)
    if root ** r != m:
        root += 1
    return Fraction(root, q)
