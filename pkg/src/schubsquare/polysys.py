"""Multivariate polynomials over exchangeable coefficient fields.

Coefficients are exact (Fraction or Gaussian rational QQi) or floating
complex; the arithmetic is duck-typed so a system built exactly can be
rounded to floats only when a numerical solver needs it.  Exponent vectors
are dense tuples over the owning system's variable registry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from schubsquare.exact import QQi

DET_SIZE_LIMIT = 12  # largest minors in scope are 10x10


class CapacityError(RuntimeError):
    """A guarded size limit was exceeded."""


class Polynomial:
    """Sparse terms over a dense exponent space: {exponent tuple: coefficient}.
    Immutable by convention; no zero coefficients are stored."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                if c != 0:
                    clean[exps] = c
        self.terms = clean

    @staticmethod
    def constant(c, nvars: int) -> "Polynomial":
        return Polynomial(nvars, {(0,) * nvars: c})

    @staticmethod
    def variable(i: int, nvars: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return Polynomial(nvars, {tuple(e): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, c):
        if c == 0:
            return Polynomial(self.nvars)
        return Polynomial(self.nvars, {e: c * v for e, v in self.terms.items()})

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live over different registries")
            return other
        return Polynomial.constant(other, self.nvars)

    def evaluate(self, point):
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, need {self.nvars}")
        acc = 0
        for exps, c in self.terms.items():
            v = c
            for i, e in enumerate(exps):
                if e:
                    v = v * point[i] ** e
            acc = acc + v
        return acc

    def partial(self, i: int) -> "Polynomial":
        out = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e:
                ne = list(exps)
                ne[i] = e - 1
                key = tuple(ne)
                out[key] = out.get(key, 0) + e * c
        return Polynomial(self.nvars, out)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, indices) -> int:
        """Exact degree restricted to a group of variable indices."""
        idx = set(indices)
        return max((sum(e[i] for i in idx) for e in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.nvars, 0)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction, QQi)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        bits = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"v{i}^{p}" if p > 1 else f"v{i}"
                            for i, p in enumerate(e) if p)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "Poly(" + " + ".join(bits) + ")"


@dataclass
class PolySystem:
    """Equations over a named variable registry with disjoint groups.

    field is "rational" (Fraction/QQi coefficients) or "complex" (floats);
    kind is free-form metadata recording the formulation that built it.
    """

    names: list[str]
    groups: dict[str, tuple[int, ...]]
    equations: list[Polynomial]
    fieldname: str = "rational"
    kind: str = ""

    def __post_init__(self):
        seen: set[int] = set()
        for g, idx in self.groups.items():
            overlap = seen & set(idx)
            if overlap:
                raise ValueError(f"group {g} overlaps earlier groups at {overlap}")
            seen |= set(idx)
        for eq in self.equations:
            if eq.nvars != len(self.names):
                raise ValueError("equation registry size mismatch")

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def neqs(self) -> int:
        return len(self.equations)

    @property
    def is_square(self) -> bool:
        return self.nvars == self.neqs

    def is_bilinear(self, group1: str, group2: str) -> bool:
        """Degree at most one in each of the two groups, for every equation."""
        g1, g2 = self.groups[group1], self.groups[group2]
        return all(eq.degree_in(g1) <= 1 and eq.degree_in(g2) <= 1
                   for eq in self.equations)

    def degrees(self) -> list[int]:
        return [eq.total_degree() for eq in self.equations]

    def evaluate(self, point):
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, need {self.nvars}")
        return [eq.evaluate(point) for eq in self.equations]

    def jacobian(self) -> list[list[Polynomial]]:
        return [[eq.partial(j) for j in range(self.nvars)] for eq in self.equations]

    def to_complex(self) -> "PolySystem":
        """Round the coefficients to floating complex (for numerical solving)."""
        def conv(c):
            if isinstance(c, QQi):
                return c.to_complex()
            return complex(c)
        eqs = [Polynomial(self.nvars, {e: conv(c) for e, c in eq.terms.items()})
               for eq in self.equations]
        return PolySystem(list(self.names), dict(self.groups), eqs, "complex", self.kind)


# ---------------------------------------------------------------------------
# determinants

def _const_det(rows):
    """Exact determinant of a square matrix of field scalars, by elimination."""
    m = len(rows)
    if m == 0:
        return 1
    work = [list(r) for r in rows]
    sign = 1
    acc = 1
    for c in range(m):
        piv = next((i for i in range(c, m) if work[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            sign = -sign
        p = work[c][c]
        acc = acc * p
        for i in range(c + 1, m):
            f = work[i][c]
            if f != 0:
                f = f / p
                for j in range(c + 1, m):
                    work[i][j] = work[i][j] - f * work[c][j]
    return acc if sign > 0 else -acc


def _memo_det(rows, nvars: int) -> Polynomial:
    """Column-by-column expansion with memoization on row subsets."""
    m = len(rows)
    cols = list(zip(*rows))
    zero = Polynomial(nvars)
    one = Polynomial.constant(1, nvars)
    memo: dict[int, Polynomial] = {}

    def minor(col: int, row_mask: int) -> Polynomial:
        if col == m:
            return one
        cached = memo.get(row_mask)
        if cached is not None:
            return cached
        acc = zero
        sign = 1
        for r in range(m):
            bit = 1 << r
            if row_mask & bit:
                entry = cols[col][r]
                if entry.terms:
                    sub = minor(col + 1, row_mask & ~bit)
                    term = entry * sub
                    acc = acc + (term if sign > 0 else -term)
                sign = -sign
        memo[row_mask] = acc
        return acc

    return minor(0, (1 << m) - 1)


def det(matrix) -> Polynomial:
    """Exact determinant of a square matrix of polynomials (plain scalars are
    promoted to constants).

    A leading block of constant columns is split off by generalized Laplace
    expansion along the remaining columns, so stacked flag/chart matrices pay
    polynomial arithmetic only on their few variable columns.  Callers should
    therefore put constant columns first.
    """
    import itertools as _it

    m = len(matrix)
    if m == 0:
        raise ValueError("empty matrix")
    if any(len(row) != m for row in matrix):
        raise ValueError("matrix is not square")
    if m > DET_SIZE_LIMIT:
        raise CapacityError(f"determinant size {m} exceeds limit {DET_SIZE_LIMIT}")
    nvars = next((x.nvars for row in matrix for x in row
                  if isinstance(x, Polynomial)), 0)
    rows = [[x if isinstance(x, Polynomial) else Polynomial.constant(x, nvars)
             for x in row] for row in matrix]
    nconst = 0
    while nconst < m and all(rows[r][nconst].is_constant() for r in range(m)):
        nconst += 1
    if nconst == m:
        value = _const_det([[x.constant_value() for x in row] for row in rows])
        return Polynomial.constant(value, nvars)
    if nconst == 0:
        return _memo_det(rows, nvars)
    v = m - nconst
    const_cols = [[rows[r][c].constant_value() for c in range(nconst)]
                  for r in range(m)]
    # det = sum over row subsets I of sign(I) * poly-minor(I) * const-minor(I^c)
    base_sign = v * nconst + v * (v - 1) // 2  # parity of the column block
    acc = Polynomial(nvars)
    for rows_sel in _it.combinations(range(m), v):
        sub = [[rows[r][c] for c in range(nconst, m)] for r in rows_sel]
        p = _memo_det(sub, nvars)
        if p.is_zero():
            continue
        sel = set(rows_sel)
        q = _const_det([const_cols[r] for r in range(m) if r not in sel])
        if q == 0:
            continue
        if (base_sign + sum(rows_sel)) % 2:
            q = -q
        acc = acc + p.scale(q)
    return acc


# ---------------------------------------------------------------------------
# serialization: canonical structured text, byte-exact round trips

def _coeff_text(c, fieldname: str) -> str:
    if fieldname == "complex":
        z = complex(c)
        return f"{z.real!r},{z.imag!r}"
    if isinstance(c, QQi):
        return f"{c.re},{c.im}"
    return str(Fraction(c))


def _parse_coeff(text: str, fieldname: str):
    if fieldname == "complex":
        re, im = text.split(",")
        return complex(float(re), float(im))
    if "," in text:
        return QQi.parse(text)
    return Fraction(text)


def emit_system(system: PolySystem) -> str:
    group_of = {}
    for g, idx in system.groups.items():
        for i in idx:
            group_of[i] = g
    lines = [
        "polysystem",
        f"field {system.fieldname}",
        f"kind {system.kind or '-'}",
        f"nvars {system.nvars}",
        f"neqs {system.neqs}",
    ]
    for i, name in enumerate(system.names):
        lines.append(f"var {name} {group_of.get(i, '-')}")
    for eq in system.equations:
        lines.append(f"eq {len(eq.terms)}")
        for exps in sorted(eq.terms):
            coeff = _coeff_text(eq.terms[exps], system.fieldname)
            lines.append(" ".join(str(e) for e in exps) + " : " + coeff)
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_system(text: str) -> PolySystem:
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "polysystem":
        raise ValueError("not a polysystem file")
    fieldname = lines[1].split(" ", 1)[1]
    kind = lines[2].split(" ", 1)[1]
    kind = "" if kind == "-" else kind
    nvars = int(lines[3].split()[1])
    neqs = int(lines[4].split()[1])
    names: list[str] = []
    groups: dict[str, list[int]] = {}
    pos = 5
    for i in range(nvars):
        _, name, group = lines[pos].split()
        names.append(name)
        if group != "-":
            groups.setdefault(group, []).append(i)
        pos += 1
    equations = []
    for _ in range(neqs):
        nterms = int(lines[pos].split()[1])
        pos += 1
        terms = {}
        for _ in range(nterms):
            left, right = lines[pos].split(" : ")
            exps = tuple(int(tok) for tok in left.split()) if nvars else ()
            terms[exps] = _parse_coeff(right, fieldname)
            pos += 1
        equations.append(Polynomial(nvars, terms))
    if lines[pos] != "end":
        raise ValueError("missing end marker")
    return PolySystem(names, {g: tuple(v) for g, v in groups.items()},
                      equations, fieldname, kind)
