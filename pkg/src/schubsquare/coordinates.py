"""Stiefel coordinate patterns, exact flags, and cell samplers/locators.

A pattern is an n x a_s matrix whose cells are the string "zero", the string
"one", or an integer variable id.  Substituting field values for the variable
cells yields a matrix whose column spans realize a (pair of) Schubert cell(s).
All numeric work here is exact: entries are Fractions or Gaussian rationals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from schubsquare.combinatorics import DescentType, SchubertCondition
from schubsquare.exact import QQi, inverse_rows, mat_vec, solve_linear, sum_products

ZERO = "zero"
ONE = "one"


class ConstructionError(ValueError):
    """Requested coordinates do not exist (e.g. empty cell intersection)."""


class GenericityError(RuntimeError):
    """A computation hit a non-generic configuration; resample and retry."""


@dataclass(frozen=True)
class PatternMatrix:
    """Symbolic Stiefel pattern: cells[i][j] over rows i < n, columns j < cols."""

    n: int
    cols: int
    cells: tuple[tuple[object, ...], ...]
    conditions: tuple[SchubertCondition, ...]

    @property
    def var_count(self) -> int:
        return sum(1 for row in self.cells for c in row if isinstance(c, int))

    def var_cells(self) -> list[tuple[int, int]]:
        """(row, col) of each variable cell, ordered by variable id."""
        found = {c: (i, j) for i, row in enumerate(self.cells)
                 for j, c in enumerate(row) if isinstance(c, int)}
        return [found[k] for k in sorted(found)]

    def var_names(self) -> list[str]:
        return [f"x[{i + 1},{j + 1}]" for i, j in self.var_cells()]

    def instantiate(self, values):
        """Fill variable cells with the given field values (ordered by id);
        returns the n x cols matrix as row tuples."""
        if len(values) != self.var_count:
            raise ValueError(f"need {self.var_count} values, got {len(values)}")
        out = []
        for row in self.cells:
            out.append(tuple(
                0 if c == ZERO else 1 if c == ONE else values[c] for c in row
            ))
        return tuple(out)

    def __str__(self):
        def cell(c):
            return "." if c == ZERO else "1" if c == ONE else f"x{c}"
        return "\n".join(" ".join(f"{cell(c):>3}" for c in row) for row in self.cells)


def stiefel_pattern(cond: SchubertCondition) -> PatternMatrix:
    """Echelon pattern of the Schubert cell of the standard flag: ones at
    (w(k), k), zeros below each one and at earlier ones' rows, a variable
    everywhere else.  Variable count equals the cell dimension."""
    w, n = cond.w, cond.n
    cols = cond.dtype.a[-1]
    cells = [[ZERO] * cols for _ in range(n)]
    next_var = 0
    for j in range(cols):
        earlier = {w[k] for k in range(j)}
        for i in range(1, n + 1):
            if i == w[j]:
                cells[i - 1][j] = ONE
            elif i < w[j] and i not in earlier:
                cells[i - 1][j] = next_var
                next_var += 1
    pattern = PatternMatrix(n, cols, tuple(tuple(r) for r in cells), (cond,))
    assert pattern.var_count == cond.length
    return pattern


def pair_pattern(c1: SchubertCondition, c2: SchubertCondition) -> PatternMatrix:
    """Skew pattern for the intersection of the c1-cell of the standard flag
    with the c2-cell of the opposite flag (Grassmannians only).

    Column j is supported on the window [n+1-w2(k+1-j), w1(j)] with its top
    entry normalized to one; the window pairing gives exactly
    length(c1) - codim(c2) variables.
    """
    if c1.dtype != c2.dtype:
        raise ValueError("both conditions must live on the same manifold")
    if not c1.dtype.is_grassmannian:
        raise ConstructionError("pair coordinates exist only on Grassmannians")
    n, k = c1.n, c1.dtype.a[0]
    w1, w2 = c1.w, c2.w
    cells = [[ZERO] * k for _ in range(n)]
    next_var = 0
    for j in range(1, k + 1):
        top = w1[j - 1]
        bottom = n + 1 - w2[k - j]
        if bottom > top:
            raise ConstructionError(
                f"empty intersection: column {j} window [{bottom},{top}] is empty"
            )
        for i in range(bottom, top):
            cells[i - 1][j - 1] = next_var
            next_var += 1
        cells[top - 1][j - 1] = ONE
    pattern = PatternMatrix(n, k, tuple(tuple(r) for r in cells), (c1, c2))
    assert pattern.var_count == c1.length - c2.codim
    return pattern


# ---------------------------------------------------------------------------
# flags

@dataclass(frozen=True)
class FlagMatrix:
    """Invertible n x n matrix of exact entries.  Column j spans together with
    the earlier columns the j-dimensional flag subspace; dual[i] is the linear
    form vanishing on all columns but the (i+1)-st."""

    n: int
    basis: tuple[tuple[object, ...], ...]  # rows
    dual: tuple[tuple[object, ...], ...]   # rows of basis^{-1}

    @staticmethod
    def from_rows(rows) -> "FlagMatrix":
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("flag basis must be square")
        inv = inverse_rows([list(r) for r in rows])
        if inv is None:
            raise ValueError("flag basis is singular")
        return FlagMatrix(n, rows, tuple(tuple(r) for r in inv))

    @staticmethod
    def standard(n: int) -> "FlagMatrix":
        eye = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
        return FlagMatrix(n, eye, eye)

    @staticmethod
    def opposite(n: int) -> "FlagMatrix":
        anti = tuple(
            tuple(Fraction(int(i + j == n - 1)) for j in range(n)) for i in range(n)
        )
        return FlagMatrix(n, anti, anti)

    def column(self, j: int):
        """Flag vector j (1-based)."""
        return tuple(self.basis[i][j - 1] for i in range(self.n))

    def form(self, j: int):
        """Dual form j (1-based): row j of the inverse."""
        return self.dual[j - 1]

    def is_standard(self) -> bool:
        return self == FlagMatrix.standard(self.n)


def random_flag(n: int, seed: int, mode: str = "rational") -> FlagMatrix:
    """Deterministic random invertible flag basis.

    rational: entries are small Fractions (numerators in [-20, 20],
    denominators in [1, 10]).  unit-complex: entries are exact Gaussian
    rationals of modulus one (rational points of the unit circle), keeping
    every downstream computation float-free.
    """
    if n < 1:
        raise ValueError("flag dimension must be positive")
    if mode not in ("rational", "unit-complex"):
        raise ValueError(f"unknown flag mode {mode!r}")
    attempt = 0
    while True:
        rng = random.Random(f"flag:{mode}:{n}:{seed}:{attempt}")
        rows = []
        for _ in range(n):
            row = []
            for _ in range(n):
                t = Fraction(rng.randint(-20, 20), rng.randint(1, 10))
                if mode == "rational":
                    row.append(t)
                else:
                    d = 1 + t * t
                    row.append(QQi((1 - t * t) / d, 2 * t / d))
            rows.append(row)
        inv = inverse_rows(rows)
        if inv is not None:
            return FlagMatrix(n, tuple(tuple(r) for r in rows),
                              tuple(tuple(r) for r in inv))
        attempt += 1  # singular draw: redraw with an incremented subseed


@dataclass(frozen=True)
class FlagTuple:
    """The flags of a Schubert problem instance; the first one is normally the
    standard coordinate flag (the chart's reference)."""

    flags: tuple[FlagMatrix, ...]
    first_is_standard: bool

    def __post_init__(self):
        if self.first_is_standard and not self.flags[0].is_standard():
            raise ValueError("first flag declared standard but is not the identity")


# ---------------------------------------------------------------------------
# samplers and locators

def sample_cell_point(cond: SchubertCondition, flag: FlagMatrix, seed: int):
    """Random exact point of the Schubert cell: column k is a combination of
    the first w(k) flag vectors with a nonzero coefficient on the w(k)-th.
    Returns the n x a_s matrix as row tuples."""
    n = cond.n
    if flag.n != n:
        raise ValueError("flag dimension mismatch")
    rng = random.Random(f"cell:{seed}:{cond.text()}:{cond.dtype.a}")

    def draw():
        return Fraction(rng.randint(-20, 20), rng.randint(1, 10))

    columns = []
    for k in range(1, cond.dtype.a[-1] + 1):
        level = cond.w[k - 1]
        coeffs = [draw() for _ in range(level)]
        while coeffs[level - 1] == 0:
            coeffs[level - 1] = draw()
        col = [0] * n
        for i in range(level):
            fi = flag.column(i + 1)
            c = coeffs[i]
            if c != 0:
                for r in range(n):
                    if fi[r] != 0:
                        col[r] = col[r] + c * fi[r]
        columns.append(col)
    return tuple(tuple(columns[j][i] for j in range(len(columns))) for i in range(n))


def _bottom_rank_jumps(c_rows, ncols):
    """Rows i (1-based) whose addition on top of all lower rows increases the
    rank of the first ncols columns; exactly the pivot levels seen from below."""
    n = len(c_rows)
    basis: list[list] = []
    jumps = []
    for i in range(n, 0, -1):
        row = list(c_rows[i - 1][:ncols])
        for b in basis:
            lead = next((t for t, x in enumerate(b) if x != 0), None)
            if lead is not None and row[lead] != 0:
                f = row[lead] / b[lead]
                row = [x - f * y for x, y in zip(row, b)]
        if any(x != 0 for x in row):
            basis.append(row)
            jumps.append(i)
    return set(jumps)


def position(E, flag: FlagMatrix, t: DescentType) -> SchubertCondition:
    """Locate the unique cell of the flag containing the span of E's columns,
    via exact rank computations.  E is n x a_s with full column rank."""
    n = t.n
    rows = [list(r) for r in E]
    if len(rows) != n or any(len(r) != t.a[-1] for r in rows):
        raise ValueError(f"expected a {n} x {t.a[-1]} matrix")
    # express E in flag coordinates; intersection dims become bottom-row ranks
    coords = [mat_vec(flag.dual, [rows[i][j] for i in range(n)])
              for j in range(t.a[-1])]
    c_rows = [[coords[j][i] for j in range(t.a[-1])] for i in range(n)]
    values: list[int] = []
    seen: set[int] = set()
    prev: set[int] = set()
    for aj in t.a:
        jumps = _bottom_rank_jumps(c_rows, aj)
        if len(jumps) != aj:
            raise ValueError("matrix does not have full column rank")
        block = sorted(jumps - prev)
        values.extend(block)
        seen |= jumps
        prev = jumps
    values.extend(sorted(set(range(1, n + 1)) - seen))
    return SchubertCondition(tuple(values), t)


def pattern_coordinates(E, pattern: PatternMatrix):
    """Express the column span of E in the pattern's chart and read off the
    variable cells.

    For each pattern column the unique combination of E's columns vanishing
    on the pattern's zero rows and normalized at its one row is solved for
    exactly.  Raises GenericityError when no such (unique) combination
    exists, i.e. the span is outside the chart's dense domain.
    """
    n, cols = pattern.n, pattern.cols
    mat = [list(r) for r in E]
    if len(mat) != n or any(len(r) != cols for r in mat):
        raise ValueError(f"expected a {n} x {cols} matrix")
    values = [None] * pattern.var_count
    for j in range(cols):
        constraint_rows = []
        rhs = []
        for i in range(n):
            cell = pattern.cells[i][j]
            if cell == ZERO:
                constraint_rows.append(mat[i])
                rhs.append(0)
            elif cell == ONE:
                constraint_rows.append(mat[i])
                rhs.append(1)
        status, u = solve_linear(constraint_rows, rhs)
        if status != "unique":
            raise GenericityError("point is outside the chart")
        column = [sum_products(mat[i], u) for i in range(n)]
        for i in range(n):
            cell = pattern.cells[i][j]
            if isinstance(cell, int):
                values[cell] = column[i]
    return values


# ---------------------------------------------------------------------------
# file formats: flags and matrices as structured text

def _entry_text(x) -> str:
    if isinstance(x, QQi):
        return f"{x.re},{x.im}"
    return str(Fraction(x))


def _parse_entry(text: str):
    if "," in text:
        return QQi.parse(text)
    return Fraction(text)


def emit_flag(flag: FlagMatrix) -> str:
    lines = [f"flag n {flag.n}"]
    for row in flag.basis:
        lines.append(" ".join(_entry_text(x) for x in row))
    return "\n".join(lines) + "\n"


def parse_flag(text: str) -> FlagMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[:2] != ["flag", "n"]:
        raise ValueError("not a flag file")
    n = int(head[2])
    rows = [[_parse_entry(tok) for tok in ln.split()] for ln in lines[1:1 + n]]
    return FlagMatrix.from_rows(rows)


def emit_matrix(rows) -> str:
    rows = [tuple(r) for r in rows]
    lines = [f"matrix rows {len(rows)} cols {len(rows[0])}"]
    for row in rows:
        lines.append(" ".join(_entry_text(x) for x in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "matrix":
        raise ValueError("not a matrix file")
    nrows = int(head[2])
    return tuple(tuple(_parse_entry(tok) for tok in ln.split())
                 for ln in lines[1:1 + nrows])
