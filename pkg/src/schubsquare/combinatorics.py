"""Permutation-level combinatorics of flagged Schubert conditions.

Descent-typed permutations, inversion counts and codimensions, rank tables,
the two families of lifting-variable index sets with their membership
offsets, duality, block-sort projections, and enumeration of descent classes.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterator


@dataclass(frozen=True)
class DescentType:
    """Ambient dimension n with a strictly increasing tuple a of descent
    positions, a_1 < ... < a_s < n.  Describes the flag manifold of nested
    subspaces of those dimensions in C^n."""

    n: int
    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        if self.n < 1:
            raise ValueError("ambient dimension must be positive")
        if not self.a:
            raise ValueError("descent type needs at least one subspace dimension")
        if any(x < 1 or x > self.n - 1 for x in self.a):
            raise ValueError(f"descent positions must lie in 1..{self.n - 1}")
        if any(x >= y for x, y in zip(self.a, self.a[1:])):
            raise ValueError("descent positions must be strictly increasing")
        # the two closed forms for the dimension must agree
        alt = self.n * self.a[-1] - sum(
            aj * (aj - ai) for ai, aj in zip((0,) + self.a, self.a)
        )
        if self.dim != alt:
            raise AssertionError("dimension formulas disagree")

    @property
    def dim(self) -> int:
        return sum((self.n - aj) * (aj - ai) for ai, aj in zip((0,) + self.a, self.a))

    @property
    def is_grassmannian(self) -> bool:
        return len(self.a) == 1

    @property
    def blocks(self) -> tuple[tuple[int, int], ...]:
        """Half-open position blocks (lo, hi], including the tail block (a_s, n]."""
        bounds = (0,) + self.a + (self.n,)
        return tuple((bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1))

    def ceiling(self, k: int) -> int:
        """Smallest descent position >= k, for 1 <= k <= a_s."""
        if not 1 <= k <= self.a[-1]:
            raise ValueError(f"index {k} outside 1..{self.a[-1]}")
        for aj in self.a:
            if k <= aj:
                return aj
        raise AssertionError("unreachable")

    def dual(self) -> "DescentType":
        return DescentType(self.n, tuple(sorted(self.n - x for x in self.a)))

    def class_size(self) -> int:
        """Number of permutations with descents inside a (a multinomial)."""
        out = math.factorial(self.n)
        bounds = (0,) + self.a + (self.n,)
        for lo, hi in zip(bounds, bounds[1:]):
            out //= math.factorial(hi - lo)
        return out

    def label(self) -> str:
        inner = ",".join(str(x) for x in self.a)
        if self.is_grassmannian:
            return f"Gr({inner};{self.n})"
        return f"Fl({inner};{self.n})"


def inversions(w) -> int:
    """Number of pairs k < j with w(k) > w(j)."""
    n = len(w)
    count = 0
    for k in range(n):
        wk = w[k]
        for j in range(k + 1, n):
            if wk > w[j]:
                count += 1
    return count


def descent_set(w) -> frozenset[int]:
    return frozenset(i + 1 for i in range(len(w) - 1) if w[i] > w[i + 1])


@dataclass(frozen=True)
class SchubertCondition:
    """A permutation w of 1..n in one-line notation whose descents lie in the
    descent type; indexes a Schubert variety of the corresponding flag
    manifold."""

    w: tuple[int, ...]
    dtype: DescentType

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(self.w))
        n = self.dtype.n
        if sorted(self.w) != list(range(1, n + 1)):
            raise ValueError(f"{self.w} is not a permutation of 1..{n}")
        bad = descent_set(self.w) - set(self.dtype.a)
        if bad:
            raise ValueError(
                f"descents at {sorted(bad)} not allowed by type {self.dtype.a}"
            )

    @property
    def n(self) -> int:
        return self.dtype.n

    @property
    def length(self) -> int:
        """Inversion count; the dimension of the Schubert cell."""
        return inversions(self.w)

    @property
    def codim(self) -> int:
        return self.dtype.dim - self.length

    def rank(self, i: int, j: int) -> int:
        """#{k <= a_j : w(k) <= i}; the required dim(F_i ∩ E_{a_j})."""
        if not 0 <= i <= self.n:
            raise ValueError(f"row index {i} outside 0..{self.n}")
        if not 1 <= j <= len(self.dtype.a):
            raise ValueError(f"column index {j} outside 1..{len(self.dtype.a)}")
        aj = self.dtype.a[j - 1]
        return sum(1 for k in range(aj) if self.w[k] <= i)

    def rank_table(self) -> list[list[int]]:
        return [[self.rank(i, j) for j in range(1, len(self.dtype.a) + 1)]
                for i in range(self.n + 1)]

    def text(self) -> str:
        return permutation_text(self.w, self.dtype.a)

    def __str__(self):
        return f"{self.text()} on {self.dtype.label()}"


@dataclass(frozen=True)
class LiftIndexSet:
    """Index pairs (k, i) of the auxiliary lifting coefficients attached to a
    condition, one group per column index k = 1..a_s, plus the membership
    offsets m(k) and the resulting membership levels w(k) + m(k)."""

    kind: str  # "full" or "reduced"
    entries: tuple[tuple[int, ...], ...]  # entries[k-1] = sorted i's paired with k
    offsets: tuple[int, ...]              # m(k); all zero for the full kind
    levels: tuple[int, ...]               # membership level of column k

    @property
    def size(self) -> int:
        return sum(len(e) for e in self.entries)

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """All (k, i) in (k, i)-lexicographic order."""
        return tuple((k + 1, i) for k, es in enumerate(self.entries) for i in es)

    def equation_count(self, n: int) -> int:
        """Number of membership equations: sum over k of n - level(k)."""
        return sum(n - lv for lv in self.levels)


def lift_indices(cond: SchubertCondition) -> LiftIndexSet:
    """Full lifting set: for each k, all i <= ceiling(k) with w(i) > w(k).
    Membership level of column k is w(k)."""
    w, t = cond.w, cond.dtype
    entries = []
    for k in range(1, t.a[-1] + 1):
        c = t.ceiling(k)
        wk = w[k - 1]
        entries.append(tuple(i for i in range(1, c + 1) if w[i - 1] > wk))
    levels = tuple(w[k] for k in range(t.a[-1]))
    return LiftIndexSet("full", tuple(entries), (0,) * t.a[-1], levels)


def membership_offset(cond: SchubertCondition, k: int) -> int:
    """Largest m such that the values w(k)+1, ..., w(k)+m all occur at
    positions <= ceiling(k)."""
    w, t = cond.w, cond.dtype
    c = t.ceiling(k)
    pos = {v: i + 1 for i, v in enumerate(w)}  # value -> position
    m = 0
    while w[k - 1] + m + 1 in pos and pos[w[k - 1] + m + 1] <= c:
        m += 1
    return m


def reduced_lift_indices(cond: SchubertCondition) -> LiftIndexSet:
    """Reduced lifting set: keep (k, i) only when some later position
    j > ceiling(k) carries a value strictly between w(k) and w(i); relax the
    membership level of column k to w(k) + m(k)."""
    w, t = cond.w, cond.dtype
    entries = []
    offsets = []
    for k in range(1, t.a[-1] + 1):
        c = t.ceiling(k)
        wk = w[k - 1]
        later = [w[j - 1] for j in range(c + 1, t.n + 1)]
        succ = min((v for v in later if v > wk), default=None)
        if succ is None:
            entries.append(())
        else:
            entries.append(tuple(i for i in range(1, c + 1) if w[i - 1] > succ))
        offsets.append(membership_offset(cond, k))
    levels = tuple(w[k] + offsets[k] for k in range(t.a[-1]))
    return LiftIndexSet("reduced", tuple(entries), tuple(offsets), levels)


def dual_condition(cond: SchubertCondition) -> SchubertCondition:
    """Conjugate by the longest permutation; lands on the dual descent type.
    An involution preserving length and codimension."""
    n = cond.n
    w = cond.w
    dual_w = tuple(n + 1 - w[n - i] for i in range(1, n + 1))
    return SchubertCondition(dual_w, cond.dtype.dual())


def project_condition(cond: SchubertCondition, b: DescentType):
    """Project onto the coarser descent type b (b.a must be a subset of a).

    Returns (projected condition, codim_preserved).  The projected permutation
    sorts w ascending within each b-block; the flag is True exactly when the
    Schubert variety is the full preimage of its projection, i.e. codimension
    is preserved.
    """
    if b.n != cond.n:
        raise ValueError("projection must stay in the same ambient dimension")
    if not set(b.a) <= set(cond.dtype.a):
        raise ValueError(f"{b.a} is not a subset of {cond.dtype.a}")
    w = cond.w
    bounds = (0,) + b.a + (cond.n,)
    v: list[int] = []
    for lo, hi in zip(bounds, bounds[1:]):
        v.extend(sorted(w[lo:hi]))
    proj = SchubertCondition(tuple(v), b)
    return proj, proj.codim == cond.codim


def reduced_primal_dual_vars(cond: SchubertCondition) -> int:
    """Fewest new variables over all codim-preserving projections: the minimum
    of length(projection) over subsets b of a (b = a always qualifies)."""
    best = cond.length
    s = len(cond.dtype.a)
    for r in range(1, s):
        for keep in itertools.combinations(cond.dtype.a, r):
            b = DescentType(cond.n, keep)
            proj, ok = project_condition(cond, b)
            if ok and proj.length < best:
                best = proj.length
    return best


def identity_condition(t: DescentType) -> SchubertCondition:
    return SchubertCondition(tuple(range(1, t.n + 1)), t)


def dense_condition(t: DescentType) -> SchubertCondition:
    """The longest element of the descent class: blocks take the largest
    remaining values, so the cell is dense (codim 0)."""
    bounds = (0,) + t.a + (t.n,)
    w: list[int] = []
    top = t.n
    for lo, hi in zip(bounds, bounds[1:]):
        size = hi - lo
        w.extend(range(top - size + 1, top + 1))
        top -= size
    return SchubertCondition(tuple(w), t)


def descent_class(t: DescentType) -> Iterator[tuple[int, ...]]:
    """All permutations of 1..n ascending within each block of t, i.e. with
    descents inside t.a, each exactly once."""
    bounds = (0,) + t.a + (t.n,)
    sizes = [hi - lo for lo, hi in zip(bounds, bounds[1:])]

    def rec(remaining: tuple[int, ...], depth: int):
        if depth == len(sizes) - 1:
            yield remaining
            return
        m = sizes[depth]
        for chosen in itertools.combinations(remaining, m):
            chosen_set = set(chosen)
            rest = tuple(v for v in remaining if v not in chosen_set)
            for tail in rec(rest, depth + 1):
                yield chosen + tail

    return rec(tuple(range(1, t.n + 1)), 0)


def enumerate_conditions(
    t: DescentType,
    codim_lo: int | None = None,
    codim_hi: int | None = None,
) -> Iterator[SchubertCondition]:
    """Stream the conditions of a descent class, optionally filtered to
    codim_lo < codim < codim_hi (either bound may be None).  codim_hi may be
    fractional (e.g. dim/2)."""
    for w in descent_class(t):
        cond = SchubertCondition(w, t)
        c = cond.codim
        if codim_lo is not None and not c > codim_lo:
            continue
        if codim_hi is not None and not c < codim_hi:
            continue
        yield cond


def all_descent_types(n: int) -> Iterator[DescentType]:
    """Every nonempty descent type in C^n (2^(n-1) - 1 of them)."""
    positions = list(range(1, n))
    for r in range(1, n):
        for a in itertools.combinations(positions, r):
            yield DescentType(n, a)


# ---------------------------------------------------------------------------
# text forms

def parse_permutation(text: str, n: int | None = None) -> tuple[int, ...]:
    """Parse one-line notation.  Accepted forms: "35847126" (single digits),
    "358|47|126" (bars optional, anywhere), and comma-separated "5,9,10|1,..."
    for values above 9."""
    text = text.strip()
    if "," in text:
        body = text.replace("|", ",")
        values = tuple(int(p) for p in body.split(",") if p)
    else:
        body = text.replace("|", "")
        if not body.isdigit():
            raise ValueError(f"cannot parse permutation {text!r}")
        values = tuple(int(ch) for ch in body)
    if n is not None and len(values) != n:
        raise ValueError(f"expected {n} entries, got {len(values)} in {text!r}")
    m = len(values)
    if sorted(values) != list(range(1, m + 1)):
        raise ValueError(f"{text!r} is not a permutation of 1..{m}")
    return values


def permutation_text(w, a=()) -> str:
    """Canonical text form: bars at the descent-type positions; digits when
    n <= 9, comma-separated otherwise."""
    n = len(w)
    cuts = set(a)
    pieces: list[str] = []
    current: list[str] = []
    for i, v in enumerate(w, start=1):
        current.append(str(v))
        if i in cuts and i < n:
            pieces.append(("" if n <= 9 else ",").join(current))
            current = []
    pieces.append(("" if n <= 9 else ",").join(current))
    return "|".join(pieces)


def parse_condition(text: str, t: DescentType) -> SchubertCondition:
    return SchubertCondition(parse_permutation(text, t.n), t)
