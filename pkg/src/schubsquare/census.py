"""Census of added-variable counts over all Schubert varieties of the flag
manifolds in C^n: reduced-lifted versus (reduced) primal-dual.

The inner loop enumerates each descent class by choosing block value sets,
accumulating inversion and lift counts incrementally so a full n = 9 run
(about 7.1 million condition/manifold pairs) stays a few CPU-minutes.  The
per-condition quantities are validated elsewhere against the definitional
implementations in `combinatorics`/`formulations`.
"""

from __future__ import annotations

import csv
import io
import itertools
import os
from bisect import bisect_right
from dataclasses import dataclass

from schubsquare.combinatorics import DescentType

CENSUS_DIM_LIMIT = 10

# reference splits for n = 9 (pd_wins, lifted_wins, ties)
REFERENCE_SPLIT_ALL = (141_256, 3_161_233, 93_253)
REFERENCE_TOTAL_ALL = 3_395_742
REFERENCE_SPLIT_FAVORABLE = (53_698, 1_784_646, 39_408)
REFERENCE_TOTAL_FAVORABLE = 1_877_752


@dataclass(frozen=True)
class ManifoldRow:
    a: tuple[int, ...]
    dim: int
    relevant: int
    pd_wins: int
    lifted_wins: int
    ties: int


@dataclass
class CensusReport:
    n: int
    restriction_mode: str  # "all-manifolds" | "favorable-of-dual-pair"
    reduced_pd: bool
    total_varieties: int
    wins_primal_dual: int
    wins_lifted: int
    ties: int
    rows: list[ManifoldRow]

    def __post_init__(self):
        if (self.wins_primal_dual + self.wins_lifted + self.ties
                != self.total_varieties):
            raise AssertionError("census tallies do not add up")

    def split(self) -> tuple[int, int, int]:
        return (self.wins_primal_dual, self.wins_lifted, self.ties)

    def text(self) -> str:
        def pct(x):
            return f"{100.0 * x / self.total_varieties:.3f}%" if self.total_varieties else "-"
        lines = [
            f"census n={self.n} mode={self.restriction_mode} "
            f"reduced_pd={'true' if self.reduced_pd else 'false'}",
            f"total {self.total_varieties}",
            f"primal-dual-wins {self.wins_primal_dual} ({pct(self.wins_primal_dual)})",
            f"lifted-wins {self.wins_lifted} ({pct(self.wins_lifted)})",
            f"ties {self.ties} ({pct(self.ties)})",
        ]
        return "\n".join(lines) + "\n"

    def csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["a", "relevant", "pd_wins", "lifted_wins", "ties"])
        for row in self.rows:
            writer.writerow(["|".join(str(x) for x in row.a), row.relevant,
                             row.pd_wins, row.lifted_wins, row.ties])
        return buf.getvalue()


def _manifold_counts(task) -> tuple:
    """(a, dim, relevant, pd_wins, lifted_wins, ties) for one manifold.

    Enumerates the descent class recursively by blocks.  The running state
    carries the inversion count and the reduced-lift variable count, both of
    which only depend on the prefix of chosen blocks; the primal-dual merge
    is resolved at the leaves from the per-block value ranges.
    """
    n, a, reduced_pd = task
    bounds = (0,) + tuple(a) + (n,)
    sizes = [bounds[i + 1] - bounds[i] for i in range(len(bounds) - 1)]
    s = len(a)
    dim_a = sum((n - aj) * (aj - ai) for ai, aj in zip((0,) + tuple(a), a))
    # precompute pairwise size products for merged runs
    relevant = pd_wins = lifted_wins = ties = 0
    combos = itertools.combinations

    def rec(remaining, depth, inv, beta, ranges):
        nonlocal relevant, pd_wins, lifted_wins, ties
        if depth == s:
            codim = dim_a - inv
            if codim <= 1 or 2 * codim >= dim_a:
                return
            relevant += 1
            mm = ranges + [(remaining[0], remaining[-1])]
            if reduced_pd:
                internal = 0
                i = 0
                while i <= s:
                    j = i
                    total = sizes[i]
                    sq = sizes[i] * sizes[i]
                    while j < s and mm[j][0] > mm[j + 1][1]:
                        j += 1
                        total += sizes[j]
                        sq += sizes[j] * sizes[j]
                    internal += (total * total - sq) // 2
                    i = j + 1
                pd = dim_a - internal - codim
            else:
                pd = inv  # plain primal-dual: the cell dimension
            if pd < beta:
                pd_wins += 1
            elif beta < pd:
                lifted_wins += 1
            else:
                ties += 1
            return
        m = sizes[depth]
        nrem = len(remaining)
        nafter = nrem - m
        for idx in combos(range(nrem), m):
            block = [remaining[t] for t in idx]
            inv_add = 0
            for t, it in enumerate(idx):
                inv_add += it - t
            rest = []
            last = 0
            for it in idx:
                rest.extend(remaining[last:it])
                last = it + 1
            rest.extend(remaining[last:])
            # reduced-lift contribution of this block: for each value v, the
            # chosen-prefix values above the successor of v among the rest
            beta_add = 0
            for v in block:
                p = bisect_right(rest, v)
                if p < nafter:
                    succ = rest[p]
                    beta_add += (n - succ) - (nafter - p - 1)
            rec(rest, depth + 1, inv + inv_add, beta + beta_add,
                ranges + [(block[0], block[-1])])

    if dim_a >= 5:  # otherwise no codim can satisfy 1 < c < dim/2
        rec(list(range(1, n + 1)), 0, 0, 0, [])
    return (tuple(a), dim_a, relevant, pd_wins, lifted_wins, ties)


def manifold_census(t: DescentType, reduced_pd: bool = True) -> ManifoldRow:
    """Counts for one manifold, filter 1 < codim < dim/2."""
    return ManifoldRow(*_manifold_counts((t.n, t.a, reduced_pd)))


def _all_rows(n: int, reduced_pd: bool, jobs: int | None) -> list[ManifoldRow]:
    tasks = [(n, a, reduced_pd)
             for r in range(1, n)
             for a in itertools.combinations(range(1, n), r)]
    if jobs is None:
        jobs = worker_count()
    if jobs > 1 and len(tasks) > 8:
        import multiprocessing as mp
        with mp.Pool(jobs) as pool:
            results = pool.map(_manifold_counts, tasks, chunksize=4)
    else:
        results = [_manifold_counts(t) for t in tasks]
    results.sort(key=lambda r: (len(r[0]), r[0]))
    return [ManifoldRow(*r) for r in results]


def worker_count() -> int:
    env = os.environ.get("SCHUBSQUARE_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_census(n: int, mode: str = "all", reduced_pd: bool = True,
               jobs: int | None = None) -> CensusReport:
    """Full census over every nonempty descent type in C^n.

    mode "all": every manifold.  mode "favorable": keep a manifold when the
    primal-dual formulation wins there no more often than on its dual (so
    self-dual manifolds appear once and equally favorable pairs keep both
    members); this definition reproduces the reference n = 9 totals.
    """
    if n > CENSUS_DIM_LIMIT:
        raise ValueError(f"census guarded to n <= {CENSUS_DIM_LIMIT}")
    if mode not in ("all", "favorable"):
        raise ValueError(f"unknown census mode {mode!r}")
    rows = _all_rows(n, reduced_pd, jobs)
    if mode == "favorable":
        by_a = {row.a: row for row in rows}
        chosen = []
        for row in rows:
            dual_a = tuple(sorted(n - x for x in row.a))
            if row.a == dual_a or row.pd_wins <= by_a[dual_a].pd_wins:
                chosen.append(row)
        rows = chosen
    total = sum(r.relevant for r in rows)
    mode_name = "all-manifolds" if mode == "all" else "favorable-of-dual-pair"
    return CensusReport(
        n=n,
        restriction_mode=mode_name,
        reduced_pd=reduced_pd,
        total_varieties=total,
        wins_primal_dual=sum(r.pd_wins for r in rows),
        wins_lifted=sum(r.lifted_wins for r in rows),
        ties=sum(r.ties for r in rows),
        rows=rows,
    )


def split_diff(report: CensusReport, reference: tuple[int, int, int]) -> str:
    """Human-readable comparison of a census split against a reference
    triple; itemizes nothing when they agree."""
    got = report.split()
    if got == reference:
        return "split matches reference exactly\n"
    lines = [
        f"split differs from reference: got {got}, reference {reference}",
        "per-manifold rows (a | relevant pd lifted ties):",
    ]
    for row in report.rows:
        lines.append(
            f"  {'|'.join(str(x) for x in row.a)} | {row.relevant} "
            f"{row.pd_wins} {row.lifted_wins} {row.ties}"
        )
    return "\n".join(lines) + "\n"


def grassmannian_lemma_check(n_max: int = 9):
    """Check |reduced lift set| < cell dimension on every small-side
    Grassmannian condition below half dimension, plus the pair-coordinate
    inequality k(n-k) - c1 - c2 > k(k-1) for k < (n+2)/3.

    Returns (ok, counterexamples).
    """
    from schubsquare.combinatorics import enumerate_conditions, reduced_lift_indices

    if n_max > CENSUS_DIM_LIMIT:
        raise ValueError(f"guarded to n <= {CENSUS_DIM_LIMIT}")
    bad = []
    for n in range(2, n_max + 1):
        for k in range(1, n // 2 + 1):
            t = DescentType(n, (k,))
            half = t.dim / 2
            for cond in enumerate_conditions(t):
                if not cond.codim < half:
                    continue
                if not reduced_lift_indices(cond).size < cond.length:
                    bad.append(("vars", n, k, cond.w))
            if 3 * k < n + 2:
                dim = k * (n - k)
                for csum in range(0, (dim + 1) // 2):
                    if not dim - csum > k * (k - 1):
                        bad.append(("pair", n, k, csum))
    return (not bad), bad
