"""Builders for the four membership formulations of Schubert varieties and
the assembler that turns a whole Schubert problem into one square system.

determinantal: vanishing minors of stacked flag/chart matrices at the
  essential rank conditions.
lifted: auxiliary combination coefficients, one membership per column,
  bilinear across (chart, lift) variable groups; a complete intersection.
reduced-lifted: the same with the smaller index set and relaxed membership
  levels.
primal-dual: size accounting only (variables, and bilinear equation counts
  on Grassmannians).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from schubsquare.combinatorics import (
    DescentType,
    LiftIndexSet,
    SchubertCondition,
    lift_indices,
    parse_permutation,
    reduced_lift_indices,
    reduced_primal_dual_vars,
)
from schubsquare.coordinates import (
    FlagMatrix,
    FlagTuple,
    GenericityError,
    PatternMatrix,
    pair_pattern,
    random_flag,
    stiefel_pattern,
)
from schubsquare.polysys import Polynomial, PolySystem, det


class InconsistentSystemError(ValueError):
    """The point does not satisfy the requested membership conditions."""


class CodimensionError(ValueError):
    """Condition codimensions do not add up to the manifold dimension."""


@dataclass(frozen=True)
class Formulation:
    """One condition's membership system plus its size accounting."""

    kind: str
    system: PolySystem | None
    new_variable_count: int
    equation_count: int
    condition: SchubertCondition


# ---------------------------------------------------------------------------
# shared internals

def _pattern_columns(pattern: PatternMatrix, nvars: int, offset: int = 0):
    """Pattern columns as vectors of polynomials over a registry in which the
    pattern's variable ids start at `offset`."""
    cols = []
    for j in range(pattern.cols):
        col = []
        for i in range(pattern.n):
            cell = pattern.cells[i][j]
            if cell == "zero":
                col.append(Polynomial(nvars))
            elif cell == "one":
                col.append(Polynomial.constant(1, nvars))
            else:
                col.append(Polynomial.variable(offset + cell, nvars))
        cols.append(col)
    return cols


def _form_applied(form, vector):
    """Apply a constant linear form (sequence of field scalars) to a vector of
    polynomials."""
    acc = None
    for c, p in zip(form, vector):
        if c == 0 or p.is_zero():
            continue
        term = p.scale(c)
        acc = term if acc is None else acc + term
    if acc is None:
        return Polynomial(vector[0].nvars)
    return acc


def _lift_equations(cond, flag, columns, idxset: LiftIndexSet, var_index, nvars):
    """Membership equations for the lifted/reduced-lifted formulation.

    columns: chart column vectors over the full registry.  var_index maps
    (k, i) pairs to registry indices.  Equation order: k ascending, then the
    form index j descending from n.
    """
    n = cond.n
    equations = []
    for k in range(1, cond.dtype.a[-1] + 1):
        g = list(columns[k - 1])
        for i in idxset.entries[k - 1]:
            coeff = Polynomial.variable(var_index[(k, i)], nvars)
            ei = columns[i - 1]
            for r in range(n):
                if not ei[r].is_zero():
                    g[r] = g[r] + coeff * ei[r]
        level = idxset.levels[k - 1]
        for j in range(n, level, -1):
            equations.append(_form_applied(flag.form(j), g))
    return equations


def essential_pairs(cond: SchubertCondition) -> list[tuple[int, int]]:
    """Rank conditions (i, j) that are not forced by the neighbors above/left
    and are not vacuous in the ambient space.  Conservative: the retained
    inequalities imply all the dropped ones."""
    n, a = cond.n, cond.dtype.a
    pairs = []
    for j in range(1, len(a) + 1):
        for i in range(1, n + 1):
            r = cond.rank(i, j)
            above = cond.rank(i - 1, j)
            left = cond.rank(i, j - 1) if j > 1 else 0
            if r > above and r > left and r > i + a[j - 1] - n:
                pairs.append((i, j))
    return pairs


def _det_equations(cond, flag, columns, nvars):
    """All minors of the stacked (flag columns | chart columns) matrices at
    the essential rank conditions; flag columns first so determinant
    expansion meets the constants early."""
    n = cond.n
    equations = []
    for i, j in essential_pairs(cond):
        aj = cond.dtype.a[j - 1]
        size = i + aj - cond.rank(i, j) + 1
        stacked = []
        for t in range(1, i + 1):
            fcol = flag.column(t)
            stacked.append([Polynomial.constant(fcol[r], nvars) for r in range(n)])
        for t in range(aj):
            stacked.append(columns[t])
        ncols = i + aj
        for rows_sel in itertools.combinations(range(n), size):
            for cols_sel in itertools.combinations(range(ncols), size):
                sub = [[stacked[c][r] for c in cols_sel] for r in rows_sel]
                equations.append(det(sub))
    return equations


def _registry_for(pattern: PatternMatrix, lift_pairs=(), lift_group="lift",
                  lift_prefix="y"):
    names = list(pattern.var_names())
    groups = {"stiefel": tuple(range(len(names)))}
    var_index = {}
    if lift_pairs:
        start = len(names)
        for t, (k, i) in enumerate(lift_pairs):
            names.append(f"{lift_prefix}[{k},{i}]")
            var_index[(k, i)] = start + t
        groups[lift_group] = tuple(range(start, len(names)))
    return names, groups, var_index


# ---------------------------------------------------------------------------
# the four formulations

def determinantal(cond: SchubertCondition, flag: FlagMatrix,
                  coords: PatternMatrix) -> Formulation:
    """Minor equations cutting out the Schubert variety inside the chart."""
    if coords.n != cond.n or coords.cols != cond.dtype.a[-1]:
        raise ValueError("chart shape does not match the condition")
    if flag.n != cond.n:
        raise ValueError("flag dimension mismatch")
    names, groups, _ = _registry_for(coords)
    nvars = len(names)
    columns = _pattern_columns(coords, nvars)
    eqs = _det_equations(cond, flag, columns, nvars)
    system = PolySystem(names, groups, eqs, "rational", "determinantal")
    return Formulation("determinantal", system, 0, len(eqs), cond)


def grassmannian_determinantal_count(cond: SchubertCondition) -> int:
    """Dimension of the span of the chart's determinantal equations for a
    Grassmannian Schubert variety: the number of increasing index sequences
    not dominated by the condition's pivot sequence."""
    if not cond.dtype.is_grassmannian:
        raise ValueError("count applies to Grassmannian conditions only")
    k, n = cond.dtype.a[0], cond.n
    pivots = sorted(cond.w[:k])
    return sum(
        1
        for p in itertools.combinations(range(1, n + 1), k)
        if any(x > q for x, q in zip(p, pivots))
    )


def _lifted_formulation(cond, flag, coords, idxset, kindname):
    if coords.n != cond.n or coords.cols != cond.dtype.a[-1]:
        raise ValueError("chart shape does not match the condition")
    if flag.n != cond.n:
        raise ValueError("flag dimension mismatch")
    pairs = idxset.pairs()
    names, groups, var_index = _registry_for(coords, pairs)
    nvars = len(names)
    columns = _pattern_columns(coords, nvars)
    eqs = _lift_equations(cond, flag, columns, idxset, var_index, nvars)
    system = PolySystem(names, groups, eqs, "rational", kindname)
    return Formulation(kindname, system, idxset.size, len(eqs), cond)


def lifted(cond: SchubertCondition, flag: FlagMatrix,
           coords: PatternMatrix) -> Formulation:
    """Full lifted membership system: bilinear across (chart, lift) groups,
    one equation per form index above each column's membership level."""
    return _lifted_formulation(cond, flag, coords, lift_indices(cond), "lifted")


def reduced_lifted(cond: SchubertCondition, flag: FlagMatrix,
                   coords: PatternMatrix) -> Formulation:
    """Lifted system over the reduced index set with relaxed membership
    levels; same chart vanishing locus with fewer variables and equations."""
    return _lifted_formulation(cond, flag, coords, reduced_lift_indices(cond),
                               "reduced-lifted")


def solve_lift(cond: SchubertCondition, flag: FlagMatrix, E, kind: str = "full"):
    """Exact lift coefficients of an in-cell point.

    E is an n x a_s matrix whose columns span a flag of the cell, in general
    position with the target flag.  Returns {(k, i): value}.  Raises
    InconsistentSystemError when the point is outside the (closed) variety or
    on the cell boundary, GenericityError on a singular (non-general) solve.
    """
    from schubsquare.exact import solve_linear

    if kind not in ("full", "reduced"):
        raise ValueError(f"unknown lift kind {kind!r}")
    idxset = lift_indices(cond) if kind == "full" else reduced_lift_indices(cond)
    n = cond.n
    cols = [tuple(E[r][j] for r in range(n)) for j in range(cond.dtype.a[-1])]
    forms = [None] + [flag.form(j) for j in range(1, n + 1)]

    def apply(form, vec):
        acc = 0
        for c, x in zip(form, vec):
            if c != 0 and x != 0:
                acc = acc + c * x
        return acc

    out = {}
    for k in range(1, cond.dtype.a[-1] + 1):
        level = idxset.levels[k - 1]
        unknowns = idxset.entries[k - 1]
        rows = []
        rhs = []
        for j in range(n, level, -1):
            rows.append([apply(forms[j], cols[i - 1]) for i in unknowns])
            rhs.append(-apply(forms[j], cols[k - 1]))
        if unknowns:
            status, x = solve_linear(rows, rhs)
            if status == "inconsistent":
                raise InconsistentSystemError(
                    f"no lift for column {k}: point is outside the variety")
            if status == "underdetermined":
                raise GenericityError(
                    f"singular lift solve for column {k}: resample the point")
            for i, v in zip(unknowns, x):
                out[(k, i)] = v
        else:
            if any(v != 0 for v in rhs):
                raise InconsistentSystemError(
                    f"no lift for column {k}: point is outside the variety")
        if kind == "full":
            # the combination must leave the open cell's level, not drop below
            g = list(cols[k - 1])
            for i in unknowns:
                c = out[(k, i)]
                if c != 0:
                    g = [gv + c * xv for gv, xv in zip(g, cols[i - 1])]
            if apply(forms[level], g) == 0:
                raise InconsistentSystemError(
                    f"column {k} lands below its level: boundary point")
    return out


def primal_dual_counts(cond: SchubertCondition, reduced: bool = False):
    """Added variables (and, on Grassmannians, bilinear equation count) of the
    primal-dual membership formulation.  The reduced variant takes the best
    codim-preserving projection; equation counts are only defined here for
    Grassmannians (a_1 x a_1 pairing equations)."""
    nvars = reduced_primal_dual_vars(cond) if reduced else cond.length
    eqs = cond.dtype.a[0] ** 2 if cond.dtype.is_grassmannian else None
    return nvars, eqs


# ---------------------------------------------------------------------------
# whole problems

@dataclass(frozen=True)
class SchubertProblem:
    """Conditions on one flag manifold together with their flags; a valid
    problem has codimensions summing to the manifold dimension."""

    conditions: tuple[SchubertCondition, ...]
    flags: FlagTuple

    def __post_init__(self):
        if len(self.conditions) != len(self.flags.flags):
            raise ValueError("one flag per condition required")
        types = {c.dtype for c in self.conditions}
        if len(types) != 1:
            raise ValueError("all conditions must live on the same manifold")

    @property
    def dtype(self) -> DescentType:
        return self.conditions[0].dtype

    def codim_sum(self) -> int:
        return sum(c.codim for c in self.conditions)


@dataclass
class ConditionReport:
    index: int  # 1-based
    kind: str
    perm: str
    new_vars: int
    eqs: int


@dataclass
class FormulationReport:
    manifold: str
    entries: list[ConditionReport]
    total_vars: int
    total_eqs: int
    square: bool

    def text(self) -> str:
        lines = [f"formulation-report {self.manifold}"]
        for e in self.entries:
            lines.append(
                f"condition {e.index} kind={e.kind} perm={e.perm} "
                f"new_vars={e.new_vars} eqs={e.eqs}"
            )
        lines.append(
            f"totals vars={self.total_vars} eqs={self.total_eqs} "
            f"square={'true' if self.square else 'false'}"
        )
        return "\n".join(lines) + "\n"

    def json_like(self) -> str:
        rows = ", ".join(
            f'{{"index": {e.index}, "kind": "{e.kind}", "perm": "{e.perm}", '
            f'"new_vars": {e.new_vars}, "eqs": {e.eqs}}}'
            for e in self.entries
        )
        return (
            f'{{"manifold": "{self.manifold}", "conditions": [{rows}], '
            f'"total_vars": {self.total_vars}, "total_eqs": {self.total_eqs}, '
            f'"square": {"true" if self.square else "false"}}}\n'
        )

    def csv(self) -> str:
        lines = ["index,kind,perm,new_vars,eqs"]
        for e in self.entries:
            lines.append(f"{e.index},{e.kind},{e.perm},{e.new_vars},{e.eqs}")
        lines.append(f"totals,,,{self.total_vars},{self.total_eqs}")
        return "\n".join(lines) + "\n"


def resolve_strategy(conditions, strategy):
    """Concrete per-condition kinds.  "auto" resolves to: chart for the first
    condition (and the second on Grassmannians), determinantal where the
    condition is a hypersurface, reduced-lifted otherwise."""
    if len(strategy) != len(conditions):
        raise ValueError("one strategy entry per condition required")
    grass = conditions[0].dtype.is_grassmannian
    out = []
    for idx, (cond, kind) in enumerate(zip(conditions, strategy)):
        if kind == "auto":
            if idx == 0 or (idx == 1 and grass and out[0] == "chart"):
                kind = "chart"
            elif cond.codim == 1:
                kind = "det"
            else:
                kind = "reduced"
        out.append(kind)
    for idx, (cond, kind) in enumerate(zip(conditions, out)):
        if kind not in ("chart", "lifted", "reduced", "det"):
            raise ValueError(f"unknown strategy kind {kind!r}")
        if kind == "chart":
            if idx == 0:
                continue
            if idx == 1 and grass and out[0] == "chart":
                continue
            raise ValueError("chart strategy is only valid for condition 1 "
                             "(and 2 on Grassmannians)")
        if kind == "det" and cond.codim != 1:
            raise ValueError(
                f"determinantal strategy needs codim 1, condition {idx + 1} "
                f"has codim {cond.codim}")
    return out


def assemble_problem(problem: SchubertProblem, strategy):
    """Assemble the chart plus per-condition membership equations into one
    system.  Returns (PolySystem, FormulationReport); the system is square
    whenever every non-chart condition of codim > 1 uses a lift."""
    conditions = problem.conditions
    t = problem.dtype
    if problem.codim_sum() != t.dim:
        raise CodimensionError(
            f"not zero-dimensional: codims sum to {problem.codim_sum()}, "
            f"manifold dimension is {t.dim}")
    kinds = resolve_strategy(conditions, strategy)

    chart_idx = [i for i, k in enumerate(kinds) if k == "chart"]
    if not chart_idx:
        raise ValueError("a chart condition is required")
    if not problem.flags.flags[0].is_standard():
        raise ValueError("the chart requires the standard flag for condition 1")
    if len(chart_idx) == 2:
        if problem.flags.flags[1] != FlagMatrix.opposite(t.n):
            raise ValueError("the pair chart requires the opposite flag for "
                             "condition 2")
        pattern = pair_pattern(conditions[0], conditions[1])
    else:
        pattern = stiefel_pattern(conditions[0])

    names = list(pattern.var_names())
    groups: dict[str, tuple[int, ...]] = {"stiefel": tuple(range(len(names)))}
    lift_maps: dict[int, dict] = {}
    lift_sets: dict[int, LiftIndexSet] = {}
    for i, kind in enumerate(kinds):
        if kind in ("lifted", "reduced"):
            idxset = (lift_indices(conditions[i]) if kind == "lifted"
                      else reduced_lift_indices(conditions[i]))
            start = len(names)
            var_index = {}
            for k, ii in idxset.pairs():
                var_index[(k, ii)] = len(names)
                names.append(f"y{i + 1}[{k},{ii}]")
            groups[f"lift-{i + 1}"] = tuple(range(start, len(names)))
            lift_maps[i] = var_index
            lift_sets[i] = idxset

    nvars = len(names)
    columns = _pattern_columns(pattern, nvars)

    equations: list[Polynomial] = []
    entries: list[ConditionReport] = []
    for i, (cond, kind) in enumerate(zip(conditions, kinds)):
        flag = problem.flags.flags[i]
        if kind == "chart":
            new_vars = pattern.var_count if i == chart_idx[0] else 0
            entries.append(ConditionReport(i + 1, "chart", cond.text(), new_vars, 0))
            continue
        if kind == "det":
            eqs = _det_equations(cond, flag, columns, nvars)
        else:
            eqs = _lift_equations(cond, flag, columns, lift_sets[i],
                                  lift_maps[i], nvars)
        equations.extend(eqs)
        new_vars = lift_sets[i].size if i in lift_sets else 0
        entries.append(ConditionReport(i + 1, kind, cond.text(), new_vars, len(eqs)))

    system = PolySystem(names, groups, equations, "rational",
                        "problem:" + "+".join(kinds))
    report = FormulationReport(
        manifold=t.label(),
        entries=entries,
        total_vars=system.nvars,
        total_eqs=system.neqs,
        square=system.is_square,
    )
    return system, report


# ---------------------------------------------------------------------------
# problem files

@dataclass
class ProblemSpec:
    n: int
    a: tuple[int, ...]
    perms: list[str]
    flag_specs: list[str]
    strategies: list[str]

    @property
    def dtype(self) -> DescentType:
        return DescentType(self.n, self.a)


def parse_problem(text: str) -> ProblemSpec:
    n = None
    a = None
    perms: list[str] = []
    flag_specs: list[str] = []
    strategies: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "n":
            n = int(tokens[1])
        elif tokens[0] == "a":
            a = tuple(int(x) for x in tokens[1].split(","))
        elif tokens[0] == "condition":
            if len(tokens) < 3:
                raise ValueError(f"condition line needs perm and flag: {raw!r}")
            perms.append(tokens[1])
            flag_specs.append(tokens[2])
            strategies.append(tokens[3] if len(tokens) > 3 else "auto")
        elif tokens[0] == "problem":
            continue
        else:
            raise ValueError(f"unknown problem directive {tokens[0]!r}")
    if n is None or a is None or not perms:
        raise ValueError("problem file needs n, a, and at least one condition")
    return ProblemSpec(n, a, perms, flag_specs, strategies)


def emit_problem(spec: ProblemSpec) -> str:
    lines = ["problem", f"n {spec.n}", "a " + ",".join(str(x) for x in spec.a)]
    for perm, flag, strat in zip(spec.perms, spec.flag_specs, spec.strategies):
        lines.append(f"condition {perm} {flag} {strat}")
    return "\n".join(lines) + "\n"


def materialize_flag(spec: str, n: int, base_dir: str = ".") -> FlagMatrix:
    if spec == "standard":
        return FlagMatrix.standard(n)
    if spec == "opposite":
        return FlagMatrix.opposite(n)
    if spec.startswith("random:"):
        body = spec.split(":", 1)[1]
        if ":" in body:
            seed, mode = body.split(":", 1)
        else:
            seed, mode = body, "rational"
        return random_flag(n, int(seed), mode)
    if spec.startswith("file:"):
        import os

        from schubsquare.coordinates import parse_flag
        path = spec.split(":", 1)[1]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        with open(path) as fh:
            return parse_flag(fh.read())
    raise ValueError(f"unknown flag spec {spec!r}")


def materialize_problem(spec: ProblemSpec, base_dir: str = "."):
    t = spec.dtype
    conditions = tuple(
        SchubertCondition(parse_permutation(p, t.n), t) for p in spec.perms
    )
    flags = tuple(materialize_flag(f, t.n, base_dir) for f in spec.flag_specs)
    problem = SchubertProblem(conditions,
                              FlagTuple(flags, flags[0].is_standard()))
    return problem, list(spec.strategies)
