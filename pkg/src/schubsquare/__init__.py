"""Square bilinear formulations of Schubert problems.

Formulates Schubert-variety membership determinantally, by lifting, or by
reduced lifting; assembles whole Schubert problems as square systems;
tabulates formulation sizes at census scale; and solves plus alpha-certifies
small instances exactly.
"""

from schubsquare.combinatorics import (
    DescentType,
    SchubertCondition,
    dual_condition,
    enumerate_conditions,
    lift_indices,
    parse_condition,
    parse_permutation,
    project_condition,
    reduced_lift_indices,
)
from schubsquare.coordinates import (
    FlagMatrix,
    FlagTuple,
    PatternMatrix,
    pair_pattern,
    position,
    random_flag,
    sample_cell_point,
    stiefel_pattern,
)
from schubsquare.polysys import Polynomial, PolySystem, det
from schubsquare.formulations import (
    Formulation,
    SchubertProblem,
    assemble_problem,
    determinantal,
    grassmannian_determinantal_count,
    lifted,
    primal_dual_counts,
    reduced_lifted,
    solve_lift,
)
from schubsquare.census import grassmannian_lemma_check, manifold_census, run_census
from schubsquare.solve_certify import (
    Certificate,
    TrackedSolution,
    alpha_test,
    certify_batch,
    certify_real,
    newton,
    solve_total_degree,
)

__version__ = "0.1.0"
