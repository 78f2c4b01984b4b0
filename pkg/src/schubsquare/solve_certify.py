"""Newton's method, total-degree homotopy continuation for small square
systems, and exact alpha-theory certification.

The numerical solver works in floating complex arithmetic (numpy).  The
certification path is entirely exact: points are Gaussian rationals, every
reported quantity is a rational upper bound, and floats are rejected at the
boundary.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from schubsquare.exact import (
    QQi,
    root_up,
    rsqrt_down,
    rsqrt_up,
    solve_many,
)
from schubsquare.polysys import PolySystem

VARS_LIMIT = 10
BEZOUT_LIMIT = 20_000

# Rational lower bound of the alpha-theory constant (13 - 3*sqrt(17))/4
# = 0.157670780786754...; the bound below is safe (see test suite, which
# verifies (13 - 4*T)^2 >= 153 exactly).
ALPHA_THRESHOLD = Fraction(15767078, 10 ** 8)

# Robust pairing constants: if alpha(f,x) < 3/100 and |x - y| <= 1/(20 gamma),
# both points are approximate solutions with the same associated zero.
PAIRING_ALPHA = Fraction(3, 100)
PAIRING_RADIUS_FACTOR = Fraction(1, 20)

# The associated zero of a certified point x lies within 2*beta(f,x) of x,
# so two points are distinct once 2*(beta_i + beta_j) < |x_i - x_j|.
SEPARATION_FACTOR = 2


class SingularJacobianError(RuntimeError):
    """The Jacobian at the point is singular; the point is uncertifiable."""


@dataclass
class TrackedSolution:
    point: tuple[complex, ...]
    residual_norm: float
    newton_iterations: int
    path_id: int
    status: str  # "converged" | "diverged" | "path-failure"


@dataclass
class Certificate:
    point: tuple[QQi, ...]
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    certified: bool
    real_certified: bool = False
    distinct_from: list[int] = field(default_factory=list)


# ---------------------------------------------------------------------------
# floating path

def _compiled(system: PolySystem):
    """(equations, jacobian) as complex-coefficient polynomials."""
    sysc = system if system.fieldname == "complex" else system.to_complex()
    return sysc.equations, sysc.jacobian()


def _eval_eqs(eqs, x):
    return np.array([eq.evaluate(x) for eq in eqs], dtype=complex)


def _eval_jac(jac, x):
    return np.array([[p.evaluate(x) for p in row] for row in jac], dtype=complex)


def newton(system: PolySystem, x0, max_iter: int = 50,
           tol: float = 1e-12) -> TrackedSolution:
    """Undamped Newton iteration on a square system; converged when the step
    norm falls below tol."""
    if not system.is_square:
        raise ValueError("Newton iteration needs a square system")
    eqs, jac = _compiled(system)
    x = np.array([complex(v) for v in x0], dtype=complex)
    status = "diverged"
    iters = 0
    for iters in range(1, max_iter + 1):
        fx = _eval_eqs(eqs, x)
        try:
            step = np.linalg.solve(_eval_jac(jac, x), -fx)
        except np.linalg.LinAlgError:
            return TrackedSolution(tuple(x), float(np.max(np.abs(fx))), iters,
                                   0, "path-failure")
        x = x + step
        if np.max(np.abs(step)) < tol:
            status = "converged"
            break
        if np.max(np.abs(x)) > 1e8:
            status = "diverged"
            break
    res = float(np.max(np.abs(_eval_eqs(eqs, x))))
    return TrackedSolution(tuple(x), res, iters, 0, status)


def _bezout_number(system: PolySystem) -> int:
    prod = 1
    for d in system.degrees():
        prod *= max(d, 1)
    return prod


def solve_total_degree(system: PolySystem, seed: int = 0,
                       cluster_tol: float = 1e-8) -> list[TrackedSolution]:
    """Track all start points of a random total-degree system into the target
    along a straight-line homotopy with a random unit rotation; fixed-step
    Euler prediction with up to three Newton corrections per step and step
    halving on corrector failure.  Returns the distinct finite endpoints."""
    if not system.is_square:
        raise ValueError("total-degree homotopy needs a square system")
    nv = system.nvars
    if nv > VARS_LIMIT:
        raise ValueError(f"{nv} variables exceeds the solver limit {VARS_LIMIT}")
    bez = _bezout_number(system)
    if bez > BEZOUT_LIMIT:
        raise ValueError(f"Bezout number {bez} exceeds the limit {BEZOUT_LIMIT}")

    eqs, jac = _compiled(system)
    degrees = [max(d, 1) for d in system.degrees()]
    rng = random.Random(f"homotopy:{seed}")
    gamma = cmath.exp(2j * math.pi * rng.random())
    radii = [cmath.exp(2j * math.pi * rng.random()) for _ in range(nv)]

    # start system g_i = x_i^{d_i} - r_i; its solutions are root grids
    def g_eval(x):
        return np.array([x[i] ** degrees[i] - radii[i] for i in range(nv)],
                        dtype=complex)

    def g_jac(x):
        m = np.zeros((nv, nv), dtype=complex)
        for i in range(nv):
            m[i, i] = degrees[i] * x[i] ** (degrees[i] - 1)
        return m

    def h_eval(x, t):
        return gamma * t * g_eval(x) + (1 - t) * _eval_eqs(eqs, x)

    def h_jac(x, t):
        return gamma * t * g_jac(x) + (1 - t) * _eval_jac(jac, x)

    def h_dt(x):
        return gamma * g_eval(x) - _eval_eqs(eqs, x)

    starts = []
    axis_roots = []
    for i in range(nv):
        r, theta = cmath.polar(radii[i])
        d = degrees[i]
        axis_roots.append([r ** (1 / d) * cmath.exp(1j * (theta + 2 * math.pi * k) / d)
                           for k in range(d)])
    for combo in itertools.product(*axis_roots):
        starts.append(np.array(combo, dtype=complex))

    base_step = 1 / 32
    endpoints = []
    for path_id, start in enumerate(starts):
        x = start.copy()
        t = 1.0
        dt = base_step
        failed = False
        while t > 1e-14:
            step = min(dt, t)
            try:
                dx = np.linalg.solve(h_jac(x, t), -h_dt(x))
            except np.linalg.LinAlgError:
                dx = np.zeros(nv, dtype=complex)
            x_pred = x + dx * (-step)
            t_new = t - step
            ok = False
            xc = x_pred
            for _ in range(3):
                try:
                    corr = np.linalg.solve(h_jac(xc, t_new), -h_eval(xc, t_new))
                except np.linalg.LinAlgError:
                    break
                xc = xc + corr
                if np.max(np.abs(corr)) < 1e-9 * max(1.0, np.max(np.abs(xc))):
                    ok = True
                    break
            if ok and np.max(np.abs(xc)) < 1e8:
                x = xc
                t = t_new
                dt = min(base_step, dt * 2)
            else:
                dt /= 2
                if dt < 1e-7:
                    failed = True
                    break
        if failed:
            endpoints.append(TrackedSolution(tuple(x), math.inf, 0, path_id,
                                             "path-failure"))
            continue
        polish = newton(system, x, max_iter=30, tol=1e-12)
        endpoints.append(TrackedSolution(polish.point, polish.residual_norm,
                                         polish.newton_iterations, path_id,
                                         polish.status))

    # deterministic reduction: sort endpoints, then cluster
    converged = [e for e in endpoints if e.status == "converged"
                 and max(abs(v) for v in e.point) < 1e6]
    converged.sort(key=lambda e: tuple((round(v.real, 10), round(v.imag, 10))
                                       for v in e.point))
    distinct: list[TrackedSolution] = []
    for e in converged:
        dup = False
        for d in distinct:
            if max(abs(a - b) for a, b in zip(e.point, d.point)) < cluster_tol:
                dup = True
                if e.residual_norm < d.residual_norm:
                    d.point = e.point
                    d.residual_norm = e.residual_norm
                break
        if not dup:
            distinct.append(e)
    return distinct


# ---------------------------------------------------------------------------
# exact certification

def _require_exact_scalar(x):
    if isinstance(x, QQi):
        return x
    if isinstance(x, (int, Fraction)):
        return QQi.of(x)
    raise TypeError(
        f"certification path requires exact scalars, got {type(x).__name__}")


def _exact_point(point) -> list[QQi]:
    return [_require_exact_scalar(v) for v in point]


def _exact_system_check(system: PolySystem):
    if system.fieldname != "rational":
        raise TypeError("certification requires an exact-coefficient system")
    for eq in system.equations:
        for c in eq.terms.values():
            _require_exact_scalar(c)


def _jacobian_at(system: PolySystem, jac, x):
    return [[p.evaluate(x) for p in row] for row in jac]


def _vec2(v) -> Fraction:
    """Exact squared 2-norm of a Gaussian-rational vector."""
    acc = Fraction(0)
    for z in v:
        acc += QQi.of(z).abs2()
    return acc


def newton_refine_exact(system: PolySystem, point, steps: int = 3,
                        max_denominator: int | None = 10 ** 60):
    """Exact rational Newton steps.  Optional rational rounding between steps
    keeps coefficient growth bounded without ever leaving exact arithmetic."""
    _exact_system_check(system)
    if not system.is_square:
        raise ValueError("Newton refinement needs a square system")
    x = _exact_point(point)
    jac = system.jacobian()
    for _ in range(steps):
        fx = [QQi.of(v) for v in system.evaluate(x)]
        jx = _jacobian_at(system, jac, x)
        sols = solve_many(jx, [fx])
        if sols is None:
            raise SingularJacobianError("singular Jacobian during refinement")
        x = [xi - di for xi, di in zip(x, sols[0])]
        if max_denominator is not None:
            x = [QQi(v.re.limit_denominator(max_denominator),
                     v.im.limit_denominator(max_denominator))
                 for v in (QQi.of(xi) for xi in x)]
    return [QQi.of(v) for v in x]


def alpha_test(system: PolySystem, point) -> Certificate:
    """Exact alpha test at a Gaussian-rational point of a square system.

    beta bounds |Df(x)^{-1} f(x)|_2 (exact up to an outward square root);
    gamma takes the max over derivative orders k >= 2 of the Frobenius bound
    |Df(x)^{-1} D^k f(x)/k!|_F^{1/(k-1)}.  The Frobenius norm dominates the
    operator norm, so alpha = beta*gamma is a certified upper bound;
    certification compares it against a rational lower bound of the alpha
    constant.  Everything is exact; floats are rejected.
    """
    _exact_system_check(system)
    if not system.is_square:
        raise ValueError("alpha test needs a square system")
    x = _exact_point(point)
    if len(x) != system.nvars:
        raise ValueError("point length mismatch")
    nv = system.nvars

    jac = system.jacobian()
    jx = _jacobian_at(system, jac, x)
    fx = [QQi.of(v) for v in system.evaluate(x)]

    sols = solve_many(jx, [fx])
    if sols is None:
        raise SingularJacobianError("singular Jacobian at the point")
    beta = rsqrt_up(_vec2(sols[0]))

    max_degree = max((eq.total_degree() for eq in system.equations), default=0)
    gamma = Fraction(0)
    for k in range(2, max_degree + 1):
        # D^k f(x)/k! over index multisets, expanded by multiplicity
        fact_k = math.factorial(k)
        columns = []
        multiplicities = []
        for multiset in itertools.combinations_with_replacement(range(nv), k):
            col = []
            for eq in system.equations:
                d = eq
                for i in multiset:
                    d = d.partial(i)
                col.append(QQi.of(d.evaluate(x)) / fact_k)
            columns.append(col)
            counts: dict[int, int] = {}
            for i in multiset:
                counts[i] = counts.get(i, 0) + 1
            mult = fact_k
            for c in counts.values():
                mult //= math.factorial(c)
            multiplicities.append(mult)
        if all(all(v == 0 for v in col) for col in columns):
            continue
        solved = solve_many(jx, columns)
        if solved is None:
            raise SingularJacobianError("singular Jacobian at the point")
        frob2 = Fraction(0)
        for mult, col in zip(multiplicities, solved):
            frob2 += mult * _vec2(col)
        bound = rsqrt_up(frob2)
        gamma = max(gamma, root_up(bound, k - 1) if k > 2 else bound)

    alpha = beta * gamma
    return Certificate(
        point=tuple(x),
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        certified=alpha <= ALPHA_THRESHOLD,
    )


def alpha_test_soft(system: PolySystem, point) -> Certificate:
    """Floating mirror of the alpha test (double precision, heuristic).
    Quantities come back as Fractions of the computed floats; certified here
    means the heuristic inequality held, nothing more."""
    sysc = system if system.fieldname == "complex" else system.to_complex()
    x = np.array([complex(v.to_complex() if isinstance(v, QQi) else v)
                  for v in point], dtype=complex)
    eqs, jac = sysc.equations, sysc.jacobian()
    jx = _eval_jac(jac, x)
    fx = _eval_eqs(eqs, x)
    try:
        y = np.linalg.solve(jx, fx)
    except np.linalg.LinAlgError:
        raise SingularJacobianError("singular Jacobian at the point")
    beta = float(np.linalg.norm(y))
    max_degree = max((eq.total_degree() for eq in sysc.equations), default=0)
    gamma = 0.0
    nv = sysc.nvars
    for k in range(2, max_degree + 1):
        fact_k = math.factorial(k)
        frob2 = 0.0
        for multiset in itertools.combinations_with_replacement(range(nv), k):
            col = []
            for eq in sysc.equations:
                d = eq
                for i in multiset:
                    d = d.partial(i)
                col.append(d.evaluate(x) / fact_k)
            solved = np.linalg.solve(jx, np.array(col, dtype=complex))
            counts: dict[int, int] = {}
            for i in multiset:
                counts[i] = counts.get(i, 0) + 1
            mult = fact_k
            for c in counts.values():
                mult //= math.factorial(c)
            frob2 += mult * float(np.linalg.norm(solved)) ** 2
        bound = math.sqrt(frob2)
        gamma = max(gamma, bound ** (1 / (k - 1)) if k > 2 else bound)
    alpha = beta * gamma
    return Certificate(
        point=tuple(QQi.from_complex(v) for v in x),
        alpha=Fraction(alpha).limit_denominator(10 ** 12),
        beta=Fraction(beta).limit_denominator(10 ** 12),
        gamma=Fraction(gamma).limit_denominator(10 ** 12),
        certified=alpha <= float(ALPHA_THRESHOLD),
    )


def _system_is_real(system: PolySystem) -> bool:
    for eq in system.equations:
        for c in eq.terms.values():
            if isinstance(c, QQi) and c.im != 0:
                return False
    return True


def certify_real(system: PolySystem, cert: Certificate) -> bool:
    """Decide (soundly) whether the associated exact solution is real.

    For real systems the conjugate point is also an approximate solution.  If
    the two approximate points provably share their associated zero (alpha
    below the pairing constant and distance within 1/(20 gamma)), the zero
    equals its own conjugate.  A real point is its own conjugate.  Returns
    True only on proof; undecided cases return False.
    """
    if not cert.certified:
        raise ValueError("real certification needs a certified point")
    if not _system_is_real(system):
        return False
    if all(v.im == 0 for v in cert.point):
        return True
    dist2 = sum((QQi.of(v) - QQi.of(v).conjugate()).abs2() for v in cert.point)
    dist_up = rsqrt_up(dist2)
    if cert.alpha < PAIRING_ALPHA and cert.gamma > 0:
        if dist_up <= PAIRING_RADIUS_FACTOR / cert.gamma:
            return True
    return False


def certify_batch(system: PolySystem, points, refine_steps: int = 3):
    """Refine, alpha-test, and cross-separate a batch of exact points.
    Fills real flags (real systems only) and pairwise distinctness lists.
    Points whose Jacobian is singular come back uncertified."""
    certs: list[Certificate] = []
    for p in points:
        try:
            refined = newton_refine_exact(system, p, steps=refine_steps) \
                if refine_steps else _exact_point(p)
            cert = alpha_test(system, refined)
        except SingularJacobianError:
            cert = Certificate(tuple(_exact_point(p)), Fraction(0), Fraction(0),
                               Fraction(0), certified=False)
        certs.append(cert)
    real_system = _system_is_real(system)
    for cert in certs:
        if cert.certified and real_system:
            cert.real_certified = certify_real(system, cert)
    for i, j in itertools.combinations(range(len(certs)), 2):
        ci, cj = certs[i], certs[j]
        if not (ci.certified and cj.certified):
            continue
        dist2 = sum((a - b).abs2() for a, b in zip(ci.point, cj.point))
        dist_down = rsqrt_down(dist2)
        if SEPARATION_FACTOR * (ci.beta + cj.beta) < dist_down:
            ci.distinct_from.append(j)
            cj.distinct_from.append(i)
    return certs


# ---------------------------------------------------------------------------
# file formats

def emit_solutions(solutions: list[TrackedSolution], nvars: int) -> str:
    lines = [f"solutions nvars {nvars} count {len(solutions)}"]
    for s in solutions:
        lines.append(f"point path {s.path_id} status {s.status} "
                     f"residual {s.residual_norm!r} iters {s.newton_iterations}")
        lines.append(" ".join(f"{v.real!r},{v.imag!r}" for v in s.point))
    return "\n".join(lines) + "\n"


def parse_solutions(text: str) -> list[TrackedSolution]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "solutions":
        raise ValueError("not a solutions file")
    count = int(head[4])
    out = []
    pos = 1
    for _ in range(count):
        meta = lines[pos].split()
        path_id, status = int(meta[2]), meta[4]
        residual = float(meta[6])
        iters = int(meta[8])
        pos += 1
        pt = []
        for tok in lines[pos].split():
            re, im = tok.split(",")
            pt.append(complex(float(re), float(im)))
        pos += 1
        out.append(TrackedSolution(tuple(pt), residual, iters, path_id, status))
    return out


def emit_certificates(certs: list[Certificate]) -> str:
    lines = [f"certificates count {len(certs)}"]
    for c in certs:
        lines.append(
            f"certificate alpha {c.alpha} beta {c.beta} gamma {c.gamma} "
            f"certified {'true' if c.certified else 'false'} "
            f"real {'true' if c.real_certified else 'false'} "
            f"distinct {','.join(str(i) for i in c.distinct_from) or '-'}"
        )
        lines.append(" ".join(str(v) for v in c.point))
    return "\n".join(lines) + "\n"


def parse_certificates(text: str) -> list[Certificate]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "certificates":
        raise ValueError("not a certificates file")
    count = int(head[2])
    out = []
    pos = 1
    for _ in range(count):
        meta = lines[pos].split()
        alpha, beta, gamma = (Fraction(meta[2]), Fraction(meta[4]),
                              Fraction(meta[6]))
        certified = meta[8] == "true"
        real = meta[10] == "true"
        distinct = [] if meta[12] == "-" else [int(x) for x in meta[12].split(",")]
        pos += 1
        point = tuple(QQi.parse(tok) for tok in lines[pos].split())
        pos += 1
        out.append(Certificate(point, alpha, beta, gamma, certified, real,
                               distinct))
    return out
