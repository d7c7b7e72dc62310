"""Deterministic solver agents.

Quadratic objectives over the simplex are handled by a projected-gradient
method with Barzilai-Borwein steps (SPG); the robust formulation is a dense
two-phase primal simplex LP with a Bland's-rule fallback on degeneracy.
Every solver is deterministic given (instance, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadConfig,
    BadDimension,
    DegenerateRisk,
    Infeasible,
    Unbounded,
)
from .formulations import WeightVector
from .marketdata import MarketEstimates

Array = np.ndarray

FEAS_TOL = 1e-6          # feasibility residual bound for status=optimal
RETURN_PENALTY = 1e6     # exact-penalty multiplier for the soft return constraint
DEFAULT_STARTS = 16      # multi-start count when starts > 1 is requested


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one solver run; objective is the solver's own objective at x."""

    x: WeightVector
    objective: float
    status: str  # optimal | iteration_limit | infeasible
    iterations: int


# ---------------------------------------------------------------------------
# projections
# ---------------------------------------------------------------------------

def _project_hyperplane_box(v: Array, a: Array, rhs: float, lo: Array, hi: Array) -> Array:
    """Euclidean projection onto {w : a.w = rhs, lo <= w <= hi} for a >= 0.

    The KKT point is w(tau) = clip(v - tau*a, lo, hi) where g(tau) = a.w(tau)
    is piecewise linear and non-increasing; the crossing segment is located by
    evaluating g at every clamp breakpoint, then tau is solved exactly on the
    segment's free coordinate set.
    """
    v = np.asarray(v, dtype=float)
    pos = a > 0.0
    if not np.any(pos):
        raise ValueError("projection needs at least one positive coefficient")

    def solve_on_free_set(free, w_ref):
        denom = float(np.sum(a[free] ** 2))
        if denom <= 0.0:
            return None
        clamped = float(a[~free] @ w_ref[~free])
        tau = (float(a[free] @ v[free]) + clamped - rhs) / denom
        return np.clip(v - tau * a, lo, hi)

    bps = (v[pos] - lo[pos]) / a[pos]
    finite_hi = pos & np.isfinite(hi)
    if np.any(finite_hi):
        bps = np.concatenate([bps, (v[finite_hi] - hi[finite_hi]) / a[finite_hi]])
    bps = np.unique(bps)  # ascending; g(bps) is non-increasing

    W = np.clip(v[None, :] - bps[:, None] * a[None, :], lo[None, :], hi[None, :])
    G = W @ a
    tol = 1e-12 * max(1.0, abs(rhs))

    if G[-1] > rhs + tol:
        raise ValueError("projection target below feasible range")
    if G[0] < rhs - tol:
        # crossing lies left of every breakpoint: only infinite-hi coords move
        free = pos & ~np.isfinite(hi)
        w = solve_on_free_set(free, W[0])
        if w is None:
            raise ValueError("projection target above feasible range")
        return w

    k = int(np.searchsorted(-G, -rhs, side="right")) - 1  # largest k: G[k] >= rhs
    if k >= len(bps) - 1:
        return W[-1]
    # free set on the open segment (bps[k], bps[k+1])
    mid = 0.5 * (bps[k] + bps[k + 1])
    raw = v - mid * a
    free = pos & (raw > lo) & (raw < hi)
    w = solve_on_free_set(free, W[k])
    if w is None:
        return W[k]  # plateau segment: g is constant and already equals rhs
    return w


def project_simplex_box(v) -> Array:
    """Closest point to v with coordinates in [0, 1] summing to exactly 1."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise BadDimension(f"expected a non-empty vector, got shape {v.shape}")
    if v.size == 1:
        return np.ones(1)
    ones = np.ones(v.size)
    return _project_hyperplane_box(v, ones, 1.0, np.zeros(v.size), ones)


# ---------------------------------------------------------------------------
# projected gradient engine (SPG)
# ---------------------------------------------------------------------------

def _spg_minimize(f, grad, project, x0, max_iter=2000, tol=1e-10, memory=10):
    """Spectral projected gradient with a nonmonotone Armijo line search.

    Returns (x_best, f_best, iterations, converged); convergence is measured
    by the fixed-step projected gradient residual ||x - P(x - g)||_inf.
    """
    x = project(np.asarray(x0, dtype=float))
    fx = f(x)
    g = grad(x)
    best_x, best_f = x, fx
    recent = [fx]
    alpha = 1.0
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        if float(np.max(np.abs(x - project(x - g)))) <= tol:
            converged = True
            break
        d = project(x - alpha * g) - x
        gd = float(g @ d)
        if gd >= 0.0:  # numerical stall: the scaled step is not a descent step
            alpha = 1.0
            d = project(x - g) - x
            gd = float(g @ d)
            if gd >= 0.0:
                converged = float(np.max(np.abs(d))) <= tol
                break
        fref = max(recent)
        t = 1.0
        fnew = f(x + d)
        while fnew > fref + 1e-4 * t * gd and t > 1e-14:
            t *= 0.5
            fnew = f(x + t * d)
        x_new = x + t * d
        g_new = grad(x_new)
        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        alpha = min(max(float(s @ s) / sy, 1e-12), 1e12) if sy > 1e-30 else 1e12
        x, fx, g = x_new, fnew, g_new
        recent.append(fx)
        if len(recent) > memory:
            recent.pop(0)
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f, iterations, converged


def _multi_starts(n: int, count: int, seed: int = 0) -> list[Array]:
    """Equal weights, then vertices, then uniform simplex draws, capped at count."""
    pts = [np.full(n, 1.0 / n)]
    for i in range(n):
        if len(pts) >= count:
            break
        e = np.zeros(n)
        e[i] = 1.0
        pts.append(e)
    rng = np.random.default_rng(seed)
    while len(pts) < count:
        pts.append(rng.dirichlet(np.ones(n)))
    return pts[:count]


# ---------------------------------------------------------------------------
# quadratic programming
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QpProblem:
    """min 0.5 x'Qx + c'x subject to one equality row and box bounds."""

    Q: Array
    c: Array
    eq: list  # [(a_vector, b)]; at most one row
    bounds: Array  # (n, 2) array of [lo, hi]; hi may be +inf

    def __post_init__(self):
        object.__setattr__(self, "Q", np.asarray(self.Q, dtype=float))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))
        object.__setattr__(self, "bounds", np.asarray(self.bounds, dtype=float))
        if len(self.eq) > 1:
            raise BadConfig("solve_qp supports at most one equality row")
        if np.any(self.bounds[:, 0] > self.bounds[:, 1]):
            raise BadConfig("lower bound exceeds upper bound")


def solve_qp(problem: QpProblem, start=None, max_iter: int = 5000, tol: float = 1e-10) -> SolveReport:
    """Projected-gradient solve of a PSD QP over one equality row plus a box."""
    Q = 0.5 * (problem.Q + problem.Q.T)
    c = problem.c
    n = Q.shape[0]
    lo, hi = problem.bounds[:, 0], problem.bounds[:, 1]
    if problem.eq:
        a, b = problem.eq[0]
        a = np.asarray(a, dtype=float)

        def project(v):
            return _project_hyperplane_box(v, a, float(b), lo, hi)
    else:
        def project(v):
            return np.clip(v, lo, hi)

    def f(x):
        return 0.5 * float(x @ Q @ x) + float(c @ x)

    def grad(x):
        return Q @ x + c

    if start is None:
        start = np.full(n, 1.0 / n)
    x, fx, iterations, converged = _spg_minimize(f, grad, project, start, max_iter, tol)
    status = "optimal" if converged else "iteration_limit"
    return SolveReport(WeightVector(x), fx, status, iterations)


def solve_gmv(est: MarketEstimates, max_iter: int = 5000, tol: float = 1e-10) -> SolveReport:
    """Global minimum variance: min x'Sigma x on the simplex."""
    n = est.n
    problem = QpProblem(
        Q=2.0 * est.cov,
        c=np.zeros(n),
        eq=[(np.ones(n), 1.0)],
        bounds=np.column_stack([np.zeros(n), np.ones(n)]),
    )
    return solve_qp(problem, max_iter=max_iter, tol=tol)


def _markowitz_from_start(est: MarketEstimates, rp: float, x0: Array, max_iter: int, tol: float):
    """Minimize x'Sigma x + M*max(0, rp - r.x)^2 on the simplex from one start.

    The penalized optimum satisfies x = argmin x'Sigma x - lam*(r.x) with
    lam = 2M*max(0, rp - r.x), so lam is found by bisection on the increasing
    map lam -> r.x(lam) + lam/(2M), each step a well-conditioned simplex QP;
    a final SPG pass on the penalized objective polishes the fixed point.
    """
    n, r, cov = est.n, est.r, est.cov
    ones = np.ones(n)
    lo, hi = np.zeros(n), np.ones(n)

    def project(v):
        return _project_hyperplane_box(v, ones, 1.0, lo, hi)

    def penalized(x):
        shortfall = max(0.0, rp - float(r @ x))
        return float(x @ cov @ x) + RETURN_PENALTY * shortfall**2

    def penalized_grad(x):
        shortfall = max(0.0, rp - float(r @ x))
        return 2.0 * (cov @ x) - 2.0 * RETURN_PENALTY * shortfall * r

    def inner(lam, start):
        # min x'Sigma x - lam * r.x over the simplex
        def f(x):
            return float(x @ cov @ x) - lam * float(r @ x)

        def grad(x):
            return 2.0 * (cov @ x) - lam * r

        return _spg_minimize(f, grad, project, start, max_iter, tol)

    x, _, iters, _ = inner(0.0, x0)
    total = iters
    if float(r @ x) < rp:
        lam_hi = 2.0 * RETURN_PENALTY * (rp - float(r @ x))
        lam_lo = 0.0
        for _ in range(60):
            lam = 0.5 * (lam_lo + lam_hi)
            x, _, iters, _ = inner(lam, x)
            total += iters
            if float(r @ x) + lam / (2.0 * RETURN_PENALTY) < rp:
                lam_lo = lam
            else:
                lam_hi = lam
    x, fx, iters, converged = _spg_minimize(penalized, penalized_grad, project, x, max_iter, tol)
    return x, fx, total + iters, converged


def solve_markowitz(
    est: MarketEstimates,
    rp: float,
    starts: int = 1,
    max_iter: int = 5000,
    tol: float = 1e-10,
    seed: int = 0,
) -> SolveReport:
    """min x'Sigma x on the simplex with the return constraint r.x >= rp
    enforced as an exact squared penalty (multiplier 1e6).

    An unreachable target (rp above every asset return) yields the best-effort
    corner on the top-return asset, flagged iteration_limit.
    """
    n = est.n
    r = est.r
    if rp > float(np.max(r)):
        idx = int(np.argmax(r))
        x = np.zeros(n)
        x[idx] = 1.0
        return SolveReport(WeightVector(x), float(x @ est.cov @ x), "iteration_limit", 0)

    best = None
    total_iters = 0
    all_converged = True
    for x0 in _multi_starts(n, max(1, starts), seed):
        x, fx, iters, converged = _markowitz_from_start(est, rp, x0, max_iter, tol)
        total_iters += iters
        all_converged = all_converged and converged
        if best is None or fx < best[1]:
            best = (x, fx)
    x, fx = best
    feasible = float(r @ x) >= rp - FEAS_TOL
    status = "optimal" if all_converged and feasible else "iteration_limit"
    return SolveReport(WeightVector(x), fx, status, total_iters)


def markowitz_sweep(
    est: MarketEstimates, num_points: int = 15, starts: int = 1, seed: int = 0
) -> list[SolveReport]:
    """Solve at equally spaced return targets between min and max asset return."""
    if num_points < 2:
        raise BadConfig("num_points must be >= 2")
    targets = np.linspace(float(np.min(est.r)), float(np.max(est.r)), num_points)
    return [solve_markowitz(est, float(t), starts=starts, seed=seed) for t in targets]


# ---------------------------------------------------------------------------
# linear programming: dense two-phase primal simplex
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LpProblem:
    """maximize c'v subject to A_ub v <= b_ub, A_eq v = b_eq, lo <= v <= hi."""

    c: Array
    A_ub: Array = field(default_factory=lambda: np.zeros((0, 0)))
    b_ub: Array = field(default_factory=lambda: np.zeros(0))
    A_eq: Array = field(default_factory=lambda: np.zeros((0, 0)))
    b_eq: Array = field(default_factory=lambda: np.zeros(0))
    bounds: list = field(default_factory=list)  # [(lo, hi-or-None)] per variable

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        object.__setattr__(self, "c", c)
        n = c.shape[0]
        for name in ("A_ub", "A_eq"):
            mat = np.asarray(getattr(self, name), dtype=float)
            if mat.size == 0:
                mat = mat.reshape(0, n)
            object.__setattr__(self, name, mat)
        object.__setattr__(self, "b_ub", np.asarray(self.b_ub, dtype=float))
        object.__setattr__(self, "b_eq", np.asarray(self.b_eq, dtype=float))
        if not self.bounds:
            object.__setattr__(self, "bounds", [(0.0, None)] * n)
        if self.A_ub.shape != (self.b_ub.shape[0], n) or self.A_eq.shape != (self.b_eq.shape[0], n):
            raise BadConfig("inconsistent LP dimensions")
        if len(self.bounds) != n:
            raise BadConfig("bounds length must match variable count")


def _pivot(T: Array, basis: list, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])
    basis[row] = col


def _simplex_iterate(T: Array, basis: list, ncols: int, max_pivots: int, bland_after: int = 50):
    """Run simplex pivots on a reduced-cost tableau (minimization).

    Dantzig's rule with a switch to Bland's rule after a run of degenerate
    pivots. Returns the pivot count; raises Unbounded if no leaving row exists.
    """
    m = len(basis)
    pivots = 0
    degenerate_run = 0
    while pivots < max_pivots:
        costs = T[-1, :ncols]
        if degenerate_run >= bland_after:
            eligible = np.flatnonzero(costs < -1e-9)
            if eligible.size == 0:
                return pivots
            col = int(eligible[0])
        else:
            col = int(np.argmin(costs))
            if costs[col] >= -1e-9:
                return pivots
        column = T[:m, col]
        ok = column > 1e-9
        if not np.any(ok):
            raise Unbounded("no leaving variable for the entering column")
        ratios = np.full(m, np.inf)
        ratios[ok] = T[:m, -1][ok] / column[ok]
        rmin = float(np.min(ratios))
        ties = np.flatnonzero(ratios <= rmin + 1e-12)
        row = int(ties[np.argmin(np.asarray(basis)[ties])])  # Bland tie-break
        obj_before = T[-1, -1]
        _pivot(T, basis, row, col)
        pivots += 1
        degenerate_run = degenerate_run + 1 if T[-1, -1] <= obj_before + 1e-12 else 0
    raise RuntimeError(f"simplex did not terminate within {max_pivots} pivots")


def solve_lp(problem: LpProblem, max_pivots: int = 20000) -> SolveReport:
    """Two-phase dense simplex; returns an optimal basic feasible solution.

    Raises Infeasible when phase 1 cannot zero the artificials and Unbounded
    when phase 2 finds an improving ray.
    """
    n = problem.c.shape[0]
    lo = np.array([b[0] for b in problem.bounds], dtype=float)
    if not np.all(np.isfinite(lo)):
        raise BadConfig("variable lower bounds must be finite")

    # shift z = v - lo; finite upper bounds become extra <= rows
    rows, rhs, kinds = [], [], []
    for i in range(problem.A_eq.shape[0]):
        rows.append(problem.A_eq[i])
        rhs.append(float(problem.b_eq[i] - problem.A_eq[i] @ lo))
    n_eq = len(rows)
    for i in range(problem.A_ub.shape[0]):
        rows.append(problem.A_ub[i])
        rhs.append(float(problem.b_ub[i] - problem.A_ub[i] @ lo))
    for j, (_, hi) in enumerate(problem.bounds):
        if hi is not None and np.isfinite(hi):
            row = np.zeros(n)
            row[j] = 1.0
            rows.append(row)
            rhs.append(float(hi - lo[j]))
    m = len(rows)
    n_ub = m - n_eq

    A = np.vstack(rows) if m else np.zeros((0, n))
    b = np.asarray(rhs, dtype=float)
    S = np.zeros((m, n_ub))
    for k in range(n_ub):
        S[n_eq + k, k] = 1.0
    full = np.hstack([A, S])

    # row equilibration, then sign-normalize so b >= 0
    scale = np.maximum(np.max(np.abs(full), axis=1), 1e-30)
    full /= scale[:, None]
    b = b / scale
    flip = b < 0.0
    full[flip] *= -1.0
    b[flip] = -b[flip]

    ncols = n + n_ub
    T = np.zeros((m + 1, ncols + m + 1))
    T[:m, :ncols] = full
    T[:m, ncols:ncols + m] = np.eye(m)
    T[:m, -1] = b
    basis = [ncols + i for i in range(m)]

    # phase 1: minimize the artificial sum
    T[-1, ncols:ncols + m] = 1.0
    for i in range(m):
        T[-1] -= T[i]
    pivots = _simplex_iterate(T, basis, ncols + m, max_pivots)
    art_value = sum(T[i, -1] for i in range(m) if basis[i] >= ncols)
    if art_value > 1e-7:
        raise Infeasible(f"phase-1 artificial residual {art_value:.3e}")

    # drive remaining artificials out of the basis (or drop redundant rows)
    keep = list(range(m))
    for i in range(m):
        if basis[i] >= ncols:
            candidates = np.flatnonzero(np.abs(T[i, :ncols]) > 1e-9)
            if candidates.size:
                _pivot(T, basis, i, int(candidates[0]))
                pivots += 1
            else:
                keep.remove(i)
    if len(keep) < m:
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[i] for i in keep]
        m = len(keep)

    # phase 2: minimize -c.z over the original and slack columns
    T = np.hstack([T[:, :ncols], T[:, -1:]])
    T[-1, :] = 0.0
    T[-1, :n] = -problem.c
    for i in range(m):
        cb = T[-1, basis[i]]
        if cb != 0.0:
            T[-1] -= cb * T[i]
    pivots += _simplex_iterate(T, basis, ncols, max_pivots)

    z = np.zeros(ncols)
    for i in range(m):
        z[basis[i]] = T[i, -1]
    v = z[:n] + lo
    objective = float(problem.c @ v)
    return SolveReport(WeightVector(v), objective, "optimal", pivots)


# ---------------------------------------------------------------------------
# robust formulation
# ---------------------------------------------------------------------------

def robust_lp(est: MarketEstimates, gamma: float) -> LpProblem:
    """LP over (x, p, q): maximize r.x - gamma*p - sum(q) with p + q_i >= s_i x_i."""
    n = est.n
    if not 0.0 <= gamma <= n:
        raise BadConfig(f"gamma must lie in [0, {n}]")
    c = np.concatenate([est.r, [-gamma], -np.ones(n)])
    A_eq = np.concatenate([np.ones(n), [0.0], np.zeros(n)])[None, :]
    A_ub = np.zeros((n, 2 * n + 1))
    for i in range(n):
        A_ub[i, i] = est.s[i]
        A_ub[i, n] = -1.0
        A_ub[i, n + 1 + i] = -1.0
    bounds = [(0.0, 1.0)] * n + [(0.0, None)] * (n + 1)
    return LpProblem(c=c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=np.ones(1), bounds=bounds)


def solve_robust(est: MarketEstimates, gamma: float) -> SolveReport:
    """Solve the budget-of-uncertainty LP and return the weight part."""
    report = solve_lp(robust_lp(est, gamma))
    x = np.clip(report.x.x[: est.n], 0.0, 1.0)
    return SolveReport(WeightVector(x), report.objective, report.status, report.iterations)


def robust_sweep(est: MarketEstimates, increment: float = 0.5) -> list[SolveReport]:
    """Solve at gamma = 0, increment, 2*increment, ... up to the asset count."""
    if increment <= 0:
        raise BadConfig("increment must be > 0")
    count = int(np.floor(est.n / increment + 1e-9)) + 1
    return [solve_robust(est, k * increment) for k in range(count)]


# ---------------------------------------------------------------------------
# risk-based allocation strategies
# ---------------------------------------------------------------------------

def solve_ew(n: int) -> WeightVector:
    """Equal weights 1/n."""
    if n < 1:
        raise BadDimension("need at least one asset")
    return WeightVector(np.full(n, 1.0 / n), agent_id="ew")


def solve_mdp_dr(
    est: MarketEstimates,
    starts: int = DEFAULT_STARTS,
    max_iter: int = 5000,
    tol: float = 1e-10,
    seed: int = 0,
) -> SolveReport:
    """Maximize the diversification ratio (s.x)/sqrt(x'Sigma x) on the simplex.

    Needs a positive-definite covariance for a bounded optimum.
    """
    if not np.any(est.s > 0):
        raise DegenerateRisk("all asset risks are zero")
    n, s, cov = est.n, est.s, est.cov

    def f(x):
        var = max(float(x @ cov @ x), 1e-30)
        return -float(s @ x) / np.sqrt(var)

    def grad(x):
        var = max(float(x @ cov @ x), 1e-30)
        sigma = np.sqrt(var)
        return -(s / sigma - float(s @ x) * (cov @ x) / sigma**3)

    ones = np.ones(n)

    def project(v):
        return _project_hyperplane_box(v, ones, 1.0, np.zeros(n), ones)

    best = None
    total_iters = 0
    any_converged = False
    for x0 in _multi_starts(n, max(1, starts), seed):
        x, fx, iters, converged = _spg_minimize(f, grad, project, x0, max_iter, tol)
        total_iters += iters
        if best is None or fx < best[1]:
            best = (x, fx)
            any_converged = converged
    x, fx = best
    status = "optimal" if any_converged else "iteration_limit"
    return SolveReport(WeightVector(x), -fx, status, total_iters)


def solve_mdp_rw(est: MarketEstimates, max_iter: int = 5000, tol: float = 1e-10) -> SolveReport:
    """Minimize y'Sigma y under the risk-weight constraint s.y = 1, y >= 0,
    then rescale to the budget: x = y / sum(y).

    The reported objective is the pre-normalization quadratic value.
    """
    if not np.any(est.s > 0):
        raise DegenerateRisk("all asset risks are zero")
    n, s, cov = est.n, est.s, est.cov
    lo = np.zeros(n)
    hi = np.full(n, np.inf)

    def f(y):
        return float(y @ cov @ y)

    def grad(y):
        return 2.0 * (cov @ y)

    def project(v):
        return _project_hyperplane_box(v, s, 1.0, lo, hi)

    y0 = np.where(s > 0, 1.0, 0.0)
    y0 = y0 / float(s @ y0)
    y, fy, iterations, converged = _spg_minimize(f, grad, project, y0, max_iter, tol)
    x = y / float(y.sum())
    status = "optimal" if converged else "iteration_limit"
    return SolveReport(WeightVector(x), fy, status, iterations)


def solve_erc(
    est: MarketEstimates,
    starts: int = DEFAULT_STARTS,
    max_iter: int = 20000,
    tol: float = 1e-13,
    seed: int = 0,
) -> SolveReport:
    """Equalize risk contributions by minimizing sum_ij (c_i - c_j)^2 on the
    simplex, c_i = x_i (Sigma x)_i.

    status=optimal requires the contribution spread at the solution to be
    within 1e-6 of the portfolio variance (relative).
    """
    n = est.n
    scale = float(np.mean(np.diag(est.cov)))
    if scale <= 0.0:
        x = np.full(n, 1.0 / n)
        return SolveReport(WeightVector(x), 0.0, "optimal", 0)
    S = est.cov / scale  # the minimizer is invariant to covariance scaling

    def f(x):
        c = x * (S @ x)
        return float(2.0 * n * np.sum((c - c.mean()) ** 2))

    def grad(x):
        u = S @ x
        c = x * u
        wt = 4.0 * n * c - 4.0 * np.sum(c)
        return wt * u + S @ (wt * x)

    ones = np.ones(n)

    def project(v):
        return _project_hyperplane_box(v, ones, 1.0, np.zeros(n), ones)

    best = None
    total_iters = 0
    for x0 in _multi_starts(n, max(1, starts), seed):
        x, fx, iters, _ = _spg_minimize(f, grad, project, x0, max_iter, tol)
        total_iters += iters
        if best is None or fx < best[1]:
            best = (x, fx)
    x, _ = best
    c = x * (est.cov @ x)
    spread = float(np.max(c) - np.min(c))
    var = float(x @ est.cov @ x)
    status = "optimal" if spread <= 1e-6 * max(var, 1e-12) else "iteration_limit"
    objective = float(2.0 * n * np.sum((c - c.mean()) ** 2))
    return SolveReport(WeightVector(x), objective, status, total_iters)
