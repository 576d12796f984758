"""Independent reference solvers used only by the test suite."""
from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog


def _highs(lp):
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    inf = highspy.kHighsInf
    A = lp.matrix().tocsc()
    lo, hi = lp.row_bounds()
    clip = lambda a: np.clip(a, -inf, inf)
    model = highspy.HighsLp()
    model.num_col_ = lp.num_vars
    model.num_row_ = lp.num_rows
    model.col_cost_ = np.asarray(lp.cost, float)
    model.col_lower_ = clip(np.asarray(lp.lb, float))
    model.col_upper_ = clip(np.asarray(lp.ub, float))
    model.row_lower_ = clip(lo)
    model.row_upper_ = clip(hi)
    model.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    model.a_matrix_.start_ = A.indptr
    model.a_matrix_.index_ = A.indices
    model.a_matrix_.value_ = A.data
    model.offset_ = lp.objective_offset
    h.passModel(model)
    h.run()
    return h


def highs_objective(lp) -> tuple[str, float]:
    """Solve with HiGHS through highspy; returns (status, objective)."""
    h = _highs(lp)
    status = h.modelStatusToString(h.getModelStatus()).lower()
    return status, h.getInfo().objective_function_value


def highs_solution(lp) -> tuple[str, float, np.ndarray, np.ndarray]:
    """HiGHS status, objective, primal values and row duals (d obj / d rhs)."""
    h = _highs(lp)
    status = h.modelStatusToString(h.getModelStatus()).lower()
    sol = h.getSolution()
    return (status, h.getInfo().objective_function_value,
            np.array(sol.col_value), np.array(sol.row_dual))


def highs_read_mps(path) -> tuple[str, float]:
    """Let HiGHS parse an MPS file on its own and solve it."""
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.readModel(str(path))
    h.run()
    return h.modelStatusToString(h.getModelStatus()).lower(), h.getInfo().objective_function_value


def linprog_objective(lp) -> tuple[int, float]:
    """Solve with scipy's linprog (status code, objective incl. offset)."""
    A = lp.matrix().toarray()
    lo, hi = lp.row_bounds()
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for i in range(lp.num_rows):
        if lo[i] == hi[i]:
            A_eq.append(A[i]); b_eq.append(lo[i])
            continue
        if np.isfinite(hi[i]):
            A_ub.append(A[i]); b_ub.append(hi[i])
        if np.isfinite(lo[i]):
            A_ub.append(-A[i]); b_ub.append(-lo[i])
    bounds = [(None if np.isinf(l) else l, None if np.isinf(u) else u) for l, u in zip(lp.lb, lp.ub)]
    res = linprog(lp.cost, A_ub=np.array(A_ub) if A_ub else None, b_ub=b_ub or None,
                  A_eq=np.array(A_eq) if A_eq else None, b_eq=b_eq or None,
                  bounds=bounds, method="highs")
    return res.status, (res.fun + lp.objective_offset if res.status == 0 else np.nan)


def vertex_enumeration(c, A_ub, b_ub, lb, ub, chunk: int = 4096) -> float | None:
    """Minimum of ``c.x`` over ``A_ub x <= b_ub, lb <= x <= ub`` by brute force.

    Every basic solution is found by choosing ``n`` active constraints out
    of the stacked system (infinite bounds are dropped), solving the square
    system and keeping the feasible ones. The caller must make sure the
    feasible set is a polytope. Returns None when no vertex is feasible.
    """
    c = np.asarray(c, float)
    n = len(c)
    G = np.vstack([np.asarray(A_ub, float).reshape(-1, n), np.eye(n), -np.eye(n)])
    h = np.concatenate([np.asarray(b_ub, float), np.asarray(ub, float),
                        -np.asarray(lb, float)])
    keep = np.isfinite(h)
    G, h = G[keep], h[keep]
    tol = 1e-9 * (1 + np.abs(h))
    best = None
    combos = itertools.combinations(range(len(h)), n)
    while True:
        idx = np.array(list(itertools.islice(combos, chunk)), dtype=int)
        if idx.size == 0:
            return best
        M, rhs = G[idx], h[idx]
        ok = np.abs(np.linalg.det(M)) > 1e-10
        if not ok.any():
            continue
        x = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
        feasible = np.all(x @ G.T <= h + tol, axis=1)
        if feasible.any():
            val = float(np.min(x[feasible] @ c))
            best = val if best is None else min(best, val)


def kkt_tolerances(sol) -> dict[str, float]:
    """Scale-aware limits for the residuals a solve reports.

    Primal feasibility is absolute; strong duality and complementarity use
    the ``1 + |objective|`` scale, dual feasibility the largest cost.
    """
    scale = 1.0 + abs(sol.objective)
    return {"primal_infeasibility": 1e-6, "dual_infeasibility": 1e-6,
            "complementarity": 1e-6 * scale, "duality_gap": 1e-6 * scale}


def kkt_failures(sol, cost_scale: float = 1.0) -> list[str]:
    lim = kkt_tolerances(sol)
    lim["dual_infeasibility"] *= max(1.0, cost_scale)
    return [f"{k}={sol.residuals[k]:.3e} > {v:.3e}" for k, v in lim.items()
            if sol.residuals.get(k, 0.0) > v]
