"""Revised primal simplex with bounded variables.

Every row ``i`` gets a logical variable ``r_i = a_i.x`` bounded by the row's
activity interval, so the working system is ``[A  -I] (x, r) = 0`` with
box bounds on all columns. Rows whose starting activity falls outside the
interval receive an artificial column; phase one drives the artificials to
zero, phase two optimises the real costs from that basis.

The basis is held as a sparse LU factorisation of the last refactored basis
plus a short product-form eta file.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .lp import INF, LinearProgram, Solution, kkt_residuals, reduced_costs

log = logging.getLogger(__name__)

BASIC, AT_LB, AT_UB, AT_ZERO = 0, 1, 2, 3


@dataclass
class SolveOptions:
    feas_tol: float = 1e-7
    opt_tol: float = 1e-7
    pivot_tol: float = 1e-9
    report_tol: float = 1e-6
    max_iter: int = 200_000
    stall_limit: int = 1000
    refactor_every: int = 64


class _Basis:
    """LU of a reference basis and an eta file for later pivots."""

    def __init__(self, m: int):
        self.m = m
        self.lu = None
        self.etas: list[tuple[int, np.ndarray, np.ndarray, float]] = []

    def factor(self, B: sp.csc_matrix) -> None:
        self.lu = splu(B, permc_spec="COLAMD")
        self.etas = []

    def ftran(self, a: np.ndarray) -> np.ndarray:
        x = self.lu.solve(a)
        for r, idx, val, piv in self.etas:
            xr = x[r] / piv
            if xr != 0.0:
                x[idx] -= val * xr
            x[r] = xr
        return x

    def btran(self, c: np.ndarray) -> np.ndarray:
        v = c.copy()
        for r, idx, val, piv in reversed(self.etas):
            v[r] = (v[r] - np.dot(v[idx], val)) / piv
        return self.lu.solve(v, trans="T")

    def push(self, r: int, alpha: np.ndarray) -> None:
        nz = np.flatnonzero(alpha)
        nz = nz[nz != r]
        self.etas.append((r, nz, alpha[nz].copy(), float(alpha[r])))


class _Simplex:
    def __init__(self, lp: LinearProgram, opts: SolveOptions):
        self.opts = opts
        self.n = n = lp.num_vars
        self.m = m = lp.num_rows
        A = lp.matrix()
        rlo, rhi = lp.row_bounds()
        self.lb = np.concatenate([np.asarray(lp.lb, float), rlo])
        self.ub = np.concatenate([np.asarray(lp.ub, float), rhi])
        self.cost_struct = np.asarray(lp.cost, float)

        # nonbasic starting point: finite bound nearest zero, else zero
        x = np.zeros(n + m)
        state = np.full(n + m, AT_ZERO, dtype=np.int8)
        for j in range(n):
            lo, hi = self.lb[j], self.ub[j]
            if math.isfinite(lo) and (not math.isfinite(hi) or abs(lo) <= abs(hi)):
                x[j], state[j] = lo, AT_LB
            elif math.isfinite(hi):
                x[j], state[j] = hi, AT_UB
        act = A @ x[:n] if m else np.zeros(0)

        basis = np.empty(m, dtype=np.int64)
        art_rows, art_sign = [], []
        for i in range(m):
            lo, hi = rlo[i], rhi[i]
            if lo - opts.feas_tol <= act[i] <= hi + opts.feas_tol:
                basis[i] = n + i
                x[n + i] = act[i]
                state[n + i] = BASIC
                continue
            bound = lo if act[i] < lo else hi
            x[n + i] = bound
            state[n + i] = AT_LB if bound == lo else AT_UB
            art_rows.append(i)
            art_sign.append(1.0 if bound - act[i] > 0 else -1.0)

        k = len(art_rows)
        self.art_rows = np.asarray(art_rows, dtype=np.int64)
        self.art_sign = np.asarray(art_sign, dtype=float)
        for pos, i in enumerate(art_rows):
            j = n + m + pos
            basis[i] = j
        self.N = n + m + k
        self.lb = np.concatenate([self.lb, np.zeros(k)])
        self.ub = np.concatenate([self.ub, np.full(k, INF)])
        x = np.concatenate([x, np.zeros(k)])
        state = np.concatenate([state, np.full(k, BASIC, dtype=np.int8)])
        for pos, i in enumerate(art_rows):
            x[n + m + pos] = abs(x[n + i] - act[i])

        # full column matrix [A  -I  S] with S the signed artificial columns
        S = sp.csc_matrix(
            (self.art_sign, (self.art_rows, np.arange(k))), shape=(m, k)
        )
        self.M = sp.hstack([A, -sp.identity(m, format="csc"), S], format="csc")
        self.MT = self.M.T.tocsr()
        self.x = x
        self.state = state
        self.basis = basis
        self.B = _Basis(m)
        self.iterations = 0
        self._refactor()

    # -- linear algebra helpers ------------------------------------------
    def _column(self, j: int) -> np.ndarray:
        a = np.zeros(self.m)
        lo, hi = self.M.indptr[j], self.M.indptr[j + 1]
        a[self.M.indices[lo:hi]] = self.M.data[lo:hi]
        return a

    def _refactor(self) -> None:
        if self.m == 0:
            return
        Bm = self.M[:, self.basis]
        self.B.factor(sp.csc_matrix(Bm))
        self._recompute_basics()

    def _recompute_basics(self) -> None:
        nonbasic = self.state != BASIC
        rhs = -(self.M[:, nonbasic] @ self.x[nonbasic])
        xb = self.B.ftran(rhs)
        # one step of iterative refinement
        resid = rhs - self.M[:, self.basis] @ xb
        xb += self.B.ftran(resid)
        self.x[self.basis] = xb

    # -- one phase of primal simplex -------------------------------------
    def run_phase(self, cost: np.ndarray) -> str:
        o = self.opts
        n_degenerate = 0
        bland = False
        scale = max(1.0, float(np.max(np.abs(cost), initial=0.0)))
        dtol = o.opt_tol * scale
        movable = self.ub > self.lb
        while True:
            if self.iterations >= o.max_iter:
                return "iteration_limit"
            y = self.B.btran(cost[self.basis]) if self.m else np.zeros(0)
            d = cost - self.MT @ y if self.m else cost.copy()

            st = self.state
            up = ((st == AT_LB) | (st == AT_ZERO)) & (d < -dtol) & movable
            down = ((st == AT_UB) | (st == AT_ZERO)) & (d > dtol) & movable
            cand = np.flatnonzero(up | down)
            if cand.size == 0:
                return "optimal"
            if bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(np.abs(d[cand]))])
            direction = 1.0 if up[q] else -1.0

            alpha = self.B.ftran(self._column(q))
            step, r, bound_hit = self._ratio_test(alpha, direction, bland)
            span = self.ub[q] - self.lb[q]
            if r < 0 and not math.isfinite(span):
                return "unbounded"

            self.iterations += 1
            if math.isfinite(span) and (r < 0 or span <= step):
                # entering variable runs to its opposite bound
                self.x[self.basis] -= direction * span * alpha
                if direction > 0:
                    self.x[q], self.state[q] = self.ub[q], AT_UB
                else:
                    self.x[q], self.state[q] = self.lb[q], AT_LB
                n_degenerate = 0
                bland = False
                continue

            self.x[self.basis] -= direction * step * alpha
            self.x[q] += direction * step
            leaving = int(self.basis[r])
            self.x[leaving] = self.lb[leaving] if bound_hit == AT_LB else self.ub[leaving]
            self.state[leaving] = bound_hit
            self.basis[r] = q
            self.state[q] = BASIC
            self.B.push(r, alpha)

            if step <= o.feas_tol * 1e-3:
                n_degenerate += 1
                if n_degenerate > o.stall_limit and not bland:
                    log.debug("stalled after %d degenerate pivots, using Bland's rule", n_degenerate)
                    bland = True
            else:
                n_degenerate = 0
                bland = False

            if len(self.B.etas) >= o.refactor_every:
                self._refactor()

    def _ratio_test(self, alpha: np.ndarray, direction: float, bland: bool):
        """Bounded ratio test with a Harris tolerance pass.

        Returns ``(step, row, bound_state)``; ``row`` is -1 when no basic
        variable limits the step.
        """
        o = self.opts
        delta = -direction * alpha
        b = self.basis
        xb = self.x[b]
        lo, hi = self.lb[b], self.ub[b]
        dec = (delta < -o.pivot_tol) & np.isfinite(lo)
        inc = (delta > o.pivot_tol) & np.isfinite(hi)
        idx_dec = np.flatnonzero(dec)
        idx_inc = np.flatnonzero(inc)
        if idx_dec.size == 0 and idx_inc.size == 0:
            return INF, -1, BASIC

        rows = np.concatenate([idx_dec, idx_inc])
        gap = np.concatenate([xb[idx_dec] - lo[idx_dec], hi[idx_inc] - xb[idx_inc]])
        mag = np.abs(delta[rows])
        gap = np.maximum(gap, 0.0)
        exact = gap / mag
        hit = np.concatenate([
            np.full(idx_dec.size, AT_LB, dtype=np.int8),
            np.full(idx_inc.size, AT_UB, dtype=np.int8),
        ])
        if bland:
            tmin = exact.min()
            ties = np.flatnonzero(exact <= tmin)
            k = ties[np.argmin(b[rows[ties]])]
        else:
            relaxed = ((gap + o.feas_tol) / mag).min()
            ok = np.flatnonzero(exact <= relaxed)
            best = mag[ok].max()
            top = ok[mag[ok] >= best]
            k = top[np.argmin(b[rows[top]])]
        return float(exact[k]), int(rows[k]), int(hit[k])


def solve(lp: LinearProgram, options: SolveOptions | None = None) -> Solution:
    """Solve ``lp`` to optimality and return primal values and duals.

    Deterministic for identical input: pricing is Dantzig with lowest-index
    ties, switching to Bland's rule after a run of degenerate pivots.
    """
    opts = options or SolveOptions()
    lp.validate()
    s = _Simplex(lp, opts)
    n, m = s.n, s.m
    k = s.N - n - m

    if k:
        c1 = np.zeros(s.N)
        c1[n + m:] = 1.0
        status = s.run_phase(c1)
        if status == "iteration_limit":
            return Solution(status, iterations=s.iterations)
        s._refactor()
        infeas = float(np.sum(s.x[n + m:]))
        if infeas > opts.feas_tol * max(1.0, k):
            return Solution("infeasible", iterations=s.iterations,
                            messages=[f"phase one ended with infeasibility {infeas:.3g}"])
        # artificials are pinned at zero from here on
        s.ub[n + m:] = 0.0
        for j in range(n + m, s.N):
            if s.state[j] != BASIC:
                s.x[j], s.state[j] = 0.0, AT_LB

    c2 = np.zeros(s.N)
    c2[:n] = s.cost_struct
    status = s.run_phase(c2)
    if status != "optimal":
        return Solution(status, iterations=s.iterations)

    s._refactor()
    x = s.x[:n].copy()
    y = s.B.btran(c2[s.basis]) if m else np.zeros(0)
    if m:
        resid = c2[s.basis] - s.M[:, s.basis].T @ y
        y += s.B.btran(resid)
    d = reduced_costs(lp, y)

    sol = Solution(
        "optimal",
        objective=float(np.asarray(lp.cost, float) @ x + lp.objective_offset),
        primal=dict(zip(lp.var_ids, x.tolist())),
        duals=dict(zip(lp.row_ids, y.tolist())),
        reduced_costs=dict(zip(lp.var_ids, np.asarray(d).tolist())),
        iterations=s.iterations,
    )
    sol.residuals = kkt_residuals(lp, x, y)
    if sol.residuals["primal_infeasibility"] > opts.report_tol:
        sol.messages.append(
            "numerical instability: primal residual "
            f"{sol.residuals['primal_infeasibility']:.3g} after refinement"
        )
    return sol
