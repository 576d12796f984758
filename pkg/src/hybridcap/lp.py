"""Sparse linear program container and the solution record.

Rows are stored as ``lo <= a.x <= hi`` internally but built through the
familiar ``(sense, rhs)`` pair, with an optional MPS-style range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

INF = math.inf
SENSES = ("<=", "=", ">=")


class LPError(ValueError):
    """Raised for structurally invalid linear programs."""


@dataclass
class Row:
    id: str
    coefs: dict[int, float]
    sense: str
    rhs: float
    range: float | None = None

    def bounds(self) -> tuple[float, float]:
        """Activity interval ``(lo, hi)`` implied by sense, rhs and range."""
        b = self.rhs
        r = self.range
        if self.sense == "<=":
            return (b - abs(r) if r is not None else -INF, b)
        if self.sense == ">=":
            return (b, b + abs(r) if r is not None else INF)
        if r is None or r == 0:
            return (b, b)
        return (b, b + r) if r > 0 else (b + r, b)


class LinearProgram:
    """Minimisation LP built incrementally by the formulation modules."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.var_ids: list[str] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.cost: list[float] = []
        self.rows: list[Row] = []
        self.objective_offset = 0.0
        self._var_index: dict[str, int] = {}
        self._row_index: dict[str, int] = {}

    # -- construction -----------------------------------------------------
    def add_var(self, id: str, lb: float = 0.0, ub: float = INF, cost: float = 0.0) -> int:
        if id in self._var_index:
            raise LPError(f"duplicate variable id {id!r}")
        if lb > ub:
            raise LPError(f"variable {id!r}: lower bound {lb} > upper bound {ub}")
        idx = len(self.var_ids)
        self._var_index[id] = idx
        self.var_ids.append(id)
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        self.cost.append(float(cost))
        return idx

    def add_cost(self, var: int | str, coef: float) -> None:
        j = self.var(var) if isinstance(var, str) else var
        self.cost[j] += float(coef)

    def add_row(
        self,
        id: str,
        coefs: Mapping[int | str, float],
        sense: str,
        rhs: float,
        range: float | None = None,
    ) -> str:
        if sense not in SENSES:
            raise LPError(f"row {id!r}: unknown sense {sense!r}")
        if id in self._row_index:
            raise LPError(f"duplicate row id {id!r}")
        merged: dict[int, float] = {}
        for key, val in coefs.items():
            j = self.var(key) if isinstance(key, str) else key
            if not 0 <= j < len(self.var_ids):
                raise LPError(f"row {id!r} references unknown variable {key!r}")
            merged[j] = merged.get(j, 0.0) + float(val)
        self._row_index[id] = len(self.rows)
        self.rows.append(Row(id, merged, sense, float(rhs), range))
        return id

    # -- lookup -----------------------------------------------------------
    def var(self, id: str) -> int:
        try:
            return self._var_index[id]
        except KeyError:
            raise KeyError(f"unknown variable {id!r}") from None

    def row(self, id: str) -> Row:
        return self.rows[self._row_index[id]]

    def has_var(self, id: str) -> bool:
        return id in self._var_index

    def has_row(self, id: str) -> bool:
        return id in self._row_index

    @property
    def row_ids(self) -> list[str]:
        return [r.id for r in self.rows]

    @property
    def num_vars(self) -> int:
        return len(self.var_ids)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def validate(self) -> None:
        for j, (lo, hi) in enumerate(zip(self.lb, self.ub)):
            if lo > hi:
                raise LPError(f"variable {self.var_ids[j]!r}: lb > ub")
            if math.isnan(lo) or math.isnan(hi) or math.isnan(self.cost[j]):
                raise LPError(f"variable {self.var_ids[j]!r}: NaN data")
        for r in self.rows:
            lo, hi = r.bounds()
            if lo > hi:
                raise LPError(f"row {r.id!r}: empty activity range")
            if any(math.isnan(v) for v in r.coefs.values()) or math.isnan(r.rhs):
                raise LPError(f"row {r.id!r}: NaN data")

    # -- matrix views -----------------------------------------------------
    def matrix(self) -> sp.csc_matrix:
        data, ri, ci = [], [], []
        for i, r in enumerate(self.rows):
            for j, v in r.coefs.items():
                if v != 0.0:
                    ri.append(i)
                    ci.append(j)
                    data.append(v)
        return sp.csc_matrix((data, (ri, ci)), shape=(self.num_rows, self.num_vars))

    def row_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.empty(self.num_rows)
        hi = np.empty(self.num_rows)
        for i, r in enumerate(self.rows):
            lo[i], hi[i] = r.bounds()
        return lo, hi

    def objective_value(self, x: Mapping[str, float] | np.ndarray) -> float:
        xv = self._as_array(x)
        return float(np.dot(self.cost, xv) + self.objective_offset)

    def _as_array(self, x: Mapping[str, float] | np.ndarray) -> np.ndarray:
        if isinstance(x, np.ndarray):
            return x
        return np.array([x.get(v, 0.0) for v in self.var_ids])

    def copy(self) -> "LinearProgram":
        other = LinearProgram(self.name)
        other.var_ids = list(self.var_ids)
        other.lb = list(self.lb)
        other.ub = list(self.ub)
        other.cost = list(self.cost)
        other.rows = [Row(r.id, dict(r.coefs), r.sense, r.rhs, r.range) for r in self.rows]
        other.objective_offset = self.objective_offset
        other._var_index = dict(self._var_index)
        other._row_index = dict(self._row_index)
        return other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearProgram):
            return NotImplemented
        return (
            self.var_ids == other.var_ids
            and self.lb == other.lb
            and self.ub == other.ub
            and self.cost == other.cost
            and self.objective_offset == other.objective_offset
            and [(r.id, r.coefs, r.sense, r.rhs, r.range) for r in self.rows]
            == [(r.id, r.coefs, r.sense, r.rhs, r.range) for r in other.rows]
        )


@dataclass
class Solution:
    """Primal/dual result of a solve or an imported external solution.

    Row duals follow ``dual = d(objective)/d(rhs)`` for minimisation, so a
    binding ``<=`` row has a non-positive dual and a binding ``>=`` row a
    non-negative one.
    """

    status: str
    objective: float = math.nan
    primal: dict[str, float] = field(default_factory=dict)
    duals: dict[str, float] = field(default_factory=dict)
    reduced_costs: dict[str, float] = field(default_factory=dict)
    iterations: int = 0
    residuals: dict[str, float] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def value(self, var_id: str, default: float = 0.0) -> float:
        return self.primal.get(var_id, default)

    def dual(self, row_id: str) -> float:
        return self.duals[row_id]


def reduced_costs(lp: LinearProgram, y: np.ndarray) -> np.ndarray:
    c = np.asarray(lp.cost, float)
    if lp.num_rows == 0:
        return c
    return c - lp.matrix().T @ y


def kkt_residuals(
    lp: LinearProgram,
    x: Mapping[str, float] | np.ndarray,
    y: Mapping[str, float] | np.ndarray | None = None,
) -> dict[str, float]:
    """Optimality residuals of a primal/dual pair.

    Returns absolute primal infeasibility, and when duals are given the
    dual infeasibility, the largest complementarity product and the
    duality gap between ``c.x`` and the bound-weighted dual objective.
    """
    xv = lp._as_array(x)
    A = lp.matrix()
    lb, ub = np.asarray(lp.lb), np.asarray(lp.ub)
    rlo, rhi = lp.row_bounds()
    act = A @ xv if lp.num_rows else np.zeros(0)
    primal = 0.0
    if lp.num_rows:
        primal = max(primal, float(np.max(np.maximum(rlo - act, act - rhi), initial=0.0)))
    if lp.num_vars:
        primal = max(primal, float(np.max(np.maximum(lb - xv, xv - ub), initial=0.0)))
    out = {"primal_infeasibility": primal}
    if y is None:
        return out

    if isinstance(y, np.ndarray):
        yv = y
    else:
        yv = np.array([y.get(rid, 0.0) for rid in lp.row_ids])
    c = np.asarray(lp.cost)
    d = c - A.T @ yv if lp.num_rows else c.copy()

    dual_inf = 0.0
    comp = 0.0
    dual_obj = lp.objective_offset
    for val, lo, hi, act_i in _pairs(yv, rlo, rhi, act):
        # positive multiplier binds the lower side, negative the upper side
        if val > 0:
            if math.isinf(lo):
                dual_inf = max(dual_inf, val)
                continue
            comp = max(comp, val * max(act_i - lo, 0.0))
            dual_obj += val * lo
        elif val < 0:
            if math.isinf(hi):
                dual_inf = max(dual_inf, -val)
                continue
            comp = max(comp, -val * max(hi - act_i, 0.0))
            dual_obj += val * hi
    for val, lo, hi, xj in _pairs(d, lb, ub, xv):
        if val > 0:
            if math.isinf(lo):
                dual_inf = max(dual_inf, val)
                continue
            comp = max(comp, val * max(xj - lo, 0.0))
            dual_obj += val * lo
        elif val < 0:
            if math.isinf(hi):
                dual_inf = max(dual_inf, -val)
                continue
            comp = max(comp, -val * max(hi - xj, 0.0))
            dual_obj += val * hi
    primal_obj = float(c @ xv) + lp.objective_offset
    out["dual_infeasibility"] = dual_inf
    out["complementarity"] = comp
    out["duality_gap"] = abs(primal_obj - dual_obj)
    out["primal_objective"] = primal_obj
    out["dual_objective"] = dual_obj
    return out


def _pairs(vals, lo, hi, cur):
    return zip(vals.tolist(), lo.tolist(), hi.tolist(), cur.tolist())
