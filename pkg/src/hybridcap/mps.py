"""Free-format MPS export/import and the solution CSV exchange format.

Names are written through a reversible escape: every character that is
whitespace, non-printable, non-ASCII or ``%`` becomes ``%XX`` per UTF-8
byte. The objective row is called ``%obj``, which no escaped id can
produce because ``o`` is not a hex digit.

Solution CSV layout (header ``kind,id,value``): ``var`` lines carry primal
values, ``row`` lines carry row duals (``d objective / d rhs``).
"""
from __future__ import annotations

import csv
import math
import re
from pathlib import Path

import numpy as np

from .lp import INF, LinearProgram, LPError, Solution, kkt_residuals, reduced_costs

OBJ_ROW = "%obj"
_SAFE = re.compile(r"[!-$&-~]")  # printable ASCII except space and '%'
_ESC = re.compile(r"%([0-9A-F]{2})")

VERIFY_TOL = 1e-6


def mangle(name: str) -> str:
    out = []
    for ch in name:
        if _SAFE.fullmatch(ch):
            out.append(ch)
        else:
            out.extend(f"%{b:02X}" for b in ch.encode("utf-8"))
    return "".join(out)


def unmangle(name: str) -> str:
    raw = bytearray()
    i = 0
    while i < len(name):
        m = _ESC.match(name, i)
        if m:
            raw.append(int(m.group(1), 16))
            i = m.end()
        else:
            raw.extend(name[i].encode("utf-8"))
            i += 1
    return raw.decode("utf-8")


def _num(v: float) -> str:
    if v == INF:
        return "1e+30"
    if v == -INF:
        return "-1e+30"
    return repr(float(v))


def export_mps(lp: LinearProgram, path: str | Path) -> None:
    lp.validate()
    tag = {"<=": "L", ">=": "G", "=": "E"}
    lines = [f"NAME {mangle(lp.name) or 'model'}", "ROWS", f" N {OBJ_ROW}"]
    rnames = [mangle(r.id) for r in lp.rows]
    for r, nm in zip(lp.rows, rnames):
        lines.append(f" {tag[r.sense]} {nm}")

    by_col: list[list[tuple[int, float]]] = [[] for _ in range(lp.num_vars)]
    for i, r in enumerate(lp.rows):
        for j, v in r.coefs.items():
            by_col[j].append((i, v))
    lines.append("COLUMNS")
    for j, vid in enumerate(lp.var_ids):
        cn = mangle(vid)
        lines.append(f" {cn} {OBJ_ROW} {_num(lp.cost[j])}")
        for i, v in sorted(by_col[j]):
            lines.append(f" {cn} {rnames[i]} {_num(v)}")

    lines.append("RHS")
    if lp.objective_offset != 0.0:
        # MPS convention: objective RHS is the negated constant
        lines.append(f" RHS {OBJ_ROW} {_num(-lp.objective_offset)}")
    for r, nm in zip(lp.rows, rnames):
        if r.rhs != 0.0:
            lines.append(f" RHS {nm} {_num(r.rhs)}")

    lines.append("RANGES")
    for r, nm in zip(lp.rows, rnames):
        if r.range is not None:
            lines.append(f" RNG {nm} {_num(r.range)}")

    lines.append("BOUNDS")
    for j, vid in enumerate(lp.var_ids):
        cn = mangle(vid)
        lo, hi = lp.lb[j], lp.ub[j]
        if lo == hi:
            lines.append(f" FX BND {cn} {_num(lo)}")
            continue
        if lo == -INF and hi == INF:
            lines.append(f" FR BND {cn}")
            continue
        if lo == -INF:
            lines.append(f" MI BND {cn}")
        elif lo != 0.0:
            lines.append(f" LO BND {cn} {_num(lo)}")
        if hi != INF:
            lines.append(f" UP BND {cn} {_num(hi)}")
    lines.append("ENDATA")
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
    except OSError as exc:
        raise OSError(f"cannot write MPS file {path}: {exc}") from exc


def _val(tok: str) -> float:
    v = float(tok)
    if v >= 1e30:
        return INF
    if v <= -1e30:
        return -INF
    return v


def import_mps(path: str | Path) -> LinearProgram:
    """Read a free-format MPS file (as written by :func:`export_mps`)."""
    section = None
    name = "model"
    obj_name = None
    row_order: list[tuple[str, str]] = []
    coefs: dict[str, dict[str, float]] = {}
    col_order: list[str] = []
    cost: dict[str, float] = {}
    rhs: dict[str, float] = {}
    ranges: dict[str, float] = {}
    lb: dict[str, float] = {}
    ub: dict[str, float] = {}
    offset = 0.0
    sense_of = {"L": "<=", "G": ">=", "E": "="}

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("*"):
                continue
            tok = line.split()
            if not line[0].isspace():
                section = tok[0]
                if section == "NAME" and len(tok) > 1:
                    name = unmangle(tok[1])
                if section == "ENDATA":
                    break
                continue
            if section == "ROWS":
                kind, rn = tok
                if kind == "N":
                    if obj_name is None:
                        obj_name = rn
                    continue
                row_order.append((rn, sense_of[kind]))
                coefs[rn] = {}
            elif section == "COLUMNS":
                cn = tok[0]
                if cn not in cost:
                    col_order.append(cn)
                    cost[cn] = 0.0
                for rn, v in zip(tok[1::2], tok[2::2]):
                    if rn == obj_name:
                        cost[cn] += float(v)
                    elif rn in coefs:
                        coefs[rn][cn] = float(v)
                    else:
                        raise LPError(f"{path}:{lineno}: unknown row {rn!r}")
            elif section == "RHS":
                pairs = tok[1:] if len(tok) % 2 else tok
                for rn, v in zip(pairs[0::2], pairs[1::2]):
                    if rn == obj_name:
                        offset = -float(v)
                    else:
                        rhs[rn] = float(v)
            elif section == "RANGES":
                pairs = tok[1:] if len(tok) % 2 else tok
                for rn, v in zip(pairs[0::2], pairs[1::2]):
                    ranges[rn] = float(v)
            elif section == "BOUNDS":
                kind, cn = tok[0], tok[2]
                v = _val(tok[3]) if len(tok) > 3 else 0.0
                if kind == "LO":
                    lb[cn] = v
                elif kind == "UP":
                    ub[cn] = v
                elif kind == "FX":
                    lb[cn] = ub[cn] = v
                elif kind == "FR":
                    lb[cn], ub[cn] = -INF, INF
                elif kind == "MI":
                    lb[cn] = -INF
                elif kind == "PL":
                    ub[cn] = INF
                else:
                    raise LPError(f"{path}:{lineno}: unsupported bound type {kind!r}")

    lp = LinearProgram(name)
    for cn in col_order:
        lp.add_var(unmangle(cn), lb.get(cn, 0.0), ub.get(cn, INF), cost[cn])
    for rn, sense in row_order:
        row = {unmangle(cn): v for cn, v in coefs[rn].items()}
        lp.add_row(unmangle(rn), row, sense, rhs.get(rn, 0.0), ranges.get(rn))
    lp.objective_offset = offset
    return lp


def write_solution(sol: Solution, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "id", "value"])
        for k, v in sol.primal.items():
            w.writerow(["var", k, repr(float(v))])
        for k, v in sol.duals.items():
            w.writerow(["row", k, repr(float(v))])


def import_solution(lp: LinearProgram, path: str | Path, tol: float = VERIFY_TOL) -> Solution:
    """Load an external solution and re-verify it against ``lp``.

    Status is ``optimal`` only when primal feasibility, dual feasibility,
    complementary slackness and zero duality gap all hold within ``tol``;
    ``infeasible`` when the primal point violates the LP; otherwise
    ``unverified`` (feasible point without a certifying dual).
    """
    x = np.zeros(lp.num_vars)
    y = np.zeros(lp.num_rows)
    have_duals = False
    row_pos = {rid: i for i, rid in enumerate(lp.row_ids)}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, rec in enumerate(csv.DictReader(fh), 2):
            kind, ident = rec["kind"], rec["id"]
            try:
                value = float(rec["value"])
            except (TypeError, ValueError):
                raise LPError(f"{path}:{lineno}: bad value {rec['value']!r}") from None
            if kind == "var":
                if not lp.has_var(ident):
                    raise LPError(f"{path}:{lineno}: unknown variable {ident!r}")
                x[lp.var(ident)] = value
            elif kind == "row":
                if ident not in row_pos:
                    raise LPError(f"{path}:{lineno}: unknown row {ident!r}")
                y[row_pos[ident]] = value
                have_duals = True
            else:
                raise LPError(f"{path}:{lineno}: unknown kind {kind!r}")

    res = kkt_residuals(lp, x, y if have_duals else None)
    sol = Solution(
        "unverified",
        objective=float(np.asarray(lp.cost, float) @ x + lp.objective_offset),
        primal=dict(zip(lp.var_ids, x.tolist())),
        residuals=res,
    )
    if have_duals:
        sol.duals = dict(zip(lp.row_ids, y.tolist()))
        sol.reduced_costs = dict(zip(lp.var_ids, reduced_costs(lp, y).tolist()))
    scale = 1.0 + abs(sol.objective)
    if res["primal_infeasibility"] > tol:
        sol.status = "infeasible"
        sol.messages.append(f"primal residual {res['primal_infeasibility']:.3g} exceeds {tol:g}")
    elif have_duals:
        bad = [
            k for k, lim in (
                ("dual_infeasibility", tol * scale),
                ("complementarity", tol * scale),
                ("duality_gap", tol * scale),
            ) if res[k] > lim
        ]
        if bad:
            sol.messages.extend(f"{k} {res[k]:.3g} exceeds tolerance" for k in bad)
        else:
            sol.status = "optimal"
    else:
        sol.messages.append("no duals supplied; optimality not certified")
    if math.isnan(sol.objective):
        sol.status = "infeasible"
    return sol
