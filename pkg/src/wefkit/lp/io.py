"""Emitters for LP text format and a lossless JSON dump (with reader)."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .rational import fmt_rat, is_finite_decimal, parse_rat, to_decimal
from .system import EQ, GE, LE, LinConstraint, LPSystem, Objective

_LP_SENSE = {LE: "<=", GE: ">=", EQ: "="}


def _num(q: Fraction, mode: str, notes: list) -> str:
    if mode == "decimal" or is_finite_decimal(q):
        return to_decimal(q)
    notes.append(fmt_rat(q))
    return to_decimal(q)


def _linear(terms, names, mode, notes) -> str:
    parts = []
    for j, a in terms:
        mag = abs(a)
        coef = "" if mag == 1 else _num(mag, mode, notes) + " "
        sign = "-" if a < 0 else "+"
        parts.append(f"{sign} {coef}{names[j]}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def write_lp(system: LPSystem, objective: Optional[Objective] = None,
             rational: str = "comment", title: str = "") -> str:
    """CPLEX-style LP text.

    ``rational="comment"`` writes non-terminating rationals as a decimal
    approximation with the exact ``p/q`` in a trailing ``\\`` comment;
    ``rational="decimal"`` writes approximations only.
    """
    if rational not in ("comment", "decimal"):
        raise ValueError("rational must be 'comment' or 'decimal'")
    names = system.names
    out = []
    if title:
        out.append(f"\\ {title}")
    out.append("Maximize")
    notes: list = []
    if objective is not None and objective.terms:
        line = " obj: " + _linear(objective.terms, names, rational, notes)
    else:
        line = " obj: 0 " + (names[0] if names else "")
    out.append(line + (f"  \\ exact: {' '.join(notes)}" if notes else ""))
    out.append("Subject To")
    last_tag = None
    for k, c in enumerate(system.constraints):
        if c.tag and c.tag != last_tag:
            out.append(f"\\ group {c.tag}")
            last_tag = c.tag
        notes = []
        body = _linear(c.terms, names, rational, notes)
        rhs = _num(c.rhs, rational, notes)
        line = f" c{k + 1}: {body} {_LP_SENSE[c.sense]} {rhs}"
        if notes and rational == "comment":
            line += f"  \\ exact: {' '.join(notes)}"
        out.append(line)
    out.append("Bounds")
    for j, nm in enumerate(names):
        lo, hi = system.lower[j], system.upper[j]
        notes = []
        if lo is None and hi is None:
            out.append(f" {nm} free")
            continue
        lo_s = "-inf" if lo is None else _num(lo, rational, notes)
        hi_s = "+inf" if hi is None else _num(hi, rational, notes)
        line = f" {lo_s} <= {nm} <= {hi_s}"
        if notes and rational == "comment":
            line += f"  \\ exact: {' '.join(notes)}"
        out.append(line)
    out.append("End")
    return "\n".join(out) + "\n"


def _b(q):
    return None if q is None else fmt_rat(q)


def _ub(s):
    return None if s is None else parse_rat(s)


def system_to_dict(system: LPSystem) -> dict:
    return {
        "num_vars": system.num_vars,
        "names": list(system.names),
        "lower": [_b(q) for q in system.lower],
        "upper": [_b(q) for q in system.upper],
        "constraints": [
            {
                "terms": [[j, fmt_rat(a)] for j, a in c.terms],
                "sense": c.sense,
                "rhs": fmt_rat(c.rhs),
                "tag": c.tag,
            }
            for c in system.constraints
        ],
    }


def system_from_dict(data: dict) -> LPSystem:
    cons = tuple(
        LinConstraint(
            tuple((int(j), parse_rat(a)) for j, a in c["terms"]),
            c["sense"],
            parse_rat(c["rhs"]),
            c.get("tag", ""),
        )
        for c in data["constraints"]
    )
    return LPSystem(
        num_vars=int(data["num_vars"]),
        lower=tuple(_ub(s) for s in data["lower"]),
        upper=tuple(_ub(s) for s in data["upper"]),
        constraints=cons,
        names=tuple(data["names"]),
    )


def dump_system(system: LPSystem, **meta) -> str:
    payload = {"format": "wefkit-lp", "version": 1, "system": system_to_dict(system)}
    payload.update(meta)
    return json.dumps(payload, indent=1)


def load_system(text: str) -> tuple[LPSystem, dict]:
    data = json.loads(text)
    if data.get("format") != "wefkit-lp":
        raise ValueError("not a wefkit structured dump")
    meta = {k: v for k, v in data.items() if k not in ("format", "version", "system")}
    return system_from_dict(data["system"]), meta
