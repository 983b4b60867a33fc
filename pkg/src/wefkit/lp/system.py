"""Linear systems over exact rationals.

An :class:`LPSystem` is an immutable bundle of variable bounds and linear
rows.  It is what every encoder in the package produces and what the solver
consumes.  Use :class:`LPBuilder` to assemble one incrementally.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .rational import rat

LE, EQ, GE = "<=", "=", ">="
SENSES = (LE, EQ, GE)

Bound = Optional[Fraction]  # None means unbounded in that direction


class LPError(ValueError):
    """Malformed system or illegal operation on one."""


@dataclass(frozen=True)
class VarId:
    index: int
    name: str = ""

    def __int__(self) -> int:
        return self.index


def _vid(v) -> int:
    return v.index if isinstance(v, VarId) else int(v)


@dataclass(frozen=True)
class LinConstraint:
    terms: tuple[tuple[int, Fraction], ...]
    sense: str
    rhs: Fraction
    tag: str = ""

    def __post_init__(self):
        if self.sense not in SENSES:
            raise LPError(f"bad sense {self.sense!r}")
        if not self.terms:
            raise LPError("constraint without terms")
        seen = set()
        for j, _ in self.terms:
            if j in seen:
                raise LPError(f"duplicate variable {j} in constraint")
            seen.add(j)

    @classmethod
    def make(cls, coeffs, sense: str, rhs, tag: str = "") -> "LinConstraint":
        """Build from ``{var: coeff}`` or ``[(var, coeff), ...]``, merging repeats."""
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: dict[int, Fraction] = {}
        for v, a in items:
            j = _vid(v)
            merged[j] = merged.get(j, Fraction(0)) + rat(a)
        terms = tuple((j, a) for j, a in merged.items() if a != 0)
        return cls(terms, sense, rat(rhs), tag)

    def activity(self, point: Sequence[Fraction]) -> Fraction:
        return sum((a * point[j] for j, a in self.terms), Fraction(0))

    def satisfied(self, point: Sequence[Fraction]) -> bool:
        lhs = self.activity(point)
        if self.sense == LE:
            return lhs <= self.rhs
        if self.sense == GE:
            return lhs >= self.rhs
        return lhs == self.rhs

    def variables(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.terms)


@dataclass(frozen=True)
class LPSystem:
    num_vars: int
    lower: tuple[Bound, ...]
    upper: tuple[Bound, ...]
    constraints: tuple[LinConstraint, ...]
    names: tuple[str, ...]

    def __post_init__(self):
        n = self.num_vars
        if not (len(self.lower) == len(self.upper) == len(self.names) == n):
            raise LPError("bounds/names length does not match num_vars")
        for j in range(n):
            lo, hi = self.lower[j], self.upper[j]
            if lo is not None and hi is not None and lo > hi:
                raise LPError(f"variable {self.names[j]}: lower {lo} > upper {hi}")
        for c in self.constraints:
            for j, _ in c.terms:
                if not 0 <= j < n:
                    raise LPError(f"constraint references unknown variable {j}")

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def var(self, name: str) -> int:
        try:
            return self._name_index()[name]
        except KeyError:
            raise LPError(f"no variable named {name!r}") from None

    def _name_index(self) -> dict[str, int]:
        cache = self.__dict__.get("_names_cache")
        if cache is None:
            cache = {nm: j for j, nm in enumerate(self.names)}
            object.__setattr__(self, "_names_cache", cache)
        return cache

    def is_feasible_point(self, point: Sequence[Fraction]) -> bool:
        for j in range(self.num_vars):
            lo, hi = self.lower[j], self.upper[j]
            if lo is not None and point[j] < lo:
                return False
            if hi is not None and point[j] > hi:
                return False
        return all(c.satisfied(point) for c in self.constraints)

    def with_constraints(self, extra: Iterable[LinConstraint]) -> "LPSystem":
        return replace(self, constraints=self.constraints + tuple(extra))

    def without_constraint(self, k: int) -> "LPSystem":
        cons = self.constraints[:k] + self.constraints[k + 1:]
        return replace(self, constraints=cons)

    def tag_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.constraints:
            out[c.tag] = out.get(c.tag, 0) + 1
        return out


@dataclass(frozen=True)
class Objective:
    """Linear objective, always maximized."""

    terms: tuple[tuple[int, Fraction], ...]
    constant: Fraction = Fraction(0)

    @classmethod
    def maximize(cls, coeffs, constant=0) -> "Objective":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: dict[int, Fraction] = {}
        for v, a in items:
            j = _vid(v)
            merged[j] = merged.get(j, Fraction(0)) + rat(a)
        return cls(tuple((j, a) for j, a in merged.items() if a != 0), rat(constant))

    def negated(self) -> "Objective":
        return Objective(tuple((j, -a) for j, a in self.terms), -self.constant)

    def value(self, point: Sequence[Fraction]) -> Fraction:
        return self.constant + sum((a * point[j] for j, a in self.terms), Fraction(0))


OPTIMAL, INFEASIBLE, UNBOUNDED = "Optimal", "Infeasible", "Unbounded"


@dataclass(frozen=True)
class OptResult:
    status: str
    z_star: Optional[Fraction] = None
    point: Optional[tuple[Fraction, ...]] = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass
class LPBuilder:
    """Mutable accumulator for an :class:`LPSystem`."""

    names: list[str] = field(default_factory=list)
    lower: list[Bound] = field(default_factory=list)
    upper: list[Bound] = field(default_factory=list)
    constraints: list[LinConstraint] = field(default_factory=list)
    _index: dict[str, int] = field(default_factory=dict)

    def add_var(self, name: str, lower=0, upper=1) -> int:
        if name in self._index:
            raise LPError(f"duplicate variable name {name!r}")
        j = len(self.names)
        self.names.append(name)
        self.lower.append(None if lower is None else rat(lower))
        self.upper.append(None if upper is None else rat(upper))
        self._index[name] = j
        return j

    def var(self, name: str) -> int:
        return self._index[name]

    def add(self, coeffs, sense: str, rhs, tag: str = "") -> LinConstraint:
        c = LinConstraint.make(coeffs, sense, rhs, tag)
        self.constraints.append(c)
        return c

    def build(self) -> LPSystem:
        return LPSystem(
            num_vars=len(self.names),
            lower=tuple(self.lower),
            upper=tuple(self.upper),
            constraints=tuple(self.constraints),
            names=tuple(self.names),
        )


def fix_vars(system: LPSystem, assignment: Mapping) -> LPSystem:
    """Copy of ``system`` with each assigned variable pinned (lower = upper = value)."""
    lower = list(system.lower)
    upper = list(system.upper)
    for v, value in assignment.items():
        j = _vid(v)
        if not 0 <= j < system.num_vars:
            raise LPError(f"unknown variable {j}")
        value = rat(value)
        lo, hi = system.lower[j], system.upper[j]
        if (lo is not None and value < lo) or (hi is not None and value > hi):
            raise LPError(
                f"value {value} for {system.names[j]} outside bounds [{lo}, {hi}]"
            )
        lower[j] = upper[j] = value
    return replace(system, lower=tuple(lower), upper=tuple(upper))
