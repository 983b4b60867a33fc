"""The compiled artifact: an LP plus its designated input and output variables."""

from __future__ import annotations

from dataclasses import dataclass, field

from .lp.io import dump_system, load_system, write_lp
from .lp.system import LPSystem


@dataclass(frozen=True)
class WEFSystem:
    lp: LPSystem
    x_vars: tuple[int, ...]
    w_var: int
    stats: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = self.lp.num_vars
        if len(set(self.x_vars)) != len(self.x_vars):
            raise ValueError("duplicate input variables")
        if not all(0 <= j < n for j in self.x_vars) or not 0 <= self.w_var < n:
            raise ValueError("input/output variable outside the system")
        if self.w_var in self.x_vars:
            raise ValueError("output variable doubles as an input")

    @property
    def q(self) -> int:
        return len(self.x_vars)

    def dumps(self) -> str:
        return dump_system(self.lp, x_vars=list(self.x_vars), w_var=self.w_var,
                           stats=self.stats)

    @classmethod
    def loads(cls, text: str) -> "WEFSystem":
        lp, meta = load_system(text)
        if "x_vars" not in meta or "w_var" not in meta:
            raise ValueError("dump carries no x_vars/w_var: not a compiled WEF")
        return cls(lp, tuple(int(j) for j in meta["x_vars"]), int(meta["w_var"]),
                   meta.get("stats", {}))

    def to_lp(self, objective=None, rational: str = "comment") -> str:
        inputs = " ".join(self.lp.names[j] for j in self.x_vars)
        title = f"inputs: {inputs} ; output: {self.lp.names[self.w_var]}"
        return write_lp(self.lp, objective, rational=rational, title=title)
