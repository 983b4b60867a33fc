"""Boolean circuits and their translation into linear inequalities.

Each AND/OR gate contributes four inequalities and one variable; negated
literals are handled by substituting ``1 - v`` and folding the constant into
the right-hand side, so NOT never costs a gate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .lp.system import GE, LE, LPBuilder
from .wef import WEFSystem

AND, OR = "AND", "OR"


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Literal:
    """An input bit, an earlier gate, or a constant; optionally negated."""

    kind: str  # "in", "gate" or "const"
    index: int  # input index, gate index, or the constant's value
    negated: bool = False

    def __invert__(self) -> "Literal":
        return Literal(self.kind, self.index, not self.negated)

    def value(self, inputs: Sequence[int], gates: Sequence[int]) -> int:
        if self.kind == "in":
            v = inputs[self.index]
        elif self.kind == "gate":
            v = gates[self.index]
        else:
            v = self.index
        return 1 - v if self.negated else v


def inp(i: int) -> Literal:
    return Literal("in", i)


def gate(k: int) -> Literal:
    return Literal("gate", k)


def const(b: int) -> Literal:
    return Literal("const", int(bool(b)))


@dataclass(frozen=True)
class Gate:
    kind: str
    inputs: tuple[Literal, Literal]
    label: str = ""


@dataclass(frozen=True)
class Circuit:
    q: int
    gates: tuple[Gate, ...]
    input_names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.input_names:
            object.__setattr__(self, "input_names", tuple(f"x{i + 1}" for i in range(self.q)))
        if len(self.input_names) != self.q:
            raise CircuitError("input_names length differs from q")
        if not self.gates:
            raise CircuitError("circuit has no gates")
        for k, g in enumerate(self.gates):
            if g.kind not in (AND, OR):
                raise CircuitError(f"gate {k}: unknown kind {g.kind!r}")
            if len(g.inputs) != 2:
                raise CircuitError(f"gate {k}: gates are strictly binary")
            for lit in g.inputs:
                if lit.kind == "in" and not 0 <= lit.index < self.q:
                    raise CircuitError(f"gate {k}: input {lit.index} out of range")
                if lit.kind == "gate" and not 0 <= lit.index < k:
                    raise CircuitError(f"gate {k}: refers to gate {lit.index}, not earlier")
                if lit.kind == "const" and lit.index not in (0, 1):
                    raise CircuitError(f"gate {k}: bad constant")
        last = len(self.gates) - 1
        for k, g in enumerate(self.gates):
            if any(l.kind == "gate" and l.index == last for l in g.inputs):
                raise CircuitError("output gate feeds another gate")

    @property
    def t(self) -> int:
        return len(self.gates)

    def labels(self) -> list[str]:
        return [g.label or f"y{k + 1}" for k, g in enumerate(self.gates)]

    def prefix(self, k: int) -> "Circuit":
        """First ``k`` gates (gate ``k-1`` becomes the output)."""
        return Circuit(self.q, self.gates[:k], self.input_names)


def evaluate(circuit: Circuit, bits: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Evaluate gates in order; returns (output bit, all gate values)."""
    if len(bits) != circuit.q:
        raise CircuitError(f"expected {circuit.q} input bits, got {len(bits)}")
    vals: list[int] = []
    for g in circuit.gates:
        a, b = (lit.value(bits, vals) for lit in g.inputs)
        vals.append(a & b if g.kind == AND else a | b)
    return vals[-1], tuple(vals)


def _lit_terms(lit: Literal, var_of, coef: int, terms: dict, rhs_shift: list):
    """Add ``coef * lit`` to ``terms``; constants go to ``rhs_shift``."""
    if lit.kind == "const":
        val = 1 - lit.index if lit.negated else lit.index
        rhs_shift[0] += coef * val
        return
    v = var_of(lit)
    if lit.negated:
        rhs_shift[0] += coef
        terms[v] = terms.get(v, 0) - coef
    else:
        terms[v] = terms.get(v, 0) + coef


def _row(b: LPBuilder, parts, sense, rhs, tag, var_of):
    terms: dict = {}
    shift = [0]
    for coef, lit in parts:
        if isinstance(lit, int):
            terms[lit] = terms.get(lit, 0) + coef
        else:
            _lit_terms(lit, var_of, coef, terms, shift)
    b.add(terms, sense, rhs - shift[0], tag)


def encode(circuit: Circuit) -> WEFSystem:
    """Four inequalities per gate over q + t variables."""
    b = LPBuilder()
    xs = [b.add_var(nm) for nm in circuit.input_names]
    ys: list[int] = []

    def var_of(lit: Literal) -> int:
        return xs[lit.index] if lit.kind == "in" else ys[lit.index]

    for k, (g, label) in enumerate(zip(circuit.gates, circuit.labels())):
        y = b.add_var(label)
        l1, l2 = g.inputs
        if g.kind == AND:
            _row(b, [(1, l1), (1, l2), (-1, y)], LE, 1, "AND", var_of)
            _row(b, [(-1, l1), (1, y)], LE, 0, "AND", var_of)
            _row(b, [(-1, l2), (1, y)], LE, 0, "AND", var_of)
            _row(b, [(1, y)], GE, 0, "AND", var_of)
        else:
            _row(b, [(-1, l1), (-1, l2), (1, y)], LE, 0, "OR", var_of)
            _row(b, [(1, l1), (-1, y)], LE, 0, "OR", var_of)
            _row(b, [(1, l2), (-1, y)], LE, 0, "OR", var_of)
            _row(b, [(1, y)], LE, 1, "OR", var_of)
        ys.append(y)
    lp = b.build()
    stats = {
        "num_constraints": lp.num_constraints,
        "num_vars": lp.num_vars,
        "gates": circuit.t,
        "groups": lp.tag_counts(),
    }
    return WEFSystem(lp, tuple(xs), ys[-1], stats)


# ---------------------------------------------------------------- K4 examples
PM4_INPUTS = ("x12", "x13", "x14", "x23", "x24", "x34")


def pm4_circuit() -> Circuit:
    """Perfect matching on 4 vertices: 3 AND + 2 OR gates."""
    x = {nm: inp(i) for i, nm in enumerate(PM4_INPUTS)}
    gates = (
        Gate(AND, (x["x12"], x["x34"]), "y12"),
        Gate(AND, (x["x13"], x["x24"]), "y13"),
        Gate(AND, (x["x14"], x["x23"]), "y14"),
        Gate(OR, (gate(0), gate(1)), "s3"),
        Gate(OR, (gate(3), gate(2)), "w"),
    )
    return Circuit(6, gates, PM4_INPUTS)


def pm4_circuit_padded() -> Circuit:
    """Seven-gate variant (5 AND + 2 OR): the five-gate circuit padded with
    two AND-with-constant-1 gates, giving 28 inequalities in 13 variables."""
    x = {nm: inp(i) for i, nm in enumerate(PM4_INPUTS)}
    gates = (
        Gate(AND, (x["x12"], x["x34"]), "y12"),
        Gate(AND, (x["x13"], x["x24"]), "y13"),
        Gate(AND, (x["x14"], x["x23"]), "y14"),
        Gate(OR, (gate(0), gate(1)), "s3"),
        Gate(OR, (gate(3), gate(2)), "s4"),
        Gate(AND, (gate(4), const(1)), "s5"),
        Gate(AND, (gate(5), const(1)), "w"),
    )
    return Circuit(6, gates, PM4_INPUTS)


# ---------------------------------------------------------------- text format
_GATE_RE = re.compile(r"^(\w+)\s*=\s*(!?\w+)\s*(&|\||AND|OR)\s*(!?\w+)$", re.IGNORECASE)


def parse_circuit(text: str) -> Circuit:
    """Parse ``INPUTS n [names...]`` / ``name = lit OP lit`` / ``OUTPUT name``."""
    input_names: Optional[list[str]] = None
    gates: list[Gate] = []
    index: dict[str, Literal] = {}
    output = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if output is not None:
            raise CircuitError(f"line {lineno}: content after OUTPUT")
        head = line.split()
        if head[0].upper() == "INPUTS":
            if input_names is not None:
                raise CircuitError(f"line {lineno}: duplicate INPUTS header")
            try:
                q = int(head[1])
            except (IndexError, ValueError):
                raise CircuitError(f"line {lineno}: INPUTS needs a count") from None
            names = head[2:] or [f"x{i + 1}" for i in range(q)]
            if len(names) != q:
                raise CircuitError(f"line {lineno}: {q} inputs but {len(names)} names")
            input_names = names
            for i, nm in enumerate(names):
                if nm in index:
                    raise CircuitError(f"line {lineno}: duplicate name {nm}")
                index[nm] = inp(i)
            continue
        if head[0].upper() == "OUTPUT":
            if len(head) != 2:
                raise CircuitError(f"line {lineno}: OUTPUT takes one name")
            output = head[1]
            continue
        if input_names is None:
            raise CircuitError(f"line {lineno}: gate before INPUTS header")
        m = _GATE_RE.match(line)
        if not m:
            raise CircuitError(f"line {lineno}: cannot parse gate {line!r}")
        name, a, op, c = m.groups()
        if name in index:
            raise CircuitError(f"line {lineno}: {name} defined twice")

        def lit(tok: str) -> Literal:
            neg = tok.startswith("!")
            tok = tok.lstrip("!")
            if tok in ("0", "1"):
                base = const(int(tok))
            elif tok in index:
                base = index[tok]
            else:
                raise CircuitError(f"line {lineno}: unknown signal {tok!r}")
            return ~base if neg else base

        kind = AND if op.upper() in ("&", "AND") else OR
        gates.append(Gate(kind, (lit(a), lit(c)), name))
        index[name] = gate(len(gates) - 1)
    if input_names is None:
        raise CircuitError("missing INPUTS header")
    if not gates:
        raise CircuitError("no gates")
    if output is None:
        raise CircuitError("missing OUTPUT footer")
    if output != gates[-1].label:
        raise CircuitError(f"OUTPUT {output} must be the last gate ({gates[-1].label})")
    return Circuit(len(input_names), tuple(gates), tuple(input_names))


def format_circuit(circuit: Circuit) -> str:
    labels = circuit.labels()

    def show(lit: Literal) -> str:
        if lit.kind == "in":
            s = circuit.input_names[lit.index]
        elif lit.kind == "gate":
            s = labels[lit.index]
        else:
            s = str(lit.index)
        return ("!" if lit.negated else "") + s

    out = [f"INPUTS {circuit.q} " + " ".join(circuit.input_names)]
    for g, label in zip(circuit.gates, labels):
        op = "&" if g.kind == AND else "|"
        out.append(f"{label} = {show(g.inputs[0])} {op} {show(g.inputs[1])}")
    out.append(f"OUTPUT {labels[-1]}")
    return "\n".join(out) + "\n"
