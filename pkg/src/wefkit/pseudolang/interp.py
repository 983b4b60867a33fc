"""Reference interpreters: one for basic programs, one for sugared programs.

The basic interpreter mirrors the compiled LP step for step: line ``i`` runs
at time ``t`` reading the memory of time ``t-1`` and producing the memory of
time ``t``, scratch slots included.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ast import (
    ArrRead1,
    ArrRead2,
    ArrWrite1,
    ArrWrite2,
    AssignAnd,
    AssignConst,
    AssignCopy,
    AssignNot,
    AssignOr,
    AssignOrK,
    AssignXor,
    BasicProgram,
    EqTest,
    For,
    Goto,
    IfGoto,
    IncInt,
    Program,
    PseudoError,
    Return,
    SetInt,
    SymbolTable,
    SymWrite2,
    While,
    written_slots,
)


class ExecutionError(RuntimeError):
    pass


class NonTermination(ExecutionError):
    pass


@dataclass(frozen=True)
class Trace:
    w: int
    steps_used: int          # steps before the first Return executes
    line_at: tuple           # line_at[t-1] = line executed at time t
    history: tuple           # history[t] = memory after t steps (index 0 = slot 1)

    @property
    def final(self) -> tuple:
        return self.history[-1]

    def bit(self, slot: int, t: int) -> int:
        return self.history[t][slot - 1]


def initial_memory(sym: SymbolTable, x: Sequence[int]) -> list:
    if len(x) != len(sym.inputs):
        raise ExecutionError(f"expected {len(sym.inputs)} input bits, got {len(x)}")
    mem = [0] * sym.q
    for s, b in zip(sym.inputs, x):
        if b not in (0, 1):
            raise ExecutionError("input bits must be 0 or 1")
        mem[s - 1] = int(b)
    return mem


def int_value(sym: SymbolTable, mem, name: str) -> int:
    iv = sym.ints[name]
    return sum(mem[iv.slot(j) - 1] << (j - 1) for j in range(1, iv.width + 1))


def _selectors(sym, writes, av, m, c):
    for j in range(av.rows):
        writes[sym.sel_m[j]] = 0 if j == m else 1
    if av.cols:
        for j in range(av.cols):
            writes[sym.sel_n[j]] = 0 if j == c else 1


def _index(sym, mem, name, limit, arr, line):
    v = int_value(sym, mem, name)
    if v >= limit:
        raise ExecutionError(f"line {line}: index {name}={v} out of range for {arr}")
    return v


def execute(stmt, sym: SymbolTable, mem, line: int = 0) -> tuple[dict, int]:
    """Effects of one statement: (slot -> new bit, next line)."""
    get = lambda s: mem[s - 1]  # noqa: E731
    w: dict = {}
    nxt = line + 1
    if isinstance(stmt, AssignConst):
        w[stmt.dst] = stmt.value
    elif isinstance(stmt, AssignCopy):
        w[stmt.dst] = get(stmt.src)
    elif isinstance(stmt, AssignNot):
        w[stmt.dst] = 1 - get(stmt.src)
    elif isinstance(stmt, AssignXor):
        w[stmt.dst] = get(stmt.a) ^ get(stmt.b)
    elif isinstance(stmt, AssignAnd):
        w[stmt.dst] = get(stmt.a) & get(stmt.b)
    elif isinstance(stmt, AssignOr):
        w[stmt.dst] = get(stmt.a) | get(stmt.b)
    elif isinstance(stmt, AssignOrK):
        w[stmt.dst] = int(any(get(s) for s in stmt.srcs))
    elif isinstance(stmt, IncInt):
        iv, cr = sym.ints[stmt.var], sym.carry
        carry = 1
        for j in range(1, iv.width + 1):
            b = get(iv.slot(j))
            w[iv.slot(j)] = b ^ carry
            carry = b & carry
            w[cr.slot(j)] = carry
    elif isinstance(stmt, EqTest):
        a, b = sym.ints[stmt.a], sym.ints[stmt.b]
        diff = 0
        for j in range(1, sym.W + 1):
            e = get(a.slot(j)) ^ get(b.slot(j))
            w[sym.eq_bits[j - 1]] = e
            diff |= e
        w[stmt.dst] = 1 - diff
    elif isinstance(stmt, (ArrRead1, ArrWrite1)):
        av = sym.arrays[stmt.arr]
        m = _index(sym, mem, stmt.idx, av.rows, av.name, line)
        _selectors(sym, w, av, m, 0)
        if isinstance(stmt, ArrRead1):
            w[stmt.dst] = get(av.slot(m))
        else:
            w[av.slot(m)] = get(stmt.src)
    elif isinstance(stmt, (ArrRead2, ArrWrite2)):
        av = sym.arrays[stmt.arr]
        m = _index(sym, mem, stmt.row, av.rows, av.name, line)
        c = _index(sym, mem, stmt.col, av.cols, av.name, line)
        _selectors(sym, w, av, m, c)
        if isinstance(stmt, ArrRead2):
            w[stmt.dst] = get(av.slot(m, c))
        else:
            w[av.slot(m, c)] = get(stmt.src)
    elif isinstance(stmt, Goto):
        nxt = stmt.target
    elif isinstance(stmt, IfGoto):
        if get(stmt.cond):
            nxt = stmt.target
    elif isinstance(stmt, Return):
        nxt = line
    else:
        raise PseudoError(f"unknown statement {stmt!r}")
    return w, nxt


def interpret(prog: BasicProgram, x: Sequence[int], p_max: int = 1000) -> Trace:
    """Run for exactly ``p_max`` steps (Return loops in place)."""
    sym = prog.symbols
    if sym.output is None:
        raise ExecutionError("program has no output bit")
    mem = initial_memory(sym, x)
    history = [tuple(mem)]
    lines = []
    line = 1
    first_return = None
    for t in range(1, p_max + 1):
        if not 1 <= line <= prog.l:
            raise ExecutionError(f"control left the program at time {t} (line {line})")
        stmt = prog.line(line)
        lines.append(line)
        if first_return is not None:
            history.append(history[-1])
            continue
        writes, nxt = execute(stmt, sym, mem, line)
        allowed = written_slots(stmt, sym)
        stray = set(writes) - allowed
        if stray:
            raise ExecutionError(f"line {line} wrote undeclared slots {sorted(stray)}")
        for s, v in writes.items():
            mem[s - 1] = v
        history.append(tuple(mem))
        if isinstance(stmt, Return):
            first_return = t
        line = nxt
    if first_return is None:
        raise NonTermination(f"no return within {p_max} steps")
    return Trace(mem[sym.output - 1], first_return - 1, tuple(lines), tuple(history))


# ------------------------------------------------------ structured semantics
class _Jump(Exception):
    def __init__(self, label):
        self.label = label


class _Halt(Exception):
    pass


def run_program(prog: Program, x: Sequence[int], max_steps: int = 100_000) -> tuple[int, tuple]:
    """Direct semantics of a sugared program: (w, final user memory).

    Loops run natively; ``go to`` may only target top-level labels.  Scratch
    slots do not exist here, so the memory returned covers declared names only.
    """
    sym = prog.symbols
    mem = initial_memory(sym, x)
    W = sym.W
    budget = [max_steps]

    def tick():
        budget[0] -= 1
        if budget[0] < 0:
            raise NonTermination(f"no return within {max_steps} steps")

    def ival(name):
        return int_value(sym, mem, name)

    def set_int(name, v):
        iv = sym.ints[name]
        for j in range(1, iv.width + 1):
            mem[iv.slot(j) - 1] = (v >> (j - 1)) & 1

    def run_block(items):
        for it in items:
            node = it.node
            tick()
            if isinstance(node, While):
                while mem[node.cond - 1]:
                    run_block(node.body)
                    tick()
            elif isinstance(node, For):
                set_int(node.var, node.lo)
                while True:
                    run_block(node.body)
                    tick()
                    if ival(node.var) == node.hi:
                        break
                    set_int(node.var, (ival(node.var) + 1) % (2 ** W))
            elif isinstance(node, SetInt):
                set_int(node.var, node.value)
            elif isinstance(node, SymWrite2):
                av = sym.arrays[node.arr]
                m = _index(sym, mem, node.row, av.rows, av.name, it.line)
                c = _index(sym, mem, node.col, av.cols, av.name, it.line)
                if c >= av.rows or m >= av.cols:
                    raise ExecutionError(f"line {it.line}: symmetric write out of range")
                v = mem[node.src - 1]
                mem[av.slot(m, c) - 1] = v
                mem[av.slot(c, m) - 1] = v
            elif isinstance(node, Return):
                raise _Halt()
            elif isinstance(node, Goto):
                raise _Jump(node.target)
            elif isinstance(node, IfGoto):
                if mem[node.cond - 1]:
                    raise _Jump(node.target)
            elif isinstance(node, IncInt):
                set_int(node.var, (ival(node.var) + 1) % (2 ** W))
            elif isinstance(node, EqTest):
                mem[node.dst - 1] = int(ival(node.a) == ival(node.b))
            elif isinstance(node, (ArrRead1, ArrWrite1, ArrRead2, ArrWrite2)):
                av = sym.arrays[node.arr]
                if av.cols:
                    m = _index(sym, mem, node.row, av.rows, av.name, it.line)
                    c = _index(sym, mem, node.col, av.cols, av.name, it.line)
                else:
                    m, c = _index(sym, mem, node.idx, av.rows, av.name, it.line), 0
                if isinstance(node, (ArrRead1, ArrRead2)):
                    mem[node.dst - 1] = mem[av.slot(m, c) - 1]
                else:
                    mem[av.slot(m, c) - 1] = mem[node.src - 1]
            else:
                writes, _ = execute(node, sym, mem, it.line)
                for s, v in writes.items():
                    mem[s - 1] = v

    top = list(prog.items)
    where = {it.label: k for k, it in enumerate(top) if it.label is not None}
    pc = 0
    while True:
        try:
            if pc >= len(top):
                raise ExecutionError("control fell off the end of the program")
            run_block(top[pc:])
            raise ExecutionError("control fell off the end of the program")
        except _Halt:
            return mem[sym.output - 1], tuple(mem)
        except _Jump as j:
            if j.label not in where:
                raise ExecutionError(f"go to {j.label}: only top-level labels are supported "
                                     "by the structured interpreter") from None
            pc = where[j.label]

