"""Lower while/for/sym/integer-constant sugar to primitive statements.

``while c do B endwhile`` becomes::

    top:  if c then go to body endif
          go to end
    body: B
          go to top
    end:

and ``for i = a to b do B endfor`` becomes::

          i = a  (W constant bit assignments)
          h = b  (h: a scratch integer)
    top:  B
          e = (i == h)
          if e then go to end endif
          i++
          go to top
    end:
"""

from __future__ import annotations

import copy
from typing import Optional

from .ast import (
    ArrRead1,
    ArrRead2,
    ArrWrite1,
    ArrWrite2,
    AssignConst,
    BasicProgram,
    EqTest,
    For,
    Goto,
    IfGoto,
    IncInt,
    IntVar,
    Program,
    PseudoError,
    SetInt,
    SymbolTable,
    SymWrite2,
    While,
)


class _Flattener:
    def __init__(self, sym: SymbolTable):
        self.sym = sym
        self.out: list[list] = []  # [stmt, labels, source line]
        self.pending: list = []
        self.next_label = -1
        self.loops = 0

    def fresh_label(self) -> int:
        self.next_label -= 1
        return self.next_label

    def emit(self, stmt, line: int):
        self.out.append([stmt, self.pending, line])
        self.pending = []

    def mark(self, label: Optional[int]):
        if label is not None:
            self.pending.append(label)

    def set_int(self, iv: IntVar, value: int, line: int):
        for j in range(1, iv.width + 1):
            self.emit(AssignConst(iv.slot(j), (value >> (j - 1)) & 1), line)

    def items(self, items):
        for it in items:
            self.mark(it.label)
            node = it.node
            if isinstance(node, While):
                top, body, end = self.fresh_label(), self.fresh_label(), self.fresh_label()
                self.mark(top)
                self.emit(IfGoto(node.cond, body), it.line)
                self.emit(Goto(end), it.line)
                self.mark(body)
                self.items(node.body)
                self.emit(Goto(top), it.line)
                self.mark(end)
            elif isinstance(node, For):
                self.loops += 1
                sym = self.sym
                iv = sym.ints[node.var]
                hi = sym.add_int(f"_for{self.loops}_hi")
                done = sym.add_bit(f"_for{self.loops}_done")
                top, end = self.fresh_label(), self.fresh_label()
                self.set_int(iv, node.lo, it.line)
                self.set_int(hi, node.hi, it.line)
                self.mark(top)
                self.items(node.body)
                self.emit(EqTest(done, node.var, hi.name), it.line)
                self.emit(IfGoto(done, end), it.line)
                self.emit(IncInt(node.var), it.line)
                self.emit(Goto(top), it.line)
                self.mark(end)
            elif isinstance(node, SetInt):
                self.set_int(self.sym.ints[node.var], node.value, it.line)
            elif isinstance(node, SymWrite2):
                self.emit(ArrWrite2(node.arr, node.row, node.col, node.src), it.line)
                self.emit(ArrWrite2(node.arr, node.col, node.row, node.src), it.line)
            else:
                self.emit(node, it.line)


def _alloc_scratch(sym: SymbolTable, stmts):
    W = sym.W
    if any(isinstance(s, IncInt) for s in stmts):
        sym.carry = IntVar("_carry", len(sym.ints) + 1, sym.alloc(W), W)
    if any(isinstance(s, EqTest) for s in stmts):
        base = sym.alloc(W)
        sym.eq_bits = tuple(range(base, base + W))
    rows = cols = 0
    for s in stmts:
        if isinstance(s, (ArrRead1, ArrWrite1, ArrRead2, ArrWrite2)):
            av = sym.arrays[s.arr]
            rows = max(rows, av.rows)
            cols = max(cols, av.cols)
    if rows:
        base = sym.alloc(rows)
        sym.sel_m = tuple(range(base, base + rows))
    if cols:
        base = sym.alloc(cols)
        sym.sel_n = tuple(range(base, base + cols))


def desugar(prog: Program) -> BasicProgram:
    """Flatten sugar, resolve labels to line numbers 1..l, allocate scratch."""
    sym = copy.deepcopy(prog.symbols)
    fl = _Flattener(sym)
    fl.items(prog.items)
    if fl.pending:
        raise PseudoError("a label or loop exit has no statement after it")
    where = {}
    for k, (_, labels, _) in enumerate(fl.out, 1):
        for lab in labels:
            where[lab] = k
    stmts = []
    for stmt, _, line in fl.out:
        if isinstance(stmt, (Goto, IfGoto)):
            if stmt.target not in where:
                raise PseudoError(f"jump to undefined label {stmt.target}", line)
            stmt = (Goto(where[stmt.target]) if isinstance(stmt, Goto)
                    else IfGoto(stmt.cond, where[stmt.target]))
        stmts.append(stmt)
    _alloc_scratch(sym, stmts)
    return BasicProgram(sym, tuple(stmts), tuple(line for _, _, line in fl.out))
