"""Statement types, symbol table and program containers for the pseudocode.

Memory is a flat vector of bit slots numbered from 1.  Integers occupy
``W`` consecutive slots (bit 1 is the least significant), arrays occupy
consecutive slots in row-major order.  After desugaring, a scratch region
is appended for the temporaries some statements need: carries for ``i++``,
xor bits for ``==`` and the row/column selectors of array accesses.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, is_dataclass
from typing import Optional, Union


class PseudoError(ValueError):
    """Syntax or semantic error, optionally carrying a source position."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg, self.line, self.col = msg, line, col
        where = f"line {line}" + (f", col {col}" if col else "") + ": " if line else ""
        super().__init__(where + msg)


# --------------------------------------------------------------- symbols
@dataclass(frozen=True)
class IntVar:
    name: str
    index: int  # 1-based integer number, used in I(index, j, t) names
    base: int   # slot of bit 1
    width: int

    def slot(self, j: int) -> int:
        return self.base + j - 1

    def slots(self) -> range:
        return range(self.base, self.base + self.width)


@dataclass(frozen=True)
class ArrayVar:
    name: str
    base: int
    rows: int
    cols: int = 0  # 0 for a 1-D array

    @property
    def dims(self) -> int:
        return 2 if self.cols else 1

    @property
    def size(self) -> int:
        return self.rows * (self.cols or 1)

    def slot(self, m: int, c: int = 0) -> int:
        return self.base + (m * self.cols + c if self.cols else m)

    def slots(self) -> range:
        return range(self.base, self.base + self.size)


@dataclass
class SymbolTable:
    W: int
    q: int = 0
    bits: dict = field(default_factory=dict)      # name -> slot
    ints: dict = field(default_factory=dict)      # name -> IntVar
    arrays: dict = field(default_factory=dict)    # name -> ArrayVar
    inputs: list = field(default_factory=list)    # input slots in order
    input_names: list = field(default_factory=list)
    output: Optional[int] = None
    # scratch region (filled in by desugar)
    carry: Optional[IntVar] = None
    eq_bits: tuple = ()
    sel_m: tuple = ()
    sel_n: tuple = ()

    def names(self) -> set:
        return set(self.bits) | set(self.ints) | set(self.arrays)

    def alloc(self, n: int) -> int:
        base = self.q + 1
        self.q += n
        return base

    def add_bit(self, name: str) -> int:
        s = self.alloc(1)
        self.bits[name] = s
        return s

    def add_int(self, name: str) -> IntVar:
        iv = IntVar(name, len(self.ints) + 1, self.alloc(self.W), self.W)
        self.ints[name] = iv
        return iv

    def add_array(self, name: str, rows: int, cols: int = 0) -> ArrayVar:
        if rows > 2 ** self.W or cols > 2 ** self.W:
            raise PseudoError(f"array {name}: dimension exceeds 2^W = {2 ** self.W}")
        if rows < 1 or cols < 0:
            raise PseudoError(f"array {name}: empty dimension")
        av = ArrayVar(name, self.alloc(rows * (cols or 1)), rows, cols)
        self.arrays[name] = av
        return av

    def int_at(self, slot: int) -> Optional[tuple[IntVar, int]]:
        ivs = list(self.ints.values()) + ([self.carry] if self.carry else [])
        for iv in ivs:
            if iv.base <= slot < iv.base + iv.width:
                return iv, slot - iv.base + 1
        return None

    def slot_names(self) -> dict[int, str]:
        out = {}
        for nm, s in self.bits.items():
            out[s] = nm
        for iv in self.ints.values():
            for j in range(1, iv.width + 1):
                out[iv.slot(j)] = f"{iv.name}.{j}"
        for av in self.arrays.values():
            for m in range(av.rows):
                if av.cols:
                    for c in range(av.cols):
                        out[av.slot(m, c)] = f"{av.name}[{m}][{c}]"
                else:
                    out[av.slot(m)] = f"{av.name}[{m}]"
        if self.carry:
            for j in range(1, self.carry.width + 1):
                out[self.carry.slot(j)] = f"carry.{j}"
        for k, s in enumerate(self.eq_bits, 1):
            out[s] = f"eq.{k}"
        for k, s in enumerate(self.sel_m):
            out[s] = f"M({k})"
        for k, s in enumerate(self.sel_n):
            out[s] = f"N({k})"
        return out


# ------------------------------------------------------------- statements
@dataclass(frozen=True)
class AssignConst:
    dst: int
    value: int


@dataclass(frozen=True)
class AssignCopy:
    dst: int
    src: int


@dataclass(frozen=True)
class AssignNot:
    dst: int
    src: int


@dataclass(frozen=True)
class AssignXor:
    dst: int
    a: int
    b: int


@dataclass(frozen=True)
class AssignAnd:
    dst: int
    a: int
    b: int


@dataclass(frozen=True)
class AssignOr:
    dst: int
    a: int
    b: int


@dataclass(frozen=True)
class AssignOrK:
    dst: int
    srcs: tuple


@dataclass(frozen=True)
class IncInt:
    var: str


@dataclass(frozen=True)
class EqTest:
    dst: int
    a: str
    b: str


@dataclass(frozen=True)
class ArrRead1:
    dst: int
    arr: str
    idx: str


@dataclass(frozen=True)
class ArrWrite1:
    arr: str
    idx: str
    src: int


@dataclass(frozen=True)
class ArrRead2:
    dst: int
    arr: str
    row: str
    col: str


@dataclass(frozen=True)
class ArrWrite2:
    arr: str
    row: str
    col: str
    src: int


@dataclass(frozen=True)
class Goto:
    target: int


@dataclass(frozen=True)
class IfGoto:
    cond: int
    target: int


@dataclass(frozen=True)
class Return:
    pass


Stmt = Union[AssignConst, AssignCopy, AssignNot, AssignXor, AssignAnd, AssignOr,
             AssignOrK, IncInt, EqTest, ArrRead1, ArrWrite1, ArrRead2, ArrWrite2,
             Goto, IfGoto, Return]

BASIC_KINDS = (AssignConst, AssignCopy, AssignNot, AssignXor, AssignAnd, AssignOr,
               AssignOrK, IncInt, EqTest, ArrRead1, ArrWrite1, ArrRead2, ArrWrite2,
               Goto, IfGoto, Return)


# ------------------------------------------------------------------ sugar
@dataclass(frozen=True)
class SetInt:
    """``i = 5``: load a constant into an integer (becomes W bit assignments)."""

    var: str
    value: int


@dataclass(frozen=True)
class SymWrite2:
    arr: str
    row: str
    col: str
    src: int


@dataclass(frozen=True)
class While:
    cond: int
    body: tuple  # of Item


@dataclass(frozen=True)
class For:
    var: str
    lo: int
    hi: int
    body: tuple


@dataclass(frozen=True)
class Item:
    """A statement or block with its label and source line."""

    node: object
    label: Optional[int] = None
    line: int = 0


@dataclass
class Program:
    symbols: SymbolTable
    items: tuple


@dataclass
class BasicProgram:
    symbols: SymbolTable
    stmts: tuple        # stmts[i - 1] is line i
    source_lines: tuple = ()  # source line of each statement (0 if generated)

    @property
    def l(self) -> int:
        return len(self.stmts)

    def line(self, i: int) -> Stmt:
        return self.stmts[i - 1]


# ------------------------------------------------------- slot read/write sets
def written_slots(stmt, sym: SymbolTable) -> frozenset:
    """Slots a statement assigns at its time step (everything else is copied)."""
    if isinstance(stmt, (AssignConst, AssignCopy, AssignNot, AssignXor, AssignAnd,
                         AssignOr, AssignOrK)):
        return frozenset((stmt.dst,))
    if isinstance(stmt, IncInt):
        return frozenset(sym.ints[stmt.var].slots()) | frozenset(sym.carry.slots())
    if isinstance(stmt, EqTest):
        return frozenset(sym.eq_bits) | {stmt.dst}
    if isinstance(stmt, (ArrRead1, ArrWrite1, ArrRead2, ArrWrite2)):
        av = sym.arrays[stmt.arr]
        out = set(sym.sel_m[: av.rows])
        if av.cols:
            out |= set(sym.sel_n[: av.cols])
        if isinstance(stmt, (ArrRead1, ArrRead2)):
            out.add(stmt.dst)
        else:
            out |= set(av.slots())
        return frozenset(out)
    return frozenset()


def read_slots(stmt, sym: SymbolTable) -> frozenset:
    if isinstance(stmt, (AssignCopy, AssignNot)):
        return frozenset((stmt.src,))
    if isinstance(stmt, (AssignXor, AssignAnd, AssignOr)):
        return frozenset((stmt.a, stmt.b))
    if isinstance(stmt, AssignOrK):
        return frozenset(stmt.srcs)
    if isinstance(stmt, IncInt):
        return frozenset(sym.ints[stmt.var].slots())
    if isinstance(stmt, EqTest):
        return frozenset(sym.ints[stmt.a].slots()) | frozenset(sym.ints[stmt.b].slots())
    if isinstance(stmt, IfGoto):
        return frozenset((stmt.cond,))
    if isinstance(stmt, (ArrRead1, ArrWrite1)):
        out = set(sym.ints[stmt.idx].slots())
        if isinstance(stmt, ArrRead1):
            out |= set(sym.arrays[stmt.arr].slots())
        else:
            out |= {stmt.src} | set(sym.arrays[stmt.arr].slots())
        return frozenset(out)
    if isinstance(stmt, (ArrRead2, ArrWrite2)):
        out = set(sym.ints[stmt.row].slots()) | set(sym.ints[stmt.col].slots())
        out |= set(sym.arrays[stmt.arr].slots())
        if isinstance(stmt, ArrWrite2):
            out.add(stmt.src)
        return frozenset(out)
    return frozenset()


# -------------------------------------------------------------------- dump
def _plain(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        d = {"kind": type(obj).__name__}
        for f in fields(obj):
            d[f.name] = _plain(getattr(obj, f.name))
        return d
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    return obj


def dump_ast(prog) -> dict:
    """Machine-readable form of a Program or BasicProgram (debugging aid)."""
    return _plain(prog)

