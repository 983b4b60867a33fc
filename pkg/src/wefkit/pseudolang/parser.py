"""Line-oriented parser for ``.psc`` pseudocode.

Declarations come first::

    word 3                      # word size W (or pass W= to parse)
    input x12 x13 x14           # input bits, in parameter order
    input x[6]                  # or an input bit array
    bits y z
    int i j                     # W-bit integers (``int i width 3`` also accepted)
    array R[4]                  # R[0..3]
    array2 A[4][4]
    output w

Statements, one per line, optionally prefixed by a numeric label ``50:``::

    s = 0 | s = x | s = !x | s = x & y | s = x ^ y | s = a | b | c
    i++ | i = 3 | b = (i == j) | x = R[m] | R[m] = x | x = A[m][c]
    A[m][c] = x | sym A[m][c] = x | go to 50 | if c then go to 50 endif
    return | while c do ... endwhile | for i = 0 to 3 do ... endfor

Bit operands are bit names, integer bits ``i.k`` or constant array
elements ``R[2]``.
"""

from __future__ import annotations

import re
from typing import Optional

from .ast import (
    ArrRead1,
    ArrRead2,
    ArrWrite1,
    ArrWrite2,
    AssignConst,
    AssignCopy,
    AssignNot,
    AssignOr,
    AssignOrK,
    AssignAnd,
    AssignXor,
    EqTest,
    For,
    Goto,
    IfGoto,
    IncInt,
    Item,
    Program,
    PseudoError,
    Return,
    SetInt,
    SymbolTable,
    SymWrite2,
    While,
)

_TOKEN = re.compile(r"\s*(?:(==|\+\+|[=&|^!()\[\].:,])|(\d+)|([A-Za-z_][A-Za-z0-9_]*))")
_UNICODE = {"∧": "&", "∨": "|", "⊕": "^", "¬": "!"}
_BINOPS = {"&": AssignAnd, "|": AssignOr, "^": AssignXor}
_KEYWORDS = {"if", "then", "go", "to", "goto", "endif", "return", "while", "do",
             "endwhile", "for", "endfor", "sym", "input", "bits", "int", "array",
             "array2", "output", "word", "width"}


class _Tokens:
    def __init__(self, text: str, line: int):
        for k, v in _UNICODE.items():
            text = text.replace(k, v)
        self.line = line
        self.toks: list[tuple[str, str, int]] = []  # (kind, text, col)
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise PseudoError(f"unexpected character {text[pos:].strip()[:1]!r}",
                                  line, pos + 1)
            op, num, ident = m.groups()
            col = m.start(m.lastindex) + 1
            if op:
                self.toks.append(("op", op, col))
            elif num:
                self.toks.append(("num", num, col))
            else:
                self.toks.append(("id", ident, col))
            pos = m.end()
        self.i = 0

    def peek(self, k: int = 0) -> Optional[tuple[str, str, int]]:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t[1] == text

    def next(self) -> tuple[str, str, int]:
        t = self.peek()
        if t is None:
            raise PseudoError("unexpected end of line", self.line)
        self.i += 1
        return t

    def expect(self, text: str):
        t = self.next()
        if t[1] != text:
            raise PseudoError(f"expected {text!r}, found {t[1]!r}", self.line, t[2])
        return t

    def ident(self) -> tuple[str, int]:
        t = self.next()
        if t[0] != "id" or t[1] in _KEYWORDS:
            raise PseudoError(f"expected a name, found {t[1]!r}", self.line, t[2])
        return t[1], t[2]

    def number(self) -> int:
        t = self.next()
        if t[0] != "num":
            raise PseudoError(f"expected a number, found {t[1]!r}", self.line, t[2])
        return int(t[1])

    def done(self):
        t = self.peek()
        if t is not None:
            raise PseudoError(f"unexpected {t[1]!r}", self.line, t[2])

    @property
    def empty(self) -> bool:
        return not self.toks


class _Parser:
    def __init__(self, W: Optional[int]):
        self.W = W
        self.sym: Optional[SymbolTable] = None
        self.pending: list = []  # declarations seen before `word`
        self.in_body = False
        self.labels: dict[int, int] = {}

    # ------------------------------------------------------------ symbols
    def table(self, line: int) -> SymbolTable:
        if self.sym is None:
            if self.W is None:
                raise PseudoError("word size unknown: add `word W` or pass W", line)
            if self.W < 1:
                raise PseudoError("word size must be at least 1", line)
            self.sym = SymbolTable(self.W)
        return self.sym

    def fresh(self, name: str, line: int, col: int):
        sym = self.table(line)
        if name in sym.names():
            raise PseudoError(f"{name} declared twice", line, col)

    def declaration(self, tk: _Tokens, line: int) -> bool:
        head = tk.peek()
        if head is None or head[0] != "id":
            return False
        kw = head[1]
        if kw not in ("word", "input", "bits", "int", "array", "array2", "output"):
            return False
        if self.in_body:
            raise PseudoError(f"declaration {kw!r} after the first statement", line, head[2])
        tk.next()
        if kw == "word":
            w = tk.number()
            tk.done()
            if self.sym is not None and w != self.sym.W:
                raise PseudoError("`word` must precede all other declarations", line)
            if self.W is not None and self.W != w:
                raise PseudoError(f"word size {w} conflicts with requested W={self.W}", line)
            self.W = w
            return True
        sym = self.table(line)
        if kw == "input":
            while tk.peek() is not None:
                name, col = tk.ident()
                self.fresh(name, line, col)
                if tk.at("["):
                    tk.next()
                    n = tk.number()
                    tk.expect("]")
                    av = sym.add_array(name, n) if n <= 2 ** sym.W else None
                    if av is None:
                        raise PseudoError(f"input array {name}: length exceeds 2^W", line, col)
                    sym.inputs.extend(av.slots())
                    sym.input_names.extend(f"{name}[{k}]" for k in range(n))
                else:
                    sym.inputs.append(sym.add_bit(name))
                    sym.input_names.append(name)
                if tk.at(","):
                    tk.next()
            return True
        if kw == "bits":
            while tk.peek() is not None:
                name, col = tk.ident()
                self.fresh(name, line, col)
                sym.add_bit(name)
                if tk.at(","):
                    tk.next()
            return True
        if kw == "int":
            while tk.peek() is not None:
                name, col = tk.ident()
                self.fresh(name, line, col)
                if tk.at("width"):
                    tk.next()
                    w = tk.number()
                    if w != sym.W:
                        raise PseudoError(f"int {name}: width {w} differs from W={sym.W}",
                                          line, col)
                sym.add_int(name)
                if tk.at(","):
                    tk.next()
            return True
        if kw in ("array", "array2"):
            name, col = tk.ident()
            self.fresh(name, line, col)
            tk.expect("[")
            rows = tk.number()
            tk.expect("]")
            cols = 0
            if kw == "array2":
                tk.expect("[")
                cols = tk.number()
                tk.expect("]")
                if cols < 1:
                    raise PseudoError(f"array {name}: empty dimension", line, col)
            tk.done()
            try:
                sym.add_array(name, rows, cols)
            except PseudoError as e:
                raise PseudoError(e.msg, line, col) from None
            return True
        # output
        name, col = tk.ident()
        tk.done()
        if name not in sym.names():
            sym.add_bit(name)
        elif name not in sym.bits:
            raise PseudoError(f"output {name} must be a bit variable", line, col)
        if sym.bits[name] in sym.inputs:
            raise PseudoError("the output bit cannot be an input", line, col)
        sym.output = sym.bits[name]
        return True

    # ----------------------------------------------------------- operands
    def bit(self, tk: _Tokens, line: int, writable: bool = False) -> int:
        sym = self.sym
        name, col = tk.ident()
        if name in sym.bits:
            slot = sym.bits[name]
        elif name in sym.ints:
            if not tk.at("."):
                raise PseudoError(f"{name} is an integer; use {name}.k for a bit", line, col)
            tk.next()
            k = tk.number()
            if not 1 <= k <= sym.W:
                raise PseudoError(f"bit {k} of {name} outside 1..{sym.W}", line, col)
            slot = sym.ints[name].slot(k)
        elif name in sym.arrays:
            av = sym.arrays[name]
            tk.expect("[")
            m = tk.number()
            tk.expect("]")
            c = 0
            if av.cols:
                tk.expect("[")
                c = tk.number()
                tk.expect("]")
            if m >= av.rows or (av.cols and c >= av.cols):
                raise PseudoError(f"constant index out of range for {name}", line, col)
            slot = av.slot(m, c)
        else:
            raise PseudoError(f"undeclared name {name!r}", line, col)
        if writable and slot in sym.inputs:
            raise PseudoError(f"assignment to input {name}", line, col)
        return slot

    def int_name(self, tk: _Tokens, line: int) -> str:
        name, col = tk.ident()
        if name not in self.sym.ints:
            raise PseudoError(f"{name!r} is not an integer variable", line, col)
        return name

    def is_var_index(self, tk: _Tokens, k: int) -> bool:
        t = tk.peek(k)
        return t is not None and t[0] == "id"

    def label_target(self, tk: _Tokens, line: int) -> int:
        if tk.at("goto"):
            tk.next()
        else:
            tk.expect("go")
            tk.expect("to")
        return tk.number()

    # --------------------------------------------------------- statements
    def simple(self, tk: _Tokens, line: int):
        sym = self.sym
        t = tk.peek()
        if t[1] == "return":
            tk.next()
            return Return()
        if t[1] in ("go", "goto"):
            return Goto(self.label_target(tk, line))
        if t[1] == "if":
            tk.next()
            cond = self.bit(tk, line)
            if tk.at("=="):
                tk.next()
                if tk.number() != 1:
                    raise PseudoError("conditions test for 1 only", line)
            tk.expect("then")
            target = self.label_target(tk, line)
            tk.expect("endif")
            return IfGoto(cond, target)
        if t[1] == "sym":
            tk.next()
            arr, row, col = self.arr2_lhs(tk, line)
            tk.expect("=")
            return SymWrite2(arr, row, col, self.bit(tk, line))
        name = t[1]
        if name in sym.ints and tk.at("++", 1):
            tk.next()
            tk.next()
            return IncInt(name)
        if name in sym.ints and tk.at("=", 1):
            tk.next()
            tk.next()
            v = tk.number()
            if v >= 2 ** sym.W:
                raise PseudoError(f"constant {v} does not fit in {sym.W} bits", line)
            return SetInt(name, v)
        if name in sym.arrays and tk.at("[", 1) and self.is_var_index(tk, 2):
            av = sym.arrays[name]
            if av.cols:
                arr, row, col = self.arr2_lhs(tk, line)
                tk.expect("=")
                return ArrWrite2(arr, row, col, self.bit(tk, line))
            tk.next()
            tk.next()
            idx = self.int_name(tk, line)
            tk.expect("]")
            tk.expect("=")
            return ArrWrite1(name, idx, self.bit(tk, line))
        dst = self.bit(tk, line, writable=True)
        tk.expect("=")
        return self.rhs(tk, line, dst)

    def arr2_lhs(self, tk: _Tokens, line: int):
        name, col = tk.ident()
        av = self.sym.arrays.get(name)
        if av is None or not av.cols:
            raise PseudoError(f"{name!r} is not a 2-D array", line, col)
        tk.expect("[")
        row = self.int_name(tk, line)
        tk.expect("]")
        tk.expect("[")
        c = self.int_name(tk, line)
        tk.expect("]")
        return name, row, c

    def rhs(self, tk: _Tokens, line: int, dst: int):
        sym = self.sym
        t = tk.peek()
        if t is None:
            raise PseudoError("missing right-hand side", line)
        if t[0] == "num":
            tk.next()
            if t[1] not in ("0", "1"):
                raise PseudoError("bit constants are 0 or 1", line, t[2])
            return AssignConst(dst, int(t[1]))
        if t[1] == "!":
            tk.next()
            return AssignNot(dst, self.bit(tk, line))
        paren = t[1] == "("
        if paren or (t[1] in sym.ints and tk.at("==", 1)):
            if paren:
                tk.next()
            a = self.int_name(tk, line)
            tk.expect("==")
            b = self.int_name(tk, line)
            if paren:
                tk.expect(")")
            return EqTest(dst, a, b)
        if t[1] in sym.arrays and tk.at("[", 1) and self.is_var_index(tk, 2):
            av = sym.arrays[t[1]]
            tk.next()
            tk.next()
            row = self.int_name(tk, line)
            tk.expect("]")
            if av.cols:
                tk.expect("[")
                col = self.int_name(tk, line)
                tk.expect("]")
                return ArrRead2(dst, t[1], row, col)
            return ArrRead1(dst, t[1], row)
        a = self.bit(tk, line)
        if tk.peek() is None:
            return AssignCopy(dst, a)
        op = tk.next()
        if op[1] not in _BINOPS:
            raise PseudoError(f"unexpected {op[1]!r}", line, op[2])
        b = self.bit(tk, line)
        if tk.peek() is None:
            return _BINOPS[op[1]](dst, a, b)
        srcs = [a, b]
        while tk.peek() is not None:
            nxt = tk.next()
            if nxt[1] != "|" or op[1] != "|":
                raise PseudoError("expressions take at most one boolean operator",
                                  line, nxt[2])
            srcs.append(self.bit(tk, line))
        return AssignOrK(dst, tuple(srcs))

    # ------------------------------------------------------------ driver
    def parse(self, text: str) -> Program:
        stack: list[tuple[object, list, int, Optional[int]]] = [(None, [], 0, None)]
        for lineno, raw in enumerate(text.splitlines(), 1):
            code = re.split(r"#|//", raw, maxsplit=1)[0]
            tk = _Tokens(code, lineno)
            if tk.empty:
                continue
            if self.declaration(tk, lineno):
                continue
            label = None
            if tk.peek()[0] == "num" and tk.at(":", 1):
                label = tk.number()
                tk.next()
                if label in self.labels:
                    raise PseudoError(f"label {label} defined twice", lineno)
                self.labels[label] = lineno
                if tk.peek() is None:
                    raise PseudoError("label on an empty line", lineno)
            self.table(lineno)
            if self.sym.output is None:
                raise PseudoError("declare the result bit with `output`", lineno)
            self.in_body = True
            head = tk.peek()
            if head[1] == "while":
                tk.next()
                cond = self.bit(tk, lineno)
                if tk.at("=="):
                    tk.next()
                    if tk.number() != 1:
                        raise PseudoError("conditions test for 1 only", lineno)
                tk.expect("do")
                tk.done()
                stack.append(("while", [], lineno, label, cond))
                continue
            if head[1] == "for":
                tk.next()
                var = self.int_name(tk, lineno)
                tk.expect("=")
                lo = tk.number()
                tk.expect("to")
                hi = tk.number()
                tk.expect("do")
                tk.done()
                if not lo <= hi < 2 ** self.sym.W:
                    raise PseudoError(f"for bounds need 0 <= {lo} <= {hi} < 2^W", lineno)
                stack.append(("for", [], lineno, label, (var, lo, hi)))
                continue
            if head[1] in ("endwhile", "endfor"):
                tk.next()
                tk.done()
                if label is not None:
                    raise PseudoError("labels cannot sit on a block end", lineno)
                kind = head[1][3:]
                if stack[-1][0] != kind:
                    raise PseudoError(f"{head[1]} without matching {kind}", lineno)
                _, body, start, lab, extra = stack.pop()
                if not body:
                    raise PseudoError(f"empty {kind} body", start)
                node = While(extra, tuple(body)) if kind == "while" else For(*extra, tuple(body))
                stack[-1][1].append(Item(node, lab, start))
                continue
            stmt = self.simple(tk, lineno)
            tk.done()
            stack[-1][1].append(Item(stmt, label, lineno))
        if len(stack) > 1:
            raise PseudoError(f"unterminated {stack[-1][0]} block", stack[-1][2])
        if self.sym is None or self.sym.output is None:
            raise PseudoError("program declares no output bit")
        items = tuple(stack[0][1])
        if not items:
            raise PseudoError("program has no statements")
        self._check_targets(items)
        return Program(self.sym, items)

    def _check_targets(self, items):
        for it in items:
            node = it.node
            if isinstance(node, (Goto, IfGoto)) and node.target not in self.labels:
                raise PseudoError(f"jump to undefined label {node.target}", it.line)
            if isinstance(node, (While, For)):
                self._check_targets(node.body)


def parse(text: str, W: Optional[int] = None) -> Program:
    """Parse pseudocode source into a :class:`Program` (labels unresolved)."""
    return _Parser(W).parse(text)
