"""Pseudocode front end: parser, desugarer and reference interpreters."""

from .ast import *  # noqa: F401,F403
from .ast import BasicProgram, Program, PseudoError, SymbolTable, dump_ast
from .desugar import desugar
from .interp import ExecutionError, NonTermination, Trace, interpret, run_program
from .parser import parse


def load(text: str, W=None) -> BasicProgram:
    """Parse and desugar in one go."""
    return desugar(parse(text, W))
