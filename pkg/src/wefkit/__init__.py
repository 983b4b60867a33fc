"""Compile boolean circuits and register-machine pseudocode into linear programs
whose exact optimization decides the encoded problem."""

__version__ = "0.1.0"
