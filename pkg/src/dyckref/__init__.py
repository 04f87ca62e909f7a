"""Dyck inclusion checking for asynchronous programs.

``verify`` decides whether every trace of a program is a Dyck word and
returns a verdict with a violation kind and a witness run when it is not.
"""
from .errors import CapExceeded, InputError
from .parser import format_program, load_program, parse_program
from .pipeline import Caps, verify
from .verdict import Kind, Status, Verdict, Witness

__all__ = ["CapExceeded", "Caps", "InputError", "Kind", "Status", "Verdict", "Witness",
           "format_program", "load_program", "parse_program", "verify"]
__version__ = "0.1.0"
