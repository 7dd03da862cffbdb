"""Lexing, parsing and printing of the surface language."""

from .parser import Goal, parse_expr, parse_goal, parse_module, parse_type
from .pretty import pretty_expr, pretty_pattern, pretty_rule, pretty_type, show_value

__all__ = [
    "Goal",
    "parse_expr",
    "parse_goal",
    "parse_module",
    "parse_type",
    "pretty_expr",
    "pretty_pattern",
    "pretty_rule",
    "pretty_type",
    "show_value",
]
