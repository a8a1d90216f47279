"""Decision procedures for dynamic logic of propositional assignments."""

from .syntax import (
    And,
    Assignment,
    Atomic,
    Box,
    Choice,
    Formula,
    Not,
    ParseError,
    Program,
    Prop,
    Seq,
    Star,
    Test,
    parse_formula,
    parse_program,
    render,
    render_program,
)

__version__ = "0.1.0"

__all__ = [
    "And",
    "Assignment",
    "Atomic",
    "Box",
    "Choice",
    "Formula",
    "Not",
    "ParseError",
    "Program",
    "Prop",
    "Seq",
    "Star",
    "Test",
    "parse_formula",
    "parse_program",
    "render",
    "render_program",
    "__version__",
]
