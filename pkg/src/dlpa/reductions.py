"""Reductions between problems.

Satisfiability becomes model checking through the master program, the
sequence of one-atom choices (+p u -p) over the vocabulary: diamond it in
front of the formula and check at the empty valuation. Model checking becomes
satisfiability by conjoining the model's literals. A textual export to plain
PDL replaces each one-atom assignment by an abstract program name and axioms
forcing those programs to behave like assignments.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .semantics import Valuation
from .syntax import (
    TOP,
    And,
    Assignment,
    Atomic,
    Box,
    Choice,
    Formula,
    Not,
    Program,
    Prop,
    Seq,
    Star,
    Test,
    diamond,
    len_formula,
    len_program,
    vocabulary,
)


@dataclass(frozen=True)
class McInstance:
    model: Valuation
    formula: Formula


class NonSingletonAssignmentError(Exception):
    """The PDL export is defined per one-atom assignment only."""

    def __init__(self, assignment: Assignment):
        self.assignment = assignment
        from .syntax import render_assignment
        super().__init__(
            f"assignment {render_assignment(assignment)} sets more than one atom")


def master_program(f: Formula) -> Program:
    """(+p1 u -p1) ; ... ; (+pn u -pn) over the vocabulary in atom order.

    Its runs reach every valuation of the vocabulary, so a diamond of it acts
    as an existential quantifier over models. Empty vocabulary degenerates to
    the identity program top?.
    """
    atoms = sorted(vocabulary(f))
    if not atoms:
        return Test(TOP)
    parts = [Choice(Atomic(Assignment({p: True})), Atomic(Assignment({p: False})))
             for p in atoms]
    return reduce(Seq, parts)


def sat_to_mc(f: Formula) -> McInstance:
    """f is satisfiable iff the returned instance model-checks to true."""
    return McInstance(frozenset(), diamond(master_program(f), f))


def master_modality_len(f: Formula) -> int:
    """Length of the sat_to_mc formula with the diamond counted as a single
    connective. For formulas whose assignments all set one atom this stays
    within 3 * len_formula(f) + 2."""
    return 1 + len_program(master_program(f)) + len_formula(f)


def mc_to_sat(v: Valuation, f: Formula) -> Formula:
    """v satisfies f iff the returned conjunction is satisfiable: f plus the
    positive vocabulary literals of v, plus the negated missing ones."""
    atoms = sorted(vocabulary(f))
    literals = [Prop(p) for p in atoms if p in v]
    literals += [Not(Prop(p)) for p in atoms if p not in v]
    return reduce(And, literals, f) if literals else f


# PDL export. Abstract program names: a_p<atom> for +atom, a_m<atom> for -atom.

def _pdl_name(atom: str, sign: bool) -> str:
    return f"a_{'p' if sign else 'm'}{atom}"


def _check_singletons(f: Formula) -> None:
    if isinstance(f, Not):
        _check_singletons(f.sub)
    elif isinstance(f, And):
        _check_singletons(f.left)
        _check_singletons(f.right)
    elif isinstance(f, Box):
        _check_singletons_program(f.program)
        _check_singletons(f.sub)


def _check_singletons_program(p: Program) -> None:
    if isinstance(p, Atomic):
        if len(p.assignment) != 1:
            raise NonSingletonAssignmentError(p.assignment)
    elif isinstance(p, (Seq, Choice)):
        _check_singletons_program(p.left)
        _check_singletons_program(p.right)
    elif isinstance(p, Star):
        _check_singletons_program(p.sub)
    elif isinstance(p, Test):
        _check_singletons(p.formula)


def _pdl_formula(f: Formula) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Not):
        return "~" + _pdl_formula(f.sub)
    if isinstance(f, And):
        return f"({_pdl_formula(f.left)} & {_pdl_formula(f.right)})"
    if isinstance(f, Box):
        return f"[{_pdl_program(f.program)}] {_pdl_formula(f.sub)}"
    raise TypeError(f"not a formula: {f!r}")


def _pdl_program(p: Program) -> str:
    if isinstance(p, Atomic):
        atom, sign = p.assignment.pairs[0]
        return _pdl_name(atom, sign)
    if isinstance(p, Seq):
        return f"({_pdl_program(p.left)} ; {_pdl_program(p.right)})"
    if isinstance(p, Choice):
        return f"({_pdl_program(p.left)} u {_pdl_program(p.right)})"
    if isinstance(p, Star):
        return _pdl_program(p.sub) + "*"
    if isinstance(p, Test):
        return _pdl_formula(p.formula) + "?"
    raise TypeError(f"not a program: {p!r}")


def pdl_gamma_clauses(f: Formula) -> list[str]:
    """The axioms forcing abstract programs to act as assignments: effect
    boxes, seriality diamonds, and one frame clause per ordered atom pair and
    polarity. For n vocabulary atoms that is 4n + 2n(n-1) clauses."""
    atoms = sorted(vocabulary(f))
    clauses = []
    for p in atoms:
        clauses.append(f"[{_pdl_name(p, True)}] {p}")
        clauses.append(f"[{_pdl_name(p, False)}] ~{p}")
    for p in atoms:
        clauses.append(f"<{_pdl_name(p, True)}> true")
        clauses.append(f"<{_pdl_name(p, False)}> true")
    for q in atoms:
        for p in atoms:
            if p == q:
                continue
            either = f"{_pdl_name(p, True)} u {_pdl_name(p, False)}"
            clauses.append(f"{q} -> [{either}] {q}")
    for q in atoms:
        for p in atoms:
            if p == q:
                continue
            either = f"{_pdl_name(p, True)} u {_pdl_name(p, False)}"
            clauses.append(f"~{q} -> [{either}] ~{q}")
    return clauses


def emit_pdl_embedding(f: Formula) -> str:
    """Textual PDL problem equisatisfiable with f. First line is the direct
    translation; each further line is an axiom kept true along every run
    (lines are implicitly conjoined). Requires one-atom assignments."""
    _check_singletons(f)
    atoms = sorted(vocabulary(f))
    names = [_pdl_name(p, sign) for p in atoms for sign in (True, False)]
    lines = [_pdl_formula(f)]
    if names:
        universal = "(" + " u ".join(names) + ")*"
        lines += [f"[{universal}] ({clause})" for clause in pdl_gamma_clauses(f)]
    return "\n".join(lines)
