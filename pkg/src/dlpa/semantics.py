"""Ground-truth semantics.

A model is just a valuation, a finite set of atoms deemed true. Programs
denote relations between valuations; an assignment overwrites its domain and
leaves everything else alone, and iteration is the reflexive-transitive
closure. `evaluate` is the brute-force interpreter the solvers are verified
against; `oracle_valid` and `oracle_sat` enumerate the vocabulary.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .syntax import (
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
    program_vocabulary,
    vocabulary,
)

Valuation = frozenset

_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")

ENUMERATION_CAP = 20


class EnumerationCapError(Exception):
    """Raised when a brute-force query would enumerate too many valuations."""


def parse_valuation(text: str) -> Valuation:
    """Comma-separated atom names; empty string or `{}` is the empty valuation."""
    body = text.strip()
    if body in ("", "{}"):
        return frozenset()
    atoms = [part.strip() for part in body.split(",")]
    for atom in atoms:
        if not _ATOM_RE.match(atom):
            raise ValueError(f"not an atom name: {atom!r}")
    return frozenset(atoms)


def format_valuation(v: Valuation) -> str:
    return ",".join(sorted(v)) if v else "{}"


def update(v: Valuation, a: Assignment) -> Valuation:
    """Overwrite v on the assignment's domain, keep it elsewhere."""
    out = set(v) - set(a.domain)
    out.update(atom for atom, sign in a.pairs if sign)
    return frozenset(out)


def apply_trace(v: Valuation, trace: Sequence[Assignment]) -> Valuation:
    for a in trace:
        v = update(v, a)
    return v


def successors(v: Valuation, p: Program) -> frozenset:
    """All valuations reachable from v by one run of p."""
    if isinstance(p, Atomic):
        return frozenset({update(v, p.assignment)})
    if isinstance(p, Seq):
        out: set = set()
        for mid in successors(v, p.left):
            out |= successors(mid, p.right)
        return frozenset(out)
    if isinstance(p, Choice):
        return successors(v, p.left) | successors(v, p.right)
    if isinstance(p, Test):
        return frozenset({v}) if evaluate(v, p.formula) else frozenset()
    if isinstance(p, Star):
        # Reachable set is finite: runs only touch atoms assigned inside p.
        seen = {v}
        frontier = [v]
        while frontier:
            w = frontier.pop()
            for x in successors(w, p.sub):
                if x not in seen:
                    seen.add(x)
                    frontier.append(x)
        return frozenset(seen)
    raise TypeError(f"not a program: {p!r}")


def evaluate(v: Valuation, f: Formula) -> bool:
    if isinstance(f, Prop):
        return f.name in v
    if isinstance(f, Not):
        return not evaluate(v, f.sub)
    if isinstance(f, And):
        return evaluate(v, f.left) and evaluate(v, f.right)
    if isinstance(f, Box):
        return all(evaluate(w, f.sub) for w in successors(v, f.program))
    raise TypeError(f"not a formula: {f!r}")


@dataclass(frozen=True)
class Relation:
    """A program denotation restricted to valuations over a finite universe."""

    pairs: frozenset
    universe: frozenset


def all_valuations(atoms: Iterable[str]) -> Iterator[Valuation]:
    names = sorted(atoms)
    for mask in range(1 << len(names)):
        yield frozenset(names[i] for i in range(len(names)) if mask >> i & 1)


def program_relation(p: Program, universe: Iterable[str]) -> Relation:
    """The denotation of p over all valuations of the universe. Star is the
    least fixpoint of relational composition seeded with the identity."""
    uni = frozenset(universe)
    if not program_vocabulary(p) <= uni:
        raise ValueError("universe must cover every atom occurring in the program")
    return Relation(frozenset(_rel(p, tuple(all_valuations(uni)))), uni)


def _rel(p: Program, vals: tuple) -> set:
    if isinstance(p, Atomic):
        return {(v, update(v, p.assignment)) for v in vals}
    if isinstance(p, Seq):
        return _compose(_rel(p.left, vals), _rel(p.right, vals))
    if isinstance(p, Choice):
        return _rel(p.left, vals) | _rel(p.right, vals)
    if isinstance(p, Test):
        return {(v, v) for v in vals if evaluate(v, p.formula)}
    if isinstance(p, Star):
        base = _rel(p.sub, vals)
        rel = {(v, v) for v in vals}
        while True:
            grown = rel | _compose(rel, base)
            if grown == rel:
                return rel
            rel = grown
    raise TypeError(f"not a program: {p!r}")


def _compose(r1: set, r2: set) -> set:
    by_first: dict = {}
    for mid, out in r2:
        by_first.setdefault(mid, []).append(out)
    return {(a, c) for a, b in r1 for c in by_first.get(b, ())}


def oracle_valid(f: Formula, cap: int = ENUMERATION_CAP) -> bool:
    """True iff f holds at every valuation over its vocabulary. Truth only
    depends on vocabulary atoms, so this enumeration is exhaustive."""
    atoms = vocabulary(f)
    if len(atoms) > cap:
        raise EnumerationCapError(
            f"{len(atoms)} atoms exceeds the enumeration cap of {cap}")
    return all(evaluate(v, f) for v in all_valuations(atoms))


def oracle_sat(f: Formula, cap: int = ENUMERATION_CAP) -> bool:
    atoms = vocabulary(f)
    if len(atoms) > cap:
        raise EnumerationCapError(
            f"{len(atoms)} atoms exceeds the enumeration cap of {cap}")
    return any(evaluate(v, f) for v in all_valuations(atoms))
