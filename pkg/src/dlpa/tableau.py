"""The labelled tableau calculus.

A labelled formula asserts a formula at the valuation reached by running a
sequence of assignments (the label) from the input model. A branch is a set
of labelled formulas together with bookkeeping of which (witness, rule,
context) triples have already fired, so a formula can serve several rules
without being consumed for all of them at once.

Fifteen rules: double negation, conjunction, disjunction, the box and diamond
forms of each program shape, and the two frame rules RP1/RP2 that copy
literals untouched by an assignment into the successor label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .semantics import Valuation
from .syntax import (
    And,
    Assignment,
    Atomic,
    Box,
    Choice,
    Formula,
    Not,
    Prop,
    Seq,
    Star,
    Test,
    exe_traces,
    render,
    render_assignment,
    vocabulary,
)


@dataclass(frozen=True)
class Label:
    """A possibly empty sequence of assignments naming a reached valuation."""

    trace: tuple = ()

    def extend(self, a: Assignment) -> "Label":
        return Label(self.trace + (a,))

    def parent_of(self, other: "Label") -> Optional[Assignment]:
        """The assignment stepping from self to other, if other = self + one."""
        if (len(other.trace) == len(self.trace) + 1
                and other.trace[:len(self.trace)] == self.trace):
            return other.trace[-1]
        return None

    def render(self) -> str:
        if not self.trace:
            return "()"
        return ".".join(render_assignment(a) for a in self.trace)


@dataclass(frozen=True)
class LabeledFormula:
    label: Label
    formula: Formula

    def render(self) -> str:
        return f"<{self.label.render()}, {render(self.formula)}>"


class Rule(Enum):
    RNeg = 1
    RAnd = 2
    ROr = 3
    RBoxAtom = 4
    RDiaAtom = 5
    RBoxTest = 6
    RDiaTest = 7
    RBoxSeq = 8
    RDiaSeq = 9
    RBoxChoice = 10
    RDiaChoice = 11
    RBoxStar = 12
    RDiaStar = 13
    RP1 = 14
    RP2 = 15


class NotAWitnessError(ValueError):
    pass


def decompose(f: Formula):
    """Label-free rule bodies for the shapes handled in place.

    Returns (rule, children) where children is a list of formula lists, one
    per resulting branch, or None when f is a literal or an atomic-program
    modality (those step to a successor label instead).
    """
    if isinstance(f, Not):
        g = f.sub
        if isinstance(g, Not):
            return Rule.RNeg, [[g.sub]]
        if isinstance(g, And):
            return Rule.ROr, [[Not(g.left)], [Not(g.right)]]
        if isinstance(g, Box):
            prog, body = g.program, g.sub
            if isinstance(prog, Test):
                return Rule.RDiaTest, [[prog.formula, Not(body)]]
            if isinstance(prog, Seq):
                return Rule.RDiaSeq, [[Not(Box(prog.left, Box(prog.right, body)))]]
            if isinstance(prog, Choice):
                return Rule.RDiaChoice, [[Not(Box(prog.left, body))],
                                         [Not(Box(prog.right, body))]]
            if isinstance(prog, Star):
                return Rule.RDiaStar, [[Not(body)],
                                       [body, Not(Box(prog.sub, g))]]
        return None
    if isinstance(f, And):
        return Rule.RAnd, [[f.left, f.right]]
    if isinstance(f, Box):
        prog, body = f.program, f.sub
        if isinstance(prog, Test):
            return Rule.RBoxTest, [[Not(prog.formula)], [body]]
        if isinstance(prog, Seq):
            return Rule.RBoxSeq, [[Box(prog.left, Box(prog.right, body))]]
        if isinstance(prog, Choice):
            return Rule.RBoxChoice, [[Box(prog.left, body), Box(prog.right, body)]]
        if isinstance(prog, Star):
            return Rule.RBoxStar, [[body, Box(prog.sub, f)]]
    return None


def atomic_step(f: Formula):
    """(assignment, body formula at the successor) for ⟨sigma alpha⟩ rules,
    or None. The body is already negated for the diamond form."""
    if isinstance(f, Box) and isinstance(f.program, Atomic):
        return f.program.assignment, f.sub
    if (isinstance(f, Not) and isinstance(f.sub, Box)
            and isinstance(f.sub.program, Atomic)):
        return f.sub.program.assignment, Not(f.sub.sub)
    return None


def is_literal(f: Formula) -> bool:
    return isinstance(f, Prop) or (isinstance(f, Not) and isinstance(f.sub, Prop))


def _shape_rule(f: Formula) -> Optional[Rule]:
    d = decompose(f)
    if d is not None:
        return d[0]
    step = atomic_step(f)
    if step is not None:
        return Rule.RBoxAtom if isinstance(f, Box) else Rule.RDiaAtom
    return None


def _sort_key(lf: LabeledFormula):
    return (len(lf.label.trace), lf.label.render(), render(lf.formula))


@dataclass(frozen=True)
class Branch:
    """Immutable set of labelled formulas plus consumed-witness bookkeeping.

    consumed holds (labelled formula, rule, context) triples; context is the
    successor label for RP1/RP2 and None otherwise. Re-adding a member never
    clears its entries.
    """

    members: frozenset = frozenset()
    consumed: frozenset = frozenset()

    def add(self, lfs: Iterable[LabeledFormula]) -> "Branch":
        return Branch(self.members | frozenset(lfs), self.consumed)

    def mark(self, lf: LabeledFormula, rule: Rule,
             context: Optional[Label] = None) -> "Branch":
        return Branch(self.members, self.consumed | {(lf, rule, context)})

    def is_consumed(self, lf: LabeledFormula, rule: Rule,
                    context: Optional[Label] = None) -> bool:
        return (lf, rule, context) in self.consumed

    def labels(self) -> list[Label]:
        return sorted({lf.label for lf in self.members},
                      key=lambda l: (len(l.trace), l.render()))

    def at(self, label: Label) -> list[LabeledFormula]:
        return sorted((lf for lf in self.members if lf.label == label),
                      key=_sort_key)

    def dump(self) -> str:
        """One line per member: `label | formula | flags`, flags naming the
        rules that consumed it (with the target label for RP1/RP2)."""
        lines = []
        for lf in sorted(self.members, key=_sort_key):
            flags = []
            for (wit, rule, ctx) in sorted(
                    self.consumed,
                    key=lambda t: (t[1].value, "" if t[2] is None else t[2].render())):
                if wit == lf:
                    flags.append(rule.name if ctx is None
                                 else f"{rule.name}@{ctx.render()}")
            lines.append(f"{lf.label.render()} | {render(lf.formula)} | "
                         + ",".join(flags))
        return "\n".join(lines)


def initial_branch(v: Valuation, f: Formula) -> Branch:
    """The root: one literal per vocabulary atom describing v, plus f itself,
    all at the empty label."""
    root = Label()
    members = {LabeledFormula(root, f)}
    for p in sorted(vocabulary(f)):
        lit = Prop(p) if p in v else Not(Prop(p))
        members.add(LabeledFormula(root, lit))
    return Branch(frozenset(members))


def _rp_contexts(b: Branch, lf: LabeledFormula, rule: Rule, atom: str) -> list[Label]:
    out = []
    for other in b.labels():
        step = lf.label.parent_of(other)
        if step is None or atom in step:
            continue
        if not b.is_consumed(lf, rule, other):
            out.append(other)
    return out


def witnesses(b: Branch, rule: Rule) -> list[LabeledFormula]:
    """Members that let the rule fire, consumed ones excluded. For RP1/RP2 a
    literal is a witness while some successor label it has not yet been
    copied into exists."""
    found = []
    for lf in b.members:
        f = lf.formula
        if rule is Rule.RP1:
            if isinstance(f, Prop) and _rp_contexts(b, lf, rule, f.name):
                found.append(lf)
            continue
        if rule is Rule.RP2:
            if (isinstance(f, Not) and isinstance(f.sub, Prop)
                    and _rp_contexts(b, lf, rule, f.sub.name)):
                found.append(lf)
            continue
        if _shape_rule(f) is rule and not b.is_consumed(lf, rule):
            found.append(lf)
    return sorted(found, key=_sort_key)


def apply(b: Branch, w: LabeledFormula, rule: Rule,
          target: Optional[Label] = None) -> list[Branch]:
    """Fire the rule on the witness; returns the child branches (parent
    included in each) with the witness marked consumed."""
    if w not in witnesses(b, rule):
        raise NotAWitnessError(f"{w.render()} is not a witness to {rule.name}")

    if rule in (Rule.RP1, Rule.RP2):
        atom = w.formula.name if rule is Rule.RP1 else w.formula.sub.name
        contexts = _rp_contexts(b, w, rule, atom)
        if target is None:
            if len(contexts) == 1:
                target = contexts[0]
            else:
                raise NotAWitnessError(
                    f"{rule.name} needs a target label, candidates: "
                    + ", ".join(l.render() for l in contexts))
        if target not in contexts:
            raise NotAWitnessError(
                f"{target.render()} is not an open {rule.name} context for "
                + w.render())
        child = b.add([LabeledFormula(target, w.formula)]).mark(w, rule, target)
        return [child]

    if rule in (Rule.RBoxAtom, Rule.RDiaAtom):
        assignment, body = atomic_step(w.formula)
        succ = w.label.extend(assignment)
        adds = [LabeledFormula(succ, body)]
        for atom, sign in assignment.pairs:
            lit = Prop(atom) if sign else Not(Prop(atom))
            adds.append(LabeledFormula(succ, lit))
        return [b.add(adds).mark(w, rule)]

    decomposed = decompose(w.formula)
    if decomposed is None or decomposed[0] is not rule:
        raise NotAWitnessError(f"{w.render()} does not match {rule.name}")
    _, children = decomposed
    out = []
    for formulas in children:
        adds = [LabeledFormula(w.label, g) for g in formulas]
        out.append(b.add(adds).mark(w, rule))
    return out


def is_blatantly_inconsistent(b: Branch) -> bool:
    """Some label carries a formula and its structural negation."""
    return any(LabeledFormula(lf.label, Not(lf.formula)) in b.members
               for lf in b.members)


def is_saturated(b: Branch) -> bool:
    return all(not witnesses(b, rule) for rule in Rule)


def eventualities(b: Branch) -> list[LabeledFormula]:
    """Members of shape ~[pi*] phi; each needs a label along the branch where
    the negated body appears."""
    return sorted((lf for lf in b.members
                   if isinstance(lf.formula, Not)
                   and isinstance(lf.formula.sub, Box)
                   and isinstance(lf.formula.sub.program, Star)),
                  key=_sort_key)


def fulfillment_witness(b: Branch, e: LabeledFormula,
                        star_bound: Optional[int] = None):
    """The shortest iteration trace sigma' with <e.label + sigma', ~phi> on
    the branch, or None. A bound of the number of distinct labels makes the
    bounded search exact on a finite branch; the empty trace counts (zero
    iterations fulfill immediately)."""
    if e not in eventualities(b):
        raise ValueError(f"{e.render()} is not an eventuality of the branch")
    star = e.formula.sub.program
    target = Not(e.formula.sub.sub)
    if star_bound is None:
        star_bound = len(b.labels())
    for trace in sorted(exe_traces(star, star_bound),
                        key=lambda t: (len(t), [render_assignment(a) for a in t])):
        reached = Label(e.label.trace + trace)
        if LabeledFormula(reached, target) in b.members:
            return trace
    return None


def is_fulfilled(b: Branch, e: LabeledFormula,
                 star_bound: Optional[int] = None) -> bool:
    return fulfillment_witness(b, e, star_bound) is not None
