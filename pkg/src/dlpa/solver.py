"""The two decision procedures.

`mc_star_free` is a depth-first checker for star-free inputs. It alternates
local saturation (same-label rules) with successor creation: all atomic-step
witnesses sharing one assignment head are batched into a single fresh branch
for the successor label, untouched literals are copied across, and the
procedure recurses on that branch alone. Only one label is ever held per
call, which is the polynomial-space discipline.

`mc_full` handles iteration. Every label is reduced to its signature, the set
of formulas attached to it; signatures are expanded once into their locally
saturated, consistent alternatives and cached, so repeated labels become
loops in a finite graph instead of an infinite branch. A pruning fixpoint
then kills signatures with an unrealizable successor obligation or with an
eventuality that no chain of alive successors fulfills (fulfillment is itself
a least fixpoint over the graph). The input holds iff some root alternative
survives.

No cut rule exists in this calculus: with truth-value assignments every rule
is analytic, so a cut never has a witness and the rule set above is complete.

`sat` reduces satisfiability to model checking with the master program and
dispatches on star-freeness; `valid` is unsatisfiability of the negation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .reductions import sat_to_mc
from .semantics import Valuation
from .syntax import (
    Assignment,
    Box,
    Choice,
    Formula,
    Not,
    Prop,
    Seq,
    Star,
    Test,
    is_star_free,
    render,
    render_assignment,
)
from .tableau import (
    Branch,
    Label,
    LabeledFormula,
    Rule,
    apply,
    atomic_step,
    decompose,
    initial_branch,
    is_blatantly_inconsistent,
    is_literal,
    witnesses,
)

# Same-label rule groups. Star rules only join in for the full procedure.
LOCAL_SINGLE = (Rule.RNeg, Rule.RAnd, Rule.RDiaTest, Rule.RBoxSeq,
                Rule.RDiaSeq, Rule.RBoxChoice)
LOCAL_BRANCH = (Rule.ROr, Rule.RBoxTest, Rule.RDiaChoice)


class StarInputError(Exception):
    """The star-free checker was handed a formula containing iteration."""


class ReplayMismatchError(Exception):
    """A recorded proof trace disagreed with the replayed run."""


@dataclass
class TraceStep:
    rule: Rule
    label: str
    witness: Formula
    child_count: int


@dataclass
class ProofTrace:
    """Chronological record of rule firings across the whole exploration,
    plus informational notes and the dump of the decisive branch."""

    steps: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    final_branch_dump: Optional[str] = None
    result_open: Optional[bool] = None

    def record(self, rule: Rule, label: str, witness: Formula,
               child_count: int) -> None:
        self.steps.append(TraceStep(rule, label, witness, child_count))

    def rule_names(self) -> list:
        return [step.rule.name for step in self.steps]

    def step_keys(self) -> list:
        return [(s.rule.name, s.label, render(s.witness), s.child_count)
                for s in self.steps]

    def serialize(self) -> str:
        lines = [f"{i}: {s.rule.name} @ {s.label} : {render(s.witness)} "
                 f"-> {s.child_count}"
                 for i, s in enumerate(self.steps, 1)]
        lines.extend(self.notes)
        if self.final_branch_dump:
            lines.append("final branch:")
            lines.extend("  " + line for line in self.final_branch_dump.splitlines())
        lines.append(f"RESULT: {'open' if self.result_open else 'closed'}")
        return "\n".join(lines)


@dataclass
class SolverStats:
    """Instrumentation backing the complexity-shape checks."""

    calls: int = 0
    max_formulas_per_call: int = 0
    max_successor_depth: int = 0
    max_labels_per_successor_entry: int = 0
    signature_cache_size: int = 0
    signature_hits: int = 0


@dataclass
class Verdict:
    answer: bool
    trace: Optional[ProofTrace] = None
    stats: Optional[SolverStats] = None

    def __bool__(self) -> bool:
        return self.answer


def label_signature(formulas: Iterable[Formula]) -> frozenset:
    """Canonical form of the formula set attached to a label; two labels are
    equal exactly when their signatures are equal sets."""
    return frozenset(formulas)


def _pick(b: Branch, rules, rng):
    candidates = [(w, r) for r in rules for w in witnesses(b, r)]
    if not candidates:
        return None
    if rng is not None:
        return candidates[rng.randrange(len(candidates))]
    return min(candidates, key=lambda wr: (len(wr[0].label.trace), wr[1].value,
                                           render(wr[0].formula)))


def mc_star_free(v: Valuation, f: Formula, *, want_trace: bool = False,
                 rng=None, stats: Optional[SolverStats] = None) -> Verdict:
    """Depth-first model check of a star-free formula against v."""
    if not is_star_free(f):
        raise StarInputError("formula contains iteration; use mc_full")
    if stats is None:
        stats = SolverStats()
    trace = ProofTrace() if want_trace else None
    answer = _explore(initial_branch(v, f), 0, False, trace, rng, stats)
    if trace is not None:
        trace.result_open = answer
    return Verdict(answer, trace, stats)


def _explore(b: Branch, depth: int, via_successor: bool,
             trace: Optional[ProofTrace], rng, stats: SolverStats) -> bool:
    stats.calls += 1
    stats.max_successor_depth = max(stats.max_successor_depth, depth)
    stats.max_formulas_per_call = max(
        stats.max_formulas_per_call, len({lf.formula for lf in b.members}))
    if via_successor:
        stats.max_labels_per_successor_entry = max(
            stats.max_labels_per_successor_entry,
            len({lf.label for lf in b.members}))

    if is_blatantly_inconsistent(b):
        if trace is not None:
            trace.final_branch_dump = b.dump()
        return False

    # Local saturation: single-child rules run in place, inconsistency is
    # re-checked after every application.
    while True:
        pick = _pick(b, LOCAL_SINGLE, rng)
        if pick is None:
            break
        w, r = pick
        b = apply(b, w, r)[0]
        if trace is not None:
            trace.record(r, w.label.render(), w.formula, 1)
        if is_blatantly_inconsistent(b):
            if trace is not None:
                trace.final_branch_dump = b.dump()
            return False

    # Branching rules: the whole remaining exploration moves into the
    # children, any open child answers true.
    pick = _pick(b, LOCAL_BRANCH, rng)
    if pick is not None:
        w, r = pick
        children = apply(b, w, r)
        if trace is not None:
            trace.record(r, w.label.render(), w.formula, len(children))
        return any(_explore(child, depth, False, trace, rng, stats)
                   for child in children)

    # Successor creation: batch every atomic-step witness with the chosen
    # head into one fresh single-label branch, copy untouched literals, and
    # recurse on that branch alone. Every head must come back open.
    while True:
        alpha = [(w, Rule.RBoxAtom) for w in witnesses(b, Rule.RBoxAtom)]
        alpha += [(w, Rule.RDiaAtom) for w in witnesses(b, Rule.RDiaAtom)]
        if not alpha:
            break
        if rng is not None:
            w0 = alpha[rng.randrange(len(alpha))][0]
        else:
            w0 = min(alpha, key=lambda wr: (len(wr[0].label.trace), wr[1].value,
                                            render(wr[0].formula)))[0]
        head = atomic_step(w0.formula)[0]
        sigma = w0.label
        batch = [(w, r) for (w, r) in alpha
                 if w.label == sigma and atomic_step(w.formula)[0] == head]
        succ = sigma.extend(head)

        adds = set()
        for atom, sign in head.pairs:
            adds.add(LabeledFormula(succ, Prop(atom) if sign else Not(Prop(atom))))
        for (w, r) in sorted(batch, key=lambda wr: (wr[1].value,
                                                    render(wr[0].formula))):
            adds.add(LabeledFormula(succ, atomic_step(w.formula)[1]))
            if trace is not None:
                trace.record(r, sigma.render(), w.formula, 1)
        for lf in b.at(sigma):
            g = lf.formula
            if not is_literal(g):
                continue
            atom = g.name if isinstance(g, Prop) else g.sub.name
            if atom in head:
                continue
            adds.add(LabeledFormula(succ, g))
            if trace is not None:
                trace.record(Rule.RP1 if isinstance(g, Prop) else Rule.RP2,
                             sigma.render(), g, 1)

        if not _explore(Branch(frozenset(adds)), depth + 1, True,
                        trace, rng, stats):
            return False
        for (w, r) in batch:
            b = b.mark(w, r)

    if trace is not None:
        trace.final_branch_dump = b.dump()
    return True


def _is_eventuality(f: Formula) -> bool:
    return (isinstance(f, Not) and isinstance(f.sub, Box)
            and isinstance(f.sub.program, Star))


def _set_inconsistent(fs) -> bool:
    return any(Not(g) in fs for g in fs)


def _graph_decompose(g: Formula):
    """Unfolding table for the signature graph. Identical to the branch
    rules except that diamond-star drops the positive body: keeping it
    deadlocks a star directly under a star (the regenerated eventuality
    contradicts it), and the plain two-way fixpoint covering is sound."""
    if (isinstance(g, Not) and isinstance(g.sub, Box)
            and isinstance(g.sub.program, Star)):
        prog, body = g.sub.program, g.sub.sub
        return Rule.RDiaStar, [[Not(body)], [Not(Box(prog.sub, g.sub))]]
    return decompose(g)


class _SignatureGraph:
    """Expansion cache for the full procedure. States are signatures; each is
    saturated and expanded at most once, revisits count as loop hits."""

    def __init__(self, trace: Optional[ProofTrace], rng, stats: SolverStats):
        self.trace = trace
        self.rng = rng
        self.stats = stats
        self.order: list = []
        self.ids: dict = {}
        self.nodes: dict = {}
        self.pending: deque = deque()

    def _register(self, state: frozenset) -> None:
        if state in self.ids:
            self.stats.signature_hits += 1
            return
        self.ids[state] = len(self.order)
        self.order.append(state)
        self.pending.append(state)

    def _iter_formulas(self, fs):
        out = sorted(fs, key=render)
        if self.rng is not None:
            self.rng.shuffle(out)
        return out

    def saturate(self, seed: frozenset, ctx: str) -> list:
        """All consistent, locally saturated supersets of the seed, with the
        star rules in play. Each result is registered for expansion."""
        results: list = []
        seen = set()
        visited = set()

        def go(fs: frozenset, consumed: frozenset) -> None:
            key = (fs, consumed & fs)
            if key in visited:
                return
            visited.add(key)
            cur = set(fs)
            cons = set(consumed)
            while True:
                hit = None
                for g in self._iter_formulas(cur):
                    if g in cons:
                        continue
                    d = _graph_decompose(g)
                    if d is not None and len(d[1]) == 1:
                        hit = (g, d)
                        break
                if hit is None:
                    break
                g, (rule, children) = hit
                cur.update(children[0])
                cons.add(g)
                if self.trace is not None:
                    self.trace.record(rule, ctx, g, 1)
                if _set_inconsistent(cur):
                    return
            if _set_inconsistent(cur):
                return
            branching = None
            for g in self._iter_formulas(cur):
                if g in cons:
                    continue
                d = _graph_decompose(g)
                if d is not None and len(d[1]) == 2:
                    branching = (g, d)
                    break
            if branching is None:
                state = frozenset(cur)
                if state not in seen:
                    seen.add(state)
                    results.append(state)
                self._register(state)
                return
            g, (rule, children) = branching
            if self.trace is not None:
                self.trace.record(rule, ctx, g, len(children))
            for child in children:
                go(frozenset(cur | set(child)), frozenset(cons | {g}))

        go(seed, frozenset())
        return results

    def _heads(self, state: frozenset) -> list:
        heads = set()
        for g in state:
            step = atomic_step(g)
            if step is not None:
                heads.add(step[0])
        return sorted(heads, key=render_assignment)

    def _arrival(self, state: frozenset, head: Assignment) -> frozenset:
        out = set()
        for atom, sign in head.pairs:
            out.add(Prop(atom) if sign else Not(Prop(atom)))
        for g in state:
            step = atomic_step(g)
            if step is not None and step[0] == head:
                out.add(step[1])
            elif is_literal(g):
                atom = g.name if isinstance(g, Prop) else g.sub.name
                if atom not in head:
                    out.add(g)
        return frozenset(out)

    def expand_all(self) -> None:
        while self.pending:
            state = self.pending.popleft()
            succ = {}
            for head in self._heads(state):
                ctx = f"s{self.ids[state]}.{render_assignment(head)}"
                succ[head] = self.saturate(self._arrival(state, head), ctx)
            self.nodes[state] = succ

    def _ful_step(self, s: frozenset, g: Formula, ful: set, alive: dict) -> bool:
        if not (isinstance(g, Not) and isinstance(g.sub, Box)):
            # Reached the eventuality's target: membership is fulfillment.
            return True
        prog, body = g.sub.program, g.sub.sub
        if isinstance(prog, Star):
            # The target itself may be a diamond obligation (nested stars),
            # so bare membership is not enough: its own chain must close.
            target = Not(body)
            if target in s and (s, target) in ful:
                return True
            inner = Not(Box(prog.sub, g.sub))
            return inner in s and (s, inner) in ful
        if isinstance(prog, Seq):
            inner = Not(Box(prog.left, Box(prog.right, body)))
            return inner in s and (s, inner) in ful
        if isinstance(prog, Choice):
            for part in (prog.left, prog.right):
                inner = Not(Box(part, body))
                if inner in s and (s, inner) in ful:
                    return True
            return False
        if isinstance(prog, Test):
            inner = Not(body)
            return inner in s and (s, inner) in ful
        # atomic head: the obligation continues at an alive alternative
        alts = self.nodes[s].get(prog.assignment, ())
        return any(alive[t] and (t, Not(body)) in ful for t in alts)

    def _fulfillment(self, alive: dict) -> set:
        ful: set = set()
        changed = True
        while changed:
            changed = False
            for s in self.order:
                if not alive[s]:
                    continue
                for g in s:
                    if (s, g) not in ful and self._ful_step(s, g, ful, alive):
                        ful.add((s, g))
                        changed = True
        return ful

    def prune(self) -> tuple:
        """Kill states with an unrealizable successor obligation or an
        unfulfillable eventuality, to a fixpoint."""
        alive = {s: True for s in self.order}
        ful: set = set()
        while True:
            ful = self._fulfillment(alive)
            killed = False
            for s in self.order:
                if not alive[s]:
                    continue
                dead = any(not any(alive[t] for t in alts)
                           for alts in self.nodes[s].values())
                if not dead:
                    dead = any(_is_eventuality(g) and (s, g) not in ful
                               for g in s)
                if dead:
                    alive[s] = False
                    killed = True
            if not killed:
                return alive, ful


def mc_full(v: Valuation, f: Formula, *, want_trace: bool = False,
            rng=None, stats: Optional[SolverStats] = None) -> Verdict:
    """Model check any formula against v, iteration included."""
    if stats is None:
        stats = SolverStats()
    trace = ProofTrace() if want_trace else None
    graph = _SignatureGraph(trace, rng, stats)

    seed = {lf.formula for lf in initial_branch(v, f).members}
    root_alts = graph.saturate(frozenset(seed), "root")
    graph.expand_all()
    alive, ful = graph.prune()
    answer = any(alive[s] for s in root_alts)
    stats.signature_cache_size = len(graph.order)

    if trace is not None:
        for s in graph.order:
            sid = graph.ids[s]
            status = "OPEN" if alive[s] else "CLOSED"
            trace.notes.append(f"state s{sid}: {status}")
            for g in sorted(s, key=render):
                if not _is_eventuality(g):
                    continue
                if (s, g) in ful:
                    target = Not(g.sub.sub)
                    how = ("zero iterations"
                           if target in s and (s, target) in ful
                           else "via successors")
                    trace.notes.append(
                        f"  eventuality {render(g)}: fulfilled ({how})")
                else:
                    trace.notes.append(
                        f"  eventuality {render(g)}: unfulfilled")
        open_root = next((s for s in root_alts if alive[s]), None)
        if open_root is not None:
            trace.final_branch_dump = "\n".join(
                f"() | {render(g)} |" for g in sorted(open_root, key=render))
        trace.result_open = answer
    return Verdict(answer, trace, stats)


def model_check(v: Valuation, f: Formula, algorithm: str = "auto", *,
                want_trace: bool = False, rng=None,
                stats: Optional[SolverStats] = None) -> Verdict:
    if algorithm == "star-free":
        return mc_star_free(v, f, want_trace=want_trace, rng=rng, stats=stats)
    if algorithm == "full":
        return mc_full(v, f, want_trace=want_trace, rng=rng, stats=stats)
    if algorithm == "auto":
        runner = mc_star_free if is_star_free(f) else mc_full
        return runner(v, f, want_trace=want_trace, rng=rng, stats=stats)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def sat(f: Formula, algorithm: str = "auto", *, want_trace: bool = False,
        rng=None, stats: Optional[SolverStats] = None) -> Verdict:
    """Satisfiability through the master-program reduction. The reduction is
    star-free by itself, so the dispatch fragment is decided by f."""
    inst = sat_to_mc(f)
    return model_check(inst.model, inst.formula, algorithm,
                       want_trace=want_trace, rng=rng, stats=stats)


def valid(f: Formula, algorithm: str = "auto", *, want_trace: bool = False,
          rng=None, stats: Optional[SolverStats] = None) -> Verdict:
    """Validity as unsatisfiability of the negation. The attached trace and
    stats are those of the underlying satisfiability run."""
    inner = sat(Not(f), algorithm, want_trace=want_trace, rng=rng, stats=stats)
    return Verdict(not inner.answer, inner.trace, inner.stats)


def replay(v: Valuation, f: Formula, trace: ProofTrace,
           algorithm: str = "auto") -> Verdict:
    """Re-run the deterministic procedure and check it reproduces the
    recorded steps; every witness is re-validated by the run itself."""
    rerun = model_check(v, f, algorithm, want_trace=True)
    if rerun.trace.step_keys() != trace.step_keys():
        raise ReplayMismatchError("recorded steps diverge from the replay")
    if trace.result_open is not None and rerun.answer != trace.result_open:
        raise ReplayMismatchError("recorded result diverges from the replay")
    return rerun
