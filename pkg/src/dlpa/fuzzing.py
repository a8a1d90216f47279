"""Seeded random instance generation and the three-way agreement harness.

Generators are budget-driven: the produced object's length never exceeds the
budget, which keeps the brute-force oracle fast. Star nodes are weighted low
(probability 0.15 when eligible) and star nesting is capped at 2. Case i of a
run seeded with s uses seed s + i, so a reported case seed rerun with one
case regenerates the same instance.
"""

from __future__ import annotations

import random
from typing import Callable, Optional

from .semantics import Valuation, evaluate, format_valuation
from .solver import mc_full, mc_star_free
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
    is_star_free,
    render,
)

# p0 is reserved for the top/bot encoding and never generated.
ATOM_POOL = ("p", "q", "r", "s")
STAR_WEIGHT = 0.15
MAX_STAR_NESTING = 2


def random_assignment(rng: random.Random, atoms, budget: int) -> Assignment:
    width = rng.randint(1, max(1, min(2, len(atoms), budget)))
    chosen = rng.sample(list(atoms), width)
    return Assignment({a: rng.random() < 0.5 for a in chosen})


def random_program(rng: random.Random, budget: int, atoms, *,
                   starred: bool = False, star_depth: int = 0) -> Program:
    if starred and star_depth < MAX_STAR_NESTING and budget >= 2 \
            and rng.random() < STAR_WEIGHT:
        return Star(random_program(rng, budget - 1, atoms, starred=starred,
                                   star_depth=star_depth + 1))
    kinds = ["atom", "atom"]
    if budget >= 2:
        kinds.append("test")
    if budget >= 3:
        kinds.extend(["seq", "choice"])
    kind = rng.choice(kinds)
    if kind == "atom":
        return Atomic(random_assignment(rng, atoms, budget))
    if kind == "test":
        return Test(random_formula(rng, budget - 1, atoms, starred=starred,
                                   star_depth=star_depth))
    left_budget = rng.randint(1, budget - 2)
    left = random_program(rng, left_budget, atoms, starred=starred,
                          star_depth=star_depth)
    right = random_program(rng, budget - 1 - left_budget, atoms,
                           starred=starred, star_depth=star_depth)
    return Seq(left, right) if kind == "seq" else Choice(left, right)


def random_formula(rng: random.Random, budget: int, atoms, *,
                   starred: bool = False, star_depth: int = 0) -> Formula:
    if budget <= 1:
        return Prop(rng.choice(list(atoms)))
    kinds = ["prop", "not", "not"]
    if budget >= 3:
        kinds.extend(["and", "and", "box", "box", "box"])
    kind = rng.choice(kinds)
    if kind == "prop":
        return Prop(rng.choice(list(atoms)))
    if kind == "not":
        return Not(random_formula(rng, budget - 1, atoms, starred=starred,
                                  star_depth=star_depth))
    if kind == "and":
        left_budget = rng.randint(1, budget - 2)
        return And(random_formula(rng, left_budget, atoms, starred=starred,
                                  star_depth=star_depth),
                   random_formula(rng, budget - 1 - left_budget, atoms,
                                  starred=starred, star_depth=star_depth))
    prog_budget = rng.randint(1, budget - 2)
    prog = random_program(rng, prog_budget, atoms, starred=starred,
                          star_depth=star_depth)
    body = random_formula(rng, budget - 1 - prog_budget, atoms,
                          starred=starred, star_depth=star_depth)
    return Box(prog, body)


def random_deterministic_program(rng: random.Random, budget: int,
                                 atoms) -> Program:
    """Assignments and sequences only: programs whose relation is a
    function, the fragment where box and diamond coincide."""
    if budget >= 3 and rng.random() < 0.5:
        left_budget = rng.randint(1, budget - 2)
        return Seq(random_deterministic_program(rng, left_budget, atoms),
                   random_deterministic_program(rng, budget - 1 - left_budget,
                                                atoms))
    return Atomic(random_assignment(rng, atoms, budget))


def random_valuation(rng: random.Random, atoms) -> Valuation:
    return frozenset(a for a in atoms if rng.random() < 0.5)


def random_instance(rng: random.Random, *, max_atoms: int = 3,
                    max_len: int = 20, starred: bool = False):
    atoms = ATOM_POOL[:max_atoms]
    f = random_formula(rng, rng.randint(2, max_len), atoms, starred=starred)
    return random_valuation(rng, atoms), f


def _default_star_free(v: Valuation, f: Formula) -> bool:
    return mc_star_free(v, f).answer


def _default_full(v: Valuation, f: Formula) -> bool:
    return mc_full(v, f).answer


def fuzz_run(seed: int, cases: int, *, max_atoms: int = 3, max_len: int = 20,
             starred: bool = False,
             star_free_fn: Optional[Callable] = None,
             full_fn: Optional[Callable] = None,
             oracle_fn: Optional[Callable] = None):
    """Generate cases and compare the oracle against both procedures.

    Returns (agree, report_lines). The first line is `ALL AGREE` or a
    `DIVERGENCE` line carrying the case seed needed to regenerate the
    failing instance. The solver hooks exist so a deliberately broken
    solver can be injected to prove the harness catches divergence.
    """
    if star_free_fn is None:
        star_free_fn = _default_star_free
    if full_fn is None:
        full_fn = _default_full
    if oracle_fn is None:
        oracle_fn = evaluate

    for i in range(cases):
        case_seed = seed + i
        rng = random.Random(case_seed)
        v, f = random_instance(rng, max_atoms=max_atoms, max_len=max_len,
                               starred=starred)
        expected = bool(oracle_fn(v, f))
        got = {"mc_full": bool(full_fn(v, f))}
        if is_star_free(f):
            got["mc_star_free"] = bool(star_free_fn(v, f))
        bad = {name: r for name, r in got.items() if r != expected}
        if bad:
            lines = [f"DIVERGENCE case={i} seed={case_seed}",
                     f"model: {format_valuation(v)}",
                     f"formula: {render(f)}",
                     f"oracle: {expected}"]
            lines.extend(f"{name}: {r}" for name, r in sorted(got.items()))
            lines.append(f"replay: fuzz --seed {case_seed} --cases 1"
                         f" --max-atoms {max_atoms} --max-len {max_len}"
                         + (" --starred" if starred else ""))
            return False, lines
    return True, ["ALL AGREE", f"cases={cases} seed={seed}"]
