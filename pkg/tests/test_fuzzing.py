"""Instance generators and the agreement harness.

Generator guarantees checked here: budgets bound lengths, star nesting stays
capped, the reserved atom never appears, and a case seed regenerates its
instance exactly. The harness checks prove a broken solver gets reported
with a replayable seed.
"""

import random

from dlpa.fuzzing import (
    ATOM_POOL,
    MAX_STAR_NESTING,
    fuzz_run,
    random_assignment,
    random_deterministic_program,
    random_formula,
    random_instance,
    random_program,
    random_valuation,
)
from dlpa.semantics import evaluate, format_valuation
from dlpa.syntax import (
    And,
    Atomic,
    Box,
    Choice,
    Not,
    Prop,
    Seq,
    Star,
    Test as ProgramTest,
    is_star_free,
    len_formula,
    len_program,
    render,
    vocabulary,
)

ATOMS = ("p", "q", "r")


def star_nesting(node) -> int:
    """Deepest chain of star nodes above any point, tests included."""
    if isinstance(node, Prop) or isinstance(node, Atomic):
        return 0
    if isinstance(node, Not):
        return star_nesting(node.sub)
    if isinstance(node, And):
        return max(star_nesting(node.left), star_nesting(node.right))
    if isinstance(node, Box):
        return max(star_nesting(node.program), star_nesting(node.sub))
    if isinstance(node, (Seq, Choice)):
        return max(star_nesting(node.left), star_nesting(node.right))
    if isinstance(node, Star):
        return 1 + star_nesting(node.sub)
    if isinstance(node, ProgramTest):
        return star_nesting(node.formula)
    raise TypeError(node)


def test_formula_budget_bounds_length():
    rng = random.Random(51)
    for _ in range(400):
        budget = rng.randint(1, 25)
        f = random_formula(rng, budget, ATOMS, starred=True)
        assert len_formula(f) <= budget


def test_program_budget_bounds_length():
    rng = random.Random(52)
    for _ in range(400):
        budget = rng.randint(1, 20)
        p = random_program(rng, budget, ATOMS, starred=True)
        assert len_program(p) <= budget


def test_star_nesting_capped():
    rng = random.Random(53)
    seen_star = False
    for _ in range(500):
        f = random_formula(rng, rng.randint(2, 25), ATOMS, starred=True)
        depth = star_nesting(f)
        assert depth <= MAX_STAR_NESTING
        seen_star = seen_star or depth > 0
    assert seen_star


def test_unstarred_formulas_are_star_free():
    rng = random.Random(54)
    for _ in range(300):
        f = random_formula(rng, rng.randint(2, 20), ATOMS, starred=False)
        assert is_star_free(f)


def test_reserved_atom_never_generated():
    rng = random.Random(55)
    for _ in range(300):
        _, f = random_instance(rng, max_atoms=4, max_len=20, starred=True)
        assert "p0" not in vocabulary(f)


def test_assignment_width_and_domain():
    rng = random.Random(56)
    for _ in range(300):
        a = random_assignment(rng, ATOMS, rng.randint(1, 10))
        assert 1 <= len(a) <= 2
        assert set(a.domain) <= set(ATOMS)


def test_deterministic_programs_avoid_branching_shapes():
    rng = random.Random(57)
    def only_seq_atoms(p):
        if isinstance(p, Atomic):
            return True
        return isinstance(p, Seq) and only_seq_atoms(p.left) \
            and only_seq_atoms(p.right)
    for _ in range(200):
        assert only_seq_atoms(
            random_deterministic_program(rng, rng.randint(1, 12), ATOMS))


def test_same_seed_same_instance():
    for seed in range(20):
        v1, f1 = random_instance(random.Random(seed), max_len=18, starred=True)
        v2, f2 = random_instance(random.Random(seed), max_len=18, starred=True)
        assert v1 == v2
        assert render(f1) == render(f2)


def test_valuation_stays_inside_pool():
    rng = random.Random(58)
    for _ in range(100):
        assert random_valuation(rng, ATOMS) <= set(ATOMS)


# ----------------------------------------------------------------- harness

def test_fuzz_run_reports_agreement():
    agree, lines = fuzz_run(9, 60, max_len=14, starred=True)
    assert agree is True
    assert lines == ["ALL AGREE", "cases=60 seed=9"]


def test_fuzz_run_star_free_hook_sees_star_free_only():
    seen = []
    def spy(v, f):
        seen.append(f)
        from dlpa.solver import mc_star_free
        return mc_star_free(v, f).answer
    agree, _ = fuzz_run(10, 40, max_len=14, starred=True, star_free_fn=spy)
    assert agree is True
    assert seen
    assert all(is_star_free(f) for f in seen)


def test_fuzz_run_catches_broken_solver():
    agree, lines = fuzz_run(7, 30, max_len=12,
                            full_fn=lambda v, f: not evaluate(v, f))
    assert agree is False
    assert lines[0] == "DIVERGENCE case=0 seed=7"
    assert lines[3] in ("oracle: True", "oracle: False")
    assert any(line.startswith("replay: fuzz --seed 7 --cases 1")
               for line in lines)


def test_divergence_report_is_replayable():
    """The reported case seed regenerates the exact model and formula."""
    agree, lines = fuzz_run(21, 50, max_len=12,
                            full_fn=lambda v, f: False)
    assert agree is False
    case_seed = int(lines[0].split("seed=")[1])
    v, f = random_instance(random.Random(case_seed), max_atoms=3,
                           max_len=12, starred=False)
    assert lines[1] == f"model: {format_valuation(v)}"
    assert lines[2] == f"formula: {render(f)}"
    assert evaluate(v, f) is True
