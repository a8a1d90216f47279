"""Brute-force semantics: updates, the formula/program interpretation, and
the enumeration oracles everything else is verified against.

The seven box validity schemata near the end are the load-bearing part: they
pin the interpreter to the algebra of assignments (a box over an atomic
program is substitution, a test is implication, sequence is nesting, choice
is conjunction, iteration is its own fixpoint).
"""

import random

import pytest

from dlpa.fuzzing import (
    random_deterministic_program,
    random_formula,
    random_program,
    random_valuation,
)
from dlpa.semantics import (
    EnumerationCapError,
    all_valuations,
    apply_trace,
    evaluate,
    format_valuation,
    oracle_sat,
    oracle_valid,
    parse_valuation,
    program_relation,
    update,
)
from dlpa.syntax import (
    And,
    Assignment,
    Atomic,
    Box,
    Choice,
    Not,
    Prop,
    Star,
    TOP,
    Test as ProgramTest,
    diamond,
    implies,
    parse_formula,
    parse_program,
    vocabulary,
)

SET_P = Assignment({"p": True})
CLR_P = Assignment({"p": False})
ATOMS = ("p", "q", "r", "s")


def V(*atoms):
    return frozenset(atoms)


# ---------------------------------------------------------------- updates

def test_update_adds_atom():
    assert update(V("q"), SET_P) == V("p", "q")


def test_update_removes_atom():
    assert update(V("p"), CLR_P) == V()


def test_update_overwrites_domain_only():
    assert update(V("p", "q"), Assignment({"p": True, "q": False})) == V("p")


def test_update_frame():
    rng = random.Random(0)
    for _ in range(500):
        v = random_valuation(rng, ATOMS)
        a = Assignment({x: rng.random() < 0.5
                        for x in rng.sample(ATOMS, rng.randint(1, 3))})
        w = update(v, a)
        for q in ATOMS:
            if q not in a:
                assert (q in w) == (q in v)


def test_apply_trace_empty():
    assert apply_trace(V(), ()) == V()


def test_apply_trace_order_matters():
    assert apply_trace(V(), (SET_P, CLR_P)) == V()
    assert apply_trace(V(), (CLR_P, SET_P)) == V("p")


def test_apply_trace_keeps_untouched():
    assert apply_trace(V("q"), (SET_P,)) == V("p", "q")


# ------------------------------------------------------------- evaluation

def test_evaluate_flip_p_does_not_force_q():
    assert evaluate(V("p", "q"), parse_formula("~[+p u -p] q")) is False


def test_evaluate_test_guards_assignment():
    assert evaluate(V(), parse_formula("[~p ? ; +p] p")) is True


def test_evaluate_star_choice_reaches_q_free_model():
    assert evaluate(V("p", "q"), parse_formula("~[(+p u -p)*] q")) is False


def test_evaluate_depends_only_on_vocabulary():
    rng = random.Random(1)
    for _ in range(300):
        f = random_formula(rng, rng.randint(1, 15), ATOMS, starred=True)
        v = random_valuation(rng, ATOMS) | {"zz"}
        assert evaluate(v, f) == evaluate(v & vocabulary(f), f)


# --------------------------------------------------------------- programs

def test_program_relation_assignment_is_total_function():
    rel = program_relation(parse_program("+p"), {"p"})
    assert rel.pairs == frozenset({(V(), V("p")), (V("p"), V("p"))})


def test_program_relation_test_is_partial_identity():
    rel = program_relation(parse_program("p?"), {"p"})
    assert rel.pairs == frozenset({(V("p"), V("p"))})


def test_program_relation_star_reaches_everything():
    rel = program_relation(parse_program("(+p u -p)*"), {"p"})
    assert rel.pairs == frozenset(
        {(a, b) for a in (V(), V("p")) for b in (V(), V("p"))})


def test_program_relation_star_includes_zero_iterations():
    rel = program_relation(parse_program("(+p)*"), {"p", "q"})
    assert (V("q"), V("q")) in rel.pairs


def test_atomic_programs_are_deterministic():
    rng = random.Random(2)
    for _ in range(100):
        a = Assignment({x: rng.random() < 0.5
                        for x in rng.sample(ATOMS, rng.randint(1, 3))})
        rel = program_relation(Atomic(a), ATOMS)
        sources = [v for v, _ in rel.pairs]
        assert len(sources) == len(set(sources)) == 2 ** len(ATOMS)


# ----------------------------------------------------------------- oracles

def test_oracle_valid_assignment_truth():
    assert oracle_valid(parse_formula("[+p] p")) is True
    assert oracle_valid(parse_formula("[-p] ~p")) is True


def test_oracle_valid_box_top():
    rng = random.Random(3)
    for _ in range(50):
        pi = random_program(rng, rng.randint(1, 10), ATOMS)
        assert oracle_valid(Box(pi, TOP)) is True


def test_oracle_valid_fails_at_empty_model():
    assert oracle_valid(Prop("p")) is False


def test_oracle_sat_contradiction():
    assert oracle_sat(parse_formula("p & ~p")) is False


def test_oracle_sat_negated_validity():
    assert oracle_sat(parse_formula("~[+p] p")) is False


def test_oracle_sat_diamond():
    assert oracle_sat(parse_formula("<+p> p")) is True


def test_oracle_cap_guards_enumeration():
    f = parse_formula("~(" + " & ".join(f"a{i}" for i in range(25)) + ")")
    with pytest.raises(EnumerationCapError):
        oracle_sat(f)
    # satisfied at the empty valuation, so a raised cap answers immediately
    assert oracle_sat(f, cap=25) is True


def test_all_valuations_counts():
    assert len(list(all_valuations({"p", "q"}))) == 4
    assert list(all_valuations(set())) == [frozenset()]


# --------------------------------------------------------------- text form

def test_parse_valuation_forms():
    assert parse_valuation("") == V()
    assert parse_valuation("{}") == V()
    assert parse_valuation("p, q") == V("p", "q")
    with pytest.raises(ValueError):
        parse_valuation("p,,q")


def test_format_valuation_round_trip():
    assert format_valuation(V()) == "{}"
    assert parse_valuation(format_valuation(V("q", "p"))) == V("p", "q")


# -------------------------------------------------- box validity schemata
#
# Each schema is checked on at least 200 random substitution instances.
# Schema 3 ([pi]~phi <-> ~[pi]phi) only holds because program relations are
# total functions on valuations; a nondeterministic program breaks it
# (V = {}, pi = +p u -p, phi = p: both [pi]p and [pi]~p are false), so its
# instances draw from the deterministic fragment: assignments and sequences.

def _schema_cases(rng, n=200, deterministic=False):
    for _ in range(n):
        v = random_valuation(rng, ATOMS)
        phi = random_formula(rng, rng.randint(1, 8), ATOMS)
        if deterministic:
            pi = random_deterministic_program(rng, rng.randint(1, 8), ATOMS)
        else:
            pi = random_program(rng, rng.randint(1, 8), ATOMS)
        yield v, phi, pi


def test_schema_atomic_box_is_substitution():
    rng = random.Random(10)
    for _ in range(200):
        v = random_valuation(rng, ATOMS)
        p = rng.choice(ATOMS)
        a = Assignment({x: rng.random() < 0.5
                        for x in rng.sample(ATOMS, rng.randint(1, 3))})
        lhs = evaluate(v, Box(Atomic(a), Prop(p)))
        if p in a:
            rhs = a.value(p)
        else:
            rhs = p in v
        assert lhs == rhs


def test_schema_test_box_is_implication():
    rng = random.Random(11)
    for v, phi, _ in _schema_cases(rng):
        psi = random_formula(rng, rng.randint(1, 8), ATOMS)
        assert evaluate(v, Box(ProgramTest(psi), phi)) == evaluate(v, implies(psi, phi))


def test_schema_box_commutes_with_negation_for_deterministic_programs():
    rng = random.Random(12)
    for v, phi, pi in _schema_cases(rng, deterministic=True):
        assert evaluate(v, Box(pi, Not(phi))) == evaluate(v, Not(Box(pi, phi)))


def test_schema_nondeterminism_breaks_negation_commutation():
    pi = parse_program("+p u -p")
    assert evaluate(V(), Box(pi, Not(Prop("p")))) is False
    assert evaluate(V(), Not(Box(pi, Prop("p")))) is True


def test_schema_box_distributes_over_conjunction():
    rng = random.Random(13)
    for v, phi, pi in _schema_cases(rng):
        psi = random_formula(rng, rng.randint(1, 8), ATOMS)
        assert (evaluate(v, Box(pi, And(phi, psi)))
                == evaluate(v, And(Box(pi, phi), Box(pi, psi))))


def test_schema_sequence_is_nested_boxes():
    rng = random.Random(14)
    for v, phi, pi in _schema_cases(rng):
        pi2 = random_program(rng, rng.randint(1, 8), ATOMS)
        from dlpa.syntax import Seq
        assert (evaluate(v, Box(Seq(pi, pi2), phi))
                == evaluate(v, Box(pi, Box(pi2, phi))))


def test_schema_choice_is_conjunction_of_boxes():
    rng = random.Random(15)
    for v, phi, pi in _schema_cases(rng):
        pi2 = random_program(rng, rng.randint(1, 8), ATOMS)
        assert (evaluate(v, Box(Choice(pi, pi2), phi))
                == evaluate(v, And(Box(pi, phi), Box(pi2, phi))))


def test_schema_star_unfolds_once():
    rng = random.Random(16)
    for v, phi, pi in _schema_cases(rng):
        star = Box(Star(pi), phi)
        assert evaluate(v, star) == evaluate(v, And(phi, Box(pi, star)))


def test_diamond_dualizes_box():
    rng = random.Random(17)
    for v, phi, pi in _schema_cases(rng, n=100):
        assert (evaluate(v, diamond(pi, phi))
                == (not evaluate(v, Box(pi, Not(phi)))))
