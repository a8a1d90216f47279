"""Decision procedures: the star-free explorer, the signature-graph checker,
trace replay, and the instrumentation both report.

The three pinned instances exercise one closed choice tableau, one open
guarded assignment, and one iteration that loops on a repeated signature.
"""

import random

import pytest

from dlpa.fuzzing import random_instance
from dlpa.semantics import evaluate
from dlpa.solver import (
    ProofTrace,
    ReplayMismatchError,
    SolverStats,
    StarInputError,
    Verdict,
    label_signature,
    mc_full,
    mc_star_free,
    model_check,
    replay,
    sat,
    valid,
)
from dlpa.syntax import len_formula, parse_formula

P_AND_Q = frozenset({"p", "q"})


# --------------------------------------------------------- pinned instances

def test_choice_counterexample_closes():
    f = parse_formula("~[+p u -p] q")
    verdict = mc_star_free(P_AND_Q, f, want_trace=True)
    assert verdict.answer is False
    assert verdict.trace.rule_names() == [
        "RDiaChoice", "RDiaAtom", "RP1", "RDiaAtom", "RP1"]
    assert verdict.trace.serialize().endswith("RESULT: closed")


def test_guarded_assignment_opens():
    f = parse_formula("[~p ? ; +p] p")
    verdict = mc_star_free(frozenset(), f, want_trace=True)
    assert verdict.answer is True
    assert verdict.trace.rule_names() == ["RBoxSeq", "RBoxTest", "RBoxAtom"]
    assert verdict.trace.serialize().endswith("RESULT: open")


def test_iterated_choice_hits_a_repeated_signature():
    f = parse_formula("~[(+p u -p)*] q")
    verdict = mc_full(P_AND_Q, f, want_trace=True)
    assert verdict.answer is False
    assert verdict.stats.signature_hits >= 1
    assert verdict.trace.serialize().endswith("RESULT: closed")


def test_double_star_under_negated_conjunction():
    f = parse_formula("~[(+p u -r)**] ~(~~q & q)")
    assert mc_full(frozenset({"r"}), f).answer is False


def test_double_star_diamond_opens():
    f = parse_formula("<(+q)**> q")
    assert mc_full(frozenset(), f).answer is True


# ------------------------------------------------------------ trace format

def test_serialize_step_lines():
    f = parse_formula("~[+p u -p] q")
    verdict = mc_star_free(P_AND_Q, f, want_trace=True)
    lines = verdict.trace.serialize().splitlines()
    assert lines[0] == "1: RDiaChoice @ () : ~[(+p u -p)] q -> 2"
    assert lines[1] == "2: RDiaAtom @ () : ~[+p] q -> 1"
    assert lines[2] == "3: RP1 @ () : q -> 1"
    assert lines[-1] == "RESULT: closed"


def test_serialize_appends_final_branch_dump():
    f = parse_formula("[~p ? ; +p] p")
    verdict = mc_star_free(frozenset(), f, want_trace=True)
    lines = verdict.trace.serialize().splitlines()
    marker = lines.index("final branch:")
    dump = lines[marker + 1:-1]
    assert dump
    assert all(line.startswith("  ") for line in dump)
    assert any("| RBoxSeq" in line for line in dump)


def test_full_trace_reports_eventuality_status():
    f = parse_formula("~[(+p u -p)*] q")
    verdict = mc_full(P_AND_Q, f, want_trace=True)
    text = verdict.trace.serialize()
    assert "state s0:" in text
    assert "eventuality" in text
    assert "unfulfilled" in text


def test_no_trace_unless_requested():
    verdict = mc_star_free(P_AND_Q, parse_formula("p"))
    assert verdict.trace is None
    assert isinstance(verdict.stats, SolverStats)


# --------------------------------------------------------------- dispatch

def test_star_free_procedure_rejects_iteration():
    with pytest.raises(StarInputError):
        mc_star_free(frozenset(), parse_formula("[(+p)*] q"))
    with pytest.raises(StarInputError):
        model_check(frozenset(), parse_formula("[(+p)*] q"),
                    algorithm="star-free")


def test_auto_dispatch_by_fragment():
    starred = parse_formula("<(+p)*> p")
    flat = parse_formula("[+p] p")
    assert model_check(frozenset(), starred, algorithm="auto").answer is True
    assert model_check(frozenset(), flat, algorithm="auto").answer is True
    assert model_check(frozenset(), flat, algorithm="full").answer is True


def test_unknown_algorithm_rejected():
    with pytest.raises(ValueError):
        model_check(frozenset(), parse_formula("p"), algorithm="fast")


# -------------------------------------------------------------- sat, valid

def test_sat_and_valid_basics():
    assert sat(parse_formula("p")).answer is True
    assert sat(parse_formula("p & ~p")).answer is False
    assert valid(parse_formula("[+p] p")).answer is True
    assert valid(parse_formula("p")).answer is False
    assert bool(sat(parse_formula("p"))) is True
    assert bool(Verdict(False)) is False


def test_valid_keeps_underlying_trace():
    verdict = valid(parse_formula("[+p] p"), want_trace=True)
    assert verdict.answer is True
    # the run decided unsatisfiability of the negation, hence closed
    assert verdict.trace.serialize().endswith("RESULT: closed")


def test_sat_agrees_with_evaluation_of_reduction():
    rng = random.Random(41)
    for _ in range(150):
        v, f = random_instance(rng, max_atoms=3, max_len=12, starred=False)
        assert sat(f).answer or not evaluate(v, f)


# ------------------------------------------------------- agreement, replay

def test_procedures_agree_star_free():
    rng = random.Random(42)
    for _ in range(300):
        v, f = random_instance(rng, max_atoms=3, max_len=14, starred=False)
        expected = evaluate(v, f)
        assert mc_star_free(v, f).answer == expected
        assert mc_full(v, f).answer == expected


def test_procedures_agree_starred():
    rng = random.Random(43)
    for _ in range(200):
        v, f = random_instance(rng, max_atoms=3, max_len=12, starred=True)
        assert mc_full(v, f).answer == evaluate(v, f)


def test_deterministic_runs_repeat_exactly():
    rng = random.Random(44)
    for _ in range(50):
        v, f = random_instance(rng, max_atoms=3, max_len=12, starred=False)
        a = mc_star_free(v, f, want_trace=True)
        b = mc_star_free(v, f, want_trace=True)
        assert a.answer == b.answer
        assert a.trace.step_keys() == b.trace.step_keys()


def test_witness_shuffling_never_changes_verdicts():
    rng = random.Random(45)
    for i in range(100):
        starred = i % 2 == 0
        v, f = random_instance(rng, max_atoms=3, max_len=12, starred=starred)
        base = model_check(v, f).answer
        for k in range(3):
            shuffled = model_check(v, f, rng=random.Random(1000 * i + k))
            assert shuffled.answer == base


def test_replay_accepts_recorded_trace():
    f = parse_formula("~[+p u -p] q")
    verdict = model_check(P_AND_Q, f, want_trace=True)
    rerun = replay(P_AND_Q, f, verdict.trace)
    assert rerun.answer == verdict.answer


def test_replay_rejects_tampered_steps():
    f = parse_formula("~[+p u -p] q")
    verdict = model_check(P_AND_Q, f, want_trace=True)
    clipped = ProofTrace(steps=verdict.trace.steps[:-1],
                         result_open=verdict.trace.result_open)
    with pytest.raises(ReplayMismatchError):
        replay(P_AND_Q, f, clipped)


def test_replay_rejects_flipped_result():
    f = parse_formula("~[+p u -p] q")
    verdict = model_check(P_AND_Q, f, want_trace=True)
    flipped = ProofTrace(steps=verdict.trace.steps, result_open=True)
    with pytest.raises(ReplayMismatchError):
        replay(P_AND_Q, f, flipped)


# ---------------------------------------------------------- instrumentation

def test_label_signature_is_order_free():
    fs = [parse_formula("p"), parse_formula("~q")]
    assert label_signature(fs) == label_signature(reversed(fs))
    assert label_signature(fs) != label_signature(fs[:1])


def test_star_free_instrumentation_bounds():
    """Single-label successor entries, linear formula count per call, and
    successor depth bounded by formula length."""
    rng = random.Random(46)
    for _ in range(200):
        v, f = random_instance(rng, max_atoms=3, max_len=16, starred=False)
        n = len_formula(f)
        verdict = mc_star_free(v, f)
        s = verdict.stats
        assert s.calls >= 1
        assert s.max_labels_per_successor_entry <= 1
        assert s.max_formulas_per_call <= 2 * n
        assert s.max_successor_depth <= n


def test_full_instrumentation_bounds():
    rng = random.Random(47)
    for _ in range(150):
        v, f = random_instance(rng, max_atoms=3, max_len=12, starred=True)
        n = len_formula(f)
        verdict = mc_full(v, f)
        assert verdict.stats.signature_cache_size <= 2 ** (2 * n)


def test_caller_supplied_stats_accumulate():
    stats = SolverStats()
    mc_star_free(P_AND_Q, parse_formula("~[+p u -p] q"), stats=stats)
    first = stats.calls
    mc_star_free(P_AND_Q, parse_formula("~[+p u -p] q"), stats=stats)
    assert stats.calls == 2 * first
