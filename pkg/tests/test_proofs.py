import random

import pytest

from catded.core import Signature, typecheck
from catded.engine import Preset, TheoryConfig, congruence_close, term_universe
from catded.frontend import parse_arrow, parse_formula
from catded.proofs import (
    KINDS, ScriptError, bundled_scripts, bundled_text, check_script, mutants,
    parse_script, parse_scripts,
)
from catded.semantics import FiniteModel, eval_finite_model
import oracles

NAMES = [
    "4.1-ltr", "4.1-rtl", "4.2-ltr", "4.2-rtl", "4.3-ltr", "4.3-rtl",
    "5.1-ltr", "5.1-rtl", "w-naturality", "projections-equal", "diagonal-iso",
    "symmetry-projection",
]


@pytest.fixture(scope="module")
def scripts():
    return {s.name: s for s in bundled_scripts()}


def test_bundle_is_exactly_the_twelve(scripts):
    assert list(scripts) == NAMES


@pytest.mark.parametrize("name", NAMES)
def test_bundled_script_accepted(scripts, name):
    v = check_script(scripts[name])
    assert v.ok, v.message
    assert all(s.ok for s in v.steps)


def test_faithful_unit_script_has_four_steps(scripts):
    s = scripts["4.1-ltr"]
    assert len(s.steps) == 4
    assert s.goal.replace(" ", "") == "gamma[B].g1=gamma[B].g2=>g1=g2"


def test_full_faithful_script_ends_with_left_inverse(scripts):
    s = scripts["4.3-ltr"]
    last = s.steps[-1]
    assert (last.lhs, last.rhs) == ("h . gamma[B]", "1[B]")
    assert check_script(s).ok


def test_diagonal_script_uses_pair_and_fullness(scripts):
    s = scripts["5.1-ltr"]
    assert any(h.text == "D full" for h in s.hyps)
    assert any(st.just.startswith("witness D full") for st in s.steps)
    assert "(g, g2)" in s.steps[0].lhs
    assert s.goal == "g = g2"


def test_symmetry_script_first_line_defines_c(scripts):
    s = scripts["symmetry-projection"]
    assert s.steps[0].rhs == "p1{p,p} . pair(p2{p,p}, p1{p,p})"
    assert any(h.text == "cs = pair(p2{p,p}, p1{p,p})" for h in s.hyps)


def test_dropping_faithfulness_rejects(scripts):
    s = scripts["4.1-ltr"].without_hyp("hf")
    v = check_script(s)
    assert not v.ok and v.failed_step == 4


def test_triangle_replaced_by_naturality_rejected_at_that_step(scripts):
    s = scripts["4.2-rtl"]
    i = next(i for i, st in enumerate(s.steps) if st.just.startswith("triangle"))
    bad = s.with_step(i, s.steps[i].with_just("naturality phi from " + s.steps[i].just.split()[-1]))
    v = check_script(bad)
    assert not v.ok and v.failed_step == s.steps[i].num
    assert all(r.ok for r in v.steps[:-1])


def test_mutation_localized_everywhere(scripts):
    total = 0
    for s in scripts.values():
        for i, step in enumerate(s.steps):
            muts = mutants(s, i)
            assert len(muts) == len(KINDS) - 1
            for just in muts:
                v = check_script(s.with_step(i, step.with_just(just)))
                assert not v.ok, (s.name, step.num, just)
                assert v.failed_step == step.num, (s.name, step.num, just, v.failed_step)
                total += 1
    assert total > 700


def test_unknown_justification(scripts):
    s = scripts["4.1-ltr"]
    v = check_script(s.with_step(0, s.steps[0].with_just("magic 0")))
    assert not v.ok and v.failed_step == 1 and "UnknownJustification" in v.message


def test_type_mismatch_inside_step():
    text = """script: t
theory: adjunction
var: g : A -> B
goal: g = g
1. g = gamma[A] ; axiom diag-def
"""
    v = check_script(parse_script(text))
    assert not v.ok and v.failed_step == 1 and "TypeMismatch" in v.message


def test_last_line_must_be_goal():
    text = """script: t
theory: adjunction
var: g, g2 : A -> B
hyp: h1: g = g2
goal: g2 = g
1. g = g2 ; hyp h1
"""
    v = check_script(parse_script(text))
    assert not v.ok and v.failed_step is None and "goal" in v.message


def test_script_without_steps_rejected():
    with pytest.raises(ScriptError):
        parse_script("script: t\ntheory: adjunction\ngoal: 1[A] = 1[A]\n")


def test_parse_errors():
    with pytest.raises(ScriptError):
        parse_script("script: t\ntheory: adjunction\ngoal: 1[A] = 1[A]\nnonsense line\n")
    assert parse_scripts("") == []
    assert parse_scripts("# only a comment\n") == []


def test_text_round_trip(scripts):
    for s in scripts.values():
        again = parse_script(s.to_text())
        assert check_script(again).ok
        assert [(x.lhs, x.rhs, x.just) for x in again.steps] == [(x.lhs, x.rhs, x.just) for x in s.steps]


def test_bundled_text_is_packaged():
    assert "script: 4.1-ltr" in bundled_text()


# ------------------------------------------- cartesian scripts versus the engine

def _concrete(script):
    variables = {}
    gens = []
    for names, s, t in script.vars:
        src, tgt = parse_formula(s), parse_formula(t)
        for n in names:
            variables[n] = (src, tgt)
            gens.append((n, src, tgt))
    return variables, gens


def _side(text, variables):
    return parse_arrow(text, variables=variables)


def test_hypothesis_free_cartesian_lines_hold_in_random_models(scripts):
    s = scripts["w-naturality"]
    variables, gens = _concrete(s)
    r = random.Random(7)
    for _ in range(20):
        sizes = {"p": r.randint(1, 3), "q": r.randint(1, 3)}
        tables = {n: {x: r.choice(oracles.carrier(b, sizes)) for x in oracles.carrier(a, sizes)} for n, a, b in gens}
        m = FiniteModel({k: range(v) for k, v in sizes.items()}, tables)
        for st in s.steps:
            lhs, rhs = _side(st.lhs, variables), _side(st.rhs, variables)
            assert eval_finite_model(lhs, m) == eval_finite_model(rhs, m), (st.num, sizes)
            assert oracles.run(lhs, sizes, tables) == oracles.run(rhs, sizes, tables)


@pytest.mark.parametrize(
    "name,size_bound",
    [("w-naturality", 9), ("projections-equal", 5), ("diagonal-iso", 5), ("symmetry-projection", 5)],
)
def test_cartesian_goals_proved_by_closure(scripts, name, size_bound):
    s = scripts[name]
    variables, gens = _concrete(s)
    letters = {"p", "q"} if name == "w-naturality" else {"p"}
    sig = Signature.of(letters, gens)
    cfg = TheoryConfig(Preset.CARTESIAN, sig)
    for h in s.hyps:
        cfg = cfg.assume(_with_endpoints(h.text, variables))
    part = congruence_close(cfg, term_universe(cfg, size_bound, 1))
    lhs, rhs = (x.strip() for x in s.goal.split("=", 1))
    assert part.proves(_side(lhs, variables), _side(rhs, variables))


def _with_endpoints(text, variables):
    from catded.frontend import print_arrow
    lhs, rhs = (x.strip() for x in text.split("=", 1))
    return f"{print_arrow(_side(lhs, variables))} = {print_arrow(_side(rhs, variables))}"
