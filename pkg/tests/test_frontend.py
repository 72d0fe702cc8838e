import pytest
from hypothesis import given, settings, strategies as st

from catded.core import (
    CompositionMismatch, Conj, Diag, Gen, Id, Letter, Pair, Tensor, Top,
)
from catded.engine import Preset
from catded.frontend import (
    ParseError, PremisePolicy, Sequent, apply_contraction, apply_policy,
    apply_thinning, object_image, parse_arrow, parse_formula, parse_sequent,
    parse_signature, policy_report, print_arrow, print_formula,
    sequent_to_arrow_type, substitute_letter,
)
from randterms import rand_formula, rand_from

p, q, r = Letter("p"), Letter("q"), Letter("r")
SEQ, MS, SET = PremisePolicy.SEQUENCE, PremisePolicy.MULTISET, PremisePolicy.SET


def seq(*prem, concl):
    return Sequent(tuple(prem), concl)


def test_parse_sequent_example():
    assert parse_sequent("p, q |- p") == seq(p, q, concl=p)
    assert parse_sequent("|- p") == seq(concl=p)


def test_parse_pair_of_identities():
    assert parse_arrow("pair(id{p}, id{p})") == Pair(Id(p), Id(p))


def test_projection_after_diag_needs_equal_letters():
    with pytest.raises(CompositionMismatch):
        parse_arrow("p1{p,q} . w{p}")
    parse_arrow("p1{p,p} . w{p}")


def test_formula_grammar():
    assert parse_formula("p /\\ q /\\ r") == Conj(Conj(p, q), r)
    assert parse_formula("p /\\ (q /\\ r)") == Conj(p, Conj(q, r))
    assert parse_formula("T") == Top()
    assert parse_formula("p * q") == Tensor(p, q)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_formula("p /\\ ")
    assert e.value.pos is not None
    with pytest.raises(ParseError):
        parse_arrow("pair(id{p}")
    with pytest.raises(ParseError):
        parse_sequent("p, q")


def test_comments_ignored():
    assert parse_formula("p /\\ q  # a comment") == Conj(p, q)


def test_policy_examples():
    assert apply_policy(seq(p, q, p, concl=r), SET) == seq(p, q, concl=r)
    assert apply_policy(seq(p, p, concl=p), MS) == seq(p, p, concl=p)
    assert apply_policy(substitute_letter(apply_policy(seq(p, q, concl=p), SET), "q", "p"), SET) == seq(p, concl=p)


def test_substitution_examples():
    assert substitute_letter(seq(p, q, concl=p), "q", "p") == seq(p, p, concl=p)
    assert substitute_letter(seq(p, concl=p), "q", "p") == seq(p, concl=p)
    assert substitute_letter(seq(Conj(p, q), concl=r), "q", "p") == seq(Conj(p, p), concl=r)


def test_thinning_examples():
    assert apply_thinning(seq(p, concl=p), q, SET) == (seq(p, q, concl=p), False)
    assert apply_thinning(seq(p, concl=p), p, SET) == (seq(p, concl=p), True)
    assert apply_thinning(seq(p, concl=p), p, SEQ) == (seq(p, p, concl=p), False)


def test_contraction():
    assert apply_contraction(seq(p, p, concl=p), 0, SET) == (seq(p, concl=p), True)
    assert apply_contraction(seq(p, p, concl=p), 0, MS) == (seq(p, concl=p), False)


def test_sequent_to_arrow_type_examples():
    assert sequent_to_arrow_type(seq(p, q, concl=p), SEQ) == (Conj(p, q), p)
    for pol in PremisePolicy:
        assert sequent_to_arrow_type(seq(concl=p), pol) == (Top(), p)
    assert sequent_to_arrow_type(seq(p, p, concl=p), SET) == (p, p)
    assert sequent_to_arrow_type(seq(p, q, r, concl=p), SEQ) == (Conj(p, Conj(q, r)), p)


def test_object_image_examples():
    assert object_image(Conj(p, Conj(p, q)), SET) == ("p", "q")
    assert object_image(Tensor(p, p), MS) == ("p", "p")
    assert object_image(Top(), SET) == ()


def test_policy_report_set_flags_invisible_thinning():
    rep = policy_report(parse_sequent("p, q |- p"), SET, ("q", "p"))
    assert rep["premises_shrank"]
    assert rep["invisible_thinning"]
    assert rep["thinnings"][1]["figure"] == "p |- p\n------\np |- p"


def test_policy_report_sequence_no_flag():
    rep = policy_report(parse_sequent("p, q |- p"), SEQ, ("q", "p"))
    assert not rep["premises_shrank"]
    assert not rep["invisible_thinning"]
    assert not rep["invisible_contraction"]


def test_signature_file():
    sig = parse_signature("letter p\nletter q\narrow f : p -> q\n# note\n")
    assert sig.letters == frozenset({"p", "q"})
    assert sig.gen("f") == ("f", p, q)
    with pytest.raises(ParseError):
        parse_signature("arrow f p q")


# ---------------------------------------------------------------- properties

presets = st.sampled_from(list(Preset))
policies = st.sampled_from(list(PremisePolicy))


@st.composite
def sequents(draw):
    r_ = draw(st.randoms(use_true_random=False))
    preset = draw(presets)
    n = draw(st.integers(0, 4))
    return Sequent(tuple(rand_formula(r_, preset, 2) for _ in range(n)), rand_formula(r_, preset, 2))


@settings(max_examples=300, deadline=None)
@given(sequents(), policies)
def test_policy_idempotent(s, pol):
    once = apply_policy(s, pol)
    assert apply_policy(once, pol) == once


@settings(max_examples=300, deadline=None)
@given(sequents())
def test_sequent_round_trip(s):
    assert parse_sequent(str(s)) == s


@settings(max_examples=300, deadline=None)
@given(presets, st.randoms(use_true_random=False))
def test_formula_and_arrow_round_trip(preset, r_):
    f = rand_formula(r_, preset, 3)
    assert parse_formula(print_formula(f)) == f
    t = rand_from(r_, f, preset, 6)
    assert parse_arrow(print_arrow(t)) == t


def test_generator_round_trip():
    t = Gen("f", p, Conj(p, q))
    assert parse_arrow(print_arrow(t), check=False) == t
    assert parse_arrow(print_arrow(Diag(p))) == Diag(p)


@settings(max_examples=200, deadline=None)
@given(sequents(), st.sampled_from(["p", "q"]), st.sampled_from(["p", "q"]))
def test_sequence_premise_count_substitution_invariant(s, a, b):
    inst = substitute_letter(s, a, b)
    assert len(apply_policy(inst, SEQ).premises) == len(apply_policy(s, SEQ).premises)


def test_set_substitution_instability_witness():
    s = parse_sequent("p, q |- p")
    assert len(apply_policy(substitute_letter(s, "q", "p"), SET).premises) < len(apply_policy(s, SET).premises)
