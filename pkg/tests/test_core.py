import pytest
from hypothesis import given, settings, strategies as st

from catded.core import (
    CompositionMismatch, Comp, Conj, Diag, Gen, Id, Letter, MixedConnectives,
    Pair, Proj1, Signature, Sym, Tensor, Top, TypeMismatch, UnknownGenerator,
    expand, leaves, typecheck,
)
from catded.engine import Preset
from randterms import rand_formula, rand_from

p, q = Letter("p"), Letter("q")


def test_projection_typing():
    assert typecheck(Proj1(p, q)) == (Conj(p, q), p)


def test_diag_typing():
    assert typecheck(Diag(p)) == (p, Conj(p, p))


def test_composition_mismatch():
    with pytest.raises(CompositionMismatch):
        typecheck(Comp(Proj1(p, q), Id(q)))


def test_pair_sources_must_agree():
    with pytest.raises(TypeMismatch):
        typecheck(Pair(Id(p), Id(q)))


def test_mixed_connectives_rejected():
    with pytest.raises(MixedConnectives):
        typecheck(Pair(Sym(p, p), Id(Tensor(p, p))))


def test_unknown_letter_and_generator():
    sig = Signature.of(["p"], [("f", p, p)])
    with pytest.raises(UnknownGenerator):
        typecheck(Id(q), sig)
    with pytest.raises(UnknownGenerator):
        typecheck(Gen("g", p, p), sig)
    with pytest.raises(TypeMismatch):
        typecheck(Gen("f", p, Conj(p, p)), sig)
    assert typecheck(Gen("f", p, p), sig) == (p, p)


def test_duplicate_generator_names():
    with pytest.raises(Exception):
        Signature.of(["p"], [("f", p, p), ("f", p, p)])


def test_leaves_examples():
    assert leaves(Conj(p, Conj(q, p))) == [("L", "p"), ("RL", "q"), ("RR", "p")]
    assert leaves(Top()) == []
    assert leaves(p) == [("", "p")]


def test_expand_diag():
    assert expand(Diag(p)) == Pair(Id(p), Id(p))


presets = st.sampled_from([Preset.CARTESIAN, Preset.CARTESIAN_WITH_TOP, Preset.SYMMETRIC_ASSOCIATIVE])


@settings(max_examples=200, deadline=None)
@given(presets, st.randoms(use_true_random=False))
def test_typing_is_a_function(preset, r):
    t = rand_from(r, rand_formula(r, preset, 2), preset, 6)
    assert typecheck(t) == typecheck(t)
    assert typecheck(expand(t)) == typecheck(t)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([Conj, Tensor]), st.randoms(use_true_random=False))
def test_leaves_of_binary(op, r):
    preset = Preset.CARTESIAN if op is Conj else Preset.SYMMETRIC_ASSOCIATIVE
    a, b = rand_formula(r, preset, 3), rand_formula(r, preset, 3)
    assert leaves(op(a, b)) == [("L" + x, y) for x, y in leaves(a)] + [("R" + x, y) for x, y in leaves(b)]


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_expand_diag_everywhere(r):
    a = rand_formula(r, Preset.CARTESIAN, 3)
    assert expand(Diag(a)) == Pair(Id(a), Id(a))
    assert typecheck(Diag(a)) == typecheck(Pair(Id(a), Id(a)))
