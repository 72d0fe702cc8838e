"""Formulae and arrow terms of freely generated cartesian and
symmetric-associative categories.

Formulae are the objects; arrow terms are (representatives of) deductions.
Everything here is immutable and hashable so terms can be interned, shared
between workers and used as dictionary keys.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union


class CatdedError(Exception):
    pass


class TypingError(CatdedError):
    pass


class CompositionMismatch(TypingError):
    pass


class TypeMismatch(TypingError):
    pass


class UnknownGenerator(TypingError):
    pass


class MixedConnectives(TypingError):
    pass


# ---------------------------------------------------------------- formulae


@dataclass(frozen=True)
class Letter:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "T"


@dataclass(frozen=True)
class Conj:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return _binary_str(self, "/\\")


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return _binary_str(self, "*")


@dataclass(frozen=True)
class MetaObj:
    """Object metavariable, only ever found inside schema patterns."""

    name: str

    def __str__(self) -> str:
        return "?" + self.name


Formula = Union[Letter, Top, Conj, Tensor, MetaObj]
BINARY = (Conj, Tensor)


def _binary_str(f, op: str) -> str:
    # connectives associate to the left, so only a compound right operand
    # needs parentheses
    left = str(f.left)
    right = str(f.right)
    if isinstance(f.right, BINARY):
        right = "(" + right + ")"
    if isinstance(f.left, BINARY) and type(f.left) is not type(f):
        left = "(" + left + ")"
    return left + op + right


def depth(f: Formula) -> int:
    if isinstance(f, BINARY):
        return 1 + max(depth(f.left), depth(f.right))
    return 0


def letters_of(f: Formula) -> list[str]:
    """Letters in left-to-right order, with repetitions."""
    return [letter for _, letter in leaves(f)]


def leaves(f: Formula, prefix: str = "") -> list[tuple[str, str]]:
    """Left-to-right leaf enumeration as (path, letter) pairs.

    Paths are strings over L/R read from the root; the root itself is the
    empty path.  T has no leaves.
    """
    if isinstance(f, Letter):
        return [(prefix, f.name)]
    if isinstance(f, BINARY):
        return leaves(f.left, prefix + "L") + leaves(f.right, prefix + "R")
    return []


def connectives(f: Formula) -> set[str]:
    if isinstance(f, Conj):
        return {"conj"} | connectives(f.left) | connectives(f.right)
    if isinstance(f, Tensor):
        return {"tensor"} | connectives(f.left) | connectives(f.right)
    if isinstance(f, Top):
        return {"conj"}
    return set()


def formula_key(f: Formula) -> tuple[int, str]:
    """Fixed total order on formulae: length-lexicographic on printed form."""
    s = str(f)
    return (len(s), s)


# ------------------------------------------------------------- arrow terms


class ArrowTerm:
    """Base class of arrow-term constructors.

    ``label()`` returns the non-arrow data of a node (formulae, names) and
    ``children()`` its immediate arrow subterms; together they give every
    constructor a uniform first-order shape for interning and matching.
    """

    __slots__ = ()

    def label(self) -> tuple:
        return ()

    def children(self) -> tuple["ArrowTerm", ...]:
        return ()

    def rebuild(self, label: tuple, children: tuple) -> "ArrowTerm":
        return type(self)(*label, *children)

    def __str__(self) -> str:
        from .frontend import print_arrow

        return print_arrow(self)


@dataclass(frozen=True, repr=False)
class Id(ArrowTerm):
    obj: Formula

    def label(self):
        return (self.obj,)

    def __repr__(self):
        return f"Id({self.obj})"


@dataclass(frozen=True, repr=False)
class Comp(ArrowTerm):
    """``Comp(g, f)`` is g after f."""

    g: ArrowTerm
    f: ArrowTerm

    def children(self):
        return (self.g, self.f)

    def __repr__(self):
        return f"Comp({self.g!r}, {self.f!r})"


@dataclass(frozen=True, repr=False)
class Proj1(ArrowTerm):
    a: Formula
    b: Formula

    def label(self):
        return (self.a, self.b)

    def __repr__(self):
        return f"Proj1({self.a}, {self.b})"


@dataclass(frozen=True, repr=False)
class Proj2(ArrowTerm):
    a: Formula
    b: Formula

    def label(self):
        return (self.a, self.b)

    def __repr__(self):
        return f"Proj2({self.a}, {self.b})"


@dataclass(frozen=True, repr=False)
class Pair(ArrowTerm):
    f: ArrowTerm
    g: ArrowTerm

    def children(self):
        return (self.f, self.g)

    def __repr__(self):
        return f"Pair({self.f!r}, {self.g!r})"


@dataclass(frozen=True, repr=False)
class Diag(ArrowTerm):
    """Contraction arrow A -> A/\\A; notation for Pair(Id(A), Id(A))."""

    obj: Formula

    def label(self):
        return (self.obj,)

    def __repr__(self):
        return f"Diag({self.obj})"


@dataclass(frozen=True, repr=False)
class Bang(ArrowTerm):
    obj: Formula

    def label(self):
        return (self.obj,)

    def __repr__(self):
        return f"Bang({self.obj})"


@dataclass(frozen=True, repr=False)
class Gen(ArrowTerm):
    name: str
    source: Formula
    target: Formula

    def label(self):
        return (self.name, self.source, self.target)

    def __repr__(self):
        return f"Gen({self.name}: {self.source} -> {self.target})"


@dataclass(frozen=True, repr=False)
class InvWitness(ArrowTerm):
    """Named inverse introduced by an isomorphism assertion."""

    name: str
    source: Formula
    target: Formula

    def label(self):
        return (self.name, self.source, self.target)

    def __repr__(self):
        return f"InvWitness({self.name}: {self.source} -> {self.target})"


@dataclass(frozen=True, repr=False)
class Sym(ArrowTerm):
    a: Formula
    b: Formula

    def label(self):
        return (self.a, self.b)

    def __repr__(self):
        return f"Sym({self.a}, {self.b})"


@dataclass(frozen=True, repr=False)
class Assoc(ArrowTerm):
    """A*(B*C) -> (A*B)*C."""

    a: Formula
    b: Formula
    c: Formula

    def label(self):
        return (self.a, self.b, self.c)

    def __repr__(self):
        return f"Assoc({self.a}, {self.b}, {self.c})"


@dataclass(frozen=True, repr=False)
class AssocInv(ArrowTerm):
    """(A*B)*C -> A*(B*C)."""

    a: Formula
    b: Formula
    c: Formula

    def label(self):
        return (self.a, self.b, self.c)

    def __repr__(self):
        return f"AssocInv({self.a}, {self.b}, {self.c})"


@dataclass(frozen=True, repr=False)
class TensorOf(ArrowTerm):
    f: ArrowTerm
    g: ArrowTerm

    def children(self):
        return (self.f, self.g)

    def __repr__(self):
        return f"TensorOf({self.f!r}, {self.g!r})"


@dataclass(frozen=True, repr=False)
class MetaArrow(ArrowTerm):
    """Arrow metavariable of a schema, typed by object patterns."""

    name: str
    source: Formula
    target: Formula

    def label(self):
        return (self.name, self.source, self.target)

    def __repr__(self):
        return f"?{self.name}"


LEAF_TYPES = (Id, Proj1, Proj2, Diag, Bang, Gen, InvWitness, Sym, Assoc, AssocInv)
CARTESIAN_ONLY = (Proj1, Proj2, Pair, Diag, Bang)
TENSOR_ONLY = (Sym, Assoc, AssocInv, TensorOf)
NAMED = (Gen, InvWitness)


# ---------------------------------------------------------------- signature


@dataclass(frozen=True)
class Signature:
    """Generating objects (letters) and generating arrows."""

    letters: frozenset = frozenset()
    gen_arrows: tuple = ()  # of (name, source, target)

    def __post_init__(self):
        names = [name for name, _, _ in self.gen_arrows]
        if len(set(names)) != len(names):
            raise CatdedError(f"duplicate generator names in {names}")
        for name, src, tgt in self.gen_arrows:
            for f in (src, tgt):
                self.check_formula(f)

    @classmethod
    def of(cls, letters, gen_arrows=()) -> "Signature":
        return cls(frozenset(letters), tuple(gen_arrows))

    def gen(self, name: str) -> Optional[tuple]:
        for entry in self.gen_arrows:
            if entry[0] == name:
                return entry
        return None

    def check_formula(self, f: Formula) -> None:
        for _, letter in leaves(f):
            if letter not in self.letters:
                raise UnknownGenerator(f"unknown letter {letter!r} in {f}")

    def with_arrows(self, extra) -> "Signature":
        return Signature(self.letters, self.gen_arrows + tuple(extra))


# ------------------------------------------------------------------ typing


def subterms(t: ArrowTerm) -> Iterator[ArrowTerm]:
    yield t
    for c in t.children():
        yield from subterms(c)


def size(t: ArrowTerm) -> int:
    return 1 + sum(size(c) for c in t.children())


def expand(t: ArrowTerm) -> ArrowTerm:
    """Replace every Diag(A) by Pair(Id(A), Id(A))."""
    if isinstance(t, Diag):
        return Pair(Id(t.obj), Id(t.obj))
    kids = t.children()
    if not kids:
        return t
    new = tuple(expand(c) for c in kids)
    if new == kids:
        return t
    return t.rebuild(t.label(), new)


def term_formulas(t: ArrowTerm) -> Iterator[Formula]:
    for s in subterms(t):
        for x in s.label():
            if not isinstance(x, str):
                yield x


def term_connectives(t: ArrowTerm) -> set[str]:
    used: set[str] = set()
    for s in subterms(t):
        if isinstance(s, CARTESIAN_ONLY):
            used.add("conj")
        elif isinstance(s, TENSOR_ONLY):
            used.add("tensor")
    for f in term_formulas(t):
        used |= connectives(f)
    return used


def typecheck(t: ArrowTerm, sig: Optional[Signature] = None) -> tuple[Formula, Formula]:
    """Return the unique (source, target) of ``t``.

    Diag is expanded first.  With ``sig`` given, letters and generator
    arrows are checked against it.
    """
    if len(term_connectives(t)) > 1:
        raise MixedConnectives(f"both /\\ and * occur in {t!r}")
    if sig is not None:
        for f in term_formulas(t):
            sig.check_formula(f)
    return _type(expand(t), sig)


def _type(t: ArrowTerm, sig: Optional[Signature]) -> tuple[Formula, Formula]:
    if isinstance(t, Id):
        return t.obj, t.obj
    if isinstance(t, Comp):
        gs, gt = _type(t.g, sig)
        fs, ft = _type(t.f, sig)
        if ft != gs:
            raise CompositionMismatch(
                f"cannot compose: inner target {ft} differs from outer source {gs}"
            )
        return fs, gt
    if isinstance(t, Proj1):
        return Conj(t.a, t.b), t.a
    if isinstance(t, Proj2):
        return Conj(t.a, t.b), t.b
    if isinstance(t, Pair):
        fs, ft = _type(t.f, sig)
        gs, gt = _type(t.g, sig)
        if fs != gs:
            raise TypeMismatch(f"pairing arrows with sources {fs} and {gs}")
        return fs, Conj(ft, gt)
    if isinstance(t, Bang):
        return t.obj, Top()
    if isinstance(t, Gen):
        if sig is not None:
            entry = sig.gen(t.name)
            if entry is None:
                raise UnknownGenerator(f"unknown generator arrow {t.name!r}")
            if (entry[1], entry[2]) != (t.source, t.target):
                raise TypeMismatch(
                    f"generator {t.name} declared {entry[1]} -> {entry[2]}, "
                    f"used as {t.source} -> {t.target}"
                )
        return t.source, t.target
    if isinstance(t, (InvWitness, MetaArrow)):
        return t.source, t.target
    if isinstance(t, Sym):
        return Tensor(t.a, t.b), Tensor(t.b, t.a)
    if isinstance(t, Assoc):
        return Tensor(t.a, Tensor(t.b, t.c)), Tensor(Tensor(t.a, t.b), t.c)
    if isinstance(t, AssocInv):
        return Tensor(Tensor(t.a, t.b), t.c), Tensor(t.a, Tensor(t.b, t.c))
    if isinstance(t, TensorOf):
        fs, ft = _type(t.f, sig)
        gs, gt = _type(t.g, sig)
        return Tensor(fs, gs), Tensor(ft, gt)
    raise TypeError(f"not an arrow term: {t!r}")


def is_structural(t: ArrowTerm) -> bool:
    return not any(isinstance(s, (Gen, InvWitness, MetaArrow)) for s in subterms(t))


def generator_names(t: ArrowTerm) -> list[str]:
    """Names of generator arrows and inverse witnesses, with multiplicity."""
    return sorted(s.name for s in subterms(t) if isinstance(s, NAMED))
