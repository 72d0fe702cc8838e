"""Coherence semantics for structural terms and a finite-set model.

Structural cartesian arrows are interpreted as occurrence maps: each leaf of
the target is sent to the leaf of the source it was copied from.  Structural
symmetric-associative arrows are interpreted as leaf bijections.  Both are
complete for equality of canonical arrows, which gives the decision
procedures below.  The finite-set model is a brute-force oracle that is
independent of both.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import (
    Assoc,
    AssocInv,
    ArrowTerm,
    Bang,
    CatdedError,
    Comp,
    Conj,
    Diag,
    Formula,
    Gen,
    Id,
    InvWitness,
    Letter,
    MetaArrow,
    Pair,
    Proj1,
    Proj2,
    Sym,
    Tensor,
    TensorOf,
    Top,
    TypeMismatch,
    expand,
    leaves,
    typecheck,
)


class NonStructuralTerm(CatdedError):
    pass


class WrongTheory(CatdedError):
    pass


class MissingGeneratorTable(CatdedError):
    pass


def _paths(f: Formula) -> list[str]:
    return [p for p, _ in leaves(f)]


def show_path(p: str) -> str:
    return p or "ε"


@dataclass(frozen=True)
class OccurrenceMap:
    """Letter-preserving map from target leaves to source leaves."""

    source: Formula
    target: Formula
    pairs: tuple  # sorted (target_path, source_path)

    def __post_init__(self):
        src = dict(leaves(self.source))
        tgt = dict(leaves(self.target))
        if set(dict(self.pairs)) != set(tgt):
            raise CatdedError("occurrence map is not total on target leaves")
        for t, s in self.pairs:
            if src.get(s) != tgt[t]:
                raise CatdedError(f"occurrence map does not preserve letters at {show_path(t)}")

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    def to_json(self) -> dict:
        return {
            "source": str(self.source),
            "target": str(self.target),
            "map": {t: s for t, s in self.pairs},
        }

    def __str__(self) -> str:
        body = ", ".join(f"{show_path(t)} -> {show_path(s)}" for t, s in self.pairs)
        return "{" + body + "}"


@dataclass(frozen=True)
class LeafBijection:
    """Letter-preserving bijection from source leaves to target leaves."""

    source: Formula
    target: Formula
    pairs: tuple  # sorted (source_path, target_path)

    def __post_init__(self):
        src = dict(leaves(self.source))
        tgt = dict(leaves(self.target))
        m = dict(self.pairs)
        if set(m) != set(src) or sorted(m.values()) != sorted(tgt):
            raise CatdedError("leaf map is not a bijection")
        if any(src[s] != tgt[t] for s, t in self.pairs):
            raise CatdedError("leaf bijection does not preserve letters")

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    def to_json(self) -> dict:
        return {
            "source": str(self.source),
            "target": str(self.target),
            "map": {s: t for s, t in self.pairs},
        }

    def __str__(self) -> str:
        body = ", ".join(f"{show_path(s)} -> {show_path(t)}" for s, t in self.pairs)
        return "{" + body + "}"


# --------------------------------------------------------------- cartesian


def interpret_cartesian(t: ArrowTerm) -> OccurrenceMap:
    src, tgt = typecheck(t)
    m = _occ(expand(t))
    return OccurrenceMap(src, tgt, tuple(sorted(m.items())))


def _occ(t: ArrowTerm) -> dict[str, str]:
    if isinstance(t, (Gen, InvWitness, MetaArrow)):
        raise NonStructuralTerm(f"{t!r} has no occurrence-map semantics")
    if isinstance(t, (Sym, Assoc, AssocInv, TensorOf)):
        raise WrongTheory(f"{t!r} is not a cartesian term")
    if isinstance(t, Id):
        if isinstance(t.obj, Tensor):
            raise WrongTheory(f"{t!r} is not a cartesian term")
        return {p: p for p in _paths(t.obj)}
    if isinstance(t, Comp):
        mg = _occ(t.g)
        mf = _occ(t.f)
        return {leaf: mf[mid] for leaf, mid in mg.items()}
    if isinstance(t, Proj1):
        return {p: "L" + p for p in _paths(t.a)}
    if isinstance(t, Proj2):
        return {p: "R" + p for p in _paths(t.b)}
    if isinstance(t, Pair):
        out = {"L" + p: s for p, s in _occ(t.f).items()}
        out.update({"R" + p: s for p, s in _occ(t.g).items()})
        return out
    if isinstance(t, Bang):
        return {}
    raise TypeError(f"not an arrow term: {t!r}")


def _same_endpoints(t1: ArrowTerm, t2: ArrowTerm) -> None:
    e1 = typecheck(t1)
    e2 = typecheck(t2)
    if e1 != e2:
        raise TypeMismatch(f"{t1} : {e1[0]} -> {e1[1]} and {t2} : {e2[0]} -> {e2[1]} are not parallel")


def decide_equal_cartesian(t1: ArrowTerm, t2: ArrowTerm) -> bool:
    _same_endpoints(t1, t2)
    return interpret_cartesian(t1) == interpret_cartesian(t2)


# --------------------------------------------------------------- symmetric


def interpret_symmetric(t: ArrowTerm) -> LeafBijection:
    src, tgt = typecheck(t)
    m = _perm(t)
    return LeafBijection(src, tgt, tuple(sorted(m.items())))


def _perm(t: ArrowTerm) -> dict[str, str]:
    if isinstance(t, (Gen, InvWitness, MetaArrow)):
        raise NonStructuralTerm(f"{t!r} has no leaf-bijection semantics")
    if isinstance(t, (Proj1, Proj2, Pair, Diag, Bang)):
        raise WrongTheory(f"{t!r} is not a symmetric-associative term")
    if isinstance(t, Id):
        if isinstance(t.obj, (Conj, Top)):
            raise WrongTheory(f"{t!r} is not a symmetric-associative term")
        return {p: p for p in _paths(t.obj)}
    if isinstance(t, Comp):
        mg = _perm(t.g)
        mf = _perm(t.f)
        return {leaf: mg[mid] for leaf, mid in mf.items()}
    if isinstance(t, TensorOf):
        out = {"L" + s: "L" + d for s, d in _perm(t.f).items()}
        out.update({"R" + s: "R" + d for s, d in _perm(t.g).items()})
        return out
    if isinstance(t, Sym):
        out = {"L" + p: "R" + p for p in _paths(t.a)}
        out.update({"R" + p: "L" + p for p in _paths(t.b)})
        return out
    if isinstance(t, Assoc):
        out = {"L" + p: "LL" + p for p in _paths(t.a)}
        out.update({"RL" + p: "LR" + p for p in _paths(t.b)})
        out.update({"RR" + p: "R" + p for p in _paths(t.c)})
        return out
    if isinstance(t, AssocInv):
        out = {"LL" + p: "L" + p for p in _paths(t.a)}
        out.update({"LR" + p: "RL" + p for p in _paths(t.b)})
        out.update({"R" + p: "RR" + p for p in _paths(t.c)})
        return out
    raise TypeError(f"not an arrow term: {t!r}")


def decide_equal_symmetric(t1: ArrowTerm, t2: ArrowTerm) -> bool:
    _same_endpoints(t1, t2)
    return interpret_symmetric(t1) == interpret_symmetric(t2)


def interpret(t: ArrowTerm):
    """Occurrence map or leaf bijection, whichever theory ``t`` belongs to."""
    from .core import term_connectives

    if "tensor" in term_connectives(t):
        return interpret_symmetric(t)
    return interpret_cartesian(t)


def decide_equal(t1: ArrowTerm, t2: ArrowTerm) -> bool:
    _same_endpoints(t1, t2)
    return interpret(t1) == interpret(t2)


# ------------------------------------------------------------ finite model


@dataclass
class FiniteModel:
    """Carrier per letter plus a function table per generator arrow."""

    carriers: dict
    tables: dict = field(default_factory=dict)

    def __post_init__(self):
        self.carriers = {k: tuple(v) for k, v in self.carriers.items()}
        for k, v in self.carriers.items():
            if not v:
                raise CatdedError(f"carrier of {k} is empty")

    @classmethod
    def uniform(cls, letters, n: int, tables=None) -> "FiniteModel":
        return cls({x: tuple(range(n)) for x in letters}, dict(tables or {}))

    def carrier(self, f: Formula) -> tuple:
        if isinstance(f, Letter):
            if f.name not in self.carriers:
                raise CatdedError(f"no carrier for letter {f.name}")
            return self.carriers[f.name]
        if isinstance(f, Top):
            return ((),)
        if isinstance(f, (Conj, Tensor)):
            return tuple(itertools.product(self.carrier(f.left), self.carrier(f.right)))
        raise TypeError(f"not a formula: {f!r}")


def _fn(t: ArrowTerm, m: FiniteModel) -> Callable:
    if isinstance(t, Id):
        return lambda x: x
    if isinstance(t, Comp):
        g, f = _fn(t.g, m), _fn(t.f, m)
        return lambda x: g(f(x))
    if isinstance(t, Proj1):
        return lambda x: x[0]
    if isinstance(t, Proj2):
        return lambda x: x[1]
    if isinstance(t, Pair):
        f, g = _fn(t.f, m), _fn(t.g, m)
        return lambda x: (f(x), g(x))
    if isinstance(t, Diag):
        return lambda x: (x, x)
    if isinstance(t, Bang):
        return lambda x: ()
    if isinstance(t, Sym):
        return lambda x: (x[1], x[0])
    if isinstance(t, Assoc):
        return lambda x: ((x[0], x[1][0]), x[1][1])
    if isinstance(t, AssocInv):
        return lambda x: (x[0][0], (x[0][1], x[1]))
    if isinstance(t, TensorOf):
        f, g = _fn(t.f, m), _fn(t.g, m)
        return lambda x: (f(x[0]), g(x[1]))
    if isinstance(t, (Gen, InvWitness)):
        table = m.tables.get(t.name)
        if table is None:
            raise MissingGeneratorTable(f"no function table for {t.name}")
        dom = m.carrier(t.source)
        cod = set(m.carrier(t.target))
        if set(table) != set(dom) or any(v not in cod for v in table.values()):
            raise CatdedError(f"table for {t.name} is not a total function {t.source} -> {t.target}")
        return table.__getitem__
    raise NonStructuralTerm(f"cannot evaluate {t!r}")


def eval_finite_model(t: ArrowTerm, m: FiniteModel) -> dict:
    """Full input -> output table of ``t`` in ``m``."""
    src, _ = typecheck(t)
    fn = _fn(t, m)
    return {x: fn(x) for x in m.carrier(src)}


def table_difference(t1: ArrowTerm, t2: ArrowTerm, m: FiniteModel) -> Optional[tuple]:
    """First input (in carrier order) where the two tables disagree."""
    _same_endpoints(t1, t2)
    a = eval_finite_model(t1, m)
    b = eval_finite_model(t2, m)
    for x in a:
        if a[x] != b[x]:
            return (x, a[x], b[x])
    return None


def models_agree(t1: ArrowTerm, t2: ArrowTerm, letters, sizes=(1, 2, 3), tables=None) -> bool:
    """Tables agree in every uniform model with the given carrier sizes."""
    return all(
        table_difference(t1, t2, FiniteModel.uniform(letters, n, tables)) is None for n in sizes
    )


def table_to_json(table: dict) -> list:
    return [[_jsonable(k), _jsonable(v)] for k, v in table.items()]


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x
