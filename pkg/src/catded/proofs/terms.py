"""Composition chains, schema patterns and bounded rewriting.

A term is a :class:`Chain`: a tuple of atoms read left to right as a
composite (``a . b`` is ``a`` after ``b``) with identities dropped, so that
associativity and the unit laws hold by construction.  An empty chain is an
identity and remembers its object.

Objects are plain tuples: ``("v", name)`` for a variable or letter,
``("?", name)`` for a pattern metavariable, and ``(op, *args)`` otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from ..core import CatdedError, TypeMismatch

Obj = tuple


@dataclass(frozen=True)
class Atom:
    head: str
    name: str = ""
    objs: tuple = ()
    args: tuple = ()  # of Chain


@dataclass(frozen=True)
class Chain:
    atoms: tuple
    idobj: Optional[Obj] = None  # only for the empty chain

    def __post_init__(self):
        if self.atoms and self.idobj is not None:
            object.__setattr__(self, "idobj", None)

    @property
    def is_identity(self) -> bool:
        return not self.atoms


SEG = "$"


def seg(name: str) -> Atom:
    """Segment metavariable: matches a nonempty run of atoms."""
    return Atom(SEG, name)


def ident(obj: Obj) -> Chain:
    return Chain((), obj)


def single(a: Atom) -> Chain:
    return Chain((a,))


def compose(*cs: Chain) -> Chain:
    atoms = tuple(a for c in cs for a in c.atoms)
    if atoms:
        return Chain(atoms)
    return Chain((), cs[0].idobj if cs else None)


# ----------------------------------------------------------------- typing


class Typer:
    """Endpoints of atoms and chains for one theory and environment."""

    def __init__(self, atom_type: Callable, norm: Callable, env: dict):
        self._atom_type = atom_type
        self.norm = norm
        self.env = env

    def atom(self, a: Atom) -> tuple:
        if a.head == SEG:
            raise TypeMismatch(f"unbound segment ${a.name}")
        return self._atom_type(a, self)

    def chain(self, c: Chain) -> tuple:
        if c.is_identity:
            if c.idobj is None:
                raise TypeMismatch("identity without an object")
            o = self.norm(c.idobj)
            return o, o
        types = [self.atom(a) for a in c.atoms]
        for (s, _), (_, t) in zip(types, types[1:]):
            if s != t:
                raise TypeMismatch(f"cannot compose: source {s} against target {t}")
        return types[-1][0], types[0][1]


# --------------------------------------------------------------- matching


def subst_obj(o: Obj, b: dict) -> Obj:
    if o[0] == "?":
        key = "?" + o[1]
        if key not in b:
            raise CatdedError(f"unbound object metavariable ?{o[1]}")
        return b[key]
    if o[0] == "v":
        return o
    return (o[0],) + tuple(subst_obj(x, b) for x in o[1:])


def unify_obj(p: Obj, o: Obj, b: dict) -> Optional[dict]:
    if p[0] == "?":
        key = "?" + p[1]
        if key in b:
            return b if b[key] == o else None
        return {**b, key: o}
    if p[0] == "v":
        return b if p == o else None
    if p[0] != o[0] or len(p) != len(o):
        return None
    for x, y in zip(p[1:], o[1:]):
        b = unify_obj(x, y, b)
        if b is None:
            return None
    return b


def match_chain(pats: tuple, atoms: tuple, b: dict) -> Iterator[dict]:
    if not pats:
        if not atoms:
            yield b
        return
    p = pats[0]
    if p.head == SEG:
        key = SEG + p.name
        if key in b:
            bound = b[key].atoms
            if atoms[: len(bound)] == bound and bound:
                yield from match_chain(pats[1:], atoms[len(bound):], b)
            return
        rest_min = sum(1 for q in pats[1:])
        for k in range(1, len(atoms) - rest_min + 1):
            yield from match_chain(pats[1:], atoms[k:], {**b, key: Chain(atoms[:k])})
        return
    if not atoms:
        return
    for b2 in match_atom(p, atoms[0], b):
        yield from match_chain(pats[1:], atoms[1:], b2)


def match_atom(p: Atom, a: Atom, b: dict) -> Iterator[dict]:
    if p.head != a.head or p.name != a.name or len(p.objs) != len(a.objs) or len(p.args) != len(a.args):
        return
    for x, y in zip(p.objs, a.objs):
        b = unify_obj(x, y, b)
        if b is None:
            return
    yield from _match_args(p.args, a.args, b)


def _match_args(pcs: tuple, cs: tuple, b: dict) -> Iterator[dict]:
    if not pcs:
        yield b
        return
    pc, c = pcs[0], cs[0]
    if c.is_identity and len(pc.atoms) == 1 and pc.atoms[0].head == SEG:
        # a lone segment variable may stand for an identity argument
        key = SEG + pc.atoms[0].name
        if key not in b:
            yield from _match_args(pcs[1:], cs[1:], {**b, key: c})
        elif b[key] == c:
            yield from _match_args(pcs[1:], cs[1:], b)
        return
    if pc.is_identity:
        if c.is_identity:
            b2 = unify_obj(pc.idobj, c.idobj, b)
            if b2 is not None:
                yield from _match_args(pcs[1:], cs[1:], b2)
        return
    for b2 in match_chain(pc.atoms, c.atoms, b):
        yield from _match_args(pcs[1:], cs[1:], b2)


def instantiate(c: Chain, b: dict, norm: Callable) -> Chain:
    atoms: list[Atom] = []
    idobj = None
    for a in c.atoms:
        if a.head == SEG:
            bound = b[SEG + a.name]
            atoms.extend(bound.atoms)
            if bound.is_identity and idobj is None:
                idobj = bound.idobj
        else:
            atoms.append(
                Atom(
                    a.head,
                    a.name,
                    tuple(norm(subst_obj(o, b)) for o in a.objs),
                    tuple(instantiate(x, b, norm) for x in a.args),
                )
            )
    if atoms:
        return Chain(tuple(atoms))
    if c.idobj is not None:
        return Chain((), norm(subst_obj(c.idobj, b)))
    return Chain((), idobj)


# ---------------------------------------------------------------- rewriting


@dataclass(frozen=True)
class Rule:
    """An equation between chain patterns.

    ``segtypes`` gives, for each segment metavariable, its (source, target)
    as object patterns; these bind the object metavariables that occur only
    on the other side.
    """

    name: str
    lhs: Chain
    rhs: Chain
    segtypes: tuple = ()  # of (name, src_pattern, tgt_pattern)
    oriented: bool = False  # rewrite left to right only

    def directions(self) -> list[tuple[Chain, Chain]]:
        if self.oriented:
            return [(self.lhs, self.rhs)]
        return [(self.lhs, self.rhs), (self.rhs, self.lhs)]


def _bind_segtypes(rule: Rule, b: dict, ty: Typer) -> Optional[dict]:
    for name, sp, tp in rule.segtypes:
        key = SEG + name
        if key not in b:
            continue
        try:
            s, t = ty.chain(b[key])
        except TypeMismatch:
            return None
        b = unify_obj(sp, s, b)
        if b is None:
            return None
        b = unify_obj(tp, t, b)
        if b is None:
            return None
    return b


def _boundaries(c: Chain, ty: Typer) -> list[Obj]:
    """Object at each gap of the chain, from the target end to the source."""
    if c.is_identity:
        return [ty.norm(c.idobj)]
    types = [ty.atom(a) for a in c.atoms]
    return [types[0][1]] + [s for s, _ in types]


def one_step(c: Chain, rule: Rule, ty: Typer, into_functors: bool = True) -> Iterator[Chain]:
    """All chains obtained by one application of ``rule`` at any position,
    inside pair arguments and (unless told otherwise) functor arguments."""
    try:
        bounds = _boundaries(c, ty)
    except TypeMismatch:
        return
    n = len(c.atoms)
    for pat, rep in rule.directions():
        if pat.is_identity:
            for k, o in enumerate(bounds):
                b = unify_obj(pat.idobj, o, {})
                if b is None:
                    continue
                b = _bind_segtypes(rule, b, ty)
                if b is None:
                    continue
                out = _splice(c, k, k, rep, b, ty, (o, o))
                if out is not None:
                    yield out
            continue
        m = len(pat.atoms)
        for i in range(n):
            for j in range(i + 1, n + 1):
                if j - i < m and not any(a.head == SEG for a in pat.atoms):
                    continue
                for b in match_chain(pat.atoms, c.atoms[i:j], {}):
                    b = _bind_segtypes(rule, b, ty)
                    if b is None:
                        continue
                    try:
                        seg_type = ty.chain(Chain(c.atoms[i:j]))
                    except TypeMismatch:
                        continue
                    out = _splice(c, i, j, rep, b, ty, seg_type)
                    if out is not None:
                        yield out
    for i, a in enumerate(c.atoms):
        if a.head == "app" and not into_functors:
            continue
        for k, arg in enumerate(a.args):
            for new in one_step(arg, rule, ty, into_functors):
                args = a.args[:k] + (new,) + a.args[k + 1:]
                atom = Atom(a.head, a.name, a.objs, args)
                yield Chain(c.atoms[:i] + (atom,) + c.atoms[i + 1:])


def _splice(c: Chain, i: int, j: int, rep: Chain, b: dict, ty: Typer, seg_type: tuple) -> Optional[Chain]:
    try:
        r = instantiate(rep, b, ty.norm)
        if r.is_identity and r.idobj is None:
            r = Chain((), seg_type[1])
        if ty.chain(r) != seg_type:
            return None
    except (CatdedError, KeyError):
        return None
    atoms = c.atoms[:i] + r.atoms + c.atoms[j:]
    if atoms:
        return Chain(atoms)
    return Chain((), seg_type[1])


def reachable(c: Chain, rule: Rule, ty: Typer, steps: int) -> dict[Chain, int]:
    """Chains reachable from ``c`` in at most ``steps`` rewrites, with the
    least number of rewrites needed."""
    seen = {c: 0}
    frontier = [c]
    for d in range(1, steps + 1):
        nxt = []
        for x in frontier:
            for y in one_step(x, rule, ty):
                if y not in seen:
                    seen[y] = d
                    nxt.append(y)
        frontier = nxt
    return seen


# ----------------------------------------------------------------- functors


def push_functor(c: Chain, fname: str, ty: Typer, obj_action: Callable, special: Optional[Callable] = None) -> Chain:
    """Distribute every application of functor ``fname`` over composition
    and identities, everywhere in ``c``.  ``special(atom)`` may simplify
    ``fname`` applied to a single atom (a projection functor applied to a
    pair, say) and returns a chain or None."""
    out: list[Atom] = []
    for a in c.atoms:
        args = tuple(push_functor(x, fname, ty, obj_action, special) for x in a.args)
        a = Atom(a.head, a.name, a.objs, args)
        if a.head == "app" and a.name == fname:
            inner = a.args[0]
            if inner.is_identity:
                continue
            for x in inner.atoms:
                simplified = special(x) if special else None
                if simplified is not None:
                    out.extend(simplified.atoms)
                else:
                    out.append(Atom("app", fname, (), (Chain((x,)),)))
        else:
            out.append(a)
    if out:
        return Chain(tuple(out))
    # everything vanished: identity on the (pushed) target
    return Chain((), ty.chain(c)[1] if c.atoms else ty.norm(c.idobj))
