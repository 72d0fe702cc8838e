"""Theory adapters for the proof checker.

``adjunction`` is an abstract adjunction F -| G with unit ``gamma`` and
counit ``phi``, plus the diagonal functor D into a product category and
its projection functors P1, P2.  ``cartesian`` reuses the arrow syntax of
the free cartesian category, with declared variables as generators.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..core import (
    ArrowTerm,
    Bang,
    CatdedError,
    Comp,
    Conj,
    Diag,
    Formula,
    Gen,
    Id,
    Letter,
    MetaArrow,
    MetaObj,
    Pair,
    Proj1,
    Proj2,
    Tensor,
    Top,
    TypeMismatch,
)
from ..engine import Preset, preset_schemata
from ..frontend import ParseError, parse_arrow, parse_formula, print_arrow
from .terms import SEG, Atom, Chain, Rule, Typer, compose, ident, seg, single


class Theory:
    name: str = ""
    functors: dict = {}
    families: frozenset = frozenset()

    def __init__(self):
        self.axioms: dict[str, Rule] = {}
        self.naturality: dict[str, Rule] = {}
        self.triangles: dict[str, Rule] = {}

    def typer(self, env: dict) -> Typer:
        return Typer(self.atom_type, self.norm, env)

    # to be provided by adapters
    def parse_obj(self, text: str):
        raise NotImplementedError

    def parse_chain(self, text: str, env: dict) -> Chain:
        raise NotImplementedError

    def atom_type(self, a: Atom, ty: Typer) -> tuple:
        raise NotImplementedError

    def norm(self, o):
        return o

    def show(self, c: Chain, env: Optional[dict] = None) -> str:
        raise NotImplementedError

    def show_obj(self, o) -> str:
        raise NotImplementedError

    def functor_obj(self, fname: str, o):
        raise CatdedError(f"unknown functor {fname}")

    def functor_special(self, fname: str) -> Optional[Callable]:
        return None


# ------------------------------------------------------------ adjunction

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9_']*)|(?P<meta>[?$][A-Za-z][A-Za-z0-9_']*)|(?P<num>1)|(?P<op>[().,\[\]]))")
_FUNCTORS = ("F", "G", "D", "P1", "P2")


class _AdjParser:
    def __init__(self, text: str, allow_meta: bool):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}", pos)
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0
        self.allow_meta = allow_meta

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else ("eof", "", len(self.text))

    def take(self, value: Optional[str] = None):
        tok = self.peek()
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r} at {tok[2]}, found {tok[1] or 'end'!r}", tok[2])
        self.i += 1
        return tok

    def done(self):
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"trailing input at {tok[2]}: {tok[1]!r}", tok[2])

    def obj(self):
        kind, val, pos = self.peek()
        if kind == "meta" and val[0] == "?":
            if not self.allow_meta:
                raise ParseError(f"metavariable {val} outside a schema", pos)
            self.take()
            return ("?", val[1:])
        if val == "(":
            self.take()
            a = self.obj()
            self.take(",")
            b = self.obj()
            self.take(")")
            return ("pair", a, b)
        if kind == "name" and val[0].isupper():
            self.take()
            if val in _FUNCTORS and self.peek()[1] == "(":
                self.take("(")
                x = self.obj()
                self.take(")")
                return (val, x)
            return ("v", val)
        raise ParseError(f"expected an object at {pos}, found {val or 'end'!r}", pos)

    def chain(self) -> Chain:
        parts = [self.factor()]
        while self.peek()[1] == ".":
            self.take()
            parts.append(self.factor())
        return compose(*parts)

    def factor(self) -> Chain:
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            self.take("[")
            o = self.obj()
            self.take("]")
            return ident(o)
        if kind == "meta" and val[0] == "$":
            if not self.allow_meta:
                raise ParseError(f"metavariable {val} outside a schema", pos)
            self.take()
            return single(seg(val[1:]))
        if val == "(":
            self.take()
            a = self.chain()
            if self.peek()[1] == ",":
                self.take()
                b = self.chain()
                self.take(")")
                return single(Atom("pair", args=(a, b)))
            self.take(")")
            return a
        if kind == "name":
            self.take()
            if val in ("gamma", "phi"):
                self.take("[")
                o = self.obj()
                self.take("]")
                return single(Atom(val, objs=(o,)))
            if val in _FUNCTORS:
                self.take("(")
                a = self.chain()
                self.take(")")
                return single(Atom("app", val, args=(a,)))
            if val[0].islower():
                return single(Atom("var", val))
        raise ParseError(f"expected an arrow at {pos}, found {val or 'end'!r}", pos)


class Adjunction(Theory):
    name = "adjunction"
    families = frozenset({"gamma", "phi"})

    def __init__(self):
        super().__init__()
        self.axioms["diag-def"] = self._rule("diag-def", "D($h)", "($h, $h)", [("h", "?X", "?Y")])
        self.naturality["gamma"] = self._rule(
            "naturality gamma", "gamma[?Y] . $f", "G(F($f)) . gamma[?X]", [("f", "?X", "?Y")]
        )
        self.naturality["phi"] = self._rule(
            "naturality phi", "$f . phi[?X]", "phi[?Y] . F(G($f))", [("f", "?X", "?Y")]
        )
        self.triangles["1"] = self._rule("triangle 1", "phi[F(?X)] . F(gamma[?X])", "1[F(?X)]", [])
        self.triangles["2"] = self._rule("triangle 2", "G(phi[?Y]) . gamma[G(?Y)]", "1[G(?Y)]", [])

    def _rule(self, name: str, lhs: str, rhs: str, segtypes) -> Rule:
        types = tuple((n, self.parse_obj(s, True), self.parse_obj(t, True)) for n, s, t in segtypes)
        return Rule(name, self._pattern(lhs), self._pattern(rhs), types)

    def _pattern(self, text: str) -> Chain:
        p = _AdjParser(text, True)
        c = p.chain()
        p.done()
        return c

    def parse_obj(self, text: str, allow_meta: bool = False):
        p = _AdjParser(text, allow_meta)
        o = p.obj()
        p.done()
        return self.norm(o)

    def parse_chain(self, text: str, env: dict) -> Chain:
        p = _AdjParser(text, False)
        c = p.chain()
        p.done()
        return _norm_chain(c, self.norm)

    def norm(self, o):
        if o[0] in ("v", "?"):
            return o
        args = tuple(self.norm(x) for x in o[1:])
        if o[0] == "D":
            return ("pair", args[0], args[0])
        if o[0] in ("P1", "P2") and args[0][0] == "pair":
            return args[0][1] if o[0] == "P1" else args[0][2]
        return (o[0],) + args

    def functor_obj(self, fname: str, o):
        if fname not in _FUNCTORS:
            raise CatdedError(f"unknown functor {fname}")
        return self.norm((fname, o))

    def functor_special(self, fname: str) -> Optional[Callable]:
        if fname not in ("P1", "P2"):
            return None
        k = 0 if fname == "P1" else 1

        def special(a: Atom) -> Optional[Chain]:
            if a.head == "pair":
                return a.args[k]
            return None

        return special

    def atom_type(self, a: Atom, ty: Typer) -> tuple:
        if a.head == "var":
            if a.name not in ty.env:
                raise TypeMismatch(f"undeclared arrow variable {a.name}")
            return ty.env[a.name]
        if a.head == "gamma":
            x = a.objs[0]
            return x, self.norm(("G", ("F", x)))
        if a.head == "phi":
            y = a.objs[0]
            return self.norm(("F", ("G", y))), y
        if a.head == "app":
            s, t = ty.chain(a.args[0])
            return self.functor_obj(a.name, s), self.functor_obj(a.name, t)
        if a.head == "pair":
            s1, t1 = ty.chain(a.args[0])
            s2, t2 = ty.chain(a.args[1])
            return ("pair", s1, s2), ("pair", t1, t2)
        raise TypeMismatch(f"unknown atom {a.head}")

    def show_obj(self, o) -> str:
        if o[0] == "v":
            return o[1]
        if o[0] == "?":
            return "?" + o[1]
        if o[0] == "pair":
            return f"({self.show_obj(o[1])}, {self.show_obj(o[2])})"
        return f"{o[0]}({self.show_obj(o[1])})"

    def show(self, c: Chain, env: Optional[dict] = None) -> str:
        if c.is_identity:
            return f"1[{self.show_obj(c.idobj)}]"
        return " . ".join(self._show_atom(a) for a in c.atoms)

    def _show_atom(self, a: Atom) -> str:
        if a.head == "var":
            return a.name
        if a.head == SEG:
            return "$" + a.name
        if a.head in ("gamma", "phi"):
            return f"{a.head}[{self.show_obj(a.objs[0])}]"
        if a.head == "app":
            return f"{a.name}({self.show(a.args[0])})"
        if a.head == "pair":
            return f"({self.show(a.args[0])}, {self.show(a.args[1])})"
        return repr(a)


def _norm_chain(c: Chain, norm: Callable) -> Chain:
    atoms = tuple(
        Atom(a.head, a.name, tuple(norm(o) for o in a.objs), tuple(_norm_chain(x, norm) for x in a.args))
        for a in c.atoms
    )
    return Chain(atoms, None if atoms else norm(c.idobj))


# ------------------------------------------------------------- cartesian


def formula_to_obj(f) -> tuple:
    if isinstance(f, Letter):
        return ("v", f.name)
    if isinstance(f, MetaObj):
        return ("?", f.name)
    if isinstance(f, Top):
        return ("top",)
    if isinstance(f, Conj):
        return ("conj", formula_to_obj(f.left), formula_to_obj(f.right))
    if isinstance(f, Tensor):
        return ("tensor", formula_to_obj(f.left), formula_to_obj(f.right))
    raise CatdedError(f"not a formula: {f!r}")


def obj_to_formula(o) -> Formula:
    if o[0] == "v":
        return Letter(o[1])
    if o[0] == "?":
        return MetaObj(o[1])
    if o[0] == "top":
        return Top()
    if o[0] == "conj":
        return Conj(obj_to_formula(o[1]), obj_to_formula(o[2]))
    raise CatdedError(f"not a cartesian object: {o!r}")


def term_to_chain(t: ArrowTerm) -> Chain:
    if isinstance(t, Id):
        return ident(formula_to_obj(t.obj))
    if isinstance(t, Comp):
        return compose(term_to_chain(t.g), term_to_chain(t.f))
    if isinstance(t, Proj1):
        return single(Atom("p1", objs=(formula_to_obj(t.a), formula_to_obj(t.b))))
    if isinstance(t, Proj2):
        return single(Atom("p2", objs=(formula_to_obj(t.a), formula_to_obj(t.b))))
    if isinstance(t, Diag):
        return single(Atom("w", objs=(formula_to_obj(t.obj),)))
    if isinstance(t, Bang):
        return single(Atom("bang", objs=(formula_to_obj(t.obj),)))
    if isinstance(t, Pair):
        return single(Atom("pair", args=(term_to_chain(t.f), term_to_chain(t.g))))
    if isinstance(t, Gen):
        return single(Atom("var", t.name))
    if isinstance(t, MetaArrow):
        return single(seg(t.name))
    raise CatdedError(f"{t!r} is outside the cartesian script language")


def chain_to_term(c: Chain, ty: Typer) -> ArrowTerm:
    if c.is_identity:
        return Id(obj_to_formula(c.idobj))
    out = None
    for a in reversed(c.atoms):
        t = _atom_to_term(a, ty)
        out = t if out is None else Comp(t, out)
    return out


def _atom_to_term(a: Atom, ty: Typer) -> ArrowTerm:
    objs = [obj_to_formula(o) for o in a.objs]
    if a.head == "p1":
        return Proj1(*objs)
    if a.head == "p2":
        return Proj2(*objs)
    if a.head == "w":
        return Diag(*objs)
    if a.head == "bang":
        return Bang(*objs)
    if a.head == "pair":
        return Pair(chain_to_term(a.args[0], ty), chain_to_term(a.args[1], ty))
    if a.head == "var":
        s, t = ty.env[a.name]
        return Gen(a.name, obj_to_formula(s), obj_to_formula(t))
    if a.head == SEG:
        return MetaArrow(a.name, MetaObj("?"), MetaObj("?"))
    raise CatdedError(f"unknown atom {a.head}")


class Cartesian(Theory):
    name = "cartesian"
    families = frozenset({"w"})

    def __init__(self):
        super().__init__()
        for eq in preset_schemata(Preset.CARTESIAN):
            if eq.tag in ("id-left", "id-right", "assoc"):
                continue  # built into chains
            self.axioms[eq.tag] = _rule_from_equation(eq)
        a = ("?", "A")
        self.axioms["w-def"] = Rule(
            "w-def",
            single(Atom("w", objs=(a,))),
            single(Atom("pair", args=(ident(a), ident(a)))),
        )

    def parse_obj(self, text: str, allow_meta: bool = False):
        return formula_to_obj(parse_formula(text))

    def parse_chain(self, text: str, env: dict) -> Chain:
        variables = {n: (obj_to_formula(s), obj_to_formula(t)) for n, (s, t) in env.items()}
        return term_to_chain(parse_arrow(text, variables=variables))

    def atom_type(self, a: Atom, ty: Typer) -> tuple:
        if a.head == "var":
            if a.name not in ty.env:
                raise TypeMismatch(f"undeclared arrow variable {a.name}")
            return ty.env[a.name]
        if a.head == "p1":
            x, y = a.objs
            return ("conj", x, y), x
        if a.head == "p2":
            x, y = a.objs
            return ("conj", x, y), y
        if a.head == "w":
            (x,) = a.objs
            return x, ("conj", x, x)
        if a.head == "bang":
            (x,) = a.objs
            return x, ("top",)
        if a.head == "pair":
            s1, t1 = ty.chain(a.args[0])
            s2, t2 = ty.chain(a.args[1])
            if s1 != s2:
                raise TypeMismatch("pair components have different sources")
            return s1, ("conj", t1, t2)
        raise TypeMismatch(f"unknown atom {a.head}")

    def show_obj(self, o) -> str:
        return str(obj_to_formula(o))

    def show(self, c: Chain, env: Optional[dict] = None) -> str:
        return print_arrow(chain_to_term(c, self.typer(env or {})))


def _rule_from_equation(eq) -> Rule:
    segtypes = {}

    def walk(t: ArrowTerm):
        if isinstance(t, MetaArrow):
            segtypes[t.name] = (formula_to_obj(t.source), formula_to_obj(t.target))
        for c in t.children():
            walk(c)

    walk(eq.lhs)
    walk(eq.rhs)
    return Rule(
        eq.tag,
        term_to_chain(eq.lhs),
        term_to_chain(eq.rhs),
        tuple((n, s, t) for n, (s, t) in sorted(segtypes.items())),
    )


THEORIES: dict[str, Callable[[], Theory]] = {"adjunction": Adjunction, "cartesian": Cartesian}


def get_theory(name: str) -> Theory:
    if name not in THEORIES:
        raise CatdedError(f"unknown theory {name!r}; expected one of {sorted(THEORIES)}")
    return THEORIES[name]()
