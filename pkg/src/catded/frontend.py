"""Concrete syntax, sequents and premise policies.

Grammar (ASCII, ``#`` starts a comment)::

    F ::= letter | "T" | F "/\\" F | F "*" F | "(" F ")"
    t ::= "id{"F"}" | "p1{"F","F"}" | "p2{"F","F"}" | "pair("t","t")"
        | "w{"F"}" | "c{"F","F"}" | "a{"F","F","F"}" | "ai{"F","F","F"}"
        | "bang{"F"}" | "tens("t","t")" | name "{"F"->"F"}"
        | "!" name "{"F"->"F"}" | t "." t | "(" t ")"
    S ::= F ("," F)* "|-" F | "|-" F

Binary connectives bind to the left; ``.`` is composition with the right
operand acting first and associates to the right.  ``!u{A->B}`` is an
inverse witness and ``ai`` the inverse associator.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional

from .core import (
    BINARY,
    ArrowTerm,
    Assoc,
    AssocInv,
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
    MixedConnectives,
    Pair,
    Proj1,
    Proj2,
    Signature,
    Sym,
    Tensor,
    TensorOf,
    Top,
    connectives,
    formula_key,
    letters_of,
    typecheck,
)


class ParseError(CatdedError):
    """Syntax error; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.text = text


KEYWORDS = {"id", "p1", "p2", "pair", "w", "c", "a", "ai", "bang", "tens"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<op>/\\|->|\|-|[*.,(){}!=:])
  | (?P<ident>[a-z][a-z0-9]*)
  | (?P<top>T(?![A-Za-z0-9]))
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, variables: Optional[dict] = None):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.variables = variables or {}

    # token helpers
    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str) -> bool:
        return self.peek()[1] == value and self.peek()[0] != "eof"

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.peek()
        if tok[1] != value or tok[0] == "eof":
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2], self.text)
        return self.take()

    def fail(self, what: str):
        tok = self.peek()
        raise ParseError(f"expected {what}, found {tok[1] or 'end of input'!r}", tok[2], self.text)

    def done(self):
        if self.peek()[0] != "eof":
            self.fail("end of input")

    # formulae
    def formula(self) -> Formula:
        start = self.peek()[2]
        f = self.formula_atom()
        op = None
        while self.at("/\\") or self.at("*"):
            tok = self.take()
            if op is not None and tok[1] != op:
                raise MixedConnectives(f"/\\ and * mixed without parentheses at position {tok[2]}")
            op = tok[1]
            g = self.formula_atom()
            f = Conj(f, g) if op == "/\\" else Tensor(f, g)
        if len(connectives(f)) > 1:
            raise MixedConnectives(f"/\\ and * mixed in formula starting at position {start}")
        return f

    def formula_atom(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "ident":
            self.take()
            return Letter(value)
        if kind == "top":
            self.take()
            return Top()
        if value == "(":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        self.fail("a formula")

    def formulas(self, n: int) -> list[Formula]:
        self.expect("{")
        out = [self.formula()]
        for _ in range(n - 1):
            self.expect(",")
            out.append(self.formula())
        self.expect("}")
        return out

    def endpoints(self) -> tuple[Formula, Formula]:
        self.expect("{")
        src = self.formula()
        self.expect("->")
        tgt = self.formula()
        self.expect("}")
        return src, tgt

    # arrows
    def arrow(self) -> ArrowTerm:
        g = self.arrow_atom()
        if self.at("."):
            self.take()
            return Comp(g, self.arrow())
        return g

    def arrow_atom(self) -> ArrowTerm:
        kind, value, pos = self.peek()
        if value == "(":
            self.take()
            t = self.arrow()
            self.expect(")")
            return t
        if value == "!":
            self.take()
            kind, name, pos = self.peek()
            if kind != "ident" or name in KEYWORDS:
                self.fail("a witness name")
            self.take()
            return InvWitness(name, *self.endpoints())
        if kind != "ident":
            self.fail("an arrow term")
        self.take()
        if value in ("pair", "tens"):
            self.expect("(")
            f = self.arrow()
            self.expect(",")
            g = self.arrow()
            self.expect(")")
            return Pair(f, g) if value == "pair" else TensorOf(f, g)
        if value == "id":
            return Id(*self.formulas(1))
        if value == "w":
            return Diag(*self.formulas(1))
        if value == "bang":
            return Bang(*self.formulas(1))
        if value == "p1":
            return Proj1(*self.formulas(2))
        if value == "p2":
            return Proj2(*self.formulas(2))
        if value == "c":
            return Sym(*self.formulas(2))
        if value == "a":
            return Assoc(*self.formulas(3))
        if value == "ai":
            return AssocInv(*self.formulas(3))
        if self.at("{"):
            return Gen(value, *self.endpoints())
        if value in self.variables:
            src, tgt = self.variables[value]
            return Gen(value, src, tgt)
        raise ParseError(f"generator {value!r} needs endpoints {{A->B}}", pos, self.text)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.done()
    return f


def parse_arrow(
    text: str,
    sig: Optional[Signature] = None,
    check: bool = True,
    variables: Optional[dict] = None,
) -> ArrowTerm:
    """Parse an arrow term; with ``check`` it is also typechecked.

    ``variables`` maps bare names to (source, target) so that a generator
    can be written without its endpoints.
    """
    p = _Parser(text, variables)
    t = p.arrow()
    p.done()
    if check:
        typecheck(t, sig)
    return t


def parse_equation(text: str, sig=None, variables=None) -> tuple[ArrowTerm, ArrowTerm]:
    p = _Parser(text, variables)
    lhs = p.arrow()
    p.expect("=")
    rhs = p.arrow()
    p.done()
    ls, lt = typecheck(lhs, sig)
    rs, rt = typecheck(rhs, sig)
    if (ls, lt) != (rs, rt):
        from .core import TypeMismatch

        raise TypeMismatch(f"equation sides have types {ls} -> {lt} and {rs} -> {rt}")
    return lhs, rhs


# ---------------------------------------------------------------- printing


def print_formula(f: Formula) -> str:
    return str(f)


def print_arrow(t: ArrowTerm) -> str:
    if isinstance(t, Comp):
        g = print_arrow(t.g)
        if isinstance(t.g, Comp):
            g = "(" + g + ")"
        return f"{g} . {print_arrow(t.f)}"
    if isinstance(t, Id):
        return f"id{{{t.obj}}}"
    if isinstance(t, Diag):
        return f"w{{{t.obj}}}"
    if isinstance(t, Bang):
        return f"bang{{{t.obj}}}"
    if isinstance(t, Proj1):
        return f"p1{{{t.a},{t.b}}}"
    if isinstance(t, Proj2):
        return f"p2{{{t.a},{t.b}}}"
    if isinstance(t, Sym):
        return f"c{{{t.a},{t.b}}}"
    if isinstance(t, Assoc):
        return f"a{{{t.a},{t.b},{t.c}}}"
    if isinstance(t, AssocInv):
        return f"ai{{{t.a},{t.b},{t.c}}}"
    if isinstance(t, Pair):
        return f"pair({print_arrow(t.f)}, {print_arrow(t.g)})"
    if isinstance(t, TensorOf):
        return f"tens({print_arrow(t.f)}, {print_arrow(t.g)})"
    if isinstance(t, Gen):
        return f"{t.name}{{{t.source}->{t.target}}}"
    if isinstance(t, InvWitness):
        return f"!{t.name}{{{t.source}->{t.target}}}"
    if isinstance(t, MetaArrow):
        return f"?{t.name}"
    raise TypeError(f"not an arrow term: {t!r}")


# ---------------------------------------------------------------- sequents


class PremisePolicy(enum.Enum):
    SEQUENCE = "sequence"
    MULTISET = "multiset"
    SET = "set"


@dataclass(frozen=True)
class Sequent:
    premises: tuple
    conclusion: Formula

    def __str__(self) -> str:
        if not self.premises:
            return f"|- {self.conclusion}"
        return ", ".join(map(str, self.premises)) + f" |- {self.conclusion}"


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    premises = []
    if not p.at("|-"):
        premises.append(p.formula())
        while p.at(","):
            p.take()
            premises.append(p.formula())
    p.expect("|-")
    conclusion = p.formula()
    p.done()
    return Sequent(tuple(premises), conclusion)


def apply_policy(s: Sequent, pol: PremisePolicy) -> Sequent:
    if pol is PremisePolicy.SEQUENCE:
        return s
    premises = sorted(s.premises, key=formula_key)
    if pol is PremisePolicy.SET:
        premises = sorted(set(premises), key=formula_key)
    return Sequent(tuple(premises), s.conclusion)


def substitute_formula(f: Formula, old: str, new: str) -> Formula:
    if isinstance(f, Letter):
        return Letter(new) if f.name == old else f
    if isinstance(f, BINARY):
        return type(f)(substitute_formula(f.left, old, new), substitute_formula(f.right, old, new))
    return f


def substitute_letter(s: Sequent, old: str, new: str, sig: Optional[Signature] = None) -> Sequent:
    """Replace letter ``old`` by ``new`` throughout a raw sequent."""
    if sig is not None:
        from .core import UnknownGenerator

        for letter in (old, new):
            if letter not in sig.letters:
                raise UnknownGenerator(f"unknown letter {letter!r}")
    return Sequent(
        tuple(substitute_formula(f, old, new) for f in s.premises),
        substitute_formula(s.conclusion, old, new),
    )


def apply_thinning(s: Sequent, c: Formula, pol: PremisePolicy) -> tuple[Sequent, bool]:
    """Add premise ``c``; the flag says the rule left no visible trace."""
    before = apply_policy(s, pol)
    after = apply_policy(Sequent(s.premises + (c,), s.conclusion), pol)
    return after, after.premises == before.premises


def apply_contraction(s: Sequent, index: int, pol: PremisePolicy) -> tuple[Sequent, bool]:
    """Drop one of two occurrences of the premise at ``index``."""
    f = s.premises[index]
    if s.premises.count(f) < 2:
        raise CatdedError(f"premise {f} does not occur twice")
    rest = list(s.premises)
    del rest[index]
    before = apply_policy(s, pol)
    after = apply_policy(Sequent(tuple(rest), s.conclusion), pol)
    return after, after.premises == before.premises


def sequent_to_arrow_type(s: Sequent, pol: PremisePolicy) -> tuple[Formula, Formula]:
    premises = apply_policy(s, pol).premises
    if not premises:
        return Top(), s.conclusion
    folded = premises[-1]
    for f in reversed(premises[:-1]):
        folded = Conj(f, folded)
    return folded, s.conclusion


def object_image(f: Formula, pol: PremisePolicy) -> tuple[str, ...]:
    """The sequence, multiset or set of letters occurring in ``f``."""
    letters = letters_of(f)
    if pol is PremisePolicy.SEQUENCE:
        return tuple(letters)
    if pol is PremisePolicy.MULTISET:
        return tuple(sorted(letters))
    return tuple(sorted(set(letters)))


def thinning_figure(upper: Sequent, lower: Sequent) -> str:
    """A one-premise rule as two lines separated by a bar."""
    a, b = str(upper), str(lower)
    width = max(len(a), len(b))
    return "\n".join([a.center(width).rstrip(), "-" * width, b.center(width).rstrip()])


def policy_report(s: Sequent, pol: PremisePolicy, subst: Optional[tuple] = None) -> dict:
    """Normal form of ``s`` under ``pol`` and the structural steps that the
    policy hides.

    Each premise of ``s`` is read as introduced by thinning from the other
    premises; with a substitution the reading is taken after substituting,
    which is where a set policy can swallow the rule.  Repeated premises are
    read as contractions.
    """
    instance = substitute_letter(s, *subst) if subst else s
    normal = apply_policy(s, pol)
    inst_normal = apply_policy(instance, pol)
    thinnings = []
    for i, c in enumerate(instance.premises):
        rest = Sequent(instance.premises[:i] + instance.premises[i + 1:], instance.conclusion)
        lower, invisible = apply_thinning(rest, c, pol)
        upper = apply_policy(rest, pol)
        thinnings.append(
            {
                "premise": i,
                "added": str(c),
                "upper": str(upper),
                "lower": str(lower),
                "invisible": invisible,
                "figure": thinning_figure(upper, lower),
            }
        )
    contractions = []
    seen = set()
    for i, c in enumerate(instance.premises):
        if c in seen or instance.premises.count(c) < 2:
            continue
        seen.add(c)
        after, invisible = apply_contraction(instance, i, pol)
        contractions.append({"premise": str(c), "result": str(after), "invisible": invisible})
    return {
        "sequent": str(s),
        "policy": pol.value,
        "normalized": str(normal),
        "substitution": None if not subst else f"{subst[0]}:={subst[1]}",
        "instance": str(instance),
        "instance_normalized": str(inst_normal),
        "premises_shrank": len(inst_normal.premises) < len(normal.premises),
        "thinnings": thinnings,
        "invisible_thinning": any(t["invisible"] for t in thinnings),
        "contractions": contractions,
        "invisible_contraction": any(c["invisible"] for c in contractions),
    }


# -------------------------------------------------------------- signatures


def parse_signature(text: str) -> Signature:
    """Signature file: lines ``letter p`` and ``arrow f : p -> p``."""
    letters = []
    arrows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "letter":
                for name in rest.replace(",", " ").split():
                    letters.append(parse_formula(name).name)
            elif head == "arrow":
                name, _, typ = rest.partition(":")
                src, _, tgt = typ.partition("->")
                arrows.append((name.strip(), parse_formula(src), parse_formula(tgt)))
            else:
                raise ParseError(f"unknown declaration {head!r}", 0, line)
        except (ParseError, AttributeError) as e:
            raise ParseError(f"line {lineno}: {e}", 0, raw) from None
    return Signature.of(letters, arrows)
