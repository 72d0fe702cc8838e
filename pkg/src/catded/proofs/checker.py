"""Line-based equational proof scripts and their checker.

Script format::

    script: name
    theory: adjunction
    hyp: hf: F faithful
    var: g1, g2 : C -> B
    goal: gamma[B] . g1 = gamma[B] . g2 => g1 = g2
    1. F(gamma[B]) . F(g1) = F(gamma[B]) . F(g2) ; functor F 0

For an implication goal the premise is line 0.  The last line must be the
goal's conclusion, verbatim up to chain normalisation.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..core import CatdedError, TypeMismatch
from ..frontend import ParseError
from .terms import Atom, Chain, Rule, one_step, push_functor, reachable, single
from .theories import Theory, get_theory

MAX_REWRITES = 3

KINDS = (
    "axiom",
    "hyp",
    "line",
    "congruence",
    "symmetry",
    "transitivity",
    "functor",
    "naturality",
    "triangle",
    "monic",
    "faithful",
    "witness",
)


class ScriptError(CatdedError):
    """Malformed script text."""

    def __init__(self, message: str, lineno: int = 0):
        super().__init__(f"line {lineno}: {message}" if lineno else message)
        self.lineno = lineno


class UnknownJustification(CatdedError):
    pass


class StepDoesNotFollow(CatdedError):
    pass


@dataclass
class Hyp:
    label: str
    text: str


@dataclass
class Step:
    num: int
    lhs: str
    rhs: str
    just: str
    lineno: int = 0

    def with_just(self, just: str) -> "Step":
        return Step(self.num, self.lhs, self.rhs, just, self.lineno)


@dataclass
class ProofScript:
    name: str
    theory: str
    hyps: list
    vars: list  # of (names, source text, target text)
    goal: str
    steps: list
    notes: list = field(default_factory=list)

    def with_step(self, i: int, step: Step) -> "ProofScript":
        steps = list(self.steps)
        steps[i] = step
        return ProofScript(self.name, self.theory, self.hyps, self.vars, self.goal, steps, self.notes)

    def without_hyp(self, label: str) -> "ProofScript":
        hyps = [h for h in self.hyps if h.label != label]
        return ProofScript(self.name, self.theory, hyps, self.vars, self.goal, self.steps, self.notes)

    def to_text(self) -> str:
        out = [f"script: {self.name}", f"theory: {self.theory}"]
        out += [f"note: {n}" for n in self.notes]
        out += [f"hyp: {h.label}: {h.text}" for h in self.hyps]
        out += [f"var: {', '.join(names)} : {s} -> {t}" for names, s, t in self.vars]
        out.append(f"goal: {self.goal}")
        out += [f"{s.num}. {s.lhs} = {s.rhs} ; {s.just}" for s in self.steps]
        return "\n".join(out) + "\n"


@dataclass
class StepResult:
    num: int
    ok: bool
    message: str = ""


@dataclass
class Verdict:
    name: str
    ok: bool
    steps: list
    failed_step: Optional[int] = None
    message: str = ""

    def to_json(self) -> dict:
        return {
            "script": self.name,
            "ok": self.ok,
            "failed_step": self.failed_step,
            "message": self.message,
            "steps": [{"n": s.num, "ok": s.ok, "message": s.message} for s in self.steps],
        }


# ------------------------------------------------------------------ parsing

_STEP = re.compile(r"^(\d+)\.\s*(.*?)\s*;\s*(.+?)\s*$")
_HEADER = re.compile(r"^(script|theory|hyp|var|goal|note)\s*:\s*(.*?)\s*$")
_LABEL = re.compile(r"^([a-z][A-Za-z0-9_]*)\s*:\s*(.*)$")


def split_equation(text: str, lineno: int = 0) -> tuple[str, str]:
    parts = re.split(r"=(?!>)", text)
    if len(parts) != 2:
        raise ScriptError(f"expected exactly one '=' in {text!r}", lineno)
    return parts[0].strip(), parts[1].strip()


def parse_scripts(text: str) -> list[ProofScript]:
    """Parse one or more scripts; each starts at a ``script:`` header."""
    blocks: list[list[tuple[int, str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("script:") or not blocks:
            blocks.append([])
        blocks[-1].append((lineno, line))
    return [_parse_block(b) for b in blocks]


def parse_script(text: str) -> ProofScript:
    scripts = parse_scripts(text)
    if len(scripts) != 1:
        raise ScriptError(f"expected one script, found {len(scripts)}")
    return scripts[0]


def _parse_block(lines: list[tuple[int, str]]) -> ProofScript:
    name, theory, goal = "", "", None
    hyps: list[Hyp] = []
    vars_: list = []
    notes: list[str] = []
    steps: list[Step] = []
    for lineno, line in lines:
        m = _STEP.match(line)
        if m:
            lhs, rhs = split_equation(m.group(2), lineno)
            num = int(m.group(1))
            if num != len(steps) + 1:
                raise ScriptError(f"step {num} out of order (expected {len(steps) + 1})", lineno)
            steps.append(Step(num, lhs, rhs, m.group(3), lineno))
            continue
        m = _HEADER.match(line)
        if not m:
            raise ScriptError(f"cannot read {line!r}", lineno)
        key, value = m.groups()
        if steps and key != "note":
            raise ScriptError(f"header {key!r} after the first step", lineno)
        if key == "script":
            name = value
        elif key == "theory":
            theory = value
        elif key == "note":
            notes.append(value)
        elif key == "goal":
            goal = value
        elif key == "hyp":
            lm = _LABEL.match(value)
            if lm and "=" not in lm.group(1):
                hyps.append(Hyp(lm.group(1), lm.group(2)))
            else:
                hyps.append(Hyp(f"h{len(hyps) + 1}", value))
        elif key == "var":
            if ":" not in value or "->" not in value:
                raise ScriptError(f"expected 'var: names : S -> T', got {value!r}", lineno)
            names, typ = value.split(":", 1)
            src, tgt = typ.split("->", 1)
            vars_.append((tuple(n.strip() for n in names.split(",")), src.strip(), tgt.strip()))
    if not theory:
        raise ScriptError(f"script {name or '?'} has no theory header")
    if goal is None:
        raise ScriptError(f"script {name or '?'} has no goal")
    if not steps:
        raise ScriptError(f"script {name or '?'} has no steps")
    return ProofScript(name, theory, hyps, vars_, goal, steps, notes)


# ------------------------------------------------------------------ checking


_PROPERTY = re.compile(r"^(\w+)\s+(faithful|full|monic)$")


class _State:
    def __init__(self, script: ProofScript):
        self.script = script
        self.th: Theory = get_theory(script.theory)
        self.env: dict = {}
        for names, s, t in script.vars:
            src, tgt = self.th.parse_obj(s), self.th.parse_obj(t)
            for n in names:
                self.env[n] = (src, tgt)
        self.props: dict[str, tuple] = {}
        self.eqs: dict[str, tuple] = {}
        self.preorder: set[str] = set()
        for h in script.hyps:
            text = h.text.strip()
            m = _PROPERTY.match(text)
            if text == "preorder":
                self.preorder.add(h.label)
            elif m:
                self.props[h.label] = (m.group(1), m.group(2))
            elif "=" in text:
                self.eqs[h.label] = self.equation(*split_equation(text))
            else:
                raise ScriptError(f"cannot read hypothesis {h.label}: {text!r}")
        self.lines: dict[int, tuple] = {}

    @property
    def ty(self):
        return self.th.typer(self.env)

    def equation(self, lhs: str, rhs: str) -> tuple:
        a = self.th.parse_chain(lhs, self.env)
        b = self.th.parse_chain(rhs, self.env)
        ta, tb = self.ty.chain(a), self.ty.chain(b)
        if ta != tb:
            raise TypeMismatch(
                f"sides are not parallel: {self.show_type(ta)} versus {self.show_type(tb)}"
            )
        return a, b

    def show_type(self, t) -> str:
        return f"{self.th.show_obj(t[0])} -> {self.th.show_obj(t[1])}"

    def show(self, eq) -> str:
        return f"{self.th.show(eq[0], self.env)} = {self.th.show(eq[1], self.env)}"

    def has(self, prop: tuple) -> bool:
        return prop in self.props.values()

    def ref(self, token: str, allow_hyp: bool = True) -> tuple:
        if token.isdigit():
            k = int(token)
            if k not in self.lines:
                raise StepDoesNotFollow(f"line {k} is not available")
            return self.lines[k]
        if allow_hyp and token in self.eqs:
            return self.eqs[token]
        raise StepDoesNotFollow(f"no equation called {token!r}")


def _parse_just(text: str) -> tuple[str, list[str], Optional[str]]:
    words = text.replace(",", " ").split()
    if not words:
        raise UnknownJustification("empty justification")
    kind = words[0]
    if kind not in KINDS:
        raise UnknownJustification(f"unknown justification {kind!r}")
    src = None
    if "from" in words:
        i = words.index("from")
        if i + 1 >= len(words):
            raise UnknownJustification("'from' needs a line")
        src = words[i + 1]
        words = words[:i] + words[i + 2:]
    return kind, words[1:], src


def _by_rule(st: _State, eq: tuple, rule: Rule, src: Optional[str]) -> None:
    """``eq`` follows by rewriting with ``rule``: its right side from its
    left side, or (with ``src``) both sides from those of line ``src``."""
    ty = st.ty
    if src is None:
        reach = reachable(eq[0], rule, ty, MAX_REWRITES)
        if eq[1] in reach and eq[1] != eq[0]:
            return
        raise StepDoesNotFollow(f"right side is not reached from the left side by {rule.name}")
    base = st.ref(src)
    rl = reachable(base[0], rule, ty, MAX_REWRITES)
    rr = reachable(base[1], rule, ty, MAX_REWRITES)
    if eq[0] in rl and eq[1] in rr and eq != base:
        return
    raise StepDoesNotFollow(f"does not follow from line {src} by {rule.name}")


def _eq_rule(name: str, eq: tuple) -> Rule:
    return Rule(name, eq[0], eq[1], oriented=True)


def _apply_functor(st: _State, fname: str, c: Chain) -> Chain:
    th = st.th
    return push_functor(
        single(Atom("app", fname, (), (c,))),
        fname,
        st.ty,
        lambda o: th.functor_obj(fname, o),
        th.functor_special(fname),
    )


def _push(st: _State, fname: str, c: Chain) -> Chain:
    th = st.th
    return push_functor(c, fname, st.ty, lambda o: th.functor_obj(fname, o), th.functor_special(fname))


def _check_functor_name(st: _State, fname: str) -> None:
    try:
        st.th.functor_obj(fname, ("v", "X"))
    except CatdedError as e:
        raise StepDoesNotFollow(str(e)) from None


def check_step(st: _State, step: Step) -> tuple:
    kind, args, src = _parse_just(step.just)
    if kind == "witness":
        # witness X full NAME : S -> T  introduces NAME before the line is read
        m = re.match(r"^witness\s+(\w+)\s+full\s+([a-z][A-Za-z0-9_']*)\s*:\s*(.+?)\s*->\s*(.+)$", step.just.strip())
        if not m:
            raise UnknownJustification("expected 'witness X full NAME : S -> T'")
        fname, name, s, t = m.groups()
        if not st.has((fname, "full")):
            raise StepDoesNotFollow(f"no hypothesis that {fname} is full")
        if name in st.env:
            raise StepDoesNotFollow(f"{name} is already declared")
        _check_functor_name(st, fname)
        st.env[name] = (st.th.parse_obj(s), st.th.parse_obj(t))
        eq = st.equation(step.lhs, step.rhs)
        target = single(Atom("app", fname, (), (single(Atom("var", name)),)))
        if target not in eq:
            raise StepDoesNotFollow(f"one side must be {fname}({name})")
        return eq
    eq = st.equation(step.lhs, step.rhs)
    if kind == "axiom":
        if len(args) != 1 or args[0] not in st.th.axioms:
            raise StepDoesNotFollow(f"unknown axiom {' '.join(args)!r} in theory {st.th.name}")
        _by_rule(st, eq, st.th.axioms[args[0]], src)
    elif kind == "hyp":
        if len(args) != 1:
            raise UnknownJustification("expected 'hyp ID'")
        h = args[0]
        if h in st.preorder:
            if src is not None:
                raise StepDoesNotFollow("a preorder hypothesis is used on its own")
            return eq  # any parallel pair; parallelism was checked on reading
        if h not in st.eqs:
            raise StepDoesNotFollow(f"no equational hypothesis {h!r}")
        _by_rule(st, eq, _eq_rule(f"hypothesis {h}", st.eqs[h]), src)
    elif kind == "line":
        if len(args) != 1 or src is None:
            raise UnknownJustification("expected 'line J from K'")
        _by_rule(st, eq, _eq_rule(f"line {args[0]}", st.ref(args[0], allow_hyp=False)), src)
    elif kind == "congruence":
        # one replacement in a composition or pairing context; contexts under
        # a functor are the business of 'functor'
        if len(args) != 1 or src is not None:
            raise UnknownJustification("expected 'congruence K'")
        rule = _eq_rule(f"line {args[0]}", st.ref(args[0], allow_hyp=False))
        if eq[1] not in set(one_step(eq[0], rule, st.ty, into_functors=False)):
            raise StepDoesNotFollow(f"not a context instance of line {args[0]}")
    elif kind == "symmetry":
        if len(args) != 1:
            raise UnknownJustification("expected 'symmetry K'")
        a, b = st.ref(args[0])
        if eq != (b, a):
            raise StepDoesNotFollow(f"not line {args[0]} reversed")
    elif kind == "transitivity":
        if len(args) != 2:
            raise UnknownJustification("expected 'transitivity J K'")
        a, b = st.ref(args[0])
        c, d = st.ref(args[1])
        if b != c:
            raise StepDoesNotFollow(f"lines {args[0]} and {args[1]} do not chain")
        if eq != (a, d):
            raise StepDoesNotFollow("not the composite of the two lines")
    elif kind == "functor":
        if not args:
            raise UnknownJustification("expected 'functor X [K | from K]'")
        fname = args[0]
        _check_functor_name(st, fname)
        if len(args) == 2:
            a, b = st.ref(args[1])
            if eq != (_apply_functor(st, fname, a), _apply_functor(st, fname, b)):
                raise StepDoesNotFollow(f"not {fname} applied to both sides of {args[1]}")
        elif src is not None:
            base = st.ref(src)
            if eq == base or any(_push(st, fname, x) != _push(st, fname, y) for x, y in zip(eq, base)):
                raise StepDoesNotFollow(f"does not follow from line {src} by functoriality of {fname}")
        else:
            if eq[0] == eq[1] or _push(st, fname, eq[0]) != _push(st, fname, eq[1]):
                raise StepDoesNotFollow(f"not an instance of functoriality of {fname}")
    elif kind == "naturality":
        if len(args) != 1 or args[0] not in st.th.naturality:
            raise StepDoesNotFollow(f"no naturality law {' '.join(args)!r} in theory {st.th.name}")
        _by_rule(st, eq, st.th.naturality[args[0]], src)
    elif kind == "triangle":
        if len(args) != 1 or args[0] not in st.th.triangles:
            raise StepDoesNotFollow(f"no triangular law {' '.join(args)!r} in theory {st.th.name}")
        _by_rule(st, eq, st.th.triangles[args[0]], src)
    elif kind == "monic":
        if len(args) != 2:
            raise UnknownJustification("expected 'monic FAMILY K'")
        fam, k = args
        if not st.has((fam, "monic")):
            raise StepDoesNotFollow(f"no hypothesis that {fam} is monic")
        a, b = st.ref(k)
        if not (a.atoms and b.atoms and a.atoms[0] == b.atoms[0]):
            raise StepDoesNotFollow(f"line {k} does not start with the same arrow on both sides")
        head = a.atoms[0]
        if head.head != fam and not (head.head == "var" and head.name == fam):
            raise StepDoesNotFollow(f"line {k} does not start with a member of {fam}")
        src_obj = st.ty.atom(head)[0]
        rest = tuple(Chain(x.atoms[1:], None if x.atoms[1:] else src_obj) for x in (a, b))
        if eq != rest:
            raise StepDoesNotFollow(f"not line {k} with {st.th.show(single(head), st.env)} cancelled")
    elif kind == "faithful":
        if len(args) != 2:
            raise UnknownJustification("expected 'faithful X K'")
        fname, k = args
        if not st.has((fname, "faithful")):
            raise StepDoesNotFollow(f"no hypothesis that {fname} is faithful")
        _check_functor_name(st, fname)
        a, b = st.ref(k)
        if (_apply_functor(st, fname, eq[0]), _apply_functor(st, fname, eq[1])) != (
            _push(st, fname, a),
            _push(st, fname, b),
        ):
            raise StepDoesNotFollow(f"line {k} is not {fname} applied to this line")
    return eq


def check_script(script: ProofScript) -> Verdict:
    """Accepted iff every step validates and the last line is the goal."""
    results: list[StepResult] = []
    try:
        st = _State(script)
        premise, conclusion = _goal_parts(script.goal)
        if premise is not None:
            st.lines[0] = st.equation(*split_equation(premise))
    except (CatdedError, ParseError) as e:
        return Verdict(script.name, False, results, 0, f"header: {e}")
    for step in script.steps:
        try:
            st.lines[step.num] = check_step(st, step)
            results.append(StepResult(step.num, True))
        except (CatdedError, ParseError) as e:
            msg = f"{type(e).__name__}: {e}"
            results.append(StepResult(step.num, False, msg))
            return Verdict(script.name, False, results, step.num, msg)
    try:
        goal = st.equation(*split_equation(conclusion))
    except (CatdedError, ParseError) as e:
        return Verdict(script.name, False, results, None, f"goal: {e}")
    if not script.steps:
        return Verdict(script.name, False, results, None, "script has no steps")
    last = st.lines[script.steps[-1].num]
    if last != goal:
        return Verdict(
            script.name, False, results, None, f"last line {st.show(last)} is not the goal {st.show(goal)}"
        )
    return Verdict(script.name, True, results)


def _goal_parts(goal: str) -> tuple[Optional[str], str]:
    if "=>" in goal:
        a, b = goal.split("=>", 1)
        return a.strip(), b.strip()
    return None, goal.strip()


# ---------------------------------------------------------------- mutation


def mutants(script: ProofScript, i: int) -> list[str]:
    """Justifications of every other kind for step ``i`` (0-based).

    Arguments are borrowed from the original where the kinds share them, so
    that the mutant differs in the reasoning principle and nothing else.
    """
    step = script.steps[i]
    kind = step.just.split()[0]
    refs = [w for w in step.just.replace(",", " ").split() if w.isdigit()]
    r = refs[-1] if refs else str(max(step.num - 1, 0))
    r2 = refs[0] if refs else r
    hyp = next((h.label for h in script.hyps if "=" in h.text or h.text == "preorder"), "h1")
    th = get_theory(script.theory)
    axiom = next(iter(sorted(th.axioms)), "none")
    fam = next(iter(sorted(th.families)), "gamma")
    functor = "F" if script.theory == "adjunction" else "D"
    table = {
        "axiom": f"axiom {axiom} from {r}",
        "hyp": f"hyp {hyp} from {r}",
        "line": f"line {r} from {r}",
        "congruence": f"congruence {r}",
        "symmetry": f"symmetry {r}",
        "transitivity": f"transitivity {r} {r2}",
        "functor": f"functor {functor} {r}",
        "naturality": f"naturality {fam} from {r}",
        "triangle": f"triangle 1 from {r}",
        "monic": f"monic {fam} {r}",
        "faithful": f"faithful {functor} {r}",
        "witness": f"witness {functor} full mutant : A -> A",
    }
    return [table[k] for k in KINDS if k != kind]
