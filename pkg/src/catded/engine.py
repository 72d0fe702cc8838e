"""Axiom schemata, bounded congruence closure and collapse detection.

The closure works on a finite, subterm-closed universe of arrow terms.
Every term is interned as a node; classes of nodes are kept in a union-find
structure and axiom schemata are matched modulo the current classes (in the
manner of an e-graph), but no node is ever added: an axiom instance fires
only when both of its sides already denote nodes of the universe.
"""
from __future__ import annotations

import enum
import itertools
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

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
    MetaObj,
    Pair,
    Proj1,
    Proj2,
    Signature,
    Sym,
    Tensor,
    TensorOf,
    Top,
    TypeMismatch,
    depth,
    expand,
    formula_key,
    generator_names,
    is_structural,
    size,
    subterms,
    typecheck,
)
from .frontend import parse_arrow, parse_equation, print_arrow

DEFAULT_CAP = 200_000


class ResourceLimit(CatdedError):
    def __init__(self, message: str, count: int, cap: int):
        super().__init__(f"{message}: {count} terms exceeds cap {cap}")
        self.count = count
        self.cap = cap


class Preset(enum.Enum):
    CARTESIAN = "cartesian"
    CARTESIAN_WITH_TOP = "cartesian-top"
    SYMMETRIC_ASSOCIATIVE = "sym"

    @property
    def cartesian(self) -> bool:
        return self is not Preset.SYMMETRIC_ASSOCIATIVE


@dataclass(frozen=True)
class Equation:
    lhs: ArrowTerm
    rhs: ArrowTerm
    tag: str = "user"

    def __post_init__(self):
        if typecheck(self.lhs) != typecheck(self.rhs):
            raise TypeMismatch(f"equation {self} has sides of different types")

    def __str__(self) -> str:
        return f"{print_arrow(self.lhs)} = {print_arrow(self.rhs)}"


@dataclass(frozen=True)
class TheoryConfig:
    preset: Preset
    sig: Signature
    extra_axioms: tuple = ()

    def assume(self, text: str) -> "TheoryConfig":
        """Add ``"iso t"`` or ``"lhs = rhs"`` to the extra axioms."""
        text = text.strip()
        if text.startswith("iso "):
            t = parse_arrow(text[4:], self.sig)
            return TheoryConfig(self.preset, self.sig, self.extra_axioms + tuple(self.iso_axioms(t)))
        lhs, rhs = parse_equation(text, self.sig)
        return self.with_axioms([Equation(lhs, rhs)])

    def with_axioms(self, eqs: Iterable[Equation]) -> "TheoryConfig":
        return TheoryConfig(self.preset, self.sig, self.extra_axioms + tuple(eqs))

    def iso_axioms(self, t: ArrowTerm) -> list[Equation]:
        """Assert ``t`` invertible through a fresh named inverse witness."""
        src, tgt = typecheck(t, self.sig)
        taken = {name for name, _, _ in self.sig.gen_arrows} | set(self.witnesses())
        name = next(n for n in ("u" if i == 0 else f"u{i}" for i in itertools.count()) if n not in taken)
        u = InvWitness(name, tgt, src)
        return [
            Equation(Comp(u, t), Id(src), f"iso:{print_arrow(t)}"),
            Equation(Comp(t, u), Id(tgt), f"iso:{print_arrow(t)}"),
        ]

    def witnesses(self) -> dict[str, InvWitness]:
        out = {}
        for eq in self.extra_axioms:
            for side in (eq.lhs, eq.rhs):
                for s in subterms(side):
                    if isinstance(s, InvWitness):
                        out[s.name] = s
        return out


# ------------------------------------------------------------------ schemata

_A, _B, _C, _D = (MetaObj(x) for x in "ABCD")
_A2, _B2, _C2 = (MetaObj(x) for x in ("A'", "B'", "C'"))


def _v(name: str, src: Formula, tgt: Formula) -> MetaArrow:
    return MetaArrow(name, src, tgt)


def _comp(*ts: ArrowTerm) -> ArrowTerm:
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Comp(t, out)
    return out


def _category_schemata() -> list[Equation]:
    f = _v("f", _A, _B)
    g = _v("g", _B, _C)
    h = _v("h", _C, _D)
    return [
        Equation(Comp(Id(_B), f), f, "id-left"),
        Equation(Comp(f, Id(_A)), f, "id-right"),
        Equation(Comp(Comp(h, g), f), Comp(h, Comp(g, f)), "assoc"),
    ]


def _cartesian_schemata() -> list[Equation]:
    f = _v("f", _A, _B)
    g = _v("g", _A, _C)
    h = _v("h", _A, Conj(_B, _C))
    k = _v("h", _D, _A)
    return [
        Equation(Comp(Proj1(_B, _C), Pair(f, g)), f, "beta1"),
        Equation(Comp(Proj2(_B, _C), Pair(f, g)), g, "beta2"),
        Equation(Pair(Comp(Proj1(_B, _C), h), Comp(Proj2(_B, _C), h)), h, "eta"),
        # consequences of beta/eta, kept as schemata so that bounded
        # universes need fewer intermediate terms
        Equation(Comp(Pair(f, g), k), Pair(Comp(f, k), Comp(g, k)), "pair-nat"),
        Equation(Pair(Proj1(_A, _B), Proj2(_A, _B)), Id(Conj(_A, _B)), "surj-pair"),
    ]


def _terminal_schemata() -> list[Equation]:
    return [Equation(_v("f", _A, Top()), Bang(_A), "terminal")]


def _symmetric_schemata() -> list[Equation]:
    f = _v("f", _A, _B)
    g = _v("g", _A2, _B2)
    f1, f2 = _v("f1", _A, _B), _v("f2", _B, _C)
    g1, g2 = _v("g1", _A2, _B2), _v("g2", _B2, _C2)
    x, y, z = _v("x", _A, _B), _v("y", _A2, _B2), _v("z", _C, _D)
    X, Y, Z = MetaObj("X"), MetaObj("Y"), MetaObj("Z")
    T = Tensor
    return [
        Equation(TensorOf(Id(_A), Id(_B)), Id(T(_A, _B)), "tens-id"),
        Equation(
            TensorOf(Comp(f2, f1), Comp(g2, g1)),
            Comp(TensorOf(f2, g2), TensorOf(f1, g1)),
            "tens-comp",
        ),
        Equation(Comp(Sym(_B, _B2), TensorOf(f, g)), Comp(TensorOf(g, f), Sym(_A, _A2)), "c-nat"),
        Equation(
            Comp(Assoc(_B, _B2, _D), TensorOf(x, TensorOf(y, z))),
            Comp(TensorOf(TensorOf(x, y), z), Assoc(_A, _A2, _C)),
            "a-nat",
        ),
        Equation(
            Comp(AssocInv(_B, _B2, _D), TensorOf(TensorOf(x, y), z)),
            Comp(TensorOf(x, TensorOf(y, z)), AssocInv(_A, _A2, _C)),
            "ai-nat",
        ),
        Equation(Comp(Sym(_B, _A), Sym(_A, _B)), Id(T(_A, _B)), "c-inv"),
        Equation(Comp(AssocInv(_A, _B, _C), Assoc(_A, _B, _C)), Id(T(_A, T(_B, _C))), "a-iso1"),
        Equation(Comp(Assoc(_A, _B, _C), AssocInv(_A, _B, _C)), Id(T(T(_A, _B), _C)), "a-iso2"),
        Equation(
            Comp(Assoc(T(_A, _B), _C, _D), Assoc(_A, _B, T(_C, _D))),
            _comp(
                TensorOf(Assoc(_A, _B, _C), Id(_D)),
                Assoc(_A, T(_B, _C), _D),
                TensorOf(Id(_A), Assoc(_B, _C, _D)),
            ),
            "pentagon",
        ),
        Equation(
            Sym(T(X, Y), Z),
            _comp(
                AssocInv(Z, X, Y),
                TensorOf(Sym(X, Z), Id(Y)),
                Assoc(X, Z, Y),
                TensorOf(Id(X), Sym(Y, Z)),
                AssocInv(X, Y, Z),
            ),
            "hexagon1",
        ),
        Equation(
            Sym(X, T(Y, Z)),
            _comp(
                Assoc(Y, Z, X),
                TensorOf(Id(Y), Sym(X, Z)),
                AssocInv(Y, X, Z),
                TensorOf(Sym(X, Y), Id(Z)),
                Assoc(X, Y, Z),
            ),
            "hexagon2",
        ),
    ]


def preset_schemata(preset: Preset) -> list[Equation]:
    out = _category_schemata()
    if preset.cartesian:
        out += _cartesian_schemata()
    if preset is Preset.CARTESIAN_WITH_TOP:
        out += _terminal_schemata()
    if preset is Preset.SYMMETRIC_ASSOCIATIVE:
        out += _symmetric_schemata()
    return out


def axiom_schemata(cfg: TheoryConfig) -> list[Equation]:
    return preset_schemata(cfg.preset) + list(cfg.extra_axioms)


def metavariables(t: ArrowTerm) -> set[str]:
    out = set()
    for s in subterms(t):
        if isinstance(s, MetaArrow):
            out.add(s.name)
        for x in s.label():
            if not isinstance(x, str):
                out |= _formula_metas(x)
    return out


def _formula_metas(f) -> set[str]:
    if isinstance(f, MetaObj):
        return {f.name}
    if isinstance(f, (Conj, Tensor)):
        return _formula_metas(f.left) | _formula_metas(f.right)
    return set()


def unify_formula(pat, f, b: dict) -> Optional[dict]:
    if isinstance(pat, MetaObj):
        bound = b.get(pat.name)
        if bound is None:
            b = dict(b)
            b[pat.name] = f
            return b
        return b if bound == f else None
    if type(pat) is not type(f):
        return None
    if isinstance(pat, (Conj, Tensor)):
        b = unify_formula(pat.left, f.left, b)
        return None if b is None else unify_formula(pat.right, f.right, b)
    if isinstance(pat, Letter):
        return b if pat.name == f.name else None
    return b


def subst_formula(pat, b: dict):
    if isinstance(pat, MetaObj):
        return b[pat.name]
    if isinstance(pat, (Conj, Tensor)):
        return type(pat)(subst_formula(pat.left, b), subst_formula(pat.right, b))
    return pat


def instantiate(t: ArrowTerm, objs: dict, arrows: dict) -> ArrowTerm:
    """Substitute formula and arrow metavariables in a schema side."""
    if isinstance(t, MetaArrow):
        return arrows[t.name]
    label = tuple(x if isinstance(x, str) else subst_formula(x, objs) for x in t.label())
    kids = tuple(instantiate(c, objs, arrows) for c in t.children())
    return t.rebuild(label, kids)


# ---------------------------------------------------------------- universe


def formulas_upto(preset: Preset, letters, depth_bound: int) -> list[Formula]:
    atoms: list[Formula] = [Letter(x) for x in sorted(letters)]
    if preset is Preset.CARTESIAN_WITH_TOP:
        atoms.append(Top())
    op = Conj if preset.cartesian else Tensor
    level = list(atoms)
    for _ in range(depth_bound):
        level = atoms + [op(x, y) for x in level for y in level]
        level = list(dict.fromkeys(level))
    return sorted(level, key=lambda f: (depth(f), formula_key(f)))


def _leaf_terms(cfg: TheoryConfig, formulas: list[Formula]) -> list[ArrowTerm]:
    fs = set(formulas)
    out: list[ArrowTerm] = [Id(a) for a in formulas]
    if cfg.preset.cartesian:
        out += [Diag(a) for a in formulas if Conj(a, a) in fs]
        for proj in (Proj1, Proj2):
            out += [proj(a, b) for a in formulas for b in formulas if Conj(a, b) in fs]
        if cfg.preset is Preset.CARTESIAN_WITH_TOP:
            out += [Bang(a) for a in formulas]
    else:
        out += [Sym(a, b) for a in formulas for b in formulas if Tensor(a, b) in fs]
        for assoc in (Assoc, AssocInv):
            out += [
                assoc(a, b, c)
                for a in formulas
                for b in formulas
                for c in formulas
                if Tensor(a, Tensor(b, c)) in fs and Tensor(Tensor(a, b), c) in fs
            ]
    named = [Gen(n, s, t) for n, s, t in cfg.sig.gen_arrows]
    named += list(cfg.witnesses().values())
    out += [t for t in named if t.source in fs and t.target in fs]
    return out


def term_universe(
    cfg: TheoryConfig,
    size_bound: int,
    depth_bound: int,
    cap: int = DEFAULT_CAP,
) -> list[ArrowTerm]:
    """All well-typed terms of size <= size_bound over formulae of depth
    <= depth_bound, in a deterministic order (by size, then construction)."""
    if size_bound < 1 or depth_bound < 0:
        raise CatdedError("bounds must be positive")
    letters = cfg.sig.letters or {"p"}
    formulas = formulas_upto(cfg.preset, letters, depth_bound)
    fs = set(formulas)
    typ: dict[ArrowTerm, tuple] = {}
    by_size: dict[int, list] = defaultdict(list)
    by_src: dict[tuple, list] = defaultdict(list)
    count = 0

    def add(t: ArrowTerm, n: int, st: tuple) -> None:
        nonlocal count
        count += 1
        if count > cap:
            raise ResourceLimit(f"universe (size {size_bound}, depth {depth_bound})", count, cap)
        typ[t] = st
        by_size[n].append(t)
        by_src[(n, st[0])].append(t)

    for t in _leaf_terms(cfg, formulas):
        add(t, 1, typecheck(t))
    cart = cfg.preset.cartesian
    for n in range(3, size_bound + 1, 2):
        for a in range(1, n - 1, 2):
            b = n - 1 - a
            for f in by_size[b]:
                fs_, ft = typ[f]
                for g in by_src[(a, ft)]:
                    add(Comp(g, f), n, (fs_, typ[g][1]))
            for f in by_size[a]:
                fs_, ft = typ[f]
                if cart:
                    for g in by_src[(b, fs_)]:
                        tgt = Conj(ft, typ[g][1])
                        if tgt in fs:
                            add(Pair(f, g), n, (fs_, tgt))
                else:
                    for g in by_size[b]:
                        gs, gt = typ[g]
                        src, tgt = Tensor(fs_, gs), Tensor(ft, gt)
                        if src in fs and tgt in fs:
                            add(TensorOf(f, g), n, (src, tgt))
    return [t for n in sorted(by_size) for t in by_size[n]]


# ------------------------------------------------------------------ closure


@dataclass
class _Rule:
    name: str
    pattern: ArrowTerm
    other: ArrowTerm
    kind: str = "match"  # "match", "ground" or "terminal"


def _compile_rules(eqs: Iterable[Equation]) -> list[_Rule]:
    rules = []
    for eq in eqs:
        eq = Equation(expand(eq.lhs), expand(eq.rhs), eq.tag)
        lv, rv = metavariables(eq.lhs), metavariables(eq.rhs)
        if not lv and not rv:
            rules.append(_Rule(eq.tag, eq.lhs, eq.rhs, "ground"))
        elif rv <= lv and not isinstance(eq.lhs, MetaArrow):
            rules.append(_Rule(eq.tag, eq.lhs, eq.rhs))
        elif lv <= rv and not isinstance(eq.rhs, MetaArrow):
            rules.append(_Rule(eq.tag, eq.rhs, eq.lhs))
        elif eq.tag == "terminal":
            rules.append(_Rule(eq.tag, eq.lhs, eq.rhs, "terminal"))
        else:
            raise CatdedError(f"cannot orient schema {eq.tag}: {eq}")
    return rules


class Closure:
    """Union-find over interned universe nodes with congruence and axiom
    matching modulo classes.  Single owner: not safe to mutate concurrently."""

    def __init__(self, cfg: TheoryConfig):
        self.cfg = cfg
        self.ops: list[type] = []
        self.labels: list[tuple] = []
        self.kids: list[tuple] = []
        self.types: list[tuple] = []
        self.depths: list[int] = []  # max formula depth over the node's subterms
        self.terms: list[ArrowTerm] = []
        self.gens: list[tuple] = []
        self.parent: list[int] = []
        self.index: dict = {}
        self.table: dict = {}
        self.balance_violation: Optional[tuple] = None
        self.unions = 0
        self.rounds = 0

    # interning
    def add(self, t: ArrowTerm) -> int:
        if isinstance(t, Diag):
            t = expand(t)
        kids = tuple(self.add(c) for c in t.children())
        key = (type(t), t.label(), kids)
        node = self.index.get(key)
        if node is not None:
            return node
        node = len(self.ops)
        self.index[key] = node
        self.table[key] = node
        self.ops.append(type(t))
        self.labels.append(t.label())
        self.kids.append(kids)
        typ = self._node_type(t, kids)
        self.types.append(typ)
        self.depths.append(max([depth(typ[0]), depth(typ[1])] + [self.depths[k] for k in kids]))
        self.terms.append(t.rebuild(t.label(), tuple(self.terms[k] for k in kids)) if kids else t)
        if kids:
            self.gens.append(tuple(sorted(self.gens[kids[0]] + self.gens[kids[1]])))
        else:
            self.gens.append(tuple(generator_names(t)))
        self.parent.append(node)
        return node

    def _node_type(self, t: ArrowTerm, kids: tuple) -> tuple:
        if not kids:
            return typecheck(t)
        a, b = (self.types[k] for k in kids)
        if isinstance(t, Comp):
            return (b[0], a[1])
        if isinstance(t, Pair):
            return (a[0], Conj(a[1], b[1]))
        return (Tensor(a[0], b[0]), Tensor(a[1], b[1]))

    # union-find
    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.unions += 1
        return True

    def same(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def index_of(self, t: ArrowTerm) -> Optional[int]:
        """Node of a term interned exactly (not modulo classes), if any."""
        if isinstance(t, Diag):
            t = expand(t)
        kids = []
        for c in t.children():
            k = self.index_of(c)
            if k is None:
                return None
            kids.append(k)
        return self.index.get((type(t), t.label(), tuple(kids)))

    def rebuild(self) -> bool:
        """Restore the congruence invariant; true if anything merged."""
        merged = False
        composite = [i for i, k in enumerate(self.kids) if k]
        while True:
            changed = False
            table = {}
            for i in composite:
                key = (self.ops[i], self.labels[i], tuple(self.find(k) for k in self.kids[i]))
                other = table.get(key)
                if other is None:
                    table[key] = i
                elif self.union(i, other):
                    changed = True
            if not changed:
                break
            merged = True
        for i, k in enumerate(self.kids):
            if not k:
                table[(self.ops[i], self.labels[i], ())] = i
        self.table = table
        return merged

    # matching
    def _index_classes(self) -> None:
        # one node per canonical (op, label, child classes) signature
        self.members: dict = defaultdict(list)
        self.by_op: dict = defaultdict(list)
        for key, i in self.table.items():
            self.members[(self.find(i), key[0])].append(i)
            self.by_op[key[0]].append(i)

    def _match_node(self, p: ArrowTerm, node: int, b: dict) -> Iterator[dict]:
        if type(p) is not self.ops[node]:
            return
        for pl, l in zip(p.label(), self.labels[node]):
            if isinstance(pl, str):
                if pl != l:
                    return
            else:
                b = unify_formula(pl, l, b)
                if b is None:
                    return
        yield from self._match_children(p.children(), self.kids[node], b)

    def _match_children(self, pats, kids, b: dict) -> Iterator[dict]:
        if not pats:
            yield b
            return
        for b2 in self._match_class(pats[0], kids[0], b):
            yield from self._match_children(pats[1:], kids[1:], b2)

    def _match_class(self, p: ArrowTerm, cls: int, b: dict) -> Iterator[dict]:
        cls = self.find(cls)
        if isinstance(p, MetaArrow):
            key = "?" + p.name
            bound = b.get(key)
            if bound is not None:
                if self.find(bound) == cls:
                    yield b
                return
            src, tgt = self.types[cls]
            b2 = unify_formula(p.source, src, b)
            if b2 is not None:
                b2 = unify_formula(p.target, tgt, b2)
            if b2 is not None:
                b2 = dict(b2)
                b2[key] = cls
                yield b2
            return
        for node in self.members.get((cls, type(p)), ()):
            yield from self._match_node(p, node, b)

    def lookup(self, p: ArrowTerm, b: dict) -> Optional[int]:
        """Node for an instantiated pattern, modulo classes, if present."""
        if isinstance(p, MetaArrow):
            return b["?" + p.name]
        kids = []
        for c in p.children():
            k = self.lookup(c, b)
            if k is None:
                return None
            kids.append(self.find(k))
        label = tuple(x if isinstance(x, str) else subst_formula(x, b) for x in p.label())
        return self.table.get((type(p), label, tuple(kids)))

    def _record_balance(self, a: int, b: int) -> None:
        if self.balance_violation is None:
            ra, rb = self.find(a), self.find(b)
            if self.gens[ra] != self.gens[rb]:
                self.balance_violation = (self.terms[ra], self.terms[rb])

    def run(self, rules: list[_Rule], max_rounds: int = 10_000) -> None:
        self.rebuild()
        for _ in range(max_rounds):
            self.rounds += 1
            self._index_classes()
            pending = []
            for rule in rules:
                if rule.kind == "ground":
                    a = self.lookup(rule.pattern, {})
                    b = self.lookup(rule.other, {})
                    if a is not None and b is not None and not self.same(a, b):
                        pending.append((a, b))
                elif rule.kind == "terminal":
                    for cls in {self.find(i) for i in range(len(self.ops))}:
                        src, tgt = self.types[cls]
                        if isinstance(tgt, Top):
                            bang = self.table.get((Bang, (src,), ()))
                            if bang is not None and not self.same(cls, bang):
                                pending.append((cls, bang))
                else:
                    for node in self.by_op.get(type(rule.pattern), ()):
                        for b in self._match_node(rule.pattern, node, {}):
                            other = self.lookup(rule.other, b)
                            if other is not None and not self.same(node, other):
                                pending.append((node, other))
            changed = False
            for a, b in pending:
                self._record_balance(a, b)
                changed |= self.union(a, b)
            changed |= self.rebuild()
            if not changed:
                return


@dataclass
class Partition:
    """Classes of the universe after closure.

    ``rep[i]`` is the smallest universe index in the class of term ``i``.
    """

    universe: list
    rep: list
    nodes: list
    closure: Closure
    seconds: float = 0.0

    def classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = defaultdict(list)
        for i, r in enumerate(self.rep):
            out[r].append(i)
        return dict(out)

    def equal(self, i: int, j: int) -> bool:
        return self.rep[i] == self.rep[j]

    def proves(self, t1: ArrowTerm, t2: ArrowTerm) -> bool:
        """True if both terms are in the universe and share a class."""
        c = self.closure
        a = c.index_of(t1)
        b = c.index_of(t2)
        return a is not None and b is not None and c.same(a, b)

    def class_of(self, t: ArrowTerm) -> Optional[int]:
        n = self.closure.index_of(t)
        return None if n is None else self.closure.find(n)

    def merged_pairs(self) -> list[tuple[int, int]]:
        return [(r, i) for i, r in enumerate(self.rep) if r != i]


def congruence_close(cfg: TheoryConfig, universe: list[ArrowTerm], extra_rules: Iterable[Equation] = ()) -> Partition:
    start = time.perf_counter()
    c = Closure(cfg)
    nodes = [c.add(t) for t in universe]
    c.run(_compile_rules(axiom_schemata(cfg) + list(extra_rules)))
    first: dict[int, int] = {}
    rep = []
    for i, n in enumerate(nodes):
        root = c.find(n)
        rep.append(first.setdefault(root, i))
    return Partition(universe, rep, nodes, c, time.perf_counter() - start)


# ----------------------------------------------------------------- reports


@dataclass
class CollapseReport:
    universe_size: int
    class_count_before: int
    class_count_after: int
    merged_pairs: list
    preorder_at_bound: bool
    witnesses: list
    structural_preorder_at_bound: bool
    structural_witnesses: list
    balance_ok: bool
    balance_offending: Optional[tuple]
    seconds: float
    bounds: dict = field(default_factory=dict)
    generator_pairs: list = field(default_factory=list)  # (g, h, distinct)

    def to_json(self) -> dict:
        show = print_arrow
        return {
            "schema": 1,
            "bounds": self.bounds,
            "universe_size": self.universe_size,
            "class_count_before": self.class_count_before,
            "class_count_after": self.class_count_after,
            "merged_pairs": [[show(a), show(b)] for a, b in self.merged_pairs],
            "preorder_at_bound": self.preorder_at_bound,
            "witnesses": [[show(a), show(b)] for a, b in self.witnesses],
            "structural_preorder_at_bound": self.structural_preorder_at_bound,
            "structural_witnesses": [[show(a), show(b)] for a, b in self.structural_witnesses],
            "generator_balance": {
                "ok": self.balance_ok,
                "offending": None if self.balance_offending is None else [show(t) for t in self.balance_offending],
            },
            "generators": [
                {"pair": [show(g), show(h)], "distinct": d} for g, h, d in self.generator_pairs
            ],
        }


def hom_witnesses(
    part: Partition,
    structural_only: bool = False,
    size_bound: Optional[int] = None,
    depth_bound: Optional[int] = None,
) -> list[tuple]:
    """One pair of distinct classes per hom-set that still has several.

    With bounds given, only terms inside them are judged (the closure itself
    may have used a larger universe).
    """
    seen: dict[tuple, int] = {}
    out = []
    flagged = set()
    for i, t in enumerate(part.universe):
        if structural_only and not is_structural(t):
            continue
        if size_bound is not None and size(t) > size_bound:
            continue
        if depth_bound is not None and part.closure.depths[part.nodes[i]] > depth_bound:
            continue
        typ = part.closure.types[part.nodes[i]]
        r = part.rep[i]
        first = seen.setdefault(typ, r)
        if first != r and typ not in flagged:
            flagged.add(typ)
            out.append((part.universe[first], part.universe[r]))
    return out


def detect_collapse(
    cfg: TheoryConfig,
    size_bound: int,
    depth_bound: int,
    cap: int = DEFAULT_CAP,
    slack_size: int = 0,
    slack_depth: int = 0,
) -> CollapseReport:
    """Bounded semi-decision: ``preorder_at_bound`` false at one bound does
    not prove that the theory is not a preorder.

    The closure runs on the universe enlarged by the slack; the preorder
    question is asked only of terms inside the original bounds.
    """
    start = time.perf_counter()
    universe = term_universe(cfg, size_bound + slack_size, depth_bound + slack_depth, cap)
    part = congruence_close(cfg, universe)
    distinct = len(set(part.nodes))
    merged = [(universe[r], universe[i]) for r, i in part.merged_pairs()]
    witnesses = hom_witnesses(part, size_bound=size_bound, depth_bound=depth_bound)
    structural = hom_witnesses(part, structural_only=True, size_bound=size_bound, depth_bound=depth_bound)
    violation = part.closure.balance_violation
    gens = [Gen(n, a, b) for n, a, b in cfg.sig.gen_arrows]
    gen_pairs = [
        (g, h, not part.proves(g, h))
        for i, g in enumerate(gens)
        for h in gens[i + 1:]
        if (g.source, g.target) == (h.source, h.target) and part.class_of(g) is not None
    ]
    return CollapseReport(
        universe_size=len(universe),
        class_count_before=distinct,
        class_count_after=len(part.classes()),
        merged_pairs=merged,
        preorder_at_bound=not witnesses,
        witnesses=witnesses,
        structural_preorder_at_bound=not structural,
        structural_witnesses=structural,
        balance_ok=violation is None,
        balance_offending=violation,
        seconds=time.perf_counter() - start,
        bounds={
            "size": size_bound,
            "depth": depth_bound,
            "slack_size": slack_size,
            "slack_depth": slack_depth,
            "preset": cfg.preset.value,
        },
        generator_pairs=gen_pairs,
    )


def preorder_and_fullness_checks(
    cfg: TheoryConfig,
    size_bound: int,
    depth_bound: int,
    cap: int = DEFAULT_CAP,
) -> tuple[bool, bool]:
    """(preorder at bound, diagonal functor full at bound).

    Fullness: every arrow (g, g') of the product category between diagonal
    objects is D h for some h of the universe, i.e. some h is provably equal
    to both g and g'.
    """
    if not cfg.preset.cartesian:
        raise CatdedError("fullness of the diagonal functor needs a cartesian preset")
    universe = term_universe(cfg, size_bound, depth_bound, cap)
    part = congruence_close(cfg, universe)
    preorder = not hom_witnesses(part)
    by_type: dict[tuple, list[int]] = defaultdict(list)
    for i in range(len(universe)):
        by_type[part.closure.types[part.nodes[i]]].append(i)
    full = True
    for members in by_type.values():
        reps = sorted({part.rep[i] for i in members})
        for g, g2 in itertools.product(reps, repeat=2):
            # h must be provably equal to g and to g'
            if not any(part.rep[h] == g and part.rep[h] == g2 for h in members):
                full = False
                break
        if not full:
            break
    return preorder, full


def w_iso_criterion(cfg: TheoryConfig, size_bound: int, depth_bound: int, b: Formula, cap: int = DEFAULT_CAP) -> bool:
    """True iff the closure proves p1{B,B} = p2{B,B}; at bound this is the
    same as w{B} being invertible with inverse p1{B,B}."""
    if not cfg.preset.cartesian:
        raise CatdedError("needs a cartesian preset")
    universe = term_universe(cfg, size_bound, depth_bound, cap)
    part = congruence_close(cfg, universe)
    return part.proves(Proj1(b, b), Proj2(b, b))


def generator_balance_check(pairs: Iterable[tuple]) -> tuple[bool, Optional[tuple]]:
    """Every pair must carry the same multiset of generator-arrow names."""
    for a, b in pairs:
        if Counter(generator_names(a)) != Counter(generator_names(b)):
            return False, (a, b)
    return True, None


def partition_balance(part: Partition) -> tuple[bool, Optional[tuple]]:
    return generator_balance_check(
        (part.universe[r], part.universe[i]) for r, i in part.merged_pairs()
    )
