"""Random formulae, random structural terms and random schema instances."""
import random

from catded.core import (
    Assoc, AssocInv, Bang, Comp, Conj, Diag, Id, Letter, MetaArrow, Pair,
    Proj1, Proj2, Sym, Tensor, TensorOf, Top, depth, leaves, subterms,
    term_formulas, typecheck,
)
from catded.engine import (
    Preset, _formula_metas, instantiate, subst_formula, unify_formula,
)

LETTERS = ("p", "q")


def rand_formula(rng, preset, max_depth, letters=LETTERS):
    if max_depth == 0 or rng.random() < 0.4:
        if preset is Preset.CARTESIAN_WITH_TOP and rng.random() < 0.15:
            return Top()
        return Letter(rng.choice(letters))
    op = Tensor if preset is Preset.SYMMETRIC_ASSOCIATIVE else Conj
    return op(rand_formula(rng, preset, max_depth - 1, letters), rand_formula(rng, preset, max_depth - 1, letters))


def rand_from(rng, src, preset, budget=4):
    """A random structural term with source ``src``."""
    sym = preset is Preset.SYMMETRIC_ASSOCIATIVE
    opts = ["id"]
    if budget > 0:
        opts.append("comp")
        if sym:
            if isinstance(src, Tensor):
                opts += ["c", "tens", "tens"]
                if isinstance(src.right, Tensor):
                    opts.append("a")
                if isinstance(src.left, Tensor):
                    opts.append("ai")
        else:
            opts += ["w", "pair"]
            if isinstance(src, Conj):
                opts += ["p1", "p2", "p1", "p2"]
            if preset is Preset.CARTESIAN_WITH_TOP:
                opts.append("bang")
    k = rng.choice(opts)
    b = budget - 1
    if k == "id":
        return Id(src)
    if k == "comp":
        f = rand_from(rng, src, preset, b // 2)
        return Comp(rand_from(rng, typecheck(f)[1], preset, b // 2), f)
    if k == "c":
        return Sym(src.left, src.right)
    if k == "a":
        return Assoc(src.left, src.right.left, src.right.right)
    if k == "ai":
        return AssocInv(src.left.left, src.left.right, src.right)
    if k == "tens":
        return TensorOf(rand_from(rng, src.left, preset, b // 2), rand_from(rng, src.right, preset, b // 2))
    if k == "w":
        return Diag(src)
    if k == "pair":
        return Pair(rand_from(rng, src, preset, b // 2), rand_from(rng, src, preset, b // 2))
    if k == "p1":
        return Proj1(src.left, src.right)
    if k == "p2":
        return Proj2(src.left, src.right)
    return Bang(src)


def _path_term(src, path):
    """Projection chain picking the leaf at ``path`` of ``src``."""
    t = Id(src)
    cur = src
    for step in path:
        proj = Proj1 if step == "L" else Proj2
        t = Comp(proj(cur.left, cur.right), t)
        cur = cur.left if step == "L" else cur.right
    return t


def rand_to(rng, src, tgt):
    """A random cartesian term src -> tgt, or None if there is none."""
    if isinstance(tgt, Top):
        return Bang(src)
    if isinstance(tgt, Conj):
        l, r = rand_to(rng, src, tgt.left), rand_to(rng, src, tgt.right)
        if l is None or r is None:
            return None
        return Pair(l, r)
    paths = [p for p, x in leaves(src) if x == tgt.name]
    if not paths:
        return None
    return _path_term(src, rng.choice(paths))


def _arrow_vars(t):
    out = {}
    for s in subterms(t):
        if isinstance(s, MetaArrow):
            out.setdefault(s.name, s)
    return out


def _bound(f, objs):
    return not (_formula_metas(f) - set(objs))


def _bind_free(rng, f, objs, preset):
    for name in sorted(_formula_metas(f) - set(objs)):
        objs[name] = rand_formula(rng, preset, 1)


def instance(rng, eq, preset, max_depth=4, tries=200):
    """Random well-typed instance (lhs, rhs) of a schema, or None."""
    for _ in range(tries):
        got = _try_instance(rng, eq, preset)
        if got is None:
            continue
        lhs, rhs = got
        if all(depth(f) <= max_depth for t in got for f in term_formulas(t)):
            try:
                if typecheck(lhs) == typecheck(rhs):
                    return lhs, rhs
            except Exception:
                continue
    return None


def _try_instance(rng, eq, preset):
    objs, arrows = {}, {}
    avars = {**_arrow_vars(eq.lhs), **_arrow_vars(eq.rhs)}
    pending = sorted(avars)
    while pending:
        ready = [n for n in pending if _bound(avars[n].source, objs)]
        if not ready:
            _bind_free(rng, avars[pending[0]].source, objs, preset)
            continue
        name = ready[0]
        v = avars[name]
        src = subst_formula(v.source, objs)
        if _bound(v.target, objs) and preset is not Preset.SYMMETRIC_ASSOCIATIVE:
            t = rand_to(rng, src, subst_formula(v.target, objs))
            if t is None:
                return None
            if rng.random() < 0.5:
                pre = rand_from(rng, src, preset, 2)
                mid_t = rand_to(rng, typecheck(pre)[1], subst_formula(v.target, objs))
                if mid_t is not None:
                    t = Comp(mid_t, pre)
        else:
            t = None
            for _ in range(20):
                cand = rand_from(rng, src, preset)
                b = unify_formula(v.target, typecheck(cand)[1], objs)
                if b is not None:
                    t, objs = cand, b
                    break
            if t is None:
                return None
        arrows[name] = t
        pending.remove(name)
    for side in (eq.lhs, eq.rhs):
        for s in subterms(side):
            for x in s.label():
                if not isinstance(x, str):
                    _bind_free(rng, x, objs, preset)
    return instantiate(eq.lhs, objs, arrows), instantiate(eq.rhs, objs, arrows)


def rng(seed=0):
    return random.Random(seed)
