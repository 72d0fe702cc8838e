"""Reference oracles written independently of the package's semantics.

``trace`` pushes a symbolic input through a structural term: every source
leaf carries its own path, and reading the output leaves gives the map from
target leaves to source leaves.  ``run`` evaluates a term as a plain Python
function on concrete finite carriers.  Neither touches catded.semantics.
"""
import itertools

from catded.core import (
    Assoc, AssocInv, Bang, Comp, Conj, Diag, Gen, Id, InvWitness, Letter,
    Pair, Proj1, Proj2, Sym, Tensor, TensorOf, Top, typecheck,
)


def _symbolic(f, path=""):
    if isinstance(f, Letter):
        return ("leaf", path)
    if isinstance(f, Top):
        return ()
    return (_symbolic(f.left, path + "L"), _symbolic(f.right, path + "R"))


def _read(value, f, path=""):
    if isinstance(f, Letter):
        assert value[0] == "leaf"
        return {path: value[1]}
    if isinstance(f, Top):
        return {}
    out = _read(value[0], f.left, path + "L")
    out.update(_read(value[1], f.right, path + "R"))
    return out


def apply(t, x):
    """Apply a term to a value built from nested 2-tuples."""
    if isinstance(t, Id):
        return x
    if isinstance(t, Comp):
        return apply(t.g, apply(t.f, x))
    if isinstance(t, Proj1):
        return x[0]
    if isinstance(t, Proj2):
        return x[1]
    if isinstance(t, Pair):
        return (apply(t.f, x), apply(t.g, x))
    if isinstance(t, Diag):
        return (x, x)
    if isinstance(t, Bang):
        return ()
    if isinstance(t, Sym):
        return (x[1], x[0])
    if isinstance(t, Assoc):
        a, (b, c) = x
        return ((a, b), c)
    if isinstance(t, AssocInv):
        (a, b), c = x
        return (a, (b, c))
    if isinstance(t, TensorOf):
        return (apply(t.f, x[0]), apply(t.g, x[1]))
    raise ValueError(f"no reference semantics for {t!r}")


def trace(t):
    """Map target-leaf path -> source-leaf path of a structural term."""
    src, tgt = typecheck(t)
    return _read(apply(t, _symbolic(src)), tgt)


def carrier(f, sizes):
    if isinstance(f, Letter):
        return list(range(sizes[f.name]))
    if isinstance(f, Top):
        return [()]
    return list(itertools.product(carrier(f.left, sizes), carrier(f.right, sizes)))


def run(t, sizes, tables=None):
    """Input -> output table of ``t`` with carriers ``{letter: n}``."""
    tables = tables or {}

    def ev(s, x):
        if isinstance(s, (Gen, InvWitness)):
            return tables[s.name][x]
        if isinstance(s, Comp):
            return ev(s.g, ev(s.f, x))
        if isinstance(s, Pair):
            return (ev(s.f, x), ev(s.g, x))
        if isinstance(s, TensorOf):
            return (ev(s.f, x[0]), ev(s.g, x[1]))
        return apply(s, x)

    src, _ = typecheck(t)
    return {x: ev(t, x) for x in carrier(src, sizes)}


def first_difference(t1, t2, sizes):
    a, b = run(t1, sizes), run(t2, sizes)
    for x in a:
        if a[x] != b[x]:
            return x
    return None


def formula(text_tree):
    """Tiny builder: 'p' or ('/\\', l, r) or ('*', l, r)."""
    if isinstance(text_tree, str):
        return Letter(text_tree)
    op, l, r = text_tree
    return (Conj if op == "/\\" else Tensor)(formula(l), formula(r))
