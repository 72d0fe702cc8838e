"""Command-line interface: ``catded parse|equal|collapse|prove|policy-report``.

Verdicts (equal or not, collapse or not) are data and exit 0.  Errors exit
with EXIT_ERROR, a proof script that fails to check with EXIT_FAIL, and an
exhausted universe cap with EXIT_RESOURCE.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
from pathlib import Path
from typing import Optional

from .core import CatdedError, Signature, size, typecheck
from .engine import (
    DEFAULT_CAP,
    Preset,
    ResourceLimit,
    TheoryConfig,
    congruence_close,
    detect_collapse,
    term_universe,
)
from .frontend import (
    ParseError,
    PremisePolicy,
    parse_arrow,
    parse_formula,
    parse_sequent,
    parse_signature,
    policy_report,
    print_arrow,
)
from .semantics import (
    FiniteModel,
    NonStructuralTerm,
    WrongTheory,
    interpret,
    show_path,
    table_difference,
    _jsonable,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2
EXIT_RESOURCE = 3

SCHEMA = 1

THEORY_NAMES = {
    "cartesian": Preset.CARTESIAN,
    "cartesian-top": Preset.CARTESIAN_WITH_TOP,
    "sym": Preset.SYMMETRIC_ASSOCIATIVE,
}


class CliError(CatdedError):
    pass


# ------------------------------------------------------------------ helpers


def _signature(args) -> Signature:
    if args.sig:
        sig = parse_signature(Path(args.sig).read_text(encoding="utf-8"))
    else:
        sig = Signature.of({"p"} | _letters_in(args))
    gens = getattr(args, "gens", None)
    if gens:
        extra = []
        for item in gens.split(","):
            name, _, typ = item.partition(":")
            src, _, tgt = typ.partition("->")
            if not name.strip() or not tgt:
                raise CliError(f"bad generator {item!r}; expected name:source->target")
            extra.append((name.strip(), parse_formula(src), parse_formula(tgt)))
        sig = sig.with_arrows(extra)
    return sig


def _letters_in(args) -> set:
    """Letters written inside braces or generator types on the command line."""
    texts = [getattr(args, k, None) for k in ("left", "right", "text")]
    texts += getattr(args, "assume", None) or []
    found = set()
    for t in texts:
        for body in re.findall(r"\{([^}]*)\}", t or ""):
            found |= set(re.findall(r"[a-z][a-z0-9]*", body))
    for item in (getattr(args, "gens", None) or "").split(","):
        found |= set(re.findall(r"[a-z][a-z0-9]*", item.partition(":")[2]))
    return found


def _variables(sig: Signature) -> dict:
    return {name: (s, t) for name, s, t in sig.gen_arrows}


def _config(args, sig: Signature) -> TheoryConfig:
    cfg = TheoryConfig(THEORY_NAMES[args.theory], sig)
    for text in getattr(args, "assume", None) or []:
        cfg = cfg.assume(text)
    return cfg


def _emit(args, payload: dict, text: str) -> None:
    if args.emit == "json":
        print(json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True))
    else:
        print(text)


def _arrow(text: str, sig: Signature):
    return parse_arrow(text, sig, variables=_variables(sig))


# ------------------------------------------------------------------ parse


def cmd_parse(args) -> int:
    sig = _signature(args)
    kind = args.kind
    text = args.text
    if kind == "auto":
        kind = "sequent" if "|-" in text else ("arrow" if any(ch in text for ch in "{.(") and "|-" not in text else "formula")
        if kind == "formula":
            try:
                parse_formula(text)
            except ParseError:
                kind = "arrow"
    if kind == "formula":
        f = parse_formula(text)
        _emit(args, {"kind": "formula", "value": str(f)}, str(f))
    elif kind == "sequent":
        s = parse_sequent(text)
        _emit(
            args,
            {"kind": "sequent", "premises": [str(x) for x in s.premises], "conclusion": str(s.conclusion)},
            str(s),
        )
    else:
        t = _arrow(text, sig)
        src, tgt = typecheck(t, sig)
        shown = print_arrow(t)
        _emit(
            args,
            {"kind": "arrow", "value": shown, "source": str(src), "target": str(tgt), "size": size(t)},
            f"{shown} : {src} -> {tgt}",
        )
    return EXIT_OK


# ------------------------------------------------------------------ equal


def _random_tables(sig: Signature, model: FiniteModel, rng: random.Random) -> dict:
    tables = {}
    for name, s, t in sig.gen_arrows:
        cod = model.carrier(t)
        tables[name] = {x: rng.choice(cod) for x in model.carrier(s)}
    return tables


def _oracle_semantics(t1, t2) -> dict:
    m1, m2 = interpret(t1), interpret(t2)
    equal = m1 == m2
    out = {"oracle": "semantics", "equal": equal, "left": m1.to_json(), "right": m2.to_json()}
    if not equal:
        d1, d2 = m1.as_dict(), m2.as_dict()
        out["differences"] = [
            {"at": show_path(k), "left": show_path(d1.get(k, "-")), "right": show_path(d2.get(k, "-"))}
            for k in sorted(set(d1) | set(d2))
            if d1.get(k) != d2.get(k)
        ]
    return out


def _oracle_closure(cfg: TheoryConfig, t1, t2, args) -> dict:
    need = max(size(t1), size(t2))
    bound = max(args.size, need)
    universe = term_universe(cfg, bound, args.depth, args.cap)
    part = congruence_close(cfg, universe)
    c1, c2 = part.class_of(t1), part.class_of(t2)
    if c1 is None or c2 is None:
        raise CliError(f"a term lies outside the universe (size {bound}, depth {args.depth}); raise --depth")
    return {
        "oracle": "closure",
        "equal": c1 == c2,
        "bound": {"size": bound, "depth": args.depth},
        "left_class": c1,
        "right_class": c2,
        "note": "" if c1 == c2 else "not proved at this bound",
    }


def _oracle_model(sig: Signature, t1, t2, args) -> dict:
    rng = random.Random(args.seed)
    letters = sorted(sig.letters) or ["p"]
    for n in (1, 2, 3):
        model = FiniteModel.uniform(letters, n)
        model.tables = _random_tables(sig, model, rng)
        diff = table_difference(t1, t2, model)
        if diff is not None:
            x, a, b = diff
            return {
                "oracle": "model",
                "equal": False,
                "carrier_size": n,
                "input": _jsonable(x),
                "left": _jsonable(a),
                "right": _jsonable(b),
            }
    return {"oracle": "model", "equal": True, "carrier_sizes": [1, 2, 3], "seed": args.seed}


def cmd_equal(args) -> int:
    sig = _signature(args)
    t1, t2 = _arrow(args.left, sig), _arrow(args.right, sig)
    e1, e2 = typecheck(t1, sig), typecheck(t2, sig)
    if e1 != e2:
        raise CliError(f"not parallel: {e1[0]} -> {e1[1]} versus {e2[0]} -> {e2[1]}")
    cfg = _config(args, sig)
    oracles = ["semantics", "closure", "model"] if args.cross_check else [args.oracle]
    results = []
    for name in oracles:
        if name == "semantics":
            if cfg.extra_axioms:
                if args.cross_check:
                    continue
                raise CliError("the semantic oracle decides the free theory only; drop --assume")
            try:
                results.append(_oracle_semantics(t1, t2))
            except (NonStructuralTerm, WrongTheory) as e:
                if not args.cross_check:
                    raise
                results.append({"oracle": "semantics", "skipped": str(e)})
        elif name == "closure":
            results.append(_oracle_closure(cfg, t1, t2, args))
        else:
            if cfg.extra_axioms:
                if args.cross_check:
                    continue
                raise CliError("the model oracle evaluates the free theory only; drop --assume")
            results.append(_oracle_model(sig, t1, t2, args))
    # semantics decides both ways; a closure merge proves equality; a
    # differing model row proves inequality
    proved_equal = [r["oracle"] for r in results if r.get("equal") is True and r["oracle"] != "model"]
    proved_different = [r["oracle"] for r in results if r.get("equal") is False and r["oracle"] != "closure"]
    if proved_equal and proved_different:
        raise CliError(f"oracles disagree: equal by {proved_equal}, different by {proved_different}")
    if proved_equal or proved_different:
        equal = bool(proved_equal)
    else:
        equal = all(r.get("equal") for r in results if "equal" in r) and any("equal" in r for r in results)
    lines = [f"{'EQUAL' if equal else 'NOT EQUAL'}: {print_arrow(t1)} vs {print_arrow(t2)} : {e1[0]} -> {e1[1]}"]
    for r in results:
        if "skipped" in r:
            lines.append(f"  [{r['oracle']}] skipped: {r['skipped']}")
            continue
        lines.append(f"  [{r['oracle']}] {'equal' if r['equal'] else 'different'}")
        if r["oracle"] == "semantics" and not r["equal"]:
            for d in r["differences"]:
                lines.append(f"    target leaf {d['at']}: {d['left']} vs {d['right']}")
        if r["oracle"] == "closure":
            lines.append(f"    classes {r['left_class']} / {r['right_class']} at size {r['bound']['size']}, depth {r['bound']['depth']}")
        if r["oracle"] == "model" and not r["equal"]:
            lines.append(f"    carrier {r['carrier_size']}: input {r['input']} gives {r['left']} vs {r['right']}")
    _emit(
        args,
        {"left": print_arrow(t1), "right": print_arrow(t2), "equal": equal, "results": results},
        "\n".join(lines),
    )
    return EXIT_OK


# --------------------------------------------------------------- collapse


def cmd_collapse(args) -> int:
    sig = _signature(args)
    cfg = _config(args, sig)
    report = detect_collapse(cfg, args.size, args.depth, args.cap, args.slack_size, args.slack_depth)
    payload = report.to_json()
    text = [
        f"theory {cfg.preset.value}, size <= {args.size}, depth <= {args.depth}"
        + (f" (closure slack +{args.slack_size} size, +{args.slack_depth} depth)" if args.slack_size or args.slack_depth else ""),
        f"universe {report.universe_size} terms, {report.class_count_before} -> {report.class_count_after} classes",
        f"preorder at bound: {str(report.preorder_at_bound).lower()}",
        f"structural preorder at bound: {str(report.structural_preorder_at_bound).lower()}",
    ]
    for a, b in report.witnesses[:10]:
        text.append(f"  witness: {print_arrow(a)} != {print_arrow(b)}")
    if len(report.witnesses) > 10:
        text.append(f"  ... {len(report.witnesses) - 10} more")
    for g, h, d in report.generator_pairs:
        text.append(f"generators {g.name}, {h.name}: {'distinct' if d else 'EQUAL'}")
    text.append(f"generator balance: {'ok' if report.balance_ok else 'VIOLATED'}")
    if not report.balance_ok:
        a, b = report.balance_offending
        text.append(f"  offending: {print_arrow(a)} = {print_arrow(b)}")
    text.append(f"time {report.seconds:.2f}s")
    _emit(args, payload, "\n".join(text))
    return EXIT_OK


# ------------------------------------------------------------------ prove


def cmd_prove(args) -> int:
    from .proofs import bundled_text, check_script, parse_scripts

    if args.file:
        text = Path(args.file).read_text(encoding="utf-8")
        source = args.file
    else:
        text = bundled_text()
        source = "bundled"
    scripts = parse_scripts(text)
    verdicts = [check_script(s) for s in scripts]
    ok = all(v.ok for v in verdicts)
    lines = []
    if not scripts:
        print(f"warning: no scripts in {source}", file=sys.stderr)
    for v in verdicts:
        if v.ok:
            lines.append(f"PASS {v.name}")
        elif v.failed_step is not None:
            lines.append(f"FAIL {v.name} at step {v.failed_step}: {v.message}")
        else:
            lines.append(f"FAIL {v.name}: {v.message}")
    lines.append(f"{sum(v.ok for v in verdicts)}/{len(verdicts)} scripts check")
    _emit(args, {"source": source, "ok": ok, "scripts": [v.to_json() for v in verdicts]}, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------- policy report


def cmd_policy_report(args) -> int:
    if args.sequent:
        entries = [(0, args.sequent)]
    elif args.file:
        entries = list(enumerate(Path(args.file).read_text(encoding="utf-8").splitlines(), 1))
    else:
        raise CliError("give a sequent with --sequent or a file")
    subst = None
    if args.subst:
        old, sep, new = args.subst.partition("=")
        if not sep or not old.strip() or not new.strip():
            raise CliError(f"bad substitution {args.subst!r}; expected q=p")
        subst = (old.strip(), new.strip())
    policies = [PremisePolicy(p) for p in args.policy] if args.policy else list(PremisePolicy)
    reports, errors, lines = [], [], []
    for lineno, raw in entries:
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            s = parse_sequent(text)
        except CatdedError as e:
            errors.append({"line": lineno, "error": str(e)})
            lines.append(f"line {lineno}: parse error: {e}")
            continue
        for pol in policies:
            r = policy_report(s, pol, subst)
            reports.append(r)
            lines.append(f"{r['sequent']}  [{pol.value}]")
            lines.append(f"  normalized: {r['normalized']}")
            if subst:
                lines.append(f"  after {r['substitution']}: {r['instance']}  ->  {r['instance_normalized']}")
                if r["premises_shrank"]:
                    lines.append("  premise collection shrank under substitution")
            for t in r["thinnings"]:
                if t["invisible"]:
                    lines.append(f"  INVISIBLE thinning (adding {t['added']}):")
                    lines.extend("    " + x for x in t["figure"].splitlines())
            for c in r["contractions"]:
                state = "INVISIBLE" if c["invisible"] else "visible"
                lines.append(f"  contraction of {c['premise']}: {state} ({c['result']})")
            if not r["invisible_thinning"]:
                lines.append("  thinning: always visible")
    _emit(args, {"reports": reports, "errors": errors}, "\n".join(lines))
    return EXIT_OK if not errors else EXIT_ERROR


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theory", choices=sorted(THEORY_NAMES), default=argparse.SUPPRESS)
    common.add_argument("--sig", default=argparse.SUPPRESS, help="signature file")
    common.add_argument("--emit", choices=["text", "json"], default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--size", type=int, default=argparse.SUPPRESS)
    common.add_argument("--depth", type=int, default=argparse.SUPPRESS)
    common.add_argument("--cap", type=int, default=argparse.SUPPRESS, help="universe size cap")

    p = argparse.ArgumentParser(prog="catded", parents=[common], description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", parents=[common], help="parse and typecheck an expression")
    sp.add_argument("text")
    sp.add_argument("--as", dest="kind", choices=["auto", "formula", "arrow", "sequent"], default="auto")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("equal", parents=[common], help="decide equality of two parallel arrows")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--oracle", choices=["semantics", "closure", "model"], default="semantics")
    sp.add_argument("--cross-check", action="store_true", help="run every applicable oracle")
    sp.add_argument("--assume", action="append", help="extra axiom: 'lhs = rhs' or 'iso t'")
    sp.add_argument("--gens", help="extra generators, e.g. f:p->p,g:p->p")
    sp.set_defaults(func=cmd_equal)

    sp = sub.add_parser("collapse", parents=[common], help="bounded collapse detection")
    sp.add_argument("--assume", action="append", help="extra axiom: 'lhs = rhs' or 'iso t'")
    sp.add_argument("--gens", help="extra generators, e.g. f:p->p,g:p->p")
    sp.add_argument("--slack-size", type=int, default=0)
    sp.add_argument("--slack-depth", type=int, default=0)
    sp.set_defaults(func=cmd_collapse)

    sp = sub.add_parser("prove", parents=[common], help="check equational proof scripts")
    sp.add_argument("file", nargs="?", help="script file (default: the bundled scripts)")
    sp.set_defaults(func=cmd_prove)

    sp = sub.add_parser("policy-report", parents=[common], help="premise policies and hidden structural rules")
    sp.add_argument("file", nargs="?", help="file with one sequent per line")
    sp.add_argument("--sequent")
    sp.add_argument("--subst", help="letter substitution, e.g. q=p")
    sp.add_argument("--policy", action="append", choices=[x.value for x in PremisePolicy])
    sp.set_defaults(func=cmd_policy_report)
    return p


DEFAULTS = {"theory": "cartesian", "sig": None, "emit": "text", "seed": 0, "size": 7, "depth": 2, "cap": DEFAULT_CAP}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if args.size < 1 or args.depth < 0:
        print("error: bounds must be positive", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except ResourceLimit as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (CatdedError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
