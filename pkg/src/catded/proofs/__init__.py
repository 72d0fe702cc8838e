"""Equational proof scripts over an abstract adjunction and over the free
cartesian category, with a checker that localises the first bad step."""
from __future__ import annotations

from importlib import resources

from .checker import (
    KINDS,
    Hyp,
    ProofScript,
    ScriptError,
    Step,
    StepDoesNotFollow,
    StepResult,
    UnknownJustification,
    Verdict,
    check_script,
    mutants,
    parse_script,
    parse_scripts,
)
from .theories import get_theory

BUNDLED_FILE = "paper_proofs.eqp"


def bundled_text() -> str:
    return resources.files(__package__).joinpath(BUNDLED_FILE).read_text(encoding="utf-8")


def bundled_scripts() -> list[ProofScript]:
    return parse_scripts(bundled_text())


__all__ = [
    "KINDS",
    "Hyp",
    "ProofScript",
    "ScriptError",
    "Step",
    "StepDoesNotFollow",
    "StepResult",
    "UnknownJustification",
    "Verdict",
    "bundled_scripts",
    "bundled_text",
    "check_script",
    "get_theory",
    "mutants",
    "parse_script",
    "parse_scripts",
]
