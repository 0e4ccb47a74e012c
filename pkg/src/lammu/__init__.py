"""Lambda-mu calculi with non-idempotent intersection and union types.

Two calculi are covered: lambda-mu with big-step beta and mu rules, and its
small-step variant with explicit substitutions and replacements acting at a
distance.  Typing derivations carry a size that bounds reduction lengths.
"""

from .derivation import (
    Derivation, DerivationError, Judgment, builder, check_derivation, derivation_size,
    from_json, is_valid, relevance_check, render, to_json,
)
from .lmus import (
    LmStep, eta_lmus, eta_lmus_oracle, lmus_step_all, lmus_subject_expand, lmus_subject_reduce,
    nonerasing_step_all, postpone, project, simulate, synthesize_S_lmus,
)
from .meta import replace, substitute
from .reduction import FuelExhausted, Step, eta_bruteforce, eta_max, head_step, reduce, step_all
from .syntax import (
    App, ERep, ESub, Lam, Mu, Named, ParseError, Var, alpha_eq, free_names, free_vars, parse,
    pretty, size,
)
from .transform import (
    BoundReport, SynthesisFailure, subject_expand, subject_reduce, synthesize_H, synthesize_S,
    verify_bound,
)

__all__ = [
    "App", "BoundReport", "Derivation", "DerivationError", "ERep", "ESub", "FuelExhausted",
    "Judgment", "Lam", "LmStep", "Mu", "Named", "ParseError", "Step", "SynthesisFailure", "Var",
    "alpha_eq", "builder", "check_derivation", "derivation_size", "eta_bruteforce", "eta_lmus",
    "eta_lmus_oracle", "eta_max", "free_names", "free_vars", "from_json", "head_step", "is_valid",
    "lmus_step_all", "lmus_subject_expand", "lmus_subject_reduce", "nonerasing_step_all", "parse",
    "postpone", "pretty", "project", "reduce", "relevance_check", "render", "replace", "simulate",
    "size", "step_all", "subject_expand", "subject_reduce", "substitute", "synthesize_H",
    "synthesize_S", "synthesize_S_lmus", "to_json", "verify_bound",
]
