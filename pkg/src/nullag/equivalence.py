"""Tri-state expression equivalence: proven, numeric, or distinct.

Symbolic canonical equality (after clearing denominators) is sound but
incomplete; the fallback samples seeded guarded points with all opaque
functions instantiated from the standard test set.  Reports are
JSON-compatible and carry the seed, tolerances, and instantiations used.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from . import expr as ex
from .domain import DEFAULT_DOMAIN, Domain, instantiation_rounds, sample_points
from .expr import Bindings, Expr, ZERO, evaluate, proven_zero, sub, to_string

N_EQ = 50
EPS_EQ = 1e-9


class Verdict(str, Enum):
    PROVEN_EQUAL = "ProvenEqual"
    NUMERICALLY_EQUAL = "NumericallyEqual"
    DISTINCT = "Distinct"


def _witness_dict(b: Bindings, lhs: float, rhs: float, funcs: dict[str, Expr]) -> dict:
    return {
        "point": {k: float(v) for k, v in b.jets.items()},
        "constants": {k: float(v) for k, v in b.constants.items()},
        "instantiation": {k: to_string(v) for k, v in funcs.items()},
        "lhs": lhs,
        "rhs": rhs,
        "abs_diff": abs(lhs - rhs),
    }


@dataclass
class EquivalenceReport:
    verdict: Verdict
    seed: int = 0
    eps: float = EPS_EQ
    n_points: int = N_EQ
    instantiations: tuple[str, ...] = ()
    max_abs_diff: float = 0.0
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.verdict is not Verdict.DISTINCT

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "seed": self.seed,
            "eps": self.eps,
            "n_points": self.n_points,
            "instantiations": list(self.instantiations),
            "max_abs_diff": self.max_abs_diff,
            "witness": self.witness,
        }


def equivalent(
    e1: Expr,
    e2: Expr,
    domain: Domain | None = None,
    *,
    eps: float = EPS_EQ,
    n_points: int = N_EQ,
    seed: int = 0,
    constants: dict[str, float] | None = None,
) -> EquivalenceReport:
    """ProvenEqual when canonical forms agree (denominators cleared),
    NumericallyEqual when |e1-e2| <= eps*(1+|e1|) at n_points seeded guarded
    points per instantiation round, Distinct with a witness otherwise."""
    domain = domain or DEFAULT_DOMAIN
    if constants:
        # bind before the symbolic check; the sampler still receives the
        # values so that domain guards mentioning them stay consistent
        e1 = ex.bind_constants(e1, constants)
        e2 = ex.bind_constants(e2, constants)
    difference = sub(e1, e2)
    if proven_zero(difference):
        return EquivalenceReport(Verdict.PROVEN_EQUAL, seed=seed, eps=eps, n_points=n_points)
    rng = random.Random(seed)
    names = sorted(ex.func_names(e1) | ex.func_names(e2))
    rounds = instantiation_rounds(names)
    insts = tuple(
        "{" + ", ".join(f"{k}={to_string(v)}" for k, v in r.items()) + "}" for r in rounds if r
    )
    max_diff = 0.0
    for funcs in rounds:
        points = sample_points([e1, e2], domain, n_points, rng, funcs=funcs, constants=constants)
        for b in points:
            try:
                v1 = float(evaluate(e1, b))
                v2 = float(evaluate(e2, b))
            except ex.EvaluationError:
                continue
            diff = abs(v1 - v2)
            max_diff = max(max_diff, diff)
            if diff > eps * (1.0 + abs(v1)):
                return EquivalenceReport(
                    Verdict.DISTINCT,
                    seed=seed,
                    eps=eps,
                    n_points=n_points,
                    instantiations=insts,
                    max_abs_diff=max_diff,
                    witness=_witness_dict(b, v1, v2, funcs),
                )
    return EquivalenceReport(
        Verdict.NUMERICALLY_EQUAL,
        seed=seed,
        eps=eps,
        n_points=n_points,
        instantiations=insts,
        max_abs_diff=max_diff,
    )


def vanishes(
    e: Expr,
    domain: Domain | None = None,
    *,
    eps: float = EPS_EQ,
    n_points: int = N_EQ,
    seed: int = 0,
    constants: dict[str, float] | None = None,
) -> EquivalenceReport:
    return equivalent(e, ZERO, domain, eps=eps, n_points=n_points, seed=seed, constants=constants)
