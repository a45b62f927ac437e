"""Domain boxes, guard expressions, and seeded guarded sampling.

A Domain is a closed box for x and t together with guard expressions that
must stay nonzero (denominators) or positive (ln arguments) with a margin
eps_guard.  Sampling rejects candidate points that violate any guard; the
velocity box supplies values for xdot/xddot/xdddot and named constants are
drawn away from zero so that generic nonvanishing factors stay generic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import expr as ex
from .expr import Apply, Bindings, Expr, Power, Sum, Product, evaluate
from .parser import parse

EPS_GUARD = 1e-6


class InfeasibleDomainError(ex.ExprError):
    """The sampler could not find guarded points in the domain box."""


@dataclass(frozen=True)
class Guard:
    expr: Expr
    positive: bool = False

    def holds(self, bindings: Bindings, eps_guard: float = EPS_GUARD) -> bool:
        try:
            v = float(evaluate(self.expr, bindings, eps_guard=eps_guard))
        except ex.EvaluationError:
            return False
        if self.positive:
            return v >= eps_guard
        return abs(v) >= eps_guard


@dataclass(frozen=True)
class Domain:
    x: tuple[float, float] = (0.5, 2.0)
    t: tuple[float, float] = (0.5, 2.0)
    guards: tuple[Guard, ...] = ()
    velocity: tuple[float, float] = (-2.0, 2.0)

    def with_guards(self, *guards: Guard) -> "Domain":
        return Domain(self.x, self.t, self.guards + tuple(guards), self.velocity)


DEFAULT_DOMAIN = Domain()

# Instantiations used for numeric checks of expressions with opaque functions.
STANDARD_FUNCTIONS: tuple[Expr, ...] = (
    parse("1"),
    parse("t"),
    parse("t^2"),
    parse("exp(t/2)"),
    parse("sin(t)"),
    parse("1 + t^2"),
)


def collect_guards(e: Expr) -> tuple[Guard, ...]:
    """Guards implied by the structure of e: ln arguments positive,
    fractional-power bases positive, negative-power bases nonzero."""
    found: dict[tuple, Guard] = {}

    def walk(e: Expr) -> None:
        if isinstance(e, Apply):
            if e.func == "ln":
                g = Guard(e.arg, positive=True)
                found[(ex.sort_key(e.arg), True)] = g
            walk(e.arg)
        elif isinstance(e, Power):
            if e.exponent.denominator != 1:
                found[(ex.sort_key(e.base), True)] = Guard(e.base, positive=True)
            elif e.exponent < 0:
                key = (ex.sort_key(e.base), False)
                if (ex.sort_key(e.base), True) not in found and key not in found:
                    found[key] = Guard(e.base)
            walk(e.base)
        elif isinstance(e, Sum):
            for t in e.terms:
                walk(t)
        elif isinstance(e, Product):
            for f in e.factors:
                walk(f)

    walk(e)
    return tuple(found.values())


def instantiation_rounds(names: list[str]) -> list[dict[str, Expr]]:
    """All six standard-test-set assignments for the opaque names.

    Round r maps the j-th name to STANDARD_FUNCTIONS[(j + r) % 6], so names
    receive distinct instantiations within a round; this keeps identities
    that only hold when two opaque functions coincide from masking checks.
    """
    if not names:
        return [{}]
    k = len(STANDARD_FUNCTIONS)
    return [
        {name: STANDARD_FUNCTIONS[(j + r) % k] for j, name in enumerate(names)}
        for r in range(k)
    ]


def sample_points(
    exprs: list[Expr],
    domain: Domain,
    n: int,
    rng: random.Random,
    *,
    funcs: dict[str, Expr] | None = None,
    constants: dict[str, float] | None = None,
    eps_guard: float = EPS_GUARD,
    max_tries_per_point: int = 400,
) -> list[Bindings]:
    """Draw n guarded points for the free atoms of exprs.

    Jets and t are drawn from the domain boxes, unbound named constants
    from +/-[0.5, 2], and each candidate is rejected unless every domain
    guard and every structural guard of the (instantiated) expressions
    holds with margin eps_guard.
    """
    funcs = dict(funcs or {})
    constants = dict(constants or {})
    inst = [ex.instantiate(e, funcs) for e in exprs]
    guards = list(domain.guards)
    seen = {(ex.sort_key(g.expr), g.positive) for g in guards}
    for e in inst:
        for g in collect_guards(e):
            key = (ex.sort_key(g.expr), g.positive)
            if key not in seen:
                seen.add(key)
                guards.append(g)
    guard_exprs = [ex.instantiate(g.expr, funcs) for g in guards]
    everything = inst + guard_exprs
    jet_names = (
        sorted(set().union(*(ex.free_jets(e) for e in everything)) | {"t"})
        if everything
        else ["t"]
    )
    const_free = (
        sorted(set().union(*(ex.const_names(e) for e in everything)) - set(constants))
        if everything
        else []
    )

    points: list[Bindings] = []
    tries = 0
    limit = max_tries_per_point * n
    while len(points) < n and tries < limit:
        tries += 1
        jets = {}
        for name in jet_names:
            if name == "x":
                jets[name] = rng.uniform(*domain.x)
            elif name == "t":
                jets[name] = rng.uniform(*domain.t)
            else:
                jets[name] = rng.uniform(*domain.velocity)
        consts = dict(constants)
        for name in const_free:
            consts[name] = rng.choice((-1.0, 1.0)) * rng.uniform(0.5, 2.0)
        b = Bindings(jets=jets, funcs=funcs, constants=consts)
        if all(g.holds(b, eps_guard) for g in guards):
            points.append(b)
    if len(points) < n:
        raise InfeasibleDomainError(
            f"found only {len(points)}/{n} guarded sample points in {tries} tries; "
            f"guards: {[ex.to_string(g.expr) for g in guards]}"
        )
    return points
