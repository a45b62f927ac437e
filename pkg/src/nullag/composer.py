"""Composition of Lagrangians with scalar functions and derivation of
equations of motion.

For a twice-differentiable F, the composed Lagrangian F(L) has the
Euler-Lagrange equation

    p_L * F''(L) * dL/dt + (dp_L/dt - dL/dx) * F'(L) = 0,

which reduces to the plain Euler-Lagrange residual for F = identity.  When
L is null the second term vanishes identically and, wherever p_L * F''(L)
does not vanish, the dynamics collapse to the conservation rule
d/dt[L] = 0, independent of F.  Expanding that rule for an assembled pair
(B, C, f) gives the residual

    B*xddot + (B_x*xdot + 2*B_t)*xdot + C_t*x + f'(t) = 0,

kept as residual-plus-leading-coefficient; division by B is explicit and
guarded in solve_leading.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from .domain import DEFAULT_DOMAIN, Domain, Guard, collect_guards, sample_points
from .equivalence import Verdict, equivalent
from .expr import (
    Const,
    ConstSym,
    Expr,
    Power,
    Sum,
    T,
    X,
    XDDOT,
    XDOT,
    ZERO,
    add,
    apply_fn,
    as_coeff_factors,
    diff,
    evaluate,
    mul,
    pow_,
    sub,
    substitute,
    to_string,
    total_dt,
)
from .variational import Lagrangian, NullCertificationFailed, NullPair, euler_lagrange_residual, momentum

_SLOT = ConstSym("_lambda_")


class RangeGuardViolated(ex.ExprError):
    """Composition guard makes the domain infeasible."""


class LeadingCoefficientVanishes(ex.ExprError):
    """The xddot coefficient vanishes identically or on the whole domain."""


class NullCertificationMissing(ex.ExprError):
    """Operation requires a certified NullPair."""


@dataclass(frozen=True)
class Composer:
    """Scalar post-composition F with symbolic first and second derivatives.

    `body` is an expression in a single scalar slot; F(L) substitutes the
    Lagrangian body into the slot.
    """

    name: str
    body: Expr
    range_positive: bool = False
    range_nonzero: bool = False

    def __call__(self, inner: Expr) -> Expr:
        return substitute(self.body, {_SLOT: inner})

    def deriv1(self, inner: Expr) -> Expr:
        return substitute(diff(self.body, _SLOT), {_SLOT: inner})

    def deriv2(self, inner: Expr) -> Expr:
        return substitute(diff(diff(self.body, _SLOT), _SLOT), {_SLOT: inner})

    @classmethod
    def identity(cls) -> "Composer":
        return cls("identity", _SLOT)

    @classmethod
    def exp(cls) -> "Composer":
        return cls("exp", apply_fn("exp", _SLOT))

    @classmethod
    def ln(cls) -> "Composer":
        return cls("ln", apply_fn("ln", _SLOT), range_positive=True)

    @classmethod
    def reciprocal(cls) -> "Composer":
        return cls("reciprocal", pow_(_SLOT, -1), range_nonzero=True)

    @classmethod
    def power(cls, k: int) -> "Composer":
        if k == 0:
            raise ValueError("power(0) is constant and admits no dynamics")
        return cls(f"power({k})", pow_(_SLOT, k), range_nonzero=k < 0)

    @classmethod
    def from_expr(cls, body: Expr, slot: ConstSym = ConstSym("L")) -> "Composer":
        body = substitute(body, {slot: _SLOT})
        guards = {(g.positive) for g in _slot_guards(body)}
        return cls(
            f"user({to_string(body)})",
            body,
            range_positive=True in guards,
            range_nonzero=False in guards,
        )


def _slot_guards(body: Expr):
    return [g for g in collect_guards(body) if _SLOT in ex.free_atoms(g.expr)]


CATALOG = {
    "identity": Composer.identity,
    "exp": Composer.exp,
    "ln": Composer.ln,
    "reciprocal": Composer.reciprocal,
}


def compose(F: Composer, L: Lagrangian, *, check_feasible: bool = True, seed: int = 0) -> Lagrangian:
    """Lagrangian F(L.body); inherits L's guards plus F's range guard.

    Raises RangeGuardViolated when the range guard leaves no feasible
    sample points, carrying a violating point as witness.
    """
    domain = L.domain
    if F.range_positive:
        domain = domain.with_guards(Guard(L.body, positive=True))
    elif F.range_nonzero:
        domain = domain.with_guards(Guard(L.body))
    composed = Lagrangian(F(L.body), domain)
    if check_feasible and (F.range_positive or F.range_nonzero):
        rng = random.Random(seed)
        try:
            sample_points([composed.body], domain, 5, rng)
        except ex.ExprError:
            witness = None
            try:
                pts = sample_points([L.body], L.domain, 1, rng)
                b = pts[0]
                witness = {
                    "point": {k: float(v) for k, v in b.jets.items()},
                    "inner_value": float(evaluate(L.body, b)),
                }
            except ex.ExprError:
                pass
            raise RangeGuardViolated(
                f"range guard of {F.name} leaves no feasible points; witness {witness}"
            ) from None
    return composed


@dataclass(frozen=True)
class EquationOfMotion:
    """Dynamics as a canonical residual whose zero set is the motion.

    `leading` is exactly the xddot coefficient of the residual; provenance
    records the derivation route (euler-lagrange | composition |
    conservation).
    """

    residual: Expr
    leading: Expr
    provenance: str
    domain: Domain = DEFAULT_DOMAIN

    def explicit(self) -> Expr:
        return solve_leading(self)

    def __str__(self) -> str:
        return f"{to_string(self.residual)} = 0"

    def to_dict(self) -> dict:
        d = {
            "residual": to_string(self.residual),
            "leading": to_string(self.leading),
            "provenance": self.provenance,
        }
        try:
            d["explicit"] = f"x'' = {to_string(self.explicit())}"
        except LeadingCoefficientVanishes:
            d["explicit"] = None
        return d


def xddot_coefficient(e: Expr) -> Expr:
    """Coefficient of xddot^1; raises if xddot appears nonlinearly."""
    terms = e.terms if isinstance(e, Sum) else (e,)
    parts = []
    for term in terms:
        coeff, factors = as_coeff_factors(term)
        for f in factors:
            base, q = (f.base, f.exponent) if isinstance(f, Power) else (f, Fraction(1))
            if base == XDDOT:
                if q != 1:
                    raise LeadingCoefficientVanishes(
                        f"residual is nonlinear in x'': term {to_string(term)}"
                    )
                rest = tuple(g for g in factors if g is not f)
                parts.append(ex._term_from(coeff, rest))
                break
            if ex.depends_on(base, XDDOT):
                raise LeadingCoefficientVanishes(
                    f"x'' appears inside a non-polynomial factor: {to_string(term)}"
                )
    return add(*parts) if parts else ZERO


def eom_from_lagrangian(L: Lagrangian) -> EquationOfMotion:
    """Euler-Lagrange route: residual total_dt(dL/dxdot) - dL/dx."""
    residual = euler_lagrange_residual(L)
    return EquationOfMotion(residual, xddot_coefficient(residual), "euler-lagrange", L.domain)


def composed_eom(F: Composer, L: Lagrangian) -> EquationOfMotion:
    """Equation of motion of the composed Lagrangian F(L):
    p_L*F''(L)*dL/dt + (dp_L/dt - dL/dx)*F'(L); reduces to the
    Euler-Lagrange residual for F = identity."""
    p = momentum(L)
    body = L.body
    residual = add(
        mul(p, F.deriv2(body), total_dt(body)),
        mul(sub(total_dt(p), diff(body, X)), F.deriv1(body)),
    )
    return EquationOfMotion(residual, xddot_coefficient(residual), "composition", L.domain)


def conservation_eom(pair: NullPair, *, verify: bool = True, seed: int = 0) -> EquationOfMotion:
    """Equation of motion from conserving the null Lagrangian along the
    motion (d/dt of the assembled body = 0), in expanded form

        B*xddot + (B_x*xdot + 2*B_t)*xdot + C_t*x + f' = 0.

    Verified against the direct total time derivative under the null
    condition at construction."""
    if not pair.is_certified:
        raise NullCertificationMissing("conservation_eom requires a certified NullPair")
    B, C, f = pair.B, pair.C, pair.f
    residual = add(
        mul(B, XDDOT),
        mul(add(mul(diff(B, X), XDOT), mul(2, diff(B, T))), XDOT),
        mul(diff(C, T), X),
        diff(f, T),
    )
    if verify:
        direct = total_dt(pair.assembled().body)
        # difference equals -xdot * (null-condition residual), zero on pairs
        gap = sub(direct, residual)
        if not ex.proven_zero(gap):
            rep = equivalent(direct, residual, pair.domain, seed=seed)
            if rep.verdict is Verdict.DISTINCT:
                raise NullCertificationFailed(
                    f"expanded conservation residual disagrees with total_dt: {rep.witness}"
                )
    return EquationOfMotion(residual, xddot_coefficient(residual), "conservation", pair.domain)


def harmonic_eom(h, *, verify: bool = True, seed: int = 0) -> EquationOfMotion:
    """Equation of motion of an order-n harmonic via the recursion
    residual(n) = residual(n-1) + d^2/dt^2 of the order-(n-1) weighted
    velocity coefficient; cross-checked against total_dt of the body."""
    from .construct import weighted_B

    base_eom = conservation_eom(h.base, verify=verify, seed=seed)
    residual = base_eom.residual
    for m in range(h.order):
        B_m = weighted_B(h.base.B, m)
        residual = add(residual, total_dt(total_dt(B_m)))
    if verify:
        direct = total_dt(h.body)
        if not ex.proven_zero(sub(direct, residual)):
            rep = equivalent(direct, residual, h.domain, seed=seed)
            if rep.verdict is Verdict.DISTINCT:
                raise NullCertificationFailed(
                    f"harmonic recursion residual disagrees with total_dt: {rep.witness}"
                )
    return EquationOfMotion(residual, xddot_coefficient(residual), "conservation", h.domain)


def solve_leading(eom: EquationOfMotion) -> Expr:
    """Explicit form xddot = g(x, xdot, t) = -(residual - leading*xddot)/leading."""
    if eom.leading == ZERO:
        raise LeadingCoefficientVanishes("residual has no x'' term")
    rest = sub(eom.residual, mul(eom.leading, XDDOT))
    if ex.depends_on(rest, XDDOT):
        raise LeadingCoefficientVanishes("residual is not linear in x''")
    return mul(Const(Fraction(-1)), rest, pow_(eom.leading, -1))


def permissibility_check(
    F: Composer,
    pair: NullPair,
    *,
    n_points: int = 50,
    seed: int = 0,
    eps: float = 1e-9,
    constants: dict[str, float] | None = None,
) -> str:
    """Check p_L * F''(L) does not vanish on the guarded domain.

    Returns "ok" when the factor stays bounded away from zero at every
    sampled point, else "conditional" (the conservation rule then holds
    only where the factor is nonzero)."""
    body = pair.assembled().body
    factor = mul(momentum(body), F.deriv2(body))
    rng = random.Random(seed)
    try:
        points = sample_points([factor], pair.domain, n_points, rng, constants=constants)
    except ex.ExprError:
        return "conditional"
    for b in points:
        try:
            v = float(evaluate(factor, b))
        except ex.EvaluationError:
            return "conditional"
        if abs(v) <= eps:
            return "conditional"
    return "ok"
