"""Catalog of dissipative systems admitting null Lagrangians.

For the family xddot + alpha*xdot^2 + beta*xdot + gamma*x = 0 the
condition d(B)/dt = d(xC)/dx pins down which coefficient combinations
admit a null Lagrangian:

* constant coefficients: the law of inertia (all zero), the tied damped
  oscillator (alpha = 0, gamma = beta^2/4), and quadratic damping
  (beta = gamma = 0); the plain harmonic oscillator admits none;
* time-dependent beta(t), gamma(t) with alpha = 0: gamma is tied to beta
  through gamma = beta'/2 + beta^2/4;
* displacement-dependent alpha(x), gamma(x) with constant beta: gamma
  solves x*gamma' + gamma*(1 + alpha*x) = beta^2/4.

Each admissible case is emitted as a SystemCase bundling the certified
pair, its equation of motion, and the constraint relations; inadmissible
cases are first-class results carrying a witness, not exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from . import expr as ex
from .composer import EquationOfMotion, conservation_eom, eom_from_lagrangian
from .construct import AntiderivativeUnsupported, antiderivative
from .domain import DEFAULT_DOMAIN, Domain, Guard
from .equivalence import Verdict, equivalent, vanishes
from .expr import (
    Const,
    ConstSym,
    Expr,
    T,
    X,
    XDDOT,
    XDOT,
    ZERO,
    add,
    apply_fn,
    diff,
    mul,
    pow_,
    sub,
    to_string,
)
from .parser import parse
from .variational import Lagrangian, NullPair

B0 = ConstSym("B0")


class ConstraintViolated(ex.ExprError):
    """Coefficients do not satisfy the applicable tie constraint."""


class IntegralUnsupported(ex.ExprError):
    """A required coefficient integral has no closed form in the supported class."""


class Classification(str, Enum):
    INERTIA = "Inertia"
    DAMPED_OSCILLATOR_TIED = "DampedOscillatorTied"
    QUADRATIC_DAMPING = "QuadraticDamping"
    NO_NULL_LAGRANGIAN = "NoNullLagrangian"
    TIME_DEPENDENT_OSCILLATOR = "TimeDependentOscillator"
    DISPLACEMENT_DEPENDENT = "DisplacementDependent"


@dataclass
class SystemCase:
    classification: Classification
    alpha: Expr
    beta: Expr
    gamma: Expr
    B: Expr | None = None
    C: Expr | None = None
    constraints: tuple[Expr, ...] = ()
    null_pair: NullPair | None = None
    absent_reason: str | None = None
    absent_witness: dict | None = None
    eom: EquationOfMotion | None = None
    target_residual: Expr | None = None
    constants: dict = field(default_factory=dict)

    @property
    def has_null_lagrangian(self) -> bool:
        return self.null_pair is not None

    def to_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "alpha": to_string(self.alpha),
            "beta": to_string(self.beta),
            "gamma": to_string(self.gamma),
            "B": to_string(self.B) if self.B is not None else None,
            "C": to_string(self.C) if self.C is not None else None,
            "constraints": [to_string(c) for c in self.constraints],
            "null_lagrangian": self.null_pair.to_dict() if self.null_pair else None,
            "absent_reason": self.absent_reason,
            "absent_witness": self.absent_witness,
            "eom": self.eom.to_dict() if self.eom else None,
            "target_residual": to_string(self.target_residual)
            if self.target_residual is not None
            else None,
            "constants": {k: to_string(v) if isinstance(v, Expr) else v for k, v in self.constants.items()},
        }


def _as_expr(v) -> Expr:
    if isinstance(v, str):
        return parse(v)
    return ex.const(v) if not isinstance(v, Expr) else v


def _is_zero(e: Expr) -> bool:
    return e == ZERO


def _target_residual(alpha: Expr, beta: Expr, gamma: Expr) -> Expr:
    return add(XDDOT, mul(alpha, pow_(XDOT, 2)), mul(beta, XDOT), mul(gamma, X))


def _constraint_witness(constraint: Expr, domain: Domain, seed: int = 0) -> dict | None:
    rep = vanishes(constraint, domain, seed=seed)
    if rep.verdict is Verdict.DISTINCT:
        return rep.witness
    return None


def classify_constant(alpha0, beta0, gamma0, *, scale: Expr = B0, seed: int = 0) -> SystemCase:
    """Classify constant coefficients; symbolic constants that do not
    canonicalize to zero are treated as generically nonzero.

    Admissible cases emit B = scale*e^(alpha0*x + beta0*t/2) with C pinned
    by the tie constraint (1 + alpha0*x)*gamma0 = beta0^2/4.
    """
    alpha0, beta0, gamma0 = _as_expr(alpha0), _as_expr(beta0), _as_expr(gamma0)
    target = _target_residual(alpha0, beta0, gamma0)
    constraint = sub(
        mul(add(Const(Fraction(1)), mul(alpha0, X)), gamma0),
        mul(Const(Fraction(1, 4)), pow_(beta0, 2)),
    )
    common = dict(alpha=alpha0, beta=beta0, gamma=gamma0, target_residual=target)

    if _is_zero(alpha0) and _is_zero(beta0) and _is_zero(gamma0):
        pair = NullPair.certified(scale, ZERO, ZERO, DEFAULT_DOMAIN, seed=seed)
        return SystemCase(
            Classification.INERTIA,
            B=pair.B,
            C=pair.C,
            constraints=(constraint,),
            null_pair=pair,
            eom=conservation_eom(pair, seed=seed),
            constants={"B0": scale},
            **common,
        )
    if _is_zero(alpha0) and not _is_zero(beta0) and ex.proven_zero(constraint):
        B = mul(scale, apply_fn("exp", mul(beta0, T, Const(Fraction(1, 2)))))
        C = mul(2, scale, gamma0, pow_(beta0, -1), apply_fn("exp", mul(beta0, T, Const(Fraction(1, 2)))))
        pair = NullPair.certified(B, C, ZERO, DEFAULT_DOMAIN, seed=seed)
        return SystemCase(
            Classification.DAMPED_OSCILLATOR_TIED,
            B=B,
            C=C,
            constraints=(constraint,),
            null_pair=pair,
            eom=conservation_eom(pair, seed=seed),
            constants={"B0": scale},
            **common,
        )
    if not _is_zero(alpha0) and _is_zero(beta0) and _is_zero(gamma0):
        B = mul(scale, apply_fn("exp", mul(alpha0, X)))
        pair = NullPair.certified(B, ZERO, ZERO, DEFAULT_DOMAIN, seed=seed)
        return SystemCase(
            Classification.QUADRATIC_DAMPING,
            B=B,
            C=ZERO,
            constraints=(constraint,),
            null_pair=pair,
            eom=conservation_eom(pair, seed=seed),
            constants={"B0": scale},
            **common,
        )
    return SystemCase(
        Classification.NO_NULL_LAGRANGIAN,
        constraints=(constraint,),
        absent_reason=(
            "the tie constraint (1 + alpha0*x)*gamma0 = beta0^2/4 cannot hold identically "
            "for these constants"
        ),
        absent_witness=_constraint_witness(constraint, DEFAULT_DOMAIN, seed),
        **common,
    )


def gamma_from_beta(beta: Expr) -> Expr:
    """Spring coefficient tied to a time-dependent damping coefficient:
    gamma = beta'/2 + beta^2/4 (unique up to the integration-constant
    convention, which is fixed to zero)."""
    beta = _as_expr(beta)
    bad = ex.free_jets(beta) - {"t"}
    if bad:
        raise ValueError(f"beta must be a function of t only, found {sorted(bad)}")
    return add(mul(Const(Fraction(1, 2)), diff(beta, T)), mul(Const(Fraction(1, 4)), pow_(beta, 2)))


def build_timedep(
    beta1,
    gamma1=None,
    alpha1=ZERO,
    *,
    scale: Expr = B0,
    domain: Domain | None = None,
    seed: int = 0,
    eps: float = 1e-9,
) -> SystemCase:
    """Time-dependent catalog branch (alpha1 = 0).

    B = scale*e^(I) with I = (1/2) integral of beta1; the displacement
    coefficient is beta1*B/2, the constraint-substituted form of the
    gamma integral.  A nonzero alpha1 only admits the constant
    quadratic-damping case.
    """
    beta1, alpha1 = _as_expr(beta1), _as_expr(alpha1)
    domain = domain or DEFAULT_DOMAIN
    if not _is_zero(alpha1):
        if not ex.proven_zero(diff(alpha1, T)):
            raise ConstraintViolated(
                "a nonzero quadratic-damping coefficient must be constant in t; "
                f"found alpha1' = {to_string(diff(alpha1, T))}"
            )
        if not (_is_zero(beta1) and (gamma1 is None or _is_zero(_as_expr(gamma1)))):
            raise ConstraintViolated(
                "with alpha1 != 0 the condition forces beta1 = gamma1 = 0 "
                "(constant quadratic damping is the only admissible case)"
            )
        return classify_constant(alpha1, 0, 0, scale=scale, seed=seed)
    tied = gamma_from_beta(beta1)
    if gamma1 is None:
        gamma1 = tied
    else:
        gamma1 = _as_expr(gamma1)
        rep = equivalent(gamma1, tied, domain, eps=eps, seed=seed)
        if rep.verdict is Verdict.DISTINCT:
            raise ConstraintViolated(
                f"gamma1 must equal beta1'/2 + beta1^2/4 = {to_string(tied)}; witness {rep.witness}"
            )
    try:
        I_beta = mul(Const(Fraction(1, 2)), antiderivative(beta1, T))
    except AntiderivativeUnsupported as err:
        raise IntegralUnsupported(str(err)) from None
    E = apply_fn("exp", I_beta)
    B = mul(scale, E)
    C = mul(Const(Fraction(1, 2)), beta1, B)
    pair = NullPair.certified(B, C, ZERO, domain, seed=seed)
    return SystemCase(
        Classification.TIME_DEPENDENT_OSCILLATOR,
        alpha=ZERO,
        beta=beta1,
        gamma=gamma1,
        B=B,
        C=C,
        constraints=(sub(gamma1, tied),),
        null_pair=pair,
        eom=conservation_eom(pair, seed=seed),
        target_residual=_target_residual(ZERO, beta1, gamma1),
        constants={"B0": scale},
    )


def solve_gamma_displacement(alpha2, beta0, ctilde=ZERO) -> Expr:
    """Solve x*gamma' + gamma*(1 + alpha2*x) = beta0^2/4 for gamma(x).

    Substituting u = x*gamma turns the constraint into u' + alpha2*u =
    beta0^2/4, solved with the integrating factor e^(I) where I is the
    x-antiderivative of alpha2; ctilde is the integration constant."""
    alpha2, beta0, ctilde = _as_expr(alpha2), _as_expr(beta0), _as_expr(ctilde)
    try:
        I_alpha = antiderivative(alpha2, X)
        E = apply_fn("exp", I_alpha)
        forced = (
            mul(Const(Fraction(1, 4)), pow_(beta0, 2), antiderivative(E, X))
            if not _is_zero(beta0)
            else ZERO
        )
    except AntiderivativeUnsupported as err:
        raise IntegralUnsupported(str(err)) from None
    u = mul(pow_(E, -1), add(forced, ctilde))
    return mul(u, pow_(X, -1))


def build_displacement(
    alpha2,
    beta0,
    gamma2=None,
    *,
    ctilde=ZERO,
    scale: Expr = B0,
    domain: Domain | None = None,
    seed: int = 0,
    eps: float = 1e-9,
) -> SystemCase:
    """Displacement-dependent catalog branch (beta constant).

    For beta0 != 0 the pair is B = scale*e^(I + beta0*t/2),
    C = 2*gamma2*B/beta0; for beta0 = 0 it is B = scale*e^(I),
    C = scale*t*gamma2*e^(I); I is the x-antiderivative of alpha2.
    """
    alpha2, beta0 = _as_expr(alpha2), _as_expr(beta0)
    if gamma2 is None:
        gamma2 = solve_gamma_displacement(alpha2, beta0, ctilde)
    else:
        gamma2 = _as_expr(gamma2)
    constraint = sub(
        add(mul(X, diff(gamma2, X)), mul(gamma2, add(Const(Fraction(1)), mul(alpha2, X)))),
        mul(Const(Fraction(1, 4)), pow_(beta0, 2)),
    )
    domain = domain or DEFAULT_DOMAIN
    rep = vanishes(constraint, domain, eps=eps, seed=seed)
    if rep.verdict is Verdict.DISTINCT:
        raise ConstraintViolated(
            f"gamma2 violates x*gamma2' + gamma2*(1 + alpha2*x) = beta0^2/4; witness {rep.witness}"
        )
    try:
        I_alpha = antiderivative(alpha2, X)
    except AntiderivativeUnsupported as err:
        raise IntegralUnsupported(str(err)) from None
    if not _is_zero(beta0):
        E = apply_fn("exp", add(I_alpha, mul(Const(Fraction(1, 2)), beta0, T)))
        B = mul(scale, E)
        C = mul(2, gamma2, pow_(beta0, -1), B)
    else:
        E = apply_fn("exp", I_alpha)
        B = mul(scale, E)
        C = mul(scale, T, gamma2, E)
    pair = NullPair.certified(B, C, ZERO, domain, seed=seed)
    return SystemCase(
        Classification.DISPLACEMENT_DEPENDENT,
        alpha=alpha2,
        beta=beta0,
        gamma=gamma2,
        B=B,
        C=C,
        constraints=(constraint,),
        null_pair=pair,
        eom=conservation_eom(pair, seed=seed),
        target_residual=_target_residual(alpha2, beta0, gamma2),
        constants={"B0": scale, "ctilde": ctilde},
    )


# ---------------------------------------------------------------------------
# comparison triples: standard / non-standard / null routes per system


DEFAULT_COMPARISON_CONSTANTS: dict[str, float] = {
    "c1": 1.0,
    "c2": 1.0,
    "c3": 1.0,
    "B0": 1.0,
    "a0": 1.0,
    "b0": 2.0,
    "C1": 1.0,
    "C2": 1.0,
    "v0": 1.0,
}


@dataclass
class ComparisonTriple:
    """Standard, non-standard, and null Lagrangians of one system, each with
    its own derivation route for the same equation of motion."""

    name: str
    standard: Lagrangian
    nonstandard: Lagrangian
    null_pair: NullPair
    target_residual: Expr

    def routes(self, *, seed: int = 0) -> dict[str, EquationOfMotion]:
        return {
            "standard": eom_from_lagrangian(self.standard),
            "nonstandard": eom_from_lagrangian(self.nonstandard),
            "null": conservation_eom(self.null_pair, seed=seed),
        }


def comparison_catalog(system: str | Classification, *, seed: int = 0) -> ComparisonTriple:
    """Comparison triple for inertia, quadratic damping, or the tied
    oscillator; constants stay symbolic (bind DEFAULT_COMPARISON_CONSTANTS
    or your own values for numeric work)."""
    key = system.value if isinstance(system, Classification) else system
    key = {
        "Inertia": "inertia",
        "QuadraticDamping": "quadratic",
        "DampedOscillatorTied": "tied",
    }.get(key, key)
    if key == "inertia":
        nsd_domain = DEFAULT_DOMAIN.with_guards(
            Guard(parse("C1*(a0*t + v0)^2*((a0*t + v0)*x' - a0*x + C2)")),
            Guard(parse("a0*t + v0")),
        )
        return ComparisonTriple(
            "inertia",
            standard=Lagrangian(parse("1/2*x'^2")),
            nonstandard=Lagrangian(
                parse("1/(C1*(a0*t + v0)^2*((a0*t + v0)*x' - a0*x + C2))"), nsd_domain
            ),
            null_pair=NullPair.certified(parse("c1"), ZERO, ZERO, seed=seed),
            target_residual=XDDOT,
        )
    if key == "quadratic":
        nsd_domain = DEFAULT_DOMAIN.with_guards(Guard(parse("x'*exp(a0*x) + 1")))
        return ComparisonTriple(
            "quadratic",
            standard=Lagrangian(parse("1/2*x'^2*exp(2*a0*x)")),
            nonstandard=Lagrangian(parse("1/(x'*exp(a0*x) + 1)"), nsd_domain),
            null_pair=NullPair.certified(parse("c2*exp(a0*x)"), ZERO, ZERO, seed=seed),
            target_residual=_target_residual(ConstSym("a0"), ZERO, ZERO),
        )
    if key == "tied":
        # The literature form of this non-standard Lagrangian circulates with
        # the exponent written over x; that variant does not reproduce the
        # oscillator through the Euler-Lagrange route (see audit module).
        # The working form, equal to 1/L_null at unit scale, carries t.
        nsd_domain = DEFAULT_DOMAIN.with_guards(Guard(parse("x' + 1/2*b0*x")))
        return ComparisonTriple(
            "tied",
            standard=Lagrangian(parse("1/2*(x'^2 - 1/4*b0^2*x^2)*exp(b0*t)")),
            nonstandard=Lagrangian(parse("exp(-b0*t/2)/(x' + 1/2*b0*x)"), nsd_domain),
            null_pair=NullPair.certified(
                parse("c3*exp(b0*t/2)"), parse("1/2*c3*b0*exp(b0*t/2)"), ZERO, seed=seed
            ),
            target_residual=_target_residual(ZERO, ConstSym("b0"), parse("1/4*b0^2")),
        )
    raise ValueError(f"unknown comparison system {system!r}; pick inertia, quadratic, or tied")
