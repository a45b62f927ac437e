"""Euler-Lagrange operator, gauge-function lift, null-condition residual,
generalized momentum, and a numeric action functional with a
path-independence check.

A Lagrangian is an expression over (x, xdot, t) on a guarded domain.  It is
null when the Euler-Lagrange operator annihilates it identically, which is
the case exactly when it is the total time derivative of a gauge function
of (x, t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from . import expr as ex
from .domain import DEFAULT_DOMAIN, Domain
from .equivalence import EquivalenceReport, Verdict, vanishes
from .expr import (
    Expr,
    T,
    X,
    XDOT,
    ZERO,
    add,
    compile_expr,
    diff,
    free_jets,
    mul,
    sub,
    to_string,
    total_dt,
)

EPS_ACT = 1e-7
ACTION_PANELS = 2000


class NullCertificationFailed(ex.ExprError):
    """Construction-time certificate of nullity failed (internal bug guard)."""


class DomainExitError(ex.ExprError):
    """A path or trajectory left the guarded domain."""


class NullVerdict(str, Enum):
    PROVEN_NULL = "ProvenNull"
    NUMERICALLY_NULL = "NumericallyNull"
    NOT_NULL = "NotNull"


@dataclass
class NullReport:
    verdict: NullVerdict
    residual: Expr
    equivalence: EquivalenceReport | None = None

    def __bool__(self) -> bool:
        return self.verdict is not NullVerdict.NOT_NULL

    @property
    def witness(self) -> dict | None:
        return self.equivalence.witness if self.equivalence is not None else None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "residual": to_string(self.residual),
            "equivalence": self.equivalence.to_dict() if self.equivalence is not None else None,
        }


@dataclass(frozen=True)
class Lagrangian:
    """Expression over (x, xdot, t); no second or higher jets."""

    body: Expr
    domain: Domain = DEFAULT_DOMAIN

    def __post_init__(self):
        bad = free_jets(self.body) - {"x", "xdot", "t"}
        if bad:
            raise ValueError(f"Lagrangian body may not contain {sorted(bad)}")


@dataclass(frozen=True)
class GaugeFunction:
    """Expression over (x, t) only; its total time derivative is null."""

    body: Expr
    domain: Domain = DEFAULT_DOMAIN

    def __post_init__(self):
        bad = free_jets(self.body) - {"x", "t"}
        if bad:
            raise ValueError(f"gauge function may not contain {sorted(bad)}")


@dataclass(frozen=True)
class NullPair:
    """Certified triple (B, C, f): B*xdot + C*x + f is a null Lagrangian.

    B is the velocity coefficient, C the displacement coefficient (both over
    x and t), f a function of t alone.  Certification happens at
    construction via `certified`; direct construction skips it.
    """

    B: Expr
    C: Expr
    f: Expr = ZERO
    domain: Domain = DEFAULT_DOMAIN
    certificate: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def certified(
        cls,
        B: Expr,
        C: Expr,
        f: Expr = ZERO,
        domain: Domain | None = None,
        *,
        seed: int = 0,
        eps: float = 1e-9,
        constants: dict[str, float] | None = None,
    ) -> "NullPair":
        domain = domain or DEFAULT_DOMAIN
        for name, e, allowed in (("B", B, {"x", "t"}), ("C", C, {"x", "t"}), ("f", f, {"t"})):
            bad = free_jets(e) - allowed
            if bad:
                raise ValueError(f"{name} may not contain {sorted(bad)}")
        residual = null_condition_residual(B, C)
        cond = vanishes(residual, domain, seed=seed, eps=eps, constants=constants)
        if cond.verdict is Verdict.DISTINCT:
            raise NullCertificationFailed(
                f"null condition violated: dB/dt - d(xC)/dx = {to_string(residual)}; "
                f"witness {cond.witness}"
            )
        pair = cls(B, C, f, domain, certificate=(cond,))
        check = is_null(pair.assembled(), seed=seed, eps=eps, constants=constants)
        if not check:
            raise NullCertificationFailed(
                f"assembled Lagrangian is not null; witness {check.witness}"
            )
        object.__setattr__(pair, "certificate", (cond, check))
        return pair

    @property
    def is_certified(self) -> bool:
        return bool(self.certificate)

    def assembled(self) -> Lagrangian:
        return Lagrangian(add(mul(self.B, XDOT), mul(self.C, X), self.f), self.domain)

    def to_dict(self) -> dict:
        return {
            "B": to_string(self.B),
            "C": to_string(self.C),
            "f": to_string(self.f),
            "lagrangian": to_string(self.assembled().body),
            "certified": self.is_certified,
        }


@dataclass(frozen=True)
class Path:
    """Differentiable path t -> x(t) on [t0, t1] with explicit derivative."""

    t0: float
    t1: float
    x: Callable[[float], float]
    xdot: Callable[[float], float]

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError("path requires t1 > t0")
        # x and xdot must be consistent to finite-difference accuracy
        h = 1e-5
        for k in range(1, 6):
            t = self.t0 + (self.t1 - self.t0) * k / 6.0
            fd = (self.x(t + h) - self.x(t - h)) / (2.0 * h)
            if abs(fd - self.xdot(t)) > 1e-4 * (1.0 + abs(self.xdot(t))):
                raise ValueError(
                    f"path derivative inconsistent at t={t:g}: fd={fd:g} vs xdot={self.xdot(t):g}"
                )


def line_path(t0: float, t1: float, x0: float, x1: float) -> Path:
    slope = (x1 - x0) / (t1 - t0)
    return Path(t0, t1, lambda t: x0 + slope * (t - t0), lambda t: slope)


def with_bump(path: Path, amplitude: float, k: int = 1) -> Path:
    """Add a sine bump vanishing at both endpoints; admissible variation."""
    width = path.t1 - path.t0
    omega = math.pi * k / width
    t0 = path.t0
    return Path(
        path.t0,
        path.t1,
        lambda t: path.x(t) + amplitude * math.sin(omega * (t - t0)),
        lambda t: path.xdot(t) + amplitude * omega * math.cos(omega * (t - t0)),
    )


# ---------------------------------------------------------------------------
# operators


def euler_lagrange_residual(L: Lagrangian | Expr) -> Expr:
    """total_dt(dL/dxdot) - dL/dx; identically zero exactly for null L."""
    body = L.body if isinstance(L, Lagrangian) else L
    return sub(total_dt(diff(body, XDOT)), diff(body, X))


def momentum(L: Lagrangian | Expr) -> Expr:
    """Generalized momentum dL/dxdot."""
    body = L.body if isinstance(L, Lagrangian) else L
    return diff(body, XDOT)


def null_condition_residual(B: Expr, C: Expr) -> Expr:
    """dB/dt - d(x*C)/dx; zero iff (B, C) assembles to a null Lagrangian."""
    return sub(diff(B, T), diff(mul(X, C), X))


def from_gauge(phi: GaugeFunction) -> Lagrangian:
    """Lift a gauge function to its (certified null) total time derivative."""
    L = Lagrangian(total_dt(phi.body), phi.domain)
    # mixed partials commute node-wise, so this residual is always exactly 0
    if not ex.proven_zero(euler_lagrange_residual(L)):
        raise NullCertificationFailed("gauge lift failed to certify (internal error)")
    return L


def is_null(
    L: Lagrangian | Expr,
    domain: Domain | None = None,
    *,
    seed: int = 0,
    eps: float = 1e-9,
    n_points: int = 50,
    constants: dict[str, float] | None = None,
) -> NullReport:
    """ProvenNull / NumericallyNull / NotNull with witness."""
    if isinstance(L, Lagrangian):
        domain = domain or L.domain
        body = L.body
    else:
        domain = domain or DEFAULT_DOMAIN
        body = L
    residual = euler_lagrange_residual(body)
    if ex.proven_zero(residual):
        return NullReport(NullVerdict.PROVEN_NULL, residual)
    rep = vanishes(residual, domain, seed=seed, eps=eps, n_points=n_points, constants=constants)
    if rep.verdict is Verdict.DISTINCT:
        return NullReport(NullVerdict.NOT_NULL, residual, rep)
    return NullReport(NullVerdict.NUMERICALLY_NULL, residual, rep)


# ---------------------------------------------------------------------------
# action functional


def _simpson(f: Callable[[float], float], a: float, b: float, panels: int) -> float:
    if panels % 2:
        panels += 1
    h = (b - a) / panels
    acc = f(a) + f(b)
    for i in range(1, panels):
        acc += f(a + i * h) * (4.0 if i % 2 else 2.0)
    return acc * h / 3.0


def action(
    L: Lagrangian,
    path: Path,
    *,
    panels: int = ACTION_PANELS,
    funcs: dict[str, Expr] | None = None,
    constants: dict[str, float] | None = None,
) -> float:
    """Composite-Simpson value of the action integral along the path.

    For a certified null Lagrangian with gauge function phi this equals
    phi(x(t1), t1) - phi(x(t0), t0) up to quadrature error.
    """
    fn = compile_expr(L.body, ("x", "xdot", "t"), funcs=funcs, constants=constants)
    guard_fns = [
        (compile_expr(g.expr, ("x", "xdot", "t"), funcs=funcs, constants=constants), g.positive)
        for g in L.domain.guards
    ]

    def integrand(t: float) -> float:
        xv, vv = path.x(t), path.xdot(t)
        for gf, positive in guard_fns:
            gv = gf(xv, vv, t)
            if (positive and gv < 1e-6) or (not positive and abs(gv) < 1e-6):
                raise DomainExitError(f"path exits guarded domain at t={t:g}")
        return fn(xv, vv, t)

    value = _simpson(integrand, path.t0, path.t1, panels)
    if not math.isfinite(value):
        raise ex.EvaluationError("action quadrature is non-finite")
    return value


@dataclass
class PathIndependenceReport:
    action_a: float
    action_b: float
    difference: float
    eps: float
    panels: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "action_a": self.action_a,
            "action_b": self.action_b,
            "difference": self.difference,
            "eps": self.eps,
            "panels": self.panels,
            "passed": self.passed,
        }


def path_independence_check(
    L: Lagrangian,
    path_a: Path,
    path_b: Path,
    *,
    eps: float = EPS_ACT,
    panels: int = ACTION_PANELS,
    funcs: dict[str, Expr] | None = None,
    constants: dict[str, float] | None = None,
) -> PathIndependenceReport:
    """Compare the action along two paths sharing both endpoints."""
    if path_a.t0 != path_b.t0 or path_a.t1 != path_b.t1:
        raise ValueError("paths must share the time interval")
    for t in (path_a.t0, path_a.t1):
        if abs(path_a.x(t) - path_b.x(t)) > 1e-10:
            raise ValueError(f"paths must share endpoints; mismatch at t={t:g}")
    a = action(L, path_a, panels=panels, funcs=funcs, constants=constants)
    b = action(L, path_b, panels=panels, funcs=funcs, constants=constants)
    d = abs(a - b)
    return PathIndependenceReport(a, b, d, eps, panels, d <= eps)
