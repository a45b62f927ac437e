"""Built-in catalog of generating functions, null pairs, and gauge
functions used by the test suite, the demos, and the audit module."""

from __future__ import annotations

import warnings

from .construct import FractionSpec, build_nonstandard_null, build_null
from .domain import DEFAULT_DOMAIN, Guard
from .expr import ZERO, FuncSym
from .parser import parse
from .variational import GaugeFunction, NullPair


def linear_family(seed: int = 0) -> NullPair:
    """Generating function linear in x with opaque time coefficients."""
    return build_null(parse("f1(t)*x + f2(t)*t + f3(t)"), parse("f4(t)"), seed=seed)


def quadratic_family(seed: int = 0) -> NullPair:
    return build_null(parse("f1(t)*x^2 + f2(t)*t + f3(t)"), parse("f4(t)"), seed=seed)


def trig_exp_family(seed: int = 0) -> NullPair:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # C carries a benign 1/x term here
        return build_null(
            parse("f1(t)*sin(x) + f2(t)*exp(x)*t + f3(t)"), parse("f4(t)"), seed=seed
        )


def constant_family(seed: int = 0) -> NullPair:
    """The simplest pair: constant velocity coefficient, inertia dynamics."""
    return build_null(parse("c1"), parse("c3"), seed=seed)


def exp_family(seed: int = 0) -> NullPair:
    """Velocity coefficient B0*e^(a0*x); quadratic-damping dynamics."""
    return build_null(parse("B0*exp(a0*x)"), ZERO, seed=seed)


def tied_family(seed: int = 0) -> NullPair:
    """Velocity coefficient B0*e^(b0*t/2); tied damped-oscillator dynamics."""
    return NullPair.certified(
        parse("B0*exp(b0*t/2)"), parse("1/2*b0*B0*exp(b0*t/2)"), ZERO, seed=seed
    )


def fraction_family(seed: int = 0) -> NullPair:
    """Generic fractional generating function with opaque coefficients."""
    spec = FractionSpec(FuncSym("f1"), FuncSym("f2"), FuncSym("f3"), FuncSym("f4"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_nonstandard_null(spec, parse("f(t)"), seed=seed)


def fraction_constant_acceleration(seed: int = 0) -> NullPair:
    """Constant-coefficient fraction a1/(a2*x + a4); the C-part vanishes."""
    spec = FractionSpec(parse("a1"), parse("a2"), ZERO, parse("a4"))
    return build_nonstandard_null(spec, ZERO, seed=seed)


def all_pairs(seed: int = 0) -> dict[str, NullPair]:
    return {
        "linear": linear_family(seed),
        "quadratic": quadratic_family(seed),
        "trig_exp": trig_exp_family(seed),
        "constant": constant_family(seed),
        "exp": exp_family(seed),
        "tied": tied_family(seed),
        "fraction": fraction_family(seed),
        "fraction_const": fraction_constant_acceleration(seed),
    }


def gauge_examples() -> dict[str, GaugeFunction]:
    log_domain = DEFAULT_DOMAIN.with_guards(Guard(parse("a2*x + a4"), positive=True))
    return {
        "quadratic_in_x": GaugeFunction(parse("f1(t)*x^2 + f2(t)")),
        "log": GaugeFunction(parse("(a1/a2)*ln(a2*x + a4)"), log_domain),
        "constant": GaugeFunction(parse("c1")),
        "poly_mixed": GaugeFunction(parse("x^2*t + 3*x")),
        "trig": GaugeFunction(parse("f1(t)*sin(x)")),
    }
