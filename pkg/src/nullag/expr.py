"""Immutable symbolic expression kernel for one-dimensional jet calculus.

Expressions are trees over the jet symbols x, x', x'', x''', the time
variable t, named constants, and opaque time-functions f(t) that carry a
derivative order.  Every public constructor canonicalizes its result:
sums of monomials with merged rational coefficients, a deterministic total
ordering of atoms, integer powers of sums expanded, x^0 and empty products
collapsed to 1, zero coefficients dropped, and exponentials merged via
exp(a)*exp(b) = exp(a+b).  Rational multiples of ln(u) inside an exp are
converted to powers, so exp(q*ln(u)) and u^q meet in the same canonical
form.

All values are immutable; every operation returns a new tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

Number = Union[int, float, Fraction]

APPLY_FUNCS = ("exp", "ln", "sin", "cos", "abs")
JET_NAMES = ("x", "xdot", "xddot", "xdddot", "t")


class ExprError(Exception):
    """Base class for symbolic-kernel errors."""


class JetOrderError(ExprError):
    """Raised when an operation needs a jet symbol beyond x'''."""


class EvaluationError(ExprError):
    """Numeric evaluation failed (guard violation, domain error, overflow)."""


class UnboundSymbolError(EvaluationError):
    """An atom had no numeric binding or function instantiation."""


class GuardViolation(EvaluationError):
    """A denominator or ln argument came too close to its singular set."""


class Expr:
    """Base class of all expression nodes.  Instances are canonical."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __pow__(self, exponent):
        return pow_(self, exponent)

    def __neg__(self):
        return mul(Const(Fraction(-1)), self)

    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return to_string(self)


@dataclass(frozen=True, slots=True, repr=False)
class Const(Expr):
    """Exact rational (fractions.Fraction) or float constant."""

    value: Union[Fraction, float]


@dataclass(frozen=True, slots=True, repr=False)
class JetSym(Expr):
    """One of the jet coordinates x, xdot, xddot, xdddot, or time t."""

    name: str


@dataclass(frozen=True, slots=True, repr=False)
class ConstSym(Expr):
    """Named symbolic constant (zero derivative, optional numeric binding)."""

    name: str


@dataclass(frozen=True, slots=True, repr=False)
class FuncSym(Expr):
    """order-th time derivative of an opaque function name(t)."""

    name: str
    order: int = 0


@dataclass(frozen=True, slots=True, repr=False)
class Apply(Expr):
    """Elementary function application; func in {exp, ln, sin, cos, abs}."""

    func: str
    arg: Expr


@dataclass(frozen=True, slots=True, repr=False)
class Sum(Expr):
    terms: tuple[Expr, ...]


@dataclass(frozen=True, slots=True, repr=False)
class Product(Expr):
    factors: tuple[Expr, ...]


@dataclass(frozen=True, slots=True, repr=False)
class Power(Expr):
    base: Expr
    exponent: Fraction


X = JetSym("x")
XDOT = JetSym("xdot")
XDDOT = JetSym("xddot")
XDDDOT = JetSym("xdddot")
T = JetSym("t")

ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))

_JETS = {s.name: s for s in (X, XDOT, XDDOT, XDDDOT, T)}


def _coerce(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, bool):
        raise TypeError("bool is not a valid expression constant")
    if isinstance(v, int):
        return Const(Fraction(v))
    if isinstance(v, Fraction):
        return Const(v)
    if isinstance(v, float):
        return Const(v)
    raise TypeError(f"cannot coerce {v!r} to Expr")


def const(v: Number) -> Expr:
    return _coerce(v)


def sort_key(e: Expr):
    """Deterministic total ordering key over canonical trees."""
    if isinstance(e, Const):
        v = e.value
        try:
            fv = float(v)
        except OverflowError:
            fv = math.inf if v > 0 else -math.inf
        return (0, (fv, str(v)))
    if isinstance(e, JetSym):
        return (1, JET_NAMES.index(e.name))
    if isinstance(e, ConstSym):
        return (2, e.name)
    if isinstance(e, FuncSym):
        return (3, e.name, e.order)
    if isinstance(e, Apply):
        return (4, e.func, sort_key(e.arg))
    if isinstance(e, Power):
        return (5, sort_key(e.base), (e.exponent.numerator, e.exponent.denominator))
    if isinstance(e, Product):
        return (6, tuple(sort_key(f) for f in e.factors))
    if isinstance(e, Sum):
        return (7, tuple(sort_key(t) for t in e.terms))
    raise TypeError(f"unknown node {e!r}")


def as_coeff_factors(e: Expr) -> tuple[Union[Fraction, float], tuple[Expr, ...]]:
    """Split a canonical non-Sum term into (coefficient, monomial factors)."""
    if isinstance(e, Const):
        return e.value, ()
    if isinstance(e, Product):
        fs = e.factors
        if isinstance(fs[0], Const):
            return fs[0].value, fs[1:]
        return Fraction(1), fs
    return Fraction(1), (e,)


def _term_from(coeff, factors: tuple[Expr, ...]) -> Expr:
    if not factors:
        return Const(coeff)
    if coeff == 1:
        return factors[0] if len(factors) == 1 else Product(factors)
    return Product((Const(coeff),) + factors)


def add(*args) -> Expr:
    buckets: dict[tuple, list] = {}
    const_acc: Union[Fraction, float] = Fraction(0)
    stack = [_coerce(a) for a in reversed(args)]
    while stack:
        a = stack.pop()
        if isinstance(a, Sum):
            stack.extend(reversed(a.terms))
            continue
        coeff, factors = as_coeff_factors(a)
        if not factors:
            const_acc = const_acc + coeff
            continue
        key = tuple(sort_key(f) for f in factors)
        entry = buckets.get(key)
        if entry is None:
            buckets[key] = [coeff, factors]
        else:
            entry[0] = entry[0] + coeff
    terms = [_term_from(c, fs) for c, fs in buckets.values() if c != 0]
    if const_acc != 0:
        terms.append(Const(const_acc))
    if not terms:
        return ZERO
    terms.sort(key=sort_key)
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))


def _is_simple_factor(e: Expr) -> bool:
    return not isinstance(e, (Sum, Product, Const))


def mul(*args) -> Expr:
    coeff: Union[Fraction, float] = Fraction(1)
    flat: list[Expr] = []
    stack = [_coerce(a) for a in reversed(args)]
    while stack:
        a = stack.pop()
        if isinstance(a, Const):
            coeff = coeff * a.value
        elif isinstance(a, Product):
            stack.extend(reversed(a.factors))
        else:
            flat.append(a)
    if coeff == 0:
        return ZERO
    for i, f in enumerate(flat):
        if isinstance(f, Sum):
            rest = flat[:i] + flat[i + 1 :]
            return add(*(mul(Const(coeff), *rest, term) for term in f.terms))
    powers: dict[tuple, list] = {}

    def pow_into(base: Expr, q: Fraction):
        key = sort_key(base)
        entry = powers.get(key)
        if entry is None:
            powers[key] = [base, q]
        else:
            entry[1] = entry[1] + q

    exp_args: list[Expr] = []
    for f in flat:
        if isinstance(f, Apply) and f.func == "exp":
            exp_args.append(f.arg)
        elif isinstance(f, Power):
            pow_into(f.base, f.exponent)
        else:
            pow_into(f, Fraction(1))
    if exp_args:
        combined = apply_fn("exp", add(*exp_args))
        comb_coeff, comb_factors = as_coeff_factors(combined)
        coeff = coeff * comb_coeff
        for f in comb_factors:
            if isinstance(f, Power):
                pow_into(f.base, f.exponent)
            else:
                pow_into(f, Fraction(1))
    pieces: list[Expr] = []
    needs_recurse = False
    for key in sorted(powers):
        base, q = powers[key]
        if q == 0:
            continue
        if isinstance(base, Const) and q.denominator == 1:
            coeff = coeff * base.value ** q.numerator
            continue
        piece = pow_(base, q)
        if not _is_simple_factor(piece):
            needs_recurse = True
        pieces.append(piece)
    if needs_recurse:
        return mul(Const(coeff), *pieces)
    if coeff == 0:
        return ZERO
    pieces.sort(key=sort_key)
    if not pieces:
        return Const(coeff)
    if coeff == 1:
        return pieces[0] if len(pieces) == 1 else Product(tuple(pieces))
    return Product((Const(coeff),) + tuple(pieces))


def pow_(base, exponent: Number) -> Expr:
    b = _coerce(base)
    if isinstance(exponent, float):
        exponent = Fraction(exponent)
    q = Fraction(exponent)
    if q == 0:
        return ONE
    if q == 1:
        return b
    if isinstance(b, Const):
        if b.value == 0:
            if q < 0:
                raise ZeroDivisionError("0 raised to a negative power")
            return ZERO
        if b.value == 1:
            return ONE
        if q.denominator == 1:
            return Const(b.value ** q.numerator)
        return Power(b, q)
    if isinstance(b, Apply) and b.func == "exp":
        return apply_fn("exp", mul(Const(q), b.arg))
    if isinstance(b, Power):
        if q.denominator == 1:
            return pow_(b.base, b.exponent * q)
        return Power(b, q)
    if isinstance(b, Product):
        if q.denominator == 1:
            return mul(*(pow_(f, q) for f in b.factors))
        return Power(b, q)
    if isinstance(b, Sum) and q.denominator == 1 and q > 1:
        r: Expr = b
        for _ in range(int(q) - 1):
            r = mul(r, b)
        return r
    return Power(b, q)


def div(a, b) -> Expr:
    return mul(_coerce(a), pow_(_coerce(b), Fraction(-1)))


def sub(a, b) -> Expr:
    return add(_coerce(a), mul(Const(Fraction(-1)), _coerce(b)))


def apply_fn(func: str, arg) -> Expr:
    if func not in APPLY_FUNCS:
        raise ValueError(f"unknown function {func!r}")
    a = _coerce(arg)
    if func == "exp":
        if a == ZERO:
            return ONE
        terms = a.terms if isinstance(a, Sum) else (a,)
        kept: list[Expr] = []
        extracted: list[Expr] = []
        for term in terms:
            c, fs = as_coeff_factors(term)
            if (
                len(fs) == 1
                and isinstance(fs[0], Apply)
                and fs[0].func == "ln"
                and isinstance(c, Fraction)
            ):
                extracted.append(pow_(fs[0].arg, c))
            else:
                kept.append(term)
        if extracted:
            rest = add(*kept) if kept else ZERO
            if rest != ZERO:
                extracted.append(Apply("exp", rest))
            return mul(*extracted)
        return Apply("exp", a)
    if func == "ln":
        if a == ONE:
            return ZERO
        if isinstance(a, Apply) and a.func == "exp":
            return a.arg
        return Apply("ln", a)
    if func == "sin" and a == ZERO:
        return ZERO
    if func == "cos" and a == ZERO:
        return ONE
    if func == "abs":
        if isinstance(a, Const):
            return Const(abs(a.value))
        if isinstance(a, Apply) and a.func == "exp":
            return a
    return Apply(func, a)


def exp(arg) -> Expr:
    return apply_fn("exp", arg)


def ln(arg) -> Expr:
    return apply_fn("ln", arg)


def sin(arg) -> Expr:
    return apply_fn("sin", arg)


def cos(arg) -> Expr:
    return apply_fn("cos", arg)


# ---------------------------------------------------------------------------
# differentiation


def diff(e: Expr, sym: Expr) -> Expr:
    """Partial derivative with respect to a jet symbol, t, or a named constant.

    FuncSym atoms are opaque functions of t: their t-derivative raises the
    order by one and every other derivative vanishes.
    """
    if not isinstance(sym, (JetSym, ConstSym)):
        raise TypeError("differentiation target must be a jet symbol, t, or named constant")
    return _diff(e, sym)


def _diff(e: Expr, sym: Expr) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, (JetSym, ConstSym)):
        return ONE if e == sym else ZERO
    if isinstance(e, FuncSym):
        if sym == T:
            return FuncSym(e.name, e.order + 1)
        return ZERO
    if isinstance(e, Sum):
        return add(*(_diff(t, sym) for t in e.terms))
    if isinstance(e, Product):
        parts = []
        for i, f in enumerate(e.factors):
            d = _diff(f, sym)
            if d == ZERO:
                continue
            parts.append(mul(*e.factors[:i], d, *e.factors[i + 1 :]))
        return add(*parts) if parts else ZERO
    if isinstance(e, Power):
        d = _diff(e.base, sym)
        if d == ZERO:
            return ZERO
        return mul(Const(e.exponent), pow_(e.base, e.exponent - 1), d)
    if isinstance(e, Apply):
        d = _diff(e.arg, sym)
        if d == ZERO:
            return ZERO
        if e.func == "exp":
            return mul(e, d)
        if e.func == "ln":
            return mul(d, pow_(e.arg, Fraction(-1)))
        if e.func == "sin":
            return mul(apply_fn("cos", e.arg), d)
        if e.func == "cos":
            return mul(Const(Fraction(-1)), apply_fn("sin", e.arg), d)
        if e.func == "abs":
            # d|u| = u * u' / |u|, valid away from u = 0
            return mul(e.arg, pow_(e, Fraction(-1)), d)
    raise TypeError(f"cannot differentiate {e!r}")


def partial(e: Expr, sym) -> Expr:
    """Partial derivative with respect to one of x, xdot, xddot, xdddot, t."""
    if isinstance(sym, str):
        if sym not in _JETS:
            raise ValueError(f"unknown jet symbol {sym!r}")
        sym = _JETS[sym]
    if not isinstance(sym, JetSym):
        raise TypeError("partial expects a jet symbol or t")
    return _diff(e, sym)


def total_dt(e: Expr) -> Expr:
    """Total time derivative along the jet prolongation.

    Returns de/dt + xdot*de/dx + xddot*de/dxdot + xdddot*de/dxddot, with
    opaque-function orders raised.  Input may contain jets up to xddot.
    """
    if XDDDOT in free_atoms(e):
        raise JetOrderError("total_dt input may contain jets up to x'' only")
    return add(
        _diff(e, T),
        mul(XDOT, _diff(e, X)),
        mul(XDDOT, _diff(e, XDOT)),
        mul(XDDDOT, _diff(e, XDDOT)),
    )


# ---------------------------------------------------------------------------
# structural utilities


def free_atoms(e: Expr) -> set[Expr]:
    """All JetSym, ConstSym and FuncSym atoms occurring in e."""
    out: set[Expr] = set()
    _walk_atoms(e, out)
    return out


def _walk_atoms(e: Expr, out: set) -> None:
    if isinstance(e, (JetSym, ConstSym, FuncSym)):
        out.add(e)
    elif isinstance(e, Sum):
        for t in e.terms:
            _walk_atoms(t, out)
    elif isinstance(e, Product):
        for f in e.factors:
            _walk_atoms(f, out)
    elif isinstance(e, Power):
        _walk_atoms(e.base, out)
    elif isinstance(e, Apply):
        _walk_atoms(e.arg, out)


def free_jets(e: Expr) -> set[str]:
    return {a.name for a in free_atoms(e) if isinstance(a, JetSym)}


def func_names(e: Expr) -> set[str]:
    return {a.name for a in free_atoms(e) if isinstance(a, FuncSym)}


def const_names(e: Expr) -> set[str]:
    return {a.name for a in free_atoms(e) if isinstance(a, ConstSym)}


def depends_on(e: Expr, sym: Expr) -> bool:
    """True when e depends on sym; FuncSym atoms count as depending on t."""
    atoms = free_atoms(e)
    if sym in atoms:
        return True
    if sym == T:
        return any(isinstance(a, FuncSym) for a in atoms)
    return False


def substitute(e: Expr, mapping: Mapping[Expr, Expr]) -> Expr:
    """Replace exact atom occurrences and recanonicalize."""
    if e in mapping:
        return mapping[e]
    if isinstance(e, (Const, JetSym, ConstSym, FuncSym)):
        return e
    if isinstance(e, Sum):
        return add(*(substitute(t, mapping) for t in e.terms))
    if isinstance(e, Product):
        return mul(*(substitute(f, mapping) for f in e.factors))
    if isinstance(e, Power):
        return pow_(substitute(e.base, mapping), e.exponent)
    if isinstance(e, Apply):
        return apply_fn(e.func, substitute(e.arg, mapping))
    raise TypeError(f"cannot substitute into {e!r}")


def instantiate(e: Expr, funcs: Mapping[str, Expr]) -> Expr:
    """Replace opaque functions by concrete expressions over t.

    FuncSym(name, k) becomes the k-th symbolic t-derivative of funcs[name].
    Names missing from the mapping are left opaque.
    """
    cache: dict[tuple[str, int], Expr] = {}

    def derived(name: str, order: int) -> Expr:
        got = cache.get((name, order))
        if got is None:
            got = funcs[name] if order == 0 else _diff(derived(name, order - 1), T)
            cache[(name, order)] = got
        return got

    def walk(e: Expr) -> Expr:
        if isinstance(e, FuncSym) and e.name in funcs:
            return derived(e.name, e.order)
        if isinstance(e, (Const, JetSym, ConstSym, FuncSym)):
            return e
        if isinstance(e, Sum):
            return add(*(walk(t) for t in e.terms))
        if isinstance(e, Product):
            return mul(*(walk(f) for f in e.factors))
        if isinstance(e, Power):
            return pow_(walk(e.base), e.exponent)
        if isinstance(e, Apply):
            return apply_fn(e.func, walk(e.arg))
        raise TypeError(f"cannot instantiate {e!r}")

    for name, body in funcs.items():
        bad = free_jets(body) - {"t"}
        if bad:
            raise ValueError(f"instantiation of {name!r} must depend on t only, found {sorted(bad)}")
    return walk(e)


def bind_constants(e: Expr, values: Mapping[str, Number]) -> Expr:
    return substitute(e, {ConstSym(k): _coerce(v) for k, v in values.items()})


def canonicalize(e: Expr) -> Expr:
    """Rebuild an arbitrary tree through the canonicalizing constructors."""
    if isinstance(e, Const):
        v = e.value
        if isinstance(v, int):
            return Const(Fraction(v))
        return e
    if isinstance(e, (JetSym, ConstSym, FuncSym)):
        return e
    if isinstance(e, Sum):
        return add(*(canonicalize(t) for t in e.terms))
    if isinstance(e, Product):
        return mul(*(canonicalize(f) for f in e.factors))
    if isinstance(e, Power):
        return pow_(canonicalize(e.base), e.exponent)
    if isinstance(e, Apply):
        return apply_fn(e.func, canonicalize(e.arg))
    raise TypeError(f"cannot canonicalize {e!r}")


# ---------------------------------------------------------------------------
# zero proving


def clear_denominators(e: Expr) -> Expr:
    """Multiply through by the common denominator of all negative powers."""
    terms = e.terms if isinstance(e, Sum) else (e,)
    need: dict[tuple, list] = {}
    for term in terms:
        _, factors = as_coeff_factors(term)
        for f in factors:
            if isinstance(f, Power) and f.exponent < 0:
                key = sort_key(f.base)
                entry = need.get(key)
                req = -f.exponent
                if entry is None:
                    need[key] = [f.base, req]
                elif req > entry[1]:
                    entry[1] = req
    if not need:
        return e
    # Multiply term by term with raw Power nodes so exponents merge against
    # the negative powers before any sum base gets expanded.
    pieces = [Power(b, q) for b, q in need.values()]
    return add(*(mul(term, *pieces) for term in terms))


def proven_zero(e: Expr) -> bool:
    """Sound, incomplete zero test: canonical zero or zero after clearing
    denominators of the guarded rational structure."""
    if e == ZERO:
        return True
    for _ in range(3):
        e2 = clear_denominators(e)
        if e2 == ZERO:
            return True
        if e2 == e:
            return False
        e = e2
    return False


# ---------------------------------------------------------------------------
# numeric evaluation


class Bindings:
    """Numeric values for jets and named constants plus function
    instantiations (expressions over t only).

    Derivatives of instantiations are formed symbolically, cached per
    (name, order), then evaluated numerically.  Treat instances as
    immutable after construction.
    """

    def __init__(self, jets=None, funcs=None, constants=None, **jet_values):
        self.jets: dict[str, Number] = dict(jets or {})
        for name, v in jet_values.items():
            if name not in JET_NAMES:
                raise ValueError(f"unknown jet symbol {name!r}")
            self.jets[name] = v
        self.funcs: dict[str, Expr] = dict(funcs or {})
        self.constants: dict[str, Number] = dict(constants or {})
        self._deriv_cache: dict[tuple[str, int], Expr] = {}

    def derived(self, name: str, order: int) -> Expr:
        got = self._deriv_cache.get((name, order))
        if got is None:
            if order == 0:
                got = self.funcs[name]
            else:
                got = _diff(self.derived(name, order - 1), T)
            self._deriv_cache[(name, order)] = got
        return got


def _exactify(v: Number) -> Number:
    if isinstance(v, int):
        return Fraction(v)
    return v


def evaluate(e: Expr, bindings: Bindings, eps_guard: float = 1e-6) -> Number:
    """Evaluate to a finite real; exact rational arithmetic is kept whenever
    every input is rational and no transcendental node appears."""

    def ev(e: Expr) -> Number:
        if isinstance(e, Const):
            return e.value
        if isinstance(e, JetSym):
            try:
                return _exactify(bindings.jets[e.name])
            except KeyError:
                raise UnboundSymbolError(f"jet symbol {e.name!r} is unbound") from None
        if isinstance(e, ConstSym):
            try:
                return _exactify(bindings.constants[e.name])
            except KeyError:
                raise UnboundSymbolError(f"named constant {e.name!r} is unbound") from None
        if isinstance(e, FuncSym):
            if e.name not in bindings.funcs:
                raise UnboundSymbolError(f"opaque function {e.name!r} has no instantiation")
            return ev(bindings.derived(e.name, e.order))
        if isinstance(e, Sum):
            acc: Number = Fraction(0)
            for t in e.terms:
                acc = acc + ev(t)
            return acc
        if isinstance(e, Product):
            acc = Fraction(1)
            for f in e.factors:
                acc = acc * ev(f)
            return acc
        if isinstance(e, Power):
            v = ev(e.base)
            q = e.exponent
            if q < 0 and abs(v) < eps_guard:
                raise GuardViolation(f"denominator {to_string(e.base)} = {float(v):g} within guard margin")
            if q.denominator == 1:
                if isinstance(v, Fraction):
                    return v ** q.numerator
                return float(v) ** q.numerator
            fv = float(v)
            if fv < 0:
                raise EvaluationError(f"fractional power of negative value {fv:g}")
            return fv ** float(q)
        if isinstance(e, Apply):
            v = ev(e.arg)
            if e.func == "abs":
                return abs(v)
            fv = float(v)
            try:
                if e.func == "exp":
                    return math.exp(fv)
                if e.func == "ln":
                    if fv <= 0:
                        raise EvaluationError(f"ln of non-positive value {fv:g}")
                    return math.log(fv)
                if e.func == "sin":
                    return math.sin(fv)
                if e.func == "cos":
                    return math.cos(fv)
            except OverflowError:
                raise EvaluationError("overflow in elementary function") from None
        raise TypeError(f"cannot evaluate {e!r}")

    result = ev(e)
    if isinstance(result, float) and not math.isfinite(result):
        raise EvaluationError("evaluation produced a non-finite value")
    return result


# ---------------------------------------------------------------------------
# compilation to plain Python floats (fast path for integrators/quadrature)


def _pysrc(e: Expr) -> str:
    if isinstance(e, Const):
        v = e.value
        if isinstance(v, Fraction):
            if v.denominator == 1:
                return f"({v.numerator})"
            return f"({v.numerator}/{v.denominator})"
        return f"({v!r})"
    if isinstance(e, JetSym):
        return e.name
    if isinstance(e, ConstSym):
        raise UnboundSymbolError(f"named constant {e.name!r} is unbound at compile time")
    if isinstance(e, FuncSym):
        raise UnboundSymbolError(f"opaque function {e.name!r} has no instantiation at compile time")
    if isinstance(e, Sum):
        return "(" + " + ".join(_pysrc(t) for t in e.terms) + ")"
    if isinstance(e, Product):
        return "(" + " * ".join(_pysrc(f) for f in e.factors) + ")"
    if isinstance(e, Power):
        q = e.exponent
        if q.denominator == 1:
            return f"({_pysrc(e.base)})**({q.numerator})"
        return f"({_pysrc(e.base)})**({q.numerator}/{q.denominator})"
    if isinstance(e, Apply):
        inner = _pysrc(e.arg)
        if e.func == "abs":
            return f"abs({inner})"
        name = {"exp": "exp", "ln": "log", "sin": "sin", "cos": "cos"}[e.func]
        return f"math.{name}({inner})"
    raise TypeError(f"cannot compile {e!r}")


def compile_expr(
    e: Expr,
    args: Iterable[str] = ("x", "xdot", "t"),
    *,
    funcs: Mapping[str, Expr] | None = None,
    constants: Mapping[str, Number] | None = None,
) -> Callable[..., float]:
    """Compile an expression to a float-returning Python function of args.

    Opaque functions and named constants are substituted first; any atom
    left over that is not in args raises UnboundSymbolError.
    """
    body = e
    if funcs:
        body = instantiate(body, funcs)
    if constants:
        body = bind_constants(body, constants)
    args = tuple(args)
    leftover = {a.name for a in free_atoms(body) if isinstance(a, JetSym)} - set(args)
    if leftover:
        raise UnboundSymbolError(f"jets {sorted(leftover)} not among compile args {args}")
    src = f"lambda {', '.join(args)}: {_pysrc(body)}"
    return eval(src, {"math": math})  # noqa: S307 - internally generated source


# ---------------------------------------------------------------------------
# printing (canonical; parse(to_string(e)) == e on canonical rational trees)


def _print_const_positive(v) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    return repr(v)


def _print_base(b: Expr) -> str:
    if isinstance(b, (JetSym, ConstSym, FuncSym, Apply)):
        return _print_factor(b)
    return "(" + to_string(b) + ")"


def _print_pow(base: Expr, q: Fraction) -> str:
    s = _print_base(base)
    if q == 1:
        return s
    if q.denominator == 1 and q > 0:
        return f"{s}^{q.numerator}"
    if q.denominator == 1:
        return f"{s}^({q.numerator})"
    return f"{s}^({q.numerator}/{q.denominator})"


def _print_factor(f: Expr) -> str:
    if isinstance(f, JetSym):
        return {"x": "x", "xdot": "x'", "xddot": "x''", "xdddot": "x'''", "t": "t"}[f.name]
    if isinstance(f, ConstSym):
        return f.name
    if isinstance(f, FuncSym):
        return f"{f.name}(t)" + "'" * f.order
    if isinstance(f, Apply):
        return f"{f.func}({to_string(f.arg)})"
    if isinstance(f, Power):
        return _print_pow(f.base, f.exponent)
    raise TypeError(f"not a printable factor: {f!r}")


def _print_term(coeff, factors: tuple[Expr, ...]) -> str:
    num_parts: list[str] = []
    den_parts: list[str] = []
    for f in factors:
        if isinstance(f, Power) and f.exponent < 0:
            # "x/(a+b)^2" would re-parse with the square expanded before the
            # inversion; sum bases below -1 keep their explicit exponent
            if isinstance(f.base, Sum) and f.exponent != -1:
                num_parts.append(_print_pow(f.base, f.exponent))
            else:
                den_parts.append(_print_pow(f.base, -f.exponent))
        else:
            num_parts.append(_print_factor(f))
    cs = _print_const_positive(coeff)
    if cs != "1" or not num_parts:
        num_parts.insert(0, cs)
    num = "*".join(num_parts)
    if den_parts:
        # chained division: "a/x/(u + v)" re-parses factor by factor, whereas
        # "a/(x*(u + v))" would expand the product before inverting it
        return num + "/" + "/".join(den_parts)
    return num


def to_string(e: Expr) -> str:
    terms = e.terms if isinstance(e, Sum) else (e,)
    out: list[str] = []
    for i, term in enumerate(terms):
        coeff, factors = as_coeff_factors(term)
        negative = coeff < 0
        body = _print_term(-coeff if negative else coeff, factors)
        if i == 0:
            out.append("-" + body if negative else body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)
