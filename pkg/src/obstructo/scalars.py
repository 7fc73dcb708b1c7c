"""Exact coefficient arithmetic: Gaussian rationals times parameter monomials.

Coefficients are complex numbers with exact rational real and imaginary
parts, multiplied by monomials in a closed set of formal parameters.  All
symbolic residuals produced elsewhere in the package bottom out here, so no
floating point ever enters the symbolic path.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

PARAMETERS = ("hbar", "s", "a", "c", "b", "e", "nu", "eta")
_PARAM_INDEX = {name: k for k, name in enumerate(PARAMETERS)}
_NPARAMS = len(PARAMETERS)
_ZERO_EXPS = (0,) * _NPARAMS

RationalLike = Union[int, Fraction]


class UnknownParameter(ValueError):
    """Raised when a parameter name outside the fixed set is used."""


class UnboundParameter(KeyError):
    """Raised by evaluation when a parameter has no binding."""


class InexactDivision(ArithmeticError):
    """Raised when an exact monomial division is impossible."""


class GaussianRational:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GaussianRational)
            and self.re == other.re
            and self.im == other.im
        )

    def __hash__(self):
        return hash((self.re, self.im))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"


_GR_ZERO = GaussianRational(0)
_GR_ONE = GaussianRational(1)


def _coerce_coeff(value) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, Rational):
        return GaussianRational(Fraction(value))
    raise TypeError(f"cannot use {value!r} as an exact coefficient")


class ParamScalar:
    """Canonical sum of Gaussian-rational coefficients times parameter monomials.

    Terms are keyed by the exponent vector over ``PARAMETERS``; zero
    coefficients are dropped and the zero scalar is the empty term map, so
    structural equality is semantic equality.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, GaussianRational] | None = None):
        canon = {}
        if terms:
            for exps, coeff in terms.items():
                if not coeff.is_zero():
                    canon[exps] = canon.get(exps, _GR_ZERO) + coeff
                    if canon[exps].is_zero():
                        del canon[exps]
        self.terms = canon

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "ParamScalar":
        return cls()

    @classmethod
    def one(cls) -> "ParamScalar":
        return cls({_ZERO_EXPS: _GR_ONE})

    @classmethod
    def rational(cls, value: RationalLike, imag: RationalLike = 0) -> "ParamScalar":
        return cls({_ZERO_EXPS: GaussianRational(value, imag)})

    @classmethod
    def imaginary_unit(cls) -> "ParamScalar":
        return cls.rational(0, 1)

    @classmethod
    def parameter(cls, name: str, power: int = 1) -> "ParamScalar":
        if name not in _PARAM_INDEX:
            raise UnknownParameter(
                f"unrecognized parameter {name!r}; allowed: {', '.join(PARAMETERS)}"
            )
        if power < 0:
            raise ValueError("parameter exponents must be nonnegative")
        exps = [0] * _NPARAMS
        exps[_PARAM_INDEX[name]] = power
        return cls({tuple(exps): _GR_ONE})

    @classmethod
    def term(cls, coeff, exponents: Mapping[str, int] | None = None) -> "ParamScalar":
        exps = [0] * _NPARAMS
        for name, p in (exponents or {}).items():
            if name not in _PARAM_INDEX:
                raise UnknownParameter(f"unrecognized parameter {name!r}")
            if p < 0:
                raise ValueError("parameter exponents must be nonnegative")
            exps[_PARAM_INDEX[name]] = p
        return cls({tuple(exps): _coerce_coeff(coeff)})

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "ParamScalar") -> "ParamScalar":
        merged = dict(self.terms)
        for exps, coeff in other.terms.items():
            merged[exps] = merged.get(exps, _GR_ZERO) + coeff
        return ParamScalar(merged)

    def __sub__(self, other: "ParamScalar") -> "ParamScalar":
        return self + (-other)

    def __neg__(self) -> "ParamScalar":
        return ParamScalar({e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "ParamScalar") -> "ParamScalar":
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                prev = out.get(e)
                out[e] = c if prev is None else prev + c
        return ParamScalar(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, ParamScalar) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {_ZERO_EXPS: _GR_ONE}

    def scale(self, value) -> "ParamScalar":
        c = _coerce_coeff(value)
        return ParamScalar({e: k * c for e, k in self.terms.items()})

    # -- structure queries ---------------------------------------------

    def parameters_used(self) -> set:
        used = set()
        for exps in self.terms:
            for k, p in enumerate(exps):
                if p:
                    used.add(PARAMETERS[k])
        return used

    def constant_value(self) -> GaussianRational:
        """The coefficient when the scalar is parameter-free; error otherwise."""
        if not self.terms:
            return _GR_ZERO
        if set(self.terms) == {_ZERO_EXPS}:
            return self.terms[_ZERO_EXPS]
        raise InexactDivision("scalar is not parameter-free")

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def divide_exact(self, other: "ParamScalar") -> "ParamScalar":
        """Exact division by a single-term scalar; raises InexactDivision."""
        if not other.is_monomial():
            raise InexactDivision("divisor must be a single term")
        (dexps, dcoeff), = other.terms.items()
        out = {}
        for exps, coeff in self.terms.items():
            q = tuple(a - b for a, b in zip(exps, dexps))
            if any(p < 0 for p in q):
                raise InexactDivision("parameter exponents do not divide")
            out[q] = coeff / dcoeff
        return ParamScalar(out)

    # -- evaluation -----------------------------------------------------

    def eval_exact(self, bindings: Mapping[str, RationalLike]) -> GaussianRational:
        """Evaluate with exact rational bindings, staying in Gaussian rationals."""
        total = _GR_ZERO
        for exps, coeff in self.terms.items():
            value = coeff
            for k, p in enumerate(exps):
                if p:
                    name = PARAMETERS[k]
                    if name not in bindings:
                        raise UnboundParameter(name)
                    b = bindings[name]
                    b = b if isinstance(b, GaussianRational) else GaussianRational(b)
                    for _ in range(p):
                        value = value * b
            total = total + value
        return total

    def eval(self, bindings: Mapping[str, complex]) -> complex:
        total = 0j
        for exps, coeff in self.terms.items():
            value = coeff.to_complex()
            for k, p in enumerate(exps):
                if p:
                    name = PARAMETERS[k]
                    if name not in bindings:
                        raise UnboundParameter(name)
                    value *= complex(bindings[name]) ** p
            total += value
        return total

    # -- rendering --------------------------------------------------------

    def render(self) -> str:
        return render_terms(
            (coeff, _param_monomial_str(exps))
            for exps, coeff in sorted(self.terms.items(), reverse=True)
        )

    def __repr__(self):
        return f"ParamScalar<{self.render()}>"


def _param_monomial_str(exps: tuple) -> str:
    parts = []
    for k, p in enumerate(exps):
        if p == 1:
            parts.append(PARAMETERS[k])
        elif p > 1:
            parts.append(f"{PARAMETERS[k]}^{p}")
    return "*".join(parts)


def _rational_str(x: Fraction) -> str:
    return str(x) if x.denominator == 1 else f"({x.numerator}/{x.denominator})"


def format_coefficient(coeff: GaussianRational) -> tuple[str, str]:
    """Split a coefficient into a sign ("+"/"-") and a printable magnitude."""
    if coeff.im == 0:
        sign = "-" if coeff.re < 0 else "+"
        return sign, _rational_str(abs(coeff.re))
    if coeff.re == 0:
        sign = "-" if coeff.im < 0 else "+"
        mag = abs(coeff.im)
        body = "i" if mag == 1 else f"{_rational_str(mag)}*i"
        return sign, body
    imsign = "+" if coeff.im > 0 else "-"
    return "+", (
        f"({_rational_str(coeff.re)}{imsign}{_rational_str(abs(coeff.im))}*i)"
    )


def render_terms(terms: Iterable[tuple[GaussianRational, str]]) -> str:
    """Render (coefficient, symbol-part) pairs into a canonical sum string."""
    pieces = []
    for coeff, sym in terms:
        sign, mag = format_coefficient(coeff)
        if sym:
            body = sym if mag == "1" else f"{mag}*{sym}"
        else:
            body = mag
        pieces.append((sign, body))
    if not pieces:
        return "0"
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# -- spec-level operation wrappers -------------------------------------------


def scalar_arith(op: str, x: ParamScalar, y: ParamScalar | None = None) -> ParamScalar:
    """Dispatch add/mul/neg on canonical scalars."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    raise ValueError(f"unknown scalar operation {op!r}")


def scalar_eval(x: ParamScalar, bindings: Mapping[str, complex]) -> complex:
    """Evaluate a scalar at numeric parameter bindings."""
    return x.eval(bindings)
