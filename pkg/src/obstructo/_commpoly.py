"""Internal commutative polynomial engine with head-monomial rewrite rules.

Shared by the Poisson-algebra module (reduced phase-space polynomials) and
the differential-operator coefficient rings.  Not part of the public API.
"""
from __future__ import annotations

from typing import Callable, Mapping, Sequence

from .scalars import ParamScalar, render_terms


class CommRing:
    """A commutative polynomial ring with optional power-reduction rules.

    A rule ``gen^2 -> replacement`` rewrites any monomial whose exponent in
    ``gen`` is at least 2; replacements must have exponent at most 1 in the
    ruled generator so rewriting terminates.
    """

    def __init__(self, name: str, generators: Sequence[str]):
        self.name = name
        self.generators = tuple(generators)
        self.index = {g: k for k, g in enumerate(self.generators)}
        self.rules: dict[int, "CommPoly"] = {}

    def add_square_rule(self, gen: str, replacement: "CommPoly") -> None:
        g = self.index[gen]
        if any(m[g] >= 2 for m in replacement.terms):
            raise ValueError("replacement must be reduced in the ruled generator")
        self.rules[g] = replacement

    # -- element constructors ------------------------------------------

    def zero(self) -> "CommPoly":
        return CommPoly(self, {})

    def one(self) -> "CommPoly":
        return self.constant(ParamScalar.one())

    def constant(self, scalar: ParamScalar) -> "CommPoly":
        zero_mon = (0,) * len(self.generators)
        return CommPoly(self, {zero_mon: scalar})

    def gen(self, name: str, power: int = 1) -> "CommPoly":
        mon = [0] * len(self.generators)
        mon[self.index[name]] = power
        return CommPoly(self, {tuple(mon): ParamScalar.one()})

    def monomial(self, exps: Sequence[int], coeff: ParamScalar | None = None) -> "CommPoly":
        return CommPoly(
            self, {tuple(exps): coeff if coeff is not None else ParamScalar.one()}
        )

    def __repr__(self):
        return f"CommRing({self.name!r}, {self.generators})"


class CommPoly:
    """Reduced polynomial: mapping from exponent tuple to ParamScalar."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: CommRing, terms: Mapping[tuple, ParamScalar], reduced=False):
        self.ring = ring
        canon: dict[tuple, ParamScalar] = {}
        for mon, coeff in terms.items():
            if coeff.is_zero():
                continue
            prev = canon.get(mon)
            tot = coeff if prev is None else prev + coeff
            if tot.is_zero():
                canon.pop(mon, None)
            else:
                canon[mon] = tot
        self.terms = canon
        if not reduced and ring.rules:
            self._reduce_inplace()

    def _reduce_inplace(self) -> None:
        rules = self.ring.rules
        while True:
            target = None
            for mon in self.terms:
                for g in rules:
                    if mon[g] >= 2:
                        target = (mon, g)
                        break
                if target:
                    break
            if target is None:
                return
            mon, g = target
            coeff = self.terms.pop(mon)
            rest = list(mon)
            rest[g] -= 2
            for rmon, rcoeff in rules[g].terms.items():
                new = tuple(a + b for a, b in zip(rest, rmon))
                c = coeff * rcoeff
                prev = self.terms.get(new)
                tot = c if prev is None else prev + c
                if tot.is_zero():
                    self.terms.pop(new, None)
                else:
                    self.terms[new] = tot

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "CommPoly") -> None:
        if self.ring is not other.ring:
            raise ValueError(
                f"mixed rings: {self.ring.name!r} and {other.ring.name!r}"
            )

    def __add__(self, other: "CommPoly") -> "CommPoly":
        self._check(other)
        merged = dict(self.terms)
        for mon, coeff in other.terms.items():
            prev = merged.get(mon)
            merged[mon] = coeff if prev is None else prev + coeff
        return CommPoly(self.ring, merged, reduced=True)

    def __sub__(self, other: "CommPoly") -> "CommPoly":
        return self + (-other)

    def __neg__(self) -> "CommPoly":
        return CommPoly(self.ring, {m: -c for m, c in self.terms.items()}, reduced=True)

    def __mul__(self, other: "CommPoly") -> "CommPoly":
        self._check(other)
        out: dict[tuple, ParamScalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mon = tuple(a + b for a, b in zip(m1, m2))
                c = c1 * c2
                prev = out.get(mon)
                out[mon] = c if prev is None else prev + c
        return CommPoly(self.ring, out)

    def scale(self, scalar: ParamScalar) -> "CommPoly":
        if scalar.is_zero():
            return self.ring.zero()
        return CommPoly(
            self.ring, {m: c * scalar for m, c in self.terms.items()}, reduced=True
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CommPoly)
            and self.ring is other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((id(self.ring), frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree of the reduced representative (-1 for the zero poly)."""
        if not self.terms:
            return -1
        return max(sum(mon) for mon in self.terms)

    # -- calculus ----------------------------------------------------------

    def free_partial(self, gen: str) -> "CommPoly":
        """Formal partial derivative treating generators as independent."""
        g = self.ring.index[gen]
        out: dict[tuple, ParamScalar] = {}
        for mon, coeff in self.terms.items():
            p = mon[g]
            if p == 0:
                continue
            new = list(mon)
            new[g] = p - 1
            key = tuple(new)
            c = coeff.scale(p)
            prev = out.get(key)
            out[key] = c if prev is None else prev + c
        return CommPoly(self.ring, out)

    def derive(self, images: Mapping[str, "CommPoly"]) -> "CommPoly":
        """Apply the derivation sending each generator to its image."""
        total = self.ring.zero()
        for gen in images:
            img = images[gen]
            if img.is_zero():
                continue
            total = total + self.free_partial(gen) * img
        return total

    def map_coeffs(self, fn: Callable[[ParamScalar], ParamScalar]) -> "CommPoly":
        return CommPoly(self.ring, {m: fn(c) for m, c in self.terms.items()}, reduced=True)

    # -- rendering -----------------------------------------------------------

    def monomial_str(self, mon: tuple) -> str:
        parts = []
        for g, p in zip(self.ring.generators, mon):
            if p == 1:
                parts.append(g)
            elif p > 1:
                parts.append(f"{g}^{p}")
        return "*".join(parts)

    def render(self) -> str:
        pieces = []
        order = sorted(self.terms, key=lambda m: (sum(m), m), reverse=True)
        for mon in order:
            coeff = self.terms[mon]
            sym = self.monomial_str(mon)
            body = coeff.render()
            if sym and not coeff.is_one():
                # fold single-term coefficients into the monomial string
                if len(coeff.terms) == 1:
                    pieces.append((next(iter(coeff.terms.items())), sym))
                    continue
                pieces.append((None, f"({body})*{sym}"))
            elif sym:
                pieces.append((None, sym))
            else:
                pieces.append((None, body))
        return _render_mixed(pieces)


def _render_mixed(pieces) -> str:
    from .scalars import GaussianRational, _param_monomial_str, format_coefficient

    rendered = []
    for head, sym in pieces:
        if head is None:
            sign = "-" if sym.startswith("-") else "+"
            rendered.append((sign, sym[1:] if sym.startswith("-") else sym))
        else:
            exps, coeff = head
            sign, mag = format_coefficient(coeff)
            pm = _param_monomial_str(exps)
            factors = [f for f in (mag if mag != "1" else "", pm, sym) if f]
            rendered.append((sign, "*".join(factors) if factors else "1"))
    if not rendered:
        return "0"
    first_sign, first_body = rendered[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in rendered[1:]:
        out += f" {sign} {body}"
    return out
