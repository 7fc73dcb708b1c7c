"""Noncommutative symbolic algebra: PBW rewriting and differential operators.

Operator algebras are presented by generator-swap rules (Lie-type
relations) plus optional central power rules; every stored element is kept
in PBW normal form.  Differential-operator polynomials carry commutative
function coefficients to the left of derivation words and support exact
application and commutators, which is how the explicit prequantization
formulas are checked.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Mapping, Sequence

from ._commpoly import CommPoly, CommRing
from .scalars import InexactDivision, ParamScalar, render_terms


class AlgebraMismatch(ValueError):
    """Raised when operator polynomials over different algebras are combined."""


class RingMismatch(ValueError):
    """Raised when differential operators over different rings are combined."""


Word = tuple  # tuple[int, ...] of generator indices
TermList = list  # list[tuple[Word, ParamScalar]]


class OpAlgebraSpec:
    """Generators with swap rules (and optional power rules) for PBW rewriting.

    ``swap_rules[(hi, lo)]`` replaces the out-of-order adjacent word
    ``g_hi g_lo`` (hi > lo); ``power_rules[g]`` replaces ``g g``.  Each rule
    strictly decreases the graded-lexicographic order of the affected word,
    so rewriting terminates; confluence is probed empirically.
    """

    def __init__(self, name: str, generators: Sequence[str]):
        self.name = name
        self.generators = tuple(generators)
        self.index = {g: k for k, g in enumerate(self.generators)}
        self.swap_rules: dict[tuple[int, int], TermList] = {}
        self.power_rules: dict[int, TermList] = {}
        # optional link to the classical side, used by the generator
        # homomorphism checks
        self.classical_space_name: str | None = None
        self.gen_map: dict[str, str] = {}

    def add_swap_rule(self, hi: str, lo: str, replacement: TermList) -> None:
        i, j = self.index[hi], self.index[lo]
        if i <= j:
            raise ValueError("swap rule must reorder a descending pair")
        self.swap_rules[(i, j)] = replacement

    def add_power_rule(self, gen: str, replacement: TermList) -> None:
        self.power_rules[self.index[gen]] = replacement

    # -- element constructors -------------------------------------------

    def zero(self) -> "OpPoly":
        return OpPoly(self, {})

    def one(self) -> "OpPoly":
        return OpPoly(self, {(): ParamScalar.one()})

    def constant(self, scalar: ParamScalar) -> "OpPoly":
        return OpPoly(self, {(): scalar})

    def gen(self, name: str) -> "OpPoly":
        return OpPoly(self, {(self.index[name],): ParamScalar.one()})

    def word(self, names: Sequence[str], coeff: ParamScalar | None = None) -> "OpPoly":
        w = tuple(self.index[n] for n in names)
        return OpPoly(self, {w: coeff if coeff is not None else ParamScalar.one()})

    def __repr__(self):
        return f"OpAlgebraSpec({self.name!r})"

    # -- rewriting ---------------------------------------------------------

    def reducible_positions(self, word: Word) -> list[int]:
        out = []
        for k in range(len(word) - 1):
            a, b = word[k], word[k + 1]
            if a > b or (a == b and a in self.power_rules):
                out.append(k)
        return out

    def rewrite_at(self, word: Word, k: int) -> TermList:
        a, b = word[k], word[k + 1]
        rule = self.power_rules[a] if a == b else self.swap_rules[(a, b)]
        head, tail = word[:k], word[k + 2:]
        return [(head + rw + tail, rc) for rw, rc in rule]

    def normal_terms(self, terms: Mapping[Word, ParamScalar], chooser=None) -> dict:
        """Rewrite a term map to normal form; ``chooser`` picks the redex."""
        out: dict[Word, ParamScalar] = {}
        stack = [(w, c) for w, c in terms.items() if not c.is_zero()]
        while stack:
            word, coeff = stack.pop()
            positions = self.reducible_positions(word)
            if not positions:
                prev = out.get(word)
                tot = coeff if prev is None else prev + coeff
                if tot.is_zero():
                    out.pop(word, None)
                else:
                    out[word] = tot
                continue
            k = positions[0] if chooser is None else chooser(positions)
            for nw, rc in self.rewrite_at(word, k):
                stack.append((nw, coeff * rc))
        return out


class OpPoly:
    """PBW-normal noncommutative polynomial over an OpAlgebraSpec."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: OpAlgebraSpec, terms: Mapping[Word, ParamScalar]):
        self.algebra = algebra
        self.terms = algebra.normal_terms(terms)

    def _check(self, other: "OpPoly") -> None:
        if self.algebra is not other.algebra:
            raise AlgebraMismatch(
                f"operators over {self.algebra.name} and {other.algebra.name}"
            )

    def __add__(self, other: "OpPoly") -> "OpPoly":
        self._check(other)
        merged = dict(self.terms)
        for w, c in other.terms.items():
            prev = merged.get(w)
            merged[w] = c if prev is None else prev + c
        return OpPoly(self.algebra, merged)

    def __sub__(self, other: "OpPoly") -> "OpPoly":
        return self + (-other)

    def __neg__(self) -> "OpPoly":
        return OpPoly(self.algebra, {w: -c for w, c in self.terms.items()})

    def __mul__(self, other: "OpPoly") -> "OpPoly":
        self._check(other)
        prod: dict[Word, ParamScalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                prev = prod.get(w)
                prod[w] = c if prev is None else prev + c
        return OpPoly(self.algebra, prod)

    def scale(self, scalar: ParamScalar) -> "OpPoly":
        return OpPoly(self.algebra, {w: c * scalar for w, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OpPoly)
            and self.algebra is other.algebra
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((id(self.algebra), frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, names: Sequence[str]) -> ParamScalar:
        w = tuple(self.algebra.index[n] for n in names)
        return self.terms.get(w, ParamScalar.zero())

    def word_str(self, word: Word) -> str:
        parts = []
        k = 0
        while k < len(word):
            j = k
            while j < len(word) and word[j] == word[k]:
                j += 1
            g = self.algebra.generators[word[k]]
            parts.append(g if j - k == 1 else f"{g}^{j - k}")
            k = j
        return "*".join(parts)

    def render(self) -> str:
        order = sorted(self.terms, key=lambda w: (len(w), w), reverse=True)
        pieces = []
        for w in order:
            coeff = self.terms[w]
            sym = self.word_str(w)
            if len(coeff.terms) == 1:
                ((exps, gr),) = coeff.terms.items()
                from .scalars import _param_monomial_str, format_coefficient

                sign, mag = format_coefficient(gr)
                pm = _param_monomial_str(exps)
                factors = [f for f in (mag if mag != "1" else "", pm, sym) if f]
                body = "*".join(factors) if factors else "1"
                pieces.append((sign, body))
            else:
                body = f"({coeff.render()})"
                pieces.append(("+", f"{body}*{sym}" if sym else body))
        if not pieces:
            return "0"
        first_sign, first_body = pieces[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"OpPoly<{self.render()} @ {self.algebra.name}>"


def normal_form(x: OpPoly) -> OpPoly:
    """Unique PBW-ordered representative (elements are stored normalized)."""
    return OpPoly(x.algebra, x.terms)


def commutator(x: OpPoly, y: OpPoly) -> OpPoly:
    """normal_form(x*y - y*x)."""
    x._check(y)
    return x * y - y * x


def q1_transport(x: OpPoly, y: OpPoly) -> OpPoly:
    """(i/hbar)[x, y]: the operator image of a classical bracket.

    Every commutator in the built-in algebras carries at least one power of
    hbar per term, so the division is exact; a failure raises
    InexactDivision and signals a malformed relation table.
    """
    comm = commutator(x, y)
    ihbar = ParamScalar.parameter("hbar")
    i_unit = ParamScalar.imaginary_unit()
    out = {w: c.divide_exact(ihbar) * i_unit for w, c in comm.terms.items()}
    return OpPoly(x.algebra, out)


# -- built-in operator algebras ---------------------------------------------------


def ihbar_scalar(sign: int = 1) -> ParamScalar:
    """The scalar sign * i * hbar."""
    from .scalars import GaussianRational

    return ParamScalar({(1, 0, 0, 0, 0, 0, 0, 0): GaussianRational(0, sign)})


def weyl_algebra() -> OpAlgebraSpec:
    """Heisenberg relations: generators Qq < Qp with [Qp, Qq] = -i*hbar*I."""
    alg = OpAlgebraSpec("weyl", ["Qq", "Qp"])
    one = ParamScalar.one()
    alg.add_swap_rule("Qp", "Qq", [((0, 1), one), ((), ihbar_scalar(-1))])
    alg.classical_space_name = "r2n"
    alg.gen_map = {"Qq": "q", "Qp": "p"}
    return alg


def su2_algebra() -> OpAlgebraSpec:
    """Enveloping su(2): [S_j, S_k] = i*hbar*eps_jkl S_l, no Casimir quotient."""
    alg = OpAlgebraSpec("su2", ["S1", "S2", "S3"])
    one = ParamScalar.one()
    ih = ihbar_scalar(1)
    mih = ihbar_scalar(-1)
    # S2*S1 -> S1*S2 - i hbar S3 ; S3*S1 -> S1*S3 + i hbar S2 ;
    # S3*S2 -> S2*S3 - i hbar S1
    alg.add_swap_rule("S2", "S1", [((0, 1), one), ((2,), mih)])
    alg.add_swap_rule("S3", "S1", [((0, 2), one), ((1,), ih)])
    alg.add_swap_rule("S3", "S2", [((1, 2), one), ((0,), mih)])
    alg.classical_space_name = "s2"
    alg.gen_map = {"S1": "S1", "S2": "S2", "S3": "S3"}
    return alg


def e2_operator_algebra() -> OpAlgebraSpec:
    """Euclidean e(2) operators: L < C < S with S^2 + C^2 = I central."""
    alg = OpAlgebraSpec("e2op", ["L", "C", "S"])
    one = ParamScalar.one()
    minus_one = ParamScalar.rational(-1)
    # C*L -> L*C - i hbar S ; S*L -> L*S + i hbar C ; S*C -> C*S
    alg.add_swap_rule("C", "L", [((0, 1), one), ((2,), ihbar_scalar(-1))])
    alg.add_swap_rule("S", "L", [((0, 2), one), ((1,), ihbar_scalar(1))])
    alg.add_swap_rule("S", "C", [((1, 2), one)])
    alg.add_power_rule("S", [((), one), ((1, 1), minus_one)])
    alg.classical_space_name = "tstar_s1"
    alg.gen_map = {"L": "l", "C": "cos_theta", "S": "sin_theta"}
    return alg


BUILTIN_ALGEBRAS = {
    "weyl": weyl_algebra,
    "su2": su2_algebra,
    "e2op": e2_operator_algebra,
}


def confluence_probe(
    algebra: OpAlgebraSpec, trials: int, max_length: int = 6, seed: int = 2024
) -> tuple[bool, Word | None]:
    """Reduce random words under two randomized rule orders and compare.

    Returns (passed, counterexample word).  A failure means the algebra's
    rules are not confluent and is a build-stopping finding.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = random.Random(seed)
    ngen = len(algebra.generators)
    for _ in range(trials):
        length = rng.randint(1, max_length)
        word = tuple(rng.randrange(ngen) for _ in range(length))
        results = []
        for sub_seed in (rng.random(), rng.random()):
            sub_rng = random.Random(sub_seed)
            chooser = lambda positions: positions[sub_rng.randrange(len(positions))]
            nf = algebra.normal_terms({word: ParamScalar.one()}, chooser=chooser)
            results.append(nf)
        deterministic = algebra.normal_terms({word: ParamScalar.one()})
        if results[0] != results[1] or results[0] != deterministic:
            return False, word
    return True, None


# -- differential operators with function coefficients ---------------------------


class DiffRing:
    """A coefficient ring together with named commuting derivations."""

    def __init__(
        self,
        name: str,
        coeff_ring: CommRing,
        derivations: Sequence[tuple[str, Mapping[str, CommPoly]]],
    ):
        self.name = name
        self.coeff_ring = coeff_ring
        self.derivation_names = tuple(n for n, _ in derivations)
        self.derivation_images = [dict(images) for _, images in derivations]

    def zero(self) -> "DiffOpPoly":
        return DiffOpPoly(self, {})

    def constant(self, coeff: CommPoly) -> "DiffOpPoly":
        return DiffOpPoly(self, {(0,) * len(self.derivation_names): coeff})

    def scalar(self, scalar: ParamScalar) -> "DiffOpPoly":
        return self.constant(self.coeff_ring.constant(scalar))

    def derivation(self, name: str, coeff: CommPoly | None = None) -> "DiffOpPoly":
        k = self.derivation_names.index(name)
        dvec = [0] * len(self.derivation_names)
        dvec[k] = 1
        c = coeff if coeff is not None else self.coeff_ring.one()
        return DiffOpPoly(self, {tuple(dvec): c})

    def derive(self, k: int, f: CommPoly) -> CommPoly:
        return f.derive(self.derivation_images[k])

    def __repr__(self):
        return f"DiffRing({self.name!r})"


class DiffOpPoly:
    """Normal form: coefficient polynomials to the left of derivation words."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: DiffRing, terms: Mapping[tuple, CommPoly]):
        self.ring = ring
        self.terms = {d: c for d, c in terms.items() if not c.is_zero()}

    def _check(self, other: "DiffOpPoly") -> None:
        if self.ring is not other.ring:
            raise RingMismatch(
                f"operators over rings {self.ring.name} and {other.ring.name}"
            )

    def __add__(self, other: "DiffOpPoly") -> "DiffOpPoly":
        self._check(other)
        merged = dict(self.terms)
        for d, c in other.terms.items():
            merged[d] = merged[d] + c if d in merged else c
        return DiffOpPoly(self.ring, merged)

    def __sub__(self, other: "DiffOpPoly") -> "DiffOpPoly":
        return self + (-other)

    def __neg__(self) -> "DiffOpPoly":
        return DiffOpPoly(self.ring, {d: -c for d, c in self.terms.items()})

    def scale(self, scalar: ParamScalar) -> "DiffOpPoly":
        return DiffOpPoly(self.ring, {d: c.scale(scalar) for d, c in self.terms.items()})

    def _compose_single(self, k: int, op_terms: dict) -> dict:
        """Left-compose the k-th derivation with a term map (Leibniz rule)."""
        out: dict[tuple, CommPoly] = {}
        for dvec, coeff in op_terms.items():
            derived = self.ring.derive(k, coeff)
            if not derived.is_zero():
                out[dvec] = out[dvec] + derived if dvec in out else derived
            up = list(dvec)
            up[k] += 1
            up = tuple(up)
            out[up] = out[up] + coeff if up in out else coeff
        return out

    def __mul__(self, other: "DiffOpPoly") -> "DiffOpPoly":
        self._check(other)
        total: dict[tuple, CommPoly] = {}
        for dvec, coeff in self.terms.items():
            acc = dict(other.terms)
            for k, power in enumerate(dvec):
                for _ in range(power):
                    acc = self._compose_single(k, acc)
            for d2, c2 in acc.items():
                c = coeff * c2
                total[d2] = total[d2] + c if d2 in total else c
        return DiffOpPoly(self.ring, total)

    def apply(self, f: CommPoly) -> CommPoly:
        """Apply the operator to a coefficient-ring element."""
        if f.ring is not self.ring.coeff_ring:
            raise RingMismatch("argument lives in a different coefficient ring")
        total = self.ring.coeff_ring.zero()
        for dvec, coeff in self.terms.items():
            g = f
            for k, power in enumerate(dvec):
                for _ in range(power):
                    g = self.ring.derive(k, g)
            total = total + coeff * g
        return total

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiffOpPoly)
            and self.ring is other.ring
            and self.terms == other.terms
        )

    def is_zero(self) -> bool:
        return not self.terms

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for dvec in sorted(self.terms, key=lambda d: (sum(d), d), reverse=True):
            dstr = "*".join(
                (name if p == 1 else f"{name}^{p}")
                for name, p in zip(self.ring.derivation_names, dvec)
                if p
            )
            cstr = self.terms[dvec].render()
            if dstr:
                parts.append(f"({cstr})*{dstr}")
            else:
                parts.append(f"({cstr})")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOpPoly<{self.render()}>"


def diffop_apply(D: DiffOpPoly, f: CommPoly) -> CommPoly:
    """Apply a differential operator to a coefficient-ring element."""
    return D.apply(f)


def diffop_commutator(D1: DiffOpPoly, D2: DiffOpPoly) -> DiffOpPoly:
    """Normal-form commutator of two differential operators."""
    D1._check(D2)
    return D1 * D2 - D2 * D1


# -- standard coefficient rings ---------------------------------------------------


def polynomial_diff_ring(variables: Sequence[str], name: str | None = None) -> DiffRing:
    """Polynomial coefficients with one derivation per variable."""
    ring = CommRing(name or "poly(" + ",".join(variables) + ")", variables)
    derivations = []
    for v in variables:
        derivations.append((f"d_{v}", {v: ring.one()}))
    return DiffRing(ring.name, ring, derivations)


def trig_theta_diff_ring() -> DiffRing:
    """Trigonometric polynomials in theta with the derivation d/dtheta."""
    ring = CommRing("trig(theta)", ["cos_theta", "sin_theta"])
    cos = ring.gen("cos_theta")
    sin = ring.gen("sin_theta")
    ring.add_square_rule("sin_theta", ring.one() - cos * cos)
    return DiffRing(
        "trig(theta)",
        ring,
        [("d_theta", {"sin_theta": cos, "cos_theta": -sin})],
    )


def torus_diff_ring() -> DiffRing:
    """Trig polynomials in the unit angles u, v tensored with polynomials in u.

    Generators sx = sin u, cx = cos u, sy = sin v, cy = cos v plus the bare
    coordinate u needed by the prequantization connection term.
    """
    ring = CommRing("torus(u,v)", ["u", "sx", "cx", "sy", "cy"])
    sx, cx, sy, cy = (ring.gen(g) for g in ("sx", "cx", "sy", "cy"))
    ring.add_square_rule("sx", ring.one() - cx * cx)
    ring.add_square_rule("sy", ring.one() - cy * cy)
    return DiffRing(
        "torus(u,v)",
        ring,
        [
            ("d_u", {"u": ring.one(), "sx": cx, "cx": -sx}),
            ("d_v", {"sy": cy, "cy": -sy}),
        ],
    )
