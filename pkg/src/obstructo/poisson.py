"""Symbolic Poisson algebras for the five built-in phase spaces.

Brackets are computed from per-space generator tables extended by the
Leibniz rule; polynomials are kept in a reduced normal form under the
space's Casimir rewrite rules.  Structural analyses (normalizer, symplectic
Laplacian, subalgebra closure, degree-lowering markers) use exact rational
linear algebra.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import _linalg
from ._commpoly import CommPoly, CommRing
from .scalars import GaussianRational, ParamScalar


class UnknownSpace(ValueError):
    """Raised for a phase-space name outside the built-in catalog."""


class SpaceMismatch(ValueError):
    """Raised when polynomials over different spaces are combined."""


class NotASubalgebra(ValueError):
    """Raised when a claimed subalgebra basis is not bracket-closed."""


class ParameterInBasis(ValueError):
    """Raised when exact linear algebra receives parameter-laden basis data."""


class PhaseSpaceSpec:
    """A phase space: generators, bracket table, reduction rules, conventions.

    The bracket table stores one orientation per generator pair; the other
    is obtained by antisymmetry.  Reduction rules rewrite squares of
    designated generators, implementing Casimir relations.
    """

    def __init__(self, name: str, generators: Sequence[str], notes: str):
        self.name = name
        self.generators = tuple(generators)
        self.degrees = {g: 1 for g in self.generators}
        self.ring = CommRing(name, generators)
        self._table: dict[tuple[int, int], CommPoly] = {}
        self.notes = notes

    # -- construction helpers -------------------------------------------

    def set_bracket(self, a: str, b: str, value: "PoissonPoly") -> None:
        i, j = self.ring.index[a], self.ring.index[b]
        if i == j:
            raise ValueError("bracket of a generator with itself is zero")
        if i < j:
            self._table[(i, j)] = value.poly
        else:
            self._table[(j, i)] = (-value).poly

    def add_reduction_rule(self, gen: str, replacement: "PoissonPoly") -> None:
        self.ring.add_square_rule(gen, replacement.poly)

    @property
    def reduction_rules(self) -> dict[str, "PoissonPoly"]:
        return {
            self.generators[g]: PoissonPoly(self, poly)
            for g, poly in self.ring.rules.items()
        }

    def table_bracket(self, i: int, j: int) -> CommPoly:
        if i == j:
            return self.ring.zero()
        if i < j:
            return self._table.get((i, j), self.ring.zero())
        entry = self._table.get((j, i))
        return -entry if entry is not None else self.ring.zero()

    # -- element constructors ---------------------------------------------

    def zero(self) -> "PoissonPoly":
        return PoissonPoly(self, self.ring.zero())

    def one(self) -> "PoissonPoly":
        return PoissonPoly(self, self.ring.one())

    def constant(self, scalar: ParamScalar) -> "PoissonPoly":
        return PoissonPoly(self, self.ring.constant(scalar))

    def gen(self, name: str, power: int = 1) -> "PoissonPoly":
        if name not in self.ring.index:
            raise UnknownSpace(f"{name!r} is not a generator of {self.name}")
        return PoissonPoly(self, self.ring.gen(name, power))

    def monomial(self, exps: Sequence[int], coeff: ParamScalar | None = None) -> "PoissonPoly":
        return PoissonPoly(self, self.ring.monomial(exps, coeff))

    def __repr__(self):
        return f"PhaseSpaceSpec({self.name!r})"


class PoissonPoly:
    """Reduced polynomial in the generators of a phase space."""

    __slots__ = ("space", "poly")

    def __init__(self, space: PhaseSpaceSpec, poly: CommPoly):
        self.space = space
        self.poly = poly

    def _check(self, other: "PoissonPoly") -> None:
        if self.space is not other.space:
            raise SpaceMismatch(
                f"polynomials over {self.space.name} and {other.space.name}"
            )

    def __add__(self, other: "PoissonPoly") -> "PoissonPoly":
        self._check(other)
        return PoissonPoly(self.space, self.poly + other.poly)

    def __sub__(self, other: "PoissonPoly") -> "PoissonPoly":
        self._check(other)
        return PoissonPoly(self.space, self.poly - other.poly)

    def __neg__(self) -> "PoissonPoly":
        return PoissonPoly(self.space, -self.poly)

    def __mul__(self, other: "PoissonPoly") -> "PoissonPoly":
        self._check(other)
        return PoissonPoly(self.space, self.poly * other.poly)

    def scale(self, scalar: ParamScalar) -> "PoissonPoly":
        return PoissonPoly(self.space, self.poly.scale(scalar))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PoissonPoly)
            and self.space is other.space
            and self.poly == other.poly
        )

    def __hash__(self):
        return hash((id(self.space), self.poly))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def degree(self) -> int:
        return self.poly.degree()

    @property
    def terms(self) -> dict:
        return self.poly.terms

    def parameters_used(self) -> set:
        used = set()
        for coeff in self.poly.terms.values():
            used |= coeff.parameters_used()
        return used

    def monomials(self) -> list["PoissonPoly"]:
        return [self.space.monomial(m) for m in self.poly.terms]

    def coefficient(self, exps: Sequence[int]) -> ParamScalar:
        return self.poly.terms.get(tuple(exps), ParamScalar.zero())

    def render(self) -> str:
        return self.poly.render()

    def __repr__(self):
        return f"PoissonPoly<{self.render()} @ {self.space.name}>"


# -- built-in space catalog ----------------------------------------------------


def _rat(n, d=1) -> ParamScalar:
    return ParamScalar.rational(Fraction(n, d))


def make_space(name: str, n: int = 1) -> PhaseSpaceSpec:
    """Build one of the five preset phase spaces.

    ``r2n`` takes the number of degrees of freedom ``n``; the others ignore
    it.  Conventions (bracket signs, reduction orders, coordinate scalings)
    are recorded in the returned spec's ``notes``.
    """
    if name == "r2n":
        if n < 1:
            raise UnknownSpace("r2n requires n >= 1")
        if n == 1:
            gens = ["q", "p"]
        else:
            gens = [f"q{i}" for i in range(1, n + 1)] + [
                f"p{i}" for i in range(1, n + 1)
            ]
        sp = PhaseSpaceSpec(
            "r2n",
            gens,
            notes=(
                "Canonical plane R^2n with {p_i, q^j} = delta_ij (so {q, p} = -1); "
                "this sign makes [Q(p),Q(q)] = -i*hbar*I under the bracket-to-"
                "commutator axiom. Monomial order q before p per index; free "
                "polynomial algebra, no reduction rules."
            ),
        )
        for i in range(1, n + 1):
            qn = "q" if n == 1 else f"q{i}"
            pn = "p" if n == 1 else f"p{i}"
            sp.set_bracket(pn, qn, sp.one())
        sp.n = n
        return sp

    if name == "s2":
        sp = PhaseSpaceSpec(
            "s2",
            ["S1", "S2", "S3"],
            notes=(
                "Sphere of radius s in su(2)*: {S_j, S_k} = -eps_jkl S_l, Casimir "
                "S1^2 + S2^2 + S3^2 = s^2 applied as the rewrite S3^2 -> s^2 - "
                "S1^2 - S2^2 (monomial order S1 < S2 < S3, S3-exponent <= 1)."
            ),
        )
        s1, s2_, s3 = sp.gen("S1"), sp.gen("S2"), sp.gen("S3")
        sp.set_bracket("S1", "S2", -s3)
        sp.set_bracket("S2", "S3", -s1)
        sp.set_bracket("S3", "S1", -s2_)
        ssq = sp.constant(ParamScalar.parameter("s", 2))
        sp.add_reduction_rule("S3", ssq - s1 * s1 - s2_ * s2_)
        return sp

    if name == "tstar_s1":
        sp = PhaseSpaceSpec(
            "tstar_s1",
            ["l", "cos_theta", "sin_theta"],
            notes=(
                "Cylinder T*S^1 with {f,g} = f_l g_theta - f_theta g_l; generators "
                "l (angular momentum), cos_theta, sin_theta with the relation "
                "sin^2 = 1 - cos^2 (sin-exponent <= 1 in normal form)."
            ),
        )
        sp.set_bracket("l", "sin_theta", sp.gen("cos_theta"))
        sp.set_bracket("l", "cos_theta", -sp.gen("sin_theta"))
        ct = sp.gen("cos_theta")
        sp.add_reduction_rule("sin_theta", sp.one() - ct * ct)
        return sp

    if name == "tstar_rplus":
        sp = PhaseSpaceSpec(
            "tstar_rplus",
            ["X", "Y"],
            notes=(
                "Affine half-plane T*R_+ with X = pq, Y = q^2 and {X, Y} = 2Y; "
                "free polynomial algebra, no reduction rules."
            ),
        )
        sp.set_bracket("X", "Y", sp.gen("Y").scale(_rat(2)))
        return sp

    if name == "t2":
        sp = PhaseSpaceSpec(
            "t2",
            ["sx", "cx", "sy", "cy"],
            notes=(
                "Torus trig algebra in unit-angle coordinates u = 2*pi*x, "
                "v = 2*pi*y: sx = sin u, cx = cos u, sy = sin v, cy = cos v with "
                "{f,g} = f_u g_v - f_v g_u. This equals 1/(4*pi^2) times the "
                "unit-square bracket f_x g_y - f_y g_x, so 'hbar' in symbolic "
                "torus checks stands for the rescaled 4*pi^2*hbar. Relations "
                "sx^2 = 1 - cx^2 and sy^2 = 1 - cy^2."
            ),
        )
        sx, cx, sy, cy = (sp.gen(g) for g in ("sx", "cx", "sy", "cy"))
        sp.set_bracket("sx", "sy", cx * cy)
        sp.set_bracket("sx", "cy", -(cx * sy))
        sp.set_bracket("cx", "sy", -(sx * cy))
        sp.set_bracket("cx", "cy", sx * sy)
        sp.add_reduction_rule("sx", sp.one() - cx * cx)
        sp.add_reduction_rule("sy", sp.one() - cy * cy)
        return sp

    raise UnknownSpace(f"unknown phase space {name!r}")


SPACE_NAMES = ("r2n", "s2", "tstar_s1", "tstar_rplus", "t2")


# -- bracket and reduction ------------------------------------------------------


def bracket(f: PoissonPoly, g: PoissonPoly) -> PoissonPoly:
    """Poisson bracket, extended from the generator table by the Leibniz rule."""
    f._check(g)
    space = f.space
    ring = space.ring
    ngen = len(space.generators)
    partials_f = [f.poly.free_partial(space.generators[i]) for i in range(ngen)]
    partials_g = [g.poly.free_partial(space.generators[j]) for j in range(ngen)]
    total = ring.zero()
    for (i, j), tab in space._table.items():
        if not partials_f[i].is_zero() and not partials_g[j].is_zero():
            total = total + partials_f[i] * partials_g[j] * tab
        if not partials_f[j].is_zero() and not partials_g[i].is_zero():
            total = total - partials_f[j] * partials_g[i] * tab
    return PoissonPoly(space, total)


def reduce_poly(f: PoissonPoly) -> PoissonPoly:
    """Normal form under the space's reduction rules (idempotent)."""
    return PoissonPoly(f.space, CommPoly(f.space.ring, f.poly.terms))


def jacobi_residual(f: PoissonPoly, g: PoissonPoly, h: PoissonPoly) -> PoissonPoly:
    """{f,{g,h}} + {g,{h,f}} + {h,{f,g}}, reduced; zero for a valid table."""
    return (
        bracket(f, bracket(g, h))
        + bracket(g, bracket(h, f))
        + bracket(h, bracket(f, g))
    )


# -- monomial bases -------------------------------------------------------------


def reduced_monomials(space: PhaseSpaceSpec, degree_cap: int) -> list[tuple]:
    """All reduced monomial exponent tuples of total degree <= degree_cap."""
    ngen = len(space.generators)
    caps = []
    for g in range(ngen):
        caps.append(1 if g in space.ring.rules else degree_cap)
    out = []
    for exps in itertools.product(*(range(min(c, degree_cap) + 1) for c in caps)):
        if sum(exps) <= degree_cap:
            out.append(exps)
    out.sort(key=lambda m: (sum(m), m))
    return out


def monomial_basis(space: PhaseSpaceSpec, degree_cap: int) -> list[PoissonPoly]:
    return [space.monomial(m) for m in reduced_monomials(space, degree_cap)]


# -- exact linear algebra over specialized coefficients ---------------------------

_PROBES = (
    {"s": Fraction(7, 5)},
    {"s": Fraction(13, 9)},
)


def _specialize(coeff: ParamScalar, probe: Mapping[str, Fraction]) -> GaussianRational:
    used = coeff.parameters_used()
    missing = used - set(probe)
    if missing:
        raise ParameterInBasis(
            f"parameters {sorted(missing)} appear where exact rational linear "
            "algebra is required"
        )
    return coeff.eval_exact(probe)


def _vectorize(
    polys: Sequence[PoissonPoly], probe: Mapping[str, Fraction]
) -> tuple[list[tuple], list[list[GaussianRational]]]:
    monomials = sorted({m for p in polys for m in p.poly.terms})
    index = {m: k for k, m in enumerate(monomials)}
    zero = GaussianRational(0)
    rows = []
    for p in polys:
        row = [zero] * len(monomials)
        for m, c in p.poly.terms.items():
            row[index[m]] = _specialize(c, probe)
        rows.append(row)
    return monomials, rows


def _span_contains(
    spanning: Sequence[PoissonPoly], target: PoissonPoly
) -> bool:
    """Exact span membership, agreeing across parameter specializations."""
    results = []
    for probe in _PROBES:
        monomials, rows = _vectorize(list(spanning) + [target], probe)
        results.append(_linalg.in_span(rows[:-1], rows[-1]))
    if results[0] != results[1]:
        raise ArithmeticError("parameter specialization ambiguity in span test")
    return results[0]


# -- structural analyses -----------------------------------------------------------


def normalizer(
    space: PhaseSpaceSpec,
    subalgebra_basis: Sequence[PoissonPoly],
    degree_cap: int,
) -> list[PoissonPoly]:
    """Basis of {f : deg f <= cap and {f, b} in span(basis) for all basis b}.

    The input basis must be parameter-free and closed under the bracket.
    Computed by exact rational elimination; on spaces whose reduction rules
    carry parameters the computation is run at two exact rational parameter
    specializations and the results are required to agree.
    """
    for b in subalgebra_basis:
        if b.parameters_used():
            raise ParameterInBasis(f"basis element {b.render()} carries parameters")
    for b1, b2 in itertools.combinations(subalgebra_basis, 2):
        if not _span_contains(subalgebra_basis, bracket(b1, b2)):
            raise NotASubalgebra(
                f"bracket of {b1.render()} and {b2.render()} leaves the span"
            )
    if max((b.degree() for b in subalgebra_basis), default=0) > degree_cap:
        raise ValueError("degree_cap below the basis degrees")

    cand = reduced_monomials(space, degree_cap)
    brackets = [
        [bracket(space.monomial(m), b) for b in subalgebra_basis] for m in cand
    ]

    kernels = []
    ncand = len(cand)
    for probe in _PROBES:
        # unknowns: candidate coefficients x_m; constraints: for each basis b,
        # the residual of sum_m x_m {m, b} modulo span(basis) must vanish.
        block_rows: list[list[GaussianRational]] = []
        for bi in range(len(subalgebra_basis)):
            polys = [brackets[mi][bi] for mi in range(ncand)] + list(subalgebra_basis)
            _, rows = _vectorize(polys, probe)
            basis_rows = rows[ncand:]
            red, pivots = _linalg.rref(basis_rows)
            residuals = []
            for mi in range(ncand):
                vec = list(rows[mi])
                for r, pc in enumerate(pivots):
                    factor = vec[pc]
                    if not factor.is_zero():
                        vec = [a - factor * bb for a, bb in zip(vec, red[r])]
                residuals.append(vec)
            for coord in range(len(residuals[0]) if residuals else 0):
                row = [residuals[mi][coord] for mi in range(ncand)]
                if any(not x.is_zero() for x in row):
                    block_rows.append(row)
        kernels.append(_linalg.nullspace(block_rows, ncand))
    if len(kernels[0]) != len(kernels[1]):
        raise ArithmeticError("parameter specialization ambiguity in normalizer")
    out = []
    for vec in kernels[0]:
        poly = space.zero()
        for mi, coeff in enumerate(vec):
            if not coeff.is_zero():
                scal = ParamScalar({(0,) * 8: coeff})
                poly = poly + space.monomial(cand[mi], scal)
        out.append(poly)
    return out


def is_lie_subalgebra(
    space: PhaseSpaceSpec,
    basis_or_predicate,
    degree_cap: int,
) -> tuple[bool, tuple[PoissonPoly, PoissonPoly] | None]:
    """Closure test under the bracket; returns (ok, witness pair on failure).

    Accepts either an explicit basis (span membership by exact elimination)
    or a predicate on reduced monomials, in which case the subspace is the
    span of all reduced monomials up to the cap satisfying the predicate.
    """
    if callable(basis_or_predicate):
        pred = basis_or_predicate
        spanning = [
            space.monomial(m)
            for m in reduced_monomials(space, degree_cap)
            if pred(space.monomial(m))
        ]
        for f, g in itertools.combinations_with_replacement(spanning, 2):
            br = bracket(f, g)
            for m in br.poly.terms:
                if not pred(space.monomial(m)):
                    return False, (f, g)
        return True, None
    basis = list(basis_or_predicate)
    for f, g in itertools.combinations_with_replacement(basis, 2):
        br = bracket(f, g)
        if not _span_contains(basis, br):
            return False, (f, g)
    return True, None


def symplectic_laplacian(
    space: PhaseSpaceSpec,
    basic_basis: Sequence[PoissonPoly],
    f: PoissonPoly,
) -> PoissonPoly:
    """-sum_i {b_i, {b_i, f}} for the given basic-algebra basis."""
    for b in basic_basis:
        if b.parameters_used():
            raise ParameterInBasis("basic basis must be parameter-free")
    total = space.zero()
    for b in basic_basis:
        total = total - bracket(b, bracket(b, f))
    return total


def laplacian_kernel_dimension(
    space: PhaseSpaceSpec,
    basic_basis: Sequence[PoissonPoly],
    degree_cap: int,
) -> int:
    """Kernel dimension of the symplectic Laplacian on polynomials <= cap."""
    cand = reduced_monomials(space, degree_cap)
    images = [symplectic_laplacian(space, basic_basis, space.monomial(m)) for m in cand]
    dims = []
    for probe in _PROBES:
        monomials, rows = _vectorize(images, probe)
        # kernel of the transpose-free map: x -> sum x_i Delta(m_i)
        matrix = [
            [rows[mi][coord] for mi in range(len(cand))]
            for coord in range(len(monomials))
        ]
        dims.append(len(_linalg.nullspace(matrix, len(cand))))
    if dims[0] != dims[1]:
        raise ArithmeticError("parameter specialization ambiguity in kernel")
    return dims[0]


def obstruction_markers(space: PhaseSpaceSpec, degree_cap: int) -> dict:
    """Degree-lowering markers: D1 (constants reachable by brackets, up to the
    cap) and D2 (the polynomial algebra is not free)."""
    if degree_cap < 2:
        raise ValueError("degree_cap must be at least 2")
    mons = reduced_monomials(space, degree_cap)
    brackets = []
    for m1, m2 in itertools.combinations(mons, 2):
        br = bracket(space.monomial(m1), space.monomial(m2))
        if not br.is_zero():
            brackets.append(br)
    d1 = _span_contains(brackets, space.one()) if brackets else False
    return {
        "D1": d1,
        "D2": bool(space.ring.rules),
        "degree_cap": degree_cap,
    }
