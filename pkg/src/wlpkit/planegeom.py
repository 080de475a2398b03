"""Finite plane geometry for cubic systems.

Points of P^2 over GF(q), base loci of pencils of cubics (with multiplicities
over splitting extensions), Hesse configurations, fibers of the morphism
Phi = [f1:f2:f3:f4]: P^2 -> P^3, Hilbert-Burch analysis of length-7 schemes
and the linkage of such schemes through a (3,5) complete intersection.
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from . import unipoly as U
from .errors import (
    BasePointFound,
    Inconclusive,
    LineNotSplit,
    NoLinearSyzygies,
    NotInNormalFormOrbit,
    NotSplit,
    NotZeroDimensional,
    PreconditionFailed,
    StructureMismatch,
    WrongHVector,
)
from .exactfield import ExtField, FieldSpec, GF, PrimeField
from .exactla import ExactMatrix, left_kernel_matrix, rank, solve
from .gorenstein import SkewPolyMatrix, certify_gorenstein
from .gradedquot import (
    GradedIdeal,
    has_common_factor,
    is_artinian,
    socle_basis,
    stabilized_hilbert,
    syzygies_in_degree,
)
from .multipoly import Polynomial, dim_forms, monomials_of_degree

log = logging.getLogger(__name__)

DEFAULT_SPLIT_BOUND = 4
DEFAULT_LINE_BUDGET = 20


# --- points -----------------------------------------------------------------


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^2 with canonical coordinates (last nonzero coordinate equal to 1)."""

    field: FieldSpec
    coords: tuple

    def __post_init__(self):
        F = self.field
        coords = tuple(F.coerce(c) for c in self.coords)
        last = next((c for c in reversed(coords) if not F.is_zero(c)), None)
        if last is None:
            raise ValueError("(0:0:0) is not a point")
        inv = F.inv(last)
        object.__setattr__(self, "coords", tuple(F.mul(c, inv) for c in coords))

    def __str__(self):
        return "(" + ":".join(self.field.format_element(c) for c in self.coords) + ")"

    def __repr__(self):
        return f"ProjPoint{self}"


def enumerate_p2(F: FieldSpec):
    """All q^2 + q + 1 points: (a:b:1), then (a:1:0), then (1:0:0)."""
    if not F.is_finite:
        raise ValueError("enumeration needs a finite field")
    elems = list(F.elements())
    pts = [ProjPoint(F, (a, b, F.one)) for a in elems for b in elems]
    pts += [ProjPoint(F, (a, F.one, F.zero)) for a in elems]
    pts.append(ProjPoint(F, (F.one, F.zero, F.zero)))
    return pts


def line_through(P: ProjPoint, Q: ProjPoint):
    """Coefficients (a, b, c) of the line aX + bY + cZ through P and Q (cross product)."""
    F = P.field
    (x1, y1, z1), (x2, y2, z2) = P.coords, Q.coords
    m = F.mul
    return (F.sub(m(y1, z2), m(z1, y2)), F.sub(m(z1, x2), m(x1, z2)), F.sub(m(x1, y2), m(y1, x2)))


def on_line(line, P: ProjPoint) -> bool:
    F = P.field
    acc = F.zero
    for a, c in zip(line, P.coords):
        acc = F.add(acc, F.mul(a, c))
    return F.is_zero(acc)


def _embed_poly(f: Polynomial, E):
    if E == f.field:
        return f
    return f.change_field(E, E.embed)


# --- base loci --------------------------------------------------------------


@dataclass
class BaseLocusReport:
    points: list  # (ProjPoint, multiplicity)
    total_length: int
    reduced: bool
    splitting_degree: int
    field: FieldSpec = None

    def to_dict(self):
        return {
            "points": [{"point": str(P), "multiplicity": m} for P, m in self.points],
            "total_length": self.total_length,
            "reduced": self.reduced,
            "splitting_degree": self.splitting_degree,
            "field": str(self.field),
        }


def _y_coefficients(g: Polynomial, E, x0, zval):
    """g(x0, y, zval) as a univariate list in y over E."""
    out = {}
    for (a, b, c), coef in g.terms.items():
        if c and E.is_zero(zval):
            continue
        v = E.mul(coef, E.power(x0, a))
        if c:
            v = E.mul(v, E.power(zval, c))
        out[b] = E.add(out.get(b, E.zero), v)
    n = max(out) + 1 if out else 0
    return U.trim([out.get(i, E.zero) for i in range(n)], E)


def _x_poly_coefficients(g: Polynomial):
    """Affine chart z=1: g as a list over y of univariate polynomials in x."""
    F = g.field
    by_y = {}
    for (a, b, _c), coef in g.terms.items():
        lst = by_y.setdefault(b, {})
        lst[a] = F.add(lst.get(a, F.zero), coef)
    n = max(by_y) + 1 if by_y else 0
    out = []
    for b in range(n):
        d = by_y.get(b, {})
        m = max(d) + 1 if d else 0
        out.append(U.trim([d.get(i, F.zero) for i in range(m)], F))
    return out


def local_length(gens, P: ProjPoint, max_order: int = 20) -> int:
    """Length of the local ring of V(gens) at P (Hilbert-Samuel truncation until it repeats).

    dim k[u,v]/(I + m^n) is nondecreasing in n; two equal consecutive values
    mean m^n lies in I locally (Nakayama), so the value is the length.
    """
    E = P.field
    u, v = Polynomial.variables(E, 2)
    one = Polynomial.constant(E, 2, 1)
    a, b, c = P.coords
    if not E.is_zero(c):
        images = [u + Polynomial.constant(E, 2, a), v + Polynomial.constant(E, 2, b), one]
    elif not E.is_zero(b):
        images = [u + Polynomial.constant(E, 2, a), one, v]
    else:
        images = [one, u, v]
    local = [_embed_poly(g, E).substitute(images) for g in gens]
    prev = None
    for n in range(1, max_order + 1):
        mons = [m for d in range(n) for m in monomials_of_degree(2, d)]
        index = {m: i for i, m in enumerate(mons)}
        rows = []
        for g in local:
            for m in mons:
                row = [E.zero] * len(mons)
                for t, coef in g.terms.items():
                    s = (t[0] + m[0], t[1] + m[1])
                    j = index.get(s)
                    if j is not None:
                        row[j] = E.add(row[j], coef)
                rows.append(row)
        val = len(mons) - rank(ExactMatrix.from_rows(E, rows, len(mons)))
        if val == prev:
            return val
        prev = val
    raise Inconclusive(f"local length at {P} not stable by order {max_order}")


def _points_over(g1, g2, E, R):
    pts = []
    seen = set()
    for x0 in U.roots([_lift(E, c) for c in R], E):
        common = U.gcd(_y_coefficients(g1, E, x0, E.one), _y_coefficients(g2, E, x0, E.one), E)
        for y0 in U.roots(common, E) if common and U.deg(common) > 0 else []:
            P = ProjPoint(E, (x0, y0, E.one))
            if P not in seen:
                seen.add(P)
                pts.append(P)
    for P in _line_at_infinity(g1, g2, E):
        if P not in seen:
            seen.add(P)
            pts.append(P)
    return pts


def _line_at_infinity(g1, g2, E):
    """Common zeros with z = 0: (a:1:0) from a univariate gcd, plus (1:0:0)."""
    def restricted(g):
        out = {}
        for (a, b, c), coef in g.terms.items():
            if c == 0:
                out[a] = E.add(out.get(a, E.zero), _lift(E, coef))
        n = max(out) + 1 if out else 0
        return U.trim([out.get(i, E.zero) for i in range(n)], E)

    f1, f2 = restricted(g1), restricted(g2)
    pts = []
    common = U.gcd(f1, f2, E) if (f1 or f2) else None
    if common is None:
        raise NotZeroDimensional("both cubics vanish on the line z = 0")
    if U.deg(common) > 0:
        pts += [ProjPoint(E, (a, E.one, E.zero)) for a in U.roots(common, E)]
    x_only = [E.zero, E.zero, E.zero]
    if all(E.is_zero(_lift(E, g.terms.get((g.homogeneous_degree(), 0, 0), E.zero))) for g in (g1, g2)):
        x_only[0] = E.one
        pts.append(ProjPoint(E, tuple(x_only)))
    return pts


def _lift(E, c):
    if isinstance(E, ExtField) and not isinstance(c, tuple):
        return E.embed(c)
    return c


def base_locus(g1: Polynomial, g2: Polynomial, split_bound: int = DEFAULT_SPLIT_BOUND) -> BaseLocusReport:
    """Common zeros of two forms with multiplicities, over the smallest splitting GF(q^k), k <= split_bound."""
    F = g1.field
    if not F.is_finite:
        raise ValueError("base loci are computed over finite fields")
    d1, d2 = g1.homogeneous_degree(), g2.homogeneous_degree()
    if d1 is None or d2 is None:
        raise ValueError("base loci need homogeneous forms")
    if has_common_factor([g1, g2]):
        raise NotZeroDimensional(f"{g1} and {g2} share a factor")
    R = U.resultant(_x_poly_coefficients(g1), _x_poly_coefficients(g2), F)
    if not R:
        raise NotZeroDimensional("resultant vanishes identically")
    expected = d1 * d2
    ks = range(1, split_bound + 1) if isinstance(F, PrimeField) else [1]
    for k in ks:
        E = F if k == 1 else GF(F.p, k)
        G1, G2 = _embed_poly(g1, E), _embed_poly(g2, E)
        pts = _points_over(G1, G2, E, R)
        mults = [(P, local_length([G1, G2], P)) for P in pts]
        total = sum(m for _, m in mults)
        if total == expected:
            return BaseLocusReport(mults, total, all(m == 1 for _, m in mults) and len(mults) == expected, k, E)
    raise NotSplit(f"base locus of {g1}, {g2} not split over GF({F.characteristic}^k) for k <= {split_bound}")


# --- Hesse configurations ---------------------------------------------------


@dataclass
class HesseResult:
    is_hesse: bool
    lines: list = dc_field(default_factory=list)  # frozensets of point indices
    points: list = dc_field(default_factory=list)

    def __bool__(self):
        return self.is_hesse

    def incidence(self):
        """(points per line, lines per point) counters."""
        per_line = Counter(len(L) for L in self.lines)
        per_point = Counter(sum(1 for L in self.lines if i in L) for i in range(len(self.points)))
        return per_line, per_point


def is_hesse_configuration(report_or_points) -> HesseResult:
    """Every line through two of the nine points contains exactly one more of them."""
    if isinstance(report_or_points, BaseLocusReport):
        rep = report_or_points
        if rep.splitting_degree != 1:
            raise NotSplit("Hesse test needs all points rational over the working field")
        if not rep.reduced:
            return HesseResult(False, [], [P for P, _ in rep.points])
        pts = [P for P, _ in rep.points]
    else:
        pts = list(report_or_points)
    if len(pts) != 9 or len(set(pts)) != 9:
        return HesseResult(False, [], pts)
    lines = set()
    for i, j in combinations(range(9), 2):
        L = line_through(pts[i], pts[j])
        on = frozenset(k for k in range(9) if on_line(L, pts[k]))
        if len(on) != 3:
            return HesseResult(False, [], pts)
        lines.add(on)
    lines = sorted(lines, key=sorted)
    return HesseResult(len(lines) == 12, lines, pts)


def hesse_pencil_normal_form(g1: Polynomial, g2: Polynomial):
    """(a, b, c), all nonzero, with span(g1, g2) = span(a x^3 + b y^3 + c z^3, xyz)."""
    F = g1.field
    if F.characteristic == 3:
        raise PreconditionFailed("the normal form is only available in characteristic != 3")
    x, y, z = Polynomial.variables(F)
    xyz = x * y * z
    M = ExactMatrix.from_rows(F, [g1.coefficient_vector(3), g2.coefficient_vector(3)])
    if rank(M) != 2:
        raise NotInNormalFormOrbit("the two cubics are dependent")
    if rank(M.vstack(ExactMatrix.from_rows(F, [xyz.coefficient_vector(3)]))) != 2:
        raise NotInNormalFormOrbit("xyz is not in the pencil")
    g = next(h for h in (g1, g2) if rank(ExactMatrix.from_rows(F, [h.coefficient_vector(3), xyz.coefficient_vector(3)])) == 2)
    g = g - xyz.scale(g.coeff((1, 1, 1)).value)
    allowed = {(3, 0, 0), (0, 3, 0), (0, 0, 3)}
    if any(m not in allowed for m in g.terms):
        raise NotInNormalFormOrbit(f"{g} is not of the form a x^3 + b y^3 + c z^3")
    abc = tuple(g.terms.get(m, F.zero) for m in ((3, 0, 0), (0, 3, 0), (0, 0, 3)))
    if any(F.is_zero(c) for c in abc):
        raise NotInNormalFormOrbit(f"coefficients {abc} must all be nonzero")
    return abc


# --- cubic systems and the morphism Phi --------------------------------------


class CubicSystem:
    """Four linearly independent cubics f1..f4 defining Phi: P^2 -> P^3."""

    def __init__(self, basis, field=None):
        basis = list(basis)
        if len(basis) != 4:
            raise ValueError("a cubic system has four cubics")
        self.field = field or basis[0].field
        for f in basis:
            if f.homogeneous_degree() != 3:
                raise ValueError(f"{f} is not a cubic")
        M = ExactMatrix.from_rows(self.field, [f.coefficient_vector(3) for f in basis])
        if rank(M) != 4:
            raise ValueError("the four cubics are linearly dependent")
        self.basis = basis

    @classmethod
    def random(cls, field, rng):
        while True:
            fs = [Polynomial(field, 3, {m: field.random_element(rng) for m in monomials_of_degree(3, 3)}) for _ in range(4)]
            try:
                return cls(fs)
            except ValueError:
                continue

    def ideal(self):
        return GradedIdeal(self.basis)

    def image(self, P: ProjPoint):
        E = P.field
        vals = tuple(_embed_poly(f, E).evaluate(P.coords) for f in self.basis)
        if all(E.is_zero(v) for v in vals):
            raise BasePointFound(f"all four cubics vanish at {P}", P)
        return _normalize(E, vals)


def _normalize(E, vals):
    last = next(c for c in reversed(vals) if not E.is_zero(c))
    inv = E.inv(last)
    return tuple(E.mul(c, inv) for c in vals)


def _images_numpy(W: CubicSystem, pts):
    """Normalized images of all points (prime fields) as an int64 array."""
    F = W.field
    p = F.p
    P = np.array([pt.coords for pt in pts], dtype=np.int64)
    vals = np.zeros((len(pts), 4), dtype=np.int64)
    for k, f in enumerate(W.basis):
        acc = np.zeros(len(pts), dtype=np.int64)
        for (a, b, c), coef in f.terms.items():
            term = np.full(len(pts), coef, dtype=np.int64)
            for col, e in ((0, a), (1, b), (2, c)):
                for _ in range(e):
                    term = (term * P[:, col]) % p
            acc = (acc + term) % p
        vals[:, k] = acc
    zero_rows = np.flatnonzero(~vals.any(axis=1))
    if zero_rows.size:
        P0 = pts[int(zero_rows[0])]
        raise BasePointFound(f"all four cubics vanish at {P0}", P0)
    inv = np.array([0] + [pow(i, p - 2, p) for i in range(1, p)], dtype=np.int64)
    last = np.zeros(len(pts), dtype=np.int64)
    for k in range(4):
        nz = vals[:, k] != 0
        last[nz] = vals[nz, k]
    return (vals * inv[last][:, None]) % p


@dataclass
class FiberReport:
    generic_fiber_size: int
    image_degree: int
    base_point_free: bool
    fiber_table: dict
    sampled: list

    def to_dict(self):
        return {
            "generic_fiber_size": self.generic_fiber_size,
            "image_degree": self.image_degree,
            "base_point_free": self.base_point_free,
            "fiber_table": {str(k): v for k, v in sorted(self.fiber_table.items())},
            "sampled_fiber_sizes": self.sampled,
        }


def morphism_fibers(W: CubicSystem, samples: int = 50, seed=0, probe_bound: int = 12) -> FiberReport:
    """Generic fiber size of Phi from exhaustive fibers over the rational points."""
    F = W.field
    if not F.is_finite:
        raise ValueError("fibers are counted over a finite field")
    pts = enumerate_p2(F)
    if isinstance(F, PrimeField):
        imgs = _images_numpy(W, pts)
        keys = [tuple(r) for r in imgs.tolist()]
    else:
        keys = [W.image(P) for P in pts]
    try:
        is_artinian(W.ideal(), probe_bound)
    except Inconclusive as exc:
        raise BasePointFound("the cubics have a common zero over an extension", None) from exc
    groups = Counter(keys)
    rng = random.Random(seed)
    chosen = [rng.randrange(len(pts)) for _ in range(samples)]
    sizes = [groups[keys[i]] for i in chosen]
    generic = Counter(sizes).most_common(1)[0][0]
    table = Counter(groups.values())
    return FiberReport(generic, 9 // generic if 9 % generic == 0 else None, True, dict(table), sizes)


@dataclass
class FiberDecomposition:
    sigmas: list
    collinearity_check: bool
    conditions: list
    line: tuple
    attempts: int
    field: FieldSpec = None


def fiber_decomposition(W: CubicSystem, line_seed=0, budget: int = DEFAULT_LINE_BUDGET,
                        split_bound: int = DEFAULT_SPLIT_BOUND) -> FiberDecomposition:
    """Split Phi^{-1}(line) into three fibers and test the three-part line property.

    The line joins Phi(P1) and Phi(P2) for random rational points; its preimage
    is the base locus of the pencil of cubics in W vanishing on the line.
    """
    F = W.field
    rng = random.Random(line_seed)
    pts = enumerate_p2(F)
    for attempt in range(1, budget + 1):
        P1, P2 = rng.sample(pts, 2)
        A, B = W.image(P1), W.image(P2)
        if A == B:
            log.info("fiber_decomposition attempt %d: equal images, retrying", attempt)
            continue
        K = left_kernel_matrix(ExactMatrix.from_rows(F, [list(A), list(B)]).transpose())
        pencil = []
        for r in range(K.rows):
            g = Polynomial.zero(F, 3)
            for c, f in zip(K.row(r), W.basis):
                g = g + f.scale(c)
            pencil.append(g)
        try:
            rep = base_locus(pencil[0], pencil[1], split_bound)
        except (NotSplit, NotZeroDimensional) as exc:
            log.info("fiber_decomposition attempt %d: %s, retrying", attempt, exc)
            continue
        if not rep.reduced:
            log.info("fiber_decomposition attempt %d: tangent line (non-reduced preimage), retrying", attempt)
            continue
        E = rep.field
        groups = {}
        for P, _ in rep.points:
            groups.setdefault(W.image(P), []).append(P)
        sigmas = list(groups.values())
        if len(sigmas) != 3 or any(len(s) != 3 for s in sigmas):
            log.info("fiber_decomposition attempt %d: fiber sizes %s, retrying", attempt, [len(s) for s in sigmas])
            continue
        ok = _three_part_property(sigmas)
        conditions = []
        for s in sigmas:
            M = ExactMatrix.from_rows(E, [[_embed_poly(f, E).evaluate(P.coords) for P in s] for f in W.basis])
            conditions.append(rank(M))
        return FiberDecomposition(sigmas, ok, conditions, (A, B), attempt, E)
    raise LineNotSplit(f"no suitable line in {budget} attempts")


def _three_part_property(sigmas):
    for i, j in combinations(range(3), 2):
        k = 3 - i - j
        for P in sigmas[i]:
            for Q in sigmas[j]:
                L = line_through(P, Q)
                if not any(on_line(L, R) for R in sigmas[k]):
                    return False
    return True


# --- length-7 schemes -------------------------------------------------------


class PointsIdeal(GradedIdeal):
    """Ideal of a reduced set of rational points: degreewise kernels of evaluation."""

    def __init__(self, points):
        points = list(points)
        F = points[0].field
        super().__init__((), F, 3)
        self.points = points

    @property
    def generators(self):
        return self.minimal_generators(len(self.points))

    def _compute_basis(self, d):
        F = self.field
        mons = monomials_of_degree(3, d)
        rows = []
        for m in mons:
            row = []
            for P in self.points:
                v = F.one
                for c, e in zip(P.coords, m):
                    if e:
                        v = F.mul(v, F.power(c, e))
                row.append(v)
            rows.append(row)
        return left_kernel_matrix(ExactMatrix.from_rows(F, rows, len(self.points)))


def points_on_conic(points) -> bool:
    """Six points lie on a conic iff the 6x6 Veronese evaluation matrix is singular."""
    F = points[0].field
    rows = []
    for P in points:
        row = []
        for m in monomials_of_degree(3, 2):
            v = F.one
            for c, e in zip(P.coords, m):
                if e:
                    v = F.mul(v, F.power(c, e))
            row.append(v)
        rows.append(row)
    return rank(ExactMatrix.from_rows(F, rows)) < len(rows)


def six_on_a_conic(points) -> bool:
    return any(points_on_conic(list(S)) for S in combinations(points, 6))


@dataclass
class HBReport:
    linear_part_rank: int
    tfae_verdict: str
    gorenstein_completion: GradedIdeal = None
    linear_column: tuple = ()
    cubic: Polynomial = None
    quartic: Polynomial = None
    completion_hvector: tuple = ()
    attempts: int = 0

    def to_dict(self):
        return {
            "linear_part_rank": self.linear_part_rank,
            "tfae_verdict": self.tfae_verdict,
            "linear_column": [str(l) for l in self.linear_column],
            "completion": None if self.gorenstein_completion is None else {
                "f": str(self.cubic), "g": str(self.quartic), "hvector": list(self.completion_hvector)},
        }


def _scheme_cubics(I_X):
    try:
        val, _ = stabilized_hilbert(I_X)
    except Exception as exc:
        raise WrongHVector(f"Hilbert function does not stabilize: {exc}") from exc
    H = [I_X.hilbert(d) for d in range(6)]
    if val != 7 or H[:4] != [1, 3, 6, 7]:
        raise WrongHVector(f"expected a length-7 scheme with h-vector (1,2,3,1), got Hilbert function {H}")
    gens = I_X.minimal_generators(4)
    if len(gens) != 3 or any(g.homogeneous_degree() != 3 for g in gens):
        raise WrongHVector(f"expected three cubic generators, got degrees {[g.homogeneous_degree() for g in gens]}")
    return gens


def hb_analysis(I_X: GradedIdeal, seed=0, attempts: int = 20) -> HBReport:
    """Linear part of the Hilbert-Burch matrix and the Gorenstein completion J + (g)."""
    F = I_X.field
    gens = _scheme_cubics(I_X)
    syz = syzygies_in_degree(gens, 4)
    if not syz:
        raise NoLinearSyzygies("the three cubics have no linear syzygy")
    column = syz[0]
    M = ExactMatrix.from_rows(F, [l.coefficient_vector(1) for l in column])
    r = rank(M)
    rng = random.Random(seed)
    HX = [I_X.hilbert(d) for d in range(9)]
    expected = tuple(HX[d] - (HX[d - 3] if d >= 3 else 0) for d in range(9))
    completion = None
    f = g = None
    h = ()
    for k in range(1, attempts + 1):
        f = Polynomial(F, 3, {m: F.random_element(rng) for m in monomials_of_degree(3, 3)})
        J = I_X.plus(f)
        if tuple(J.hilbert(d) for d in range(9)) != expected:
            continue  # f is a zerodivisor on S/I_X
        soc = socle_basis(J, 4)
        if len(soc) == 1:
            g = soc[0]
            cand = J.plus(g)
            cert = certify_gorenstein(cand)
            h = cert.hvector.values
            if cert.certified and h == (1, 3, 6, 6, 3, 1):
                completion = cand
        break
    else:
        raise PreconditionFailed(f"no non-zerodivisor cubic found in {attempts} attempts")
    return HBReport(r, "independent" if r == 3 else "dependent", completion, column, f, g, h, k)


# --- linkage ----------------------------------------------------------------


@dataclass
class LinkageReport:
    reduced_matrix: SkewPolyMatrix
    deg_x: int
    deg_y: int
    ci_type: tuple
    total: int
    product_in_ci: bool
    I_X: GradedIdeal = None
    I_Y: GradedIdeal = None

    def to_dict(self):
        return {
            "deg_X": self.deg_x,
            "deg_Y": self.deg_y,
            "ci_type": list(self.ci_type),
            "total": self.total,
            "product_in_ci": self.product_in_ci,
            "reduced_matrix": self.reduced_matrix.to_text(),
        }


def _congruence(M: SkewPolyMatrix, P):
    """P M P^T for a matrix P of polynomials."""
    n = M.size
    F, nv = M.field, M.nvars
    zero = Polynomial.zero(F, nv)
    A = M.entries
    PA = [[sum((P[i][k] * A[k][j] for k in range(n) if not P[i][k].is_zero()), zero) for j in range(n)]
          for i in range(n)]
    out = [[sum((PA[i][k] * P[j][k] for k in range(n) if not P[j][k].is_zero()), zero) for j in range(n)]
           for i in range(n)]
    return SkewPolyMatrix(out)


def _identity_poly(F, nv, n):
    return [[Polynomial.constant(F, nv, 1) if i == j else Polynomial.zero(F, nv) for j in range(n)] for i in range(n)]


def reduce_be_matrix(M: SkewPolyMatrix) -> SkewPolyMatrix:
    """Skew congruence bringing a (BE)-pattern matrix to entries (1,2) = (4,5) = 0."""
    if M.size != 5:
        raise StructureMismatch("linkage needs a 5x5 matrix")
    F, nv = M.field, M.nvars
    ell = [M.entries[i][4] for i in range(4)]
    if any(not l.is_zero() and l.homogeneous_degree() != 1 for l in ell):
        raise StructureMismatch("last column must hold linear forms")
    # a dependency c1 l1 + ... + c4 l4 = 0 moves into the fourth slot
    L = ExactMatrix.from_rows(F, [l.coefficient_vector(1) for l in ell])
    K = left_kernel_matrix(L)
    if K.rows == 0:
        raise StructureMismatch("the four linear forms are independent")
    c = K.row(K.rows - 1)
    piv = max(i for i in range(4) if not F.is_zero(c[i]))
    P = _identity_poly(F, nv, 5)
    order = [i for i in range(4) if i != piv] + [piv]
    for new, old in enumerate(order):
        for j in range(5):
            P[new][j] = Polynomial.zero(F, nv)
        if new < 3:
            P[new][old] = Polynomial.constant(F, nv, 1)
    for j in range(4):
        P[3][j] = Polynomial.constant(F, nv, c[j])
    M1 = _congruence(M, P)
    if not M1.entries[3][4].is_zero():
        raise StructureMismatch("could not eliminate the fourth linear form")
    E = M1.entries
    q1, q4, q5, l1, l2 = E[0][1], E[0][3], E[1][3], E[0][4], E[1][4]
    # q1' = q1 - c4 q5 + d4 q4 + b l1 - a l2 with constants c4, d4 and linear a, b
    cols = [(-q5), q4]
    x, y, z = Polynomial.variables(F, nv)
    for v in (x, y, z):
        cols.append(l1 * v)
    for v in (x, y, z):
        cols.append(-(l2 * v))
    A = ExactMatrix.from_rows(F, [col.coefficient_vector(2) for col in cols]).transpose()
    rhs = [F.neg(v) for v in q1.coefficient_vector(2)]
    sol = solve(A, rhs)
    if sol is None:
        raise StructureMismatch("entry (1,2) cannot be cleared")
    c4, d4 = sol[0], sol[1]
    b = sum((v.scale(s) for v, s in zip((x, y, z), sol[2:5])), Polynomial.zero(F, nv))
    a = sum((v.scale(s) for v, s in zip((x, y, z), sol[5:8])), Polynomial.zero(F, nv))
    P = _identity_poly(F, nv, 5)
    P[0][3] = Polynomial.constant(F, nv, c4)
    P[1][3] = Polynomial.constant(F, nv, d4)
    P[0][4] = a
    P[1][4] = b
    M2 = _congruence(M1, P)
    if not (M2.entries[0][1].is_zero() and M2.entries[3][4].is_zero()):
        raise StructureMismatch("reduction did not reach the target block form")
    return M2


def _minors_2x2(rows):
    out = []
    for i, j in combinations(range(len(rows)), 2):
        out.append(rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0])
    return out


def linkage_check(M: SkewPolyMatrix, max_degree: int = 12) -> LinkageReport:
    """Link X (minors of [[q4,l1],[q5,l2],[q6,l3]]) to Y (minors of [[q2,q4,l1],[q3,q5,l2]])."""
    R = reduce_be_matrix(M)
    E = R.entries
    q2, q4, l1 = E[0][2], E[0][3], E[0][4]
    q3, q5, l2 = E[1][2], E[1][3], E[1][4]
    q6, l3 = E[2][3], E[2][4]
    x_gens = [f for f in _minors_2x2([(q4, l1), (q5, l2), (q6, l3)]) if not f.is_zero()]
    top = [q2, q4, l1]
    bot = [q3, q5, l2]
    y_gens = []
    for i, j in combinations(range(3), 2):
        f = top[i] * bot[j] - top[j] * bot[i]
        if not f.is_zero():
            y_gens.append(f)
    cubic = q4 * l2 - q5 * l1
    det3 = q2 * (q5 * l3 - l2 * q6) - q4 * (q3 * l3) + l1 * (q3 * q6)
    if cubic.is_zero() or det3.is_zero() or not x_gens or not y_gens:
        raise StructureMismatch("degenerate block form")
    IX, IY = GradedIdeal(x_gens), GradedIdeal(y_gens)
    CI = GradedIdeal([cubic, det3])
    try:
        dx, _ = stabilized_hilbert(IX, max_degree)
        dy, _ = stabilized_hilbert(IY, max_degree)
        stabilized_hilbert(CI, max_degree)
    except Exception as exc:
        raise StructureMismatch(f"minors do not cut out zero-dimensional schemes: {exc}") from exc
    if has_common_factor([cubic, det3], max_degree):
        raise StructureMismatch("complete intersection forms share a factor")
    prod_ok = all(CI.contains(f * g) for f in x_gens for g in y_gens)
    ci = (cubic.homogeneous_degree(), det3.homogeneous_degree())
    return LinkageReport(R, dx, dy, ci, dx + dy, prod_ok, IX, IY)


# --- curvilinear schemes on a cubic -----------------------------------------


def _series_mul(a, b, n, F):
    out = [F.zero] * n
    for i, x in enumerate(a[:n]):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b[: n - i]):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def _series_eval(f: Polynomial, xs, ys, n, F):
    """f(x(t), y(t), 1) truncated mod t^n, given power series for x and y."""
    xp, yp = [[F.one] + [F.zero] * (n - 1)], [[F.one] + [F.zero] * (n - 1)]
    acc = [F.zero] * n
    for (a, b, _c), coef in f.terms.items():
        while len(xp) <= a:
            xp.append(_series_mul(xp[-1], xs, n, F))
        while len(yp) <= b:
            yp.append(_series_mul(yp[-1], ys, n, F))
        term = _series_mul(xp[a], yp[b], n, F)
        acc = [F.add(u, F.mul(coef, v)) for u, v in zip(acc, term)]
    return acc


class CurvilinearIdeal(GradedIdeal):
    """Forms vanishing to order ``length`` along a plane curve branch at an affine point.

    For a cubic C and a smooth point P = (x0:y0:1) with dC/dy(P) != 0 the
    branch is y = y(x0 + t) as a power series; [I]_d is the kernel of
    g -> g(x0 + t, y(t), 1) mod t^length.
    """

    def __init__(self, curve: Polynomial, point: ProjPoint, length: int):
        F = curve.field
        super().__init__((), F, 3)
        x0, y0, z0 = point.coords
        if z0 != F.one:
            raise ValueError("point must lie in the chart z = 1")
        if not F.is_zero(curve.evaluate(point.coords)):
            raise ValueError("point is not on the curve")
        fy = curve.diff(1)
        if F.is_zero(fy.evaluate(point.coords)):
            raise ValueError("branch is not a graph over x at this point")
        n = length
        xs = [x0, F.one] + [F.zero] * (n - 2)
        ys = [y0] + [F.zero] * (n - 1)
        # Newton iteration on f(x(t), y) = 0
        for _ in range(n.bit_length() + 1):
            val = _series_eval(curve, xs, ys, n, F)
            der = _series_eval(fy, xs, ys, n, F)
            inv = _series_inverse(der, n, F)
            corr = _series_mul(val, inv, n, F)
            ys = [F.sub(a, b) for a, b in zip(ys, corr)]
        self.curve, self.point, self.length = curve, point, length
        self._xs, self._ys = xs, ys

    @property
    def generators(self):
        return self.minimal_generators(self.length)

    def _compute_basis(self, d):
        F, n = self.field, self.length
        rows = [_series_eval(Polynomial.monomial(F, 3, m), self._xs, self._ys, n, F) for m in monomials_of_degree(3, d)]
        return left_kernel_matrix(ExactMatrix.from_rows(F, rows, n))


def _series_inverse(a, n, F):
    inv0 = F.inv(a[0])
    out = [inv0] + [F.zero] * (n - 1)
    for k in range(1, n):
        acc = F.zero
        for j in range(1, k + 1):
            acc = F.add(acc, F.mul(a[j] if j < len(a) else F.zero, out[k - j]))
        out[k] = F.neg(F.mul(acc, inv0))
    return out


def curvilinear_scheme(field, rng, length: int = 7, tries: int = 50):
    """length * P on a random cubic through a random point P (a curvilinear scheme)."""
    for _ in range(tries):
        x0, y0 = field.random_element(rng), field.random_element(rng)
        P = ProjPoint(field, (x0, y0, field.one))
        terms = {m: field.random_element(rng) for m in monomials_of_degree(3, 3)}
        C = Polynomial(field, 3, terms)
        # force C(P) = 0 through the z^3 coefficient
        C = C - Polynomial.constant(field, 3, C.evaluate(P.coords)) * Polynomial.monomial(field, 3, (0, 0, 3))
        try:
            return CurvilinearIdeal(C, P, length)
        except ValueError:
            continue
    raise PreconditionFailed("could not build a curvilinear scheme")
