"""Degree-truncated ideal engine.

Every question is answered in a fixed degree by exact linear algebra on the
monomial coordinates of S_d (no Gröbner bases).  An ideal knows how to produce
the RREF basis of its degree-d component; quotient bases are the non-pivot
monomials, which gives canonical coset representatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import Inconclusive, NotStabilized
from .exactla import ExactMatrix, left_kernel_matrix, reduce_rows, row_space_intersection, rref
from .exactfield import FieldSpec
from .multipoly import Polynomial, dim_forms, monomial_index, monomials_of_degree, shift_indices

DEFAULT_STABLE_DEGREE = 12


@dataclass(frozen=True)
class Component:
    """RREF basis of [I]_d plus the induced quotient basis of (S/I)_d."""

    d: int
    R: ExactMatrix
    pivots: tuple
    free: tuple

    @property
    def dim(self):
        return len(self.pivots)

    @property
    def codim(self):
        return len(self.free)

    def coords(self, V: ExactMatrix) -> ExactMatrix:
        """Quotient coordinates (on ``free``) of the rows of V, written in S_d coordinates."""
        return reduce_rows(V, self.R, list(self.pivots)).take_columns(self.free)

    def contains(self, f: Polynomial) -> bool:
        if f.is_zero():
            return True
        V = ExactMatrix.from_rows(f.field, [f.coefficient_vector(self.d)])
        return self.coords(V).is_zero()

    def standard_monomials(self, nvars):
        mons = monomials_of_degree(nvars, self.d)
        return [mons[j] for j in self.free]


def _component(field, d, nvars, R, pivots):
    n = dim_forms(nvars, d)
    piv = set(pivots)
    return Component(d, R, tuple(pivots), tuple(j for j in range(n) if j not in piv))


def vectors_matrix(field, nvars, d, polys) -> ExactMatrix:
    rows = [f.coefficient_vector(d) for f in polys]
    if not rows:
        return ExactMatrix.zeros(field, 0, dim_forms(nvars, d))
    return ExactMatrix.from_rows(field, rows, dim_forms(nvars, d))


def mult_matrix(f: Polynomial, d: int) -> ExactMatrix:
    """Matrix of g -> g*f from S_d to S_{d+deg f} (rows are images of monomials)."""
    e = f.homogeneous_degree()
    F, n = f.field, f.nvars
    target = monomial_index(n, d + e)
    src = monomials_of_degree(n, d)
    M = ExactMatrix.zeros(F, len(src), len(target))
    for i, m in enumerate(src):
        for a, c in f.terms.items():
            M.data[i][target[tuple(x + y for x, y in zip(m, a))]] = c
    return M


def shift_matrix(M: ExactMatrix, nvars: int, d: int, var: int) -> ExactMatrix:
    """Rows of M (in S_d coordinates) multiplied by x_var."""
    return M.scatter_columns(shift_indices(nvars, d, var), dim_forms(nvars, d + 1))


class GradedIdeal:
    """Homogeneous ideal ``base + (generators)`` with lazily cached degree components.

    Subclasses override :meth:`_compute_basis`.  Cache fills are
    compute-then-publish, so concurrent readers at worst duplicate work.
    """

    def __init__(self, generators=(), field: FieldSpec = None, nvars: int = None, base: GradedIdeal = None):
        generators = [g for g in generators if not g.is_zero()]
        if generators:
            field = field or generators[0].field
            nvars = nvars or generators[0].nvars
        elif base is not None:
            field, nvars = base.field, base.nvars
        if field is None or nvars is None:
            raise ValueError("an ideal without generators needs field and nvars")
        for g in generators:
            if g.field != field or g.nvars != nvars:
                raise ValueError("generators live in different rings")
            if g.homogeneous_degree() is None:
                raise ValueError(f"generator {g} is not homogeneous")
        self.field = field
        self.nvars = nvars
        self._generators = list(generators)
        self.base = base
        self._cache = {}

    @property
    def generators(self):
        if self.base is None:
            return list(self._generators)
        return self.base.generators + self._generators

    def __repr__(self):
        return f"{type(self).__name__}({self.field}, {[str(g) for g in self.generators]})"

    # --- components -------------------------------------------------------
    def component(self, d: int) -> Component:
        comp = self._cache.get(d)
        if comp is None:
            R = self._compute_basis(d)
            R, _, piv = rref(R)
            comp = self._cache.setdefault(d, _component(self.field, d, self.nvars, R, piv))
        return comp

    def degree_basis(self, d: int) -> ExactMatrix:
        return self.component(d).R

    def _full(self, d):
        return ExactMatrix.identity(self.field, dim_forms(self.nvars, d))

    def _compute_basis(self, d: int) -> ExactMatrix:
        n, F = self.nvars, self.field
        pieces = []
        if d > 0:
            prev = self.component(d - 1)
            if prev.codim == 0:
                return self._full(d)
            if prev.dim:
                for v in range(n):
                    pieces.append(shift_matrix(prev.R, n, d - 1, v))
        if self.base is not None:
            pieces.append(self.base.degree_basis(d))
        gens = [g for g in self._generators if g.homogeneous_degree() == d]
        if gens:
            pieces.append(vectors_matrix(F, n, d, gens))
        if not pieces:
            return ExactMatrix.zeros(F, 0, dim_forms(n, d))
        return pieces[0].vstack(*pieces[1:])

    def dim(self, d: int) -> int:
        return self.component(d).dim

    def hilbert(self, d: int) -> int:
        return dim_forms(self.nvars, d) - self.dim(d)

    def contains(self, f: Polynomial) -> bool:
        d = f.homogeneous_degree()
        if d is None:
            return all(self.contains(f.homogeneous_part(k)) for k in {sum(m) for m in f.terms})
        return self.component(d).contains(f)

    def quotient_basis(self, d: int):
        """Standard monomials of (S/I)_d."""
        return self.component(d).standard_monomials(self.nvars)

    def normal_form(self, f: Polynomial) -> Polynomial:
        """Canonical representative of f mod I (f homogeneous)."""
        d = f.homogeneous_degree()
        if d is None:
            return f
        comp = self.component(d)
        V = reduce_rows(vectors_matrix(self.field, self.nvars, d, [f]), comp.R, list(comp.pivots))
        return Polynomial.from_vector(self.field, self.nvars, d, V.row(0))

    # --- derived ideals ---------------------------------------------------
    def plus(self, *gens) -> GradedIdeal:
        return GradedIdeal(list(gens), self.field, self.nvars, base=self)

    def minimal_generators(self, max_d: int):
        """Generators degree by degree: completions of S_1*[I]_{d-1} inside [I]_d."""
        out = []
        n = self.nvars
        for d in range(max_d + 1):
            comp = self.component(d)
            if comp.dim == 0:
                continue
            if d > 0 and self.component(d - 1).dim:
                prev = self.component(d - 1).R
                P = shift_matrix(prev, n, d - 1, 0).vstack(*[shift_matrix(prev, n, d - 1, v) for v in range(1, n)])
                Rp, _, ppiv = rref(P)
                if Rp.rows == comp.dim:
                    continue
                red = reduce_rows(comp.R, Rp, ppiv)
                new, _, _ = rref(red)
            else:
                new = comp.R
            out.extend(Polynomial.from_vector(self.field, n, d, new.row(i)) for i in range(new.rows))
        return out

    def generator_degree_counts(self, max_d: int):
        counts = {}
        for g in self.minimal_generators(max_d):
            d = g.homogeneous_degree()
            counts[d] = counts.get(d, 0) + 1
        return counts


class ColonIdeal(GradedIdeal):
    """(I : f) computed degreewise."""

    def __init__(self, ideal: GradedIdeal, f: Polynomial):
        super().__init__((), ideal.field, ideal.nvars)
        self.ideal = ideal
        self.f = f

    @property
    def generators(self):
        raise NotImplementedError("use minimal_generators(max_d) on a colon ideal")

    def _compute_basis(self, d):
        return colon_by_form(self.ideal, self.f, d)


class IntersectionIdeal(GradedIdeal):
    def __init__(self, ideals):
        ideals = list(ideals)
        super().__init__((), ideals[0].field, ideals[0].nvars)
        self.ideals = ideals

    @property
    def generators(self):
        raise NotImplementedError("use minimal_generators(max_d) on an intersection")

    def _compute_basis(self, d):
        return intersect_ideals(self.ideals, d)


class IdealColonIdeal(GradedIdeal):
    """(I : J) = intersection of (I : g) over generators g of J."""

    def __init__(self, ideal: GradedIdeal, gens):
        super().__init__((), ideal.field, ideal.nvars)
        self.colons = [ColonIdeal(ideal, g) for g in gens]

    @property
    def generators(self):
        raise NotImplementedError

    def _compute_basis(self, d):
        return intersect_ideals(self.colons, d)


# --- operations -------------------------------------------------------------


def ideal_degree_basis(I: GradedIdeal, d: int) -> ExactMatrix:
    return I.degree_basis(d)


def hilbert_function(I: GradedIdeal, max_d: int):
    return [I.hilbert(d) for d in range(max_d + 1)]


def is_artinian(I: GradedIdeal, probe_bound: int) -> int:
    """First degree d <= probe_bound with (S/I)_d = 0; Inconclusive otherwise."""
    for d in range(probe_bound + 1):
        if I.hilbert(d) == 0:
            return d
    raise Inconclusive(f"H({probe_bound}) = {I.hilbert(probe_bound)} > 0: not artinian up to degree {probe_bound}")


def hvector(I: GradedIdeal, probe_bound: int = 30) -> HVector:
    top = is_artinian(I, probe_bound)
    return HVector(hilbert_function(I, top - 1))


def colon_by_form(I: GradedIdeal, f: Polynomial, d: int) -> ExactMatrix:
    """RREF basis of [I : f]_d."""
    e = f.homogeneous_degree()
    if f.is_zero() or e is None:
        raise ValueError("colon by a nonzero form only")
    comp = I.component(d + e)
    images = comp.coords(mult_matrix(f, d))
    K = left_kernel_matrix(images)
    return rref(K)[0]


def intersect_ideals(Is, d: int) -> ExactMatrix:
    Is = list(Is)
    acc = Is[0].degree_basis(d)
    for J in Is[1:]:
        if acc.rows == 0:
            break
        acc = row_space_intersection(acc, J.degree_basis(d))
    return rref(acc)[0]


def _saturation_at(I, d, N):
    n = I.nvars
    comp = I.component(d + N)
    if comp.codim == 0:
        return ExactMatrix.identity(I.field, dim_forms(n, d))
    blocks = []
    for u in monomials_of_degree(n, N):
        mono = Polynomial.monomial(I.field, n, u)
        blocks.append(comp.coords(mult_matrix(mono, d)))
    K = left_kernel_matrix(blocks[0].hstack(*blocks[1:]))
    return rref(K)[0]


def saturation_degree_basis(I: GradedIdeal, d: int, power_bound: int) -> ExactMatrix:
    """{g in S_d : g*S_N ⊆ [I]_{d+N}} for N = power_bound; NotStabilized if N+1 differs."""
    if power_bound < 1:
        raise ValueError("power_bound must be >= 1")
    a = _saturation_at(I, d, power_bound)
    b = _saturation_at(I, d, power_bound + 1)
    if a.rows != b.rows:
        raise NotStabilized(f"[I^sat]_{d}: dimension {a.rows} at N={power_bound}, {b.rows} at N={power_bound + 1}")
    return b


def saturation_stable(I: GradedIdeal, d: int, start: int = 1, max_bound: int = DEFAULT_STABLE_DEGREE) -> ExactMatrix:
    """Raise the power bound until two consecutive bounds agree."""
    for N in range(start, max_bound + 1):
        try:
            return saturation_degree_basis(I, d, N)
        except NotStabilized:
            continue
    raise NotStabilized(f"saturation in degree {d} not stable up to N={max_bound}")


def socle_basis(I: GradedIdeal, d: int):
    """Coset representatives (combinations of standard monomials) spanning Soc(S/I)_d."""
    n, F = I.nvars, I.field
    comp = I.component(d)
    if comp.codim == 0:
        return []
    nxt = I.component(d + 1)
    units = ExactMatrix.zeros(F, comp.codim, dim_forms(n, d))
    for r, j in enumerate(comp.free):
        units.set(r, j, F.one)
    if nxt.codim == 0:
        K = ExactMatrix.identity(F, comp.codim)
    else:
        blocks = [nxt.coords(shift_matrix(units, n, d, v)) for v in range(n)]
        K = rref(left_kernel_matrix(blocks[0].hstack(*blocks[1:])))[0]
    mons = monomials_of_degree(n, d)
    out = []
    for i in range(K.rows):
        row = K.row(i)
        out.append(Polynomial(F, n, {mons[j]: c for j, c in zip(comp.free, row)}))
    return out


def socle_dims(I: GradedIdeal, top: int):
    return [len(socle_basis(I, d)) for d in range(top + 1)]


def syzygies_in_degree(gens, d: int):
    """Basis of relations (a_1..a_m) with sum a_i g_i = 0 and deg a_i = d - deg g_i."""
    gens = list(gens)
    F, n = gens[0].field, gens[0].nvars
    blocks = []
    rows = []
    for g in gens:
        e = g.homogeneous_degree()
        if e is None:
            raise ValueError("syzygies need homogeneous generators")
        k = d - e
        mons = monomials_of_degree(n, k) if k >= 0 else ()
        blocks.append((k, mons))
        if mons:
            rows.append(mult_matrix(g, k))
    if not rows:
        return []
    M = rows[0].vstack(*rows[1:])
    K = rref(left_kernel_matrix(M))[0]
    out = []
    for i in range(K.rows):
        vec = K.row(i)
        pos = 0
        rel = []
        for k, mons in blocks:
            part = vec[pos:pos + len(mons)]
            pos += len(mons)
            rel.append(Polynomial(F, n, dict(zip(mons, part))))
        out.append(tuple(rel))
    return out


def stabilized_hilbert(I: GradedIdeal, max_degree: int = DEFAULT_STABLE_DEGREE, run: int = 3):
    """(value, first degree) once ``run`` consecutive Hilbert values agree."""
    vals = []
    for d in range(max_degree + 1):
        vals.append(I.hilbert(d))
        if len(vals) >= run and len(set(vals[-run:])) == 1:
            return vals[-1], d - run + 1
    raise NotStabilized(f"Hilbert function not stable up to degree {max_degree}: {vals}")


def has_common_factor(gens, max_degree: int = DEFAULT_STABLE_DEGREE) -> bool:
    """Common factor test via Hilbert growth: a shared factor makes H unbounded."""
    I = GradedIdeal(gens)
    try:
        stabilized_hilbert(I, max_degree)
    except NotStabilized:
        return True
    return False


# --- h-vectors --------------------------------------------------------------


def macaulay_representation(a: int, i: int):
    """The i-binomial expansion a = C(k_i, i) + C(k_{i-1}, i-1) + ... with k_i > k_{i-1} > ..."""
    rep = []
    while a > 0 and i > 0:
        k = i
        while comb(k + 1, i) <= a:
            k += 1
        rep.append((k, i))
        a -= comb(k, i)
        i -= 1
    return rep


def macaulay_bound(a: int, i: int) -> int:
    """a^<i>: the largest possible growth from degree i to i+1."""
    return sum(comb(k + 1, j + 1) for k, j in macaulay_representation(a, i))


def is_o_sequence(seq) -> bool:
    seq = list(seq)
    if not seq or seq[0] != 1 or any(v < 0 for v in seq):
        return False
    for i in range(1, len(seq) - 1):
        if seq[i + 1] > macaulay_bound(seq[i], i):
            return False
    return True


class HVector:
    """Nonzero Hilbert function values h_0..h_e."""

    def __init__(self, values):
        values = list(values)
        while values and values[-1] == 0:
            values.pop()
        if any(v <= 0 for v in values):
            raise ValueError(f"h-vector entries must be positive: {values}")
        self.values = tuple(values)

    @property
    def socle_degree(self):
        return len(self.values) - 1

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __eq__(self, other):
        if isinstance(other, HVector):
            return self.values == other.values
        if isinstance(other, (tuple, list)):
            return self.values == tuple(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"HVector{self.values}"


def hvector_predicates(h) -> dict:
    h = list(h.values if isinstance(h, HVector) else h)
    e = len(h) - 1
    symmetric = h == h[::-1]
    unimodal = True
    decreased = False
    for a, b in zip(h, h[1:]):
        if b < a:
            decreased = True
        elif b > a and decreased:
            unimodal = False
    half = h[: e // 2 + 1]
    diff = [half[0]] + [b - a for a, b in zip(half, half[1:])]
    differentiable = is_o_sequence(diff)
    flawless = all(h[i] <= h[e - i] for i in range(e // 2 + 1))
    return {
        "symmetric": symmetric,
        "unimodal": unimodal,
        "differentiable_first_half": differentiable,
        "flawless": flawless,
    }
