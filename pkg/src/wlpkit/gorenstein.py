"""Gorenstein and level algebras: inverse systems, compressed algebras, pfaffians.

A Gorenstein quotient of socle degree e is ann(F) for a dual form F of degree
e; the degree-d component of ann(F) is the kernel of the catalecticant
S_d -> E_{e-d}, g -> g o F.  Codimension-three Gorenstein ideals are also
produced as the submaximal pfaffians of a skew-symmetric matrix.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import (
    DependentDualForms,
    Inconclusive,
    InhomogeneousPfaffian,
    NotArtinian,
    NotCompressedAfterRetries,
    RequiresInverseSystem,
)
from .exactla import ExactMatrix, kernel_matrix, left_kernel_matrix, rank
from .gradedquot import GradedIdeal, HVector, IntersectionIdeal, hilbert_function, hvector, socle_dims
from .lefschetz import LinearForm, QuotientAlgebra
from .multipoly import DualForm, Polynomial, contract, dim_forms, monomials_of_degree


# --- inverse systems --------------------------------------------------------


def catalecticant(F: DualForm, d: int) -> ExactMatrix:
    """Matrix of g -> g o F from S_d to E_{e-d}; row m holds the coefficients of x^m o F."""
    K, n, e = F.field, F.nvars, F.degree
    rows = monomials_of_degree(n, d)
    cols = monomials_of_degree(n, e - d)
    M = ExactMatrix.zeros(K, len(rows), len(cols))
    for i, m in enumerate(rows):
        for j, b in enumerate(cols):
            c = F.terms.get(tuple(x + y for x, y in zip(m, b)))
            if c is not None:
                M.data[i][j] = c
    return M


class AnnihilatorIdeal(GradedIdeal):
    """ann(F): degreewise kernels of the catalecticants of a single dual form."""

    def __init__(self, F: DualForm):
        if F.is_zero():
            raise ValueError("the zero dual form has no Gorenstein annihilator")
        super().__init__((), F.field, F.nvars)
        self.dual_form = F

    @property
    def generators(self):
        return self.minimal_generators(self.dual_form.degree + 1)

    def _compute_basis(self, d):
        if d > self.dual_form.degree:
            return self._full(d)
        return left_kernel_matrix(catalecticant(self.dual_form, d))


def annihilator(F: DualForm, max_d: int = None) -> AnnihilatorIdeal:
    I = AnnihilatorIdeal(F)
    for d in range((F.degree + 1 if max_d is None else max_d) + 1):
        I.component(d)
    return I


def compressed_hvector(e: int, t: int = 1, nvars: int = 3):
    """h(i) = min(dim S_i, t * dim S_{e-i})."""
    return tuple(min(dim_forms(nvars, i), t * dim_forms(nvars, e - i)) for i in range(e + 1))


def _hvec(I, top):
    return tuple(v for v in hilbert_function(I, top) if v)


def compressed_random(e: int, field, seed=0, max_tries: int = 20, nvars: int = 3):
    """A random dual form of degree e with compressed Gorenstein annihilator."""
    if e < 1:
        raise ValueError("socle degree must be >= 1")
    rng = random.Random(seed)
    target = compressed_hvector(e, 1, nvars)
    last = None
    for _ in range(max_tries):
        F = DualForm.random(field, nvars, e, rng)
        if F.is_zero():
            continue
        I = AnnihilatorIdeal(F)
        last = _hvec(I, e + 1)
        if last == target:
            return F, I
    raise NotCompressedAfterRetries(f"no compressed form of degree {e} over {field} in {max_tries} tries", last)


@dataclass
class CompressionDetails:
    s: int
    perturbers: list
    hvector_before: tuple
    hvector_after: tuple
    rank_checks: list  # (i, rank_old, rank_new) for the sampled form


def compress_toward(F: DualForm, seed=0, max_tries: int = 50, details: bool = False):
    """G = F + sum c_i L_i^[e] with s = dim S_{e//2} - h_{e//2}(ann F) random divided powers.

    Retries until ann(G) is compressed.  With ``details=True`` also returns the
    rank comparison rank(×L on S/ann G) <= rank(×L on S/ann F) + s for a sampled L.
    """
    K, n, e = F.field, F.nvars, F.degree
    rng = random.Random(seed)
    target = compressed_hvector(e, 1, n)
    before = _hvec(AnnihilatorIdeal(F), e + 1)
    s = dim_forms(n, e // 2) - before[e // 2]
    if before == target:
        s = 0
    last = before
    for _ in range(max_tries if s else 1):
        perturbers = []
        G = F
        for _ in range(s):
            L = LinearForm.random(K, n, rng)
            H = DualForm.divided_power(K, L.coefficients, e)
            c = K.random_element(rng)
            perturbers.append((L, c))
            G = G + H.scale(c)
        if G.is_zero():
            continue
        last = _hvec(AnnihilatorIdeal(G), e + 1)
        if last == target:
            if not details:
                return G
            L = LinearForm.random(K, n, rng)
            A, B = QuotientAlgebra(AnnihilatorIdeal(F)), QuotientAlgebra(AnnihilatorIdeal(G))
            checks = [(i, A.map_rank(L, i)[0], B.map_rank(L, i)[0]) for i in range(e)]
            return G, CompressionDetails(s, perturbers, before, last, checks)
    raise NotCompressedAfterRetries(f"perturbation by {s} divided powers never compressed", last)


def inverse_system_form(I: GradedIdeal, probe_bound: int = 30) -> DualForm:
    """Recover F with I = ann(F) from the degree-e component (e = socle degree)."""
    if isinstance(I, AnnihilatorIdeal):
        return I.dual_form
    e = len(hvector(I, probe_bound)) - 1
    K = kernel_matrix(I.degree_basis(e)) if I.dim(e) else ExactMatrix.identity(I.field, dim_forms(I.nvars, e))
    if K.rows != 1:
        raise RequiresInverseSystem(f"degree-{e} inverse system has dimension {K.rows}, not 1")
    F = DualForm.from_vector(I.field, I.nvars, e, K.row(0))
    J = AnnihilatorIdeal(F)
    for d in range(e + 2):
        if J.degree_basis(d) != I.degree_basis(d):
            raise RequiresInverseSystem("ideal is not the annihilator of its top-degree inverse system")
    return F


# --- certification ----------------------------------------------------------


@dataclass(frozen=True)
class GorensteinCertificate:
    hvector: HVector
    socle_degree: int
    symmetric: bool
    socle_dim_one: bool
    codim: int
    socle_dims: tuple

    @property
    def certified(self):
        return self.symmetric and self.socle_dim_one

    def to_dict(self):
        return {
            "hvector": list(self.hvector.values),
            "socle_degree": self.socle_degree,
            "symmetric": self.symmetric,
            "socle_dim_one": self.socle_dim_one,
            "socle_dims": list(self.socle_dims),
            "codim": self.codim,
            "certified": self.certified,
        }


def certify_gorenstein(I: GradedIdeal, probe_bound: int = 30) -> GorensteinCertificate:
    try:
        h = hvector(I, probe_bound)
    except Inconclusive as exc:
        raise NotArtinian(str(exc)) from exc
    e = h.socle_degree
    soc = tuple(socle_dims(I, e))
    return GorensteinCertificate(
        hvector=h,
        socle_degree=e,
        symmetric=h.values == h.values[::-1],
        socle_dim_one=sum(soc) == 1 and soc[e] == 1,
        codim=h[1] if len(h) > 1 else 0,
        socle_dims=soc,
    )


# --- truncation and level algebras -----------------------------------------


class TruncatedIdeal(GradedIdeal):
    """I + (all monomials of degree e_new + 1)."""

    def __init__(self, ideal: GradedIdeal, e_new: int):
        super().__init__((), ideal.field, ideal.nvars)
        self.ideal = ideal
        self.e_new = e_new

    @property
    def generators(self):
        return self.minimal_generators(self.e_new + 1)

    def _compute_basis(self, d):
        if d > self.e_new:
            return self._full(d)
        return self.ideal.degree_basis(d)


def truncate_algebra(I: GradedIdeal, e_new: int) -> TruncatedIdeal:
    if e_new < 0:
        raise ValueError("truncation degree must be >= 0")
    return TruncatedIdeal(I, e_new)


def level_decompose(Fs, max_d: int = None):
    """(∩ ann(F_i), [ann(F_i)]) for linearly independent dual forms of one degree."""
    Fs = list(Fs)
    if not Fs:
        raise ValueError("need at least one dual form")
    e = Fs[0].degree
    if any(F.degree != e for F in Fs):
        raise ValueError("dual forms must share a degree")
    M = ExactMatrix.from_rows(Fs[0].field, [F.coefficient_vector() for F in Fs])
    if rank(M) < len(Fs):
        raise DependentDualForms(f"{len(Fs)} dual forms span only rank {rank(M)}")
    factors = [annihilator(F, max_d) for F in Fs]
    level = factors[0] if len(factors) == 1 else IntersectionIdeal(factors)
    return level, factors


def level_type(I: GradedIdeal, probe_bound: int = 30):
    """(socle degree, socle dims per degree); level of type t iff all socle sits in degree e."""
    h = hvector(I, probe_bound)
    return h.socle_degree, tuple(socle_dims(I, h.socle_degree))


def socle_quotient_sample(I: GradedIdeal, seed=0) -> AnnihilatorIdeal:
    """ann(L' o F) for a random linear form L': a Gorenstein quotient of socle degree e - 1."""
    try:
        F = inverse_system_form(I)
    except (RequiresInverseSystem, Inconclusive) as exc:
        raise RequiresInverseSystem(str(exc)) from exc
    rng = random.Random(seed)
    while True:
        L = LinearForm.random(F.field, F.nvars, rng)
        G = contract(L.to_polynomial(), F)
        if not G.is_zero():
            return AnnihilatorIdeal(G)


# --- pfaffians --------------------------------------------------------------


class SkewPolyMatrix:
    """Skew-symmetric matrix of homogeneous polynomials (0-based storage)."""

    def __init__(self, entries):
        n = len(entries)
        if n == 0:
            raise ValueError("empty matrix")
        field, nvars = None, None
        for row in entries:
            for f in row:
                if isinstance(f, Polynomial):
                    field, nvars = f.field, f.nvars
                    break
            if field is not None:
                break
        if field is None:
            raise ValueError("entries must be polynomials")
        self.field, self.nvars, self.size = field, nvars, n
        zero = Polynomial.zero(field, nvars)
        self.entries = [[entries[i][j] if isinstance(entries[i][j], Polynomial) else zero for j in range(n)]
                        for i in range(n)]
        for i in range(n):
            if not self.entries[i][i].is_zero():
                raise ValueError("diagonal must vanish")
            for j in range(i + 1, n):
                if self.entries[j][i] != -self.entries[i][j]:
                    raise ValueError(f"entries ({i+1},{j+1}) and ({j+1},{i+1}) are not opposite")
                if self.entries[i][j].homogeneous_degree() is None and not self.entries[i][j].is_zero():
                    raise ValueError(f"entry ({i+1},{j+1}) is not homogeneous")

    @classmethod
    def from_upper(cls, size, upper, field, nvars=3):
        """``upper`` maps 1-based (i, j), i < j, to Polynomial; other entries vanish."""
        zero = Polynomial.zero(field, nvars)
        rows = [[zero] * size for _ in range(size)]
        for (i, j), f in upper.items():
            if not 1 <= i < j <= size:
                raise ValueError(f"bad position ({i},{j})")
            rows[i - 1][j - 1] = f
            rows[j - 1][i - 1] = -f
        return cls(rows)

    @classmethod
    def be_pattern(cls, q, ell):
        """5x5 matrix with quadrics q1..q6 in the 4x4 block and linear forms l1..l4 in the last column.

        Block layout: (1,2)=q1, (1,3)=q2, (1,4)=q4, (2,3)=q3, (2,4)=q5, (3,4)=q6, (i,5)=l_i.
        """
        q1, q2, q3, q4, q5, q6 = q
        pos = {(1, 2): q1, (1, 3): q2, (1, 4): q4, (2, 3): q3, (2, 4): q5, (3, 4): q6}
        for i, l in enumerate(ell, start=1):
            pos[(i, 5)] = l
        field = next(f.field for f in list(q) + list(ell) if isinstance(f, Polynomial))
        nvars = next(f.nvars for f in list(q) + list(ell) if isinstance(f, Polynomial))
        return cls.from_upper(5, pos, field, nvars)

    @classmethod
    def random_be(cls, field, rng, nvars=3):
        def rand_form(d):
            return Polynomial(field, nvars, {m: field.random_element(rng) for m in monomials_of_degree(nvars, d)})

        return cls.be_pattern([rand_form(2) for _ in range(6)], [rand_form(1) for _ in range(4)])

    def delete(self, idx):
        keep = [k for k in range(self.size) if k not in set(idx)]
        return [[self.entries[i][j] for j in keep] for i in keep]

    def degree_pattern(self):
        return [[f.homogeneous_degree() for f in row] for row in self.entries]

    def upper_entries(self):
        return {(i + 1, j + 1): self.entries[i][j] for i in range(self.size) for j in range(i + 1, self.size)}

    def to_text(self):
        lines = [f"skew {self.size}"]
        for (i, j), f in self.upper_entries().items():
            lines.append(f"entry {i} {j} {f}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"SkewPolyMatrix({self.size}x{self.size} over {self.field})"


def pfaffian(M) -> Polynomial:
    """Pf by expansion along the first row: Pf = sum_j (-1)^j m_{1j} Pf(M without rows/cols 1, j)."""
    rows = M.entries if isinstance(M, SkewPolyMatrix) else M
    n = len(rows)
    if n % 2:
        raise ValueError("pfaffian of an odd-size matrix")
    if n == 0:
        raise ValueError("pfaffian of an empty matrix")
    if n == 2:
        return rows[0][1]
    total = None
    for j in range(1, n):
        a = rows[0][j]
        if a.is_zero():
            continue
        keep = [k for k in range(1, n) if k != j]
        minor = [[rows[r][c] for c in keep] for r in keep]
        term = a * pfaffian(minor)
        if j % 2 == 0:
            term = -term
        total = term if total is None else total + term
    if total is None:
        ref = rows[0][1]
        return Polynomial.zero(ref.field, ref.nvars)
    return total


def submaximal_pfaffians(M: SkewPolyMatrix):
    """f_i = (-1)^(i+1) Pf(M with row and column i removed), i = 1..size."""
    if M.size % 2 == 0:
        raise ValueError("submaximal pfaffians need an odd size")
    out = []
    for i in range(M.size):
        f = pfaffian(M.delete([i]))
        out.append(f if i % 2 == 0 else -f)
    return out


def pfaffian_ideal(M: SkewPolyMatrix) -> GradedIdeal:
    if M.size not in (5, 7):
        raise ValueError("pfaffian ideals are built from 5x5 or 7x7 matrices")
    fs = submaximal_pfaffians(M)
    for i, f in enumerate(fs, start=1):
        if not f.is_zero() and f.homogeneous_degree() is None:
            raise InhomogeneousPfaffian(f"pfaffian f_{i} = {f} is not homogeneous")
    I = GradedIdeal([f for f in fs if not f.is_zero()], M.field, M.nvars)
    I.pfaffians = fs
    return I
