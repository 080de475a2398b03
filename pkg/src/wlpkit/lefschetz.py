"""Weak and strong Lefschetz deciders, Jordan partitions and restriction bounds.

Multiplication by a linear form L = a*x + b*y + c*z on A = S/I is assembled
from three precomputed matrices per degree (multiplication by each variable
in standard-monomial coordinates), so testing many forms costs one linear
combination and one rank per degree.

Certification over finite fields.  If every form over a field F with
|F| > r misses rank r in some fixed degree, then all r x r minors (polynomials
of degree r in the coefficients of L) vanish on F^3 and hence identically, so
failure holds over the algebraic closure.  When the base field is too small
for that argument, the scan moves to an extension GF(q^k).
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field as dc_field
from itertools import product

from .errors import PreconditionFailed, UndeterminedOverQ
from .exactfield import ExtField, FieldSpec, GF, PrimeField, Rationals
from .exactla import ExactMatrix, rank
from .gradedquot import GradedIdeal, IntersectionIdeal, hvector as compute_hvector, shift_matrix
from .multipoly import Polynomial, dim_forms, parse_form, var_names

DEFAULT_Q_BOUND = 1000
DEFAULT_TRIALS = 20
GENERAL_FIELD_SIZE = 64


@dataclass(frozen=True)
class LinearForm:
    """A projective class of linear forms, normalized so the first nonzero coefficient is 1."""

    field: FieldSpec
    coefficients: tuple

    def __post_init__(self):
        F = self.field
        coeffs = tuple(F.coerce(c) for c in self.coefficients)
        lead = next((c for c in coeffs if not F.is_zero(c)), None)
        if lead is None:
            raise ValueError("the zero linear form has no projective class")
        inv = F.inv(lead)
        object.__setattr__(self, "coefficients", tuple(F.mul(c, inv) for c in coeffs))

    @property
    def nvars(self):
        return len(self.coefficients)

    @classmethod
    def parse(cls, text, field, names=None):
        names = tuple(names) if names else var_names(3)
        f = parse_form(text, field, names)
        if f.homogeneous_degree() != 1:
            raise ValueError(f"{text!r} is not a linear form")
        coeffs = []
        for i in range(len(names)):
            e = [0] * len(names)
            e[i] = 1
            coeffs.append(f.terms.get(tuple(e), field.zero))
        return cls(field, tuple(coeffs))

    @classmethod
    def random(cls, field, nvars, rng, bound=DEFAULT_Q_BOUND):
        while True:
            if isinstance(field, Rationals):
                coeffs = [field.from_int(rng.randint(-bound, bound)) for _ in range(nvars)]
            else:
                coeffs = [field.random_element(rng) for _ in range(nvars)]
            if any(not field.is_zero(c) for c in coeffs):
                return cls(field, tuple(coeffs))

    def to_polynomial(self):
        terms = {}
        for i, c in enumerate(self.coefficients):
            e = [0] * self.nvars
            e[i] = 1
            terms[tuple(e)] = c
        return Polynomial(self.field, self.nvars, terms)

    def embed(self, field):
        return LinearForm(field, tuple(field.embed(c) if isinstance(field, ExtField) and isinstance(c, int) else c
                                       for c in self.coefficients))

    def __str__(self):
        return str(self.to_polynomial())


def all_normalized_forms(field, nvars=3):
    """Every normalized linear form over a finite field: (q^n - 1)/(q - 1) of them."""
    elems = list(field.elements())
    for lead in range(nvars):
        for tail in product(elems, repeat=nvars - lead - 1):
            coeffs = (field.zero,) * lead + (field.one,) + tail
            yield LinearForm(field, coeffs)


def _embed_matrix(M: ExactMatrix, field: ExtField) -> ExactMatrix:
    return ExactMatrix(field, [[field.embed(int(v)) for v in row] for row in M.tolist()], M.rows, M.cols)


class QuotientAlgebra:
    """A = S/I with cached multiplication-by-variable matrices."""

    def __init__(self, ideal: GradedIdeal, probe_bound: int = 30, field: FieldSpec = None):
        self.ideal = ideal
        self.field = field or ideal.field
        self.nvars = ideal.nvars
        self.probe_bound = probe_bound
        self._var_maps = {}
        self._h = None
        self._base = None

    def extend(self, field: ExtField) -> QuotientAlgebra:
        """The same algebra with scalars extended from GF(p) to ``field``."""
        ext = QuotientAlgebra(self.ideal, self.probe_bound, field)
        ext._base = self
        return ext

    @property
    def hvector(self):
        if self._h is None:
            self._h = compute_hvector(self.ideal, self.probe_bound).values if self._base is None else self._base.hvector
        return self._h

    @property
    def socle_degree(self):
        return len(self.hvector) - 1

    def dim(self, i):
        if self._h is not None or self._base is not None:
            h = self.hvector
            return h[i] if 0 <= i < len(h) else 0
        return self.ideal.hilbert(i) if i >= 0 else 0

    def var_maps(self, i):
        maps = self._var_maps.get(i)
        if maps is None:
            if self._base is not None:
                maps = [_embed_matrix(M, self.field) for M in self._base.var_maps(i)]
            else:
                I, n, F = self.ideal, self.nvars, self.field
                comp, nxt = I.component(i), I.component(i + 1)
                units = ExactMatrix.zeros(F, comp.codim, dim_forms(n, i))
                for r, j in enumerate(comp.free):
                    units.set(r, j, F.one)
                maps = [nxt.coords(shift_matrix(units, n, i, v)) for v in range(n)]
            maps = self._var_maps.setdefault(i, maps)
        return maps

    def linear_map(self, L: LinearForm, i: int) -> ExactMatrix:
        """Matrix of ×L: A_i -> A_{i+1}; rows are images of the standard monomials."""
        maps = self.var_maps(i)
        acc = None
        for c, M in zip(L.coefficients, maps):
            if self.field.is_zero(c):
                continue
            term = M if c == self.field.one else M.scale(c)
            acc = term if acc is None else acc + term
        return acc if acc is not None else ExactMatrix.zeros(self.field, maps[0].rows, maps[0].cols)

    def power_map(self, L: LinearForm, i: int, m: int) -> ExactMatrix:
        M = self.linear_map(L, i)
        for k in range(1, m):
            M = M @ self.linear_map(L, i + k)
        return M

    def map_rank(self, L: LinearForm, i: int, m: int = 1):
        a, b = self.dim(i), self.dim(i + m)
        if a == 0 or b == 0:
            return 0, a, b
        return rank(self.power_map(L, i, m)), a, b


def _as_form(L, field, nvars):
    if isinstance(L, LinearForm):
        return L
    if isinstance(L, str):
        return LinearForm.parse(L, field)
    if isinstance(L, Polynomial):
        return LinearForm(field, tuple(L.terms.get(tuple(int(j == i) for j in range(nvars)), field.zero)
                                       for i in range(nvars)))
    return LinearForm(field, tuple(L))


def _algebra(I):
    return I if isinstance(I, QuotientAlgebra) else QuotientAlgebra(I)


def mult_map_rank(I, L, i: int, m: int = 1):
    """(rank of ×L^m: A_i -> A_{i+m}, dim A_i, dim A_{i+m})."""
    if i < 0 or m < 1:
        raise ValueError("need i >= 0 and m >= 1")
    A = _algebra(I)
    return A.map_rank(_as_form(L, A.field, A.nvars), i, m)


@dataclass
class WlpReport:
    verdict: str
    witness: LinearForm = None
    per_degree_ranks: list = dc_field(default_factory=list)
    trials: int = 0
    exhaustive: bool = False
    hvector: tuple = ()
    witness_field: str = None
    certificate: dict = None
    form_table: list = None
    kind: str = "wlp"

    def to_dict(self):
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "witness": str(self.witness) if self.witness is not None else None,
            "witness_field": self.witness_field,
            "trials": self.trials,
            "exhaustive": self.exhaustive,
            "hvector": list(self.hvector),
            "ranks": [{"i": i, "m": m, "rank": r, "rows": a, "cols": b} for (i, m, r, a, b) in self.per_degree_ranks],
            "certificate": self.certificate,
            "form_table": self.form_table,
        }


def _conditions(h, kind, middle_only):
    e = len(h) - 1
    if kind == "wlp":
        if middle_only:
            mid = (e - 1) // 2
            conds = [(mid, 1)] if e >= 1 else []
        else:
            conds = [(i, 1) for i in range(e)]
    else:
        conds = [(i, j - i) for i in range(e + 1) for j in range(i + 1, e + 1)]
    # hardest maps first: closest to the middle
    return sorted(conds, key=lambda c: (abs(2 * c[0] + c[1] - e), c))


def _evaluate(A, L, conds, h, full=False, wanted=None):
    """Rank tuples for L.

    Stops at the first deficient map unless ``full``; with ``wanted`` given,
    maps after the first deficient one are evaluated only if they are in it.
    """
    out = []
    ok = True
    for i, m in conds:
        if not ok and not full and (wanted is None or (i, m) not in wanted):
            continue
        a, b = h[i], h[i + m]
        r = rank(A.power_map(L, i, m))
        out.append((i, m, r, a, b))
        if r < min(a, b):
            ok = False
            if not full and wanted is None:
                break
    return ok, out


def _scan_field(A, conds, h, full_table=False):
    """Exhaustive scan of the normalized forms over A.field.

    Returns (witness, ranks, table, achieved) where ``achieved`` is the set of
    conditions reached by at least one form.
    """
    achieved = set()
    table = []
    for L in all_normalized_forms(A.field, A.nvars):
        ok, ranks = _evaluate(A, L, conds, h, full=full_table, wanted=set(conds) - achieved)
        for i, m, r, a, b in ranks:
            if r == min(a, b):
                achieved.add((i, m))
        if full_table:
            table.append({"form": str(L), "ranks": [{"i": i, "m": m, "rank": r} for i, m, r, _, _ in sorted(ranks)]})
        if ok:
            return L, sorted(ranks), table, achieved
    return None, None, table, achieved


def _extension_for(F, bound):
    p = F.characteristic
    k = getattr(F, "k", 1)
    while p ** k <= bound:
        k += 1
    return k


def _lefschetz(I, kind, strategy, trials, seed, middle_only, bound):
    A = _algebra(I)
    h = tuple(A.hvector)
    F = A.field
    conds = _conditions(h, kind, middle_only)
    report = WlpReport(verdict="holds", hvector=h, kind=kind, exhaustive=strategy == "exhaustive")
    if not conds:
        report.certificate = {"reason": "no maps to check"}
        return report
    weights = {(i, m): min(h[i], h[i + m]) * m for i, m in conds}

    if strategy == "random" or not F.is_finite:
        rng = random.Random(seed)
        best = None
        for t in range(trials):
            L = LinearForm.random(F, A.nvars, rng, bound)
            ok, ranks = _evaluate(A, L, conds, h)
            report.trials = t + 1
            if ok:
                report.witness, report.per_degree_ranks, report.witness_field = L, sorted(ranks), str(F)
                return report
            if best is None:
                best = sorted(_evaluate(A, L, conds, h, full=True)[1])
        report.verdict = "undetermined"
        report.per_degree_ranks = best or []
        if isinstance(F, Rationals):
            raise UndeterminedOverQ(f"no {kind.upper()} witness among {trials} random forms over Q", report)
        return report

    if not isinstance(F, (PrimeField, ExtField)):
        raise ValueError("exhaustive scans need a finite field")
    witness, ranks, table, achieved = _scan_field(A, conds, h, full_table=True)
    report.form_table = table
    report.trials = len(table)
    if witness is not None:
        report.witness, report.per_degree_ranks, report.witness_field = witness, ranks, str(F)
        return report
    report.per_degree_ranks = _best_ranks(table, h)
    q = F.order
    failing = [c for c in conds if c not in achieved]
    certified = [c for c in failing if q > weights[c]]
    if certified:
        report.verdict = "fails"
        report.certificate = _certificate(certified, weights, str(F))
        return report

    # base field too small to certify; escalate
    if not isinstance(F, PrimeField):
        report.verdict = "undetermined"
        return report
    k = _extension_for(F, max(weights.values()))
    E = GF(F.p, k)
    B = A.extend(E)
    witness, ranks, _, achieved = _scan_field(B, conds, h)
    if witness is not None:
        report.witness, report.witness_field = witness, str(E)
        report.per_degree_ranks = ranks
        return report
    failing = [c for c in conds if c not in achieved]
    if failing:
        report.verdict = "fails"
        report.certificate = _certificate(failing, weights, str(E))
        return report
    # every map reaches maximal rank somewhere; a common witness exists once |F| > sum of weights
    k2 = _extension_for(F, sum(weights.values()))
    E2 = GF(F.p, k2)
    rng = random.Random(seed)
    B2 = A.extend(E2)
    for _ in range(max(trials, 200)):
        L = LinearForm.random(E2, A.nvars, rng)
        ok, ranks = _evaluate(B2, L, conds, h)
        if ok:
            report.witness, report.witness_field, report.per_degree_ranks = L, str(E2), sorted(ranks)
            return report
    report.verdict = "undetermined"
    return report


def _best_ranks(table, h):
    best = max(table, key=lambda row: sum(x["rank"] for x in row["ranks"]))
    return [(x["i"], x["m"], x["rank"], h[x["i"]], h[x["i"] + x["m"]]) for x in best["ranks"]]


def _certificate(conds, weights, field_name):
    return {
        "field": field_name,
        "deficient_maps": [{"i": i, "m": m, "max_rank": weights[(i, m)] // m} for i, m in sorted(conds)],
        "reason": "no form over the field reaches maximal rank and the field is larger than the minor degree",
    }


def wlp_check(I, strategy="random", trials=DEFAULT_TRIALS, seed=0, middle_only=False, bound=DEFAULT_Q_BOUND):
    """Decide the weak Lefschetz property.

    ``strategy="random"`` tries ``trials`` random forms; over Q a complete miss
    raises UndeterminedOverQ.  ``strategy="exhaustive"`` scans every normalized
    form over the (finite) field and certifies failure, extending scalars when
    the field is too small for the certificate.
    """
    return _lefschetz(I, "wlp", strategy, trials, seed, middle_only, bound)


def slp_check(I, strategy="random", trials=DEFAULT_TRIALS, seed=0, bound=DEFAULT_Q_BOUND):
    """Strong Lefschetz: every ×L^(j-i): A_i -> A_j of maximal rank."""
    return _lefschetz(I, "slp", strategy, trials, seed, False, bound)


@dataclass(frozen=True)
class JordanPartition:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(sorted(self.parts, reverse=True)))

    @property
    def total(self):
        return sum(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __eq__(self, other):
        if isinstance(other, JordanPartition):
            return self.parts == other.parts
        if isinstance(other, (list, tuple)):
            return self.parts == tuple(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.parts)

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"


def rank_sequence(A: QuotientAlgebra, L: LinearForm):
    """r_m = rank of L^m acting on all of A, for m = 0..e+1."""
    h = A.hvector
    e = len(h) - 1
    seq = [sum(h)]
    for m in range(1, e + 2):
        seq.append(sum(A.map_rank(L, i, m)[0] for i in range(0, e - m + 1)))
    return seq


def jordan_partition(I, L) -> JordanPartition:
    """Block sizes of the nilpotent operator ×L, read off the rank sequence."""
    A = _algebra(I)
    L = _as_form(L, A.field, A.nvars)
    r = rank_sequence(A, L) + [0]
    parts = []
    for m in range(1, len(r) - 1):
        at_least_m = r[m - 1] - r[m]
        at_least_next = r[m] - r[m + 1]
        parts.extend([m] * (at_least_m - at_least_next))
    return JordanPartition(tuple(parts))


def general_jordan(I, seeds=range(10), field=None):
    """Majority Jordan partition over random forms, one per seed.

    Small finite fields are replaced by an extension with at least
    GENERAL_FIELD_SIZE elements so that "random" approximates "general".
    Returns (partition, {seed: partition}).
    """
    A = _algebra(I)
    F = field or A.field
    if field is None and isinstance(F, PrimeField) and F.p < GENERAL_FIELD_SIZE:
        F = GF(F.p, _extension_for(F, GENERAL_FIELD_SIZE - 1))
    B = A.extend(F) if F != A.field else A
    table = {}
    for s in seeds:
        L = LinearForm.random(F, A.nvars, random.Random(s))
        table[s] = jordan_partition(B, L)
    counts = Counter(table.values())
    best = max(counts.items(), key=lambda kv: (kv[1], kv[0].parts))[0]
    return best, table


def green_restriction_dim(I: GradedIdeal, L, d: int) -> int:
    """dim of (S/(I + (L)))_d."""
    L = _as_form(L, I.field, I.nvars)
    return I.plus(L.to_polynomial()).hilbert(d)


def injectivity_inheritance_check(Is, L, i: int) -> bool:
    """Injectivity of ×L: A_i -> A_{i+1} on each S/I_j passes to S/(∩ I_j)."""
    Is = list(Is)
    for j, I in enumerate(Is):
        A = QuotientAlgebra(I)
        Lj = _as_form(L, A.field, A.nvars)
        r, a, _ = A.map_rank(Lj, i)
        if r != a:
            raise PreconditionFailed(f"×{Lj} is not injective in degree {i} on factor {j} (rank {r} < {a})")
    J = Is[0] if len(Is) == 1 else IntersectionIdeal(Is)
    A = QuotientAlgebra(J)
    r, a, _ = A.map_rank(_as_form(L, A.field, A.nvars), i)
    return r == a
