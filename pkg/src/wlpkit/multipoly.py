"""Sparse multivariate polynomials and the divided-power dual.

Monomials are exponent tuples.  Within a degree they are ordered by graded
reverse lex with ``x > y > z``; :func:`monomials_of_degree` fixes the coordinate
system that every matrix in the package is written in.

The dual module E is acted on by *contraction*: ``x^a o X^A = X^(A-a)`` when
``A >= a`` componentwise and 0 otherwise, with coefficient 1.  This is the
characteristic-free version of apolarity.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import comb

from .errors import DegreeTooLarge, FieldMismatch, InhomogeneousGenerator, ParseError, UnknownVariable
from .exactfield import FieldElement, FieldSpec

MAX_EXPONENT = 2**16
DEFAULT_NAMES = ("x", "y", "z")


@lru_cache(maxsize=None)
def monomials_of_degree(nvars: int, d: int) -> tuple:
    """All exponent tuples of degree d, in descending grevlex order."""
    if d < 0:
        return ()

    def compositions(n, k):
        if k == 1:
            yield (n,)
            return
        for first in range(n + 1):
            for rest in compositions(n - first, k - 1):
                yield (first,) + rest

    mons = list(compositions(d, nvars))
    mons.sort(key=lambda m: m[::-1])
    assert len(mons) == comb(d + nvars - 1, nvars - 1)
    return tuple(mons)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, d: int) -> dict:
    return {m: i for i, m in enumerate(monomials_of_degree(nvars, d))}


def dim_forms(nvars: int, d: int) -> int:
    return comb(d + nvars - 1, nvars - 1) if d >= 0 else 0


@lru_cache(maxsize=None)
def shift_indices(nvars: int, d: int, var: int) -> tuple:
    """Index in degree d+1 of x_var * m for each monomial m of degree d."""
    target = monomial_index(nvars, d + 1)
    out = []
    for m in monomials_of_degree(nvars, d):
        e = list(m)
        e[var] += 1
        out.append(target[tuple(e)])
    return tuple(out)


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


def var_names(nvars, names=None):
    if names is not None:
        return tuple(names)
    if nvars <= 3:
        return DEFAULT_NAMES[:nvars]
    return tuple(f"x{i}" for i in range(nvars))


def _format(field, terms, names, order_key):
    if not terms:
        return "0"
    pieces = []
    for mon in sorted(terms, key=order_key):
        c = terms[mon]
        cstr = field.format_element(c)
        factors = []
        for name, e in zip(names, mon):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        neg = False
        if cstr.startswith("-") and "+" not in cstr[1:]:
            neg, cstr = True, cstr[1:]
        if any(ch in cstr for ch in "+-*t^"):
            cstr = f"({cstr})"
        if factors:
            body = "*".join(factors) if cstr in ("1", "(1)") else cstr + "*" + "*".join(factors)
        else:
            body = cstr
        pieces.append(("- " if neg else "+ ") + body)
    s = " ".join(pieces)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _grevlex_desc(m):
    return (-sum(m), tuple(m[::-1]))


class Polynomial:
    """A sparse polynomial: ``terms`` maps exponent tuples to nonzero raw coefficients."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: FieldSpec, nvars: int, terms=None):
        self.field = field
        self.nvars = nvars
        clean = {}
        if terms:
            is_zero = field.is_zero
            for mon, c in terms.items():
                mon = tuple(mon)
                if len(mon) != nvars:
                    raise ValueError("exponent vector has wrong length")
                if any(e >= MAX_EXPONENT or e < 0 for e in mon):
                    raise ValueError("exponent out of range")
                c = field.coerce(c) if not _is_raw(field, c) else c
                if not is_zero(c):
                    clean[mon] = c
        self.terms = clean

    @classmethod
    def _raw(cls, field, nvars, terms):
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj.field = field
        obj.nvars = nvars
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, field, nvars):
        return cls._raw(field, nvars, {})

    @classmethod
    def constant(cls, field, nvars, c):
        return cls(field, nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, field, nvars, exps, c=1):
        return cls(field, nvars, {tuple(exps): c})

    @classmethod
    def variables(cls, field, nvars=3):
        out = []
        for i in range(nvars):
            e = [0] * nvars
            e[i] = 1
            out.append(cls._raw(field, nvars, {tuple(e): field.one}))
        return out

    @classmethod
    def from_vector(cls, field, nvars, d, vec):
        mons = monomials_of_degree(nvars, d)
        is_zero = field.is_zero
        terms = {}
        for m, c in zip(mons, vec):
            c = _to_raw(field, c)
            if not is_zero(c):
                terms[m] = c
        return cls._raw(field, nvars, terms)

    # --- inspection -------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self):
        return max((sum(m) for m in self.terms), default=-1)

    def homogeneous_degree(self):
        """The common degree of all terms, or None (also None for 0)."""
        degs = {sum(m) for m in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def is_homogeneous(self):
        return self.homogeneous_degree() is not None

    def coeff(self, mon) -> FieldElement:
        return FieldElement(self.field, self.terms.get(tuple(mon), self.field.zero))

    def homogeneous_part(self, d):
        return Polynomial._raw(self.field, self.nvars, {m: c for m, c in self.terms.items() if sum(m) == d})

    def coefficient_vector(self, d=None):
        """Raw coefficients on monomials_of_degree(nvars, d); the polynomial must live in degree d."""
        if d is None:
            d = self.homogeneous_degree()
            if d is None:
                raise ValueError("coefficient_vector of an inhomogeneous or zero polynomial needs d")
        idx = monomial_index(self.nvars, d)
        vec = [self.field.zero] * len(idx)
        for m, c in self.terms.items():
            if sum(m) != d:
                raise ValueError(f"term of degree {sum(m)} in degree-{d} vector")
            vec[idx[m]] = c
        return vec

    # --- arithmetic -------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, Polynomial):
            return self._lift(other)
        if other.field != self.field or other.nvars != self.nvars:
            raise FieldMismatch(f"{self.field}[{self.nvars}] vs {other.field}[{other.nvars}]")
        return other

    def _lift(self, c):
        return Polynomial.constant(self.field, self.nvars, c)

    def __add__(self, other):
        other = self._check(other)
        F = self.field
        terms = dict(self.terms)
        for m, c in other.terms.items():
            if m in terms:
                s = F.add(terms[m], c)
                if F.is_zero(s):
                    del terms[m]
                else:
                    terms[m] = s
            else:
                terms[m] = c
        return Polynomial._raw(F, self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return Polynomial._raw(F, self.nvars, {m: F.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c):
        F = self.field
        c = _to_raw(F, c)
        if F.is_zero(c):
            return Polynomial.zero(F, self.nvars)
        return Polynomial._raw(F, self.nvars, {m: F.mul(v, c) for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = Polynomial.constant(self.field, self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field == other.field and self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, FieldElement)):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.nvars, frozenset(self.terms.items())))

    def diff(self, var):
        F = self.field
        terms = {}
        for m, c in self.terms.items():
            e = m[var]
            if e:
                v = F.mul(c, F.from_int(e))
                if not F.is_zero(v):
                    nm = list(m)
                    nm[var] -= 1
                    terms[tuple(nm)] = v
        return Polynomial._raw(F, self.nvars, terms)

    def evaluate(self, point):
        """Evaluate at raw field values (one per variable)."""
        F = self.field
        acc = F.zero
        for m, c in self.terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v = F.mul(v, F.power(x, e))
            acc = F.add(acc, v)
        return acc

    def substitute(self, images):
        """Replace variable i by the polynomial images[i] (a linear change of variables, say)."""
        out = Polynomial.zero(images[0].field, images[0].nvars)
        for m, c in self.terms.items():
            t = Polynomial.constant(images[0].field, images[0].nvars, c)
            for img, e in zip(images, m):
                if e:
                    t = t * img**e
            out = out + t
        return out

    def change_field(self, field, embed):
        """Coefficients mapped through ``embed`` into ``field`` (e.g. GF(p) into GF(p^k))."""
        return Polynomial(field, self.nvars, {m: embed(c) for m, c in self.terms.items()})

    def to_str(self, names=None):
        return _format(self.field, self.terms, var_names(self.nvars, names), _grevlex_desc)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Polynomial({self.field}, {self.to_str()!r})"


def _is_raw(field, c):
    if isinstance(c, FieldElement):
        return False
    if isinstance(c, bool):
        return False
    kind = type(field.zero)
    if kind is int:
        return type(c) is int and 0 <= c < field.order
    return isinstance(c, kind)


def _to_raw(field, c):
    return c if _is_raw(field, c) else field.coerce(c)


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    if f.field != g.field or f.nvars != g.nvars:
        raise FieldMismatch(f"{f.field}[{f.nvars}] vs {g.field}[{g.nvars}]")
    F = f.field
    add, mul, is_zero = F.add, F.mul, F.is_zero
    terms = {}
    for m1, c1 in f.terms.items():
        for m2, c2 in g.terms.items():
            m = _add_exp(m1, m2)
            v = mul(c1, c2)
            if m in terms:
                terms[m] = add(terms[m], v)
            else:
                terms[m] = v
    return Polynomial._raw(F, f.nvars, {m: c for m, c in terms.items() if not is_zero(c)})


def hessian_matrix(F: Polynomial):
    n = F.nvars
    firsts = [F.diff(i) for i in range(n)]
    return [[firsts[i].diff(j) for j in range(n)] for i in range(n)]


def poly_det(M):
    """Determinant of a small square matrix of polynomials by cofactor expansion."""
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = None
    for j in range(n):
        if not M[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * poly_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return Polynomial.zero(M[0][0].field, M[0][0].nvars)
    return total


def hessian_det(F: Polynomial) -> Polynomial:
    """Determinant of the matrix of second partials."""
    return poly_det(hessian_matrix(F))


class DualForm:
    """Homogeneous element of the divided-power dual, X^[A] written as exponent A."""

    __slots__ = ("field", "nvars", "degree", "terms")

    def __init__(self, field, nvars, degree, terms=None):
        self.field = field
        self.nvars = nvars
        self.degree = degree
        clean = {}
        for mon, c in (terms or {}).items():
            mon = tuple(mon)
            if sum(mon) != degree or len(mon) != nvars:
                raise ValueError(f"dual monomial {mon} not of degree {degree}")
            c = _to_raw(field, c)
            if not field.is_zero(c):
                clean[mon] = c
        self.terms = clean

    @classmethod
    def from_vector(cls, field, nvars, d, vec):
        mons = monomials_of_degree(nvars, d)
        return cls(field, nvars, d, {m: c for m, c in zip(mons, vec)})

    @classmethod
    def random(cls, field, nvars, d, rng):
        return cls.from_vector(field, nvars, d, [field.random_element(rng) for _ in monomials_of_degree(nvars, d)])

    @classmethod
    def divided_power(cls, field, coeffs, d):
        """L^[d] for L = sum a_i X_i (raw a_i): the coefficient of X^[A] is a^A, no factorials."""
        terms = {}
        for m in monomials_of_degree(len(coeffs), d):
            v = field.one
            for a, e in zip(coeffs, m):
                if e:
                    v = field.mul(v, field.power(a, e))
            terms[m] = v
        return cls(field, len(coeffs), d, terms)

    def coefficient_vector(self):
        idx = monomial_index(self.nvars, self.degree)
        vec = [self.field.zero] * len(idx)
        for m, c in self.terms.items():
            vec[idx[m]] = c
        return vec

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        if other.field != self.field or other.degree != self.degree or other.nvars != self.nvars:
            raise FieldMismatch("dual forms live in different spaces")
        F = self.field
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = F.add(terms.get(m, F.zero), c)
        return DualForm(F, self.nvars, self.degree, terms)

    def scale(self, c):
        F = self.field
        c = _to_raw(F, c)
        return DualForm(F, self.nvars, self.degree, {m: F.mul(v, c) for m, v in self.terms.items()})

    def __eq__(self, other):
        return (
            isinstance(other, DualForm)
            and self.field == other.field
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.field, self.degree, frozenset(self.terms.items())))

    def to_polynomial(self, divided=True):
        """Ordinary polynomial in X, Y, Z.

        With ``divided=True`` X^[A] becomes X^A / A!, which turns contraction into
        differentiation; this needs char 0 or char > degree.
        """
        F = self.field
        terms = {}
        for m, c in self.terms.items():
            if divided:
                fact = 1
                for e in m:
                    for i in range(2, e + 1):
                        fact *= i
                c = F.div(c, F.from_int(fact))
            terms[m] = c
        return Polynomial(F, self.nvars, terms)

    def to_str(self, names=None):
        names = names or tuple(n.upper() for n in var_names(self.nvars))
        return _format(self.field, self.terms, names, _grevlex_desc)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"DualForm({self.field}, {self.to_str()!r})"


def contract(g: Polynomial, F: DualForm) -> DualForm:
    """g o F for g homogeneous of degree d <= deg F."""
    if g.field != F.field or g.nvars != F.nvars:
        raise FieldMismatch("contraction across different rings")
    if g.is_zero():
        return DualForm(F.field, F.nvars, max(F.degree, 0))
    d = g.homogeneous_degree()
    if d is None:
        raise ValueError("contraction needs a homogeneous form")
    if d > F.degree:
        raise DegreeTooLarge(f"degree {d} form acting on degree {F.degree} dual form")
    K = F.field
    terms = {}
    for a, ca in g.terms.items():
        for A, cA in F.terms.items():
            if all(x >= y for x, y in zip(A, a)):
                m = tuple(x - y for x, y in zip(A, a))
                terms[m] = K.add(terms.get(m, K.zero), K.mul(ca, cA))
    return DualForm(K, F.nvars, F.degree - d, terms)


# --- text grammar ---------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<paren>\([^()]*\))|(?P<op>[-+*^]))"
)


def parse_polynomial(text: str, field: FieldSpec, names=DEFAULT_NAMES, line=None) -> Polynomial:
    """Parse e.g. ``x^2*y - 2*z^3``; ``(2*t+1)`` is a parenthesised field literal."""
    names = tuple(names)
    nvars = len(names)
    index = {n: i for i, n in enumerate(names)}
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    if not tokens:
        raise ParseError("empty polynomial", line, 1)

    result = Polynomial.zero(field, nvars)
    i = 0
    n = len(tokens)
    while i < n:
        sign = 1
        while i < n and tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        if i >= n:
            raise ParseError("dangling sign", line, tokens[-1][2])
        coeff = field.from_int(sign)
        exps = [0] * nvars
        while True:
            if i >= n:
                raise ParseError("expected a factor", line, tokens[-1][2] + 1)
            kind, val, col = tokens[i]
            if kind == "num":
                coeff = field.mul(coeff, field.parse_element(val))
                i += 1
            elif kind == "paren":
                coeff = field.mul(coeff, field.parse_element(val[1:-1]))
                i += 1
            elif kind == "name":
                if val not in index:
                    raise UnknownVariable(f"unknown variable {val!r}", line, col)
                i += 1
                e = 1
                if i < n and tokens[i] == ("op", "^", tokens[i][2]):
                    i += 1
                    if i >= n or tokens[i][0] != "num" or "/" in tokens[i][1]:
                        raise ParseError("malformed exponent", line, tokens[i - 1][2] + 1)
                    e = int(tokens[i][1])
                    i += 1
                exps[index[val]] += e
            else:
                raise ParseError(f"unexpected {val!r}", line, col)
            if i < n and tokens[i][0] == "op" and tokens[i][1] == "*":
                i += 1
                continue
            break
        if i < n and not (tokens[i][0] == "op" and tokens[i][1] in "+-"):
            raise ParseError(f"unexpected {tokens[i][1]!r}", line, tokens[i][2])
        result = result + Polynomial(field, nvars, {tuple(exps): coeff})
    return result


def parse_form(text, field, names=DEFAULT_NAMES, line=None) -> Polynomial:
    """Parse and insist on a nonzero homogeneous result."""
    f = parse_polynomial(text, field, names, line)
    if f.is_zero() or f.homogeneous_degree() is None:
        raise InhomogeneousGenerator(f"generator {text.strip()!r} is not a nonzero form", line)
    return f
