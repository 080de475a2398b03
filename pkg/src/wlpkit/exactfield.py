"""Exact scalar arithmetic over Q, GF(p) and GF(p^k).

Each field is an immutable descriptor object that does arithmetic on *raw* values:

* ``Rationals``: :class:`fractions.Fraction` (always in lowest terms).
* ``PrimeField``: ``int`` residues in ``[0, p)``.
* ``ExtField``: tuples of ``k`` residues, coefficients of ``1, t, ..., t^(k-1)``.

The rest of the package works with raw values for speed; :class:`FieldElement`
wraps a raw value together with its field for user-facing code.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

from .errors import DivisionByZero, FieldMismatch, ParseError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


class FieldSpec:
    """Common interface of the three field kinds."""

    characteristic: int
    order: int | None  # None for Q

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def __call__(self, value) -> FieldElement:
        return FieldElement(self, self.coerce(value))

    def element(self, raw) -> FieldElement:
        return FieldElement(self, raw)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, n: int):
        if n < 0:
            return self.power(self.inv(a), -n)
        result = self.one
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def coerce(self, value):
        """Turn ints, FieldElements, strings (and own raw values) into a raw value."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch(f"{value.field} element used in {self}")
            return value.value
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return self.from_int(value)
        if isinstance(value, str):
            return self.parse_element(value)
        return self._coerce_other(value)

    def _coerce_other(self, value):
        raise TypeError(f"cannot coerce {value!r} into {self}")


@dataclass(frozen=True)
class Rationals(FieldSpec):
    characteristic: int = dc_field(default=0, init=False)
    order: None = dc_field(default=None, init=False)

    zero = Fraction(0)
    one = Fraction(1)

    def __str__(self):
        return "Q"

    def from_int(self, n):
        return Fraction(n)

    def _coerce_other(self, value):
        if isinstance(value, Fraction):
            return value
        raise TypeError(f"cannot coerce {value!r} into Q")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 in Q")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise DivisionByZero("division by 0 in Q")
        return a / b

    def is_zero(self, a):
        return a == 0

    def random_element(self, rng, bound=1000):
        return Fraction(rng.randint(-bound, bound))

    def parse_element(self, text):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {text!r}") from exc

    def format_element(self, a):
        return str(a)


@dataclass(frozen=True)
class PrimeField(FieldSpec):
    p: int

    def __post_init__(self):
        if not (is_prime(self.p) and self.p < 2**31):
            raise ValueError(f"{self.p} is not a prime below 2^31")

    @property
    def characteristic(self):
        return self.p

    @property
    def order(self):
        return self.p

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def __str__(self):
        return f"GF({self.p})"

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DivisionByZero(f"inverse of 0 in {self}")
        return pow(a, self.p - 2, self.p)

    def is_zero(self, a):
        return a == 0

    def elements(self):
        return range(self.p)

    def random_element(self, rng):
        return rng.randrange(self.p)

    def parse_element(self, text):
        try:
            return int(text.strip()) % self.p
        except ValueError as exc:
            raise ParseError(f"bad element of {self}: {text!r}") from exc

    def format_element(self, a):
        return str(a)


def _poly_rem_mod_p(num, den, p):
    """Remainder of num by monic den, both low-to-high coefficient lists mod p."""
    num = list(num)
    dd = len(den) - 1
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i] % p
        if c:
            for j in range(dd + 1):
                num[i - dd + j] = (num[i - dd + j] - c * den[j]) % p
    return [c % p for c in num[:dd]]


def _is_irreducible_small(coeffs, p):
    """Irreducibility of a monic polynomial of degree 2..4 over GF(p) (low-to-high)."""
    k = len(coeffs) - 1
    for r in range(p):
        if sum(c * pow(r, i, p) for i, c in enumerate(coeffs)) % p == 0:
            return False
    if k == 4:
        for a, b in itertools.product(range(p), repeat=2):
            if not any(_poly_rem_mod_p(coeffs, [b, a, 1], p)):
                return False
    return True


@lru_cache(maxsize=None)
def find_irreducible(p: int, k: int) -> tuple:
    """Lexicographically smallest monic irreducible of degree k over GF(p).

    Coefficients are compared from ``t^(k-1)`` down to ``t^0``; the result is
    returned low-to-high including the leading 1, e.g. ``(1, 0, 1)`` for t^2+1.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not 2 <= k <= 4:
        raise ValueError("extension degree must be in 2..4")
    for high_to_low in itertools.product(range(p), repeat=k):
        coeffs = tuple(reversed(high_to_low)) + (1,)
        if coeffs[0] == 0:
            continue
        if _is_irreducible_small(coeffs, p):
            return coeffs
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


_TERM_RE = re.compile(r"\s*([+-]?)\s*(\d*)\s*(\*?\s*t\s*(?:\^\s*(\d+))?)?\s*")


@dataclass(frozen=True)
class ExtField(FieldSpec):
    """GF(p^k) as GF(p)[t]/(modulus) with a monic irreducible modulus."""

    p: int
    k: int
    modulus: tuple = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if not 2 <= self.k <= 4:
            raise ValueError("extension degree must be in 2..4")
        if self.modulus is None:
            object.__setattr__(self, "modulus", find_irreducible(self.p, self.k))
        mod = tuple(c % self.p for c in self.modulus)
        if len(mod) != self.k + 1 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree k (low-to-high coefficients)")
        if not _is_irreducible_small(mod, self.p):
            raise ValueError(f"modulus {mod} is reducible over GF({self.p})")
        object.__setattr__(self, "modulus", mod)
        # t^j for j = k .. 2k-2 reduced, used by mul
        red = []
        cur = [0] * self.k
        cur_full = [(-c) % self.p for c in mod[:-1]]  # t^k
        cur = cur_full
        for _ in range(self.k - 1):
            red.append(tuple(cur))
            # multiply by t
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(cur[i] - top * mod[i]) % self.p for i in range(self.k)]
        red.append(tuple(cur))
        object.__setattr__(self, "_reduce_table", tuple(red))

    @property
    def characteristic(self):
        return self.p

    @property
    def order(self):
        return self.p**self.k

    @property
    def zero(self):
        return (0,) * self.k

    @property
    def one(self):
        return (1,) + (0,) * (self.k - 1)

    def __str__(self):
        return f"GF({self.p}^{self.k})"

    @property
    def generator(self):
        """The class of t."""
        return (0, 1) + (0,) * (self.k - 2)

    def from_int(self, n):
        return (n % self.p,) + (0,) * (self.k - 1)

    def _coerce_other(self, value):
        if isinstance(value, tuple) and len(value) == self.k:
            return tuple(c % self.p for c in value)
        raise TypeError(f"cannot coerce {value!r} into {self}")

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        k, p = self.k, self.p
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        out = prod[:k]
        for j, c in enumerate(prod[k:]):
            if c:
                row = self._reduce_table[j]
                for i in range(k):
                    out[i] += c * row[i]
        return tuple(x % p for x in out)

    def inv(self, a):
        if not any(a):
            raise DivisionByZero(f"inverse of 0 in {self}")
        return self.power(a, self.order - 2)

    def is_zero(self, a):
        return not any(a)

    def frobenius(self, a):
        return self.power(a, self.p)

    def elements(self):
        for high_to_low in itertools.product(range(self.p), repeat=self.k):
            yield tuple(reversed(high_to_low))

    def random_element(self, rng):
        return tuple(rng.randrange(self.p) for _ in range(self.k))

    def embed(self, a: int):
        """Image of a GF(p) residue."""
        return self.from_int(a)

    def parse_element(self, text):
        s = text.replace(" ", "")
        if not s:
            raise ParseError("empty field element")
        out = [0] * self.k
        pos = 0
        while pos < len(s):
            m = _TERM_RE.match(s, pos)
            if not m or m.end() == pos:
                raise ParseError(f"bad element of {self}: {text!r}", column=pos + 1)
            sign, coeff, tpart, exp = m.groups()
            if not coeff and not tpart:
                raise ParseError(f"bad element of {self}: {text!r}", column=pos + 1)
            c = int(coeff) if coeff else 1
            if sign == "-":
                c = -c
            e = 0 if not tpart else (int(exp) if exp else 1)
            # reduce t^e
            val = self.mul(self.from_int(c), self.power(self.generator, e))
            out = [x + y for x, y in zip(out, val)]
            pos = m.end()
        return tuple(c % self.p for c in out)

    def format_element(self, a):
        terms = []
        for i in reversed(range(self.k)):
            c = a[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mon = "t" if i == 1 else f"t^{i}"
                terms.append(mon if c == 1 else f"{c}*{mon}")
        return "+".join(terms) if terms else "0"


QQ = Rationals()


def GF(p: int, k: int = 1, modulus=None) -> FieldSpec:
    """GF(p) for k == 1, otherwise GF(p^k) with the canonical modulus."""
    if k == 1:
        return PrimeField(p)
    return ExtField(p, k, modulus)


_FIELD_RE = re.compile(r"^\s*(?:GF\(\s*(\d+)\s*(?:\^\s*(\d+)\s*)?\)|(Q|QQ))\s*$")


def parse_field(text: str) -> FieldSpec:
    """Parse ``Q``, ``GF(p)`` or ``GF(p^k)``."""
    m = _FIELD_RE.match(text)
    if not m:
        raise ParseError(f"unknown field {text!r}")
    if m.group(3):
        return QQ
    p = int(m.group(1))
    k = int(m.group(2)) if m.group(2) else 1
    try:
        return GF(p, k)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


class FieldElement:
    """A raw value tagged with its field; supports the usual operators."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldSpec, value):
        self.field = field
        self.value = value

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return FieldElement(self.field, self.field.div(self._other(other), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.power(self.value, n))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def is_zero(self):
        return self.field.is_zero(self.value)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except (TypeError, FieldMismatch, ParseError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __str__(self):
        return self.field.format_element(self.value)

    def __repr__(self):
        return f"{self.field}({self})"
