"""Univariate polynomials over a FieldSpec, as lists of raw coefficients (low degree first).

Only what the plane-geometry code needs: Euclid, modular powers, root finding
over finite fields (Cantor-Zassenhaus on the product of linear factors), and
fraction-free determinants for resultants.
"""

from __future__ import annotations

import random


def trim(f, F):
    f = list(f)
    while f and F.is_zero(f[-1]):
        f.pop()
    return f


def deg(f):
    return len(f) - 1


def add(f, g, F):
    n = max(len(f), len(g))
    z = F.zero
    return trim([F.add(f[i] if i < len(f) else z, g[i] if i < len(g) else z) for i in range(n)], F)


def sub(f, g, F):
    n = max(len(f), len(g))
    z = F.zero
    return trim([F.sub(f[i] if i < len(f) else z, g[i] if i < len(g) else z) for i in range(n)], F)


def scale(f, c, F):
    return trim([F.mul(a, c) for a in f], F)


def mul(f, g, F):
    if not f or not g:
        return []
    out = [F.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if F.is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = F.add(out[i + j], F.mul(a, b))
    return trim(out, F)


def divmod_(f, g, F):
    g = trim(g, F)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = trim(f, F)
    q = [F.zero] * max(len(r) - len(g) + 1, 0)
    inv = F.inv(g[-1])
    while len(r) >= len(g):
        c = F.mul(r[-1], inv)
        shift = len(r) - len(g)
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = F.sub(r[shift + i], F.mul(c, b))
        r = trim(r, F)
    return trim(q, F), r


def mod(f, g, F):
    return divmod_(f, g, F)[1]


def exact_div(f, g, F):
    q, r = divmod_(f, g, F)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


def monic(f, F):
    if not f:
        return []
    return scale(f, F.inv(f[-1]), F)


def gcd(f, g, F):
    f, g = trim(f, F), trim(g, F)
    while g:
        f, g = g, mod(f, g, F)
    return monic(f, F)


def powmod(f, e, m, F):
    result = [F.one]
    base = mod(f, m, F)
    while e:
        if e & 1:
            result = mod(mul(result, base, F), m, F)
        base = mod(mul(base, base, F), m, F)
        e >>= 1
    return mod(result, m, F)


def evaluate(f, x, F):
    acc = F.zero
    for c in reversed(f):
        acc = F.add(F.mul(acc, x), c)
    return acc


def _split(g, F, rng):
    """Roots of a monic squarefree product of distinct linear factors."""
    if deg(g) == 0:
        return []
    if deg(g) == 1:
        return [F.neg(g[0])]
    Q = F.order
    p = F.characteristic
    while True:
        a = F.random_element(rng)
        if p == 2:
            m = Q.bit_length() - 1
            # trace map T(aX) = sum of (aX)^(2^i), i < m
            acc = cur = mod([F.zero, a], g, F)
            for _ in range(m - 1):
                cur = mod(mul(cur, cur, F), g, F)
                acc = add(acc, cur, F)
            h = gcd(g, acc, F)
        else:
            h = powmod([a, F.one], (Q - 1) // 2, g, F)
            h = gcd(g, sub(h, [F.one], F), F)
        if 0 < deg(h) < deg(g):
            return _split(h, F, rng) + _split(exact_div(g, h, F), F, rng)


def roots(f, F, seed=0):
    """Distinct roots of f lying in the finite field F."""
    f = trim(f, F)
    if not f:
        raise ValueError("the zero polynomial has every element as a root")
    if deg(f) == 0:
        return []
    f = monic(f, F)
    xq = powmod([F.zero, F.one], F.order, f, F)
    g = gcd(f, sub(xq, [F.zero, F.one], F), F)
    out = _split(g, F, random.Random(seed))
    return sorted(out, key=_sort_key)


def _sort_key(v):
    return v if isinstance(v, tuple) else (v,)


def det_fraction_free(M, F):
    """Determinant of a square matrix of polynomials (Bareiss elimination)."""
    n = len(M)
    if n == 0:
        return [F.one]
    A = [[trim(e, F) for e in row] for row in M]
    sign = 1
    prev = [F.one]
    for k in range(n - 1):
        if not A[k][k]:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return []
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = sub(mul(A[k][k], A[i][j], F), mul(A[i][k], A[k][j], F), F)
                A[i][j] = exact_div(num, prev, F)
            A[i][k] = []
        prev = A[k][k]
    d = A[n - 1][n - 1]
    return d if sign == 1 else scale(d, F.neg(F.one), F)


def resultant(a, b, F):
    """Res(a, b) for polynomials in y whose coefficients are polynomials in x.

    ``a`` and ``b`` are lists (low y-degree first) of coefficient polynomials;
    their true y-degrees are used for the Sylvester matrix.
    """
    while a and not trim(a[-1], F):
        a = a[:-1]
    while b and not trim(b[-1], F):
        b = b[:-1]
    if not a or not b:
        return []
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    if size == 0:
        return [F.one]
    rows = []
    for i in range(n):
        row = [[] for _ in range(size)]
        for j, c in enumerate(reversed(a)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [[] for _ in range(size)]
        for j, c in enumerate(reversed(b)):
            row[i + j] = c
        rows.append(row)
    return det_fraction_free(rows, F)
