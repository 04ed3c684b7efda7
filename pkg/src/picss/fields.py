"""Finite fields F_{p^n} with a deterministic choice of modulus.

Elements of GF(p, n) are residue classes of F_p[x] modulo a monic
irreducible polynomial of degree n.  The modulus is pinned down
deterministically: among all monic irreducibles of degree n over F_p we
take the one whose coefficient tuple (c_0, c_1, ..., c_{n-1}) -- constant
term first, leading coefficient excluded -- is lexicographically least.
Two runs (or two machines) therefore always agree about what, say,
"x + 1 in GF(3, 2)" means.

Everything is exact integer arithmetic; elements are immutable and
hashable, so they can key dictionaries and live in sets.
"""

from __future__ import annotations

import itertools
from typing import Iterator


def _poly_trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_mul(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: tuple[int, ...], m: tuple[int, ...], p: int) -> tuple[int, ...]:
    # m is monic.
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _poly_trim(a)


def _poly_pow_mod(a: tuple[int, ...], e: int, m: tuple[int, ...], p: int) -> tuple[int, ...]:
    result: tuple[int, ...] = (1,)
    base = _poly_mod(a, m, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), m, p)
        base = _poly_mod(_poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def _poly_gcd(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    while b:
        # reduce a mod b (b made monic on the fly)
        inv = pow(b[-1], p - 2, p)
        bm = tuple((ci * inv) % p for ci in b)
        a, b = b, _poly_mod(a, bm, p)
    return a


def _is_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    """Rabin test for a monic polynomial given by its full coefficient tuple."""
    n = len(coeffs) - 1
    if n == 1:
        return True
    x = (0, 1)
    # x^(p^n) == x mod f
    t = _poly_pow_mod(x, p**n, coeffs, p)
    if t != x:
        return False
    # gcd(x^(p^(n/q)) - x, f) == 1 for every prime q | n
    for q in {q for q in range(2, n + 1) if n % q == 0 and _is_prime(q)}:
        t = _poly_pow_mod(x, p ** (n // q), coeffs, p)
        diff = list(t)
        while len(diff) < 2:
            diff.append(0)
        diff[1] = (diff[1] - 1) % p
        g = _poly_gcd(coeffs, _poly_trim(diff), p)
        if len(g) > 1:
            return False
    return True


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    return all(m % d for d in range(2, int(m**0.5) + 1))


def default_modulus(p: int, n: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree n over F_p.

    The returned tuple lists all n+1 coefficients, constant term first;
    the comparison order is on (c_0, ..., c_{n-1}).
    """
    for tail in itertools.product(range(p), repeat=n):
        coeffs = tuple(tail) + (1,)
        if _is_irreducible(coeffs, p):
            return coeffs
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FieldElement:
    """An element of GF(p, n), stored as a coefficient tuple of length n."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: ExtensionField, coeffs: tuple[int, ...]):
        self.field = field
        self.coeffs = coeffs

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        p = self.field.p
        return FieldElement(
            self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self) -> FieldElement:
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other: FieldElement) -> FieldElement:
        return self + (-other)

    def __mul__(self, other) -> FieldElement:
        if isinstance(other, int):
            p = self.field.p
            return FieldElement(self.field, tuple((a * other) % p for a in self.coeffs))
        self._check(other)
        f = self.field
        prod = _poly_mul(_poly_trim(list(self.coeffs)), _poly_trim(list(other.coeffs)), f.p)
        return f.element(_poly_mod(prod, f.modulus, f.p))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> FieldElement:
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        return f.element(_poly_pow_mod(_poly_trim(list(self.coeffs)), e, f.modulus, f.p))

    def inverse(self) -> FieldElement:
        if not self:
            raise ZeroDivisionError("inverse of zero field element")
        # x^(q-2) = x^(-1) in GF(q)
        return self ** (self.field.order - 2)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return self * other.inverse()

    # -- structure ------------------------------------------------------
    def frobenius(self) -> FieldElement:
        """The p-power Frobenius a -> a^p."""
        return self ** self.field.p

    def multiplicative_order(self) -> int:
        if not self:
            raise ValueError("zero has no multiplicative order")
        m = self.field.order - 1
        order = m
        for q in _prime_factors(m):
            while order % q == 0 and self ** (order // q) == self.field.one:
                order //= q
        return order

    # -- plumbing ---------------------------------------------------------
    def _check(self, other: FieldElement) -> None:
        if self.field is not other.field:
            raise ValueError("elements of different fields")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldElement)
            and self.field is other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((id(self.field), self.coeffs))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __repr__(self) -> str:
        return f"{self.field.short_name}({self.as_string()})"

    def as_string(self) -> str:
        """Human-readable polynomial form, e.g. '1+2*x'."""
        if not self:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append("x" if c == 1 else f"{c}*x")
            else:
                parts.append(f"x^{i}" if c == 1 else f"{c}*x^{i}")
        return "+".join(parts)


def _prime_factors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


class ExtensionField:
    """GF(p, n) = F_p[x] / (deterministic monic irreducible of degree n)."""

    def __init__(self, p: int, n: int):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if n < 1:
            raise ValueError("n must be >= 1")
        self.p = p
        self.n = n
        self.order = p**n
        self.modulus = default_modulus(p, n)
        self.short_name = f"F{self.order}"
        self.zero = FieldElement(self, (0,) * n)
        self.one = self.element((1,))
        self.gen = self.element((0, 1)) if n > 1 else self.element((1,))
        self._dlog: tuple[list[FieldElement], dict[tuple[int, ...], int]] | None = None

    def element(self, coeffs) -> FieldElement:
        """Element from an int (prime subfield) or coefficient iterable."""
        if isinstance(coeffs, FieldElement):
            if coeffs.field is not self:
                raise ValueError("element of a different field")
            return coeffs
        if isinstance(coeffs, int):
            coeffs = (coeffs,)
        c = [x % self.p for x in coeffs]
        if len(c) > self.n:
            c = list(_poly_mod(tuple(c), self.modulus, self.p))
        c += [0] * (self.n - len(c))
        return FieldElement(self, tuple(c))

    def elements(self) -> Iterator[FieldElement]:
        for tup in itertools.product(range(self.p), repeat=self.n):
            yield FieldElement(self, tup)

    def nonzero_elements(self) -> Iterator[FieldElement]:
        return (a for a in self.elements() if a)

    def multiplicative_generator(self) -> FieldElement:
        for a in self.nonzero_elements():
            if a.multiplicative_order() == self.order - 1:
                return a
        raise AssertionError("no generator found")  # pragma: no cover

    def dlog_tables(self) -> tuple[list[FieldElement], dict[FieldElement, int]]:
        """(powers, log) with powers[k] = g^k and log[a] = k for nonzero a.

        Lets hot loops trade field multiplications for table lookups.
        """
        if self._dlog is None:
            g = self.multiplicative_generator()
            powers = [self.one]
            for _ in range(self.order - 2):
                powers.append(powers[-1] * g)
            log = {a: k for k, a in enumerate(powers)}
            self._dlog = (powers, log)
        return self._dlog

    def __repr__(self) -> str:
        mod = "+".join(
            (f"{c}*x^{i}" if i else str(c)) for i, c in enumerate(self.modulus) if c
        )
        return f"GF({self.p},{self.n}; x^{self.n}: {mod})"

    def __reduce__(self):
        return (GF, (self.p, self.n))


_FIELD_CACHE: dict[tuple[int, int], ExtensionField] = {}


def GF(p: int, n: int = 1) -> ExtensionField:
    """Cached field factory, so elements of GF(p,n) share one field object.

    The cache is keyed on the resolved (p, n) pair, so GF(3), GF(3, 1)
    and GF(3, n=1) all return the identical object; element equality
    relies on that.
    """
    key = (p, n)
    field = _FIELD_CACHE.get(key)
    if field is None:
        field = _FIELD_CACHE[key] = ExtensionField(p, n)
    return field


def semilinear_kernel(field: ExtensionField, xi: FieldElement, eta: FieldElement) -> list[FieldElement]:
    """All a in GF(p,n) with a*xi + a^p*eta = 0, found by exhausting the field.

    The map a -> a*xi + a^p*eta is additive (F_p-linear), so the result is
    an F_p-subspace; callers typically only need its size.
    """
    p = field.p
    return [a for a in field.elements() if not (a * xi + (a**p) * eta)]
