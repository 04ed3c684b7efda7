"""Truncated local rings: the coefficient objects everything else consumes.

Two families are provided, both with exact arithmetic and canonical
element representations:

* ``MonomialTruncatedRing`` -- polynomials over GF(p, n) or Z/p^k in a
  finite set of variables, truncated by total degree: every monomial of
  total degree >= ``truncation`` is zero.  The maximal ideal ``m`` is
  generated by the variables, so ``m^truncation = 0``.

* ``CyclotomicTruncatedRing`` -- Z[z]/(z^{p-1}+...+z+1) reduced modulo
  the ``ideal_power``-th power of the maximal ideal m = (1 - z).  With
  L = 1 - z, every element is uniquely sum_{i < N} a_i L^i with digits
  a_i in [0, p).  Multiplication convolves digit vectors and then
  rewrites carries with the relation

      p * L^i = sum_{k=2}^{p} (-1)^k C(p,k) L^{k-1+i},

  which is the relation satisfied by 1 - z in the cyclotomic integers.
  No floating point, no approximation: the quotient has exactly p^N
  elements and arithmetic lands on canonical digit tuples.

Rings can be described by small JSON dictionaries (see
``ring_from_spec``), which is how the command line names them.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Iterator

from .fields import GF, ExtensionField, FieldElement


# ---------------------------------------------------------------------------
# base coefficient rings


class BaseCoefficients:
    """Coefficient ring for a monomial truncation: GF(p,n) or Z/p^k."""

    def __init__(self, p: int, n: int = 1, zk: int = 1):
        if n > 1 and zk > 1:
            raise ValueError("base is either a field or Z/p^k, not both")
        self.p = p
        self.n = n
        self.zk = zk
        if zk == 1:
            self.field: ExtensionField | None = GF(p, n)
            self.order = p**n
            self.exponent = p
            self.zero = self.field.zero
            self.one = self.field.one
        else:
            self.field = None
            self.order = p**zk
            self.exponent = p**zk
            self.zero = 0
            self.one = 1

    def is_field(self) -> bool:
        return self.field is not None

    def coerce(self, v):
        if self.field is not None:
            return self.field.element(v)
        if not isinstance(v, int):
            raise TypeError(f"expected int coefficient, got {v!r}")
        return v % self.order

    def add(self, a, b):
        return a + b if self.field is not None else (a + b) % self.order

    def neg(self, a):
        return -a if self.field is not None else (-a) % self.order

    def mul(self, a, b):
        return a * b if self.field is not None else (a * b) % self.order

    def scale(self, a, m: int):
        return a * m if self.field is not None else (a * m) % self.order

    def is_zero(self, a) -> bool:
        return not a

    def values(self):
        if self.field is not None:
            yield from self.field.elements()
        else:
            yield from range(self.order)

    def coords(self, a) -> tuple[int, ...]:
        """Additive coordinates: field -> coefficient tuple, Z/p^k -> (a,)."""
        return a.coeffs if self.field is not None else (a,)

    def from_coords(self, c: Iterable[int]):
        c = tuple(c)
        if self.field is not None:
            return self.field.element(c)
        return c[0] % self.order

    def coord_orders(self) -> tuple[int, ...]:
        if self.field is not None:
            return (self.p,) * self.n
        return (self.order,)

    def residue(self, a) -> FieldElement:
        """Image in the residue field (GF(p,n) for fields, GF(p) for Z/p^k)."""
        if self.field is not None:
            return a
        return GF(self.p).element(a % self.p)

    def describe(self) -> str:
        if self.field is not None:
            return self.field.short_name
        return f"Z/{self.order}"


# ---------------------------------------------------------------------------
# elements


class RingElement:
    """Element of a truncated ring; immutable and hashable."""

    __slots__ = ("ring", "data")

    def __init__(self, ring, data):
        self.ring = ring
        self.data = data

    def __add__(self, other):
        other = self.ring.element(other)
        return self.ring._add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self.ring._neg(self)

    def __sub__(self, other):
        return self + (-self.ring.element(other))

    def __rsub__(self, other):
        return self.ring.element(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.ring._scale_int(self, other)
        other = self.ring.element(other)
        return self.ring._mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not defined in a truncated ring")
        out = self.ring.one
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingElement)
            and self.ring is other.ring
            and self.data == other.data
        )

    def __hash__(self) -> int:
        return hash((id(self.ring), self.data))

    def __bool__(self) -> bool:
        return bool(self.data)

    def __repr__(self) -> str:
        return self.ring.format_element(self)


# ---------------------------------------------------------------------------
# common ring API


class TruncatedRing:
    """Shared interface: a local ring R with maximal ideal m and m^N = 0."""

    p: int
    nilpotency_degree: int
    base: BaseCoefficients
    zero: RingElement
    one: RingElement

    # subclasses implement _add/_neg/_mul/_scale_int/element/format_element,
    # in_ideal/truncate/residue/ideal_additive_generators and spec()

    def element(self, v) -> RingElement:
        raise NotImplementedError

    def integer(self, m: int) -> RingElement:
        return self._scale_int(self.one, m)

    @property
    def additive_exponent(self) -> int:
        """Smallest p-power e with e*x = 0 for all x (cached by subclass)."""
        raise NotImplementedError

    def int_inverse(self, m: int) -> int:
        """Inverse of the integer m modulo the additive exponent.

        Requires gcd(m, p) = 1; used to divide by small factorials.
        """
        return pow(m, -1, self.additive_exponent)

    def divide_by_unit_integer(self, x: RingElement, m: int) -> RingElement:
        return self._scale_int(x, self.int_inverse(m))

    def ideal_elements(self, j: int = 1) -> Iterator[RingElement]:
        for x in self.elements():
            if self.in_ideal(x, j):
                yield x

    def units(self) -> Iterator[RingElement]:
        """Elements of 1 + m (the principal units)."""
        for x in self.ideal_elements(1):
            yield self.one + x

    def unit_inverse(self, u: RingElement) -> RingElement:
        """Inverse of u in 1 + m via the finite geometric series."""
        x = u - self.one
        if not self.in_ideal(x, 1):
            raise ValueError("unit_inverse expects an element of 1 + m")
        out = self.one
        term = self.one
        for _ in range(1, self.nilpotency_degree):
            term = term * (-x)
            out = out + term
        return out

    def size(self) -> int:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# monomial truncations


class MonomialTruncatedRing(TruncatedRing):
    """base[vars] with all monomials of total degree >= truncation set to 0."""

    def __init__(self, p: int, vars: tuple[str, ...], truncation: int,
                 n: int = 1, zk: int = 1):
        if truncation < 1:
            raise ValueError("truncation must be >= 1")
        if not vars:
            raise ValueError("need at least one variable")
        self.p = p
        self.base = BaseCoefficients(p, n=n, zk=zk)
        self.var_names = tuple(vars)
        self.nvars = len(vars)
        self.truncation = truncation
        self.nilpotency_degree = truncation
        self.zero = RingElement(self, ())
        self.one = RingElement(self, (((0,) * self.nvars, self.base.one),))
        self._monomials = self._enumerate_monomials()

    # -- bookkeeping ----------------------------------------------------
    def _enumerate_monomials(self) -> list[tuple[int, ...]]:
        """All exponent tuples of total degree < truncation, degree-lex order."""
        out: list[tuple[int, ...]] = []

        def rec(prefix: list[int], remaining: int, slots: int):
            if slots == 0:
                out.append(tuple(prefix))
                return
            for e in range(remaining + 1):
                rec(prefix + [e], remaining - e, slots - 1)

        for d in range(self.truncation):
            tmp: list[tuple[int, ...]] = []

            def rec2(prefix: list[int], left: int, slots: int):
                if slots == 1:
                    tmp.append(tuple(prefix + [left]))
                    return
                for e in range(left + 1):
                    rec2(prefix + [e], left - e, slots - 1)

            rec2([], d, self.nvars)
            out.extend(sorted(tmp, reverse=True))
        return out

    def monomials(self, jlo: int = 0, jhi: int | None = None) -> list[tuple[int, ...]]:
        jhi = self.truncation if jhi is None else min(jhi, self.truncation)
        return [m for m in self._monomials if jlo <= sum(m) < jhi]

    def var(self, name: str) -> RingElement:
        i = self.var_names.index(name)
        exps = tuple(1 if k == i else 0 for k in range(self.nvars))
        return RingElement(self, ((exps, self.base.one),))

    def gens(self) -> list[RingElement]:
        return [self.var(v) for v in self.var_names]

    # -- element construction -------------------------------------------
    def element(self, v) -> RingElement:
        if isinstance(v, RingElement):
            if v.ring is not self:
                raise ValueError("element of a different ring")
            return v
        if isinstance(v, int) or isinstance(v, FieldElement):
            c = self.base.coerce(v)
            if self.base.is_zero(c):
                return self.zero
            return RingElement(self, (((0,) * self.nvars, c),))
        if isinstance(v, dict):
            return self._from_dict({tuple(k): self.base.coerce(c) for k, c in v.items()})
        raise TypeError(f"cannot coerce {v!r} into {self!r}")

    def _from_dict(self, d: dict[tuple[int, ...], object]) -> RingElement:
        items = []
        for exps, c in d.items():
            if sum(exps) >= self.truncation or self.base.is_zero(c):
                continue
            items.append((exps, c))
        items.sort(key=lambda t: t[0])
        return RingElement(self, tuple(items))

    # -- arithmetic ------------------------------------------------------
    def _add(self, x: RingElement, y: RingElement) -> RingElement:
        d = dict(x.data)
        for exps, c in y.data:
            if exps in d:
                s = self.base.add(d[exps], c)
                if self.base.is_zero(s):
                    del d[exps]
                else:
                    d[exps] = s
            else:
                d[exps] = c
        return self._from_dict(d)

    def _neg(self, x: RingElement) -> RingElement:
        return RingElement(self, tuple((e, self.base.neg(c)) for e, c in x.data))

    def _scale_int(self, x: RingElement, m: int) -> RingElement:
        d = {}
        for exps, c in x.data:
            s = self.base.scale(c, m)
            if not self.base.is_zero(s):
                d[exps] = s
        return self._from_dict(d)

    def _mul(self, x: RingElement, y: RingElement) -> RingElement:
        d: dict[tuple[int, ...], object] = {}
        t = self.truncation
        for e1, c1 in x.data:
            d1 = sum(e1)
            for e2, c2 in y.data:
                if d1 + sum(e2) >= t:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = self.base.mul(c1, c2)
                if e in d:
                    s = self.base.add(d[e], prod)
                    if self.base.is_zero(s):
                        del d[e]
                    else:
                        d[e] = s
                elif not self.base.is_zero(prod):
                    d[e] = prod
        return self._from_dict(d)

    # -- filtration -------------------------------------------------------
    def degree_valuation(self, x: RingElement) -> int:
        """Largest j with x in m^j (nilpotency degree for x = 0)."""
        if not x.data:
            return self.nilpotency_degree
        return min(sum(e) for e, _ in x.data)

    def in_ideal(self, x: RingElement, j: int) -> bool:
        return all(sum(e) >= j for e, _ in x.data)

    def truncate(self, x: RingElement, j: int) -> RingElement:
        """Canonical representative of x modulo m^j (drop degrees >= j)."""
        return RingElement(self, tuple((e, c) for e, c in x.data if sum(e) < j))

    def residue(self, x: RingElement) -> FieldElement:
        for e, c in x.data:
            if sum(e) == 0:
                return self.base.residue(c)
        return self.base.residue(self.base.zero)

    def ideal_additive_generators(self, j: int, k: int | None = None) -> list[RingElement]:
        """Ring elements whose Z-span is m^j modulo m^k."""
        k = self.truncation if k is None else k
        width = len(self.base.coord_orders())
        out = []
        for m in self.monomials(j, k):
            for i in range(width):
                c = self.base.from_coords([int(i == t) for t in range(width)])
                out.append(RingElement(self, ((m, c),)))
        return out

    # -- enumeration -------------------------------------------------------
    def size(self) -> int:
        return self.base.order ** len(self._monomials)

    def elements(self, limit: int = 3**9) -> Iterator[RingElement]:
        if self.size() > limit:
            raise ValueError(f"ring of order {self.size()} is too large to enumerate")
        import itertools

        monos = self._monomials
        for combo in itertools.product(list(self.base.values()), repeat=len(monos)):
            d = {m: c for m, c in zip(monos, combo) if not self.base.is_zero(c)}
            yield self._from_dict(d)

    def random_ideal_element(self, rng, j: int = 1) -> RingElement:
        """Uniformly random element of m^j (seeded rng supplied by caller)."""
        d = {}
        vals = list(self.base.values())
        for m in self.monomials(j):
            c = rng.choice(vals)
            if not self.base.is_zero(c):
                d[m] = c
        return self._from_dict(d)

    @property
    def additive_exponent(self) -> int:
        return self.base.exponent

    # -- formatting ---------------------------------------------------------
    def format_element(self, x: RingElement) -> str:
        if not x.data:
            return "0"
        parts = []
        for exps, c in x.data:
            factors = []
            cs = str(c) if not isinstance(c, FieldElement) else c.as_string()
            if any(exps):
                if not (cs == "1"):
                    factors.append(f"({cs})" if "+" in cs else cs)
                for name, e in zip(self.var_names, exps):
                    if e == 1:
                        factors.append(name)
                    elif e > 1:
                        factors.append(f"{name}^{e}")
            else:
                factors.append(f"({cs})" if "+" in cs else cs)
            parts.append("*".join(factors))
        return " + ".join(parts)

    def spec(self) -> dict:
        out = {
            "kind": "monomial",
            "p": self.p,
            "vars": list(self.var_names),
            "truncation": self.truncation,
        }
        if self.base.is_field():
            out["n"] = self.base.n
        else:
            out["zk"] = self.base.zk
        return out

    def __repr__(self) -> str:
        return (
            f"{self.base.describe()}[{','.join(self.var_names)}]"
            f"/(deg >= {self.truncation})"
        )


# ---------------------------------------------------------------------------
# cyclotomic truncation


class CyclotomicTruncatedRing(TruncatedRing):
    """Z[z]/(1 + z + ... + z^{p-1}) modulo m^N, m = (1 - z), N = ideal_power."""

    def __init__(self, p: int, ideal_power: int):
        if p < 3:
            raise ValueError("cyclotomic truncations need an odd prime")
        if ideal_power < 1:
            raise ValueError("ideal_power must be >= 1")
        self.p = p
        self.N = ideal_power
        self.nilpotency_degree = ideal_power
        self.base = BaseCoefficients(p)  # residue field F_p
        # p * L^i  ->  sum of rewrite[d] * L^{i+d}
        self._rewrite = {
            k - 1: ((-1) ** k) * math.comb(p, k) for k in range(2, p + 1)
        }
        self.zero = RingElement(self, (0,) * self.N)
        self.one = RingElement(self, tuple([1] + [0] * (self.N - 1)))
        digits = [0] * self.N
        if self.N > 1:
            digits[1] = 1
        self.lam = RingElement(self, tuple(digits))  # L = 1 - z
        self.zeta = self.one - self.lam              # the root of unity z
        self._exponent = p ** math.ceil(self.N / (p - 1))

    # -- reduction to canonical digits -----------------------------------
    def _reduce(self, coeffs: list[int]) -> tuple[int, ...]:
        c = coeffs[: self.N] + [0] * max(0, self.N - len(coeffs))
        for i in range(self.N):
            q, r = divmod(c[i], self.p)
            if q:
                c[i] = r
                for d, coef in self._rewrite.items():
                    if i + d < self.N:
                        c[i + d] += q * coef
        return tuple(c)

    # -- construction -----------------------------------------------------
    def element(self, v) -> RingElement:
        if isinstance(v, RingElement):
            if v.ring is not self:
                raise ValueError("element of a different ring")
            return v
        if isinstance(v, int):
            return RingElement(self, self._reduce([v] + [0] * (self.N - 1)))
        if isinstance(v, (list, tuple)):
            return RingElement(self, self._reduce(list(v)))
        raise TypeError(f"cannot coerce {v!r} into {self!r}")

    def lam_power(self, i: int) -> RingElement:
        if i >= self.N:
            return self.zero
        digits = [0] * self.N
        digits[i] = 1
        return RingElement(self, tuple(digits))

    # -- arithmetic ---------------------------------------------------------
    def _add(self, x: RingElement, y: RingElement) -> RingElement:
        return RingElement(self, self._reduce([a + b for a, b in zip(x.data, y.data)]))

    def _neg(self, x: RingElement) -> RingElement:
        return RingElement(self, self._reduce([-a for a in x.data]))

    def _scale_int(self, x: RingElement, m: int) -> RingElement:
        return RingElement(self, self._reduce([a * m for a in x.data]))

    def _mul(self, x: RingElement, y: RingElement) -> RingElement:
        out = [0] * self.N
        for i, a in enumerate(x.data):
            if a:
                for j, b in enumerate(y.data):
                    if b and i + j < self.N:
                        out[i + j] += a * b
        return RingElement(self, self._reduce(out))

    # -- filtration -----------------------------------------------------------
    def degree_valuation(self, x: RingElement) -> int:
        for i, a in enumerate(x.data):
            if a:
                return i
        return self.nilpotency_degree

    def in_ideal(self, x: RingElement, j: int) -> bool:
        return all(a == 0 for a in x.data[: min(j, self.N)])

    def truncate(self, x: RingElement, j: int) -> RingElement:
        return RingElement(self, x.data[:j] + (0,) * (self.N - j)) if j < self.N else x

    def residue(self, x: RingElement) -> FieldElement:
        return GF(self.p).element(x.data[0])

    def ideal_additive_generators(self, j: int, k: int | None = None) -> list[RingElement]:
        k = self.N if k is None else min(k, self.N)
        return [self.lam_power(i) for i in range(j, k)]

    # -- enumeration ------------------------------------------------------------
    def size(self) -> int:
        return self.p**self.N

    def elements(self, limit: int = 3**9) -> Iterator[RingElement]:
        if self.size() > limit:
            raise ValueError(f"ring of order {self.size()} is too large to enumerate")
        import itertools

        for digits in itertools.product(range(self.p), repeat=self.N):
            yield RingElement(self, digits)

    def random_ideal_element(self, rng, j: int = 1) -> RingElement:
        digits = [0] * self.N
        for i in range(j, self.N):
            digits[i] = rng.randrange(self.p)
        return RingElement(self, tuple(digits))

    @property
    def additive_exponent(self) -> int:
        return self._exponent

    # -- formatting -----------------------------------------------------------
    def format_element(self, x: RingElement) -> str:
        if not any(x.data):
            return "0"
        parts = []
        for i, a in enumerate(x.data):
            if not a:
                continue
            if i == 0:
                parts.append(str(a))
            else:
                mono = "L" if i == 1 else f"L^{i}"
                parts.append(mono if a == 1 else f"{a}*{mono}")
        return " + ".join(parts)

    def spec(self) -> dict:
        return {"kind": "cyclotomic", "p": self.p, "idealPower": self.N}

    def __repr__(self) -> str:
        return f"Z[zeta_{self.p}]/m^{self.N}"


# ---------------------------------------------------------------------------
# JSON specs


def ring_from_spec(spec) -> TruncatedRing:
    """Build a ring from a JSON object (or its string form).

    Recognised shapes::

        {"kind": "monomial", "p": 3, "n": 1, "vars": ["x"], "truncation": 4}
        {"kind": "monomial", "p": 3, "zk": 2, "vars": ["x"], "truncation": 3}
        {"kind": "cyclotomic", "p": 3, "idealPower": 4}
    """
    if isinstance(spec, str):
        spec = json.loads(spec)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("ring spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "monomial":
        return MonomialTruncatedRing(
            p=int(spec["p"]),
            vars=tuple(spec.get("vars", ["x"])),
            truncation=int(spec["truncation"]),
            n=int(spec.get("n", 1)),
            zk=int(spec.get("zk", 1)),
        )
    if kind == "cyclotomic":
        return CyclotomicTruncatedRing(p=int(spec["p"]), ideal_power=int(spec["idealPower"]))
    raise ValueError(f"unknown ring kind {kind!r}")
