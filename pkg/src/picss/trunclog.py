"""Truncated exponential/logarithm and the discrepancy functionals.

For a ring R with distinguished nilpotent ideal m in which (p-1)! is
invertible, the p-truncated exponential and logarithm

    exp_p(x) = sum_{i < p} x^i / i!        log_p(u) = sum_{n < p} (-1)^{n-1} (u-1)^n / n

are mutually inverse group isomorphisms m <-> 1 + m whenever m^p = 0.
When m^p is nonzero the failure of exp_p to be a homomorphism is
measured, modulo m^{p+1}, by the degree-p polynomial functional

    sigma_p(x_1, ..., x_k) = sum  x_1^{j_1} ... x_k^{j_k} / (j_1! ... j_k!)

over all (j_1, ..., j_k) with sum p and every j_i <= p - 1.  This is the
expanded multinomial form of ((sum x_i)^p - sum x_i^p) / p!; computing it
this way never divides by p, so it is valid in characteristic p.

mu_p is the alternating-sign combination of sigma_p used to compare a
product of alternating exponentials against the exponential of the
alternating sum; for odd p its correction term vanishes identically, and
p = 2 is supported too (where the corrections are real and catch sign
errors).

The verify_* functions return the exact discrepancy element of the
identity they check (contract: zero), rather than a boolean, so a
failure prints the counterexample.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement, product

from .rings import RingElement, TruncatedRing


def _resolve_p(ring: TruncatedRing, p: int | None) -> int:
    p = ring.p if p is None else p
    if math.gcd(math.factorial(p - 1), ring.additive_exponent) != 1:
        raise ValueError(f"(p-1)! = {math.factorial(p - 1)} is not invertible here")
    return p


def _require_ideal(ring: TruncatedRing, x: RingElement, what: str = "argument"):
    if not ring.in_ideal(x, 1):
        raise ValueError(f"{what} must lie in the distinguished ideal")


def trunc_exp(ring: TruncatedRing, x: RingElement, p: int | None = None) -> RingElement:
    """exp_p(x) = sum_{i < p} x^i / i!, a unit in 1 + m."""
    p = _resolve_p(ring, p)
    _require_ideal(ring, x)
    acc = ring.one
    term = ring.one
    for i in range(1, p):
        term = ring.divide_by_unit_integer(term * x, i)
        acc = acc + term
    return acc


def trunc_log(ring: TruncatedRing, u: RingElement, p: int | None = None) -> RingElement:
    """log_p(u) = sum_{n < p} (-1)^(n-1) (u-1)^n / n for u in 1 + m."""
    p = _resolve_p(ring, p)
    y = u - ring.one
    _require_ideal(ring, y, "argument minus one")
    acc = ring.zero
    pw = ring.one
    for n in range(1, p):
        pw = pw * y
        term = ring.divide_by_unit_integer(pw, n)
        acc = acc + term if n % 2 == 1 else acc - term
    return acc


def sigma_p(ring: TruncatedRing, xs: list[RingElement], p: int | None = None) -> RingElement:
    """Multinomial discrepancy: sum over j_1+...+j_k = p, all j_i < p."""
    p = _resolve_p(ring, p)
    for x in xs:
        _require_ideal(ring, x)
    k = len(xs)
    if k <= 1:
        return ring.zero
    # memoize powers x_i^j for j <= p-1
    pows = []
    for x in xs:
        row = [ring.one]
        for _ in range(p - 1):
            row.append(row[-1] * x)
        pows.append(row)
    out = ring.zero
    for js in product(range(p), repeat=k):
        if sum(js) != p:
            continue
        term = ring.one
        denom = 1
        for i, j in enumerate(js):
            if j:
                term = term * pows[i][j]
                denom *= math.factorial(j)
        out = out + ring.divide_by_unit_integer(term, denom)
    return out


def mu_p(ring: TruncatedRing, ys: list[RingElement], p: int | None = None) -> RingElement:
    """sigma_p(y_0, -y_1, y_2, ...) - sum over odd i of sigma_p(y_i, -y_i)."""
    p = _resolve_p(ring, p)
    signed = [y if i % 2 == 0 else -y for i, y in enumerate(ys)]
    out = sigma_p(ring, signed, p)
    for i, y in enumerate(ys):
        if i % 2 == 1:
            out = out - sigma_p(ring, [y, -y], p)
    return out


def _check_nilpotent_enough(ring: TruncatedRing, xs: list[RingElement], p: int):
    """The ideal generated by xs must have vanishing (p+1)-fold products."""
    if ring.nilpotency_degree <= p + 1:
        return
    vals = [ring.degree_valuation(x) for x in xs]
    if vals and min(vals) * (p + 1) >= ring.nilpotency_degree:
        return
    for combo in combinations_with_replacement(xs, p + 1):
        prod = ring.one
        for c in combo:
            prod = prod * c
        if prod != ring.zero:
            raise ValueError("ideal generated by the inputs is not sufficiently nilpotent")


def verify_exp_sum_identity(
    ring: TruncatedRing, xs: list[RingElement], p: int | None = None
) -> RingElement:
    """prod exp_p(x_i) - exp_p(sum x_i) - sigma_p(xs); contract: zero."""
    p = _resolve_p(ring, p)
    _check_nilpotent_enough(ring, xs, p)
    prod_side = ring.one
    total = ring.zero
    for x in xs:
        prod_side = prod_side * trunc_exp(ring, x, p)
        total = total + x
    return prod_side - trunc_exp(ring, total, p) - sigma_p(ring, xs, p)


def verify_inverse_identity(
    ring: TruncatedRing, y: RingElement, p: int | None = None
) -> RingElement:
    """exp_p(y) * exp_p(-y) - 1 - sigma_p(y, -y); contract: zero."""
    p = _resolve_p(ring, p)
    _check_nilpotent_enough(ring, [y], p)
    lhs = trunc_exp(ring, y, p) * trunc_exp(ring, -y, p)
    return lhs - ring.one - sigma_p(ring, [y, -y], p)


def verify_alternating_identity(
    ring: TruncatedRing, ys: list[RingElement], p: int | None = None
) -> RingElement:
    """exp_p(alt sum) / prod exp_p(y_i)^(+-1) - (1 - mu_p(ys)); contract: zero."""
    p = _resolve_p(ring, p)
    _check_nilpotent_enough(ring, ys, p)
    alt = ring.zero
    denom = ring.one
    for i, y in enumerate(ys):
        e = trunc_exp(ring, y, p)
        if i % 2 == 0:
            alt = alt + y
            denom = denom * e
        else:
            alt = alt - y
            denom = denom * ring.unit_inverse(e)
    lhs = trunc_exp(ring, alt, p) * ring.unit_inverse(denom)
    return lhs - (ring.one - mu_p(ring, ys, p))
