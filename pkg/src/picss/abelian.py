"""Finite abelian groups: canonical types, recognition, presentations.

``AbelianGroupType`` is the value object the rest of the package uses to
report group structures.  It normalizes any list of cyclic orders to the
invariant-factor form d_1 | d_2 | ... | d_k (ascending), so [9, 3] and
[3, 9] and [27] mean what they should and compare reliably.

Recognition comes in two independent flavours, used to cross-check each
other in tests:

* ``abelian_group_structure`` -- order-profile counting.  The number of
  solutions of p^k * x = 0 for each k determines the primary type, with
  no generator hunting at all.
* ``group_basis`` -- greedy basis extraction (largest order first,
  corrected to split off direct summands), certified by exhaustively
  checking that coordinate tuples biject onto the group.

``structure_from_relations`` presents Z^n modulo integer relation rows
via Smith diagonalization over Z.
"""

from __future__ import annotations

from collections import Counter
from typing import Callable, Iterable


def _factorize(m: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


class AbelianGroupType:
    """Invariant factors d_1 | d_2 | ... | d_k, all > 1, ascending."""

    __slots__ = ("factors",)

    def __init__(self, factors: Iterable[int]):
        raw = [int(f) for f in factors if int(f) != 1]
        if any(f < 1 for f in raw):
            raise ValueError("cyclic factors must be positive")
        # canonicalize through the primary decomposition
        per_prime: dict[int, list[int]] = {}
        for f in raw:
            for q, e in _factorize(f).items():
                per_prime.setdefault(q, []).append(e)
        k = max((len(v) for v in per_prime.values()), default=0)
        invariants = []
        for j in range(k):  # j = 0 is the largest factor
            d = 1
            for q, exps in per_prime.items():
                exps_sorted = sorted(exps, reverse=True)
                if j < len(exps_sorted):
                    d *= q ** exps_sorted[j]
            invariants.append(d)
        self.factors = tuple(reversed(invariants))

    # -- properties ------------------------------------------------------
    @property
    def order(self) -> int:
        out = 1
        for f in self.factors:
            out *= f
        return out

    @property
    def exponent(self) -> int:
        return self.factors[-1] if self.factors else 1

    @property
    def is_trivial(self) -> bool:
        return not self.factors

    @property
    def is_cyclic(self) -> bool:
        return len(self.factors) <= 1

    def primary(self) -> tuple[int, ...]:
        """Sorted tuple of prime-power cyclic orders."""
        out = []
        for f in self.factors:
            out.extend(q**e for q, e in _factorize(f).items())
        return tuple(sorted(out))

    def as_list(self) -> list[int]:
        return list(self.factors)

    # -- dunder ----------------------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, AbelianGroupType) and self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)

    def __repr__(self) -> str:
        if not self.factors:
            return "1"
        return " x ".join(f"Z/{f}" for f in self.factors)


# ---------------------------------------------------------------------------
# recognition by order profile


def type_from_order_counts(counts: dict[int, int]) -> AbelianGroupType:
    """Reconstruct the type from {element order: count}.

    For each prime q, the partition (m_1, m_2, ...) with
    m_k = #{summands of order >= q^k} is read off from the counts
    N_k = #{x : q^k x = 0} = q^(m_1 + ... + m_k); the primary exponents
    are the conjugate partition.
    """
    order = sum(counts.values())
    factors: list[int] = []
    for q in _factorize(order):
        # N_k over the q-primary part: orders that are powers of q
        ms = []
        prev = 1
        k = 1
        while True:
            nk = sum(c for o, c in counts.items() if o == 1 or (
                _is_prime_power_of(o, q) and o <= q**k))
            if nk == prev:
                break
            step = nk // prev
            mk = 0
            while step > 1:
                step //= q
                mk += 1
            ms.append(mk)
            prev = nk
            k += 1
        # conjugate partition: exponent of summand i = #{k : m_k > i}
        for i in range(ms[0] if ms else 0):
            e = sum(1 for mk in ms if mk > i)
            factors.append(q**e)
    return AbelianGroupType(factors)


def _is_prime_power_of(o: int, q: int) -> bool:
    while o % q == 0:
        o //= q
    return o == 1


def abelian_group_structure(elements, op: Callable, identity) -> AbelianGroupType:
    """Type of a finite abelian group given its elements and operation."""
    counts: Counter = Counter()
    for x in elements:
        k, acc = 1, x
        while acc != identity:
            acc = op(acc, x)
            k += 1
        counts[k] += 1
    return type_from_order_counts(dict(counts))


# ---------------------------------------------------------------------------
# basis extraction with certificate


def group_basis(elements, op: Callable, identity):
    """(gens, orders, dlog) with the group = direct sum of <gens[i]>.

    Greedy: repeatedly pick an element of maximal order in the quotient
    by the span so far, then correct it by a span element so its power
    lands on the identity (split off a direct summand).  The returned
    ``dlog`` maps every group element to its coordinate tuple; its
    construction doubles as the proof that the claimed decomposition is
    a bijection, so a wrong basis cannot escape this function.
    """
    elts = list(elements)
    n = len(elts)

    def power(x, k: int):
        acc, base = identity, x
        while k:
            if k & 1:
                acc = op(acc, base)
            base = op(base, base)
            k >>= 1
        return acc

    gens: list = []
    orders: list[int] = []
    span: dict = {identity: ()}

    while len(span) < n:
        # quotient order of every element outside the span
        qorder: dict = {}
        for x in elts:
            if x in span:
                continue
            acc, m = x, 1
            while acc not in span:
                acc = op(acc, x)
                m += 1
            qorder[x] = m
        best = max(qorder.values())
        chosen = None
        for x, m in qorder.items():
            if m != best:
                continue
            # correct x by a span element so that (x*h)^m = identity
            for h in span:
                y = op(x, h)
                if power(y, m) == identity:
                    chosen = y
                    break
            if chosen is not None:
                break
        if chosen is None:  # pragma: no cover - impossible for abelian input
            raise AssertionError("no splitting generator found; input not abelian?")
        new_span: dict = {}
        acc = identity
        for k in range(best):
            for s, coords in span.items():
                new_span[op(s, acc)] = coords + (k,)
            acc = op(acc, chosen)
        if len(new_span) != len(span) * best:
            raise AssertionError("generator does not split off a direct summand")
        span = new_span
        gens.append(chosen)
        orders.append(best)

    if len(span) != n:
        raise AssertionError("coordinates do not biject onto the group")
    return gens, orders, span


# ---------------------------------------------------------------------------
# integer Smith diagonalization


def integer_diagonalize(rows: list[list[int]], ncols: int) -> list[int]:
    """Nonzero diagonal of a Z-equivalent diagonal form of the matrix.

    Unimodular row/column operations only (swap, negate, add multiple),
    so Z^ncols / rowspan is preserved.  The diagonal is not forced into
    a divisibility chain; AbelianGroupType canonicalizes afterwards.
    """
    A = [list(r) + [0] * (ncols - len(r)) for r in rows]
    m, n = len(A), ncols
    diag: list[int] = []
    r = 0
    while r < m and r < n:
        # locate minimal |entry| in the working submatrix
        best = None
        for i in range(r, m):
            for j in range(r, n):
                a = A[i][j]
                if a != 0 and (best is None or abs(a) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i0, j0 = best
        A[r], A[i0] = A[i0], A[r]
        for row in A:
            row[r], row[j0] = row[j0], row[r]
        clean = True
        for i in range(r + 1, m):
            q = A[i][r] // A[r][r]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
            if A[i][r]:
                clean = False
        for j in range(r + 1, n):
            q = A[r][j] // A[r][r]
            if q:
                for i in range(m):
                    A[i][j] -= q * A[i][r]
            if A[r][j]:
                clean = False
        if clean:
            diag.append(abs(A[r][r]))
            r += 1
    return diag


def structure_from_relations(ngens: int, relations: list[list[int]]):
    """(AbelianGroupType, free_rank) of Z^ngens modulo the relation rows."""
    diag = integer_diagonalize(relations, ngens)
    return AbelianGroupType(diag), ngens - len(diag)
