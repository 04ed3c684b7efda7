"""Unipotent representations of C_p and their symmetric powers.

Representations are integer matrices mod p (rows are images of basis
vectors); the coefficient field F_{p^n} only enters when passing to
cohomology, where coordinates get tensored up.  Symmetric powers use the
monomial basis in degree-lex order and are built level by level through
multiply-by-variable index maps, so no polynomial objects are involved.

The Jordan type of a unipotent matrix is recovered from the ranks of the
powers of g - 1, and ``af_expected`` gives the predicted decomposition
of Sym^i of the reduced regular representation: a single block of size 1
(i = 0 mod p) or p - 1 (i = 1 mod p) plus free blocks, never anything
else, with the free rank always derived from the honest dimension.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement

import numpy as np

from .cohomology import CohomologyGroup, CyclicModule, cyclic_cohomology
from .fields import GF
from .pk import Subquotient, kernel, rank_mod_p


def _mat_pow_mod(A: np.ndarray, k: int, p: int) -> np.ndarray:
    """A^k mod p via float64 BLAS matmul (entries stay below 2^53)."""
    n = A.shape[0]
    out = np.eye(n, dtype=np.int64)
    base = A % p
    while k:
        if k & 1:
            out = np.rint(out.astype(np.float64) @ base.astype(np.float64)).astype(np.int64) % p
        base2 = np.rint(base.astype(np.float64) @ base.astype(np.float64)).astype(np.int64) % p
        base = base2
        k >>= 1
    return out


class JordanType:
    """Multiset of Jordan block sizes (all in [1, p] for unipotent g)."""

    def __init__(self, blocks):
        self.blocks = tuple(sorted(int(b) for b in blocks))

    def __eq__(self, other):
        other = other if isinstance(other, JordanType) else JordanType(other)
        return self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def total(self) -> int:
        return sum(self.blocks)

    def count(self, size: int) -> int:
        return self.blocks.count(size)

    def __repr__(self) -> str:
        return "{" + ", ".join(map(str, self.blocks)) + "}"


class CpRep:
    """A unipotent action of C_p on F_{p^n}^d, as an integer matrix mod p."""

    def __init__(self, p: int, matrix, field=None):
        self.p = p
        self.field = field or GF(p)
        if self.field.p != p:
            raise ValueError("field characteristic must match p")
        self.g = np.asarray(matrix, dtype=np.int64) % p
        if self.g.ndim != 2 or self.g.shape[0] != self.g.shape[1]:
            raise ValueError("representation matrix must be square")
        self.dim = self.g.shape[0]
        if self.dim:
            if not np.array_equal(_mat_pow_mod(self.g, p, p), np.eye(self.dim, dtype=np.int64)):
                raise ValueError("matrix does not have order dividing p")
            sigma = (self.g - np.eye(self.dim, dtype=np.int64)) % p
            if _mat_pow_mod_times(sigma, p, p).any():
                raise ValueError("matrix is not unipotent")

    def direct_sum(self, other: "CpRep") -> "CpRep":
        if other.p != self.p:
            raise ValueError("summands must share p")
        d1, d2 = self.dim, other.dim
        g = np.zeros((d1 + d2, d1 + d2), dtype=np.int64)
        g[:d1, :d1] = self.g
        g[d1:, d1:] = other.g
        return CpRep(self.p, g, field=self.field)

    def __repr__(self) -> str:
        return f"CpRep(p={self.p}, dim={self.dim}, {self.field.short_name})"


def _mat_pow_mod_times(A: np.ndarray, k: int, p: int) -> np.ndarray:
    """A^k mod p without the identity start (for nilpotency checks)."""
    out = A % p
    for _ in range(k - 1):
        out = np.rint(out.astype(np.float64) @ (A % p).astype(np.float64)).astype(np.int64) % p
    return out


def regular_rep(p: int, field=None) -> CpRep:
    """k[C_p]: the cyclic permutation of a p-element basis."""
    g = np.zeros((p, p), dtype=np.int64)
    for i in range(p):
        g[i, (i + 1) % p] = 1
    return CpRep(p, g, field=field)


def reduced_regular_rep(p: int, field=None) -> CpRep:
    """The (p-1)-dimensional quotient of the permutation of eps_1..eps_p.

    Basis eps_1..eps_{p-1} with eps_p = -(eps_1 + ... + eps_{p-1});
    g cycles eps_i -> eps_{i+1}.
    """
    d = p - 1
    g = np.zeros((d, d), dtype=np.int64)
    for i in range(d - 1):
        g[i, i + 1] = 1
    g[d - 1, :] = (p - 1)  # image of eps_{p-1} is eps_p = -sum
    return CpRep(p, g, field=field)


# ---------------------------------------------------------------------------
# symmetric powers


def monomial_basis(d: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples of total degree ``degree`` in d variables, lex order."""
    out = []
    for combo in combinations_with_replacement(range(d), degree):
        exps = [0] * d
        for v in combo:
            exps[v] += 1
        out.append(tuple(exps))
    return sorted(out, reverse=True)


def sym_dim(d: int, degree: int) -> int:
    if d == 0:
        return 1 if degree == 0 else 0
    return math.comb(degree + d - 1, d - 1)


def _var_mult_map(d: int, degree: int, b: int, index) -> np.ndarray:
    """Index of x_b * (each degree monomial) inside degree+1."""
    lower = monomial_basis(d, degree)
    out = np.empty(len(lower), dtype=np.int64)
    for t, m in enumerate(lower):
        bumped = list(m)
        bumped[b] += 1
        out[t] = index[tuple(bumped)]
    return out


def sym_power(rep: CpRep, i: int, modulus: int | None = None) -> CpRep:
    """Sym^i of the representation on the degree-i monomial basis."""
    mat = sym_power_matrix(rep.g, i, rep.p if modulus is None else modulus)
    if modulus is None:
        return CpRep(rep.p, mat, field=rep.field)
    # for lifted coefficient rings the caller keeps the raw matrix
    return mat


def sym_tower(g: np.ndarray, imax: int, modulus: int):
    """Yield (i, matrix of Sym^i(g) mod modulus) for i = 0..imax."""
    g = np.asarray(g, dtype=np.int64) % modulus
    d = g.shape[0]
    if sym_dim(d, imax) > 5_000:
        raise ValueError(f"Sym^{imax} has dimension {sym_dim(d, imax)} > 5000")
    yield 0, np.ones((1, 1), dtype=np.int64) % modulus
    if imax == 0:
        return
    prev = g.copy()  # Sym^1
    yield 1, prev
    for k in range(2, imax + 1):
        basis = monomial_basis(d, k)
        index = {m: t for t, m in enumerate(basis)}
        lower_index = {m: t for t, m in enumerate(monomial_basis(d, k - 1))}
        cur = np.zeros((len(basis), len(basis)), dtype=np.int64)
        maps = [_var_mult_map(d, k - 1, b, index) for b in range(d)]
        # group monomials by their first variable: m = x_a * parent
        rows_by_a: dict[int, list[int]] = {}
        parents_by_a: dict[int, list[int]] = {}
        for t, m in enumerate(basis):
            a = next(v for v in range(d) if m[v])
            parent = list(m)
            parent[a] -= 1
            rows_by_a.setdefault(a, []).append(t)
            parents_by_a.setdefault(a, []).append(lower_index[tuple(parent)])
        for a, rows in rows_by_a.items():
            block = prev[parents_by_a[a]]
            for b in range(d):
                c = int(g[a, b])
                if not c:
                    continue
                cur[np.ix_(rows, maps[b])] += c * block
                cur[np.ix_(rows, maps[b])] %= modulus
        prev = cur
        yield k, prev


def sym_power_matrix(g: np.ndarray, i: int, modulus: int) -> np.ndarray:
    """Matrix of Sym^i(g) mod ``modulus`` (rows = images of monomials)."""
    for k, mat in sym_tower(g, i, modulus):
        if k == i:
            return mat % modulus
    raise AssertionError("unreachable")


def multiply_linear(vec: np.ndarray, linear: np.ndarray, d: int, degree: int,
                    modulus: int) -> np.ndarray:
    """Product of a degree homogeneous vector with a linear form."""
    index = {m: t for t, m in enumerate(monomial_basis(d, degree + 1))}
    out = np.zeros(len(index), dtype=np.int64)
    for b in range(d):
        c = int(linear[b]) % modulus
        if not c:
            continue
        out[_var_mult_map(d, degree, b, index)] += c * vec
    return out % modulus


# ---------------------------------------------------------------------------
# Jordan types


def jordan_type(rep_or_matrix, p: int | None = None) -> JordanType:
    """Block sizes from the ranks of the powers of g - 1."""
    if isinstance(rep_or_matrix, CpRep):
        g, p = rep_or_matrix.g, rep_or_matrix.p
    else:
        if p is None:
            raise ValueError("p is required for a raw matrix")
        g = np.asarray(rep_or_matrix, dtype=np.int64) % p
    d = g.shape[0]
    sigma = (g - np.eye(d, dtype=np.int64)) % p
    sigma_f = sigma.astype(np.float64)
    ranks = [d]
    # rank(sigma^{k+1}) = rank of sigma applied to a column basis of
    # im(sigma^k); chaining through pivot columns keeps the matrices
    # shrinking instead of powering up the full d x d matrix.
    image = sigma_f
    for _ in range(p):
        r, piv = rank_mod_p(image, p, return_pivots=True)
        ranks.append(r)
        if r == 0:
            break
        image = sigma_f @ np.ascontiguousarray(image[:, piv]) % p
    while len(ranks) <= p + 1:
        ranks.append(0)
    blocks = []
    for k in range(1, p + 1):
        count = (ranks[k - 1] - ranks[k]) - (ranks[k] - ranks[k + 1])
        blocks.extend([k] * count)
    jt = JordanType(blocks)
    if jt.total() != d:
        raise AssertionError("block sizes do not sum to the dimension")
    return jt


def af_expected(i: int, p: int) -> JordanType:
    """Predicted Jordan type of Sym^i of the reduced regular rep.

    A single block of size 1 for i = 0 mod p, of size p - 1 for
    i = 1 mod p, plus free blocks; the free rank comes from the honest
    dimension of Sym^i, never from a closed formula.
    """
    dim = sym_dim(p - 1, i)
    if i % p == 0:
        base = [1]
    elif i % p == 1:
        base = [p - 1]
    else:
        base = []
    rest = dim - sum(base)
    if rest % p:
        raise AssertionError(f"non-free remainder of dimension {rest} at i={i}")
    return JordanType(base + [p] * (rest // p))


# ---------------------------------------------------------------------------
# norm invariants


def norm_invariant(k: int, p: int) -> np.ndarray:
    """(eps_1 ... eps_p)^k expanded in the Sym^{pk} monomial basis.

    eps_p = -(eps_1 + ... + eps_{p-1}); the result is a C_p-invariant
    vector generating the trivial summand of Sym^{pk}.
    """
    d = p - 1
    vec = np.ones(1, dtype=np.int64)
    degree = 0
    unit = lambda a: np.eye(d, dtype=np.int64)[a]
    for _ in range(k):
        for a in range(d):
            vec = multiply_linear(vec, unit(a), d, degree, p)
            degree += 1
        vec = multiply_linear(vec, -np.ones(d, dtype=np.int64) % p, d, degree, p)
        degree += 1
    return vec % p


# ---------------------------------------------------------------------------
# cohomology of representations


def rep_module(rep: CpRep, field=None) -> CyclicModule:
    """The CyclicModule of the representation over field = GF(p, n)."""
    field = field or rep.field
    n = field.n
    gmat = np.kron(rep.g, np.eye(n, dtype=np.int64)) % rep.p
    return CyclicModule(rep.p, rep.p, [rep.p] * (rep.dim * n), gmat)


def rep_cohomology(rep: CpRep, degrees=range(0, 7), field=None,
                   mod_transfers: bool = False) -> list[CohomologyGroup]:
    """H^*(C_p, rep) over GF(p, n); optionally kill transfers in H^0."""
    M = rep_module(rep, field=field)
    out = cyclic_cohomology(M, degrees)
    if mod_transfers:
        eye = np.eye(M.r, dtype=np.int64)
        gm1 = (M.Ghat - eye) % M.q
        ker = kernel(M.full_rows() @ gm1 % M.q, M.p, M.K)
        ker_rows = ker @ M.full_rows() % M.q if ker.shape[0] else np.zeros((0, M.r), np.int64)
        im_norm = M.full_rows() @ M.Nhat % M.q
        for t, h in enumerate(out):
            if h.degree == 0:
                out[t] = CohomologyGroup(0, Subquotient(ker_rows, im_norm, M.p, M.K), M)
    return out


def presentation_dim(p: int, j: int, s: int) -> int:
    """Multiplicity of F_{p^n} in mod-transfer H^s(C_p, Sym^j) predicted by
    the polynomial presentation on u (internal degree p), v, v' (degree 1)
    with v^2 = v'^2 = vv' = 0, av = 0, bv = av'."""
    if j % p == 0 or j % p == 1:
        return 1 if s >= 0 else 0
    return 0


def af_check(p: int, max_i: int) -> list[dict]:
    """Exhaustive Jordan-type verification for Sym^i, i <= max_i."""
    rho = reduced_regular_rep(p)
    rows = []
    for i, mat in sym_tower(rho.g, max_i, p):
        got = jordan_type(mat, p)
        want = af_expected(i, p)
        rows.append({"i": i, "computed": repr(got), "expected": repr(want),
                     "ok": got == want})
    return rows
