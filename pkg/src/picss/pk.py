"""Exact linear algebra over Z/p^K.

Everything downstream that needs to present a kernel, image, or
subquotient of finite abelian p-groups funnels through this module.
Groups are embedded in free modules (Z/q)^N with q = p^K, where K is
large enough to kill every element (callers pick K; a direct sum of
Z/p^{k_i} embeds by scaling coordinate i by q / p^{k_i}).

The workhorse is ``smith_pk``: P A Q = D with P, Q invertible mod q and
D diagonal with entries that are pure powers of p.  Pivots are chosen
with globally minimal p-adic valuation, which keeps all the eliminations
exact (every remaining entry is divisible by the pivot's p-power).
Row-vector convention throughout: x A means x is a row on the left, and
"kernel" means {x : x A = 0}.

All matrices are numpy int64 arrays reduced mod q after each operation;
q stays small enough that intermediate products never overflow.
"""

from __future__ import annotations

import numpy as np

from .abelian import AbelianGroupType

_VAL_TABLES: dict[tuple[int, int], np.ndarray] = {}


def _val_table(p: int, K: int) -> np.ndarray:
    """Lookup table: valuation of each residue in [0, q); v(0) = K."""
    key = (p, K)
    t = _VAL_TABLES.get(key)
    if t is None:
        q = p**K
        t = np.zeros(q, dtype=np.int64)
        idx = np.arange(q)
        for v in range(1, K):
            t[idx % p**v == 0] = v
        t[0] = K
        _VAL_TABLES[key] = t
    return t


def as_matrix(A, width: int | None = None) -> np.ndarray:
    """Coerce to a 2-d int64 array; empty input needs an explicit width."""
    M = np.array(A, dtype=np.int64)
    if M.size == 0:
        if width is None and M.ndim == 2:
            width = M.shape[1]
        if width is None:
            raise ValueError("empty matrix needs an explicit width")
        return M.reshape(0, width)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    return M


class SmithPK:
    """P A Q = D over Z/p^K, with inverses of both transforms."""

    __slots__ = ("D", "P", "Pinv", "Q", "Qinv", "p", "K", "q", "row_vals")

    def __init__(self, D, P, Pinv, Q, Qinv, p, K):
        self.D, self.P, self.Pinv, self.Q, self.Qinv = D, P, Pinv, Q, Qinv
        self.p, self.K, self.q = p, K, p**K
        table = _val_table(p, K)
        m, n = D.shape
        vals = []
        for i in range(m):
            vals.append(int(table[D[i, i]]) if i < n else K)
        self.row_vals = vals  # valuation of the pivot in row i (K if zero)

    def verify(self, A) -> None:
        A = as_matrix(A)
        q = self.q
        assert np.array_equal(self.P @ A % q @ self.Q % q, self.D), "PAQ != D"
        m, n = A.shape
        assert np.array_equal(self.P @ self.Pinv % q, np.eye(m, dtype=np.int64))
        assert np.array_equal(self.Q @ self.Qinv % q, np.eye(n, dtype=np.int64))
        for i in range(min(m, n)):
            d = int(self.D[i, i])
            assert d == 0 or d == self.p ** _val_table(self.p, self.K)[d]
        off = self.D.copy()
        np.fill_diagonal(off, 0)
        assert not off.any(), "D not diagonal"


def _mm(A, B, mod: int) -> np.ndarray:
    """Exact A @ B % mod through BLAS (entries must stay below 2^53)."""
    if A.shape[0] == 0 or B.shape[1] == 0 or A.shape[1] == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    assert A.shape[1] * (mod - 1) ** 2 < 2**53
    C = np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64)
    return C % mod


def _unit_echelon(B, p: int, qv: int, P, Pinv, q: int, row_off: int,
                  block: int = 64) -> list[int]:
    """Blocked row echelon of B mod qv, pivoting only on units mod p.

    Row operations are mirrored on P (rows, mod q) and Pinv (columns, mod q)
    shifted by ``row_off``.  On return B has 1 at each pivot, exact zeros
    below every pivot, and every unfilled row is divisible by p.  Returns
    the pivot columns in increasing order.

    Each column panel is first scanned on a transposed scratch copy that
    only discovers pivots and multipliers (its in-panel updates run
    unreduced and never touch columns left of the current one); the
    recorded operations are then replayed once on all of B and P.
    """
    mm, nn = B.shape
    r = 0
    piv_cols: list[int] = []
    for c0 in range(0, nn, block):
        if r == mm:
            break
        c1 = min(c0 + block, nn)
        V = B[r:, c0:c1].T.copy()  # scratch panel, columns as rows
        invs: list[int] = []
        fills: list[int] = []
        L = np.zeros((mm - r, c1 - c0), dtype=np.float64)
        for j in range(c1 - c0):
            t = len(invs)
            col = V[j, t:] % qv
            nz = np.nonzero(col % p)[0]
            if nz.size == 0:
                continue
            i0 = t + int(nz[0])
            if i0 != t:
                V[:, [t, i0]] = V[:, [i0, t]]
                L[[t, i0]] = L[[i0, t]]
                B[[r + t, r + i0]] = B[[r + i0, r + t]]
                P[[row_off + r + t, row_off + r + i0]] = \
                    P[[row_off + r + i0, row_off + r + t]]
                Pinv[:, [row_off + r + t, row_off + r + i0]] = \
                    Pinv[:, [row_off + r + i0, row_off + r + t]]
            inv = pow(int(col[i0 - t]), -1, q)
            V[:, t] = V[:, t] % qv
            mults = col[1:] if i0 == t else V[j, t + 1 :] % qv
            if j + 1 < c1 - c0 and mults.size:
                # unreduced update: each pivot adds < qv^2 per entry
                V[j + 1 :, t + 1 :] -= np.outer(V[j + 1 :, t] * (inv % qv) % qv, mults)
            L[t + 1 :, t] = mults
            invs.append(inv)
            fills.append(j)
            piv_cols.append(c0 + j)
        k = len(invs)
        if not k:
            continue
        # replay the recorded row operations on all of B and on P
        Lf = L[:, :k]
        for arr, rows, mod in ((B, slice(r, None), qv),
                               (P, slice(row_off + r, None), q)):
            T = arr[rows].astype(np.float64)
            for t in range(k):
                if t:
                    T[t] = (T[t] - Lf[t, :t] @ T[:t]) * (invs[t] % mod) % mod
                else:
                    T[t] = T[t] * (invs[t] % mod) % mod
            if mm - r > k:
                T[k:] = (T[k:] - Lf[k:, :k] @ T[:k]) % mod
            arr[rows] = np.rint(T).astype(np.int64)
        # Pinv picks up the inverse transform on the right:
        # E^{-1} = [[W, 0], [L_low, I]] with W = strict-lower L + diag(1/inv)
        Wk = np.zeros((k, k), dtype=np.int64)
        for t in range(k):
            Wk[t, :t] = Lf[t, :t].astype(np.int64) % q
            Wk[t, t] = pow(invs[t], -1, q)
        cols = slice(row_off + r, row_off + r + k)
        top = _mm(Pinv[:, cols], Wk, q)
        low = Pinv[:, row_off + r + k : row_off + mm]
        Pinv[:, cols] = (top + _mm(low, Lf[k:, :k].astype(np.int64) % q, q)) % q
        for t, j in enumerate(fills):
            assert B[r + t, c0 + j] == 1 and not B[r + t + 1 :, c0 + j].any()
        r += k
    return piv_cols


def _unit_upper_inverse(U, q: int) -> np.ndarray:
    """Inverse of a unit upper-triangular matrix mod q by back-substitution."""
    k = U.shape[0]
    inv = np.eye(k, dtype=np.int64)
    for t in range(k - 2, -1, -1):
        inv[t, t + 1 :] = (-U[t, t + 1 :] @ inv[t + 1 :, t + 1 :]) % q
    return inv


def smith_pk(A, p: int, K: int) -> SmithPK:
    """Diagonalize A over Z/p^K with tracked invertible transforms.

    Works one p-valuation at a time: phase v row-reduces the active block
    divided by p^v, pivoting on units, then moves the pivot columns to the
    diagonal and clears the pivot rows with one block column operation.
    All heavy updates are blocked matrix products (exact in float64).
    """
    q = p**K
    A = as_matrix(A) % q
    m, n = A.shape
    P = np.eye(m, dtype=np.int64)
    Pinv = np.eye(m, dtype=np.int64)
    Q = np.eye(n, dtype=np.int64)
    Qinv = np.eye(n, dtype=np.int64)
    r = 0
    for v in range(K):
        if r >= min(m, n) or not A[r:, r:].any():
            break
        pv = p**v
        qv = p ** (K - v)
        sub = A[r:, r:]
        assert not (sub % pv).any(), "phase invariant: valuations >= v"
        B = sub // pv
        piv = _unit_echelon(B, p, qv, P, Pinv, q, r)
        k = len(piv)
        if k == 0:
            A[r:, r:] = pv * B % q
            continue
        # move pivot columns to the front of the active block
        perm = piv + [c for c in range(n - r) if c not in set(piv)]
        B = B[:, perm]
        act = np.arange(r, n)
        Q[:, act] = Q[:, act[perm]]
        Qinv[act, :] = Qinv[act[perm], :]
        # clear the pivot rows right of the diagonal: with B = [[U, T], [0, C]]
        # (U unit upper triangular), multiply columns by [[U^-1, -U^-1 T], [0, I]]
        U = B[:k, :k] % qv
        T = B[:k, k:] % qv
        Uinv = _unit_upper_inverse(U, q)
        B[:k, :k] = np.eye(k, dtype=np.int64)
        B[:k, k:] = 0
        QU = _mm(Q[:, r : r + k], Uinv, q)
        Q[:, r : r + k] = QU
        if n - r - k:
            Q[:, r + k :] = (Q[:, r + k :] - _mm(QU, T % q, q)) % q
        topq = (_mm(U, Qinv[r : r + k, :], q) + _mm(T % q, Qinv[r + k :, :], q)) % q
        Qinv[r : r + k, :] = topq
        A[r:, r:] = pv * B % q
        r += k
    return SmithPK(A % q, P, Pinv, Q, Qinv, p, K)


def kernel(A, p: int, K: int, sm: SmithPK | None = None) -> np.ndarray:
    """Rows generating {x : x A = 0 mod p^K}; shape (k, m)."""
    A = as_matrix(A)
    m = A.shape[0]
    if m == 0:
        return np.zeros((0, 0), dtype=np.int64)
    sm = sm or smith_pk(A, p, K)
    q = p**K
    gens = []
    for i in range(m):
        v = sm.row_vals[i]
        if v > 0:
            gens.append(p ** (K - v) * sm.P[i] % q)
    if not gens:
        return np.zeros((0, m), dtype=np.int64)
    return np.array(gens, dtype=np.int64)


def solve(A, b, p: int, K: int, sm: SmithPK | None = None) -> np.ndarray | None:
    """One x with x A = b mod p^K, or None if there is none."""
    A = as_matrix(A)
    m, n = A.shape
    q = p**K
    b = np.asarray(b, dtype=np.int64).reshape(-1) % q
    if b.shape[0] != n:
        raise ValueError("right-hand side has the wrong length")
    if m == 0:
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    sm = sm or smith_pk(A, p, K)
    c = b @ sm.Q % q
    y = np.zeros(m, dtype=np.int64)
    for i in range(min(m, n)):
        v = sm.row_vals[i]
        pv = p**v
        if int(c[i]) % pv:
            return None
        y[i] = int(c[i]) // pv
    for i in range(m, n):
        if c[i]:
            return None
    return y @ sm.P % q


def in_span(T, b, p: int, K: int) -> bool:
    """Is b in the row span of T over Z/p^K?"""
    T = as_matrix(T, width=len(np.atleast_1d(b)))
    if T.shape[0] == 0:
        return not np.asarray(b).any()
    return solve(T, b, p, K) is not None


def preimage(A, T, p: int, K: int) -> np.ndarray:
    """Rows generating {x : x A in rowspan(T)}; shape (k, m)."""
    A = as_matrix(A)
    T = as_matrix(T, width=A.shape[1])
    m = A.shape[0]
    if T.shape[0] == 0:
        return kernel(A, p, K)
    stacked = np.vstack([A, T])
    ker = kernel(stacked, p, K)
    return ker[:, :m] if ker.size else np.zeros((0, m), dtype=np.int64)


class Subquotient:
    """S / T presented by generator rows Ms and sub-rows Mt in (Z/q)^N.

    Computes the invariant-factor decomposition of the quotient, with a
    generator (an ambient row vector) for each cyclic factor and exact
    coordinates for arbitrary members via ``decompose``.
    """

    def __init__(self, Ms, Mt, p: int, K: int, check: bool = False):
        self.p, self.K, self.q = p, K, p**K
        Ms = as_matrix(Ms) % self.q
        Mt = as_matrix(Mt, width=Ms.shape[1]) % self.q
        self.Ms, self.Mt = Ms, Mt
        self.N = Ms.shape[1]
        ks = Ms.shape[0]
        if check:
            for row in Mt:
                if solve(Ms, row, p, K) is None:
                    raise ValueError("sub rows are not inside the span")
        relations = preimage(Ms, Mt, p, K) if ks else np.zeros((0, 0), np.int64)
        if ks and relations.shape[0]:
            sm = smith_pk(relations, p, K)
            rk = relations.shape[0]
            table = _val_table(p, K)
            col_vals = [
                int(table[sm.D[j, j]]) if j < min(rk, ks) else K for j in range(ks)
            ]
            Qmat, Qinv = sm.Q, sm.Qinv
        else:
            col_vals = [K] * ks
            Qmat = np.eye(ks, dtype=np.int64)
            Qinv = np.eye(ks, dtype=np.int64)
        self._Q = Qmat
        self.orders: list[int] = []
        gens = []
        self._kept: list[int] = []
        for j in range(ks):
            if col_vals[j] > 0:
                self.orders.append(p ** col_vals[j])
                gens.append(Qinv[j] @ Ms % self.q)
                self._kept.append(j)
        self._col_vals = col_vals
        self.generators = (
            np.array(gens, dtype=np.int64)
            if gens
            else np.zeros((0, self.N), dtype=np.int64)
        )
        self.type = AbelianGroupType(self.orders)
        self._stacked = np.vstack([Ms, Mt]) if ks else Mt
        self._stacked_sm = None

    def size(self) -> int:
        return self.type.order

    def contains(self, x) -> bool:
        """Is the ambient vector x in S?"""
        return self._solve_stacked(x) is not None

    def _solve_stacked(self, x):
        ks = self.Ms.shape[0]
        if ks == 0 and self.Mt.shape[0] == 0:
            return np.zeros(0, dtype=np.int64) if not np.asarray(x).any() else None
        if self._stacked_sm is None:
            self._stacked_sm = smith_pk(self._stacked, self.p, self.K)
        return solve(self._stacked, x, self.p, self.K, self._stacked_sm)

    def decompose(self, x) -> tuple[int, ...]:
        """Coordinates of [x] with respect to the cyclic generators."""
        sol = self._solve_stacked(x)
        if sol is None:
            raise ValueError("vector is not in the submodule")
        c = sol[: self.Ms.shape[0]]
        w = c @ self._Q % self.q
        return tuple(int(w[j]) % self.orders[k] for k, j in enumerate(self._kept))

    def element(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        if coords.shape[0] != len(self.orders):
            raise ValueError("wrong number of coordinates")
        if len(self.orders) == 0:
            return np.zeros(self.N, dtype=np.int64)
        return coords @ self.generators % self.q

    def is_zero(self, x) -> bool:
        return all(c == 0 for c in self.decompose(x))

    def __repr__(self) -> str:
        return f"Subquotient({self.type!r}, ambient rank {self.N})"


def rank_mod_p(A, p: int, block: int = 64, return_pivots: bool = False):
    """Rank of A over F_p via blocked elimination.

    Values are stored in float64 but stay small integers throughout: the
    panel is processed transposed without intermediate reduction (entries
    stay below block * p^2), and the delayed trailing updates are dot
    products of length <= block with entries below p, so everything is
    exact and the heavy lifting runs through BLAS.

    With ``return_pivots`` also returns the pivot column indices, which
    name a column basis of the image (row operations preserve linear
    relations among columns).
    """
    M = np.array(A, dtype=np.float64, order="C") % p
    if M.size == 0:
        return (0, []) if return_pivots else 0
    if M.ndim == 1:
        M = M.reshape(1, -1)
    m, n = M.shape
    assert block * p**3 < 2**52
    r = 0
    pivot_cols: list[int] = []
    for c0 in range(0, n, block):
        if r == m:
            break
        c1 = min(c0 + block, n)
        V = M[r:, c0:c1].T.copy()  # panel, columns as rows; must not alias M
        invs: list[int] = []
        L = np.zeros((m - r, c1 - c0), dtype=np.float64)
        for j in range(c1 - c0):
            t = len(invs)
            col = V[j, t:] % p
            nz = np.nonzero(col)[0]
            if nz.size == 0:
                continue
            i0 = t + int(nz[0])
            if i0 != t:
                V[:, [t, i0]] = V[:, [i0, t]]
                L[[t, i0]] = L[[i0, t]]
                M[[r + t, r + i0]] = M[[r + i0, r + t]]
            inv = pow(int(col[i0 - t]), -1, p)
            V[:, t] = V[:, t] % p
            mults = col[1:] if i0 == t else V[j, t + 1 :] % p
            if j + 1 < c1 - c0 and mults.size:
                # unreduced update: each pivot adds < p^2 per entry
                V[j + 1 :, t + 1 :] -= np.outer(V[j + 1 :, t] * inv % p, mults)
            L[t + 1 :, t] = mults
            invs.append(inv)
            pivot_cols.append(c0 + j)
        k = len(invs)
        if k and c1 < n:
            # replay the panel's row operations on the trailing columns
            T = M[r:, c1:]
            for t in range(k):
                if t:
                    T[t] = (T[t] - L[t, :t] @ T[:t]) * invs[t] % p
                else:
                    T[t] = T[t] * invs[t] % p
            if m - r > k:
                T[k:] = (T[k:] - L[k:, :k] @ T[:k]) % p
        r += k
    return (r, pivot_cols) if return_pivots else r
