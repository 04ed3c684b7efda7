"""Cohomology of cyclic groups and the filtration spectral-sequence engine.

Modules are finite abelian p-groups carried on explicit coordinates:
``CyclicModule`` stores invariant-factor orders (o_1, ..., o_r), an
action matrix for the generator g of C_m on those coordinates, and an
embedding of the group into (Z/q)^r with q = p^K (coordinate i scaled by
q/o_i) so that all kernel/image/subquotient computations run through the
exact Z/p^K linear algebra in ``pk``.  Multiplicative groups (principal
units 1 + m of a truncated ring) are converted to coordinates through a
discrete-log table built by ``abelian.group_basis``; from then on they
are indistinguishable from additive modules.

Cohomology of C_m uses the 2-periodic resolution:

    H^0 = ker(g - 1),   H^odd = ker(N)/im(g - 1),   H^even>0 = ker(g - 1)/im(N),

with N = 1 + g + ... + g^{m-1}.  Cup products with the degree-1 class a
and the degree-2 periodicity class b of H^*(C_m, F_p) act on
representatives by explicit formulas (b: same representative two degrees
up; a: identity on even cocycles, x -> sum_t t * g^t(x) on odd ones).

The spectral-sequence engine works on the filtered cochain complex of
the periodic resolution: C^i = carrier for all i, differentials
alternate (g - 1) and N, and F^j C^i is the filtration subgroup.  Pages
are computed from scratch by the subquotient formulas

    Z_r^{i,j} = {x in F^j C^i : d x in F^{j+r} C^{i+1}},
    E_r^{i,j} = Z_r^{i,j} / (d Z_{r-1}^{i-1, j-r+1} + Z_{r-1}^{i, j+1}),

with d_r induced by d.  E_N (N = filtration length) is E_infinity, and
the engine cross-checks the product of E_infinity orders in each total
degree against an independent direct cohomology computation.
"""

from __future__ import annotations

import json
import numpy as np

from .abelian import AbelianGroupType, group_basis
from .pk import Subquotient, as_matrix, kernel, preimage, smith_pk, solve
from .rings import TruncatedRing
from .trunclog import trunc_exp


# ---------------------------------------------------------------------------
# coordinate modules


def _p_val(o: int, p: int) -> int:
    v = 0
    while o % p == 0:
        o //= p
        v += 1
    if o != 1:
        raise ValueError("coordinate orders must be powers of p")
    return v


class CyclicModule:
    """Finite abelian p-group with a C_m action, on explicit coordinates."""

    def __init__(self, m, p, orders, gmat, K=None, decode=None, encode=None,
                 labels=None):
        self.m = m
        self.p = p
        self.orders = [int(o) for o in orders]
        self.r = len(self.orders)
        vals = [_p_val(o, p) for o in self.orders]
        self.K = max(vals, default=1) if K is None else K
        self.q = p**self.K
        self.scale = np.array([self.q // o for o in self.orders], dtype=np.int64)
        self._decode = decode
        self._encode = encode
        self.labels = labels or [f"m{i}" for i in range(self.r)]
        G = as_matrix(gmat, width=self.r) % self.q if self.r else np.zeros((0, 0), np.int64)
        # action on embedded coordinates: Ghat[i][j] = G[i][j] * o_i / o_j
        Ghat = np.zeros((self.r, self.r), dtype=np.int64)
        for i in range(self.r):
            for j in range(self.r):
                num = int(G[i, j]) * self.orders[i]
                if num % self.orders[j]:
                    raise ValueError("action matrix is not a well-defined homomorphism")
                Ghat[i, j] = (num // self.orders[j]) % self.q
        self.gmat = G
        self.Ghat = Ghat
        # g^m must be the identity on the embedded lattice
        acc = np.eye(self.r, dtype=np.int64)
        total = np.zeros((self.r, self.r), dtype=np.int64)
        for _ in range(m):
            total = (total + acc) % self.q
            acc = acc @ Ghat % self.q
        self.Nhat = total
        S = self.full_rows()
        if not np.array_equal(S @ acc % self.q, S):
            raise ValueError("action does not have order dividing m")

    # -- embeddings -------------------------------------------------------
    def full_rows(self) -> np.ndarray:
        """Rows generating the embedded copy of the group in (Z/q)^r."""
        return np.diag(self.scale) if self.r else np.zeros((0, 0), np.int64)

    def embed(self, coords) -> np.ndarray:
        c = np.asarray(coords, dtype=np.int64)
        return c * self.scale % self.q

    def unembed(self, vec) -> tuple[int, ...]:
        vec = np.asarray(vec, dtype=np.int64) % self.q
        out = []
        for i in range(self.r):
            s = int(self.scale[i])
            if int(vec[i]) % s:
                raise ValueError("vector is not in the embedded lattice")
            out.append((int(vec[i]) // s) % self.orders[i])
        return tuple(out)

    def decode(self, vec):
        """Carrier object for an embedded vector (falls back to coords)."""
        coords = self.unembed(vec)
        return self._decode(coords) if self._decode else coords

    def encode(self, obj) -> np.ndarray:
        if self._encode is None:
            return self.embed(obj)
        return self.embed(self._encode(obj))

    def size(self) -> int:
        out = 1
        for o in self.orders:
            out *= o
        return out

    def __repr__(self) -> str:
        t = AbelianGroupType(self.orders)
        return f"CyclicModule(C_{self.m} on {t!r})"

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_enumeration(cls, m, p, elements, op, identity, action=None, K=None):
        """Build coordinates for an enumerated abelian group with dlog.

        ``action`` is a callable on carrier elements (default: identity).
        The returned module decodes coordinates back to carrier objects.
        """
        gens, orders, dlog = group_basis(elements, op, identity)
        r = len(gens)

        def power(x, k):
            acc = identity
            for _ in range(k):
                acc = op(acc, x)
            return acc

        def decode(coords):
            acc = identity
            for g, c in zip(gens, coords):
                acc = op(acc, power(g, int(c)))
            return acc

        def encode(obj):
            return dlog[obj]

        if action is None:
            gmat = np.eye(r, dtype=np.int64)
        else:
            rows = []
            for g in gens:
                img = action(g)
                if img not in dlog:
                    raise ValueError("action does not preserve the group")
                rows.append(dlog[img])
            gmat = as_matrix(rows, width=r)
        mod = cls(m, p, orders, gmat, K=K, decode=decode, encode=encode)
        mod.dlog = dlog
        mod.gens = gens
        return mod

    @classmethod
    def from_field_rep(cls, m, field, matrix, K=None):
        """Module from an F_{p^n}-linear action matrix (rows = images).

        A d-dimensional F_{p^n} vector space becomes d*n coordinates of
        order p; the matrix entry acts through the field's multiplication.
        """
        p, n = field.p, field.n
        d = len(matrix)
        orders = [p] * (d * n)
        gmat = np.zeros((d * n, d * n), dtype=np.int64)
        for i in range(d):
            for t in range(n):
                # image of basis vector x^t * e_i
                for j in range(d):
                    c = matrix[i][j]
                    if not c:
                        continue
                    shifted = c * field.element([0] * t + [1])
                    for s, cs in enumerate(shifted.coeffs):
                        gmat[i * n + t, j * n + s] = cs
        labels = [f"e{i}" if n == 1 else f"x^{t}*e{i}" for i in range(d) for t in range(n)]
        return cls(m, p, orders, gmat, K=K, labels=labels)


# ---------------------------------------------------------------------------
# cohomology of C_m by the periodic resolution


class CohomologyGroup:
    __slots__ = ("degree", "sq", "type", "rep_rows", "reps")

    def __init__(self, degree, sq, module):
        self.degree = degree
        self.sq = sq
        self.type = sq.type
        self.rep_rows = sq.generators
        self.reps = [module.decode(row) for row in sq.generators]

    def __repr__(self) -> str:
        return f"H^{self.degree} = {self.type!r}"


def _lattice_kernel(M: CyclicModule, mat) -> np.ndarray:
    """Generators of {x in embedded lattice : x mat = 0}."""
    S = M.full_rows()
    if S.shape[0] == 0:
        return S
    ker = kernel(S @ mat % M.q, M.p, M.K)
    return ker @ S % M.q if ker.shape[0] else np.zeros((0, M.r), np.int64)


def cyclic_cohomology(M: CyclicModule, degrees=range(0, 7)) -> list[CohomologyGroup]:
    """H^i(C_m, M) for each requested degree, with representatives."""
    q = M.q
    gm1 = (M.Ghat - np.eye(M.r, dtype=np.int64)) % q
    S = M.full_rows()
    ker_gm1 = _lattice_kernel(M, gm1)
    ker_norm = _lattice_kernel(M, M.Nhat)
    im_gm1 = S @ gm1 % q
    im_norm = S @ M.Nhat % q
    out = []
    for i in degrees:
        if i == 0:
            sq = Subquotient(ker_gm1, np.zeros((0, M.r), np.int64), M.p, M.K)
        elif i % 2 == 1:
            sq = Subquotient(ker_norm, im_gm1, M.p, M.K)
        else:
            sq = Subquotient(ker_gm1, im_norm, M.p, M.K)
        out.append(CohomologyGroup(i, sq, M))
    return out


def cup_with_b(M: CyclicModule, degree: int, vec) -> tuple[int, np.ndarray]:
    """Multiply a cocycle by the degree-2 periodicity class b."""
    vec = np.asarray(vec, dtype=np.int64) % M.q
    _assert_cocycle(M, degree, vec)
    return degree + 2, vec


def cup_with_a(M: CyclicModule, degree: int, vec) -> tuple[int, np.ndarray]:
    """Multiply a cocycle by the degree-1 class a (needs exponent p)."""
    if any(o != M.p for o in M.orders):
        raise ValueError("cup formulas implemented for exponent-p modules only")
    vec = np.asarray(vec, dtype=np.int64) % M.q
    _assert_cocycle(M, degree, vec)
    if degree % 2 == 0:
        out = vec
    else:
        out = np.zeros(M.r, dtype=np.int64)
        acc = vec.copy()
        for t in range(M.m):
            if t:
                out = (out + t * acc) % M.q
            acc = acc @ M.Ghat % M.q
    _assert_cocycle(M, degree + 1, out)
    return degree + 1, out


def _assert_cocycle(M: CyclicModule, degree: int, vec) -> None:
    gm1 = (M.Ghat - np.eye(M.r, dtype=np.int64)) % M.q
    mat = M.Nhat if degree % 2 == 1 else gm1
    if degree == 0:
        mat = gm1
    if (np.asarray(vec) @ mat % M.q).any():
        raise ValueError(f"vector is not a degree-{degree} cocycle")


# ---------------------------------------------------------------------------
# ring-derived modules


def _canonical_units(ring: TruncatedRing, j: int, k: int):
    """Canonical coset representatives of (1+m^j)/(1+m^k) and their product."""
    elems = [ring.one + ring.truncate(x, k) for x in ring.ideal_elements(j)]
    elems = sorted(set(elems), key=repr)

    def op(u, v):
        return ring.one + ring.truncate(u * v - ring.one, k)

    return elems, op


def unit_group_module(ring: TruncatedRing, j: int, k: int, action=None,
                      m: int | None = None) -> CyclicModule:
    """(1 + m^j)/(1 + m^k) as a CyclicModule (dlog coordinates)."""
    if j >= k or j < 1:
        raise ValueError("need 1 <= j < k")
    m = ring.p if m is None else m
    elems, op = _canonical_units(ring, j, k)
    act = None
    if action is not None:
        def act(u):
            img = action(u)
            if not ring.in_ideal(img - ring.one, j):
                raise ValueError("action does not preserve the unit filtration")
            return ring.one + ring.truncate(img - ring.one, k)
    mod = CyclicModule.from_enumeration(m, ring.p, elems, op, ring.one, action=act)
    mod.ring = ring
    mod.truncation_level = k

    def unit_coords(u):
        key = ring.one + ring.truncate(u - ring.one, k)
        return mod.dlog[key]

    mod.carrier_coords = unit_coords
    return mod


def additive_ideal_module(ring: TruncatedRing, j: int, k: int, action=None,
                          m: int | None = None) -> CyclicModule:
    """m^j/m^k as a CyclicModule (canonical truncated representatives)."""
    if j < 0 or j >= k:
        raise ValueError("need 0 <= j < k")
    m = ring.p if m is None else m
    elems = sorted({ring.truncate(x, k) for x in ring.ideal_elements(j)}, key=repr)

    def op(x, y):
        return ring.truncate(x + y, k)

    act = None
    if action is not None:
        def act(x):
            img = action(x)
            if not ring.in_ideal(img, j):
                raise ValueError("action does not preserve the ideal filtration")
            return ring.truncate(img, k)
    mod = CyclicModule.from_enumeration(m, ring.p, elems, op, ring.zero, action=act)
    mod.ring = ring
    mod.truncation_level = k

    def ideal_coords(x):
        return mod.dlog[ring.truncate(x, k)]

    mod.carrier_coords = ideal_coords
    return mod


# ---------------------------------------------------------------------------
# filtered modules and the spectral-sequence engine


class FilteredGModule:
    """A CyclicModule with a descending g-stable filtration.

    ``filt_rows[t]`` generates F^{j0 + t}; the last entry must be the
    zero subgroup.  Filtration indices are reported as j = j0 + t.
    """

    def __init__(self, module: CyclicModule, filt_rows, j0: int = 1, meta=None):
        self.module = module
        self.filt_rows = [as_matrix(F, width=module.r) % module.q for F in filt_rows]
        self.j0 = j0
        self.meta = meta or {}
        if self.filt_rows[-1].shape[0] != 0:
            raise ValueError("filtration must end at the zero subgroup")
        q, p, K = module.q, module.p, module.K
        for t, F in enumerate(self.filt_rows):
            # g-stability and containment in the previous step
            sm = smith_pk(F, p, K) if F.shape[0] else None
            for row in F @ module.Ghat % q:
                if solve(F, row, p, K, sm=sm) is None:
                    raise ValueError(f"filtration step {t} is not g-stable")
            if t:
                prev = self.filt_rows[t - 1]
                sm_prev = smith_pk(prev, p, K) if prev.shape[0] else None
                for row in F:
                    if solve(prev, row, p, K, sm=sm_prev) is None:
                        raise ValueError(f"filtration step {t} not inside step {t-1}")

    @property
    def length(self) -> int:
        return len(self.filt_rows) - 1

    def j_indices(self) -> list[int]:
        """Filtration degrees carrying (possibly) nonzero graded pieces."""
        return [self.j0 + t for t in range(self.length)]


def multiplicative_filtered_gmodule(ring: TruncatedRing, m: int | None = None,
                                    j0: int = 1, action=None) -> FilteredGModule:
    """(1+m^{j0})/(1+m^N) with its unit filtration, N = nilpotency degree."""
    N = ring.nilpotency_degree
    mod = unit_group_module(ring, j0, N, action=action, m=m)
    filt = []
    for j in range(j0, N + 1):
        if j == N:
            filt.append(np.zeros((0, mod.r), np.int64))
            continue
        # 1 + t over an additive basis of m^j/m^N generates (1+m^j)/(1+m^N):
        # correcting leading graded terms one level at a time reaches any unit.
        rows = [mod.embed(mod.dlog[ring.one + ring.truncate(t, N)])
                for t in ring.ideal_additive_generators(j, N)]
        filt.append(as_matrix(rows, width=mod.r) % mod.q)
    return FilteredGModule(mod, filt, j0=j0,
                           meta={"ring": ring, "mode": "multiplicative"})


def additive_filtered_gmodule(ring: TruncatedRing, m: int | None = None,
                              j0: int = 1, action=None) -> FilteredGModule:
    """m^{j0}/m^N with the m-adic filtration, N = nilpotency degree."""
    N = ring.nilpotency_degree
    mod = additive_ideal_module(ring, j0, N, action=action, m=m)
    filt = []
    for j in range(j0, N + 1):
        if j == N:
            filt.append(np.zeros((0, mod.r), np.int64))
            continue
        rows = [mod.embed(mod.dlog[ring.truncate(t, N)])
                for t in ring.ideal_additive_generators(j, N)]
        filt.append(as_matrix(rows, width=mod.r) % mod.q)
    return FilteredGModule(mod, filt, j0=j0, meta={"ring": ring, "mode": "additive"})


def exp_translate(add_fgm: FilteredGModule, mult_fgm: FilteredGModule):
    """Map embedded additive vectors to embedded unit vectors via exp_p."""
    ring = add_fgm.meta["ring"]
    amod, mmod = add_fgm.module, mult_fgm.module

    def translate(vec):
        x = amod.decode(vec)
        u = trunc_exp(ring, x)
        return mmod.embed(mmod.carrier_coords(u))

    return translate


class PageEntry:
    __slots__ = ("i", "j", "sq", "type")

    def __init__(self, i, j, sq):
        self.i, self.j, self.sq, self.type = i, j, sq, sq.type

    def __repr__(self) -> str:
        return f"E[{self.i},{self.j}] = {self.type!r}"


class FilteredComplex:
    """A filtered cochain complex on explicit coordinates.

    ``orders[i]`` lists the coordinate orders of level i; ``D[i]`` is the
    differential level i -> i+1 on embedded coordinates (q = p^K ambient,
    coordinate of order o scaled by q/o); ``filt[i][t]`` generates
    F^{j0+t} of level i, descending to the zero subgroup.
    """

    def __init__(self, p, K, orders, D, filt, j0=1, decoders=None, validate=True):
        self.p, self.K, self.q = p, K, p**K
        self.orders = [list(map(int, o)) for o in orders]
        self.widths = [len(o) for o in self.orders]
        self.scales = [np.array([self.q // o for o in lvl], dtype=np.int64)
                       for lvl in self.orders]
        self.D = [as_matrix(d, width=self.widths[i + 1]) % self.q
                  for i, d in enumerate(D)]
        self.filt = [[as_matrix(F, width=self.widths[i]) % self.q for F in fl]
                     for i, fl in enumerate(filt)]
        self.j0 = j0
        self.decoders = decoders or [None] * len(self.orders)
        self.nsteps = len(self.filt[0]) - 1  # graded pieces per level
        if validate:
            self._validate()

    @property
    def levels(self) -> int:
        return len(self.orders)

    def full_rows(self, i: int) -> np.ndarray:
        s = self.scales[i]
        return np.diag(s) if len(s) else np.zeros((0, 0), np.int64)

    def j_indices(self) -> list[int]:
        return [self.j0 + t for t in range(self.nsteps)]

    def Fj(self, i: int, j: int) -> np.ndarray:
        t = min(max(j - self.j0, 0), self.nsteps)
        return self.filt[i][t]

    def cohomology(self, i: int) -> Subquotient:
        """H^i of the underlying complex (filtration ignored)."""
        q = self.q
        S = self.full_rows(i)
        ker = kernel(S @ self.D[i] % q, self.p, self.K)
        ker_rows = ker @ S % q if ker.shape[0] else np.zeros((0, self.widths[i]), np.int64)
        if i:
            im = self.full_rows(i - 1) @ self.D[i - 1] % q
        else:
            im = np.zeros((0, self.widths[i]), np.int64)
        return Subquotient(ker_rows, im, self.p, self.K)

    def _validate(self) -> None:
        p, K, q = self.p, self.K, self.q
        for i, fl in enumerate(self.filt):
            if len(fl) != self.nsteps + 1:
                raise ValueError("levels must share the filtration length")
            if fl[-1].shape[0] != 0:
                raise ValueError("filtration must end at the zero subgroup")
            for t in range(1, len(fl)):
                prev = fl[t - 1]
                sm = smith_pk(prev, p, K) if prev.shape[0] else None
                for row in fl[t]:
                    if prev.shape[0] == 0 or solve(prev, row, p, K, sm=sm) is None:
                        raise ValueError(f"level {i}: step {t} not inside step {t-1}")
        for i, d in enumerate(self.D):
            if i + 1 < len(self.D):
                comp = d @ self.D[i + 1] % q
                if (self.full_rows(i) @ comp % q).any():
                    raise ValueError(f"d of d != 0 at level {i}")
            for t, F in enumerate(self.filt[i]):
                if not F.shape[0]:
                    continue
                tgt = self.filt[i + 1][t]
                sm = smith_pk(tgt, p, K) if tgt.shape[0] else None
                for row in F @ d % q:
                    ok = (solve(tgt, row, p, K, sm=sm) is not None
                          if tgt.shape[0] else not row.any())
                    if not ok:
                        raise ValueError(f"differential breaks filtration at level {i}")


def periodic_filtered_complex(fgm: FilteredGModule, max_degree: int) -> FilteredComplex:
    """Cochain complex of the 2-periodic resolution, filtered by fgm."""
    M = fgm.module
    gm1 = (M.Ghat - np.eye(M.r, dtype=np.int64)) % M.q
    nlevels = max_degree + 3
    return FilteredComplex(
        M.p, M.K,
        orders=[M.orders] * nlevels,
        D=[gm1 if i % 2 == 0 else M.Nhat for i in range(nlevels - 1)],
        filt=[fgm.filt_rows] * nlevels,
        j0=fgm.j0,
        decoders=[M.decode] * nlevels,
        validate=False,  # periodic data is g-stable by construction of FilteredGModule
    )


class FiltrationSS:
    """All pages of the filtration spectral sequence of a FilteredComplex."""

    def __init__(self, cx: FilteredComplex, max_degree: int = 6, fgm=None):
        if max_degree > cx.levels - 3:
            raise ValueError("complex is too short for the requested degree range")
        self.cx = cx
        self.fgm = fgm
        self.p, self.K, self.q = cx.p, cx.K, cx.q
        self.j0 = cx.j0
        self.N = cx.nsteps  # E_N = E_infinity
        self.max_degree = max_degree
        self.max_page = max(self.N, 1)
        self._Z: dict = {}
        self.pages: dict[int, dict[tuple[int, int], PageEntry]] = {}
        self.diffs: dict[int, dict[tuple[int, int], tuple[tuple[int, int], list]]] = {}
        self._compute()
        self.euler = self._euler_check()
        self.transfers = (self._transfer_permanence()
                          if fgm is not None else None)

    # -- raw subgroup computations ---------------------------------------
    def _Zr(self, r: int, i: int, j: int) -> np.ndarray:
        """Generators of Z_r^{i,j} (embedded rows); zero group for i < 0.

        For j below the window F^j clamps to the bottom step, but the
        boundary condition keeps the true target F^{j+r}: conflating
        Z_r^{i,j<j0} with Z_r^{i,j0} would drop boundaries entering the
        bottom filtration row whenever d does not raise the filtration.
        """
        cx = self.cx
        if i < 0:
            return np.zeros((0, cx.widths[0]), np.int64)
        j = max(j, self.j0 - r)
        key = (r, i, j)
        if key in self._Z:
            return self._Z[key]
        Fj = cx.Fj(i, j)
        if r == 0 or Fj.shape[0] == 0:
            self._Z[key] = Fj
            return Fj
        target = cx.Fj(i + 1, j + r)
        mapped = Fj @ cx.D[i] % self.q
        c = preimage(mapped, target, self.p, self.K)
        Z = c @ Fj % self.q if c.shape[0] else np.zeros((0, cx.widths[i]), np.int64)
        self._Z[key] = Z
        return Z

    # -- pages --------------------------------------------------------------
    def _compute(self) -> None:
        cx = self.cx
        js = cx.j_indices()
        for r in range(1, self.max_page + 1):
            entries: dict[tuple[int, int], PageEntry] = {}
            for i in range(0, self.max_degree + 2):
                for j in js:
                    S = self._Zr(r, i, j)
                    parts = []
                    prev = self._Zr(r - 1, i - 1, j - r + 1)
                    if prev.shape[0] and i >= 1:
                        parts.append(prev @ cx.D[i - 1] % self.q)
                    up = self._Zr(r - 1, i, j + 1)
                    if up.shape[0]:
                        parts.append(up)
                    T = (
                        np.vstack(parts)
                        if parts
                        else np.zeros((0, cx.widths[i]), np.int64)
                    )
                    entries[(i, j)] = PageEntry(i, j, Subquotient(S, T, self.p, self.K))
            self.pages[r] = entries
            # differentials d_r: (i, j) -> (i+1, j+r)
            dr: dict[tuple[int, int], tuple[tuple[int, int], list]] = {}
            for (i, j), e in entries.items():
                if i > self.max_degree or not e.type.factors:
                    continue
                ti, tj = i + 1, j + r
                rows = []
                target = entries.get((ti, tj))
                for gen in e.sq.generators:
                    v = gen @ cx.D[i] % self.q
                    if target is None:
                        if v.any() and not self._in_zero_region(v, ti, tj):
                            raise AssertionError("differential leaves the window")
                        rows.append(tuple())
                    else:
                        rows.append(target.sq.decompose(v))
                if target is not None and any(any(c for c in row) for row in rows):
                    dr[(i, j)] = ((ti, tj), [list(row) for row in rows])
            self.diffs[r] = dr

    def _in_zero_region(self, v, i: int, j: int) -> bool:
        F = self.cx.Fj(i, j)
        return solve(F, v, self.p, self.K) is not None if F.shape[0] else not v.any()

    # -- checks ---------------------------------------------------------------
    def _direct_cohomology(self, i: int) -> Subquotient:
        return self.cx.cohomology(i)

    def _euler_check(self):
        out = []
        einf = self.pages[self.max_page]
        for i in range(0, self.max_degree + 1):
            prod = 1
            for j in self.cx.j_indices():
                prod *= einf[(i, j)].type.order
            h = self._direct_cohomology(i).type.order
            out.append({"degree": i, "einf_product": prod, "direct": h,
                        "ok": prod == h})
        if not all(row["ok"] for row in out):
            raise AssertionError(f"E_infinity does not match the abutment: {out}")
        if self.fgm is not None:
            # independent route: the 2-periodic closed formulas
            direct = cyclic_cohomology(self.fgm.module, range(0, self.max_degree + 1))
            for i, row in enumerate(out):
                if direct[i].type.order != row["direct"]:
                    raise AssertionError("periodic formulas disagree with the complex")
        return out

    def _transfer_permanence(self):
        """Norm-image classes in degree 0 never support differentials."""
        M = self.fgm.module
        rows = M.full_rows() @ M.Nhat % self.q
        checked, permanent = 0, True
        details = []
        for v in rows:
            if not v.any():
                continue
            # deepest filtration level containing v
            depth = None
            for j in reversed(self.cx.j_indices()):
                F = self.cx.Fj(0, j)
                if F.shape[0] and solve(F, v, self.p, self.K) is not None:
                    depth = j
                    break
            if depth is None:
                continue
            checked += 1
            for r in range(1, self.max_page + 1):
                entry = self.pages[r].get((0, depth))
                target = self.pages[r].get((1, depth + r))
                if entry is None:
                    continue
                try:
                    coords = entry.sq.decompose(v)
                except ValueError:
                    break  # class died earlier; nothing to check
                w = v @ self.cx.D[0] % self.q
                if target is not None:
                    tc = target.sq.decompose(w)
                    ok = not any(tc)
                else:
                    ok = self._in_zero_region(w, 1, depth + r)
                permanent = permanent and ok
                details.append({"j": depth, "page": r, "coords": list(map(int, coords)),
                                "d_vanishes": bool(ok)})
        return {"checked": checked, "all_permanent": permanent, "details": details}

    # -- serialization -----------------------------------------------------
    def page_json(self, r: int) -> dict:
        entries = []
        for (i, j), e in sorted(self.pages[r].items()):
            if i > self.max_degree:
                continue
            entries.append({
                "i": i,
                "j": j,
                "type": e.type.as_list(),
                "gens": [f"e{i}_{j}_{t}" for t in range(len(e.type.factors))],
            })
        diffs = []
        for (i, j), (tgt, mat) in sorted(self.diffs.get(r, {}).items()):
            diffs.append({"from": [i, j], "to": list(tgt), "matrix": mat})
        return {"page": r, "entries": entries, "differentials": diffs}

    def to_json(self) -> str:
        return json.dumps([self.page_json(r) for r in range(1, self.max_page + 1)],
                          sort_keys=True)


def filtration_ss(fgm: FilteredGModule, max_degree: int = 6) -> FiltrationSS:
    """All pages of the filtration SS, with abutment and transfer checks."""
    cx = periodic_filtered_complex(fgm, max_degree)
    return FiltrationSS(cx, max_degree=max_degree, fgm=fgm)


# ---------------------------------------------------------------------------
# comparison of additive and multiplicative spectral sequences


class ComparisonReport:
    def __init__(self, agree_through, first_divergence, identical, notes):
        self.agree_through = agree_through
        self.first_divergence = first_divergence
        self.identical = identical
        self.notes = notes

    def __repr__(self) -> str:
        if self.identical:
            return "ComparisonReport(identical)"
        r, loc, kind = self.first_divergence
        return (
            f"ComparisonReport(agree through page {self.agree_through}, "
            f"diverge at d_{r} on {loc}: {kind})"
        )


def compare_ss(ss_add: FiltrationSS, ss_mult: FiltrationSS,
               translate=None) -> ComparisonReport:
    """Compare the two SSs page by page through the exponential.

    The E_1 identification sends an additive class with representative x
    to the unit exp_p(x).  Pages descend while everything matches; the
    report records the first page and location where the types, the
    class correspondence, or the differentials disagree.
    """
    if translate is None:
        translate = exp_translate(ss_add.fgm, ss_mult.fgm)
    max_page = min(ss_add.max_page, ss_mult.max_page)
    notes = []
    for r in range(1, max_page + 1):
        for key in sorted(ss_add.pages[r]):
            i, j = key
            if i > min(ss_add.max_degree, ss_mult.max_degree):
                continue
            ea = ss_add.pages[r][key]
            em = ss_mult.pages[r].get(key)
            if em is None or ea.type != em.type:
                return ComparisonReport(r - 1, (r, key, "entry type mismatch"),
                                        False, notes)
            if not ea.type.factors:
                continue
            # class correspondence and differential comparison
            ta, tm = ss_add.diffs.get(r, {}).get(key), ss_mult.diffs.get(r, {}).get(key)
            for gi, gen in enumerate(ea.sq.generators):
                try:
                    w = translate(gen)
                    wc = em.sq.decompose(w)
                except ValueError:
                    return ComparisonReport(
                        r - 1, (r, key, "representative does not transfer"),
                        False, notes)
                # d_r on the translated class versus translate of d_r
                va = gen @ ss_add.cx.D[i] % ss_add.q
                vm = w @ ss_mult.cx.D[i] % ss_mult.q
                ti, tj = i + 1, j + r
                tgt_a = ss_add.pages[r].get((ti, tj))
                tgt_m = ss_mult.pages[r].get((ti, tj))
                if tgt_a is None or tgt_m is None:
                    continue
                da = tgt_a.sq.decompose(va)
                dm = tgt_m.sq.decompose(vm)
                # translate the additive value and compare inside the target
                if any(da):
                    lift = np.asarray(da, dtype=np.int64) @ tgt_a.sq.generators % ss_add.q
                    da_t = tgt_m.sq.decompose(translate(lift))
                else:
                    da_t = tuple(0 for _ in dm)
                if tuple(da_t) != tuple(dm):
                    kind = (
                        "multiplicative differential nonzero, additive zero"
                        if not any(da) and any(dm)
                        else "additive differential nonzero, multiplicative zero"
                        if any(da) and not any(dm)
                        else "differential values disagree"
                    )
                    notes.append({"page": r, "at": key, "gen": gi,
                                  "additive": list(map(int, da)),
                                  "multiplicative": list(map(int, dm))})
                    return ComparisonReport(r - 1, (r, key, kind), False, notes)
    return ComparisonReport(max_page, None, True, notes)
