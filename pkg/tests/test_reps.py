"""Symmetric powers of the reduced regular representation of C_p."""

import math

import numpy as np
import pytest

from picss import reps
from picss.abelian import AbelianGroupType
from picss.fields import GF
from picss.pk import rank_mod_p


# ---------------------------------------------------------------------------
# independent oracle: Sym^i(g) by literal polynomial substitution


def _poly_mul(f, h, modulus):
    out = {}
    for ma, ca in f.items():
        for mb, cb in h.items():
            m = tuple(a + b for a, b in zip(ma, mb))
            out[m] = (out.get(m, 0) + ca * cb) % modulus
    return {m: c for m, c in out.items() if c}


def sym_oracle(g, i, modulus):
    """Substitute x_a -> sum_b g[a,b] x_b into every degree-i monomial."""
    g = np.asarray(g, dtype=np.int64) % modulus
    d = g.shape[0]
    basis = reps.monomial_basis(d, i)
    index = {m: t for t, m in enumerate(basis)}
    unit = lambda b: tuple(int(c == b) for c in range(d))
    lin = [{unit(b): int(g[a, b]) for b in range(d) if g[a, b] % modulus}
           for a in range(d)]
    out = np.zeros((len(basis), len(basis)), dtype=np.int64)
    for t, m in enumerate(basis):
        acc = {(0,) * d: 1}
        for a, e in enumerate(m):
            for _ in range(e):
                acc = _poly_mul(acc, lin[a], modulus)
        for mono, c in acc.items():
            out[t, index[mono]] = c
    return out


# ---------------------------------------------------------------------------
# construction


def test_reduced_regular_rep_shape_and_type():
    for p in (3, 5):
        rho = reps.reduced_regular_rep(p)
        assert rho.dim == p - 1
        assert reps.jordan_type(rho) == [p - 1]
        # invariant subspace ker(g - 1) is a line
        sigma = (rho.g - np.eye(p - 1, dtype=np.int64)) % p
        assert p - 1 - rank_mod_p(sigma, p) == 1


def test_rep_validation_rejects_wrong_order():
    with pytest.raises(ValueError):
        reps.CpRep(3, [[2]])  # order 2, not 3
    with pytest.raises(ValueError):
        reps.CpRep(3, [[1, 0], [0, 2]])


def test_field_characteristic_must_match():
    with pytest.raises(ValueError):
        reps.CpRep(3, [[1]], field=GF(5))


# ---------------------------------------------------------------------------
# symmetric powers vs the substitution oracle


@pytest.mark.parametrize("p,imax", [(3, 6), (5, 4)])
def test_sym_power_matches_substitution_oracle(p, imax):
    g = reps.reduced_regular_rep(p).g
    for i in range(imax + 1):
        got = reps.sym_power_matrix(g, i, p)
        assert np.array_equal(got, sym_oracle(g, i, p))


def test_sym_power_oracle_three_variables():
    g = reps.regular_rep(3).g
    for i in range(4):
        assert np.array_equal(reps.sym_power_matrix(g, i, 3),
                              sym_oracle(g, i, 3))


def test_sym_power_mod_p_squared_lift():
    g = reps.reduced_regular_rep(3).g
    for i in range(5):
        lifted = reps.sym_power_matrix(g, i, 9)
        assert np.array_equal(lifted, sym_oracle(g, i, 9))
        assert np.array_equal(lifted % 3, reps.sym_power_matrix(g, i, 3))


def test_sym_tower_agrees_with_individual_powers():
    g = reps.reduced_regular_rep(5).g
    for i, mat in reps.sym_tower(g, 5, 5):
        assert np.array_equal(mat % 5, sym_oracle(g, i, 5))


def test_sym_dim_formula():
    for p in (3, 5):
        for i in range(13):
            dim = reps.sym_dim(p - 1, i)
            assert dim == math.comb(i + p - 2, p - 2)
            assert len(reps.monomial_basis(p - 1, i)) == dim


def test_sym_dimension_guard():
    with pytest.raises(ValueError):
        reps.sym_power_matrix(reps.reduced_regular_rep(5).g, 200, 5)


# ---------------------------------------------------------------------------
# Jordan types


def test_jordan_regular_rep_is_free():
    assert reps.jordan_type(reps.regular_rep(3)) == [3]
    assert reps.jordan_type(reps.regular_rep(5)) == [5]


def test_jordan_direct_sum_is_additive():
    rho = reps.reduced_regular_rep(3)
    assert reps.jordan_type(rho.direct_sum(rho)) == [2, 2]


def test_jordan_small_sym_powers_p3():
    rho = reps.reduced_regular_rep(3)
    assert reps.jordan_type(reps.sym_power(rho, 2)) == [3]
    assert reps.jordan_type(reps.sym_power(rho, 3)) == [1, 3]
    assert reps.jordan_type(reps.sym_power(rho, 4)) == [2, 3]


def test_jordan_requires_p_for_raw_matrix():
    with pytest.raises(ValueError):
        reps.jordan_type(np.eye(2, dtype=np.int64))


def test_jordan_type_value_semantics():
    jt = reps.JordanType([3, 2, 3])
    assert jt.blocks == (2, 3, 3)
    assert jt.total() == 8
    assert jt.count(3) == 2
    assert repr(jt) == "{2, 3, 3}"
    assert jt == [3, 3, 2]


# ---------------------------------------------------------------------------
# predicted decompositions


def test_af_expected_samples():
    assert reps.af_expected(0, 3) == [1]
    assert reps.af_expected(1, 5) == [4]
    assert reps.af_expected(6, 3) == [1, 3, 3]
    # dim Sym^7 over 2 variables is 8, not C(8,2); the free rank must
    # come from the honest dimension
    assert reps.af_expected(7, 3) == [2, 3, 3]


def test_af_exhaustive_p3():
    rows = reps.af_check(3, 9)
    assert len(rows) == 10
    assert all(r["ok"] for r in rows)


def test_af_p5_window():
    rows = reps.af_check(5, 12)
    assert all(r["ok"] for r in rows)


# ---------------------------------------------------------------------------
# norm invariants


def test_norm_invariant_k1_frozen_and_fixed():
    v = reps.norm_invariant(1, 3)
    # eps1*eps2*(-eps1-eps2) = -eps1^2 eps2 - eps1 eps2^2 on the basis
    # x^3, x^2 y, x y^2, y^3
    assert list(v) == [0, 2, 2, 0]
    S = reps.sym_power_matrix(reps.reduced_regular_rep(3).g, 3, 3)
    assert np.array_equal(v @ S % 3, v)


def test_norm_invariant_square_is_k2():
    d = 2
    v1 = reps.norm_invariant(1, 3)
    basis3 = reps.monomial_basis(d, 3)
    poly = {m: int(c) for m, c in zip(basis3, v1) if c}
    square = _poly_mul(poly, poly, 3)
    basis6 = reps.monomial_basis(d, 6)
    expect = np.array([square.get(m, 0) for m in basis6], dtype=np.int64)
    assert np.array_equal(reps.norm_invariant(2, 3), expect)


def test_norm_invariant_generates_trivial_summand():
    p = 3
    v = reps.norm_invariant(2, p)
    S = reps.sym_power_matrix(reps.reduced_regular_rep(p).g, 6, p)
    dim = S.shape[0]
    eye = np.eye(dim, dtype=np.int64)
    sigma = (S - eye) % p
    assert not (v @ S % p - v).any()  # invariant
    # Sym^6 = 1 + free + free: ker(g-1) is spanned by the norm image
    # plus one line, and the norm invariant is that line
    norm = eye.copy()
    power = eye.copy()
    for _ in range(p - 1):
        power = power @ S % p
        norm = (norm + power) % p
    r_norm = rank_mod_p(norm, p)
    assert r_norm == reps.jordan_type(S, p).count(p)
    assert dim - rank_mod_p(sigma, p) == r_norm + 1
    stacked = np.vstack([norm, v])
    assert rank_mod_p(stacked, p) == r_norm + 1  # v is not a transfer


# ---------------------------------------------------------------------------
# cohomology of symmetric powers


def _mt_dim(h, field):
    total = len(h.type.factors)
    assert total % field.n == 0
    return total // field.n


def test_rep_cohomology_sym_p_has_one_class_mod_transfers():
    F9 = GF(3, 2)
    rho = reps.reduced_regular_rep(3, field=F9)
    hs = reps.rep_cohomology(reps.sym_power(rho, 3), range(3), field=F9,
                             mod_transfers=True)
    for h in hs:
        assert h.type == AbelianGroupType([3, 3])


def test_rep_cohomology_sym_1():
    F9 = GF(3, 2)
    rho = reps.reduced_regular_rep(3, field=F9)
    hs = reps.rep_cohomology(rho, range(2), field=F9, mod_transfers=True)
    assert hs[0].type == AbelianGroupType([3, 3])
    assert hs[1].type == AbelianGroupType([3, 3])


def test_rep_cohomology_sym_2_is_free():
    F9 = GF(3, 2)
    rho = reps.reduced_regular_rep(3, field=F9)
    hs = reps.rep_cohomology(reps.sym_power(rho, 2), range(5), field=F9)
    assert hs[0].type == AbelianGroupType([3, 3])
    for h in hs[1:]:
        assert h.type == AbelianGroupType([])


def test_positive_degrees_vanish_iff_residue_not_0_or_1():
    p = 3
    rho = reps.reduced_regular_rep(p)
    for i in range(10):
        hs = reps.rep_cohomology(reps.sym_power(rho, i), range(1, 5))
        vanished = all(h.type == AbelianGroupType([]) for h in hs)
        assert vanished == (i % p not in (0, 1))


def test_block_counts_match_honest_cohomology():
    p = 3
    rho = reps.reduced_regular_rep(p)
    for i in range(8):
        rep = reps.sym_power(rho, i)
        jt = reps.jordan_type(rep)
        hs = reps.rep_cohomology(rep, range(3))
        assert len(hs[0].type.factors) == len(jt.blocks)
        assert len(hs[1].type.factors) == sum(1 for b in jt.blocks if b < p)
        assert len(hs[2].type.factors) == sum(1 for b in jt.blocks if b < p)


@pytest.mark.parametrize("p,jmax,smax,n", [(3, 9, 4, 2), (5, 6, 2, 1)])
def test_presentation_dims_match_honest_computation(p, jmax, smax, n):
    field = GF(p, n)
    rho = reps.reduced_regular_rep(p, field=field)
    for j, S in reps.sym_tower(rho.g, jmax, p):
        rep = reps.CpRep(p, S, field=field)
        hs = reps.rep_cohomology(rep, range(smax + 1), field=field,
                                 mod_transfers=True)
        for s, h in enumerate(hs):
            assert _mt_dim(h, field) == reps.presentation_dim(p, j, s), (j, s)
