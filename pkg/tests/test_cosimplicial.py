"""Tests for cosimplicial modules, rings, and the p-th power operators."""

import math

import numpy as np
import pytest

from picss.cohomology import CyclicModule, cyclic_cohomology
from picss.cosimplicial import (
    CosimplicialModule,
    beta_p0,
    beta_p0_field,
    bockstein,
    classifying_cochains,
    dold_kan,
    levelwise_sym,
    mu_formal,
    phi,
    phi_field,
    sigma_formal,
    sym_differential,
    verify_first_unstable,
    _IntOps,
    _surjections,
)
from picss.fields import GF
from picss.pk import in_span, kernel
from picss.reps import monomial_basis, sym_dim
from picss.rings import CyclotomicTruncatedRing, MonomialTruncatedRing
from picss.trunclog import mu_p, sigma_p


def factors(sq):
    return list(sq.type.factors)


class TestDoldKan:
    def test_surjection_counts(self):
        for m in range(7):
            for k in range(m + 1):
                assert len(_surjections(m, k)) == math.comb(m, k)

    def test_surjections_are_monotone_surjective(self):
        for eta in _surjections(5, 3):
            assert set(eta) == set(range(4))
            assert all(b - a in (0, 1) for a, b in zip(eta, eta[1:]))

    def test_constant_model(self):
        C = dold_kan({0: [3]}, 3)
        assert C.widths == [1, 1, 1, 1]
        for mats in C.cofaces + C.codegens:
            for M in mats:
                assert (M == np.eye(1, dtype=np.int64)).all()
        assert factors(C.cohomology(0)) == [3]
        assert factors(C.cohomology(1)) == []
        assert factors(C.cohomology(2)) == []

    def test_degree_one_model(self):
        P = dold_kan({1: [3]}, 4)
        assert P.widths == [0, 1, 2, 3, 4]
        assert factors(P.cohomology(0)) == []
        assert factors(P.cohomology(1)) == [3]
        assert factors(P.cohomology(2)) == []
        assert factors(P.cohomology(3)) == []

    def test_degree_one_model_order_nine(self):
        P = dold_kan({1: [9]}, 3)
        assert P.widths == [0, 1, 2, 3]
        assert factors(P.cohomology(1)) == [9]

    def test_degree_one_model_rank_two(self):
        P = dold_kan({1: [3, 3]}, 4)
        assert P.widths == [0, 2, 4, 6, 8]
        assert factors(P.cohomology(1)) == [3, 3]
        assert factors(P.cohomology(2)) == []

    def test_mixed_degrees(self):
        P = dold_kan({0: [3], 2: [3]}, 4)
        assert P.widths == [1, 1, 2, 4, 7]
        assert factors(P.cohomology(0)) == [3]
        assert factors(P.cohomology(1)) == []
        assert factors(P.cohomology(2)) == [3]

    def test_degree_out_of_range(self):
        with pytest.raises(ValueError):
            dold_kan({3: [3]}, 2)

    def test_differential_vanishes_on_cocycle_generator(self):
        P = dold_kan({1: [3]}, 4)
        x = np.array([1], dtype=np.int64)
        assert not (x @ P.differential(1) % 3).any()


class TestModuleValidation:
    def test_perturbed_coface_rejected(self):
        P = dold_kan({1: [3]}, 3)
        cofaces = [[M.copy() for M in lvl] for lvl in P.cofaces]
        cofaces[1][1][0, 0] = (cofaces[1][1][0, 0] + 1) % 3
        with pytest.raises(ValueError):
            CosimplicialModule(3, P.orders, cofaces, P.codegens)

    def test_non_homomorphism_rejected(self):
        # Z/3 -> Z/9 sending the generator to an element of order 9
        with pytest.raises(ValueError, match="homomorphism"):
            CosimplicialModule(3, [[3], [9]],
                               [[[[1]], [[1]]]], [[[[1]]]])

    def test_structure_map_counts_enforced(self):
        with pytest.raises(ValueError):
            CosimplicialModule(3, [[3], [3]], [[[[1]]]], [[[[1]]]])


class TestClassifyingCochains:
    def test_single_level(self):
        ring = MonomialTruncatedRing(3, ("x",), 4)
        C = classifying_cochains(3, ring, 0)
        assert C.npoints == [1]
        assert C.module.widths == [3]

    def test_level_widths(self):
        ring = MonomialTruncatedRing(3, ("x",), 4)
        C = classifying_cochains(3, ring, 3)
        assert C.npoints == [1, 3, 9, 27]
        assert C.module.widths == [3, 9, 27, 81]
        assert sorted(C.add_orders) == [3, 3, 3]

    def test_level_bound(self):
        ring = MonomialTruncatedRing(3, ("x",), 4)
        with pytest.raises(ValueError, match="level bound exceeded"):
            classifying_cochains(3, ring, 6)
        ring5 = MonomialTruncatedRing(5, ("x",), 2)
        with pytest.raises(ValueError, match="level bound exceeded"):
            classifying_cochains(5, ring5, 5)

    def test_nilpotency_bound(self):
        with pytest.raises(ValueError, match="m\\^\\(p\\+1\\)"):
            classifying_cochains(3, MonomialTruncatedRing(3, ("x",), 5), 2)

    def test_h1_matches_cyclic_cohomology_trivial_action(self):
        ring = MonomialTruncatedRing(3, ("x",), 4)
        C = classifying_cochains(3, ring, 3)
        M = CyclicModule(3, 3, [3, 3, 3], np.eye(3, dtype=np.int64))
        expect = factors(cyclic_cohomology(M, [1])[0])
        assert factors(C.module.cohomology(1)) == expect == [3, 3, 3]

    def test_h1_matches_cyclic_cohomology_cyclotomic(self):
        ring = CyclotomicTruncatedRing(3, 4)
        C = classifying_cochains(3, ring, 3)
        M = CyclicModule(3, 3, list(C.add_orders), np.eye(2, dtype=np.int64))
        expect = factors(cyclic_cohomology(M, [1])[0])
        assert factors(C.module.cohomology(1)) == expect == [3, 3]

    def test_tautological_cochain_is_cocycle_with_nonzero_bockstein(self):
        ring = MonomialTruncatedRing(3, ("x",), 2)
        C = classifying_cochains(3, ring, 4)
        x = C.embed(1, C.encode(1, C.tautological_cochain()))
        assert not (x @ C.module.differential(1) % C.q_add).any()
        b = bockstein(C.module, 1, x)
        cls = C.module.cohomology(2).decompose(np.asarray(b) % 3)
        assert any(cls)

    def test_roundtrip_encoding(self):
        ring = CyclotomicTruncatedRing(3, 4)
        C = classifying_cochains(3, ring, 2)
        rng = np.random.default_rng(7)
        elems = list(ring.ideal_elements(1))
        f = [elems[k] for k in rng.integers(0, len(elems), size=C.npoints[2])]
        assert C.decode(2, C.encode(2, f)) == f
        row = C.embed(2, C.encode(2, f))
        assert (C.unembed(2, row) == C.encode(2, f)).all()

    def test_coboundary_matches_module_differential(self):
        ring = MonomialTruncatedRing(3, ("x",), 4)
        C = classifying_cochains(3, ring, 3)
        rng = np.random.default_rng(3)
        elems = list(ring.ideal_elements(1))
        f = [elems[k] for k in rng.integers(0, len(elems), size=C.npoints[1])]
        via_ring = C.encode(2, C.coboundary(1, f))
        via_module = C.unembed(
            2, C.embed(1, C.encode(1, f)) @ C.module.differential(1) % C.q_add)
        assert (via_ring % 3 == via_module % 3).all()


class TestLevelwiseSym:
    def test_constant_model_fixed(self):
        C = dold_kan({0: [3]}, 3)
        S = levelwise_sym(C, 3)
        assert S.widths == [1, 1, 1, 1]
        assert factors(S.cohomology(0)) == [3]

    def test_cube_dimensions(self):
        P = dold_kan({1: [3]}, 4)
        S = levelwise_sym(P, 3)
        assert S.widths == [0, 1, 4, 10, 20]
        assert [sym_dim(w, 3) for w in P.widths] == S.widths

    def test_cube_cohomology(self):
        P = dold_kan({1: [3]}, 4)
        S = levelwise_sym(P, 3)
        assert factors(S.cohomology(2)) == [3]

    def test_dimension_bound(self):
        P = dold_kan({1: [3] * 40}, 2)
        with pytest.raises(ValueError, match="dimension bound"):
            levelwise_sym(P, 3)

    def test_sym_differential_is_alternating_sum(self):
        P = dold_kan({1: [3]}, 4)
        S = levelwise_sym(P, 3)
        for m in range(1, 3):
            assert (sym_differential(P, m, 3) == S.differential(m)).all()


class TestFormalEngine:
    def evaluate(self, coords, values, ring, degree):
        basis = monomial_basis(len(values), degree)
        out = ring.zero
        for c, mono in zip(coords, basis):
            if not c % 3:
                continue
            term = ring.one
            for v, e in zip(values, mono):
                for _ in range(e):
                    term = term * v
            out = out + int(c) * term
        return out

    @pytest.mark.parametrize("k", [2, 3])
    def test_sigma_matches_ring_computation(self, k):
        ring = MonomialTruncatedRing(3, ("x", "y"), 4)
        gens = ring.ideal_additive_generators(1, 2)
        rng = np.random.default_rng(11 + k)
        for _ in range(20):
            xs = [rng.integers(0, 3, size=2) for _ in range(k)]
            values = [int(a) * gens[0] + int(b) * gens[1] for a, b in xs]
            coords = sigma_formal(_IntOps(3), xs, 3, 2)
            assert self.evaluate(coords, gens, ring, 3) == sigma_p(ring, values)

    @pytest.mark.parametrize("k", [2, 3])
    def test_mu_matches_ring_computation(self, k):
        ring = MonomialTruncatedRing(3, ("x", "y"), 4)
        gens = ring.ideal_additive_generators(1, 2)
        rng = np.random.default_rng(23 + k)
        for _ in range(20):
            ys = [rng.integers(0, 3, size=2) for _ in range(k)]
            values = [int(a) * gens[0] + int(b) * gens[1] for a, b in ys]
            coords = mu_formal(_IntOps(3), ys, 3, 2)
            assert self.evaluate(coords, gens, ring, 3) == mu_p(ring, values)

    def test_single_input_vanishes(self):
        assert not np.asarray(sigma_formal(_IntOps(3), [np.array([1, 2])], 3, 2)).any()


@pytest.fixture(scope="module")
def degree_one_model():
    return dold_kan({1: [3]}, 4)


@pytest.fixture(scope="module")
def cube_cohomology_two(degree_one_model):
    return levelwise_sym(degree_one_model, 3).cohomology(2)


class TestPhi:
    def test_zero_to_zero(self, degree_one_model):
        out = phi(degree_one_model, 1, np.zeros(1, dtype=np.int64))
        assert not np.asarray(out).any()

    def test_rejects_non_cocycle(self):
        ring = MonomialTruncatedRing(3, ("x",), 2)
        C = classifying_cochains(3, ring, 4)
        f = [ring.zero] * C.npoints[1]
        f[1] = ring.ideal_additive_generators(1)[0]
        x = C.embed(1, C.encode(1, f))
        assert (x @ C.module.differential(1) % 3).any()
        with pytest.raises(ValueError, match="x not a cocycle"):
            phi(C.module, 1, x)

    def test_nonzero_on_generator(self, degree_one_model, cube_cohomology_two):
        out = phi(degree_one_model, 1, np.array([1], dtype=np.int64))
        cls = cube_cohomology_two.decompose(np.asarray(out) % 3)
        assert any(cls)

    def test_frobenius_semilinearity_exhaustive(self, degree_one_model):
        F9 = GF(3, 2)
        base = phi_field(degree_one_model, 1, [F9.one], F9)
        for e in F9.elements():
            got = phi_field(degree_one_model, 1, [e], F9)
            assert got == [(e ** 3) * c for c in base]

    def test_class_depends_only_on_class(self):
        ring = MonomialTruncatedRing(3, ("x",), 2)
        C = classifying_cochains(3, ring, 4)
        P = C.module
        cocycles = kernel(P.differential(2), 3, 1)
        x = next(row % 3 for row in cocycles if row.any())
        out = np.asarray(phi(P, 2, x), dtype=np.int64)
        DS = sym_differential(P, 2, 3)
        rng = np.random.default_rng(5)
        for _ in range(3):
            b = rng.integers(0, 3, size=P.widths[1])
            x2 = (x + b @ P.differential(1)) % 3
            out2 = np.asarray(phi(P, 2, x2), dtype=np.int64)
            assert in_span(DS, (out2 - out) % 3, 3, 1)


class TestBetaP0:
    def test_zero_to_zero(self, degree_one_model):
        lift = dold_kan({1: [9]}, 4)
        out = beta_p0(degree_one_model, 1, np.zeros(1, dtype=np.int64), lift)
        assert not np.asarray(out).any()

    def test_nonzero_on_generator(self, degree_one_model, cube_cohomology_two):
        lift = dold_kan({1: [9]}, 4)
        out = beta_p0(degree_one_model, 1, np.array([1], dtype=np.int64), lift)
        cls = cube_cohomology_two.decompose(np.asarray(out) % 3)
        assert any(cls)

    def test_proportional_to_phi_on_generator(self, degree_one_model,
                                              cube_cohomology_two):
        x = np.array([1], dtype=np.int64)
        lift = dold_kan({1: [9]}, 4)
        a = cube_cohomology_two.decompose(
            np.asarray(beta_p0(degree_one_model, 1, x, lift)) % 3)
        b = cube_cohomology_two.decompose(
            np.asarray(phi(degree_one_model, 1, x)) % 3)
        assert any(a) and any(b)
        assert factors(cube_cohomology_two) == [3]

    def test_frobenius_semilinearity_exhaustive(self, degree_one_model):
        F9 = GF(3, 2)
        base = beta_p0_field(degree_one_model, 1, [F9.one], F9)
        for e in F9.elements():
            got = beta_p0_field(degree_one_model, 1, [e], F9)
            assert got == [(e ** 3) * c for c in base]

    def test_rejects_wrong_order_lift(self, degree_one_model):
        with pytest.raises(ValueError, match="lift does not reduce"):
            beta_p0(degree_one_model, 1, np.array([1], dtype=np.int64),
                    dold_kan({1: [3]}, 4))

    def test_rejects_wrong_shape_lift(self, degree_one_model):
        with pytest.raises(ValueError, match="lift does not reduce"):
            beta_p0(degree_one_model, 1, np.array([1], dtype=np.int64),
                    dold_kan({2: [9]}, 4))

    def test_dold_kan_bockstein_vanishes(self, degree_one_model):
        # the model lifts to Z/9 with zero differential, so the connecting
        # map of the coefficient sequence must vanish
        out = bockstein(degree_one_model, 1, np.array([1], dtype=np.int64))
        assert not np.asarray(out).any()


@pytest.fixture(scope="module")
def monomial_report():
    ring = MonomialTruncatedRing(3, ("x",), 4)
    return verify_first_unstable(classifying_cochains(3, ring, 5))


@pytest.fixture(scope="module")
def cyclotomic_report():
    ring = CyclotomicTruncatedRing(3, 4)
    return verify_first_unstable(classifying_cochains(3, ring, 5))


def classes_by_position(report):
    return {(c["degree"], c["filtration"]): c for c in report["classes"]}


class TestFirstUnstable:
    def test_short_filtration_is_stable(self):
        ring = MonomialTruncatedRing(3, ("x",), 2)
        rep = verify_first_unstable(classifying_cochains(3, ring, 5))
        assert rep["page"] == 1 and rep["nominal_page"] == 2
        assert rep["all_identities_exact"]
        for c in rep["classes"]:
            assert not c["d_additive_nonzero"]
            assert not c["d_multiplicative_nonzero"]
            assert not c["phi_values_nonzero"]

    def test_monomial_group_data(self, monomial_report):
        assert monomial_report["additive_orders"] == [3, 3, 3]
        assert monomial_report["unit_orders"] == [3, 9]
        assert monomial_report["page"] == 2

    def test_monomial_unit_tower_sees_the_differential(self, monomial_report):
        cls = classes_by_position(monomial_report)[(1, 1)]
        assert cls["order"] == 3
        assert not cls["d_additive_nonzero"]
        assert cls["d_multiplicative_nonzero"]
        assert cls["phi_class_nonzero"]

    def test_monomial_identities(self, monomial_report):
        assert monomial_report["all_identities_exact"]
        assert monomial_report["all_class_identities"]

    def test_cyclotomic_group_data(self, cyclotomic_report):
        assert cyclotomic_report["additive_orders"] == [3, 9]
        assert cyclotomic_report["unit_orders"] == [3, 3, 3]
        assert cyclotomic_report["page"] == 2

    def test_cyclotomic_additive_tower_sees_the_differential(
            self, cyclotomic_report):
        cls = classes_by_position(cyclotomic_report)[(1, 1)]
        assert cls["order"] == 3
        assert cls["d_additive_nonzero"]
        assert not cls["d_multiplicative_nonzero"]
        assert cls["phi_class_nonzero"]

    def test_cyclotomic_identities(self, cyclotomic_report):
        assert cyclotomic_report["all_identities_exact"]
        assert cyclotomic_report["all_class_identities"]

    def test_periodic_copy_matches(self, monomial_report, cyclotomic_report):
        mon = classes_by_position(monomial_report)
        cyc = classes_by_position(cyclotomic_report)
        for pos in ((1, 1), (3, 1)):
            assert (mon[pos]["d_additive_nonzero"],
                    mon[pos]["d_multiplicative_nonzero"]) == (False, True)
            assert (cyc[pos]["d_additive_nonzero"],
                    cyc[pos]["d_multiplicative_nonzero"]) == (True, False)

    def test_e2_pages_are_elementary(self, monomial_report, cyclotomic_report):
        for rep in (monomial_report, cyclotomic_report):
            assert rep["additive_entries"]["1,1"] == [3]
            assert rep["multiplicative_entries"]["1,1"] == [3]

    def test_report_is_json_serializable(self, monomial_report):
        import json
        json.dumps(monomial_report)

    def test_filtered_complexes_validate(self):
        ring = MonomialTruncatedRing(3, ("x",), 2)
        C = classifying_cochains(3, ring, 4)
        C.additive_complex()._validate()
        C.multiplicative_complex()._validate()

    def test_needs_enough_levels(self):
        ring = MonomialTruncatedRing(3, ("x",), 2)
        with pytest.raises(ValueError, match="levels"):
            verify_first_unstable(classifying_cochains(3, ring, 3))
