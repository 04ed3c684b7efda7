"""Tests for the additive and Picard spectral-sequence runs."""

import dataclasses

import pytest

from picss.fields import GF
from picss.hfpss import (
    BoundsMismatchError,
    DifferentialAxiom,
    LeibnizError,
    MonomialClass,
    UnresolvedZeroStemError,
    Window,
    algebraic_picard,
    bidegree,
    build_e2,
    cyclic_primary_factors,
    ec_analysis,
    ec_monomial,
    monomial_name,
    normalize_group,
    periodicity_check,
    picard_order,
    picard_order_sweep,
    picardify,
    run_additive,
    semilinear_kernel,
    standard_axioms,
)

F9 = GF(3, 2)
G9 = F9.multiplicative_generator()


# ---------------------------------------------------------------------------
# grading and layout


def test_bidegree_of_named_generators():
    assert bidegree(3, "cp", MonomialClass(1, 0, 0)) == (1, 4)
    assert bidegree(3, "cp", MonomialClass(0, 1, 0)) == (2, 12)
    assert bidegree(3, "cp", MonomialClass(0, 0, 1)) == (0, 6)
    assert bidegree(3, "maximal", MonomialClass(0, 0, 1)) == (0, 24)
    assert bidegree(5, "cp", MonomialClass(1, 0, 0)) == (1, 8)
    assert bidegree(5, "cp", MonomialClass(0, 1, 0)) == (2, 40)
    assert bidegree(5, "cp", MonomialClass(0, 0, 1)) == (0, 10)


def test_monomial_name():
    assert monomial_name(MonomialClass(0, 0, 0)) == "1"
    assert monomial_name(MonomialClass(1, 2, -3)) == "alpha*beta^2*delta^-3"
    assert monomial_name(MonomialClass(0, 1, 1), "max") == "beta*Delta"


def test_normalize_group():
    assert normalize_group("cp") == "cp"
    assert normalize_group("max") == "maximal"
    assert normalize_group("MAXIMAL") == "maximal"
    with pytest.raises(ValueError):
        normalize_group("so3")


def test_build_e2_places_generators():
    page = build_e2(3, "cp")
    assert page.entry(1, 4) == MonomialClass(1, 0, 0)
    assert page.entry(2, 12) == MonomialClass(0, 1, 0)
    assert page.entry(0, 6) == MonomialClass(0, 0, 1)
    assert page.entry(0, 0) == MonomialClass(0, 0, 0)
    # odd-t spots never occur: t is always even
    assert all(t % 2 == 0 for (_, t) in page.entries)
    # each spot determines its monomial: a is the parity of s
    assert all(m.a == s % 2 for (s, _), m in page.entries.items())
    maxpage = build_e2(3, "max")
    assert maxpage.entry(0, 24) == MonomialClass(0, 0, 1)


def test_build_e2_transfer_markers_are_even_t():
    page = build_e2(3, "cp")
    assert all(t % 2 == 0 for t in page.transfers)
    assert 0 in page.transfers and 2 in page.transfers


def test_build_e2_rejects_unknown_group():
    with pytest.raises(ValueError):
        build_e2(3, "dihedral")


# ---------------------------------------------------------------------------
# the additive differentials


def test_standard_axioms_have_consistent_bidegrees():
    for p in (3, 5):
        for group in ("cp", "maximal"):
            first, second = standard_axioms(p, group)
            n = p - 1
            assert first.page == 2 * p - 1
            assert second.page == 2 * n * n + 1
            for ax in (first, second):
                s0, t0 = bidegree(p, group, ax.source)
                s1, t1 = bidegree(p, group, ax.target)
                assert (s1 - s0, t1 - t0) == (ax.page, ax.page - 1)


def test_first_round_on_delta_powers_p3():
    pages = run_additive(build_e2(3, "cp"))
    page5 = pages[1]
    assert page5.r == 5
    by_source = {rec.source: rec for rec in page5.differentials}
    # d(delta) hits alpha*beta^2*delta^-3 with unit coefficient
    rec = by_source[(0, 6)]
    assert rec.target_monomial == MonomialClass(1, 2, -3)
    assert rec.target == (5, 10)
    assert rec.coeff == 1
    # d(delta^2) fires with coefficient 2; d(delta^3) does not fire
    assert by_source[(0, 12)].coeff == 2
    assert (0, 18) not in by_source


def test_second_round_composite_differential_needs_wide_window():
    # alpha*delta^8 sits in stem 51, outside the default window.
    window = Window(12, -2, 52)
    pages = run_additive(build_e2(3, "cp", window))
    page9 = pages[2]
    assert page9.r == 9
    by_source = {rec.source: rec for rec in page9.differentials}
    rec = by_source[(1, 52)]
    assert rec.source_monomial == MonomialClass(1, 0, 8)
    assert rec.target_monomial == MonomialClass(0, 5, 0)
    assert rec.target == (10, 60)


def test_out_of_window_source_still_kills_visible_target():
    # beta^9*delta^-12 at (18, 36) is hit from (9, 28), stem 19, just
    # outside the default stem window.
    pages = run_additive(build_e2(3, "cp"))
    page9 = pages[2]
    incoming = [rec for rec in page9.differentials if not rec.source_in_window]
    assert any(
        rec.target == (18, 36) and rec.source_monomial == MonomialClass(1, 4, -4)
        for rec in incoming
    )
    assert (18, 36) not in pages[-1].entries


def _survives(p, m):
    n = p - 1
    if m.a == 0:
        return m.b <= n * n and m.d % p == 0
    return m.b <= p - 2 and (m.d + 1) % p != 0


@pytest.mark.parametrize("p,group", [(3, "cp"), (3, "maximal"), (5, "cp")])
def test_final_page_matches_survivor_formula(p, group):
    pages = run_additive(build_e2(p, group))
    start, final = pages[0], pages[-1]
    for pos, m in start.entries.items():
        assert (pos in final.entries) == _survives(p, m), (pos, m)


def test_final_page_cells_p3_cp_frozen():
    pages = run_additive(build_e2(3, "cp"))
    expected = {
        (0, 0): MonomialClass(0, 0, 0),
        (3, 4): MonomialClass(1, 1, -2),
        (4, 6): MonomialClass(0, 2, -3),
        (1, 4): MonomialClass(1, 0, 0),
        (8, 12): MonomialClass(0, 4, -6),
        (1, 10): MonomialClass(1, 0, 1),
        (2, 12): MonomialClass(0, 1, 0),
        (6, 18): MonomialClass(0, 3, -3),
        (3, 16): MonomialClass(1, 1, 0),
        (0, 18): MonomialClass(0, 0, 3),
    }
    assert pages[-1].entries == expected


def test_page_structure_and_transfer_preservation():
    pages = run_additive(build_e2(3, "cp"))
    assert [pg.r for pg in pages] == [2, 5, 9, 10]
    assert all(pg.transfers == pages[0].transfers for pg in pages)
    # pages between the acting ones are equal: the r=5 page still shows
    # everything from r=2 (differentials act when listed)
    assert pages[1].entries == pages[0].entries


def test_custom_axioms_reproduce_standard_run():
    default = run_additive(build_e2(3, "cp"))
    explicit = run_additive(build_e2(3, "cp"), standard_axioms(3, "cp"))
    assert [pg.entries for pg in default] == [pg.entries for pg in explicit]
    assert [pg.differentials for pg in default] == [pg.differentials for pg in explicit]


def test_bad_axiom_bidegree_raises():
    bad = DifferentialAxiom(5, "generator", MonomialClass(0, 0, 1), MonomialClass(1, 1, 0))
    good = standard_axioms(3, "cp")[1]
    with pytest.raises(LeibnizError):
        run_additive(build_e2(3, "cp"), (bad, good))


@pytest.mark.parametrize("p,group", [(3, "cp"), (3, "maximal"), (5, "cp"), (5, "maximal")])
def test_periodicity_check(p, group):
    pages = run_additive(build_e2(p, group))
    verdict = periodicity_check(pages, group)
    n = p - 1
    w = n * n if group == "maximal" else 1
    assert verdict["survives"] and verdict["translation_invariant"]
    assert verdict["period"] == 2 * p * p * w
    assert verdict["subpowers_die"] == list(range(1, p))


# ---------------------------------------------------------------------------
# semilinear kernels


def test_semilinear_kernel_orders_over_f9():
    orders = set()
    for xi in F9.nonzero_elements():
        for eta in F9.elements():
            orders.add(len(semilinear_kernel(F9, xi, eta)))
    assert orders == {1, 3}


def test_semilinear_kernel_rejects_zero_xi():
    with pytest.raises(ValueError):
        semilinear_kernel(F9, F9.zero, G9)


# ---------------------------------------------------------------------------
# the Picard grading


def _pic_pages_p3(xi=G9, xiprime=G9, zeta=1):
    pages = run_additive(build_e2(3, "cp"))
    return picardify(pages, xi=xi, xiprime=xiprime, zeta=zeta)


def test_picardify_final_cells_p3_frozen():
    result = _pic_pages_p3()
    final = result.pages[-1].cells
    # imports of the ten additive survivors (the origin class has no
    # Picard counterpart), the unit spot, the origin, and the kernel
    # and cokernel of the corrected diagonal differential
    expected_orders = {
        (0, 0): 2,
        (1, 1): 3,
        (5, 5): 3,
        (14, 13): 3,
        (3, 5): 9,
        (4, 7): 9,
        (1, 5): 9,
        (8, 13): 9,
        (1, 11): 9,
        (2, 13): 9,
        (6, 19): 9,
        (3, 17): 9,
        (0, 19): 9,
    }
    assert {pos: cell.order for pos, cell in final.items()} == expected_orders


def test_picardify_corrected_differential_p3():
    result = _pic_pages_p3()
    assert result.kernel_order == 3
    corrected = [
        arrow
        for page in result.pages
        for arrow in page.arrows
        if arrow.kernel_order is not None
    ]
    assert len(corrected) == 1
    arrow = corrected[0]
    assert arrow.page == 9
    assert arrow.source == (5, 5)
    assert arrow.target == (14, 13)
    assert arrow.kernel_order == 3
    assert result.unknowns == ()


def test_picardify_ledger_p3():
    result = _pic_pages_p3()
    assert result.ledger == [
        {"spot": (0, 0), "order": 2, "origin": "rank-zero invariants"},
        {"spot": (1, 1), "order": 3, "origin": "unit-group row"},
        {
            "spot": (5, 5),
            "bound": 3,
            "order_for_params": 3,
            "origin": "corrected diagonal differential (semilinear kernel)",
        },
    ]


def test_picardify_trivial_kernel_removes_diagonal_cell():
    result = _pic_pages_p3(xiprime=F9.zero)
    final = result.pages[-1].cells
    assert (5, 5) not in final
    assert (14, 13) not in final
    assert result.kernel_order == 1
    assert result.ledger[2]["order_for_params"] == 1
    assert result.ledger[2]["bound"] == 3


def test_picardify_parameter_validation():
    pages = run_additive(build_e2(3, "cp"))
    with pytest.raises(ValueError):
        picardify(pages, xi=F9.zero, xiprime=G9)
    with pytest.raises(ValueError):
        picardify(pages, xi=G9, xiprime=G9, zeta=3)


def test_picardify_maximal_p3():
    pages = run_additive(build_e2(3, "max"))
    result = picardify(pages)
    final = result.pages[-1].cells
    assert final[(1, 1)].order == 12
    assert final[(0, 0)].order == 2
    assert final[(5, 5)].order == 3  # bounded diagonal spot, prime coefficients
    assert final[(1, 5)].order == 3  # image of the exterior generator
    assert result.ledger == [
        {"spot": (0, 0), "order": 2, "origin": "rank-zero invariants"},
        {"spot": (1, 1), "order": 12, "origin": "unit-group row"},
        {"spot": (5, 5), "bound": 3, "origin": "prime-field coefficient bound"},
    ]
    assert all(unk.kernel_order == 3 for unk in result.unknowns
               if unk.source == (5, 5))


def test_picardify_p5_has_only_offdiagonal_unknowns():
    F625 = GF(5, 4)
    g = F625.multiplicative_generator()
    pages = run_additive(build_e2(5, "cp"))
    result = picardify(pages, xi=g, xiprime=g)
    assert result.unknowns  # genuinely undetermined imports exist here
    for unk in result.unknowns:
        assert unk.source[0] != unk.source[1]
        assert unk.target[0] != unk.target[1]
    assert result.kernel_order in (1, 5)


def test_picardify_loud_failure_when_diagonal_has_no_fate():
    pages = run_additive(build_e2(3, "cp"))
    # Drop the first-round differential records: the diagonal class at
    # (11, 11) then has no recorded fate and the run must fail loudly.
    doctored = list(pages)
    doctored[1] = dataclasses.replace(pages[1], differentials=())
    with pytest.raises(UnresolvedZeroStemError):
        picardify(doctored, xi=G9, xiprime=G9)


# ---------------------------------------------------------------------------
# diagonal classes e_c


def test_ec_monomial_degrees():
    for p in (3, 5):
        for c in range(1, 9):
            m = ec_monomial(p, c)
            assert bidegree(p, "cp", m) == (2 * p * c - 1, 2 * p * c - 2)
    assert ec_monomial(3, 1, "max") == MonomialClass(1, 2, -1)
    with pytest.raises(ValueError):
        ec_monomial(3, 2, "max")


def test_ec_analysis_p3():
    rows = ec_analysis(3, 8)
    assert [row["c"] for row in rows] == list(range(1, 9))
    by_c = {row["c"]: row for row in rows}
    assert by_c[1]["fate"] == "bounded"
    assert by_c[1]["bound"] == 3
    sweep = by_c[1]["kernel_sweep"]
    assert sweep["pairs"] == 8 * 9
    assert sweep["orders_seen"] == [1, 3]
    assert sweep["max_order"] == 3
    # c = 2: killed by the first-round arrow from the additive diagonal
    assert by_c[2]["fate"] == "killed"
    assert by_c[2]["rule"].startswith("general-range")
    assert by_c[2]["by"]["source_monomial"] == "beta^3*delta^-5"
    assert by_c[2]["by"]["source"] == (6, 7)
    # c = 4 = 1 mod 3: supports the second-round differential itself
    assert by_c[4]["fate"] == "killed"
    assert by_c[4]["by"]["page"] == 9
    assert by_c[4]["by"]["target_monomial"] == "beta^16*delta^-27"
    for c in range(2, 9):
        assert by_c[c]["fate"] == "killed"
    with pytest.raises(ValueError):
        ec_analysis(3, 1)


def test_ec_analysis_p5():
    rows = ec_analysis(5, 12)
    by_c = {row["c"]: row for row in rows}
    assert by_c[1]["fate"] == "bounded"
    sweep = by_c[1]["kernel_sweep"]
    assert sweep["pairs"] == 624 * 625
    assert sweep["orders_seen"] == [1, 5]
    assert sweep["cross_checked"] >= 100
    for c in range(2, 13):
        assert by_c[c]["fate"] == "killed"
        if c % 5 == 1:
            assert by_c[c]["by"]["page"] == 33
        else:
            assert by_c[c]["by"]["page"] == 9


# ---------------------------------------------------------------------------
# the unit-group pipeline


def test_algebraic_picard_p3():
    result = algebraic_picard(3, G9, G9)
    assert result.type == [3]
    assert result.kernel_order == 3
    assert result.consistent
    for (i, j), factors in result.grid.items():
        if j % 3 in (0, 1):
            assert factors == [3, 3], (i, j)
        else:
            assert factors == [], (i, j)
    assert result.fates[(1, 1)].startswith("twisted differential")
    assert result.fates[(1, 3)] == "killed by the first differential"
    assert result.fates[(1, 4)] == "killed by the imported (p-1)-st differential"
    assert result.fates[(1, 2)] == "zero"
    assert result.fates[(0, 0)] == "permanent cycle"
    assert result.certificate["lower_bound"] == 3


def test_algebraic_picard_all_pairs_p3():
    # the certified answer is parameter independent; the kernel varies
    kernels = {}
    for xi in F9.nonzero_elements():
        for xp in F9.elements():
            r = algebraic_picard(3, xi, xp)
            assert r.type == [3]
            kernels[(xi, xp)] = r.kernel_order
    assert set(kernels.values()) == {1, 3}
    # xiprime = 0 forces a trivial kernel (flagged, not fatal)
    assert all(k == 1 for (xi, xp), k in kernels.items() if not xp)


def test_algebraic_picard_validation():
    with pytest.raises(ValueError):
        algebraic_picard(3, F9.zero, G9)
    with pytest.raises(ValueError):
        algebraic_picard(3, GF(3, 1).one, GF(3, 1).one)


# ---------------------------------------------------------------------------
# order assembly


def test_picard_order_cp():
    r3 = picard_order(3, "cp")
    assert (r3.order, r3.cyclic) == (18, True)
    assert r3.upper_bound == r3.lower_bound == 18
    assert [e.get("order", e.get("bound")) for e in r3.ledger] == [2, 3, 3]
    r5 = picard_order(5, "cp")
    assert (r5.order, r5.cyclic) == (50, True)


def test_picard_order_maximal():
    r = picard_order(3, "max")
    assert (r.order, r.cyclic) == (72, True)
    assert [e.get("order", e.get("bound")) for e in r.ledger] == [2, 12, 3]
    r5 = picard_order(5, "max")
    assert (r5.order, r5.cyclic) == (800, True)


def test_picard_order_rejects_other_primes():
    with pytest.raises(ValueError):
        picard_order(7, "cp")


def test_picard_order_sweep_p3_exhaustive():
    report = picard_order_sweep(3)
    assert report["exhaustive"] is True
    assert report["runs"] == 8 * 9 * 2
    assert report["order"] == 18
    assert report["cyclic"] is True
    assert report["kernel_orders_seen"] == [1, 3]


def test_picard_order_sweep_p5_sampled_deterministic():
    a = picard_order_sweep(5, min_samples=60, seed=11)
    b = picard_order_sweep(5, min_samples=60, seed=11)
    assert a == b
    assert a["runs"] == 60
    assert a["order"] == 50
    assert a["exhaustive"] is False
    assert set(a["kernel_orders_seen"]) <= {1, 5}


def test_cyclic_primary_factors():
    assert cyclic_primary_factors(12) == [4, 3]
    assert cyclic_primary_factors(80) == [16, 5]
    assert cyclic_primary_factors(1) == []
    assert cyclic_primary_factors(18) == [9, 2]
