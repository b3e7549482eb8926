from fractions import Fraction
from itertools import combinations

import mpmath
import pytest
from hypothesis import given, strategies as st

from abelbound.bounds import (ZETA2_LOW, HypothesisViolation, acts_abelianly, compute_J, gl_bound,
                              intermediate_bound, lower_target, sp_bound, verify_instance)
from abelbound.groups import AmbientGroup, GroupHandle, enumerate_ambient
from abelbound.matmod import MatrixMod
from abelbound.modring import StructuralError
from abelbound.search import enumerate_invariant_submodules, enumerate_subgroups
from abelbound.submodules import Submodule
from conftest import mat


def zeta2(dps=60):
    with mpmath.workdps(dps):
        return mpmath.pi**2 / 6


def true_rhs(index, twice_exp_i, zeta_exp, dps=80):
    with mpmath.workdps(dps):
        return mpmath.mpf(index) ** (mpmath.mpf(twice_exp_i) / 2) * zeta2(dps) ** zeta_exp


def gl22(shear_up, shear_down):
    return GroupHandle(AmbientGroup.gl(2, 2), (shear_up(2), shear_down(2)))


def test_zeta2_rounded_down():
    with mpmath.workdps(80):
        exact = zeta2(80)
        assert mpmath.mpf(ZETA2_LOW.numerator) / ZETA2_LOW.denominator < exact
        assert exact - mpmath.mpf(ZETA2_LOW.numerator) / ZETA2_LOW.denominator < mpmath.mpf(10) ** -25


def test_acts_abelianly_examples(shear_up, shear_down):
    trivial = GroupHandle(AmbientGroup.gl(2, 2), ())
    assert acts_abelianly(trivial, Submodule(2, 2, ((1, 1),)))
    assert not acts_abelianly(gl22(shear_up, shear_down), Submodule.full(2, 2))
    assert acts_abelianly(gl22(shear_up, shear_down), Submodule.zero(2, 2))


def test_acts_abelianly_requires_invariance(shear_up):
    g = GroupHandle(AmbientGroup.gl(2, 4), (shear_up(4),))
    with pytest.raises(HypothesisViolation, match=r"\[\[1, 1\], \[0, 1\]\]"):
        acts_abelianly(g, Submodule(4, 2, ((0, 1),)))


def test_compute_J_examples(shear_up, shear_down):
    upper = GroupHandle(AmbientGroup.gl(2, 4), (shear_up(4), mat([[3, 0], [0, 1]], 4), mat([[1, 0], [0, 3]], 4)))
    assert all(x[1, 0] == 0 for x in upper.ensure_elements())
    assert compute_J(upper, 2, 1) == 2
    low = GroupHandle(AmbientGroup.gl(2, 4), (mat([[1, 0], [2, 1]], 4),))
    assert compute_J(low) == 1
    assert compute_J(gl22(shear_up, shear_down)) == 0
    with pytest.raises(StructuralError):
        compute_J(low, 3, 1)


def test_gl_bound_examples():
    assert abs(float(gl_bound(1, 2)) - 2.705808) < 1e-6
    assert abs(float(gl_bound(2, 2)) - 10.823232) < 1e-6
    assert 1 <= gl_bound(1, 2)


def test_sp_bound_examples():
    # zeta(2)^4 = 7.3213973889..., evaluated at 60 digits
    assert abs(float(sp_bound(1, 1)) - 7.321397) < 1e-6
    assert abs(float(sp_bound(2, 1)) - 117.142358) < 1e-6
    assert 1 <= sp_bound(1, 1)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
@pytest.mark.parametrize("idx", [1, 2, 3, 7, 24, 96, 10**6 + 3])
def test_gl_bound_rounding_safety(m, idx):
    low = gl_bound(idx, m)
    with mpmath.workdps(80):
        exact = true_rhs(idx, m + 2, (m - 1) * (m + 2) // 2)
        approx = mpmath.mpf(low.numerator) / low.denominator
        assert approx <= exact
        assert (exact - approx) / exact < mpmath.mpf(10) ** -6


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("idx", [1, 2, 5, 720])
def test_sp_bound_rounding_safety(m, idx):
    low = sp_bound(idx, m)
    with mpmath.workdps(80):
        exact = true_rhs(idx, 2 * (2 + 2 * m), 2 + 2 * m)
        approx = mpmath.mpf(low.numerator) / low.denominator
        assert approx <= exact
        assert (exact - approx) / exact < mpmath.mpf(10) ** -6


@given(st.integers(1, 10**4), st.integers(2, 5))
def test_gl_bound_strictly_increasing(idx, m):
    assert gl_bound(idx, m) < gl_bound(idx + 1, m)


@given(st.integers(1, 10**4), st.integers(1, 3))
def test_sp_bound_strictly_increasing(idx, m):
    assert sp_bound(idx, m) < sp_bound(idx + 1, m)


def test_lower_target():
    assert [lower_target(m) for m in (2, 3, 4)] == [Fraction(4, 3), Fraction(5, 4), Fraction(6, 5)]


def test_intermediate_bound_examples():
    assert intermediate_bound("GL", 2, 2, 1, 0, 1) == Fraction(3, 8)
    assert intermediate_bound("Sp", 1, 2, 1, 0, 1) == Fraction(3, 4)
    # i + J = e leaves only the product of (1 - l^-k) factors
    assert intermediate_bound("GL", 3, 3, 2, 1, 1) == Fraction(2, 3) * Fraction(8, 9) * Fraction(26, 27)


def test_verify_identity_gl22():
    rep = verify_instance(GroupHandle(AmbientGroup.gl(2, 2), ()), Submodule.full(2, 2))
    assert (rep.w_order, rep.index, rep.i, rep.J) == (4, 6, 0, 1)
    assert rep.intermediate_bound == Fraction(3, 8) and rep.verdict_intermediate
    assert abs(float(rep.main_bound) - 36 * float(zeta2()) ** 2) < 1e-9
    assert rep.verdict_main and rep.ok


def test_verify_identity_sp2():
    rep = verify_instance(GroupHandle(AmbientGroup.sp(1, 2), ()), Submodule.full(2, 2))
    assert (rep.i, rep.J, rep.index) == (0, 1, 6)
    assert rep.intermediate_bound == Fraction(3, 4) and rep.verdict_intermediate


def test_verify_scalar_congruence_group():
    amb = AmbientGroup.gl(2, 4)
    members = [x for x in enumerate_ambient(amb) if all((a - b) % 2 == 0 for a, b in
                                                        zip(x.entries, MatrixMod.identity(2, 4).entries))]
    assert len(members) == 16
    w = Submodule(4, 2, ((2, 0), (0, 2)))
    # brute-force abelianness over all element pairs
    for a, b in combinations(members, 2):
        comm = a @ b - b @ a
        assert all(not any(comm.apply(g)) for g in w.generators)
    gamma = GroupHandle(amb, tuple(members))
    rep = verify_instance(gamma, w)
    assert (rep.gamma_order, rep.index, rep.w_order) == (16, 6, 4)
    assert rep.verdict_main and rep.diagnosis is None


def test_verify_nonabelian_is_a_diagnosis(shear_up, shear_down):
    sp2 = GroupHandle(AmbientGroup.sp(1, 2), (shear_up(2), shear_down(2)))
    rep = verify_instance(sp2, Submodule.full(2, 2))
    assert rep.diagnosis and rep.verdict_main is None and rep.main_bound is None
    rep = verify_instance(GroupHandle(AmbientGroup.gl(2, 4), (shear_up(4),)), Submodule(4, 2, ((0, 1),)))
    assert "not invariant" in rep.diagnosis


def test_verify_composite():
    amb = AmbientGroup.gl(2, 6)
    gamma = GroupHandle(amb, (mat([[1, 3], [0, 1]], 6), mat([[5, 0], [0, 5]], 6)))
    w = Submodule(6, 2, ((2, 0), (3, 0), (0, 0)))
    rep = verify_instance(gamma, w)
    assert [p.n for p in rep.parts] == [2, 3]
    assert rep.w_order == rep.parts[0].w_order * rep.parts[1].w_order
    assert rep.index * rep.gamma_order == amb.order
    assert rep.verdict_main == all(p.verdict_main for p in rep.parts) == True


@pytest.mark.parametrize("ambient", [AmbientGroup.gl(2, 2), AmbientGroup.gl(2, 4), AmbientGroup.sp(1, 3)], ids=str)
def test_generator_abelianness_matches_elementwise(ambient):
    for gamma in enumerate_subgroups(ambient):
        elems = gamma.ensure_elements()
        for w in enumerate_invariant_submodules(gamma):
            full = all(all(not any((a @ b - b @ a).apply(g)) for g in w.generators)
                       for a, b in combinations(elems, 2))
            assert acts_abelianly(gamma, w) == full


def test_report_json_shape():
    rep = verify_instance(GroupHandle(AmbientGroup.gl(2, 2), ()), Submodule.full(2, 2))
    obj = rep.to_json()
    assert obj["verdicts"] == {"main": True, "intermediate": True}
    assert obj["main_bound"]["p"] * 1.0 / obj["main_bound"]["q"] == pytest.approx(obj["main_bound"]["approx"])
    assert obj["shape"] == {"i": 0, "j": [0]}
    assert len(rep.csv_row()) == len(rep.CSV_COLUMNS)
