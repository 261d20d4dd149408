import numpy as np
import pytest
from hypothesis import given, strategies as st

from phasegroup import (Category, GeneratorSet, NonFinite, Singular, Space, SpaceKind, Status,
                        ToleranceConfig, category_implies, is_abelian)
from phasegroup.core import commutator_residual

CATS = list(Category)


def test_holomorphic_implies_topological():
    assert category_implies(Category.HOLOMORPHIC, Category.TOPOLOGICAL)


def test_topological_does_not_imply_holomorphic():
    assert not category_implies(Category.TOPOLOGICAL, Category.HOLOMORPHIC)


def test_smooth_and_rholomorphic_coincide_on_complex_spaces():
    assert category_implies(Category.SMOOTH, Category.RHOLOMORPHIC, complex_space=True)
    assert category_implies(Category.RHOLOMORPHIC, Category.SMOOTH, complex_space=True)
    assert not category_implies(Category.SMOOTH, Category.RHOLOMORPHIC, complex_space=False)


@given(st.sampled_from(CATS), st.sampled_from(CATS), st.sampled_from(CATS), st.booleans())
def test_category_implication_is_transitive_and_reflexive(a, b, c, cplx):
    assert category_implies(a, a, cplx)
    if category_implies(a, b, cplx) and category_implies(b, c, cplx):
        assert category_implies(a, c, cplx)
    # everything implies topological
    assert category_implies(a, Category.TOPOLOGICAL, cplx)


def test_diagonal_family_is_abelian():
    g = GeneratorSet(Space.complex_linear(2), [np.diag([2, 3]), np.diag([5, 7])])
    assert is_abelian(g)


def test_shear_pair_is_not_abelian():
    g = GeneratorSet(Space.complex_linear(2), [[[1, 1], [0, 1]], [[1, 0], [1, 1]]])
    assert not is_abelian(g)


def test_single_generator_is_abelian():
    g = GeneratorSet(Space.real_linear(2), [[[1, 2], [3, 4]]])
    assert is_abelian(g)


def test_projective_commutation_up_to_scalar():
    a = np.diag([1.0, -1.0])
    b = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert commutator_residual(a, b, projective=True) < 1e-14
    assert commutator_residual(a, b, projective=False) > 0.1


def test_space_matrix_sizes():
    assert Space.complex_linear(3).matrix_size == 3
    assert Space.complex_projective(3).matrix_size == 4
    assert Space.real_mobius().matrix_size == 2
    assert Space("real_linear", 2).kind is SpaceKind.REAL_LINEAR
    with pytest.raises(ValueError):
        Space(SpaceKind.REAL_MOBIUS, 2)
    with pytest.raises(ValueError):
        Space.complex_linear(0)


def test_generator_set_validation():
    sp = Space.complex_linear(2)
    with pytest.raises(ValueError):
        GeneratorSet(sp, [np.eye(3)])
    with pytest.raises(NonFinite):
        GeneratorSet(sp, [np.array([[np.nan, 0], [0, 1]])])
    with pytest.raises(Singular):
        GeneratorSet(sp, [np.diag([1.0, 0.0])])
    with pytest.raises(ValueError):
        GeneratorSet(Space.real_linear(1), [1j])
    g = GeneratorSet(Space.real_linear(1), [2.0])
    assert g[0].shape == (1, 1) and not np.iscomplexobj(g[0])


def test_normalized_representatives_have_unit_determinant():
    g = GeneratorSet(Space.complex_projective(2), [np.diag([2.0, 3.0, 5.0j])])
    assert abs(np.linalg.det(g.normalized()[0]) - 1) < 1e-12
    m = GeneratorSet(Space.real_mobius(), [np.diag([-2.0, 3.0])])
    assert abs(abs(np.linalg.det(m.normalized()[0])) - 1) < 1e-12


def test_tolerance_overrides():
    tol = ToleranceConfig().with_overrides(["residual=1e-6", "S_max=8"])
    assert tol.residual == 1e-6 and tol.S_max == 8 and isinstance(tol.S_max, int)
    with pytest.raises(ValueError):
        ToleranceConfig().with_overrides(["bogus=1"])
    with pytest.raises(ValueError):
        ToleranceConfig(residual=0.0)


def test_seeded_rng_is_reproducible():
    tol = ToleranceConfig(seed=5)
    assert np.array_equal(tol.rng(3).normal(size=4), tol.rng(3).normal(size=4))


def test_exit_codes():
    assert [s.exit_code for s in Status] == [0, 1, 2]
