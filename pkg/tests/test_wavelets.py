import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from torwave import (CoefficientTree, ConfigurationError, DyadicCube,
                     ResolutionError, SampledFunction, analyze, build_basis,
                     default_coarse_level, hardy_norm, lp_norm, min_coarse_level,
                     sampled_wavelet, synthesize, validate_psi_atom,
                     wavelet_square_function)
from torwave.samples import derive_rng, random_psi_atom, random_tree

from oracles import literal_detail_coefficients

ALL_BASES = [("haar", 1), ("daubechies", 2), ("daubechies", 4),
             ("daubechies", 8), ("daubechies", 10)]


def test_haar_filters_are_forced():
    b = build_basis("haar", 1)
    s = 1.0 / math.sqrt(2.0)
    np.testing.assert_allclose(b.scaling_filter, [s, s], atol=1e-15)
    np.testing.assert_allclose(b.detail_filter, [s, -s], atol=1e-15)


def test_db2_filter_identities():
    b = build_basis("daubechies", 2)
    assert len(b.scaling_filter) == 4
    assert abs(b.scaling_filter.sum() - math.sqrt(2.0)) < 1e-12
    assert abs(np.dot(np.arange(4), b.detail_filter)) < 1e-10


@pytest.mark.parametrize("family,order", ALL_BASES)
def test_filter_invariants(family, order):
    b = build_basis(family, order)
    h, g = b.scaling_filter, b.detail_filter
    L = len(h)
    for shift in range(0, L, 2):
        target = 1.0 if shift == 0 else 0.0
        assert abs(np.dot(h[: L - shift], h[shift:]) - target) < 1e-12
    assert abs(h.sum() - math.sqrt(2.0)) < 1e-12
    assert abs(g.sum()) < 1e-12
    if order >= 2:
        assert abs(np.dot(np.arange(L), g)) < 1e-10
    assert b.support_factor >= 1.0


def test_bad_configurations():
    with pytest.raises(ConfigurationError, match="haar admits only order 1"):
        build_basis("haar", 3)
    with pytest.raises(ConfigurationError, match="order"):
        build_basis("daubechies", 11)
    with pytest.raises(ConfigurationError):
        build_basis("meyer", 1)


@pytest.mark.parametrize("family,order", ALL_BASES)
@pytest.mark.parametrize("dim,N", [(1, 256), (2, 64)])
def test_perfect_reconstruction(family, order, dim, N, rng):
    basis = build_basis(family, order)
    f = SampledFunction(rng.standard_normal((N,) * dim))
    tree = analyze(f, basis)
    g = synthesize(tree, basis)
    err = np.max(np.abs(g.values - f.values)) / np.max(np.abs(f.values))
    assert err <= 1e-10
    rel = abs(tree.energy() - (f.values ** 2).mean()) / (f.values ** 2).mean()
    assert rel <= 1e-10


def test_filter_longer_than_coarse_grid_is_rejected():
    basis = build_basis("daubechies", 8)  # 16 taps
    f = SampledFunction(np.random.default_rng(0).standard_normal(256))
    with pytest.raises(ResolutionError, match="filter length"):
        analyze(f, basis, coarse_level=2)
    assert min_coarse_level(basis) == 3
    analyze(f, basis, coarse_level=3)  # smallest admissible level works


def test_analyze_of_synthesized_wavelet_is_a_unit_coefficient(db4):
    cube = DyadicCube(1, 4, (7,))
    psi = SampledFunction(sampled_wavelet(db4, 8, cube, (1,)))
    tree = analyze(psi, db4, 2)
    assert abs(tree.detail(cube, (1,)) - 1.0) < 1e-10
    others = tree.energy() - tree.detail(cube, (1,)) ** 2
    assert others < 1e-20
    assert abs(lp_norm(psi, 2.0) - 1.0) < 1e-10
    assert abs(psi.integral()) < 1e-10  # sampled wavelets have mean zero


def test_analyze_zero(db4):
    tree = analyze(SampledFunction(np.zeros(128)), db4, 2)
    assert tree.energy() == 0.0


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), dim=st.sampled_from([1, 2]))
def test_round_trip_and_parseval_property(seed, dim):
    basis = build_basis("daubechies", 2)
    rng = derive_rng(seed)
    J = 7 if dim == 1 else 5
    tree = random_tree(rng, dim, 2, J)
    f = synthesize(tree, basis)
    back = analyze(f, basis, 2)
    assert abs(back.energy() - tree.energy()) <= 1e-10 * (1.0 + tree.energy())
    for j in tree.levels():
        for s in tree.details[j]:
            np.testing.assert_allclose(back.details[j][s], tree.details[j][s],
                                       atol=1e-10)
    np.testing.assert_allclose(back.scaling, tree.scaling, atol=1e-10)


def test_constant_scaling_tree_synthesizes_constant(haar):
    for dim in (1, 2):
        j0, J, c = 2, 6, 3.0
        tree = CoefficientTree.zeros(dim, j0, J)
        tree = tree.replace(scaling=np.full((1 << j0,) * dim,
                                            c * 2.0 ** (-j0 * dim / 2.0)))
        out = synthesize(tree, haar)
        np.testing.assert_allclose(out.values, c, atol=1e-12)


def test_orthonormality_random_pairs(db4, rng):
    J = 8
    seen = set()
    for _ in range(100):
        j = int(rng.integers(3, J))
        k = int(rng.integers(0, 1 << j))
        j2 = int(rng.integers(3, J))
        k2 = int(rng.integers(0, 1 << j2))
        w1 = sampled_wavelet(db4, J, DyadicCube(1, j, (k,)), (1,))
        w2 = sampled_wavelet(db4, J, DyadicCube(1, j2, (k2,)), (1,))
        ip = float((w1 * w2).mean())
        if (j, k) == (j2, k2):
            assert abs(ip - 1.0) < 1e-8
        else:
            assert abs(ip) < 1e-8
        seen.add(((j, k), (j2, k2)))
    assert len(seen) > 50


def test_square_function_single_coefficient():
    cube = DyadicCube(1, 4, (5,))
    tree = CoefficientTree.unit_detail(cube, (1,), 3, 8)
    w = wavelet_square_function(tree)
    inside = np.zeros(256, dtype=bool)
    inside[cube.grid_slices(256)] = True
    np.testing.assert_allclose(w.values[inside], cube.measure ** -0.5, atol=1e-12)
    assert np.all(w.values[~inside] == 0.0)
    assert abs(lp_norm(w, 1.0) - cube.measure ** 0.5) < 1e-12


def test_square_function_zero():
    tree = CoefficientTree.zeros(1, 2, 7)
    assert np.all(wavelet_square_function(tree).values == 0.0)


def test_square_function_vs_maximal_estimator_band(db4):
    # the two Hardy estimators stay within a resolution-stable fitted band;
    # atoms stay one dyadic step coarser than the dictionary's finest scale
    bands = []
    for N in (256, 512):
        J = int(N).bit_length() - 1
        ratios = []
        for i in range(12):
            tree, _ = random_psi_atom(derive_rng(99, N, i), 1, 2, J,
                                      level_high=J - 3)
            f = synthesize(tree, db4)
            ratios.append(hardy_norm(f, "H1_maximal")
                          / lp_norm(wavelet_square_function(tree), 1.0))
        bands.append((min(ratios), max(ratios)))
    for lo, hi in bands:
        assert 0.0 < lo <= hi < np.inf
    width = [hi / lo for lo, hi in bands]
    assert max(width) / min(width) < 2.0


def test_psi_atom_validation_cases(rng):
    R = DyadicCube(1, 4, (5,))
    tree = CoefficientTree.unit_detail(R, (1,), 3, 8) * (R.measure ** -0.5)
    assert validate_psi_atom(tree, R)

    outside = CoefficientTree.unit_detail(DyadicCube(1, 5, (1,)), (1,), 3, 8)
    check = validate_psi_atom(outside, R)
    assert not check
    assert any(c.key() == "5:1" for c in check.bad_cubes)

    atom, R2 = random_psi_atom(rng, 1, 2, 8)
    check = validate_psi_atom(atom, R2)
    assert check
    # independent summation of the coefficient budget
    total = sum(float(np.sum(a ** 2)) for layer in atom.details.values()
                for a in layer.values())
    assert math.sqrt(total) <= R2.measure ** -0.5 * (1.0 + 1e-10)


def test_square_function_of_atom_has_unit_l1_budget(rng):
    for i in range(20):
        atom, _ = random_psi_atom(derive_rng(5, i), 1, 2, 9)
        w = wavelet_square_function(atom)
        assert lp_norm(w, 1.0) <= 1.0 + 1e-8


def test_detail_coefficients_match_literal_inner_products(db2, rng):
    # cascade coefficients == grid inner products with synthesized wavelets
    f = rng.standard_normal(64)
    tree = analyze(SampledFunction(f), db2, 2)
    literal = literal_detail_coefficients(f, db2, 2)
    for j in literal:
        np.testing.assert_allclose(tree.details[j][(1,)], literal[j], atol=1e-12)


def test_default_coarse_level_respects_filters():
    assert default_coarse_level(build_basis("haar", 1)) == 2
    assert default_coarse_level(build_basis("daubechies", 4)) == 2
    assert default_coarse_level(build_basis("daubechies", 8)) == 3
    assert default_coarse_level(build_basis("daubechies", 10)) == 4
