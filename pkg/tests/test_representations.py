import numpy as np
import pytest

from gpdt.algebra import (AlgebraElement, KernelFunction, i_norm, psi, schoenberg_transform)
from gpdt.groupoid import build_pair, build_transformation, disjoint_union, groupoid_from_group
from gpdt.groups import cyclic_group
from gpdt.kazhdan import canonical_family
from gpdt.representations import (ArrowRepresentation, InvariantMeasure, MeasureError,
                                  NotGeneratingError, constant_subspace_by_definition,
                                  constant_vectors, direct_sum, expectation_from_regular, gns_rep,
                                  induced_measure, invariance_violation, invariant_measures,
                                  reduced_norm, regular_rep, regular_reps,
                                  star_homomorphism_defect, subspace_distance, trivial_rep)
from gpdt.spectral import operator_norm


def kernels(G):
    # F = 1 - [unit] is of negative type on every groupoid: F(a^-1 b) = [a != b]
    F = KernelFunction(G, np.where(G.is_unit, 0.0, 1.0))
    return {"one": KernelFunction.constant(G, 1.0),
            "units": KernelFunction.unit_indicator(G),
            "schoenberg": schoenberg_transform(F, 0.7)}


def all_reps(G):
    reps = list(regular_reps(G))
    reps += [trivial_rep(G, m) for m in invariant_measures(G)]
    reps.append(trivial_rep(G))
    for phi in kernels(G).values():
        reps.append(gns_rep(G, phi))
    return reps


def d(G, lab):
    return AlgebraElement.delta(G, G.index(lab))


def test_regular_pair_matrix_unit():
    P2 = build_pair(2)
    rep = regular_rep(P2, P2.index((0, 0)))
    M = rep.realize(d(P2, (1, 0)))
    i, j = rep.position(P2.index((1, 0))), rep.position(P2.index((0, 0)))
    E = np.zeros((2, 2))
    E[i, j] = 1
    assert np.array_equal(M, E)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_regular_cyclic_shift(n):
    G = groupoid_from_group(cyclic_group(n))
    M = regular_rep(G, 0).realize(d(G, "1"))
    assert np.array_equal(M, np.roll(np.eye(n), 1, axis=0))


def test_star_homomorphism_all_kinds(groupoid):
    for rep in all_reps(groupoid):
        defects = star_homomorphism_defect(rep, np.random.default_rng(1), trials=5)
        assert max(defects.values()) <= 1e-12, (rep.kind, defects)


def test_i_norm_bound_all_kinds(groupoid):
    rng = np.random.default_rng(2)
    for rep in all_reps(groupoid):
        for _ in range(10):
            f = AlgebraElement.random(groupoid, rng)
            assert operator_norm(rep.realize(f)) <= i_norm(f) + 1e-9


def test_trivial_pair_coupling():
    P2 = build_pair(2)
    M = trivial_rep(P2).realize(d(P2, (0, 1)))
    assert np.count_nonzero(np.abs(M) > 1e-15) == 1
    assert M[0, 1] != 0


def test_trivial_constants_invariant(groupoid, rng):
    rep = trivial_rep(groupoid)
    one = np.ones(rep.dim)
    for _ in range(10):
        f = AlgebraElement.random(groupoid, rng)
        assert np.allclose(rep.realize(f) @ one, rep.realize(psi(f)) @ one, atol=1e-12)


def test_gns_examples():
    Z2 = groupoid_from_group(cyclic_group(2))
    one = gns_rep(Z2, KernelFunction.constant(Z2, 1.0))
    assert np.allclose(one.gram, np.ones((2, 2)))
    assert one.dim == 1
    f = AlgebraElement.random(Z2, np.random.default_rng(3))
    assert np.allclose(one.realize(f), trivial_rep(Z2).realize(f), atol=1e-12)
    reg = gns_rep(Z2, KernelFunction.unit_indicator(Z2))
    assert np.allclose(reg.gram, np.eye(2))
    assert np.allclose(reg.realize(f), regular_rep(Z2, 0).realize(f), atol=1e-12)


def test_gns_rejects_non_positive():
    Z2 = groupoid_from_group(cyclic_group(2))
    with pytest.raises(ValueError, match="positive"):
        gns_rep(Z2, KernelFunction(Z2, np.array([1.0, 2.0])))


def test_measures_examples(zoo):
    assert np.allclose(invariant_measures(build_pair(4))[0].weights, 0.25)
    ms = invariant_measures(zoo["P2+P3"])
    assert len(ms) == 2
    assert np.allclose(ms[0].weights, [0.5, 0.5, 0, 0, 0])
    assert np.allclose(ms[1].weights, [0, 0, 1 / 3, 1 / 3, 1 / 3])
    z2 = groupoid_from_group(cyclic_group(2))
    swap = build_transformation(z2, 2, np.array([[0, 1], [1, 0]]))
    (m,) = invariant_measures(swap)
    assert np.allclose(m.weights, 0.5)


def test_measure_validation():
    P2 = build_pair(2)
    with pytest.raises(MeasureError):
        InvariantMeasure(P2, np.array([0.7, 0.7]))
    with pytest.raises(MeasureError):
        InvariantMeasure(P2, np.array([1.5, -0.5]))
    assert invariance_violation(P2, [0.9, 0.1]) is not None
    with pytest.raises(MeasureError):
        gns_rep(P2, KernelFunction.constant(P2, 1.0), InvariantMeasure(P2, np.array([0.9, 0.1])))


def test_extreme_count_is_orbit_count(groupoid):
    from gpdt.groupoid import orbits
    ms = invariant_measures(groupoid)
    assert len(ms) == len(orbits(groupoid))
    assert all(m.is_invariant(1e-12) for m in ms)


def test_constant_vector_examples(zoo):
    P2 = build_pair(2)
    fam = canonical_family(P2).members
    C = constant_vectors(regular_rep(P2, P2.index((0, 0))), fam)
    assert C.shape == (2, 1)
    assert np.allclose(np.abs(C[:, 0]), 1 / np.sqrt(2))
    Z2 = groupoid_from_group(cyclic_group(2))
    sign = ArrowRepresentation(Z2, np.array([[[1.0]], [[-1.0]]]), kind="sign")
    assert constant_vectors(sign, canonical_family(Z2).members).shape[1] == 0
    U = zoo["P2+P3"]
    assert constant_vectors(trivial_rep(U), canonical_family(U).members).shape[1] == 2
    A = zoo["Z4 on 6 points"]
    assert constant_vectors(trivial_rep(A), canonical_family(A).members).shape[1] == 3


def test_constant_vectors_match_definition(groupoid):
    fam = canonical_family(groupoid).members
    for rep in all_reps(groupoid):
        A = constant_vectors(rep, fam)
        B = constant_subspace_by_definition(rep, fam)
        assert A.shape[1] == B.shape[1]
        assert subspace_distance(A, B) <= 1e-7


def test_non_generating_family():
    P3 = build_pair(3)
    with pytest.raises(NotGeneratingError):
        constant_vectors(trivial_rep(P3), [d(P3, (0, 1))])


def test_induced_measures_invariant(groupoid):
    fam = canonical_family(groupoid).members
    for rep in all_reps(groupoid):
        C = constant_vectors(rep, fam)
        for j in range(C.shape[1]):
            assert invariance_violation(groupoid, induced_measure(rep, C[:, j]), 1e-9) is None


def test_direct_sum():
    P2 = build_pair(2)
    S = direct_sum(*regular_reps(P2), trivial_rep(P2))
    assert S.dim == 6
    assert max(star_homomorphism_defect(S, 0, trials=5).values()) <= 1e-12


def test_reduced_norm_examples(rng):
    P2 = build_pair(2)
    assert reduced_norm(d(P2, (0, 1))) == pytest.approx(1.0, abs=1e-12)
    assert reduced_norm(AlgebraElement.indicator(P2)) == pytest.approx(2.0, abs=1e-12)
    G = disjoint_union(build_pair(3), groupoid_from_group(cyclic_group(4)))
    for _ in range(100):
        f = AlgebraElement.random(G, rng)
        assert reduced_norm(f) <= i_norm(f) + 1e-9


def test_expectation_from_regular_matches(groupoid, rng):
    from gpdt.algebra import conditional_expectation
    f = AlgebraElement.random(groupoid, rng)
    e = conditional_expectation(f)
    assert np.allclose(expectation_from_regular(f), e.coeffs[groupoid.units], atol=1e-13)
