import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from merext import BoundarySamples, annulus, compute_moments, detect, unit_disc
from merext.cauchy import MomentSequence
from merext.errors import InsufficientMoments, ZeroPolynomial
from merext.geometry import BoundaryCurve, build_domain
from merext.poles import (HOLOMORPHIC, MEROMORPHIC, NOT_EXTENDIBLE, DetectConfig, build_hankel,
                          classify_roots, null_vector, poly_from_roots, poly_roots, tail_residuals)


def test_hankel_layout():
    c = MomentSequence(np.arange(1, 9, dtype=complex))
    H = build_hankel(c, 3).matrix
    assert H.shape == (3, 4)
    assert H[0].tolist() == [1, 2, 3, 4]
    assert H[2].tolist() == [3, 4, 5, 6]


@given(st.integers(1, 6), st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False,
                                                      allow_infinity=False),
                                   min_size=12, max_size=12))
def test_hankel_constant_on_antidiagonals(N, vals):
    H = build_hankel(MomentSequence(np.array(vals)), N).matrix
    for j in range(N):
        for i in range(N + 1):
            assert H[j, i] == vals[i + j]


def test_hankel_needs_enough_moments():
    with pytest.raises(InsufficientMoments):
        build_hankel(MomentSequence(np.ones(3)), 2)


def test_null_vector_single_pole():
    a = 0.3 - 0.1j
    c = MomentSequence(-a ** np.arange(6))
    D, s = null_vector(build_hankel(c, 1))
    assert abs(D[0] / D[1] + a) < 1e-14
    assert s[-1] > 0 and np.linalg.norm(D) == pytest.approx(1)
    k = np.argmax(np.abs(D))
    assert abs(D[k].imag) < 1e-30 and D[k].real > 0


def test_poly_roots_clusters_multiplicity():
    roots, mults = poly_roots(npoly_coeffs([0.5, 0.5, 0.5, -0.2j]))
    order = np.argsort(roots.real)
    assert mults[order].tolist() == [1, 3]
    assert abs(roots[order][1] - 0.5) < 1e-4


def npoly_coeffs(roots):
    return np.polynomial.polynomial.polyfromroots(roots)


def test_poly_roots_drops_tiny_leading_coefficients():
    roots, mults = poly_roots([-0.25, 1, 1e-14])
    assert roots.tolist() == [0.25] and mults.tolist() == [1]


def test_poly_roots_constant_and_zero():
    assert poly_roots([2.0])[0].size == 0
    with pytest.raises(ZeroPolynomial):
        poly_roots([0, 0, 0])


def test_classify_roots(ring):
    parts = classify_roots([0.1, 0.75, 0.5, 3], [1, 2, 1, 1], ring)
    assert parts.inside == [(0.75, 2)]
    assert parts.boundary == [(0.5, 1)]
    assert parts.outside == [(0.1, 1), (3, 1)]


def test_tail_residuals_vanish_for_rational(disc):
    a, b = 0.2 + 0.3j, -0.5
    f = BoundarySamples.from_function(disc, lambda z: 1 / (z - a) + 2 / (z - b) + z ** 4)
    c = compute_moments(disc, f, 12)
    d = tail_residuals(c, npoly_coeffs([a, b]), extra=8)
    assert d.size == 8 and np.max(np.abs(d)) < 1e-13


def test_tail_residuals_of_essential_singularity_match_exact_moments():
    # exp(1/zeta) has c_j = -1/j! exactly; computed tails agree with the exact ones
    d = unit_disc(256)
    f = BoundarySamples.from_function(d, lambda z: np.exp(1 / z))
    exact = MomentSequence(-1 / np.cumprod(np.arange(1.0, 17)))
    for N in range(1, 5):
        D, _ = null_vector(build_hankel(exact, N))
        got = tail_residuals(compute_moments(d, f, 2 * N + 8), D)
        want = tail_residuals(exact, D)
        assert np.max(np.abs(got - want)) < 1e-14
        assert np.abs(want[0]) > 1e-14


def test_poly_from_roots():
    assert np.allclose(poly_from_roots([(2, 2)]), [4, -4, 1])
    assert poly_from_roots([]).tolist() == [1]


@pytest.mark.parametrize("func, N, verdict, poles", [
    (lambda z: z ** 2, 1, HOLOMORPHIC, []),
    (lambda z: np.exp(z) * np.cos(z), 0, HOLOMORPHIC, []),
    (lambda z: np.conj(z), 1, MEROMORPHIC, [(0, 1)]),
    (lambda z: np.conj(z), 0, NOT_EXTENDIBLE, None),
    (lambda z: np.conj(z) ** 2 + 1 / (z - 0.5), 3, MEROMORPHIC, [(0, 2), (0.5, 1)]),
    (lambda z: 1 / (z - 0.6j) ** 3, 3, MEROMORPHIC, [(0.6j, 3)]),
    (lambda z: 1 / (z - 0.6j) ** 3, 2, NOT_EXTENDIBLE, None),
    (lambda z: 1 / (z - 1.5) + 1 / (z + 0.2), 1, MEROMORPHIC, [(-0.2, 1)]),
])
def test_detect_unit_disc(disc, func, N, verdict, poles):
    rep = detect(disc, BoundarySamples.from_function(disc, func), N)
    assert rep.verdict == verdict
    if poles is not None:
        got = sorted(rep.poles, key=lambda p: (p[0].real, p[0].imag))
        assert [m for _, m in got] == [m for _, m in poles]
        for (z, _), (w, _) in zip(got, poles):
            assert abs(z - w) < 1e-7


def test_detect_in_annulus(ring):
    f = BoundarySamples.from_function(ring, lambda z: 1 / z + 1 / (z - 0.75j))
    rep = detect(ring, f, 1)
    assert rep.verdict == MEROMORPHIC
    assert abs(rep.poles[0][0] - 0.75j) < 1e-8
    assert any(abs(z) < 1e-6 for z, _ in rep.outside_roots) or rep.candidate.degree == 1
    assert detect(ring, f, 0).verdict == NOT_EXTENDIBLE


def test_detect_monotone_in_N(disc):
    f = BoundarySamples.from_function(disc, lambda z: 1 / (z - 0.3) + 1 / (z + 0.4j) ** 2)
    verdicts = [detect(disc, f, N).verdict for N in range(6)]
    assert verdicts[:3] == [NOT_EXTENDIBLE] * 3
    assert verdicts[3:] == [MEROMORPHIC] * 3
    for N in (3, 4, 5):
        rep = detect(disc, f, N)
        assert sum(m for _, m in rep.poles) == 3


@given(st.floats(0.2, 20), st.complex_numbers(max_magnitude=10, allow_nan=False,
                                              allow_infinity=False))
@settings(max_examples=20, deadline=None)
def test_detect_scale_translation_equivariant(scale, shift):
    d = build_domain([BoundaryCurve.circle(shift, scale)])
    poles = [shift + scale * (0.3 + 0.1j), shift + scale * (-0.4j)]
    f = BoundarySamples.from_function(d, lambda z: sum(1 / (z - p) for p in poles))
    rep = detect(d, f, 2)
    assert rep.verdict == MEROMORPHIC
    got = sorted((z for z, _ in rep.poles), key=lambda z: (z.real, z.imag))
    want = sorted(poles, key=lambda z: (z.real, z.imag))
    assert np.allclose(got, want, atol=1e-7 * scale)


def test_detect_report_dict(disc):
    rep = detect(disc, BoundarySamples.from_function(disc, lambda z: 1 / (z - 0.1)), 2)
    out = rep.to_dict()
    assert out["verdict"] == MEROMORPHIC and out["n_poles"] == 2
    assert out["poles"][0]["multiplicity"] == 1
    assert len(out["singular_values"]) == 2
    assert set(out["residuals"]) == {"holo", "tail", "mismatch"}
    assert out["conflicting_evidence"] is False
    assert len(out["candidate_coeffs"]) == 3 and out["Q_coeffs"][1] == [1.0, 0.0]


def test_detect_drops_removable_roots(disc):
    # zeta^2 has vanishing moments, so P is arbitrary; its interior zeros must be pruned
    rep = detect(disc, BoundarySamples.from_function(disc, lambda z: z ** 2), 3)
    assert rep.verdict == HOLOMORPHIC and rep.poles == []


def test_detect_rejects_negative_N(disc):
    with pytest.raises(ValueError):
        detect(disc, BoundarySamples.zeros(disc), -1)


def test_detect_config_cluster_factor(disc):
    f = BoundarySamples.from_function(disc, lambda z: 1 / (z - 0.3) + 1 / (z - 0.3005))
    # at the default radius the pair merges into a double root, which certification rejects
    merged = detect(disc, f, 2)
    assert merged.verdict == NOT_EXTENDIBLE and merged.conflicting
    split = detect(disc, f, 2, DetectConfig(cluster_factor=1e-6))
    assert split.verdict == MEROMORPHIC
    assert sorted(round(z.real, 6) for z, _ in split.poles) == [0.3, 0.3005]
