import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import closed_form_block_apply, closed_form_lmn, cubic_eigvals
from posmaps.analysis import (
    block_apply,
    block_transpose,
    check_complete_copositivity,
    check_complete_positivity,
    check_positivity,
    hermitian_eig,
    probe_values,
    witness_indecomposability,
)
from posmaps.ballmaps import AffineBallMap, sample_dm
from posmaps.catalog import choi_rotation_map, phi_k_map, psi_map, tau_k_map, witness_matrix
from posmaps.errors import DimensionMismatchError, InvalidWitnessError, NotHermitianError
from posmaps.maps import (
    DynamicalMap,
    build_phi,
    convex_combine_maps,
    identity_map,
    transpose_map,
)
from posmaps.sampling import random_hermitian, random_unit_vectors

ANGLES = {
    "pi/6": np.pi / 6,
    "pi/3": np.pi / 3,
    "pi/2": np.pi / 2,
    "2pi/3": 2 * np.pi / 3,
    "5pi/6": 5 * np.pi / 6,
    "0": 0.0,
    "pi": np.pi,
}
P_GRID = [0.25, 0.5, 1.0, 2.0, 4.0]

# min eigenvalue of [phi[alpha](x_ij)], frozen from the closed-form entrywise map
WITNESS_REGRESSION = {
    "pi/6": [0.667468245269451, 0.311004233964073, 0.0, -0.122008467928146, -0.116025403784439],
    "pi/3": [0.625, 0.5, 0.0, -0.25, -0.375],
    "pi/2": [0.883974596215561, 0.599679368558886, 0.0, -0.266346035225553, -0.332531754730548],
    "2pi/3": [1.0, 0.583333333333333, 0.0, -0.166666666666667, 0.0],
    "5pi/6": [0.667468245269452, 0.455341801261479, 0.0, 0.0223290993692602, 0.53349364905389],
    "0": [0.375, 1 / 12, 0.0, 1 / 12, 0.375],
    "pi": [0.625, 0.25, 0.0, 0.25, 0.625],
}


def bloch_2i_map(n):
    # Bloch block 2I: not a contraction, so it has to be imported directly
    L = 2 * np.eye(n * n)
    L[-1, -1] = 1
    return DynamicalMap(n, L)


def test_eig_trivial_examples():
    r = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(r.values, [1, 2, 3], atol=0)
    assert np.allclose(np.abs(r.vectors), np.eye(3)[:, [1, 2, 0]])
    assert np.allclose(hermitian_eig([[0, 1], [1, 0]]).values, [-1, 1], atol=1e-15)


def test_eig_matches_cubic_formula(rng):
    for _ in range(50):
        A = random_hermitian(3, rng)
        assert np.abs(hermitian_eig(A).values - cubic_eigvals(A)).max() < 1e-8


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eig([[0, 1], [0, 0]])
    with pytest.raises(DimensionMismatchError):
        hermitian_eig(np.zeros((2, 3)))


def test_eig_lapack_agrees(rng):
    A = random_hermitian(7, rng)
    a, b = hermitian_eig(A), hermitian_eig(A, method="lapack")
    assert np.abs(a.values - b.values).max() < 1e-12


def test_eig_deterministic_and_phase_fixed(rng):
    A = random_hermitian(6, rng)
    a, b = hermitian_eig(A), hermitian_eig(A.copy())
    assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)
    idx = np.argmax(np.round(np.abs(a.vectors), 12), axis=0)
    pivots = a.vectors[idx, np.arange(6)]
    assert np.all(np.abs(pivots.imag) < 1e-15) and np.all(pivots.real > 0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 16), seed=st.integers(0, 2**31 - 1), scale=st.floats(1e-6, 1e6))
def test_eig_contract(n, seed, scale):
    A = scale * random_hermitian(n, seed)
    r = hermitian_eig(A)
    norm = np.linalg.norm(A, 2)
    V = r.vectors
    assert np.abs(V.conj().T @ V - np.eye(n)).max() < 1e-10
    assert np.linalg.norm(A - (V * r.values) @ V.conj().T, 2) <= 1e-9 * (1 + norm)
    assert r.residual <= 1e-10 * (1 + norm)
    assert np.all(np.diff(r.values) >= 0)


def test_eig_degenerate_and_tiny():
    r = hermitian_eig(np.eye(4))
    assert np.allclose(r.values, 1)
    r = hermitian_eig(1e-300 * np.array([[1, 1j], [-1j, 1]]))
    assert np.all(np.isfinite(r.values))


def test_positivity_of_constructed_map():
    phi = build_phi(sample_dm(8, seed=4))
    assert check_positivity(phi, starts=20, seed=0).min_value >= -1e-9


@pytest.mark.parametrize("n", [2, 3, 4])
def test_transpose_is_positive(n):
    assert check_positivity(transpose_map(n), starts=5, probes=2000).min_value >= -1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_non_contraction_import_is_caught(n):
    rep = check_positivity(bloch_2i_map(n), starts=5, probes=2000)
    assert rep.min_value < -1e-3


def test_report_witnesses_reproduce_min_value():
    phi = bloch_2i_map(3)
    rep = check_positivity(phi, starts=4, seed=9, probes=500)
    u, v = rep.witness_input, rep.witness_output_direction
    assert abs(np.linalg.norm(u) - 1) < 1e-12 and abs(np.linalg.norm(v) - 1) < 1e-12
    direct = (v.conj() @ phi(np.outer(u, u.conj())) @ v).real
    assert abs(direct - rep.min_value) < 1e-10
    assert rep.starts_used == 4
    d = rep.as_dict()
    assert d["min_value"] == rep.min_value and len(d["witness_input"]) == 3


def test_positivity_deterministic_for_seed():
    phi = choi_rotation_map(np.pi / 3)
    a = check_positivity(phi, starts=3, seed=5, probes=300)
    b = check_positivity(phi, starts=3, seed=5, probes=300)
    assert a.min_value == b.min_value
    assert np.array_equal(a.witness_input, b.witness_input)


def test_probe_values_are_linear_in_the_map():
    a, b = choi_rotation_map(np.pi / 3), build_phi(sample_dm(8, seed=6))
    U = random_unit_vectors(3, 10_000, seed=1)
    V = random_unit_vectors(3, 10_000, seed=2)
    pa, pb = probe_values(a, U, V), probe_values(b, U, V)
    mix = convex_combine_maps([(0.25, a), (0.75, b)])
    assert np.abs(probe_values(mix, U, V) - (0.25 * pa + 0.75 * pb)).max() < 1e-12


def test_cp_examples():
    assert check_complete_positivity(identity_map(3))[0]
    ok, lo = check_complete_positivity(transpose_map(3))
    assert not ok and abs(lo + 1) < 1e-12
    assert check_complete_positivity(build_phi(AffineBallMap.identity(8)))[0]


def test_ccp_examples():
    assert check_complete_copositivity(choi_rotation_map(np.pi))[0]
    assert check_complete_copositivity(transpose_map(3))[0]
    assert not check_complete_copositivity(identity_map(2))[0]


def test_cp_implies_no_negative_probe():
    catalog = [identity_map(3), choi_rotation_map(np.pi), psi_map(3), tau_k_map(4, 1), phi_k_map(4, 2)]
    for phi in catalog:
        if check_complete_positivity(phi)[0]:
            assert check_positivity(phi, starts=3, probes=1000).min_value >= -1e-9


def test_block_apply_examples(rng):
    phi = build_phi(sample_dm(8, seed=8))
    a = random_hermitian(3, rng)
    assert np.abs(block_apply(phi, 1, a) - phi(a)).max() < 1e-14
    W = random_hermitian(9, rng)
    assert np.abs(block_apply(identity_map(3), 3, W) - W).max() < 1e-13
    out = block_apply(phi, 3, W)
    assert np.abs(out - out.conj().T).max() < 1e-13
    with pytest.raises(DimensionMismatchError):
        block_apply(phi, 2, np.eye(9))
    with pytest.raises(DimensionMismatchError):
        block_apply(phi, 3, np.eye(12))


def test_block_transpose_swaps_blocks():
    W = np.arange(16.0).reshape(4, 4)
    T = block_transpose(W, 2)
    assert np.array_equal(T[:2, 2:], W[2:, :2])
    assert np.array_equal(T[:2, :2], W[:2, :2])


@pytest.mark.parametrize("name", list(ANGLES))
def test_witness_regression_values(name):
    phi = choi_rotation_map(ANGLES[name])
    for p, expected in zip(P_GRID, WITNESS_REGRESSION[name]):
        W = witness_matrix(p)
        lo = hermitian_eig(block_apply(phi, 3, W)).values[0]
        assert abs(lo - expected) < 1e-9
        oracle = np.linalg.eigvalsh(closed_form_block_apply(ANGLES[name], W))[0]
        assert abs(lo - oracle) < 1e-12


@pytest.mark.parametrize("alpha", [np.pi / 6, np.pi / 3, np.pi / 2, 2 * np.pi / 3, 5 * np.pi / 6, 0.1, 3.0])
def test_witness_fires_at_a_suitable_p(alpha):
    # on span{|11>,|22>,|33>} the image is D - 1 at its bottom, D = (lam + mu p + nu/p)/2
    lam, mu, nu = closed_form_lmn(alpha)
    p = np.sqrt(nu / mu) if mu > 1e-12 else 2.0
    v = witness_indecomposability(choi_rotation_map(alpha), witness_matrix(p))
    assert v.indecomposable
    assert v.min_eigenvalue <= 0.5 * (lam + mu * p + nu / p) - 1 + 1e-12


@pytest.mark.parametrize("alpha", [0.0, np.pi])
@pytest.mark.parametrize("p", P_GRID)
def test_decomposable_cases_are_inconclusive(alpha, p):
    v = witness_indecomposability(choi_rotation_map(alpha), witness_matrix(p))
    assert v.verdict == "inconclusive"
    assert v.min_eigenvalue >= -1e-9


def test_witness_at_p_one_is_on_the_edge():
    # the all-ones block maps to a matrix with a zero eigenvalue for every alpha
    for alpha in np.linspace(0, 2 * np.pi, 13):
        v = witness_indecomposability(choi_rotation_map(alpha), witness_matrix(1.0))
        assert abs(v.min_eigenvalue) < 1e-12
        assert v.verdict == "inconclusive"


def test_witness_requires_ppt_input(rng):
    with pytest.raises(InvalidWitnessError):
        witness_indecomposability(choi_rotation_map(np.pi / 3), -np.eye(9))
    # PSD but with a non-PSD block transpose: the maximally entangled projector
    psi = np.eye(3).reshape(-1) / np.sqrt(3)
    with pytest.raises(InvalidWitnessError):
        witness_indecomposability(choi_rotation_map(np.pi / 3), np.outer(psi, psi))


def test_witness_verdict_dict():
    v = witness_indecomposability(choi_rotation_map(np.pi / 3), witness_matrix(2.0))
    d = v.as_dict()
    assert d["verdict"] == "indecomposable"
    assert abs(d["min_eigenvalue"] + 0.25) < 1e-12
    assert len(d["eigenvector"]) == 9
