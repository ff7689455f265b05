import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhgauss.dynamics import (
    IntegrationAborted,
    TraceRecord,
    _rk4_affine_map,
    closed_form_covariance,
    evolve,
    initial_state,
    integrate_lyapunov,
    revival_couplings,
    revival_times,
    rk4_step,
    sample_indices,
    two_mode_squeezed,
)
from nhgauss.measures import symplectic_eigenvalues
from nhgauss.model import SystemSpec, Topology

# Brute-force Fock-space moments of exp(-r (a^dag b^dag - a b)) |0,0> at r = 1
# and the matrix exponential of the flow at J = 2.3, K = 1, t = 0.5
# (scripts/oracles.py, 80 levels per mode).
FOCK_Q1Q2 = -1.81343020392351
FOCK_Q1Q1 = 1.88109784554182
EXPM_V_HALF = np.array([
    [4.66040239841772, -2.61385611122987, 3.04209209798766, -0.0839300181503131],
    [-2.61385611122987, 1.60785405866416, -1.61020418802709, -0.0993513089505884],
    [3.04209209798766, -1.61020418802709, 3.81333529532902, -1.14248571671133],
    [-0.0839300181503131, -0.0993513089505884, -1.14248571671133, 0.760786955575458],
])


def test_initial_state_matches_fock_oracle():
    V = initial_state(SystemSpec(Topology.BINARY, J=2.3, K=1.0, r=1.0))
    assert V[0, 2] == pytest.approx(FOCK_Q1Q2, abs=1e-12)
    assert V[1, 3] == pytest.approx(-FOCK_Q1Q2, abs=1e-12)
    assert V[0, 0] == pytest.approx(FOCK_Q1Q1, abs=1e-12)
    assert V[0, 1] == 0


def test_ternary_initial_state_leaves_middle_in_vacuum():
    V = initial_state(SystemSpec(Topology.TERNARY, J=2, K=1, r=0.7))
    np.testing.assert_array_equal(V[2:4, :], np.c_[np.zeros((2, 2)), 0.5 * np.eye(2), np.zeros((2, 2))])
    assert V[0, 4] == pytest.approx(-math.sinh(1.4) / 2)


def test_two_mode_squeezed_rejects_bad_pairs():
    with pytest.raises(ValueError):
        two_mode_squeezed(1.0, 2, (0, 0))
    with pytest.raises(ValueError):
        two_mode_squeezed(1.0, 2, (0, 2))
    with pytest.raises(ValueError):
        two_mode_squeezed(1.0, 2, sign=0)


def test_evolve_matches_matrix_exponential():
    spec = SystemSpec(Topology.BINARY, J=2.3, K=1.0, gamma=0.0, r=1.0)
    rec = evolve(initial_state(spec), spec, 0.5, noise=False)
    assert rec.times[-1] == pytest.approx(0.5)
    np.testing.assert_allclose(rec.covariances[-1], EXPM_V_HALF, atol=1e-8)


def test_closed_form_matches_matrix_exponential():
    np.testing.assert_allclose(closed_form_covariance(2.3, 1.0, 1.0, 1.0, 0.5), EXPM_V_HALF, atol=1e-8)


@pytest.mark.parametrize("r", [0.0, 0.5, 1.5])
def test_closed_form_starts_at_initial_state(r):
    V0 = initial_state(SystemSpec(Topology.BINARY, J=3, K=1, r=r))
    np.testing.assert_allclose(closed_form_covariance(3.0, 1.0, 1.0, r, 0.0), V0, atol=1e-13)


def test_closed_form_vectorised_and_guarded():
    ts = np.linspace(0, 1, 5)
    stack = closed_form_covariance(4.0, 1.0, 1.0, 1.0, ts)
    assert stack.shape == (5, 4, 4)
    np.testing.assert_allclose(stack[3], closed_form_covariance(4.0, 1.0, 1.0, 1.0, ts[3]))
    with pytest.raises(ValueError):
        closed_form_covariance(1.0, 1.0, 1.0, 1.0, 0.1)


def test_zero_drift_grows_linearly():
    D = np.diag([1.0, 2.0, 3.0, 4.0])
    V0 = 0.5 * np.eye(4)
    rec = integrate_lyapunov(np.zeros((4, 4)), D, V0, 1.0, dt=0.01, stride=25)
    np.testing.assert_allclose(rec.covariances, V0 + rec.times[:, None, None] * D, atol=1e-12)
    np.testing.assert_allclose(rec.times, [0, 0.25, 0.5, 0.75, 1.0])


def test_affine_map_reproduces_stagewise_step():
    rng = np.random.default_rng(7)
    A = rng.normal(size=(6, 6))
    D = np.diag(rng.uniform(0, 1, 6))
    V = rng.normal(size=(6, 6))
    V = V @ V.T
    P, c = _rk4_affine_map(A, D, 0.01)
    step = rk4_step(A, D, V, 0.01)
    np.testing.assert_allclose((P @ V.ravel() + c).reshape(6, 6), 0.5 * (step + step.T), atol=1e-13)


def test_record_grid_includes_final_step():
    spec = SystemSpec(Topology.BINARY, J=2.3, K=1)
    rec = evolve(initial_state(spec), spec, 0.1, dt=0.003, stride=10)
    assert rec.times[-1] == pytest.approx(0.102)
    assert np.all(np.diff(rec.times) > 0)


def test_trace_record_validates_grid():
    with pytest.raises(ValueError):
        TraceRecord(np.array([0.1, 0.2]), np.zeros((2, 4, 4)))
    with pytest.raises(ValueError):
        TraceRecord(np.array([0.0, 0.0]), np.zeros((2, 4, 4)))


@settings(max_examples=15, deadline=None)
@given(J=st.floats(1.3, 6.0), r=st.floats(0.0, 1.5))
def test_noise_free_flow_preserves_symplectic_spectrum(J, r):
    # without damping and noise the flow is symplectic, so det V stays 1/16
    spec = SystemSpec(Topology.BINARY, J=J, K=1.0, gamma=0.0, r=r)
    rec = evolve(initial_state(spec), spec, 0.6, dt=1e-3, stride=100, noise=False)
    np.testing.assert_allclose(np.linalg.det(rec.covariances), 1 / 16, rtol=1e-7)
    np.testing.assert_allclose(rec.covariances, rec.covariances.transpose(0, 2, 1), atol=0)


@pytest.mark.parametrize("topology", list(Topology))
@pytest.mark.parametrize("J", [0.6, 1.5, 4.0])
def test_noisy_trajectories_stay_physical(topology, J):
    spec = SystemSpec(topology, J=J, K=1.0, gamma=1e-3, n_th=10, r=1.0)
    rec = evolve(initial_state(spec), spec, 1.0, dt=1e-3, stride=10)
    nu = symplectic_eigenvalues(rec.covariances[1:])
    assert nu.min() >= 0.5 - 1e-6


def test_revival_times():
    times = revival_times(2.3, 1.0, 1.0, 5.0)
    w = math.sqrt(4 * 2.3**2 - 5) / 2
    assert times == pytest.approx([math.pi / w, 2 * math.pi / w, 3 * math.pi / w])
    assert times[0] == pytest.approx(1.563, abs=1e-3)
    assert revival_times(0.5, 1.0, 1.0, 5.0) == []


def test_revival_couplings_are_consistent():
    for J in revival_couplings(1.0, 1.0, 0.5, 15.0):
        times = revival_times(J, 1.0, 1.0, 0.5 + 1e-9)
        assert times[-1] == pytest.approx(0.5)


def test_revival_restores_noise_free_covariance():
    J = revival_couplings(1.0, 1.0, 0.5, 15.0)[0]
    spec = SystemSpec(Topology.BINARY, J=J, K=1.0, gamma=0.0)
    V0 = initial_state(spec)
    V = evolve(V0, spec, 1.0, dt=5e-4, noise=False).covariances
    # at the revival time the gain/loss bias cancels and V returns to V0
    np.testing.assert_allclose(V[1000], V0, atol=1e-8)


def test_abort_carries_valid_prefix():
    A = 400.0 * np.eye(4)
    with pytest.raises(IntegrationAborted) as info:
        integrate_lyapunov(A, np.eye(4), 0.5 * np.eye(4), 2.0, dt=0.01, stride=5)
    exc = info.value
    assert len(exc.record) >= 1
    assert np.isfinite(exc.record.covariances).all()
    assert 0 <= exc.last_valid_time < 2.0


def test_integrator_rejects_bad_arguments():
    with pytest.raises(ValueError):
        integrate_lyapunov(np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2), 1.0, dt=0.0)
    with pytest.raises(ValueError):
        integrate_lyapunov(np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2), 1.0, stride=0)


def test_sample_indices():
    times = np.array([0.0, 0.1, 0.2, 0.3])
    np.testing.assert_array_equal(sample_indices(times, [0.0, 0.14, 0.16, 0.5]), [0, 1, 2, 3])
    np.testing.assert_array_equal(sample_indices(np.array([0.0]), [0.3, 0.7]), [0, 0])
