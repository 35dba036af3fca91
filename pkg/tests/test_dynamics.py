import numpy as np
import pytest

from rswave.dynamics import (Trajectory, curl_spectral, curl_vs_L_check,
                             evolve_leapfrog, evolve_spectral,
                             schrodinger_residual, spectral_trajectory,
                             spin1_generators, stability_limit)
from rswave.errors import StabilityError
from rswave.kspace import PLUS, build_grid
from rswave.synthesis import (FieldSnapshot, fields_from_potential, mode_pair,
                              random_modes, symmetrize, synthesize_psi)
from rswave.units import NATURAL


def test_generators_are_hermitian_and_satisfy_the_algebra():
    g = spin1_generators()
    for L in (g.Lx, g.Ly, g.Lz):
        assert np.array_equal(L, L.conj().T)
    def comm(a, b):
        return a @ b - b @ a
    assert np.array_equal(comm(g.Lx, g.Ly), 1j * g.Lz)
    assert np.array_equal(comm(g.Ly, g.Lz), 1j * g.Lx)
    assert np.array_equal(comm(g.Lz, g.Lx), 1j * g.Ly)


def test_Lz_helicity_eigenvector():
    g = spin1_generators()
    v = np.array([1.0, 1j, 0.0]) / np.sqrt(2.0)
    np.testing.assert_array_equal(g.Lz @ v, v)


def snapshot_of(values, box_length=2.0 * np.pi):
    return FieldSnapshot(grid_shape=values.shape[:3], box_length=box_length,
                         time=0.0, values=np.asarray(values, dtype=complex),
                         kind="psi")


def test_curl_identity_constant_field():
    vals = np.ones((6, 6, 6, 3), dtype=complex)
    assert curl_vs_L_check(snapshot_of(vals)) == 0.0


def test_curl_matches_hand_evaluated_plane_wave():
    n, L, k = 8, 2.0 * np.pi, 2.0
    x = (L / n) * np.arange(n)
    vals = np.zeros((n, n, n, 3), dtype=complex)
    vals[..., 2] = np.exp(1j * k * x)[:, None, None]
    snap = snapshot_of(vals)
    curl = curl_spectral(snap.values, L)
    expect = np.zeros_like(vals)
    expect[..., 1] = -1j * k * np.exp(1j * k * x)[:, None, None]
    np.testing.assert_allclose(curl, expect, atol=1e-12)
    assert curl_vs_L_check(snap) < 1e-12


def test_curl_identity_random_fields(rng):
    for _ in range(20):
        vals = (rng.standard_normal((6, 6, 6, 3))
                + 1j * rng.standard_normal((6, 6, 6, 3)))
        assert curl_vs_L_check(snapshot_of(vals, 3.1)) < 1e-12


@pytest.fixture
def state(rng):
    grid = build_grid(6, 2.0 * np.pi)
    return symmetrize(random_modes(grid, rng))


def test_evolve_spectral_identity_and_phase(state):
    same = evolve_spectral(state, 0.0)
    np.testing.assert_array_equal(same.amp, state.amp)
    assert same.physical

    grid = build_grid(6, 2.0 * np.pi)
    single = mode_pair(grid, (0, 0, 2), +1, 1.0)
    half_period = np.pi / 2.0          # omega = c|k| = 2
    moved = evolve_spectral(single, half_period)
    assert moved.amp[PLUS, 0, 0, 2] == pytest.approx(-1.0)
    assert not moved.physical


def test_evolve_spectral_preserves_norms(state):
    moved = evolve_spectral(state, 3.7)
    assert np.abs(np.abs(moved.amp) - np.abs(state.amp)).max() < 1e-14


def test_evolve_then_synthesize_commutes(state):
    t = 0.83
    a = synthesize_psi(evolve_spectral(state, t), 0.0)
    b = synthesize_psi(state, t)
    scale = np.abs(b.values).max()
    assert np.abs(a.values - b.values).max() < 1e-13 * scale


def test_spectral_trajectory_layout(state):
    traj = spectral_trajectory(state, 0.1, 5)
    assert traj.scheme == "spectral"
    assert len(traj.states) == 6
    np.testing.assert_allclose(traj.times, 0.1 * np.arange(6))
    assert all(s.kind == "psi" for s in traj.states)
    with pytest.raises(ValueError):
        spectral_trajectory(state, -0.1, 5)
    with pytest.raises(ValueError):
        spectral_trajectory(state, 0.1, 5, kind="rho")


def test_residual_is_second_order_on_exact_trajectory():
    grid = build_grid(6, 2.0 * np.pi)
    single = mode_pair(grid, (0, 0, 2), +1, 0.6 + 0.1j)
    r = [schrodinger_residual(spectral_trajectory(single, dt, 4))
         for dt in (0.05, 0.025)]
    assert 3.5 < r[0] / r[1] < 4.5


def test_residual_same_contract_on_photon_trajectory():
    grid = build_grid(6, 2.0 * np.pi)
    single = mode_pair(grid, (0, 0, 2), +1, 0.6 + 0.1j)
    r = [schrodinger_residual(spectral_trajectory(single, dt, 4, kind="phi"))
         for dt in (0.05, 0.025)]
    assert 3.5 < r[0] / r[1] < 4.5


def test_residual_validation(state):
    short = spectral_trajectory(state, 0.1, 1)
    with pytest.raises(ValueError):
        schrodinger_residual(short)
    t3 = spectral_trajectory(state, 0.1, 3)
    crooked = Trajectory(times=np.array([0.0, 0.1, 0.25, 0.3]),
                         states=t3.states, scheme="spectral")
    with pytest.raises(ValueError):
        schrodinger_residual(crooked)


def test_trajectory_validation(state):
    s = synthesize_psi(state, 0.0)
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 1.0]), states=(s, s), scheme="euler")
    with pytest.raises(ValueError):
        Trajectory(times=np.array([1.0, 0.0]), states=(s, s),
                   scheme="spectral")
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0]), states=(s, s), scheme="spectral")
    other = FieldSnapshot(grid_shape=(6, 6, 6), box_length=9.0, time=1.0,
                          values=np.zeros((6, 6, 6, 3), dtype=complex),
                          kind="psi")
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 1.0]), states=(s, other),
                   scheme="spectral")


def test_leapfrog_zero_fields():
    zero = np.zeros((6, 6, 6, 3), dtype=complex)
    D0 = FieldSnapshot((6, 6, 6), 2 * np.pi, 0.0, zero, "displacement")
    B0 = FieldSnapshot((6, 6, 6), 2 * np.pi, 0.0, zero, "magnetic")
    traj = evolve_leapfrog(D0, B0, 0.05, 4)
    assert traj.scheme == "leapfrog"
    for s in traj.states:
        assert np.all(s.values == 0.0)


def test_leapfrog_argument_validation(state):
    D0, B0 = fields_from_potential(state, 0.0)
    with pytest.raises(ValueError):
        evolve_leapfrog(B0, D0, 0.01, 2)       # swapped kinds
    with pytest.raises(ValueError):
        evolve_leapfrog(D0, B0, -0.01, 2)
    with pytest.raises(ValueError):
        evolve_leapfrog(D0, B0, 0.01, 0)
    with pytest.raises(ValueError):
        evolve_leapfrog(D0, B0, 0.01, 2, record_every=0)
    complex_D = FieldSnapshot(D0.grid_shape, D0.box_length, 0.0,
                              D0.values + 1j * np.abs(D0.values).max(),
                              "displacement")
    with pytest.raises(ValueError):
        evolve_leapfrog(complex_D, B0, 0.01, 2)
    _, B1 = fields_from_potential(state, 1.0)
    with pytest.raises(ValueError):
        evolve_leapfrog(D0, B1, 0.01, 2)


def test_leapfrog_stability_guard(state):
    D0, B0 = fields_from_potential(state, 0.0)
    limit = stability_limit(D0.grid_shape, D0.box_length)
    with pytest.raises(StabilityError):
        evolve_leapfrog(D0, B0, 1.01 * limit, 2)
    evolve_leapfrog(D0, B0, 0.99 * limit, 2)


def test_leapfrog_record_every(state):
    D0, B0 = fields_from_potential(state, 0.0)
    traj = evolve_leapfrog(D0, B0, 0.01, 10, record_every=3)
    np.testing.assert_allclose(traj.times,
                               [0.0, 0.03, 0.06, 0.09, 0.10])


def test_leapfrog_initial_state_is_exact(state):
    D0, B0 = fields_from_potential(state, 0.0)
    traj = evolve_leapfrog(D0, B0, 0.01, 1)
    psi0 = synthesize_psi(state, 0.0)
    scale = np.abs(psi0.values).max()
    assert np.abs(traj.states[0].values - psi0.values).max() < 1e-12 * scale


def test_leapfrog_converges_at_second_order(rng):
    grid = build_grid(8, 2.0 * np.pi)
    state = symmetrize(random_modes(grid, rng))
    D0, B0 = fields_from_potential(state, 0.0)
    T = 0.2
    exact = synthesize_psi(state, T).values

    def rel_error(steps):
        traj = evolve_leapfrog(D0, B0, T / steps, steps, record_every=steps)
        approx = traj.states[-1].values
        return (np.linalg.norm(approx.real - exact.real)
                / np.linalg.norm(exact.real))

    ratio = rel_error(10) / rel_error(20)
    assert 3.5 < ratio < 4.5


def test_leapfrog_energy_drift_is_tiny(rng):
    grid = build_grid(8, 2.0 * np.pi)
    state = symmetrize(random_modes(grid, rng))
    D0, B0 = fields_from_potential(state, 0.0)
    traj = evolve_leapfrog(D0, B0, 1e-4, 1000, record_every=100)
    dv = (2.0 * np.pi / 8) ** 3
    energies = [dv * np.sum(np.abs(s.values) ** 2) for s in traj.states]
    drift = np.abs(np.array(energies) / energies[0] - 1.0).max()
    assert drift < 1e-6


def test_leapfrog_tracks_spectral_solution(state):
    D0, B0 = fields_from_potential(state, 0.0)
    steps, T = 40, 0.2
    traj = evolve_leapfrog(D0, B0, T / steps, steps, record_every=steps)
    exact = synthesize_psi(state, T).values
    rel = np.linalg.norm(traj.states[-1].values - exact) / np.linalg.norm(exact)
    assert rel < 2e-3
    res = schrodinger_residual(
        evolve_leapfrog(D0, B0, T / steps, steps, record_every=4))
    assert res < 5e-3
