import numpy as np
import pytest

from rswave.errors import EmptyGridError
from rswave.kspace import (MINUS, PLUS, SIGMA, build_grid, helicity_basis,
                           mode_indices, reverse_k)


def test_mode_indices_fft_order():
    assert mode_indices(6).tolist() == [0, 1, 2, -3, -2, -1]
    assert mode_indices(5).tolist() == [0, 1, 2, -2, -1]


def test_grid_geometry():
    g = build_grid(8, 2.0 * np.pi)
    assert g.dk == pytest.approx(1.0)
    assert g.dx == pytest.approx(2.0 * np.pi / 8)
    assert g.cell_volume == pytest.approx(g.dx ** 3)
    assert g.mode_weight == pytest.approx(1.0 / (2 * np.pi) ** 1.5)
    np.testing.assert_allclose(g.kvec[2, 0, 0], [2.0, 0.0, 0.0])
    np.testing.assert_allclose(g.kvec[0, 7, 3], [0.0, -1.0, 3.0])
    assert g.kmag[1, 1, 0] == pytest.approx(np.sqrt(2.0))


def test_retained_drops_origin_and_nyquist_planes():
    g = build_grid(8, 2.0 * np.pi)
    assert not g.retained[0, 0, 0]
    # index 4 is the self-aliasing m = -4 plane on n = 8
    assert not g.retained[4, 0, 0]
    assert not g.retained[1, 2, 4]
    assert g.n_retained == 7 ** 3 - 1


def test_odd_n_keeps_every_nonzero_mode():
    g = build_grid(5, 2.0 * np.pi)
    assert g.n_retained == 5 ** 3 - 1
    assert g.kmax_retained == pytest.approx(np.sqrt(3.0) * 2.0)


def test_kappa_cutoff_is_inclusive():
    g = build_grid(8, 2.0 * np.pi, kappa=1.0)
    assert g.retained[1, 0, 0]          # |k| = 1 stays at kappa = 1
    g = build_grid(8, 2.0 * np.pi, kappa=1.5)
    assert not g.retained[1, 0, 0]
    assert not g.retained[1, 1, 0]      # sqrt(2) < 1.5
    assert g.retained[2, 0, 0]


def test_cutoff_above_lattice_raises():
    with pytest.raises(EmptyGridError):
        build_grid(4, 2.0 * np.pi, kappa=4.0)


def test_tiny_grid_may_retain_nothing():
    # on n = 2 every nonzero mode sits on a Nyquist plane
    g = build_grid(2, 2.0 * np.pi)
    assert g.n_retained == 0
    assert g.kmax_retained == 0.0
    with pytest.raises(EmptyGridError):
        helicity_basis(g)


def test_invalid_construction_args():
    with pytest.raises(ValueError):
        build_grid(1, 2.0 * np.pi)
    with pytest.raises(ValueError):
        build_grid(8, 0.0)
    with pytest.raises(ValueError):
        build_grid(8, 2.0 * np.pi, kappa=-0.1)


def test_grid_arrays_read_only():
    g = build_grid(4, 1.0)
    with pytest.raises(ValueError):
        g.kvec[0, 0, 0, 0] = 1.0


def test_reverse_k_negates_mode_numbers(rng):
    for n in (4, 5):
        a = rng.standard_normal((n, n, n)) + 1j * rng.standard_normal((n, n, n))
        b = reverse_k(a, (0, 1, 2))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    assert b[i, j, k] == a[-i % n, -j % n, -k % n]


def test_reverse_k_partial_axes(rng):
    a = rng.standard_normal((4, 6, 5))
    b = reverse_k(a, (1,))
    assert b[2, 1, 3] == a[2, -1 % 6, 3]
    assert b[2, 0, 3] == a[2, 0, 3]


def test_basis_orthonormal_and_transverse():
    g = build_grid(6, 3.7)
    basis = helicity_basis(g)
    r = g.retained
    for s in (PLUS, MINUS):
        norms = np.sum(basis.u[s][r] * np.conj(basis.u[s][r]), axis=-1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-14)
        dots = np.sum(basis.khat[r] * basis.u[s][r], axis=-1)
        np.testing.assert_allclose(dots, 0.0, atol=1e-14)
    cross = np.sum(basis.u[PLUS][r] * np.conj(basis.u[MINUS][r]), axis=-1)
    np.testing.assert_allclose(cross, 0.0, atol=1e-14)


def test_basis_is_curl_eigenvector():
    g = build_grid(6, 2.0 * np.pi)
    basis = helicity_basis(g)
    r = g.retained
    for s in (PLUS, MINUS):
        kxu = np.cross(basis.khat[r], basis.u[s][r])
        np.testing.assert_allclose(kxu, -1j * SIGMA[s] * basis.u[s][r],
                                   atol=1e-14)


def test_basis_parity_and_conjugation_pairing():
    g = build_grid(6, 2.0 * np.pi)
    basis = helicity_basis(g)
    # u[s](-k) = u[1-s](k) and conj(u[s]) = u[1-s], exactly
    np.testing.assert_array_equal(reverse_k(basis.u[PLUS], (0, 1, 2)),
                                  basis.u[MINUS])
    np.testing.assert_array_equal(np.conj(basis.u[PLUS]), basis.u[MINUS])


def test_basis_on_axis_values():
    g = build_grid(6, 2.0 * np.pi)
    basis = helicity_basis(g)
    root2 = np.sqrt(2.0)
    np.testing.assert_allclose(basis.u[PLUS][0, 0, 1],
                               [1 / root2, 1j / root2, 0.0], atol=1e-15)
    # parity partner on the negative axis
    np.testing.assert_allclose(basis.u[MINUS][0, 0, -1 % 6],
                               [1 / root2, 1j / root2, 0.0], atol=1e-15)


def test_basis_zero_outside_retained():
    g = build_grid(6, 2.0 * np.pi, kappa=1.5)
    basis = helicity_basis(g)
    assert np.all(basis.u[:, ~g.retained] == 0.0)
    assert np.all(basis.khat[~g.retained] == 0.0)
