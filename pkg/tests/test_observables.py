import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from rswave.dynamics import evolve_spectral
from rswave.errors import UndefinedRatioError
from rswave.kspace import build_grid
from rswave.observables import (LocalizationTable, VolumeBox, energy_total,
                                local_observables, localization_study,
                                narrowband_ratio, number_total, sinc_overlap)
from rswave.synthesis import (gaussian_wavepacket, mode_pair, random_modes,
                              symmetrize, synthesize_phi, synthesize_psi,
                              zero_modes)

TWO_PI = 2.0 * np.pi


def box(lo, hi):
    return VolumeBox(lower=np.asarray(lo, float), upper=np.asarray(hi, float))


def test_volume_box_validation_and_geometry():
    with pytest.raises(ValueError):
        box([0, 0, 0], [1, 1, 0])
    v = box([0, 1, 2], [4, 5, 6])
    np.testing.assert_allclose(v.lengths, [4, 4, 4])
    np.testing.assert_allclose(v.center, [2, 3, 4])
    assert v.volume == pytest.approx(64.0)


def test_totals_single_mode():
    grid = build_grid(8, TWO_PI)
    assert number_total(mode_pair(grid, (0, 0, 3), +1, 1.0)) == (
        pytest.approx(1.0))
    m = mode_pair(grid, (0, 0, 3), +1, 0.7 + 0.2j)
    assert number_total(m) == pytest.approx(0.53)
    assert energy_total(m) == pytest.approx(1.59)
    z = zero_modes(grid)
    assert energy_total(z) == 0.0
    assert number_total(z) == 0.0


def test_totals_match_real_space_integrals(rng):
    grid = build_grid(6, TWO_PI)
    m = symmetrize(random_modes(grid, rng))
    psi = synthesize_psi(m, 0.6, part="+").values
    phi = synthesize_phi(m, 0.6, part="+").values
    dv = grid.cell_volume
    assert energy_total(m) == pytest.approx(
        dv * np.sum(np.abs(psi) ** 2), rel=1e-12)
    assert number_total(m) == pytest.approx(
        dv * np.sum(np.abs(phi) ** 2), rel=1e-12)


def test_totals_survive_spectral_evolution(rng):
    grid = build_grid(6, TWO_PI)
    m = symmetrize(random_modes(grid, rng))
    moved = evolve_spectral(m, 2.9)
    assert energy_total(moved) == pytest.approx(energy_total(m), rel=1e-14)
    assert number_total(moved) == pytest.approx(number_total(m), rel=1e-14)


def test_narrowband_single_mode_is_exact():
    grid = build_grid(8, TWO_PI)
    ratio, omega_bar = narrowband_ratio(mode_pair(grid, (0, 0, 3), +1, 2.0))
    assert ratio == pytest.approx(1.0, abs=1e-15)
    assert omega_bar == pytest.approx(3.0)


def test_narrowband_zero_state_raises():
    grid = build_grid(8, TWO_PI)
    with pytest.raises(UndefinedRatioError):
        narrowband_ratio(zero_modes(grid))


def test_narrowband_gaussian_deviation():
    grid = build_grid(16, TWO_PI)
    pkt = gaussian_wavepacket(grid, [0, 0, 4.0], 0.8, +1, 1.0)
    ratio, omega_bar = narrowband_ratio(pkt)
    # direct re-evaluation of the two quadratic forms
    w = np.abs(pkt.amp) ** 2
    direct_bar = np.sum(grid.kmag * w) / np.sum(w)
    assert omega_bar == pytest.approx(direct_bar, rel=1e-12)
    assert 0.01 < ratio - 1.0 < 0.15


def test_full_box_is_the_totals_with_zero_rates(rng):
    grid = build_grid(6, TWO_PI)
    m = symmetrize(random_modes(grid, rng))
    rep = local_observables(m, [box([0, 0, 0], [TWO_PI] * 3)], 0.4)
    row = rep.per_volume[0]
    assert row.H_local == pytest.approx(rep.H_total, rel=1e-10)
    assert row.N_local == pytest.approx(rep.N_total, rel=1e-10)
    assert abs(row.Edot) < 1e-8 * rep.H_total
    assert abs(row.Ndot) < 1e-8 * rep.N_total
    assert rep.kappa == grid.kappa
    assert rep.time == 0.4


def test_partition_additivity(rng):
    grid = build_grid(8, TWO_PI)
    m = symmetrize(random_modes(grid, rng))
    L, h = TWO_PI, np.pi
    halves = [box([0, 0, 0], [h, L, L]), box([h, 0, 0], [L, L, L])]
    octants = [box([i * h, j * h, k * h],
                   [(i + 1) * h, (j + 1) * h, (k + 1) * h])
               for i in (0, 1) for j in (0, 1) for k in (0, 1)]
    for vols in (halves, octants):
        rep = local_observables(m, vols, 0.3)
        assert sum(r.H_local for r in rep.per_volume) == pytest.approx(
            rep.H_total, rel=1e-10)
        assert sum(r.N_local for r in rep.per_volume) == pytest.approx(
            rep.N_total, rel=1e-10)


def test_volume_validation(rng):
    grid = build_grid(6, TWO_PI)
    m = symmetrize(random_modes(grid, rng))
    with pytest.raises(ValueError, match="overlap"):
        local_observables(m, [box([0, 0, 0], [4, 4, 4]),
                              box([3, 3, 3], [5, 5, 5])], 0.0)
    with pytest.raises(ValueError, match="box"):
        local_observables(m, [box([0, 0, 0], [7, 4, 4])], 0.0)


def test_kappa_condition_warns(rng):
    grid = build_grid(12, TWO_PI, kappa=2.0)   # 2 pi / kappa = pi
    m = symmetrize(random_modes(grid, rng))
    small = box([0, 0, 0], [np.pi, TWO_PI, TWO_PI])
    with pytest.warns(UserWarning, match="kappa"):
        local_observables(m, [small], 0.0)
    grid0 = build_grid(12, TWO_PI)
    m0 = symmetrize(random_modes(grid0, rng))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        local_observables(m0, [small], 0.0)


def test_transit_rates_change_sign():
    # packet moving along +z crosses a slab: content rises, then falls
    grid = build_grid(16, TWO_PI)
    pkt = gaussian_wavepacket(grid, [0, 0, 6.0], 1.2, +1, 1.0)
    slab = box([0, 0, 2.5], [TWO_PI, TWO_PI, 3.5])
    entering = local_observables(pkt, [slab], 2.2).per_volume[0]
    leaving = local_observables(pkt, [slab], 3.8).per_volume[0]
    assert entering.Ndot > 0.0
    assert leaving.Ndot < 0.0
    assert entering.Edot > 0.0
    assert leaving.Edot < 0.0


def test_local_report_on_empty_grid():
    grid = build_grid(2, TWO_PI)   # nothing retained
    rep = local_observables(zero_modes(grid),
                            [box([0, 0, 0], [TWO_PI] * 3)], 0.0)
    assert rep.H_total == 0.0
    assert rep.per_volume[0].N_local == 0.0


def quad_overlap(volume, k, kp):
    """Product of three 1-D quadratures of e^{i (kp-k)_w r}."""
    delta = np.asarray(kp, float) - np.asarray(k, float)
    out = 1.0 + 0.0j
    for w in range(3):
        re = quad(lambda r: np.cos(delta[w] * r),
                  volume.lower[w], volume.upper[w], limit=200)[0]
        im = quad(lambda r: np.sin(delta[w] * r),
                  volume.lower[w], volume.upper[w], limit=200)[0]
        out *= re + 1j * im
    return out


def test_sinc_overlap_examples():
    v = box([-1.0, -2.0, -0.5], [1.0, 2.0, 0.5])
    k = np.array([1.0, 2.0, 3.0])
    assert sinc_overlap(v, k, k) == pytest.approx(v.volume)
    kp = k + np.array([2.0 * np.pi / 2.0, 0.0, 0.0])
    assert sinc_overlap(v, k, kp) == 0.0
    # half-pi argument on every axis, box centered on the origin
    kp2 = k + np.pi / v.lengths
    assert sinc_overlap(v, k, kp2) == pytest.approx(
        v.volume * (2.0 / np.pi) ** 3)


def test_sinc_overlap_against_quadrature(rng):
    for _ in range(12):
        lo = rng.uniform(0.0, 2.0, 3)
        hi = lo + rng.uniform(0.5, 3.0, 3)
        v = box(lo, hi)
        k = rng.uniform(-3.0, 3.0, 3)
        kp = rng.uniform(-3.0, 3.0, 3)
        assert sinc_overlap(v, k, kp) == pytest.approx(
            quad_overlap(v, k, kp), abs=1e-9 * v.volume)


def test_commensurate_band_is_exactly_diagonal():
    L = TWO_PI
    v = box([0, 0, 0], [L, L, L])
    band = [(0, 0, 1), (0, 0, 2), (1, 0, 1), (2, 1, 0)]
    table = localization_study(v, np.array(band, float) * (2 * np.pi / L))
    assert table.max_off_diagonal == 0.0
    np.testing.assert_array_equal(np.diag(table.overlaps), 1.0)


def test_off_diagonal_shrinks_with_volume():
    band = np.array([[0, 0, 1.0], [0, 0, 2.0]])
    maxima = []
    for L in (5 * np.pi, 9 * np.pi, 13 * np.pi, 17 * np.pi):
        v = box([0, 0, 0], [L, L, L])
        t = localization_study(v, band)
        # neighboring modes: |sinc(L/2)| = 2/L exactly at these L
        assert t.max_off_diagonal == pytest.approx(2.0 / L)
        maxima.append(t.max_off_diagonal)
    assert all(a > b for a, b in zip(maxima, maxima[1:]))


def test_sinc_envelope_bound(rng):
    v = box([0, 0, 0], [4.0, 5.0, 6.0])
    for _ in range(50):
        k = rng.uniform(-4, 4, 3)
        kp = rng.uniform(-4, 4, 3)
        x = 0.5 * (kp - k) * v.lengths
        bound = np.prod([1.0 / abs(xi) if abs(xi) > 1.0 else 1.0
                         for xi in x])
        assert abs(sinc_overlap(v, k, kp)) <= v.volume * bound + 1e-12


def test_localization_study_validation():
    v = box([0, 0, 0], [1, 1, 1])
    with pytest.raises(ValueError):
        localization_study(v, np.zeros((0, 3)))
    with pytest.raises(ValueError):
        localization_study(v, np.zeros((2, 2)))
    single = localization_study(v, np.array([[0.0, 0.0, 1.0]]))
    assert single.max_off_diagonal == 0.0
