"""Energy, photon number, detection rates, and localization diagnostics.

Totals are quadratic forms on the mode amplitudes with weight dk^3/2
per (slot, k) entry; each physical degree of freedom is stored twice,
so the half weight makes the sums match the real-space integrals

    H = dV sum_r |psi_plus(r)|^2,     N = dV sum_r |phi_plus(r)|^2

exactly (lattice Parseval). Local quantities restrict the real-space
sums to rectangular sub-volumes by sample membership: a grid sample
belongs to a volume when it lies inside the half-open box
[lower, upper), which makes any partition of the box reproduce the
totals to rounding. Absorption and click rates are signed central
time differences of the local sums.

The sinc overlap is the closed form of the volume integral

    integral_V e^{i (k' - k) . r} d^3 r
        = V prod_w sinc((k'_w - k_w) L_w / 2) e^{i (k' - k) . center},

the quantity that plays the role of delta(k' - k) once every volume
dimension exceeds the wavelength 2 pi / kappa of the softest retained
mode. localization_study tabulates its magnitude over a band of
wavevectors, normalized by V.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import UndefinedRatioError
from .kspace import KGrid
from .synthesis import ModeSet, synthesize_phi, synthesize_psi
from .units import Units, NATURAL


@dataclass(frozen=True)
class VolumeBox:
    """Axis-aligned box given by two corners."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(3)
        hi = np.asarray(self.upper, dtype=float).reshape(3)
        if not np.all(lo < hi):
            raise ValueError("lower must be strictly below upper on all axes")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def lengths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.upper + self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))


class VolumeRow(NamedTuple):
    volume: VolumeBox
    H_local: float
    N_local: float
    Edot: float
    Ndot: float


@dataclass(frozen=True)
class ObservableReport:
    H_total: float
    N_total: float
    per_volume: tuple
    kappa: float
    time: float


@dataclass(frozen=True)
class LocalizationTable:
    """Normalized overlap magnitudes |sinc_overlap|/V over a k band."""

    k_band: np.ndarray
    overlaps: np.ndarray

    @property
    def max_off_diagonal(self) -> float:
        if len(self.k_band) < 2:
            return 0.0
        off = self.overlaps - np.diag(np.diag(self.overlaps))
        return float(np.abs(off).max())


def energy_total(modes: ModeSet, units: Units = NATURAL) -> float:
    hw = units.hbar * units.c * modes.grid.kmag
    return float(0.5 * modes.grid.dk ** 3
                 * np.sum(hw * np.abs(modes.amp) ** 2))


def number_total(modes: ModeSet) -> float:
    return float(0.5 * modes.grid.dk ** 3 * np.sum(np.abs(modes.amp) ** 2))


def narrowband_ratio(modes: ModeSet,
                     units: Units = NATURAL) -> tuple[float, float]:
    """Energy per photon against the dominant-mode frequency.

    Returns (ratio, omega_bar) with omega_bar = H/(hbar N) and
    ratio = omega_bar / (c |k_dom|), k_dom the retained mode carrying
    the largest amplitude weight. A narrowband state has ratio near 1;
    the deviation grows as the squared relative bandwidth.
    """
    N = number_total(modes)
    if N <= 0.0:
        raise UndefinedRatioError(
            "photon number is zero; energy per photon is undefined")
    H = energy_total(modes, units)
    omega_bar = H / (units.hbar * N)
    weight = np.sum(np.abs(modes.amp) ** 2, axis=0)
    dom = np.unravel_index(np.argmax(weight), weight.shape)
    omega_dom = units.c * modes.grid.kmag[dom]
    return omega_bar / omega_dom, omega_bar


def _sample_mask(grid: KGrid, volume: VolumeBox) -> np.ndarray:
    x = grid.dx * np.arange(grid.n_per_axis)
    inside = [(x >= volume.lower[w]) & (x < volume.upper[w])
              for w in range(3)]
    return (inside[0][:, None, None] & inside[1][None, :, None]
            & inside[2][None, None, :])


def _check_volumes(grid: KGrid, volumes) -> None:
    L = grid.box_length
    for v in volumes:
        if np.any(v.lower < 0.0) or np.any(v.upper > L):
            raise ValueError(
                f"volume [{v.lower}, {v.upper}] leaves the periodic box "
                f"[0, {L}]^3")
    for i, a in enumerate(volumes):
        for b in volumes[i + 1:]:
            if np.all((a.lower < b.upper) & (b.lower < a.upper)):
                raise ValueError("volumes overlap")
    if grid.kappa > 0.0:
        floor = 2.0 * np.pi / grid.kappa
        for v in volumes:
            if np.any(v.lengths <= floor):
                warnings.warn(
                    "a volume dimension does not exceed 2*pi/kappa = "
                    f"{floor:.6g}; local photon counts in it are not "
                    "reliable", stacklevel=3)
                break


def local_observables(modes: ModeSet, volumes, t: float,
                      units: Units = NATURAL) -> ObservableReport:
    """Energy and photon content of sub-volumes, with signed rates.

    Rates are central differences over a time step resolving the
    fastest retained mode; they are positive while content enters a
    volume and negative while it leaves.
    """
    grid = modes.grid
    volumes = list(volumes)
    _check_volumes(grid, volumes)

    masks = [_sample_mask(grid, v) for v in volumes]
    dv = grid.cell_volume

    if grid.kmax_retained > 0.0:
        dt = 0.01 / (units.c * grid.kmax_retained)
    else:
        dt = 1.0

    def local_sums(time):
        psi = synthesize_psi(modes, time, part="+", units=units).values
        phi = synthesize_phi(modes, time, part="+", units=units).values
        e = dv * np.sum(np.abs(psi) ** 2, axis=-1)
        n = dv * np.sum(np.abs(phi) ** 2, axis=-1)
        return ([float(e[m].sum()) for m in masks],
                [float(n[m].sum()) for m in masks])

    e_now, n_now = local_sums(t)
    e_fwd, n_fwd = local_sums(t + dt)
    e_bwd, n_bwd = local_sums(t - dt)

    rows = tuple(
        VolumeRow(volume=v, H_local=e_now[i], N_local=n_now[i],
                  Edot=(e_fwd[i] - e_bwd[i]) / (2.0 * dt),
                  Ndot=(n_fwd[i] - n_bwd[i]) / (2.0 * dt))
        for i, v in enumerate(volumes))
    return ObservableReport(H_total=energy_total(modes, units),
                            N_total=number_total(modes),
                            per_volume=rows, kappa=grid.kappa, time=t)


def _sinc_snapped(x: float) -> float:
    # exact zero at nonzero multiples of pi, so commensurate overlap
    # tables are exactly diagonal
    m = round(x / np.pi)
    if m != 0 and abs(x - m * np.pi) < 1e-12 * max(1.0, abs(x)):
        return 0.0
    if x == 0.0:
        return 1.0
    return np.sin(x) / x


def sinc_overlap(volume: VolumeBox, k, kp) -> complex:
    """Closed form of the volume integral of e^{i (kp - k) . r}."""
    delta = np.asarray(kp, dtype=float) - np.asarray(k, dtype=float)
    x = 0.5 * delta * volume.lengths
    s = _sinc_snapped(x[0]) * _sinc_snapped(x[1]) * _sinc_snapped(x[2])
    phase = np.exp(1j * float(delta @ volume.center))
    return volume.volume * s * phase


def localization_study(volume: VolumeBox, k_band) -> LocalizationTable:
    """Pairwise normalized overlaps over a band of wavevectors."""
    band = np.atleast_2d(np.asarray(k_band, dtype=float))
    if band.size == 0:
        raise ValueError("k_band must not be empty")
    if band.shape[1] != 3:
        raise ValueError("k_band entries must be 3-vectors")
    m = len(band)
    table = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            table[i, j] = abs(sinc_overlap(volume, band[i], band[j]))
    table /= volume.volume
    return LocalizationTable(k_band=band, overlaps=table)
