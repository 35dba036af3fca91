"""Real-space field synthesis from helicity-mode amplitudes.

A ModeSet stores one complex amplitude per retained lattice mode and
helicity slot, A[s, ix, iy, iz] with s = PLUS or MINUS. The slot pair
(sigma, k) and (-sigma, -k) describe one physical degree of freedom;
the "physical" flag marks states obeying the pairing constraint

    A[sigma](-k) = conj(A[-sigma](k)),

which symmetrize() enforces by projection. Because of the pairing, the
positive-frequency part of the energy wavefunction reads only the PLUS
slots and the negative-frequency part only the MINUS slots:

    psi_plus(r, t)  =  sum_k  i w sqrt(hbar w_k) A[+](k)  e^{i(k.r - w_k t)} u[+](k)
    psi_minus(r, t) = -sum_k  i w sqrt(hbar w_k) conj(A[-](-k)) e^{i(k.r + w_k t)} u[-](k)

with w_k = c|k| and w the lattice synthesis measure dk^3/(2 pi)^{3/2}.
The photon wavefunction phi is the same pair of sums with the
sqrt(hbar w_k) weight replaced by e^{+- i pi/4}. The vector potential,
being no eigenvector of the curl, keeps both slots in its
positive-frequency part (weight sqrt(hbar Z0 / (2|k|))) and completes
the field with the complex conjugate, which also yields the
displacement D = -eps0 dA/dt and magnetic field B = curl A. The
identity psi_plus + psi_minus = D/sqrt(2 eps0) + i B/sqrt(2 mu0) then
holds exactly, slot by slot.

All sums are evaluated by inverse FFT; tests carry a direct-DFT oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptyGridError
from .kspace import (KGrid, HelicityBasis, PLUS, MINUS, SIGMA,
                     helicity_basis, reverse_k)
from .units import Units, NATURAL

FIELD_KINDS = ("potential", "displacement", "magnetic",
               "psi_plus", "psi_minus", "psi",
               "phi_plus", "phi_minus", "phi")

PARTS = ("+", "-", "both")


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Spectral state: amplitudes A[s] per helicity slot and lattice mode.

    amp has shape (2, n, n, n) complex, zero at non-retained modes. basis
    is filled lazily on first synthesis; large k-only workflows (the
    narrowband study) never pay for it.
    """

    grid: KGrid
    amp: np.ndarray
    basis: Optional[HelicityBasis] = None
    physical: bool = False

    def __post_init__(self):
        n = self.grid.n_per_axis
        if self.amp.shape != (2, n, n, n):
            raise ValueError(f"amp must have shape (2, {n}, {n}, {n})")
        self.amp.setflags(write=False)


@dataclass(frozen=True, eq=False)
class FieldSnapshot:
    """Complex 3-vector field sampled on the periodic real-space grid."""

    grid_shape: tuple[int, int, int]
    box_length: float
    time: float
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.values.shape != (*self.grid_shape, 3):
            raise ValueError("values shape does not match grid_shape")
        self.values.setflags(write=False)


def attached_basis(modes: ModeSet) -> HelicityBasis:
    """Basis of the mode set, built and cached on first use."""
    if modes.basis is None:
        object.__setattr__(modes, "basis", helicity_basis(modes.grid))
    return modes.basis


def zero_modes(grid: KGrid) -> ModeSet:
    n = grid.n_per_axis
    return ModeSet(grid=grid, amp=np.zeros((2, n, n, n), dtype=complex),
                   physical=True)


def modes_with(grid: KGrid, amp: np.ndarray, physical: bool = False) -> ModeSet:
    """Wrap an amplitude array, zeroing non-retained entries."""
    out = np.array(amp, dtype=complex)
    out[:, ~grid.retained] = 0.0
    return ModeSet(grid=grid, amp=out, physical=physical)


def mode_pair(grid: KGrid, m_index: tuple[int, int, int], helicity: int,
              amplitude: complex) -> ModeSet:
    """One physical degree of freedom: the slot at k = m_index * dk plus
    its conjugate partner at (-k, opposite helicity).

    helicity is +1 or -1. Raises if the requested mode is not retained.
    """
    if helicity not in (1, -1):
        raise ValueError("helicity must be +1 or -1")
    n = grid.n_per_axis
    idx = tuple(int(m) % n for m in m_index)
    if not grid.retained[idx]:
        raise ValueError(f"mode {tuple(m_index)} is not retained on this grid")
    neg = tuple((-int(m)) % n for m in m_index)
    s = PLUS if helicity == 1 else MINUS
    amp = np.zeros((2, n, n, n), dtype=complex)
    amp[(s,) + idx] = amplitude
    amp[(1 - s,) + neg] = np.conj(amplitude)
    return ModeSet(grid=grid, amp=amp, physical=True)


def random_modes(grid: KGrid, rng: np.random.Generator,
                 scale: float = 1.0) -> ModeSet:
    """Independent complex Gaussian amplitudes on every retained slot.

    Not symmetrized; pass through symmetrize() for a physical state.
    """
    n = grid.n_per_axis
    amp = scale * (rng.standard_normal((2, n, n, n))
                   + 1j * rng.standard_normal((2, n, n, n)))
    amp[:, ~grid.retained] = 0.0
    return ModeSet(grid=grid, amp=amp, basis=None, physical=False)


def symmetrize(modes: ModeSet) -> ModeSet:
    """Project onto the conjugate-paired subspace.

    A'[s](k) = (A[s](k) + conj(A[1-s](-k))) / 2. Idempotent; the result
    is flagged physical. The projection halves the independent slot
    count: each degree of freedom is stored twice, once per partner.
    """
    mirrored = np.conj(reverse_k(modes.amp[::-1], (1, 2, 3)))
    out = 0.5 * (modes.amp + mirrored)
    return ModeSet(grid=modes.grid, amp=out, basis=modes.basis, physical=True)


def pairing_defect(modes: ModeSet) -> float:
    """Max deviation from the conjugate-pairing constraint."""
    mirrored = np.conj(reverse_k(modes.amp[::-1], (1, 2, 3)))
    return float(np.abs(modes.amp - mirrored).max())


def gaussian_wavepacket(grid: KGrid, k0: np.ndarray, sigma_k: float,
                        helicity: int, amplitude: complex) -> ModeSet:
    """Symmetrized Gaussian packet centered on k0 in one helicity.

    Sets A(k) = amplitude * exp(-|k - k0|^2 / (4 sigma_k^2)) on the
    retained modes of the chosen helicity slot, symmetrizes, then
    rescales so that the photon-number quadratic form
    (dk^3/2) * sum |A|^2 equals |amplitude|^2.
    """
    if sigma_k <= 0:
        raise ValueError("sigma_k must be positive")
    if helicity not in (1, -1):
        raise ValueError("helicity must be +1 or -1")
    k0 = np.asarray(k0, dtype=float)
    k0_mag = float(np.linalg.norm(k0))
    if k0_mag <= grid.kappa:
        raise ValueError("|k0| must exceed the cutoff kappa")
    if k0_mag > grid.kmax_retained:
        raise ValueError("k0 lies outside the retained band of the grid")

    n = grid.n_per_axis
    s = PLUS if helicity == 1 else MINUS
    dist2 = np.sum((grid.kvec - k0) ** 2, axis=-1)
    amp = np.zeros((2, n, n, n), dtype=complex)
    amp[s][grid.retained] = amplitude * np.exp(
        -dist2[grid.retained] / (4.0 * sigma_k ** 2))
    packet = symmetrize(ModeSet(grid=grid, amp=amp))

    target = abs(amplitude) ** 2
    if target == 0.0:
        return packet
    current = 0.5 * grid.dk ** 3 * float(np.sum(np.abs(packet.amp) ** 2))
    scaled = packet.amp * np.sqrt(target / current)
    return ModeSet(grid=grid, amp=scaled, basis=packet.basis, physical=True)


# ---------------------------------------------------------------------------
# synthesis kernels

def _ifft_grid(G: np.ndarray, n: int) -> np.ndarray:
    # sum_k G(k) e^{i k.r} at the lattice samples
    return np.fft.ifftn(G, axes=(0, 1, 2)) * n ** 3


def _single_slot_part(modes: ModeSet, ct: float, part: str,
                      weight: np.ndarray, phase_plus: complex) -> np.ndarray:
    """Shared sum for the psi / phi families.

    weight is the per-mode magnitude factor (sqrt(hbar w_k) or ones);
    phase_plus the fixed phase of the (+) part (i for psi, i e^{i pi/4}
    for phi). The (-) part carries the conjugate fixed phase, the
    mirrored-conjugated MINUS slots and e^{+i w_k t}.
    """
    grid = modes.grid
    n = grid.n_per_axis
    out = np.zeros((n, n, n, 3), dtype=complex)
    if not grid.retained.any():
        return out                     # nothing to sum on all-masked grids
    u = attached_basis(modes).u
    w = grid.mode_weight
    omega_t = grid.kmag * ct  # w_k t = |k| * (c t)
    if part in ("+", "both"):
        coef = phase_plus * w * weight * modes.amp[PLUS] * np.exp(-1j * omega_t)
        out += _ifft_grid(coef[..., None] * u[PLUS], n)
    if part in ("-", "both"):
        mirrored = np.conj(reverse_k(modes.amp[MINUS], (0, 1, 2)))
        coef = np.conj(phase_plus) * w * weight * mirrored * np.exp(1j * omega_t)
        out += _ifft_grid(coef[..., None] * u[MINUS], n)
    return out


def _check_part(part: str):
    if part not in PARTS:
        raise ValueError(f"part must be one of {PARTS}, got {part!r}")


def synthesize_psi(modes: ModeSet, t: float, part: str = "both",
                   units: Units = NATURAL) -> FieldSnapshot:
    """Energy-density wavefunction at time t.

    The squared amplitude of the "both" combination is the field energy
    density; the "+" part alone carries the quadratic forms used by the
    observables module.
    """
    _check_part(part)
    grid = modes.grid
    weight = np.sqrt(units.hbar * units.c * grid.kmag)
    values = _single_slot_part(modes, units.c * t, part, weight, 1j)
    kind = {"+": "psi_plus", "-": "psi_minus", "both": "psi"}[part]
    return FieldSnapshot(grid_shape=(grid.n_per_axis,) * 3,
                         box_length=grid.box_length, time=t,
                         values=values, kind=kind)


def synthesize_phi(modes: ModeSet, t: float, part: str = "both",
                   units: Units = NATURAL) -> FieldSnapshot:
    """Photon-density wavefunction: unit mode weight, phase +- pi/4."""
    _check_part(part)
    grid = modes.grid
    weight = np.ones_like(grid.kmag)
    phase = 1j * np.exp(1j * np.pi / 4.0)
    values = _single_slot_part(modes, units.c * t, part, weight, phase)
    kind = {"+": "phi_plus", "-": "phi_minus", "both": "phi"}[part]
    return FieldSnapshot(grid_shape=(grid.n_per_axis,) * 3,
                         box_length=grid.box_length, time=t,
                         values=values, kind=kind)


def _potential_plus_coef(modes: ModeSet, t: float,
                         units: Units) -> np.ndarray:
    """(n,n,n,3) k-space coefficients of the positive-frequency potential."""
    grid = modes.grid
    n = grid.n_per_axis
    if not grid.retained.any():
        return np.zeros((n, n, n, 3), dtype=complex)
    u = attached_basis(modes).u
    inv_k = np.zeros_like(grid.kmag)
    np.divide(1.0, grid.kmag, out=inv_k, where=grid.retained)
    s = grid.mode_weight * np.sqrt(0.5 * units.hbar * units.Z0 * inv_k)
    phase = np.exp(-1j * units.c * grid.kmag * t)
    both = (modes.amp[PLUS, ..., None] * u[PLUS]
            + modes.amp[MINUS, ..., None] * u[MINUS])
    return (s * phase)[..., None] * both


def synthesize_potential(modes: ModeSet, t: float,
                         units: Units = NATURAL) -> FieldSnapshot:
    """Coulomb-gauge vector potential, positive part plus its conjugate."""
    grid = modes.grid
    n = grid.n_per_axis
    plus = _ifft_grid(_potential_plus_coef(modes, t, units), n)
    return FieldSnapshot(grid_shape=(n,) * 3, box_length=grid.box_length,
                         time=t, values=plus + np.conj(plus),
                         kind="potential")


def fields_from_potential(modes: ModeSet, t: float,
                          units: Units = NATURAL
                          ) -> tuple[FieldSnapshot, FieldSnapshot]:
    """Displacement and magnetic field from the potential.

    Time and space derivatives act analytically on the positive part
    (d/dt -> -i c|k|, curl -> i k x), then the conjugate completes the
    real fields: D = -eps0 dA/dt, B = curl A.
    """
    grid = modes.grid
    n = grid.n_per_axis
    coef = _potential_plus_coef(modes, t, units)

    d_coef = (1j * units.eps0 * units.c * grid.kmag)[..., None] * coef
    b_coef = np.cross(1j * grid.kvec, coef)

    d_plus = _ifft_grid(d_coef, n)
    b_plus = _ifft_grid(b_coef, n)
    D = FieldSnapshot(grid_shape=(n,) * 3, box_length=grid.box_length,
                      time=t, values=d_plus + np.conj(d_plus),
                      kind="displacement")
    B = FieldSnapshot(grid_shape=(n,) * 3, box_length=grid.box_length,
                      time=t, values=b_plus + np.conj(b_plus),
                      kind="magnetic")
    return D, B


def synthesize(modes: ModeSet, t: float, kind: str = "psi",
               units: Units = NATURAL) -> FieldSnapshot:
    """Snapshot of any named field kind; see FIELD_KINDS."""
    if kind not in FIELD_KINDS:
        raise ValueError(f"unknown field kind {kind!r}; "
                         f"choose from {', '.join(FIELD_KINDS)}")
    if kind == "potential":
        return synthesize_potential(modes, t, units=units)
    if kind in ("displacement", "magnetic"):
        pair = fields_from_potential(modes, t, units=units)
        return pair[0] if kind == "displacement" else pair[1]
    family, _, suffix = kind.partition("_")
    part = {"plus": "+", "minus": "-", "": "both"}[suffix]
    fn = synthesize_psi if family == "psi" else synthesize_phi
    return fn(modes, t, part, units=units)


def rs_from_DB(D: FieldSnapshot, B: FieldSnapshot,
               units: Units = NATURAL) -> FieldSnapshot:
    """Combine real D and B into the energy wavefunction."""
    if D.grid_shape != B.grid_shape or D.box_length != B.box_length:
        raise ValueError("D and B live on different grids")
    if D.time != B.time:
        raise ValueError("D and B are snapshots at different times")
    values = (D.values / np.sqrt(2.0 * units.eps0)
              + 1j * B.values / np.sqrt(2.0 * units.mu0))
    return FieldSnapshot(grid_shape=D.grid_shape, box_length=D.box_length,
                         time=D.time, values=values, kind="psi")
