"""Periodic k-space lattice and transverse helicity basis.

Wavevectors live on the FFT lattice of a cubic box: k = m * dk with
dk = 2*pi / box_length and integer m in numpy fftfreq order along each
axis. Two classes of lattice points are never retained:

* modes below the low-frequency cutoff (|k| < kappa, and always k = 0),
* Nyquist planes (any component at m = -n/2 on even n). A Nyquist
  component is its own alias under negation, so such modes cannot carry
  the paired +k / -k structure the synthesis layer relies on.

The helicity basis attaches two orthonormal complex polarization vectors
to every retained k. They satisfy, exactly in floating point,

    khat x u[s] = -i * sigma * u[s]      (sigma = +1 for s=0, -1 for s=1)
    u[s](-k)    = u[1-s](k)
    conj(u[s])  = u[1-s](k)

The parity relation is arranged by construction: vectors are built on the
lexicographic half-space m > 0 and extended to -k by the identity above,
which a sign flip on one half-space achieves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyGridError

PLUS = 0   # helicity sigma = +1 slot index
MINUS = 1  # helicity sigma = -1 slot index

#: signed helicity value per slot, indexable by PLUS / MINUS
SIGMA = np.array([1.0, -1.0])


@dataclass(frozen=True, eq=False)
class KGrid:
    """Cubic FFT lattice with a retention mask.

    kvec has shape (n, n, n, 3), kmag and retained (n, n, n). All arrays
    are read-only. ``retained`` may be all-False; only a cutoff at or
    above the largest lattice frequency is rejected at construction.
    """

    n_per_axis: int
    box_length: float
    kappa: float
    kvec: np.ndarray
    kmag: np.ndarray
    retained: np.ndarray

    def __post_init__(self):
        for a in (self.kvec, self.kmag, self.retained):
            a.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n_per_axis,) * 3

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / self.box_length

    @property
    def dx(self) -> float:
        return self.box_length / self.n_per_axis

    @property
    def cell_volume(self) -> float:
        """Real-space sample volume dx**3."""
        return self.dx ** 3

    @property
    def mode_weight(self) -> float:
        """Synthesis measure per lattice mode, dk**3 / (2*pi)**(3/2)."""
        return self.dk ** 3 / (2.0 * np.pi) ** 1.5

    @property
    def n_retained(self) -> int:
        return int(self.retained.sum())

    @property
    def kmax_retained(self) -> float:
        """Largest |k| among retained modes, 0.0 if none are retained."""
        if not self.retained.any():
            return 0.0
        return float(self.kmag[self.retained].max())


@dataclass(frozen=True, eq=False)
class HelicityBasis:
    """Unit wavevectors and helicity polarization vectors on a grid.

    u has shape (2, n, n, n, 3): u[PLUS] spans helicity +1, u[MINUS]
    helicity -1. Entries at non-retained lattice points are zero.
    """

    khat: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.khat.setflags(write=False)
        self.u.setflags(write=False)


def mode_indices(n_per_axis: int) -> np.ndarray:
    """Integer mode numbers along one axis in FFT storage order."""
    return np.fft.fftfreq(n_per_axis, d=1.0 / n_per_axis).astype(int)


def lattice_kvec(n_per_axis: int, box_length: float) -> np.ndarray:
    """Wavevectors of the full FFT lattice, shape (n, n, n, 3)."""
    m = mode_indices(n_per_axis)
    mx, my, mz = np.meshgrid(m, m, m, indexing="ij")
    dk = 2.0 * np.pi / box_length
    return dk * np.stack([mx, my, mz], axis=-1).astype(float)


def build_grid(n_per_axis: int, box_length: float, kappa: float = 0.0) -> KGrid:
    """Build the lattice and its retention mask.

    Raises EmptyGridError when kappa is at or above the largest lattice
    |k|, since then no mode could ever be retained on this lattice. A
    mask that happens to be all-False for other reasons (tiny grids
    whose only nonzero modes sit on Nyquist planes) is a valid grid.
    """
    if n_per_axis < 2:
        raise ValueError("n_per_axis must be at least 2")
    if box_length <= 0:
        raise ValueError("box_length must be positive")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")

    m = mode_indices(n_per_axis)
    mx, my, mz = np.meshgrid(m, m, m, indexing="ij")
    dk = 2.0 * np.pi / box_length
    kvec = lattice_kvec(n_per_axis, box_length)
    kmag = np.linalg.norm(kvec, axis=-1)

    kmax_lattice = float(kmag.max())
    if kmax_lattice > 0 and kappa >= kmax_lattice:
        raise EmptyGridError(
            f"cutoff kappa={kappa} removes every mode "
            f"(largest lattice |k| is {kmax_lattice})")

    # k = 0 always drops; threshold at half a lattice step keeps the
    # comparison robust when kappa = 0.
    retained = kmag >= max(kappa, dk / 2.0)
    if n_per_axis % 2 == 0:
        nyq = -(n_per_axis // 2)
        retained &= (mx != nyq) & (my != nyq) & (mz != nyq)

    return KGrid(n_per_axis=n_per_axis, box_length=box_length, kappa=kappa,
                 kvec=kvec, kmag=kmag, retained=retained)


def reverse_k(arr: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Resample an FFT-ordered array at negated mode numbers.

    Along each listed axis, output index j holds input index (-j) mod n.
    Exact (a pure permutation), used for parity pairing throughout.
    """
    out = arr
    for ax in axes:
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def helicity_basis(grid: KGrid) -> HelicityBasis:
    """Construct the two transverse helicity vectors at every retained k.

    Off the z-axis the real pair is (normalize(z x khat), khat x that);
    on the +/- z axis the x unit vector seeds the pair. Combining as
    (e1 +/- i e2)/sqrt(2) gives helicity +/-1. A sign flip on the
    lexicographically positive half-space (excluding the z-axis, which
    already pairs correctly) enforces u[s](-k) = u[1-s](k) exactly.
    """
    if not grid.retained.any():
        raise EmptyGridError("cannot build a basis with no retained modes")

    n = grid.n_per_axis
    m = mode_indices(n)
    mx, my, mz = np.meshgrid(m, m, m, indexing="ij")

    khat = np.zeros_like(grid.kvec)
    np.divide(grid.kvec, grid.kmag[..., None], out=khat,
              where=grid.kmag[..., None] > 0)

    zxk = np.stack([-khat[..., 1], khat[..., 0], np.zeros_like(grid.kmag)],
                   axis=-1)
    perp = np.linalg.norm(zxk, axis=-1)
    on_axis = (mx == 0) & (my == 0)

    e1 = np.zeros_like(grid.kvec)
    np.divide(zxk, perp[..., None], out=e1, where=perp[..., None] > 1e-12)
    e1[on_axis] = [1.0, 0.0, 0.0]
    e2 = np.cross(khat, e1)

    u = np.stack([(e1 + 1j * e2), (e1 - 1j * e2)]) / np.sqrt(2.0)

    # Half-space sign fix. Off axis e1 is odd under k -> -k and e2 is
    # even, so unflipped u[s](-k) = -u[1-s](k); negating one member of
    # each +/-k pair restores u[s](-k) = u[1-s](k) with no residual sign.
    lexpos = (mx > 0) | ((mx == 0) & (my > 0)) | ((mx == 0) & (my == 0) & (mz > 0))
    flip = lexpos & ~on_axis
    u[:, flip] *= -1.0

    mask = grid.retained[..., None]
    u = np.where(mask[None], u, 0.0)
    khat = np.where(mask, khat, 0.0)
    return HelicityBasis(khat=khat, u=u)
