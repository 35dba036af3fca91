"""Two independent propagators and the curl / spin-matrix identity.

The spectral propagator advances mode amplitudes by the exact
dispersion phase e^{-i c |k| t}; through the synthesis conventions this
makes every helicity component of the field carry e^{-i sigma |k| c t},
which is the diagonalized form of

    i d/dt psi = c curl psi.

The leapfrog propagator never references the mode amplitudes: it steps
the real displacement and magnetic fields on staggered times with
spectrally evaluated curls,

    dD/dt = (1/mu0) curl B,      dB/dt = -(1/eps0) curl D,

and is second-order accurate against the spectral route. Spectral curls
keep space exact so convergence studies see pure time-stepping error.

curl is identically -i (L . grad) with the three spin-1 generator
matrices; curl_vs_L_check() measures the identity on any sampled field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StabilityError
from .kspace import mode_indices
from .synthesis import FieldSnapshot, ModeSet, rs_from_DB, synthesize_phi, \
    synthesize_psi
from .units import Units, NATURAL

SCHEMES = ("spectral", "leapfrog")


@dataclass(frozen=True)
class Spin1Generators:
    """Hermitian spin-1 matrices, (L_w)_{ab} = -i epsilon_{wab}."""

    Lx: np.ndarray
    Ly: np.ndarray
    Lz: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.stack([self.Lx, self.Ly, self.Lz])


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniform snapshots of one propagation run."""

    times: np.ndarray
    states: tuple
    scheme: str

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        t = np.asarray(self.times, dtype=float)
        if len(t) != len(self.states):
            raise ValueError("one time per state required")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        first = self.states[0]
        for s in self.states:
            if (s.grid_shape != first.grid_shape
                    or s.box_length != first.box_length):
                raise ValueError("states must share one grid")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", tuple(self.states))


def spin1_generators() -> Spin1Generators:
    e = np.zeros((3, 3, 3))
    e[0, 1, 2] = e[1, 2, 0] = e[2, 0, 1] = 1.0
    e[0, 2, 1] = e[2, 1, 0] = e[1, 0, 2] = -1.0
    L = -1j * e
    return Spin1Generators(Lx=L[0], Ly=L[1], Lz=L[2])


def _axis_freqs(shape: tuple[int, int, int], box_length: float):
    dk = 2.0 * np.pi / box_length
    kx, ky, kz = (dk * mode_indices(n) for n in shape)
    return (kx[:, None, None], ky[None, :, None], kz[None, None, :])


def _lattice_kvec_of(shape, box_length) -> np.ndarray:
    kx, ky, kz = _axis_freqs(shape, box_length)
    return np.stack(np.broadcast_arrays(kx, ky, kz), axis=-1)


def curl_spectral(values: np.ndarray, box_length: float) -> np.ndarray:
    """curl of a periodic sampled 3-vector field, evaluated exactly."""
    kvec = _lattice_kvec_of(values.shape[:3], box_length)
    G = np.fft.fftn(values, axes=(0, 1, 2))
    return np.fft.ifftn(np.cross(1j * kvec, G), axes=(0, 1, 2))


def curl_vs_L_check(field: FieldSnapshot) -> float:
    """Max-norm residual between curl F and -i (L . grad) F.

    Both routes differentiate spectrally; the check exercises the
    matrix identity, not the differentiation.
    """
    kx, ky, kz = _axis_freqs(field.grid_shape, field.box_length)
    G = np.fft.fftn(field.values, axes=(0, 1, 2))
    grad = [np.fft.ifftn(1j * kw[..., None] * G, axes=(0, 1, 2))
            for kw in (kx, ky, kz)]

    L = spin1_generators().stacked()
    route_l = -1j * sum(np.einsum("ab,xyzb->xyza", L[w], grad[w])
                        for w in range(3))
    route_curl = curl_spectral(field.values, field.box_length)
    return float(np.abs(route_curl - route_l).max())


def evolve_spectral(modes: ModeSet, t_final: float,
                    units: Units = NATURAL) -> ModeSet:
    """Advance amplitudes by the exact phase e^{-i c |k| t}.

    Both helicity slots take the same phase; the stored MINUS slot
    enters the field through conjugation and mirroring, which turns the
    phase into the e^{+i w t} its frequency part requires. The pairing
    constraint does not survive the phases (it relates slots at equal
    |k| through a conjugation), so the result is flagged unphysical for
    t != 0; the field it synthesizes is the exactly evolved one, and
    every quadratic form in |A| is untouched.
    """
    phase = np.exp(-1j * units.c * modes.grid.kmag * t_final)
    return ModeSet(grid=modes.grid, amp=modes.amp * phase,
                   basis=modes.basis,
                   physical=modes.physical and t_final == 0.0)


def spectral_trajectory(modes: ModeSet, dt: float, steps: int,
                        units: Units = NATURAL, kind: str = "psi",
                        part: str = "both") -> Trajectory:
    """Synthesize the exactly evolved field at times 0, dt, ..., steps*dt."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    synth = {"psi": synthesize_psi, "phi": synthesize_phi}
    if kind not in synth:
        raise ValueError("kind must be 'psi' or 'phi'")
    times = dt * np.arange(steps + 1)
    states = tuple(synth[kind](modes, float(t), part=part, units=units)
                   for t in times)
    return Trajectory(times=times, states=states, scheme="spectral")


def stability_limit(grid_shape, box_length: float,
                    units: Units = NATURAL) -> float:
    """Largest leapfrog dt accepted, 0.9 * 2 / (c |k|_max).

    |k|_max runs over the full lattice, Nyquist planes included; data
    is not assumed band-limited to the retained set.
    """
    kx, ky, kz = _axis_freqs(grid_shape, box_length)
    kmax = float(np.sqrt(np.abs(kx).max() ** 2 + np.abs(ky).max() ** 2
                         + np.abs(kz).max() ** 2))
    return 0.9 * 2.0 / (units.c * kmax)


def evolve_leapfrog(D0: FieldSnapshot, B0: FieldSnapshot, dt: float,
                    steps: int, units: Units = NATURAL,
                    record_every: int = 1) -> Trajectory:
    """Staggered-time Maxwell stepping from real initial fields.

    Records the energy wavefunction at recorded integer steps: the real
    part is exact (D lives on integer times), the imaginary part uses
    the average of the two neighboring staggered B fields, a
    second-order reconstruction. Step 0 and the final step are always
    recorded.
    """
    if D0.kind != "displacement" or B0.kind != "magnetic":
        raise ValueError("expected a displacement and a magnetic snapshot")
    if D0.grid_shape != B0.grid_shape or D0.box_length != B0.box_length:
        raise ValueError("D0 and B0 live on different grids")
    if D0.time != B0.time:
        raise ValueError("D0 and B0 are snapshots at different times")
    for f in (D0, B0):
        scale = np.abs(f.values).max()
        if scale > 0 and np.abs(f.values.imag).max() > 1e-10 * scale:
            raise ValueError("initial fields must be real")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if record_every < 1:
        raise ValueError("record_every must be at least 1")
    limit = stability_limit(D0.grid_shape, D0.box_length, units)
    if dt > limit:
        raise StabilityError(
            f"dt={dt} exceeds the leapfrog stability limit {limit:.6g}")

    L = D0.box_length
    t0 = D0.time
    d = D0.values.real.copy()
    b_half = (B0.values.real
              - (0.5 * dt / units.eps0) * curl_spectral(D0.values.real, L).real)

    times = [t0]
    states = [rs_from_DB(D0, B0, units=units)]
    for n in range(1, steps + 1):
        d = d + (dt / units.mu0) * curl_spectral(b_half, L).real
        b_next = b_half - (dt / units.eps0) * curl_spectral(d, L).real
        if n % record_every == 0 or n == steps:
            b_avg = 0.5 * (b_half + b_next)
            values = (d / np.sqrt(2.0 * units.eps0)
                      + 1j * b_avg / np.sqrt(2.0 * units.mu0))
            times.append(t0 + n * dt)
            states.append(FieldSnapshot(
                grid_shape=D0.grid_shape, box_length=L, time=t0 + n * dt,
                values=values.astype(complex), kind="psi"))
        b_half = b_next
    return Trajectory(times=np.array(times), states=tuple(states),
                      scheme="leapfrog")


def schrodinger_residual(traj: Trajectory, units: Units = NATURAL) -> float:
    """Discrete check of i hbar d/dt psi = hbar c curl psi on a trajectory.

    Central differences in time against the spectral curl at the
    interior snapshots; returns the worst relative L2 mismatch. The
    residual of an exact trajectory is the central-difference truncation
    error, O((w dt)^2).
    """
    if len(traj.states) < 3:
        raise ValueError("need at least 3 states for a central difference")
    dts = np.diff(traj.times)
    if np.abs(dts - dts[0]).max() > 1e-12 * dts[0]:
        raise ValueError("trajectory is not uniformly sampled")
    dt = float(dts[0])

    worst = 0.0
    L = traj.states[0].box_length
    for n in range(1, len(traj.states) - 1):
        dpsi = (traj.states[n + 1].values - traj.states[n - 1].values)
        lhs = 1j * units.hbar * dpsi / (2.0 * dt)
        rhs = units.hbar * units.c * curl_spectral(traj.states[n].values, L)
        den = np.linalg.norm(rhs)
        if den == 0.0:
            continue
        worst = max(worst, float(np.linalg.norm(lhs - rhs) / den))
    return worst
