"""The eight transforms between the energy and photon wavefunctions.

Each transform acts on a single frequency part as multiplication by a
half-power of frequency and a fixed phase:

    kind      multiplier on the e^{-i w t} part
    T+        (hbar w)^(-1/2) e^{+i pi/4}
    T-        (hbar w)^(-1/2) e^{-i pi/4}
    Tx        (hbar w)^(-1/2)
    Ty        (hbar w)^(-1/2) e^{+i pi/2}
    inv T+    (hbar w)^(+1/2) e^{-i pi/4}
    inv T-    (hbar w)^(+1/2) e^{+i pi/4}
    inv Tx    (hbar w)^(+1/2)
    inv Ty    (hbar w)^(+1/2) e^{-i pi/2}

The e^{+i w t} part always receives the conjugated multiplier, so real
combinations stay real. apply_spectral() realizes the table exactly on
mode amplitudes or on a single-frequency-part field snapshot.

apply_timedomain() realizes the same operators as convolutions against
singular kernels sampled over a finite window:

    T+   : c_f * integral F(t - tau) tau^(-1/2) dtau     over (0, W)
    T-   : the same integral over the future, F(t + tau)
    Tx,Ty: (T+ +- T-)/sqrt(2), two-sided kernels
    inv *: kernel tau^(-3/2), Hadamard finite part at tau = 0

with c_f = (pi hbar)^(-1/2) and c_i = -sqrt(hbar/(4 pi)). These carry a
1/sqrt(2 pi) relative to the raw convolution-theorem kernels; with that
normalization a pure tone reproduces the spectral multiplier up to the
window truncation error, O((w W)^(-1/2)) for the forward kinds. The
1/sqrt(tau) endpoint is handled by product integration (exact kernel
moments per sample cell against a linearly interpolated signal); the
tau^(-3/2) kernels additionally subtract the signal value at tau = 0,
whose finite-part integral is -2/sqrt(W).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularModeError
from .kspace import lattice_kvec
from .synthesis import FieldSnapshot, ModeSet
from .units import Units, NATURAL

KINDS = ("T+", "T-", "Tx", "Ty", "inv T+", "inv T-", "inv Tx", "inv Ty")

ENERGY_TO_PHOTON = "energy->photon"
PHOTON_TO_ENERGY = "photon->energy"

#: phase of the forward multiplier on the e^{-iwt} part, by base kind
_PHASE = {"T+": 0.25 * np.pi, "T-": -0.25 * np.pi, "Tx": 0.0,
          "Ty": 0.5 * np.pi}

_SNAPSHOT_IN = {ENERGY_TO_PHOTON: ("psi_plus", "psi_minus"),
                PHOTON_TO_ENERGY: ("phi_plus", "phi_minus")}
_SNAPSHOT_OUT = {"psi_plus": "phi_plus", "psi_minus": "phi_minus",
                 "phi_plus": "psi_plus", "phi_minus": "psi_minus"}


@dataclass(frozen=True)
class TransformSpec:
    """One of the eight transforms; direction follows from the kind."""

    kind: str
    direction: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}; "
                             f"choose from {', '.join(KINDS)}")
        expected = (PHOTON_TO_ENERGY if self.kind.startswith("inv")
                    else ENERGY_TO_PHOTON)
        if self.direction == "":
            object.__setattr__(self, "direction", expected)
        elif self.direction != expected:
            raise ValueError(
                f"kind {self.kind!r} has direction {expected!r}, "
                f"not {self.direction!r}")

    @property
    def inverse_power(self) -> bool:
        """True when the multiplier magnitude is (hbar w)^(-1/2)."""
        return self.direction == ENERGY_TO_PHOTON


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled complex scalar signal."""

    t0: float
    dt: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        s = np.array(self.samples, dtype=complex)
        if s.ndim != 1:
            raise ValueError("samples must be one-dimensional; apply "
                             "vector signals componentwise")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.samples))


def _plus_multiplier(spec: TransformSpec, omega, units: Units):
    """Multiplier on the e^{-iwt} part; omega may be an array."""
    base = spec.kind.removeprefix("inv ")
    phase = _PHASE[base]
    if spec.inverse_power:
        return np.exp(1j * phase) / np.sqrt(units.hbar * omega)
    return np.sqrt(units.hbar * omega) * np.exp(-1j * phase)


def spectral_multiplier(spec: TransformSpec, omega: float, sign: str,
                        units: Units = NATURAL) -> complex:
    """Exact action of the transform on one e^{∓iwt} mode component."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    m = complex(_plus_multiplier(spec, float(omega), units))
    return m if sign == "+" else np.conj(m)


def _apply_spectral_modes(spec: TransformSpec, modes: ModeSet,
                          units: Units) -> ModeSet:
    grid = modes.grid
    omega = units.c * grid.kmag
    if spec.inverse_power and np.abs(modes.amp[:, 0, 0, 0]).max() > 0.0:
        raise SingularModeError(
            "zero-frequency mode carries amplitude; the forward "
            "multiplier is singular there")
    mult = np.zeros_like(omega, dtype=complex)
    nz = omega > 0
    mult[nz] = _plus_multiplier(spec, omega[nz], units)
    # both helicity slots feed the e^{-iwt} part after mirroring, so
    # both receive the un-conjugated multiplier
    return ModeSet(grid=grid, amp=modes.amp * mult, basis=modes.basis,
                   physical=False)


def _apply_spectral_snapshot(spec: TransformSpec, snap: FieldSnapshot,
                             units: Units) -> FieldSnapshot:
    allowed = _SNAPSHOT_IN[spec.direction]
    if snap.kind in ("psi", "phi", "potential", "displacement", "magnetic"):
        raise ValueError(
            f"snapshot kind {snap.kind!r} mixes frequency parts; "
            "transform the '+' and '-' parts separately")
    if snap.kind not in allowed:
        raise ValueError(f"{spec.kind!r} expects a snapshot of kind "
                         f"{allowed[0]!r} or {allowed[1]!r}, got {snap.kind!r}")
    sign = "+" if snap.kind.endswith("plus") else "-"

    n = snap.grid_shape[0]
    G = np.fft.fftn(snap.values, axes=(0, 1, 2)) / n ** 3
    kmag = np.linalg.norm(lattice_kvec(n, snap.box_length), axis=-1)
    omega = units.c * kmag

    dc = np.abs(G[0, 0, 0]).max()
    if spec.inverse_power and dc > 1e-12 * np.abs(G).max():
        raise SingularModeError(
            "snapshot has significant zero-frequency content; the "
            "forward multiplier is singular there")
    mult = np.zeros_like(omega, dtype=complex)
    nz = omega > 0
    mult[nz] = _plus_multiplier(spec, omega[nz], units)
    if sign == "-":
        mult = np.conj(mult)

    values = np.fft.ifftn(mult[..., None] * G, axes=(0, 1, 2)) * n ** 3
    return FieldSnapshot(grid_shape=snap.grid_shape,
                         box_length=snap.box_length, time=snap.time,
                         values=values, kind=_SNAPSHOT_OUT[snap.kind])


def apply_spectral(spec: TransformSpec, state, units: Units = NATURAL):
    """Transform a ModeSet or a single-frequency-part FieldSnapshot.

    On a ModeSet the multiplier is applied at each retained mode; the
    result synthesizes to the transformed field at every time. On a
    FieldSnapshot the values are moved to k space and back. Snapshots
    whose kind mixes both frequency parts are rejected: the transform
    is defined per frequency sign.
    """
    if isinstance(state, ModeSet):
        return _apply_spectral_modes(spec, state, units)
    if isinstance(state, FieldSnapshot):
        return _apply_spectral_snapshot(spec, state, units)
    raise TypeError("state must be a ModeSet or FieldSnapshot")


# ---------------------------------------------------------------------------
# time-domain kernels

def _sqrt_cell_weights(n_cells: int, dt: float) -> np.ndarray:
    """Product-integration weights for integral of F(tau) tau^(-1/2)
    over (0, n_cells*dt), F linearly interpolated between samples."""
    tau = dt * np.arange(n_cells + 1)
    root = np.sqrt(tau)
    m0 = 2.0 * np.diff(root)
    m1 = (2.0 / 3.0) * np.diff(tau * root) - tau[:-1] * m0
    w = np.zeros(n_cells + 1)
    w[:-1] += m0 - m1 / dt
    w[1:] += m1 / dt
    return w


def _fp_cell_weights(n_cells: int, dt: float) -> np.ndarray:
    """Finite-part weights for integral of F(tau) tau^(-3/2).

    The signal value at tau = 0 is subtracted before integrating; its
    own finite-part integral, -2/sqrt(W), lands on the weight of the
    first sample together with minus the sum of the remainder weights.
    """
    tau = dt * np.arange(n_cells + 1)
    w = np.zeros(n_cells + 1)
    # cell 0 against F(tau) - F(0), which is (F(dt)-F(0)) tau/dt here
    w[1] += 2.0 / np.sqrt(dt)
    if n_cells > 1:
        t_lo, t_hi = tau[1:-1], tau[2:]
        m0 = 2.0 * (1.0 / np.sqrt(t_lo) - 1.0 / np.sqrt(t_hi))
        m1 = 2.0 * (np.sqrt(t_hi) - np.sqrt(t_lo)) - t_lo * m0
        w[1:-1] += m0 - m1 / dt
        w[2:] += m1 / dt
    w[0] = -2.0 / np.sqrt(n_cells * dt) - w.sum()
    return w


def _kernel(spec: TransformSpec, n_cells: int, dt: float,
            units: Units) -> tuple[np.ndarray, str]:
    """Convolution weights and orientation for one transform kind.

    Returns (v, orientation). For orientation 'past', output sample i
    is sum_j v[j] F[i - j]; for 'future', sum_j v[j] F[i + j]; for
    'both', v has length 2*n_cells + 1 and index n_cells + d weights
    F[i - d].
    """
    base = spec.kind.removeprefix("inv ")
    if spec.inverse_power:
        c = 1.0 / np.sqrt(np.pi * units.hbar)
        w = _sqrt_cell_weights(n_cells, dt)
    else:
        c = -np.sqrt(units.hbar / (4.0 * np.pi))
        w = _fp_cell_weights(n_cells, dt)
    if base == "T+":
        return c * w, "past"
    if base == "T-":
        return c * w, "future"
    s = 1.0 if base == "Tx" else -1.0
    v = np.zeros(2 * n_cells + 1)
    v[n_cells:] += c * w / np.sqrt(2.0)          # past half
    v[n_cells::-1] += s * c * w / np.sqrt(2.0)   # future half
    return v, "both"


def apply_timedomain(spec: TransformSpec, series: TimeSeries,
                     window: float, units: Units = NATURAL) -> TimeSeries:
    """Convolve a sampled signal with the transform's singular kernel.

    window is the truncation length W of the kernel support, snapped to
    a whole number of sample cells. The output covers the input times
    at which the full window of history (T+ kinds), future (T- kinds),
    or both (Tx, Ty) is available, so it is shorter than the input by
    one or two windows. On a band-limited signal the result approaches
    the exact spectral action at rate O((w W)^(-1/2)).
    """
    if window <= 0:
        raise ValueError("window must be positive")
    n_cells = int(round(window / series.dt))
    if n_cells < 1:
        raise ValueError("window spans no sample cells at this dt")

    v, orientation = _kernel(spec, n_cells, series.dt, units)
    need = len(v)
    if len(series.samples) < need:
        raise ValueError(
            f"series has {len(series.samples)} samples but the window "
            f"needs {need}")

    # convolve(F, v, valid)[m] = sum_j v[j] F[m + len(v) - 1 - j]
    if orientation == "past":
        out = np.convolve(series.samples, v, mode="valid")
        t0 = series.t0 + n_cells * series.dt
    elif orientation == "future":
        out = np.convolve(series.samples, v[::-1], mode="valid")
        t0 = series.t0
    else:
        # v[n_cells + d] already weights F[i - d]
        out = np.convolve(series.samples, v, mode="valid")
        t0 = series.t0 + n_cells * series.dt
    return TimeSeries(t0=t0, dt=series.dt, samples=out)
