"""Scenario files: flat key = value text driving a pipeline run.

A scenario names a grid, one initial state, and an ordered list of
stages. Keys are dotted, one per line, with # comments:

    units.system = natural
    grid.n_per_axis = 16
    grid.box_length = 6.283185307179586
    grid.kappa = 0
    state.kind = wavepacket
    wavepacket.k0 = 0,0,4
    wavepacket.sigma_k = 0.8
    wavepacket.helicity = +
    wavepacket.amplitude = 1
    stage.1.kind = synthesize
    stage.1.fields = psi,phi
    stage.2.kind = observables
    stage.2.volumes = octants
    output.dir = out

Parsing is two-phase. Syntax problems (lines without =, duplicate
keys) raise ScenarioParseError carrying the line number. Everything
else is validation: unknown keys, missing required keys, and any value
violating the preconditions of the operation it will drive raise
ScenarioValidationError naming the key. Grid-dependent bounds (mode
indices inside the retained band, cutoff below the lattice maximum)
are checked here in closed form so a validated scenario cannot fail
state construction later.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ScenarioParseError, ScenarioValidationError
from .synthesis import FIELD_KINDS
from .transforms import KINDS

STATE_KINDS = ("wavepacket", "modes", "random")
STAGE_KINDS = ("synthesize", "transform", "evolve", "observables",
               "localization_study", "timedomain_demo")
VOLUME_SETS = ("full", "halves_x", "halves_y", "halves_z", "octants")
UNIT_SYSTEMS = ("natural", "si")
COMPARE_MODES = ("phi_direct",)


@dataclass(frozen=True)
class Stage:
    index: int
    kind: str
    params: dict


@dataclass(frozen=True)
class Scenario:
    units_system: str
    n_per_axis: int
    box_length: float
    kappa: float
    state_kind: str
    wavepacket: dict
    modes: tuple
    seed: int | None
    stages: tuple
    out_dir: str
    echo: tuple = field(repr=False, default=())


def _tokenize(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError(f"expected key = value, got {line!r}",
                                     line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ScenarioParseError("empty key", line=lineno)
        if key in pairs:
            raise ScenarioParseError(f"duplicate key {key!r}", line=lineno)
        pairs[key] = value
    return pairs


class _Reader:
    """Typed, tracked access to the raw key set."""

    def __init__(self, pairs: dict[str, str]):
        self.pairs = pairs
        self.seen: set[str] = set()

    def has(self, key: str) -> bool:
        return key in self.pairs

    def raw(self, key: str, default=None, required=False) -> str | None:
        if key not in self.pairs:
            if required:
                raise ScenarioValidationError("required key is missing",
                                              key=key)
            return default
        self.seen.add(key)
        return self.pairs[key]

    def string(self, key, choices, default=None, required=False):
        v = self.raw(key, default=default, required=required)
        if v is not None and v not in choices:
            raise ScenarioValidationError(
                f"must be one of {', '.join(choices)}; got {v!r}", key=key)
        return v

    def integer(self, key, default=None, required=False, minimum=None):
        v = self.raw(key, required=required)
        if v is None:
            return default
        try:
            n = int(v)
        except ValueError:
            raise ScenarioValidationError(f"not an integer: {v!r}",
                                          key=key) from None
        if minimum is not None and n < minimum:
            raise ScenarioValidationError(f"must be at least {minimum}",
                                          key=key)
        return n

    def number(self, key, default=None, required=False,
               minimum=None, exclusive=False, maximum=None):
        v = self.raw(key, required=required)
        if v is None:
            return default
        try:
            x = float(v)
        except ValueError:
            raise ScenarioValidationError(f"not a number: {v!r}",
                                          key=key) from None
        if not np.isfinite(x):
            raise ScenarioValidationError("must be finite", key=key)
        if minimum is not None:
            if exclusive and x <= minimum:
                raise ScenarioValidationError(
                    f"must be greater than {minimum}", key=key)
            if not exclusive and x < minimum:
                raise ScenarioValidationError(
                    f"must be at least {minimum}", key=key)
        if maximum is not None and x > maximum:
            raise ScenarioValidationError(f"must be at most {maximum}",
                                          key=key)
        return x

    def int_triple(self, key, required=False):
        v = self.raw(key, required=required)
        if v is None:
            return None
        parts = [p.strip() for p in v.split(",")]
        if len(parts) != 3:
            raise ScenarioValidationError(
                f"expected three comma-separated integers, got {v!r}",
                key=key)
        try:
            return tuple(int(p) for p in parts)
        except ValueError:
            raise ScenarioValidationError(
                f"expected three comma-separated integers, got {v!r}",
                key=key) from None

    def complex_pair(self, key, default=None, required=False):
        v = self.raw(key, required=required)
        if v is None:
            return default
        parts = [p.strip() for p in v.split(",")]
        if len(parts) > 2:
            raise ScenarioValidationError(
                f"expected 're' or 're,im', got {v!r}", key=key)
        try:
            re = float(parts[0])
            im = float(parts[1]) if len(parts) == 2 else 0.0
        except ValueError:
            raise ScenarioValidationError(
                f"expected 're' or 're,im', got {v!r}", key=key) from None
        return complex(re, im)

    def name_list(self, key, choices, default):
        v = self.raw(key)
        if v is None:
            return list(default)
        names = [p.strip() for p in v.split(",") if p.strip()]
        if not names:
            raise ScenarioValidationError("empty list", key=key)
        for name in names:
            if name not in choices:
                raise ScenarioValidationError(
                    f"unknown name {name!r}; choose from "
                    f"{', '.join(choices)}", key=key)
        return names


def _stage_indices(pairs: dict[str, str]) -> list[int]:
    found = set()
    for key in pairs:
        parts = key.split(".")
        if parts[0] == "stage":
            if len(parts) < 3 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ScenarioValidationError(
                    "stage keys look like stage.<i>.<param> with i >= 1",
                    key=key)
            found.add(int(parts[1]))
    for i in range(1, len(found) + 1):
        if i not in found:
            raise ScenarioValidationError(
                f"stage indices must be consecutive from 1; {i} is missing",
                key=f"stage.{i}.kind")
    return sorted(found)


def _max_retained_index(n: int) -> int:
    # largest per-axis mode number that can survive the Nyquist mask
    return (n - 1) // 2


def _check_mode_triple(m, n, dk, kappa, key):
    top = _max_retained_index(n)
    if any(abs(c) > top for c in m):
        raise ScenarioValidationError(
            f"mode index {m} outside the retained band "
            f"(per-axis |index| <= {top})", key=key)
    kmag = dk * float(np.linalg.norm(m))
    if kmag < max(kappa, dk / 2.0):
        raise ScenarioValidationError(
            f"mode index {m} falls below the cutoff", key=key)
    return kmag


def parse_scenario(text: str) -> Scenario:
    pairs = _tokenize(text)
    r = _Reader(pairs)
    echo: list[tuple[str, str]] = []

    def note(key, value):
        echo.append((key, value))

    units_system = r.string("units.system", UNIT_SYSTEMS, default="natural")
    note("units.system", units_system)

    n = r.integer("grid.n_per_axis", required=True, minimum=2)
    box_length = r.number("grid.box_length", required=True,
                          minimum=0.0, exclusive=True)
    kappa = r.number("grid.kappa", default=0.0, minimum=0.0)
    dk = 2.0 * np.pi / box_length
    kmax_lattice = dk * (n // 2) * np.sqrt(3.0)
    if kappa >= kmax_lattice:
        raise ScenarioValidationError(
            f"cutoff removes every lattice mode (max |k| is "
            f"{kmax_lattice:.6g})", key="grid.kappa")
    note("grid.n_per_axis", str(n))
    note("grid.box_length", repr(box_length))
    note("grid.kappa", repr(kappa))

    state_kind = r.string("state.kind", STATE_KINDS, required=True)
    note("state.kind", state_kind)

    wavepacket: dict = {}
    modes: list = []
    seed = None
    if state_kind == "wavepacket":
        k0 = r.int_triple("wavepacket.k0", required=True)
        kmag = _check_mode_triple(k0, n, dk, 0.0, "wavepacket.k0")
        if kmag <= kappa:
            raise ScenarioValidationError(
                "|k0| must exceed the cutoff kappa", key="wavepacket.k0")
        sigma_k = r.number("wavepacket.sigma_k", required=True,
                           minimum=0.0, exclusive=True)
        helicity = r.string("wavepacket.helicity", ("+", "-"), default="+")
        amplitude = r.complex_pair("wavepacket.amplitude", default=1.0 + 0j)
        wavepacket = {"k0": k0, "sigma_k": sigma_k,
                      "helicity": +1 if helicity == "+" else -1,
                      "amplitude": amplitude}
        note("wavepacket.k0", ",".join(str(c) for c in k0))
        note("wavepacket.sigma_k", repr(sigma_k))
        note("wavepacket.helicity", helicity)
        note("wavepacket.amplitude",
             f"{amplitude.real!r},{amplitude.imag!r}")
    elif state_kind == "modes":
        i = 1
        while r.has(f"mode.{i}.k"):
            key = f"mode.{i}.k"
            m = r.int_triple(key, required=True)
            _check_mode_triple(m, n, dk, kappa, key)
            helicity = r.string(f"mode.{i}.helicity", ("+", "-"),
                                default="+")
            amplitude = r.complex_pair(f"mode.{i}.amplitude", required=True)
            modes.append({"k": m, "helicity": +1 if helicity == "+" else -1,
                          "amplitude": amplitude})
            note(f"mode.{i}.k", ",".join(str(c) for c in m))
            note(f"mode.{i}.helicity", helicity)
            note(f"mode.{i}.amplitude",
                 f"{amplitude.real!r},{amplitude.imag!r}")
            i += 1
        if not modes:
            raise ScenarioValidationError(
                "state.kind = modes needs at least mode.1.k", key="mode.1.k")
    else:
        seed = r.integer("random.seed", default=None, minimum=0)
        note("random.seed", "unset" if seed is None else str(seed))

    stages: list[Stage] = []
    for i in _stage_indices(pairs):
        prefix = f"stage.{i}"
        kind = r.string(f"{prefix}.kind", STAGE_KINDS, required=True)
        note(f"{prefix}.kind", kind)
        params: dict = {}
        if kind == "synthesize":
            params["t"] = r.number(f"{prefix}.t", default=0.0)
            params["fields"] = r.name_list(f"{prefix}.fields", FIELD_KINDS,
                                           default=("psi", "phi"))
            note(f"{prefix}.t", repr(params["t"]))
            note(f"{prefix}.fields", ",".join(params["fields"]))
        elif kind == "transform":
            tkind = r.raw(f"{prefix}.transform", required=True)
            if tkind not in KINDS:
                raise ScenarioValidationError(
                    f"unknown transform {tkind!r}; the eight kinds are "
                    f"{', '.join(KINDS)}", key=f"{prefix}.transform")
            params["transform"] = tkind
            params["compare"] = r.string(f"{prefix}.compare", COMPARE_MODES,
                                         default=None)
            note(f"{prefix}.transform", tkind)
            note(f"{prefix}.compare", params["compare"] or "none")
        elif kind == "evolve":
            params["scheme"] = r.string(f"{prefix}.scheme",
                                        ("spectral", "leapfrog"),
                                        default="spectral")
            params["dt"] = r.number(f"{prefix}.dt", default=None,
                                    minimum=0.0, exclusive=True)
            params["steps"] = r.integer(f"{prefix}.steps", default=10,
                                        minimum=1)
            params["record_every"] = r.integer(f"{prefix}.record_every",
                                               default=1, minimum=1)
            note(f"{prefix}.scheme", params["scheme"])
            note(f"{prefix}.dt", "auto" if params["dt"] is None
                 else repr(params["dt"]))
            note(f"{prefix}.steps", str(params["steps"]))
            note(f"{prefix}.record_every", str(params["record_every"]))
        elif kind == "observables":
            params["t"] = r.number(f"{prefix}.t", default=0.0)
            params["volumes"] = r.string(f"{prefix}.volumes", VOLUME_SETS,
                                         default="full")
            note(f"{prefix}.t", repr(params["t"]))
            note(f"{prefix}.volumes", params["volumes"])
        elif kind == "localization_study":
            params["band_index"] = r.integer(f"{prefix}.band_index",
                                             default=1, minimum=1)
            if params["band_index"] > _max_retained_index(n):
                raise ScenarioValidationError(
                    "band exceeds the retained lattice range",
                    key=f"{prefix}.band_index")
            params["shrink"] = r.number(f"{prefix}.shrink", default=1.0,
                                        minimum=0.0, exclusive=True,
                                        maximum=1.0)
            note(f"{prefix}.band_index", str(params["band_index"]))
            note(f"{prefix}.shrink", repr(params["shrink"]))
        else:  # timedomain_demo
            tkind = r.raw(f"{prefix}.transform", required=True)
            if tkind not in KINDS:
                raise ScenarioValidationError(
                    f"unknown transform {tkind!r}; the eight kinds are "
                    f"{', '.join(KINDS)}", key=f"{prefix}.transform")
            params["transform"] = tkind
            params["omega"] = r.number(f"{prefix}.omega", default=1.0,
                                       minimum=0.0, exclusive=True)
            params["window"] = r.number(f"{prefix}.window", default=50.0,
                                        minimum=0.0, exclusive=True)
            params["dt"] = r.number(f"{prefix}.dt", default=0.01,
                                    minimum=0.0, exclusive=True)
            default_duration = 3.0 * params["window"]
            params["duration"] = r.number(f"{prefix}.duration",
                                          default=default_duration,
                                          minimum=0.0, exclusive=True)
            if params["duration"] < 2.0 * params["window"] + 10 * params["dt"]:
                raise ScenarioValidationError(
                    "duration must cover at least two windows",
                    key=f"{prefix}.duration")
            if params["window"] < params["dt"]:
                raise ScenarioValidationError(
                    "window must span at least one sample cell",
                    key=f"{prefix}.window")
            for p in ("transform", "omega", "window", "dt", "duration"):
                v = params[p]
                note(f"{prefix}.{p}", v if isinstance(v, str) else repr(v))
        stages.append(Stage(index=i, kind=kind, params=params))

    out_dir = r.raw("output.dir", default="out")
    note("output.dir", out_dir)

    unknown = sorted(set(pairs) - r.seen)
    if unknown:
        raise ScenarioValidationError("unknown key", key=unknown[0])

    return Scenario(units_system=units_system, n_per_axis=n,
                    box_length=box_length, kappa=kappa,
                    state_kind=state_kind, wavepacket=wavepacket,
                    modes=tuple(modes), seed=seed, stages=tuple(stages),
                    out_dir=out_dir, echo=tuple(echo))
