"""Pipeline execution for parsed scenarios.

run() owns the output directory contract: one CSV per stage, a
deterministic summary.txt, wall-clock numbers in a separate
timings.txt (so a rerun can be compared byte for byte against the
summary), figures under figures/, and a FAILED marker naming the
stage when one errors. Numeric CSV cells carry 17 significant digits;
complex quantities are split into _re/_im columns; grid-shaped data is
flattened in C order, so the z index varies fastest.

The pipeline holds one mode-space state. transform and evolve stages
replace it; synthesize, observables, and the studies read it. An
evolve stage always advances the stored state by the exact spectral
propagator over the span its scheme integrates, so a leapfrog stage
reports discretization error without feeding that error to later
stages.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dynamics, observables, synthesis, transforms
from .kspace import MINUS, PLUS, build_grid
from .scenario import Scenario
from .units import Units, natural, si

_EXIT_TABLE = (
    "0 = run completed",
    "1 = a stage failed (see the FAILED file)",
    "2 = the scenario did not parse or validate",
)


@dataclass(frozen=True)
class StageResult:
    index: int
    kind: str
    status: str
    wall_time: float
    scalars: tuple = ()


@dataclass(frozen=True)
class RunSummary:
    status: str
    exit_code: int
    failed_stage: str
    stages: tuple
    echo: tuple = field(repr=False, default=())

    def scalar_lines(self):
        for stage in self.stages:
            for name, value in stage.scalars:
                yield f"stage.{stage.index}.{name} = {value}"


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(cell) for cell in row) + "\n")


def _resolve_units(scenario: Scenario, units_override: str | None) -> Units:
    name = units_override or scenario.units_system
    return si() if name == "si" else natural()


def _initial_state(scenario: Scenario, grid, seed_override: int | None):
    if scenario.state_kind == "wavepacket":
        wp = scenario.wavepacket
        k0 = grid.dk * np.asarray(wp["k0"], dtype=float)
        return synthesis.gaussian_wavepacket(
            grid, k0, wp["sigma_k"], helicity=wp["helicity"],
            amplitude=wp["amplitude"])
    if scenario.state_kind == "modes":
        amp = np.zeros((2, *grid.shape), dtype=complex)
        for spec in scenario.modes:
            pair = synthesis.mode_pair(grid, spec["k"], spec["helicity"],
                                       spec["amplitude"])
            amp = amp + pair.amp
        return synthesis.ModeSet(grid, amp, physical=True)
    seed = seed_override if seed_override is not None else scenario.seed
    rng = np.random.default_rng(0 if seed is None else seed)
    return synthesis.symmetrize(synthesis.random_modes(grid, rng))


def _field_energy(snapshot) -> float:
    dv = (snapshot.box_length / snapshot.grid_shape[0]) ** 3
    return float(dv * np.sum(np.abs(snapshot.values) ** 2))


def _grid_csv(grid, columns):
    """Header and row iterator for per-point vector fields."""
    idx = np.indices(grid.shape).reshape(3, -1).T.astype(float)
    header = ["ix", "iy", "iz", "x", "y", "z"]
    blocks = [idx, idx * grid.dx]
    for name, values in columns:
        flat = values.reshape(-1, 3)
        for label in "xyz":
            header += [f"{name}_{label}_re", f"{name}_{label}_im"]
        inter = np.empty((flat.shape[0], 6))
        inter[:, 0::2] = flat.real
        inter[:, 1::2] = flat.imag
        blocks.append(inter)
    return header, np.hstack(blocks)


def _stage_synthesize(state, params, units, csv_path):
    columns = []
    scalars = []
    for kind in params["fields"]:
        snap = synthesis.synthesize(state, params["t"], kind, units=units)
        columns.append((kind, snap.values))
        scalars.append((f"{kind}_l2", _fmt(np.linalg.norm(snap.values))))
        if kind in ("displacement", "magnetic", "potential"):
            scale = float(np.abs(snap.values).max()) or 1.0
            scalars.append((f"{kind}_max_imag",
                            _fmt(np.abs(snap.values.imag).max() / scale)))
    _write_csv(csv_path, *_grid_csv(state.grid, columns))
    return state, scalars, {"kind": "synthesize", "columns": columns,
                            "t": params["t"],
                            "box_length": state.grid.box_length}


def _stage_transform(state, params, units, csv_path):
    spec = transforms.TransformSpec(params["transform"])
    out = transforms.apply_spectral(spec, state, units=units)
    scalars = []
    if params["compare"] == "phi_direct":
        direct = synthesis.synthesize_phi(state, 0.0, part="both",
                                          units=units)
        routed = synthesis.synthesize_psi(out, 0.0, part="both", units=units)
        dev = float(np.abs(routed.values - direct.values).max())
        scalars.append(("max_route_deviation", _fmt(dev)))
    grid = state.grid
    sel = grid.retained
    idx = np.argwhere(sel).astype(float)
    data = np.column_stack([
        idx, grid.kvec[sel], grid.kmag[sel],
        out.amp[PLUS][sel].real, out.amp[PLUS][sel].imag,
        out.amp[MINUS][sel].real, out.amp[MINUS][sel].imag,
    ])
    _write_csv(csv_path,
               ["ix", "iy", "iz", "kx", "ky", "kz", "kmag",
                "a_plus_re", "a_plus_im", "a_minus_re", "a_minus_im"],
               data)
    scalars.append(("retained_modes", str(int(sel.sum()))))
    return out, scalars, {"kind": "transform", "modes": out}


def _stage_evolve(state, params, units, csv_path):
    grid = state.grid
    dt = params["dt"]
    if dt is None:
        dt = 0.5 * dynamics.stability_limit(grid.shape, grid.box_length,
                                            units=units)
    steps = params["steps"]
    scalars = [("dt", _fmt(dt))]
    if params["scheme"] == "spectral":
        traj = dynamics.spectral_trajectory(state, dt, steps, units=units)
        rows = [[t, _field_energy(s), float(np.abs(s.values).max())]
                for t, s in zip(traj.times, traj.states)]
        _write_csv(csv_path, ["t", "field_energy", "max_abs"], rows)
        energies = [r[1] for r in rows]
        scalars.append(("energy_drift",
                        _fmt(max(energies) - min(energies))))
    else:
        d0, b0 = synthesis.fields_from_potential(state, 0.0, units=units)
        traj = dynamics.evolve_leapfrog(d0, b0, dt, steps, units=units,
                                        record_every=params["record_every"])
        rows = []
        worst = 0.0
        for t, snap in zip(traj.times, traj.states):
            exact = synthesis.synthesize_psi(state, t, part="both",
                                             units=units)
            denom = float(np.linalg.norm(exact.values)) or 1.0
            err = float(np.linalg.norm(snap.values - exact.values)) / denom
            worst = max(worst, err)
            rows.append([t, _field_energy(snap), err])
        _write_csv(csv_path, ["t", "field_energy", "rel_error_vs_exact"],
                   rows)
        scalars.append(("max_rel_error_vs_exact", _fmt(worst)))
        if len(traj.times) >= 3:
            spacings = np.diff(traj.times)
            if np.allclose(spacings, spacings[0], rtol=1e-9):
                scalars.append(("schrodinger_residual",
                                _fmt(dynamics.schrodinger_residual(
                                    traj, units=units))))
    new_state = dynamics.evolve_spectral(state, dt * steps, units=units)
    scalars.append(("t_advanced", _fmt(dt * steps)))
    return new_state, scalars, {"kind": "evolve", "trajectory": traj}


def _volume_set(name: str, box_length: float):
    L = box_length
    if name == "full":
        return [observables.VolumeBox((0, 0, 0), (L, L, L))]
    if name.startswith("halves_"):
        axis = "xyz".index(name[-1])
        mid_hi = [L, L, L]
        mid_hi[axis] = L / 2
        mid_lo = [0.0, 0.0, 0.0]
        mid_lo[axis] = L / 2
        return [observables.VolumeBox((0, 0, 0), mid_hi),
                observables.VolumeBox(mid_lo, (L, L, L))]
    boxes = []
    for mx in (0, 1):
        for my in (0, 1):
            for mz in (0, 1):
                lower = (mx * L / 2, my * L / 2, mz * L / 2)
                upper = ((mx + 1) * L / 2, (my + 1) * L / 2,
                         (mz + 1) * L / 2)
                boxes.append(observables.VolumeBox(lower, upper))
    return boxes


def _stage_observables(state, params, units, csv_path):
    boxes = _volume_set(params["volumes"], state.grid.box_length)
    report = observables.local_observables(state, boxes, params["t"],
                                           units=units)
    rows = []
    for i, (box, row) in enumerate(zip(boxes, report.per_volume), start=1):
        rows.append([float(i), *box.lower, *box.upper,
                     row.H_local, row.N_local, row.Edot, row.Ndot])
    _write_csv(csv_path,
               ["volume", "lo_x", "lo_y", "lo_z", "hi_x", "hi_y", "hi_z",
                "h_local", "n_local", "edot", "ndot"],
               rows)
    scalars = [
        ("H_total", _fmt(report.H_total)),
        ("N_total", _fmt(report.N_total)),
        ("sum_h_local", _fmt(sum(r.H_local for r in report.per_volume))),
        ("sum_n_local", _fmt(sum(r.N_local for r in report.per_volume))),
    ]
    if report.N_total > 0.0:
        ratio, omega_bar = observables.narrowband_ratio(state, units=units)
        scalars.append(("mean_frequency", _fmt(omega_bar)))
        scalars.append(("narrowband_ratio", _fmt(ratio)))
    return state, scalars, {"kind": "observables", "report": report,
                            "boxes": boxes}


def _band_vectors(band_index: int, dk: float) -> np.ndarray:
    b = band_index
    out = [(mx * dk, my * dk, mz * dk)
           for mx in range(-b, b + 1)
           for my in range(-b, b + 1)
           for mz in range(-b, b + 1)
           if not mx == my == mz == 0]
    return np.asarray(out, dtype=float)


def _stage_localization(state, params, units, csv_path):
    L = state.grid.box_length
    side = L * params["shrink"]
    lo = (L - side) / 2.0
    box = observables.VolumeBox((lo, lo, lo),
                                (lo + side, lo + side, lo + side))
    band = _band_vectors(params["band_index"], state.grid.dk)
    table = observables.localization_study(box, band)
    m = band.shape[0]
    rows = []
    for i in range(m):
        for j in range(m):
            rows.append([float(i + 1), float(j + 1), *band[i], *band[j],
                         table.overlaps[i, j]])
    _write_csv(csv_path,
               ["i", "j", "ki_x", "ki_y", "ki_z", "kj_x", "kj_y", "kj_z",
                "overlap"],
               rows)
    scalars = [("band_size", str(m)),
               ("max_off_diagonal", _fmt(table.max_off_diagonal))]
    return state, scalars, {"kind": "localization_study", "table": table,
                            "band": band}


def _stage_timedomain(state, params, units, csv_path):
    spec = transforms.TransformSpec(params["transform"])
    omega, dt = params["omega"], params["dt"]
    n_samples = int(round(params["duration"] / dt)) + 1
    t_in = np.arange(n_samples) * dt
    series = transforms.TimeSeries(0.0, dt, np.exp(-1j * omega * t_in))
    out = transforms.apply_timedomain(spec, series, params["window"],
                                      units=units)
    mult = transforms.spectral_multiplier(spec, omega, "+", units=units)
    expected = mult * np.exp(-1j * omega * out.times)
    err = float(np.abs(out.samples - expected).max() / abs(mult))
    data = np.column_stack([out.times, out.samples.real, out.samples.imag,
                            expected.real, expected.imag])
    _write_csv(csv_path, ["t", "out_re", "out_im", "ideal_re", "ideal_im"],
               data)
    scalars = [("multiplier_re", _fmt(mult.real)),
               ("multiplier_im", _fmt(mult.imag)),
               ("max_rel_error", _fmt(err))]
    return state, scalars, {"kind": "timedomain_demo", "series": out,
                            "expected": expected}


_STAGE_FN = {
    "synthesize": _stage_synthesize,
    "transform": _stage_transform,
    "evolve": _stage_evolve,
    "observables": _stage_observables,
    "localization_study": _stage_localization,
    "timedomain_demo": _stage_timedomain,
}


def run(scenario: Scenario, out_dir: str | None = None,
        seed: int | None = None, units_system: str | None = None,
        figures: bool = True) -> RunSummary:
    units = _resolve_units(scenario, units_system)
    out = Path(out_dir if out_dir is not None else scenario.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failed_marker = out / "FAILED"
    if failed_marker.exists():
        failed_marker.unlink()

    grid = build_grid(scenario.n_per_axis, scenario.box_length,
                      kappa=scenario.kappa)
    state = _initial_state(scenario, grid, seed)

    results: list[StageResult] = []
    failed_stage = ""
    render_jobs = []
    for stage in scenario.stages:
        name = f"stage{stage.index:02d}_{stage.kind}"
        csv_path = out / f"{name}.csv"
        start = time.perf_counter()
        try:
            state, scalars, render = _STAGE_FN[stage.kind](
                state, stage.params, units, csv_path)
        except Exception as exc:
            wall = time.perf_counter() - start
            failed_stage = name
            failed_marker.write_text(
                f"{name}\n{type(exc).__name__}: {exc}\n", encoding="utf-8")
            results.append(StageResult(stage.index, stage.kind, "failed",
                                       wall,
                                       (("error", type(exc).__name__),)))
            break
        results.append(StageResult(stage.index, stage.kind, "ok",
                                   time.perf_counter() - start,
                                   tuple(scalars)))
        render_jobs.append((name, render))

    if figures and not failed_stage:
        from . import report
        report.render_figures(out / "figures", render_jobs)

    status = "failed" if failed_stage else "ok"
    summary = RunSummary(status=status, exit_code=1 if failed_stage else 0,
                         failed_stage=failed_stage, stages=tuple(results),
                         echo=scenario.echo)
    _write_summary(out / "summary.txt", summary)
    _write_timings(out / "timings.txt", summary)
    return summary


def _write_summary(path: Path, summary: RunSummary) -> None:
    lines = [f"status = {summary.status}",
             f"exit_code = {summary.exit_code}"]
    if summary.failed_stage:
        lines.append(f"failed_stage = {summary.failed_stage}")
    lines.append("")
    lines.append("[scenario]")
    lines.extend(f"{k} = {v}" for k, v in summary.echo)
    if summary.stages:
        lines.append("")
        lines.append("[results]")
        for stage in summary.stages:
            lines.append(f"stage.{stage.index}.status = {stage.status}")
            for name, value in stage.scalars:
                lines.append(f"stage.{stage.index}.{name} = {value}")
    lines.append("")
    lines.append("[exit codes]")
    lines.extend(_EXIT_TABLE)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_timings(path: Path, summary: RunSummary) -> None:
    lines = [f"stage.{s.index}.{s.kind}.seconds = {s.wall_time:.6f}"
             for s in summary.stages]
    total = sum(s.wall_time for s in summary.stages)
    lines.append(f"total.seconds = {total:.6f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
