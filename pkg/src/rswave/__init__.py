"""Helicity-mode synthesis of electromagnetic wavefunctions on periodic grids.

Layers, bottom up: kspace (grids and the circular polarization basis),
synthesis (mode sets to real-space snapshots), transforms (half-order
spectral weightings, applied as multipliers or as windowed time-domain
convolutions), dynamics (spectral and leapfrog propagation), and
observables (energy, quanta, localization). scenario/runner/cli drive
pipelines from flat key = value files.
"""

from .errors import (EmptyGridError, ScenarioParseError,
                     ScenarioValidationError, SingularModeError,
                     StabilityError, UndefinedRatioError)
from .units import NATURAL, Units, natural, si
from .kspace import (MINUS, PLUS, SIGMA, HelicityBasis, KGrid, build_grid,
                     helicity_basis, lattice_kvec, mode_indices, reverse_k)
from .synthesis import (FIELD_KINDS, PARTS, FieldSnapshot, ModeSet,
                        attached_basis, fields_from_potential,
                        gaussian_wavepacket, mode_pair, modes_with,
                        pairing_defect, random_modes, rs_from_DB,
                        symmetrize, synthesize, synthesize_phi,
                        synthesize_potential, synthesize_psi, zero_modes)
from .transforms import (ENERGY_TO_PHOTON, KINDS, PHOTON_TO_ENERGY,
                         TimeSeries, TransformSpec, apply_spectral,
                         apply_timedomain, spectral_multiplier)
from .dynamics import (SCHEMES, Spin1Generators, Trajectory, curl_spectral,
                       curl_vs_L_check, evolve_leapfrog, evolve_spectral,
                       schrodinger_residual, spectral_trajectory,
                       spin1_generators, stability_limit)
from .observables import (LocalizationTable, ObservableReport, VolumeBox,
                          VolumeRow, energy_total, local_observables,
                          localization_study, narrowband_ratio,
                          number_total, sinc_overlap)
from .scenario import Scenario, Stage, parse_scenario
from .runner import RunSummary, StageResult, run

__version__ = "0.1.0"

__all__ = [
    "EmptyGridError", "ScenarioParseError", "ScenarioValidationError",
    "SingularModeError", "StabilityError", "UndefinedRatioError",
    "NATURAL", "Units", "natural", "si",
    "MINUS", "PLUS", "SIGMA", "HelicityBasis", "KGrid", "build_grid",
    "helicity_basis", "lattice_kvec", "mode_indices", "reverse_k",
    "FIELD_KINDS", "PARTS", "FieldSnapshot", "ModeSet", "attached_basis",
    "fields_from_potential", "gaussian_wavepacket", "mode_pair",
    "modes_with", "pairing_defect", "random_modes", "rs_from_DB",
    "symmetrize", "synthesize", "synthesize_phi", "synthesize_potential",
    "synthesize_psi", "zero_modes",
    "ENERGY_TO_PHOTON", "KINDS", "PHOTON_TO_ENERGY", "TimeSeries",
    "TransformSpec", "apply_spectral", "apply_timedomain",
    "spectral_multiplier",
    "SCHEMES", "Spin1Generators", "Trajectory", "curl_spectral",
    "curl_vs_L_check", "evolve_leapfrog", "evolve_spectral",
    "schrodinger_residual", "spectral_trajectory", "spin1_generators",
    "stability_limit",
    "LocalizationTable", "ObservableReport", "VolumeBox", "VolumeRow",
    "energy_total", "local_observables", "localization_study",
    "narrowband_ratio", "number_total", "sinc_overlap",
    "Scenario", "Stage", "parse_scenario",
    "RunSummary", "StageResult", "run",
    "__version__",
]
