"""JSON and CSV serialization: state files, protocol configs, sweep specs.

State files carry a layout descriptor plus the row-major complex matrix as
[re, im] pairs, so they are bit-exact, language-neutral and diff-able.
Config parsing reports the offending field by name on any malformed input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .channels import NoiseConfig
from .hilbert import DensityOperator, InvariantViolation, TensorLayout
from .objectivity import (
    ObjectiveSubspaceSpec,
    computational_spec,
    parity_spec,
    spec_from_basis_vectors,
)
from .protocol import (
    DEFAULT_SEED,
    CNOT_IDEAL,
    ProtocolConfig,
    WitnessReport,
)


class ConfigError(ValueError):
    """A config document is malformed; the message names the offending field."""


# ---------------------------------------------------------------------------
# State files
# ---------------------------------------------------------------------------

def state_to_dict(rho: DensityOperator) -> dict:
    matrix = [
        [[float(entry.real), float(entry.imag)] for entry in row]
        for row in rho.matrix
    ]
    return {
        "layout": [[label, dim] for label, dim in rho.layout.subsystems],
        "matrix": matrix,
    }


def state_from_dict(data: Mapping[str, Any]) -> DensityOperator:
    try:
        layout = TensorLayout([(str(lab), int(dim)) for lab, dim in data["layout"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"field 'layout': {exc}") from exc
    try:
        rows = data["matrix"]
        matrix = np.array(
            [[complex(re, im) for re, im in row] for row in rows],
            dtype=np.complex128,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"field 'matrix': {exc}") from exc
    return DensityOperator(layout, matrix)


def save_state(rho: DensityOperator, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(rho), sort_keys=True))


def load_state(path: str | Path) -> DensityOperator:
    return state_from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# Subspace specs
# ---------------------------------------------------------------------------

def spec_by_name(name: str) -> ObjectiveSubspaceSpec:
    if name == "parity2":
        return parity_spec(2)
    if name == "computational":
        return computational_spec(4)
    raise ConfigError(f"field 'subspace': unknown preset {name!r}")


def spec_from_dict(data: Mapping[str, Any]) -> ObjectiveSubspaceSpec:
    """Custom spec from lists of spanning basis vectors per environment per index."""
    try:
        system_label = str(data.get("system_label", "S"))
        environments = {
            str(name): tuple(str(m) for m in members)
            for name, members in data["environments"].items()
        }
        raw = data["basis_vectors"]
        vectors = {
            str(name): [
                [np.array([complex(re, im) for re, im in vec]) for vec in index_vectors]
                for index_vectors in per_index
            ]
            for name, per_index in raw.items()
        }
        if "system_basis" in data:
            system_basis = np.array(
                [[complex(re, im) for re, im in row] for row in data["system_basis"]]
            )
        else:
            dim = len(next(iter(vectors.values())))
            system_basis = np.eye(dim, dtype=np.complex128)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"field 'subspace': {exc}") from exc
    return spec_from_basis_vectors(system_label, system_basis, environments, vectors)


def resolve_subspace(value: Any) -> ObjectiveSubspaceSpec | None:
    if value is None:
        return None
    if isinstance(value, str):
        return spec_by_name(value)
    if isinstance(value, Mapping):
        return spec_from_dict(value)
    raise ConfigError("field 'subspace': expected a preset name or a spec object")


# ---------------------------------------------------------------------------
# Protocol configs
# ---------------------------------------------------------------------------

def _require(data: Mapping[str, Any], key: str, kind, path: str):
    if key not in data:
        raise ConfigError(f"field '{path}{key}': missing")
    value = data[key]
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{path}{key}': {exc}") from exc


def _optional(data: Mapping[str, Any], key: str, kind, default, path: str):
    if key not in data or data[key] is None:
        return default
    try:
        return kind(data[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{path}{key}': {exc}") from exc


def noise_from_dict(data: Mapping[str, Any], path: str = "noise.") -> NoiseConfig:
    try:
        return NoiseConfig(
            p=_optional(data, "p", float, 0.0, path),
            mode=_optional(data, "mode", str, "mix_global", path),
            f=_optional(data, "f", float, 1.0, path),
            p_cnot=_optional(data, "p_cnot", float, 1.0, path),
        )
    except InvariantViolation as exc:
        raise ConfigError(f"field '{path.rstrip('.')}': {exc}") from exc


def config_from_dict(data: Mapping[str, Any],
                     seed_override: int | None = None) -> ProtocolConfig:
    framework = _optional(data, "framework", str, "SQD", "")
    fragment_raw = data.get("fragment", ["E1"])
    if isinstance(fragment_raw, str):
        fragment_raw = [fragment_raw]
    if not isinstance(fragment_raw, Sequence) or not fragment_raw:
        raise ConfigError("field 'fragment': expected a nonempty list of environments")
    fragment = tuple(str(f) for f in fragment_raw)
    noise = noise_from_dict(data.get("noise", {}))
    unitary: Any = data.get("unitary")
    if unitary is not None and not isinstance(unitary, str):
        try:
            unitary = np.array(
                [[complex(re, im) for re, im in row] for row in unitary]
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field 'unitary': {exc}") from exc
    shots = _optional(data, "shots", int, 0, "")
    seed = _optional(data, "seed", int, DEFAULT_SEED, "")
    if seed_override is not None:
        seed = seed_override
    cnot_model = _optional(data, "cnot_model", str, CNOT_IDEAL, "")
    subspace = resolve_subspace(data.get("subspace"))
    branch_shots = data.get("branch_shots")
    if branch_shots is not None:
        try:
            branch_shots = (int(branch_shots[0]), int(branch_shots[1]))
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"field 'branch_shots': {exc}") from exc
    replacement = None
    if data.get("replacement") is not None:
        try:
            replacement = state_from_dict(data["replacement"])
        except ConfigError as exc:
            raise ConfigError(f"field 'replacement': {exc}") from exc
    try:
        return ProtocolConfig(
            framework=framework,
            fragment=fragment,
            noise=noise,
            unitary=unitary,
            replacement=replacement,
            shots=shots,
            seed=seed,
            cnot_model=cnot_model,
            subspace=subspace,
            branch_shots=branch_shots,
        )
    except InvariantViolation as exc:
        raise ConfigError(f"config rejected: {exc}") from exc


# ---------------------------------------------------------------------------
# Sweep specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """One sweep over noise strengths and fragment choices."""

    framework: str
    noise_mode: str
    p_values: tuple[float, ...]
    fragments: tuple[tuple[str, ...], ...]
    shots: int
    seed: int
    output_path: str | None
    f: float = 1.0
    p_cnot: float = 1.0
    cnot_model: str = CNOT_IDEAL
    subspace: Any = None

    def __post_init__(self):
        if not self.p_values:
            raise ConfigError("field 'p_values': must be nonempty")
        if list(self.p_values) != sorted(self.p_values):
            raise ConfigError("field 'p_values': must be sorted ascending")
        if not self.fragments:
            raise ConfigError("field 'fragments': must be nonempty")

    def configs(self) -> list[tuple[float, tuple[str, ...], ProtocolConfig]]:
        out = []
        for fragment in self.fragments:
            for p in self.p_values:
                config = ProtocolConfig(
                    framework=self.framework,
                    fragment=fragment,
                    noise=NoiseConfig(p=p, mode=self.noise_mode, f=self.f,
                                      p_cnot=self.p_cnot),
                    shots=self.shots,
                    seed=self.seed,
                    cnot_model=self.cnot_model,
                    subspace=self.subspace,
                )
                out.append((p, fragment, config))
        return out


def sweep_from_dict(data: Mapping[str, Any],
                    seed_override: int | None = None) -> SweepSpec:
    p_values = data.get("p_values")
    if not isinstance(p_values, Sequence) or not p_values:
        raise ConfigError("field 'p_values': expected a nonempty list")
    try:
        p_tuple = tuple(float(p) for p in p_values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field 'p_values': {exc}") from exc
    fragments_raw = data.get("fragments")
    if not isinstance(fragments_raw, Sequence) or not fragments_raw:
        raise ConfigError("field 'fragments': expected a nonempty list")
    fragments = []
    for entry in fragments_raw:
        if isinstance(entry, str):
            fragments.append((entry,))
        else:
            fragments.append(tuple(str(f) for f in entry))
    seed = _optional(data, "seed", int, DEFAULT_SEED, "")
    if seed_override is not None:
        seed = seed_override
    try:
        return SweepSpec(
            framework=_optional(data, "framework", str, "SQD", ""),
            noise_mode=_optional(data, "noise_mode", str, "mix_global", ""),
            p_values=p_tuple,
            fragments=tuple(fragments),
            shots=_optional(data, "shots", int, 0, ""),
            seed=seed,
            output_path=data.get("output_path"),
            f=_optional(data, "f", float, 1.0, ""),
            p_cnot=_optional(data, "p_cnot", float, 1.0, ""),
            cnot_model=_optional(data, "cnot_model", str, CNOT_IDEAL, ""),
            subspace=resolve_subspace(data.get("subspace")),
        )
    except InvariantViolation as exc:
        raise ConfigError(f"sweep rejected: {exc}") from exc


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def report_to_json(report: WitnessReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2)


def report_from_json(text: str) -> WitnessReport:
    return WitnessReport.from_dict(json.loads(text))


SWEEP_COLUMNS = (
    "p", "fragment", "measure", "witness_max_subset",
    "witness_single_min", "witness_single_max",
    "stderr_max_subset", "successful_runs",
)

_SWEEP_HEADER_COMMENT = """\
# Sweep of the non-objectivity witness over noise strength and fragments.
# Columns:
#   p                   additional noise strength on the initial state
#   fragment            accessed environments, joined by '+'
#   measure             trace-norm non-objectivity measure of the reduced state
#   witness_max_subset  witness maximized over outcome subsets
#   witness_single_min  smallest single-outcome witness value
#   witness_single_max  largest single-outcome witness value
#   stderr_max_subset   bootstrap standard error (Monte Carlo mode; empty if exact)
#   successful_runs     successful runs across both branches (0 if exact)
"""


def sweep_rows_to_csv(rows: Sequence[Mapping[str, Any]]) -> str:
    lines = [_SWEEP_HEADER_COMMENT.rstrip("\n"), ",".join(SWEEP_COLUMNS)]
    for row in rows:
        cells = []
        for col in SWEEP_COLUMNS:
            value = row[col]
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(repr(value))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def report_to_sweep_row(p: float, fragment: Sequence[str],
                        report: WitnessReport) -> dict[str, Any]:
    return {
        "p": float(p),
        "fragment": "+".join(fragment),
        "measure": float(report.measure),
        "witness_max_subset": float(report.witness_max_subset),
        "witness_single_min": float(np.min(report.witness_single)),
        "witness_single_max": float(np.max(report.witness_single)),
        "stderr_max_subset": (None if report.stderr_max_subset is None
                              else float(report.stderr_max_subset)),
        "successful_runs": int(report.successful_runs),
    }
