"""Gates and noise processes for the simulated photonic circuits.

Covers unitary gate application, the depolarizing-output CNOT and its average
gate fidelity, local depolarization, global noise mixing, and the point
channel that discards part of the environment and installs a fresh
uncorrelated state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .hilbert import (
    DensityOperator,
    InvariantViolation,
    PureState,
    TensorLayout,
    embed_operator,
    partial_trace,
)
from .tolerances import TOL

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
CNOT = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]],
    dtype=np.complex128,
)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive map given by a list of Kraus operators."""

    layout: TensorLayout
    kraus_ops: tuple[np.ndarray, ...] = field(repr=False)
    trace_preserving: bool = True

    def __init__(self, layout: TensorLayout, kraus_ops: Sequence[np.ndarray],
                 trace_preserving: bool = True):
        d = layout.total_dim
        ops = tuple(np.asarray(k, dtype=np.complex128) for k in kraus_ops)
        if not ops:
            raise InvariantViolation("channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (d, d):
                raise InvariantViolation(f"Kraus shape {k.shape} != ({d}, {d})")
        total = sum(k.conj().T @ k for k in ops)
        if trace_preserving:
            dev = float(np.max(np.abs(total - np.eye(d))))
            if dev > TOL.povm_completeness:
                raise InvariantViolation(f"sum K^dag K deviates from identity by {dev:.3e}")
        else:
            top = float(np.linalg.eigvalsh(0.5 * (total + total.conj().T))[-1])
            if top > 1.0 + TOL.povm_completeness:
                raise InvariantViolation(f"sum K^dag K exceeds identity (max eig {top})")
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "trace_preserving", trace_preserving)

    def apply(self, rho: DensityOperator, targets: Sequence[str] | None = None) -> DensityOperator:
        """Apply the channel to ``rho`` on the given target labels.

        ``targets`` defaults to the channel's own layout labels; the channel
        acts as identity on every other subsystem of ``rho``.
        """
        targets = list(targets) if targets is not None else list(self.layout.labels)
        out = np.zeros_like(rho.matrix)
        for k in self.kraus_ops:
            k_full = embed_operator(rho.layout, k, targets)
            out += k_full @ rho.matrix @ k_full.conj().T
        return DensityOperator(rho.layout, out)

    @staticmethod
    def depolarizing(layout: TensorLayout, p: float) -> "KrausChannel":
        """Replacement depolarization (1-p) rho + p I/d on the whole layout."""
        _check_unit_interval(p, "p")
        d = layout.total_dim
        ops = [np.sqrt(1.0 - p) * np.eye(d, dtype=np.complex128)]
        if p > 0.0:
            scale = np.sqrt(p / d)
            for i in range(d):
                for j in range(d):
                    e = np.zeros((d, d), dtype=np.complex128)
                    e[i, j] = scale
                    ops.append(e)
        return KrausChannel(layout, ops, trace_preserving=True)

    @staticmethod
    def noisy_cnot(layout: TensorLayout, f: float) -> "KrausChannel":
        """Two-qubit CNOT followed by pair depolarization of weight 1 - f."""
        _check_unit_interval(f, "f")
        if layout.total_dim != 4:
            raise InvariantViolation("noisy CNOT channel acts on two qubits")
        ops = [np.sqrt(f) * CNOT]
        if f < 1.0:
            scale = np.sqrt((1.0 - f) / 4.0)
            for i in range(4):
                for j in range(4):
                    e = np.zeros((4, 4), dtype=np.complex128)
                    e[i, j] = scale
                    ops.append(e @ CNOT)
        return KrausChannel(layout, ops, trace_preserving=True)


@dataclass(frozen=True)
class NoiseConfig:
    """Noise parameters of a simulated run.

    p is the added-noise strength, mode selects global mixing or local
    depolarization, f is the CNOT depolarization weight and p_cnot the CNOT
    success probability used for run discarding in Monte Carlo mode.
    """

    p: float = 0.0
    mode: str = "mix_global"
    f: float = 1.0
    p_cnot: float = 1.0

    def __post_init__(self):
        _check_unit_interval(self.p, "p")
        _check_unit_interval(self.f, "f")
        if self.mode not in ("mix_global", "depolarize_local"):
            raise InvariantViolation(f"unknown noise mode {self.mode!r}")
        if not 0.0 < self.p_cnot <= 1.0:
            raise InvariantViolation(f"p_cnot {self.p_cnot} outside (0, 1]")


def _check_unit_interval(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvariantViolation(f"{name} = {value} outside [0, 1]")


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def apply_gate(rho: DensityOperator, unitary: np.ndarray,
               targets: Sequence[str]) -> DensityOperator:
    """Conjugate ``rho`` by a unitary embedded on the target subsystems."""
    u = np.asarray(unitary, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvariantViolation(f"unitary must be square, got shape {u.shape}")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if dev > TOL.unitarity:
        raise InvariantViolation(f"matrix is not unitary (max dev {dev:.3e})")
    u_full = embed_operator(rho.layout, u, targets)
    return DensityOperator(rho.layout, u_full @ rho.matrix @ u_full.conj().T)


def noisy_cnot(rho: DensityOperator, control: str, target: str, f: float) -> DensityOperator:
    """CNOT whose two acted qubits are depolarized with weight 1 - f.

    The output is f * CNOT(rho) + (1 - f) * (marginal of the rest) x I/4,
    i.e. the ideal gate output mixed with the maximally mixed state on the
    gate's own two qubits.  With f = 1 this is the ideal CNOT.
    """
    if control == target:
        raise InvariantViolation("control and target must differ")
    _check_unit_interval(f, "f")
    ideal = apply_gate(rho, CNOT, [control, target])
    if f == 1.0:
        return ideal
    # Replacement branch: the rest keeps the (CNOT-invariant) marginal, the
    # acted pair is reset to I/4.
    replaced = _replace_subsystems(ideal, [control, target],
                                   np.eye(4, dtype=np.complex128) / 4.0)
    return DensityOperator(rho.layout, f * ideal.matrix + (1.0 - f) * replaced.matrix)


def _replace_subsystems(rho: DensityOperator, labels: Sequence[str],
                        replacement_matrix: np.ndarray) -> DensityOperator:
    """Discard the listed subsystems and install ``replacement_matrix`` there."""
    labels = list(labels)
    keep = [lab for lab in rho.layout.labels if lab not in labels]
    sub_layout = rho.layout.subset(labels)
    replacement = np.asarray(replacement_matrix, dtype=np.complex128)
    if not keep:
        scaled = replacement * rho.trace
        return DensityOperator(rho.layout, _reorder_to(rho.layout, sub_layout, scaled))
    kept = partial_trace(rho, keep)
    prod = np.kron(kept.matrix, replacement)
    prod_layout = TensorLayout(kept.layout.subsystems + sub_layout.subsystems)
    return DensityOperator(rho.layout, _reorder_to(rho.layout, prod_layout, prod))


def _reorder_to(target_layout: TensorLayout, current_layout: TensorLayout,
                matrix: np.ndarray) -> np.ndarray:
    """Permute subsystem axes of ``matrix`` from current order to target order."""
    if current_layout.labels == target_layout.labels:
        return matrix
    dims = list(current_layout.dims)
    n = len(dims)
    perm = [current_layout.axis_of(lab) for lab in target_layout.labels]
    tensor = matrix.reshape(dims + dims)
    tensor = tensor.transpose(perm + [n + p for p in perm])
    d = target_layout.total_dim
    return np.ascontiguousarray(tensor.reshape(d, d))


def average_gate_fidelity(f: float) -> float:
    """Average gate fidelity (63 f + 17) / 80 of the depolarizing-output CNOT."""
    _check_unit_interval(f, "f")
    return (63.0 * f + 17.0) / 80.0


def depolarize_local(rho: DensityOperator, p: float,
                     targets: Iterable[str]) -> DensityOperator:
    """Independently depolarize each target: rho -> (1-p) rho + p I/d locally."""
    _check_unit_interval(p, "p")
    out = rho
    for label in targets:
        d = out.layout.dim_of(label)
        replaced = _replace_subsystems(out, [label], np.eye(d, dtype=np.complex128) / d)
        out = DensityOperator(out.layout, (1.0 - p) * out.matrix + p * replaced.matrix)
    return out


def mix_with_noise(rho: DensityOperator, p: float) -> DensityOperator:
    """Mix with the maximally mixed state: (1-p) rho + p I/total_dim."""
    _check_unit_interval(p, "p")
    d = rho.layout.total_dim
    noisy = np.eye(d, dtype=np.complex128) / d * rho.trace
    return DensityOperator(rho.layout, (1.0 - p) * rho.matrix + p * noisy)


def point_channel(rho: DensityOperator, discard: Iterable[str],
                  replacement: DensityOperator | PureState) -> DensityOperator:
    """Discard the listed subsystems and install the replacement state.

    Output is the kept marginal tensored with the replacement, reordered to
    the canonical layout; all correlations with the discarded block are
    destroyed.
    """
    discard = list(discard)
    if not discard:
        raise InvariantViolation("discard set must be nonempty")
    if isinstance(replacement, PureState):
        replacement = replacement.to_density()
    expected = rho.layout.subset(discard)
    if replacement.layout.subsystems != expected.subsystems:
        raise InvariantViolation(
            f"replacement layout {replacement.layout.labels} != discarded "
            f"subsystems {expected.labels}"
        )
    return _replace_subsystems(rho, discard, replacement.matrix)
