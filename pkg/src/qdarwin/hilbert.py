"""Tensor-structured complex linear algebra on labeled subsystems.

States and operators carry a :class:`TensorLayout` naming each subsystem, so
partial traces, operator embeddings and measurements are addressed by label
rather than by raw index arithmetic.  All values are immutable after
construction and every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .tolerances import TOL


class InvariantViolation(ValueError):
    """A numerical invariant of a domain type or operation was violated."""


def _prod(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b, values, 1)


# ---------------------------------------------------------------------------
# Layouts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TensorLayout:
    """Ordered list of labeled subsystems with local dimensions.

    The construction order is canonical: every operation preserves it, and
    reduced layouts keep the relative order of the surviving subsystems.
    """

    subsystems: tuple[tuple[str, int], ...]

    MAX_TOTAL_DIM = 256  # dense matrices only; eight qubits is the envelope

    def __init__(self, subsystems: Sequence[tuple[str, int]]):
        subs = tuple((str(label), int(dim)) for label, dim in subsystems)
        labels = [label for label, _ in subs]
        if len(set(labels)) != len(labels):
            raise InvariantViolation(f"duplicate subsystem labels in {labels}")
        if not subs:
            raise InvariantViolation("layout needs at least one subsystem")
        for label, dim in subs:
            if dim < 1:
                raise InvariantViolation(f"subsystem {label!r} has dim {dim} < 1")
        total = _prod(dim for _, dim in subs)
        if total > self.MAX_TOTAL_DIM:
            raise InvariantViolation(
                f"total dimension {total} exceeds the supported maximum "
                f"{self.MAX_TOTAL_DIM}"
            )
        object.__setattr__(self, "subsystems", subs)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def total_dim(self) -> int:
        return _prod(self.dims)

    def __len__(self) -> int:
        return len(self.subsystems)

    def dim_of(self, label: str) -> int:
        for name, dim in self.subsystems:
            if name == label:
                return dim
        raise InvariantViolation(f"unknown subsystem label {label!r}")

    def axis_of(self, label: str) -> int:
        for k, (name, _) in enumerate(self.subsystems):
            if name == label:
                return k
        raise InvariantViolation(f"unknown subsystem label {label!r}")

    def subset(self, labels: Iterable[str]) -> "TensorLayout":
        """Layout of the given subsystems, in canonical (original) order."""
        wanted = set(labels)
        unknown = wanted - set(self.labels)
        if unknown:
            raise InvariantViolation(f"unknown subsystem labels {sorted(unknown)}")
        return TensorLayout([s for s in self.subsystems if s[0] in wanted])


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

def _as_complex(matrix: np.ndarray) -> np.ndarray:
    out = np.asarray(matrix, dtype=np.complex128)
    out = out.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector over a :class:`TensorLayout`."""

    layout: TensorLayout
    amplitudes: np.ndarray = field(repr=False)

    def __init__(self, layout: TensorLayout, amplitudes: np.ndarray):
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1).copy()
        if amps.shape[0] != layout.total_dim:
            raise InvariantViolation(
                f"amplitude length {amps.shape[0]} != layout dim {layout.total_dim}"
            )
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > TOL.pure_norm:
            raise InvariantViolation(f"state vector norm^2 = {norm_sq} is not 1")
        amps.flags.writeable = False
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", amps)

    def to_density(self) -> "DensityOperator":
        return DensityOperator(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian positive-semidefinite matrix over a :class:`TensorLayout`.

    The trace may lie anywhere in [0, 1]: objectivity operations subnormalize.
    """

    layout: TensorLayout
    matrix: np.ndarray = field(repr=False)

    def __init__(self, layout: TensorLayout, matrix: np.ndarray):
        mat = _as_complex(matrix)
        d = layout.total_dim
        if mat.shape != (d, d):
            raise InvariantViolation(f"matrix shape {mat.shape} != layout dim ({d}, {d})")
        herm_dev = float(np.max(np.abs(mat - mat.conj().T)))
        if herm_dev > TOL.hermiticity:
            raise InvariantViolation(f"matrix is not Hermitian (max dev {herm_dev:.3e})")
        eigs = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
        if eigs[0] < -TOL.psd_min_eig:
            raise InvariantViolation(f"matrix has negative eigenvalue {eigs[0]:.3e}")
        tr = complex(np.trace(mat))
        if tr.real < -TOL.trace_lower_slack or tr.real > 1.0 + TOL.trace_upper_slack:
            raise InvariantViolation(f"trace {tr.real} outside [0, 1]")
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "matrix", mat)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def computational_ket(layout: TensorLayout, digits: Sequence[int]) -> PureState:
    """Basis state |digits> with one digit per subsystem in layout order."""
    digits = list(digits)
    if len(digits) != len(layout):
        raise InvariantViolation("one digit per subsystem required")
    index = 0
    for digit, dim in zip(digits, layout.dims):
        if not 0 <= digit < dim:
            raise InvariantViolation(f"digit {digit} out of range for dim {dim}")
        index = index * dim + digit
    amps = np.zeros(layout.total_dim, dtype=np.complex128)
    amps[index] = 1.0
    return PureState(layout, amps)


def maximally_mixed(layout: TensorLayout) -> DensityOperator:
    d = layout.total_dim
    return DensityOperator(layout, np.eye(d, dtype=np.complex128) / d)


# ---------------------------------------------------------------------------
# Operator embedding
# ---------------------------------------------------------------------------

def embed_operator(layout: TensorLayout, op: np.ndarray, targets: Sequence[str]) -> np.ndarray:
    """Embed ``op`` (given in the order of ``targets``) into the full space.

    Identity acts on every subsystem not listed.  Returns a dense matrix in
    the canonical subsystem order of ``layout``.
    """
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise InvariantViolation(f"duplicate target labels {targets}")
    rest = [lab for lab in layout.labels if lab not in targets]
    unknown = set(targets) - set(layout.labels)
    if unknown:
        raise InvariantViolation(f"unknown target labels {sorted(unknown)}")

    dims_t = [layout.dim_of(lab) for lab in targets]
    dims_r = [layout.dim_of(lab) for lab in rest]
    op = np.asarray(op, dtype=np.complex128)
    dt = _prod(dims_t)
    if op.shape != (dt, dt):
        raise InvariantViolation(f"operator shape {op.shape} != target dim ({dt}, {dt})")

    full = np.kron(op, np.eye(_prod(dims_r), dtype=np.complex128))
    # Axes currently ordered (targets..., rest...); permute to canonical order.
    scrambled = targets + rest
    perm = [scrambled.index(lab) for lab in layout.labels]
    n = len(layout)
    tensor = full.reshape(dims_t + dims_r + dims_t + dims_r)
    tensor = tensor.transpose(perm + [n + p for p in perm])
    d = layout.total_dim
    return np.ascontiguousarray(tensor.reshape(d, d))


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def tensor_product(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """Kronecker product of two operators on disjoint subsystem sets."""
    overlap = set(a.layout.labels) & set(b.layout.labels)
    if overlap:
        raise InvariantViolation(f"duplicate labels in tensor product: {sorted(overlap)}")
    layout = TensorLayout(a.layout.subsystems + b.layout.subsystems)
    return DensityOperator(layout, np.kron(a.matrix, b.matrix))


def partial_trace(rho: DensityOperator, keep: Iterable[str]) -> DensityOperator:
    """Trace out every subsystem not in ``keep``; trace is preserved."""
    keep = set(keep)
    if not keep:
        raise InvariantViolation("keep set must be nonempty")
    unknown = keep - set(rho.layout.labels)
    if unknown:
        raise InvariantViolation(f"unknown subsystem labels {sorted(unknown)}")
    if keep == set(rho.layout.labels):
        return rho

    layout = rho.layout
    dims = list(layout.dims)
    tensor = rho.matrix.reshape(dims + dims)
    traced_axes = [k for k, lab in enumerate(layout.labels) if lab not in keep]
    remaining = len(layout)
    for done, axis in enumerate(traced_axes):
        ax = axis - done  # earlier traces shifted the row axes left
        tensor = np.trace(tensor, axis1=ax, axis2=ax + remaining)
        remaining -= 1
    new_layout = layout.subset(keep)
    d = new_layout.total_dim
    return DensityOperator(new_layout, tensor.reshape(d, d))


def eigvals_hermitian(h: np.ndarray) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, descending.

    The input is symmetrized as (M + M^dag)/2 before decomposition to
    suppress accumulated floating-point asymmetry.
    """
    h = np.asarray(h, dtype=np.complex128)
    dev = float(np.max(np.abs(h - h.conj().T)))
    if dev > TOL.hermiticity:
        raise InvariantViolation(f"matrix is not Hermitian (max dev {dev:.3e})")
    eigs = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    return eigs[::-1].copy()


def trace_norm(matrix: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(eigvals_hermitian(matrix))))


def trace_norm_distance(a: DensityOperator, b: DensityOperator) -> float:
    """Trace-norm distance ||a - b||_1 between operators on the same layout."""
    if a.layout.subsystems != b.layout.subsystems:
        raise InvariantViolation("layout mismatch in trace_norm_distance")
    # Subtract in a canonical operand order so the distance is exactly
    # symmetric (eigvalsh of M and -M can differ in the last ulp).
    if a.matrix.tobytes() <= b.matrix.tobytes():
        return trace_norm(a.matrix - b.matrix)
    return trace_norm(b.matrix - a.matrix)


def born_probabilities(rho: DensityOperator, effects: Sequence[np.ndarray]) -> np.ndarray:
    """Outcome probabilities tr[E_k rho] for a list of effect operators.

    A single arbitrary effect is allowed (witness-style evaluation); a list of
    two or more effects must form a POVM summing to the identity.
    """
    d = rho.layout.total_dim
    mats = [np.asarray(e, dtype=np.complex128) for e in effects]
    for e in mats:
        if e.shape != (d, d):
            raise InvariantViolation(f"effect shape {e.shape} != state dim ({d}, {d})")
        low = float(np.linalg.eigvalsh(0.5 * (e + e.conj().T))[0])
        if low < -TOL.effect_negativity:
            raise InvariantViolation(f"effect has negative eigenvalue {low:.3e}")
    if len(mats) > 1:
        total = sum(mats)
        dev = float(np.max(np.abs(total - np.eye(d))))
        if dev > TOL.povm_completeness:
            raise InvariantViolation(f"effects do not sum to identity (max dev {dev:.3e})")
    probs = np.array([float(np.trace(e @ rho.matrix).real) for e in mats])
    if np.any(probs < -TOL.prob_clip) or np.any(probs > 1.0 + TOL.prob_clip):
        raise InvariantViolation("probability outside [0, 1] beyond tolerance")
    return np.clip(probs, 0.0, 1.0)


def sample_outcome(
    probabilities: np.ndarray,
    rng: np.random.Generator,
    size: int | None = None,
):
    """Draw outcome indices distributed per ``probabilities``.

    Entries may dip below zero by at most a rounding tolerance and are
    renormalized by their sum.  An all-zero vector signals a null branch and
    returns ``None``.  Deterministic given the generator state.
    """
    p = np.asarray(probabilities, dtype=float)
    if np.any(p < -TOL.sample_negativity):
        raise InvariantViolation(f"negative probability entry {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    total = float(p.sum())
    if total == 0.0:
        return None
    cdf = np.cumsum(p / total)
    cdf[-1] = 1.0
    if size is None:
        return int(np.searchsorted(cdf, rng.random(), side="right"))
    return np.searchsorted(cdf, rng.random(size), side="right").astype(np.intp)
