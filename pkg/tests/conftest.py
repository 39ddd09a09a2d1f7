"""Shared helpers: random states, unitaries and subspace specs."""

from __future__ import annotations

import numpy as np
import pytest

from qdarwin import DensityOperator, ObjectiveSubspaceSpec, PureState, TensorLayout


def qubits(*labels: str) -> TensorLayout:
    return TensorLayout([(lab, 2) for lab in labels])


def random_density(layout: TensorLayout, rng: np.random.Generator,
                   rank: int | None = None) -> DensityOperator:
    d = layout.total_dim
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    m = g @ g.conj().T
    return DensityOperator(layout, m / np.trace(m).real)


def random_pure(layout: TensorLayout, rng: np.random.Generator) -> PureState:
    d = layout.total_dim
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState(layout, v / np.linalg.norm(v))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_subspace_spec(rng: np.random.Generator,
                         environments: dict[str, tuple[str, ...]],
                         member_dim: int = 2) -> ObjectiveSubspaceSpec:
    """Random preferred basis and random disjoint subspace split per environment."""
    projectors = {}
    for name, members in environments.items():
        d_env = member_dim ** len(members)
        v = random_unitary(d_env, rng)
        split = int(rng.integers(1, d_env))
        p0 = v[:, :split] @ v[:, :split].conj().T
        p1 = v[:, split:] @ v[:, split:].conj().T
        projectors[name] = (p0, p1)
    basis = random_unitary(2, rng)
    return ObjectiveSubspaceSpec("S", basis, environments, projectors)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
