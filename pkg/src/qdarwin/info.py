"""Entropic and correlation measures plus objectivity structure checkers.

All information quantities are in bits (logarithm base 2).  The discord
minimization searches rank-1 projective qubit measurements parameterized by
Bloch angles: a coarse grid seed followed by local simplex refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.optimize import minimize

from .hilbert import (
    DensityOperator,
    InvariantViolation,
    partial_trace,
)
from .objectivity import ObjectiveSubspaceSpec
from .tolerances import TOL

MEASUREMENT_CLASS = "rank1_projective_qubit"

_DISCORD_GRID_THETA = 64
_DISCORD_GRID_PHI = 128


# ---------------------------------------------------------------------------
# Report types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationReport:
    """Mutual information, discord and Holevo information between a system
    qubit and an environment block, all in bits."""

    mutual_information: float
    discord: float
    holevo: float
    system_entropy: float
    minimizing_measurement: tuple[float, float]
    measurement_class: str = MEASUREMENT_CLASS


@dataclass(frozen=True)
class StructureVerdict:
    """Outcome of the objectivity structure checks on one bipartition.

    ``qd`` tests mutual information against system entropy; ``sqd``
    additionally requires vanishing discord; ``bipartite_sbs`` tests the
    explicit block structure; ``isbs`` further requires pure, product
    conditional states.
    """

    qd: bool
    sqd: bool
    bipartite_sbs: bool
    isbs: bool
    tolerances: dict[str, float]
    details: dict[str, float]


# ---------------------------------------------------------------------------
# Entropic measures
# ---------------------------------------------------------------------------

def von_neumann_entropy(rho: DensityOperator) -> float:
    """Entropy -sum(lambda log2 lambda) of a normalized state, in bits."""
    if abs(rho.trace - 1.0) > TOL.entropy_trace:
        raise InvariantViolation(f"entropy input has trace {rho.trace}, expected 1")
    return _entropy_of_eigs(np.linalg.eigvalsh(_herm(rho.matrix)))


def _herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _entropy_of_eigs(eigs: np.ndarray) -> float:
    lam = eigs[eigs > TOL.entropy_eig_cutoff]
    if lam.size == 0:
        return 0.0
    return float(-np.sum(lam * np.log2(lam)))


def mutual_information(rho: DensityOperator, part_a: Iterable[str],
                       part_b: Iterable[str]) -> float:
    """I(A:B) = H(A) + H(B) - H(AB) for a bipartition of the full layout."""
    a, b = set(part_a), set(part_b)
    if a & b:
        raise InvariantViolation(f"overlapping parts {sorted(a & b)}")
    if a | b != set(rho.layout.labels) or not a or not b:
        raise InvariantViolation("parts must be nonempty and cover the layout")
    h_a = von_neumann_entropy(partial_trace(rho, a))
    h_b = von_neumann_entropy(partial_trace(rho, b))
    h_ab = von_neumann_entropy(rho)
    return h_a + h_b - h_ab


# ---------------------------------------------------------------------------
# Discord minimization
# ---------------------------------------------------------------------------

def _system_first(rho: DensityOperator, system: str) -> np.ndarray:
    """State tensor reshaped to (d_S, d_E, d_S, d_E) with the system leading."""
    layout = rho.layout
    if layout.labels[0] != system:
        order = [system] + [lab for lab in layout.labels if lab != system]
        dims = list(layout.dims)
        n = len(dims)
        perm = [layout.axis_of(lab) for lab in order]
        tensor = rho.matrix.reshape(dims + dims).transpose(perm + [n + p for p in perm])
        d = layout.total_dim
        matrix = tensor.reshape(d, d)
        d_s = layout.dim_of(system)
    else:
        matrix = rho.matrix
        d_s = layout.dims[0]
    d_e = rho.layout.total_dim // d_s
    return matrix.reshape(d_s, d_e, d_s, d_e)


def _measurement_kets(theta: np.ndarray, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal qubit measurement kets for arrays of Bloch angles."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    phase = np.exp(1j * phi)
    m0 = np.stack([c, phase * s], axis=-1)
    m1 = np.stack([s, -phase * c], axis=-1)
    return m0, m1


def _conditional_entropy_batch(rho4: np.ndarray, theta: np.ndarray,
                               phi: np.ndarray) -> np.ndarray:
    """sum_i p_i H(rho_E|i) for a batch of measurement angles."""
    m0, m1 = _measurement_kets(theta, phi)
    total = np.zeros(theta.shape, dtype=float)
    for kets in (m0, m1):
        cond = np.einsum("ga,abcd,gc->gbd", kets.conj(), rho4, kets, optimize=True)
        p = np.einsum("gbb->g", cond).real
        eigs = np.linalg.eigvalsh(0.5 * (cond + np.conj(np.swapaxes(cond, -1, -2))))
        safe_p = np.where(p > TOL.conditional_skip, p, 1.0)
        lam = eigs / safe_p[:, None]
        lam = np.clip(lam.real, 0.0, None)
        terms = np.where(lam > TOL.entropy_eig_cutoff, -lam * np.log2(
            np.where(lam > TOL.entropy_eig_cutoff, lam, 1.0)), 0.0)
        total += np.where(p > TOL.conditional_skip, p * terms.sum(axis=-1), 0.0)
    return total


def quantum_discord(rho: DensityOperator, system: str,
                    environment: Iterable[str]) -> tuple[float, tuple[float, float]]:
    """Minimized discord of a qubit system with an environment block.

    Returns the discord value (clamped at zero) and the minimizing Bloch
    angles (theta, phi).  Grid ties break toward the lexicographically
    smallest angles.  Only qubit systems are supported.
    """
    env = set(environment)
    wanted = env | {system}
    if rho.layout.dim_of(system) != 2:
        raise InvariantViolation(
            "discord minimization supports qubit systems only (documented limitation)"
        )
    if wanted != set(rho.layout.labels):
        rho = partial_trace(rho, wanted)
    rho4 = _system_first(rho, system)
    d_s, d_e = rho4.shape[0], rho4.shape[1]

    h_s = von_neumann_entropy(partial_trace(rho, {system}))
    h_se = von_neumann_entropy(rho)

    thetas = np.linspace(0.0, np.pi, _DISCORD_GRID_THETA)
    phis = np.linspace(0.0, 2.0 * np.pi, _DISCORD_GRID_PHI, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    grid = _conditional_entropy_batch(rho4, tt.ravel(), pp.ravel())
    best = int(np.argmin(grid))  # first minimum = smallest (theta, phi)
    t0, p0 = tt.ravel()[best], pp.ravel()[best]

    def objective(x: np.ndarray) -> float:
        return float(_conditional_entropy_batch(
            rho4, np.array([x[0]]), np.array([x[1]]))[0])

    res = minimize(objective, x0=np.array([t0, p0]), method="Nelder-Mead",
                   options={"fatol": TOL.discord_ftol, "xatol": 1e-6})
    cond_entropy = min(float(grid[best]), float(res.fun))
    angles = (t0, p0) if grid[best] <= res.fun else (float(res.x[0]), float(res.x[1]))

    discord = cond_entropy + h_s - h_se
    return max(0.0, discord), angles


def holevo_information(rho: DensityOperator, system: str,
                       environment: Iterable[str]) -> float:
    """Classical accessible information chi = I - D, in bits."""
    env = set(environment)
    wanted = env | {system}
    if wanted != set(rho.layout.labels):
        rho = partial_trace(rho, wanted)
    i_se = mutual_information(rho, {system}, env)
    d_se, _ = quantum_discord(rho, system, env)
    chi = i_se - d_se
    if chi < -TOL.info_condition:
        raise InvariantViolation(f"Holevo information {chi} below -{TOL.info_condition}")
    return max(0.0, chi)


def correlation_report(rho: DensityOperator, system: str,
                       environment: Iterable[str]) -> CorrelationReport:
    """Mutual information, discord and Holevo information in one record."""
    env = set(environment)
    wanted = env | {system}
    if wanted != set(rho.layout.labels):
        rho = partial_trace(rho, wanted)
    i_se = mutual_information(rho, {system}, env)
    d_se, angles = quantum_discord(rho, system, env)
    h_s = von_neumann_entropy(partial_trace(rho, {system}))
    chi = max(0.0, i_se - d_se)
    return CorrelationReport(
        mutual_information=i_se,
        discord=d_se,
        holevo=chi,
        system_entropy=h_s,
        minimizing_measurement=angles,
    )


# ---------------------------------------------------------------------------
# Structure checkers
# ---------------------------------------------------------------------------

def _nuclear_norm(m: np.ndarray) -> float:
    """Sum of singular values (needed for products of states, which are not
    Hermitian in general)."""
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def _conditional_blocks(rho: DensityOperator, spec: ObjectiveSubspaceSpec,
                        fragment_labels: list[str]) -> tuple[list[float], list[DensityOperator | None], float]:
    """Per-index probabilities, renormalized conditional fragment states, and
    the largest off-diagonal system-block magnitude."""
    sys_label = spec.system_label
    d_s = spec.system_dim
    frag_layout = rho.layout.subset(fragment_labels)
    d_f = frag_layout.total_dim

    order = [sys_label] + fragment_labels
    layout = rho.layout
    dims = list(layout.dims)
    n = len(dims)
    perm = [layout.axis_of(lab) for lab in order]
    tensor = rho.matrix.reshape(dims + dims).transpose(perm + [n + p for p in perm])
    mat = tensor.reshape(layout.total_dim, layout.total_dim)
    basis = spec.system_basis
    # Rotate the system into the preferred basis, then read off blocks.
    rot = np.kron(basis.conj().T, np.eye(d_f))
    mat = rot @ mat @ rot.conj().T
    blocks = mat.reshape(d_s, d_f, d_s, d_f)

    max_offdiag = 0.0
    for i in range(d_s):
        for j in range(d_s):
            if i != j:
                max_offdiag = max(max_offdiag, float(np.max(np.abs(blocks[i, :, j, :]))))

    probs: list[float] = []
    conds: list[DensityOperator | None] = []
    for i in range(d_s):
        block = blocks[i, :, i, :]
        p = float(np.trace(block).real)
        probs.append(p)
        if p > TOL.conditional_skip:
            conds.append(DensityOperator(frag_layout, block / p))
        else:
            conds.append(None)
    return probs, conds, max_offdiag


def check_structure(rho: DensityOperator, spec: ObjectiveSubspaceSpec,
                    fragment: Iterable[str]) -> StructureVerdict:
    """Evaluate the objectivity structure conditions for one fragment.

    The state is reduced to the system plus the fragment environments, then
    checked four ways: the mutual-information condition against each single
    environment, the zero-discord strengthening on the joint fragment, the
    explicit bipartite block structure, and the pure product-conditional
    refinement.
    """
    names = [n for n in spec.environment_names if n in set(fragment)]
    missing = set(fragment) - set(names)
    if missing:
        raise InvariantViolation(f"environments {sorted(missing)} not in spec")
    members = spec.members_of(names)
    sys_label = spec.system_label
    rho_sf = partial_trace(rho, {sys_label, *members})
    if abs(rho_sf.trace - 1.0) > TOL.entropy_trace:
        raise InvariantViolation("structure checks need a normalized state")

    h_s = von_neumann_entropy(partial_trace(rho_sf, {sys_label}))
    # Information shared with each single environment of the fragment.
    env_infos: list[float] = []
    for name in names:
        env_members = set(spec.members_of([name]))
        rho_sk = partial_trace(rho_sf, {sys_label, *env_members})
        env_infos.append(mutual_information(rho_sk, {sys_label}, env_members))
    qd = all(abs(i_k - h_s) <= TOL.info_condition for i_k in env_infos)

    # Joint fragment information must also be purely classical and complete.
    i_sf = mutual_information(rho_sf, {sys_label}, set(members))
    discord, _ = quantum_discord(rho_sf, sys_label, set(members))
    sqd = (qd and abs(i_sf - h_s) <= TOL.info_condition
           and discord <= TOL.info_condition)

    bipartite_sbs, isbs, structural = _structural_checks(rho_sf, spec, names)

    return StructureVerdict(
        qd=qd,
        sqd=sqd,
        bipartite_sbs=bipartite_sbs,
        isbs=isbs,
        tolerances={
            "info_condition": TOL.info_condition,
            "block_diagonal": TOL.block_diagonal,
            "conditional_orthogonality": TOL.conditional_orthogonality,
            "conditional_purity": TOL.conditional_purity,
        },
        details={
            "mutual_information": i_sf,
            "min_single_environment_information": min(env_infos),
            "max_single_environment_information": max(env_infos),
            "system_entropy": h_s,
            "discord": discord,
            **structural,
        },
    )


def _structural_checks(rho_sf: DensityOperator, spec: ObjectiveSubspaceSpec,
                       names: list[str]) -> tuple[bool, bool, dict[str, float]]:
    """Block-structure and pure-product-conditional checks on a reduced state."""
    sys_label = spec.system_label
    frag_members = [lab for lab in rho_sf.layout.labels if lab != sys_label]
    _, conds, max_offdiag = _conditional_blocks(rho_sf, spec, frag_members)

    max_overlap = 0.0
    present = [c for c in conds if c is not None]
    for a in range(len(conds)):
        for b in range(a + 1, len(conds)):
            if conds[a] is not None and conds[b] is not None:
                max_overlap = max(
                    max_overlap, _nuclear_norm(conds[a].matrix @ conds[b].matrix)
                )
    # Same orthogonality requirement on each single environment's marginal.
    for name in names:
        env_members = spec.members_of([name])
        margs = [
            partial_trace(c, set(env_members)) if c is not None else None
            for c in conds
        ]
        for a in range(len(margs)):
            for b in range(a + 1, len(margs)):
                if margs[a] is not None and margs[b] is not None:
                    max_overlap = max(
                        max_overlap, _nuclear_norm(margs[a].matrix @ margs[b].matrix)
                    )

    bipartite_sbs = (max_offdiag <= TOL.block_diagonal
                     and max_overlap <= TOL.conditional_orthogonality)

    max_impurity = 0.0
    max_product_gap = 0.0
    for c in present:
        eigs = np.linalg.eigvalsh(_herm(c.matrix))
        max_impurity = max(max_impurity, float(np.sum(eigs[:-1].clip(min=0.0))))
        product = np.array([[1.0 + 0.0j]])
        for name in names:
            env_members = spec.members_of([name])
            product = np.kron(product, partial_trace(c, set(env_members)).matrix)
        max_product_gap = max(max_product_gap, float(np.max(np.abs(c.matrix - product))))
    isbs = (bipartite_sbs
            and max_impurity <= TOL.conditional_purity
            and max_product_gap <= TOL.conditional_purity)

    details = {
        "max_offdiagonal_block": max_offdiag,
        "max_conditional_overlap": max_overlap,
        "max_conditional_impurity": max_impurity,
        "max_product_gap": max_product_gap,
    }
    return bipartite_sbs, isbs, details


def verify_equal_dimension_reduction(rho: DensityOperator,
                                system_basis: np.ndarray | None = None) -> bool:
    """Check that equal-dimension bipartite objectivity forces pure product
    conditional states.

    The state's first subsystem is taken as the system and every other
    subsystem as a single environment; all local dimensions must be equal
    (raises otherwise).  Returns True when the bipartite structure holds
    against every environment and the joint conditional states are pure and
    product; False when the structural hypothesis itself fails.
    """
    layout = rho.layout
    dims = set(layout.dims)
    if len(dims) != 1:
        raise InvariantViolation(
            f"all subsystem dimensions must be equal, got {sorted(dims)}"
        )
    d = layout.dims[0]
    sys_label = layout.labels[0]
    env_labels = list(layout.labels[1:])
    if not env_labels:
        raise InvariantViolation("need at least one environment")
    basis = np.eye(d, dtype=np.complex128) if system_basis is None else system_basis

    environments = {lab: (lab,) for lab in env_labels}
    rank1 = tuple(np.outer(basis[:, i], basis[:, i].conj()) for i in range(d))
    spec = ObjectiveSubspaceSpec(sys_label, basis, environments,
                                 {lab: rank1 for lab in env_labels})

    for lab in env_labels:
        rho_sk = partial_trace(rho, {sys_label, lab})
        ok, _, _ = _structural_checks(rho_sk, spec, [lab])
        if not ok:
            return False
    joint_sbs, joint_isbs, _ = _structural_checks(rho, spec, env_labels)
    return bool(joint_sbs and joint_isbs)
