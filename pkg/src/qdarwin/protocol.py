"""End-to-end non-objectivity witness protocol in exact and Monte Carlo modes.

A run prepares a noisy system-environment state, isolates the accessed
fragment with a point channel, either leaves the system-fragment untouched or
applies the objectivity operation, evolves under local Hadamards, and measures
in the computational basis.  The witness is built from the per-outcome
probability differences of the two branches; the subset maximization over
outcomes never needs extra measurement settings.

Monte Carlo mode realizes the noise stochastically run by run (global mixing
as a coin flip, local depolarization as independent photon replacements,
depolarizing CNOTs as per-gate coins) and post-selects on parity-check
hardware success.  Per-run randomness comes from counter-style stream
splitting, so results are bit-reproducible for a given seed regardless of
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .channels import (
    CNOT,
    HADAMARD,
    NoiseConfig,
    apply_gate,
    depolarize_local,
    mix_with_noise,
    noisy_cnot,
    point_channel,
)
from .hilbert import (
    DensityOperator,
    InvariantViolation,
    PureState,
    TensorLayout,
    computational_ket,
    maximally_mixed,
    partial_trace,
)
from .objectivity import (
    FRAMEWORK_ISBS,
    FRAMEWORK_SQD,
    ObjectiveSubspaceSpec,
    computational_spec,
    isbs_basis_from_spec,
    nonobjectivity_measure,
    objectivity_operation_isbs,
    objectivity_operation_sqd,
    parity_spec,
)
from .tolerances import TOL

DEFAULT_SEED = 123456789

CNOT_IDEAL = "ideal"
CNOT_NOISY_PREP = "noisy_prep"
CNOT_NOISY_PREP_PARITY = "noisy_prep_parity"

UNITARY_ALTERNATING = "alternating_hadamards"
UNITARY_ALL = "all_hadamards"

_MC_BLOCK = 4096
_BOOTSTRAP_RESAMPLES = 1000


class NonterminatingSampling(RuntimeError):
    """Monte Carlo sampling aborted: success probability too small."""


# ---------------------------------------------------------------------------
# Standard layouts
# ---------------------------------------------------------------------------

def sqd_layout() -> TensorLayout:
    """One system photon plus two environments of two photons each."""
    return TensorLayout([
        ("S", 2), ("E1_1", 2), ("E1_2", 2), ("E2_1", 2), ("E2_2", 2),
    ])


def isbs_layout() -> TensorLayout:
    """One system photon plus four single-photon environments."""
    return TensorLayout([("S", 2), ("E1", 2), ("E2", 2), ("E3", 2), ("E4", 2)])


def default_spec(framework: str) -> ObjectiveSubspaceSpec:
    if framework == FRAMEWORK_SQD:
        return parity_spec(2)
    if framework == FRAMEWORK_ISBS:
        return computational_spec(4)
    raise InvariantViolation(f"unknown framework {framework!r}")


def default_layout(framework: str) -> TensorLayout:
    return sqd_layout() if framework == FRAMEWORK_SQD else isbs_layout()


# ---------------------------------------------------------------------------
# Configuration and report types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProtocolConfig:
    """Full description of one witness evaluation.

    ``shots`` = 0 selects exact mode.  In Monte Carlo mode the successful
    runs are split evenly between the two branches unless ``branch_shots``
    overrides the split.  ``unitary`` may be a preset name or an explicit
    matrix over the whole register; ``subspace`` defaults to the parity
    preset (subspace framework) or the computational basis (basis framework).
    """

    framework: str = FRAMEWORK_SQD
    fragment: tuple[str, ...] = ("E1",)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    unitary: str | np.ndarray | None = None
    replacement: DensityOperator | PureState | None = None
    shots: int = 0
    seed: int = DEFAULT_SEED
    cnot_model: str = CNOT_IDEAL
    subspace: ObjectiveSubspaceSpec | None = None
    branch_shots: tuple[int, int] | None = None

    def __post_init__(self):
        if self.framework not in (FRAMEWORK_SQD, FRAMEWORK_ISBS):
            raise InvariantViolation(f"unknown framework {self.framework!r}")
        if not self.fragment:
            raise InvariantViolation("fragment must be nonempty")
        if self.shots < 0:
            raise InvariantViolation("shots must be nonnegative")
        if self.cnot_model not in (CNOT_IDEAL, CNOT_NOISY_PREP, CNOT_NOISY_PREP_PARITY):
            raise InvariantViolation(f"unknown cnot_model {self.cnot_model!r}")
        if self.branch_shots is not None:
            a, b = self.branch_shots
            if a < 1 or b < 1:
                raise InvariantViolation("branch_shots entries must be positive")
        spec = self.subspace if self.subspace is not None else default_spec(self.framework)
        unknown = set(self.fragment) - set(spec.environment_names)
        if unknown:
            raise InvariantViolation(
                f"fragment environments {sorted(unknown)} not in the subspace spec"
            )

    def split_shots(self) -> tuple[int, int]:
        if self.branch_shots is not None:
            return self.branch_shots
        half = self.shots // 2
        return half, self.shots - half


@dataclass(eq=False)
class WitnessReport:
    """Branch probabilities, per-outcome witnesses and the subset maximum.

    Outcome vectors are marginalized to the system-fragment register (the
    replaced environment block is uncorrelated by construction and carries no
    information about the branches).  In Monte Carlo mode the probabilities
    are empirical and ``stderr_max_subset`` holds a bootstrap standard error.
    """

    framework: str
    fragment: tuple[str, ...]
    outcome_labels: tuple[str, ...]
    p_identity: np.ndarray
    p_gamma: np.ndarray
    witness_single: np.ndarray
    witness_max_subset: float
    measure: float
    stderr_max_subset: float | None
    successful_runs: int
    shots: int
    seed: int
    mode: str

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WitnessReport):
            return NotImplemented
        return (
            self.framework == other.framework
            and self.fragment == other.fragment
            and self.outcome_labels == other.outcome_labels
            and np.array_equal(self.p_identity, other.p_identity)
            and np.array_equal(self.p_gamma, other.p_gamma)
            and np.array_equal(self.witness_single, other.witness_single)
            and self.witness_max_subset == other.witness_max_subset
            and self.measure == other.measure
            and self.stderr_max_subset == other.stderr_max_subset
            and self.successful_runs == other.successful_runs
            and self.shots == other.shots
            and self.seed == other.seed
            and self.mode == other.mode
        )

    def to_dict(self) -> dict:
        return {
            "framework": self.framework,
            "fragment": list(self.fragment),
            "outcome_labels": list(self.outcome_labels),
            "p_identity": [float(x) for x in self.p_identity],
            "p_gamma": [float(x) for x in self.p_gamma],
            "witness_single": [float(x) for x in self.witness_single],
            "witness_max_subset": float(self.witness_max_subset),
            "measure": float(self.measure),
            "stderr_max_subset": (None if self.stderr_max_subset is None
                                  else float(self.stderr_max_subset)),
            "successful_runs": int(self.successful_runs),
            "shots": int(self.shots),
            "seed": int(self.seed),
            "mode": self.mode,
        }

    @staticmethod
    def from_dict(data: dict) -> "WitnessReport":
        return WitnessReport(
            framework=str(data["framework"]),
            fragment=tuple(data["fragment"]),
            outcome_labels=tuple(data["outcome_labels"]),
            p_identity=np.asarray(data["p_identity"], dtype=float),
            p_gamma=np.asarray(data["p_gamma"], dtype=float),
            witness_single=np.asarray(data["witness_single"], dtype=float),
            witness_max_subset=float(data["witness_max_subset"]),
            measure=float(data["measure"]),
            stderr_max_subset=(None if data["stderr_max_subset"] is None
                               else float(data["stderr_max_subset"])),
            successful_runs=int(data["successful_runs"]),
            shots=int(data["shots"]),
            seed=int(data["seed"]),
            mode=str(data["mode"]),
        )


@dataclass(frozen=True)
class CostComparison:
    """Run counts of naive state tomography versus the witness scheme."""

    tomography_runs: int
    witness_runs: float
    witness_wins: bool
    crossover_p: float


# ---------------------------------------------------------------------------
# Resolved context shared by exact and Monte Carlo paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Context:
    config: ProtocolConfig
    layout: TensorLayout
    spec: ObjectiveSubspaceSpec
    fragment: tuple[str, ...]
    fragment_members: tuple[str, ...]
    sf_labels: tuple[str, ...]
    ef_members: tuple[str, ...]
    replacement: DensityOperator | None
    unitary: np.ndarray
    isbs_basis: np.ndarray | None


def _resolve_unitary(config: ProtocolConfig, layout: TensorLayout,
                     spec: ObjectiveSubspaceSpec) -> np.ndarray:
    choice = config.unitary
    if choice is None:
        choice = UNITARY_ALTERNATING if config.framework == FRAMEWORK_SQD else UNITARY_ALL
    if isinstance(choice, str):
        if choice not in (UNITARY_ALTERNATING, UNITARY_ALL):
            raise InvariantViolation(f"unknown unitary preset {choice!r}")
        env_members: dict[str, tuple[str, ...]] = dict(spec.environments)
        hadamard_labels: set[str] = {spec.system_label}
        if choice == UNITARY_ALL:
            hadamard_labels |= set(layout.labels)
        else:
            # Hadamard on the system and on the last photon of each environment.
            for members in env_members.values():
                hadamard_labels.add(members[-1])
        u = np.array([[1.0 + 0.0j]])
        for label, dim in layout.subsystems:
            if label in hadamard_labels:
                if dim != 2:
                    raise InvariantViolation("Hadamard presets need qubit subsystems")
                u = np.kron(u, HADAMARD)
            else:
                u = np.kron(u, np.eye(dim, dtype=np.complex128))
        return u
    u = np.asarray(choice, dtype=np.complex128)
    d = layout.total_dim
    if u.shape != (d, d):
        raise InvariantViolation(f"custom unitary shape {u.shape} != ({d}, {d})")
    return u


def _resolve_context(config: ProtocolConfig,
                     layout: TensorLayout | None = None) -> _Context:
    layout = layout if layout is not None else default_layout(config.framework)
    spec = config.subspace if config.subspace is not None else default_spec(config.framework)
    fragment = tuple(n for n in spec.environment_names if n in set(config.fragment))
    fragment_members = tuple(spec.members_of(fragment))
    sf_labels = tuple(
        lab for lab in layout.labels
        if lab == spec.system_label or lab in fragment_members
    )
    ef_members = tuple(
        lab for lab in layout.labels
        if lab != spec.system_label and lab not in fragment_members
    )
    replacement = None
    if ef_members:
        if config.replacement is None:
            sub = layout.subset(ef_members)
            replacement = computational_ket(sub, [0] * len(sub)).to_density()
        else:
            replacement = config.replacement
            if isinstance(replacement, PureState):
                replacement = replacement.to_density()
    isbs_basis = None
    if config.framework == FRAMEWORK_ISBS:
        isbs_basis = isbs_basis_from_spec(spec)
    unitary = _resolve_unitary(config, layout, spec)
    return _Context(
        config=config, layout=layout, spec=spec, fragment=fragment,
        fragment_members=fragment_members, sf_labels=sf_labels,
        ef_members=ef_members, replacement=replacement, unitary=unitary,
        isbs_basis=isbs_basis,
    )


# ---------------------------------------------------------------------------
# State preparation
# ---------------------------------------------------------------------------

def _sqd_base_state() -> DensityOperator:
    """System in |+>, environments in a four-photon GHZ state."""
    layout = sqd_layout()
    amps = np.zeros(32, dtype=np.complex128)
    # |0>(|0000> + |1111>) / 2 + |1>(|0000> + |1111>) / 2 before the CNOTs.
    amps[0b00000] = 0.5
    amps[0b01111] = 0.5
    amps[0b10000] = 0.5
    amps[0b11111] = 0.5
    return PureState(layout, amps).to_density()


_SQD_PREP_CNOTS = (("S", "E1_1"), ("S", "E2_1"))


def prepare_initial_sqd(noise: NoiseConfig,
                        cnot_model: str = CNOT_IDEAL) -> DensityOperator:
    """Branching system-environment state of the two-environment experiment.

    The system starts in |+>, the four environment photons in a GHZ state;
    CNOTs from the system onto the first photon of each environment correlate
    the system with the environment parities.  The configured noise (global
    mixing or local depolarization of strength p) is applied afterwards.
    """
    rho = _sqd_base_state()
    for control, target in _SQD_PREP_CNOTS:
        if cnot_model == CNOT_IDEAL:
            rho = apply_gate(rho, CNOT, [control, target])
        else:
            rho = noisy_cnot(rho, control, target, noise.f)
    return _apply_noise(rho, noise)


def prepare_initial_isbs(noise: NoiseConfig,
                         cnot_model: str = CNOT_IDEAL) -> DensityOperator:
    """Five-photon GHZ state followed by the configured noise."""
    layout = isbs_layout()
    amps = np.zeros(32, dtype=np.complex128)
    amps[0] = 1.0 / math.sqrt(2.0)
    amps[-1] = 1.0 / math.sqrt(2.0)
    rho = PureState(layout, amps).to_density()
    return _apply_noise(rho, noise)


def _apply_noise(rho: DensityOperator, noise: NoiseConfig) -> DensityOperator:
    if noise.p == 0.0:
        return rho
    if noise.mode == "mix_global":
        return mix_with_noise(rho, noise.p)
    return depolarize_local(rho, noise.p, rho.layout.labels)


def prepare_initial(config: ProtocolConfig) -> DensityOperator:
    if config.framework == FRAMEWORK_SQD:
        return prepare_initial_sqd(config.noise, config.cnot_model)
    return prepare_initial_isbs(config.noise, config.cnot_model)


# ---------------------------------------------------------------------------
# Branch evaluation
# ---------------------------------------------------------------------------

def _apply_gamma(rho: DensityOperator, ctx: _Context) -> DensityOperator:
    if ctx.config.framework == FRAMEWORK_SQD:
        return objectivity_operation_sqd(rho, ctx.spec, ctx.fragment)
    return objectivity_operation_isbs(rho, ctx.isbs_basis, ctx.fragment_members)


def _parity_scramble(rho: DensityOperator, ctx: _Context,
                     weight: float) -> DensityOperator:
    """Depolarize each fragment environment pair with the given weight.

    Models imperfect parity-check CNOTs inside the objectivity operation:
    each check is built from two depolarizing CNOTs, so the acted pair is
    scrambled to the maximally mixed state with weight 1 - f^2.
    """
    out = rho
    for name in ctx.fragment:
        members = ctx.spec.members_of([name])
        d = np.prod([out.layout.dim_of(m) for m in members])
        scrambled = point_channel(
            out, members,
            DensityOperator(out.layout.subset(members),
                            np.eye(int(d), dtype=np.complex128) / float(d)),
        )
        out = DensityOperator(out.layout,
                              weight * scrambled.matrix + (1.0 - weight) * out.matrix)
    return out


def _branch_state(rho_t: DensityOperator, ctx: _Context,
                  apply_gamma: bool, scramble_weight: float = 0.0) -> DensityOperator:
    rho = rho_t
    if ctx.ef_members:
        rho = point_channel(rho, ctx.ef_members, ctx.replacement)
    if apply_gamma:
        if scramble_weight > 0.0:
            rho = _parity_scramble(rho, ctx, scramble_weight)
        rho = _apply_gamma(rho, ctx)
    return apply_gate(rho, ctx.unitary, list(rho.layout.labels))


def run_branch(rho_t: DensityOperator, config: ProtocolConfig,
               apply_gamma: bool) -> np.ndarray:
    """Computational-basis outcome probabilities over the full register.

    Applies the point channel on the unaccessed environments, optionally the
    objectivity operation on the system-fragment, then the final unitary.  A
    null projected state yields the all-zero vector.
    """
    ctx = _resolve_context(config, rho_t.layout)
    scramble = 0.0
    if apply_gamma and config.framework == FRAMEWORK_SQD \
            and config.cnot_model == CNOT_NOISY_PREP_PARITY:
        scramble = 1.0 - config.noise.f ** 2
    final = _branch_state(rho_t, ctx, apply_gamma, scramble)
    return np.clip(np.diag(final.matrix).real, 0.0, None)


def _marginalize_to_sf(vector: np.ndarray, layout: TensorLayout,
                       sf_labels: Sequence[str]) -> np.ndarray:
    keep = set(sf_labels)
    dims = layout.dims
    tensor = vector.reshape(dims)
    axes = tuple(k for k, lab in enumerate(layout.labels) if lab not in keep)
    if axes:
        tensor = tensor.sum(axis=axes)
    return tensor.reshape(-1)


def _outcome_labels(layout: TensorLayout, sf_labels: Sequence[str]) -> tuple[str, ...]:
    sub = layout.subset(sf_labels)
    labels = []
    for index in range(sub.total_dim):
        digits = []
        rem = index
        for dim in reversed(sub.dims):
            digits.append(rem % dim)
            rem //= dim
        labels.append("".join(str(d) for d in reversed(digits)))
    return tuple(labels)


def _max_subset(differences: np.ndarray) -> float:
    """Largest |sum over an outcome subset| = max(positive sum, -negative sum)."""
    positive = float(np.sum(differences[differences > 0.0]))
    negative = float(np.sum(differences[differences < 0.0]))
    return max(positive, -negative)


# ---------------------------------------------------------------------------
# Exact mode
# ---------------------------------------------------------------------------

def witness_exact(config: ProtocolConfig) -> WitnessReport:
    """Evaluate the witness from exact branch probability vectors.

    The accompanying non-objectivity measure is computed on the post-noise,
    pre-point-channel reduced system-fragment state.  The lower-bound
    invariant (witness <= measure) is asserted whenever the objectivity
    operation itself is noiseless.
    """
    if config.shots != 0:
        raise InvariantViolation("exact mode requires shots = 0")
    ctx = _resolve_context(config)
    rho_t = prepare_initial(config)

    rho_sf = partial_trace(rho_t, set(ctx.sf_labels))
    measure = nonobjectivity_measure(rho_sf, ctx.spec, config.framework)

    v_id = run_branch(rho_t, config, apply_gamma=False)
    v_g = run_branch(rho_t, config, apply_gamma=True)
    p_id = _marginalize_to_sf(v_id, ctx.layout, ctx.sf_labels)
    p_g = _marginalize_to_sf(v_g, ctx.layout, ctx.sf_labels)

    diffs = p_id - p_g
    witness = _max_subset(diffs)
    if config.cnot_model != CNOT_NOISY_PREP_PARITY:
        if witness > measure + TOL.witness_bound_slack:
            raise InvariantViolation(
                f"witness {witness} exceeds measure {measure} beyond tolerance"
            )
    return WitnessReport(
        framework=config.framework,
        fragment=ctx.fragment,
        outcome_labels=_outcome_labels(ctx.layout, ctx.sf_labels),
        p_identity=p_id,
        p_gamma=p_g,
        witness_single=np.abs(diffs),
        witness_max_subset=witness,
        measure=measure,
        stderr_max_subset=None,
        successful_runs=0,
        shots=0,
        seed=config.seed,
        mode="exact",
    )


# ---------------------------------------------------------------------------
# Monte Carlo mode
# ---------------------------------------------------------------------------

def _realization_state(ctx: _Context, noise_bits: tuple[int, ...],
                       prep_bits: tuple[int, ...]) -> DensityOperator:
    """Exact state of one stochastic realization of preparation and noise."""
    config = ctx.config
    if config.framework == FRAMEWORK_SQD:
        rho = _sqd_base_state()
        for (control, target), bit in zip(_SQD_PREP_CNOTS, prep_bits or (0, 0)):
            if bit:
                # Depolarized gate realization: the acted pair is replaced by
                # the maximally mixed pair (the marginal is CNOT-invariant).
                pair = rho.layout.subset([control, target])
                rho = point_channel(rho, [control, target],
                                    DensityOperator(pair, np.eye(4) / 4.0))
            else:
                rho = apply_gate(rho, CNOT, [control, target])
    else:
        rho = prepare_initial_isbs(NoiseConfig(p=0.0), CNOT_IDEAL)

    if config.noise.mode == "mix_global":
        if noise_bits and noise_bits[0]:
            rho = maximally_mixed(rho.layout)
    else:
        for label, bit in zip(rho.layout.labels, noise_bits):
            if bit:
                d = rho.layout.dim_of(label)
                rho = point_channel(rho, [label],
                                    DensityOperator(rho.layout.subset([label]),
                                                    np.eye(d) / d))
    return rho


def _realization_distribution(ctx: _Context, apply_gamma: bool,
                              noise_bits: tuple[int, ...],
                              prep_bits: tuple[int, ...],
                              parity_bits: tuple[int, ...]) -> tuple[np.ndarray, float]:
    """Outcome pmf over the system-fragment register plus the null mass.

    The objectivity operation's measurement cascade (system measurement plus
    per-environment parity checks, mismatches recorded as the null outcome)
    is aggregated analytically: conditioned on the realization, the sampled
    outcome distribution equals the projected state's outcome distribution
    with the missing trace as the null mass.
    """
    rho = _realization_state(ctx, noise_bits, prep_bits)
    scramble_envs = ()
    if apply_gamma and parity_bits:
        scramble_envs = tuple(
            name for name, bits in zip(ctx.fragment, _pairs(parity_bits))
            if any(bits)
        )
    out = rho
    if ctx.ef_members:
        out = point_channel(out, ctx.ef_members, ctx.replacement)
    if apply_gamma:
        for name in scramble_envs:
            members = ctx.spec.members_of([name])
            d = int(np.prod([out.layout.dim_of(m) for m in members]))
            out = point_channel(out, members,
                                DensityOperator(out.layout.subset(members),
                                                np.eye(d) / d))
        out = _apply_gamma(out, ctx)
    final = apply_gate(out, ctx.unitary, list(out.layout.labels))
    vector = np.clip(np.diag(final.matrix).real, 0.0, None)
    pmf = _marginalize_to_sf(vector, ctx.layout, ctx.sf_labels)
    null_mass = max(0.0, 1.0 - float(pmf.sum()))
    return pmf, null_mass


def _pairs(bits: tuple[int, ...]) -> list[tuple[int, int]]:
    return [(bits[2 * k], bits[2 * k + 1]) for k in range(len(bits) // 2)]


@dataclass
class _BranchPlan:
    """Column layout of the per-attempt uniform draws for one branch."""

    n_noise: int
    n_prep: int
    n_parity: int
    use_hardware: bool
    hardware_success: float

    @property
    def columns(self) -> int:
        return self.n_noise + self.n_prep + self.n_parity + int(self.use_hardware) + 1


def _branch_plan(ctx: _Context, apply_gamma: bool) -> _BranchPlan:
    config = ctx.config
    n_noise = 1 if config.noise.mode == "mix_global" else len(ctx.layout)
    n_prep = 0
    n_parity = 0
    use_hw = False
    hw_success = 1.0
    if config.framework == FRAMEWORK_SQD:
        if config.cnot_model in (CNOT_NOISY_PREP, CNOT_NOISY_PREP_PARITY):
            n_prep = len(_SQD_PREP_CNOTS)
        if apply_gamma:
            if config.cnot_model == CNOT_NOISY_PREP_PARITY:
                n_parity = 2 * len(ctx.fragment)
            if config.noise.p_cnot < 1.0:
                use_hw = True
                hw_success = config.noise.p_cnot ** (2 * len(ctx.fragment))
    return _BranchPlan(n_noise, n_prep, n_parity, use_hw, hw_success)


def _sample_branch(ctx: _Context, apply_gamma: bool, wanted: int,
                   branch_tag: int) -> tuple[np.ndarray, int, int]:
    """Sample one branch until ``wanted`` successful runs are collected.

    Returns (outcome counts over SF outcomes, null-run count, attempts).
    Runs discarded by parity-check hardware failure do not count; runs whose
    objectivity projection misses are recorded as the null outcome and do
    count as successful.
    """
    config = ctx.config
    plan = _branch_plan(ctx, apply_gamma)
    n_outcomes = int(np.prod([ctx.layout.dim_of(lab) for lab in ctx.sf_labels]))
    counts = np.zeros(n_outcomes, dtype=np.int64)
    null_count = 0
    collected = 0
    attempts = 0
    attempts_since_success = 0
    cache: dict[tuple, np.ndarray] = {}

    noise_p = config.noise.p
    gate_noise = 1.0 - config.noise.f

    block_index = 0
    while collected < wanted:
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=(config.seed, branch_tag, block_index)))
        u = rng.random((_MC_BLOCK, plan.columns))
        col = 0
        noise_bits = (u[:, col:col + plan.n_noise] < noise_p).astype(np.int8)
        col += plan.n_noise
        prep_bits = (u[:, col:col + plan.n_prep] < gate_noise).astype(np.int8)
        col += plan.n_prep
        parity_bits = (u[:, col:col + plan.n_parity] < gate_noise).astype(np.int8)
        col += plan.n_parity
        if plan.use_hardware:
            hardware_ok = u[:, col] < plan.hardware_success
            col += 1
        else:
            hardware_ok = np.ones(_MC_BLOCK, dtype=bool)
        u_outcome = u[:, col]

        keys = [
            (tuple(noise_bits[r]), tuple(prep_bits[r]), tuple(parity_bits[r]))
            for r in range(_MC_BLOCK)
        ]
        for r in range(_MC_BLOCK):
            if collected >= wanted:
                break
            attempts += 1
            if not hardware_ok[r]:
                attempts_since_success += 1
                if attempts_since_success >= TOL.mc_abort_window:
                    raise NonterminatingSampling(
                        f"no successful run in {attempts_since_success} attempts; "
                        f"estimated success probability below 1e-6 "
                        f"(p_cnot = {config.noise.p_cnot}, "
                        f"fragment size {len(ctx.fragment)})"
                    )
                continue
            attempts_since_success = 0
            key = keys[r]
            cdf = cache.get(key)
            if cdf is None:
                pmf, null_mass = _realization_distribution(
                    ctx, apply_gamma, key[0], key[1], key[2])
                cdf = np.cumsum(np.append(pmf, null_mass))
                total = cdf[-1]
                if total > 0:
                    cdf = cdf / total
                cache[key] = cdf
            idx = int(np.searchsorted(cdf, u_outcome[r], side="right"))
            idx = min(idx, n_outcomes)
            if idx == n_outcomes:
                null_count += 1
            else:
                counts[idx] += 1
            collected += 1
        block_index += 1
    return counts, null_count, attempts


def _bootstrap_stderr(counts_id: np.ndarray, n_id: int, counts_g: np.ndarray,
                      null_g: int, n_g: int, seed: int) -> float:
    """Bootstrap standard error of the subset-maximum estimator."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 2, 0)))
    p_id = counts_id / n_id
    full_g = np.append(counts_g, null_g) / n_g
    boot_id = rng.multinomial(n_id, p_id, size=_BOOTSTRAP_RESAMPLES) / n_id
    boot_g = rng.multinomial(n_g, full_g, size=_BOOTSTRAP_RESAMPLES)[:, :-1] / n_g
    diffs = boot_id - boot_g
    positives = np.where(diffs > 0.0, diffs, 0.0).sum(axis=1)
    negatives = np.where(diffs < 0.0, diffs, 0.0).sum(axis=1)
    stats = np.maximum(positives, -negatives)
    return float(np.std(stats, ddof=1))


def witness_monte_carlo(config: ProtocolConfig) -> WitnessReport:
    """Estimate the witness from simulated experimental runs.

    Each run draws a stochastic realization (noise coins, gate-fidelity
    coins), post-selects on parity-check hardware success, and records one
    measurement outcome; objectivity-projection misses are recorded as the
    null outcome.  Empirical branch probabilities feed the same subset
    maximization as exact mode, and the standard error comes from a seeded
    bootstrap over run outcomes.
    """
    if config.shots <= 0:
        raise InvariantViolation("Monte Carlo mode requires shots > 0")
    n_id, n_g = config.split_shots()
    if n_id < 1 or n_g < 1:
        raise InvariantViolation("both branches need at least one successful run")
    ctx = _resolve_context(config)

    counts_id, _, _ = _sample_branch(ctx, apply_gamma=False, wanted=n_id, branch_tag=0)
    counts_g, null_g, _ = _sample_branch(ctx, apply_gamma=True, wanted=n_g, branch_tag=1)

    p_id = counts_id / n_id
    p_g = counts_g / n_g
    diffs = p_id - p_g
    witness = _max_subset(diffs)
    stderr = _bootstrap_stderr(counts_id, n_id, counts_g, null_g, n_g, config.seed)

    rho_t = prepare_initial(config)
    rho_sf = partial_trace(rho_t, set(ctx.sf_labels))
    measure = nonobjectivity_measure(rho_sf, ctx.spec, config.framework)

    return WitnessReport(
        framework=config.framework,
        fragment=ctx.fragment,
        outcome_labels=_outcome_labels(ctx.layout, ctx.sf_labels),
        p_identity=p_id,
        p_gamma=p_g,
        witness_single=np.abs(diffs),
        witness_max_subset=witness,
        measure=measure,
        stderr_max_subset=stderr,
        successful_runs=n_id + n_g,
        shots=config.shots,
        seed=config.seed,
        mode="monte_carlo",
    )


def run_witness(config: ProtocolConfig) -> WitnessReport:
    """Dispatch to exact or Monte Carlo mode based on the shot count."""
    return witness_exact(config) if config.shots == 0 else witness_monte_carlo(config)


# ---------------------------------------------------------------------------
# Cost model
# ---------------------------------------------------------------------------

def cost_model(m_envs: int, c: int, p_cnot: float, f_cnot: float = 1.0) -> CostComparison:
    """Run counts for tomography versus the witness, with the CNOT budget.

    Tomography of 1 + 2M photons needs C counts in each of 3^(1+2M) basis
    combinations.  The witness needs C identity-branch runs plus enough
    attempts that C projected-branch runs survive the 2M parity-check CNOTs,
    each succeeding with effective probability p_cnot * f_cnot.  The
    crossover is the per-environment break-even success probability
    1 / (3 f_cnot): above it the witness scales better as environments are
    added.
    """
    if m_envs < 1:
        raise InvariantViolation("m_envs must be at least 1")
    if c < 1:
        raise InvariantViolation("c must be at least 1")
    if not 0.0 < p_cnot <= 1.0:
        raise InvariantViolation(f"p_cnot {p_cnot} outside (0, 1]")
    if not 0.0 < f_cnot <= 1.0:
        raise InvariantViolation(f"f_cnot {f_cnot} outside (0, 1]")
    effective = p_cnot * f_cnot
    tomography = c * 3 ** (1 + 2 * m_envs)
    witness = c + c * (1.0 / effective) ** (2 * m_envs)
    return CostComparison(
        tomography_runs=int(tomography),
        witness_runs=float(witness),
        witness_wins=bool(witness < tomography),
        crossover_p=1.0 / (3.0 * f_cnot),
    )
