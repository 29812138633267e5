"""Mach-Zehnder and Michelson sorter unitaries, sorting statistics and noise sweeps."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .algebra import CompositeState, UnitaryMatrix, as_unitary, fourier

COLUMN_ATOL = 1e-10


class Architecture(str, enum.Enum):
    MACH_ZEHNDER = "mzi"
    MICHELSON = "michelson"


class Reflector(str, enum.Enum):
    RETROREFLECTOR = "retroreflector"
    MIRROR = "mirror"


class OutputGate(str, enum.Enum):
    FDAGGER = "fdagger"
    F = "f"


@dataclass(frozen=True, eq=False)
class PhaseModule:
    """Per-arm phases acting on the observable, ``phases[k, s]`` in radians.

    ``mirrored[k, s']`` is the phase picked up in arm ``k`` by a particle whose
    observable was flipped onto index ``s'`` by a mirror. Only modules that know
    how a reflection acts on their observable (OAM) define it.
    """

    phases: np.ndarray
    name: str = "custom"
    levels: Optional[tuple] = None
    mirrored: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        table = np.array(self.phases, dtype=float)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] < 1:
            raise ValueError(f"phase table must be d x d, got shape {table.shape}")
        if not np.all(np.isfinite(table)):
            raise ValueError("phase table must be finite everywhere")
        table.setflags(write=False)
        object.__setattr__(self, "phases", table)
        if self.mirrored is not None:
            m = np.array(self.mirrored, dtype=float)
            if m.shape != table.shape:
                raise ValueError("mirrored phase table must match the phase table")
            m.setflags(write=False)
            object.__setattr__(self, "mirrored", m)

    @property
    def d(self) -> int:
        return self.phases.shape[0]

    def phase(self, k: int, s: int) -> float:
        return float(self.phases[k, s])

    @classmethod
    def from_function(cls, d: int, fn: Callable[[int, int], float], name: str = "custom"):
        return cls(np.array([[fn(k, s) for s in range(d)] for k in range(d)]), name=name)


def ideal_module(d: int) -> PhaseModule:
    """The clock-gate module: arm ``k`` applies ``Z_d^k``, phase ``2 pi k s / d``."""
    k, s = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return PhaseModule(2 * np.pi * k * s / d, name="ideal")


@dataclass(frozen=True, eq=False)
class SorterSpec:
    d: int
    module: PhaseModule
    architecture: Architecture = Architecture.MACH_ZEHNDER
    reflector: Reflector = Reflector.RETROREFLECTOR
    perturbations: Optional[np.ndarray] = None
    output_gate: OutputGate = OutputGate.FDAGGER

    def __post_init__(self):
        object.__setattr__(self, "architecture", Architecture(self.architecture))
        object.__setattr__(self, "reflector", Reflector(self.reflector))
        object.__setattr__(self, "output_gate", OutputGate(self.output_gate))
        if self.module.d != self.d:
            raise ValueError(f"module has d={self.module.d}, sorter has d={self.d}")
        pert = np.zeros(self.d) if self.perturbations is None else np.array(self.perturbations, dtype=float)
        if pert.shape != (self.d,):
            raise ValueError(f"perturbations must have exactly {self.d} entries, got {pert.size}")
        pert.setflags(write=False)
        object.__setattr__(self, "perturbations", pert)
        if (self.architecture is Architecture.MICHELSON and self.reflector is Reflector.MIRROR
                and self.module.mirrored is None):
            raise ValueError(f"mirror reflector is not defined for the {self.module.name!r} module")

    def with_perturbations(self, perturbations) -> SorterSpec:
        return SorterSpec(self.d, self.module, self.architecture, self.reflector,
                          perturbations, self.output_gate)


def interferometer(arm_phases, input_gate, output_gate) -> UnitaryMatrix:
    """``(1 x G_out) D (1 x G_in)`` with ``D|s, k> = exp(i arm_phases[k, s]) |s, k>``.

    Every factor is diagonal in the observable, so the product is assembled
    block by block (one ``d x d`` block per value of ``s``).
    """
    theta = np.asarray(arm_phases, dtype=float)
    g_in = np.asarray(input_gate)
    g_out = np.asarray(output_gate)
    d = theta.shape[0]
    out = np.zeros((d * d, d * d), dtype=complex)
    for s in range(d):
        out[s * d:(s + 1) * d, s * d:(s + 1) * d] = g_out @ (np.exp(1j * theta[:, s])[:, None] * g_in)
    return UnitaryMatrix(out, check=False)


def _output_gate(spec: SorterSpec) -> UnitaryMatrix:
    f = fourier(spec.d)
    return f.dag if spec.output_gate is OutputGate.FDAGGER else f


def build_mzi(spec: SorterSpec) -> UnitaryMatrix:
    if spec.architecture is not Architecture.MACH_ZEHNDER:
        raise ValueError("build_mzi needs a Mach-Zehnder spec")
    theta = spec.module.phases + spec.perturbations[:, None]
    return interferometer(theta, fourier(spec.d), _output_gate(spec))


def _michelson_passes(spec: SorterSpec):
    """Half phases of the two passes and the observable relabelling between them.

    Perturbations are round-trip offsets, half of which is picked up per pass.
    """
    d = spec.d
    half_out = (spec.module.phases + spec.perturbations[:, None]) / 2
    if spec.reflector is Reflector.MIRROR:
        flip = (-np.arange(d)) % d
        half_back = (spec.module.mirrored + spec.perturbations[:, None]) / 2
    else:
        flip = np.arange(d)
        half_back = half_out
    return half_out, flip, half_back


def build_michelson(spec: SorterSpec) -> UnitaryMatrix:
    """Folded sorter: ``(1 x F^T) D_back (R x 1) D_out (1 x F)`` with ``F^T = F``.

    A retroreflector leaves the observable alone; a mirror sends OAM ``l`` to
    ``-l``, i.e. index ``s`` to ``-s mod d``, so the matrix is no longer block
    diagonal in ``s``.
    """
    if spec.architecture is not Architecture.MICHELSON:
        raise ValueError("build_michelson needs a Michelson spec")
    d = spec.d
    f = np.asarray(fourier(d))
    half_out, flip, half_back = _michelson_passes(spec)
    out = np.zeros((d * d, d * d), dtype=complex)
    for s in range(d):
        t = flip[s]
        phase = np.exp(1j * half_back[:, t]) * np.exp(1j * half_out[:, s])
        out[t * d:(t + 1) * d, s * d:(s + 1) * d] = f @ (phase[:, None] * f)
    return UnitaryMatrix(out, check=False)


def build(spec: SorterSpec) -> UnitaryMatrix:
    if spec.architecture is Architecture.MICHELSON:
        return build_michelson(spec)
    return build_mzi(spec)


@dataclass(frozen=True, eq=False)
class SortingMatrix:
    """``p[j, s]``: probability that a particle with observable ``s`` entering port 0 exits port ``j``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError(f"sorting matrix must be square, got shape {p.shape}")
        if np.any(p < -COLUMN_ATOL) or np.any(p > 1 + COLUMN_ATOL):
            raise ValueError("sorting matrix entries must lie in [0, 1]")
        sums = p.sum(axis=0)
        if np.max(np.abs(sums - 1)) > COLUMN_ATOL:
            raise ValueError(f"sorting matrix columns must sum to 1 (worst {sums.min()!r}..{sums.max()!r})")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def d(self) -> int:
        return self.p.shape[0]

    def as_list(self) -> list:
        return self.p.tolist()


def _square_root_dim(n: int) -> int:
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise ValueError(f"dimension {n} is not a perfect square")
    return d


def sorting_matrix(u) -> SortingMatrix:
    u = as_unitary(u)
    d = _square_root_dim(u.dim)
    # column (s, 0) of u, reshaped to [s', j]
    cols = u.entries[:, ::d].T.reshape(d, d, d)
    return SortingMatrix(np.sum(np.abs(cols) ** 2, axis=1).T)


def sorter_probabilities(spec: SorterSpec) -> SortingMatrix:
    """Sorting matrix of ``spec`` summed directly in phase space.

    For input port 0 the amplitude on output port ``j`` is
    ``(1/d) sum_k exp(i (theta[k, s] -+ 2 pi j k / d))``, so the exponentials
    are taken of total phases rather than multiplied as matrix entries. Ideal
    sorters then come out at exactly 1.0 instead of 1 +- a few ulp.
    """
    d = spec.d
    jk = 2 * np.pi * np.outer(np.arange(d), np.arange(d)) / d
    if spec.architecture is Architecture.MICHELSON:
        half_out, flip, half_back = _michelson_passes(spec)
        theta = half_out + half_back[:, flip]
        sign = 1.0
    else:
        theta = spec.module.phases + spec.perturbations[:, None]
        sign = -1.0 if spec.output_gate is OutputGate.FDAGGER else 1.0
    # total[j, k, s]
    total = theta[None, :, :] + sign * jk[:, :, None]
    amp = np.exp(1j * total).sum(axis=1) / d
    return SortingMatrix(np.abs(amp) ** 2)


def efficiency(p: SortingMatrix) -> tuple[float, float]:
    """(worst, mean) probability of exiting on the port matching the observable."""
    diag = np.diag(p.p)
    return float(diag.min()), float(diag.sum() / p.d)


def simulate(u: UnitaryMatrix, state: CompositeState) -> CompositeState:
    if u.dim != state.d * state.d:
        raise ValueError(f"operator of dim {u.dim} cannot act on a d={state.d} state")
    out = u.entries @ state.amplitudes
    return CompositeState(state.d, out / np.linalg.norm(out))


@dataclass(frozen=True)
class SweepResult:
    sigma: float
    seed: int
    worst: np.ndarray
    mean: np.ndarray

    @property
    def rows(self) -> list[tuple[float, float, float]]:
        """Per-trial ``(sigma, worst, mean)``."""
        return [(self.sigma, float(w), float(m)) for w, m in zip(self.worst, self.mean)]

    @property
    def trials(self) -> int:
        return len(self.worst)

    @property
    def mean_worst(self) -> float:
        return float(np.mean(self.worst))

    @property
    def mean_mean(self) -> float:
        return float(np.mean(self.mean))

    @property
    def stderr_mean(self) -> float:
        if self.trials < 2:
            return 0.0
        return float(np.std(self.mean, ddof=1) / np.sqrt(self.trials))


def sweep_perturbations(spec: SorterSpec, sigma: float, trials: int, seed: int) -> SweepResult:
    """Efficiencies under random per-arm phase offsets ``N(0, sigma^2)``.

    Offsets are added to ``spec.perturbations``. Each call draws from a fresh
    generator seeded with ``seed``, so sweeps over several sigmas share the same
    underlying standard-normal draws.
    """
    if not sigma >= 0:
        raise ValueError(f"sigma must be non-negative, got {sigma!r}")
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    rng = np.random.default_rng(seed)
    offsets = sigma * rng.standard_normal((int(trials), spec.d))
    worst = np.empty(int(trials))
    mean = np.empty(int(trials))
    for i, offset in enumerate(offsets):
        p = sorter_probabilities(spec.with_perturbations(spec.perturbations + offset))
        worst[i], mean[i] = efficiency(p)
    return SweepResult(float(sigma), int(seed), worst, mean)
