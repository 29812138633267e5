"""Phase modules for concrete observables: polarization, OAM and wavelength."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .sorter import PhaseModule

TWO_PI = 2 * np.pi
EXACT_RESIDUAL = 1e-9 * TWO_PI


def pbs_module() -> PhaseModule:
    """Polarizing beam splitter as a d=2 sorter: arm 1 applies Z to (H, V)."""
    k, s = np.meshgrid(np.arange(2), np.arange(2), indexing="ij")
    return PhaseModule(np.pi * k * s, name="pbs")


def dove_phase(l: int, alpha: float) -> float:
    """Phase imprinted on OAM ``l`` by a Dove-prism pair rotated by ``alpha``."""
    return 2 * l * alpha


@dataclass(frozen=True)
class OamBasisMap:
    """OAM values carried by computational indices; ``levels[s] = s (mod d)`` is required."""

    levels: tuple

    def __post_init__(self):
        levels = tuple(int(l) for l in self.levels)
        d = len(levels)
        if d < 1:
            raise ValueError("OAM map needs at least one level")
        if len(set(levels)) != d:
            raise ValueError(f"OAM levels must be distinct, got {levels}")
        bad = [s for s, l in enumerate(levels) if l % d != s]
        if bad:
            raise ValueError(f"OAM level {levels[bad[0]]} at index {bad[0]} is not congruent to it mod {d}")
        object.__setattr__(self, "levels", levels)

    @property
    def d(self) -> int:
        return len(self.levels)

    @classmethod
    def standard(cls, d: int) -> OamBasisMap:
        return cls(tuple(range(d)))

    @classmethod
    def centered(cls, d: int) -> OamBasisMap:
        """Levels ``0, 1, .., -1`` closest to zero, e.g. ``(0, 1, -1)`` for d=3."""
        return cls(tuple(s if s <= d // 2 else s - d for s in range(d)))


def oam_module(oam_map: OamBasisMap) -> PhaseModule:
    r"""Dove prism rotated by ``k pi / d`` in arm ``k``.

    A mirror in the Michelson layout sends ``l`` to ``-l``; on the way back the
    prism then acts on the reflected value, which is what ``mirrored`` records.
    """
    if not isinstance(oam_map, OamBasisMap):
        oam_map = OamBasisMap(tuple(oam_map))
    d = oam_map.d
    levels = np.array(oam_map.levels)
    alpha = np.arange(d) * np.pi / d
    phases = np.array([[dove_phase(l, a) for l in levels] for a in alpha])
    origin = (-np.arange(d)) % d
    mirrored = np.array([[dove_phase(-levels[origin[t]], a) for t in range(d)] for a in alpha])
    return PhaseModule(phases, name="oam", levels=oam_map.levels, mirrored=mirrored)


def awg_phase(length: float, wavelength: float) -> float:
    if not wavelength > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength!r}")
    return TWO_PI * length / wavelength


@dataclass(frozen=True, eq=False)
class AwgDesign:
    d: int
    wavelengths: tuple
    lengths: tuple
    integers: tuple
    residual: float

    @property
    def exact(self) -> bool:
        return self.residual < EXACT_RESIDUAL

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "wavelengths": [float(x) for x in self.wavelengths],
            "lengths": [float(x) for x in self.lengths],
            "integers": [[int(n) for n in row] for row in self.integers],
            "residual": float(self.residual),
        }

    @classmethod
    def from_dict(cls, data: dict) -> AwgDesign:
        d = int(data["d"])
        wavelengths = tuple(float(x) for x in data["wavelengths"])
        lengths = tuple(float(x) for x in data["lengths"])
        if len(wavelengths) != d or len(lengths) != d:
            raise ValueError(f"AWG design with d={d} needs {d} wavelengths and {d} lengths")
        integers = data.get("integers")
        if integers is None:
            integers = _nearest_integers(np.array(lengths), np.array(wavelengths))
        residual = data.get("residual")
        if residual is None:
            residual = design_residual(lengths, wavelengths)
        return cls(d, wavelengths, lengths, tuple(tuple(int(n) for n in row) for row in integers),
                   float(residual))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> AwgDesign:
        return cls.from_dict(json.loads(text))


def _targets(d: int) -> np.ndarray:
    """``ks/d`` indexed ``[k, s]``: the wanted phase in units of 2 pi."""
    return np.outer(np.arange(d), np.arange(d)) / d


def _nearest_integers(lengths: np.ndarray, wavelengths: np.ndarray) -> np.ndarray:
    d = len(wavelengths)
    return np.rint(lengths[:, None] / wavelengths[None, :] - _targets(d)).astype(np.int64)


def phase_errors(lengths, wavelengths) -> np.ndarray:
    """Wrapped ``|2 pi L_k / lambda_s - 2 pi k s / d|`` in radians, indexed ``[k, s]``."""
    lengths = np.asarray(lengths, dtype=float)
    wavelengths = np.asarray(wavelengths, dtype=float)
    x = lengths[:, None] / wavelengths[None, :] - _targets(len(wavelengths))
    return TWO_PI * np.abs(x - np.rint(x))


def design_residual(lengths, wavelengths) -> float:
    return float(np.max(phase_errors(lengths, wavelengths)))


def _arm_candidates(k: int, lam: np.ndarray, bound: int) -> np.ndarray:
    """Lengths where the worst wrapped phase error of arm ``k`` can be locally minimal.

    The error for wavelength ``s`` is a sawtooth in ``L`` with zeros at
    ``lam_s (ks/d + n)``. The max over ``s`` is piecewise linear, so its minima
    sit at those zeros or where a rising tooth of ``a`` meets a falling tooth
    of ``b``: ``L (1/lam_a + 1/lam_b) = t_a + t_b + m`` with ``m = n_a + n_b``.
    """
    d = len(lam)
    t = k * np.arange(d) / d
    n = np.arange(-bound, bound + 1)
    parts = [(lam[:, None] * (t[:, None] + n[None, :])).ravel()]
    m = np.arange(-2 * bound, 2 * bound + 1)
    a, b = np.triu_indices(d, 1)
    if a.size:
        rate = 1 / lam[a] + 1 / lam[b]
        parts.append(((t[a] + t[b])[:, None] + m[None, :]) / rate[:, None])
    parts.append(np.zeros(1))
    return np.unique(np.concatenate([p.ravel() for p in parts]))


def _solve_arm(k: int, lam: np.ndarray, bound: int) -> float:
    d = len(lam)
    cand = _arm_candidates(k, lam, bound)
    cand = cand[cand >= 0]
    if k == 0:
        # reference arm: a genuine common (near-)multiple, not the empty waveguide
        cand = cand[cand > 0]
    x = cand[:, None] / lam[None, :] - k * np.arange(d)[None, :] / d
    keep = np.all(np.abs(np.rint(x)) <= bound, axis=1)
    if not keep.any():
        raise ValueError(f"no admissible length for arm {k} within search bound {bound}")
    cand, x = cand[keep], x[keep]
    err = np.max(np.abs(x - np.rint(x)), axis=1)
    best = err.min()
    # ties go to the shortest waveguide
    return float(cand[err <= best + 1e-12].min())


def awg_design(d: int, wavelengths, search_bound: int = 100) -> AwgDesign:
    """Arm lengths ``L_k`` with ``2 pi L_k / lambda_s = 2 pi k s / d (mod 2 pi)`` as closely as possible.

    Arms decouple (each ``L_k`` enters only its own row of constraints), so each
    is a 1-D minimax over ``L`` with integers ``|n_ks| <= search_bound``.
    """
    lam = np.asarray(wavelengths, dtype=float).reshape(-1)
    if lam.size == 0:
        raise ValueError("wavelength list is empty")
    if int(d) != d or d < 1 or lam.size != d:
        raise ValueError(f"need d >= 1 and exactly d wavelengths, got d={d!r} and {lam.size}")
    if not np.all(lam > 0) or not np.all(np.isfinite(lam)):
        raise ValueError("wavelengths must be positive and finite")
    if len(np.unique(lam)) != d:
        raise ValueError("wavelengths must be distinct")
    if int(search_bound) != search_bound or search_bound < 1:
        raise ValueError(f"search_bound must be a positive integer, got {search_bound!r}")
    d = int(d)
    if d == 1:
        # a single arm never interferes, its length is irrelevant
        lengths = np.zeros(1)
    else:
        lengths = np.array([_solve_arm(k, lam, int(search_bound)) for k in range(d)])
    integers = _nearest_integers(lengths, lam)
    return AwgDesign(
        d=d,
        wavelengths=tuple(lam.tolist()),
        lengths=tuple(lengths.tolist()),
        integers=tuple(tuple(int(n) for n in row) for row in integers),
        residual=design_residual(lengths, lam),
    )


def awg_module(design: AwgDesign) -> PhaseModule:
    if len(design.lengths) != design.d or len(design.wavelengths) != design.d:
        raise ValueError("AWG design needs d lengths and d wavelengths")
    phases = [[awg_phase(L, lam) for lam in design.wavelengths] for L in design.lengths]
    return PhaseModule(phases, name="wavelength")
