r"""Compile a mode unitary into a triangular mesh of beam splitters and phase shifters.

Beam splitter on modes ``(a, b)``, embedded in the identity::

    [[cos t,              -exp(-i p) sin t],
     [exp(i p) sin t,      cos t          ]]

Elements are listed in the order light meets them, so the mesh unitary is
``E_last @ ... @ E_first``. Residual phases sit on the output side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .algebra import UnitaryMatrix, as_unitary

MESH_ATOL = 1e-10


@dataclass(frozen=True)
class Beamsplitter:
    mode_a: int
    mode_b: int
    theta: float
    phi: float

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise ValueError("beam splitter needs two distinct modes")

    @property
    def modes(self) -> tuple:
        return (self.mode_a, self.mode_b)

    def block(self) -> np.ndarray:
        c, s = np.cos(self.theta), np.sin(self.theta)
        return np.array([[c, -np.exp(-1j * self.phi) * s],
                         [np.exp(1j * self.phi) * s, c]])


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    phase: float

    @property
    def modes(self) -> tuple:
        return (self.mode,)


MeshElement = Union[Beamsplitter, PhaseShifter]


@dataclass(frozen=True)
class BeamsplitterMesh:
    d: int
    elements: tuple

    @property
    def beamsplitters(self) -> list:
        return [e for e in self.elements if isinstance(e, Beamsplitter)]

    def to_dict(self) -> dict:
        return {"d": self.d, "elements": [_element_dict(e) for e in self.elements]}

    @classmethod
    def from_dict(cls, data) -> BeamsplitterMesh:
        raw = data["elements"]
        d = int(data["d"])
        elements = []
        for item in raw:
            kind = item["kind"]
            if kind == "bs":
                a, b = item["modes"]
                elements.append(Beamsplitter(int(a), int(b), float(item["theta"]), float(item["phi"])))
            elif kind == "ps":
                (m,) = item["modes"]
                elements.append(PhaseShifter(int(m), float(item["phi"])))
            else:
                raise ValueError(f"unknown mesh element kind {kind!r}")
        return cls(d, tuple(elements))


def _element_dict(e: MeshElement) -> dict:
    if isinstance(e, Beamsplitter):
        return {"kind": "bs", "modes": [e.mode_a, e.mode_b], "theta": e.theta, "phi": e.phi}
    # a phase shifter's phase is stored under "phi"
    return {"kind": "ps", "modes": [e.mode], "theta": 0.0, "phi": e.phase}


def decompose(u, atol: float = MESH_ATOL) -> BeamsplitterMesh:
    """Triangular elimination: at most ``d(d-1)/2`` beam splitters.

    Row ``i`` (bottom up) is cleared left to right by mixing columns ``j`` and
    ``j+1``, i.e. ``U -> U T^dag``. Once every row is done, what remains is
    diagonal, so ``U = D T_m ... T_1``.
    """
    u = as_unitary(u, atol=atol)
    d = u.dim
    w = np.array(u.entries)
    elements: list = []
    for i in range(d - 1, 0, -1):
        for j in range(i):
            x, y = w[i, j], w[i, j + 1]
            if abs(x) < 1e-15:
                continue
            theta = np.arctan2(abs(x), abs(y))
            phi = np.angle(x) - np.angle(y) if abs(y) > 0 else np.angle(x)
            bs = Beamsplitter(j, j + 1, float(theta), float(phi))
            w[:, j:j + 2] = w[:, j:j + 2] @ bs.block().conj().T
            w[i, j] = 0.0
            elements.append(bs)
    elements.extend(PhaseShifter(m, float(np.angle(w[m, m]))) for m in range(d))
    return BeamsplitterMesh(d, tuple(elements))


def reconstruct(mesh: BeamsplitterMesh) -> UnitaryMatrix:
    d = mesh.d
    out = np.eye(d, dtype=complex)
    for e in mesh.elements:
        if any(not 0 <= m < d for m in e.modes):
            raise ValueError(f"mesh element {e} addresses a mode outside 0..{d - 1}")
        if isinstance(e, Beamsplitter):
            rows = [e.mode_a, e.mode_b]
            out[rows, :] = e.block() @ out[rows, :]
        else:
            out[e.mode, :] *= np.exp(1j * e.phase)
    return UnitaryMatrix(out, check=False)
