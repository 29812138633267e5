r"""Qudit gate algebra: generalized Pauli operators, Fourier gates, controlled gates.

Two-qudit states and operators use the index convention

    (s, k) -> s * d + k

where ``s`` is the sorted observable (the most significant factor) and ``k`` is
the spatial mode. ``tensor(a, b)`` therefore puts ``a`` on the observable and
``b`` on the mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNITARY_ATOL = 1e-12
NORM_ATOL = 1e-12


class NonUnitaryError(ValueError):
    """A matrix expected to be unitary is not."""


def root_powers(d: int, m) -> np.ndarray:
    """``omega**m`` with ``omega = exp(2 pi i / d)``, exponent reduced mod ``d`` first."""
    m = np.mod(np.asarray(m, dtype=np.int64), d)
    return np.exp(2j * np.pi * m / d)


def _check_dim(d: int) -> int:
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def unitarity_error(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Dense unitary matrix.

    Construction checks ``U^dagger U = I`` to ``atol`` (max-entry) unless
    ``check=False``, which the exact named gates use.
    """

    entries: np.ndarray
    check: bool = field(default=True, repr=False)
    atol: float = field(default=UNITARY_ATOL, repr=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
        if self.check:
            err = unitarity_error(m)
            if not err <= self.atol:
                raise NonUnitaryError(f"matrix is not unitary (max |U^dag U - I| = {err:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def dag(self) -> UnitaryMatrix:
        return UnitaryMatrix(self.entries.conj().T, check=False)

    def __matmul__(self, other: UnitaryMatrix) -> UnitaryMatrix:
        if not isinstance(other, UnitaryMatrix):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return UnitaryMatrix(self.entries @ other.entries, check=False)

    def __pow__(self, n: int) -> UnitaryMatrix:
        return UnitaryMatrix(np.linalg.matrix_power(self.entries, int(n)), check=False)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def max_diff(self, other) -> float:
        return float(np.max(np.abs(self.entries - np.asarray(other))))

    def allclose(self, other, atol: float = UNITARY_ATOL) -> bool:
        return self.max_diff(other) <= atol


def as_unitary(u, atol: float = UNITARY_ATOL) -> UnitaryMatrix:
    """Coerce ``u`` to a checked :class:`UnitaryMatrix`."""
    if isinstance(u, UnitaryMatrix):
        return u
    return UnitaryMatrix(u, atol=atol)


def identity(d: int) -> UnitaryMatrix:
    return UnitaryMatrix(np.eye(_check_dim(d)), check=False)


def pauli_x(d: int) -> UnitaryMatrix:
    r"""Shift operator, :math:`X_d|k\rangle = |k+1 \bmod d\rangle`."""
    d = _check_dim(d)
    return UnitaryMatrix(np.roll(np.eye(d), 1, axis=0), check=False)


def pauli_z(d: int) -> UnitaryMatrix:
    r"""Clock operator, :math:`Z_d = \mathrm{diag}(1, \omega, \ldots, \omega^{d-1})`."""
    d = _check_dim(d)
    return UnitaryMatrix(np.diag(root_powers(d, np.arange(d))), check=False)


def fourier(d: int) -> UnitaryMatrix:
    r"""Discrete Fourier gate, ``F[j, k] = omega**(j k) / sqrt(d)``.

    ``F`` maps the clock basis to the shift basis: ``X_d = F^dag Z_d F``.
    """
    d = _check_dim(d)
    jk = np.outer(np.arange(d), np.arange(d))
    return UnitaryMatrix(root_powers(d, jk) / np.sqrt(d), check=False)


def controlled(u) -> UnitaryMatrix:
    r"""Controlled gate :math:`C(U)|s, k\rangle = |s\rangle U^s |k\rangle`.

    The control runs over the full qudit ``s = 0..d-1``, so the result is
    block diagonal with blocks ``U^0, U^1, ..., U^{d-1}``.
    """
    u = as_unitary(u)
    d = u.dim
    out = np.zeros((d * d, d * d), dtype=complex)
    block = np.eye(d, dtype=complex)
    for s in range(d):
        out[s * d:(s + 1) * d, s * d:(s + 1) * d] = block
        block = u.entries @ block
    return UnitaryMatrix(out, check=False)


def tensor(a: UnitaryMatrix, b: UnitaryMatrix) -> UnitaryMatrix:
    return UnitaryMatrix(np.kron(np.asarray(a), np.asarray(b)), check=False)


def equal_up_to_phase(a, b, atol: float = UNITARY_ATOL) -> bool:
    """Entrywise comparison after removing the phase of ``a``'s largest entry."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if abs(b[idx]) == 0:
        return False
    phase = (b[idx] / abs(b[idx])) / (a[idx] / abs(a[idx]))
    return bool(np.max(np.abs(a * phase - b)) <= atol)


@dataclass(frozen=True, eq=False)
class CompositeState:
    """Normalized pure state of observable x mode, amplitude index ``s * d + k``."""

    d: int
    amplitudes: np.ndarray

    def __post_init__(self):
        d = _check_dim(self.d)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (d * d,):
            raise ValueError(f"expected {d * d} amplitudes for d={d}, got {amps.size}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, d: int, s: int, k: int) -> CompositeState:
        amps = np.zeros(d * d, dtype=complex)
        amps[s * d + k] = 1.0
        return cls(d, amps)

    @classmethod
    def on_port(cls, sigma_amplitudes, port: int = 0) -> CompositeState:
        """Product state ``(sum_s a_s |s>) |port>``; ``a`` is normalized here."""
        a = np.asarray(sigma_amplitudes, dtype=complex).reshape(-1)
        a = a / np.linalg.norm(a)
        d = a.size
        amps = np.zeros((d, d), dtype=complex)
        amps[:, port] = a
        return cls(d, amps.reshape(-1))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes as a ``(d, d)`` array indexed ``[s, k]``."""
        return self.amplitudes.reshape(self.d, self.d)

    def fidelity(self, other: CompositeState) -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


def apply(u: UnitaryMatrix, psi: CompositeState) -> CompositeState:
    if u.dim != psi.d * psi.d:
        raise ValueError(f"operator of dim {u.dim} cannot act on a d={psi.d} state")
    return CompositeState(psi.d, u.entries @ psi.amplitudes)
