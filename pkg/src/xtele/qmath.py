"""Small dense complex linear algebra for 1-3 qubit systems.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every function
accepts optional leading batch dimensions, ``(..., d, d)``, so that a whole
grid of input states can be pushed through the protocol in one call.

Basis ordering is lexicographic over qubits in the order the factors are
tensored: for the teleportation register that is ``a, A, B`` and the
auxiliary qubit ``b`` is appended last when present.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionError, InvalidStateError, NotHermitianError, SubsystemError

ATOL = 1e-10
NULL_PROB = 1e-14
SUPPORTED_DIMS = (2, 4, 8)

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)


@dataclass(frozen=True)
class PureState2:
    """Single-qubit pure state ``a0|0> + a1|1>``.

    ``a0`` and ``a1`` may be scalars or equally shaped arrays, in which case
    the object represents a batch of states.
    """

    a0: complex | np.ndarray
    a1: complex | np.ndarray

    def __post_init__(self):
        a0 = np.asarray(self.a0, dtype=complex)
        a1 = np.asarray(self.a1, dtype=complex)
        if a0.shape != a1.shape:
            raise ValueError(f"amplitude shapes differ: {a0.shape} vs {a1.shape}")
        if not (np.all(np.isfinite(a0)) and np.all(np.isfinite(a1))):
            raise ValueError("amplitudes must be finite")
        norm = np.abs(a0) ** 2 + np.abs(a1) ** 2
        if np.any(np.abs(norm - 1.0) > 1e-10):
            raise InvalidStateError("amplitudes are not normalized")
        if a0.ndim == 0:
            a0, a1 = complex(a0), complex(a1)
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a1", a1)

    @classmethod
    def from_angles(cls, t, phi, theta0=0.0) -> "PureState2":
        """Build from ``t = |<0|psi>|^2``, relative phase ``phi`` and a global phase."""
        t = np.asarray(t, dtype=float)
        g = np.exp(1j * np.asarray(theta0, dtype=float))
        return cls(np.sqrt(t) * g, np.sqrt(1.0 - t) * np.exp(1j * np.asarray(phi)) * g)

    @property
    def shape(self) -> tuple[int, ...]:
        return np.shape(self.a0)

    def __len__(self) -> int:
        if not self.shape:
            raise TypeError("scalar PureState2 has no length")
        return self.shape[0]

    def __getitem__(self, idx) -> "PureState2":
        return PureState2(np.asarray(self.a0)[idx], np.asarray(self.a1)[idx])

    @property
    def p0(self):
        """Population ``|<0|psi>|^2``."""
        return np.abs(self.a0) ** 2

    @property
    def p1(self):
        return np.abs(self.a1) ** 2

    def ket(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.a0, self.a1), axis=-1).astype(complex)

    def dm(self) -> np.ndarray:
        return ket_to_dm(self.ket())


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def ket_to_dm(ket: np.ndarray) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return ket[..., :, None] * np.conj(ket[..., None, :])


def trace(m: np.ndarray):
    return np.trace(m, axis1=-2, axis2=-1)


def _dim(m: np.ndarray) -> int:
    m = np.asarray(m)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DimensionError(f"expected square matrix, got shape {m.shape}")
    return m.shape[-1]


def _n_qubits(dim: int) -> int:
    if dim not in SUPPORTED_DIMS:
        raise DimensionError(f"unsupported dimension {dim}")
    return dim.bit_length() - 1


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of square operators, batched over leading axes.

    >>> tensor(I2, I2).shape
    (4, 4)
    """
    if not ops:
        raise ValueError("tensor() needs at least one operand")
    out = np.asarray(ops[0], dtype=complex)
    _dim(out)
    for op in ops[1:]:
        op = np.asarray(op, dtype=complex)
        da, db = _dim(out), _dim(op)
        if da * db > 8:
            raise DimensionError(f"unsupported dimension {da * db}")
        out = out[..., :, None, :, None] * op[..., None, :, None, :]
        out = out.reshape(out.shape[:-4] + (da * db, da * db))
    return out


def partial_trace(m: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Trace out every qubit not listed in ``keep``.

    Qubit 0 is the leftmost tensor factor. The kept qubits stay in their
    original relative order.
    """
    m = np.asarray(m, dtype=complex)
    n = _n_qubits(_dim(m))
    keep = list(keep)
    if not keep or len(set(keep)) != len(keep) or any(not 0 <= k < n for k in keep):
        raise SubsystemError(f"invalid subsystem set {keep} for {n} qubits")
    keep = sorted(keep)
    batch = m.shape[:-2]
    nb = len(batch)
    t = m.reshape(batch + (2,) * (2 * n))
    # einsum labels: rows 0..n-1, cols n..2n-1, traced qubits share a label
    row = list(range(n))
    col = [n + q if q in keep else q for q in range(n)]
    bl = list(range(2 * n, 2 * n + nb))
    out_labels = bl + [q for q in keep] + [n + q for q in keep]
    res = np.einsum(t, bl + row + col, out_labels)
    d = 2 ** len(keep)
    return res.reshape(batch + (d, d))


def project(m: np.ndarray, p: np.ndarray) -> tuple[np.ndarray | float, np.ndarray]:
    """Apply projector ``p`` to state ``m``; return ``(prob, post_state)``.

    A projector smaller than ``m`` acts on the leading qubits (``p ⊗ I``).
    Outcomes with probability below ``NULL_PROB`` are reported with
    probability 0 and an all-zero post-state, which marks a null outcome.
    """
    m = np.asarray(m, dtype=complex)
    p = np.asarray(p, dtype=complex)
    dm_, dp = _dim(m), _dim(p)
    if dp < dm_:
        p = tensor(p, np.eye(dm_ // dp, dtype=complex))
    elif dp != dm_:
        raise DimensionError(f"projector dim {dp} exceeds state dim {dm_}")
    unnorm = p @ m @ p
    prob = trace(unnorm).real
    null = prob < NULL_PROB
    safe = np.where(null, 1.0, prob)
    post = unnorm / np.asarray(safe)[..., None, None]
    post = np.where(np.asarray(null)[..., None, None], 0.0, post)
    prob = np.where(null, 0.0, prob)
    if np.ndim(prob) == 0:
        prob = float(prob)
    return prob, post


def is_null(state: np.ndarray) -> np.ndarray | bool:
    """True where ``state`` is the all-zero null-outcome marker."""
    return np.all(np.asarray(state) == 0, axis=(-2, -1))


def is_hermitian(m: np.ndarray, tol: float = ATOL) -> bool:
    m = np.asarray(m)
    return bool(np.all(np.abs(m - dagger(m)) <= tol))


def is_unitary(m: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(m, dtype=complex)
    eye = np.eye(_dim(m))
    return bool(np.all(np.abs(m @ dagger(m) - eye) <= tol))


def hermitian_eigenvalues(m: np.ndarray, tol: float = ATOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix in descending order."""
    m = np.asarray(m, dtype=complex)
    _dim(m)
    if not is_hermitian(m, tol):
        raise NotHermitianError("matrix is not Hermitian")
    herm = 0.5 * (m + dagger(m))
    return np.linalg.eigvalsh(herm)[..., ::-1]


def is_density_matrix(m: np.ndarray, tol: float = ATOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, tol):
        return False
    if np.any(np.abs(trace(m) - 1.0) > tol):
        return False
    return bool(np.all(hermitian_eigenvalues(m, tol) >= -tol))


def check_density_matrix(m: np.ndarray, tol: float = ATOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if not is_density_matrix(m, tol):
        raise InvalidStateError("not a valid density matrix")
    return m


def purity(m: np.ndarray):
    m = np.asarray(m, dtype=complex)
    return trace(m @ m).real


def conjugate(u: np.ndarray, m: np.ndarray) -> np.ndarray:
    """``u m u^dagger``."""
    return u @ m @ dagger(u)
