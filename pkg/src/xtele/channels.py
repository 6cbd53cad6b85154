"""Pure partially entangled channels and X-state channels.

Both families are kept in canonical form: non-negative real amplitudes or
coherences, with the smaller population on ``|00>`` (``alpha <= beta``,
``r11 <= r44``). Violations raise instead of being silently relabelled, so
that reported states always refer to the basis the caller used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .errors import (
    ChannelError,
    NegativityError,
    OrderingError,
    PrincipalSubspaceError,
    PSDError,
    TraceError,
)

TOL = 1e-12
X_KEYS = ("r11", "r22", "r33", "r44", "r14", "r23")
_SYSY = np.kron(qmath.SY, qmath.SY)


@dataclass(frozen=True)
class PureChannel:
    """``alpha|00> + beta|11>`` with ``0 <= alpha <= beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise NegativityError("amplitudes must be non-negative")
        if abs(self.alpha**2 + self.beta**2 - 1.0) > TOL:
            raise TraceError("alpha^2 + beta^2 != 1")
        if self.alpha > self.beta + TOL:
            raise OrderingError("violates alpha <= beta canonical form")

    @property
    def ratio(self) -> float:
        """USE ratio ``alpha / beta``."""
        return self.alpha / self.beta

    def ket(self) -> np.ndarray:
        return np.array([self.alpha, 0, 0, self.beta], dtype=complex)

    def as_matrix(self) -> np.ndarray:
        return qmath.ket_to_dm(self.ket())

    def as_x_state(self) -> "XState":
        a2 = self.alpha**2
        return XState(a2, 0.0, 0.0, 1.0 - a2, self.alpha * self.beta, 0.0)


def make_pure_channel(alpha: float) -> PureChannel:
    alpha = float(alpha)
    limit = 1.0 / math.sqrt(2.0)
    if not (0.0 <= alpha <= limit + TOL) or not math.isfinite(alpha):
        raise OrderingError(f"alpha={alpha} violates alpha <= beta canonical form")
    alpha = min(alpha, limit)
    return PureChannel(alpha, math.sqrt(1.0 - alpha * alpha))


def pure_concurrence(ch: PureChannel) -> float:
    return 2.0 * ch.alpha * ch.beta


@dataclass(frozen=True)
class XState:
    """Two-qubit X-state with real non-negative coherences ``r14`` and ``r23``.

    Construction validates trace, positivity and canonical ordering. Pass
    ``strict=True`` to also require the principal-subspace condition
    ``r11*r44 > r22*r33``.
    """

    r11: float
    r22: float
    r33: float
    r44: float
    r14: float
    r23: float
    strict: bool = field(default=False, compare=False)

    def __post_init__(self):
        vals = [float(getattr(self, k)) for k in X_KEYS]
        if not all(math.isfinite(v) for v in vals):
            raise ChannelError("X-state parameters must be finite")
        for k, v in zip(X_KEYS, vals):
            object.__setattr__(self, k, v)
        r11, r22, r33, r44, r14, r23 = vals
        if min(r11, r22, r33, r44) < -TOL:
            raise NegativityError("populations must be non-negative")
        if r14 < -TOL or r23 < -TOL:
            raise NegativityError("coherences r14, r23 must be non-negative")
        if abs(r11 + r22 + r33 + r44 - 1.0) > TOL:
            raise TraceError(f"trace is {r11 + r22 + r33 + r44!r}, expected 1")
        if r14**2 > r11 * r44 + TOL or r23**2 > r22 * r33 + TOL:
            raise PSDError("coherence exceeds geometric mean of its block populations")
        if r11 > r44 + TOL:
            raise OrderingError("violates r11 <= r44 canonical form")
        if self.strict and not r11 * r44 > r22 * r33:
            raise PrincipalSubspaceError("strict mode requires r11*r44 > r22*r33")

    @property
    def ratio(self) -> float:
        """USE ratio ``sqrt(r11 / r44)``."""
        return math.sqrt(self.r11 / self.r44)

    def params(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in X_KEYS}

    def as_matrix(self) -> np.ndarray:
        m = np.diag([self.r11, self.r22, self.r33, self.r44]).astype(complex)
        m[0, 3] = m[3, 0] = self.r14
        m[1, 2] = m[2, 1] = self.r23
        return m


def make_x_state(r11, r22, r33, r44, r14, r23, *, strict: bool = False) -> XState:
    return XState(r11, r22, r33, r44, r14, r23, strict=strict)


@dataclass(frozen=True)
class ConcurrenceReport:
    c14: float
    c23: float
    concurrence: float
    general: float


def x_concurrence(x: XState) -> ConcurrenceReport:
    """Block closed form; ``general`` holds the Wootters cross-check.

    At most one of ``c14``, ``c23`` is positive. With the principal subspace
    ``{00, 11}`` (``c23 <= 0``) the concurrence is ``max(0, c14)``.
    """
    c14 = 2.0 * (x.r14 - math.sqrt(x.r22 * x.r33))
    c23 = 2.0 * (x.r23 - math.sqrt(x.r11 * x.r44))
    return ConcurrenceReport(c14, c23, max(0.0, c14, c23), float(general_concurrence(x.as_matrix())))


def general_concurrence(rho: np.ndarray):
    """Wootters concurrence of an arbitrary two-qubit density matrix.

    With ``rho = W W^dagger`` the values ``lambda_i`` are the singular values
    of ``W^T (sy ⊗ sy) W``; working with that matrix avoids square roots of
    eigenvalues that are zero up to round-off. Batched over leading axes.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise ValueError(f"expected 4x4 matrix, got {rho.shape}")
    if not qmath.is_hermitian(rho):
        raise PSDError("density matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (rho + qmath.dagger(rho)))
    if np.any(w < -qmath.ATOL):
        raise PSDError("density matrix has negative eigenvalues")
    factor = v * np.sqrt(np.clip(w, 0.0, None))[..., None, :]
    tau = np.swapaxes(factor, -1, -2) @ _SYSY @ factor
    lam = np.linalg.svd(tau, compute_uv=False)
    c = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return np.maximum(0.0, c)


def random_x_state(rng: np.random.Generator, *, strict: bool = False) -> XState:
    """Sample a valid canonical X-state.

    Populations come from a flat Dirichlet on the simplex with ``r11`` and
    ``r44`` swapped when needed to keep ``r11 <= r44``; coherences are
    uniform fractions of their PSD bound. Strict mode rejects samples that
    fail ``r11*r44 > r22*r33``.
    """
    while True:
        r11, r22, r33, r44 = rng.dirichlet(np.ones(4))
        if r11 > r44:
            r11, r44 = r44, r11
        u, v = rng.random(2)
        r14 = u * math.sqrt(r11 * r44)
        r23 = v * math.sqrt(r22 * r33)
        if strict and not r11 * r44 > r22 * r33:
            continue
        # renormalise against float drift so the trace check is exact
        total = r11 + r22 + r33 + r44
        return XState(r11 / total, r22 / total, r33 / total, r44 / total, r14 / total, r23 / total, strict=strict)


def random_pure_channel(rng: np.random.Generator) -> PureChannel:
    """Canonical pure channel with ``alpha`` uniform on ``(0, 1/sqrt 2]``."""
    alpha = (1.0 - rng.random()) / math.sqrt(2.0)
    return make_pure_channel(alpha)


def parse_kv(text: str) -> dict[str, float]:
    """Parse ``k=v,k=v`` into floats."""
    out: dict[str, float] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ValueError(f"malformed entry {part!r}, expected key=value")
        if key in out:
            raise ValueError(f"duplicate key {key!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise ValueError(f"non-numeric value for {key!r}: {value!r}") from None
    return out


def x_state_from_spec(text: str | dict, *, strict: bool = False) -> XState:
    params = parse_kv(text) if isinstance(text, str) else dict(text)
    unknown = set(params) - set(X_KEYS)
    if unknown:
        raise ValueError(f"unknown X-state keys: {sorted(unknown)}")
    missing = [k for k in X_KEYS if k not in params]
    if missing:
        raise ValueError(f"missing X-state keys: {missing}")
    return make_x_state(*(params[k] for k in X_KEYS), strict=strict)


def pure_channel_from_spec(text: str | dict) -> PureChannel:
    params = parse_kv(text) if isinstance(text, str) else dict(text)
    if set(params) != {"alpha"}:
        raise ValueError("pure channel spec must be exactly alpha=<value>")
    return make_pure_channel(params["alpha"])
