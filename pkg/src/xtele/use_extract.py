"""Unambiguous state extraction (USE) applied to the teleported branches.

The receiver attaches an auxiliary qubit ``b`` in ``|0>``, applies a
controlled rotation on ``B ⊗ b`` and measures ``b`` in the computational
basis. ``b = 0`` is success (the input state is recovered exactly for a
pure channel, approximately for an X-state); ``b = 1`` is failure.

The rotation angle depends only on the channel, never on the input state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmath
from .channels import PureChannel, XState
from .errors import ExtractionImpossibleError, OrderingError
from .qmath import PureState2
from .teleport import teleport_pure_closed, teleport_x_closed

BRANCHES = ("bar", "ddot")


@dataclass(frozen=True)
class UseUnitary:
    matrix: np.ndarray
    ratio: float


@dataclass(frozen=True)
class UseResult:
    success_prob: float | np.ndarray
    success_state: np.ndarray
    failure_prob: float | np.ndarray
    failure_state: np.ndarray
    branch: str


def _check_branch(branch: str) -> None:
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}, got {branch!r}")


def build_use_unitaries(ratio: float) -> tuple[UseUnitary, UseUnitary]:
    """Controlled unitaries for the bar and ddot branches.

    ``u_bar = |0><0| ⊗ I + |1><1| ⊗ U_b`` where ``U_b|0> = r|0> - s|1>``,
    ``U_b|1> = s|0> + r|1>`` with ``r = ratio`` and ``s = sqrt(1 - r^2)``.
    ``u_ddot`` is ``u_bar`` conjugated by ``sigma_x`` on ``B``.
    """
    ratio = float(ratio)
    if not ratio > 0.0:
        raise ExtractionImpossibleError("extraction impossible, zero ratio")
    if ratio > 1.0 + 1e-12:
        raise OrderingError("non-canonical ordering, ratio > 1")
    r = min(ratio, 1.0)
    s = math.sqrt(max(0.0, 1.0 - r * r))
    u_b = np.array([[r, s], [-s, r]], dtype=complex)
    u_bar = qmath.tensor(qmath.P0, qmath.I2) + qmath.tensor(qmath.P1, u_b)
    sx_b = qmath.tensor(qmath.SX, qmath.I2)
    u_ddot = sx_b @ u_bar @ sx_b
    return UseUnitary(u_bar, r), UseUnitary(u_ddot, r)


def use_bruteforce(branch_state: np.ndarray, u: UseUnitary, branch: str = "bar") -> UseResult:
    """Run USE on an arbitrary (possibly batched) single-qubit state."""
    _check_branch(branch)
    rho = np.asarray(branch_state, dtype=complex)
    joint = qmath.conjugate(u.matrix, qmath.tensor(rho, qmath.P0))
    p_ok, post_ok = qmath.project(joint, qmath.tensor(qmath.I2, qmath.P0))
    p_bad, post_bad = qmath.project(joint, qmath.tensor(qmath.I2, qmath.P1))
    return UseResult(
        p_ok,
        qmath.partial_trace(post_ok, keep=[0]),
        p_bad,
        qmath.partial_trace(post_bad, keep=[0]),
        branch,
    )


def _finish(p_branch, success_un, success_p, failure_ket, branch) -> UseResult:
    p_branch = np.asarray(p_branch, dtype=float)
    success_p = np.asarray(success_p, dtype=float)
    cond = success_p / p_branch
    state = success_un / success_p[..., None, None]
    fail = 1.0 - cond
    fail_state = np.broadcast_to(qmath.ket_to_dm(np.asarray(failure_ket, dtype=complex)), state.shape).copy()
    fail_state = np.where((fail < qmath.NULL_PROB)[..., None, None], 0.0, fail_state)
    fail = np.where(fail < qmath.NULL_PROB, 0.0, fail)
    if cond.ndim == 0:
        cond, fail = float(cond), float(fail)
    return UseResult(cond, state, fail, fail_state, branch)


def use_pure(psi: PureState2, ch: PureChannel, branch: str) -> UseResult:
    """Closed-form USE for a pure channel.

    Success returns the input state exactly with conditional probability
    ``alpha^2 / p`` where ``p`` is the branch probability; failure leaves
    ``|1>`` (bar) or ``|0>`` (ddot).
    """
    _check_branch(branch)
    if not ch.alpha > 0.0:
        raise ExtractionImpossibleError("extraction impossible for a product channel (alpha = 0)")
    pair = teleport_pure_closed(psi, ch)
    p_branch = pair.p_bar if branch == "bar" else pair.p_ddot
    a2 = ch.alpha**2
    success_p = np.broadcast_to(a2, np.shape(p_branch))
    success_un = a2 * psi.dm()
    failure = [0, 1] if branch == "bar" else [1, 0]
    return _finish(p_branch, success_un, success_p, failure, branch)


def use_x_closed(psi: PureState2, x: XState, branch: str) -> UseResult:
    """Closed-form quasi-extraction for an X-state channel.

    The success state mixes ``r11 |psi><psi|`` with residual decoherence and
    ``{01,10}``-block terms damped by the USE ratio. Success means the
    auxiliary qubit was found in ``|0>``, for both branches.
    """
    _check_branch(branch)
    if not x.r11 > 0.0:
        raise ExtractionImpossibleError("extraction impossible, r11 = 0")
    if not x.r44 > 0.0:
        raise ExtractionImpossibleError("degenerate channel, r44 = 0")
    pair = teleport_x_closed(psi, x)
    a0, a1 = np.asarray(psi.a0, dtype=complex), np.asarray(psi.a1, dtype=complex)
    t0, t1 = (np.abs(a0) ** 2)[..., None, None], (np.abs(a1) ** 2)[..., None, None]
    c01 = (a0 * np.conj(a1))[..., None, None]
    c10 = np.conj(c01)
    r = math.sqrt(x.r11 / x.r44)
    r2 = x.r11 / x.r44
    deco = r * (math.sqrt(x.r11 * x.r44) - x.r14)
    e00 = np.array([[1, 0], [0, 0]], dtype=complex)
    e01 = np.array([[0, 1], [0, 0]], dtype=complex)
    e10 = np.array([[0, 0], [1, 0]], dtype=complex)
    e11 = np.array([[0, 0], [0, 1]], dtype=complex)
    common = x.r11 * psi.dm() - deco * (c01 * e01 + c10 * e10) + r * x.r23 * (c10 * e01 + c01 * e10)
    if branch == "bar":
        success_un = common + x.r33 * t1 * e00 + r2 * x.r22 * t0 * e11
        success_p = x.r11 + x.r33 * np.abs(a1) ** 2 + r2 * x.r22 * np.abs(a0) ** 2
        return _finish(pair.p_bar, success_un, success_p, [0, 1], branch)
    success_un = common + r2 * x.r22 * t1 * e00 + x.r33 * t0 * e11
    success_p = x.r11 + x.r33 * np.abs(a0) ** 2 + r2 * x.r22 * np.abs(a1) ** 2
    return _finish(pair.p_ddot, success_un, success_p, [1, 0], branch)


def extraction_probability(ch: PureChannel) -> float:
    """Total probability of recovering the input over both branches, ``2 alpha^2``."""
    return 2.0 * ch.alpha**2


def quasi_extraction_probability(x: XState) -> float:
    """Total success probability over both branches, independent of the input."""
    if not x.r11 > 0.0:
        raise ExtractionImpossibleError("extraction impossible, r11 = 0")
    return 2.0 * x.r11 + x.r33 + x.r11 * x.r22 / x.r44
