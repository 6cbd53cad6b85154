"""Bell-measurement stage of teleportation.

Two independent routes are provided. The closed forms write down the
corrected receiver states directly from the channel parameters; the
brute-force route builds the full ``a A B`` register, projects onto each
Bell state and traces out the sender. Both accept batched ``PureState2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath
from .channels import PureChannel, XState
from .qmath import PureState2

BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")

_s = 1.0 / np.sqrt(2.0)
BELL_KETS = {
    "phi+": np.array([_s, 0, 0, _s], dtype=complex),
    "phi-": np.array([_s, 0, 0, -_s], dtype=complex),
    "psi+": np.array([0, _s, _s, 0], dtype=complex),
    "psi-": np.array([0, _s, -_s, 0], dtype=complex),
}
BELL_PROJECTORS = {k: qmath.ket_to_dm(v) for k, v in BELL_KETS.items()}

# Pauli frame left on B by each Bell outcome; undone by conjugation.
CORRECTIONS = {
    "phi+": ("I", qmath.I2),
    "phi-": ("sz", qmath.SZ),
    "psi+": ("sx", qmath.SX),
    "psi-": ("sxsz", qmath.SX @ qmath.SZ),
}


@dataclass(frozen=True)
class TeleportOutcome:
    bell_index: str
    probability: float | np.ndarray
    corrected_state: np.ndarray
    correction_applied: str

    @property
    def is_null(self):
        return qmath.is_null(self.corrected_state)


@dataclass(frozen=True)
class BranchPair:
    """Corrected receiver states after merging the Pauli-equivalent outcomes.

    ``rho_bar`` collects the two Phi outcomes (total probability ``p_bar``),
    ``rho_ddot`` the two Psi outcomes.
    """

    p_bar: float | np.ndarray
    rho_bar: np.ndarray
    p_ddot: float | np.ndarray
    rho_ddot: np.ndarray


def _normalize(unnorm: np.ndarray, prob) -> tuple[float | np.ndarray, np.ndarray]:
    prob = np.asarray(prob, dtype=float)
    null = prob < qmath.NULL_PROB
    state = unnorm / np.where(null, 1.0, prob)[..., None, None]
    state = np.where(null[..., None, None], 0.0, state)
    prob = np.where(null, 0.0, prob)
    return (float(prob) if prob.ndim == 0 else prob), state


def teleport_pure_closed(psi: PureState2, ch: PureChannel) -> BranchPair:
    a0, a1 = np.asarray(psi.a0), np.asarray(psi.a1)
    al, be = ch.alpha, ch.beta
    bar = np.stack([al * a0, be * a1], axis=-1)
    ddot = np.stack([be * a0, al * a1], axis=-1)
    p_bar = al**2 * np.abs(a0) ** 2 + be**2 * np.abs(a1) ** 2
    # direct sums rather than 1 - p_bar: keeps relative accuracy when a branch is rare
    p_ddot = be**2 * np.abs(a0) ** 2 + al**2 * np.abs(a1) ** 2
    p_bar, rho_bar = _normalize(qmath.ket_to_dm(bar), p_bar)
    p_ddot, rho_ddot = _normalize(qmath.ket_to_dm(ddot), p_ddot)
    return BranchPair(p_bar, rho_bar, p_ddot, rho_ddot)


def _basis_op(i: int, j: int) -> np.ndarray:
    m = np.zeros((2, 2), dtype=complex)
    m[i, j] = 1.0
    return m


def teleport_x_closed(psi: PureState2, x: XState) -> BranchPair:
    """Corrected receiver states for an X-state channel.

    Each branch is the population-weighted pure state distorted by
    decoherence inside the ``{00, 11}`` block, plus the contributions from
    the ``{01, 10}`` block.
    """
    a0, a1 = np.asarray(psi.a0, dtype=complex), np.asarray(psi.a1, dtype=complex)
    t0, t1 = np.abs(a0) ** 2, np.abs(a1) ** 2
    c01 = (a0 * np.conj(a1))[..., None, None]  # <0|psi><psi|1>
    c10 = np.conj(c01)
    r11, r22, r33, r44, r14, r23 = (x.r11, x.r22, x.r33, x.r44, x.r14, x.r23)
    r32 = r23
    e00, e01, e10, e11 = (_basis_op(0, 0), _basis_op(0, 1), _basis_op(1, 0), _basis_op(1, 1))
    deco = np.sqrt(r11 * r44) - r14

    def pure_part(w0, w1):
        # (w0 t0 + w1 t1)|chi><chi| with |chi> ∝ sqrt(w0) a0|0> + sqrt(w1) a1|1>
        chi = np.stack([np.sqrt(w0) * a0, np.sqrt(w1) * a1], axis=-1)
        return qmath.ket_to_dm(chi)

    p_bar = (r11 + r22) * t0 + (r33 + r44) * t1
    un_bar = (
        pure_part(r11, r44)
        - deco * (c01 * e01 + c10 * e10)
        + r33 * t1[..., None, None] * e00
        + r22 * t0[..., None, None] * e11
        + r32 * c10 * e01
        + r23 * c01 * e10
    )
    p_ddot = (r33 + r44) * t0 + (r11 + r22) * t1
    un_ddot = (
        pure_part(r44, r11)
        - deco * (c10 * e10 + c01 * e01)
        + r22 * t1[..., None, None] * e00
        + r23 * c10 * e01
        + r32 * c01 * e10
        + r33 * t0[..., None, None] * e11
    )
    p_bar, rho_bar = _normalize(un_bar, p_bar)
    p_ddot, rho_ddot = _normalize(un_ddot, p_ddot)
    return BranchPair(p_bar, rho_bar, p_ddot, rho_ddot)


def teleport_bruteforce(psi: PureState2, rho_ab: np.ndarray) -> list[TeleportOutcome]:
    """Simulate the Bell measurement on ``|psi><psi| ⊗ rho_AB``.

    Works for any two-qubit ``rho_ab``. Returns one outcome per Bell state in
    ``BELL_LABELS`` order, each with the Pauli correction already undone.
    """
    joint = qmath.tensor(psi.dm(), np.asarray(rho_ab, dtype=complex))
    outcomes = []
    for label in BELL_LABELS:
        prob, post = qmath.project(joint, BELL_PROJECTORS[label])
        rho_b = qmath.partial_trace(post, keep=[2])
        name, u = CORRECTIONS[label]
        rho_b = qmath.conjugate(qmath.dagger(u), rho_b)
        outcomes.append(TeleportOutcome(label, prob, rho_b, name))
    return outcomes


def merge_branches(outcomes: list[TeleportOutcome]) -> BranchPair:
    """Fold the four brute-force outcomes into a ``BranchPair``.

    The Phi pair and the Psi pair carry the same corrected state, so the
    merge is a probability-weighted sum.
    """
    by = {o.bell_index: o for o in outcomes}

    def fold(a, b):
        pa, pb = np.asarray(a.probability), np.asarray(b.probability)
        un = pa[..., None, None] * a.corrected_state + pb[..., None, None] * b.corrected_state
        return _normalize(un, pa + pb)

    p_bar, rho_bar = fold(by["phi+"], by["phi-"])
    p_ddot, rho_ddot = fold(by["psi+"], by["psi-"])
    return BranchPair(p_bar, rho_bar, p_ddot, rho_ddot)
