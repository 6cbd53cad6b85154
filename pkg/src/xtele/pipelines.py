"""Protocols usable with :func:`xtele.fidelity.average_fidelity`.

Every protocol maps a batch of input states to a list of
``Outcome(label, prob, state)``. USE outcome labels end in ``:0``
(auxiliary qubit found in ``|0>``, success) or ``:1`` (failure).
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from . import qmath
from .channels import PureChannel, XState
from .qmath import PureState2
from .teleport import BELL_LABELS, teleport_bruteforce, teleport_pure_closed, teleport_x_closed
from .use_extract import build_use_unitaries, use_bruteforce, use_pure, use_x_closed


class Outcome(NamedTuple):
    label: str
    prob: np.ndarray
    state: np.ndarray


def is_success(label: str) -> bool:
    return label.endswith(":0")


def is_failure(label: str) -> bool:
    return label.endswith(":1")


def in_branch(branch: str) -> Callable[[str], bool]:
    """Selector for one teleportation branch: ``bar`` (Phi outcomes) or ``ddot``."""
    names = {"bar": ("bar", "phi+", "phi-"), "ddot": ("ddot", "psi+", "psi-")}[branch]
    return lambda label: label.split(":")[0] in names


def classical_protocol(psi: PureState2) -> list[Outcome]:
    """Measure in the computational basis and re-prepare the result."""
    shape = psi.shape + (2, 2)
    return [
        Outcome("0", psi.p0, np.broadcast_to(qmath.P0, shape)),
        Outcome("1", psi.p1, np.broadcast_to(qmath.P1, shape)),
    ]


def _pair_outcomes(pair) -> list[Outcome]:
    return [Outcome("bar", pair.p_bar, pair.rho_bar), Outcome("ddot", pair.p_ddot, pair.rho_ddot)]


def teleport_protocol(rho_ab: np.ndarray) -> Callable[[PureState2], list[Outcome]]:
    """Brute-force teleportation through an arbitrary two-qubit channel."""
    rho_ab = np.asarray(rho_ab, dtype=complex)

    def run(psi):
        return [Outcome(o.bell_index, o.probability, o.corrected_state) for o in teleport_bruteforce(psi, rho_ab)]

    return run


def use_protocol(rho_ab: np.ndarray, ratio: float) -> Callable[[PureState2], list[Outcome]]:
    """Brute-force teleportation followed by brute-force USE on every Bell outcome."""
    rho_ab = np.asarray(rho_ab, dtype=complex)
    u_bar, u_ddot = build_use_unitaries(ratio)

    def run(psi):
        out = []
        for o in teleport_bruteforce(psi, rho_ab):
            branch, u = ("bar", u_bar) if o.bell_index.startswith("phi") else ("ddot", u_ddot)
            res = use_bruteforce(o.corrected_state, u, branch)
            p = np.asarray(o.probability)
            out.append(Outcome(f"{o.bell_index}:0", p * res.success_prob, res.success_state))
            out.append(Outcome(f"{o.bell_index}:1", p * res.failure_prob, res.failure_state))
        return out

    return run


def pure_teleport_protocol(ch: PureChannel, *, bruteforce: bool = False):
    if bruteforce:
        return teleport_protocol(ch.as_matrix())
    return lambda psi: _pair_outcomes(teleport_pure_closed(psi, ch))


def x_teleport_protocol(x: XState, *, bruteforce: bool = False):
    if bruteforce:
        return teleport_protocol(x.as_matrix())
    return lambda psi: _pair_outcomes(teleport_x_closed(psi, x))


def _use_outcomes(pair, results) -> list[Outcome]:
    out = []
    for p_branch, res in zip((pair.p_bar, pair.p_ddot), results):
        p_branch = np.asarray(p_branch)
        out.append(Outcome(f"{res.branch}:0", p_branch * res.success_prob, res.success_state))
        out.append(Outcome(f"{res.branch}:1", p_branch * res.failure_prob, res.failure_state))
    return out


def pure_use_protocol(ch: PureChannel, *, bruteforce: bool = False):
    if bruteforce:
        return use_protocol(ch.as_matrix(), ch.ratio)

    def run(psi):
        pair = teleport_pure_closed(psi, ch)
        return _use_outcomes(pair, [use_pure(psi, ch, "bar"), use_pure(psi, ch, "ddot")])

    return run


def x_use_protocol(x: XState, *, bruteforce: bool = False):
    if bruteforce:
        return use_protocol(x.as_matrix(), x.ratio)

    def run(psi):
        pair = teleport_x_closed(psi, x)
        return _use_outcomes(pair, [use_x_closed(psi, x, "bar"), use_x_closed(psi, x, "ddot")])

    return run


__all__ = [
    "BELL_LABELS",
    "Outcome",
    "classical_protocol",
    "in_branch",
    "is_failure",
    "is_success",
    "pure_teleport_protocol",
    "pure_use_protocol",
    "teleport_protocol",
    "use_protocol",
    "x_teleport_protocol",
    "x_use_protocol",
]
