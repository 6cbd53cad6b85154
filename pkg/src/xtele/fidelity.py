"""Fidelities, Haar averaging and the closed-form average fidelities.

Averages are taken over the uniform (Haar) measure on single-qubit pure
states. In the parametrisation ``|psi> = sqrt(t)|0> + sqrt(1-t) e^{i phi}|1>``
(up to a global phase) that measure is uniform in ``t`` on ``[0, 1]`` and
uniform in ``phi``.

Two numerical estimators are available: a tensor-product Gauss-Legendre x
trapezoid grid, exact for the low-degree polynomial/harmonic integrands that
occur here, and Monte Carlo with counter-based seeding.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import qmath
from .channels import PureChannel, XState, pure_concurrence
from .errors import ProtocolError
from .qmath import PureState2
from .use_extract import quasi_extraction_probability

CLASSICAL_BOUND = 2.0 / 3.0
SAMPLE_BLOCK = 4096
PROB_SUM_TOL = 1e-9

METHODS = ("closed_form", "quadrature", "monte_carlo")


@dataclass(frozen=True)
class FidelityEstimate:
    value: float
    method: str
    std_error: float = 0.0
    n_samples: int = 0
    weight: float = 1.0
    """Average total probability of the outcomes the estimate is conditioned on."""

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.std_error < 0:
            raise ValueError("std_error must be non-negative")


# -- single-pair fidelity ---------------------------------------------------


def fidelity_qubit(rho: np.ndarray, sigma: np.ndarray, *, validate: bool = True):
    """Fidelity of two qubit density matrices, ``Tr(rho sigma) + 2 sqrt(det rho det sigma)``."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape[-2:] != (2, 2) or sigma.shape[-2:] != (2, 2):
        raise ValueError("fidelity_qubit needs 2x2 matrices")
    if validate:
        qmath.check_density_matrix(rho)
        qmath.check_density_matrix(sigma)
    overlap = qmath.trace(rho @ sigma).real
    dets = np.linalg.det(rho).real * np.linalg.det(sigma).real
    f = overlap + 2.0 * np.sqrt(np.clip(dets, 0.0, None))
    f = np.clip(f, 0.0, 1.0)
    return float(f) if np.ndim(f) == 0 else f


def fidelity_pure(psi: PureState2, rho: np.ndarray):
    """``<psi|rho|psi>``, the fidelity when one argument is pure."""
    ket = psi.ket()
    val = np.einsum("...i,...ij,...j->...", np.conj(ket), np.asarray(rho, dtype=complex), ket).real
    return float(val) if np.ndim(val) == 0 else val


# -- Haar sampling ------------------------------------------------------------


@dataclass
class HaarSampler:
    """Counter-based stream of Haar-random qubit states.

    Sample ``i`` depends only on ``(seed, i)``: samples are generated in
    fixed blocks of ``SAMPLE_BLOCK`` seeded from ``(seed, i // SAMPLE_BLOCK)``,
    so any partition of the index range across workers reproduces the same
    stream.
    """

    seed: int
    counter: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(self.seed)

    def uniforms(self, start: int, stop: int) -> np.ndarray:
        """Raw ``(stop - start, 3)`` uniforms for sample indices ``[start, stop)``."""
        chunks = []
        i = start
        while i < stop:
            b, off = divmod(i, SAMPLE_BLOCK)
            take = min(SAMPLE_BLOCK - off, stop - i)
            block = np.random.default_rng([self.seed, b]).random((SAMPLE_BLOCK, 3))
            chunks.append(block[off : off + take])
            i += take
        if not chunks:
            return np.empty((0, 3))
        return np.concatenate(chunks)

    def states(self, start: int, stop: int) -> PureState2:
        u = self.uniforms(start, stop)
        t = u[:, 0]
        theta0 = 2.0 * np.pi * u[:, 1]
        theta1 = 2.0 * np.pi * u[:, 2]
        return PureState2(np.sqrt(t) * np.exp(1j * theta0), np.sqrt(1.0 - t) * np.exp(1j * theta1))


def sample_haar(sampler: HaarSampler, n: int | None = None) -> PureState2:
    """Draw the next state (or next ``n`` states) and advance the counter."""
    count = 1 if n is None else int(n)
    psi = sampler.states(sampler.counter, sampler.counter + count)
    sampler.counter += count
    return psi[0] if n is None else psi


# -- deterministic quadrature ---------------------------------------------------


def quadrature_grid(n_t: int = 12, n_phi: int = 16) -> tuple[PureState2, np.ndarray]:
    """Nodes and weights (summing to 1) for averaging over the Haar measure.

    Gauss-Legendre in ``t`` and equispaced nodes in the relative phase; the
    global phase is dropped.
    """
    x, w = np.polynomial.legendre.leggauss(n_t)
    t = 0.5 * (x + 1.0)
    wt = 0.5 * w
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(t, phi, indexing="ij")
    weights = np.outer(wt, np.full(n_phi, 1.0 / n_phi))
    return PureState2.from_angles(tt.ravel(), pp.ravel()), weights.ravel()


# -- averaging ------------------------------------------------------------------

Protocol = Callable[[PureState2], Sequence]
Selector = Callable[[str], bool]


def _evaluate(protocol: Protocol, psi: PureState2, select: Selector | None):
    outcomes = protocol(psi)
    total = np.zeros(psi.shape)
    num = np.zeros(psi.shape)
    den = np.zeros(psi.shape)
    for label, prob, state in outcomes:
        prob = np.broadcast_to(np.asarray(prob, dtype=float), psi.shape)
        total = total + prob
        if select is not None and not select(label):
            continue
        num = num + prob * fidelity_pure(psi, state)
        den = den + prob
    err = np.max(np.abs(total - 1.0)) if total.size else 0.0
    if err > PROB_SUM_TOL:
        raise ProtocolError(f"outcome probabilities sum to 1 only within {err:.3e}")
    return num, den


def average_fidelity(
    protocol: Protocol,
    method: str = "quadrature",
    n: int | tuple[int, int] | None = None,
    *,
    seed: int = 0,
    select: Selector | None = None,
    workers: int = 1,
) -> FidelityEstimate:
    """Haar-averaged fidelity of ``protocol`` with its input.

    ``protocol`` maps a batch of input states to ``(label, probability,
    state)`` triples whose probabilities sum to one for every input. With
    ``select`` the average is conditioned on the outcomes whose label it
    accepts: ``E[sum p F] / E[sum p]`` over the selected outcomes.

    For ``method="quadrature"``, ``n`` is ``(n_t, n_phi)`` (default
    ``(12, 16)``); for ``"monte_carlo"`` it is the sample count.
    """
    if method == "quadrature":
        n_t, n_phi = (12, 16) if n is None else n
        psi, w = quadrature_grid(n_t, n_phi)
        num, den = _evaluate(protocol, psi, select)
        weight = float(w @ den)
        value = float(w @ num) / weight if weight > 0 else math.nan
        return FidelityEstimate(value, "quadrature", 0.0, int(w.size), weight)
    if method != "monte_carlo":
        raise ValueError(f"unknown averaging method {method!r}")
    n = 100_000 if n is None else int(n)
    if n < 2:
        raise ValueError("Monte Carlo needs at least 2 samples")
    sampler = HaarSampler(seed)
    starts = list(range(0, n, SAMPLE_BLOCK))

    def run(start):
        return _evaluate(protocol, sampler.states(start, min(start + SAMPLE_BLOCK, n)), select)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    x = np.concatenate([p[0] for p in parts])
    wts = np.concatenate([p[1] for p in parts])
    mean_w = float(wts.mean())
    if mean_w <= 0:
        return FidelityEstimate(math.nan, "monte_carlo", 0.0, n, 0.0)
    ratio = float(x.mean()) / mean_w
    resid = x - ratio * wts
    se = float(resid.std(ddof=1) / math.sqrt(n) / mean_w)
    return FidelityEstimate(ratio, "monte_carlo", se, n, mean_w)


# -- closed forms -------------------------------------------------------------------


def closed_f_p(ch: PureChannel) -> float:
    return CLASSICAL_BOUND + pure_concurrence(ch) / 3.0


def closed_f_p_use(ch: PureChannel) -> float:
    c = pure_concurrence(ch)
    return 1.0 - math.sqrt(max(0.0, 1.0 - c * c)) / 3.0


def closed_f_x(x: XState) -> float:
    return CLASSICAL_BOUND + (2.0 * x.r14 - (x.r22 + x.r33)) / 3.0


def closed_f_x_use(x: XState) -> float:
    """Total average fidelity with USE, failures included."""
    return (2.0 / 3.0) * (1.0 + x.r14 * x.ratio - 0.5 * (x.r22 + x.r33))


def closed_f_x_use_success(x: XState) -> tuple[float, float]:
    """``(normalised fidelity of the quasi-extracted outcomes, their total probability)``."""
    weight = quasi_extraction_probability(x)
    r2 = x.r11 / x.r44
    gain = 2.0 * x.ratio * x.r14 - (x.r33 + r2 * x.r22)
    return CLASSICAL_BOUND + gain / (3.0 * weight), weight


def closed_f_x_use_failure(x: XState) -> tuple[float, float]:
    """``(normalised fidelity of the failed outcomes, their total probability)``.

    The textbook expression ``2/3 - r22 (1 - r11/r44) / (3 (1 - p_qext))``
    simplifies, using ``1 - p_qext = (r22 + r44)(1 - r11/r44)``, to
    ``2/3 - r22 / (3 (r22 + r44))``. The simplified form is used: it avoids
    the cancellation as ``r11 -> r44`` and is the continuous value at
    ``r11 = r44``, where failure has probability zero.
    """
    quasi_extraction_probability(x)  # raises on r11 = 0
    weight = (x.r22 + x.r44) * (1.0 - x.r11 / x.r44)
    return CLASSICAL_BOUND - x.r22 / (3.0 * (x.r22 + x.r44)), weight


def closed_estimate(value: float, weight: float = 1.0) -> FidelityEstimate:
    return FidelityEstimate(float(value), "closed_form", 0.0, 0, float(weight))
