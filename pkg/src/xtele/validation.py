"""Oracle suite: closed forms against simulation over random channels.

Each random channel is checked four ways:

* quadrature averages of the brute-force 8x8 pipelines against the
  closed-form average fidelities;
* closed-form outcome states against the brute-force outcome states at
  every quadrature node;
* block-formula concurrence against the general Wootters concurrence;
* the weighted success/failure decomposition of the USE fidelity.

A few channels are additionally estimated by Monte Carlo and compared by
z-score.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from . import fidelity
from .channels import random_pure_channel, random_x_state, x_concurrence
from .fidelity import average_fidelity, quadrature_grid
from .pipelines import (
    is_failure,
    is_success,
    pure_teleport_protocol,
    pure_use_protocol,
    x_teleport_protocol,
    x_use_protocol,
)
from .report import fmt_number
from .teleport import merge_branches, teleport_bruteforce, teleport_x_closed
from .use_extract import build_use_unitaries, use_bruteforce, use_x_closed

TOLERANCES = {
    "quadrature": 1e-10,
    "outcome_states": 1e-10,
    "concurrence": 1e-9,
    "decomposition": 1e-12,
    "monte_carlo_z": 5.0,
}


@dataclass
class Check:
    name: str
    tol: float
    worst: float = 0.0
    offenders: list[str] = field(default_factory=list)

    def add(self, dev: float, label: str) -> None:
        self.worst = max(self.worst, dev)
        if not dev <= self.tol:
            self.offenders.append(label)

    @property
    def ok(self) -> bool:
        return not self.offenders


def _outcome_state_deviation(x) -> float:
    psi, _ = quadrature_grid()
    closed = teleport_x_closed(psi, x)
    brute = merge_branches(teleport_bruteforce(psi, x.as_matrix()))
    dev = max(
        np.max(np.abs(closed.p_bar - brute.p_bar)),
        np.max(np.abs(closed.rho_bar - brute.rho_bar)),
        np.max(np.abs(closed.rho_ddot - brute.rho_ddot)),
    )
    u_bar, u_ddot = build_use_unitaries(x.ratio)
    for branch, u, rho in (("bar", u_bar, closed.rho_bar), ("ddot", u_ddot, closed.rho_ddot)):
        c = use_x_closed(psi, x, branch)
        b = use_bruteforce(rho, u, branch)
        dev = max(
            dev,
            np.max(np.abs(c.success_prob - b.success_prob)),
            np.max(np.abs(c.success_state - b.success_state)),
            np.max(np.abs(c.failure_state - b.failure_state)),
        )
    return float(dev)


def run_validation(
    seed: int = 42,
    n: int = 1000,
    mc_channels: int = 10,
    mc_samples: int = 20_000,
    out: TextIO | None = None,
) -> int:
    """Run the suite and print a summary; return 0 on success, 3 otherwise."""
    out = sys.stdout if out is None else out
    rng = np.random.default_rng(seed)
    checks = {k: Check(k, v) for k, v in TOLERANCES.items()}
    channels = []
    for i in range(n):
        x = random_x_state(rng)
        ch = random_pure_channel(rng)
        channels.append(x)
        label = f"x[{i}] " + ",".join(f"{k}={fmt_number(v)}" for k, v in x.params().items())
        plain = average_fidelity(x_teleport_protocol(x, bruteforce=True))
        use = x_use_protocol(x, bruteforce=True)
        total = average_fidelity(use)
        succ = average_fidelity(use, select=is_success)
        fail = average_fidelity(use, select=is_failure)
        f0, w0 = fidelity.closed_f_x_use_success(x)
        f1, w1 = fidelity.closed_f_x_use_failure(x)
        devs = [
            abs(plain.value - fidelity.closed_f_x(x)),
            abs(total.value - fidelity.closed_f_x_use(x)),
            abs(succ.value - f0),
            abs(succ.weight - w0),
        ]
        if w1 > 1e-9:
            devs.append(abs(fail.value - f1))
        checks["quadrature"].add(max(devs), label)
        checks["outcome_states"].add(_outcome_state_deviation(x), label)
        conc = x_concurrence(x)
        checks["concurrence"].add(abs(conc.concurrence - conc.general), label)
        checks["decomposition"].add(abs(w0 * f0 + w1 * f1 - fidelity.closed_f_x_use(x)), label)

        plabel = f"pure[{i}] alpha={fmt_number(ch.alpha)}"
        dp = max(
            abs(average_fidelity(pure_teleport_protocol(ch, bruteforce=True)).value - fidelity.closed_f_p(ch)),
            abs(average_fidelity(pure_use_protocol(ch, bruteforce=True)).value - fidelity.closed_f_p_use(ch)),
        )
        checks["quadrature"].add(dp, plabel)

    for i, x in enumerate(channels[:mc_channels]):
        est = average_fidelity(x_use_protocol(x), "monte_carlo", mc_samples, seed=seed + i)
        z = abs(est.value - fidelity.closed_f_x_use(x)) / est.std_error
        checks["monte_carlo_z"].add(z, f"x[{i}] mc")

    print(f"validation seed={seed} channels={n} mc_channels={min(mc_channels, n)} mc_samples={mc_samples}", file=out)
    for c in checks.values():
        kind = "max |z|" if c.name == "monte_carlo_z" else "max |delta|"
        status = "ok" if c.ok else f"FAIL ({len(c.offenders)})"
        print(f"{c.name:<15} {kind} = {fmt_number(c.worst)} (tol {fmt_number(c.tol)}) {status}", file=out)
    failed = [c for c in checks.values() if not c.ok]
    for c in failed:
        for label in c.offenders[:20]:
            print(f"  {c.name}: {label}", file=out)
    print("result: " + ("FAIL" if failed else "PASS"), file=out)
    return 3 if failed else 0
