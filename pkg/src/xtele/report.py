"""Report rows for the CLI: one row per channel, CSV or JSON."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

from . import fidelity
from .channels import X_KEYS, PureChannel, XState, x_concurrence
from .fidelity import FidelityEstimate
from .pipelines import is_failure, is_success, x_teleport_protocol, x_use_protocol
from .thresholds import c_x_threshold, compute_thresholds, exceeds
from .use_extract import quasi_extraction_probability

COLUMNS = (
    "valid", *X_KEYS, "c14", "f_x", "f_x_use", "f_x_use_0", "f_x_use_1", "p_qext",
    "c_x_th", "c_x_use_th", "c_x_use_0_th", "q_plain", "q_use", "q_filtered",
    "method", "n_samples", "std_err", "seed",
)  # fmt: skip

METHOD_NAMES = {"closed": "closed_form", "quad": "quadrature", "mc": "monte_carlo"}


def fmt_number(v: float) -> str:
    """9 significant digits; scientific notation outside ``[1e-4, 1e6)``."""
    if v == 0:
        return "0"
    if not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if 1e-4 <= abs(v) < 1e6:
        s = f"{v:.9g}"
        if "e" in s:  # .9g switches early near the bounds
            s = f"{v:.9f}".rstrip("0").rstrip(".")
        return s
    return f"{v:.8e}"


def _flag(v: bool | None) -> str:
    return "boundary" if v is None else ("true" if v else "false")


def _estimate(protocol, method: str, n_samples: int, seed: int, workers: int, select=None) -> FidelityEstimate:
    if method == "quadrature":
        return fidelity.average_fidelity(protocol, "quadrature", select=select)
    return fidelity.average_fidelity(protocol, "monte_carlo", n_samples, seed=seed, select=select, workers=workers)


def build_row(
    channel: XState | PureChannel,
    method: str = "closed",
    n_samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> dict[str, Any]:
    """Evaluate every metric for one channel.

    Pure channels are reported through their X-state embedding. USE columns
    are left empty when extraction is impossible (``r11 = 0``). Thresholds,
    flags and ``p_qext`` are closed forms whatever the method.
    """
    method = METHOD_NAMES.get(method, method)
    x = channel.as_x_state() if isinstance(channel, PureChannel) else channel
    row: dict[str, Any] = dict.fromkeys(COLUMNS)
    row.update(valid=True, **x.params(), method=method, seed=seed)
    row["c14"] = x_concurrence(x).c14
    use_ok = x.r11 > 0.0
    std_errs = []
    n_used = 0
    if method == "closed_form":
        row["f_x"] = fidelity.closed_f_x(x)
        if use_ok:
            row["f_x_use"] = fidelity.closed_f_x_use(x)
            row["f_x_use_0"] = fidelity.closed_f_x_use_success(x)[0]
            row["f_x_use_1"] = fidelity.closed_f_x_use_failure(x)[0]
    elif method in ("quadrature", "monte_carlo"):
        est = _estimate(x_teleport_protocol(x), method, n_samples, seed, workers)
        row["f_x"] = est.value
        std_errs.append(est.std_error)
        n_used = est.n_samples
        if use_ok:
            proto = x_use_protocol(x)
            for col, sel in (("f_x_use", None), ("f_x_use_0", is_success), ("f_x_use_1", is_failure)):
                est = _estimate(proto, method, n_samples, seed, workers, select=sel)
                if est.weight > 0:
                    row[col] = est.value
                    std_errs.append(est.std_error)
    else:
        raise ValueError(f"unknown method {method!r}")
    row["n_samples"] = n_used
    row["std_err"] = max(std_errs) if std_errs else 0.0
    row["c_x_th"] = c_x_threshold(x)
    if use_ok:
        row["p_qext"] = quasi_extraction_probability(x)
        th = compute_thresholds(x)
        row.update(
            c_x_th=th.c_x_th,
            c_x_use_th=th.c_x_use_th,
            c_x_use_0_th=th.c_x_use_0_th,
            q_plain=_flag(th.quantum_plain),
            q_use=_flag(th.quantum_use_total),
            q_filtered=_flag(th.quantum_use_filtered),
        )
    else:
        row["q_plain"] = _flag(exceeds(row["c14"], row["c_x_th"]))
    return row


def invalid_row(params: dict[str, float], method: str, seed: int) -> dict[str, Any]:
    row: dict[str, Any] = dict.fromkeys(COLUMNS)
    row.update(valid=False, method=METHOD_NAMES.get(method, method), seed=seed)
    for k in X_KEYS:
        if k in params:
            row[k] = params[k]
    return row


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt_number(v)
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not isinstance(v, bool):
        return float(fmt_number(v)) if math.isfinite(v) else None
    return {"true": True, "false": False}.get(v, v) if isinstance(v, str) else v


def to_csv(rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in COLUMNS])
    return buf.getvalue()


def to_json(rows: list[dict[str, Any]]) -> str:
    return json.dumps([{c: _json_value(row[c]) for c in COLUMNS} for row in rows], indent=1) + "\n"
