"""Command-line interface.

    xtele eval     --x r11=..,r22=..,r33=..,r44=..,r14=..,r23=..
    xtele eval     --pure alpha=0.5
    xtele sweep    --x ... --sweep r14=0:0.38:11 [--format json]
    xtele validate --seed 42

Exit codes: 0 ok, 1 internal error, 2 bad input, 3 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import report
from .channels import X_KEYS, parse_kv, pure_channel_from_spec, x_state_from_spec
from .errors import XteleError
from .validation import run_validation

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_VALIDATION = 0, 1, 2, 3


class InputError(Exception):
    pass


def read_config(path: str) -> dict[str, str]:
    """Flat ``key=value`` file; blank lines and ``#`` comments are ignored."""
    cfg = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"{path}:{n}: expected key=value")
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def _parse_sweep(text: str) -> tuple[str, np.ndarray]:
    name, sep, rng = text.partition("=")
    parts = rng.split(":")
    if not sep or len(parts) != 3:
        raise InputError(f"--sweep expects param=start:stop:steps, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"bad numbers in --sweep {text!r}") from None
    if steps < 1:
        raise InputError("--sweep steps must be >= 1")
    return name.strip(), np.linspace(start, stop, steps)


def _base_params(args) -> tuple[str, dict[str, float]]:
    if bool(args.pure) == bool(args.x):
        raise InputError("give exactly one of --pure or --x")
    try:
        return ("pure", parse_kv(args.pure)) if args.pure else ("x", parse_kv(args.x))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _channel(kind: str, params: dict[str, float], strict: bool):
    if kind == "pure":
        return pure_channel_from_spec(params)
    return x_state_from_spec(params, strict=strict)


def _emit(rows, fmt: str) -> None:
    sys.stdout.write(report.to_json(rows) if fmt == "json" else report.to_csv(rows))


def cmd_eval(args) -> int:
    kind, params = _base_params(args)
    try:
        channel = _channel(kind, params, args.strict_principal)
    except (XteleError, ValueError) as exc:
        print(f"invalid channel: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit([report.build_row(channel, args.method, args.samples, args.seed, args.workers)], args.format)
    return EXIT_OK


def cmd_sweep(args) -> int:
    kind, params = _base_params(args)
    if not args.sweep:
        raise InputError("sweep needs --sweep param=start:stop:steps")
    name, values = _parse_sweep(args.sweep)
    allowed = ("alpha",) if kind == "pure" else X_KEYS
    if name not in allowed:
        raise InputError(f"cannot sweep {name!r}; choose from {', '.join(allowed)}")
    rows = []
    for v in values:
        point = dict(params, **{name: float(v)})
        try:
            channel = _channel(kind, point, args.strict_principal)
        except (XteleError, ValueError):
            rows.append(report.invalid_row(point, args.method, args.seed))
            continue
        rows.append(report.build_row(channel, args.method, args.samples, args.seed, args.workers))
    if not any(r["valid"] for r in rows):
        print(f"all {len(rows)} sweep points are invalid channels", file=sys.stderr)
        return EXIT_INPUT
    _emit(rows, args.format)
    return EXIT_OK


def cmd_validate(args) -> int:
    return run_validation(args.seed, args.n, args.mc_channels, args.mc_samples)


def build_parser(defaults: dict[str, str] | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xtele", description="Teleportation fidelity over pure and X-state channels.")
    parser.add_argument("--config", help="flat key=value file; command-line flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    def channel_opts(p):
        p.add_argument("--pure", help="pure channel, alpha=<value>")
        p.add_argument("--x", help="X-state, r11=..,r22=..,r33=..,r44=..,r14=..,r23=..")
        p.add_argument("--method", choices=("closed", "quad", "mc"), default="closed")
        p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo sample count")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--strict-principal", action="store_true", help="require r11*r44 > r22*r33")

    p_eval = sub.add_parser("eval", help="evaluate one channel")
    channel_opts(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="sweep one channel parameter")
    channel_opts(p_sweep)
    p_sweep.add_argument("--sweep", help="param=start:stop:steps (inclusive, linear)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run the oracle suite over random channels")
    p_val.add_argument("--seed", type=int, default=42)
    p_val.add_argument("--n", type=int, default=1000, help="number of random channels")
    p_val.add_argument("--mc-channels", type=int, default=10)
    p_val.add_argument("--mc-samples", type=int, default=20_000)
    p_val.set_defaults(func=cmd_validate)

    if defaults:
        for p in (p_eval, p_sweep, p_val):
            known = {a.dest for a in p._actions}
            p.set_defaults(**{k: _coerce(p, k, v) for k, v in defaults.items() if k in known})
    return parser


def _coerce(parser: argparse.ArgumentParser, dest: str, value: str):
    for action in parser._actions:
        if action.dest == dest:
            if isinstance(action, argparse._StoreTrueAction):
                return value.lower() in ("1", "true", "yes", "on")
            return action.type(value) if action.type else value
    return value


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        defaults = read_config(known.config) if known.config else None
        args = build_parser(defaults).parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
