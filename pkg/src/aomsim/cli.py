"""Command-line interface: transform audits, state evolution, analysis,
and the swap-scheme runner.

Exit codes: 0 success, 2 invalid input or configuration, 3 a physics audit
failed (e.g. the checked transform is not an isometry, or a unitary run
shows a signaling distance above tolerance).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from dataclasses import dataclass

from . import __version__
from .errors import AomsimError, FormatError
from .states import (
    ModeLabel,
    normalize,
    state_from_dict,
    state_notation,
    state_to_dict,
)
from .transforms import (
    AOMParams,
    aom_evolution,
    apply_transform,
    balanced_aom,
    flawed_aom,
    isometry_report,
    transform_from_dict,
)
from .analysis import (
    entropy,
    hermitian_eigenvalues,
    negativity,
    partial_trace,
    pure_density_matrix,
    schmidt,
)
from .scenarios import no_signaling_check, run_swap, run_swap_details

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_AUDIT_FAILED = 3

DEFAULT_TOLERANCE = 1e-12

_GENERIC_PORTS = dict(
    in_low=ModeLabel("1", 0), in_high=ModeLabel("1'", 1),
    out_low=ModeLabel("t", 0), out_high=ModeLabel("d", 1),
)


@dataclass
class RunConfig:
    """Validated per-invocation settings shared by the subcommands."""

    command: str
    transform_kind: str = "correct"
    theta: float = math.pi / 4
    phi: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0
    state_path: str | None = None
    transform_path: str | None = None
    out_path: str | None = None
    keep: tuple[int, ...] = ()
    split: tuple[int, ...] = ()
    sweep: int = 0
    seed: int = 0
    tolerance: float = DEFAULT_TOLERANCE
    output_format: str = "text"


def _round_floats(value):
    """Fix floats to 12 decimals (and kill negative zero) for stable output."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return round(value, 12) + 0.0
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_round_floats(v) for v in value]
    return value


def render_json(payload: dict) -> str:
    return json.dumps(_round_floats(payload), sort_keys=True, indent=2) + "\n"


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_json_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror or exc}") from None

    def reject_constant(name: str):
        raise FormatError(f"{path}: non-finite constant {name!r} is not allowed")

    try:
        doc = json.loads(text, parse_constant=reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: top level must be a JSON object")
    return doc


def _parse_slots(raw: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in raw.split(",") if part.strip() != "")
    except ValueError:
        raise FormatError(f"{flag}: expected comma-separated slot indices, got {raw!r}") from None


def _resolve_tolerance(args) -> float:
    if args.tolerance is not None:
        tol = args.tolerance
    else:
        env = os.environ.get("AOMSIM_TOLERANCE")
        if env is not None:
            try:
                tol = float(env)
            except ValueError:
                raise FormatError(f"AOMSIM_TOLERANCE: not a number: {env!r}") from None
        else:
            tol = DEFAULT_TOLERANCE
    if not (tol > 0.0) or not math.isfinite(tol):
        raise FormatError(f"tolerance must be a positive finite number, got {tol}")
    return tol


def _ports_from_args(args) -> dict:
    ports = dict(_GENERIC_PORTS)
    for name in ("in_low", "in_high", "out_low", "out_high"):
        raw = getattr(args, name, None)
        if raw is not None:
            spatial, _, freq = raw.partition(":")
            try:
                ports[name] = ModeLabel(spatial, int(freq) if freq else 0)
            except (ValueError, FormatError):
                raise FormatError(
                    f"--{name.replace('_', '-')}: expected SPATIAL[:FREQ], got {raw!r}"
                ) from None
    return ports


def _build_config(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    cfg.tolerance = _resolve_tolerance(args)
    cfg.output_format = getattr(args, "format", "text")
    for name in ("theta", "phi", "phi1", "phi2", "sweep", "seed"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    cfg.transform_kind = getattr(args, "kind", None) or getattr(args, "transform", None) or "correct"
    cfg.state_path = getattr(args, "state", None)
    cfg.transform_path = getattr(args, "file", None) or getattr(args, "transform_file", None)
    cfg.out_path = getattr(args, "out", None)
    if getattr(args, "keep", None):
        cfg.keep = _parse_slots(args.keep, "--keep")
    if getattr(args, "split", None):
        cfg.split = _parse_slots(args.split, "--split")
    # validate file paths up front, before any computation
    for path in (cfg.state_path, cfg.transform_path):
        if path is not None and not os.path.isfile(path):
            raise FormatError(f"no such file: {path}")
    return cfg


# --- subcommands -------------------------------------------------------------

def _cmd_check_transform(cfg: RunConfig, args) -> int:
    if cfg.transform_path is not None:
        transform = transform_from_dict(_load_json_file(cfg.transform_path))
        source = cfg.transform_path
    elif cfg.transform_kind == "flawed":
        transform = flawed_aom(**_ports_from_args(args))
        source = "flawed"
    else:
        transform = aom_evolution(AOMParams(cfg.theta, cfg.phi, **_ports_from_args(args)))
        source = f"rotation(theta={cfg.theta}, phi={cfg.phi})"
    report = isometry_report(transform, cfg.tolerance)
    payload = {"transform": source, "tolerance": cfg.tolerance, **report.to_dict()}
    if cfg.output_format == "json":
        sys.stdout.write(render_json(payload))
    else:
        print(f"transform:          {source}")
        print(f"gram_deviation:     {report.gram_deviation:.12g}")
        print(f"worst_pair_overlap: {report.worst_pair_overlap:.12g}")
        print(f"is_isometry:        {report.is_isometry}")
        print(f"is_unitary:         {report.is_unitary}")
    return EXIT_OK if report.is_isometry else EXIT_AUDIT_FAILED


def _cmd_evolve(cfg: RunConfig, args) -> int:
    state = state_from_dict(_load_json_file(cfg.state_path))
    if cfg.transform_path is not None:
        transform = transform_from_dict(_load_json_file(cfg.transform_path))
    elif args.second_leg_phase is not None:
        transform = balanced_aom(cfg.phi, args.second_leg_phase, **_ports_from_args(args))
    else:
        transform = aom_evolution(AOMParams(cfg.theta, cfg.phi, **_ports_from_args(args)))
    evolved = apply_transform(transform, state)
    doc = state_to_dict(evolved)
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8") as fh:
            fh.write(render_json(doc))
    if cfg.output_format == "json":
        sys.stdout.write(render_json(doc))
    else:
        print(state_notation(evolved))
    return EXIT_OK


def _cmd_analyze(cfg: RunConfig, args) -> int:
    state = state_from_dict(_load_json_file(cfg.state_path))
    if not cfg.keep:
        raise FormatError("--keep is required (comma-separated slot indices)")
    normalized, original_norm = normalize(state)
    keeps_everything = set(cfg.keep) == set(range(normalized.n_slots))
    rho = (pure_density_matrix(normalized) if keeps_everything
           else partial_trace(normalized, cfg.keep))
    payload = {
        "original_norm": original_norm,
        "kept_slots": list(rho.kept_slots),
        "rho_eigenvalues": [round(ev, 12) for ev in hermitian_eigenvalues(rho.matrix)],
        "rho_trace": rho.trace(),
    }
    if not keeps_everything or cfg.split:
        spectrum = schmidt(normalized, cfg.split if keeps_everything else cfg.keep)
        payload["schmidt_values"] = list(spectrum.values)
        payload["entanglement_entropy_bits"] = entropy(spectrum)
    if cfg.split:
        payload["negativity"] = negativity(rho, cfg.split)
        payload["split"] = list(cfg.split)
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8") as fh:
            fh.write(render_json(rho.to_dict()))
    if cfg.output_format == "json":
        sys.stdout.write(render_json(payload))
    else:
        for key in sorted(payload):
            print(f"{key}: {payload[key]}")
    return EXIT_OK


def _cmd_run_swap(cfg: RunConfig, args) -> int:
    report, selected = run_swap_details(cfg.transform_kind, cfg.phi1, cfg.phi2)
    payload = report.to_dict(__version__, cfg.tolerance)
    verdict_invariant = True
    if cfg.sweep > 0:
        rng = random.Random(cfg.seed)
        max_negativity = 0.0
        for _ in range(cfg.sweep):
            p1 = rng.uniform(0.0, 2.0 * math.pi)
            p2 = rng.uniform(0.0, 2.0 * math.pi)
            swept = run_swap(cfg.transform_kind, p1, p2)
            if swept.swapping_verdict != report.swapping_verdict:
                verdict_invariant = False
            max_negativity = max(max_negativity, swept.rho14_negativity)
        payload["sweep"] = {
            "runs": cfg.sweep,
            "seed": cfg.seed,
            "verdict_invariant": verdict_invariant,
            "max_negativity": max_negativity,
        }
    if cfg.output_format == "json":
        sys.stdout.write(render_json(payload))
    else:
        print(f"transform_kind:          {report.transform_kind}")
        print(f"norm_after_aoms:         {report.norm_after_aoms:.12f}")
        print(f"postselect_probability:  {report.postselect_probability:.12f}")
        print(f"factor_overlap:          {report.factor_overlap.real:+.12f}{report.factor_overlap.imag:+.12f}i")
        print(f"rho14_negativity:        {report.rho14_negativity:.12f}")
        print(f"rho14_eigenvalues:       {[round(ev, 12) for ev in report.rho14_eigenvalues]}")
        print(f"nosignal_trace_distance: {report.nosignal_trace_distance:.12f}")
        print(f"swapping_verdict:        {report.swapping_verdict}")
        if cfg.sweep > 0:
            print(f"sweep:                   {payload['sweep']}")
        print("post-selected state:")
        print(state_notation(selected))
    # the verdict is a physical statement; phase dependence would mean a bug
    return EXIT_OK if verdict_invariant else EXIT_AUDIT_FAILED


def _cmd_no_signal(cfg: RunConfig, args) -> int:
    distance = no_signaling_check(cfg.transform_kind, cfg.phi1, cfg.phi2)
    holds = distance <= cfg.tolerance
    payload = {
        "transform_kind": cfg.transform_kind,
        "phi1": cfg.phi1,
        "phi2": cfg.phi2,
        "trace_distance": distance,
        "no_signaling_holds": holds,
        "tolerance": cfg.tolerance,
    }
    if cfg.output_format == "json":
        sys.stdout.write(render_json(payload))
    else:
        print(f"transform_kind:     {cfg.transform_kind}")
        print(f"trace_distance:     {distance:.12f}")
        print(f"no_signaling_holds: {holds}")
    # a unitary device must never signal; flag a broken build loudly
    if cfg.transform_kind == "correct" and not holds:
        return EXIT_AUDIT_FAILED
    return EXIT_OK


# --- argument parsing --------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep exit code 2 but drop the usage dump on stderr noise
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"error: {message}\n")


def _add_common(sub):
    sub.add_argument("--tolerance", type=float, default=None,
                     help="audit tolerance (default 1e-12; AOMSIM_TOLERANCE overrides)")
    sub.add_argument("--format", choices=("text", "json"), default="text")


def _add_ports(sub):
    for flag in ("in-low", "in-high", "out-low", "out-high"):
        sub.add_argument(f"--{flag}", metavar="SPATIAL[:FREQ]", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aomsim",
                     description="Audit acousto-optic mode transforms and the "
                                 "entanglement-swapping scheme built on them.")
    parser.add_argument("--version", action="version", version=f"aomsim {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check-transform", help="isometry/unitarity audit")
    check.add_argument("--kind", choices=("correct", "flawed"), default=None)
    check.add_argument("--theta", type=float, default=None)
    check.add_argument("--phi", type=float, default=None)
    check.add_argument("--file", default=None, help="JSON transform to audit")
    _add_ports(check)
    _add_common(check)

    evolve = commands.add_parser("evolve", help="apply a device rotation to a state file")
    evolve.add_argument("--state", required=True)
    evolve.add_argument("--theta", type=float, default=None)
    evolve.add_argument("--phi", type=float, default=None)
    evolve.add_argument("--second-leg-phase", type=float, default=None,
                        help="use the balanced device with this extra column phase")
    evolve.add_argument("--transform-file", default=None,
                        help="apply a JSON transform instead of the rotation family")
    evolve.add_argument("--out", default=None, help="write the evolved state JSON here")
    _add_ports(evolve)
    _add_common(evolve)

    analyze = commands.add_parser("analyze", help="reduced-state diagnostics for a state file")
    analyze.add_argument("--state", required=True)
    analyze.add_argument("--keep", required=True, help="slots to keep, e.g. 0,3")
    analyze.add_argument("--split", default=None,
                         help="slots (subset of --keep) to transpose for negativity")
    analyze.add_argument("--out", default=None, help="write the reduced density matrix here")
    _add_common(analyze)

    swap = commands.add_parser("run-swap", help="run the swapping scheme end to end")
    swap.add_argument("--transform", choices=("correct", "flawed"), default="correct")
    swap.add_argument("--phi1", type=float, default=None)
    swap.add_argument("--phi2", type=float, default=None)
    swap.add_argument("--sweep", type=int, default=None,
                      help="also run N random phase pairs and check verdict invariance")
    swap.add_argument("--seed", type=int, default=None, help="seed for --sweep draws")
    _add_common(swap)

    nosig = commands.add_parser("no-signal", help="bystander-pair signaling audit")
    nosig.add_argument("--transform", choices=("correct", "flawed"), default="correct")
    nosig.add_argument("--phi1", type=float, default=None)
    nosig.add_argument("--phi2", type=float, default=None)
    _add_common(nosig)

    return parser


_HANDLERS = {
    "check-transform": _cmd_check_transform,
    "evolve": _cmd_evolve,
    "analyze": _cmd_analyze,
    "run-swap": _cmd_run_swap,
    "no-signal": _cmd_no_signal,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _build_config(args)
        return _HANDLERS[args.command](cfg, args)
    except FormatError as exc:
        return _fail(str(exc), EXIT_USAGE)
    except AomsimError as exc:
        return _fail(str(exc), EXIT_USAGE)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
