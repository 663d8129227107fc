"""Command-line front end.

Subcommands ``assign``, ``evolve``, ``discriminate``, ``verify`` and ``run``
(which replays any of the others from a JSON config file). Exit codes: 0 ok,
1 verification failure, 2 invalid input, 3 infeasible assignment.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from cgq import channels as ch_mod
from cgq.assignment import (
    assign_bns,
    assign_partial_trace,
    mc_estimate_bns,
    mc_estimate_partial_trace,
)
from cgq.channels import apply_channel, channel_by_name, custom_channel, verify_cptp
from cgq.discriminate import PRESETS, DiscriminationExperiment, run_discrimination
from cgq.dynamics import EffectiveChannelSpec, assign, default_grid, evolve_assigned
from cgq.errors import CGQError, InfeasibleStateError
from cgq.kernels import BACKEND
from cgq.linalg import (
    HAMILTONIAN_PRESETS,
    HERMITIAN_TOL,
    HamiltonianSpec,
    validate_density,
)
from cgq.sampling import SamplerConfig, default_seed

log = logging.getLogger("cgq")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3

EVOLVE_HEADER = ["t", "rho00", "re_rho01", "im_rho01", "rho11"]
DISCRIMINATE_HEADER = ["omega_t", "d_effective", "d_initial", "d_micro"]


class InputError(CGQError, ValueError):
    """Malformed or invalid file / flag content."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


# -- state files -------------------------------------------------------------


def state_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def _matrix_from_json(data: dict) -> np.ndarray:
    try:
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix file: {exc}") from exc
    if re.ndim != 2 or re.shape != im.shape or re.shape[0] != re.shape[1]:
        raise InputError(f"matrix parts must be equal square arrays, got {re.shape}/{im.shape}")
    if "dim" in data and int(data["dim"]) != re.shape[0]:
        raise InputError(f"declared dim {data['dim']} != matrix size {re.shape[0]}")
    return re + 1j * im


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_state(path, tol: float = HERMITIAN_TOL, validate: bool = True) -> np.ndarray:
    """Read a StateFile and return a density matrix.

    Files passing the (possibly loosened) check are projected onto the
    Hermitian, unit-trace matrices so downstream strict checks see roundoff
    only.
    """
    m = _matrix_from_json(_read_json(path))
    if validate:
        report = validate_density(m, tol=tol)
        if not report.passed:
            raise InputError(f"{path}: invalid density matrix {report.as_dict()}")
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if tr <= 0:
        raise InputError(f"{path}: non-positive trace")
    return m / tr


def load_hamiltonian(name_or_path: str) -> HamiltonianSpec:
    if name_or_path in HAMILTONIAN_PRESETS:
        return HAMILTONIAN_PRESETS[name_or_path]()
    data = _read_json(name_or_path)
    return HamiltonianSpec(_matrix_from_json(data), data.get("label", Path(name_or_path).stem))


def load_channel_table(path) -> ch_mod.CoarseGrainingChannel:
    """Custom channel file: ``{"re": [[[[...]]]], "im": ...}`` shaped (D, D, d, d)."""
    data = _read_json(path)
    try:
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed channel table: {exc}") from exc
    return custom_channel(re + 1j * im)


# -- output ------------------------------------------------------------------


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _emit(text: str, path) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def _sampler(args, samples=None, seed=None) -> SamplerConfig | None:
    samples = samples if samples is not None else getattr(args, "samples", None)
    if samples is None:
        return None
    seed = seed if seed is not None else args.seed
    return SamplerConfig(
        sample_count=int(samples),
        seed=int(seed) if seed is not None else default_seed(),
        chunk_size=args.chunk_size,
        workers=args.workers,
    )


# -- commands ----------------------------------------------------------------


def cmd_assign(args) -> int:
    rho = load_state(args.state, args.tol, not args.no_validate)
    channel = channel_by_name(args.channel, dim_e=args.dim_e, dim_s=rho.shape[0])
    if args.channel == ch_mod.BNS:
        micro = assign_bns(rho)
    else:
        micro = assign_partial_trace(rho, args.dim_e)
    report = {
        "validation": validate_density(micro).as_dict(),
        "round_trip_defect": float(np.max(np.abs(apply_channel(channel, micro) - rho))),
    }
    samples, seed = (args.mc if args.mc else (args.samples, args.seed))
    cfg = _sampler(args, samples, seed)
    if cfg is not None:
        if args.channel == ch_mod.BNS:
            est = mc_estimate_bns(rho, cfg)
        else:
            est = mc_estimate_partial_trace(rho, args.dim_e, cfg)
        report["mc"] = {
            "samples": cfg.sample_count,
            "seed": cfg.seed,
            "estimate": state_to_json(est.mean),
            "max_deviation": float(np.max(np.abs(est.mean - micro))),
            "max_stderr": float(np.max(est.stderr)),
        }
    out = {
        "channel": args.channel,
        "input": state_to_json(rho),
        "micro_state": state_to_json(micro),
        "report": report,
    }
    _emit(_dump_json(out), args.out)
    return EXIT_OK


def _spec(args, dim_s: int = 2) -> EffectiveChannelSpec:
    channel = channel_by_name(args.channel, dim_e=args.dim_e, dim_s=dim_s)
    return EffectiveChannelSpec(channel, load_hamiltonian(args.hamiltonian), _sampler(args))


def _grid(args) -> np.ndarray:
    return default_grid(args.t_min, args.t_max, args.steps)


def cmd_evolve(args) -> int:
    rho = load_state(args.state, args.tol, not args.no_validate)
    spec = _spec(args, rho.shape[0])
    if rho.shape != (spec.channel.dim_out,) * 2 or rho.shape[0] != 2:
        raise InputError("evolve expects a qubit macro state")
    micro = assign(spec, rho)
    rows = []
    for t in _grid(args):
        r = evolve_assigned(spec, micro, t)
        rows.append([t, r[0, 0].real, r[0, 1].real, r[0, 1].imag, r[1, 1].real])
    _emit(_csv_text(EVOLVE_HEADER, rows), args.out)
    return EXIT_OK


def _experiment(args) -> DiscriminationExperiment:
    if args.preset:
        base = PRESETS[args.preset](steps=args.steps or 400)
        spec = base.spec
        if args.samples is not None:
            spec = EffectiveChannelSpec(spec.channel, spec.hamiltonian, _sampler(args))
        grid = base.time_grid
        if args.t_min is not None or args.t_max is not None:
            grid = default_grid(
                args.t_min if args.t_min is not None else 0.0,
                args.t_max if args.t_max is not None else 2 * math.pi,
                args.steps or 400,
            )
        return DiscriminationExperiment(base.rho0, base.chi0, spec, grid)
    if not (args.rho and args.chi):
        raise InputError("discriminate needs --preset or both --rho and --chi")
    rho = load_state(args.rho, args.tol, not args.no_validate)
    chi = load_state(args.chi, args.tol, not args.no_validate)
    grid = default_grid(
        args.t_min if args.t_min is not None else 0.0,
        args.t_max if args.t_max is not None else 2 * math.pi,
        args.steps or 400,
    )
    return DiscriminationExperiment(rho, chi, _spec(args, rho.shape[0]), grid)


def cmd_discriminate(args) -> int:
    exp = _experiment(args)
    series = run_discrimination(exp)
    rows = [
        [t, d, series.d_initial, series.d_micro]
        for t, d in zip(series.t, series.d_effective)
    ]
    summary = series.summary()
    summary["steps"] = int(series.t.size)
    summary["channel"] = exp.spec.channel.kind
    summary["hamiltonian"] = exp.spec.hamiltonian.label
    if exp.spec.sampler is not None:
        summary["samples"] = exp.spec.sampler.sample_count
        summary["seed"] = exp.spec.sampler.seed
    summary_path = args.summary
    if summary_path is None and args.out not in (None, "-"):
        summary_path = str(Path(args.out).with_suffix(".json"))
    _emit(_csv_text(DISCRIMINATE_HEADER, rows), args.out)
    if summary_path is not None:
        _emit(_dump_json(summary), summary_path)
    else:
        sys.stderr.write(_dump_json(summary))
    return EXIT_OK


def _random_qubit_states(n: int, seed: int):
    rng = np.random.Generator(np.random.Philox(key=seed))
    for _ in range(n):
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        m = g @ g.conj().T
        yield m / np.trace(m).real


def cmd_verify(args) -> int:
    if args.table:
        channel = load_channel_table(args.table)
    else:
        channel = channel_by_name(args.channel, dim_e=args.dim_e)
    cptp = verify_cptp(channel, tol=args.tol)
    result = {"channel": channel.kind, "cptp": cptp.as_dict()}
    ok = cptp.passed
    if channel.kind in (ch_mod.BNS, ch_mod.PARTIAL_TRACE):
        seed = args.seed if args.seed is not None else default_seed()
        worst = 0.0
        for rho in _random_qubit_states(args.states, seed):
            if channel.kind == ch_mod.BNS:
                micro = assign_bns(rho)
            else:
                micro = assign_partial_trace(rho, channel.dim_e)
            worst = max(worst, float(np.max(np.abs(apply_channel(channel, micro) - rho))))
        rt_ok = worst <= args.tol
        result["round_trip"] = {
            "states": args.states,
            "seed": seed,
            "max_defect": worst,
            "passed": rt_ok,
        }
        ok = ok and rt_ok
    result["passed"] = ok
    _emit(_dump_json(result), args.out)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_run(args) -> int:
    cfg = _read_json(args.config)
    if not isinstance(cfg, dict) or "command" not in cfg:
        raise InputError("config must be a JSON object with a 'command' field")
    argv = [str(cfg["command"])]
    positional = cfg.get("state")
    for key, value in cfg.items():
        if key in ("command", "state") or value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif isinstance(value, list):
            argv.append(flag)
            argv.extend(str(v) for v in value)
        else:
            argv.extend([flag, str(value)])
    if positional is not None:
        argv.append(str(positional))
    return main(argv)


# -- parser ------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, *, channel=True, sampler=True) -> None:
    if channel:
        p.add_argument("--channel", choices=[ch_mod.PARTIAL_TRACE, ch_mod.BNS], default=ch_mod.BNS)
        p.add_argument("--dim-e", type=int, default=2, help="environment dimension for partial-trace")
    if sampler:
        p.add_argument("--samples", type=int, default=None, help="use the Monte-Carlo assigner")
        p.add_argument("--seed", type=int, default=None, help="sampler seed (default $CGQ_SEED or 0)")
        p.add_argument("--chunk-size", type=int, default=65536)
        p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--tol", type=float, default=HERMITIAN_TOL)
    p.add_argument("--no-validate", action="store_true", help="skip the state-file check")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgq", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assign", help="assign a micro state to a macro state")
    p.add_argument("state", help="StateFile JSON")
    _common(p)
    p.add_argument("--mc", nargs=2, type=int, metavar=("SAMPLES", "SEED"), default=None,
                   help="also run the Monte-Carlo oracle")
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("evolve", help="effective evolution of a macro state")
    p.add_argument("state", help="StateFile JSON")
    _common(p)
    p.add_argument("--hamiltonian", default="local-y", help="preset name or matrix JSON file")
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=2 * math.pi)
    p.add_argument("--steps", type=int, default=200)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("discriminate", help="trace-distance trajectory of two macro states")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--rho", default=None)
    p.add_argument("--chi", default=None)
    _common(p)
    p.add_argument("--hamiltonian", default="global-y")
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--summary", default=None, help="summary JSON path")
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("verify", help="CPTP and round-trip checks of a channel")
    _common(p, sampler=False)
    p.add_argument("--table", default=None, help="custom channel table JSON")
    p.add_argument("--states", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="run a command described by a JSON config")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    log.debug("kernel backend: %s", BACKEND)
    for name in ("steps", "samples", "states"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            parser.error(f"--{name} must be >= 1")
    try:
        return args.func(args)
    except InfeasibleStateError as exc:
        sys.stderr.write(f"error: infeasible assignment: {exc}\n")
        return EXIT_INFEASIBLE
    except (CGQError, ValueError) as exc:
        sys.stderr.write(f"error: invalid input: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
