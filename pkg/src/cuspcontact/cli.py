"""Command-line entry point: exact invariant queries and verification suites."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import hirzebruch, lutzmori, solgeom
from .errors import BadInput, CuspError
from .monodromy import (
    BCycle,
    Mat2Z,
    Triple,
    _int_list,
    cf_sequence,
    cycle_of_monodromy,
    cycle_to_matrix,
    euler_characteristic,
    fundamental_unit,
    matrix_to_cycle,
    monodromy_from_pqr,
    mori_matrix,
    parse_cycle,
    parse_matrix,
    pqr_cycle_report,
)
from .report import Report, emit_report

CATALOG = {
    "triples": [(2, 3, 7), (2, 3, 8), (2, 4, 5), (3, 3, 4), (4, 4, 4), (2, 3, 100)],
    "cycles": [(3,), (3, 4), (4, 2, 5), (3, 2, 2, 2)],
    "mori": [(1, (1,)), (2, (1, 2)), (3, (1, 2, 3))],
}

CHECKS = ("sol", "pullback", "charts", "levi", "lutz3", "lutz5")
DEFAULTS = {"seed": 42, "samples": 1000, "h": 1e-5, "tol": None, "json": False}


class UsageError(CuspError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 42
    n_samples: int = 1000
    tol: Optional[float] = None
    h: float = 1e-5
    fmt: str = "text"


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", default=None)
    p.add_argument("--config")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cuspcontact", description="Cusp singularities, Sol-manifolds and their contact forms.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("monodromy", help="monodromy of T_{p,q,r}")
    p.add_argument("--pqr", required=True)
    _add_common(p)

    p = sub.add_parser("mori", help="Mori's matrix A_{m,k}")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", required=True)
    _add_common(p)

    p = sub.add_parser("cycle", help="resolution cycle of a matrix")
    p.add_argument("--matrix", required=True)
    _add_common(p)

    p = sub.add_parser("cf", help="w_k, p_k, q_k, A_k of a cycle")
    p.add_argument("--cycle", required=True)
    p.add_argument("--range", default=None)
    _add_common(p)

    p = sub.add_parser("unit", help="fundamental unit A_r of a cycle")
    p.add_argument("--cycle", required=True)
    _add_common(p)

    p = sub.add_parser("euler", help="Euler characteristic of the Milnor fiber")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", required=True)
    _add_common(p)

    p = sub.add_parser("report", help="invariants of T_{p,q,r}")
    p.add_argument("--pqr", required=True)
    _add_common(p)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("check", choices=CHECKS + ("all",))
    src = p.add_mutually_exclusive_group()
    src.add_argument("--cycle")
    src.add_argument("--pqr")
    src.add_argument("--matrix")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--h", type=float)
    _add_common(p)
    return parser


_CONFIG_TYPES = {"samples": int, "seed": int, "tol": float, "h": float, "m": int}


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; blank lines and ``#`` comments ignored."""
    out: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise BadInput(f"cannot read config {path!r}: {exc.strerror}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadInput(f"{path}:{n}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "json":
            out[key] = value.lower() in ("1", "true", "yes", "on")
        elif key in _CONFIG_TYPES:
            try:
                out[key] = _CONFIG_TYPES[key](value)
            except ValueError:
                raise BadInput(f"{path}:{n}: bad value for {key}: {value!r}") from None
        else:
            out[key] = value
    return out


def _merge(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg = read_config(args.config)
        known = set(vars(args)) - {"config", "command", "check"}
        unknown = set(cfg) - known
        if unknown:
            raise BadInput(f"unknown config keys: {', '.join(sorted(unknown))}")
        opts.update(cfg)
    opts.update({k: v for k, v in vars(args).items() if v is not None})
    return opts


def _emit(payload, opts: dict) -> str:
    if opts["json"]:
        return json.dumps(payload, indent=2)
    if isinstance(payload, dict):
        return "\n".join(f"{k}: {v}" for k, v in payload.items())
    return str(payload)


def _matrix_payload(A: Mat2Z) -> dict:
    return {"matrix": [list(r) for r in A.rows()], "trace": A.trace, "det": A.det}


def _triple(text: str) -> Triple:
    parts = _int_list(text)
    if len(parts) != 3:
        raise BadInput(f"--pqr needs three integers, got {text!r}")
    return Triple(*parts)


def _cycle_payload(c: BCycle, k_min: int, k_max: int) -> dict:
    cf = cf_sequence(c, k_min, k_max)
    ks = range(k_min, k_max + 1)
    return {
        "cycle": list(c.b),
        "w": {str(k): str(cf.w_at(k)) for k in ks},
        "p": {str(k): cf.p_seq[k] for k in ks},
        "q": {str(k): cf.q_seq[k] for k in ks},
        "A": {str(k): str(cf.A_seq[k]) for k in ks},
        "unit": str(cf.unit),
    }


def _source(params: dict) -> tuple[Mat2Z, BCycle]:
    """(monodromy A of T_A, cycle c with P(c)^{-1} ~ A); cycle 3 by default."""
    if params.get("pqr"):
        A = monodromy_from_pqr(_triple(params["pqr"]))
        return A, cycle_of_monodromy(A)
    if params.get("matrix"):
        A = parse_matrix(params["matrix"])
        return A, cycle_of_monodromy(A)
    c = parse_cycle(params.get("cycle") or "3")
    return cycle_to_matrix(c).inverse(), c


def make_config(command: str, opts: dict) -> RunConfig:
    cfg = RunConfig(
        command=command,
        params={k: opts[k] for k in ("cycle", "pqr", "matrix") if opts.get(k)},
        seed=int(opts["seed"]),
        n_samples=int(opts["samples"]),
        tol=None if opts["tol"] is None else float(opts["tol"]),
        h=float(opts["h"]),
        fmt="json" if opts["json"] else "text",
    )
    if cfg.n_samples < 0:
        raise BadInput("--samples must be >= 0")
    if not cfg.h > 0:
        raise BadInput("--h must be positive")
    if cfg.tol is not None and not cfg.tol >= 0:
        raise BadInput("--tol must be non-negative")
    return cfg


def run_checks(checks: Sequence[str], cfg: RunConfig) -> list[Report]:
    A, c = _source(cfg.params)
    n, seed, h, tol = cfg.n_samples, cfg.seed, cfg.h, cfg.tol
    reports: list[Report] = []
    cusp = None
    sol = None
    for name in checks:
        if name == "sol":
            sol = sol or solgeom.build_sol_model(A)
            reports.extend(solgeom.sol_suite(sol, n, seed, h, tol))
        elif name in ("pullback", "charts", "levi"):
            cusp = cusp or hirzebruch.build_cusp_model(c)
            reports.extend(hirzebruch.hirzebruch_suite(cusp, n, seed, h, tol, only=name)[name])
        elif name in ("lutz3", "lutz5"):
            sol = sol or solgeom.build_sol_model(A)
            reports.extend(lutzmori.lutz_suite(sol, n, seed, h, tol, only=name)[name])
        else:
            raise UsageError(f"unknown check {name!r}")
    return reports


_VALUE_OPTS = {"--range", "--matrix", "--cycle", "--pqr", "--k"}


def _glue_values(argv: list[str]) -> list[str]:
    """Turn ``--range -1,4`` into ``--range=-1,4`` so leading minus signs parse."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in _VALUE_OPTS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        argv = _glue_values(sys.argv[1:] if argv is None else list(argv))
        args = build_parser().parse_args(argv)
        opts = _merge(args)
        cmd = args.command
        if cmd == "verify":
            checks = CHECKS if args.check == "all" else (args.check,)
            cfg = make_config(cmd, opts)
            reports = run_checks(checks, cfg)
            text = emit_report(reports, cfg.fmt)
            if text:
                print(text, file=out)
            return 0 if all(r.passed for r in reports) else 1
        if cmd == "monodromy":
            payload = {"pqr": opts["pqr"], **_matrix_payload(monodromy_from_pqr(_triple(opts["pqr"])))}
        elif cmd == "mori":
            payload = {"m": opts["m"], "k": _int_list(opts["k"]), **_matrix_payload(mori_matrix(opts["m"], _int_list(opts["k"])))}
        elif cmd == "cycle":
            A = parse_matrix(opts["matrix"])
            payload = {**_matrix_payload(A), "cycle": list(matrix_to_cycle(A).b), "cycle_of_T_A": list(cycle_of_monodromy(A).b)}
        elif cmd == "cf":
            c = parse_cycle(opts["cycle"])
            rng = _int_list(opts["range"]) if opts.get("range") else [0, len(c)]
            if len(rng) != 2 or rng[0] > rng[1]:
                raise BadInput(f"--range needs kmin,kmax with kmin <= kmax, got {opts['range']!r}")
            payload = _cycle_payload(c, rng[0], rng[1])
        elif cmd == "unit":
            c = parse_cycle(opts["cycle"])
            u = fundamental_unit(c)
            payload = {"cycle": list(c.b), "unit": str(u), "norm": str(u.norm()), "real": str(u.to_real(17))}
        elif cmd == "euler":
            payload = {"chi": euler_characteristic(opts["m"], _int_list(opts["k"]))}
        elif cmd == "report":
            r = pqr_cycle_report(_triple(opts["pqr"]))
            if opts["json"]:
                print(emit_report([r], "json"), file=out)
            else:
                print(r.text_line(), file=out)
                for block in r.details:
                    print("  " + " ".join(f"{k}={v}" for k, v in block.items()), file=out)
            return 0
        else:  # pragma: no cover - argparse restricts commands
            raise UsageError(f"unknown command {cmd}")
        print(_emit(payload, opts), file=out)
        return 0
    except CuspError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
