"""Command-line driver.

    repdiag m-matrix --alpha 1 --lambda 0+1i
    repdiag epsilon --alpha 1 --lambda 0+1i --x-large 20
    repdiag oracle --lambda 10+10i
    repdiag symbolic-dump --iterations 5
    repdiag realize --at 12.5
    repdiag verify
    repdiag sweep --alpha 0.5 --lambdas 0+1i 0.5+1i 10+10i

Exit codes: 0 success, 2 invalid configuration, 3 pipeline failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PIPELINE = 3
EXIT_VERIFY = 4

ALPHA_MAX = 4 / 3


class ConfigError(ValueError):
    pass


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


def parse_lambda(text: str) -> complex:
    """Parse ``a+bi`` (also ``bi``, ``a``, ``a-bi``); the decimal point is always ``.``."""
    s = text.strip().replace(" ", "").replace("I", "i")
    if s.endswith("i"):
        s = s[:-1] + "j"
        if s in ("j", "+j", "-j"):
            s = s.replace("j", "1j")
    try:
        return complex(s)
    except ValueError as exc:
        raise ConfigError(f"cannot parse lambda {text!r}") from exc


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 1.0
    lam: complex = 1j
    X: float = 10.0
    M: int = 6
    ode_tol: float = 1e-10
    oracle: bool = False
    fmt: str = "table"
    command: str = "m-matrix"

    def validate(self, spectral: bool = True) -> "RunConfig":
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if spectral and self.alpha > ALPHA_MAX + 1e-9:
            raise ConfigError(f"alpha={self.alpha} is outside the limit-point range (0, 4/3]")
        if self.lam.real < -1:
            raise ConfigError("Re lambda must be >= -1")
        if spectral and not self.lam.imag > 0:
            raise ConfigError("Im lambda must be positive")
        if not self.X > 1:
            raise ConfigError("X must exceed 1")
        if self.M < 2:
            raise ConfigError("M must be >= 2")
        if not self.ode_tol > 0:
            raise ConfigError("ode tolerance must be positive")
        if self.fmt not in ("table", "json", "csv"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        return self


def _c(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def run_m_matrix(cfg: RunConfig) -> dict:
    """Transcript -> eps(X) -> dichotomy -> frame -> Riccati -> M, with diagnostics."""
    from .asymsol import solution_frame
    from .bounds import check_dichotomy, epsilon_of_X
    from .recur import generate_transcript
    from .riccati import m_matrix

    cfg.validate()
    stage = "transcript"
    try:
        tr = generate_transcript(cfg.M)
        stage = "epsilon"
        rep = epsilon_of_X(cfg.alpha, cfg.lam, cfg.X, cfg.M, tr)
        stage = "dichotomy"
        dich = check_dichotomy(cfg.alpha, cfg.lam, cfg.X, cfg.M, tr, grid=np.geomspace(cfg.X, 10 * cfg.X, 12))
        stage = "frame"
        frame = solution_frame(cfg.alpha, cfg.lam, cfg.X, cfg.M, eps=rep.eps or 0.0, transcript=tr)
        stage = "riccati"
        res = m_matrix(frame, cfg.ode_tol, eps=rep.eps or 0.0)
    except Exception as exc:
        raise PipelineError(stage, exc) from exc
    record = {
        "config": {
            "alpha": cfg.alpha,
            "lambda": _c(cfg.lam),
            "X": cfg.X,
            "M": cfg.M,
            "ode_tol": cfg.ode_tol,
        },
        "m": {"m11": _c(res.m11), "m12": _c(res.m12), "m21": _c(complex(res.M[1, 0])), "m22": _c(res.m22)},
        "eps": rep.eps,
        "eps_valid": rep.valid,
        "symmetry_defect": res.symmetry_defect,
        "dichotomy": dich.ok,
        "route": res.route,
        "integrator": {k: (v if not isinstance(v, float) else float(v)) for k, v in res.stats.items()},
    }
    if cfg.oracle and cfg.alpha == 1.0:
        try:
            from .airy import airy_m_matrix

            o = airy_m_matrix(cfg.lam)
        except Exception as exc:
            raise PipelineError("oracle", exc) from exc
        record["oracle"] = {
            "m11": _c(o.m11),
            "m12": _c(o.m12),
            "m22": _c(o.m22),
            "max_rel_diff": float(np.abs(res.M - o.M).max() / np.abs(o.M).max()),
        }
    return record


def _fmt_c(z: dict) -> str:
    sign = "+" if z["im"] >= 0 else "-"
    return f"{z['re']:.10f} {sign} {abs(z['im']):.10f} i"


def emit_output(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, sort_keys=True, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["entry", "re", "im"])
        for key in ("m11", "m12", "m21", "m22"):
            z = record["m"][key]
            w.writerow([key, repr(z["re"]), repr(z["im"])])
        return buf.getvalue()
    if fmt == "table":
        cfg = record["config"]
        lam = cfg["lambda"]
        lines = [f"alpha = {cfg['alpha']:g}   lambda = {lam['re']:g} {'+' if lam['im'] >= 0 else '-'} {abs(lam['im']):g} i   X = {cfg['X']:g}   M = {cfg['M']}"]
        for key in ("m11", "m12", "m22"):
            lines.append(f"  {key}  {_fmt_c(record['m'][key])}")
        eps = record.get("eps")
        lines.append(f"  eps(X) = {eps:.6e}" if eps is not None else "  eps(X) = invalid")
        lines.append(f"  symmetry defect = {record['symmetry_defect']:.2e}   route = {record['route']}")
        if "oracle" in record:
            lines.append(f"  oracle max rel diff = {record['oracle']['max_rel_diff']:.2e}")
        return "\n".join(lines)
    raise ConfigError(f"unknown format {fmt!r}")


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _sweep_one(cfg: RunConfig) -> dict:
    try:
        return run_m_matrix(cfg)
    except (ConfigError, PipelineError) as exc:
        return {"config": {"alpha": cfg.alpha, "lambda": _c(cfg.lam)}, "error": str(exc)}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=1.0)
    common.add_argument("--lambda", dest="lam", type=str, default="0+1i")
    common.add_argument("--x-large", dest="X", type=float, default=10.0)
    common.add_argument("--iterations", dest="M", type=int, default=6)
    common.add_argument("--ode-tol", type=float, default=1e-10)
    common.add_argument("--oracle", action="store_true")
    common.add_argument("--format", dest="fmt", choices=("table", "json", "csv"), default="table")
    common.add_argument("--out", default=None)

    p = argparse.ArgumentParser(prog="repdiag", description="Spectral matrix of y'''' - x^alpha y = lambda y by repeated diagonalization.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("m-matrix", parents=[common])
    sub.add_parser("epsilon", parents=[common])
    sub.add_parser("oracle", parents=[common])
    sub.add_parser("symbolic-dump", parents=[common])
    r = sub.add_parser("realize", parents=[common])
    r.add_argument("--at", type=float, required=True)
    sub.add_parser("verify", parents=[common])
    s = sub.add_parser("sweep", parents=[common])
    s.add_argument("--lambdas", nargs="+", required=True)
    s.add_argument("--workers", type=int, default=None)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            alpha=args.alpha,
            lam=parse_lambda(args.lam),
            X=args.X,
            M=args.M,
            ode_tol=args.ode_tol,
            oracle=args.oracle,
            fmt=args.fmt,
            command=args.command,
        )
        spectral = args.command in ("m-matrix", "oracle", "sweep")
        cfg.validate(spectral=spectral)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "m-matrix":
            _write(emit_output(run_m_matrix(cfg), cfg.fmt), args.out)
        elif args.command == "epsilon":
            from .bounds import epsilon_of_X

            rep = epsilon_of_X(cfg.alpha, cfg.lam, cfg.X, cfg.M)
            _write(json.dumps(rep.as_dict(), sort_keys=True, indent=2), args.out)
            return EXIT_OK if rep.valid else EXIT_PIPELINE
        elif args.command == "oracle":
            if cfg.alpha != 1.0:
                raise ConfigError("the oracle exists for alpha = 1 only")
            from .airy import airy_m_matrix, oracle_vectors

            o = airy_m_matrix(cfg.lam)
            Y = oracle_vectors(cfg.lam, cfg.X)
            rec = {
                "lambda": _c(cfg.lam),
                "m": {"m11": _c(o.m11), "m12": _c(o.m12), "m21": _c(complex(o.M[1, 0])), "m22": _c(o.m22)},
                "terms": o.stats["terms"],
                "frame_at_X": {"X": cfg.X, "columns": [[_c(complex(v)) for v in Y[:, k]] for k in range(2)]},
            }
            _write(json.dumps(rec, sort_keys=True, indent=2), args.out)
        elif args.command == "symbolic-dump":
            from .recur import dump_transcript, generate_transcript

            _write(dump_transcript(generate_transcript(cfg.M)), args.out)
        elif args.command == "realize":
            from .ncalg import P
            from .realize import Realizer, default_order, make_context
            from .recur import generate_transcript

            tr = generate_transcript(cfg.M)
            R = Realizer(make_context(cfg.alpha, cfg.lam, args.at, default_order(cfg.M)), tr)
            lines = [f"x = {args.at:g}"]
            with np.printoptions(precision=6, linewidth=160):
                for m in range(1, cfg.M):
                    lines.append(f"P{m} =\n{R.atom(P(m)).value}")
                lines.append(f"E{cfg.M} =\n{R.value(tr.E(cfg.M))}")
                lines.append(f"(I+P) =\n{R.transfer_product()}")
            _write("\n".join(lines), args.out)
        elif args.command == "verify":
            from .verify import run_checks

            checks = run_checks(cfg.alpha, cfg.lam, cfg.X, cfg.M, cfg.ode_tol)
            _write("\n".join(c.line() for c in checks), args.out)
            return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY
        elif args.command == "sweep":
            cfgs = [replace(cfg, lam=parse_lambda(t)) for t in args.lambdas]
            for c in cfgs:
                c.validate()
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                records = list(pool.map(_sweep_one, cfgs))
            if cfg.fmt == "json":
                text = json.dumps(records, sort_keys=True, indent=2)
            else:
                text = "\n".join(emit_output(r, cfg.fmt) if "error" not in r else f"error: {r['error']}" for r in records)
            _write(text, args.out)
            if any("error" in r for r in records):
                return EXIT_PIPELINE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PipelineError as exc:
        print(f"pipeline failure at {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
