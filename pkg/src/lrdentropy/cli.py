"""Command-line front end: ``lrdentropy <command> [options]``.

Exit status: 0 success, 2 bad arguments or spec grammar, 3 numerical
failure (partial results are still written, with ``failed:`` cells),
4 I/O error. Errors go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .cepstrum import cepstral_coefficients, mutual_information_past_future
from .convergence import convergence_series, rate_report
from .divergence import SeriesStatus
from .entropy import (
    MaximizerError,
    MaximizerModel,
    arfima0d0_entropy_rate_fixed_variance,
    entropy_rate,
    entropy_rate_maximizer,
    entropy_rate_quadrature,
    fgn_entropy_rate,
    fgn_entropy_rate_approx,
)
from .models import ARFIMA, FGN, ProcessSpec, fgn_spectral_density_approx, spectral_function
from .paths import PathRequest, generate
from .quadrature import QuadratureConfig, QuadratureError
from .tables import DIVERGENT, Failure, Table, to_csv, to_json
from .toeplitz import LevinsonError

__all__ = ["SpecSyntaxError", "parse_spec", "format_spec", "parse_grid", "build_parser", "run", "main"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
COMMANDS = ("entropy-rate", "sweep", "spectrum", "cepstrum", "mi", "convergence", "simulate", "max-entropy")
_QUAD_FIELDS = ("abs_tol", "rel_tol", "max_subdivisions", "origin_excision")


class SpecSyntaxError(ValueError):
    pass


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Raises instead of printing usage, so run() can report errors as JSON."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _split_top(text: str):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise SpecSyntaxError("unbalanced ']'")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise SpecSyntaxError("unbalanced '['")
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _real(key, text):
    try:
        value = float(text)
    except ValueError:
        raise SpecSyntaxError(f"{key}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise SpecSyntaxError(f"{key}: must be finite")
    return value


def _real_list(key, text):
    if not (text.startswith("[") and text.endswith("]")):
        raise SpecSyntaxError(f"{key}: expected [..], got {text!r}")
    inner = text[1:-1].strip()
    return tuple(_real(key, t) for t in inner.split(",")) if inner else ()


def parse_spec(text: str) -> ProcessSpec:
    """``fgn:H=<r>[,var=<r>]`` or ``arfima:d=<r>[,ar=[..]][,ma=[..]][,ivar=<r>]``."""
    family, sep, body = text.strip().partition(":")
    if not sep:
        raise SpecSyntaxError(f"missing ':' in spec {text!r}")
    fields = {}
    for item in _split_top(body):
        key, eq, value = item.partition("=")
        if not eq:
            raise SpecSyntaxError(f"expected key=value, got {item!r}")
        key = key.strip()
        if key in fields:
            raise SpecSyntaxError(f"duplicate key {key!r}")
        fields[key] = value.strip()
    family = family.strip().lower()
    allowed = {"fgn": {"H", "var"}, "arfima": {"d", "ar", "ma", "ivar"}}
    if family not in allowed:
        raise SpecSyntaxError(f"unknown model {family!r} (fgn or arfima)")
    unknown = set(fields) - allowed[family]
    if unknown:
        raise SpecSyntaxError(f"unknown keys for {family}: {sorted(unknown)}")
    try:
        if family == "fgn":
            if "H" not in fields:
                raise SpecSyntaxError("fgn needs H=")
            return FGN(_real("H", fields["H"]), _real("var", fields.get("var", "1")))
        if "d" not in fields:
            raise SpecSyntaxError("arfima needs d=")
        return ARFIMA(_real("d", fields["d"]), _real_list("ar", fields.get("ar", "[]")),
                      _real_list("ma", fields.get("ma", "[]")), _real("ivar", fields.get("ivar", "1")))
    except SpecSyntaxError:
        raise
    except ValueError as exc:
        raise SpecSyntaxError(str(exc)) from None


def format_spec(spec: ProcessSpec) -> str:
    if isinstance(spec, FGN):
        return f"fgn:H={spec.hurst!r},var={spec.variance!r}"
    lst = lambda xs: "[" + ",".join(repr(x) for x in xs) + "]"  # noqa: E731
    return f"arfima:d={spec.d!r},ar={lst(spec.ar)},ma={lst(spec.ma)},ivar={spec.innovation_variance!r}"


def parse_grid(text: str):
    """``lo:hi:step`` -> grid points lo, lo+step, ... <= hi (inclusive, rounded to 12 digits)."""
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:step, got {text!r}") from None
    if not step > 0:
        raise argparse.ArgumentTypeError("grid step must be > 0")
    if not (0 < lo <= hi < 1):
        raise argparse.ArgumentTypeError("grid must lie within (0, 1)")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _var_list(text: str):
    try:
        values = [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad variance list {text!r}") from None
    if not all(v > 0 and math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError("variances must be positive")
    return values


def _spec_arg(text: str):
    try:
        return parse_spec(text)
    except SpecSyntaxError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lrdentropy",
                     description="Entropy rates and memory diagnostics of Gaussian LRD processes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--jobs", type=_positive_int, default=1, help="worker threads for sweeps")
    common.add_argument("--seed", type=int, default=0)
    q = common.add_argument_group("quadrature (defaults from LRDENT_* environment variables)")
    q.add_argument("--abs-tol", type=float)
    q.add_argument("--rel-tol", type=float)
    q.add_argument("--max-subdivisions", type=int)
    q.add_argument("--origin-excision", type=float)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("entropy-rate", parents=[common], help="entropy rate of one model")
    p.add_argument("--spec", type=_spec_arg, required=True)

    p = sub.add_parser("sweep", parents=[common], help="entropy rates over an H grid")
    p.add_argument("--model", choices=("fgn", "arfima"), required=True)
    p.add_argument("--grid", type=parse_grid, default=parse_grid("0.05:0.95:0.05"))
    p.add_argument("--var", type=_var_list, default=[1.0])

    p = sub.add_parser("spectrum", parents=[common], help="spectral density on (0, pi]")
    p.add_argument("--spec", type=_spec_arg, required=True)
    p.add_argument("--points", type=_positive_int, default=256)

    p = sub.add_parser("cepstrum", parents=[common], help="cepstral coefficients b_k")
    p.add_argument("--spec", type=_spec_arg, required=True)
    p.add_argument("--k-max", type=_positive_int, default=256)

    p = sub.add_parser("mi", parents=[common], help="mutual information between past and future")
    p.add_argument("--spec", type=_spec_arg, required=True)
    p.add_argument("--n-terms", type=_positive_int, default=4096)

    p = sub.add_parser("convergence", parents=[common], help="rate of h_e(n) -> h")
    p.add_argument("--spec", type=_spec_arg, required=True)
    p.add_argument("--n-max", type=_positive_int, default=4096)

    p = sub.add_parser("simulate", parents=[common], help="one sample path")
    p.add_argument("--spec", type=_spec_arg, required=True)
    p.add_argument("--n", type=_positive_int, default=1024)
    p.add_argument("--ma-truncation", type=_positive_int, default=100_000)

    p = sub.add_parser("max-entropy", parents=[common], help="H maximising the entropy rate")
    p.add_argument("--model", choices=("fgn", "arfima"), required=True)
    return parser


@dataclass(frozen=True)
class RunConfig:
    command: str
    args: dict
    quadrature: QuadratureConfig

    def echo(self) -> dict:
        out = {"command": self.command}
        for key, value in sorted(self.args.items()):
            if key in ("command", "output", "format", "jobs", *_QUAD_FIELDS):
                continue
            if isinstance(value, (FGN, ARFIMA)):
                value = format_spec(value)
            out[key] = value
        out["quadrature"] = {k: getattr(self.quadrature, k) for k in _QUAD_FIELDS}
        return out


def _guard(fn, *args):
    """Value, or a Failure cell for numerical errors."""
    try:
        return fn(*args)
    except (QuadratureError, LevinsonError, MaximizerError, ArithmeticError) as exc:
        return Failure(f"{type(exc).__name__}: {exc}")


def _rate_cell(result):
    if isinstance(result, Failure):
        return result
    return DIVERGENT if result.divergent else result.value


def _cmd_entropy_rate(cfg: RunConfig, a) -> Table:
    spec = a.spec
    cols = ["spec", "h", "method", "h_quadrature"]
    main_rate = _guard(entropy_rate, spec, cfg.quadrature)
    quad_rate = _guard(entropy_rate_quadrature, spec, cfg.quadrature)
    row = [format_spec(spec), _rate_cell(main_rate),
           main_rate.method if not isinstance(main_rate, Failure) else "failed", _rate_cell(quad_rate)]
    if isinstance(spec, FGN):
        cols.append("h_approx")
        row.append(fgn_entropy_rate_approx(spec.hurst, spec.variance).value)
    return Table(cols, [row])


def _cmd_sweep(cfg: RunConfig, a) -> Table:
    points = [(H, v) for v in a.var for H in a.grid]
    qc = cfg.quadrature
    if a.model == "fgn":
        cols = ["H", "var", "h_exact", "h_approx"]

        def work(p):
            H, v = p
            return [H, v, _rate_cell(_guard(fgn_entropy_rate, H, v, qc)),
                    fgn_entropy_rate_approx(H, v).value]
    else:
        cols = ["H", "d", "var", "h_arfima_fixed_variance", "h_fgn_exact"]

        def work(p):
            H, v = p
            return [H, round(H - 0.5, 12), v, _rate_cell(arfima0d0_entropy_rate_fixed_variance(H, v)),
                    _rate_cell(_guard(fgn_entropy_rate, H, v, qc))]
    with ThreadPoolExecutor(max_workers=a.jobs) as pool:
        rows = list(pool.map(work, points))  # map keeps grid order
    return Table(cols, rows)


def _cmd_spectrum(cfg: RunConfig, a) -> Table:
    lam = np.pi * np.arange(1, a.points + 1) / a.points
    f = spectral_function(a.spec)(lam)
    cols, extra = ["lambda", "f"], []
    if isinstance(a.spec, FGN):
        cols.append("f_approx")
        extra = [fgn_spectral_density_approx(a.spec, lam)]
    rows = [[float(lam[i]), float(f[i]), *(float(e[i]) for e in extra)] for i in range(lam.size)]
    return Table(cols, rows)


def _cmd_cepstrum(cfg: RunConfig, a) -> Table:
    series = cepstral_coefficients(a.spec, a.k_max, cfg.quadrature)
    failed = dict(series.failures)
    k = np.arange(1, a.k_max + 1)
    cum = np.cumsum(k * series.b**2)
    rows = [[0, series.b0, 0.0, 0.0]]
    for i in range(a.k_max):
        kk = i + 1
        if kk in failed:
            rows.append([kk, Failure(failed[kk]), Failure(failed[kk]), Failure(failed[kk])])
        else:
            rows.append([kk, float(series.b[i]), float(series.error_bound[i]), float(cum[i])])
    return Table(["k", "b_k", "error_bound", "weighted_partial_sum"], rows,
                 {"summary": {"method": series.method, "n_quadrature": series.n_quadrature}})


def _cmd_mi(cfg: RunConfig, a) -> Table:
    res = mutual_information_past_future(a.spec, cfg.quadrature, a.n_terms)
    asm = res.assessment
    value = DIVERGENT if res.status is SeriesStatus.DIVERGENT else (
        res.value if res.value is not None else res.status.value)
    rows = [[m, s, 0.5 * s] for m, s in zip(asm.checkpoints, asm.partial_sums)]
    summary = {"status": res.status.value, "I_pf": value, "slope_vs_log_m": asm.slope, "note": res.note}
    return Table(["m", "weighted_partial_sum", "half_partial_sum"], rows, {"summary": summary})


def _cmd_convergence(cfg: RunConfig, a) -> Table:
    series = convergence_series(a.spec, a.n_max, cfg.quadrature)
    report = rate_report(a.spec, a.n_max, series=series)
    slopes = dict(report.local_slopes)
    rows = []
    n = 1
    while n <= a.n_max:
        g = series.at(n)
        rows.append([n, float(series.h_e[n - 1]), g, n * g, slopes.get(n, "")])
        n *= 2
    if rows[-1][0] != a.n_max:
        g = series.at(a.n_max)
        rows.append([a.n_max, float(series.h_e[-1]), g, a.n_max * g, ""])
    return Table(["n", "h_e", "gap", "n_times_gap", "local_slope"], rows, {"summary": report.to_dict()})


def _cmd_simulate(cfg: RunConfig, a) -> Table:
    if isinstance(a.spec, ARFIMA) and not a.spec.is_fractional_noise:
        raise SpecSyntaxError("simulate supports FGN and ARFIMA(0,d,0) only")
    if not 0 <= a.seed < 2**64:
        raise SpecSyntaxError("seed must be a 64-bit unsigned integer")
    req = PathRequest(a.spec, a.n, a.seed, a.ma_truncation)
    x = generate(req)
    meta = {"path": {"spec": format_spec(a.spec), "seed": a.seed, "n": a.n,
                     "ma_truncation": req.ma_truncation if isinstance(a.spec, ARFIMA) else None,
                     "burn_in": req.effective_burn_in if isinstance(a.spec, ARFIMA) else None}}
    return Table(["x"], [[float(v)] for v in x], meta)


def _cmd_max_entropy(cfg: RunConfig, a) -> Table:
    models = ([MaximizerModel.FGN_EXACT, MaximizerModel.FGN_APPROX] if a.model == "fgn"
              else [MaximizerModel.ARFIMA_FIXED_VARIANCE])
    rows = [[m.value, _guard(entropy_rate_maximizer, m, cfg.quadrature)] for m in models]
    return Table(["model", "H_max"], rows)


_HANDLERS = {
    "entropy-rate": _cmd_entropy_rate,
    "sweep": _cmd_sweep,
    "spectrum": _cmd_spectrum,
    "cepstrum": _cmd_cepstrum,
    "mi": _cmd_mi,
    "convergence": _cmd_convergence,
    "simulate": _cmd_simulate,
    "max-entropy": _cmd_max_entropy,
}


def _error(kind: str, message: str, code: int, stderr) -> int:
    stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def run(argv=None, stdout=None, stderr=None, environ=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except _UsageError as exc:
        return _error("usage", str(exc), EXIT_USAGE, stderr)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        qc = QuadratureConfig.from_env(environ, abs_tol=a.abs_tol, rel_tol=a.rel_tol,
                                       max_subdivisions=a.max_subdivisions, origin_excision=a.origin_excision)
    except ValueError as exc:
        return _error("config", str(exc), EXIT_USAGE, stderr)
    cfg = RunConfig(a.command, vars(a), qc)
    try:
        table = _HANDLERS[a.command](cfg, a)
    except SpecSyntaxError as exc:
        return _error("spec", str(exc), EXIT_USAGE, stderr)
    except (QuadratureError, LevinsonError, MaximizerError, ArithmeticError) as exc:
        return _error("numerical", f"{type(exc).__name__}: {exc}", EXIT_NUMERICAL, stderr)
    table.meta = {"config": cfg.echo(), "version": __version__, **table.meta}
    text = to_json(table) if a.format == "json" else to_csv(table)
    try:
        if a.output:
            with open(a.output, "w", newline="", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except OSError as exc:
        return _error("io", str(exc), EXIT_IO, stderr)
    if table.has_failures:
        return _error("numerical", "some cells failed; see 'failed:' markers in the output",
                      EXIT_NUMERICAL, stderr)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
