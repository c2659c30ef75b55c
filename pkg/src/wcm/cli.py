"""Command-line interface.

Subcommands: ``validate``, ``construct``, ``sample``, ``cdf``, ``bounds``,
``six``, ``curve``.  Structured output is JSON (CSV where tabular); every
command that consumes randomness either receives an explicit ``--seed`` or
has one generated and recorded, and each run emits a manifest (command,
arguments, seed, version, output digests) so outputs can be reproduced
byte-for-byte.  Exit codes: 0 success, 1 domain error (JSON on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import secrets
import sys

from . import __version__
from .bounds import variance_bound_report
from .copula import GENERATOR_NAME, build_grouped_wcm, build_triangle
from .data import DEFAULT_WINDOW, detrend_by_index, load_prices, rolling_six
from .errors import DomainError, WcmError
from .indices import rhix_degeneracy_curve
from .weights import as_weight_vector, existence_deficit, validate_wcm_existence

__all__ = ["main", "entrypoint"]


def _digest(data: str) -> str:
    return hashlib.sha256(data.encode()).hexdigest()


def _manifest(args: argparse.Namespace, seed: int | None, outputs: dict[str, str]) -> dict:
    return {
        "command": args.command,
        "argv": args._argv,
        "seed": seed,
        "generator": GENERATOR_NAME if seed is not None else None,
        "version": __version__,
        "outputs": outputs,
    }


def _emit_json(payload: dict, out_path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_with_manifest(text: str, out_path: str | None, args, seed: int | None) -> None:
    """Write tabular output plus a sidecar manifest (stderr when streaming)."""
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
        manifest = _manifest(args, seed, {out_path: _digest(text)})
        with open(out_path + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
    else:
        sys.stdout.write(text)
        manifest = _manifest(args, seed, {"-": _digest(text)})
        sys.stderr.write(json.dumps(manifest, sort_keys=True) + "\n")


def _resolve_seed(args: argparse.Namespace) -> int:
    """Explicit seed, else a fresh one recorded in the manifest."""
    if getattr(args, "seed", None) is not None:
        return args.seed
    return secrets.randbits(63)


def _cmd_validate(args) -> int:
    wv = as_weight_vector(args.weights)
    payload = {
        "weights": list(wv.values),
        "exists": validate_wcm_existence(wv),
        "deficit": existence_deficit(wv),
        "manifest": _manifest(args, None, {}),
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_construct(args) -> int:
    if len(args.weights) != 3:
        raise DomainError("construct needs exactly 3 weights (triangle construction)")
    copula = build_triangle(args.weights, variant=args.variant)
    payload = copula.to_dict()
    payload["manifest"] = _manifest(args, None, {})
    _emit_json(payload, args.out)
    return 0


def _build_for_sampling(weights, variant: str):
    wv = as_weight_vector(weights)
    if wv.d == 3:
        return build_triangle(wv, variant=variant)
    if variant != "A":
        raise DomainError("variant B is only defined for exactly 3 weights")
    return build_grouped_wcm(wv)


def _cmd_sample(args) -> int:
    seed = _resolve_seed(args)
    copula = _build_for_sampling(args.weights, args.variant)
    matrix = copula.sample(args.n, seed)
    if args.format == "json":
        payload = matrix.to_json_dict()
        payload["rows"] = [list(map(float, row)) for row in matrix.values]
        payload["manifest"] = _manifest(args, seed, {})
        _emit_json(payload, args.out)
    else:
        _write_with_manifest(matrix.to_csv_string(), args.out, args, seed)
    return 0


def _cmd_cdf(args) -> int:
    values = args.values
    if len(values) != 6:
        raise DomainError(
            "cdf needs 3 weights and 3 coordinates, e.g. `cdf 5 4 3 -- 1 0.25 0.333`"
        )
    copula = build_triangle(values[:3], variant=args.variant)
    point = values[3:]
    payload = {
        "weights": values[:3],
        "variant": args.variant,
        "u": point,
        "cdf": copula.cdf(point),
        "manifest": _manifest(args, None, {}),
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_bounds(args) -> int:
    seed = _resolve_seed(args) if args.mc else None
    report = variance_bound_report(
        args.weights, mc_n=args.mc, seed=seed, threads=args.threads
    )
    if args.json or args.out:
        payload = report.to_json_dict()
        payload["manifest"] = _manifest(args, seed, {})
        _emit_json(payload, args.out)
    else:
        rows = [
            ("weights", " ".join(repr(v) for v in report.weights)),
            ("lower l(w)", repr(report.lower)),
            ("upper", repr(report.upper)),
        ]
        if report.mc is not None:
            rows += [
                ("mc estimate", repr(report.mc.estimate)),
                ("mc stderr", repr(report.mc.stderr)),
                ("mc n", str(report.mc.n)),
                ("seed", str(report.mc.seed)),
            ]
        width = max(len(k) for k, _ in rows)
        table = "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"
        _write_with_manifest(table, None, args, seed)
    return 0


def _cmd_six(args) -> int:
    series = load_prices(args.csv, index_column=args.index_column)
    if args.detrend:
        series = detrend_by_index(series)
    weights = args.weights if args.weights else None
    rolling = rolling_six(
        series,
        w=weights,
        window=args.window,
        step=args.step,
        estimator=args.estimator,
    )
    if args.json:
        payload = rolling.to_json_dict()
        payload["manifest"] = _manifest(args, None, {})
        _emit_json(payload, args.out)
    else:
        buf = io.StringIO()
        rolling.to_csv(buf)
        _write_with_manifest(buf.getvalue(), args.out, args, None)
    return 0


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0.0 or stop < start:
        raise DomainError(f"bad grid {text!r}")
    count = int(round((stop - start) / step))
    grid = [start + k * step for k in range(count + 1)]
    return [g for g in grid if g <= stop + 1e-12]


def _cmd_curve(args) -> int:
    grid = _parse_grid(args.grid)
    curve = rhix_degeneracy_curve(args.rho, grid)
    lines = ["sigma,rhix"] + [f"{s!r},{v!r}" for s, v in curve]
    _write_with_manifest("\n".join(lines) + "\n", args.out, args, None)
    return 0


def _add_weights_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("weights", nargs="+", type=float, help="strictly positive weights")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcm",
        description=(
            "Weighted-countermonotonic copulas, variance bounds of weighted "
            "sums of uniforms, and the SIX herd behavior index."
        ),
    )
    parser.add_argument("--version", action="version", version=f"wcm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="existence test for the given weights")
    _add_weights_argument(p)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("construct", help="triangle copula descriptor (d=3)")
    _add_weights_argument(p)
    p.add_argument("--variant", choices=("A", "B"), default="A")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("sample", help="draw observations from the constructed copula")
    _add_weights_argument(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, help="RNG seed; generated and recorded if omitted")
    p.add_argument("--variant", choices=("A", "B"), default="A")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("cdf", help="exact CDF: `cdf W1 W2 W3 -- U1 U2 U3`")
    p.add_argument("values", nargs="+", type=float)
    p.add_argument("--variant", choices=("A", "B"), default="A")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_cdf)

    p = sub.add_parser("bounds", help="exact variance bounds with optional MC check")
    _add_weights_argument(p)
    p.add_argument("--mc", type=int, help="Monte Carlo sample size")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=int(os.environ.get("WCM_THREADS", "1")))
    p.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("six", help="rolling SIX over a price CSV")
    p.add_argument("csv", help="price table: header `date,<ticker>,...`")
    p.add_argument("--weights", nargs="+", type=float, help="default: equal weights")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--estimator", choices=("rank", "lognormal"), default="rank")
    p.add_argument("--index-column", help="name of the market index column")
    p.add_argument("--detrend", action="store_true",
                   help="divide prices by the market index before estimating")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=_cmd_six)

    p = sub.add_parser("curve", help="volatility-degeneracy sweep: `curve RHO 0.1:5:0.1`")
    p.add_argument("rho", type=float)
    p.add_argument("grid", help="sigma grid as start:stop:step")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=_cmd_curve)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    try:
        return args.func(args)
    except WcmError as exc:
        error = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(error, sort_keys=True) + "\n")
        return 1


def entrypoint() -> None:  # pragma: no cover - console-script shim
    raise SystemExit(main())


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
