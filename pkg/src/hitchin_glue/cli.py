"""Command-line front end.

Every subcommand writes its artifacts into ``--out`` and a
``<command>.meta.json`` sidecar holding timestamps and the argument list, so
that the CSV/JSON bodies themselves are deterministic.  Exit status is 0 on
success, 2 for bad input and 3 for numerical failures; failures also print a
one-line JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import re
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .approx import QuadratureSpec, approx_metric, sweep
from .errors import (
    HitchinGlueError,
    IndexOutOfRange,
    InvalidConfig,
    PartitionError,
)
from .higgs_local import (
    StrataCount,
    canonical_weights,
    parabolic_degree,
    validate_strata,
)
from .io import SolutionCache, fmt, write_csv, write_json, write_solution_csv, solution_to_record
from .linearization import (
    build_atilde,
    connection_growth,
    indicial_spectrum,
    rescaled_laplacian_limit,
)
from .model_metrics import ModelField, limiting_metric, model_metric
from .partition import ClusterPartition, parse_partition
from .toda import SolverConfig

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NUMERIC = 3

_INPUT_ERRORS = (InvalidConfig, PartitionError, IndexOutOfRange)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- parsing helpers


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma list; positive, increasing."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidConfig(f"range {text!r} must be start:stop:step")
        start, stop, step = (float(x) for x in parts)
        if step <= 0:
            raise InvalidConfig("range step must be positive")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        values = [start + k * step for k in range(max(count, 0))]
    else:
        values = [float(x) for x in text.split(",") if x.strip()]
    if not values:
        raise InvalidConfig(f"empty range {text!r}")
    if any(v <= 0 for v in values):
        raise InvalidConfig("range values must be positive")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidConfig("range values must be increasing")
    return values


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        tolerance=args.tol,
        max_iterations=args.max_iter,
        grid_size=args.grid_size,
        r_min=args.r_min,
        r_max=args.r_max,
        continuation_steps=args.continuation_steps,
    )


def _toda_map(args, ranks: Sequence[int]) -> dict:
    cfg = _solver_config(args)
    cache = None if args.no_cache else SolutionCache(args.cache)
    out = {}
    for K in ranks:
        if cache is None:
            from .toda import solve_toda

            out[K] = solve_toda(K, cfg)
        else:
            out[K], _ = cache.get_or_solve(K, cfg)
    return out


def _partition(args) -> ClusterPartition:
    return parse_partition(args.partition)


def _wants(args, kind: str) -> bool:
    return args.format in (kind, "both")


# ---------------------------------------------------------------- commands


def cmd_solve_toda(args, out: Path) -> list[Path]:
    sol = _toda_map(args, [args.K])[args.K]
    written = []
    if _wants(args, "json"):
        path = out / f"toda_K{args.K}.json"
        write_json(path, solution_to_record(sol))
        written.append(path)
    if _wants(args, "csv"):
        path = out / f"toda_K{args.K}.csv"
        write_solution_csv(path, sol)
        written.append(path)
    return written


def cmd_model(args, out: Path) -> list[Path]:
    p = _partition(args)
    toda = _toda_map(args, p.toda_ranks)
    radii = parse_range(args.radii)
    t = args.t
    n = p.n
    header = ["abs_z"] + [f"entry_{i}" for i in range(1, n + 1)]
    tables = {
        "metric_limiting.csv": [[r] + limiting_metric(p, r).tolist() for r in radii],
        "metric_model.csv": [[r] + model_metric(p, toda, t, r).tolist() for r in radii],
        "metric_approx.csv": [[r] + approx_metric(p, toda, t, r).tolist() for r in radii],
    }
    written = []
    for name, rows in tables.items():
        write_csv(out / name, header, rows)
        written.append(out / name)
    # field samples: z, connection diagonal, then Phi row-major as (re, im)
    z = np.asarray(radii) * np.exp(1j * args.theta)
    a, phi = ModelField(p, toda, t).evaluate(z)
    fheader = ["z_re", "z_im"] + [f"a_{i}" for i in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            fheader += [f"phi_{i}_{j}_re", f"phi_{i}_{j}_im"]
    rows = []
    for k in range(z.size):
        row = [float(z[k].real), float(z[k].imag)] + a[k].tolist()
        for v in phi[k].ravel():
            row += [float(v.real), float(v.imag)]
        rows.append(row)
    write_csv(out / "field_samples.csv", fheader, rows)
    written.append(out / "field_samples.csv")
    return written


def cmd_error_sweep(args, out: Path) -> list[Path]:
    p = _partition(args)
    toda = _toda_map(args, p.toda_ranks)
    ts = parse_range(args.t)
    quad = QuadratureSpec(
        r_min=args.quad_r_min,
        inner_panels=args.panels,
        outer_panels=args.panels,
        order=args.order,
    )
    report = sweep(p, toda, ts, quad)
    report.config_hash = _solver_config(args).digest()
    written = []
    if _wants(args, "json"):
        write_json(out / "decay_report.json", report.to_dict())
        written.append(out / "decay_report.json")
    if _wants(args, "csv"):
        header = ["t", "l2_norm"] + [f"block_{j + 1}" for j in range(len(p.blocks))]
        rows = [[t, v] + b for t, v, b in zip(report.t_values, report.l2_norms, report.block_norms)]
        write_csv(out / "decay_report.csv", header, rows)
        written.append(out / "decay_report.csv")
    print(f"delta={fmt(report.delta)} c={fmt(report.c)} residual={fmt(report.residual)} "
          f"{'PASS' if report.passed else 'FAIL'}")
    return written


def _roots_text(roots) -> str:
    return " ".join(str(r) for r in roots)


def cmd_indicial(args, out: Path) -> list[Path]:
    p = _partition(args)
    spec = build_atilde(p, args.J)
    ind = indicial_spectrum(spec)
    written = []
    if _wants(args, "csv"):
        rows = [
            [i, j, str(b), str(c), _roots_text(ind.pair_roots(i, j, "zero")),
             _roots_text(ind.pair_roots(i, j, "infinity"))]
            for i, j, b, c in ind.rows()
        ]
        write_csv(out / "indicial_roots.csv",
                  ["i", "j", "b_ij", "c_ij", "roots_zero", "roots_infinity"], rows)
        written.append(out / "indicial_roots.csv")
    if _wants(args, "json"):
        write_json(out / "indicial.json", {
            "partition": p.to_dict(),
            "J": spec.J,
            "kinds": list(spec.kinds),
            "S0": [str(x) for x in ind.S0],
            "Sinf": [str(x) for x in ind.Sinf],
            "b": [[str(x) for x in row] for row in ind.b],
            "c": [[str(x) for x in row] for row in ind.c],
        })
        written.append(out / "indicial.json")
    print("S0 = {" + ", ".join(str(x) for x in ind.S0) + "} + Z")
    print("Sinf = {" + ", ".join(str(x) for x in ind.Sinf) + "} + Z")
    return written


def cmd_strata(args, out: Path) -> list[Path]:
    counts = StrataCount(args.n, args.g, args.N)
    ok = validate_strata(counts)
    record = counts.to_dict()
    record["weighted_total"] = counts.weighted_total()
    record["required_total"] = counts.required_total()
    record["valid"] = ok
    record["parabolic_degree"] = str(parabolic_degree(args.n, args.g, args.deg_E, canonical_weights(counts)))
    write_json(out / "strata.json", record)
    print("VALID" if ok else "INVALID")
    return [out / "strata.json"]


def cmd_growth(args, out: Path) -> list[Path]:
    p = _partition(args)
    toda = _toda_map(args, p.toda_ranks)
    ts = parse_range(args.t)
    rep = connection_growth(p, toda, ts, cutoff=not args.no_cutoff)
    write_csv(out / "growth.csv", ["t", "sup_A", "sup_dA"],
              [[t, a, d] for t, a, d in zip(rep.t_values, rep.sup_A, rep.sup_dA)])
    write_json(out / "growth.json", {
        "t_values": rep.t_values, "sup_A": rep.sup_A, "sup_dA": rep.sup_dA,
        "exponent": rep.exponent, "sup_A_variation": rep.sup_A_variation,
        "cutoff": not args.no_cutoff,
    })
    print(f"exponent={fmt(rep.exponent)} sup_A_variation={fmt(rep.sup_A_variation)}")
    return [out / "growth.csv", out / "growth.json"]


def cmd_limit_check(args, out: Path) -> list[Path]:
    p = _partition(args)
    toda = _toda_map(args, p.toda_ranks)
    ts = parse_range(args.t)
    radii = np.geomspace(0.1, 2.0, args.samples)
    w = radii * np.exp(1j * np.linspace(0.0, 2 * np.pi, args.samples, endpoint=False))
    table = rescaled_laplacian_limit(p, toda, args.J, ts, w)
    write_csv(out / "limit_check.csv", ["t", "block", "K", "kind", "deviation"],
              [[r.t, r.block + 1, r.K, r.kind, r.deviation] for r in table.rows])
    verdicts = {str(j + 1): table.monotone(j) for j in range(len(p.blocks))}
    write_json(out / "limit_check.json", {"J": table.J, "monotone": verdicts})
    for j, ok in verdicts.items():
        print(f"block {j}: {'monotone' if ok else 'NOT monotone'}")
    return [out / "limit_check.csv", out / "limit_check.json"]


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--cache", type=Path, default=None,
                        help="cache directory (default: $HITCHIN_GLUE_CACHE or ~/.cache/hitchin_glue)")
    common.add_argument("--no-cache", action="store_true", help="always re-solve")
    common.add_argument("--format", choices=("csv", "json", "both"), default="both")
    solver = common.add_argument_group("solver")
    solver.add_argument("--tol", type=float, default=1e-10)
    solver.add_argument("--max-iter", type=int, default=50)
    solver.add_argument("--grid-size", type=int, default=2000)
    solver.add_argument("--r-min", type=float, default=1e-4)
    solver.add_argument("--r-max", type=float, default=6.0)
    solver.add_argument("--continuation-steps", type=int, default=4)

    parser = _Parser(prog="hitchin-glue", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve-toda", parents=[common], help="solve the rank-K Toda problem")
    p.add_argument("--K", type=int, required=True)
    p.set_defaults(func=cmd_solve_toda)

    p = sub.add_parser("model", parents=[common], help="metric profiles and field samples")
    p.add_argument("--partition", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--radii", default="0.1:2:0.1")
    p.add_argument("--theta", type=float, default=0.3)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("error-sweep", parents=[common], help="L2 error of the glued metric over t")
    p.add_argument("--partition", required=True)
    p.add_argument("--t", default="3:10:1")
    p.add_argument("--panels", type=int, default=16)
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--quad-r-min", type=float, default=1e-4)
    p.set_defaults(func=cmd_error_sweep)

    p = sub.add_parser("indicial", parents=[common], help="indicial roots of the decoupled operator")
    p.add_argument("--partition", required=True)
    p.add_argument("--J", type=int, required=True)
    p.set_defaults(func=cmd_indicial)

    p = sub.add_parser("strata", parents=[common], help="check the stratum count identity")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--deg-E", type=int, default=0)
    p.set_defaults(func=cmd_strata)

    p = sub.add_parser("growth", parents=[common], help="C1 growth of the connection in t")
    p.add_argument("--partition", required=True)
    p.add_argument("--t", default="1,2,4,8")
    p.add_argument("--no-cutoff", action="store_true", help="use the model connection")
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("limit-check", parents=[common], help="rescaled Laplacian limit table")
    p.add_argument("--partition", required=True)
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--t", default="4,16,64")
    p.add_argument("--samples", type=int, default=9)
    p.set_defaults(func=cmd_limit_check)
    return parser


_N_FLAG = re.compile(r"^--N(\d+)$")


def _split_strata_counts(argv: list[str]) -> tuple[list[str], dict[int, int]]:
    """Pull ``--N<K> <count>`` pairs out of ``argv``."""
    rest, counts = [], {}
    k = 0
    while k < len(argv):
        m = _N_FLAG.match(argv[k].split("=")[0])
        if m:
            if "=" in argv[k]:
                value = argv[k].split("=", 1)[1]
                k += 1
            else:
                if k + 1 >= len(argv):
                    raise UsageError(f"{argv[k]} needs a value")
                value = argv[k + 1]
                k += 2
            try:
                counts[int(m.group(1))] = int(value)
            except ValueError:
                raise UsageError(f"bad count {value!r} for --N{m.group(1)}") from None
        else:
            rest.append(argv[k])
            k += 1
    return rest, counts


def _emit_error(kind: str, message: str, command: str | None) -> None:
    record = {"status": "error", "error": kind, "message": message, "command": command}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    command = next((a for a in argv if not a.startswith("-")), None)
    try:
        rest, counts = _split_strata_counts(argv)
        args = build_parser().parse_args(rest)
    except UsageError as exc:
        _emit_error("ParseError", str(exc), command)
        return EXIT_PARSE
    args.N = counts
    if counts and args.command != "strata":
        _emit_error("ParseError", "--N<K> flags only apply to 'strata'", command)
        return EXIT_PARSE
    out = args.out
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = args.func(args, out)
    except _INPUT_ERRORS as exc:
        _emit_error(type(exc).__name__, str(exc), args.command)
        return EXIT_PARSE
    except (HitchinGlueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        _emit_error(type(exc).__name__, str(exc), args.command)
        return EXIT_NUMERIC
    write_json(out / f"{args.command}.meta.json", {
        "command": args.command,
        "argv": list(argv),
        "started": started,
        "finished": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "version": __version__,
        "artifacts": sorted(p.name for p in written),
    })
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
