"""Command-line entry point: ``shelfshuffle <command> [options]``.

Primary output goes to stdout (or ``--out``); the resolved run configuration,
including any seed drawn from system entropy, is echoed to stderr so every run
can be repeated exactly.

Exit codes: 0 success, 2 usage error, 3 instance too large for exact enumeration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Any

from . import __version__
from .audits import (
    UniformSpec,
    color_change_test,
    compare_longest_cycles,
    guessing_experiment,
    spacings_test,
    top_card_test,
)
from .exact import (
    TABLE1_SHELVES,
    ShelfSpec,
    distances,
    render_decimal,
    shelf_prob,
)
from .machine import (
    SignString,
    SizeGuardError,
    check_enumeration_size,
    compose,
    convolve_exact,
    sample_batch,
    sample_machine,
    separation_bound,
    shelf_shuffle_from_labels,
    x_shuffle_exact_dist,
)
from .permstat import (
    Permutation,
    cycle_type,
    descents,
    peaks,
    rsk_shape,
    valley_table,
    valleys,
)
from .rng import RngSeed, fresh_seed
from .series import (
    cycle_count_dist,
    cycle_limit_law,
    descent_dist,
    descent_moments,
    rsk_shape_dist,
)

SCHEMA_ID = "shelfshuffle-output/v1"
SCHEMA_FILE = "schemas/output-v1.json"
OUTDIR_ENV = "SHELFSHUFFLE_OUTDIR"
# l-infinity above this is tabulated as infinity
LINF_FLAG = 10 ** 5
# exact Schur determinants over all partitions of n; cost grows quickly past this
RSK_LIMIT = 30

EXIT_OK, EXIT_USAGE, EXIT_GUARD = 0, 2, 3


class UsageError(Exception):
    pass


# -- formatting helpers ----------------------------------------------------------------

def _q(q: Fraction, args) -> Any:
    """A rational rendered per --exact / --digits."""
    if args.exact:
        return _ratio(q)
    return render_decimal(q, args.digits)


def _ratio(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _q_both(q: Fraction, args) -> dict:
    return {"decimal": render_decimal(q, args.digits), "exact": _ratio(q)}


def _table(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    widths = {c: max(len(str(c)), *(len(str(r.get(c, ""))) for r in rows)) for c in cols}
    lines = ["  ".join(str(c).rjust(widths[c]) for c in cols)]
    lines += ["  ".join(str(r.get(c, "")).rjust(widths[c]) for c in cols) for r in rows]
    return "\n".join(lines) + "\n"


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit(args, config: dict, result: Any, rows: list[dict] | None = None) -> str:
    """Render the primary output in the requested format."""
    if args.format == "json":
        doc = {"schema": SCHEMA_ID, "command": args.command, "config": config, "result": result}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if rows is None:
        rows = [result] if isinstance(result, dict) else [{"value": result}]
    return _csv(rows) if args.format == "csv" else _table(rows)


def load_schema() -> dict:
    """The JSON schema every ``--format json`` output validates against."""
    from importlib.resources import files

    return json.loads(files(__package__).joinpath(SCHEMA_FILE).read_text(encoding="utf-8"))


# -- argument helpers --------------------------------------------------------------------

def _sign_string(args, name: str = "x") -> SignString:
    text = getattr(args, name, None)
    shelves = getattr(args, "shelves", None)
    if text and shelves:
        raise UsageError(f"give either --{name} or --shelves, not both")
    if text:
        return SignString.parse(text)
    if shelves:
        return SignString.shelves(shelves)
    raise UsageError(f"one of --{name} / --shelves is required")


def _model(args):
    if getattr(args, "uniform", False):
        if args.shelves:
            raise UsageError("give either --shelves or --uniform, not both")
        return UniformSpec(args.n)
    if not args.shelves:
        raise UsageError("one of --shelves / --uniform is required")
    return ShelfSpec(args.n, args.shelves)


def _resolve_seed(args) -> int:
    if args.seed is None:
        args.seed = fresh_seed()
        print(f"# no --seed given; using seed {args.seed}", file=sys.stderr)
    return args.seed


# -- commands ------------------------------------------------------------------------------

def cmd_dist(args) -> str:
    shelves = list(TABLE1_SHELVES) if args.table1 else [args.shelves]
    if shelves == [None]:
        raise UsageError("dist needs --shelves or --table1")
    rows, reports = [], []
    for m in shelves:
        rep = distances(ShelfSpec(args.n, m), scan_all=args.scan_all)
        reports.append(rep)
        row = {"m": m, "tv": _q(rep.tv, args), "sep": _q(rep.sep, args), "linf": _q(rep.linf, args)}
        if args.format == "table":
            row["note"] = "≫1 (tabulated as ∞)" if rep.linf > LINF_FLAG else ""
        rows.append(row)
    result = [{**r.as_json(args.digits), "linf_flag": r.linf > LINF_FLAG} for r in reports]
    return _emit(args, {"n": args.n, "shelves": shelves}, result, rows)


def cmd_prob(args) -> str:
    w = Permutation.parse(args.perm)
    if args.n is not None and args.n != w.n:
        raise UsageError(f"--n {args.n} does not match permutation length {w.n}")
    p = shelf_prob(ShelfSpec(w.n, args.shelves), w)
    result = {"perm": str(w), "n": w.n, "m": args.shelves, "valleys": valleys(w), "prob": _q_both(p, args)}
    row = {"perm": str(w), "valleys": valleys(w), "prob": render_decimal(p, args.digits)}
    if args.exact:
        row["exact"] = _ratio(p)
    return _emit(args, {"perm": str(w), "shelves": args.shelves}, result, [row])


def cmd_valleys(args) -> str:
    if args.perm:
        w = Permutation.parse(args.perm)
        d, dset = descents(w)
        result = {
            "perm": str(w), "valleys": valleys(w), "peaks": peaks(w), "descents": d,
            "descent_set": sorted(dset), "cycle_type": list(cycle_type(w)),
            "rsk_shape": list(rsk_shape(w).parts),
        }
        row = {k: (",".join(map(str, v)) if isinstance(v, list) else v) for k, v in result.items()}
        return _emit(args, {"perm": str(w)}, result, [row])
    if not args.n:
        raise UsageError("valleys needs --n or --perm")
    row = valley_table(args.n).row(args.n)
    result = [{"k": k, "count": str(c)} for k, c in enumerate(row)]
    return _emit(args, {"n": args.n}, result, result)


def cmd_simulate(args) -> str:
    if args.labels:
        labels = [int(tok) for tok in args.labels.split(",") if tok]
        if args.n is not None and args.n != len(labels):
            raise UsageError("--n does not match the number of labels")
        w = shelf_shuffle_from_labels(labels, args.shelves)
        if args.format == "json":
            return _emit(args, {"labels": labels, "shelves": args.shelves}, [str(w)])
        return str(w) + "\n"
    if not (args.n and args.shelves):
        raise UsageError("simulate needs --labels, or --n and --shelves")
    seed = _resolve_seed(args)
    config = {"n": args.n, "shelves": args.shelves, "trials": args.trials, "seed": seed,
              "description": args.description}
    if args.description == "machine":
        perms = [str(sample_machine(ShelfSpec(args.n, args.shelves), RngSeed(seed, t)).permutation)
                 for t in range(args.trials)]
    else:
        batch = sample_batch(args.n, args.shelves, args.trials, seed, int(args.description), workers=args.workers)
        perms = [",".join(map(str, row)) for row in batch.tolist()]
    if args.format == "json":
        return _emit(args, config, perms)
    return "".join(p + "\n" for p in perms)


def cmd_compose(args) -> str:
    x, y = SignString.parse(args.x), SignString.parse(args.y)
    z = compose(x, y)
    if args.format == "json":
        return _emit(args, {"x": str(x), "y": str(y)}, {"product": str(z), "length": len(z)})
    if args.format == "csv":
        return _csv([{"x": str(x), "y": str(y), "product": str(z)}])
    return str(z) + "\n"


def cmd_sepbound(args) -> str:
    if args.a:
        a = args.a
    else:
        x = _sign_string(args)
        for _ in range(args.passes - 1):
            x = compose(x, _sign_string(args))
        a = len(x)
    value, exact = separation_bound(a, args.n)
    result = {"a": a, "n": args.n, "bound": _q_both(exact, args)}
    row = {"a": a, "n": args.n, "bound": _q(exact, args)}
    return _emit(args, {"a": a, "n": args.n, "passes": args.passes}, result, [row])


def cmd_convolve(args) -> str:
    x, y = SignString.parse(args.x), SignString.parse(args.y)
    check_enumeration_size(len(x) * len(y), args.n)
    conv = convolve_exact(x_shuffle_exact_dist(x, args.n), x_shuffle_exact_dist(y, args.n))
    direct = x_shuffle_exact_dist(compose(x, y), args.n)
    perms = sorted(set(conv) | set(direct), key=lambda w: w.mapping)
    rows = [{"perm": str(w), "convolution": _q(conv.get(w, Fraction(0)), args),
             "product_law": _q(direct.get(w, Fraction(0)), args)} for w in perms]
    result = {"x": str(x), "y": str(y), "product": str(compose(x, y)), "equal": conv == direct,
              "laws": [{"perm": r["perm"], "convolution": _q_both(conv.get(w, Fraction(0)), args),
                        "product_law": _q_both(direct.get(w, Fraction(0)), args)}
                       for r, w in zip(rows, perms)]}
    return _emit(args, {"x": str(x), "y": str(y), "n": args.n}, result, rows)


def _dist_output(args, dist, config, extra: dict | None = None) -> str:
    rows = [{"value": str(s), "prob": _q(p, args)} for s, p in zip(dist.support, dist.probs)]
    result = dist.to_json(args.digits)
    if extra:
        result.update(extra)
    return _emit(args, config, result, rows)


def cmd_descents(args) -> str:
    spec = ShelfSpec(args.n, args.shelves)
    dist = descent_dist(spec)
    extra = {}
    if args.n >= 2:
        mean, var = descent_moments(spec)
        extra = {"mean": _q_both(mean, args), "variance": _q_both(var, args)}
    return _dist_output(args, dist, {"n": args.n, "shelves": args.shelves}, extra)


def cmd_cycles(args) -> str:
    if args.limit:
        dist = cycle_limit_law(args.i, args.shelves)
        return _dist_output(args, dist, {"i": args.i, "shelves": args.shelves, "limit": True},
                            {"tail": render_decimal(dist.tail, 15)})
    if not args.n:
        raise UsageError("cycles needs --n (or --limit)")
    dist = cycle_count_dist(ShelfSpec(args.n, args.shelves), args.i)
    return _dist_output(args, dist, {"n": args.n, "shelves": args.shelves, "i": args.i})


def cmd_rsk(args) -> str:
    if args.n > RSK_LIMIT:
        raise SizeGuardError(f"rsk shape distribution is limited to n <= {RSK_LIMIT}")
    dist = rsk_shape_dist(ShelfSpec(args.n, args.shelves))
    return _dist_output(args, dist, {"n": args.n, "shelves": args.shelves})


def cmd_guess(args) -> str:
    model = _model(args)
    seed = _resolve_seed(args)
    rep = guessing_experiment(model, args.trials, seed, workers=args.workers)
    config = {"n": args.n, "shelves": args.shelves, "uniform": args.uniform, "trials": args.trials, "seed": seed}
    row = {"model": rep.model, "trials": rep.trials, "seed": rep.seed, "mean": f"{rep.mean:.4f}",
           "variance": f"{rep.variance:.4f}", "stderr": f"{rep.stderr:.4f}"}
    return _emit(args, config, rep.to_json(), [row])


def cmd_audit(args) -> str:
    model = _model(args)
    seed = _resolve_seed(args)
    config = {"test": args.test, "n": args.n, "shelves": args.shelves, "uniform": args.uniform,
              "trials": args.trials, "seed": seed}
    if args.test == "top":
        rep = top_card_test(model, args.trials, seed, workers=args.workers)
        reports = {"top": rep}
    elif args.test == "color":
        reports = {"color": color_change_test(model, args.trials, seed, workers=args.workers)}
    elif args.test == "spacings":
        config["j_max"] = args.j_max
        reports = {f"D_{j}": r for j, r in spacings_test(model, args.trials, seed, args.j_max, args.workers).items()}
        if args.format != "json":
            # plot-ready long format: j, d, count
            rows = [{"j": name[2:], "d": d, "count": c}
                    for name, r in reports.items() for d, c in r.histogram.items()]
            return _emit(args, config, None, rows)
    elif args.test == "cycles":
        config["k"] = args.k
        if isinstance(model, UniformSpec):
            from .audits import longest_cycles_stat
            reports = {"uniform": longest_cycles_stat(model, args.trials, seed, args.k)}
        else:
            cmp = compare_longest_cycles(model, args.trials, seed, args.k)
            reports = {"shelf": cmp["shelf"], "uniform": cmp["uniform"]}
            config["ks_distance"] = cmp["ks_distance"]
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown audit {args.test}")
    rows = [{"report": name, "mean": f"{r.mean:.4f}", "sd": f"{r.sd:.4f}", "stderr": f"{r.stderr:.4f}",
             **{k: (f"{v:.4f}" if isinstance(v, float) else v) for k, v in r.extras.items()}}
            for name, r in reports.items()]
    return _emit(args, config, {k: r.to_json() for k, r in reports.items()}, rows)


# -- parser ------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="table")
    common.add_argument("--digits", type=int, default=3, help="decimal places (round-half-even)")
    common.add_argument("--exact", action="store_true", help="print exact rationals as num/den")
    common.add_argument("--out", help=f"write primary output here (relative to ${OUTDIR_ENV} if set)")

    stoch = argparse.ArgumentParser(add_help=False)
    stoch.add_argument("--trials", type=int, default=10_000)
    stoch.add_argument("--seed", type=int, default=None)
    stoch.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="shelfshuffle", description="Exact and Monte Carlo analysis of shelf shufflers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="tv / separation / l-infinity distances")
    p.add_argument("--n", type=int, default=52)
    p.add_argument("--shelves", type=int)
    p.add_argument("--table1", action="store_true", help="sweep m = 10, 15, ..., 300")
    p.add_argument("--scan-all", action="store_true", help="check every valley class, not just the extremes")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("prob", parents=[common], help="exact chance of one permutation")
    p.add_argument("--shelves", type=int, required=True)
    p.add_argument("--perm", required=True)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("valleys", parents=[common], help="valley counts v(n,k), or statistics of --perm")
    p.add_argument("--n", type=int)
    p.add_argument("--perm")
    p.set_defaults(func=cmd_valleys)

    p = sub.add_parser("simulate", parents=[common, stoch], help="shuffle decks")
    p.add_argument("--n", type=int)
    p.add_argument("--shelves", type=int)
    p.add_argument("--labels", help="comma-separated shelf labels 1..2m, one per card")
    p.add_argument("--description", choices=("1", "2", "3", "machine"), default="1")
    p.set_defaults(func=cmd_simulate, trials=1)

    p = sub.add_parser("compose", parents=[common], help="product x * y of sign strings")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("sepbound", parents=[common], help="birthday bound on separation")
    p.add_argument("--n", type=int, default=52)
    p.add_argument("--x")
    p.add_argument("--shelves", type=int)
    p.add_argument("--a", type=int, help="word length directly")
    p.add_argument("--passes", type=int, default=1, help="number of repeated passes of x")
    p.set_defaults(func=cmd_sepbound)

    p = sub.add_parser("convolve", parents=[common], help="exact P_x * P_y on S_n vs P_{x*y}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("descents", parents=[common], help="exact descent distribution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--shelves", type=int, required=True)
    p.set_defaults(func=cmd_descents)

    p = sub.add_parser("cycles", parents=[common], help="exact law of the number of i-cycles")
    p.add_argument("--n", type=int)
    p.add_argument("--shelves", type=int, required=True)
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--limit", action="store_true", help="large-deck limit law instead")
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("rsk", parents=[common], help="exact RSK shape distribution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--shelves", type=int, required=True)
    p.set_defaults(func=cmd_rsk)

    p = sub.add_parser("guess", parents=[common, stoch], help="card guessing with feedback")
    p.add_argument("--n", type=int, default=52)
    p.add_argument("--shelves", type=int)
    p.add_argument("--uniform", action="store_true")
    p.set_defaults(func=cmd_guess)

    p = sub.add_parser("audit", parents=[common, stoch], help="top card, color change, spacings, cycle audits")
    p.add_argument("--test", choices=("top", "color", "spacings", "cycles"), required=True)
    p.add_argument("--n", type=int, default=52)
    p.add_argument("--shelves", type=int)
    p.add_argument("--uniform", action="store_true")
    p.add_argument("--j-max", type=int, default=9)
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_audit)
    return parser


def _write(args, text: str) -> None:
    if not args.out:
        sys.stdout.write(text)
        return
    path = args.out
    base = os.environ.get(OUTDIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.digits < 1:
        parser.error("--digits must be >= 1")
    try:
        text = args.func(args)
    except SizeGuardError as exc:
        print(f"shelfshuffle: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, ValueError) as exc:
        print(f"shelfshuffle {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    shown = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    print("# config: " + json.dumps(shown, sort_keys=True), file=sys.stderr)
    _write(args, text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
