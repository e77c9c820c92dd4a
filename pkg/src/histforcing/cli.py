"""Command-line workbench.

Exit codes: 0 success / all checks pass, 1 a check or construction clause
fails, 2 usage or format error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .algebra import longest_chain
from .checks import _plain, build_maj_chain, check_flip_closure, run_suite
from .errors import ClauseViolation, FormatError, InvalidInput, ResourceLimit
from .generate import TERM_POOLS, GeneratorSpec, generate
from .poset import leq, leq_pr, transform
from .serialize import condition_id, dumps, loads
from .signatures import U_set, admissible_pairs, close, components, u_iso, upsilon

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _levels(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"levels must be comma-separated integers: {text!r}") from None


def _read(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def _write(text: str, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _print_json(obj):
    print(json.dumps(_plain(obj), sort_keys=False))


# --------------------------------------------------------------------------
# subcommands


def cmd_gen(args):
    spec = GeneratorSpec(args.seed, args.width, args.height, args.pool, args.gap, args.max_support)
    _write(dumps(generate(spec)), args.out)
    return EXIT_OK


def cmd_validate(args):
    p = _read(args.file)
    print(f"valid {condition_id(p, p.width or 2)} ht={p.ht} |u|={len(p.u)} |F|={len(p.table)}")
    return EXIT_OK


def cmd_leq(args):
    p, q = _read(args.file1), _read(args.file2)
    print("true" if (leq_pr if args.pure else leq)(p, q) else "false")
    return EXIT_OK


def cmd_transform(args):
    p, q = _read(args.file_p), _read(args.file_q)
    _write(dumps(transform(p, q), q.width), args.out)
    return EXIT_OK


def cmd_components(args):
    p = _read(args.file)
    _print_json([{"id": condition_id(c, p.width), "ht": c.ht, "u": c.u}
                 for c in components(p, args.alpha)])
    return EXIT_OK


def cmd_closure(args):
    _print_json(close(_read(args.file), _levels(args.levels)))
    return EXIT_OK


def cmd_upsilon(args):
    p = _read(args.file)
    _print_json([e._asdict() for e in upsilon(p, _levels(args.levels))])
    return EXIT_OK


def cmd_uset(args):
    _print_json(U_set(_read(args.file), _levels(args.levels)))
    return EXIT_OK


def cmd_chain(args):
    p = _read(args.file)
    chain = build_maj_chain(p)
    for inst in chain:
        print(inst)
    length, _ = longest_chain(p.table, chain)
    print(f"longest strict chain: {length}")
    return EXIT_OK


def cmd_flip(args):
    p = _read(args.file)
    Z0, Z1 = _levels(args.z0), _levels(args.z1)
    if (Z0, Z1) not in admissible_pairs(p):
        u_iso(p, Z0, Z1)  # raises with the specific reason when it can
        raise InvalidInput(f"{Z0}, {Z1} is not an admissible pair of closed sets")
    budget = len(p.table) if args.all_f else 0
    report = check_flip_closure(p, budget=budget, samples=args.samples, seed=args.seed,
                                pairs=[(Z0, Z1)])
    _print_json({"condition": report.condition, "Z0": Z0, "Z1": Z1, **report.to_json(),
                 "mode": report.details.get("mode"), "triples": report.details.get("triples")})
    return EXIT_OK if report.passed else EXIT_FAIL


def _suite_one(job):
    path, budget, samples, seed = job
    try:
        p = _read(path)
    except (UsageError, FormatError, ClauseViolation, InvalidInput, ResourceLimit) as exc:
        return {"file": str(path), "error": str(exc)}, EXIT_USAGE
    reports = run_suite(p, budget=budget, samples=samples, seed=seed)
    doc = {"file": str(path), "condition": condition_id(p, p.width or 2),
           "checks": [r.to_json() for r in reports]}
    return doc, EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_suite(args):
    jobs = [(f, args.budget, args.samples, args.seed) for f in args.files]
    workers = args.jobs or min(len(jobs), os.cpu_count() or 1)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_suite_one, jobs))
    else:
        results = [_suite_one(j) for j in jobs]
    print(json.dumps([doc for doc, _ in results], indent=1))
    return max(code for _, code in results)


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="histforcing", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a condition from a seed")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--width", type=int, required=True)
    g.add_argument("--height", type=int, required=True)
    g.add_argument("--pool", default="mixed", choices=sorted(TERM_POOLS))
    g.add_argument("--gap", type=int, default=1)
    g.add_argument("--max-support", type=int, default=16)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="rebuild a condition and re-check its clauses")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    le = sub.add_parser("leq", help="decide p <= q (or the pure order with --pure)")
    le.add_argument("file1")
    le.add_argument("file2")
    le.add_argument("--pure", action="store_true")
    le.set_defaults(func=cmd_leq)

    tr = sub.add_parser("transform", help="write the p-transformation of q")
    tr.add_argument("file_p")
    tr.add_argument("file_q")
    tr.add_argument("--out")
    tr.set_defaults(func=cmd_transform)

    co = sub.add_parser("components", help="list the alpha-components")
    co.add_argument("file")
    co.add_argument("--alpha", type=int, required=True)
    co.set_defaults(func=cmd_components)

    for name, func, text in (("closure", cmd_closure, "least closed set containing the levels"),
                             ("upsilon", cmd_upsilon, "signature of a closed set"),
                             ("uset", cmd_uset, "generators with history inside a closed set")):
        c = sub.add_parser(name, help=text)
        c.add_argument("file")
        c.add_argument("--levels", default="")
        c.set_defaults(func=func)

    ch = sub.add_parser("chain", help="majority chain of the top amalgam")
    ch.add_argument("file")
    ch.set_defaults(func=cmd_chain)

    fl = sub.add_parser("flip", help="flip closure for one pair of closed sets")
    fl.add_argument("file")
    fl.add_argument("--z0", required=True)
    fl.add_argument("--z1", required=True)
    fl.add_argument("--all-f", action="store_true", help="try every row instead of sampling")
    fl.add_argument("--samples", type=int, default=1000)
    fl.add_argument("--seed", type=int, default=0)
    fl.set_defaults(func=cmd_flip)

    su = sub.add_parser("suite", help="run every check; JSON report on stdout")
    su.add_argument("files", nargs="+")
    su.add_argument("--budget", type=int, default=2 ** 20)
    su.add_argument("--samples", type=int, default=10_000)
    su.add_argument("--seed", type=int, default=0)
    su.add_argument("--jobs", type=int, default=0, help="worker processes (0 = one per CPU)")
    su.set_defaults(func=cmd_suite)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ClauseViolation as exc:
        print(f"invalid condition: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, InvalidInput, ResourceLimit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
