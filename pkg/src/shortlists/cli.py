"""Command-line front end: build, certify, match, shortlist.

Exit codes: 0 success/pass, 1 property failure, 2 usage or input error.
A ``--config`` JSON file may supply any option (keys are the option names
with dashes replaced by underscores); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import io as sio
from .bits import LabelError, UniverseSpec
from .combinators import CertificationError, CombinatorError, PipelineConfig, build_fk, build_gk, build_hk
from .graph import GraphError, RandomGraph, RandomGraphSeed, complete_bipartite
from .matching import discard_bound_check, random_streams
from .shortlist import HkFamily, MachineFormatError, StandardMachine, shortlist_report
from .verify import Budget, check_disperser, check_expander, recheck_witness

log = logging.getLogger("shortlists")

DEFAULTS = {
    "c": 2,
    "cap": None,
    "lambda_": 1,
    "alpha": 1,
    "seed": 0,
    "budget": 10**7,
    "samples": 10**5,
    "restarts": 10**3,
    "mode": None,
    "degree": 4,
    "k_max": 4,
    "step_budget": 10_000,
    "random": 0,
    "streams": [],
}


class UsageError(Exception):
    pass


def _opt(args, name):
    v = getattr(args, name, None)
    if v is None:
        v = args._config.get(name)
    if v is None:
        v = DEFAULTS.get(name)
    return v


def _budget(args) -> Budget:
    return Budget(
        exhaustive_limit=int(_opt(args, "budget")),
        samples=int(_opt(args, "samples")),
        restarts=int(_opt(args, "restarts")),
        seed=int(_opt(args, "seed")),
        mode=_opt(args, "mode"),
    )


def _pipeline_config(args) -> PipelineConfig:
    k = _opt(args, "k")
    if k is None:
        raise UsageError("--k is required for this graph kind")
    try:
        return PipelineConfig(
            k=int(k),
            c=int(_opt(args, "c")),
            left_len_cap=_opt(args, "cap"),
            seed=int(_opt(args, "seed")),
            lam=int(_opt(args, "lambda_")),
            alpha=int(_opt(args, "alpha")),
            budget=_budget(args),
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def _universe(args, side: str) -> UniverseSpec:
    n = _opt(args, f"{side}_len")
    lo = _opt(args, f"{side}_min")
    hi = _opt(args, f"{side}_max")
    if n is not None:
        return UniverseSpec.single(int(n))
    if lo is not None and hi is not None:
        return UniverseSpec.lengths(int(lo), int(hi))
    raise UsageError(f"--{side}-len (or --{side}-min/--{side}-max) is required")


# -- commands -----------------------------------------------------------------------


def cmd_build(args) -> int:
    kind = _opt(args, "kind")
    if kind is None:
        raise UsageError("--kind is required")
    try:
        if kind == "complete":
            g = complete_bipartite(_universe(args, "left"), _universe(args, "right"))
        elif kind == "random":
            g = RandomGraph(
                _universe(args, "left"),
                _universe(args, "right"),
                RandomGraphSeed(int(_opt(args, "seed")), int(_opt(args, "degree"))),
            )
        elif kind == "gk":
            g = build_gk(_pipeline_config(args))
        elif kind == "fk":
            cfg = _pipeline_config(args)
            left_len = _opt(args, "left_len") or 8 * cfg.k
            g = build_fk(cfg, int(left_len))
        elif kind == "hk":
            g = build_hk(_pipeline_config(args))
        else:
            raise UsageError(f"unknown --kind {kind!r}")
    except CertificationError as e:
        print(f"build failed in block {e.block}: {e}", file=sys.stderr)
        if e.certificate is not None:
            print(json.dumps(e.certificate.to_json(), sort_keys=True), file=sys.stderr)
        return 1
    except (GraphError, CombinatorError) as e:
        raise UsageError(str(e)) from None

    manifest = g.manifest()
    edges = _opt(args, "edges")
    out = _opt(args, "out")
    if edges is not None:
        n = sio.write_edge_dump(g, edges)
        log.info("wrote %d edges", n)
    if out is not None or edges != "-":
        sio.write_json(out, manifest)
    return 0


def _load(args):
    manifest, edges = _opt(args, "manifest"), _opt(args, "edges")
    if manifest is None and edges is None:
        raise UsageError("need --manifest or --edges")
    for p in (manifest, edges):
        if p is not None and not Path(p).exists():
            raise UsageError(f"no such file: {p}")
    return sio.load_graph(manifest, edges), (sio.read_json(manifest) if manifest else None)


def cmd_certify(args) -> int:
    g, manifest = _load(args)
    size = _opt(args, "size")
    neighbors = _opt(args, "neighbors")
    delta = _opt(args, "delta")
    if size is None and manifest is not None and "A" in manifest:
        size, neighbors = manifest["A"], manifest["K"]
    if size is None or (neighbors is None and delta is None):
        raise UsageError("need --size and one of --neighbors / --delta")
    budget = _budget(args)
    try:
        if delta is not None:
            cert = check_disperser(g, int(size), Fraction(str(delta)), budget)
        else:
            cert = check_expander(g, int(size), int(neighbors), budget)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if not recheck_witness(g, cert):
        raise RuntimeError("failure witness does not re-verify")
    sio.write_json(_opt(args, "out"), cert.to_json())
    print(f"{cert.result} ({cert.mode}, {cert.subsets_total} subsets)", file=sys.stderr)
    return 0 if cert.passed else 1


def cmd_match(args) -> int:
    if _opt(args, "manifest") or _opt(args, "edges"):
        g, manifest = _load(args)
    elif _opt(args, "k") is not None:
        g = build_hk(_pipeline_config(args))
        manifest = g.manifest()
    else:
        raise UsageError("need --manifest, --edges, or --k")
    A = _opt(args, "A") or (manifest or {}).get("A")
    B = _opt(args, "B") or (manifest or {}).get("K")
    if A is None or B is None:
        raise UsageError("need --A and --B for graphs without pipeline parameters")
    A, B = int(A), int(B)

    streams = []
    for path in _opt(args, "streams"):
        try:
            labels = sio.read_labels(path)
        except (OSError, sio.InputFormatError) as e:
            raise UsageError(str(e)) from None
        for x in labels:
            if x not in g.left:
                raise UsageError(f"{path}: label {sio.render_label(x)} is outside the left universe")
        streams.append(labels)
    n_random = int(_opt(args, "random"))
    if n_random:
        size = int(_opt(args, "stream_size") or B)
        streams += random_streams(g, n_random, size, int(_opt(args, "seed")))
    try:
        report = discard_bound_check(g, A, B, streams)
    except ValueError as e:
        raise UsageError(str(e)) from None
    sio.write_json(_opt(args, "out"), report.to_json())
    return 0 if report.passed else 1


def _machine(args) -> StandardMachine:
    path = _opt(args, "machine")
    if path is None:
        raise UsageError("--machine is required")
    try:
        table = sio.read_machine_table(path)
    except OSError as e:
        raise UsageError(str(e)) from None
    family = HkFamily(
        k_max=int(_opt(args, "k_max")),
        c=int(_opt(args, "c")),
        seed=int(_opt(args, "seed")),
        budget=_budget(args),
        lam=int(_opt(args, "lambda_")),
        alpha=int(_opt(args, "alpha")),
    )
    return StandardMachine(table, family, int(_opt(args, "step_budget")))


def cmd_shortlist(args) -> int:
    m = _machine(args)
    emit = _opt(args, "emit_list")
    if emit is not None:
        try:
            x = sio.parse_label(emit)
            for p in m.f(x):
                print(sio.render_label(p))
        except (LabelError, ValueError) as e:
            raise UsageError(str(e)) from None
        return 0
    corpus_path = _opt(args, "corpus")
    if corpus_path is None:
        raise UsageError("--corpus or --emit-list is required")
    try:
        corpus = sio.read_labels(corpus_path)
    except (OSError, sio.InputFormatError) as e:
        raise UsageError(str(e)) from None

    rows = []
    failures = 0
    for x in corpus:
        if not x:
            continue
        row = shortlist_report(m, x)
        row["ok"] = row["best_len"] is not None and row["best_len"] <= len(x) + 3
        if row["in_range"]:
            row["ok"] = row["ok"] and row["slack"] is not None and row["slack"] <= 3
        failures += not row["ok"]
        rows.append(row)
    in_range = [r for r in rows if r["in_range"]]
    report = {
        "family": m.family.manifest(),
        "step_budget": m.step_budget,
        "scope": "c-shortness asserted only for x with ceil(log2|x|) <= C_U(x) <= min(|x|, k_max) and |x| <= cap(C_U(x))",
        "rows": rows,
        "summary": {
            "strings": len(rows),
            "in_range": len(in_range),
            "max_slack_in_range": max((r["slack"] for r in in_range), default=None),
            "failures": failures,
            "pass": failures == 0,
        },
    }
    sio.write_json(_opt(args, "out"), report)
    return 0 if failures == 0 else 1


# -- parser ----------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with option defaults")
    p.add_argument("--k", type=int)
    p.add_argument("--c", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--lambda", dest="lambda_", type=int)
    p.add_argument("--alpha", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, help="largest C(|L|,K) checked exhaustively")
    p.add_argument("--samples", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--mode", choices=["exhaustive", "sampled"])
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shortlists", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a graph and write its manifest")
    _add_common(b)
    b.add_argument("--kind", choices=["hk", "gk", "fk", "complete", "random"])
    for side in ("left", "right"):
        b.add_argument(f"--{side}-len", type=int)
        b.add_argument(f"--{side}-min", type=int)
        b.add_argument(f"--{side}-max", type=int)
    b.add_argument("--degree", type=int)
    b.add_argument("--edges", help="also write an edge dump here ('-' for stdout)")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("certify", help="check expansion or dispersion")
    _add_common(c)
    c.add_argument("--manifest")
    c.add_argument("--edges")
    c.add_argument("--size", type=int, help="left subset size")
    c.add_argument("--neighbors", type=int, help="required distinct neighbors")
    c.add_argument("--delta", help="disperser delta, e.g. 1/2")
    c.set_defaults(func=cmd_certify)

    m = sub.add_parser("match", help="online matching with discards")
    _add_common(m)
    m.add_argument("--manifest")
    m.add_argument("--edges")
    m.add_argument("--streams", nargs="*", help="stream files, one label per line")
    m.add_argument("--random", type=int, help="number of seeded random streams")
    m.add_argument("--stream-size", type=int)
    m.add_argument("--A", type=int, help="discard bound (subset size of the expander)")
    m.add_argument("--B", type=int, help="max distinct requests per stream")
    m.set_defaults(func=cmd_match)

    s = sub.add_parser("shortlist", help="lists with short programs on a toy machine")
    _add_common(s)
    s.add_argument("--machine", help="machine table file")
    s.add_argument("--corpus", help="corpus file")
    s.add_argument("--k-max", type=int)
    s.add_argument("--step-budget", type=int)
    s.add_argument("--emit-list", help="print f(x) for this string, one program per line")
    s.set_defaults(func=cmd_shortlist)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    args._config = {}
    try:
        if args.config:
            try:
                args._config = json.loads(Path(args.config).read_text(encoding="utf-8"))
            except (OSError, ValueError) as e:
                raise UsageError(f"bad config file: {e}") from None
        return args.func(args)
    except (UsageError, MachineFormatError, sio.InputFormatError) as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
