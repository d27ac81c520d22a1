"""File formats: graph manifests, edge dumps, machine tables, corpora, request streams.

Line-oriented formats write the empty label as ``-``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .bits import BitLabel, LabelError, UniverseSpec, check_label
from .graph import BipartiteGraph, CompleteGraph, GraphError, RandomGraph, RandomGraphSeed, graph_from_edges
from .shortlist import MachineFormatError, MachineTable
from .verify import Budget, certificate_from_json

EMPTY = "-"


class InputFormatError(ValueError):
    pass


def render_label(s: BitLabel) -> str:
    return s if s else EMPTY


def parse_label(token: str) -> BitLabel:
    token = token.strip()
    return "" if token == EMPTY else check_label(token)


def write_json(path: str | Path | None, obj, stream: TextIO | None = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None or str(path) == "-":
        (stream or __import__("sys").stdout).write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# -- graphs -----------------------------------------------------------------------


def write_edge_dump(g: BipartiteGraph, path: str | Path | None, stream: TextIO | None = None) -> int:
    lines = [f"{render_label(x)} {render_label(r)}" for x, r in g.edges()]
    text = "".join(line + "\n" for line in lines)
    if path is None or str(path) == "-":
        (stream or __import__("sys").stdout).write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
    return len(lines)


def read_edge_dump(path: str | Path) -> BipartiteGraph:
    pairs = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputFormatError(f"{path}:{lineno}: expected '<left> <right>', got {raw!r}")
        try:
            pairs.append((parse_label(parts[0]), parse_label(parts[1])))
        except LabelError as e:
            raise InputFormatError(f"{path}:{lineno}: {e}") from None
    return graph_from_edges(pairs)


def graph_from_manifest(m: dict) -> BipartiteGraph:
    """Rebuild a graph from its manifest; certificates are reattached, not recomputed."""
    from .combinators import PipelineConfig, build_fk, build_gk, build_hk

    kind = m["kind"]
    if kind == "complete":
        g = CompleteGraph(UniverseSpec.from_json(m["left"]), UniverseSpec.from_json(m["right"]))
    elif kind == "random":
        g = RandomGraph(
            UniverseSpec.from_json(m["left"]),
            UniverseSpec.from_json(m["right"]),
            RandomGraphSeed(int(m["seed"]), int(m["degree"])),
        )
    elif kind in ("hk", "gk", "fk"):
        c = m["config"]
        b = c["budget"]
        cfg = PipelineConfig(
            k=c["k"],
            c=c["c"],
            left_len_cap=c["cap"],
            provider=c["provider"],
            seed=c["seed"],
            seeds={k: int(v) for k, v in c.get("seeds", {}).items()},
            lam=c["lambda"],
            alpha=c["alpha"],
            block_degree=c["block_degree"],
            fk_right_len=c["fk_right_len"],
            fk_degree=c["fk_degree"],
            budget=Budget(b["exhaustive_limit"], b["samples"], b["restarts"], b["seed"], b["mode"]),
            certify=False,
        )
        if kind == "hk":
            g = build_hk(cfg)
        elif kind == "gk":
            g = build_gk(cfg)
        else:
            g = build_fk(cfg, m["params"]["left_len"])
    else:
        raise GraphError(f"cannot rebuild a graph of kind {kind!r} from its manifest; use an edge dump")
    g.certificates = [certificate_from_json(d) for d in m.get("certificates", [])]
    return g


def load_graph(manifest: str | Path | None = None, edges: str | Path | None = None) -> BipartiteGraph:
    if manifest is not None:
        return graph_from_manifest(read_json(manifest))
    if edges is not None:
        return read_edge_dump(edges)
    raise ValueError("need a manifest or an edge dump")


# -- machine tables, corpora, streams ---------------------------------------------


def parse_machine_table(lines: Iterable[str], source: str = "<table>") -> MachineTable:
    entries = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise MachineFormatError(f"{source}:{lineno}: expected '<program>\\t<output>\\t<steps>'")
        try:
            q, x = parse_label(parts[0]), parse_label(parts[1])
            steps = int(parts[2])
        except (LabelError, ValueError) as e:
            raise MachineFormatError(f"{source}:{lineno}: {e}") from None
        if steps < 1:
            raise MachineFormatError(f"{source}:{lineno}: steps must be >= 1")
        if q in entries:
            raise MachineFormatError(f"{source}:{lineno}: duplicate program {render_label(q)}")
        entries[q] = (x, steps)
    return MachineTable(entries)


def read_machine_table(path: str | Path) -> MachineTable:
    return parse_machine_table(Path(path).read_text(encoding="utf-8").splitlines(), str(path))


def format_machine_table(table: MachineTable) -> str:
    return "".join(
        f"{render_label(q)}\t{render_label(x)}\t{s}\n" for q, (x, s) in sorted(table.entries.items(), key=lambda kv: (len(kv[0]), kv[0]))
    )


def read_labels(path: str | Path) -> list[BitLabel]:
    """One label per line; blank lines and ``#`` comments are skipped."""
    out = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.append(parse_label(line))
        except LabelError as e:
            raise InputFormatError(f"{path}:{lineno}: {e}") from None
    return out


def iter_label_lines(labels: Iterable[BitLabel]) -> Iterator[str]:
    for s in labels:
        yield render_label(s) + "\n"
