"""Reading and writing graph documents.

A graph document is UTF-8 JSON::

    {"format_version": 1,
     "vertices": [{"id": 0, "mu": 1.0, "label": "a"}, ...],
     "edges": [[0, 1], ...],
     "tree": {"root": 0, "parent": {"1": 0, ...}}}

``label`` and ``tree`` are optional. Vertex ids may be any distinct
integers; loading maps them to ``0..n-1`` in ascending order. Floats are
written with Python's shortest round-trip repr, so save/load is exact.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .graph_core import GraphError, WeightedGraph
from .tree import NO_PARENT, RootedTree

__all__ = ["FORMAT_VERSION", "GraphFormatError", "to_document", "from_document", "load_graph", "save_graph"]

FORMAT_VERSION = 1


class GraphFormatError(GraphError):
    """A graph document failed to parse or validate; the message names the field."""


def to_document(g: WeightedGraph, tree: RootedTree | None = None) -> dict[str, Any]:
    verts = []
    for i, mu in enumerate(g.weights.tolist()):
        v: dict[str, Any] = {"id": i, "mu": mu}
        if g.labels is not None:
            v["label"] = g.labels[i]
        verts.append(v)
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "vertices": verts,
        "edges": [list(e) for e in g.edges],
    }
    if tree is not None:
        doc["tree"] = {
            "root": tree.root,
            "parent": {str(t): int(tree.parent[t]) for t in sorted(tree.non_root.tolist())},
        }
    return doc


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, str) and value.lstrip("-").isdigit():
            return int(value)
        raise GraphFormatError(f"{where}: expected an integer id, got {value!r}")
    return value


def from_document(doc: Any) -> tuple[WeightedGraph, RootedTree | None]:
    if not isinstance(doc, dict):
        raise GraphFormatError("document: expected a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise GraphFormatError(f"format_version: unsupported value {version!r} (expected {FORMAT_VERSION})")
    verts = doc.get("vertices")
    if not isinstance(verts, list) or not verts:
        raise GraphFormatError("vertices: expected a non-empty list")

    ids, mus, labels = [], [], []
    for k, v in enumerate(verts):
        where = f"vertices[{k}]"
        if not isinstance(v, dict):
            raise GraphFormatError(f"{where}: expected an object")
        if "id" not in v or "mu" not in v:
            raise GraphFormatError(f"{where}: missing 'id' or 'mu'")
        ids.append(_int(v["id"], f"{where}.id"))
        mu = v["mu"]
        if isinstance(mu, bool) or not isinstance(mu, (int, float)):
            raise GraphFormatError(f"{where}.mu: expected a number, got {mu!r}")
        if not (np.isfinite(mu) and mu > 0):
            raise GraphFormatError(f"{where}.mu: nonpositive weight {mu!r}")
        mus.append(float(mu))
        labels.append(v.get("label"))
    if len(set(ids)) != len(ids):
        raise GraphFormatError("vertices: duplicate vertex ids")
    order = sorted(range(len(ids)), key=ids.__getitem__)
    index = {ids[k]: new for new, k in enumerate(order)}
    weights = [mus[k] for k in order]
    has_labels = any(l is not None for l in labels)
    lab = [str(labels[k]) if labels[k] is not None else str(ids[k]) for k in order] if has_labels else None

    edges_in = doc.get("edges", [])
    if not isinstance(edges_in, list):
        raise GraphFormatError("edges: expected a list of [id, id] pairs")
    edges = []
    for k, e in enumerate(edges_in):
        where = f"edges[{k}]"
        if not isinstance(e, list) or len(e) != 2:
            raise GraphFormatError(f"{where}: expected an [id, id] pair")
        a, b = _int(e[0], where), _int(e[1], where)
        if a not in index or b not in index:
            raise GraphFormatError(f"{where}: dangling edge id in {e!r}")
        if a == b:
            raise GraphFormatError(f"{where}: self-loop at {a}")
        edges.append((index[a], index[b]))
    try:
        g = WeightedGraph.from_edges(weights, edges, labels=lab)
    except GraphError as exc:
        raise GraphFormatError(f"graph: {exc}") from None

    tree = None
    if doc.get("tree") is not None:
        t = doc["tree"]
        if not isinstance(t, dict) or "root" not in t or "parent" not in t:
            raise GraphFormatError("tree: expected an object with 'root' and 'parent'")
        root = _int(t["root"], "tree.root")
        if root not in index:
            raise GraphFormatError(f"tree.root: unknown vertex {root}")
        parent = np.full(g.n, NO_PARENT, dtype=np.intp)
        pmap = t["parent"]
        if not isinstance(pmap, dict):
            raise GraphFormatError("tree.parent: expected an object mapping id to parent id")
        for key, val in pmap.items():
            c, p = _int(key, f"tree.parent[{key!r}]"), _int(val, f"tree.parent[{key!r}]")
            if c not in index or p not in index:
                raise GraphFormatError(f"tree.parent[{key!r}]: unknown vertex")
            parent[index[c]] = index[p]
        try:
            tree = RootedTree.from_parent(parent, index[root])
            tree.check_spans(g)
        except GraphError as exc:
            raise GraphFormatError(f"tree: invalid tree: {exc}") from None
    return g, tree


def load_graph(path) -> tuple[WeightedGraph, RootedTree | None]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_document(doc)


def dumps(g: WeightedGraph, tree: RootedTree | None = None) -> str:
    return json.dumps(to_document(g, tree), indent=1) + "\n"


def save_graph(path, g: WeightedGraph, tree: RootedTree | None = None) -> None:
    Path(path).write_text(dumps(g, tree), encoding="utf-8")
