"""Network data model, document ingestion, validation, and incidence matrix.

A network is an oriented simple graph.  Edge orientation is taken from the
order the endpoints appear in the input document, so loading is fully
deterministic.  The reference bus defaults to the highest-numbered node and
can be overridden per document.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import ParseError, UnbalancedInjectionError, UnknownEdgeError, ValidationError

__all__ = [
    "Edge",
    "Network",
    "Finding",
    "ValidationReport",
    "load_network",
    "network_to_document",
    "incidence_matrix",
    "validate",
    "injection_vector",
]

#: Relative tolerance for the injection balance check.
BALANCE_RTOL = 1e-9


@dataclass(frozen=True)
class Edge:
    """A transmission line with orientation source -> target.

    ``susceptance`` is the positive DC line weight; ``capacity`` is the
    thermal limit (infinite when the line can never trip).
    """

    id: int
    source: int
    target: int
    susceptance: float
    capacity: float = math.inf


@dataclass(frozen=True)
class Network:
    """Immutable oriented graph with per-line susceptance and capacity.

    ``nodes`` is kept in ascending order; ``edges`` keeps document order,
    which fixes both the line indexing and the edge orientation.
    ``injections`` is the optional per-node real power vector aligned with
    ``nodes``.
    """

    nodes: tuple[int, ...]
    edges: tuple[Edge, ...]
    reference: int
    injections: tuple[float, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    def node_index(self, node: int) -> int:
        try:
            return _node_positions(self)[node]
        except KeyError:
            raise ValidationError(f"unknown node {node}") from None

    def edge_index(self, edge_id: int) -> int:
        try:
            return _edge_positions(self)[edge_id]
        except KeyError:
            raise UnknownEdgeError(f"unknown edge id {edge_id}") from None

    def edge_by_id(self, edge_id: int) -> Edge:
        return self.edges[self.edge_index(edge_id)]

    def edge_ids(self) -> tuple[int, ...]:
        return tuple(edge.id for edge in self.edges)

    def susceptances(self) -> np.ndarray:
        return np.array([edge.susceptance for edge in self.edges], dtype=float)

    def capacities(self) -> np.ndarray:
        return np.array([edge.capacity for edge in self.edges], dtype=float)

    def reference_index(self) -> int:
        return self.node_index(self.reference)

    def with_susceptances(self, values) -> "Network":
        """Copy of the network with per-edge susceptances replaced."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.m,):
            raise ValidationError(f"expected {self.m} susceptances, got {values.shape}")
        edges = tuple(
            replace(edge, susceptance=float(b)) for edge, b in zip(self.edges, values)
        )
        return replace(self, edges=edges)

    def with_capacities(self, values) -> "Network":
        """Copy of the network with per-edge capacities replaced."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.m,):
            raise ValidationError(f"expected {self.m} capacities, got {values.shape}")
        edges = tuple(
            replace(edge, capacity=float(c)) for edge, c in zip(self.edges, values)
        )
        return replace(self, edges=edges)

    def without_edges(self, edge_ids) -> "Network":
        """Copy with the given lines removed; surviving edges keep their ids."""
        drop = set(edge_ids)
        known = {edge.id for edge in self.edges}
        missing = drop - known
        if missing:
            raise UnknownEdgeError(f"unknown edge ids {sorted(missing)}")
        edges = tuple(edge for edge in self.edges if edge.id not in drop)
        return replace(self, edges=edges)


@lru_cache(maxsize=4096)
def _node_positions(network: Network) -> dict[int, int]:
    return {node: k for k, node in enumerate(network.nodes)}


@lru_cache(maxsize=4096)
def _edge_positions(network: Network) -> dict[int, int]:
    return {edge.id: k for k, edge in enumerate(network.edges)}


@dataclass(frozen=True)
class Finding:
    """One validation violation, with a stable code and a human detail."""

    code: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not self.findings

    def codes(self) -> tuple[str, ...]:
        return tuple(f.code for f in self.findings)


def _parse_capacity(raw) -> float:
    if raw is None:
        return math.inf
    if isinstance(raw, str):
        text = raw.strip().lower()
        if text in ("", "inf", "+inf", "infinity"):
            return math.inf
        try:
            return float(text)
        except ValueError:
            raise ParseError(f"bad capacity value {raw!r}") from None
    return float(raw)


def _network_from_document(doc: dict) -> Network:
    if not isinstance(doc, dict):
        raise ParseError("network document must be a JSON object")
    if "edges" not in doc:
        raise ParseError("network document is missing 'edges'")

    raw_edges = doc["edges"]
    if not isinstance(raw_edges, list):
        raise ParseError("'edges' must be a list")

    edges = []
    for k, item in enumerate(raw_edges):
        try:
            source = int(item["from"])
            target = int(item["to"])
            susceptance = float(item["b"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"edge #{k + 1} is malformed: {exc}") from None
        capacity = _parse_capacity(item.get("cap"))
        edges.append(Edge(id=k + 1, source=source, target=target,
                          susceptance=susceptance, capacity=capacity))

    if "nodes" in doc:
        try:
            nodes = tuple(sorted(int(v) for v in doc["nodes"]))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"'nodes' is malformed: {exc}") from None
    else:
        seen = {e.source for e in edges} | {e.target for e in edges}
        nodes = tuple(sorted(seen))

    reference = int(doc.get("reference", nodes[-1] if nodes else 0))

    injections = None
    if "injections" in doc:
        raw_inj = doc["injections"]
        if not isinstance(raw_inj, dict):
            raise ParseError("'injections' must map node ids to reals")
        try:
            by_node = {int(k): float(v) for k, v in raw_inj.items()}
        except (TypeError, ValueError) as exc:
            raise ParseError(f"'injections' is malformed: {exc}") from None
        unknown = set(by_node) - set(nodes)
        if unknown:
            raise ParseError(f"injections name unknown nodes {sorted(unknown)}")
        injections = tuple(by_node.get(node, 0.0) for node in nodes)

    return Network(nodes=nodes, edges=tuple(edges), reference=reference,
                   injections=injections)


def _document_from_csv(edges_path: Path) -> dict:
    doc: dict = {"edges": []}
    try:
        with open(edges_path, newline="") as handle:
            for row in csv.DictReader(handle):
                doc["edges"].append({
                    "from": row["from"],
                    "to": row["to"],
                    "b": row["b"],
                    "cap": row.get("cap"),
                })
    except (OSError, KeyError, csv.Error) as exc:
        raise ParseError(f"cannot read edge table {edges_path}: {exc}") from None

    injections_path = edges_path.with_name("injections.csv")
    if injections_path.exists():
        injections = {}
        try:
            with open(injections_path, newline="") as handle:
                for row in csv.DictReader(handle):
                    injections[row["node"]] = row["p"]
        except (OSError, KeyError, csv.Error) as exc:
            raise ParseError(f"cannot read injection table {injections_path}: {exc}") from None
        doc["injections"] = injections
    return doc


def load_network(source, reference: int | None = None) -> Network:
    """Load and validate a network from a document or file.

    ``source`` may be an already-parsed document (dict), a path to a JSON
    document, a path to ``edges.csv``, or a directory containing
    ``edges.csv`` (plus an optional ``injections.csv`` next to it).
    ``reference`` overrides the document's reference bus.

    Raises ParseError on malformed input and ValidationError when the
    network violates a model invariant.
    """
    if isinstance(source, dict):
        doc = source
    else:
        path = Path(source)
        if path.is_dir():
            doc = _document_from_csv(path / "edges.csv")
        elif path.suffix.lower() == ".csv":
            doc = _document_from_csv(path)
        else:
            try:
                with open(path) as handle:
                    doc = json.load(handle)
            except OSError as exc:
                raise ParseError(f"cannot open {path}: {exc}") from None
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path} is not valid JSON: {exc}") from None

    network = _network_from_document(doc)
    if reference is not None:
        network = replace(network, reference=int(reference))

    report = validate(network)
    if not report.ok:
        raise ValidationError("; ".join(f"{f.code}: {f.detail}" for f in report.findings))
    return network


def network_to_document(network: Network) -> dict:
    """Serialize a network to the canonical JSON document form.

    Loading the returned document yields a network equal to the input.
    """
    doc: dict = {
        "nodes": list(network.nodes),
        "reference": network.reference,
        "edges": [
            {
                "from": edge.source,
                "to": edge.target,
                "b": edge.susceptance,
                "cap": "inf" if math.isinf(edge.capacity) else edge.capacity,
            }
            for edge in network.edges
        ],
    }
    if network.injections is not None:
        doc["injections"] = {str(node): p for node, p in zip(network.nodes, network.injections)}
    return doc


def incidence_matrix(network: Network) -> np.ndarray:
    """Signed node-edge incidence matrix C (+1 at each source, -1 at each target)."""
    C = np.zeros((network.n, network.m))
    positions = {node: k for k, node in enumerate(network.nodes)}
    for col, edge in enumerate(network.edges):
        C[positions[edge.source], col] = 1.0
        C[positions[edge.target], col] = -1.0
    return C


def _is_connected(network: Network) -> bool:
    if network.n == 0:
        return True
    parent = {node: node for node in network.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for edge in network.edges:
        if edge.source in parent and edge.target in parent:
            parent[find(edge.source)] = find(edge.target)
    roots = {find(node) for node in network.nodes}
    return len(roots) == 1


def validate(network: Network) -> ValidationReport:
    """Check every model invariant and report all violations.

    Unlike :func:`load_network` this never raises; callers inspect the
    report.  An empty report means the network satisfies all invariants.
    """
    findings: list[Finding] = []
    node_set = set(network.nodes)

    if network.n < 2:
        findings.append(Finding("too_few_nodes", f"need at least 2 nodes, found {network.n}"))
    if network.m < 1:
        findings.append(Finding("no_edges", "network has no edges"))
    if len(node_set) != network.n:
        findings.append(Finding("duplicate_node", "node ids are not unique"))
    if network.nodes and tuple(sorted(node_set)) != tuple(range(1, network.n + 1)):
        findings.append(Finding("node_ids", "node ids must be 1..n"))

    if network.reference not in node_set:
        findings.append(Finding("bad_reference", f"reference {network.reference} is not a node"))

    seen_ids = set()
    seen_pairs = set()
    for edge in network.edges:
        if edge.id in seen_ids:
            findings.append(Finding("duplicate_edge_id", f"edge id {edge.id} repeats"))
        seen_ids.add(edge.id)
        if edge.source == edge.target:
            findings.append(Finding("self_loop", f"edge {edge.id} is a self-loop at node {edge.source}"))
        pair = frozenset((edge.source, edge.target))
        if pair in seen_pairs:
            findings.append(Finding(
                "duplicate_edge",
                f"edge {edge.id} repeats endpoint pair {tuple(sorted(pair))} (in either orientation)",
            ))
        seen_pairs.add(pair)
        for endpoint in (edge.source, edge.target):
            if endpoint not in node_set:
                findings.append(Finding("unknown_endpoint", f"edge {edge.id} uses unknown node {endpoint}"))
        if not edge.susceptance > 0:
            findings.append(Finding("nonpositive_susceptance", f"edge {edge.id} has b={edge.susceptance}"))
        if not edge.capacity > 0:
            findings.append(Finding("nonpositive_capacity", f"edge {edge.id} has cap={edge.capacity}"))

    if network.injections is not None and len(network.injections) != network.n:
        findings.append(Finding(
            "injection_length",
            f"expected {network.n} injections, got {len(network.injections)}",
        ))

    clean_endpoints = not any(f.code in ("unknown_endpoint", "duplicate_node") for f in findings)
    if clean_endpoints and network.n >= 2 and not _is_connected(network):
        findings.append(Finding("disconnected", "network is not connected"))

    return ValidationReport(tuple(findings))


def injection_vector(network: Network, values=None) -> np.ndarray:
    """Validated balanced injection vector aligned with ``network.nodes``.

    Uses ``network.injections`` when ``values`` is omitted.  Raises
    UnbalancedInjectionError when the entries do not sum to zero within
    ``BALANCE_RTOL * max(1, max|p|)``.
    """
    if values is None:
        if network.injections is None:
            raise ValidationError("network document carries no injections")
        values = network.injections
    p = np.asarray(values, dtype=float)
    if p.shape != (network.n,):
        raise ValidationError(f"expected {network.n} injections, got shape {p.shape}")
    scale = max(1.0, float(np.max(np.abs(p))) if p.size else 1.0)
    if abs(float(p.sum())) > BALANCE_RTOL * scale:
        raise UnbalancedInjectionError(f"injections sum to {p.sum():.3e}, not zero")
    return p
