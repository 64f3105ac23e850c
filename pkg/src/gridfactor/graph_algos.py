"""Block decomposition, cut-set detection, and simple-cycle coexistence.

The block decomposition partitions the edge set into maximal 2-connected
components.  Two distinct edges lie on a common simple cycle exactly when
they share a non-bridge block, which is how :func:`shares_simple_cycle`
answers the query without enumerating cycles.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType

from .errors import DisconnectedError, UnknownEdgeError
from .net_model import Network, _is_connected

__all__ = ["BlockDecomposition", "block_decomposition", "is_cut_set", "shares_simple_cycle"]


@dataclass(frozen=True)
class BlockDecomposition:
    """Edge partition into blocks, plus the bridges and cut vertices.

    ``blocks`` is ordered by first edge appearance (ascending smallest edge
    id), which makes ``block_of`` deterministic for a given network.
    """

    blocks: tuple[frozenset[int], ...]
    bridges: frozenset[int]
    cut_vertices: frozenset[int]
    block_of: MappingProxyType

    def block_edges(self, index: int) -> frozenset[int]:
        return self.blocks[index]

    def is_bridge(self, edge_id: int) -> bool:
        return edge_id in self.bridges


def _adjacency(network: Network) -> dict[int, list[tuple[int, int]]]:
    adj: dict[int, list[tuple[int, int]]] = {node: [] for node in network.nodes}
    for edge in network.edges:
        adj[edge.source].append((edge.target, edge.id))
        adj[edge.target].append((edge.source, edge.id))
    return adj


@lru_cache(maxsize=4096)
def block_decomposition(network: Network) -> BlockDecomposition:
    """Unique block decomposition of a connected network.

    Iterative depth-first search with an edge stack (linear in nodes plus
    edges).  Raises DisconnectedError when the graph is not connected.
    """
    if not _is_connected(network):
        raise DisconnectedError("block decomposition requires a connected network")

    adj = _adjacency(network)
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    raw_blocks: list[frozenset[int]] = []
    edge_stack: list[int] = []
    clock = 0

    for root in network.nodes:
        if root in disc:
            continue
        # Each frame: (node, parent edge id, iterator over incident edges).
        disc[root] = low[root] = clock
        clock += 1
        frames = [(root, -1, iter(adj[root]))]
        while frames:
            node, parent_edge, it = frames[-1]
            advanced = False
            for other, edge_id in it:
                if edge_id == parent_edge:
                    continue
                if other not in disc:
                    disc[other] = low[other] = clock
                    clock += 1
                    edge_stack.append(edge_id)
                    frames.append((other, edge_id, iter(adj[other])))
                    advanced = True
                    break
                if disc[other] < disc[node]:
                    # Back edge to an ancestor.
                    edge_stack.append(edge_id)
                    low[node] = min(low[node], disc[other])
            if advanced:
                continue
            frames.pop()
            if frames:
                parent, _, _ = frames[-1]
                low[parent] = min(low[parent], low[node])
                if low[node] >= disc[parent]:
                    # parent closes a block: pop edges up to the tree edge.
                    members = []
                    while edge_stack:
                        popped = edge_stack.pop()
                        members.append(popped)
                        if popped == parent_edge:
                            break
                    raw_blocks.append(frozenset(members))

    # Deterministic block order: ascending smallest edge id.
    blocks = tuple(sorted(raw_blocks, key=min))
    block_of = {}
    for index, members in enumerate(blocks):
        for edge_id in members:
            block_of[edge_id] = index

    bridges = frozenset(next(iter(b)) for b in blocks if len(b) == 1)

    by_id = {edge.id: edge for edge in network.edges}
    touched: dict[int, set[int]] = {node: set() for node in network.nodes}
    for index, members in enumerate(blocks):
        for edge_id in members:
            edge = by_id[edge_id]
            touched[edge.source].add(index)
            touched[edge.target].add(index)
    cut_vertices = frozenset(node for node, owners in touched.items() if len(owners) >= 2)

    return BlockDecomposition(
        blocks=blocks,
        bridges=bridges,
        cut_vertices=cut_vertices,
        block_of=MappingProxyType(block_of),
    )


def is_cut_set(network: Network, outage) -> bool:
    """True when removing the given lines disconnects the network.

    Union-find connectivity over the surviving edges; every node counts, so
    isolating a single bus is detected.
    """
    outage = set(outage)
    known = {edge.id for edge in network.edges}
    unknown = outage - known
    if unknown:
        raise UnknownEdgeError(f"unknown edge ids {sorted(unknown)}")

    parent = {node: node for node in network.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    components = network.n
    for edge in network.edges:
        if edge.id in outage:
            continue
        a, b = find(edge.source), find(edge.target)
        if a != b:
            parent[a] = b
            components -= 1
    return components > 1


def shares_simple_cycle(network: Network, line: int, other: int) -> bool:
    """True when some simple cycle contains both lines.

    Answered through block equality: two distinct edges lie on a common
    simple cycle exactly when they share a non-bridge block.
    """
    if line == other:
        raise ValueError("lines must be distinct")
    decomposition = block_decomposition(network)
    for edge_id in (line, other):
        if edge_id not in decomposition.block_of:
            raise UnknownEdgeError(f"unknown edge id {edge_id}")
    if decomposition.block_of[line] != decomposition.block_of[other]:
        return False
    return line not in decomposition.bridges
