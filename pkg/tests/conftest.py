"""Shared fixtures: canonical small networks, random corpora, test oracles."""

import pytest

from gridfactor import is_cut_set, load_network


def build(doc, **kwargs):
    return load_network(doc, **kwargs)


def triangle_doc():
    return {
        "nodes": [1, 2, 3],
        "reference": 3,
        "edges": [
            {"from": 1, "to": 2, "b": 1.0},
            {"from": 2, "to": 3, "b": 1.0},
            {"from": 1, "to": 3, "b": 1.0},
        ],
        "injections": {"1": 1.0, "2": -1.0, "3": 0.0},
    }


@pytest.fixture
def triangle():
    return build(triangle_doc())


@pytest.fixture
def path3():
    return build({
        "nodes": [1, 2, 3],
        "edges": [
            {"from": 1, "to": 2, "b": 1.0},
            {"from": 2, "to": 3, "b": 1.0},
        ],
        "injections": {"1": 1.0, "2": 0.0, "3": -1.0},
    })


def fig2_doc():
    # Two triangles joined by two bridges through a degree-one spur:
    # cut vertices {2, 3, 7}, bridges (2,6) and (3,7).
    return {
        "nodes": [1, 2, 3, 4, 5, 6, 7],
        "edges": [
            {"from": 1, "to": 2, "b": 1.0},
            {"from": 2, "to": 3, "b": 1.0},
            {"from": 1, "to": 3, "b": 1.0},
            {"from": 2, "to": 6, "b": 1.0},
            {"from": 3, "to": 7, "b": 1.0},
            {"from": 7, "to": 4, "b": 1.0},
            {"from": 4, "to": 5, "b": 1.0},
            {"from": 5, "to": 7, "b": 1.0},
        ],
    }


@pytest.fixture
def fig2():
    return build(fig2_doc())


def k4_doc():
    return {
        "nodes": [1, 2, 3, 4],
        "reference": 4,
        "edges": [
            {"from": 1, "to": 2, "b": 1.0},
            {"from": 1, "to": 3, "b": 1.0},
            {"from": 1, "to": 4, "b": 1.0},
            {"from": 2, "to": 3, "b": 1.0},
            {"from": 2, "to": 4, "b": 1.0},
            {"from": 3, "to": 4, "b": 1.0},
        ],
    }


@pytest.fixture
def k4():
    return build(k4_doc())


@pytest.fixture
def four_cycle():
    return build({
        "nodes": [1, 2, 3, 4],
        "edges": [
            {"from": 1, "to": 2, "b": 1.0},
            {"from": 2, "to": 3, "b": 1.0},
            {"from": 3, "to": 4, "b": 1.0},
            {"from": 4, "to": 1, "b": 1.0},
        ],
    })


def random_network(rng, max_nodes=8, b_range=(0.5, 2.0), max_extra=5, min_extra=0):
    """Random connected simple network: a spanning tree plus extra chords."""
    n = int(rng.integers(2, max_nodes + 1))
    nodes = list(range(1, n + 1))
    order = [int(v) for v in rng.permutation(nodes)]
    pairs = []
    seen = set()
    for k in range(1, n):
        a = order[k]
        b = order[int(rng.integers(0, k))]
        pairs.append((a, b))
        seen.add(frozenset((a, b)))

    candidates = [
        (a, b)
        for i, a in enumerate(nodes)
        for b in nodes[i + 1:]
        if frozenset((a, b)) not in seen
    ]
    cap = min(max_extra, len(candidates))
    lo = min(min_extra, cap)
    extra = int(rng.integers(lo, cap + 1)) if cap else 0
    if extra:
        chosen = rng.choice(len(candidates), size=extra, replace=False)
        for idx in sorted(int(v) for v in chosen):
            a, b = candidates[idx]
            if rng.integers(0, 2):
                a, b = b, a
            pairs.append((a, b))

    lo_b, hi_b = b_range
    return build({
        "nodes": nodes,
        "edges": [
            {"from": a, "to": b, "b": float(rng.uniform(lo_b, hi_b))}
            for a, b in pairs
        ],
    })


def random_balanced_injection(rng, n):
    p = rng.normal(size=n)
    return p - p.mean()


def sample_non_cut_outage(rng, network, max_size=3, attempts=300):
    """A random non-cut line subset, or None when none was found."""
    ids = list(network.edge_ids())
    upper = min(max_size, len(ids) - 1)
    if upper < 1:
        return None
    for _ in range(attempts):
        size = int(rng.integers(1, upper + 1))
        chosen = sorted(int(v) for v in rng.choice(ids, size=size, replace=False))
        if not is_cut_set(network, chosen):
            return chosen
    return None


# ---------------------------------------------------------------------------
# Independent test oracles (deliberately naive; no gridfactor internals).
# ---------------------------------------------------------------------------


def connected_after_removal_oracle(network, outage):
    """BFS connectivity of the surviving graph over all nodes."""
    outage = set(outage)
    adj = {node: [] for node in network.nodes}
    for edge in network.edges:
        if edge.id in outage:
            continue
        adj[edge.source].append(edge.target)
        adj[edge.target].append(edge.source)
    start = network.nodes[0]
    seen = {start}
    queue = [start]
    while queue:
        node = queue.pop()
        for nxt in adj[node]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == network.n


def simple_cycle_oracle(network, line, other):
    """Exhaustive search: does some simple cycle contain both lines?

    Cycles through line (i, j) correspond to simple paths j -> i avoiding
    the line itself; the oracle enumerates those paths and asks whether any
    uses the other line.
    """
    edge = network.edge_by_id(line)
    adj = {node: [] for node in network.nodes}
    for e in network.edges:
        if e.id == line:
            continue
        adj[e.source].append((e.target, e.id))
        adj[e.target].append((e.source, e.id))

    start, goal = edge.target, edge.source
    found = False

    def walk(node, visited, used_other):
        nonlocal found
        if found:
            return
        if node == goal:
            found = found or used_other
            return
        for nxt, eid in adj[node]:
            if nxt in visited:
                continue
            walk(nxt, visited | {nxt}, used_other or eid == other)

    walk(start, {start}, False)
    return found


def reference_separates_oracle(network, i, j):
    """True when every path i -> j passes the reference node."""
    if i == network.reference or j == network.reference:
        return True
    if i == j:
        return False
    adj = {node: [] for node in network.nodes}
    for edge in network.edges:
        adj[edge.source].append(edge.target)
        adj[edge.target].append(edge.source)
    seen = {i, network.reference}
    queue = [i]
    while queue:
        node = queue.pop()
        for nxt in adj[node]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return j not in seen
