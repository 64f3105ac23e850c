"""Brute-force spanning-tree and two-tree-forest enumeration.

This module is the independent oracle for the distribution-factor algebra:
matrix entries, PTDF, LODF, and effective reactance are all recomputed here
as ratios of weighted forest sums and compared against the dense
linear-algebra routes elsewhere.  Enumeration is deliberately naive so that
it is obviously correct; everything is capped to keep runtimes bounded.

When every line susceptance is a ratio of small integers, the weight sums
are accumulated in exact rational arithmetic, which removes rounding slack
from the identity checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BridgeError, TooLargeError, UnknownEdgeError
from .net_model import Network, incidence_matrix

__all__ = [
    "ForestFamily",
    "MatrixTreeReport",
    "ReactanceReport",
    "enumerate_spanning_trees",
    "enumerate_two_tree_forests",
    "a_entry_via_forests",
    "ptdf_via_forests",
    "lodf_via_forests",
    "matrix_tree_check",
    "effective_reactance",
]

#: Hard cap on enumerated members.
MAX_MEMBERS = 10**7
#: Hard cap on candidate subsets examined during forest enumeration.
MAX_CANDIDATES = 2 * 10**7
#: Largest numerator/denominator for the exact rational weight mode.
MAX_RATIONAL = 10**6
#: Identity tolerance used by :func:`matrix_tree_check`.
CHECK_RTOL = 1e-9


@dataclass(frozen=True)
class ForestFamily:
    """An enumerated family of spanning trees or two-tree spanning forests.

    ``members`` holds each forest as an ascending tuple of edge ids, with
    the list itself in lexicographic order.  ``weight_sum`` is the sum of
    per-forest susceptance products; ``weight_sum_exact`` carries the same
    sum as a Fraction when exact mode applies.
    """

    kind: str
    members: tuple[tuple[int, ...], ...]
    weight_sum: float
    weight_sum_exact: Fraction | None = None

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class MatrixTreeReport:
    """Determinant and first-minor comparison against forest weight sums."""

    determinant: float
    forest_weight: float
    determinant_rel_err: float
    minor_max_rel_err: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class ReactanceReport:
    """Effective reactance of a line and its network reduction ratio.

    ``effective`` is the two-terminal equivalent reactance across the
    line's endpoints; ``line_reactance`` is 1/B for the line itself;
    ``reduction_ratio`` is the weighted share of spanning trees avoiding
    the line, so line_reactance - effective = line_reactance * ratio.
    """

    effective: float
    line_reactance: float
    reduction_ratio: float


def _nice_fraction(value: float) -> Fraction | None:
    """Exact small-rational form of ``value``, or None."""
    if not math.isfinite(value):
        return None
    frac = Fraction(value).limit_denominator(MAX_RATIONAL)
    if float(frac) == value and abs(frac.numerator) <= MAX_RATIONAL:
        return frac
    return None


def _rel_err(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _estimate_tree_count(n: int, edge_list) -> float:
    """Unweighted spanning-tree count of the (possibly sub-) graph."""
    if n <= 1:
        return 1.0
    L = np.zeros((n, n))
    for _, u, v in edge_list:
        L[u, u] += 1.0
        L[v, v] += 1.0
        L[u, v] -= 1.0
        L[v, u] -= 1.0
    return abs(float(np.linalg.det(L[1:, 1:])))


def _enumerate_tree_sets(n: int, edge_list) -> list[frozenset[int]]:
    """All spanning trees of the graph given as (edge_id, u, v) triples.

    Recursive contraction/deletion on the first remaining edge, pruning
    branches whose residual graph is disconnected, so the work is
    proportional to the output.
    """
    if _estimate_tree_count(n, edge_list) > MAX_MEMBERS:
        raise TooLargeError("estimated spanning-tree count exceeds the enumeration cap")

    trees: list[frozenset[int]] = []

    def connected(vertices: frozenset[int], edges) -> bool:
        if len(vertices) <= 1:
            return True
        parent = {v: v for v in vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        remaining = len(vertices)
        for _, u, v in edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                remaining -= 1
                if remaining == 1:
                    return True
        return remaining == 1

    def recurse(vertices: frozenset[int], edges, chosen: list[int]):
        if len(vertices) == 1:
            trees.append(frozenset(chosen))
            if len(trees) > MAX_MEMBERS:
                raise TooLargeError("spanning-tree enumeration exceeded the cap")
            return
        if not edges or not connected(vertices, edges):
            return
        eid, u, v = edges[0]
        # Keep the edge: contract v into u, dropping the self-loops that form.
        contracted = []
        for other_id, a, b in edges[1:]:
            a2 = u if a == v else a
            b2 = u if b == v else b
            if a2 != b2:
                contracted.append((other_id, a2, b2))
        chosen.append(eid)
        recurse(vertices - {v}, contracted, chosen)
        chosen.pop()
        # Drop the edge.
        recurse(vertices, edges[1:], chosen)

    vertices = frozenset(range(n))
    recurse(vertices, list(edge_list), [])
    return trees


@lru_cache(maxsize=1024)
def _tree_index(network: Network, allowed: frozenset[int] | None):
    """Spanning trees (restricted to ``allowed`` edge ids) with weights."""
    positions = {node: k for k, node in enumerate(network.nodes)}
    edge_list = [
        (edge.id, positions[edge.source], positions[edge.target])
        for edge in network.edges
        if allowed is None or edge.id in allowed
    ]
    raw = _enumerate_tree_sets(network.n, edge_list)

    weights = {eid: network.edge_by_id(eid).susceptance for eid, _, _ in edge_list}
    exact_weights = {eid: _nice_fraction(w) for eid, w in weights.items()}
    exact_mode = all(v is not None for v in exact_weights.values())

    members = sorted(tuple(sorted(tree)) for tree in raw)
    betas = []
    betas_exact = [] if exact_mode else None
    for member in members:
        beta = 1.0
        for eid in member:
            beta *= weights[eid]
        betas.append(beta)
        if exact_mode:
            acc = Fraction(1)
            for eid in member:
                acc *= exact_weights[eid]
            betas_exact.append(acc)

    total = math.fsum(betas)
    total_exact = sum(betas_exact, Fraction(0)) if exact_mode else None
    return tuple(members), tuple(betas), (tuple(betas_exact) if exact_mode else None), total, total_exact


@lru_cache(maxsize=1024)
def _forest_index(network: Network):
    """Every two-tree spanning forest with component labels and weights.

    A forest is any acyclic choice of n-2 edges; acyclicity forces exactly
    two components.  ``labels[k]`` maps each node position to 0 or 1
    according to the component containing it, normalized so position 0 is
    component 0.
    """
    n, m = network.n, network.m
    take = n - 2
    if take < 0:
        return (), (), None, ()
    if math.comb(m, take) > MAX_CANDIDATES:
        raise TooLargeError("two-tree forest enumeration exceeds the candidate cap")

    positions = {node: k for k, node in enumerate(network.nodes)}
    edge_list = [
        (edge.id, positions[edge.source], positions[edge.target]) for edge in network.edges
    ]

    weights = {edge.id: edge.susceptance for edge in network.edges}
    exact_weights = {eid: _nice_fraction(w) for eid, w in weights.items()}
    exact_mode = all(v is not None for v in exact_weights.values())

    entries = []
    for combo in itertools.combinations(edge_list, take):
        uf = _UnionFind(n)
        acyclic = True
        for _, u, v in combo:
            if not uf.union(u, v):
                acyclic = False
                break
        if not acyclic:
            continue
        root0 = uf.find(0)
        labels = tuple(0 if uf.find(k) == root0 else 1 for k in range(n))
        member = tuple(sorted(eid for eid, _, _ in combo))
        beta = 1.0
        for eid in member:
            beta *= weights[eid]
        exact = None
        if exact_mode:
            exact = Fraction(1)
            for eid in member:
                exact *= exact_weights[eid]
        entries.append((member, labels, beta, exact))

    entries.sort(key=lambda item: item[0])
    members = tuple(item[0] for item in entries)
    labels = tuple(item[1] for item in entries)
    betas = tuple(item[2] for item in entries)
    betas_exact = tuple(item[3] for item in entries) if exact_mode else None
    return members, labels, betas_exact, betas


def _forest_sum(network: Network, group_a, group_b):
    """(members, float sum, exact sum) over forests separating the groups."""
    group_a = set(group_a)
    group_b = set(group_b)
    if not group_a or not group_b:
        raise ValueError("node groups must be nonempty")
    if group_a & group_b:
        return (), 0.0, Fraction(0)
    members, labels, betas_exact, betas = _forest_index(network)
    pos_a = [network.node_index(v) for v in group_a]
    pos_b = [network.node_index(v) for v in group_b]

    hits = []
    acc = []
    acc_exact = Fraction(0) if betas_exact is not None else None
    for k in range(len(members)):
        lab = labels[k]
        side_a = lab[pos_a[0]]
        if any(lab[p] != side_a for p in pos_a[1:]):
            continue
        side_b = lab[pos_b[0]]
        if side_b == side_a or any(lab[p] != side_b for p in pos_b[1:]):
            continue
        hits.append(members[k])
        acc.append(betas[k])
        if acc_exact is not None:
            acc_exact += betas_exact[k]
    return tuple(hits), math.fsum(acc), acc_exact


def _ratio(num: float, num_exact, den: float, den_exact) -> float:
    if num_exact is not None and den_exact is not None and den_exact != 0:
        return float(num_exact / den_exact)
    return num / den


def enumerate_spanning_trees(network: Network, allowed_edges=None) -> ForestFamily:
    """All spanning trees drawing edges from ``allowed_edges`` (default: all).

    Raises TooLargeError past the enumeration cap.
    """
    allowed = None
    if allowed_edges is not None:
        allowed = frozenset(allowed_edges)
        known = {edge.id for edge in network.edges}
        unknown = allowed - known
        if unknown:
            raise UnknownEdgeError(f"unknown edge ids {sorted(unknown)}")
    members, _, betas_exact, total, total_exact = _tree_index(network, allowed)
    return ForestFamily(
        kind="spanning_trees",
        members=members,
        weight_sum=total,
        weight_sum_exact=total_exact,
    )


def enumerate_two_tree_forests(network: Network, group_a, group_b) -> ForestFamily:
    """Spanning forests of exactly two trees separating the two node groups.

    The family is empty whenever the groups overlap.
    """
    for node in itertools.chain(group_a, group_b):
        network.node_index(node)
    members, total, total_exact = _forest_sum(network, group_a, group_b)
    return ForestFamily(
        kind="two_tree_forests",
        members=members,
        weight_sum=total,
        weight_sum_exact=total_exact,
    )


def a_entry_via_forests(network: Network, i: int, j: int) -> float:
    """Entry (i, j) of the padded reduced-Laplacian inverse, via forest sums.

    Weighted share of two-tree forests joining i with j while the reference
    bus sits in the other tree; zero whenever i or j is the reference.
    """
    network.node_index(i)
    network.node_index(j)
    if i == network.reference or j == network.reference:
        return 0.0
    _, num, num_exact = _forest_sum(network, {i, j}, {network.reference})
    _, _, _, den, den_exact = _tree_index(network, None)
    return _ratio(num, num_exact, den, den_exact)


def ptdf_via_forests(network: Network, line: int, inject_at: int, withdraw_at: int) -> float:
    """Flow sensitivity of ``line`` to a unit injection shift, via forest sums.

    For line (i, j) the numerator pits forests pairing {i, inject_at} with
    {j, withdraw_at} against the opposite-orientation pairing; the
    denominator is the total spanning-tree weight.
    """
    edge = network.edge_by_id(line)
    network.node_index(inject_at)
    network.node_index(withdraw_at)
    i, j = edge.source, edge.target
    _, pos, pos_exact = _forest_sum(network, {i, inject_at}, {j, withdraw_at})
    _, neg, neg_exact = _forest_sum(network, {i, withdraw_at}, {j, inject_at})
    _, _, _, den, den_exact = _tree_index(network, None)
    if pos_exact is not None and neg_exact is not None and den_exact:
        return float(Fraction(edge.susceptance) * (pos_exact - neg_exact) / den_exact)
    return edge.susceptance * (pos - neg) / den


def lodf_via_forests(network: Network, line: int, outaged: int) -> float:
    """Outage distribution factor via forest sums.

    Same numerator as the injection-shift factor taken at the outaged
    line's endpoints; the denominator sums spanning trees avoiding the
    outaged line, so a bridge outage (empty family) raises BridgeError.
    """
    if line == outaged:
        raise ValueError("lines must be distinct")
    edge = network.edge_by_id(line)
    hat = network.edge_by_id(outaged)
    i, j = edge.source, edge.target

    allowed = frozenset(e.id for e in network.edges if e.id != outaged)
    _, _, _, den, den_exact = _tree_index(network, allowed)
    if den == 0.0:
        raise BridgeError(f"line {outaged} is a bridge; no spanning tree avoids it")

    _, pos, pos_exact = _forest_sum(network, {i, hat.source}, {j, hat.target})
    _, neg, neg_exact = _forest_sum(network, {i, hat.target}, {j, hat.source})
    if pos_exact is not None and neg_exact is not None and den_exact:
        return float(Fraction(edge.susceptance) * (pos_exact - neg_exact) / den_exact)
    return edge.susceptance * (pos - neg) / den


def matrix_tree_check(network: Network, tolerance: float = CHECK_RTOL) -> MatrixTreeReport:
    """Compare reduced-Laplacian determinants against forest weight sums.

    Checks the determinant against the total spanning-tree weight and every
    first minor against the signed weight of the matching two-tree family.
    """
    C = incidence_matrix(network)
    b = network.susceptances()
    L = C @ (b[:, None] * C.T)
    ref = network.reference_index()
    keep = [k for k in range(network.n) if k != ref]
    reduced = L[np.ix_(keep, keep)]
    non_ref_nodes = [network.nodes[k] for k in keep]

    _, _, _, tree_total, tree_total_exact = _tree_index(network, None)
    forest_weight = float(tree_total_exact) if tree_total_exact is not None else tree_total

    determinant = float(np.linalg.det(reduced)) if reduced.size else 1.0
    det_err = _rel_err(determinant, forest_weight)

    minor_max = 0.0
    size = len(keep)
    for row in range(size):
        for col in range(size):
            sub = np.delete(np.delete(reduced, row, axis=0), col, axis=1)
            minor = float(np.linalg.det(sub)) if sub.size else 1.0
            group = {non_ref_nodes[row], non_ref_nodes[col]}
            _, total, total_exact = _forest_sum(network, group, {network.reference})
            expected = float(total_exact) if total_exact is not None else total
            signed = expected if (row + col) % 2 == 0 else -expected
            minor_max = max(minor_max, _rel_err(minor, signed))

    passed = det_err <= tolerance and minor_max <= tolerance
    return MatrixTreeReport(
        determinant=determinant,
        forest_weight=forest_weight,
        determinant_rel_err=det_err,
        minor_max_rel_err=minor_max,
        tolerance=tolerance,
        passed=passed,
    )


def effective_reactance(network: Network, line: int) -> ReactanceReport:
    """Two-terminal equivalent reactance across a line, via forest sums.

    The reduction ratio is the weighted share of spanning trees avoiding
    the line; it vanishes exactly when the line is a bridge, in which case
    the effective reactance equals the line reactance.
    """
    edge = network.edge_by_id(line)
    _, num, num_exact = _forest_sum(network, {edge.source}, {edge.target})
    _, _, _, den, den_exact = _tree_index(network, None)
    effective = _ratio(num, num_exact, den, den_exact)

    allowed = frozenset(e.id for e in network.edges if e.id != line)
    _, _, _, avoid, avoid_exact = _tree_index(network, allowed)
    ratio = _ratio(avoid, avoid_exact, den, den_exact)

    return ReactanceReport(
        effective=effective,
        line_reactance=1.0 / edge.susceptance,
        reduction_ratio=ratio,
    )
