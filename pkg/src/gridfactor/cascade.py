"""Stage-wise cascading-failure simulation and influence-graph export.

Stage 0 removes the initial outage and re-solves the DC flow.  Each later
stage trips, simultaneously, every line whose flow magnitude strictly
exceeds its capacity in the previous stage's solution, then re-solves.
Flows exactly at capacity survive.  The simulation halts when nothing
overloads, or when the cumulative outage disconnects the grid; islanding
is reported at the stage whose re-solve would have run on the split grid,
and rebalancing of islands is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dcpf import FlowState, build_laplacian, solve_flow
from .errors import MaxStagesError, UnknownEdgeError, ValidationError
from .factors import PtdfMatrix
from .graph_algos import BlockDecomposition, is_cut_set
from .net_model import Network, injection_vector

__all__ = ["Stage", "CascadeTrace", "run_cascade", "influence_graph"]


@dataclass(frozen=True, eq=False)
class Stage:
    """One cascade stage: the lines tripped entering it and the re-solved flow.

    ``flow`` is None when the surviving grid is disconnected, so no DC
    solution exists.  Flow vectors keep full length with zeros at tripped
    lines; angles cover all nodes of the surviving grid.
    """

    tripped: frozenset[int]
    flow: FlowState | None


@dataclass(frozen=True, eq=False)
class CascadeTrace:
    """Ordered cascade stages with the termination status.

    ``status`` is ``converged`` when at least one propagation stage ran and
    the flows then settled, ``no_initial_overload`` when the initial outage
    alone overloads nothing, and ``islanded`` when the cumulative outage
    became a cut set; ``islanded_at_stage`` gives the stage index at which
    the islanding was detected.
    """

    stages: tuple[Stage, ...]
    status: str
    initial_outage: frozenset[int]
    islanded_at_stage: int | None = None

    def tripped_by_stage(self) -> tuple[frozenset[int], ...]:
        return tuple(stage.tripped for stage in self.stages)

    def cumulative_outage(self) -> frozenset[int]:
        out: set[int] = set()
        for stage in self.stages:
            out |= stage.tripped
        return frozenset(out)


def _embedded_flow(network: Network, surviving: Network, state: FlowState) -> FlowState:
    flows = np.zeros(network.m)
    for k, edge in enumerate(surviving.edges):
        flows[network.edge_index(edge.id)] = state.flows[k]
    return FlowState(theta=state.theta, flows=flows)


def run_cascade(
    network: Network,
    p,
    initial_outage,
    max_stages: int | None = None,
) -> CascadeTrace:
    """Simulate a cascade from an initial set of tripped lines.

    ``max_stages`` bounds the number of recorded stages (default: the line
    count, which the cascade can never exceed since every stage trips at
    least one line).  Exceeding it raises MaxStagesError carrying the
    stages simulated so far.
    """
    p = injection_vector(network, p)
    initial = frozenset(int(v) for v in initial_outage)
    if not initial:
        raise ValidationError("initial outage must be nonempty")
    known = {edge.id for edge in network.edges}
    unknown = initial - known
    if unknown:
        raise UnknownEdgeError(f"unknown edge ids {sorted(unknown)}")
    if max_stages is None:
        max_stages = network.m

    capacities = {edge.id: edge.capacity for edge in network.edges}
    cumulative = set(initial)

    if is_cut_set(network, cumulative):
        return CascadeTrace(
            stages=(Stage(tripped=initial, flow=None),),
            status="islanded",
            initial_outage=initial,
            islanded_at_stage=0,
        )

    surviving = network.without_edges(cumulative)
    state = _embedded_flow(network, surviving, solve_flow(build_laplacian(surviving), surviving, p))
    stages = [Stage(tripped=initial, flow=state)]

    while True:
        overloaded = frozenset(
            edge.id
            for edge in surviving.edges
            if abs(state.flows[network.edge_index(edge.id)]) > capacities[edge.id]
        )
        if not overloaded:
            status = "no_initial_overload" if len(stages) == 1 else "converged"
            return CascadeTrace(
                stages=tuple(stages),
                status=status,
                initial_outage=initial,
            )

        if len(stages) >= max_stages:
            raise MaxStagesError(
                f"cascade still propagating after {len(stages)} stages", stages=stages
            )

        cumulative |= overloaded
        if is_cut_set(network, cumulative):
            stages.append(Stage(tripped=overloaded, flow=None))
            return CascadeTrace(
                stages=tuple(stages),
                status="islanded",
                initial_outage=initial,
                islanded_at_stage=len(stages),
            )

        surviving = network.without_edges(cumulative)
        state = _embedded_flow(
            network, surviving, solve_flow(build_laplacian(surviving), surviving, p)
        )
        stages.append(Stage(tripped=overloaded, flow=state))


def influence_graph(
    ptdf: PtdfMatrix,
    decomposition: BlockDecomposition,
    threshold: float,
) -> tuple[tuple[int, int], ...]:
    """Unordered line pairs whose outage factor magnitude reaches the threshold.

    Pairs are drawn only from within non-bridge blocks, where the factors
    are defined in both directions; a pair qualifies when either direction
    reaches the threshold.  Cross-block factors are exactly zero, so the
    result can never join two blocks.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    diag = np.diag(ptdf.matrix)
    pairs = []
    for members in decomposition.blocks:
        if len(members) < 2:
            continue
        ordered = sorted(members)
        for a_pos, a in enumerate(ordered):
            ia = ptdf.index(a)
            for b in ordered[a_pos + 1:]:
                ib = ptdf.index(b)
                k_b_after_a = ptdf.matrix[ib, ia] / (1.0 - diag[ia])
                k_a_after_b = ptdf.matrix[ia, ib] / (1.0 - diag[ib])
                if abs(k_b_after_a) >= threshold or abs(k_a_after_b) >= threshold:
                    pairs.append((a, b))
    return tuple(sorted(pairs))
