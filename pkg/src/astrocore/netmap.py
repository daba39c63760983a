"""Partitioning of spiking models onto fixed-capacity neuromorphic cores.

A model is split into clusters sized for one core each. The heuristic works
back from the outputs: neurons within a small hop distance of the current
sink frontier are greedily packed into a cluster under the core's neuron and
synapse capacities, the cluster is removed, distances are recomputed, and
the process repeats until every neuron is clustered.

Synapse accounting is by in-edges: a synapse occupies a slot in the cluster
that contains its postsynaptic neuron, so every edge is counted exactly once
across the mapping.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping as TMapping

import numpy as np

from .presets import CROSSBAR_GEOMETRY, UBRAIN_GEOMETRY
from .snn import ModelGraph

__all__ = [
    "CoreSpec",
    "NetGraph",
    "Cluster",
    "Mapping",
    "graph_view",
    "distance_labels",
    "partition",
    "cluster_count_estimate",
    "validate",
]


@dataclass(frozen=True)
class CoreSpec:
    """Capacity model of one neuromorphic core."""

    kind: str                       # "crossbar" | "ubrain" | "custom"
    layer_sizes: tuple[int, ...]
    neuron_capacity: int
    synapse_capacity: int
    max_astrocytes: int

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if any(s <= 0 for s in sizes):
            raise ValueError("layer sizes must be positive")
        if self.kind == "crossbar":
            if len(sizes) != 2 or sizes[0] != sizes[1]:
                raise ValueError("crossbar needs two equal layer sizes")
            n = sizes[0]
            if self.synapse_capacity != n * n:
                raise ValueError("crossbar synapse capacity must be N^2")
            if self.neuron_capacity != 2 * n:
                raise ValueError("crossbar neuron capacity must be 2N")
        elif self.kind == "ubrain":
            if len(sizes) != 3:
                raise ValueError("ubrain needs three layer sizes")
            n, m, p = sizes
            if self.synapse_capacity != n * m + m * p:
                raise ValueError("ubrain synapse capacity must be N*M + M*P")
            if self.neuron_capacity != n + m + p:
                raise ValueError("ubrain neuron capacity must be N+M+P")
        elif self.kind != "custom":
            # "custom" cores carry free-form capacities (used for small
            # hand-checkable examples); the named kinds must satisfy their
            # geometric identities.
            raise ValueError(f"unknown core kind {self.kind!r}")
        if self.neuron_capacity <= 0 or self.synapse_capacity <= 0:
            raise ValueError("capacities must be positive")
        if self.max_astrocytes < 0:
            raise ValueError("max_astrocytes must be nonnegative")

    @property
    def cluster_distance(self) -> int:
        """Hop-distance bound used when forming clusters (layers - 1)."""
        return len(self.layer_sizes) - 1

    @classmethod
    def crossbar(cls, n: int = CROSSBAR_GEOMETRY.layer_sizes[0],
                 max_astrocytes: int = CROSSBAR_GEOMETRY.max_astrocytes) -> "CoreSpec":
        return cls("crossbar", (n, n), 2 * n, n * n, max_astrocytes)

    @classmethod
    def ubrain(cls, layer_sizes: tuple[int, int, int] = UBRAIN_GEOMETRY.layer_sizes,
               max_astrocytes: int = UBRAIN_GEOMETRY.max_astrocytes) -> "CoreSpec":
        n, m, p = layer_sizes
        return cls("ubrain", (n, m, p), n + m + p, n * m + m * p,
                   max_astrocytes)


@dataclass(frozen=True)
class NetGraph:
    """Directed spiking graph: neurons 0..n-1, edges pre->post, sink outputs."""

    n_neurons: int
    edges: tuple[tuple[int, int], ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        for pre, post in self.edges:
            if not (0 <= pre < self.n_neurons and 0 <= post < self.n_neurons):
                raise ValueError("edge endpoint out of range")
            if pre == post:
                raise ValueError("self-loops are not allowed")
        if not self.outputs:
            raise ValueError("need at least one output neuron")
        if len(set(self.outputs)) != len(self.outputs):
            raise ValueError("duplicate outputs")
        for o in self.outputs:
            if not 0 <= o < self.n_neurons:
                raise ValueError("output id out of range")


def graph_view(model: ModelGraph) -> NetGraph:
    """Project a layered model onto the partitioning graph.

    Zero weight codes mean no physical synapse; the model's last layer forms
    the output set.
    """
    edges: list[tuple[int, int]] = []
    for l, block in enumerate(model.codes):
        pre_off = model.layer_offset(l)
        post_off = model.layer_offset(l + 1)
        pres, posts = np.nonzero(block)
        edges.extend((pre_off + int(i), post_off + int(j))
                     for i, j in zip(pres, posts))
    out_off = model.layer_offset(model.n_layers - 1)
    outputs = tuple(range(out_off, out_off + model.n_outputs))
    return NetGraph(model.n_neurons, tuple(edges), outputs)


def _as_graph(graph: NetGraph | ModelGraph) -> NetGraph:
    return graph if isinstance(graph, NetGraph) else graph_view(graph)


def _bfs_upstream(sources: Iterable[int],
                  rev_adj: TMapping[int, list[int]]) -> dict[int, int]:
    dist = {s: 0 for s in sources}
    queue = deque(dist)
    while queue:
        v = queue.popleft()
        for u in rev_adj.get(v, ()):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def distance_labels(graph: NetGraph | ModelGraph) -> dict[int, int]:
    """Hop distance from each neuron to its nearest output neuron.

    Outputs get 0; a neuron that cannot reach any output is a modeling error
    and is reported by id.
    """
    g = _as_graph(graph)
    rev: dict[int, list[int]] = {}
    for pre, post in g.edges:
        rev.setdefault(post, []).append(pre)
    dist = _bfs_upstream(g.outputs, rev)
    missing = [n for n in range(g.n_neurons) if n not in dist]
    if missing:
        raise ValueError(f"neurons cannot reach any output: {missing}")
    return dist


@dataclass(frozen=True)
class Cluster:
    """One core's worth of neurons with their distance-band layers."""

    neurons: tuple[int, ...]
    synapse_count: int
    layers: tuple[tuple[int, ...], ...]   # farthest band first, sinks last

    def __post_init__(self) -> None:
        banded = [n for band in self.layers for n in band]
        if sorted(banded) != sorted(self.neurons):
            raise ValueError("layers must exactly cover the cluster")
        if len(set(self.neurons)) != len(self.neurons):
            raise ValueError("duplicate neuron in cluster")


@dataclass(frozen=True)
class Mapping:
    """Ordered clusters plus the edges that cross between them."""

    clusters: tuple[Cluster, ...]
    cross_edges: tuple[tuple[int, int], ...]
    core_kind: str

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def cluster_of(self, neuron: int) -> int:
        for k, c in enumerate(self.clusters):
            if neuron in c.neurons:
                return k
        raise KeyError(neuron)

    def to_json(self) -> str:
        doc = {
            "core_kind": self.core_kind,
            "clusters": [
                {"neurons": list(c.neurons),
                 "synapse_count": c.synapse_count,
                 "layers": [list(b) for b in c.layers]}
                for c in self.clusters
            ],
            "cross_edges": [list(e) for e in self.cross_edges],
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Mapping":
        doc = json.loads(text)
        clusters = tuple(
            Cluster(tuple(c["neurons"]), c["synapse_count"],
                    tuple(tuple(b) for b in c["layers"]))
            for c in doc["clusters"])
        return cls(clusters, tuple(tuple(e) for e in doc["cross_edges"]),
                   doc["core_kind"])


def cluster_count_estimate(param_count: int, core: CoreSpec) -> int:
    """Lower-bound cluster count: ceil(parameters / synapse capacity)."""
    if param_count < 0:
        raise ValueError("param_count must be nonnegative")
    return math.ceil(param_count / core.synapse_capacity)


def _frontier_distances(remaining: set[int],
                        edges: tuple[tuple[int, int], ...]) -> dict[int, int]:
    """Distances to the current sinks within the remaining subgraph."""
    out_deg = {n: 0 for n in remaining}
    rev: dict[int, list[int]] = {}
    for pre, post in edges:
        if pre in remaining and post in remaining:
            out_deg[pre] += 1
            rev.setdefault(post, []).append(pre)
    sinks = [n for n, d in out_deg.items() if d == 0]
    if not sinks:
        raise ValueError("remaining neurons form a cycle; graph must be "
                         "feed-forward")
    dist = _bfs_upstream(sinks, rev)
    stranded = [n for n in remaining if n not in dist]
    if stranded:
        raise ValueError(f"neurons cannot reach a sink: {stranded}")
    return dist


def partition(graph: NetGraph | ModelGraph, core: CoreSpec) -> Mapping:
    """Greedily pack neurons into capacity-feasible clusters.

    Each round recomputes hop distances to the current sink frontier, takes
    the neurons within the core's distance bound in (distance, id) order,
    and first-fit packs them until the core is full. Packed neurons are
    removed and the process repeats.
    """
    g = _as_graph(graph)
    in_deg = np.zeros(g.n_neurons, dtype=int)
    for _, post in g.edges:
        in_deg[post] += 1
    over = [n for n in range(g.n_neurons)
            if in_deg[n] > core.synapse_capacity]
    if over:
        raise ValueError(
            f"fan-in exceeds synapse capacity {core.synapse_capacity} for "
            f"neurons {over}; model cannot map to this core")

    remaining = set(range(g.n_neurons))
    clusters: list[Cluster] = []
    max_d = core.cluster_distance
    while remaining:
        dist = _frontier_distances(remaining, g.edges)
        candidates = sorted((n for n in remaining if dist[n] <= max_d),
                            key=lambda n: (dist[n], n))
        chosen: list[int] = []
        syn = 0
        for n in candidates:
            if len(chosen) + 1 > core.neuron_capacity:
                break
            if syn + in_deg[n] > core.synapse_capacity:
                continue
            chosen.append(n)
            syn += int(in_deg[n])
        if not chosen:
            raise ValueError("no neuron fits an empty core; capacities too "
                             "small for this graph")
        bands = tuple(
            tuple(sorted(n for n in chosen if dist[n] == d))
            for d in range(max_d, -1, -1))
        clusters.append(Cluster(tuple(sorted(chosen)), syn, bands))
        remaining -= set(chosen)

    member_of: dict[int, int] = {}
    for k, c in enumerate(clusters):
        for n in c.neurons:
            member_of[n] = k
    cross = tuple((pre, post) for pre, post in g.edges
                  if member_of[pre] != member_of[post])
    return Mapping(tuple(clusters), cross, core.kind)


def validate(mapping: Mapping, core: CoreSpec) -> list[str]:
    """Check mapping invariants; returns one message per violation."""
    problems: list[str] = []
    seen: dict[int, int] = {}
    for k, c in enumerate(mapping.clusters):
        if len(c.neurons) > core.neuron_capacity:
            problems.append(
                f"cluster {k}: {len(c.neurons)} neurons exceed capacity "
                f"{core.neuron_capacity}")
        if c.synapse_count > core.synapse_capacity:
            problems.append(
                f"cluster {k}: {c.synapse_count} synapses exceed capacity "
                f"{core.synapse_capacity}")
        if len(c.layers) != len(core.layer_sizes):
            problems.append(
                f"cluster {k}: {len(c.layers)} layer bands, core has "
                f"{len(core.layer_sizes)}")
        for n in c.neurons:
            if n in seen:
                problems.append(
                    f"neuron {n} appears in clusters {seen[n]} and {k}")
            seen[n] = k
    return problems
