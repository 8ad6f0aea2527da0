"""Classification flow networks and the flow-invariant node decomposition.

The network has a source, a sink, and one node per classification-tree class
of every vertex.  Applicant-tree arcs run parent-to-child, post-tree arcs
child-to-parent, and unit preference arcs connect an applicant's singleton
leaf to the matching post leaf.  Solvers evolve one graph across iterations:
after each max-flow the graph is replaced by its residual (so reversed
preference arcs encode the current matching) and selected arcs are deleted
for good.
"""

from __future__ import annotations

from array import array
from collections import deque
from dataclasses import dataclass

from . import kernel
from .errors import DuplicateArcError, FlowNotMaximalError
from .model import APPLICANT, Instance, Pair, build_tree, iter_instance_vertices

SOURCE = "source"
SINK = "sink"
CLASS = "class"

TREE_ARC = "tree"
SOURCE_ARC = "source"
SINK_ARC = "sink"
PREF_ARC = "pref"


@dataclass(frozen=True)
class ArcTag:
    """Arc provenance; preserved when flow reverses an arc's direction."""

    kind: str
    owner: str | None = None
    pair: Pair | None = None
    rank: int | None = None

    def __str__(self) -> str:
        if self.kind == PREF_ARC:
            a, p = self.pair
            return f"pref[{a}-{p} rank {self.rank}]"
        if self.kind == TREE_ARC:
            return f"tree[{self.owner}]"
        return self.kind


@dataclass(frozen=True)
class FlowNode:
    index: int
    kind: str
    label: str
    side: str | None = None
    owner: str | None = None
    members: frozenset[str] | None = None
    leaf_for: str | None = None


@dataclass
class Arc:
    cap: int
    tag: ArcTag


class FlowGraph:
    """Capacitated digraph with at most one arc per ordered node pair."""

    def __init__(self, nodes: list[FlowNode], source: int, sink: int,
                 left_leaf: dict[Pair, int], right_leaf: dict[Pair, int]):
        self.nodes = nodes
        self.source = source
        self.sink = sink
        self.left_leaf = left_leaf
        self.right_leaf = right_leaf
        self.out: dict[int, dict[int, Arc]] = {n.index: {} for n in nodes}

    def add_arc(self, tail: int, head: int, cap: int, tag: ArcTag) -> None:
        if head in self.out[tail]:
            raise DuplicateArcError(self.arc_label(tail, head))
        self.out[tail][head] = Arc(cap, tag)

    def has_arc_between(self, u: int, v: int) -> bool:
        return v in self.out[u] or u in self.out[v]

    def arcs(self):
        """All (tail, head, arc) triples in ascending (tail, head) order."""
        for tail in range(len(self.nodes)):
            adj = self.out[tail]
            for head in sorted(adj):
                yield tail, head, adj[head]

    def arc_count(self) -> int:
        return sum(len(adj) for adj in self.out.values())

    def arc_label(self, tail: int, head: int) -> str:
        return f"{self.nodes[tail].label} -> {self.nodes[head].label}"

    def copy(self) -> "FlowGraph":
        g = FlowGraph(self.nodes, self.source, self.sink, self.left_leaf, self.right_leaf)
        for tail, adj in self.out.items():
            g.out[tail] = {head: Arc(arc.cap, arc.tag) for head, arc in adj.items()}
        return g


@dataclass(frozen=True)
class FlowAssignment:
    """Integral flow on a graph: positive per-arc amounts plus the value."""

    flows: dict[Pair, int] | dict[tuple[int, int], int]
    value: int


@dataclass(frozen=True)
class Decomposition:
    """Partition of residual-graph nodes: reachable from the source, able to
    reach the sink, and neither.  Invariant across max-flows."""

    from_source: frozenset[int]
    to_sink: frozenset[int]
    neither: frozenset[int]


# ---------------------------------------------------------------------------
# Construction


def build_base_network(instance: Instance) -> FlowGraph:
    """Build the arc-less-between-sides base network from all classification
    trees: source feeds applicant roots, post roots feed the sink, tree arcs
    carry the child's quota.  Its max-flow is zero until preference arcs are
    added.  Raises NonLaminarError via tree construction.
    """
    nodes: list[FlowNode] = [FlowNode(0, SOURCE, "s")]
    left_leaf: dict[Pair, int] = {}
    right_leaf: dict[Pair, int] = {}
    arcs: list[tuple[int, int, int, ArcTag]] = []

    for owner, side in iter_instance_vertices(instance):
        tree = build_tree(instance, owner, side)
        base = len(nodes)
        internal_seen = 0
        for i, tn in enumerate(tree.nodes):
            if i == 0:
                label = f"{owner}/*"
            elif tn.leaf_for is not None:
                label = f"{owner}/{tn.leaf_for}"
            else:
                internal_seen += 1
                label = f"{owner}/c{internal_seen}"
            idx = base + i
            nodes.append(FlowNode(idx, CLASS, label, side, owner, tn.members, tn.leaf_for))
            if tn.leaf_for is not None:
                leaf_map = left_leaf if side == APPLICANT else right_leaf
                key = (owner, tn.leaf_for) if side == APPLICANT else (tn.leaf_for, owner)
                leaf_map[key] = idx
            if tn.parent is not None:
                parent_idx = base + tn.parent
                tag = ArcTag(TREE_ARC, owner=owner)
                if side == APPLICANT:
                    arcs.append((parent_idx, idx, tn.quota, tag))
                else:
                    arcs.append((idx, parent_idx, tn.quota, tag))
        root_idx = base
        if side == APPLICANT:
            arcs.append((0, root_idx, tree.root.quota, ArcTag(SOURCE_ARC, owner=owner)))
        else:
            arcs.append((root_idx, -1, tree.root.quota, ArcTag(SINK_ARC, owner=owner)))

    sink = len(nodes)
    nodes.append(FlowNode(sink, SINK, "t"))
    g = FlowGraph(nodes, 0, sink, left_leaf, right_leaf)
    for tail, head, cap, tag in arcs:
        g.add_arc(tail, sink if head == -1 else head, cap, tag)
    return g


def add_preference_arcs(g: FlowGraph, edges, skip_existing: bool = False) -> int:
    """Add a unit arc from the applicant leaf to the post leaf per
    (applicant, post, rank) edge; returns the number of arcs added.

    Raises DuplicateArcError when the leaf pair already has an arc in either
    direction, unless ``skip_existing`` (used when the arc set is a union).
    """
    added = 0
    for a, p, rank in edges:
        u = g.left_leaf[(a, p)]
        v = g.right_leaf[(a, p)]
        if g.has_arc_between(u, v):
            if skip_existing:
                continue
            raise DuplicateArcError(g.arc_label(u, v))
        g.add_arc(u, v, 1, ArcTag(PREF_ARC, pair=(a, p), rank=rank))
        added += 1
    return added


# ---------------------------------------------------------------------------
# Max-flow


def max_flow(g: FlowGraph, neighbor_order: str = "ascending") -> FlowAssignment:
    """Deterministic integral max-flow of the graph as it stands.

    Augmenting paths are shortest-first; neighbors are explored in ascending
    node-creation order (``neighbor_order="descending"`` reverses it, which
    by flow-invariance of the decomposition must not change any downstream
    deletion decision).  The graph is not mutated.
    """
    if neighbor_order not in ("ascending", "descending"):
        raise ValueError(f"bad neighbor_order {neighbor_order!r}")

    n = len(g.nodes)
    slot_of: dict[tuple[int, int], int] = {}
    slot_tail: list[int] = []
    slot_head: list[int] = []
    caps: list[int] = []

    def new_slot(u: int, v: int, cap: int) -> int:
        idx = len(slot_tail)
        slot_of[(u, v)] = idx
        slot_tail.append(u)
        slot_head.append(v)
        caps.append(cap)
        return idx

    original: list[tuple[int, int, int]] = []
    for u, v, arc in g.arcs():
        new_slot(u, v, arc.cap)
        original.append((u, v, arc.cap))
    for (u, v) in list(slot_of):
        if (v, u) not in slot_of:
            new_slot(v, u, 0)
    sibling = [slot_of[(slot_head[i], slot_tail[i])] for i in range(len(slot_tail))]

    order = sorted(range(len(slot_tail)), key=lambda i: (slot_tail[i], slot_head[i]))
    adj_start = [0] * (n + 1)
    for i in order:
        adj_start[slot_tail[i] + 1] += 1
    for u in range(n):
        adj_start[u + 1] += adj_start[u]
    adj_slots = order  # already grouped by tail, ascending head within a tail

    cap_arr = array("q", caps)
    value = kernel.run_max_flow(
        n, g.source, g.sink,
        array("q", slot_tail), array("q", slot_head), cap_arr,
        array("q", sibling), array("q", adj_start), array("q", adj_slots),
        neighbor_order == "descending",
    )

    flows: dict[tuple[int, int], int] = {}
    for u, v, cap0 in original:
        used = cap0 - cap_arr[slot_of[(u, v)]]
        if used > 0:
            flows[(u, v)] = used
    return FlowAssignment(flows, value)


def residual(g: FlowGraph, f: FlowAssignment) -> FlowGraph:
    """The residual graph: leftover capacities forward, flow as reverse
    capacity, zero-capacity arcs dropped, provenance preserved."""
    r = FlowGraph(g.nodes, g.source, g.sink, g.left_leaf, g.right_leaf)
    for u, v, arc in g.arcs():
        used = f.flows.get((u, v), 0)
        if used > arc.cap:
            raise ValueError(f"flow exceeds capacity on {g.arc_label(u, v)}")
        left = arc.cap - used
        if left > 0:
            _merge_arc(r, u, v, left, arc.tag)
        if used > 0:
            _merge_arc(r, v, u, used, arc.tag)
    return r


def _merge_arc(g: FlowGraph, u: int, v: int, cap: int, tag: ArcTag) -> None:
    existing = g.out[u].get(v)
    if existing is None:
        g.add_arc(u, v, cap, tag)
    else:
        existing.cap += cap


# ---------------------------------------------------------------------------
# Decomposition and checks


def decompose(g: FlowGraph) -> Decomposition:
    """Split residual-graph nodes by reachability.

    Raises FlowNotMaximalError when the sink is reachable from the source,
    which means the graph is not the residual of a maximum flow.
    """
    fwd = _reach_forward(g)
    if g.sink in fwd:
        raise FlowNotMaximalError("source still reaches sink")
    bwd = _reach_backward(g)
    rest = frozenset(range(len(g.nodes))) - fwd - bwd
    return Decomposition(frozenset(fwd), frozenset(bwd), rest)


def _reach_forward(g: FlowGraph) -> set[int]:
    seen = {g.source}
    dq = deque([g.source])
    while dq:
        u = dq.popleft()
        for v in g.out[u]:
            if v not in seen:
                seen.add(v)
                dq.append(v)
    return seen


def _reach_backward(g: FlowGraph) -> set[int]:
    incoming: dict[int, list[int]] = {n.index: [] for n in g.nodes}
    for u, adj in g.out.items():
        for v in adj:
            incoming[v].append(u)
    seen = {g.sink}
    dq = deque([g.sink])
    while dq:
        v = dq.popleft()
        for u in incoming[v]:
            if u not in seen:
                seen.add(u)
                dq.append(u)
    return seen


def min_cut_check(g: FlowGraph, f: FlowAssignment, d: Decomposition) -> bool:
    """Debug assertion: across the source-side cut every outgoing arc of the
    pre-residual graph is saturated and every incoming arc carries no flow."""
    src = d.from_source
    for u, v, arc in g.arcs():
        used = f.flows.get((u, v), 0)
        if u in src and v not in src and used != arc.cap:
            return False
        if u not in src and v in src and used != 0:
            return False
    return True


def extract_matching(g: FlowGraph) -> set[Pair]:
    """Pairs whose preference arc is currently reversed (post leaf to
    applicant leaf), i.e. the matching carried by the evolved graph."""
    matched: set[Pair] = set()
    for u, adj in g.out.items():
        for v, arc in adj.items():
            if arc.tag.kind == PREF_ARC and u == g.right_leaf[arc.tag.pair]:
                matched.add(arc.tag.pair)
    return matched


def matched_counts_by_rank(g: FlowGraph, max_rank: int) -> tuple[int, ...]:
    """Number of reversed preference arcs per rank, padded to ``max_rank``."""
    counts = [0] * max_rank
    for u, adj in g.out.items():
        for v, arc in adj.items():
            if arc.tag.kind == PREF_ARC and u == g.right_leaf[arc.tag.pair]:
                counts[arc.tag.rank - 1] += 1
    return tuple(counts)


def dump_arcs(g: FlowGraph, f: FlowAssignment | None = None) -> str:
    """Readable arc list for golden-file tests and debugging."""
    lines = []
    for u, v, arc in g.arcs():
        used = f.flows.get((u, v), 0) if f else 0
        lines.append(f"{g.nodes[u].label} -> {g.nodes[v].label} "
                     f"cap={arc.cap} flow={used} tag={arc.tag}")
    return "\n".join(lines) + "\n"
