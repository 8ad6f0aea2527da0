"""Rank-maximal matching solver for laminar classifications.

Iterates over ranks: add the surviving rank-k preference arcs, push a
max-flow on the evolved network, split the residual nodes by reachability,
then permanently delete every residual arc crossing back into the
source-reachable set and every higher-rank edge that could only degrade the
signature.  The reversed preference arcs of the final graph are the
matching.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import flownet
from .errors import InvalidInstanceError
from .model import Instance, Pair, Signature, signature_of, validate


@dataclass
class IterationRecord:
    """What one rank iteration did to the evolving network."""

    rank: int
    arcs_added: int
    flow_increase: int
    min_cut_ok: bool
    deleted_arcs: list[str]
    deleted_arc_kinds: list[str]
    pruned_edges: list[tuple[str, str, int]]
    matched_by_rank: tuple[int, ...]
    decomposition: flownet.Decomposition | None = field(repr=False, compare=False, default=None)


@dataclass
class CrmmTrace:
    iterations: list[IterationRecord]
    matching: list[Pair]
    signature: Signature

    def to_json_dict(self) -> dict:
        return {
            "iterations": [
                {
                    "rank": it.rank,
                    "arcs_added": it.arcs_added,
                    "flow_increase": it.flow_increase,
                    "min_cut_ok": it.min_cut_ok,
                    "deleted_arcs": it.deleted_arcs,
                    "pruned_edges": [list(e) for e in it.pruned_edges],
                    "matched_by_rank": list(it.matched_by_rank),
                }
                for it in self.iterations
            ],
            "matching": [list(p) for p in self.matching],
            "signature": list(self.signature),
        }


@dataclass
class CrmmResult:
    matching: frozenset[Pair]
    signature: Signature
    trace: CrmmTrace


def delete_cut_arcs(g: flownet.FlowGraph,
                    d: flownet.Decomposition) -> tuple[flownet.FlowGraph,
                                                       list[tuple[int, int, flownet.Arc]]]:
    """Remove every residual arc leaving the non-source side back into the
    source-reachable side; nothing else.  Mutates and returns ``g``."""
    src = d.from_source
    deleted = []
    for u, v, arc in list(g.arcs()):
        if u not in src and v in src:
            del g.out[u][v]
            deleted.append((u, v, arc))
    return g, deleted


def prune_higher_rank(g: flownet.FlowGraph, d: flownet.Decomposition,
                      pending: dict[int, list[Pair]], rank: int) -> list[tuple[str, str, int]]:
    """Drop not-yet-added edges of rank above ``rank`` whose applicant leaf
    left the source-reachable set or whose post leaf left the sink-reaching
    set; such edges cannot appear in any rank-maximal matching."""
    removed: list[tuple[str, str, int]] = []
    src, snk = d.from_source, d.to_sink
    for j in sorted(pending):
        if j <= rank:
            continue
        kept = []
        for a, p in pending[j]:
            if g.left_leaf[(a, p)] not in src or g.right_leaf[(a, p)] in src | d.neither:
                removed.append((a, p, j))
            else:
                kept.append((a, p))
        pending[j] = kept
    return removed


def solve_crmm(instance: Instance, neighbor_order: str = "ascending") -> CrmmResult:
    """Compute a feasible matching with the lexicographically greatest
    per-rank signature.

    Raises InvalidInstanceError on validation diagnostics and
    NonLaminarError when any vertex's classes are not laminar.  The matching
    itself is deterministic for a fixed ``neighbor_order``; only the
    signature is unique across valid implementations.
    """
    diags = validate(instance)
    if diags:
        raise InvalidInstanceError(diags)

    g = flownet.build_base_network(instance)
    pending: dict[int, list[Pair]] = {}
    for a, p, rank in instance.edges:
        pending.setdefault(rank, []).append((a, p))

    records: list[IterationRecord] = []
    for rank in range(1, instance.max_rank + 1):
        added = flownet.add_preference_arcs(
            g, [(a, p, rank) for a, p in pending.get(rank, [])])
        f = flownet.max_flow(g, neighbor_order=neighbor_order)
        res = flownet.residual(g, f)
        d = flownet.decompose(res)
        cut_ok = flownet.min_cut_check(g, f, d)
        _, deleted = delete_cut_arcs(res, d)
        deleted_labels = [res.arc_label(u, v) for u, v, _ in deleted]
        deleted_kinds = [arc.tag.kind for _, _, arc in deleted]
        pruned = prune_higher_rank(res, d, pending, rank)
        records.append(IterationRecord(
            rank=rank,
            arcs_added=added,
            flow_increase=f.value,
            min_cut_ok=cut_ok,
            deleted_arcs=deleted_labels,
            deleted_arc_kinds=deleted_kinds,
            pruned_edges=pruned,
            matched_by_rank=flownet.matched_counts_by_rank(res, instance.max_rank),
            decomposition=d,
        ))
        g = res

    matching = frozenset(flownet.extract_matching(g))
    signature = signature_of(instance, matching)
    trace = CrmmTrace(records, sorted(matching), signature)
    return CrmmResult(matching, signature, trace)
