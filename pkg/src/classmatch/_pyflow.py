"""Pure-Python max-flow kernel.

Shortest-augmenting-path (breadth-first) max-flow over a flat slot
representation: every ordered node pair with an arc owns a slot, and each
slot is paired with its reverse slot so augmentation just moves capacity
between siblings.  Neighbor exploration follows the pre-sorted adjacency
(ascending head node id), optionally reversed, which makes the computed flow
fully deterministic.

The compiled kernel in ``_fastflow.pyx`` implements the same contract; both
must produce bit-identical results.
"""

from __future__ import annotations

BACKEND = "python"


def run_max_flow(num_nodes, source, sink, slot_tail, slot_head, slot_cap,
                 slot_sibling, adj_start, adj_slots, reverse_order=False):
    """Maximize s-t flow; mutates ``slot_cap`` in place and returns the value.

    ``adj_start``/``adj_slots`` form a CSR adjacency over all slots (including
    zero-capacity ones, which may gain capacity during augmentation).
    """
    parent_slot = [-1] * num_nodes
    visited = [0] * num_nodes
    queue = [0] * num_nodes
    stamp = 0
    total = 0

    while True:
        stamp += 1
        visited[source] = stamp
        queue[0] = source
        head_i = 0
        tail_i = 1
        found = False
        while head_i < tail_i and not found:
            u = queue[head_i]
            head_i += 1
            lo = adj_start[u]
            hi = adj_start[u + 1]
            rng = range(hi - 1, lo - 1, -1) if reverse_order else range(lo, hi)
            for k in rng:
                slot = adj_slots[k]
                if slot_cap[slot] <= 0:
                    continue
                v = slot_head[slot]
                if visited[v] == stamp:
                    continue
                visited[v] = stamp
                parent_slot[v] = slot
                if v == sink:
                    found = True
                    break
                queue[tail_i] = v
                tail_i += 1
        if not found:
            return total

        delta = None
        v = sink
        while v != source:
            slot = parent_slot[v]
            cap = slot_cap[slot]
            if delta is None or cap < delta:
                delta = cap
            v = slot_tail[slot]
        v = sink
        while v != source:
            slot = parent_slot[v]
            slot_cap[slot] -= delta
            slot_cap[slot_sibling[slot]] += delta
            v = slot_tail[slot]
        total += delta
