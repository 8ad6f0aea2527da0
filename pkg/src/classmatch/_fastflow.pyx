# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled max-flow kernel; mirrors ``_pyflow.run_max_flow`` exactly.

Same slot/sibling representation, same breadth-first shortest-path rule and
neighbor order, so the two backends are interchangeable bit for bit.
"""

from cpython cimport array
import array

BACKEND = "cython"

_LL = array.array("q", [])


def run_max_flow(int num_nodes, int source, int sink, slot_tail, slot_head,
                 slot_cap, slot_sibling, adj_start, adj_slots,
                 bint reverse_order=False):
    """Maximize s-t flow; mutates ``slot_cap`` in place and returns the value."""
    cdef array.array tail_a = array.array("q", slot_tail)
    cdef array.array head_a = array.array("q", slot_head)
    cdef array.array sib_a = array.array("q", slot_sibling)
    cdef array.array start_a = array.array("q", adj_start)
    cdef array.array slots_a = array.array("q", adj_slots)
    cdef array.array cap_a
    cdef bint copy_back = not isinstance(slot_cap, array.array)
    if copy_back:
        cap_a = array.array("q", slot_cap)
    else:
        cap_a = <array.array>slot_cap

    cdef long long[::1] tail = tail_a
    cdef long long[::1] head = head_a
    cdef long long[::1] cap = cap_a
    cdef long long[::1] sib = sib_a
    cdef long long[::1] start = start_a
    cdef long long[::1] slots = slots_a

    cdef array.array parent_a = array.clone(_LL, num_nodes, zero=False)
    cdef array.array visited_a = array.clone(_LL, num_nodes, zero=True)
    cdef array.array queue_a = array.clone(_LL, num_nodes, zero=False)
    cdef long long[::1] parent_slot = parent_a
    cdef long long[::1] visited = visited_a
    cdef long long[::1] queue = queue_a

    cdef long long stamp = 0
    cdef long long total = 0
    cdef long long delta, capk
    cdef long long u, v, slot
    cdef Py_ssize_t head_i, tail_i, k, lo, hi
    cdef bint found

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
            lo = start[u]
            hi = start[u + 1]
            if reverse_order:
                k = hi - 1
                while k >= lo:
                    slot = slots[k]
                    k -= 1
                    if cap[slot] <= 0:
                        continue
                    v = head[slot]
                    if visited[v] == stamp:
                        continue
                    visited[v] = stamp
                    parent_slot[v] = slot
                    if v == sink:
                        found = True
                        break
                    queue[tail_i] = v
                    tail_i += 1
            else:
                k = lo
                while k < hi:
                    slot = slots[k]
                    k += 1
                    if cap[slot] <= 0:
                        continue
                    v = head[slot]
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
            break

        delta = -1
        v = sink
        while v != source:
            slot = parent_slot[v]
            capk = cap[slot]
            if delta < 0 or capk < delta:
                delta = capk
            v = tail[slot]
        v = sink
        while v != source:
            slot = parent_slot[v]
            cap[slot] -= delta
            cap[sib[slot]] += delta
            v = tail[slot]
        total += delta

    if copy_back:
        for k in range(len(slot_cap)):
            slot_cap[k] = cap_a[k]
    return total
