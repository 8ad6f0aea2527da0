"""Exponential-time ground truth for small instances.

Everything here works by enumeration with quota pruning and is deliberately
independent of the flow-network solvers: feasibility is rechecked against
the raw quotas (laminar or not), popularity by counting votes between
explicitly enumerated matchings.  These answers anchor the equivalence
tests for the polynomial solvers and the hardness round-trips.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .errors import NotManyToOneError, TooLargeError
from .model import (
    Instance,
    Pair,
    Signature,
    UNMATCHED_RANK,
    compare_signatures,
    pad_signatures,
)

DEFAULT_CAP = 16


class _QuotaCounter:
    """Incremental feasibility bookkeeping over the instance's edge list."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.edges = list(instance.edges)
        quotas: list[int] = []
        index: dict = {}
        for a, q in instance.applicant_quotas.items():
            index[("a", a)] = len(quotas)
            quotas.append(q)
        for p, q in instance.post_quotas.items():
            index[("p", p)] = len(quotas)
            quotas.append(q)
        for ci, c in enumerate(instance.classes):
            index[("c", ci)] = len(quotas)
            quotas.append(c.quota)
        self.quotas = quotas
        self.counts = [0] * len(quotas)
        self.hits: list[list[int]] = []
        for a, p, _rank in self.edges:
            ids = [index[("a", a)], index[("p", p)]]
            for ci, c in enumerate(instance.classes):
                if c.side == "applicant" and c.owner == a and p in c.members:
                    ids.append(index[("c", ci)])
                elif c.side == "post" and c.owner == p and a in c.members:
                    ids.append(index[("c", ci)])
            self.hits.append(ids)

    def can_add(self, i: int) -> bool:
        return all(self.counts[c] < self.quotas[c] for c in self.hits[i])

    def add(self, i: int) -> None:
        for c in self.hits[i]:
            self.counts[c] += 1

    def remove(self, i: int) -> None:
        for c in self.hits[i]:
            self.counts[c] -= 1


def _check_cap(instance: Instance, cap: int) -> None:
    if len(instance.edges) > cap:
        raise TooLargeError(
            f"{len(instance.edges)} edges exceeds the brute-force cap {cap}")


def enumerate_feasible(instance: Instance, cap: int = DEFAULT_CAP) -> Iterator[frozenset[Pair]]:
    """Yield every feasible matching (edge subset) exactly once.

    Depth-first subset search; a violated quota prunes the whole branch,
    which is exact because feasibility is downward closed.
    """
    _check_cap(instance, cap)
    counter = _QuotaCounter(instance)
    chosen: list[Pair] = []

    def rec(i: int) -> Iterator[frozenset[Pair]]:
        if i == len(counter.edges):
            yield frozenset(chosen)
            return
        yield from rec(i + 1)
        if counter.can_add(i):
            counter.add(i)
            a, p, _ = counter.edges[i]
            chosen.append((a, p))
            yield from rec(i + 1)
            chosen.pop()
            counter.remove(i)

    yield from rec(0)


def oracle_rmm_signature(instance: Instance,
                         cap: int = DEFAULT_CAP) -> tuple[Signature, frozenset[Pair]]:
    """The lexicographically greatest signature over all feasible matchings,
    with one witness."""
    from .model import signature_of

    best: Signature | None = None
    witness: frozenset[Pair] = frozenset()
    for m in enumerate_feasible(instance, cap):
        sig = signature_of(instance, m)
        if best is None or compare_signatures(sig, best) > 0:
            best, witness = sig, m
    assert best is not None  # the empty matching is always feasible
    return best, witness


def oracle_decision(instance: Instance, target: Signature, cap: int = DEFAULT_CAP) -> bool:
    """Is there a feasible matching whose signature is at least ``target``?

    Prunes branches whose component-wise best completion already falls
    lexicographically short of the target.
    """
    _check_cap(instance, cap)
    counter = _QuotaCounter(instance)
    r = max(instance.max_rank, len(target))
    want, _ = pad_signatures(target, [0] * r)
    suffix = [[0] * r for _ in range(len(counter.edges) + 1)]
    for i in range(len(counter.edges) - 1, -1, -1):
        suffix[i] = list(suffix[i + 1])
        suffix[i][counter.edges[i][2] - 1] += 1
    current = [0] * r

    def reached() -> bool:
        return compare_signatures(current, want) >= 0

    def rec(i: int) -> bool:
        if reached():
            return True
        ub = [c + s for c, s in zip(current, suffix[i])]
        if compare_signatures(ub, want) < 0:
            return False
        if i == len(counter.edges):
            return False
        if counter.can_add(i):
            counter.add(i)
            current[counter.edges[i][2] - 1] += 1
            if rec(i + 1):
                return True
            current[counter.edges[i][2] - 1] -= 1
            counter.remove(i)
        return rec(i + 1)

    return rec(0)


def oracle_max_cardinality(instance: Instance, cap: int = DEFAULT_CAP) -> int:
    """Largest feasible matching size, by pruned exhaustive search."""
    _check_cap(instance, cap)
    counter = _QuotaCounter(instance)
    n_edges = len(counter.edges)
    global_ub = min(sum(instance.applicant_quotas.values()),
                    sum(instance.post_quotas.values()), n_edges)
    best = 0

    def rec(i: int, size: int) -> None:
        nonlocal best
        if size > best:
            best = size
        if best == global_ub or i == n_edges or size + (n_edges - i) <= best:
            return
        if counter.can_add(i):
            counter.add(i)
            rec(i + 1, size + 1)
            counter.remove(i)
            if best == global_ub:
                return
        rec(i + 1, size)

    rec(0, 0)
    return best


# ---------------------------------------------------------------------------
# Popularity (many-to-one only)


def _require_many_to_one(instance: Instance) -> None:
    if not instance.is_many_to_one():
        raise NotManyToOneError("popularity oracle needs applicant quotas of 1")


def _maximal_matchings(instance: Instance, cap: int) -> list[dict[str, str]]:
    """All set-inclusion-maximal feasible matchings, as applicant->post maps.

    Restricting popularity checks to maximal matchings is lossless: adding
    any edge to a feasible matching wins the gaining applicant's vote and
    changes nobody else's, so a non-maximal matching is beaten by each of
    its feasible extensions and can neither be popular nor be a necessary
    witness against another matching.
    """
    _check_cap(instance, cap)
    counter = _QuotaCounter(instance)
    applicants = list(instance.applicant_quotas)
    by_applicant: dict[str, list[int]] = {a: [] for a in applicants}
    for i, (a, _p, _rank) in enumerate(counter.edges):
        by_applicant[a].append(i)
    out: list[dict[str, str]] = []
    assignment: dict[str, str] = {}

    def rec(ai: int) -> None:
        if ai == len(applicants):
            for a in applicants:
                if a not in assignment and any(counter.can_add(i) for i in by_applicant[a]):
                    return
            out.append(dict(assignment))
            return
        a = applicants[ai]
        for i in by_applicant[a]:
            if counter.can_add(i):
                counter.add(i)
                assignment[a] = counter.edges[i][1]
                rec(ai + 1)
                del assignment[a]
                counter.remove(i)
        rec(ai + 1)

    rec(0)
    return out


def _rank_matrix(instance: Instance, matchings: list[dict[str, str]]) -> np.ndarray:
    applicants = list(instance.applicant_quotas)
    rank_of = instance.rank_of
    rows = np.full((len(matchings), len(applicants)), UNMATCHED_RANK, dtype=np.int64)
    for mi, m in enumerate(matchings):
        for ai, a in enumerate(applicants):
            p = m.get(a)
            if p is not None:
                rows[mi, ai] = rank_of[(a, p)]
    return rows


def _vector_of(instance: Instance, matching) -> np.ndarray:
    applicants = list(instance.applicant_quotas)
    assigned = dict(matching)
    vec = np.full(len(applicants), UNMATCHED_RANK, dtype=np.int64)
    for ai, a in enumerate(applicants):
        if a in assigned:
            vec[ai] = instance.rank_of[(a, assigned[a])]
    return vec


def _beaten(vec: np.ndarray, rows: np.ndarray) -> bool:
    # votes(row over vec) = sum of sign(vec - row); positive means beaten.
    return bool(np.sign(vec - rows).sum(axis=1).max(initial=0) > 0)


def oracle_is_popular(instance: Instance, matching, cap: int = DEFAULT_CAP) -> bool:
    """True iff no feasible matching gets strictly more applicant votes."""
    _require_many_to_one(instance)
    maximal = _maximal_matchings(instance, cap)
    rows = _rank_matrix(instance, maximal)
    return not _beaten(_vector_of(instance, matching), rows)


def oracle_popular(instance: Instance,
                   cap: int = DEFAULT_CAP) -> tuple[bool, frozenset[Pair] | None]:
    """Search all feasible matchings for a popular one.

    Candidates are scanned most-matched-first so that, when a popular
    matching exists, it tends to be confirmed early; correctness does not
    depend on the order.
    """
    _require_many_to_one(instance)
    maximal = _maximal_matchings(instance, cap)
    rows = _rank_matrix(instance, maximal)
    order = sorted(range(len(maximal)),
                   key=lambda i: (-len(maximal[i]), int(rows[i].sum())))
    for i in order:
        if not _beaten(rows[i], rows):
            witness = frozenset(maximal[i].items())
            return True, witness
    return False, None
