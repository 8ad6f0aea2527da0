"""Popular matching solver for many-to-one instances with classified posts.

One max-flow on the rank-1 network fixes each applicant's attainable top
posts; the residual decomposition then identifies, per applicant, the best
posts that can still absorb it without displacing anyone's top choice (its
fallback posts).  A second max-flow over top-plus-fallback arcs either
matches every applicant (the matching is popular) or proves no popular
matching exists.  Artificial last-resort posts encode "left unmatched".
"""

from __future__ import annotations

from dataclasses import dataclass

from . import flownet
from .crmm import delete_cut_arcs
from .errors import InvalidInstanceError, NotManyToOneError
from .model import Instance, Pair, Signature, signature_of, validate

LAST_RESORT_PREFIX = "__lr_"


@dataclass(frozen=True)
class ChoiceSets:
    """Per applicant: its rank-1 posts, and its most-preferred posts whose
    post-side leaf can still reach the sink after the rank-1 flow (empty for
    applicants whose tree root left the source-reachable set)."""

    top: dict[str, frozenset[str]]
    fallback: dict[str, frozenset[str]]


@dataclass(frozen=True)
class PopularResult:
    status: str  # "popular" | "none"
    matching: frozenset[Pair]  # last-resort pairs stripped
    unmatched: tuple[str, ...]
    signature: Signature | None
    rank1_count: int

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "pairs": [list(p) for p in sorted(self.matching)],
            "unmatched": list(self.unmatched),
            "signature": None if self.signature is None else list(self.signature),
            "rank1_count": self.rank1_count,
        }


def _require_many_to_one(instance: Instance) -> None:
    if not instance.is_many_to_one():
        raise NotManyToOneError(
            "popular matching needs applicant quotas of 1 and no applicant classes")


def last_resort_name(applicant: str) -> str:
    return f"{LAST_RESORT_PREFIX}{applicant}"


def add_last_resorts(instance: Instance) -> Instance:
    """Append one fresh quota-1 post per applicant as a new worst rank group.

    The new posts carry no classes and appear in no other list, so matching
    an applicant to its last resort is interchangeable with leaving it
    unmatched.
    """
    _require_many_to_one(instance)
    posts = dict(instance.post_quotas)
    prefs = {a: [list(g) for g in groups] for a, groups in instance.prefs.items()}
    for a in instance.applicant_quotas:
        name = last_resort_name(a)
        if name in posts or name in instance.applicant_quotas:
            raise InvalidInstanceError([f"reserved name already in use: {name}"])
        posts[name] = 1
        prefs.setdefault(a, []).append([name])
    return Instance(dict(instance.applicant_quotas), posts, prefs, list(instance.classes))


def compute_fs_sets(instance: Instance) -> tuple[ChoiceSets, flownet.Decomposition,
                                                 flownet.FlowGraph]:
    """Rank-1 flow analysis on an already-augmented instance.

    Returns the per-applicant choice sets, the rank-1 decomposition, and the
    evolved graph (residual after the cut-arc deletion) ready to receive the
    fallback arcs.
    """
    g = flownet.build_base_network(instance)
    rank1 = [(a, p, 1) for a, p, rank in instance.edges if rank == 1]
    flownet.add_preference_arcs(g, rank1)
    f1 = flownet.max_flow(g)
    res = flownet.residual(g, f1)
    d = flownet.decompose(res)
    src = d.from_source
    delete_cut_arcs(res, d)

    top: dict[str, frozenset[str]] = {}
    fallback: dict[str, frozenset[str]] = {}
    root_of = {g.nodes[idx].owner: idx for idx in g.out[g.source]}
    for a in instance.applicant_quotas:
        groups = instance.prefs[a]
        top[a] = frozenset(groups[0])
        if root_of[a] not in src:
            fallback[a] = frozenset()
            continue
        chosen: frozenset[str] = frozenset()
        for group in groups:
            hits = [p for p in group if g.right_leaf[(a, p)] in d.to_sink]
            if hits:
                chosen = frozenset(hits)
                break
        fallback[a] = chosen
    return ChoiceSets(top, fallback), d, res


def solve_cpm(instance: Instance, neighbor_order: str = "ascending") -> PopularResult:
    """Return a popular matching or report that none exists.

    Raises InvalidInstanceError / NonLaminarError / NotManyToOneError.
    """
    diags = validate(instance)
    if diags:
        raise InvalidInstanceError(diags)
    _require_many_to_one(instance)

    augmented = add_last_resorts(instance)
    sets, d, g = compute_fs_sets(augmented)

    extra = []
    for a in augmented.applicant_quotas:
        for p in sorted(sets.fallback[a]):
            extra.append((a, p, augmented.rank_of[(a, p)]))
    flownet.add_preference_arcs(g, extra, skip_existing=True)

    f2 = flownet.max_flow(g, neighbor_order=neighbor_order)
    res = flownet.residual(g, f2)
    full = flownet.extract_matching(res)

    if len(full) < len(instance.applicant_quotas):
        return PopularResult("none", frozenset(), (), None, 0)

    real = frozenset((a, p) for a, p in full if not p.startswith(LAST_RESORT_PREFIX))
    unmatched = tuple(sorted(a for a, p in full if p.startswith(LAST_RESORT_PREFIX)))
    sig = signature_of(instance, real)
    rank1 = sum(1 for a, p in real if instance.rank_of[(a, p)] == 1)
    return PopularResult("popular", real, unmatched, sig, rank1)


def verify_popular_characterization(instance: Instance, matching) -> bool:
    """Exact popularity test via the flow characterization: the matching's
    rank-1 part must have maximum-flow size in the rank-1 network, and every
    applicant must sit in its top or fallback set (unmatched counts as the
    last resort).  The input matching must be feasible; applicants absent
    from it are treated as unmatched."""
    _require_many_to_one(instance)
    pairs = set(matching)
    augmented = add_last_resorts(instance)
    completed = dict(pairs)
    assigned = {a for a, _ in pairs}
    for a in instance.applicant_quotas:
        if a not in assigned:
            completed[a] = last_resort_name(a)

    g = flownet.build_base_network(augmented)
    rank1_edges = [(a, p, 1) for a, p, rank in augmented.edges if rank == 1]
    flownet.add_preference_arcs(g, rank1_edges)
    f1 = flownet.max_flow(g)
    rank1_size = sum(1 for a, p in pairs if augmented.rank_of[(a, p)] == 1)
    if rank1_size != f1.value:
        return False

    sets, _, _ = compute_fs_sets(augmented)
    for a, p in completed.items():
        if p not in sets.top[a] and p not in sets.fallback[a]:
            return False
    return True
