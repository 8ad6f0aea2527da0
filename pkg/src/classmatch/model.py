"""Problem instances: parsing, validation, trees, feasibility and signatures.

An instance is a bipartite graph of applicants and posts.  Each applicant
ranks a subset of the posts (ties allowed, rank = 1-based group index), every
vertex carries a quota, and every vertex may classify its neighbors into
quota-carrying classes.  A matching is feasible when it respects every vertex
quota and every class quota.

Instance text format (UTF-8, line oriented, ``#`` starts a comment)::

    applicant <name> quota=<int>
    post <name> quota=<int>
    pref <applicant> : <group> ; <group> ; ...
    class <vertex> quota=<int> : <name> <name> ...

A preference group is one or more whitespace-separated post names; two or
more names in one group form a tie at that rank.  A matching file holds one
``<applicant> <post>`` pair per line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import InstanceFormatError, NotManyToOneError

APPLICANT = "applicant"
POST = "post"

Pair = tuple[str, str]
Signature = tuple[int, ...]

_NAME_RE = re.compile(r"^[^\s#();:]+$")

# Rank value used for "unmatched" in vote comparisons; any real rank beats it.
UNMATCHED_RANK = 1 << 30


def valid_name(name: str) -> bool:
    return bool(_NAME_RE.match(name))


@dataclass(frozen=True)
class ClassSpec:
    """One class declared by ``owner``: a member set with an upper quota."""

    owner: str
    side: str  # side of the owner: APPLICANT or POST
    members: frozenset[str]
    quota: int


@dataclass
class Instance:
    """A parsed problem instance.

    ``applicant_quotas`` / ``post_quotas`` preserve declaration order, which
    fixes node creation order in the flow network and hence the deterministic
    output of the solvers.
    """

    applicant_quotas: dict[str, int]
    post_quotas: dict[str, int]
    prefs: dict[str, list[list[str]]]  # applicant -> rank groups
    classes: list[ClassSpec] = field(default_factory=list)

    @cached_property
    def edges(self) -> list[tuple[str, str, int]]:
        """All (applicant, post, rank) triples in declaration order."""
        out = []
        for a in self.applicant_quotas:
            for rank, group in enumerate(self.prefs.get(a, []), start=1):
                for p in group:
                    out.append((a, p, rank))
        return out

    @cached_property
    def rank_of(self) -> dict[Pair, int]:
        ranks: dict[Pair, int] = {}
        for a, p, rank in self.edges:
            ranks.setdefault((a, p), rank)
        return ranks

    @cached_property
    def max_rank(self) -> int:
        return max((rank for _, _, rank in self.edges), default=0)

    @cached_property
    def applicant_neighbors(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {a: [] for a in self.applicant_quotas}
        for a, p, _ in self.edges:
            if p not in out[a]:
                out[a].append(p)
        return out

    @cached_property
    def post_neighbors(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {p: [] for p in self.post_quotas}
        for a, p, _ in self.edges:
            if p in out and a not in out[p]:
                out[p].append(a)
        return out

    def neighbors(self, vertex: str, side: str) -> list[str]:
        table = self.applicant_neighbors if side == APPLICANT else self.post_neighbors
        return table.get(vertex, [])

    def quota(self, vertex: str, side: str) -> int:
        table = self.applicant_quotas if side == APPLICANT else self.post_quotas
        return table[vertex]

    def classes_of(self, vertex: str, side: str) -> list[ClassSpec]:
        return [c for c in self.classes if c.owner == vertex and c.side == side]

    def is_many_to_one(self) -> bool:
        if any(q != 1 for q in self.applicant_quotas.values()):
            return False
        return all(c.side == POST for c in self.classes)


# ---------------------------------------------------------------------------
# Parsing and formatting


def parse_instance(text: str) -> Instance:
    """Parse the instance text format.  Raises InstanceFormatError."""
    applicants: dict[str, int] = {}
    posts: dict[str, int] = {}
    prefs: dict[str, list[list[str]]] = {}
    classes: list[ClassSpec] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            _parse_line(line, applicants, posts, prefs, classes)
        except InstanceFormatError as exc:
            raise InstanceFormatError(f"line {lineno}: {exc}") from None
    return Instance(applicants, posts, prefs, classes)


def _parse_quota(token: str) -> int:
    if not token.startswith("quota="):
        raise InstanceFormatError(f"expected quota=<int>, got {token!r}")
    try:
        return int(token[len("quota="):])
    except ValueError:
        raise InstanceFormatError(f"bad quota in {token!r}") from None


def _parse_line(line, applicants, posts, prefs, classes):
    head, *rest = line.split(None, 1)
    body = rest[0] if rest else ""
    if head in (APPLICANT, POST):
        parts = body.split()
        if len(parts) != 2:
            raise InstanceFormatError(f"expected '<name> quota=<int>' after {head}")
        name, quota = parts[0], _parse_quota(parts[1])
        if not valid_name(name):
            raise InstanceFormatError(f"bad vertex name {name!r}")
        table = applicants if head == APPLICANT else posts
        if name in table:
            raise InstanceFormatError(f"{head} {name!r} declared twice")
        table[name] = quota
    elif head == "pref":
        owner, _, spec = body.partition(":")
        owner = owner.strip()
        if not owner or not spec.strip():
            raise InstanceFormatError("expected 'pref <applicant> : <groups>'")
        if owner in prefs:
            raise InstanceFormatError(f"preference list for {owner!r} declared twice")
        groups = []
        for chunk in spec.split(";"):
            names = chunk.split()
            if not names:
                raise InstanceFormatError("empty preference group")
            groups.append(names)
        prefs[owner] = groups
    elif head == "class":
        decl, _, member_spec = body.partition(":")
        parts = decl.split()
        if len(parts) != 2:
            raise InstanceFormatError("expected 'class <vertex> quota=<int> : <members>'")
        owner, quota = parts[0], _parse_quota(parts[1])
        members = member_spec.split()
        if not members:
            raise InstanceFormatError(f"class of {owner!r} has no members")
        # Owner side is resolved after parsing; store as unknown-side and fix
        # below via the declared vertex tables.
        side = APPLICANT if owner in applicants else POST
        classes.append(ClassSpec(owner, side, frozenset(members), quota))
    else:
        raise InstanceFormatError(f"unknown directive {head!r}")


def format_instance(instance: Instance) -> str:
    """Serialize an instance back to the text format (round-trips parse)."""
    lines = []
    for a, q in instance.applicant_quotas.items():
        lines.append(f"applicant {a} quota={q}")
    for p, q in instance.post_quotas.items():
        lines.append(f"post {p} quota={q}")
    for a in instance.applicant_quotas:
        groups = instance.prefs.get(a)
        if groups:
            spec = " ; ".join(" ".join(g) for g in groups)
            lines.append(f"pref {a} : {spec}")
    for c in instance.classes:
        members = " ".join(sorted(c.members))
        lines.append(f"class {c.owner} quota={c.quota} : {members}")
    return "\n".join(lines) + "\n"


def parse_matching(text: str) -> set[Pair]:
    """Parse a matching file: one '<applicant> <post>' pair per line."""
    pairs: set[Pair] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InstanceFormatError(f"line {lineno}: expected '<applicant> <post>'")
        pairs.add((parts[0], parts[1]))
    return pairs


def format_matching(pairs: Iterable[Pair]) -> str:
    return "".join(f"{a} {p}\n" for a, p in sorted(pairs))


# ---------------------------------------------------------------------------
# Validation


def validate(instance: Instance) -> list[str]:
    """Return all diagnostics for the instance; an empty list means valid.

    Never raises: every violation is reported as one human-readable string.
    """
    diags: list[str] = []
    names_a = set(instance.applicant_quotas)
    names_p = set(instance.post_quotas)

    for name in names_a & names_p:
        diags.append(f"name used on both sides: {name}")
    for name in names_a | names_p:
        if not valid_name(name):
            diags.append(f"bad vertex name: {name}")

    for a, q in instance.applicant_quotas.items():
        if q <= 0:
            diags.append(f"quota must be positive: applicant {a}")
    for p, q in instance.post_quotas.items():
        if q <= 0:
            diags.append(f"quota must be positive: post {p}")

    for a in instance.applicant_quotas:
        groups = instance.prefs.get(a, [])
        if not groups:
            diags.append(f"empty preference list: applicant {a}")
            continue
        seen: set[str] = set()
        for group in groups:
            for p in group:
                if p not in names_p:
                    diags.append(f"unknown post in preference list of {a}: {p}")
                if p in seen:
                    diags.append(f"post listed twice in preference list of {a}: {p}")
                seen.add(p)
    for a in instance.prefs:
        if a not in names_a:
            diags.append(f"preference list for unknown applicant: {a}")

    seen_sets: dict[tuple[str, str], set[frozenset[str]]] = {}
    for c in instance.classes:
        owner_names = names_a if c.side == APPLICANT else names_p
        if c.owner not in owner_names:
            diags.append(f"class owner not declared: {c.owner}")
            continue
        if c.quota <= 0:
            diags.append(f"quota must be positive: class {_class_label(c)}")
        neighborhood = set(instance.neighbors(c.owner, c.side))
        for m in c.members - neighborhood:
            diags.append(f"class member not a neighbor: {m} in {_class_label(c)}")
        key = (c.side, c.owner)
        if c.members in seen_sets.setdefault(key, set()):
            diags.append(f"duplicate class set: {_class_label(c)}")
        seen_sets[key].add(c.members)

    return diags


def _class_label(c: ClassSpec) -> str:
    return f"{c.owner} class {{{' '.join(sorted(c.members))}}}"


# ---------------------------------------------------------------------------
# Laminarity and classification trees


def is_laminar(member_sets: Iterable[frozenset[str]]) -> bool:
    """True iff every pair of sets is nested or disjoint."""
    sets = list(member_sets)
    for i, x in enumerate(sets):
        for y in sets[i + 1:]:
            if not (x <= y or y <= x or not (x & y)):
                return False
    return True


@dataclass
class TreeNode:
    members: frozenset[str]
    quota: int
    parent: int | None
    children: list[int] = field(default_factory=list)
    leaf_for: str | None = None  # neighbor name when this is a singleton leaf


@dataclass
class ClassTree:
    """Classification tree of one vertex: root = full neighborhood with the
    vertex quota, one singleton leaf per neighbor, parents by strict
    containment."""

    owner: str
    side: str
    nodes: list[TreeNode]  # index 0 is the root

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    def leaf_index(self, neighbor: str) -> int:
        for i, node in enumerate(self.nodes):
            if node.leaf_for == neighbor:
                return i
        raise KeyError(neighbor)


def build_tree(instance: Instance, owner: str, side: str) -> ClassTree:
    """Build the classification tree of ``owner`` after preprocessing.

    Preprocessing adds a root class (all neighbors, quota of the vertex) and
    a quota-1 singleton class per neighbor; classes with identical member
    sets are merged keeping the minimum quota.  Raises NonLaminarError when
    the declared classes are not laminar.
    """
    from .errors import NonLaminarError

    neighborhood = instance.neighbors(owner, side)
    declared = instance.classes_of(owner, side)
    if not is_laminar([c.members for c in declared]):
        raise NonLaminarError(f"classes of {side} {owner} are not laminar")

    quotas: dict[frozenset[str], int] = {}

    def put(members: frozenset[str], quota: int) -> None:
        if members in quotas:
            quotas[members] = min(quotas[members], quota)
        else:
            quotas[members] = quota

    put(frozenset(neighborhood), instance.quota(owner, side))
    for w in neighborhood:
        put(frozenset([w]), 1)
    for c in declared:
        put(c.members, c.quota)

    # Sort by decreasing size so each node's parent (smallest strict
    # superset) is already placed; ties broken by member names for a
    # reproducible node order.
    ordered = sorted(quotas, key=lambda s: (-len(s), tuple(sorted(s))))
    nodes: list[TreeNode] = []
    index_of: dict[frozenset[str], int] = {}
    for members in ordered:
        parent = None
        best_size = None
        for cand, idx in index_of.items():
            if members < cand and (best_size is None or len(cand) < best_size):
                parent = idx
                best_size = len(cand)
        leaf_for = next(iter(members)) if len(members) == 1 else None
        node = TreeNode(members, quotas[members], parent, leaf_for=leaf_for)
        index_of[members] = len(nodes)
        if parent is not None:
            nodes[parent].children.append(len(nodes))
        nodes.append(node)
    return ClassTree(owner, side, nodes)


# ---------------------------------------------------------------------------
# Feasibility, signatures, popularity votes


def feasibility_violations(instance: Instance, matching: Iterable[Pair]) -> list[str]:
    """Describe every quota the matching violates (empty list = feasible).

    Works for arbitrary (including non-laminar) classifications; this is the
    direct per-class recount the oracle relies on.
    """
    pairs = set(matching)
    out: list[str] = []
    for a, p in pairs:
        if (a, p) not in instance.rank_of:
            out.append(f"not an edge: {a} {p}")
    matched_a: dict[str, set[str]] = {}
    matched_p: dict[str, set[str]] = {}
    for a, p in pairs:
        matched_a.setdefault(a, set()).add(p)
        matched_p.setdefault(p, set()).add(a)
    for a, ps in sorted(matched_a.items()):
        if a in instance.applicant_quotas and len(ps) > instance.applicant_quotas[a]:
            out.append(f"vertex quota exceeded at {a}")
    for p, amatched in sorted(matched_p.items()):
        if p in instance.post_quotas and len(amatched) > instance.post_quotas[p]:
            out.append(f"vertex quota exceeded at {p}")
    for c in instance.classes:
        assigned = matched_a if c.side == APPLICANT else matched_p
        used = assigned.get(c.owner, set()) & c.members
        if len(used) > c.quota:
            out.append(f"class quota exceeded at {_class_label(c)}")
    return out


def is_feasible(instance: Instance, matching: Iterable[Pair]) -> bool:
    """True iff the matching respects every vertex quota and class quota."""
    return not feasibility_violations(instance, matching)


def signature_of(instance: Instance, matching: Iterable[Pair]) -> Signature:
    """Per-rank edge counts of the matching, padded to the instance's max rank."""
    counts = [0] * instance.max_rank
    for a, p in matching:
        rank = instance.rank_of.get((a, p))
        if rank is None:
            raise ValueError(f"not an edge: {a} {p}")
        counts[rank - 1] += 1
    return tuple(counts)


def pad_signatures(x: Sequence[int], y: Sequence[int]) -> tuple[Signature, Signature]:
    n = max(len(x), len(y))
    return tuple(x) + (0,) * (n - len(x)), tuple(y) + (0,) * (n - len(y))


def compare_signatures(x: Sequence[int], y: Sequence[int]) -> int:
    """Lexicographic signature order: -1, 0 or +1 as x is worse, equal, better."""
    xs, ys = pad_signatures(x, y)
    if xs == ys:
        return 0
    return 1 if xs > ys else -1


def format_signature(sig: Sequence[int]) -> str:
    return "(" + ", ".join(str(v) for v in sig) + ")"


def parse_signature(text: str) -> Signature:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = [p for p in body.replace(",", " ").split() if p]
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise InstanceFormatError(f"bad signature {text!r}") from None


def assignment_ranks(instance: Instance, matching: Iterable[Pair]) -> dict[str, int]:
    """Per-applicant rank of the assigned post (UNMATCHED_RANK when unmatched).

    Only defined for many-to-one instances.
    """
    ranks = {a: UNMATCHED_RANK for a in instance.applicant_quotas}
    for a, p in matching:
        if ranks.get(a, UNMATCHED_RANK) != UNMATCHED_RANK:
            raise NotManyToOneError(f"applicant {a} matched twice")
        ranks[a] = instance.rank_of[(a, p)]
    return ranks


def more_popular_than(instance: Instance, m1: Iterable[Pair], m2: Iterable[Pair]) -> int:
    """Vote balance of m1 over m2: positive means more applicants prefer m1.

    An applicant prefers the matching assigning it a strictly better rank;
    being matched anywhere beats being unmatched.
    """
    if not instance.is_many_to_one():
        raise NotManyToOneError("vote comparison requires all applicant quotas 1")
    r1 = assignment_ranks(instance, m1)
    r2 = assignment_ranks(instance, m2)
    balance = 0
    for a in instance.applicant_quotas:
        if r1[a] < r2[a]:
            balance += 1
        elif r1[a] > r2[a]:
            balance -= 1
    return balance


def iter_instance_vertices(instance: Instance) -> Iterator[tuple[str, str]]:
    """All (vertex, side) pairs in declaration order, applicants first."""
    for a in instance.applicant_quotas:
        yield a, APPLICANT
    for p in instance.post_quotas:
        yield p, POST
