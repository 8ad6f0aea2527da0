"""Seeded random instances with laminar classifications, for tests and the
scaling benchmark."""

from __future__ import annotations

import random

from .model import APPLICANT, ClassSpec, Instance, POST


def random_instance(
    seed: int,
    n_applicants: int = 5,
    n_posts: int = 4,
    max_rank: int = 3,
    max_quota: int = 2,
    tie_prob: float = 0.3,
    class_prob: float = 0.6,
    tree_depth: int = 2,
    max_edges: int | None = 12,
    many_to_one: bool = False,
) -> Instance:
    """Build a valid random instance with laminar classes on both sides
    (posts only when ``many_to_one``).

    Every applicant gets a non-empty preference list; ``max_edges`` caps the
    total edge count so oracle comparisons stay cheap.
    """
    rng = random.Random(seed)
    applicants = {f"a{i}": 1 if many_to_one else rng.randint(1, max_quota)
                  for i in range(1, n_applicants + 1)}
    posts = {f"p{i}": rng.randint(1, max_quota) for i in range(1, n_posts + 1)}

    budget = max_edges if max_edges is not None else n_applicants * n_posts
    prefs: dict[str, list[list[str]]] = {}
    names = list(posts)
    spare = budget - n_applicants  # one guaranteed edge per applicant
    for a in applicants:
        degree = 1
        while degree < len(names) and spare > 0 and rng.random() < 0.55:
            degree += 1
            spare -= 1
        listed = rng.sample(names, degree)
        groups: list[list[str]] = []
        for p in listed:
            if groups and rng.random() < tie_prob and len(groups[-1]) < len(names):
                groups[-1].append(p)
            elif len(groups) < max_rank:
                groups.append([p])
            else:
                groups[-1].append(p)
        prefs[a] = groups

    instance = Instance(applicants, posts, prefs, [])
    classes: list[ClassSpec] = []
    for p in posts:
        classes.extend(_random_laminar(rng, p, POST, instance.neighbors(p, POST),
                                       class_prob, tree_depth))
    if not many_to_one:
        for a in applicants:
            classes.extend(_random_laminar(rng, a, APPLICANT,
                                           instance.neighbors(a, APPLICANT),
                                           class_prob, tree_depth))
    return Instance(applicants, posts, prefs, classes)


def _random_laminar(rng: random.Random, owner: str, side: str, neighbors: list[str],
                    class_prob: float, depth: int) -> list[ClassSpec]:
    """Random laminar family over the neighbor set, built by nested splits."""
    out: list[ClassSpec] = []
    seen: set[frozenset[str]] = set()

    def split(block: list[str], level: int) -> None:
        if level <= 0 or len(block) < 2:
            return
        cut = rng.randint(1, len(block) - 1)
        parts = [block[:cut], block[cut:]]
        for part in parts:
            if len(part) >= 2 and rng.random() < class_prob:
                members = frozenset(part)
                if members not in seen:
                    seen.add(members)
                    out.append(ClassSpec(owner, side, members, rng.randint(1, len(part))))
            split(part, level - 1)

    block = list(neighbors)
    rng.shuffle(block)
    split(block, depth)
    return out


def scaling_instance(seed: int, n_edges: int, max_rank: int = 3) -> Instance:
    """Laminar instance with roughly ``n_edges`` edges for timing runs."""
    degree = 5
    n_applicants = max(2, n_edges // degree)
    n_posts = max(4, n_applicants // 2)
    return random_instance(
        seed,
        n_applicants=n_applicants,
        n_posts=n_posts,
        max_rank=max_rank,
        max_quota=2,
        tie_prob=0.3,
        class_prob=0.5,
        tree_depth=3,
        max_edges=n_edges,
    )
