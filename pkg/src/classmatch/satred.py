"""Monotone 1-in-3 SAT and its reduction to classified matching instances.

The reduction builds, per variable, a chooser post plus a "true" and a
"false" pool, and per clause a quota-3 post whose overlapping classes admit
exactly one true-literal applicant; the produced instance has a matching of
the target signature exactly when the formula has an assignment with one
true variable per clause.  The clause-post classes overlap pairwise, so the
instances are deliberately non-laminar.

Formula text format::

    p mono1in3 <n> <m>
    <v1> <v2> <v3>        # one clause of three distinct variables, 1-based
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import InstanceFormatError, TooLargeError
from .model import ClassSpec, Instance, POST, Signature

BRUTE_FORCE_MAX_VARS = 20


@dataclass(frozen=True)
class MonotoneFormula:
    num_vars: int
    clauses: tuple[frozenset[int], ...]

    def occurrences(self, var: int) -> list[int]:
        """1-based indices of the clauses containing ``var``."""
        return [j for j, clause in enumerate(self.clauses, start=1) if var in clause]


def parse_formula(text: str) -> MonotoneFormula:
    """Parse the ``p mono1in3`` format; raises InstanceFormatError."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InstanceFormatError("empty formula file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "p" or header[1] != "mono1in3":
        raise InstanceFormatError("expected header 'p mono1in3 <n> <m>'")
    try:
        n, m = int(header[2]), int(header[3])
    except ValueError:
        raise InstanceFormatError("non-numeric counts in header") from None
    if n < 0 or m < 0:
        raise InstanceFormatError("negative counts in header")
    if len(lines) - 1 != m:
        raise InstanceFormatError(f"expected {m} clause lines, found {len(lines) - 1}")
    clauses = []
    for ln in lines[1:]:
        try:
            vs = [int(tok) for tok in ln.split()]
        except ValueError:
            raise InstanceFormatError(f"bad clause line {ln!r}") from None
        if len(vs) != 3:
            raise InstanceFormatError(f"clause must have three variables: {ln!r}")
        if len(set(vs)) != 3:
            raise InstanceFormatError(f"repeated variable in clause: {ln!r}")
        for v in vs:
            if not 1 <= v <= n:
                raise InstanceFormatError(f"variable {v} out of range 1..{n}")
        clauses.append(frozenset(vs))
    return MonotoneFormula(n, tuple(clauses))


def format_formula(formula: MonotoneFormula) -> str:
    lines = [f"p mono1in3 {formula.num_vars} {len(formula.clauses)}"]
    for clause in formula.clauses:
        lines.append(" ".join(str(v) for v in sorted(clause)))
    return "\n".join(lines) + "\n"


def reduce_formula(formula: MonotoneFormula) -> tuple[Instance, Signature]:
    """Build the matching instance for a formula plus the target signature.

    A variable occurring in no clause would get quota-0 pools; those posts
    fall back to quota 1, a declared deviation kept out of the round-trip
    theorem checks.
    """
    n = formula.num_vars
    m = len(formula.clauses)

    applicants: dict[str, int] = {}
    posts: dict[str, int] = {}
    prefs: dict[str, list[list[str]]] = {}
    classes: list[ClassSpec] = []

    def var_posts(i: int) -> tuple[str, str, str]:
        return f"p_{i}", f"pt_{i}", f"pf_{i}"

    for i in range(1, n + 1):
        chooser, pool_t, pool_f = var_posts(i)
        k_i = len(formula.occurrences(i))
        posts[chooser] = 1
        posts[pool_t] = max(k_i, 1)
        posts[pool_f] = max(k_i, 1)
        applicants[f"a_{i}"] = 1
        applicants[f"b_{i}"] = 1
        prefs[f"a_{i}"] = [[chooser], [pool_t]]
        prefs[f"b_{i}"] = [[chooser], [pool_f]]
    for j in range(1, m + 1):
        posts[f"pc_{j}"] = 3
    for j, clause in enumerate(formula.clauses, start=1):
        for i in sorted(clause):
            _, pool_t, pool_f = var_posts(i)
            applicants[f"a_{i}_{j}"] = 1
            applicants[f"b_{i}_{j}"] = 1
            prefs[f"a_{i}_{j}"] = [[f"pc_{j}"], [pool_t]]
            prefs[f"b_{i}_{j}"] = [[f"pc_{j}"], [pool_f]]

    for j, clause in enumerate(formula.clauses, start=1):
        members = sorted(clause)
        for i in members:
            classes.append(ClassSpec(f"pc_{j}", POST,
                                     frozenset({f"a_{i}_{j}", f"b_{i}_{j}"}), 1))
        classes.append(ClassSpec(f"pc_{j}", POST,
                                 frozenset(f"a_{i}_{j}" for i in members), 1))
        classes.append(ClassSpec(f"pc_{j}", POST,
                                 frozenset(f"b_{i}_{j}" for i in members), 2))
    for i in range(1, n + 1):
        _, pool_t, pool_f = var_posts(i)
        for j in formula.occurrences(i):
            classes.append(ClassSpec(pool_t, POST,
                                     frozenset({f"a_{i}_{j}", f"a_{i}"}), 1))
            classes.append(ClassSpec(pool_f, POST,
                                     frozenset({f"b_{i}_{j}", f"b_{i}"}), 1))

    target = (3 * m + n, 3 * m + n)
    return Instance(applicants, posts, prefs, classes), target


def brute_force_1in3(formula: MonotoneFormula) -> tuple[bool, dict[int, bool] | None]:
    """Exhaustively search for an assignment with exactly one true variable
    per clause; returns (satisfiable, first witness in mask order)."""
    n = formula.num_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise TooLargeError(f"{n} variables exceeds brute-force limit {BRUTE_FORCE_MAX_VARS}")
    clause_masks = []
    for clause in formula.clauses:
        mask = 0
        for v in clause:
            mask |= 1 << (v - 1)
        clause_masks.append(mask)
    for bits in range(1 << n):
        if all((bits & mask).bit_count() == 1 for mask in clause_masks):
            assignment = {v: bool(bits >> (v - 1) & 1) for v in range(1, n + 1)}
            return True, assignment
    return False, None


def all_small_formulas(max_vars: int, max_clauses: int):
    """Every formula (up to clause order) whose variables 1..n all occur;
    handy for exhaustive round-trip tests on tiny sizes."""
    for n in range(3, max_vars + 1):
        triples = [frozenset(c) for c in combinations(range(1, n + 1), 3)]
        for m in range(1, max_clauses + 1):
            for chosen in combinations(triples, m):
                used = set().union(*chosen)
                if len(used) == n:
                    yield MonotoneFormula(n, tuple(chosen))
