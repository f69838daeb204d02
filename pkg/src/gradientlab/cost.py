"""Finite-quotient graphings and the restricted-cost identity.

On a finite coset space with uniform measure, a graphing of the orbit
equivalence relation of a subgroup L is a spanning subgraph of the orbit
partition, its edge measure is |edges|/degree, and the minimum over
graphings is attained by spanning forests: (degree - #orbits)/degree.
For a normal ambient subgroup all L-orbits share the size [L : L n H],
which makes the minimum equal 1 - 1/[L : L n H] exactly.  No profinite
limit is taken or implied.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .coset import FiniteAction, index_in_quotient, orbits
from .errors import DomainError
from .words import SubgroupSpec


@dataclass(frozen=True)
class FiniteGraphing:
    """A set of directed edges inside the orbit relation on {0..degree-1}."""

    degree: int
    edges: frozenset[tuple[int, int]]

    @property
    def measure_per_point(self) -> Fraction:
        return Fraction(1, self.degree)

    @property
    def edge_measure(self) -> Fraction:
        return Fraction(len(self.edges), self.degree)

    def validate_within(self, orbit_of: dict[int, int]) -> None:
        for x, y in self.edges:
            if orbit_of[x] != orbit_of[y]:
                raise DomainError("graphing edge leaves its orbit")


@dataclass(frozen=True)
class CostReport:
    """Minimal edge measure of the L-orbit relation vs. the index prediction."""

    degree: int
    orbit_count: int
    min_cost: Fraction
    predicted: Fraction
    match: bool


def orbit_relation_cost(act: FiniteAction, l: SubgroupSpec) -> CostReport:
    """Spanning-forest cost of <l>'s orbits against 1 - 1/[L : L n H].

    The two sides agree exactly whenever the ambient subgroup is normal
    (all orbits have equal size).
    """
    orbs = orbits(act, l)
    min_cost = Fraction(act.degree - len(orbs), act.degree)
    predicted = 1 - Fraction(1, index_in_quotient(act, l))
    return CostReport(
        degree=act.degree,
        orbit_count=len(orbs),
        min_cost=min_cost,
        predicted=predicted,
        match=min_cost == predicted,
    )


@dataclass(frozen=True)
class GraphingAuditReport:
    """Seeded random graphings, all required to cost at least the minimum."""

    trials: int
    seed: int
    min_cost: Fraction
    min_edge_measure: Fraction
    max_edge_measure: Fraction
    all_at_least_min: bool
    forest_trials_exact: bool


def random_graphing(
    act: FiniteAction, l: SubgroupSpec, rng: random.Random, extra_edges: int
) -> FiniteGraphing:
    """A random spanning forest per orbit plus ``extra_edges`` random chords."""
    orbs = orbits(act, l)
    edges: set[tuple[int, int]] = set()
    for orbit in orbs:
        points = list(orbit)
        rng.shuffle(points)
        for i in range(1, len(points)):
            parent = points[rng.randrange(i)]
            edges.add((parent, points[i]))
    big = [o for o in orbs if len(o) > 1]
    attempts = 0
    while extra_edges > 0 and big and attempts < 100 * extra_edges:
        orbit = big[rng.randrange(len(big))]
        x = orbit[rng.randrange(len(orbit))]
        y = orbit[rng.randrange(len(orbit))]
        attempts += 1
        if x != y and (x, y) not in edges:
            edges.add((x, y))
            extra_edges -= 1
    return FiniteGraphing(act.degree, frozenset(edges))


def greedy_graphing_audit(
    act: FiniteAction,
    l: SubgroupSpec,
    trials: int = 100,
    seed: int = 0,
) -> GraphingAuditReport:
    """Sample random graphings and check e(S) >= min_cost for each.

    Deterministic for a fixed seed.  Half the trials are pure forests and
    must attain the minimum exactly; the rest carry random extra edges.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    report = orbit_relation_cost(act, l)
    rng = random.Random(seed)
    measures: list[Fraction] = []
    forests_exact = True
    orbit_of: dict[int, int] = {}
    for oi, orbit in enumerate(orbits(act, l)):
        for x in orbit:
            orbit_of[x] = oi
    for trial in range(trials):
        extra = 0 if trial % 2 == 0 else rng.randrange(0, act.degree + 1)
        g = random_graphing(act, l, rng, extra)
        g.validate_within(orbit_of)
        e = g.edge_measure
        measures.append(e)
        if extra == 0 and e != report.min_cost:
            forests_exact = False
    return GraphingAuditReport(
        trials=trials,
        seed=seed,
        min_cost=report.min_cost,
        min_edge_measure=min(measures),
        max_edge_measure=max(measures),
        all_at_least_min=all(e >= report.min_cost for e in measures),
        forest_trials_exact=forests_exact,
    )
