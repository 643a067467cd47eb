"""Randomized generators for law checking and property tests.

Samplers draw from bounded families (small colour counts, small rational
numerators and denominators) so that exact-arithmetic law checks stay fast.
They take a random.Random instance, so callers own seeding.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .urn import PolyaUrn, ReplacementMeasure, dirac, make_urn


@dataclass(frozen=True)
class UrnSamplerConfig:
    min_colours: int = 0
    max_colours: int = 3
    max_atoms: int = 3
    max_numerator: int = 9
    max_denominator: int = 9
    max_increment: int = 2
    max_initial: int = 3
    zero_activity_prob: float = 0.15


def random_rational(rng: random.Random, max_num: int, max_den: int) -> Fraction:
    return Fraction(rng.randint(1, max_num), rng.randint(1, max_den))


def random_measure(
    rng: random.Random, q: int, colour: int, cfg: UrnSamplerConfig
) -> ReplacementMeasure:
    n_atoms = rng.randint(1, cfg.max_atoms)
    increments: set[tuple[int, ...]] = set()
    for _ in range(64):
        x = tuple(
            rng.randint(-1 if j == colour else 0, cfg.max_increment) for j in range(q)
        )
        increments.add(x)
        if len(increments) == n_atoms:
            break
    weights = [rng.randint(1, cfg.max_numerator) for _ in increments]
    total = sum(weights)
    return ReplacementMeasure(
        tuple((x, Fraction(w, total)) for x, w in zip(sorted(increments), weights))
    )


def random_urn(rng: random.Random, cfg: UrnSamplerConfig | None = None) -> PolyaUrn:
    cfg = cfg or UrnSamplerConfig()
    q = rng.randint(cfg.min_colours, cfg.max_colours)
    activities = []
    measures = []
    for i in range(q):
        if rng.random() < cfg.zero_activity_prob:
            activities.append(Fraction(0))
            measures.append(dirac((0,) * q))
        else:
            activities.append(random_rational(rng, cfg.max_numerator, cfg.max_denominator))
            measures.append(random_measure(rng, q, i, cfg))
    initial = [rng.randint(0, cfg.max_initial) for _ in range(q)]
    return make_urn(q, measures, activities, initial)


def random_lively_urn(rng: random.Random, cfg: UrnSamplerConfig | None = None) -> PolyaUrn:
    """An urn with positive activities, positive initial counts, and
    replacements that never remove balls and always add at least one.

    Such urns cannot go extinct and have positive expected growth, which
    makes them convenient raw material when sampling urns that satisfy the
    eigenvalue assumptions."""
    cfg = cfg or UrnSamplerConfig()
    q = rng.randint(max(cfg.min_colours, 1), cfg.max_colours)
    activities = [
        random_rational(rng, cfg.max_numerator, cfg.max_denominator) for _ in range(q)
    ]
    measures = []
    for i in range(q):
        n_atoms = rng.randint(1, cfg.max_atoms)
        increments: set[tuple[int, ...]] = set()
        for _ in range(64):
            x = [rng.randint(0, cfg.max_increment) for _ in range(q)]
            if sum(x) == 0:
                x[rng.randrange(q)] = 1
            increments.add(tuple(x))
            if len(increments) == n_atoms:
                break
        weights = [rng.randint(1, cfg.max_numerator) for _ in increments]
        total = sum(weights)
        measures.append(
            ReplacementMeasure(
                tuple((x, Fraction(w, total)) for x, w in zip(sorted(increments), weights))
            )
        )
    initial = [rng.randint(1, cfg.max_initial) for _ in range(q)]
    return make_urn(q, measures, activities, initial)


def random_rational_matrix(
    rng: random.Random,
    size: int,
    max_num: int = 6,
    max_den: int = 4,
    intmat: bool = True,
):
    """A square matrix of small rationals; off-diagonal entries are kept
    nonnegative when intmat is True."""
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            num = rng.randint(0 if (intmat and i != j) else -max_num, max_num)
            row.append(Fraction(num, rng.randint(1, max_den)))
        rows.append(tuple(row))
    return tuple(rows)


def random_permutation(rng: random.Random, n: int) -> tuple[int, ...]:
    perm = list(range(n))
    rng.shuffle(perm)
    return tuple(perm)
