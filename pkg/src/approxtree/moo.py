"""Elitist bi-objective NSGA-II over mixed-integer chromosomes.

Standard machinery: fast non-dominated sorting, crowding distance, binary
tournament, simulated binary crossover and polynomial mutation, with
(mu + lambda) survival from the combined parent/child pool. Genes are
small integers; the real-coded operators run in continuous space and the
results are rounded half-up and clamped to the gene bounds.

The exact full-precision chromosome is always seeded into the initial
population, and the returned front is the cumulative non-dominated
archive over every individual evaluated, so the search can never end
worse than the exact design and the front's hypervolume is non-decreasing
generation over generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .evaluator import EvalContext, Objectives
from .quantizer import Chromosome, GeneBounds, baseline_chromosome
from .rng import STREAM_GA, make_rng


@dataclass
class Individual:
    chrom: Chromosome
    obj: Objectives
    rank: int = -1
    crowding: float = 0.0


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    generations: int = 100
    eta_c: float = 20.0
    eta_m: float = 20.0
    crossover_prob: float = 0.9
    mutation_prob: float | None = None  # per gene; defaults to 1/(2N)
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise InputError("population size must be even and >= 4")
        if self.generations < 1:
            raise InputError("generation count must be >= 1")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise InputError("crossover probability must be in [0, 1]")
        if self.eta_c <= 0 or self.eta_m <= 0:
            raise InputError("distribution indices must be > 0")


@dataclass(frozen=True)
class ParetoFront:
    members: tuple[Individual, ...]
    provenance: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best_error: float
    min_area: float
    front_size: int
    hypervolume: float


def dominates(a: Objectives, b: Objectives) -> bool:
    return (
        a.error <= b.error
        and a.area <= b.area
        and (a.error < b.error or a.area < b.area)
    )


def fast_nondominated_sort(pop: list[Individual]) -> list[list[int]]:
    """Partition indices into fronts; sets each individual's rank."""
    n = len(pop)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    domination_count = [0] * n
    fronts: list[list[int]] = [[]]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if dominates(pop[i].obj, pop[j].obj):
                dominated_by[i].append(j)
            elif dominates(pop[j].obj, pop[i].obj):
                domination_count[i] += 1
        if domination_count[i] == 0:
            pop[i].rank = 0
            fronts[0].append(i)
    k = 0
    while fronts[k]:
        nxt: list[int] = []
        for i in fronts[k]:
            for j in dominated_by[i]:
                domination_count[j] -= 1
                if domination_count[j] == 0:
                    pop[j].rank = k + 1
                    nxt.append(j)
        k += 1
        fronts.append(nxt)
    fronts.pop()
    return fronts


def crowding_distance(front: list[Individual]) -> list[float]:
    """Per-member diversity score; boundary members get +inf.

    An objective with zero range across the front contributes nothing.
    """
    m = len(front)
    if m == 0:
        raise InputError("empty front")
    dist = [0.0] * m
    for key in ("error", "area"):
        order = sorted(range(m), key=lambda i: getattr(front[i].obj, key))
        lo = getattr(front[order[0]].obj, key)
        hi = getattr(front[order[-1]].obj, key)
        dist[order[0]] = dist[order[-1]] = math.inf
        if hi == lo:
            continue
        for pos in range(1, m - 1):
            prev = getattr(front[order[pos - 1]].obj, key)
            nxt = getattr(front[order[pos + 1]].obj, key)
            dist[order[pos]] += (nxt - prev) / (hi - lo)
    for i, d in enumerate(dist):
        front[i].crowding = d
    return dist


def tournament_select(pop: list[Individual], rng: np.random.Generator) -> Individual:
    """Binary tournament: lower rank wins, then larger crowding, then the
    first of the two drawn."""
    if len(pop) < 2:
        raise InputError("tournament needs a population of at least 2")
    i, j = rng.choice(len(pop), size=2, replace=False)
    a, b = pop[i], pop[j]
    if a.rank != b.rank:
        return a if a.rank < b.rank else b
    if a.crowding != b.crowding:
        return a if a.crowding > b.crowding else b
    return a


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _gene_bounds_list(n: int, bounds: GeneBounds) -> list[tuple[int, int]]:
    lows = [(bounds.p_min, bounds.p_max)] * n + [(-bounds.margin, bounds.margin)] * n
    return lows


def _to_vector(c: Chromosome) -> list[int]:
    return list(c.precisions) + list(c.deltas)


def _from_vector(v: list[int]) -> Chromosome:
    n = len(v) // 2
    return Chromosome(precisions=tuple(v[:n]), deltas=tuple(v[n:]))


def sbx_crossover(
    a: Chromosome,
    b: Chromosome,
    cfg: GaConfig,
    bounds: GeneBounds,
    rng: np.random.Generator,
) -> tuple[Chromosome, Chromosome]:
    """Simulated binary crossover on the 2N-gene integer vector."""
    if len(a) != len(b):
        raise InputError("parent chromosomes differ in length")
    if rng.random() >= cfg.crossover_prob:
        return a, b
    va, vb = _to_vector(a), _to_vector(b)
    limits = _gene_bounds_list(len(a), bounds)
    ca, cb = [], []
    for x1, x2, (lo, hi) in zip(va, vb, limits):
        u = rng.random()
        if u <= 0.5:
            beta = (2.0 * u) ** (1.0 / (cfg.eta_c + 1.0))
        else:
            beta = (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (cfg.eta_c + 1.0))
        c1 = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2)
        c2 = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2)
        ca.append(min(max(_round_half_up(c1), lo), hi))
        cb.append(min(max(_round_half_up(c2), lo), hi))
    return _from_vector(ca), _from_vector(cb)


def polynomial_mutation(
    c: Chromosome, cfg: GaConfig, bounds: GeneBounds, rng: np.random.Generator
) -> Chromosome:
    """Per-gene polynomial mutation at probability cfg.mutation_prob
    (default 1/(2N))."""
    pm = cfg.mutation_prob if cfg.mutation_prob is not None else 1.0 / (2.0 * len(c))
    v = _to_vector(c)
    limits = _gene_bounds_list(len(c), bounds)
    out = []
    for x, (lo, hi) in zip(v, limits):
        if rng.random() >= pm:
            out.append(x)
            continue
        u = rng.random()
        if u < 0.5:
            delta = (2.0 * u) ** (1.0 / (cfg.eta_m + 1.0)) - 1.0
        else:
            delta = 1.0 - (2.0 * (1.0 - u)) ** (1.0 / (cfg.eta_m + 1.0))
        mutated = x + delta * (hi - lo)
        out.append(min(max(_round_half_up(mutated), lo), hi))
    return _from_vector(out)


def hypervolume(members, ref_error: float, ref_area: float) -> float:
    """Dominated area of a 2-objective front relative to a reference point."""
    pts = sorted(
        {(m.obj.error, m.obj.area) for m in members if m.obj.error < ref_error and m.obj.area < ref_area}
    )
    total = 0.0
    prev_area = ref_area
    for err, area in pts:
        if area >= prev_area:
            continue  # dominated within the set
        total += (ref_error - err) * (prev_area - area)
        prev_area = area
    return total


def _nondominated_merge(
    archive: dict[Chromosome, Individual], newcomers: list[Individual]
) -> None:
    """Keep `archive` equal to the deduplicated non-dominated set."""
    for ind in newcomers:
        if ind.chrom in archive:
            continue
        if any(dominates(kept.obj, ind.obj) for kept in archive.values()):
            continue
        for key in [k for k, kept in archive.items() if dominates(ind.obj, kept.obj)]:
            del archive[key]
        archive[ind.chrom] = Individual(chrom=ind.chrom, obj=ind.obj)


def evolve(
    ctx: EvalContext, cfg: GaConfig
) -> tuple[ParetoFront, list[GenerationStats]]:
    """Run the full NSGA-II loop; returns (front, per-generation history)."""
    rng = make_rng(cfg.seed, STREAM_GA)
    n = ctx.n_genes
    bounds = ctx.bounds
    mu = cfg.population_size

    def random_chromosome() -> Chromosome:
        prec = rng.integers(bounds.p_min, bounds.p_max + 1, size=n)
        delta = rng.integers(-bounds.margin, bounds.margin + 1, size=n)
        return Chromosome(precisions=tuple(int(p) for p in prec), deltas=tuple(int(d) for d in delta))

    chroms = [baseline_chromosome(n, bounds)]
    chroms += [random_chromosome() for _ in range(mu - 1)]
    pop = [Individual(chrom=c, obj=ctx.evaluate(c)) for c in chroms]

    base_area = pop[0].obj.area
    ref_error, ref_area = 1.0, 2.0 * base_area

    archive: dict[Chromosome, Individual] = {}
    _nondominated_merge(archive, pop)

    def stats(gen: int) -> GenerationStats:
        front = list(archive.values())
        return GenerationStats(
            generation=gen,
            best_error=min(m.obj.error for m in front),
            min_area=min(m.obj.area for m in front),
            front_size=len(front),
            hypervolume=hypervolume(front, ref_error, ref_area),
        )

    history = [stats(0)]

    for gen in range(1, cfg.generations + 1):
        fronts = fast_nondominated_sort(pop)
        for f in fronts:
            crowding_distance([pop[i] for i in f])

        children: list[Individual] = []
        while len(children) < mu:
            p1 = tournament_select(pop, rng)
            p2 = tournament_select(pop, rng)
            c1, c2 = sbx_crossover(p1.chrom, p2.chrom, cfg, bounds, rng)
            for c in (polynomial_mutation(c1, cfg, bounds, rng),
                      polynomial_mutation(c2, cfg, bounds, rng)):
                if len(children) < mu:
                    children.append(Individual(chrom=c, obj=ctx.evaluate(c)))

        combined = pop + children
        fronts = fast_nondominated_sort(combined)
        survivors: list[Individual] = []
        for f in fronts:
            members = [combined[i] for i in f]
            if len(survivors) + len(members) <= mu:
                survivors.extend(members)
            else:
                crowding_distance(members)
                members.sort(key=lambda ind: -ind.crowding)
                survivors.extend(members[: mu - len(survivors)])
            if len(survivors) == mu:
                break
        pop = [Individual(chrom=s.chrom, obj=s.obj) for s in survivors]

        _nondominated_merge(archive, children)
        history.append(stats(gen))

    members = tuple(
        sorted(archive.values(), key=lambda ind: (ind.obj.error, ind.obj.area))
    )
    front = ParetoFront(
        members=members,
        provenance={
            "seed": cfg.seed,
            "generations": cfg.generations,
            "population_size": cfg.population_size,
            "baseline_area": base_area,
        },
    )
    return front, history
