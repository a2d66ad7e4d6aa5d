"""Distributed population switching engine.

One run alternates between a single main population, evolved on resampled
noisy fitness, and a set of self-organized clusters (pseudo-populations)
that evolve for a fixed number of generations on regression-estimated
fitness at zero evaluation cost. At each switching step the clusters merge
back, true fitness is resampled, and the population re-dissolves. Clusters
that stay non-eligible for too many consecutive cycles are replaced by
fresh random individuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import benchmarks, regression
from .ga import GaParams, Individual, evolve_generation
from .regression import ModelKind, RegressionModel
from .results import CycleRecord, RunResult
from .stochastics import Budget, resample_many

__all__ = [
    "PseudoPopulation",
    "DpseaParams",
    "self_organize",
    "assess_eligibility",
    "adaptive_mutation_rate",
    "evolve_pseudo",
    "merge_and_resample",
    "run",
]


@dataclass
class PseudoPopulation:
    """A self-organized cluster acting as distributed memory for one region.

    ``archive`` holds (genome, fitness) pairs whose fitness came from
    actual resampled evaluation at the latest switching step; regression
    models are fitted on it, never on estimated values.
    """

    members: list[Individual]
    seed_index: int
    centroid: np.ndarray
    eligible: bool = False
    staleness: int = 0
    model: RegressionModel | None = None
    archive: list[tuple[np.ndarray, float]] = field(default_factory=list)


@dataclass(frozen=True)
class DpseaParams:
    ga: GaParams = field(default_factory=GaParams)
    t_switch: int = 10
    max_clusters: int = 10
    radius_fraction: float = 0.1
    kappa: float = 0.5
    s_min: int = 5
    staleness_limit: int = 2
    rs_merge: int = 1
    max_total_eval: int = 90_000
    regression_lambda: float = 1e-6
    quadratic_min_samples_factor: float = 1.0

    def __post_init__(self):
        if self.t_switch < 1:
            raise ValueError("t_switch must be >= 1")
        if self.max_clusters < 1:
            raise ValueError("max_clusters must be >= 1")
        if not 0.0 < self.radius_fraction <= 1.0:
            raise ValueError("radius_fraction must be in (0, 1]")
        if not 0.0 < self.kappa <= 1.0:
            raise ValueError("kappa must be in (0, 1]")
        if not 1 <= self.s_min <= self.ga.pop_size:
            raise ValueError("s_min must be in [1, pop_size]")
        if self.staleness_limit < 1:
            raise ValueError("staleness_limit must be >= 1")
        if self.rs_merge < 1:
            raise ValueError("rs_merge must be >= 1")


def _domain_diagonal(fn):
    return math.sqrt(fn.dimension) * (fn.upper_bound - fn.lower_bound)


def self_organize(pop, fn, params, samples=None):
    """Dissolve a population into disjoint clusters, greedy best-first.

    The best unassigned individual seeds a new cluster (up to
    ``max_clusters``) and captures every unassigned individual within
    ``radius_fraction`` of the domain diagonal; leftovers then join the
    nearest seed. Archives hold actually-evaluated (genome, fitness)
    pairs: the members' own sampled fitness, or, when ``samples`` is
    given as an ``(xs, ys)`` pool of true-fitness observations from the
    current switching step, each observation assigned to its nearest seed.
    """
    if not pop:
        raise ValueError("cannot organize an empty population")
    genomes = np.stack([ind.genome for ind in pop])
    fits = np.array([ind.fitness_est for ind in pop])
    n = len(pop)
    radius = params.radius_fraction * _domain_diagonal(fn)

    assigned = np.zeros(n, dtype=bool)
    order = np.argsort(fits, kind="stable")
    seeds = []          # population indices of cluster seeds
    membership = []     # list of member-index lists, one per cluster

    for i in order:
        i = int(i)
        if assigned[i]:
            continue
        if len(seeds) == params.max_clusters:
            break
        dist = np.linalg.norm(genomes - genomes[i], axis=1)
        take = np.flatnonzero(~assigned & (dist <= radius))
        assigned[take] = True
        seeds.append(i)
        membership.append(sorted(take.tolist()))

    leftover = np.flatnonzero(~assigned)
    if leftover.size:
        seed_genomes = genomes[seeds]
        dists = np.linalg.norm(
            genomes[leftover][:, None, :] - seed_genomes[None, :, :], axis=2
        )
        for row, i in enumerate(leftover):
            d = dists[row]
            best = min(range(len(seeds)), key=lambda j: (d[j], seeds[j]))
            membership[best].append(int(i))
        membership = [sorted(m) for m in membership]

    clusters = []
    for seed, member_idx in zip(seeds, membership):
        members = [pop[i] for i in member_idx]
        centroid = genomes[member_idx].mean(axis=0)
        archive = [(m.genome, m.fitness_est) for m in members if m.sampled]
        clusters.append(
            PseudoPopulation(members, seed_index=seed, centroid=centroid, archive=archive)
        )

    if samples is not None:
        xs, ys = samples
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        seed_genomes = genomes[seeds]
        dists = np.linalg.norm(
            xs[:, None, :] - seed_genomes[None, :, :], axis=2
        )
        nearest = np.argmin(dists, axis=1)
        for c in clusters:
            c.archive = []
        for row, j in enumerate(nearest):
            clusters[int(j)].archive.append((xs[row], float(ys[row])))
    return clusters


def assess_eligibility(clusters, params):
    """Grant evolution right to the fittest, sufficiently large clusters.

    A cluster is eligible iff it has at least ``s_min`` members and its
    best member ranks within the top ``ceil(kappa * n_clusters)`` clusters
    by best fitness (ties to lower seed index). Eligible clusters reset
    their staleness; the rest age by one cycle, saturating at
    ``staleness_limit``.
    """
    n = len(clusters)
    if n == 0:
        return clusters
    best = [min(m.fitness_est for m in c.members) for c in clusters]
    ranking = sorted(range(n), key=lambda i: (best[i], clusters[i].seed_index))
    top = set(ranking[: math.ceil(params.kappa * n)])
    for i, c in enumerate(clusters):
        c.eligible = i in top and len(c.members) >= params.s_min
        if c.eligible:
            for m in c.members:
                m.stale_cycles = 0
            c.staleness = 0
        else:
            for m in c.members:
                m.stale_cycles = min(m.stale_cycles + 1, params.staleness_limit)
            c.staleness = min(m.stale_cycles for m in c.members)
    return clusters


def adaptive_mutation_rate(rank_fraction, cluster_size, params):
    """Mutation rate increasing with fitness rank, decreasing with cluster size.

    ``clamp(p_m * (0.5 + rank_fraction) * sqrt(s_min / cluster_size), 0.05, 1.0)``
    with ``rank_fraction`` in [0, 1] (best member 0, worst 1).
    """
    if not 0.0 <= rank_fraction <= 1.0:
        raise ValueError("rank_fraction must be in [0, 1]")
    if cluster_size < 1:
        raise ValueError("cluster_size must be positive")
    rate = (
        params.ga.p_m
        * (0.5 + rank_fraction)
        * math.sqrt(params.s_min / cluster_size)
    )
    return min(max(rate, 0.05), 1.0)


def _constant_model(members):
    genomes = np.stack([m.genome for m in members])
    mean = float(np.mean([m.fitness_est for m in members]))
    d = genomes.shape[1]
    return RegressionModel(
        ModelKind.CONSTANT,
        np.array([mean]),
        0.0,
        genomes.mean(axis=0),
        np.ones(d),
    )


def evolve_pseudo(cluster, fn, params, rng):
    """One regression-guided GA generation inside an eligible cluster.

    Fits the cluster's surrogate from its archive on first use (the
    archive is fixed between merges, so the fit is reused), then evolves
    the members for one generation with fitness given by the model and
    per-member adaptive mutation rates. Consumes zero true evaluations;
    within-cluster elitism keeps the current best member.
    """
    if not cluster.eligible:
        raise ValueError("only eligible pseudo-populations may evolve")
    size = len(cluster.members)
    d = fn.dimension

    if cluster.model is None:
        if cluster.archive:
            xs = np.stack([g for g, _ in cluster.archive])
            ys = np.array([y for _, y in cluster.archive])
            kind = regression.select_kind(
                len(ys), d, params.quadratic_min_samples_factor
            )
            cluster.model = regression.fit(xs, ys, kind, params.regression_lambda)
        else:
            cluster.model = _constant_model(cluster.members)
    model = cluster.model

    fits = np.array([m.fitness_est for m in cluster.members])
    order = np.argsort(fits, kind="stable")
    rates = np.empty(size)
    for rank, i in enumerate(order):
        frac = rank / (size - 1) if size > 1 else 0.0
        rates[int(i)] = adaptive_mutation_rate(frac, size, params)

    n_elites = min(params.ga.n_elites, size - 1) if size > 1 else 0
    local = replace(params.ga, pop_size=size, n_elites=n_elites)
    cluster.members = evolve_generation(
        cluster.members,
        fitness=lambda g: regression.predict(model, g),
        params=local,
        rng=rng,
        bounds=fn.bounds,
        mutation_rates=rates,
        fitness_batch=lambda xs: regression.predict_many(model, xs),
        sampled=False,
    )
    cluster.centroid = np.stack([m.genome for m in cluster.members]).mean(axis=0)
    return cluster


def _random_individuals(fn, count, rng):
    genomes = rng.uniform(fn.lower_bound, fn.upper_bound, (count, fn.dimension))
    return [Individual(genomes[i]) for i in range(count)]


def merge_and_resample(clusters, fn, noise, rs_merge, rng, budget, params):
    """Regain the main population and refresh fitness with true resampling.

    Clusters that hit the staleness limit are replaced wholesale by fresh
    uniform-random individuals; the rest contribute their members as-is.
    Every member is then scored by resampled true fitness except elites
    whose genome is unchanged since their last actual evaluation
    (``unchanged and sampled``), which keep their fitness and accrue
    ``total_unchanged``.
    """
    members = []
    for c in clusters:
        if c.staleness >= params.staleness_limit:
            members.extend(_random_individuals(fn, len(c.members), rng))
        else:
            members.extend(c.members)
    if len(members) < params.ga.pop_size:
        members.extend(
            _random_individuals(fn, params.ga.pop_size - len(members), rng)
        )
    if len(members) > params.ga.pop_size:
        raise ValueError("clusters hold more members than the population size")

    to_eval = [i for i, m in enumerate(members) if not (m.unchanged and m.sampled)]
    budget.skip((len(members) - len(to_eval)) * rs_merge)
    if to_eval:
        xs = np.stack([members[i].genome for i in to_eval])
        vals = resample_many(fn, xs, rs_merge, noise, rng, budget)
        for j, i in enumerate(to_eval):
            m = members[i]
            m.fitness_est = float(vals[j])
            m.sampled = True
            m.unchanged = False
    return members


def _merge_eval_count(clusters, params):
    """Evaluations the next merge will charge (exempt elites excluded)."""
    count = 0
    total = 0
    for c in clusters:
        total += len(c.members)
        if c.staleness >= params.staleness_limit:
            count += len(c.members)
        else:
            count += sum(
                1 for m in c.members if not (m.unchanged and m.sampled)
            )
    count += max(0, params.ga.pop_size - total)
    return count


def run(fn, noise, params, rng, budget=None):
    """Full switching loop until the evaluation budget is exhausted.

    Per cycle: one main-population generation on resampled noisy fitness,
    dissolution into clusters, ``t_switch`` zero-cost regression-guided
    generations in the eligible clusters, then merge with true resampling.
    The returned best-ever solution is scored by the noiseless fitness
    (scoring does not count against the budget).
    """
    if budget is None:
        budget = Budget(pop_size=params.ga.pop_size, total_it=0, rs=params.rs_merge)
    lo, hi = fn.bounds
    rs = params.rs_merge

    genomes = rng.uniform(lo, hi, (params.ga.pop_size, fn.dimension))
    vals = resample_many(fn, genomes, rs, noise, rng, budget)
    pop = [
        Individual(genomes[i], float(vals[i]), sampled=True)
        for i in range(params.ga.pop_size)
    ]

    true_vals = benchmarks.evaluate_many(fn, genomes)
    best_i = int(np.argmin(true_vals))
    best_genome = genomes[best_i].copy()
    best_fitness = float(true_vals[best_i])

    def track(xs):
        nonlocal best_genome, best_fitness
        if len(xs) == 0:
            return
        xs = np.stack(xs)
        tv = benchmarks.evaluate_many(fn, xs)
        i = int(np.argmin(tv))
        if tv[i] < best_fitness:
            best_fitness = float(tv[i])
            best_genome = xs[i].copy()

    # pool of (genome, resampled fitness) observations gathered since the
    # last dissolve; becomes the clusters' regression archives
    pool_x = [genomes]
    pool_y = [vals]

    trace = []
    cycle = 0
    cap = params.max_total_eval
    main_cost = (params.ga.pop_size - params.ga.n_elites) * rs
    while budget.total_eval + main_cost <= cap:
        # main-population generation on resampled true fitness
        pop = evolve_generation(
            pop,
            fitness=None,
            params=params.ga,
            rng=rng,
            bounds=fn.bounds,
            fitness_batch=lambda xs: resample_many(fn, xs, rs, noise, rng, budget),
            sampled=True,
        )
        budget.skip(params.ga.n_elites * rs)
        offspring = pop[params.ga.n_elites :]
        track([m.genome for m in offspring])
        pool_x.append(np.stack([m.genome for m in offspring]))
        pool_y.append(np.array([m.fitness_est for m in offspring]))

        samples = (np.concatenate(pool_x), np.concatenate(pool_y))
        clusters = self_organize(pop, fn, params, samples=samples)
        pool_x, pool_y = [], []
        assess_eligibility(clusters, params)
        for _ in range(params.t_switch):
            for c in clusters:
                if c.eligible:
                    evolve_pseudo(c, fn, params, rng)

        merge_cost = rs * _merge_eval_count(clusters, params)
        if budget.total_eval + merge_cost > cap:
            trace.append(
                CycleRecord(
                    cycle, budget.total_eval, best_fitness,
                    len(clusters), sum(1 for c in clusters if c.eligible),
                )
            )
            break
        pop = merge_and_resample(clusters, fn, noise, rs, rng, budget, params)
        track([m.genome for m in pop])
        pool_x.append(np.stack([m.genome for m in pop]))
        pool_y.append(np.array([m.fitness_est for m in pop]))
        trace.append(
            CycleRecord(
                cycle,
                budget.total_eval,
                best_fitness,
                len(clusters),
                sum(1 for c in clusters if c.eligible),
            )
        )
        cycle += 1

    return RunResult(best_genome, best_fitness, budget, trace)
