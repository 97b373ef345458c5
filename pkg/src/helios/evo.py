"""Metaheuristic searchers over candidate-sequence space.

eg_solve runs the evolutionary-game optimizer: Latin hypercube init,
fitness-proportionate selection, multi-point crossover, per-gene mutation,
elitist replacement, and a first-improvement local search on the incumbent
best. aco_solve is the ant-colony comparison arm: Ant System on the layered
(stage, action) construction graph.

All randomness flows from one seed through a single numpy Generator per
solve; identical inputs and seed give identical output and trace. Genomes
are lattice index vectors internally so whole populations evaluate as one
vectorized pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LengthMismatch, ValidationError
from .costing import sequence_cost, sequence_costs_batch
from .horizon import (ActionLattice, CandidateSequence, HorizonProblem,
                      sequence_from_indices)


@dataclass(frozen=True)
class EvoParams:
    """Knobs of the evolutionary-game optimizer."""

    population: int = 60
    generations: int = 80
    p_mut: float = 0.05            # per-gene mutation probability
    crossover_points: int = 2
    elite: int = 4                 # survivors copied unchanged each generation
    local_search_budget: int = 50  # neighbor evaluations per local search
    epsilon_fitness: float = 1e-9  # keeps selection defined when costs tie
    seed: int = 42

    def __post_init__(self):
        if not (2 <= self.elite < self.population):
            raise ValidationError(
                f"need 2 <= elite < population, got ({self.elite}, {self.population})")
        if not (0.0 <= self.p_mut <= 1.0):
            raise ValidationError(f"p_mut must be in [0, 1], got {self.p_mut}")
        if self.crossover_points < 1:
            raise ValidationError("crossover_points must be >= 1")
        if self.generations < 1:
            raise ValidationError("generations must be >= 1")
        if self.epsilon_fitness <= 0:
            raise ValidationError("epsilon_fitness must be positive")
        if self.local_search_budget < 0:
            raise ValidationError("local_search_budget must be >= 0")


@dataclass(frozen=True)
class AcoParams:
    """Knobs of the Ant System comparison arm."""

    ants: int = 40
    iterations: int = 60
    evaporation: float = 0.3   # rho in (0, 1)
    pheromone_init: float = 1.0
    alpha: float = 1.0         # pheromone exponent
    beta: float = 2.0          # heuristic exponent
    seed: int = 42

    def __post_init__(self):
        if not (0.0 < self.evaporation < 1.0):
            raise ValidationError(
                f"evaporation must be in (0, 1), got {self.evaporation}")
        if self.ants < 1 or self.iterations < 1:
            raise ValidationError("ants and iterations must be >= 1")
        if self.pheromone_init <= 0:
            raise ValidationError("pheromone_init must be positive")


# =============================================================================
# Operators
# =============================================================================


def _lhs_indices(rng: np.random.Generator, m: int, n_steps: int,
                 n_actions: int) -> np.ndarray:
    """Stratified (m, n_steps) index matrix.

    Per gene position the index range [0, n_actions) is split into m equal
    bins; each bin contributes exactly one uniform sample and the bin order
    is shuffled independently per position.
    """
    out = np.empty((m, n_steps), dtype=np.int64)
    width = n_actions / m
    for j in range(n_steps):
        bins = rng.permutation(m)
        samples = (bins + rng.random(m)) * width
        out[:, j] = np.minimum(samples.astype(np.int64), n_actions - 1)
    return out


def lhs_init(lattice: ActionLattice, n_steps: int, m: int,
             seed) -> list[CandidateSequence]:
    """Latin hypercube population of m candidate sequences.

    With m == len(lattice) every gene position holds each action exactly
    once. `seed` may be an int or an existing numpy Generator.
    """
    if m < 1:
        raise ValidationError(f"population size must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    idx = _lhs_indices(rng, m, n_steps, len(lattice))
    return [sequence_from_indices(lattice, row) for row in idx]


def _fitness(costs: np.ndarray, epsilon: float) -> np.ndarray:
    # Cost-to-fitness transform for a minimization objective: affine
    # inversion against the generation's worst, offset so equal costs
    # still select uniformly.
    return (costs.max() - costs) + epsilon


def select(costs, rng: np.random.Generator, epsilon: float = 1e-9) -> int:
    """Fitness-proportionate parent index: P(i) = f_i / sum(f)."""
    costs = np.asarray(costs, dtype=float)
    if costs.size == 0:
        raise ValidationError("cannot select from an empty population")
    f = _fitness(costs, epsilon)
    cum = np.cumsum(f)
    u = rng.random() * cum[-1]
    return int(min(np.searchsorted(cum, u, side="right"), costs.size - 1))


def _select_batch(costs: np.ndarray, rng: np.random.Generator, epsilon: float,
                  count: int) -> np.ndarray:
    f = _fitness(costs, epsilon)
    cum = np.cumsum(f)
    u = rng.random(count) * cum[-1]
    return np.minimum(np.searchsorted(cum, u, side="right"), costs.size - 1)


def crossover(a: CandidateSequence, b: CandidateSequence, k: int,
              rng: np.random.Generator) -> tuple[CandidateSequence, CandidateSequence]:
    """Multi-point crossover with k distinct cut positions.

    A cut at position c swaps the gene source from c onward, so at every
    position the two children hold exactly the multiset {a[i], b[i]}.
    """
    n = len(a)
    if len(b) != n:
        raise LengthMismatch(f"parent lengths differ: {n} vs {len(b)}")
    if n < 2 or not (1 <= k < n):
        raise ValidationError(f"need 1 <= k < len(parents), got k={k}, n={n}")
    cuts = np.sort(rng.choice(np.arange(1, n), size=k, replace=False))
    child1, child2 = [], []
    src_flipped = False
    boundary = 0
    for cut in list(cuts) + [n]:
        seg = slice(boundary, cut)
        if src_flipped:
            child1.extend(b.actions[seg])
            child2.extend(a.actions[seg])
        else:
            child1.extend(a.actions[seg])
            child2.extend(b.actions[seg])
        src_flipped = not src_flipped
        boundary = cut
    return CandidateSequence(tuple(child1)), CandidateSequence(tuple(child2))


def _crossover_batch(a: np.ndarray, b: np.ndarray, k: int,
                     rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized crossover of paired parent rows, same semantics as crossover()."""
    pairs, n = a.shape
    cuts = rng.random((pairs, n - 1)).argsort(axis=1)[:, :k] + 1
    flags = np.zeros((pairs, n), dtype=np.int64)
    np.put_along_axis(flags, cuts, 1, axis=1)
    use_b = (np.cumsum(flags, axis=1) % 2).astype(bool)
    return np.where(use_b, b, a), np.where(use_b, a, b)


def mutate(u: CandidateSequence, lattice: ActionLattice, p_mut: float,
           rng: np.random.Generator) -> CandidateSequence:
    """Replace each gene with probability p_mut by a uniform lattice action.

    The replacement may equal the original gene.
    """
    n = len(u)
    coins = rng.random(n)
    repl = rng.integers(0, len(lattice), size=n)
    actions = tuple(lattice.actions[int(repl[i])] if coins[i] < p_mut else u[i]
                    for i in range(n))
    return CandidateSequence(actions)


class _Evaluator:
    """Caches the window data so repeated candidate evaluations stay cheap."""

    def __init__(self, hp: HorizonProblem):
        self.hp = hp
        self.loads = list(hp.window.load)
        self.rens = hp.renewables()
        self.p_ch = hp.lattice.p_ch_array()
        self.p_dis = hp.lattice.p_dis_array()
        self.actions = hp.lattice.actions

    def batch(self, idx: np.ndarray) -> np.ndarray:
        return sequence_costs_batch(self.hp.costs, self.hp.battery, self.loads,
                                    self.rens, self.hp.soc0,
                                    self.p_ch[idx], self.p_dis[idx],
                                    self.hp.terminal_soc_value)

    def single(self, idx: np.ndarray) -> float:
        acts = [self.actions[int(i)] for i in idx]
        return sequence_cost(self.hp.costs, self.hp.battery, self.loads,
                             self.rens, self.hp.soc0, acts,
                             self.hp.terminal_soc_value)


def _local_search_indices(ev: _Evaluator, genome: np.ndarray, cost: float,
                          budget: int) -> tuple[np.ndarray, float]:
    """First-improvement hill climb over single-gene replacements.

    Positions are visited round-robin, replacement actions in lattice order;
    the first strict improvement is accepted. Stops when the evaluation
    budget runs out or a full sweep finds no improvement.
    """
    n = genome.size
    n_actions = ev.p_ch.size
    current = genome.copy()
    cur_cost = cost
    evals = 0
    stale_positions = 0
    pos = 0
    while evals < budget and stale_positions < n:
        improved = False
        cand = current.copy()
        for a in range(n_actions):
            if a == current[pos]:
                continue
            if evals >= budget:
                break
            cand[pos] = a
            c = ev.single(cand)
            evals += 1
            if c < cur_cost:
                current = cand.copy()
                cur_cost = c
                improved = True
                break
        stale_positions = 0 if improved else stale_positions + 1
        pos = (pos + 1) % n
    return current, cur_cost


def local_search(u: CandidateSequence, hp: HorizonProblem,
                 budget: int) -> CandidateSequence:
    """Refine one candidate; the result never costs more than the input."""
    if budget <= 0:
        return u
    ev = _Evaluator(hp)
    index_of = {a: i for i, a in enumerate(hp.lattice.actions)}
    genome = np.array([index_of[a] for a in u], dtype=np.int64)
    refined, _ = _local_search_indices(ev, genome, ev.single(genome), budget)
    return sequence_from_indices(hp.lattice, refined)


# =============================================================================
# Solvers
# =============================================================================


def eg_solve(hp: HorizonProblem, ep: EvoParams
             ) -> tuple[CandidateSequence, float, list[float]]:
    """Evolutionary-game optimization of one horizon problem.

    Returns the best-ever sequence, its cost, and the per-generation
    best-cost trace (monotone nonincreasing by elitism).
    """
    rng = np.random.default_rng(ep.seed)
    ev = _Evaluator(hp)
    n = hp.n_steps
    n_actions = len(hp.lattice)
    m = ep.population

    pop = _lhs_indices(rng, m, n, n_actions)
    costs = ev.batch(pop)
    bi = int(np.argmin(costs))
    best_genome = pop[bi].copy()
    best_cost = float(costs[bi])
    last_searched: np.ndarray | None = None

    trace: list[float] = []
    for _ in range(ep.generations):
        n_children = m - ep.elite
        n_pairs = (n_children + 1) // 2
        parents = _select_batch(costs, rng, ep.epsilon_fitness, 2 * n_pairs)
        pa = pop[parents[0::2]]
        pb = pop[parents[1::2]]
        k = min(ep.crossover_points, n - 1)
        if k >= 1:
            c1, c2 = _crossover_batch(pa, pb, k, rng)
        else:  # one-gene sequences cannot be cut
            c1, c2 = pa.copy(), pb.copy()
        children = np.empty((2 * n_pairs, n), dtype=np.int64)
        children[0::2] = c1
        children[1::2] = c2
        children = children[:n_children]
        coins = rng.random(children.shape)
        repl = rng.integers(0, n_actions, size=children.shape)
        children = np.where(coins < ep.p_mut, repl, children)
        child_costs = ev.batch(children)

        keep = np.argsort(costs, kind="stable")[:ep.elite]
        pop = np.concatenate([pop[keep], children])
        costs = np.concatenate([costs[keep], child_costs])
        assert pop.shape[0] == m  # population size is invariant

        bi = int(np.argmin(costs))
        if costs[bi] < best_cost:
            best_cost = float(costs[bi])
            best_genome = pop[bi].copy()

        # Local search on the incumbent best. Re-searching an unchanged
        # incumbent cannot improve it (the climb is deterministic), so skip.
        if ep.local_search_budget > 0 and (
                last_searched is None or not np.array_equal(pop[bi], last_searched)):
            refined, refined_cost = _local_search_indices(
                ev, pop[bi], float(costs[bi]), ep.local_search_budget)
            last_searched = refined.copy()
            if refined_cost < costs[bi]:
                pop[bi] = refined
                costs[bi] = refined_cost
            if refined_cost < best_cost:
                best_cost = float(refined_cost)
                best_genome = refined.copy()

        trace.append(best_cost)

    return sequence_from_indices(hp.lattice, best_genome), best_cost, trace


def aco_solve(hp: HorizonProblem, ap: AcoParams
              ) -> tuple[CandidateSequence, float, list[float]]:
    """Ant System over the layered (stage, action) graph.

    Ants sample actions with probability proportional to
    pheromone^alpha * heuristic^beta where the heuristic is
    1 / (1 + one-step cost) at the ant's own predicted state. After each
    iteration pheromone evaporates by rho and every ant deposits
    1 / (1 + J) on the edges it used. Returns best-ever sequence, cost,
    and the per-iteration best-ever trace.
    """
    rng = np.random.default_rng(ap.seed)
    ev = _Evaluator(hp)
    bp = hp.battery
    cp = hp.costs
    n = hp.n_steps
    n_actions = len(hp.lattice)
    p_ch = ev.p_ch
    p_dis = ev.p_dis

    tau = np.full((n, n_actions), ap.pheromone_init, dtype=float)
    best_genome: np.ndarray | None = None
    best_cost = np.inf
    trace: list[float] = []

    ant_rows = np.arange(ap.ants)
    for _ in range(ap.iterations):
        socs = np.full(ap.ants, hp.soc0, dtype=float)
        total = np.zeros(ap.ants, dtype=float)
        paths = np.empty((ap.ants, n), dtype=np.int64)
        for t in range(n):
            soc_next = (socs[:, None] + bp.eta_ch * p_ch[None, :] * bp.dt
                        - (p_dis[None, :] / bp.eta_dis) * bp.dt)
            stage = (cp.c_bat * p_dis[None, :] * bp.dt
                     + cp.c_backup * np.maximum(
                         0.0, ev.loads[t] - (ev.rens[t] + p_dis[None, :]
                                             - p_ch[None, :])) * bp.dt
                     + cp.q_under * np.maximum(0.0, bp.soc_min - soc_next)
                     + cp.r_over * np.maximum(0.0, soc_next - bp.soc_max))
            heuristic = 1.0 / (1.0 + stage)
            weight = tau[t][None, :] ** ap.alpha * heuristic ** ap.beta
            rowsum = weight.sum(axis=1, keepdims=True)
            degenerate = (rowsum == 0.0).ravel()
            if degenerate.any():
                weight[degenerate] = 1.0
                rowsum = weight.sum(axis=1, keepdims=True)
            cum = np.cumsum(weight, axis=1)
            u = rng.random(ap.ants) * cum[:, -1]
            choice = np.minimum((cum < u[:, None]).sum(axis=1), n_actions - 1)
            paths[:, t] = choice
            total += stage[ant_rows, choice]
            socs = soc_next[ant_rows, choice]
        if hp.terminal_soc_value != 0.0:
            total += hp.terminal_soc_value * (bp.soc_max - socs)

        bi = int(np.argmin(total))
        if total[bi] < best_cost:
            best_cost = float(total[bi])
            best_genome = paths[bi].copy()

        tau *= (1.0 - ap.evaporation)
        deposits = 1.0 / (1.0 + np.maximum(total, 0.0))
        stage_idx = np.broadcast_to(np.arange(n), paths.shape)
        np.add.at(tau, (stage_idx.ravel(), paths.ravel()),
                  np.repeat(deposits, n))
        np.maximum(tau, 1e-12, out=tau)

        trace.append(best_cost)

    assert best_genome is not None
    return sequence_from_indices(hp.lattice, best_genome), best_cost, trace
