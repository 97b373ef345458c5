"""Finite-horizon problem assembly, action lattice, and exact solvers.

solve_exact is the ground-truth optimizer over the discrete action lattice:
full enumeration with exact continuous SOC whenever the sequence count fits
the budget, otherwise backward dynamic programming on a discretized SOC grid
(next-SOC snapped to the nearest node). It doubles as the "standard MPC"
strategy and as the oracle that the metaheuristics are tested against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (BatteryParams, BudgetExceeded, ControlAction, CostParams,
                   InvalidStep, Scenario, ValidationError)
from .costing import sequence_cost, sequence_costs_batch
from .renewable import RenewableModel, predict_series

DEFAULT_DELTA_P = 50.0          # kW
DEFAULT_SOC_GRID_STEP = 10.0    # kWh
DEFAULT_MAX_ENUMERATION = 1_000_000   # sequences
MAX_DP_TABLE = 50_000_000       # grid nodes * steps * actions

_ENUM_CHUNK = 65536


@dataclass(frozen=True)
class ActionLattice:
    """Discrete set of control actions: idle, charge levels, discharge levels.

    Mutual exclusivity removes the charge x discharge cross product, so
    len(actions) == levels_ch + levels_dis + 1. Index 0 is always idle;
    charge levels follow in ascending order, then discharge levels. Tie
    breaks everywhere prefer the smallest index, i.e. idle, then the
    smallest charge.
    """

    delta_p: float
    levels_ch: int
    levels_dis: int
    actions: tuple[ControlAction, ...]

    def __len__(self) -> int:
        return len(self.actions)

    def p_ch_array(self) -> np.ndarray:
        return np.array([a.p_ch for a in self.actions], dtype=float)

    def p_dis_array(self) -> np.ndarray:
        return np.array([a.p_dis for a in self.actions], dtype=float)


def _levels(p_max: float, delta_p: float) -> list[float]:
    """{delta_p, 2*delta_p, ...} up to and always including p_max exactly."""
    levels = []
    k = 1
    while k * delta_p < p_max - 1e-9:
        levels.append(k * delta_p)
        k += 1
    levels.append(p_max)
    return levels


def build_lattice(p_ch_max: float, p_dis_max: float,
                  delta_p: float = DEFAULT_DELTA_P) -> ActionLattice:
    """Enumerate the action set for the given rate limits and step size."""
    if delta_p <= 0:
        raise InvalidStep(f"delta_p must be positive, got {delta_p}")
    ch_levels = _levels(p_ch_max, delta_p)
    dis_levels = _levels(p_dis_max, delta_p)
    actions = [ControlAction()]
    actions += [ControlAction(p_ch=x) for x in ch_levels]
    actions += [ControlAction(p_dis=x) for x in dis_levels]
    return ActionLattice(delta_p=delta_p, levels_ch=len(ch_levels),
                         levels_dis=len(dis_levels), actions=tuple(actions))


@dataclass(frozen=True)
class CandidateSequence:
    """A horizon-length vector of control actions: the optimizer's genome."""

    actions: tuple[ControlAction, ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    def __getitem__(self, i):
        return self.actions[i]


@dataclass(frozen=True)
class HorizonProblem:
    """One receding-horizon optimization instance.

    renewable_override, when given, replaces the model prediction per step
    (the engine uses it to inject forecast noise). terminal_soc_value adds
    terminal_soc_value * (soc_max - soc_N) to every candidate's cost so that
    plans near the window edge still see the value of stored energy; zero by
    default.
    """

    window: Scenario
    soc0: float
    battery: BatteryParams
    costs: CostParams
    lattice: ActionLattice
    renewable_model: RenewableModel
    renewable_override: tuple[float, ...] | None = None
    terminal_soc_value: float = 0.0

    def __post_init__(self):
        if self.window.steps < 1:
            raise ValidationError("horizon window must have at least one step")

    @property
    def n_steps(self) -> int:
        return self.window.steps

    def renewables(self) -> list[float]:
        """Per-step renewable power the problem plans against."""
        if self.renewable_override is not None:
            return list(self.renewable_override)
        return predict_series(self.renewable_model, self.window.irradiance,
                              self.window.wind_speed)

    def cost_of(self, u: CandidateSequence | list[ControlAction]) -> float:
        """Window objective J(u) for one candidate."""
        return sequence_cost(self.costs, self.battery, self.window.load,
                             self.renewables(), self.soc0, list(u),
                             self.terminal_soc_value)

    def costs_of_index_population(self, idx: np.ndarray) -> np.ndarray:
        """Vectorized J(u) for an (m, n_steps) array of lattice indices."""
        p_ch = self.lattice.p_ch_array()[idx]
        p_dis = self.lattice.p_dis_array()[idx]
        return sequence_costs_batch(self.costs, self.battery, self.window.load,
                                    self.renewables(), self.soc0, p_ch, p_dis,
                                    self.terminal_soc_value)


def sequence_from_indices(lattice: ActionLattice, idx) -> CandidateSequence:
    return CandidateSequence(tuple(lattice.actions[int(i)] for i in idx))


# =============================================================================
# Exact solvers
# =============================================================================


def solve_exact(hp: HorizonProblem,
                soc_grid_step: float = DEFAULT_SOC_GRID_STEP,
                max_enumeration: int = DEFAULT_MAX_ENUMERATION
                ) -> tuple[CandidateSequence, float]:
    """Minimum-cost sequence over the lattice.

    Prefers exhaustive enumeration (exact continuous SOC) whenever
    len(lattice) ** n_steps <= max_enumeration; otherwise falls back to
    backward DP on a SOC grid of the given step. Ties prefer smaller action
    indices: exactly lexicographic under enumeration, per DP decision
    otherwise. The returned cost is always the true (continuous-SOC) cost
    of the returned sequence, so enumeration and DP results are comparable.
    """
    n_actions = len(hp.lattice)
    n_sequences = float(n_actions) ** hp.n_steps
    if n_sequences <= max_enumeration:
        return _solve_enumeration(hp)
    return _solve_dp(hp, soc_grid_step)


def _solve_enumeration(hp: HorizonProblem) -> tuple[CandidateSequence, float]:
    n_actions = len(hp.lattice)
    best_cost = np.inf
    best_idx: tuple[int, ...] | None = None
    # Chunked lexicographic scan; np.argmin picks the first (smallest) index
    # within a chunk, and strict < keeps the earliest across chunks.
    it = itertools.product(range(n_actions), repeat=hp.n_steps)
    while True:
        chunk = list(itertools.islice(it, _ENUM_CHUNK))
        if not chunk:
            break
        idx = np.array(chunk, dtype=np.int64)
        costs = hp.costs_of_index_population(idx)
        i = int(np.argmin(costs))
        if costs[i] < best_cost:
            best_cost = float(costs[i])
            best_idx = chunk[i]
    assert best_idx is not None
    return sequence_from_indices(hp.lattice, best_idx), best_cost


def _solve_dp(hp: HorizonProblem, soc_grid_step: float
              ) -> tuple[CandidateSequence, float]:
    if soc_grid_step <= 0:
        raise InvalidStep(f"soc_grid_step must be positive, got {soc_grid_step}")
    bp = hp.battery
    cp = hp.costs
    n = hp.n_steps
    n_actions = len(hp.lattice)
    grid = np.arange(bp.soc_min, bp.soc_max + soc_grid_step / 2, soc_grid_step)
    if len(grid) * n * n_actions > MAX_DP_TABLE:
        raise BudgetExceeded(
            f"DP table {len(grid)}x{n}x{n_actions} exceeds {MAX_DP_TABLE}")
    loads = hp.window.load
    rens = hp.renewables()
    p_ch = hp.lattice.p_ch_array()
    p_dis = hp.lattice.p_dis_array()

    def snap(soc: np.ndarray) -> np.ndarray:
        # Nearest node, round half up, clamped to the grid.
        k = np.floor((soc - bp.soc_min) / soc_grid_step + 0.5).astype(np.int64)
        return np.clip(k, 0, len(grid) - 1)

    def stage_cost(soc_next: np.ndarray, dis, ch, t: int) -> np.ndarray:
        return (cp.c_bat * dis * bp.dt
                + cp.c_backup * np.maximum(
                    0.0, loads[t] - (rens[t] + dis - ch)) * bp.dt
                + cp.q_under * np.maximum(0.0, bp.soc_min - soc_next)
                + cp.r_over * np.maximum(0.0, soc_next - bp.soc_max))

    # values[t] is the optimal cost-to-go from each grid node at stage t.
    values = np.empty((n + 1, len(grid)))
    values[n] = hp.terminal_soc_value * (bp.soc_max - grid)
    policy = np.zeros((n, len(grid)), dtype=np.int64)
    for t in range(n - 1, -1, -1):
        soc_next = (grid[:, None] + bp.eta_ch * p_ch[None, :] * bp.dt
                    - (p_dis[None, :] / bp.eta_dis) * bp.dt)
        q = stage_cost(soc_next, p_dis[None, :], p_ch[None, :], t)
        q += values[t + 1][snap(soc_next)]
        policy[t] = np.argmin(q, axis=1)  # first min = smallest action index
        values[t] = q[np.arange(len(grid)), policy[t]]

    # Forward pass: first step from the exact soc0, then follow grid nodes.
    soc_next0 = hp.soc0 + bp.eta_ch * p_ch * bp.dt - (p_dis / bp.eta_dis) * bp.dt
    q0 = stage_cost(soc_next0, p_dis, p_ch, 0) + values[1][snap(soc_next0)]
    first = int(np.argmin(q0))
    idx = [first]
    node = int(snap(soc_next0[first:first + 1])[0])
    for t in range(1, n):
        a = int(policy[t][node])
        idx.append(a)
        soc_next = (grid[node] + bp.eta_ch * p_ch[a] * bp.dt
                    - (p_dis[a] / bp.eta_dis) * bp.dt)
        node = int(snap(np.array([soc_next]))[0])
    seq = sequence_from_indices(hp.lattice, idx)
    return seq, hp.cost_of(seq)


def solve_myopic(hp: HorizonProblem) -> CandidateSequence:
    """Greedy receding solve: argmin one-step cost at each step of the window.

    Each step is the exact solve of the one-step subproblem (including the
    terminal shaping term, so on a one-step window this coincides with
    solve_exact); the greedy arm simply never looks further ahead.
    """
    bp = hp.battery
    cp = hp.costs
    loads = hp.window.load
    rens = hp.renewables()
    p_ch = hp.lattice.p_ch_array()
    p_dis = hp.lattice.p_dis_array()
    soc = hp.soc0
    idx = []
    for t in range(hp.n_steps):
        soc_next = soc + bp.eta_ch * p_ch * bp.dt - (p_dis / bp.eta_dis) * bp.dt
        stage = (cp.c_bat * p_dis * bp.dt
                 + cp.c_backup * np.maximum(
                     0.0, loads[t] - (rens[t] + p_dis - p_ch)) * bp.dt
                 + cp.q_under * np.maximum(0.0, bp.soc_min - soc_next)
                 + cp.r_over * np.maximum(0.0, soc_next - bp.soc_max))
        if hp.terminal_soc_value != 0.0:
            stage = stage + hp.terminal_soc_value * (bp.soc_max - soc_next)
        a = int(np.argmin(stage))
        idx.append(a)
        soc = float(soc_next[a])
    return sequence_from_indices(hp.lattice, idx)
