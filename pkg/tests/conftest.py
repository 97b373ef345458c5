import numpy as np
import pytest

from helios.core import BatteryParams, CostParams, Scenario
from helios.horizon import HorizonProblem, build_lattice
from helios.renewable import RenewableModel


@pytest.fixture
def battery():
    """Reference battery: 1000 kWh, 500 start, 1000/100 kW limits, eta 0.9."""
    return BatteryParams(capacity=1000.0, soc_min=100.0, soc_max=900.0,
                         p_ch_max=1000.0, p_dis_max=100.0,
                         eta_ch=0.9, eta_dis=0.9, dt=1.0)


@pytest.fixture
def costs():
    return CostParams(c_bat=0.05, c_backup=0.30, q_under=10.0, r_over=10.0)


@pytest.fixture
def small_lattice():
    """9 actions: idle + 4 charge levels + 4 discharge levels."""
    return build_lattice(p_ch_max=200.0, p_dis_max=200.0, delta_p=50.0)


def make_problem(loads, renewables, soc0=500.0, battery=None, costs=None,
                 lattice=None, terminal_soc_value=0.0):
    """Horizon problem over explicit load/renewable series (no model needed)."""
    n = len(loads)
    battery = battery or BatteryParams(capacity=1000.0, soc_min=100.0,
                                       soc_max=900.0, p_ch_max=1000.0,
                                       p_dis_max=100.0, eta_ch=0.9,
                                       eta_dis=0.9, dt=1.0)
    costs = costs or CostParams()
    lattice = lattice or build_lattice(200.0, 200.0, 50.0)
    window = Scenario(start_hour=0, steps=n, irradiance=(0.0,) * n,
                      wind_speed=(0.0,) * n, load=tuple(loads))
    zero_model = RenewableModel(0.0, 0.0, 0.0, 0.0, p_rated=600.0)
    return HorizonProblem(window=window, soc0=soc0, battery=battery,
                          costs=costs, lattice=lattice,
                          renewable_model=zero_model,
                          renewable_override=tuple(renewables),
                          terminal_soc_value=terminal_soc_value)


def random_small_problem(rng: np.random.Generator):
    """Random instance with N in {1,2,3} and at most 9 lattice actions."""
    n = int(rng.integers(1, 4))
    p_dis_max = float(rng.choice([50.0, 100.0]))
    p_ch_max = float(rng.choice([100.0, 200.0]))
    battery = BatteryParams(capacity=1000.0, soc_min=100.0, soc_max=900.0,
                            p_ch_max=p_ch_max, p_dis_max=p_dis_max,
                            eta_ch=0.9, eta_dis=0.9, dt=1.0)
    lattice = build_lattice(p_ch_max, p_dis_max, 50.0)
    loads = [float(rng.uniform(0.0, 400.0)) for _ in range(n)]
    rens = [float(rng.uniform(0.0, 300.0)) for _ in range(n)]
    soc0 = float(rng.uniform(150.0, 850.0))
    return make_problem(loads, rens, soc0=soc0, battery=battery,
                        lattice=lattice)


def brute_force_optimum(hp: HorizonProblem):
    """Independent exhaustive oracle: pure-python scan of every sequence.

    Deliberately re-implements the dynamics and cost arithmetic instead of
    calling the library, so library bugs cannot hide.
    """
    import itertools

    bp, cp = hp.battery, hp.costs
    rens = hp.renewables()
    loads = hp.window.load
    best_cost = None
    best_combo = None
    for combo in itertools.product(range(len(hp.lattice)), repeat=hp.n_steps):
        soc = hp.soc0
        total = 0.0
        for t, ai in enumerate(combo):
            a = hp.lattice.actions[ai]
            soc_next = soc + bp.eta_ch * a.p_ch * bp.dt - (a.p_dis / bp.eta_dis) * bp.dt
            battery_cost = cp.c_bat * a.p_dis * bp.dt
            backup_cost = cp.c_backup * max(
                0.0, loads[t] - (rens[t] + a.p_dis - a.p_ch)) * bp.dt
            penalty = (cp.q_under * max(0.0, bp.soc_min - soc_next)
                       + cp.r_over * max(0.0, soc_next - bp.soc_max))
            total += battery_cost + backup_cost + penalty
            soc = soc_next
        if hp.terminal_soc_value != 0.0:
            total += hp.terminal_soc_value * (bp.soc_max - soc)
        if best_cost is None or total < best_cost:
            best_cost = total
            best_combo = combo
    return best_combo, best_cost


def action_indices(hp: HorizonProblem, seq) -> tuple:
    return tuple(hp.lattice.actions.index(a) for a in seq)
