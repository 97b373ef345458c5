"""Battery state-of-charge dynamics and feasibility clipping.

The SOC transition is deliberately unclamped: candidate plans are allowed to
leave [soc_min, soc_max] and pay penalty costs, which gives search methods a
useful gradient toward the feasible band. Only actions that are actually
applied to the system get hard-clipped via clip_feasible.
"""

from __future__ import annotations

from .core import BatteryParams, ControlAction


def step_soc(p: BatteryParams, soc: float, a: ControlAction) -> float:
    """Next SOC in kWh after one step: soc + eta_ch*p_ch*dt - (p_dis/eta_dis)*dt.

    No clamping; see module docstring.
    """
    return soc + p.eta_ch * a.p_ch * p.dt - (a.p_dis / p.eta_dis) * p.dt


def step_soc_perturbed(p: BatteryParams, soc: float, a: ControlAction,
                       w: float) -> float:
    """step_soc plus an additive disturbance w (kWh)."""
    return step_soc(p, soc, a) + w


def max_charge_kw(p: BatteryParams, soc: float, renewable_surplus: float,
                  allow_backup_charging: bool = False) -> float:
    """Largest feasible charging power from the current state.

    Bounded by the rate limit, the SOC headroom, and (unless backup charging
    is enabled) the renewable surplus at the bus.
    """
    headroom = max(0.0, (p.soc_max - soc) / (p.eta_ch * p.dt))
    limit = min(p.p_ch_max, headroom)
    if not allow_backup_charging:
        limit = min(limit, max(0.0, renewable_surplus))
    return limit


def max_discharge_kw(p: BatteryParams, soc: float) -> float:
    """Largest feasible discharging power from the current state."""
    available = max(0.0, (soc - p.soc_min) * p.eta_dis / p.dt)
    return min(p.p_dis_max, available)


def clip_feasible(p: BatteryParams, soc: float, a: ControlAction,
                  renewable_surplus: float,
                  allow_backup_charging: bool = False) -> ControlAction:
    """Componentwise-largest feasible action a' <= a.

    Guarantees the next SOC stays in [soc_min, soc_max], rate limits hold,
    and charging draws only from the renewable surplus unless
    allow_backup_charging is set. Feasible inputs are returned unchanged.
    """
    p_ch = min(a.p_ch, max_charge_kw(p, soc, renewable_surplus,
                                     allow_backup_charging))
    p_dis = min(a.p_dis, max_discharge_kw(p, soc))
    return ControlAction(p_ch=p_ch, p_dis=p_dis)
