"""Timing-regime classification and entanglement distribution rates.

A block of m clock cycles accumulates heralded link-level entanglement which
is swapped end to end once per block. How the block's wall time and the per
node ion budgets come out depends on the ordering of three time scales: the
heralding latency T, the communication-ion lifetime tau_o, and the gate time
tau_g. The five orderings are labeled A, B1, B2, C1, C2; B1 shares A's
formulas and C2 shares B2's.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import (
    ChainLayout,
    DerivedTiming,
    HardwareProfile,
    TimingParams,
    derive_timing,
    end_to_end_fidelity,
    link_success_prob,
    werner_rci,
)


class FeasibilityError(Exception):
    """A timing or resource constraint rules out the requested operating point."""

    def __init__(self, constraint: str, message: str):
        super().__init__(message)
        self.constraint = constraint


class Regime(enum.Enum):
    A = "A"
    B1 = "B1"
    B2 = "B2"
    C1 = "C1"
    C2 = "C2"

    @property
    def waits_for_herald(self) -> bool:
        """True when comm ions live long enough to gate only heralded modes."""
        return self in (Regime.B2, Regime.C2)

    @property
    def formula_group(self) -> "Regime":
        """Representative regime whose rate and ion formulas apply."""
        if self is Regime.B1:
            return Regime.A
        if self is Regime.C2:
            return Regime.B2
        return self


def classify_regime(timing: TimingParams, heralding_time_s: float) -> Regime:
    timing.validate()
    t = heralding_time_s
    if t >= timing.tau_o:
        return Regime.A
    if t >= timing.tau_g:
        return Regime.B2 if timing.tau_o >= t + timing.tau_g else Regime.B1
    return Regime.C2 if timing.tau_o >= t + timing.tau_g else Regime.C1


def classification_path(timing: TimingParams, heralding_time_s: float) -> list[str]:
    """The branch conditions evaluated on the way to a regime label."""
    t = heralding_time_s
    path = []
    cond = t >= timing.tau_o
    path.append(f"T >= tau_o ({t:.9g} >= {timing.tau_o:.9g}): {'yes' if cond else 'no'}")
    if cond:
        path.append("regime A")
        return path
    cond = t >= timing.tau_g
    path.append(f"T >= tau_g ({t:.9g} >= {timing.tau_g:.9g}): {'yes' if cond else 'no'}")
    family = "B" if cond else "C"
    cond = timing.tau_o >= t + timing.tau_g
    path.append(
        f"tau_o >= T + tau_g ({timing.tau_o:.9g} >= {t + timing.tau_g:.9g}): "
        f"{'yes' if cond else 'no'}"
    )
    path.append(f"regime {family}{'2' if cond else '1'}")
    return path


def denominator_steps(regime: Regime, k_steps: float, m: int, j_steps: float) -> float:
    """Block wall time in units of tau for the given regime."""
    group = regime.formula_group
    if group is Regime.A:
        return k_steps + m + 2.0 * j_steps - 1.0
    if group is Regime.B2:
        return k_steps + m + 3.0 * j_steps - 1.0
    return m + 3.0 * j_steps - 1.0


def _ceil_tol(v: float, tol: float = 1e-9) -> int:
    # guard against float noise pushing an exact integer up by one
    return int(math.ceil(v - tol))


@dataclass(frozen=True)
class IonRequirements:
    n_o: int
    n_m: int
    n_m_is_upper_bound: bool


def ion_requirements(layout: ChainLayout, timing: DerivedTiming,
                     regime: Regime) -> IonRequirements:
    """Per-node ion budgets sufficient for the protocol in the given regime.

    Blind-gating regimes (A, B1, C1) cycle 2jM communication ions and may
    touch up to 2mM memories; the actual memory occupancy can be smaller, so
    that figure is an upper bound. Wait-for-herald regimes (B2, C2) park
    attempts for k steps, needing 2(Mk + j) comm ions, but load exactly one
    memory pair per link per cycle, capping memories at 2m.
    """
    m = layout.time_mux
    big_m = layout.spatial_mux
    if regime.formula_group is Regime.B2:
        n_o = _ceil_tol(2.0 * (big_m * timing.k_steps + timing.j_steps))
        return IonRequirements(n_o=n_o, n_m=2 * m, n_m_is_upper_bound=False)
    n_o = _ceil_tol(2.0 * big_m * timing.j_steps)
    return IonRequirements(n_o=n_o, n_m=2 * big_m * m, n_m_is_upper_bound=True)


def block_success_prob(p: float, spatial_mux: int, time_mux: int, n_repeaters: int) -> float:
    """Probability that all n+1 links herald at least one pair in one block."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    per_link = -math.expm1(spatial_mux * time_mux * math.log1p(-p)) if p < 1.0 else 1.0
    if per_link <= 0.0:
        return 0.0
    return math.exp((n_repeaters + 1) * math.log(per_link))


def plob_bound(eta: float, spatial_mux: int, tau_s: float) -> float:
    """Repeaterless capacity of M parallel pure-loss channels, in ebits/s."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"transmissivity must be in (0, 1), got {eta}")
    return -spatial_mux / tau_s * math.log1p(-eta) / math.log(2.0)


def reference_rates(n: int, m: int, spatial_mux: int, p: float, q: float,
                    tau_s: float) -> tuple[float, float, float, float]:
    """Rates of the non-blocked reference schemes, (R0, R1, R2, R).

    R0 demands every link succeed in a single shot, R1 adds spatial modes,
    R2 pools m cycles, and R combines both poolings. q is the memory-swap
    success probability per node (1 for deterministic ion-ion gates).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    qn = q ** n
    r0 = p ** (n + 1) * qn / tau_s
    r1 = block_success_prob(p, spatial_mux, 1, n) * qn / tau_s
    r2 = block_success_prob(p, 1, m, n) * qn / (m * tau_s)
    r = block_success_prob(p, spatial_mux, m, n) * qn / (m * tau_s)
    return r0, r1, r2, r


@dataclass(frozen=True)
class RateReport:
    """Everything evaluate_rate knows about one operating point."""

    regime: Regime
    p: float
    timing: DerivedTiming
    denominator_steps: float
    denominator_s: float
    block_success: float
    ideal_rate: float
    f_end: float
    rci: float
    noisy_rate: float
    n_o: int
    n_m: int
    n_m_is_upper_bound: bool

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "p": self.p,
            "heralding_time_s": self.timing.heralding_time_s,
            "j_steps": self.timing.j_steps,
            "k_steps": self.timing.k_steps,
            "denominator_steps": self.denominator_steps,
            "denominator_s": self.denominator_s,
            "block_success": self.block_success,
            "ideal_rate": self.ideal_rate,
            "f_end": self.f_end,
            "rci": self.rci,
            "noisy_rate": self.noisy_rate,
            "n_o": self.n_o,
            "n_m": self.n_m,
            "n_m_is_upper_bound": self.n_m_is_upper_bound,
        }


def evaluate_rate(layout: ChainLayout, hw: HardwareProfile) -> RateReport:
    """Rate and resource report for one fully specified operating point.

    Raises FeasibilityError when the memory lifetime cannot cover the block
    (tau_m must be at least memory_margin times the block duration).
    """
    layout.validate()
    hw.validate()
    timing = derive_timing(layout, hw)
    regime = classify_regime(hw.timing, timing.heralding_time_s)
    den_steps = denominator_steps(regime, timing.k_steps, layout.time_mux,
                                  timing.j_steps)
    den_s = den_steps * hw.timing.tau
    required_tau_m = hw.memory_margin * den_s
    if hw.timing.tau_m < required_tau_m:
        raise FeasibilityError(
            "tau_m",
            f"memory lifetime tau_m={hw.timing.tau_m:.6g} s cannot cover the block: "
            f"need at least {required_tau_m:.6g} s "
            f"({hw.memory_margin:g} x {den_s:.6g} s)",
        )
    p = link_success_prob(hw.optical, layout.link_length_km)
    blk = block_success_prob(p, layout.spatial_mux, layout.time_mux,
                             layout.n_repeaters)
    ideal = blk / den_s
    f_end = end_to_end_fidelity(layout.n_repeaters, hw.noise)
    rci = werner_rci(f_end)
    ions = ion_requirements(layout, timing, regime)
    return RateReport(
        regime=regime,
        p=p,
        timing=timing,
        denominator_steps=den_steps,
        denominator_s=den_s,
        block_success=blk,
        ideal_rate=ideal,
        f_end=f_end.fidelity,
        rci=rci,
        noisy_rate=ideal * max(0.0, rci),
        n_o=ions.n_o,
        n_m=ions.n_m,
        n_m_is_upper_bound=ions.n_m_is_upper_bound,
    )
