"""Grid search for the best repeater count and time-multiplexing block.

The objective (noisy rate) is cheap to evaluate and not provably unimodal,
so the search is an exhaustive scan over n x m, vectorized over the whole
grid. Ties are broken toward smaller n, then smaller m, which a row-major
argmax gives for free; that also makes the result independent of any
parallel evaluation order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import (
    ChainLayout,
    HardwareProfile,
    fiber_transmissivity,
    heralding_time,
)
from .rates import RateReport, evaluate_rate, plob_bound


class InfeasibleError(Exception):
    """No grid point satisfies the constraint set."""

    def __init__(self, binding: list[str], message: str):
        super().__init__(message)
        self.binding = binding


@dataclass(frozen=True)
class SearchBounds:
    n_max: int = 600
    m_max: int = 2000

    def validate(self) -> None:
        if self.n_max < 0 or self.m_max < 1:
            raise ValueError(
                f"bounds must allow n >= 0 and m >= 1, got {self}")


@dataclass(frozen=True)
class Constraints:
    n_o_max: Optional[int] = None
    n_m_max: Optional[int] = None
    fixed_l0_km: Optional[float] = None
    fixed_n: Optional[int] = None
    tau_min: Optional[float] = None

    def validate(self) -> None:
        if self.fixed_l0_km is not None and self.fixed_n is not None:
            raise ValueError("at most one of fixed_l0_km and fixed_n may be set")
        for name in ("n_o_max", "n_m_max"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be positive, got {v}")
        if self.fixed_l0_km is not None and self.fixed_l0_km <= 0:
            raise ValueError(f"fixed_l0_km must be positive, got {self.fixed_l0_km}")
        if self.fixed_n is not None and self.fixed_n < 0:
            raise ValueError(f"fixed_n must be >= 0, got {self.fixed_n}")
        if self.tau_min is not None and self.tau_min <= 0:
            raise ValueError(f"tau_min must be positive, got {self.tau_min}")


@dataclass(frozen=True)
class OptimizationResult:
    n_opt: int
    m_opt: int
    report: RateReport
    boundary_hit_n: bool
    boundary_hit_m: bool
    evaluations: int


def _candidate_ns(l_km: float, bounds: SearchBounds,
                  constraints: Constraints) -> np.ndarray:
    if constraints.fixed_n is not None:
        return np.array([constraints.fixed_n], dtype=np.int64)
    if constraints.fixed_l0_km is not None:
        n = max(0, round(l_km / constraints.fixed_l0_km) - 1)
        return np.array([n], dtype=np.int64)
    return np.arange(0, bounds.n_max + 1, dtype=np.int64)


def _rci_per_n(ns: np.ndarray, hw: HardwareProfile) -> np.ndarray:
    x = 1.0 - 2.0 * hw.noise.eps_g - (4.0 / 3.0) * (1.0 - hw.noise.f0)
    q = 0.5 * (1.0 - np.power(x, ns.astype(np.float64)))
    f = 1.0 - 1.5 * q
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -f * np.log2(f) - (1.0 - f) * np.log2((1.0 - f) / 3.0)
    return np.where(f >= 1.0, 1.0, 1.0 - h)


def optimize_rate(l_km: float, spatial_mux: int, hw: HardwareProfile,
                  bounds: Optional[SearchBounds] = None,
                  constraints: Optional[Constraints] = None) -> OptimizationResult:
    """Exhaustive argmax of the noisy rate over the (n, m) grid.

    Constraint handling: n_o_max and n_m_max compare against the regime's
    ion requirements at each grid point, tau_min requires the clock to be at
    least that long, fixed_l0_km / fixed_n pin the repeater count, and the
    memory-lifetime check prunes blocks that outlive tau_m. An empty feasible
    set raises InfeasibleError naming the constraints that removed points.
    """
    bounds = bounds or SearchBounds()
    constraints = constraints or Constraints()
    bounds.validate()
    constraints.validate()
    hw.validate()
    if l_km <= 0:
        raise ValueError(f"l_km must be positive, got {l_km}")
    if spatial_mux < 1:
        raise ValueError(f"spatial_mux must be >= 1, got {spatial_mux}")

    binding: dict[str, int] = {}
    if constraints.tau_min is not None and hw.timing.tau < constraints.tau_min:
        raise InfeasibleError(
            ["tau_min"],
            f"clock cycle {hw.timing.tau:.6g} s is below tau_min "
            f"{constraints.tau_min:.6g} s; no grid point is feasible",
        )

    tm = hw.timing
    ns = _candidate_ns(l_km, bounds, constraints)
    ms = np.arange(1, bounds.m_max + 1, dtype=np.int64)
    m_count = ms.size

    l0 = l_km / (ns + 1.0)
    t_herald = l0 * hw.optical.refractive_index / 299792.458
    k = t_herald / tm.tau
    j = tm.tau_g / tm.tau
    # regime formula groups per n
    is_a = (t_herald >= tm.tau_o) | (
        (t_herald >= tm.tau_g) & (tm.tau_o < t_herald + tm.tau_g))
    is_b2 = (t_herald < tm.tau_o) & (tm.tau_o >= t_herald + tm.tau_g)
    # remaining rows are C1
    den_base = np.where(is_a, k + 2.0 * j, np.where(is_b2, k + 3.0 * j, 3.0 * j))
    den_steps = den_base[:, None] + ms[None, :] - 1.0

    feasible = np.ones((ns.size, m_count), dtype=bool)
    mem_ok = hw.memory_margin * den_steps * tm.tau <= tm.tau_m
    if not mem_ok.all():
        binding["tau_m"] = int((~mem_ok).sum())
    feasible &= mem_ok

    n_o = np.where(
        is_b2,
        np.ceil(2.0 * (spatial_mux * k + j) - 1e-9),
        np.ceil(2.0 * spatial_mux * j - 1e-9),
    ).astype(np.int64)
    if constraints.n_o_max is not None:
        ok = n_o <= constraints.n_o_max
        if not ok.all():
            binding["n_o_max"] = int(((~ok)[:, None] * np.ones(m_count, bool)).sum())
        feasible &= ok[:, None]
    n_m_factor = np.where(is_b2, 2, 2 * spatial_mux)
    n_m = n_m_factor[:, None] * ms[None, :]
    if constraints.n_m_max is not None:
        ok = n_m <= constraints.n_m_max
        if not ok.all():
            binding["n_m_max"] = int((~ok).sum())
        feasible &= ok

    p = (0.5 * hw.optical.eta_c ** 2 * hw.optical.eta_d ** 2
         * 10.0 ** (-hw.optical.alpha_db_per_km * l0 / 10.0))
    with np.errstate(divide="ignore"):
        per_link = -np.expm1(spatial_mux * ms[None, :] * np.log1p(-p[:, None]))
        block = np.exp((ns + 1.0)[:, None] * np.log(per_link))
    rci = np.maximum(0.0, _rci_per_n(ns, hw))
    rate = block / (den_steps * tm.tau) * rci[:, None]

    evaluations = int(feasible.sum())
    if evaluations == 0:
        names = sorted(binding) or ["(empty grid)"]
        detail = ", ".join(f"{name} removed {binding.get(name, 0)} points"
                           for name in names)
        raise InfeasibleError(names, f"no feasible (n, m) grid point: {detail}")

    rate = np.where(feasible, rate, -1.0)
    flat = int(np.argmax(rate))  # row-major: smallest n, then smallest m, on ties
    ni, mi = divmod(flat, m_count)
    n_opt = int(ns[ni])
    m_opt = int(ms[mi])
    report = evaluate_rate(
        ChainLayout(total_distance_km=l_km, n_repeaters=n_opt,
                    spatial_mux=spatial_mux, time_mux=m_opt), hw)
    pinned = constraints.fixed_n is not None or constraints.fixed_l0_km is not None
    return OptimizationResult(
        n_opt=n_opt,
        m_opt=m_opt,
        report=report,
        boundary_hit_n=(not pinned) and n_opt == bounds.n_max,
        boundary_hit_m=m_opt == bounds.m_max,
        evaluations=evaluations,
    )


@dataclass(frozen=True)
class SweepRow:
    l_km: float
    result: Optional[OptimizationResult]
    plob: float
    infeasible_reason: Optional[str] = None


def _sweep_point(l_km: float, spatial_mux: int, hw: HardwareProfile,
                 bounds: Optional[SearchBounds],
                 constraints: Optional[Constraints]) -> SweepRow:
    eta = fiber_transmissivity(hw.optical.alpha_db_per_km, l_km)
    plob = plob_bound(eta, spatial_mux, hw.timing.tau) if eta < 1.0 else math.inf
    try:
        res = optimize_rate(l_km, spatial_mux, hw, bounds, constraints)
    except InfeasibleError as err:
        return SweepRow(l_km=l_km, result=None, plob=plob,
                        infeasible_reason=str(err))
    return SweepRow(l_km=l_km, result=res, plob=plob)


def sweep_distance(l_list: Sequence[float], spatial_mux: int, hw: HardwareProfile,
                   bounds: Optional[SearchBounds] = None,
                   constraints: Optional[Constraints] = None,
                   threads: Optional[int] = None) -> list[SweepRow]:
    """Optimize at each distance; infeasible points become flagged rows."""
    ls = list(l_list)
    if not ls:
        raise ValueError("l_list must be nonempty")
    if any(b <= a for a, b in zip(ls, ls[1:])):
        raise ValueError("l_list must be strictly increasing")
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(
                lambda l: _sweep_point(l, spatial_mux, hw, bounds, constraints), ls))
    return [_sweep_point(l, spatial_mux, hw, bounds, constraints) for l in ls]


def crossover_distance(spatial_mux: int, hw: HardwareProfile,
                       bounds: Optional[SearchBounds] = None,
                       l_min_km: float = 10.0, l_max_km: float = 500.0,
                       l_step_km: float = 1.0) -> Optional[float]:
    """Smallest grid distance where the optimized rate beats the PLOB bound.

    The advantage sets in at long distances and persists, so a bisection over
    the grid suffices; the step below the reported distance is re-checked to
    guard against a non-monotone edge. Returns None when no grid point wins.
    """
    grid = np.arange(l_min_km, l_max_km + 0.5 * l_step_km, l_step_km)

    def beats(l_km: float) -> bool:
        row = _sweep_point(float(l_km), spatial_mux, hw, bounds, None)
        return row.result is not None and row.result.report.noisy_rate > row.plob

    lo, hi = 0, grid.size - 1
    if not beats(grid[hi]):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if beats(grid[mid]):
            hi = mid
        else:
            lo = mid + 1
    while lo > 0 and beats(grid[lo - 1]):
        lo -= 1
    return float(grid[lo])
