"""Integer-step Monte Carlo replay of the multiplexed repeater protocol.

Each block runs m generation slots. Every slot, every node fires up to M
communication-ion attempts per fiber side; a link-level attempt succeeds with
probability p and its herald arrives k steps later. What happens next depends
on whether communication ions live long enough to wait for that herald:

- blind gating (short-lived comm ions): every attempted mode is swapped into
  memory j steps after generation; heralds later decide which single loaded
  pair per link slot survives and the rest are freed.
- wait-for-herald (long-lived comm ions): failed modes are freed when the
  herald arrives at slot+k; the one heralded mode per link is gated into
  memory, occupying its comm ions until slot+k+j.

Occupancy bookkeeping frees ions before the same step's new initializations,
which is what lets a fixed pool of 2jM (blind) or 2(Mk+j) (wait) comm ions
cycle forever. Blocks do not pipeline: a block's wall time in steps equals
its rate denominator and every block starts from empty traps.

Determinism: blocks are simulated in fixed-size chunks; chunk c draws all of
its randomness up front from numpy's default generator seeded with
(seed, c). Merging chunk counters is order-independent, so results are
bit-identical for a given (config, seed) no matter how chunks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import (
    ChainLayout,
    HardwareProfile,
    NoiseParams,
    derive_timing,
    link_success_prob,
    swap_survival_factor,
)
from .rates import RateReport

CHUNK_BLOCKS = 8192
_UNLIMITED = 1 << 30


def _ceil_steps(v: float) -> int:
    return int(math.ceil(v - 1e-9))


@dataclass(frozen=True)
class SimConfig:
    layout: ChainLayout
    j_steps: int
    k_steps: int
    tau_s: float
    tau_o_s: float
    p: float
    n_comm_ions: int = 0  # per node, 0 = unlimited
    n_mem_ions: int = 0
    num_blocks: int = 1
    seed: int = 0
    trace: bool = False

    def validate(self) -> None:
        self.layout.validate()
        if self.j_steps < 1 or self.k_steps < 1:
            raise ValueError(
                f"j_steps and k_steps must be >= 1, got {self.j_steps}, {self.k_steps}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if self.tau_s <= 0 or self.tau_o_s <= 0:
            raise ValueError("tau_s and tau_o_s must be positive")
        if self.num_blocks < 1:
            raise ValueError(f"num_blocks must be >= 1, got {self.num_blocks}")
        if self.n_comm_ions < 0 or self.n_mem_ions < 0:
            raise ValueError("ion pools must be >= 0 (0 means unlimited)")

    @property
    def waits_for_herald(self) -> bool:
        t_q = self.k_steps * self.tau_s
        g_q = self.j_steps * self.tau_s
        return t_q < self.tau_o_s and self.tau_o_s >= t_q + g_q

    @property
    def block_steps(self) -> int:
        """Wall steps per block; equals the regime denominator at integer j, k."""
        m, j, k = self.layout.time_mux, self.j_steps, self.k_steps
        if self.waits_for_herald:
            return m - 1 + k + 3 * j
        return m - 1 + max(j, k) + 2 * j

    @classmethod
    def from_profile(cls, layout: ChainLayout, hw: HardwareProfile,
                     num_blocks: int, seed: int = 0,
                     p_override: Optional[float] = None,
                     n_comm_ions: int = 0, n_mem_ions: int = 0,
                     trace: bool = False) -> "SimConfig":
        timing = derive_timing(layout, hw)
        p = link_success_prob(hw.optical, layout.link_length_km) \
            if p_override is None else p_override
        return cls(
            layout=layout,
            j_steps=_ceil_steps(timing.j_steps),
            k_steps=_ceil_steps(timing.k_steps),
            tau_s=hw.timing.tau,
            tau_o_s=hw.timing.tau_o,
            p=p,
            n_comm_ions=n_comm_ions,
            n_mem_ions=n_mem_ions,
            num_blocks=num_blocks,
            seed=seed,
            trace=trace,
        )


@dataclass(frozen=True)
class SimStats:
    empirical_block_success: float
    empirical_rate: float
    peak_comm_loaded: int
    peak_mem_loaded: int
    peak_heralded: int
    blocks_run: int
    successes: int
    dropped_comm: int
    dropped_mem: int
    block_steps: int
    trace: Optional[list[str]] = None


def _pad_left(link_arr: np.ndarray) -> np.ndarray:
    """Per-node view of a per-link quantity through each node's left side."""
    cb = link_arr.shape[0]
    z = np.zeros((cb, 1), dtype=link_arr.dtype)
    return np.concatenate([z, link_arr], axis=1)


def _pad_right(link_arr: np.ndarray) -> np.ndarray:
    cb = link_arr.shape[0]
    z = np.zeros((cb, 1), dtype=link_arr.dtype)
    return np.concatenate([link_arr, z], axis=1)


def _grant(want_left: np.ndarray, want_right: np.ndarray, used: np.ndarray,
           pool: int) -> tuple[np.ndarray, np.ndarray]:
    # per node, the left fiber side is served before the right one
    budget = np.maximum(pool - used, 0)
    g_left = np.minimum(want_left, budget)
    g_right = np.minimum(want_right, budget - g_left)
    return g_left, g_right


class _ChunkState:
    """Mutable occupancy ledgers for one chunk of concurrently simulated blocks."""

    def __init__(self, cb: int, n_nodes: int, m: int):
        self.used_comm = np.zeros((cb, n_nodes), dtype=np.int32)
        self.used_mem = np.zeros((cb, n_nodes), dtype=np.int32)
        self.heralded = np.zeros((cb, n_nodes), dtype=np.int32)
        # per-slot history needed when the freeing step comes due
        self.att = np.zeros((cb, m + 1, n_nodes - 1), dtype=np.int32)
        self.granted_left = np.zeros((cb, m + 1, n_nodes), dtype=np.int32)
        self.granted_right = np.zeros((cb, m + 1, n_nodes), dtype=np.int32)
        self.eff = np.zeros((cb, m + 1, n_nodes - 1), dtype=np.int32)
        self.cand = np.zeros((cb, m + 1, n_nodes - 1), dtype=np.int32)
        self.link_ok = np.zeros((cb, n_nodes - 1), dtype=bool)
        self.dropped_comm = 0
        self.dropped_mem = 0


def _run_chunk(config: SimConfig, chunk_index: int, cb: int,
               collect_trace: bool):
    lay = config.layout
    n_links = lay.n_links
    n_nodes = n_links + 1
    m, big_m = lay.time_mux, lay.spatial_mux
    j, k = config.j_steps, config.k_steps
    wait = config.waits_for_herald
    pool_c = config.n_comm_ions or _UNLIMITED
    pool_m = config.n_mem_ions or _UNLIMITED

    rng = np.random.default_rng([config.seed, chunk_index])
    draws = rng.random((cb, n_links, m, big_m)) < config.p
    any_succ = draws.any(axis=3)
    first_idx = np.argmax(draws, axis=3)
    # first successful mode per (block, link, slot); M when none succeeded
    fsi = np.where(any_succ, first_idx, big_m).astype(np.int32)
    del draws

    st = _ChunkState(cb, n_nodes, m)
    peaks = np.zeros(3, dtype=np.int64)
    trace: list[str] = []

    def note(step: int, node_vals: np.ndarray, event: str) -> None:
        if not collect_trace:
            return
        for node, count in enumerate(node_vals[0]):
            if count:
                trace.append(f"{step},{node},{event},{int(count)}")

    t_decide = (m - 1 + k + j) if wait else (m - 1 + max(j, k))
    for t in range(t_decide + 1):
        freed_c = np.zeros_like(st.used_comm)
        freed_m = np.zeros_like(st.used_mem)

        if wait:
            s = t - k
            if 0 <= s < m:
                # heralds arrive: free every mode except the one kept for gating
                cand = (fsi[:, :, s] < st.att[:, s]).astype(np.int32)
                st.cand[:, s] = cand
                loser = st.att[:, s] - cand
                freed_c += _pad_left(loser) + _pad_right(loser)
            s = t - k - j
            if 0 <= s < m:
                # gate done on the kept mode: comm ion retires, memory loads
                cand = st.cand[:, s]
                freed_c += _pad_left(cand) + _pad_right(cand)
                g_left, g_right = _grant(_pad_left(cand), _pad_right(cand),
                                         st.used_mem, pool_m)
                pair_ok = cand & np.minimum(g_right[:, :-1], g_left[:, 1:])
                load = _pad_left(pair_ok) + _pad_right(pair_ok)
                st.used_mem += load
                st.heralded += load
                st.link_ok |= pair_ok.astype(bool)
                st.dropped_mem += int((cand - pair_ok).sum())
                note(t, load, "load_mem")
                note(t, load, "herald")
        else:
            s = t - j
            if 0 <= s < m:
                # blind gates complete: comm ions retire, all attempts load
                att = st.att[:, s]
                freed_c += _pad_left(att) + _pad_right(att)
                g_left, g_right = _grant(_pad_left(att), _pad_right(att),
                                         st.used_mem, pool_m)
                st.granted_left[:, s] = g_left
                st.granted_right[:, s] = g_right
                st.eff[:, s] = np.minimum(
                    att, np.minimum(g_right[:, :-1], g_left[:, 1:]))
                load = g_left + g_right
                st.used_mem += load
                st.dropped_mem += int((_pad_left(att) + _pad_right(att) - load).sum())
                note(t, load, "load_mem")
            # keeps run after loads: with k <= j both land on the same step
            # and the heralds are already in hand when the gate finishes
            s = t - max(j, k)
            if 0 <= s < m:
                # keep one surviving pair per link, free the rest of the loads
                surv = (fsi[:, :, s] < st.eff[:, s]).astype(np.int32)
                st.link_ok |= surv.astype(bool)
                kept = _pad_left(surv) + _pad_right(surv)
                freed_m += (st.granted_left[:, s] + st.granted_right[:, s]) - kept
                st.heralded += kept
                note(t, kept, "herald")

        st.used_comm -= freed_c
        st.used_mem -= freed_m
        note(t, freed_c, "free_comm")
        note(t, freed_m, "free_mem")

        if t < m:
            want = np.full((cb, n_nodes), big_m, dtype=np.int32)
            g_left, g_right = _grant(want, want, st.used_comm, pool_c)
            att = np.minimum(g_right[:, :-1], g_left[:, 1:])
            st.att[:, t] = att
            init = _pad_left(att) + _pad_right(att)
            st.used_comm += init
            st.dropped_comm += int((big_m - att).sum())
            note(t, init, "init")

        peaks[0] = max(peaks[0], int(st.used_comm.max()))
        peaks[1] = max(peaks[1], int(st.used_mem.max()))
        peaks[2] = max(peaks[2], int(st.heralded.max()))
        if collect_trace:
            note(t, st.used_comm, "comm_loaded")
            note(t, st.used_mem, "mem_loaded")
            note(t, st.heralded, "heralded")

    successes = int(st.link_ok.all(axis=1).sum())
    return successes, peaks, st.dropped_comm, st.dropped_mem, trace


def run_protocol_sim(config: SimConfig) -> SimStats:
    """Simulate num_blocks independent protocol blocks and tally statistics.

    Pool exhaustion never aborts a block; starved attempts are counted in
    dropped_comm / dropped_mem. The optional trace covers block 0 only, as
    CSV lines "step,node,event,count" (counts of zero are omitted except for
    the per-step gauge events comm_loaded / mem_loaded / heralded, which are
    emitted whenever nonzero).
    """
    config.validate()
    total = config.num_blocks
    successes = 0
    dropped_c = 0
    dropped_m = 0
    peaks = np.zeros(3, dtype=np.int64)
    trace: Optional[list[str]] = ["step,node,event,count"] if config.trace else None
    done = 0
    chunk_index = 0
    while done < total:
        cb = min(CHUNK_BLOCKS, total - done)
        s, pk, dc, dm, tr = _run_chunk(
            config, chunk_index, cb,
            collect_trace=config.trace and chunk_index == 0)
        successes += s
        dropped_c += dc
        dropped_m += dm
        peaks = np.maximum(peaks, pk)
        if trace is not None and tr:
            trace.extend(tr)
        done += cb
        chunk_index += 1

    steps = config.block_steps
    return SimStats(
        empirical_block_success=successes / total,
        empirical_rate=successes / (total * steps * config.tau_s),
        peak_comm_loaded=int(peaks[0]),
        peak_mem_loaded=int(peaks[1]),
        peak_heralded=int(peaks[2]),
        blocks_run=total,
        successes=successes,
        dropped_comm=dropped_c,
        dropped_mem=dropped_m,
        block_steps=steps,
        trace=trace,
    )


@dataclass(frozen=True)
class ValidationVerdict:
    passed: bool
    z_score: float
    expected_block_success: float
    observed_block_success: float
    checks: list[str]
    quantization_delta_n_o: int


def validate_against_analytic(config: SimConfig, report: RateReport,
                              sigma: float = 3.0) -> ValidationVerdict:
    """Run the simulator and compare it against an analytic RateReport.

    Block success must sit within sigma binomial standard deviations of the
    analytic value; occupancy peaks must respect the ion requirements, with
    equality demanded where the requirement is exact (blind-regime comm ions
    once m >= j, so the pipeline saturates).
    """
    stats = run_protocol_sim(config)
    expected = report.block_success
    sd = math.sqrt(max(expected * (1.0 - expected), 0.0) / config.num_blocks)
    diff = abs(stats.empirical_block_success - expected)
    z = diff / sd if sd > 0 else (0.0 if diff == 0 else math.inf)
    ok = z <= sigma
    checks = [f"block success: observed {stats.empirical_block_success:.6g} "
              f"vs analytic {expected:.6g}, z = {z:.3g}"]

    lay = config.layout
    m, big_m, j, k = lay.time_mux, lay.spatial_mux, config.j_steps, config.k_steps
    if config.waits_for_herald:
        cap = 2 * (big_m * k + j)
        delta = cap - report.n_o
        comm_ok = stats.peak_comm_loaded <= cap
        checks.append(f"comm peak {stats.peak_comm_loaded} <= 2(Mk+j) = {cap}: "
                      f"{'ok' if comm_ok else 'FAIL'}")
        mem_ok = stats.peak_mem_loaded <= 2 * m
        checks.append(f"mem peak {stats.peak_mem_loaded} <= 2m = {2 * m}: "
                      f"{'ok' if mem_ok else 'FAIL'}")
    else:
        cap = 2 * big_m * min(j, m)
        delta = 2 * big_m * j - report.n_o
        comm_ok = stats.peak_comm_loaded == cap
        checks.append(f"comm peak {stats.peak_comm_loaded} == 2M min(j, m) = {cap}: "
                      f"{'ok' if comm_ok else 'FAIL'}")
        mem_ok = stats.peak_mem_loaded <= 2 * big_m * m
        checks.append(f"mem peak {stats.peak_mem_loaded} <= 2Mm = {2 * big_m * m}: "
                      f"{'ok' if mem_ok else 'FAIL'}")
    her_ok = stats.peak_heralded <= 2 * m
    checks.append(f"heralded peak {stats.peak_heralded} <= 2m = {2 * m}: "
                  f"{'ok' if her_ok else 'FAIL'}")
    pools_ok = True
    if config.n_comm_ions:
        pools_ok &= stats.peak_comm_loaded <= config.n_comm_ions
    if config.n_mem_ions:
        pools_ok &= stats.peak_mem_loaded <= config.n_mem_ions

    return ValidationVerdict(
        passed=ok and comm_ok and mem_ok and her_ok and pools_ok,
        z_score=z,
        expected_block_success=expected,
        observed_block_success=stats.empirical_block_success,
        checks=checks,
        quantization_delta_n_o=int(delta),
    )


def sample_end_to_end_Q(n: int, noise: NoiseParams, trials: int,
                        seed: int = 0) -> float:
    """Monte Carlo estimate of the end-to-end error-flag probability Q(n).

    Each swap flips a two-valued error flag with probability (1 - x)/2, so
    the flag's polarization contracts by x per hop and the odd-flip
    probability converges to Q(n).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    x = swap_survival_factor(noise)
    if abs(x) > 1.0:
        raise ValueError(f"survival factor x={x:.6g} outside [-1, 1]; "
                         "flip probability undefined")
    if n == 0:
        return 0.0
    flip_p = 0.5 * (1.0 - x)
    rng = np.random.default_rng([seed])
    odd = 0
    chunk = 100_000
    left = trials
    while left > 0:
        rows = min(chunk, left)
        flips = rng.random((rows, n)) < flip_p
        odd += int((flips.sum(axis=1) % 2 == 1).sum())
        left -= rows
    return odd / trials
