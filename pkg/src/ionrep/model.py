"""Physical parameters and pointwise formulas for dual-species trapped-ion repeater chains.

Everything in this module is a pure function of its inputs: link success
probabilities, signal travel times, Werner-state noise maps, and the reverse
coherent information used to discount noisy rates. Units are kilometers and
seconds throughout; dB enters only through the fiber attenuation coefficient.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

# Vacuum speed of light, km/s.
C_VACUUM_KM_S = 299792.458


class ModelDomainWarning(UserWarning):
    """Inputs left the regime where the closed-form noise model is meaningful."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class OpticalParams:
    """Photon collection, detection, and fiber properties."""

    eta_c: float = 0.3
    eta_d: float = 0.8
    alpha_db_per_km: float = 0.2
    refractive_index: float = 1.47

    def validate(self) -> None:
        _require(0.0 < self.eta_c <= 1.0, f"eta_c must be in (0, 1], got {self.eta_c}")
        _require(0.0 < self.eta_d <= 1.0, f"eta_d must be in (0, 1], got {self.eta_d}")
        _require(self.alpha_db_per_km >= 0.0,
                 f"alpha_db_per_km must be >= 0, got {self.alpha_db_per_km}")
        _require(self.refractive_index >= 1.0,
                 f"refractive_index must be >= 1, got {self.refractive_index}")


@dataclass(frozen=True)
class TimingParams:
    """Clock, gate, and ion-lifetime durations in seconds.

    tau is the entanglement-generation clock cycle, tau_g the two-ion gate plus
    measurement time, tau_o the communication-ion coherence time, and tau_m the
    memory-ion coherence time. A communication ion must survive at least one
    gate, so tau_o > tau_g is required.
    """

    tau: float = 1e-6
    tau_g: float = 1e-6
    tau_o: float = 50e-6
    tau_m: float = 60.0

    def validate(self) -> None:
        for name in ("tau", "tau_g", "tau_o", "tau_m"):
            _require(getattr(self, name) > 0.0,
                     f"{name} must be positive, got {getattr(self, name)}")
        _require(self.tau_o > self.tau_g,
                 f"tau_o must exceed tau_g, got tau_o={self.tau_o}, tau_g={self.tau_g}")


@dataclass(frozen=True)
class NoiseParams:
    """Elementary-link Werner fidelity f0 and two-qubit gate error eps_g."""

    f0: float = 0.9999
    eps_g: float = 1e-4

    def validate(self) -> None:
        _require(0.25 <= self.f0 <= 1.0, f"f0 must be in [0.25, 1], got {self.f0}")
        _require(0.0 <= self.eps_g <= 1.0, f"eps_g must be in [0, 1], got {self.eps_g}")


@dataclass(frozen=True)
class WernerState:
    """Bell-diagonal state with weights (F, (1-F)/3, (1-F)/3, (1-F)/3)."""

    fidelity: float

    def validate(self) -> None:
        _require(0.0 <= self.fidelity <= 1.0,
                 f"fidelity must be in [0, 1], got {self.fidelity}")


@dataclass(frozen=True)
class HardwareProfile:
    """Full hardware description; defaults are the baseline operating point."""

    optical: OpticalParams = field(default_factory=OpticalParams)
    timing: TimingParams = field(default_factory=TimingParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    # Memory feasibility demands tau_m >= memory_margin * block duration.
    memory_margin: float = 10.0

    def validate(self) -> None:
        self.optical.validate()
        self.timing.validate()
        self.noise.validate()
        _require(self.memory_margin >= 1.0,
                 f"memory_margin must be >= 1, got {self.memory_margin}")

    def updated(self, **kwargs: float) -> "HardwareProfile":
        """Return a copy with flat field overrides routed to the right group.

        Accepts any field of OpticalParams, TimingParams, or NoiseParams by
        name, plus memory_margin.
        """
        groups = {"optical": self.optical, "timing": self.timing, "noise": self.noise}
        pending = dict(kwargs)
        out = {}
        for gname, gval in groups.items():
            hits = {k: pending.pop(k) for k in list(pending)
                    if k in gval.__dataclass_fields__}
            out[gname] = replace(gval, **hits) if hits else gval
        margin = pending.pop("memory_margin", self.memory_margin)
        if pending:
            raise ValueError(f"unknown hardware fields: {sorted(pending)}")
        return HardwareProfile(optical=out["optical"], timing=out["timing"],
                               noise=out["noise"], memory_margin=margin)


@dataclass(frozen=True)
class ChainLayout:
    """A chain of n_repeaters equally spaced nodes spanning total_distance_km.

    spatial_mux (M) counts parallel fiber modes per link per clock cycle;
    time_mux (m) is the number of clock cycles pooled into one swap block.
    """

    total_distance_km: float
    n_repeaters: int
    spatial_mux: int = 1
    time_mux: int = 1

    def validate(self) -> None:
        _require(self.total_distance_km > 0.0,
                 f"total_distance_km must be positive, got {self.total_distance_km}")
        _require(int(self.n_repeaters) == self.n_repeaters and self.n_repeaters >= 0,
                 f"n_repeaters must be a nonnegative integer, got {self.n_repeaters}")
        _require(int(self.spatial_mux) == self.spatial_mux and self.spatial_mux >= 1,
                 f"spatial_mux must be a positive integer, got {self.spatial_mux}")
        _require(int(self.time_mux) == self.time_mux and self.time_mux >= 1,
                 f"time_mux must be a positive integer, got {self.time_mux}")

    @property
    def n_links(self) -> int:
        return self.n_repeaters + 1

    @property
    def link_length_km(self) -> float:
        return self.total_distance_km / self.n_links


@dataclass(frozen=True)
class DerivedTiming:
    """Timing quantities implied by a layout: heralding latency and step ratios.

    j_steps = tau_g/tau and k_steps = T/tau are kept real valued; integer
    quantization is the simulator's job, not the analytic model's.
    """

    heralding_time_s: float
    j_steps: float
    k_steps: float


def fiber_transmissivity(alpha_db_per_km: float, length_km: float) -> float:
    """Power transmissivity of a fiber span, 10^(-alpha*length/10)."""
    return 10.0 ** (-alpha_db_per_km * length_km / 10.0)


def link_success_prob(optical: OpticalParams, l0_km: float) -> float:
    """Probability that one link-level heralding attempt over l0_km succeeds.

    One of the two photonic Bell states is distinguishable in linear optics,
    hence the factor 1/2; both photons must be collected and detected.
    """
    optical.validate()
    _require(l0_km >= 0.0, f"l0_km must be >= 0, got {l0_km}")
    eta = fiber_transmissivity(optical.alpha_db_per_km, l0_km)
    return 0.5 * optical.eta_c ** 2 * optical.eta_d ** 2 * eta


def intra_node_success_prob(optical: OpticalParams) -> float:
    """Photonic swap success with no fiber in the path (the l0 = 0 limit)."""
    return link_success_prob(optical, 0.0)


def heralding_time(l0_km: float, refractive_index: float) -> float:
    """One-way classical latency T = l0 / c_fiber in seconds."""
    _require(l0_km >= 0.0, f"l0_km must be >= 0, got {l0_km}")
    _require(refractive_index >= 1.0,
             f"refractive_index must be >= 1, got {refractive_index}")
    return l0_km * refractive_index / C_VACUUM_KM_S


def derive_timing(layout: ChainLayout, hw: HardwareProfile) -> DerivedTiming:
    layout.validate()
    hw.validate()
    t = heralding_time(layout.link_length_km, hw.optical.refractive_index)
    return DerivedTiming(
        heralding_time_s=t,
        j_steps=hw.timing.tau_g / hw.timing.tau,
        k_steps=t / hw.timing.tau,
    )


def apply_swap_gate_noise(state: WernerState, eps_g: float) -> WernerState:
    """Depolarize a Werner state through one noisy swap gate.

    The gate leaves the state untouched with probability 1 - eps_g and
    replaces it with the maximally mixed state otherwise, so the fidelity
    map is affine: F -> (1 - eps_g) F + eps_g/4.
    """
    state.validate()
    _require(0.0 <= eps_g <= 1.0, f"eps_g must be in [0, 1], got {eps_g}")
    return WernerState((1.0 - eps_g) * state.fidelity + eps_g / 4.0)


def compose_gate_errors(eps_1: float, eps_2: float) -> float:
    """Error parameter of two noisy gates in sequence."""
    return 1.0 - (1.0 - eps_1) * (1.0 - eps_2)


def swap_survival_factor(noise: NoiseParams) -> float:
    """Per-swap survival factor x = 1 - 2 eps_g - (4/3)(1 - f0).

    The polarization (1 - 2Q) of the end-to-end error flag shrinks by x at
    every swap. x < 0 means the inputs are outside the Werner regime the
    closed form was derived for; the value is still returned, with a warning.
    """
    x = 1.0 - 2.0 * noise.eps_g - (4.0 / 3.0) * (1.0 - noise.f0)
    if x < 0.0:
        warnings.warn(
            f"swap survival factor x={x:.6g} < 0; noise model outside Werner regime",
            ModelDomainWarning,
            stacklevel=2,
        )
    return x


def end_to_end_Q(n: int, noise: NoiseParams) -> float:
    """Error-flag probability Q(n) = (1 - x^n)/2 after n swaps in a chain."""
    _require(n >= 0, f"n must be >= 0, got {n}")
    noise.validate()
    x = swap_survival_factor(noise)
    return 0.5 * (1.0 - x ** n)


def end_to_end_fidelity(n: int, noise: NoiseParams) -> WernerState:
    """Werner state shared across a chain with n repeaters, F = 1 - (3/2) Q(n)."""
    return WernerState(1.0 - 1.5 * end_to_end_Q(n, noise))


def werner_rci(state: WernerState) -> float:
    """Reverse coherent information of a Werner state, in ebits per pair.

    I_R = H(B) - H(AB) = 1 - (-F log2 F - (1-F) log2((1-F)/3)), with
    0 log 0 = 0. Negative values are meaningful (no distillable entanglement
    is certified); clamping is left to the caller.
    """
    state.validate()
    f = state.fidelity
    h = 0.0
    if f > 0.0:
        h -= f * math.log2(f)
    if f < 1.0:
        h -= (1.0 - f) * math.log2((1.0 - f) / 3.0)
    return 1.0 - h
