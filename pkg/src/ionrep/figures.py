"""Canned distance-sweep families for the figure subcommand.

Each figure id maps to a fixed set of curves. A curve is a distance sweep of
the optimizer under specific hardware overrides and constraints, reduced to
one value column; the CSV layout is shared with the plain sweep subcommand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .model import HardwareProfile
from .optimize import Constraints, SearchBounds, SweepRow, sweep_distance

CSV_COLUMNS = ("L_km", "value", "regime", "n_opt", "m_opt", "N_o", "N_m", "plob")


@dataclass(frozen=True)
class Curve:
    label: str
    value_field: str  # noisy_rate | m_opt | n_opt | n_o | n_m
    spatial_mux: int
    hw_overrides: dict = field(default_factory=dict)
    constraints: Optional[Constraints] = None


def _noise_knob(eps: float) -> dict:
    # one dial: gate infidelity and raw-pair infidelity move together
    return {"eps_g": eps, "f0": 1.0 - eps}


def _eps_label(eps: float) -> str:
    return "0" if eps == 0 else f"{eps:.0e}"


def _mux_noise_family(value_field: str) -> list[Curve]:
    return [
        Curve(label=f"M{mux}_eps{_eps_label(eps)}", value_field=value_field,
              spatial_mux=mux, hw_overrides=_noise_knob(eps))
        for mux in (1, 5, 10)
        for eps in (0.0, 1e-4, 1e-3)
    ]


def _figures() -> dict[str, tuple[str, list[Curve]]]:
    figs = {
        "fig2": ("optimized rate vs distance", _mux_noise_family("noisy_rate")),
        "fig3": ("optimal time multiplexing vs distance", _mux_noise_family("m_opt")),
        "fig4": ("optimal repeater count vs distance", _mux_noise_family("n_opt")),
        "fig5": ("communication ions per node vs distance", _mux_noise_family("n_o")),
        "fig6": ("memory ions per node vs distance", _mux_noise_family("n_m")),
        "fig7": ("rate vs distance with 10x slower gates", [
            Curve(label=f"M{mux}", value_field="noisy_rate", spatial_mux=mux,
                  hw_overrides={"tau_g": 10e-6, **_noise_knob(1e-4)})
            for mux in (1, 5, 10)
        ]),
        "fig8": ("rate vs distance at fixed repeater spacing", [
            Curve(label=f"L0_{l0:g}km", value_field="noisy_rate", spatial_mux=10,
                  hw_overrides=_noise_knob(1e-4),
                  constraints=Constraints(fixed_l0_km=l0))
            for l0 in (2.0, 5.0, 10.0, 20.0)
        ]),
        "fig9": ("rate vs distance under ion-count caps", [
            Curve(label="Nomax125_M1_tau1us", value_field="noisy_rate",
                  spatial_mux=1, hw_overrides=_noise_knob(1e-4),
                  constraints=Constraints(n_o_max=125)),
            Curve(label="Nomax125_M5_tau1us", value_field="noisy_rate",
                  spatial_mux=5, hw_overrides=_noise_knob(1e-4),
                  constraints=Constraints(n_o_max=125)),
            # slower clock trades gate-time ratio for more spatial modes
            Curve(label="Nomax125_M50_tau10us", value_field="noisy_rate",
                  spatial_mux=50,
                  hw_overrides={"tau": 10e-6, **_noise_knob(1e-4)},
                  constraints=Constraints(n_o_max=125)),
        ] + [
            Curve(label=f"Nmmax{cap}_M5", value_field="noisy_rate",
                  spatial_mux=5, hw_overrides=_noise_knob(1e-4),
                  constraints=Constraints(n_m_max=cap))
            for cap in (20, 40, 60, 100)
        ]),
    }
    return figs


FIGURES = _figures()


def curve_rows(curve: Curve, l_list: list[float], hw: HardwareProfile,
               bounds: Optional[SearchBounds], threads: Optional[int]) -> list[dict]:
    """Sweep one curve and reduce each row to the shared CSV columns."""
    hw_c = hw.updated(**curve.hw_overrides) if curve.hw_overrides else hw
    rows = sweep_distance(l_list, curve.spatial_mux, hw_c, bounds,
                          curve.constraints, threads=threads)
    return [reduce_row(row, curve.value_field) for row in rows]


def reduce_row(row: SweepRow, value_field: str) -> dict:
    if row.result is None:
        return {"L_km": row.l_km, "value": math.nan, "regime": "",
                "n_opt": math.nan, "m_opt": math.nan, "N_o": math.nan,
                "N_m": math.nan, "plob": row.plob}
    rep = row.result.report
    values = {
        "noisy_rate": rep.noisy_rate,
        "m_opt": row.result.m_opt,
        "n_opt": row.result.n_opt,
        "n_o": rep.n_o,
        "n_m": rep.n_m,
    }
    return {
        "L_km": row.l_km,
        "value": values[value_field],
        "regime": rep.regime.value,
        "n_opt": row.result.n_opt,
        "m_opt": row.result.m_opt,
        "N_o": rep.n_o,
        "N_m": rep.n_m,
        "plob": row.plob,
    }
