"""Command-line front end.

One JSON config document drives every subcommand; flags override file values,
which override baseline defaults. All numeric output passes through a single
9-significant-digit formatter so text, JSON, and CSV renderings of the same
result carry identical values, and a fixed seed reproduces identical bytes.
Times cross this interface in microseconds and are converted to seconds
internally. NaN is spelled "nan" in every format (JSON has no NaN literal).

Exit codes: 0 success, 2 config error, 3 infeasible, 4 validation failure.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from typing import Optional

from .figures import CSV_COLUMNS, FIGURES, curve_rows, reduce_row
from .mcsim import SimConfig, run_protocol_sim, validate_against_analytic
from .model import (
    ChainLayout,
    HardwareProfile,
    NoiseParams,
    OpticalParams,
    TimingParams,
    heralding_time,
)
from .optimize import (
    Constraints,
    InfeasibleError,
    SearchBounds,
    optimize_rate,
    sweep_distance,
)
from .rates import FeasibilityError, RateReport, classification_path, evaluate_rate

SPEC_VERSION = "1"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_VALIDATION = 4

US = 1e-6

DEFAULTS: dict = {
    "hardware": {
        "eta_c": 0.3,
        "eta_d": 0.8,
        "alpha_db_per_km": 0.2,
        "refractive_index": 1.47,
        "tau_us": 1.0,
        "tau_g_us": 1.0,
        "tau_o_us": 50.0,
        "tau_m_us": 6e7,
        "f0": 0.9999,
        "eps_g": 1e-4,
        "memory_margin": 10.0,
    },
    "layout": {"l_km": 150.0, "n": None, "spatial_mux": 10, "time_mux": None},
    "sweep": {"l_min_km": 10.0, "l_max_km": 500.0, "l_step_km": 10.0,
              "l_list_km": None},
    "bounds": {"n_max": 600, "m_max": 2000},
    "constraints": {"n_o_max": None, "n_m_max": None, "fixed_l0_km": None,
                    "fixed_n": None, "tau_min_us": None},
    "sim": {"num_blocks": 100000, "n_comm_ions": 0, "n_mem_ions": 0,
            "p_override": None},
    "output": {"format": "text", "path": None, "dir": "."},
    "seed": 0,
    "threads": None,
}

# field -> (kind, nullable); kind: num, int, str, fmt, numlist
_SCHEMA: dict = {
    "hardware": {k: ("num", False) for k in DEFAULTS["hardware"]},
    "layout": {"l_km": ("num", False), "n": ("int", True),
               "spatial_mux": ("int", False), "time_mux": ("int", True)},
    "sweep": {"l_min_km": ("num", False), "l_max_km": ("num", False),
              "l_step_km": ("num", False), "l_list_km": ("numlist", True)},
    "bounds": {"n_max": ("int", False), "m_max": ("int", False)},
    "constraints": {"n_o_max": ("int", True), "n_m_max": ("int", True),
                    "fixed_l0_km": ("num", True), "fixed_n": ("int", True),
                    "tau_min_us": ("num", True)},
    "sim": {"num_blocks": ("int", False), "n_comm_ions": ("int", False),
            "n_mem_ions": ("int", False), "p_override": ("num", True)},
    "output": {"format": ("fmt", False), "path": ("str", True),
               "dir": ("str", False)},
    "seed": ("int", False),
    "threads": ("int", True),
}

# argparse dest -> config path
_FLAG_MAP: dict = {
    "eta_c": ("hardware", "eta_c"),
    "eta_d": ("hardware", "eta_d"),
    "alpha_db_per_km": ("hardware", "alpha_db_per_km"),
    "refractive_index": ("hardware", "refractive_index"),
    "tau_us": ("hardware", "tau_us"),
    "tau_g_us": ("hardware", "tau_g_us"),
    "tau_o_us": ("hardware", "tau_o_us"),
    "tau_m_us": ("hardware", "tau_m_us"),
    "f0": ("hardware", "f0"),
    "eps_g": ("hardware", "eps_g"),
    "memory_margin": ("hardware", "memory_margin"),
    "l_km": ("layout", "l_km"),
    "n": ("layout", "n"),
    "spatial_mux": ("layout", "spatial_mux"),
    "time_mux": ("layout", "time_mux"),
    "l_min_km": ("sweep", "l_min_km"),
    "l_max_km": ("sweep", "l_max_km"),
    "l_step_km": ("sweep", "l_step_km"),
    "l_list_km": ("sweep", "l_list_km"),
    "n_max": ("bounds", "n_max"),
    "m_max": ("bounds", "m_max"),
    "n_o_max": ("constraints", "n_o_max"),
    "n_m_max": ("constraints", "n_m_max"),
    "fixed_l0_km": ("constraints", "fixed_l0_km"),
    "fixed_n": ("constraints", "fixed_n"),
    "tau_min_us": ("constraints", "tau_min_us"),
    "num_blocks": ("sim", "num_blocks"),
    "n_comm_ions": ("sim", "n_comm_ions"),
    "n_mem_ions": ("sim", "n_mem_ions"),
    "p_override": ("sim", "p_override"),
    "format": ("output", "format"),
    "output": ("output", "path"),
    "out_dir": ("output", "dir"),
    "seed": ("seed",),
    "threads": ("threads",),
}


class CliError(Exception):
    def __init__(self, code: int, message: str, binding: Optional[list] = None):
        super().__init__(message)
        self.code = code
        self.binding = binding


def _check_value(path: str, value, kind: str, nullable: bool) -> None:
    if value is None:
        if nullable:
            return
        raise CliError(EXIT_CONFIG, f"config field {path} must not be null")
    if kind == "num":
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind == "int":
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif kind == "str":
        ok = isinstance(value, str)
    elif kind == "fmt":
        ok = value in ("text", "json", "csv")
    elif kind == "numlist":
        ok = (isinstance(value, list) and
              all(isinstance(v, (int, float)) and not isinstance(v, bool)
                  for v in value))
    else:  # pragma: no cover
        raise AssertionError(kind)
    if not ok:
        raise CliError(EXIT_CONFIG,
                       f"config field {path} has invalid value {value!r} "
                       f"(expected {kind})")


def _check_config(user: dict) -> None:
    if not isinstance(user, dict):
        raise CliError(EXIT_CONFIG, "config root must be a JSON object")
    for key, value in user.items():
        if key not in _SCHEMA:
            raise CliError(EXIT_CONFIG, f"unknown config key: {key}")
        spec = _SCHEMA[key]
        if isinstance(spec, dict):
            if not isinstance(value, dict):
                raise CliError(EXIT_CONFIG, f"config section {key} must be an object")
            for field, fval in value.items():
                if field not in spec:
                    raise CliError(EXIT_CONFIG, f"unknown config key: {key}.{field}")
                kind, nullable = spec[field]
                _check_value(f"{key}.{field}", fval, kind, nullable)
        else:
            kind, nullable = spec
            _check_value(key, value, kind, nullable)


def load_config(path: Optional[str], flags: argparse.Namespace) -> dict:
    """defaults <- config file <- command-line flags."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                user = json.load(fh)
        except OSError as err:
            raise CliError(EXIT_CONFIG, f"cannot read config: {err}")
        except json.JSONDecodeError as err:
            raise CliError(EXIT_CONFIG, f"config is not valid JSON: {err}")
        _check_config(user)
        for key, value in user.items():
            if isinstance(value, dict):
                cfg[key].update(value)
            else:
                cfg[key] = value
    for dest, where in _FLAG_MAP.items():
        value = getattr(flags, dest, None)
        if value is None:
            continue
        node = cfg
        for part in where[:-1]:
            node = node[part]
        node[where[-1]] = value
    return cfg


def make_hardware(cfg: dict) -> HardwareProfile:
    h = cfg["hardware"]
    hw = HardwareProfile(
        optical=OpticalParams(eta_c=h["eta_c"], eta_d=h["eta_d"],
                              alpha_db_per_km=h["alpha_db_per_km"],
                              refractive_index=h["refractive_index"]),
        timing=TimingParams(tau=h["tau_us"] * US, tau_g=h["tau_g_us"] * US,
                            tau_o=h["tau_o_us"] * US, tau_m=h["tau_m_us"] * US),
        noise=NoiseParams(f0=h["f0"], eps_g=h["eps_g"]),
        memory_margin=h["memory_margin"],
    )
    try:
        hw.validate()
    except ValueError as err:
        raise CliError(EXIT_CONFIG, f"invalid hardware config: {err}")
    return hw


def make_layout(cfg: dict, need_n: bool = True, need_m: bool = True) -> ChainLayout:
    lay = cfg["layout"]
    if need_n and lay["n"] is None:
        raise CliError(EXIT_CONFIG, "config field layout.n is required here")
    if need_m and lay["time_mux"] is None:
        raise CliError(EXIT_CONFIG, "config field layout.time_mux is required here")
    layout = ChainLayout(total_distance_km=lay["l_km"],
                         n_repeaters=lay["n"] if lay["n"] is not None else 0,
                         spatial_mux=lay["spatial_mux"],
                         time_mux=lay["time_mux"] if lay["time_mux"] is not None else 1)
    try:
        layout.validate()
    except ValueError as err:
        raise CliError(EXIT_CONFIG, f"invalid layout config: {err}")
    return layout


def make_bounds(cfg: dict) -> SearchBounds:
    return SearchBounds(n_max=cfg["bounds"]["n_max"], m_max=cfg["bounds"]["m_max"])


def make_constraints(cfg: dict) -> Optional[Constraints]:
    c = cfg["constraints"]
    if all(v is None for v in c.values()):
        return None
    cons = Constraints(
        n_o_max=c["n_o_max"], n_m_max=c["n_m_max"],
        fixed_l0_km=c["fixed_l0_km"], fixed_n=c["fixed_n"],
        tau_min=None if c["tau_min_us"] is None else c["tau_min_us"] * US)
    try:
        cons.validate()
    except ValueError as err:
        raise CliError(EXIT_CONFIG, f"invalid constraints config: {err}")
    return cons


def make_l_grid(cfg: dict) -> list[float]:
    sw = cfg["sweep"]
    if sw["l_list_km"] is not None:
        return [float(v) for v in sw["l_list_km"]]
    lo, hi, step = sw["l_min_km"], sw["l_max_km"], sw["l_step_km"]
    if step <= 0 or lo <= 0 or hi < lo:
        raise CliError(EXIT_CONFIG,
                       "sweep grid needs l_min_km > 0, l_step_km > 0, "
                       "l_max_km >= l_min_km")
    out = []
    i = 0
    while True:
        l = lo + i * step
        if l > hi * (1 + 1e-12):
            return out
        out.append(l)
        i += 1


def resolve_threads(cfg: dict) -> Optional[int]:
    if cfg["threads"] is not None:
        return cfg["threads"]
    env = os.environ.get("IONREP_THREADS")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(EXIT_CONFIG, f"IONREP_THREADS must be an integer, got {env!r}")
    return os.cpu_count()


# ---------------------------------------------------------------- rendering

def fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def _json_safe(v):
    """The same rounded value fmt_value prints, as a JSON-native type."""
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return fmt_value(v)
        return float(f"{v:.9g}")
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def _text_lines(doc, prefix: str = "") -> list[str]:
    lines = []
    if isinstance(doc, dict):
        for key, value in doc.items():
            if isinstance(value, (dict, list)):
                lines.extend(_text_lines(value, f"{prefix}{key}."))
            else:
                lines.append(f"{prefix}{key}: {fmt_value(value)}")
    elif isinstance(doc, list):
        label = prefix[:-1] if prefix.endswith(".") else prefix
        for i, value in enumerate(doc):
            if isinstance(value, (dict, list)):
                lines.extend(_text_lines(value, f"{prefix}{i}."))
            else:
                lines.append(f"{label}: {fmt_value(value)}")
    return lines


def _csv_text(header: list[str], rows: list[list]) -> str:
    out = [",".join(header)]
    out.extend(",".join(fmt_value(v) for v in row) for row in rows)
    return "\n".join(out) + "\n"


def _flat_row(doc: dict, prefix: str = "") -> dict:
    row: dict = {}
    for key, value in doc.items():
        if isinstance(value, dict):
            row.update(_flat_row(value, f"{prefix}{key}."))
        elif isinstance(value, list):
            continue  # path lists and check lists have no tabular shape
        else:
            row[f"{prefix}{key}"] = value
    return row


def emit(cfg: dict, command: str, payload: dict,
         csv_table: Optional[tuple[list[str], list[list]]] = None) -> None:
    """Render payload in the configured format to stdout or output.path."""
    style = cfg["output"]["format"]
    if style == "json":
        doc = {"spec_version": SPEC_VERSION, "command": command}
        doc.update(_json_safe(payload))
        text = json.dumps(doc, indent=2) + "\n"
    elif style == "csv":
        if csv_table is None:
            flat = _flat_row(payload)
            csv_table = (list(flat), [list(flat.values())])
        text = _csv_text(*csv_table)
    else:
        text = "\n".join(_text_lines(payload)) + "\n"
    path = cfg["output"]["path"]
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def report_doc(report: RateReport) -> dict:
    d = report.to_dict()
    d["heralding_time_us"] = d.pop("heralding_time_s") / US
    d["denominator_us"] = d.pop("denominator_s") / US
    # stable key order: timings together, then success/noise/rate, then ions
    order = ["regime", "p", "heralding_time_us", "j_steps", "k_steps",
             "denominator_steps", "denominator_us", "block_success",
             "ideal_rate", "f_end", "rci", "noisy_rate", "n_o", "n_m",
             "n_m_is_upper_bound"]
    return {k: d[k] for k in order}


# ---------------------------------------------------------------- commands

def cmd_rate(cfg: dict) -> int:
    layout = make_layout(cfg)
    hw = make_hardware(cfg)
    try:
        report = evaluate_rate(layout, hw)
    except FeasibilityError as err:
        raise CliError(EXIT_INFEASIBLE, str(err), binding=[err.constraint])
    emit(cfg, "rate", {"result": report_doc(report)})
    return EXIT_OK


def cmd_classify(cfg: dict, l0_km: Optional[float]) -> int:
    hw = make_hardware(cfg)
    if l0_km is None:
        layout = make_layout(cfg, need_m=False)
        l0_km = layout.link_length_km
    if l0_km <= 0:
        raise CliError(EXIT_CONFIG, f"l0_km must be positive, got {l0_km}")
    t = heralding_time(l0_km, hw.optical.refractive_index)
    path = classification_path(hw.timing, t)
    emit(cfg, "classify", {
        "l0_km": l0_km,
        "heralding_time_us": t / US,
        "path": path,
        "regime": path[-1].split()[-1],
    })
    return EXIT_OK


def cmd_optimize(cfg: dict) -> int:
    hw = make_hardware(cfg)
    res = optimize_rate(cfg["layout"]["l_km"], cfg["layout"]["spatial_mux"], hw,
                        bounds=make_bounds(cfg), constraints=make_constraints(cfg))
    payload = {
        "result": {
            "n_opt": res.n_opt,
            "m_opt": res.m_opt,
            "l0_km": cfg["layout"]["l_km"] / (res.n_opt + 1),
            "evaluations": res.evaluations,
            "boundary_hit_n": res.boundary_hit_n,
            "boundary_hit_m": res.boundary_hit_m,
            "report": report_doc(res.report),
        }
    }
    emit(cfg, "optimize", payload)
    return EXIT_OK


def _sweep_table(rows: list[dict]) -> tuple[list[str], list[list]]:
    header = list(CSV_COLUMNS) + ["infeasible_reason"]
    return header, [[row[c] for c in header] for row in rows]


def cmd_sweep(cfg: dict) -> int:
    hw = make_hardware(cfg)
    raw = sweep_distance(make_l_grid(cfg), cfg["layout"]["spatial_mux"], hw,
                         bounds=make_bounds(cfg),
                         constraints=make_constraints(cfg),
                         threads=resolve_threads(cfg))
    rows = []
    for r in raw:
        row = reduce_row(r, "noisy_rate")
        row["infeasible_reason"] = r.infeasible_reason or ""
        rows.append(row)
    emit(cfg, "sweep", {"rows": rows}, csv_table=_sweep_table(rows))
    return EXIT_OK


def cmd_figure(cfg: dict, fig_id: str) -> int:
    if fig_id not in FIGURES:
        raise CliError(EXIT_CONFIG,
                       f"unknown figure id {fig_id!r}; valid: {sorted(FIGURES)}")
    if cfg["output"]["format"] == "csv":
        raise CliError(EXIT_CONFIG,
                       "figure writes CSV files itself; use --format text or json")
    hw = make_hardware(cfg)
    grid = make_l_grid(cfg)
    bounds = make_bounds(cfg)
    threads = resolve_threads(cfg)
    out_dir = cfg["output"]["dir"]
    os.makedirs(out_dir, exist_ok=True)
    description, curves = FIGURES[fig_id]
    files = []
    for curve in curves:
        rows = curve_rows(curve, grid, hw, bounds, threads)
        path = os.path.join(out_dir, f"{fig_id}_{curve.label}.csv")
        header = list(CSV_COLUMNS)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(_csv_text(header, [[row[c] for c in header] for row in rows]))
        files.append(path)
    emit(cfg, "figure", {"figure": fig_id, "description": description,
                         "files": files})
    return EXIT_OK


def cmd_simulate(cfg: dict, validate: bool, trace_path: Optional[str]) -> int:
    layout = make_layout(cfg)
    hw = make_hardware(cfg)
    sim = cfg["sim"]
    config = SimConfig.from_profile(
        layout, hw, num_blocks=sim["num_blocks"], seed=cfg["seed"],
        p_override=sim["p_override"], n_comm_ions=sim["n_comm_ions"],
        n_mem_ions=sim["n_mem_ions"], trace=trace_path is not None)
    try:
        config.validate()
    except ValueError as err:
        raise CliError(EXIT_CONFIG, f"invalid sim config: {err}")
    stats = run_protocol_sim(config)
    payload: dict = {"result": {
        "waits_for_herald": config.waits_for_herald,
        "j_steps": config.j_steps,
        "k_steps": config.k_steps,
        "p": config.p,
        "block_steps": stats.block_steps,
        "blocks_run": stats.blocks_run,
        "successes": stats.successes,
        "empirical_block_success": stats.empirical_block_success,
        "empirical_rate": stats.empirical_rate,
        "peak_comm_loaded": stats.peak_comm_loaded,
        "peak_mem_loaded": stats.peak_mem_loaded,
        "peak_heralded": stats.peak_heralded,
        "dropped_comm": stats.dropped_comm,
        "dropped_mem": stats.dropped_mem,
    }}
    if trace_path is not None:
        with open(trace_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(stats.trace) + "\n")
        payload["trace_path"] = trace_path
    code = EXIT_OK
    if validate:
        try:
            report = evaluate_rate(layout, hw)
        except FeasibilityError as err:
            raise CliError(EXIT_INFEASIBLE, str(err), binding=[err.constraint])
        verdict = validate_against_analytic(config, report)
        payload["validation"] = {
            "passed": verdict.passed,
            "z_score": verdict.z_score,
            "expected_block_success": verdict.expected_block_success,
            "observed_block_success": verdict.observed_block_success,
            "quantization_delta_n_o": verdict.quantization_delta_n_o,
            "checks": list(verdict.checks),
        }
        if not verdict.passed:
            code = EXIT_VALIDATION
    emit(cfg, "simulate", payload)
    return code


# ---------------------------------------------------------------- parser

def _add_flags(parser: argparse.ArgumentParser, dests: list[str]) -> None:
    int_dests = {"n", "spatial_mux", "time_mux", "n_max", "m_max", "n_o_max",
                 "n_m_max", "fixed_n", "num_blocks", "n_comm_ions",
                 "n_mem_ions", "seed", "threads"}
    for dest in dests:
        flag = "--" + dest.replace("_", "-")
        if dest == "format":
            parser.add_argument(flag, choices=("text", "json", "csv"))
        elif dest == "output":
            parser.add_argument(flag, metavar="PATH")
        elif dest == "out_dir":
            parser.add_argument(flag, metavar="DIR")
        elif dest == "l_list_km":
            parser.add_argument(flag, metavar="KM[,KM...]",
                                type=lambda s: [float(v) for v in s.split(",")])
        elif dest in int_dests:
            parser.add_argument(flag, type=int)
        else:
            parser.add_argument(flag, type=float)


_HW = list(DEFAULTS["hardware"])
_IO = ["format", "output", "seed", "threads"]
_LAYOUT = ["l_km", "n", "spatial_mux", "time_mux"]
_BOUNDS = ["n_max", "m_max"]
_CONS = ["n_o_max", "n_m_max", "fixed_l0_km", "fixed_n", "tau_min_us"]
_SWEEP = ["l_min_km", "l_max_km", "l_step_km", "l_list_km"]
_SIM = ["num_blocks", "n_comm_ions", "n_mem_ions", "p_override"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionrep",
        description="Rate model, optimizer, and event-level validator for "
                    "multiplexed trapped-ion repeater chains.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, groups: list[list[str]]):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="FILE", help="JSON config document")
        for group in groups:
            _add_flags(p, group)
        return p

    add("rate", "evaluate one chain configuration", [_IO, _HW, _LAYOUT])
    p = add("classify", "walk the timing-regime decision tree", [_IO, _HW, _LAYOUT])
    p.add_argument("--l0-km", type=float, dest="l0_km",
                   help="classify a link of this length directly")
    add("optimize", "grid-search repeater count and time multiplexing",
        [_IO, _HW, _LAYOUT, _BOUNDS, _CONS])
    add("sweep", "optimize across a distance grid", [_IO, _HW, _LAYOUT,
                                                     _BOUNDS, _CONS, _SWEEP])
    p = add("figure", "reproduce a canned sweep family as CSV files",
            [_IO, _HW, _BOUNDS, _SWEEP, ["out_dir"]])
    p.add_argument("figure_id", choices=sorted(FIGURES),
                   help="which sweep family to generate")
    p = add("simulate", "run the discrete-event protocol simulator",
            [_IO, _HW, _LAYOUT, _SIM])
    p.add_argument("--validate", action="store_true",
                   help="compare against the analytic model; exit 4 on mismatch")
    p.add_argument("--trace", metavar="FILE", dest="trace_path",
                   help="write a step,node,event,count log of block 0")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args)
        if args.command == "rate":
            return cmd_rate(cfg)
        if args.command == "classify":
            return cmd_classify(cfg, args.l0_km)
        if args.command == "optimize":
            return cmd_optimize(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "figure":
            return cmd_figure(cfg, args.figure_id)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.validate, args.trace_path)
        raise AssertionError(args.command)  # pragma: no cover
    except CliError as err:
        _emit_error(cfg_format(args), args.command, err)
        return err.code
    except InfeasibleError as err:
        cli_err = CliError(EXIT_INFEASIBLE, str(err), binding=list(err.binding))
        _emit_error(cfg_format(args), args.command, cli_err)
        return EXIT_INFEASIBLE
    except ValueError as err:
        _emit_error(cfg_format(args), args.command,
                    CliError(EXIT_CONFIG, str(err)))
        return EXIT_CONFIG


def cfg_format(args: argparse.Namespace) -> str:
    """Best-effort output format for error rendering."""
    if getattr(args, "format", None) is not None:
        return args.format
    path = getattr(args, "config", None)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                return json.load(fh).get("output", {}).get("format", "text")
        except Exception:
            return "text"
    return "text"


def _emit_error(style: str, command: str, err: CliError) -> None:
    kinds = {EXIT_CONFIG: "config", EXIT_INFEASIBLE: "infeasible",
             EXIT_VALIDATION: "validation"}
    if style == "json":
        doc = {"spec_version": SPEC_VERSION, "command": command,
               "error": {"kind": kinds.get(err.code, "error"),
                         "message": str(err)}}
        if err.binding is not None:
            doc["error"]["binding"] = err.binding
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stderr.write(f"ionrep {command}: error: {err}\n")


if __name__ == "__main__":
    sys.exit(main())
