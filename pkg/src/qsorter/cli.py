"""Command-line front end.

Every command takes ``--config <json>`` and ``--out <path>``. Command-line
flags override fields from the config file, which override built-in defaults.

Exit codes: 0 success, 1 numerical failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import algebra, devices, mesh, sorter
from .algebra import CompositeState, NonUnitaryError, UnitaryMatrix

DEFAULTS = {
    "architecture": "mzi",
    "reflector": "retroreflector",
    "output_gate": "fdagger",
    "format": "json",
}


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# ---------------------------------------------------------------- output

def _num(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    text = format(x, ".17g")
    if not any(c in text for c in ".e"):
        text += ".0"
    return text


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return json.dumps(obj)


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _summary(path: Optional[str], text: str) -> None:
    # keep stdout parseable when the report itself goes there
    print(text, file=sys.stdout if path is not None else sys.stderr)


def _complex_pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def sorting_csv(p: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "s", "probability"])
    d = p.shape[0]
    for j in range(d):
        for s in range(d):
            w.writerow([j, s, _num(p[j, s])])
    return buf.getvalue()


# ---------------------------------------------------------------- config

def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return data


def _merge(config: dict, args: argparse.Namespace, keys) -> dict:
    merged = copy.deepcopy(config)
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _positive_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value or value < 1:
        raise ConfigError(field, f"must be a positive integer, got {value!r}")
    return int(value)


def _choice(value, field: str, enum_cls):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise ConfigError(field, f"must be one of {allowed}, got {value!r}") from None


def _complex_list(values, field: str) -> np.ndarray:
    out = []
    for v in values:
        if isinstance(v, (list, tuple)) and len(v) == 2:
            out.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(v))
        else:
            raise ConfigError(field, f"entries must be numbers or [re, im] pairs, got {v!r}")
    return np.array(out, dtype=complex)


@dataclass
class RunConfig:
    d: int
    observable: dict
    architecture: sorter.Architecture
    reflector: sorter.Reflector
    output_gate: sorter.OutputGate
    perturbations: Optional[list]
    sweep: Optional[dict]
    input: Optional[list]
    format: str
    out: Optional[str]

    @classmethod
    def from_dict(cls, raw: dict) -> RunConfig:
        raw = {**DEFAULTS, **raw}
        if "d" not in raw:
            raise ConfigError("d", "is required")
        d = _positive_int(raw["d"], "d")
        obs = raw.get("observable")
        if isinstance(obs, str):
            obs = {"type": obs}
        if not isinstance(obs, dict) or "type" not in obs:
            raise ConfigError("observable", "must be an object with a 'type' field")
        if obs["type"] not in ("oam", "wavelength", "pbs", "custom"):
            raise ConfigError("observable.type", f"must be oam, wavelength, pbs or custom, got {obs['type']!r}")
        pert = raw.get("perturbations")
        sweep = raw.get("sweep")
        if pert is not None and sweep is not None:
            raise ConfigError("sweep", "sweep and fixed perturbations are mutually exclusive")
        if pert is not None:
            if not isinstance(pert, list) or len(pert) != d:
                raise ConfigError("perturbations", f"must be a list of exactly {d} phases")
            try:
                pert = [float(x) for x in pert]
            except (TypeError, ValueError):
                raise ConfigError("perturbations", "entries must be numbers") from None
        if sweep is not None:
            sweep = _validate_sweep(sweep)
        inp = raw.get("input")
        if inp is not None:
            if not isinstance(inp, list) or len(inp) != d:
                raise ConfigError("input", f"must list {d} observable amplitudes")
            if np.linalg.norm(_complex_list(inp, "input")) == 0:
                raise ConfigError("input", "amplitudes must not all vanish")
        fmt = raw.get("format")
        if fmt not in ("json", "csv"):
            raise ConfigError("format", f"must be json or csv, got {fmt!r}")
        return cls(
            d=d,
            observable=obs,
            architecture=_choice(raw["architecture"], "architecture", sorter.Architecture),
            reflector=_choice(raw["reflector"], "reflector", sorter.Reflector),
            output_gate=_choice(raw["output_gate"], "output_gate", sorter.OutputGate),
            perturbations=pert,
            sweep=sweep,
            input=inp,
            format=fmt,
            out=raw.get("out"),
        )

    def to_dict(self) -> dict:
        out = {
            "d": self.d,
            "observable": self.observable,
            "architecture": self.architecture.value,
        }
        if self.architecture is sorter.Architecture.MICHELSON:
            out["reflector"] = self.reflector.value
        else:
            out["output_gate"] = self.output_gate.value
        if self.perturbations is not None:
            out["perturbations"] = self.perturbations
        if self.sweep is not None:
            out["sweep"] = self.sweep
        if self.input is not None:
            out["input"] = self.input
        out["format"] = self.format
        return out

    def module(self) -> tuple[sorter.PhaseModule, Optional[devices.AwgDesign]]:
        obs, d = self.observable, self.d
        kind = obs["type"]
        if kind == "pbs":
            if d != 2:
                raise ConfigError("d", f"pbs observable needs d=2, got {d}")
            return devices.pbs_module(), None
        if kind == "oam":
            levels = obs.get("levels", list(range(d)))
            if not isinstance(levels, list) or len(levels) != d:
                raise ConfigError("observable.levels", f"must list {d} OAM values")
            try:
                return devices.oam_module(devices.OamBasisMap(tuple(levels))), None
            except (TypeError, ValueError) as exc:
                raise ConfigError("observable.levels", str(exc)) from None
        if kind == "wavelength":
            try:
                if "design" in obs:
                    design = devices.AwgDesign.from_dict(obs["design"])
                    if design.d != d:
                        raise ConfigError("observable.design", f"design has d={design.d}, config has d={d}")
                else:
                    if "wavelengths" not in obs:
                        raise ConfigError("observable.wavelengths", "give wavelengths or a design")
                    bound = _positive_int(obs.get("search_bound", 100), "observable.search_bound")
                    design = devices.awg_design(d, obs["wavelengths"], bound)
            except ConfigError:
                raise
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError("observable.wavelengths", str(exc)) from None
            return devices.awg_module(design), design
        phases = obs.get("phases")
        try:
            table = np.array(phases, dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("observable.phases", "must be a d x d table of numbers") from None
        if table.shape != (d, d) or not np.all(np.isfinite(table)):
            raise ConfigError("observable.phases", f"must be a finite {d} x {d} table indexed [arm][value]")
        return sorter.PhaseModule(table, name="custom"), None

    def spec(self, module: sorter.PhaseModule) -> sorter.SorterSpec:
        try:
            return sorter.SorterSpec(self.d, module, self.architecture, self.reflector,
                                     self.perturbations, self.output_gate)
        except ValueError as exc:
            raise ConfigError("reflector" if "mirror" in str(exc) else "observable", str(exc)) from None


def _validate_sweep(sweep) -> dict:
    if not isinstance(sweep, dict):
        raise ConfigError("sweep", "must be an object {sigmas, trials, seed}")
    sigmas = sweep.get("sigmas", sweep.get("sigma"))
    if isinstance(sigmas, (int, float)) and not isinstance(sigmas, bool):
        sigmas = [sigmas]
    if not isinstance(sigmas, list) or not sigmas:
        raise ConfigError("sweep.sigmas", "must be a non-empty list of numbers")
    for s in sigmas:
        if isinstance(s, bool) or not isinstance(s, (int, float)) or not s >= 0:
            raise ConfigError("sweep.sigmas", f"must be non-negative numbers, got {s!r}")
    trials = _positive_int(sweep.get("trials", 100), "sweep.trials")
    seed = sweep.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("sweep.seed", f"must be a non-negative integer, got {seed!r}")
    return {"sigmas": [float(s) for s in sigmas], "trials": trials, "seed": seed}


def _run_config(args) -> RunConfig:
    raw = _load_config(args.config)
    raw = _merge(raw, args, ["d", "architecture", "reflector", "output_gate", "perturbations",
                             "format", "out"])
    if args.observable is not None:
        raw["observable"] = {"type": args.observable}
    if getattr(args, "levels", None) is not None:
        raw.setdefault("observable", {"type": "oam"})["levels"] = args.levels
    if getattr(args, "wavelengths", None) is not None:
        raw.setdefault("observable", {"type": "wavelength"})["wavelengths"] = args.wavelengths
    if getattr(args, "sigmas", None) is not None or getattr(args, "trials", None) is not None \
            or getattr(args, "seed", None) is not None:
        sweep = dict(raw.get("sweep") or {})
        for key in ("sigmas", "trials", "seed"):
            if getattr(args, key, None) is not None:
                sweep[key] = getattr(args, key)
        raw["sweep"] = sweep
    return RunConfig.from_dict(raw)


# ---------------------------------------------------------------- commands

def _timing(args, start: float):
    return round((time.perf_counter() - start) * 1e3, 3) if args.timing else None


def _checked_build(spec: sorter.SorterSpec) -> UnitaryMatrix:
    u = sorter.build(spec)
    err = algebra.unitarity_error(u.entries)
    if not err <= 1e-10:
        raise NonUnitaryError(f"sorter construction lost unitarity (error {err:.3g})")
    return u


def cmd_simulate(args) -> int:
    start = time.perf_counter()
    cfg = _run_config(args)
    if cfg.sweep is not None:
        raise ConfigError("sweep", "use the 'sweep' command for noise sweeps")
    module, design = cfg.module()
    spec = cfg.spec(module)
    u = _checked_build(spec)
    p = sorter.sorting_matrix(u)
    worst, mean = sorter.efficiency(p)
    report = {
        "config": cfg.to_dict(),
        "sorting_matrix": p.as_list(),
        "efficiency": {"worst": worst, "mean": mean},
    }
    if design is not None:
        report["awg_design"] = design.to_dict()
    if cfg.input is not None:
        psi = CompositeState.on_port(_complex_list(cfg.input, "input"), 0)
        report["state"] = _complex_pairs(sorter.simulate(u, psi).amplitudes)
    report["timing_ms"] = _timing(args, start)
    if cfg.format == "csv":
        _write(cfg.out, sorting_csv(p.p))
    else:
        _write(cfg.out, dumps(report) + "\n")
    if cfg.out is not None:
        print(f"worst efficiency {worst:.6g}, mean efficiency {mean:.6g}")
    return 0


def cmd_sweep(args) -> int:
    start = time.perf_counter()
    cfg = _run_config(args)
    if cfg.sweep is None:
        raise ConfigError("sweep", "is required (sigmas, trials, seed)")
    module, _ = cfg.module()
    spec = cfg.spec(module)
    p = sorter.sorter_probabilities(spec)
    worst, mean = sorter.efficiency(p)
    results = [sorter.sweep_perturbations(spec, s, cfg.sweep["trials"], cfg.sweep["seed"])
               for s in cfg.sweep["sigmas"]]
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sigma", "trial", "worst", "mean"])
        for r in results:
            for i, (sigma, wv, mv) in enumerate(r.rows):
                w.writerow([_num(sigma), i, _num(wv), _num(mv)])
        _write(cfg.out, buf.getvalue())
    else:
        report = {
            "config": cfg.to_dict(),
            "sorting_matrix": p.as_list(),
            "efficiency": {"worst": worst, "mean": mean},
            "sweep": [
                {
                    "sigma": r.sigma,
                    "mean_worst": r.mean_worst,
                    "mean_efficiency": r.mean_mean,
                    "stderr_mean": r.stderr_mean,
                    "trials": [[w, m] for _, w, m in r.rows],
                }
                for r in results
            ],
            "timing_ms": _timing(args, start),
        }
        _write(cfg.out, dumps(report) + "\n")
    for r in results:
        _summary(cfg.out, f"sigma {r.sigma:.6g}: mean efficiency {r.mean_mean:.6g} +- {r.stderr_mean:.2g}, "
                          f"mean worst {r.mean_worst:.6g}")
    return 0


def cmd_awg_design(args) -> int:
    raw = _merge(_load_config(args.config), args, ["d", "wavelengths", "search_bound", "out"])
    wavelengths = raw.get("wavelengths")
    if not isinstance(wavelengths, list) or not wavelengths:
        raise ConfigError("wavelengths", "must be a non-empty list")
    d = _positive_int(raw.get("d", len(wavelengths)), "d")
    bound = _positive_int(raw.get("search_bound", 100), "search_bound")
    try:
        lam = [float(x) for x in wavelengths]
        design = devices.awg_design(d, lam, bound)
    except (TypeError, ValueError) as exc:
        raise ConfigError("wavelengths", str(exc)) from None
    _write(raw.get("out"), dumps(design.to_dict()) + "\n")
    _summary(raw.get("out"), f"residual {design.residual:.6g} rad ({'exact' if design.exact else 'approximate'})")
    return 0


def _named_gate(name: str) -> UnitaryMatrix:
    gates = {"fourier": algebra.fourier, "identity": algebra.identity,
             "pauli_x": algebra.pauli_x, "pauli_z": algebra.pauli_z}
    kind, _, dim = name.partition(":")
    if kind not in gates or not dim.isdigit() or int(dim) < 1:
        raise ConfigError("gate", f"expected one of {', '.join(gates)} as 'name:d', got {name!r}")
    return gates[kind](int(dim))


def _read_matrix(source) -> np.ndarray:
    if isinstance(source, str):
        try:
            source = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("matrix", f"cannot read matrix file: {exc}") from None
    if isinstance(source, dict):
        try:
            m = np.array(source["real"], dtype=float) + 1j * np.array(source.get("imag", 0.0), dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("matrix", f"expected {{real, imag}} tables: {exc}") from None
    else:
        if not isinstance(source, list) or not source or not all(isinstance(r, list) for r in source):
            raise ConfigError("matrix", "must be a square table of numbers or [re, im] pairs")
        m = np.array([_complex_list(row, "matrix") for row in source])
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError("matrix", f"must be square, got shape {m.shape}")
    return m


def cmd_decompose(args) -> int:
    raw = _merge(_load_config(args.config), args, ["gate", "matrix", "out"])
    if ("gate" in raw) == ("matrix" in raw):
        raise ConfigError("gate", "give exactly one of a named gate or a matrix file")
    if "gate" in raw:
        u = _named_gate(raw["gate"])
    else:
        try:
            u = UnitaryMatrix(_read_matrix(raw["matrix"]), atol=mesh.MESH_ATOL)
        except NonUnitaryError as exc:
            raise ConfigError("matrix", str(exc)) from None
    m = mesh.decompose(u)
    err = mesh.reconstruct(m).max_diff(u)
    _write(raw.get("out"), dumps(m.to_dict()) + "\n")
    _summary(raw.get("out"), f"beamsplitters {len(m.beamsplitters)} (bound {u.dim * (u.dim - 1) // 2}), "
                             f"elements {len(m.elements)}, reconstruction error {err:.3g}")
    return 0


def compare_cascade(d: int) -> dict:
    """Component counts of the single-interferometer OAM sorter vs cascaded MZIs."""
    d = _positive_int(d, "d")
    if d < 2:
        raise ConfigError("d", "compare-cascade needs d >= 2")
    power_of_two = d & (d - 1) == 0
    ours = {
        "interferometers": 1,
        "dove_prisms": d,
        "fourier_gates": 2,
        "beamsplitters_per_fourier_gate": len(mesh.decompose(algebra.fourier(d)).beamsplitters),
        "beamsplitter_bound_per_fourier_gate": d * (d - 1) // 2,
    }
    cascade = {"applicable": power_of_two}
    if power_of_two:
        cascade.update(mzis=d - 1, dove_prisms=2 * (d - 1), holograms=d // 2 - 1,
                       stages=d.bit_length() - 1)
    else:
        cascade["reason"] = "not applicable (d not a power of 2)"
    return {"d": d, "this_scheme": ours, "cascade": cascade}


def cmd_compare_cascade(args) -> int:
    raw = _merge(_load_config(args.config), args, ["d", "out"])
    if "d" not in raw:
        raise ConfigError("d", "is required")
    report = compare_cascade(raw["d"])
    ours, cascade = report["this_scheme"], report["cascade"]
    print(f"d = {report['d']}")
    print(f"this scheme: {ours['interferometers']} interferometer, {ours['dove_prisms']} Dove prisms, "
          f"{ours['beamsplitters_per_fourier_gate']} beamsplitters per Fourier gate "
          f"(bound {ours['beamsplitter_bound_per_fourier_gate']})")
    if cascade["applicable"]:
        print(f"cascade: {cascade['mzis']} MZIs, {cascade['dove_prisms']} Dove prisms, "
              f"{cascade['holograms']} holograms")
    else:
        print(f"cascade: {cascade['reason']}")
    if raw.get("out") is not None:
        _write(raw["out"], dumps(report) + "\n")
    return 0


# ---------------------------------------------------------------- parser

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--out", help="output path (default: stdout)")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int)
    p.add_argument("--observable", choices=["oam", "wavelength", "pbs", "custom"])
    p.add_argument("--levels", type=int, nargs="+", help="OAM values per index")
    p.add_argument("--wavelengths", type=float, nargs="+")
    p.add_argument("--architecture", choices=[a.value for a in sorter.Architecture])
    p.add_argument("--reflector", choices=[r.value for r in sorter.Reflector])
    p.add_argument("--output-gate", dest="output_gate", choices=[g.value for g in sorter.OutputGate])
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identical reports)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsorter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="build a sorter and report its sorting matrix")
    _add_common(p)
    _add_run_flags(p)
    p.add_argument("--perturbations", type=float, nargs="+")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="efficiency under random per-arm phase noise")
    _add_common(p)
    _add_run_flags(p)
    p.add_argument("--sigmas", type=float, nargs="+")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("awg-design", help="solve AWG arm lengths for a wavelength grid")
    _add_common(p)
    p.add_argument("--d", type=int)
    p.add_argument("--wavelengths", type=float, nargs="+")
    p.add_argument("--search-bound", dest="search_bound", type=int)
    p.set_defaults(func=cmd_awg_design)

    p = sub.add_parser("decompose", help="compile a unitary into a beamsplitter mesh")
    _add_common(p)
    p.add_argument("--gate", help="named gate, e.g. fourier:8")
    p.add_argument("--matrix", help="JSON matrix file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("compare-cascade", help="component counts vs cascaded MZI sorters")
    _add_common(p)
    p.add_argument("--d", type=int)
    p.set_defaults(func=cmd_compare_cascade)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonUnitaryError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
