"""JSON run configuration: loading, validation, and object construction.

Top-level sections: ``pulse``, ``chain``, ``noise`` (optional), and
``experiment``. Quantities are SI seconds and radians; any angle-valued
entry may instead be written ``{"turns": x}`` meaning 2*pi*x radians,
matching the common 2*pi*x reporting style.
"""
from __future__ import annotations

import json
import math
from typing import Any

from .model import (
    AmplitudePolynomial,
    DriveChain,
    NoiseModel,
    PhasePolynomial,
    PulseShape,
    rabi_normalization,
)

__all__ = [
    "ConfigError",
    "load_config",
    "resolve_config",
    "validate_config",
    "build_shape",
    "build_chain",
    "build_noise",
]

EXPERIMENT_KINDS = (
    "rabi",
    "train",
    "map",
    "sandwich",
    "period",
    "calibrate",
    "rb",
    "rb-scan",
)


class ConfigError(ValueError):
    """Invalid or incomplete run configuration; carries offending keys."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def _angle(value, key: str) -> float:
    if isinstance(value, dict):
        if set(value.keys()) == {"turns"}:
            return 2 * math.pi * float(value["turns"])
        raise ConfigError([f"{key}: angle must be a number or {{\"turns\": x}}"])
    if isinstance(value, (int, float)):
        return float(value)
    raise ConfigError([f"{key}: angle must be a number or {{\"turns\": x}}"])


def _grid(spec, key: str, angle: bool = False) -> list[float]:
    conv = (lambda v, k: _angle(v, k)) if angle else (lambda v, k: float(v))
    if isinstance(spec, list):
        return [conv(v, key) for v in spec]
    if isinstance(spec, dict) and "values" in spec:
        return [conv(v, key) for v in spec["values"]]
    if isinstance(spec, dict) and {"start", "stop", "num"} <= set(spec.keys()):
        n = int(spec["num"])
        if n < 1:
            raise ConfigError([f"{key}.num: must be >= 1"])
        lo = conv(spec["start"], f"{key}.start")
        hi = conv(spec["stop"], f"{key}.stop")
        if n == 1:
            return [lo]
        return [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    raise ConfigError([f"{key}: expected a list, {{values: []}}, or {{start, stop, num}}"])


def load_config(path: str) -> dict:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config: invalid JSON ({exc})"]) from exc


def resolve_config(raw: dict) -> dict:
    """Fill defaults and convert every angle to radians.

    The resolved dict is complete: re-running from it reproduces the run.
    """
    problems = []
    out: dict[str, Any] = {}

    pulse = raw.get("pulse")
    if not isinstance(pulse, dict):
        problems.append("pulse: missing required section")
    else:
        for k in ("duration", "t_ramp"):
            if k not in pulse:
                problems.append(f"pulse.{k}: missing required key")
        if not problems:
            out["pulse"] = {
                "duration": float(pulse["duration"]),
                "t_ramp": float(pulse["t_ramp"]),
                "amplitude": float(pulse.get("amplitude", 1.0)),
            }

    chain = raw.get("chain", {})
    if not isinstance(chain, dict):
        problems.append("chain: must be a section")
        chain = {}

    def poly(section: str) -> list[float]:
        spec = chain.get(section, {})
        coeffs = spec.get("coefficients", [0.0]) if isinstance(spec, dict) else spec
        return [_angle(c, f"chain.{section}.coefficients[{i}]") for i, c in enumerate(coeffs)]

    try:
        out["chain"] = {
            "native": poly("native"),
            "compensation": poly("compensation"),
            "rabi_rate": float(chain["rabi_rate"]) if chain.get("rabi_rate") is not None else None,
            "nonlinearity": [float(c) for c in chain.get("nonlinearity", [1.0])],
        }
    except ConfigError as exc:
        problems.extend(exc.problems)

    noise = raw.get("noise")
    if noise is not None:
        t2 = noise.get("t2")
        out["noise"] = {
            "t2": float(t2) if t2 is not None else None,
            "e_spam": float(noise.get("e_spam", 0.0)),
        }
    else:
        out["noise"] = None

    exp = raw.get("experiment")
    if not isinstance(exp, dict):
        problems.append("experiment: missing required section")
    elif exp.get("kind") not in EXPERIMENT_KINDS:
        problems.append(
            f"experiment.kind: must be one of {', '.join(EXPERIMENT_KINDS)}"
        )
    else:
        try:
            out["experiment"] = _resolve_experiment(exp)
        except ConfigError as exc:
            problems.extend(exc.problems)

    out["seed"] = int(raw.get("seed", 0))
    out["step"] = float(raw.get("step", 1e-9))
    out["threads"] = int(raw.get("threads", 1))
    if out["step"] <= 0:
        problems.append("step: must be positive")
    if problems:
        raise ConfigError(problems)
    return out


def _require(exp: dict, kind: str, keys) -> list[str]:
    return [f"experiment.{k}: missing required key (kind={kind})" for k in keys if k not in exp]


def _resolve_experiment(exp: dict) -> dict:
    kind = exp["kind"]
    out: dict[str, Any] = {"kind": kind}
    problems: list[str] = []
    if kind in ("rabi", "train", "map", "period"):
        problems += _require(exp, kind, ["amplitudes"])
        if kind in ("train", "map", "period"):
            problems += _require(exp, kind, ["n_pulses"])
        if kind == "map":
            problems += _require(exp, kind, ["phi_c_prime"])
        if problems:
            raise ConfigError(problems)
        out["amplitudes"] = _grid(exp["amplitudes"], "experiment.amplitudes")
        if kind != "rabi":
            out["n_pulses"] = int(exp["n_pulses"])
        if kind == "map":
            out["phi_c_prime"] = _grid(exp["phi_c_prime"], "experiment.phi_c_prime", angle=True)
        out["shots"] = int(exp["shots"]) if exp.get("shots") is not None else None
        out["quantize_bits"] = (
            int(exp["quantize_bits"]) if exp.get("quantize_bits") is not None else None
        )
    elif kind == "sandwich":
        problems += _require(exp, kind, ["n_blocks", "pi_pulse", "pi_half_pulse"])
        if problems:
            raise ConfigError(problems)
        out["n_blocks"] = int(exp["n_blocks"])
        for key in ("pi_pulse", "pi_half_pulse"):
            sub = exp[key]
            missing = [k for k in ("duration", "amplitude") if k not in sub]
            if missing:
                raise ConfigError([f"experiment.{key}.{k}: missing required key" for k in missing])
            out[key] = {"duration": float(sub["duration"]), "amplitude": float(sub["amplitude"])}
    elif kind == "calibrate":
        problems += _require(exp, kind, ["n_pulses"])
        if problems:
            raise ConfigError(problems)
        out["n_pulses"] = int(exp["n_pulses"])
        half = _angle(exp.get("scan_halfwidth", {"turns": 5e-3}), "experiment.scan_halfwidth")
        out["scan_halfwidth"] = half
        out["grid_size"] = int(exp.get("grid_size", 41))
        out["orders"] = int(exp.get("orders", 1))
        out["shots"] = int(exp["shots"]) if exp.get("shots") is not None else None
        out["refine_halfwidth"] = int(
            exp.get("refine_halfwidth", 6 if out["shots"] else 1)
        )
    elif kind in ("rb", "rb-scan"):
        problems += _require(exp, kind, ["lengths", "n_random"])
        if kind == "rb-scan":
            problems += _require(exp, kind, ["phi_c_values"])
        if problems:
            raise ConfigError(problems)
        out["lengths"] = [int(x) for x in exp["lengths"]]
        out["n_random"] = int(exp["n_random"])
        out["strategy"] = str(exp.get("strategy", "PiAndPiHalf"))
        out["fit_offset"] = (
            float(exp["fit_offset"]) if exp.get("fit_offset") is not None else None
        )
        if kind == "rb-scan":
            out["phi_c_values"] = _grid(exp["phi_c_values"], "experiment.phi_c_values", angle=True)
    return out


def build_shape(resolved: dict) -> PulseShape:
    p = resolved["pulse"]
    return PulseShape(p["duration"], p["t_ramp"], p["amplitude"])


def build_chain(resolved: dict) -> DriveChain:
    c = resolved["chain"]
    rabi = c["rabi_rate"]
    if rabi is None:
        rabi = rabi_normalization(build_shape(resolved).scaled(1.0))
    nonlin = c["nonlinearity"]
    return DriveChain(
        native=PhasePolynomial(tuple(c["native"])),
        compensation=PhasePolynomial(tuple(c["compensation"])),
        rabi_rate=rabi,
        nonlinearity=None if nonlin == [1.0] else AmplitudePolynomial(tuple(nonlin)),
    )


def build_noise(resolved: dict) -> NoiseModel | None:
    n = resolved["noise"]
    if n is None:
        return None
    return NoiseModel(t2=n["t2"] if n["t2"] is not None else math.inf, e_spam=n["e_spam"])


def validate_config(source) -> list[str]:
    """Validate a config file or dict; returns a list of problems (empty if valid).

    Checks units, ranges and the domain-type invariants without running any
    simulation.
    """
    try:
        raw = load_config(source) if isinstance(source, str) else source
        resolved = resolve_config(raw)
    except ConfigError as exc:
        return exc.problems
    problems = []
    for build in (build_shape, build_chain, build_noise):
        try:
            build(resolved)
        except ConfigError as exc:
            problems.extend(exc.problems)
        except ValueError as exc:
            problems.append(str(exc))
    return problems
