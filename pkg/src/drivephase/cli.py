"""Config-driven command line runner.

Every experiment, calibration and benchmark is a subcommand reading one JSON
config and writing CSV (scans) or JSON (fits, probes). Output files embed
the fully resolved config, so any result can be reproduced from the file
alone: extract the config and re-run the same subcommand.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import calibration as cal
from . import config as cfg
from . import experiments as xp
from . import rb as rbm
from .model import PulseShape

USAGE_KINDS = cfg.EXPERIMENT_KINDS + ("validate",)


def _write_csv(path: str, resolved: dict, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write("# config: " + json.dumps(resolved, sort_keys=True) + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _scan_rows(scan: xp.ScanResult):
    if len(scan.axes) == 1:
        for a, p in zip(scan.axes[0].values, scan.p0):
            yield (a, p)
    else:
        for i, a in enumerate(scan.axes[0].values):
            for j, c in enumerate(scan.axes[1].values):
                yield (a, c, scan.p0[i, j])


def run(kind: str, config_path: str, out_path: str, overrides: dict | None = None) -> int:
    """Execute one pipeline; returns the process exit status."""
    raw = cfg.load_config(config_path)
    resolved = cfg.resolve_config(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            resolved[key] = value
    problems = cfg.validate_config(raw)
    if problems:
        raise cfg.ConfigError(problems)
    if resolved["experiment"]["kind"] != kind:
        raise cfg.ConfigError(
            [f"experiment.kind: config says {resolved['experiment']['kind']!r}, "
             f"subcommand is {kind!r}"]
        )

    shape = cfg.build_shape(resolved)
    chain = cfg.build_chain(resolved)
    noise = cfg.build_noise(resolved)
    exp = resolved["experiment"]
    seed, step, threads = resolved["seed"], resolved["step"], resolved["threads"]

    if kind in ("rabi", "train"):
        n = 1 if kind == "rabi" else exp["n_pulses"]
        scan = xp.train_amplitude_scan(
            chain, shape, n, exp["amplitudes"], noise,
            step=step, shots=exp["shots"], seed=seed, threads=threads,
            quantize_bits=exp["quantize_bits"],
        )
        _write_csv(out_path, resolved, ["A", "P0"], _scan_rows(scan))
    elif kind == "map":
        scan = xp.compensation_map(
            chain, shape, exp["n_pulses"], exp["amplitudes"], exp["phi_c_prime"],
            noise, step=step, shots=exp["shots"], seed=seed, threads=threads,
            quantize_bits=exp["quantize_bits"],
        )
        _write_csv(out_path, resolved, ["A", "phi_c_prime", "P0"], _scan_rows(scan))
    elif kind == "period":
        scan = xp.train_amplitude_scan(
            chain, shape, exp["n_pulses"], exp["amplitudes"], noise,
            step=step, shots=exp["shots"], seed=seed, threads=threads,
            quantize_bits=exp["quantize_bits"],
        )
        analysis = xp.oscillation_period_analysis(scan)
        _write_json(out_path, {
            "config": resolved,
            "revival_positions": analysis.positions.tolist(),
            "spacings": analysis.spacings.tolist(),
            "midpoints": analysis.midpoints.tolist(),
            "relative_spread": analysis.relative_spread,
            "quadratic_coeff": analysis.quadratic_coeff,
        })
    elif kind == "sandwich":
        pi_spec, pi2_spec = exp["pi_pulse"], exp["pi_half_pulse"]
        result = xp.sandwich_phase_probe(
            chain,
            PulseShape(pi_spec["duration"], shape.t_ramp, pi_spec["amplitude"]),
            PulseShape(pi2_spec["duration"], shape.t_ramp, pi2_spec["amplitude"]),
            exp["n_blocks"], noise, step=step,
        )
        _write_json(out_path, {
            "config": resolved,
            "delta_phi": result.delta_phi,
            "total_angle": result.total_angle,
            "survival": result.survival,
            "a_pi": result.a_pi,
            "a_pi_half": result.a_pi_half,
        })
    elif kind == "calibrate":
        half = exp["scan_halfwidth"]
        if exp["orders"] == 1:
            objective = cal.compensation_objective(
                chain, shape, exp["n_pulses"], noise,
                shots=exp["shots"], seed=seed, step=step,
            )
            result = cal.calibrate_linear(
                objective, (-half, half), exp["grid_size"], exp["refine_halfwidth"]
            )
            payload = {"phi_c_prime": result.value, "p0": result.p0,
                       "tie_broken": result.tie_broken}
        else:
            result = cal.calibrate_chain_polynomial(
                chain, shape, exp["n_pulses"], exp["orders"], noise=noise, step=step,
                scan_ranges=[(-half, half)] * exp["orders"],
                grid_size=exp["grid_size"],
                refine_halfwidth=exp["refine_halfwidth"],
            )
            payload = {"coefficients": list(result.coefficients), "p0": result.p0,
                       "converged": result.converged,
                       "n_evaluations": result.n_evaluations}
        payload["config"] = resolved
        _write_json(out_path, payload)
    elif kind == "rb":
        config = rbm.RbConfig(
            lengths=tuple(exp["lengths"]), n_random=exp["n_random"], seed=seed,
            strategy=exp["strategy"], chain=chain, shape=shape, noise=noise, step=step,
        )
        table = rbm.simulate_rb(config)
        fit = rbm.fit_rb_decay(table, fix_offset=exp["fit_offset"])
        _write_json(out_path, {
            "config": resolved,
            "lengths": list(table.lengths),
            "mean_survival": table.means().tolist(),
            "survivals": table.survivals.tolist(),
            "fit": {
                "p": fit.p, "amplitude": fit.amplitude, "offset": fit.offset,
                "error_per_clifford": fit.error_per_clifford,
                "p_stderr": fit.p_stderr, "epc_stderr": fit.epc_stderr,
                "non_decaying": fit.non_decaying,
            },
        })
    elif kind == "rb-scan":
        config = rbm.RbConfig(
            lengths=tuple(exp["lengths"]), n_random=exp["n_random"], seed=seed,
            strategy=exp["strategy"], chain=chain, shape=shape, noise=noise, step=step,
        )
        results = rbm.rb_error_scan(config, exp["phi_c_values"], fix_offset=exp["fit_offset"])
        rows = [
            (phic, fit.error_per_clifford, fit.epc_stderr, fit.p)
            for phic, fit in results
        ]
        _write_csv(out_path, resolved,
                   ["phi_c_prime", "error_per_clifford", "epc_stderr", "p"], rows)
    else:  # pragma: no cover - guarded by argparse choices
        raise cfg.ConfigError([f"unknown subcommand {kind!r}"])
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="drivephase",
        description="Simulated drive-phase distortion experiments and calibration",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in USAGE_KINDS:
        sp = sub.add_parser(kind)
        sp.add_argument("--config", required=True)
        if kind != "validate":
            sp.add_argument("--out", required=True)
            sp.add_argument("--seed", type=int, default=None)
            sp.add_argument("--threads", type=int, default=None)
            sp.add_argument("--step", type=float, default=None)
    args = parser.parse_args(argv)

    try:
        if args.kind == "validate":
            problems = cfg.validate_config(args.config)
            if problems:
                print(json.dumps({"error": "validation", "problems": problems}))
                return 2
            print(json.dumps({"ok": True, "problems": []}))
            return 0
        overrides = {"seed": args.seed, "threads": args.threads, "step": args.step}
        return run(args.kind, args.config, args.out, overrides)
    except cfg.ConfigError as exc:
        print(json.dumps({"error": "validation", "problems": exc.problems}),
              file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError) as exc:
        print(json.dumps({"error": "runtime", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
