"""Batch front end: flat key=value configs, scenario dispatch, CSV output,
and a reproducibility manifest.

Scenarios: init, sweep-beta, sweep-gamma, gate, readout, validate.

Config files are flat ``key = value`` lines ('#' starts a comment).  Every
key has a default drawn from the built-in reference parameter set; unknown
keys and out-of-range values are rejected with line context.  CSV output
uses 12 significant digits so doubles round-trip losslessly.

Exit codes: 0 success, 1 configuration error, 2 physics-check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import darkspace, holonomy, qcore, scenarios
from .model import ModelParams, build_h_y, build_h_z
from .propagate import PropagationSpec, oracle_propagate, schrodinger_propagate
from .pulses import make_y_pulseset, make_z_pulseset
from .qcore import DIM, IDX_ANC, IDX_E1, IDX_E2, IDX_ONE, IDX_ZERO

SCENARIOS = ("init", "sweep-beta", "sweep-gamma", "gate", "readout", "validate")


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_ratio_list(text: str) -> tuple:
    values = tuple(float(part) for part in text.split(","))
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("sweep ratios must be strictly increasing")
    if any(v < 0.0 for v in values):
        raise ValueError("sweep ratios must be non-negative")
    if any(v > 40.0 for v in values):
        raise ValueError("sweep ratios beyond 40 pulse widths are not representable")
    return values


def _positive(x: float) -> float:
    if x <= 0.0:
        raise ValueError("value must be positive")
    return x


def _non_negative(x: float) -> float:
    if x < 0.0:
        raise ValueError("value must be non-negative")
    return x


def _tolerance(x: float) -> float:
    if not (0.0 < x <= 1e-2):
        raise ValueError("tolerances must lie in (0, 1e-2]")
    return x


def _enum(options):
    def convert(text: str) -> str:
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return text
    return convert


# key -> (converter, default).  None defaults are resolved per scenario.
_SCHEMA = {
    "amp_pump": (lambda s: _non_negative(float(s)), 0.5),
    "amp_stokes": (lambda s: _non_negative(float(s)), 0.5),
    "amp_driving": (lambda s: _non_negative(float(s)), 0.5),
    "tau_ps": (lambda s: _positive(float(s)), 100.0),
    "tau0_over_tau": (lambda s: _non_negative(float(s)), None),
    "return_delay_over_tau": (lambda s: _positive(float(s)), 0.7),
    "delta_rad_per_ps": (lambda s: _positive(float(s)), 1.016e-3),
    "detuning_rad_per_ps": (float, 0.0),
    "gamma_per_ps": (lambda s: _non_negative(float(s)), 6.25e-4),
    "gamma_hh_per_ps": (lambda s: _non_negative(float(s)), 1e-9),
    "gamma_ee_per_ps": (lambda s: _non_negative(float(s)), 1e-9),
    "stokes_phase_rad": (float, None),
    "target_angle_rad": (float, math.pi / 2.0),
    "variant": (_enum(scenarios.VARIANTS), "y_closed_loop"),
    "decoherence": (_parse_bool, True),
    "pump_amp": (lambda s: _non_negative(float(s)), None),
    "polarization": (_enum(("sigma_minus", "sigma_plus")), "sigma_minus"),
    "rabi_per_ps": (lambda s: _non_negative(float(s)), None),
    "duration_ps": (lambda s: _positive(float(s)), None),
    "record_stride_ps": (lambda s: _non_negative(float(s)), None),
    "input_state": (_enum(("zero", "one", "mixed")), "one"),
    "sweep_ratios": (_parse_ratio_list, (0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0)),
    "rel_tol": (lambda s: _tolerance(float(s)), 1e-9),
    "abs_tol": (lambda s: _tolerance(float(s)), 1e-12),
    "quad_tol": (lambda s: _tolerance(float(s)), 1e-10),
    "sphere_points": (lambda s: int(_positive(float(s))), 400),
}

# per-scenario defaults for the None entries above
_SCENARIO_DEFAULTS = {
    "init": {"duration_ps": 8000.0, "tau0_over_tau": 0.0},
    "readout": {"duration_ps": 40000.0, "tau0_over_tau": 0.0},
    "gate": {},
    "sweep-beta": {"tau0_over_tau": 0.0},
    "sweep-gamma": {"tau0_over_tau": 0.0},
    "validate": {"tau0_over_tau": 0.0},
}


@dataclass
class RunConfig:
    """Fully resolved configuration of one run."""

    scenario: str
    values: dict
    defaults_used: list = field(default_factory=list)

    def model_params(self) -> ModelParams:
        v = self.values
        return ModelParams(delta=v["delta_rad_per_ps"], detuning=v["detuning_rad_per_ps"],
                           gamma=v["gamma_per_ps"], gamma_hh=v["gamma_hh_per_ps"],
                           gamma_ee=v["gamma_ee_per_ps"])


def parse_config(text: str, scenario: str) -> RunConfig:
    """Parse a flat key=value document and resolve every default."""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    provided: dict = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in provided:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        converter, _ = _SCHEMA[key]
        try:
            provided[key] = converter(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: invalid value for {key!r}: {exc}") from exc

    values = {}
    defaults_used = []
    for key, (_, default) in _SCHEMA.items():
        if key in provided:
            values[key] = provided[key]
        else:
            values[key] = default
            defaults_used.append(key)
    for key, value in _SCENARIO_DEFAULTS.get(scenario, {}).items():
        if values[key] is None:
            values[key] = value

    # gate-variant defaults for anything still unresolved
    if values["tau0_over_tau"] is None or values["stokes_phase_rad"] is None:
        variant_default = scenarios.default_gate_run(values["variant"])
        if values["tau0_over_tau"] is None:
            values["tau0_over_tau"] = variant_default.tau0_over_tau
        if values["stokes_phase_rad"] is None:
            values["stokes_phase_rad"] = variant_default.phase
    if values["rabi_per_ps"] is None:
        values["rabi_per_ps"] = values["gamma_per_ps"]
    if values["duration_ps"] is None:
        values["duration_ps"] = 8000.0
    if values["record_stride_ps"] is None:
        values["record_stride_ps"] = values["duration_ps"] / 400.0

    try:
        ModelParams(delta=values["delta_rad_per_ps"], detuning=values["detuning_rad_per_ps"],
                    gamma=values["gamma_per_ps"], gamma_hh=values["gamma_hh_per_ps"],
                    gamma_ee=values["gamma_ee_per_ps"])
    except ValueError as exc:
        raise ConfigError(f"invalid physical parameters: {exc}") from exc
    return RunConfig(scenario=scenario, values=values, defaults_used=sorted(defaults_used))


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(part if isinstance(part, str) else _fmt(part) for part in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Scenario bodies; each returns (outputs, checks) and may raise for physics
# failures (mapped to exit code 2).
# ---------------------------------------------------------------------------

def _run_sweep(config: RunConfig, out_dir: Path, threads: int, which: str):
    v = config.values
    params = config.model_params()
    if which == "beta":
        table = scenarios.sweep_angle_y(v["sweep_ratios"], amp=v["amp_stokes"],
                                        tau=v["tau_ps"], params=params, threads=threads)
        name, col = "sweep_beta.csv", "beta"
    else:
        table = scenarios.sweep_phase_z(v["sweep_ratios"], amp=v["amp_stokes"],
                                        tau=v["tau_ps"], params=params, threads=threads)
        name, col = "sweep_gamma.csv", "gamma_f"
    path = out_dir / name
    _write_csv(path, f"tau0_over_tau,{col}_rad,{col}_over_pi,quad_err",
               ((r, a, a / math.pi, e) for r, a, e in table.rows()))
    checks = [{"name": "quadrature_error_ceiling", "passed": bool(np.all(table.errors < 1e-6)),
               "detail": f"max quadrature error {float(np.max(table.errors)):.3e} rad"}]
    return [name], checks


def _run_init(config: RunConfig, out_dir: Path):
    v = config.values
    params = config.model_params()
    rho0 = np.zeros((DIM, DIM), dtype=complex)
    rho0[IDX_ZERO, IDX_ZERO] = 0.5
    rho0[IDX_ONE, IDX_ONE] = 0.5
    traj, fid = scenarios.run_initialization(v["polarization"], rho0, v["rabi_per_ps"],
                                             v["duration_ps"], params,
                                             record_stride=v["record_stride_ps"],
                                             rel_tol=v["rel_tol"])
    path = out_dir / "init.csv"
    rows = []
    for i, t in enumerate(traj.times):
        s = traj.states[i]
        rows.append((t, s[IDX_ZERO, IDX_ZERO].real, s[IDX_ONE, IDX_ONE].real,
                     s[IDX_ANC, IDX_ANC].real, s[IDX_E1, IDX_E1].real,
                     s[IDX_E2, IDX_E2].real, fid[i]))
    _write_csv(path, "t_ps,rho00,rho11,rho_aa,rho_e1e1,rho_e2e2,fidelity", rows)
    checks = [
        {"name": "trace_preserved", "passed": traj.meta["trace_drift"] < 1e-9,
         "detail": f"trace drift {traj.meta['trace_drift']:.3e}"},
        {"name": "final_fidelity", "passed": True,
         "detail": f"preparation fidelity {fid[-1]:.6f} at t = {traj.times[-1]:.0f} ps"},
    ]
    return ["init.csv"], checks


def _run_gate(config: RunConfig, out_dir: Path, seed=None):
    v = config.values
    run = scenarios.default_gate_run(
        v["variant"],
        model=config.model_params(),
        amp=v["amp_stokes"],
        pump_amp=v["pump_amp"],
        tau=v["tau_ps"],
        tau0_over_tau=v["tau0_over_tau"],
        return_delay_over_tau=v["return_delay_over_tau"],
        phase=v["stokes_phase_rad"],
        target_angle=v["target_angle_rad"],
    )
    process, report = scenarios.simulate_gate(v["variant"], run,
                                              with_decoherence=v["decoherence"])
    if seed is not None:
        # consistency re-check with a rotated sphere point set
        scenarios.gate_fidelity(process, report.target,
                                sphere_points=v["sphere_points"], seed=seed)
    path = out_dir / "gate_process.csv"
    rows = []
    for label in ("0", "1", "+", "+i"):
        block = process[label]
        rows.append((label,
                     block[0, 0].real, block[0, 0].imag, block[0, 1].real, block[0, 1].imag,
                     block[1, 0].real, block[1, 0].imag, block[1, 1].real, block[1, 1].imag))
    _write_csv(path, "input,b00_re,b00_im,b01_re,b01_im,b10_re,b10_im,b11_re,b11_im", rows)
    checks = [
        {"name": "gate_fidelity", "passed": True,
         "detail": f"six-state average fidelity {report.fidelity:.6f} "
                   f"(dark-subspace prediction {report.fidelity_dark_subspace:.6f})"},
        {"name": "leakage", "passed": report.leakage_final <= 0.05,
         "detail": f"worst final leakage {report.leakage_final:.3e}"},
        {"name": "quadrature_angle", "passed": True,
         "detail": f"geometric angle {report.angle_quadrature:.6f} rad; "
                   f"frame phase {report.frame_phase:.6f} rad"},
    ]
    if report.prediction_overlap is not None:
        checks.append({"name": "final_state_prediction_overlap", "passed": True,
                       "detail": f"overlap {report.prediction_overlap:.6f}"})
    for warning in report.warnings:
        checks.append({"name": "warning", "passed": True, "detail": warning})
    return ["gate_process.csv"], checks


def _run_readout(config: RunConfig, out_dir: Path):
    v = config.values
    blocks = {
        "zero": np.diag([1.0, 0.0]).astype(complex),
        "one": np.diag([0.0, 1.0]).astype(complex),
        "mixed": np.diag([0.5, 0.5]).astype(complex),
    }
    result = scenarios.run_readout(blocks[v["input_state"]], v["duration_ps"],
                                   config.model_params(), rabi=v["rabi_per_ps"],
                                   rel_tol=v["rel_tol"])
    path = out_dir / "readout.csv"
    _write_csv(path,
               "input,expected_photons,photons_to_spin_down,photons_to_spin_up,"
               "driven_population_left,shelving_complete",
               [(v["input_state"], result.total_photons, result.photons_to_spin_down,
                 result.photons_to_spin_up, result.driven_population_left,
                 "true" if result.shelving_complete else "false")])
    checks = [{"name": "shelving_complete", "passed": result.shelving_complete,
               "detail": f"driven population left {result.driven_population_left:.3e}"}]
    return ["readout.csv"], checks


def _run_validate(config: RunConfig, out_dir: Path):
    """Fast invariant suite; any failed row flips the exit to 2."""
    v = config.values
    params = config.model_params()
    rng = np.random.default_rng(20240811)
    checks = []

    def record(name, passed, detail):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    # dark-state nullity on random times of both default protocols
    y_set = make_y_pulseset(v["amp_pump"], v["amp_stokes"], v["amp_driving"],
                            1.5 * v["tau_ps"], v["tau_ps"])
    z_set = make_z_pulseset(v["amp_stokes"], v["amp_driving"], 6.5 * v["tau_ps"],
                            v["tau_ps"], 0.7)
    worst = 0.0
    for _ in range(200):
        t = rng.uniform(*y_set.window())
        h = build_h_y(t, y_set, params)
        pair = darkspace.dark_states_y(darkspace.theta_track(y_set, t),
                                       math.atan2(y_set.pump(t),
                                                  math.hypot(y_set.stokes(t), y_set.driving(t))))
        res = darkspace.darkness_residual(h, pair)
        worst = max(worst, max(res) / (1.0 + float(np.max(np.abs(h)))))
        t = rng.uniform(-(6.5 + 8.0) * v["tau_ps"], 8.0 * v["tau_ps"])
        h = build_h_z(t, z_set, params)
        pair = darkspace.dark_states_z(darkspace.theta_track(z_set, t),
                                       darkspace.mixing_phi_z(params.delta, z_set.stokes(t),
                                                              z_set.driving(t)),
                                       z_set.stokes_phase)
        res = darkspace.darkness_residual(h, pair)
        worst = max(worst, max(res) / (1.0 + float(np.max(np.abs(h)))))
    record("dark_state_nullity", worst < 1e-10, f"worst scaled residual {worst:.3e}")

    # analytic connection vs Richardson-extrapolated finite difference
    worst = 0.0
    for _ in range(20):
        theta = rng.uniform(0.05, math.pi / 2 - 0.05)
        phi = rng.uniform(0.05, math.pi / 2 - 0.05)
        exact = darkspace.connection_y(phi)
        basis = lambda th: darkspace.dark_states_y(th, phi)
        coarse = darkspace.connection_numeric(basis, theta, 1e-3)
        fine = darkspace.connection_numeric(basis, theta, 5e-4)
        extrap = (4.0 * fine - coarse) / 3.0
        worst = max(worst, float(np.max(np.abs(extrap - exact))))
    record("connection_oracle", worst < 1e-8, f"worst extrapolated deviation {worst:.3e}")

    # matrix exponential: unitarity and the semigroup property
    worst_u, worst_s = 0.0, 0.0
    for _ in range(10):
        m = rng.normal(size=(DIM, DIM)) + 1j * rng.normal(size=(DIM, DIM))
        m = 0.5 * (m - m.conj().T)
        u = qcore.dense_expm(m, 0.7)
        worst_u = max(worst_u, float(np.max(np.abs(u.conj().T @ u - np.eye(DIM)))))
        left = qcore.dense_expm(m, 0.3) @ qcore.dense_expm(m, 0.4)
        worst_s = max(worst_s, float(np.max(np.abs(left - u))))
    record("expm_unitary", worst_u < 1e-10, f"worst unitarity defect {worst_u:.3e}")
    record("expm_semigroup", worst_s < 1e-10, f"worst semigroup defect {worst_s:.3e}")

    # scaling invariances of the two geometric angles
    base_y = holonomy.geometric_angle_y(y_set).angle
    worst = 0.0
    for _ in range(10):
        k = float(rng.uniform(0.2, 5.0))
        scaled = make_y_pulseset(k * v["amp_pump"], k * v["amp_stokes"],
                                 k * v["amp_driving"], 1.5 * v["tau_ps"], v["tau_ps"])
        worst = max(worst, abs(holonomy.geometric_angle_y(scaled).angle - base_y))
    record("scale_invariance_y", worst < 1e-9, f"worst angle shift {worst:.3e} rad")
    base_z = holonomy.geometric_phase_z(z_set, params).angle
    worst = 0.0
    for _ in range(10):
        k = float(rng.uniform(0.2, 5.0))
        scaled = make_z_pulseset(k * v["amp_stokes"], k * v["amp_driving"],
                                 6.5 * v["tau_ps"], v["tau_ps"], 0.7)
        scaled_params = ModelParams(delta=k * params.delta, detuning=params.detuning,
                                    gamma=params.gamma, gamma_hh=params.gamma_hh,
                                    gamma_ee=params.gamma_ee)
        worst = max(worst, abs(holonomy.geometric_phase_z(scaled, scaled_params).angle - base_z))
    record("scale_invariance_z", worst < 1e-9, f"worst angle shift {worst:.3e} rad")

    # adaptive integrator against the exponential oracle on a short window
    short = make_y_pulseset(v["amp_pump"], v["amp_stokes"], v["amp_driving"],
                            0.5 * v["tau_ps"], v["tau_ps"])
    window = short.window(margin=4.0)
    psi0 = qcore.basis_state(IDX_ONE)
    h_of_t = lambda t: build_h_y(t, short, params)
    spec = PropagationSpec(window[0], window[1], rel_tol=1e-10, abs_tol=1e-12,
                           max_step=v["tau_ps"] / 50.0)
    adaptive = schrodinger_propagate(h_of_t, psi0, spec).final()
    oracle = oracle_propagate(h_of_t, psi0, v["tau_ps"] / 2000.0, window[0], window[1])
    deficit = 1.0 - abs(np.vdot(oracle, adaptive)) ** 2
    record("propagator_cross_oracle", deficit < 1e-6, f"overlap deficit {deficit:.3e}")

    rows = [(c["name"], "pass" if c["passed"] else "FAIL", c["detail"]) for c in checks]
    _write_csv(out_dir / "validate.csv", "check,status,detail",
               [(n, s, d.replace(",", ";")) for n, s, d in rows])
    return ["validate.csv"], checks


def run(config: RunConfig, out_dir: Path, threads: int = 1, seed=None) -> int:
    """Execute one scenario; always writes a manifest, even on failure."""
    started = time.time()
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: list[str] = []
    checks: list[dict] = []
    status = 0
    error = None
    try:
        if config.scenario == "sweep-beta":
            outputs, checks = _run_sweep(config, out_dir, threads, "beta")
        elif config.scenario == "sweep-gamma":
            outputs, checks = _run_sweep(config, out_dir, threads, "gamma")
        elif config.scenario == "init":
            outputs, checks = _run_init(config, out_dir)
        elif config.scenario == "gate":
            outputs, checks = _run_gate(config, out_dir, seed=seed)
        elif config.scenario == "readout":
            outputs, checks = _run_readout(config, out_dir)
        elif config.scenario == "validate":
            outputs, checks = _run_validate(config, out_dir)
        else:  # pragma: no cover - parse_config guards this
            raise ConfigError(f"unknown scenario {config.scenario!r}")
        if any(not c["passed"] for c in checks):
            status = 2
    except (ValueError, ArithmeticError) as exc:
        error = str(exc)
        status = 2

    manifest = {
        "artifact_version": __version__,
        "scenario": config.scenario,
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in sorted(config.values.items())},
        "defaults_used": config.defaults_used,
        "outputs": outputs + ["manifest.json"],
        "checks": checks,
        "error": error,
        "wall_clock_seconds": round(time.time() - started, 3),
        "exit_status": status,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n",
                                           encoding="utf-8")
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="holospin",
        description="Five-level hole-spin holonomic control simulator")
    parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument("--config", type=Path, default=None,
                        help="flat key=value configuration file")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (created if missing)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for sweep rows")
    parser.add_argument("--seed", type=int, default=None,
                        help="rotation seed for the sphere quadrature point set")
    args = parser.parse_args(argv)

    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        config = parse_config(text, args.scenario)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    if args.threads < 1:
        print("configuration error: --threads must be at least 1", file=sys.stderr)
        return 1

    status = run(config, args.out, threads=args.threads, seed=args.seed)
    if status != 0:
        print(f"scenario {args.scenario} finished with failures (exit {status}); "
              f"see {args.out / 'manifest.json'}", file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
