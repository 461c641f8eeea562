"""Scenario-driven command line: JSON config in, report + CSV + figures out.

    effham <engine> --config scenario.json [--out DIR] [--sweep a.json,b.json]
    effham presets

Engines: propagate (Wei-Norman integration with invariant checks against a
direct propagator), phase (dynamical/geometric split), resonance (preset
models, width extraction, time-domain cross-check), varcheck (identity and
second-order-correction verification).  Every run writes a JSON report
whose invariant block decides the exit status: 0 only if every check
passed.  CSV output is bit-deterministic for identical configs; figures
are rendered next to the CSVs.

Config parsing is strict: unknown keys are rejected and errors carry the
JSON path of the offending field.  --sweep fans several configs through
the same engine concurrently (EFFHAM_THREADS caps the pool) and merges
their reports in config order.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import figures
from .errors import ConfigError, EffhamError
from .fields import ConstantField, LinearRampField, RotatingConeField, TabulatedField
from .feshbach import (
    available_presets,
    decay_oracle,
    preset_model,
    resonance_scan,
    resonance_search,
)
from .numkit import OdeSettings, mat_exp
from .su2 import (
    SpinRepresentation,
    direct_propagate,
    integrate_mu,
    phase_split,
    reconstruct_evolution,
)
from .variational import TrialEvolution, identity_check, variational_correct

ENGINES = ("propagate", "phase", "resonance", "varcheck")


# ---------------------------------------------------------------------------
# strict config validation


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _check_keys(obj, path, required, optional):
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        _fail(path, f"unknown keys {unknown}")
    missing = sorted(set(required) - set(obj))
    if missing:
        _fail(path, f"missing required keys {missing}")


def _real(x, path, minimum=None, positive=False):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        _fail(path, f"expected a number, got {type(x).__name__}")
    x = float(x)
    if not math.isfinite(x):
        _fail(path, "must be finite")
    if positive and x <= 0.0:
        _fail(path, "must be positive")
    if minimum is not None and x < minimum:
        _fail(path, f"must be >= {minimum}")
    return x


def _integer(x, path, minimum=None):
    if isinstance(x, bool) or not isinstance(x, int):
        _fail(path, f"expected an integer, got {type(x).__name__}")
    if minimum is not None and x < minimum:
        _fail(path, f"must be >= {minimum}")
    return int(x)


def _boolean(x, path):
    if not isinstance(x, bool):
        _fail(path, f"expected true/false, got {type(x).__name__}")
    return x


def _vector3(x, path):
    if not isinstance(x, list) or len(x) != 3:
        _fail(path, "expected a list of 3 numbers")
    return [_real(v, f"{path}[{i}]") for i, v in enumerate(x)]


def _interval(x, path):
    if not isinstance(x, list) or len(x) != 2:
        _fail(path, "expected [low, high]")
    lo = _real(x[0], f"{path}[0]")
    hi = _real(x[1], f"{path}[1]")
    if not hi > lo:
        _fail(path, "high must exceed low")
    return [lo, hi]


def _validate_field(spec, path="field"):
    if not isinstance(spec, dict):
        _fail(path, "expected an object")
    kind = spec.get("kind")
    if kind == "constant":
        _check_keys(spec, path, {"kind", "b"}, set())
        return {"kind": kind, "b": _vector3(spec["b"], f"{path}.b")}
    if kind == "rotating-cone":
        _check_keys(spec, path, {"kind", "b0", "theta", "omega"}, set())
        return {
            "kind": kind,
            "b0": _real(spec["b0"], f"{path}.b0", positive=True),
            "theta": _real(spec["theta"], f"{path}.theta"),
            "omega": _real(spec["omega"], f"{path}.omega"),
        }
    if kind == "linear-ramp":
        _check_keys(spec, path, {"kind", "b_start", "b_end", "t0", "t1"}, set())
        t0 = _real(spec["t0"], f"{path}.t0")
        t1 = _real(spec["t1"], f"{path}.t1")
        if not t1 > t0:
            _fail(f"{path}.t1", "must exceed t0")
        return {
            "kind": kind,
            "b_start": _vector3(spec["b_start"], f"{path}.b_start"),
            "b_end": _vector3(spec["b_end"], f"{path}.b_end"),
            "t0": t0,
            "t1": t1,
        }
    if kind == "tabulated":
        _check_keys(spec, path, {"kind", "times", "values"}, set())
        times = spec["times"]
        values = spec["values"]
        if not isinstance(times, list) or len(times) < 4:
            _fail(f"{path}.times", "expected a list of at least 4 samples")
        ts = [_real(t, f"{path}.times[{i}]") for i, t in enumerate(times)]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            _fail(f"{path}.times", "must be strictly increasing")
        if not isinstance(values, list) or len(values) != len(ts):
            _fail(f"{path}.values", "must match times in length")
        vs = [_vector3(v, f"{path}.values[{i}]") for i, v in enumerate(values)]
        return {"kind": kind, "times": ts, "values": vs}
    _fail(
        f"{path}.kind",
        "expected one of constant, rotating-cone, linear-ramp, tabulated",
    )


def build_field(spec):
    kind = spec["kind"]
    if kind == "constant":
        return ConstantField(tuple(spec["b"]))
    if kind == "rotating-cone":
        return RotatingConeField(spec["b0"], spec["theta"], spec["omega"])
    if kind == "linear-ramp":
        return LinearRampField(
            tuple(spec["b_start"]), tuple(spec["b_end"]), spec["t0"], spec["t1"]
        )
    return TabulatedField(np.asarray(spec["times"]), np.asarray(spec["values"]))


def _validate_ode(spec, path="ode"):
    _check_keys(spec, path, set(), {"rel_tol", "abs_tol", "max_step", "first_step"})
    out = {
        "rel_tol": _real(spec.get("rel_tol", 1e-12), f"{path}.rel_tol", positive=True),
        "abs_tol": _real(spec.get("abs_tol", 1e-14), f"{path}.abs_tol", positive=True),
    }
    if "max_step" in spec:
        out["max_step"] = _real(spec["max_step"], f"{path}.max_step", positive=True)
    if "first_step" in spec:
        out["first_step"] = _real(spec["first_step"], f"{path}.first_step", positive=True)
    return out


def build_ode_settings(spec) -> OdeSettings:
    return OdeSettings(
        rel_tol=spec["rel_tol"],
        abs_tol=spec["abs_tol"],
        max_step=spec.get("max_step", np.inf),
        first_step=spec.get("first_step"),
    )


def _validate_engine_key(cfg, engine):
    if "engine" in cfg and cfg["engine"] != engine:
        _fail("engine", f"config says {cfg['engine']!r} but the {engine!r} engine was invoked")


def validate_config(cfg, engine):
    """Normalize a raw config dict for the given engine (defaults applied).

    The normalized form validates again unchanged, which is what makes the
    report's scenario echo round-trip.
    """
    if not isinstance(cfg, dict):
        _fail("", "top-level config must be an object")
    _validate_engine_key(cfg, engine)
    if engine == "propagate":
        _check_keys(
            cfg,
            "",
            {"field"},
            {"engine", "j", "t_span", "n_samples", "ode", "restart_threshold", "oracle_steps"},
        )
        field = _validate_field(cfg["field"])
        if "t_span" not in cfg:
            _fail("t_span", "missing required keys ['t_span']")
        return {
            "engine": engine,
            "field": field,
            "j": _real(cfg.get("j", 0.5), "j", positive=True),
            "t_span": _interval(cfg["t_span"], "t_span"),
            "n_samples": _integer(cfg.get("n_samples", 513), "n_samples", minimum=2),
            "ode": _validate_ode(cfg.get("ode", {})),
            "restart_threshold": _real(
                cfg.get("restart_threshold", 10.0), "restart_threshold", positive=True
            ),
            "oracle_steps": _integer(cfg.get("oracle_steps", 20000), "oracle_steps", minimum=2),
        }
    if engine == "phase":
        _check_keys(cfg, "", {"field"}, {"engine", "t_span", "n_samples", "ode"})
        field = _validate_field(cfg["field"])
        if "t_span" in cfg:
            t_span = _interval(cfg["t_span"], "t_span")
        elif field["kind"] == "rotating-cone" and field["omega"] != 0.0:
            t_span = [0.0, 2.0 * math.pi / abs(field["omega"])]
        else:
            _fail("t_span", "required unless the field is a precessing rotating-cone")
        return {
            "engine": engine,
            "field": field,
            "t_span": t_span,
            "n_samples": _integer(cfg.get("n_samples", 513), "n_samples", minimum=2),
            "ode": _validate_ode(cfg.get("ode", {})),
        }
    if engine == "resonance":
        _check_keys(
            cfg,
            "",
            {"preset"},
            {
                "engine",
                "coupling_scale",
                "e_window",
                "eta_factor",
                "n_scan",
                "run_decay",
                "decay_t",
                "decay_steps",
                "initial_level",
            },
        )
        preset = cfg["preset"]
        if preset not in available_presets():
            _fail("preset", f"unknown preset {preset!r}; see `effham presets`")
        out = {
            "engine": engine,
            "preset": preset,
            "coupling_scale": _real(
                cfg.get("coupling_scale", 1.0), "coupling_scale", positive=True
            ),
            "eta_factor": _real(cfg.get("eta_factor", 3.0), "eta_factor", positive=True),
            "n_scan": _integer(cfg.get("n_scan", 201), "n_scan", minimum=3),
            "run_decay": _boolean(cfg.get("run_decay", True), "run_decay"),
            "decay_steps": _integer(cfg.get("decay_steps", 400), "decay_steps", minimum=8),
            "initial_level": _integer(cfg.get("initial_level", 0), "initial_level", minimum=0),
        }
        if "e_window" in cfg:
            out["e_window"] = _interval(cfg["e_window"], "e_window")
        if "decay_t" in cfg:
            out["decay_t"] = _real(cfg["decay_t"], "decay_t", positive=True)
        return out
    if engine == "varcheck":
        _check_keys(
            cfg,
            "",
            {"field"},
            {"engine", "j", "t_final", "n_intervals", "identity_intervals", "epsilons", "seed", "ode"},
        )
        n_int = _integer(cfg.get("n_intervals", 64), "n_intervals", minimum=4)
        if n_int % 2 != 0:
            _fail("n_intervals", "must be even (Simpson quadrature)")
        n_id = _integer(cfg.get("identity_intervals", 32), "identity_intervals", minimum=4)
        if n_id % 4 != 0:
            _fail("identity_intervals", "must be divisible by 4 (refinement check halves it)")
        eps = cfg.get("epsilons", [0.2, 0.1, 0.05, 0.025])
        if not isinstance(eps, list) or len(eps) < 2:
            _fail("epsilons", "expected a list of at least 2 values")
        eps = [_real(e, f"epsilons[{i}]", positive=True) for i, e in enumerate(eps)]
        return {
            "engine": engine,
            "field": _validate_field(cfg["field"]),
            "j": _real(cfg.get("j", 0.5), "j", positive=True),
            "t_final": _real(cfg.get("t_final", 1.0), "t_final", positive=True),
            "n_intervals": n_int,
            "identity_intervals": n_id,
            "epsilons": eps,
            "seed": _integer(cfg.get("seed", 13), "seed", minimum=0),
            "ode": _validate_ode(cfg.get("ode", {})),
        }
    _fail("engine", f"unknown engine {engine!r}")


# ---------------------------------------------------------------------------
# report plumbing


def _check(name: str, value: float, threshold: float) -> dict:
    value = float(value)
    return {
        "name": name,
        "value": value,
        "threshold": float(threshold),
        "pass": bool(value <= threshold),
    }


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> str:
    """Delimited output with repr-shortest floats: bit-identical across runs."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
    return str(path)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    return x


# ---------------------------------------------------------------------------
# engines


def run_propagate(cfg, out_dir: Path):
    field = build_field(cfg["field"])
    rep = SpinRepresentation.from_j(cfg["j"])
    settings = build_ode_settings(cfg["ode"])
    t_span = tuple(cfg["t_span"])
    mu = integrate_mu(
        field,
        t_span,
        settings=settings,
        n_samples=cfg["n_samples"],
        restart_threshold=cfg["restart_threshold"],
    )
    us = reconstruct_evolution(mu, rep, mu.times)
    eye = np.eye(rep.dim)
    unitarity = max(
        float(np.linalg.norm(u.conj().T @ u - eye, ord=2)) for u in us
    )
    m2_pred = np.conjugate(mu.mu3) / (1.0 + np.abs(mu.mu3) ** 2)
    c_mu2 = float(np.abs(mu.mu2 - m2_pred).max())
    c_mu1 = float(
        np.abs(np.exp(mu.mu1.imag) / (1.0 + np.abs(mu.mu3) ** 2) - 1.0).max()
    )
    u_direct = direct_propagate(field, rep, t_span, cfg["oracle_steps"])
    oracle = float(np.linalg.norm(us[-1] - u_direct, ord=2))

    checks = [
        _check("unitarity", unitarity, 1e-9),
        _check("mu2_constraint", c_mu2, 1e-9),
        _check("exp_im_mu1_constraint", c_mu1, 1e-8),
        _check("direct_oracle", oracle, 1e-7),
    ]
    headline = {
        "t_end": float(mu.times[-1]),
        "n_restarts": mu.n_restarts,
        "final_mu3_abs": float(np.abs(mu.mu3[-1])),
        "unitarity_drift": unitarity,
        "oracle_distance": oracle,
    }
    csv_path = write_csv(
        out_dir / "mu.csv",
        ["t", "re_mu3", "im_mu3", "re_mu2", "im_mu2", "re_mu1", "im_mu1"],
        [
            mu.times,
            mu.mu3.real,
            mu.mu3.imag,
            mu.mu2.real,
            mu.mu2.imag,
            mu.mu1.real,
            mu.mu1.imag,
        ],
    )
    fig_path = figures.render_mu(
        out_dir / "mu.png",
        mu.times,
        mu.mu3,
        mu.mu2,
        mu.mu1,
        switches=[t for t, _ in mu.switches],
    )
    return headline, checks, {"csv": [csv_path], "figures": [fig_path]}


def run_phase(cfg, out_dir: Path):
    field = build_field(cfg["field"])
    settings = build_ode_settings(cfg["ode"])
    t_span = tuple(cfg["t_span"])
    mu = integrate_mu(field, t_span, settings=settings, n_samples=cfg["n_samples"])
    ps = phase_split(mu, field=field)
    checks = [
        _check("phase_additivity", ps.additivity_residual, 1e-8),
        _check(
            "mu2_constraint",
            float(np.abs(mu.mu2 - np.conjugate(mu.mu3) / (1.0 + np.abs(mu.mu3) ** 2)).max()),
            1e-9,
        ),
    ]
    headline = {
        "total_phase": ps.total,
        "dynamical_phase": ps.dynamical,
        "geometric_phase": ps.geometric,
        "n_restarts": mu.n_restarts,
    }
    spec = cfg["field"]
    if spec["kind"] == "rotating-cone" and spec["omega"] != 0.0:
        w = abs(spec["omega"]) / spec["b0"]
        period = 2.0 * math.pi / abs(spec["omega"])
        full_period = abs(t_span[1] - t_span[0] - period) <= 1e-9 * period
        if full_period and w <= 0.02:
            ref = math.pi * (1.0 - math.cos(spec["theta"]))
            headline["berry_reference"] = ref
            if ref > 0.0:
                checks.append(
                    _check(
                        "berry_deviation",
                        abs(abs(ps.geometric) - ref) / ref,
                        2.0 * w,
                    )
                )
    csv_path = write_csv(
        out_dir / "phase.csv",
        ["t", "total", "dynamical", "geometric", "dynamical_rate", "geometric_rate"],
        [
            ps.sample_times,
            ps.total_samples,
            ps.dynamical_samples,
            ps.geometric_samples,
            ps.dynamical_rate,
            ps.geometric_rate,
        ],
    )
    fig_path = figures.render_phase(
        out_dir / "phase.png",
        ps.sample_times,
        ps.total_samples,
        ps.dynamical_samples,
        ps.geometric_samples,
        ps.dynamical_rate,
        ps.geometric_rate,
    )
    return headline, checks, {"csv": [csv_path], "figures": [fig_path]}


def run_resonance(cfg, out_dir: Path):
    model, defaults = preset_model(cfg["preset"], coupling_scale=cfg["coupling_scale"])
    window = tuple(cfg.get("e_window", defaults["e_window"]))
    results = resonance_search(
        model, window, eta_factor=cfg["eta_factor"], n_scan=cfg["n_scan"]
    )
    energies, lam, eta = resonance_scan(
        model, window, eta_factor=cfg["eta_factor"], n_scan=cfg["n_scan"]
    )
    checks = []
    if results:
        checks.append(
            _check("gamma_nonnegative", max(0.0, -min(r.gamma for r in results)), 0.0)
        )
        checks.append(
            _check("self_consistency", max(r.residual for r in results), 1e-8)
        )
    headline = {
        "preset": cfg["preset"],
        "eta": eta,
        "resonances": [
            {
                "e_r": r.e_r,
                "gamma": r.gamma,
                "shift": r.shift,
                "gamma_double_eta": r.gamma_double_eta,
                "e_unperturbed": r.e_unperturbed,
                "residual": r.residual,
                "warnings": list(r.warnings),
            }
            for r in results
        ],
    }
    cols = [energies]
    names = ["e"]
    for k in range(lam.shape[1]):
        cols.extend([lam[:, k].real, lam[:, k].imag, -2.0 * lam[:, k].imag])
        names.extend([f"re_lambda_{k}", f"im_lambda_{k}", f"gamma_{k}"])
    csv_paths = [write_csv(out_dir / "scan.csv", names, cols)]
    fig_paths = [figures.render_resonance(out_dir / "resonance.png", energies, lam, results)]

    if cfg["run_decay"]:
        level = cfg["initial_level"]
        p_vals, p_vecs = np.linalg.eigh(model.ph.php)
        if level >= p_vecs.shape[1]:
            _fail("initial_level", f"model has only {p_vecs.shape[1]} P-space levels")
        fit = decay_oracle(
            model,
            initial=p_vecs[:, level],
            t_final=cfg.get("decay_t", defaults["decay_t"]),
            n_steps=cfg["decay_steps"],
        )
        headline["decay_rate"] = fit.rate
        headline["decay_residual_rms"] = fit.residual_rms
        headline["decay_revived"] = fit.revived
        headline["recurrence_time"] = fit.recurrence_time
        if results:
            e_level = float(p_vals[level])
            match = min(results, key=lambda r: abs(r.e_unperturbed - e_level))
            agree = abs(match.gamma - fit.rate) / match.gamma
            headline["gamma_vs_decay_rel"] = agree
            tol = 0.05 if model.kind == "two-channel" else 0.10
            checks.append(_check("width_vs_decay", agree, tol))
        csv_paths.append(
            write_csv(out_dir / "survival.csv", ["t", "survival"], [fit.times, fit.survival])
        )
        fig_paths.append(
            figures.render_survival(
                out_dir / "survival.png",
                fit.times,
                fit.survival,
                fit.rate,
                fit.log_intercept,
                fit.fit_slice,
            )
        )
    return headline, checks, {"csv": csv_paths, "figures": fig_paths}


def run_varcheck(cfg, out_dir: Path):
    field = build_field(cfg["field"])
    rep = SpinRepresentation.from_j(cfg["j"])
    dim = rep.dim
    settings = build_ode_settings(cfg["ode"])
    t_final = cfg["t_final"]
    mu = integrate_mu(field, (0.0, t_final), settings=settings, n_samples=cfg["n_intervals"] + 1)

    def hamiltonian(t):
        return rep.hamiltonian(*field.b_components(t))

    # identity: crude trial U_t = I on a coarse/fine grid pair
    n_id = cfg["identity_intervals"]
    residuals = {}
    for n in (n_id // 2, n_id):
        ts = np.linspace(0.0, t_final, n + 1)
        us = reconstruct_evolution(mu, rep, ts)
        ident = np.broadcast_to(np.eye(dim, dtype=complex), (n + 1, dim, dim)).copy()
        trial = TrialEvolution(ts, ident, derivatives=np.zeros_like(ident), label="identity")
        residuals[n] = identity_check(ts, us, trial, hamiltonian, t_final)
    ratio = residuals[n_id // 2] / residuals[n_id] if residuals[n_id] > 0.0 else float("inf")

    # slope: detuned exact propagator as the trial family
    times = np.linspace(0.0, t_final, cfg["n_intervals"] + 1)
    us = reconstruct_evolution(mu, rep, times)
    rng = np.random.default_rng(cfg["seed"])
    k = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    k = (k + k.conj().T) / 2.0
    k /= np.linalg.norm(k, ord=2)
    trial_errors, var_errors = [], []
    endpoint_exact = 0.0
    for eps in cfg["epsilons"]:
        phase = np.stack([mat_exp(-1j * eps * t * k) for t in times])
        u_t = np.einsum("kij,kjl->kil", us, phase)
        du = np.empty_like(u_t)
        for i, t in enumerate(times):
            du[i] = -1j * hamiltonian(t) @ u_t[i] + us[i] @ (-1j * eps * k) @ phase[i]
        trial = TrialEvolution(times, u_t, derivatives=du, label=f"detuned eps={eps}")
        res = variational_correct(trial, hamiltonian, reference=us)
        trial_errors.append(float(np.linalg.norm(u_t[-1] - us[-1], ord=2)))
        var_errors.append(float(res.error_norms[-1]))
        endpoint_exact = max(endpoint_exact, float(np.abs(res.u_var[0] - np.eye(dim)).max()))
    slope = float(
        np.polyfit(np.log(cfg["epsilons"]), np.log(var_errors), 1)[0]
    )
    checks = [
        _check("identity_residual", residuals[n_id], 1e-6),
        _check("identity_refinement", abs(ratio / 16.0 - 1.0), 0.2),
        _check("second_order_slope", abs(slope - 2.0), 0.1),
        _check("endpoint_identity", endpoint_exact, 0.0),
    ]
    headline = {
        "identity_residual_fine": residuals[n_id],
        "identity_residual_coarse": residuals[n_id // 2],
        "refinement_ratio": ratio,
        "slope": slope,
        "trial_errors": trial_errors,
        "var_errors": var_errors,
    }
    csv_path = write_csv(
        out_dir / "varcheck.csv",
        ["epsilon", "trial_error", "corrected_error"],
        [np.asarray(cfg["epsilons"]), np.asarray(trial_errors), np.asarray(var_errors)],
    )
    fig_path = figures.render_varcheck(
        out_dir / "varcheck.png", cfg["epsilons"], trial_errors, var_errors, slope
    )
    return headline, checks, {"csv": [csv_path], "figures": [fig_path]}


_RUNNERS = {
    "propagate": run_propagate,
    "phase": run_phase,
    "resonance": run_resonance,
    "varcheck": run_varcheck,
}


def run_scenario(engine: str, config_path: str, out_dir: str) -> dict:
    """Validate, dispatch, and write report.json; returns the report dict."""
    with open(config_path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{config_path}: not valid JSON ({exc})") from exc
    cfg = validate_config(raw, engine)
    # the echo must survive re-validation unchanged (round-trip contract)
    validate_config(cfg, engine)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    headline, checks, outputs = _RUNNERS[engine](cfg, out)
    elapsed = time.perf_counter() - t0
    report = {
        "engine": engine,
        "scenario": cfg,
        "headline": _jsonable(headline),
        "invariants": checks,
        "ok": all(c["pass"] for c in checks),
        "timing": {"seconds": elapsed},
        "outputs": outputs,
    }
    with open(out / "report.json", "w") as fh:
        json.dump(_jsonable(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def _print_checks(report):
    for c in report["invariants"]:
        status = "PASS" if c["pass"] else "FAIL"
        print(f"  [{status}] {c['name']}: {c['value']:.3e} (threshold {c['threshold']:.3e})")


def _thread_count() -> int:
    raw = os.environ.get("EFFHAM_THREADS", "")
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ConfigError(f"EFFHAM_THREADS: expected an integer, got {raw!r}") from exc
        if n < 1:
            raise ConfigError("EFFHAM_THREADS: must be >= 1")
        return n
    return min(4, os.cpu_count() or 1)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="effham",
        description="effective-Hamiltonian engines: Wei-Norman propagation, "
        "phase splitting, resonance extraction, variational checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for engine in ENGINES:
        p = sub.add_parser(engine, help=f"run the {engine} engine")
        p.add_argument("--config", help="path to the scenario JSON")
        p.add_argument("--out", default=None, help="output directory (default effham-<engine>)")
        p.add_argument(
            "--sweep",
            default=None,
            help="comma-separated config paths run concurrently under this engine",
        )
    sub.add_parser("presets", help="list bundled model presets")
    args = parser.parse_args(argv)

    if args.command == "presets":
        for name, entry in sorted(available_presets().items()):
            print(f"{name}: {entry['description']}")
            print(f"    e_window={entry['e_window']}  decay_t={entry['decay_t']}")
        return 0

    engine = args.command
    out_base = args.out or f"effham-{engine}"
    try:
        if args.sweep:
            paths = [p for p in args.sweep.split(",") if p]
            if not paths:
                raise ConfigError("--sweep: expected at least one config path")
            with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
                futures = [
                    pool.submit(run_scenario, engine, p, str(Path(out_base) / f"run-{i:03d}"))
                    for i, p in enumerate(paths)
                ]
                reports = [f.result() for f in futures]
            merged = {
                "engine": engine,
                "runs": [
                    {"index": i, "config": paths[i], "ok": r["ok"], "headline": r["headline"]}
                    for i, r in enumerate(reports)
                ],
                "ok": all(r["ok"] for r in reports),
            }
            Path(out_base).mkdir(parents=True, exist_ok=True)
            with open(Path(out_base) / "sweep.json", "w") as fh:
                json.dump(_jsonable(merged), fh, indent=2, sort_keys=True)
                fh.write("\n")
            for i, r in enumerate(reports):
                print(f"run-{i:03d}: {paths[i]}")
                _print_checks(r)
            return 0 if merged["ok"] else 1
        if not args.config:
            raise ConfigError("--config: required unless --sweep is given")
        report = run_scenario(engine, args.config, out_base)
        _print_checks(report)
        return 0 if report["ok"] else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EffhamError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
