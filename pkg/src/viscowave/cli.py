"""Batch driver: config-file experiments with CSV artifacts.

Subcommands:

    viscowave run --config run.cfg [--out DIR] [--seed U64]
    viscowave check-params --gamma .. --b1 .. --b2 .. --r1 .. --r2 ..

The config format is flat ``key = value`` lines with ``#`` comments. Every
experiment writes RFC-4180 CSV files (17-significant-digit floats) plus a
manifest.json listing the echoed config, package version, timestamps, and
a sha256 digest of each artifact. With a fixed seed the CSV bytes are
reproducible; timestamps live only in the manifest.

Exit codes: 0 success, 1 embedded assertion failed, 2 config error,
3 constraint violation, 4 convergence failure, 5 conditioning failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .control import duality_check, solve_hum
from .errors import ConfigError, ViscowaveError
from .ingham import ingham_constant, verify_direct, verify_inverse
from .modal import (
    asymptotic_coefficients,
    exact_coefficients_batch,
    norm_equivalence_sweep,
    remainder_report,
)
from .model import InitialData, ModelParams, Normalization, SpectralBasis, validate_params
from .series import SolutionField, trace_times, volterra_oracle_batch
from .spectrum import (
    asymptotic_roots,
    control_time_threshold,
    root_table,
    spectral_limits,
)

EXPERIMENTS = ("spectrum", "modal", "simulate", "ingham-inverse", "ingham-direct", "control")

TARGETS = ("e1_0", "0_e1", "random")

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else _fmt(cell) for cell in row])


CONFIG_SCHEMA = {
    "gamma": ("float", None),
    "b1": ("float", None),
    "b2": ("float", None),
    "r1": ("float", None),
    "r2": ("float", None),
    "experiment": ("experiment", None),
    "N": ("int", 50),
    "T": ("horizon", "auto"),
    "trials": ("int", 100),
    "seed": ("int", 0),
    "epsilon": ("float", 0.01),
    "out": ("str", "out"),
    "target": ("target", "random"),
}


def _cast(key: str, raw: str, kind: str, where: str):
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            value = int(raw)
            if value < 0:
                raise ValueError("negative")
            return value
        if kind == "horizon":
            return "auto" if raw == "auto" else float(raw)
        if kind == "experiment":
            if raw not in EXPERIMENTS:
                raise ValueError(f"one of {', '.join(EXPERIMENTS)} expected")
            return raw
        if kind == "target":
            if raw not in TARGETS:
                raise ValueError(f"one of {', '.join(TARGETS)} expected")
            return raw
        return raw
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key!r}: {raw!r} ({exc})") from None


def parse_config(path: str) -> dict:
    """Read a flat key = value config file with # comments."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = _cast(key, raw, CONFIG_SCHEMA[key][0], f"{path}:{lineno}")
    for key, (_, default) in CONFIG_SCHEMA.items():
        if key not in values:
            if default is None:
                raise ConfigError(f"{path}: missing required key {key!r}")
            values[key] = default
    if values["N"] < 1:
        raise ConfigError(f"{path}: N must be >= 1")
    if values["trials"] < 1:
        raise ConfigError(f"{path}: trials must be >= 1")
    if not 0.0 < values["epsilon"] < 1.0:
        raise ConfigError(f"{path}: epsilon must lie in (0, 1)")
    if values["T"] != "auto" and values["T"] <= 0:
        raise ConfigError(f"{path}: T must be positive or 'auto'")
    return values


def _params_from_config(cfg: dict) -> ModelParams:
    return validate_params(cfg["gamma"], cfg["b1"], cfg["b2"], cfg["r1"], cfg["r2"])


def _resolve_horizon(cfg: dict, params: ModelParams) -> float:
    if cfg["T"] != "auto":
        return float(cfg["T"])
    limits = spectral_limits(params, max(cfg["N"], 50), (cfg["epsilon"],))
    return 1.5 * control_time_threshold(params, limits)


class _Assertions:
    def __init__(self):
        self.entries: list[dict] = []

    def check(self, name: str, passed: bool, detail: str) -> None:
        self.entries.append({"name": name, "passed": bool(passed), "detail": detail})

    @property
    def all_passed(self) -> bool:
        return all(e["passed"] for e in self.entries)


def _run_spectrum(cfg, params, out, rng, checks):
    N = cfg["N"]
    roots = root_table(params, N)
    limits = spectral_limits(params, N, (cfg["epsilon"],), roots=roots)
    rows = []
    for r in roots:
        om_t, rho_t = asymptotic_roots(params, r.lam)
        rows.append(
            (
                r.n,
                r.omega.real,
                r.omega.imag,
                r.rho,
                r.residual,
                math.sqrt(r.lam) * abs(r.omega - om_t),
                r.lam * abs(r.rho - rho_t),
            )
        )
    _write_csv(
        out / "roots.csv",
        ["n", "re_omega", "im_omega", "rho", "residual", "err_omega_scaled", "err_rho_scaled"],
        rows,
    )
    threshold = control_time_threshold(params, limits)
    _write_csv(
        out / "limits.csv",
        ["gap", "min_gap", "alpha_omega", "alpha_rho", "epsilon", "n0", "T0"],
        [
            (
                limits.gap,
                limits.min_gap,
                limits.alpha_omega,
                limits.alpha_rho,
                cfg["epsilon"],
                limits.n0_table[cfg["epsilon"]],
                threshold,
            )
        ],
    )
    worst = max(r.residual for r in roots)
    checks.check("root-residuals", worst <= 1e-9, f"max relative residual {worst:.3e}")


def _run_modal(cfg, params, out, rng, checks):
    N = cfg["N"]
    roots = root_table(params, N)
    ns = np.arange(1, N + 1, dtype=float)
    u0 = rng.uniform(-1.0, 1.0, size=N) * ns**-1.5
    u1 = rng.uniform(-1.0, 1.0, size=N) * ns**-1.5
    C, R1, R2 = exact_coefficients_batch(params, roots, u0, u1)
    lams = np.array([r.lam for r in roots])
    report = remainder_report(C, R1, R2, lams)
    rows = []
    for i, r in enumerate(roots):
        asy = asymptotic_coefficients(params, r.lam, u0[i], u1[i], n=r.n)
        data_scale = abs(u0[i]) + abs(u1[i])
        rows.append(
            (
                r.n,
                u0[i],
                u1[i],
                C[i].real,
                C[i].imag,
                R1[i],
                R2[i],
                r.lam * abs(C[i] - asy.C) / max(data_scale, 1e-300),
                r.lam**2 * abs(R1[i] - asy.R1) / max(data_scale, 1e-300),
                r.lam**2 * abs(R2[i] - asy.R2) / max(data_scale, 1e-300),
                report.ratios[i],
            )
        )
    _write_csv(
        out / "modal.csv",
        [
            "n",
            "u0n",
            "u1n",
            "re_C",
            "im_C",
            "R1",
            "R2",
            "err_C_scaled",
            "err_R1_scaled",
            "err_R2_scaled",
            "remainder_ratio",
        ],
        rows,
    )
    ratios = norm_equivalence_sweep(params, roots, cfg["trials"], rng)
    _write_csv(
        out / "summary.csv",
        ["M_hat", "worst_n", "ratio_min", "ratio_max"],
        [(report.M_hat, report.worst_n, float(np.min(ratios)), float(np.max(ratios)))],
    )
    z = np.array([1j * r.omega for r in roots])
    rec0 = np.max(np.abs(2.0 * C.real + R1 + R2 - u0))
    rec1 = np.max(np.abs(2.0 * (z * C).real + np.array([r.rho for r in roots]) * R2 - u1))
    scale = float(np.max(np.abs(u0)) + np.max(np.abs(u1)))
    checks.check(
        "reconstruction",
        max(rec0, rec1) <= 1e-10 * max(scale, 1.0),
        f"worst t=0 mismatch {max(rec0, rec1):.3e}",
    )
    checks.check(
        "norm-equivalence-window",
        float(np.min(ratios)) > 0 and float(np.max(ratios)) / float(np.min(ratios)) <= 100.0,
        f"ratios in [{np.min(ratios):.6g}, {np.max(ratios):.6g}]",
    )


def _run_simulate(cfg, params, out, rng, checks):
    N = cfg["N"]
    T = _resolve_horizon(cfg, params)
    basis = SpectralBasis(params, Normalization.ORTHONORMAL)
    ns = np.arange(1, N + 1, dtype=float)
    data = InitialData(
        rng.uniform(-1.0, 1.0, size=N) * ns**-1.5,
        rng.uniform(-1.0, 1.0, size=N) * ns**-1.5,
    )
    field = SolutionField.from_data(params, basis, data)
    times = trace_times(field.roots[-1].omega.real, T)
    left = field.boundary_trace(times, left=True)
    right = field.boundary_trace(times, left=False)
    _write_csv(
        out / "trace.csv",
        ["t", "trace_left", "trace_right"],
        zip(times, left.values, right.values),
    )
    xs = np.linspace(0.0, math.pi, 65)
    snap_times = np.linspace(0.0, T, 9)
    values = field.evaluate(snap_times, xs)
    _write_csv(
        out / "field.csv",
        ["t", "x", "value"],
        (
            (snap_times[i], xs[j], values[i, j])
            for i in range(snap_times.size)
            for j in range(xs.size)
        ),
    )
    m = min(N, 10)
    lams = basis.eigenvalues(N)[:m]
    osc_times, traj = volterra_oracle_batch(params, lams, data.u0[:m], data.u1[:m], T)
    closed = field.modal_values(osc_times)[:, :m]
    scale = np.maximum(np.max(np.abs(traj), axis=0), 1e-300)
    errors = np.max(np.abs(closed - traj), axis=0) / scale
    _write_csv(
        out / "oracle.csv",
        ["n", "rel_linf_error"],
        zip(range(1, m + 1), errors),
    )
    checks.check(
        "oracle-equivalence",
        float(np.max(errors)) <= 1e-6,
        f"worst closed-form vs stepper error {np.max(errors):.3e}",
    )


def _run_ingham_inverse(cfg, params, out, rng, checks):
    N = cfg["N"]
    T = _resolve_horizon(cfg, params)
    report = verify_inverse(params, T, N, cfg["trials"], rng, cfg["epsilon"])
    _write_csv(
        out / "trials.csv",
        ["trial", "ratio"],
        zip(range(cfg["trials"]), report.ratios),
    )
    limits = spectral_limits(params, N, (cfg["epsilon"],))
    _write_csv(
        out / "summary.csv",
        ["T", "epsilon", "gap", "alpha_omega", "theorem_constant", "T0", "min_ratio"],
        [
            (
                T,
                cfg["epsilon"],
                limits.gap,
                limits.alpha_omega,
                report.rhs_constant,
                control_time_threshold(params, limits),
                report.ratio,
            )
        ],
    )
    checks.check(
        "inverse-inequality",
        report.ratio > 0 and report.ratio >= max(report.rhs_constant, 0.0),
        f"min ratio {report.ratio:.6g} vs constant {report.rhs_constant:.6g}",
    )


def _run_ingham_direct(cfg, params, out, rng, checks):
    N = cfg["N"]
    T = _resolve_horizon(cfg, params)
    result = verify_direct(params, T, N, cfg["trials"], rng)
    _write_csv(
        out / "trials.csv",
        ["trial", "ratio", "ratio_refined"],
        zip(range(cfg["trials"]), result["ratios"], result["ratios_refined"]),
    )
    _write_csv(
        out / "summary.csv",
        ["T", "C0", "C0_refined", "relative_change"],
        [(T, result["constant"], result["constant_refined"], result["relative_change"])],
    )
    checks.check(
        "direct-stability",
        result["relative_change"] <= 0.05,
        f"constant changed {100 * result['relative_change']:.3g}% under N -> 2N",
    )


def _run_control(cfg, params, out, rng, checks):
    N = cfg["N"]
    T = _resolve_horizon(cfg, params)
    ns = np.arange(1, N + 1, dtype=float)
    if cfg["target"] == "e1_0":
        u0 = np.zeros(N)
        u0[0] = 1.0
        u1 = np.zeros(N)
    elif cfg["target"] == "0_e1":
        u0 = np.zeros(N)
        u1 = np.zeros(N)
        u1[0] = 1.0
    else:
        u0 = rng.uniform(-1.0, 1.0, size=N) / ns
        u1 = rng.uniform(-1.0, 1.0, size=N)
    result = solve_hum(params, u0, u1, T, N)
    dual = duality_check(params, T, N, min(cfg["trials"], 20), rng)
    _write_csv(out / "control.csv", ["t", "f"], zip(result.f.times, result.f.values))
    _write_csv(
        out / "result.csv",
        ["N", "T", "gram_condition", "target_error", "control_norm", "duality_error"],
        [
            (
                N,
                T,
                result.gram_condition,
                result.target_error,
                result.control_norm,
                dual["worst_relative_error"],
            )
        ],
    )
    checks.check(
        "reachability",
        result.target_error <= 1e-3,
        f"relative final-state error {result.target_error:.3e}",
    )
    checks.check(
        "duality-identity",
        dual["worst_relative_error"] <= 1e-6,
        f"worst relative duality error {dual['worst_relative_error']:.3e}",
    )


_RUNNERS = {
    "spectrum": _run_spectrum,
    "modal": _run_modal,
    "simulate": _run_simulate,
    "ingham-inverse": _run_ingham_inverse,
    "ingham-direct": _run_ingham_direct,
    "control": _run_control,
}


def run(cfg: dict) -> int:
    """Execute one experiment; returns the process exit code."""
    params = _params_from_config(cfg)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg["seed"])
    checks = _Assertions()
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    _RUNNERS[cfg["experiment"]](cfg, params, out, rng, checks)
    finished = datetime.datetime.now(datetime.timezone.utc).isoformat()
    digests = {}
    for path in sorted(out.glob("*.csv")):
        digests[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
    manifest = {
        "config": {k: cfg[k] for k in sorted(cfg)},
        "version": __version__,
        "started": started,
        "finished": finished,
        "assertions": checks.entries,
        "files": digests,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for entry in checks.entries:
        status = "pass" if entry["passed"] else "FAIL"
        print(f"[{status}] {entry['name']}: {entry['detail']}")
    return 0 if checks.all_passed else 1


def check_params(gamma: float, b1: float, b2: float, r1: float, r2: float) -> int:
    """Validate parameters and print the derived structural quantities."""
    params = validate_params(gamma, b1, b2, r1, r2)
    print(f"valid: gamma={params.gamma} b1={params.b1} b2={params.b2} r1={params.r1} r2={params.r2}")
    print(f"kernel mass b1/r1 + b2/r2 = {params.kernel_mass!r}")
    print(f"decay margin r1+r2-b1-b2 = {params.alpha!r}")
    print(f"strong condition 3/2(b1+b2) < r1+r2: {'yes' if params.strong_condition else 'no'}")
    limits = spectral_limits(params, 50)
    print(
        f"gap ~ {limits.gap:.6g}, alpha_omega ~ {limits.alpha_omega:.6g}, "
        f"alpha_rho ~ {limits.alpha_rho:.6g}"
    )
    try:
        threshold = control_time_threshold(params, limits)
    except ViscowaveError as exc:
        print(f"control-time threshold: none ({exc})")
    else:
        print(f"control-time threshold T0 ~ {threshold:.6g}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="viscowave", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run an experiment from a config file")
    runp.add_argument("--config", required=True, help="path to a key = value config file")
    runp.add_argument("--out", help="output directory (overrides the config)")
    runp.add_argument("--seed", type=int, help="seed override (unsigned integer)")
    checkp = sub.add_parser("check-params", help="validate model parameters")
    for name in ("gamma", "b1", "b2", "r1", "r2"):
        checkp.add_argument(f"--{name}", type=float, required=True)
    return parser


def main(argv=None) -> int:
    threads = os.environ.get("VISCOWAVE_THREADS")
    if threads:
        for var in _THREAD_VARS:
            os.environ.setdefault(var, threads)
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = parse_config(args.config)
            if args.out is not None:
                cfg["out"] = args.out
            if args.seed is not None:
                if args.seed < 0:
                    raise ConfigError("--seed must be a nonnegative integer")
                cfg["seed"] = args.seed
            return run(cfg)
        return check_params(args.gamma, args.b1, args.b2, args.r1, args.r2)
    except ViscowaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
