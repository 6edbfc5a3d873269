"""Batch entry point: dispatch verification suites and simulations.

    meanspin <command> --config <path> [--out <dir>] [--seed <n>]

Exit status: 0 all checks pass, 1 at least one check failed,
2 configuration error, 3 divergence guard tripped.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import numpy as np

from . import algebra
from .config import COMMANDS, ConfigError, RunConfig, parse_config
from .fields import FieldConfig, PhysicalParams
from .fw import (free_hamiltonian_fixed_momentum, free_particle_mean_spin,
                 hfw_scaling_study, mean_spin_closed, order_scaling_study)
from .grids import Grid, operator_norm
from .hamiltonian import build_dirac_hamiltonian, maxwell_faraday_residual
from .llg import LLGParams, compare_trajectories, gilbert_constant, llg_integrate
from .propagation import (DivergenceError, propagate, separable_positive_packet,
                          spin_trajectory)
from .ptsym import (pseudo_pt_symmetry_residual, pt_inner,
                    spectrum_classification, sigma_operators)
from .trajectory import zero_crossing_frequency


@dataclass
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool
    wall_time: float


@dataclass
class SummaryReport:
    checks: List[CheckResult] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def add(self, name: str, value: float, threshold: float, passed: bool,
            wall_time: float) -> None:
        self.checks.append(CheckResult(name, float(value), float(threshold),
                                       bool(passed), float(wall_time)))

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"check.{c.name}.value={c.value:.6e}")
            lines.append(f"check.{c.name}.threshold={c.threshold:.6e}")
            lines.append(f"check.{c.name}.pass={'true' if c.passed else 'false'}")
            lines.append(f"check.{c.name}.walltime={c.wall_time:.3f}")
        for j, note in enumerate(self.notes):
            lines.append(f"note.{j}={note}")
        lines.append(f"overall={'pass' if self.overall else 'fail'}")
        return "\n".join(lines) + "\n"


def _timed(report: SummaryReport, name: str, threshold: float, below=True):
    """Context helper: run fn() -> value, record pass iff value < threshold."""
    class _Ctx:
        def __enter__(self):
            self.t0 = time.perf_counter()
            return self

        def record(self, value):
            wall = time.perf_counter() - self.t0
            ok = value < threshold if below else value >= threshold
            report.add(name, value, threshold, ok, wall)

        def __exit__(self, *exc):
            return False
    return _Ctx()


def _field_from_config(cfg: RunConfig) -> FieldConfig:
    return FieldConfig(kind=cfg["field.kind"], B0=cfg["field.B0"],
                       E0=cfg["field.E0"], omega=cfg["field.omega"])


def _params_from_config(cfg: RunConfig) -> PhysicalParams:
    return PhysicalParams(m=cfg["physical.m"], c=cfg["physical.c"],
                          e=cfg["physical.e"])


def cmd_verify_algebra(cfg: RunConfig, outdir: Path, rng) -> SummaryReport:
    rep = SummaryReport()
    mats = algebra.build_matrix_set()
    with _timed(rep, "clifford", cfg.tol("clifford")) as t:
        t.record(algebra.verify_clifford_relations(mats, cfg.tol("clifford")).max_residual)
    with _timed(rep, "pt_conjugation", cfg.tol("pt_conjugation")) as t:
        t.record(algebra.verify_pt_conjugation(mats, cfg.tol("pt_conjugation")).max_residual)
    with _timed(rep, "su2_structure", cfg.tol("clifford")) as t:
        t.record(algebra.su2_commutator_report(mats, cfg.tol("clifford")).max_residual)
    with _timed(rep, "pt_square_sign_stable", 1e-13) as t:
        t.record(abs(algebra.pt_square_sign(mats) - (-1.0)))
    return rep


def cmd_verify_pt(cfg: RunConfig, outdir: Path, rng) -> SummaryReport:
    rep = SummaryReport()
    grid = Grid(cfg["grid.n"], cfg["grid.length"])
    params = _params_from_config(cfg)
    for kind in ("zero", "uniform_B", "uniform_E", "harmonic_B"):
        f = FieldConfig(kind=kind, B0=cfg["field.B0"], E0=cfg["field.E0"] or 0.3,
                        omega=cfg["field.omega"] or 0.2)
        H = build_dirac_hamiltonian(grid, f, 0.0, params, variant="pseudo_pt")
        with _timed(rep, f"pseudo_pt_residual.{kind}", cfg.tol("pseudo_pt_residual")) as t:
            t.record(pseudo_pt_symmetry_residual(H, grid))
    H0 = build_dirac_hamiltonian(grid, FieldConfig(kind="zero"), 0.0, params)
    rep.notes.append(f"spectrum_classification={spectrum_classification(H0)}")
    with _timed(rep, "maxwell_faraday.harmonic_B", cfg.tol("maxwell_faraday")) as t:
        f = FieldConfig(kind="harmonic_B", B0=cfg["field.B0"], omega=cfg["field.omega"] or 0.2)
        t.record(maxwell_faraday_residual(f, grid, 3.0, params))
    return rep


def cmd_verify_fw(cfg: RunConfig, outdir: Path, rng) -> SummaryReport:
    rep = SummaryReport()
    params_c1 = PhysicalParams(m=1.0, c=1.0, e=cfg["physical.e"])
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(50):
        k = rng.normal(scale=1.0, size=3)
        H = free_hamiltonian_fixed_momentum(k, params_c1)
        for S in free_particle_mean_spin(k, params_c1):
            worst = max(worst, operator_norm(H @ S - S @ H))
    rep.add("free_meanspin_commutator", worst, cfg.tol("free_meanspin_commutator"),
            worst < cfg.tol("free_meanspin_commutator"), time.perf_counter() - t0)

    grid = Grid(min(cfg["grid.n"], 32), cfg["grid.length"])
    masses = cfg["sweep.masses"]
    t0 = time.perf_counter()
    rows = order_scaling_study(grid, FieldConfig(kind="zero"), 0.0,
                               cfg["physical.c"], masses, orders=(3,),
                               e=cfg["physical.e"])
    slope = rows[0]["fitted_slope"]
    rep.add("meanspin_order3_slope_dev", abs(slope + 4.0),
            cfg.tol("order_slope_window"), abs(slope + 4.0) < cfg.tol("order_slope_window"),
            time.perf_counter() - t0)
    _write_scaling_csv(outdir / "fw_scaling.csv", rows)
    return rep


def cmd_simulate_dirac(cfg: RunConfig, outdir: Path, rng) -> SummaryReport:
    rep = SummaryReport()
    grid = Grid(cfg["grid.n"], cfg["grid.length"])
    params = _params_from_config(cfg)
    f = _field_from_config(cfg)
    psi0 = separable_positive_packet(
        grid, params, spin_direction=(cfg["spin.ux"], cfg["spin.uy"], cfg["spin.uz"]))
    H = build_dirac_hamiltonian(grid, f, cfg["run.t0"], params)
    t0 = time.perf_counter()
    traj = propagate(lambda t: H, psi0, cfg["run.t0"], cfg["run.t1"],
                     cfg["run.dt"], store_every=cfg["run.store_every"],
                     static=f.static)
    ops = mean_spin_closed(grid, f, cfg["run.t0"], params, order=3).assemble(params.m, 3)
    mt = spin_trajectory(traj, lambda t: ops, mu_b=params.mu_bohr)
    mt.write_csv(outdir / "dirac_trajectory.csv", quantum_schema=True)
    pt_drift = float(np.abs(mt.extra["pt_norm_re"] - mt.extra["pt_norm_re"][0]).max())
    rep.add("pt_norm_recorded", pt_drift, np.inf, True, time.perf_counter() - t0)
    return rep


def cmd_simulate_llg(cfg: RunConfig, outdir: Path, rng) -> SummaryReport:
    rep = SummaryReport()
    params = _params_from_config(cfg)
    f = _field_from_config(cfg)
    p = LLGParams(field=f, params=params, alpha_g=cfg["llg.alpha_g"],
                  chi_m=cfg["llg.chi_m"], M_s=cfg["llg.M_s"],
                  v=(cfg["llg.vx"], cfg["llg.vy"], cfg["llg.vz"]))
    theta0 = cfg["llg.theta0"]
    M0 = p.M_s * np.array([np.sin(theta0), 0.0, np.cos(theta0)])
    t0 = time.perf_counter()
    traj = llg_integrate(M0, p, cfg["run.t0"], cfg["run.t1"], cfg["run.dt"],
                         store_every=cfg["run.store_every"])
    traj.write_csv(outdir / "llg_trajectory.csv")
    drift = float(np.abs(traj.norms - p.M_s).max())
    rep.add("llg_norm_drift", drift, cfg.tol("llg_norm_drift") * p.M_s,
            drift < cfg.tol("llg_norm_drift") * p.M_s, time.perf_counter() - t0)
    return rep


def cmd_compare(cfg: RunConfig, outdir: Path, rng) -> SummaryReport:
    from .fw import fw_hamiltonian_closed
    rep = SummaryReport()
    grid = Grid(cfg["grid.n"], cfg["grid.length"])
    params = _params_from_config(cfg)
    f = _field_from_config(cfg)
    if f.kind != "uniform_B":
        f = FieldConfig(kind="uniform_B", B0=cfg["field.B0"] or 1.0)
    t0 = time.perf_counter()
    Hfw = fw_hamiltonian_closed(grid, f, cfg["run.t0"], params).as_operator()
    psi0 = separable_positive_packet(grid, params, spin_direction=(1, 0, 0))
    traj = propagate(lambda t: Hfw, psi0, cfg["run.t0"], cfg["run.t1"],
                     cfg["run.dt"], store_every=cfg["run.store_every"], static=True)
    sig = sigma_operators(grid)
    mt_q = spin_trajectory(traj, lambda t: sig)
    mt_q.write_csv(outdir / "quantum_trajectory.csv", quantum_schema=True)

    p = LLGParams(field=f, params=params, alpha_g=0.0, M_s=1.0)
    M0 = np.array([1.0, 0.0, 0.0])
    mt_c = llg_integrate(M0, p, cfg["run.t0"], cfg["run.t1"], cfg["run.dt"],
                         store_every=cfg["run.store_every"])
    mt_c.write_csv(outdir / "llg_trajectory.csv")
    metrics = compare_trajectories(mt_q, mt_c)
    for k, v in metrics.as_flat_dict().items():
        rep.notes.append(f"compare.{k}={v:.6e}")
    fq = zero_crossing_frequency(mt_q.times, mt_q.M[:, 1])
    fc = zero_crossing_frequency(mt_c.times, mt_c.M[:, 1])
    rel = abs(fq - fc) / abs(fc) if fc else np.inf
    rep.add("bridge_frequency_rel", rel, cfg.tol("bridge_frequency_rel"),
            rel < cfg.tol("bridge_frequency_rel"), time.perf_counter() - t0)
    return rep


def cmd_sweep(cfg: RunConfig, outdir: Path, rng) -> SummaryReport:
    rep = SummaryReport()
    grid = Grid(min(cfg["grid.n"], 32), cfg["grid.length"])
    f = _field_from_config(cfg)
    masses = cfg["sweep.masses"]
    t0 = time.perf_counter()
    rows = order_scaling_study(grid, f, cfg["run.t0"], cfg["physical.c"],
                               masses, orders=(0, 1, 2, 3), e=cfg["physical.e"])
    _write_scaling_csv(outdir / "sweep_deviations.csv", rows)
    slope3 = [r["fitted_slope"] for r in rows if r["order"] == 3][0]
    rep.add("sweep_order3_slope_dev", abs(slope3 + 4.0), cfg.tol("order_slope_window"),
            abs(slope3 + 4.0) < cfg.tol("order_slope_window"),
            time.perf_counter() - t0)
    t0 = time.perf_counter()
    hfw = hfw_scaling_study(grid, f, cfg["run.t0"], cfg["physical.c"], masses,
                            e=cfg["physical.e"])
    rep.add("sweep_hfw_full_slope_dev", abs(hfw["slope_full"] + 4.0),
            cfg.tol("order_slope_window"),
            abs(hfw["slope_full"] + 4.0) < cfg.tol("order_slope_window"),
            time.perf_counter() - t0)
    rep.notes.append(f"hfw_even_slope={hfw['slope_even']:.3f}")
    return rep


def _write_scaling_csv(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("m,c,order,deviation_norm,fitted_slope\n")
        for r in rows:
            fh.write(f"{r['m']:.17g},{r['c']:.17g},{r['order']},"
                     f"{r['deviation_norm']:.17g},{r['fitted_slope']:.17g}\n")


_DISPATCH = {
    "verify-algebra": cmd_verify_algebra,
    "verify-pt": cmd_verify_pt,
    "verify-fw": cmd_verify_fw,
    "simulate-dirac": cmd_simulate_dirac,
    "simulate-llg": cmd_simulate_llg,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def execute(cfg: RunConfig, outdir: Path) -> SummaryReport:
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg["run.seed"])
    report = _DISPATCH[cfg.command](cfg, outdir, rng)
    report.notes.insert(0, f"seed={cfg['run.seed']}")
    (outdir / "summary.txt").write_text(report.render(), encoding="utf-8")
    return report


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="meanspin",
                                 description="pseudo-PT Dirac spin dynamics suite")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", default=None, help="flat key=value config file")
    ap.add_argument("--out", default=None, help="output directory")
    ap.add_argument("--seed", type=int, default=None, help="override run.seed")
    args = ap.parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text, command=args.command)
        if args.seed is not None:
            cfg.values["run.seed"] = args.seed
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    outdir = Path(args.out) if args.out else Path(cfg["output.dir"])
    try:
        report = execute(cfg, outdir)
    except DivergenceError as exc:
        print(f"divergence guard: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.render())
    return 0 if report.overall else 1


if __name__ == "__main__":
    sys.exit(main())
