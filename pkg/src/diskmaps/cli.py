"""Command-line driver.

Every subcommand can also be described by an INI file passed with
``--config``; command-line flags override the file::

    [map]
    variant = blaschke
    zeros = 0.5, -0.5, 0.5j, -0.5j

    [job]
    task = fig23
    t = 0.125, 0.0555555555555556
    resolution = 1024

Exit codes: 0 success, 1 invalid input or I/O failure, 2 a measurement
violates a sharp bound, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import math
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import levelset as ls
from . import norms, radial
from .maps import (BlaschkeProduct, ConvergenceError, DiskMap, DomainError, MoebiusTransform,
                   PowerRadialMap, as_point, boundary_dilatation, boundary_length, winding_number)
from .report import OutputError, emit_csv, emit_image, emit_json, write_png

log = logging.getLogger("diskmaps")

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION, EXIT_NONCONVERGENCE = 0, 1, 2, 3

SUBCOMMANDS = {
    "area": "area",
    "bound-sweep": "bound_sweep",
    "norm": "norm",
    "winding": "winding",
    "fig1": "figure1",
    "fig23": "figure2_3",
    "radial-verify": "radial_verify",
}
TASKS = tuple(SUBCOMMANDS.values())
VARIANTS = ("blaschke", "moebius", "power", "radial")

FIGURE_ZEROS = ("0.5", "-0.5", "0.5j", "-0.5j")
T_GRID = tuple(k / 10 for k in range(1, 10))


@dataclass(frozen=True)
class MapSpec:
    variant: str
    zeros: tuple[str, ...] = ()
    phase: float = 0.0
    a: str = "0"
    d: int = 1
    K: float | None = None
    density: str = "0"
    grid_size: int = 1024

    def build(self) -> DiskMap:
        if self.variant == "blaschke":
            return BlaschkeProduct(tuple(as_point(z) for z in self.zeros), self.phase)
        if self.variant == "moebius":
            return MoebiusTransform(as_point(self.a))
        if self.variant == "power":
            return PowerRadialMap(self.d, 1.0 if self.K is None else self.K)
        if self.variant == "radial":
            return radial.radial_qc_build(float(self.a), self.load_density(), self.K, self.grid_size)
        raise DomainError(f"unknown map variant {self.variant!r}")

    def load_density(self) -> radial.DensitySpec:
        try:
            return radial.DensitySpec.constant(float(self.density))
        except ValueError:
            path = Path(self.density)
            if not path.is_file():
                raise DomainError(f"density {self.density!r} is neither a number nor a CSV file")
            return radial.DensitySpec.from_csv(path)

    def describe(self) -> dict:
        keep = {
            "blaschke": ("zeros", "phase"),
            "moebius": ("a",),
            "power": ("d", "K"),
            "radial": ("a", "K", "density", "grid_size"),
        }[self.variant]
        out = {"variant": self.variant}
        out.update({k: v for k, v in asdict(self).items() if k in keep})
        if self.variant == "blaschke":
            out["zeros"] = [[as_point(z).real, as_point(z).imag] for z in self.zeros]
        elif self.variant == "radial":
            out["a"] = float(self.a)
        elif self.variant == "moebius":
            out["a"] = [as_point(self.a).real, as_point(self.a).imag]
        return out


@dataclass(frozen=True)
class JobConfig:
    task: str
    map: MapSpec | None = None
    samples: int = 10**6
    seed: int = 0
    resolution: int | None = None
    method: str = "monte_carlo"
    workers: int = 1
    t: tuple[float, ...] = ()
    p: tuple[float, ...] = (1.0, 2.0)
    out_dir: Path = Path("out")
    a_step: float = 0.01
    a_max: float = 0.99
    t_nodes: int = 64

    def levels(self) -> tuple[float, ...]:
        if self.t:
            return self.t
        return {"area": (0.5,), "figure2_3": (1 / 8, 1 / 18)}.get(self.task, T_GRID)

    def grid_resolution(self) -> int:
        if self.resolution is not None:
            return self.resolution
        return 1024 if self.task == "figure2_3" else 2048

    def estimator(self) -> ls.EstimatorConfig:
        return ls.EstimatorConfig(self.method, self.samples, self.seed, self.grid_resolution(),
                                  self.workers)

    def validate(self) -> DiskMap | None:
        """Check every parameter and build the map before any heavy work."""
        if self.task not in TASKS:
            raise DomainError(f"unknown task {self.task!r}")
        if self.task == "figure1":
            if not (0.0 < self.a_step and 0.0 <= self.a_max < 1.0):
                raise DomainError("figure1 needs a_step > 0 and 0 <= a_max < 1")
            return None
        if self.map is None:
            raise DomainError(f"task {self.task} needs a map")
        if self.task == "radial_verify" and self.map.variant != "radial":
            raise DomainError("radial-verify needs a radial map")
        f = self.map.build()
        for t in self.levels():
            if not 0.0 <= t <= 1.0:
                raise DomainError(f"level t={t} outside [0, 1]")
        for p in self.p:
            if not p >= 1.0:
                raise DomainError(f"p={p} must be >= 1")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        self.estimator()
        if self.t_nodes < 16:
            raise DomainError("t_nodes must be >= 16")
        return f


def _floats(text: str) -> tuple[float, ...]:
    out = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        if "/" in item:
            num, den = item.split("/")
            out.append(float(num) / float(den))
        else:
            out.append(float(item))
    return tuple(out)


def _items(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.replace(";", ",").split(",") if s.strip())


# --------------------------------------------------------------------- tasks

def _task_area(cfg: JobConfig, f: DiskMap) -> int:
    sampler = ls.level_sampler(f, cfg.estimator())
    rows = []
    for t in cfg.levels():
        rows.append({"t": t, "sublevel": sampler.sublevel(t), "superlevel": sampler.superlevel(t)})
    emit_json(cfg.out_dir / "area.json", {"task": "area", "map": cfg.map.describe(),
                                          "estimator": _estimator_meta(cfg), "results": rows})
    return EXIT_OK


def _estimator_meta(cfg: JobConfig) -> dict:
    if cfg.method == "grid":
        return {"method": "grid", "resolution": cfg.grid_resolution()}
    return {"method": "monte_carlo", "samples": cfg.samples, "seed": cfg.seed,
            "rng": "philox4x64", "stream_key": "seed + (chunk << 64)", "chunk_size": ls.DEFAULT_CHUNK}


def _task_bound_sweep(cfg: JobConfig, f: DiskMap) -> int:
    reports = ls.bound_sweep(f, cfg.levels(), cfg.estimator())
    emit_csv(cfg.out_dir / "bound_sweep.csv", ls.BoundReport.CSV_HEADER, (r.csv_row() for r in reports))
    emit_json(cfg.out_dir / "bound_sweep.json", {"task": "bound_sweep", "map": cfg.map.describe(),
                                                 "estimator": _estimator_meta(cfg), "reports": reports})
    violated = [r.t for r in reports if r.verdict == "violated"]
    if violated:
        log.error("sharp bound violated at t = %s", violated)
        return EXIT_VIOLATION
    return EXIT_OK


def _task_norm(cfg: JobConfig, f: DiskMap) -> int:
    d, K = ls.map_degree(f), f.boundary_K
    sampler = ls.level_sampler(f, cfg.estimator())
    rows, records, bad = [], [], []
    for p in cfg.p:
        dist = norms.lp_norm_distributional(f, p, cfg.t_nodes, sampler=sampler)
        quad = norms.lp_norm_quadrature2d(f, p)
        bound = norms.lp_lower_bound(K, d, p)
        holds = max(dist.value + 3 * dist.error_estimate, quad.value + 3 * quad.error_estimate) >= bound
        rec = {"p": p, "d": d, "K": K, "distributional": dist, "quadrature2d": quad,
               "lower_bound": bound, "holds": holds}
        if isinstance(f, MoebiusTransform) and p == 2.0:
            rec["closed_form"] = norms.closed_form_result(norms.moebius_l2_closed_form(abs(f.a)), p)
        records.append(rec)
        rows.append((p, dist.value, dist.error_estimate, quad.value, quad.error_estimate, bound))
        if not holds:
            bad.append(p)
    emit_csv(cfg.out_dir / "norms.csv",
             ("p", "distributional", "distributional_error", "quadrature2d", "quadrature2d_error",
              "lower_bound"), rows)
    emit_json(cfg.out_dir / "norms.json", {"task": "norm", "map": cfg.map.describe(),
                                           "estimator": _estimator_meta(cfg), "results": records})
    if bad:
        log.error("L^p lower bound violated for p = %s", bad)
        return EXIT_VIOLATION
    return EXIT_OK


def _task_winding(cfg: JobConfig, f: DiskMap) -> int:
    d = winding_number(f)
    length = boundary_length(f)
    emit_json(cfg.out_dir / "winding.json", {
        "task": "winding", "map": cfg.map.describe(), "winding_number": d,
        "degree_hint": f.degree_hint, "boundary_length": length,
        "boundary_length_over_2pi": length / (2 * math.pi),
        "boundary_dilatation": boundary_dilatation(f), "declared_K": f.boundary_K,
    })
    return EXIT_OK


def _figure1_plot(path: Path, a: np.ndarray, h: np.ndarray) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(a, h, color="black")
    ax.axhline(math.sqrt(math.pi / 2), color="gray", lw=0.8, ls="--")
    ax.set_xlabel("|a|")
    ax.set_ylabel("h(|a|)")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def _task_figure1(cfg: JobConfig, f: DiskMap | None) -> int:
    count = int(math.floor(cfg.a_max / cfg.a_step + 1e-9)) + 1
    a_values = np.round(np.arange(count) * cfg.a_step, 12)
    closed = np.array([norms.moebius_l2_closed_form(a) for a in a_values])
    quad = np.array([norms.lp_norm_quadrature2d(MoebiusTransform(a), 2.0).value for a in a_values])
    emit_csv(cfg.out_dir / "figure1.csv", ("a_modulus", "h_closed_form", "h_quadrature"),
             zip(a_values, closed, quad))
    k = int(np.argmin(closed))
    emit_json(cfg.out_dir / "figure1.json", {
        "task": "figure1", "argmin_a_modulus": float(a_values[k]), "min_value": float(closed[k]),
        "sqrt_pi_over_2": math.sqrt(math.pi / 2),
        "max_abs_closed_vs_quadrature": float(np.max(np.abs(closed - quad))),
    })
    _figure1_plot(cfg.out_dir / "figure1.png", a_values, closed)
    return EXIT_OK


def _overlay(f_grid: ls.RasterGrid, ref_grid: ls.RasterGrid) -> np.ndarray:
    n = f_grid.resolution
    c = -1.0 + (np.arange(n) + 0.5) * (2.0 / n)
    disk = (c[None, :] ** 2 + c[::-1, None] ** 2) < 1.0
    img = np.full((n, n), 255, dtype=np.uint8)
    img[disk] = 230
    img[ref_grid.mask] = 150
    img[f_grid.mask] = 60
    return img


def _task_figure2_3(cfg: JobConfig, f: DiskMap) -> int:
    res = cfg.grid_resolution()
    d = ls.map_degree(f)
    reference = BlaschkeProduct.monomial(d)
    levels = ls.GridLevels(f, res)
    records, bad = [], []
    for k, t in enumerate(cfg.levels()):
        grid = ls.RasterGrid(res, levels.mask(t))
        ref = ls.rasterize_sublevel(reference, t, res)
        stem = cfg.out_dir / f"fig23_t{k}"
        emit_image(stem, grid)
        emit_image(cfg.out_dir / f"fig23_t{k}_reference", ref)
        write_png(cfg.out_dir / f"fig23_t{k}_overlay.png", _overlay(grid, ref))
        area = levels.sublevel(t)
        bound = ls.sharp_sublevel_bound(t, d, f.boundary_K)
        records.append({
            "t": t, "components": ls.count_components(grid),
            "reference_components": ls.count_components(ref),
            "sublevel": area, "bound": bound, "below_bound": area.bracket[1] < bound,
            "image": stem.with_suffix(".pgm").name,
        })
        if area.bracket[0] > bound:
            bad.append(t)
    emit_json(cfg.out_dir / "fig23.json", {"task": "figure2_3", "map": cfg.map.describe(),
                                           "degree": d, "resolution": res, "levels": records})
    return EXIT_VIOLATION if bad else EXIT_OK


def _task_radial_verify(cfg: JobConfig, f: radial.RadialQCMap) -> int:
    probes = np.linspace(0.1, 0.9, 9)
    r = f.g_table[1:, 0]
    ratio = f.log_derivative_ratio(r)
    rows, bad = [], []
    for t in cfg.levels():
        exact = radial.sublevel_area_exact(f, t)
        bound = ls.sharp_sublevel_bound(t, 1, f.K)
        rows.append({"t": t, "sublevel_exact": exact, "bound": bound, "holds": exact <= bound})
        if exact > bound * (1 + 1e-12):
            bad.append(t)
    lap = radial.radial_laplacian(f, probes)
    emit_json(cfg.out_dir / "radial.json", {
        "task": "radial_verify", "map": cfg.map.describe(),
        "g_at_1": float(f.g(1.0)), "max_log_derivative_ratio": float(np.max(ratio)),
        "laplacian_probes": probes, "laplacian": lap, "density_at_probes": f.density(probes),
        "laplacian_residual": radial.verify_laplacian(f, probes),
        "max_abs_laplacian_minus_h_over_4r": float(np.max(np.abs(lap - f.density(probes) / (4 * probes)))),
        "winding_number": winding_number(f), "sublevel": rows,
    })
    f.table_csv(cfg.out_dir / "g_table.csv")
    return EXIT_VIOLATION if bad else EXIT_OK


TASK_RUNNERS = {
    "area": _task_area,
    "bound_sweep": _task_bound_sweep,
    "norm": _task_norm,
    "winding": _task_winding,
    "figure1": _task_figure1,
    "figure2_3": _task_figure2_3,
    "radial_verify": _task_radial_verify,
}


def run_job(config: JobConfig) -> int:
    """Validate ``config``, run its task and write outputs; returns the exit code."""
    try:
        f = config.validate()
    except (DomainError, ValueError) as exc:
        log.error("invalid job: %s", exc)
        return EXIT_INVALID
    try:
        return TASK_RUNNERS[config.task](config, f)
    except ConvergenceError as exc:
        log.error("numerical non-convergence: %s", exc)
        return EXIT_NONCONVERGENCE
    except OutputError as exc:
        log.error("%s", exc)
        return EXIT_INVALID


# ----------------------------------------------------------------- parsing

def _add_map_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("map")
    g.add_argument("--map", dest="variant", choices=VARIANTS)
    g.add_argument("--zeros", help="comma-separated zeros, e.g. '0.5,-0.5,0.5j,-0.5j'")
    g.add_argument("--phase", type=float)
    g.add_argument("--a", help="Moebius parameter (complex) or radial exponent (real)")
    g.add_argument("--d", type=int)
    g.add_argument("--K", type=float)
    g.add_argument("--density", help="constant value or two-column CSV (v, h)")
    g.add_argument("--grid-size", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", type=Path, help="INI file with [map] and [job] sections")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--resolution", type=int)
    common.add_argument("--out-dir", type=Path)
    common.add_argument("--method", choices=ls.METHODS)
    common.add_argument("--workers", type=int)
    common.add_argument("--t", help="comma-separated levels; fractions like 1/8 allowed")
    common.add_argument("--p", help="comma-separated exponents")
    common.add_argument("--a-step", type=float)
    common.add_argument("--a-max", type=float)
    common.add_argument("-v", "--verbose", action="store_true")
    _add_map_args(common)

    parser = argparse.ArgumentParser(prog="diskmaps", parents=[common],
                                     description="Sublevel areas, winding numbers and L^p norms "
                                                 "of self-maps of the unit disk.")
    sub = parser.add_subparsers(dest="command")
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _read_ini(path: Path) -> tuple[dict, dict]:
    ini = configparser.ConfigParser()
    with open(path) as fh:
        ini.read_file(fh)
    map_sec = dict(ini["map"]) if ini.has_section("map") else {}
    job_sec = dict(ini["job"]) if ini.has_section("job") else {}
    return map_sec, job_sec


def config_from_args(args: argparse.Namespace) -> JobConfig:
    cli = {k: v for k, v in vars(args).items() if v is not None}
    map_sec, job_sec = _read_ini(cli["config"]) if "config" in cli else ({}, {})

    def pick(key, ini_sec, ini_key=None):
        if key in cli:
            return cli[key]
        return ini_sec.get(ini_key or key)

    task = SUBCOMMANDS.get(cli.get("command")) or job_sec.get("task")
    task = SUBCOMMANDS.get(task, task)
    if task is None:
        raise DomainError("no task given (use a subcommand or [job] task = ...)")

    variant = pick("variant", map_sec, "variant")
    if variant is None and (task == "figure2_3" or pick("zeros", map_sec) is not None):
        variant = "blaschke"
    spec = None
    if variant is not None:
        zeros = pick("zeros", map_sec)
        if zeros is None and task == "figure2_3" and variant == "blaschke":
            zeros = FIGURE_ZEROS
        kw = {"variant": variant}
        if zeros is not None:
            kw["zeros"] = _items(zeros) if isinstance(zeros, str) else tuple(zeros)
        for key, conv in (("phase", float), ("a", str), ("d", int), ("K", float),
                          ("density", str), ("grid_size", int)):
            val = pick(key, map_sec, key.lower() if key != "grid_size" else "grid_size")
            if val is not None:
                kw[key] = conv(val)
        spec = MapSpec(**kw)

    cfg = JobConfig(task=task, map=spec)
    updates = {}
    for key, conv in (("samples", int), ("seed", int), ("resolution", int), ("method", str),
                      ("workers", int), ("a_step", float), ("a_max", float),
                      ("t_nodes", int)):
        val = pick(key, job_sec)
        if val is not None:
            updates[key] = conv(val)
    out_dir = pick("out_dir", job_sec)
    if out_dir is not None:
        updates["out_dir"] = Path(out_dir)
    for key in ("t", "p"):
        val = pick(key, job_sec)
        if val is not None:
            updates[key] = _floats(val)
    return replace(cfg, **updates)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(args)
    except (DomainError, ValueError, OSError, configparser.Error) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_INVALID
    return run_job(cfg)


if __name__ == "__main__":
    sys.exit(main())
