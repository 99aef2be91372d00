"""Scripted experiment harness: sweeps, noise grids, ablations, Monte Carlo.

Every study is a pure function of (spec, seeds): cells are keyed by a hash
of their configuration, finished cells are skipped on resume, and seeds are
assigned deterministically per cell index, so reruns reproduce tables
exactly.
"""
from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace as dc_replace
from pathlib import Path

import numpy as np
from scipy import ndimage

from .config import ImagingConfig, config_from_dict, config_to_dict
from .forward import ScatteredData, simulate
from .geometry import AntennaArray, build_array, perturb_array
from .reconstruct import FOUR_CONN, ReconstructionResult, count_components, reconstruct
from .scenes import Scene, builtin_scene

ABLATION_FLAGS = {
    "no_cco": {"use_cco": False},
    "no_bridge": {"lambda3": 0.0},
    "no_bound": {"lambda1": 0.0},
    "no_tv": {"lambda2": 0.0},
}


@dataclass
class StudySpec:
    """Declarative description of one study run."""

    config: ImagingConfig = field(default_factory=ImagingConfig)
    kind: str = "sweep"                    # sweep | noise | ablation | monte_carlo
    scene_name: str = "austria"
    scene_eps: float = 2.0
    scene_scale: float = 1.0
    axes: dict = field(default_factory=dict)           # config field -> value list
    snr_db: float = float("inf")                       # dataset noise outside the noise study
    snr_grid: tuple = (float("inf"), 10.0, 5.0, 1.0)
    eps_grid: tuple = (2.0, 5.0, 8.0)
    ablations: tuple = ("no_cco", "no_bridge", "no_bound", "no_tv")
    sigmas: tuple = (0.001,)
    n_realizations: int = 20
    seed: int = 0
    workers: int = 1

    def scene(self, eps: float | None = None) -> Scene:
        return builtin_scene(self.scene_name, eps_r=eps if eps is not None else self.scene_eps,
                             scale=self.scene_scale)


def spec_to_dict(spec: StudySpec) -> dict:
    d = dataclasses.asdict(spec)
    d["config"] = config_to_dict(spec.config)
    return d


def spec_from_dict(d: dict) -> StudySpec:
    d = dict(d)
    cfg = config_from_dict(d.pop("config", {}))
    for key in ("snr_grid", "eps_grid", "ablations", "sigmas"):
        if key in d:
            d[key] = tuple(d[key])
    if "axes" in d:
        d["axes"] = {k: list(v) for k, v in d["axes"].items()}
    return StudySpec(config=cfg, **d)


def load_study_spec(path) -> StudySpec:
    with open(path, "r", encoding="utf-8") as fh:
        return spec_from_dict(json.load(fh))


def save_study_spec(path, spec: StudySpec) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec_to_dict(spec), fh, indent=2, sort_keys=True, default=repr)
        fh.write("\n")


# ----------------------------------------------------------------------
# Shared cell machinery


def _cell_metrics(result: ReconstructionResult, chi_true) -> dict:
    eps = result.eps_r.real
    return {
        "rel_error": result.rel_error,
        "wall_time": result.wall_time,
        "loss_state": result.final_loss.state,
        "loss_data": result.final_loss.data,
        "loss_total": result.final_loss.total,
        "components": count_components(eps, 1.5),
        "peak_eps": float(eps.max()),
        "min_eps": float(eps.min()),
    }


def _run_cell(config: ImagingConfig, scene: Scene, snr_db: float,
              noise_seed: int) -> tuple[ReconstructionResult, dict]:
    sim = simulate(config, scene, snr_db=snr_db, rng=np.random.default_rng(noise_seed))
    result = reconstruct(config, sim.data, chi_true=sim.chi_true)
    return result, _cell_metrics(result, sim.chi_true)


def _cell_key(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, default=repr)
    return hashlib.sha256(blob.encode()).hexdigest()[:20]


def _resume_or_run(out_dir, payload: dict, runner) -> dict:
    """Load a finished cell from disk or execute it and persist the row."""
    if out_dir is None:
        return runner()
    cells = Path(out_dir) / "cells"
    cells.mkdir(parents=True, exist_ok=True)
    cell_file = cells / (_cell_key(payload) + ".json")
    if cell_file.exists():
        with open(cell_file, "r", encoding="utf-8") as fh:
            return json.load(fh)
    try:
        row = runner()
    except Exception as exc:  # record the failure, keep the study going
        row = dict(payload, error=f"{type(exc).__name__}: {exc}")
    with open(cell_file, "w", encoding="utf-8") as fh:
        json.dump(row, fh, indent=2, sort_keys=True)
    return row


def _write_csv(path, rows: list[dict], columns: list[str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            vals = []
            for c in columns:
                v = row.get(c, "")
                vals.append(f"{v:.17g}" if isinstance(v, float) else str(v))
            fh.write(",".join(vals) + "\n")


# ----------------------------------------------------------------------
# Studies


def run_sweep(spec: StudySpec, out_dir=None) -> list[dict]:
    """Cartesian sweep over config fields (e.g. beta, m_f, k_iters)."""
    names = sorted(spec.axes)
    grids = [spec.axes[n] for n in names]
    scene = spec.scene()
    rows = []
    for idx, values in enumerate(itertools.product(*grids)):
        overrides = dict(zip(names, values))
        cfg = dc_replace(spec.config, **overrides).validate()
        payload = {"cell": idx, "overrides": overrides, "scene_eps": spec.scene_eps,
                   "snr_db": spec.snr_db, "seed": spec.seed}

        def runner(cfg=cfg, idx=idx, overrides=overrides):
            _, metrics = _run_cell(cfg, scene, spec.snr_db, spec.seed + idx)
            return {**overrides, **metrics}

        rows.append(_resume_or_run(out_dir, payload, runner))
    if out_dir is not None:
        cols = names + ["rel_error", "wall_time", "loss_state", "loss_data", "loss_total",
                        "components", "peak_eps", "min_eps", "error"]
        cols = [c for c in cols if any(c in r for r in rows)]
        _write_csv(Path(out_dir) / "sweep.csv", rows, cols)
    return rows


def run_noise_study(spec: StudySpec, out_dir=None) -> list[dict]:
    """Noise grid: every SNR level crossed with every contrast level."""
    rows = []
    for idx, (snr, eps) in enumerate(itertools.product(spec.snr_grid, spec.eps_grid)):
        scene = spec.scene(eps=eps)
        payload = {"cell": idx, "snr_db": snr, "eps": eps, "seed": spec.seed}

        def runner(snr=snr, eps=eps, scene=scene, idx=idx):
            _, metrics = _run_cell(spec.config, scene, snr, spec.seed + idx)
            return {"snr_db": snr, "eps": eps, **metrics}

        rows.append(_resume_or_run(out_dir, payload, runner))
    if out_dir is not None:
        cols = ["snr_db", "eps", "rel_error", "wall_time", "loss_state", "loss_data",
                "loss_total", "components", "peak_eps", "min_eps", "error"]
        cols = [c for c in cols if any(c in r for r in rows)]
        _write_csv(Path(out_dir) / "noise.csv", rows, cols)
    return rows


def gap_mask(chi_true: np.ndarray, dilate: int = 5) -> np.ndarray:
    """Pixels between nearby scatterers where bridging artifacts would sit.

    Each 4-connected component of the true support is dilated separately;
    gap pixels are covered by at least two dilated components yet lie
    outside the support itself.
    """
    support = np.abs(chi_true) > 0
    labels, n = ndimage.label(support, structure=FOUR_CONN)
    cover = np.zeros(support.shape, dtype=np.int32)
    for lab in range(1, n + 1):
        cover += ndimage.binary_dilation(labels == lab, structure=FOUR_CONN,
                                         iterations=dilate).astype(np.int32)
    return (cover >= 2) & ~support


def spurious_gap_pixels(eps_map: np.ndarray, chi_true: np.ndarray,
                        threshold: float = 1.5, dilate: int = 5) -> int:
    mask = gap_mask(chi_true, dilate=dilate)
    return int(np.sum((np.real(eps_map) > threshold) & mask))


def run_ablation(spec: StudySpec, out_dir=None) -> dict[str, dict]:
    """Full pipeline versus single-switch ablations on one shared dataset."""
    scene = spec.scene()
    sim = simulate(spec.config, scene, snr_db=spec.snr_db,
                   rng=np.random.default_rng(spec.seed))
    out: dict[str, dict] = {}
    variants = [("full", {})] + [(n, ABLATION_FLAGS[n]) for n in spec.ablations]
    for name, overrides in variants:
        cfg = dc_replace(spec.config, **overrides)
        payload = {"variant": name, "scene_eps": spec.scene_eps, "snr_db": spec.snr_db,
                   "seed": spec.seed, "overrides": overrides}

        def runner(cfg=cfg, name=name):
            result = reconstruct(cfg, sim.data, chi_true=sim.chi_true)
            metrics = _cell_metrics(result, sim.chi_true)
            eps = result.eps_r.real
            metrics["variant"] = name
            metrics["n_below_one"] = int(np.sum(eps < 1.0))
            metrics["gap_spurious"] = spurious_gap_pixels(eps, sim.chi_true.values)
            return metrics

        out[name] = _resume_or_run(out_dir, payload, runner)
    if out_dir is not None:
        cols = ["variant", "rel_error", "peak_eps", "min_eps", "n_below_one",
                "gap_spurious", "components", "loss_data", "loss_total", "wall_time", "error"]
        rows = list(out.values())
        cols = [c for c in cols if any(c in r for r in rows)]
        _write_csv(Path(out_dir) / "ablation.csv", rows, cols)
    return out


def _mc_cell(args: tuple) -> dict:
    config, scene, sigma, seed_key, idx = args
    rng = np.random.default_rng(seed_key)
    nominal = build_array(config)
    true_array = perturb_array(nominal, sigma, rng)
    sim = simulate(config, scene, snr_db=float("inf"), rng=rng, array=true_array)
    result = reconstruct(config, sim.data, array=nominal, chi_true=sim.chi_true)
    return {"sigma": sigma, "realization": idx, "rel_error": result.rel_error,
            "wall_time": result.wall_time}


def run_monte_carlo(spec: StudySpec, out_dir=None) -> dict[float, dict]:
    """Antenna-position uncertainty: data from perturbed arrays, inversion
    with the nominal geometry.

    Returns per-sigma error lists plus five-number summaries.
    """
    scene = spec.scene()
    jobs = []
    for si, sigma in enumerate(spec.sigmas):
        for r in range(spec.n_realizations):
            jobs.append((spec.config, scene, float(sigma), (spec.seed, si, r), r))
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(_mc_cell, jobs))
    else:
        rows = [_mc_cell(j) for j in jobs]

    out: dict[float, dict] = {}
    for sigma in spec.sigmas:
        errs = np.array([r["rel_error"] for r in rows if r["sigma"] == float(sigma)])
        q = np.percentile(errs, [0, 25, 50, 75, 100])
        out[float(sigma)] = {"errors": errs.tolist(),
                             "stats": {"min": q[0], "q1": q[1], "median": q[2],
                                       "q3": q[3], "max": q[4]}}
    if out_dir is not None:
        _write_csv(Path(out_dir) / "monte_carlo.csv", rows,
                   ["sigma", "realization", "rel_error", "wall_time"])
        stats_rows = [{"sigma": s, **v["stats"]} for s, v in out.items()]
        _write_csv(Path(out_dir) / "monte_carlo_stats.csv", stats_rows,
                   ["sigma", "min", "q1", "median", "q3", "max"])
    return out


def run_study(spec: StudySpec, out_dir=None):
    """Dispatch on spec.kind."""
    runner = {"sweep": run_sweep, "noise": run_noise_study, "ablation": run_ablation,
              "monte_carlo": run_monte_carlo}.get(spec.kind)
    if runner is None:
        raise ValueError(f"unknown study kind {spec.kind!r}")
    return runner(spec, out_dir=out_dir)
