#!/usr/bin/env python3
"""Write the default Worm and experiment configurations to configs/."""

import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Dict

sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

WORMS: Dict[str, Dict[str, Any]] = {
    "classical_worm": {
        "name": "classical",
        "surface": {"kind": "classical"},
        "inner_interval": [-1.0, 1.0],
        "outer_interval": [-1.6, 1.6],
        "eta": {"grid_step": 0.01, "calibrate": True},
    },
    "two_puncture_worm": {
        "name": "two-puncture",
        "surface": {"kind": "punctured_plane", "punctures": [[-1.0, 0.0], [1.0, 0.0]], "weights": [0.5, 0.5]},
        "inner_interval": [-1.0, 1.0],
        "outer_interval": [-1.6, 1.6],
        "eta": {"grid_step": 0.01, "calibrate": True},
    },
}

EXPERIMENTS: Dict[str, Dict[str, Any]] = {
    "levi_audit": {
        "samples": 10000,
        "spine_clearance": 0.01,
        "cap_method": "analytic",
        "corrupted_control": True,
        "tolerances": {"levi_eigenvalue": 1e-8, "tangential_curvature": 1e-6, "kernel_residual": 1e-10},
    },
    "metric_bench": {
        "resolution": 0.02,
        "graph": {"points_per_axis": 29},
        "bench_pairs": 20,
        "bench_degree": 16,
        "bidisc_points_per_axis": 41,
        "tolerances": {
            "exact": 1e-9,
            "royden_upper_rel": 0.02,
            "graph_rel": 0.05,
            "bound_gap": 0.25,
            "refinement_ratio": 0.5,
        },
    },
    "triangle_growth": {
        "scales": [1.0, 2.0, 4.0],
        "radius_factor": 2.0,
        "graph": {"points_per_axis": 41},
        "tolerances": {"slim_ratio": 0.5},
    },
    "scaling_convergence": {
        "n_values": [1.0, 2.0, 4.0, 8.0, 16.0],
        "tangent_samples": 24,
        "graph": {"points_per_axis": 9, "min_margin": 0.02},
        "tolerances": {"residual_factor": 2.0, "epsilon_monotone": 1e-12},
    },
    "delta_growth": {
        "radii": [1.0, 2.0, 3.0],
        "samples_per_radius": 16,
        "control": True,
        "graph_radius": 0.5,
        "graph": {"points_per_axis": 9, "min_margin": 0.02},
        "tolerances": {"delta_gain": 0.5, "disc_delta_plateau": 1.2},
    },
    "projection_audit": {"pair_count": 200, "radii": [3.0], "graph": {"points_per_axis": 9, "min_margin": 0.02}},
    "completeness": {
        "steps": 8,
        "resolution": 0.02,
        "tolerances": {"growth_ratio": 2.0, "completeness_control": 0.01},
    },
    "slice": {
        # theta = 0 (in I), theta = 1.3 (in J minus I), theta = 1.7 (outside J), an off-axis point
        "z_values": [[1.0, 0.0], [round(math.exp(0.65), 9), 0.0], [round(math.exp(0.85), 9), 0.0], [0.5, 0.5]],
    },
}


def write_json(path: Path, data: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def write_default_configs(directory: Path = CONFIG_DIR) -> None:
    """Write every default configuration, validating each against its schema."""
    from models.config import ExperimentConfig, WormConfig

    print("🪱 Writing default configurations")
    print("=" * 40)
    directory.mkdir(parents=True, exist_ok=True)
    for stem, data in WORMS.items():
        WormConfig.model_validate(data)
        write_json(directory / f"{stem}.json", data)
        print(f"✅ {stem}.json")
    for experiment, params in EXPERIMENTS.items():
        data = {"experiment": experiment, "worm": "classical_worm.json", "seed": 20240101, "output_dir": "results", **params}
        ExperimentConfig.model_validate(data)
        write_json(directory / f"{experiment}.json", data)
        print(f"✅ {experiment}.json")


if __name__ == "__main__":
    write_default_configs()
