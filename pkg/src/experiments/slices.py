"""SVG renderings of the w-slices of the Worm over chosen base points."""

import cmath
import logging
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Circle  # noqa: E402

from experiments.base_experiment import BaseExperiment  # noqa: E402
from models.reports import ReportRow  # noqa: E402
from worms.worm import WormSpec  # noqa: E402

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "worm-slices"
SVG_METADATA = {"Date": None}
VIEW_LIMIT = 2.4


def _new_axes():
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.set_xlim(-VIEW_LIMIT, VIEW_LIMIT)
    ax.set_ylim(-VIEW_LIMIT, VIEW_LIMIT)
    ax.set_aspect("equal")
    ax.axhline(0.0, color="0.6", linewidth=0.6)
    ax.axvline(0.0, color="0.6", linewidth=0.6)
    ax.set_xlabel("Re w")
    ax.set_ylabel("Im w")
    return fig, ax


def render_slice(spec: WormSpec, z: complex, path: Path) -> float:
    """Draw the slice over ``z`` (or an empty-slice marker) and return its radius."""
    theta = spec.angle.theta(z)
    radius = spec.slice_radius(z)
    fig, ax = _new_axes()
    ax.set_title(f"z = {z.real:.3g}{z.imag:+.3g}i")
    if radius > 0:
        center = cmath.exp(1j * theta)
        ax.add_patch(Circle((center.real, center.imag), radius, facecolor="#9ecae1", edgecolor="#08519c"))
        ax.plot([0.0, center.real], [0.0, center.imag], color="#08519c", linewidth=0.8, linestyle="--")
        ax.annotate(f"theta = {theta:.4g}", xy=(center.real, center.imag), xytext=(0.05, 0.92), textcoords="axes fraction")
        ax.plot([0.0], [0.0], marker="o", color="black", markersize=3)
    else:
        # theta(z) outside the open interval J
        ax.text(0.5, 0.5, f"empty slice (theta = {theta:.4g})", transform=ax.transAxes, ha="center", va="center")
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return radius


class SliceExperiment(BaseExperiment):
    """One SVG per requested base point; rows record the slice radii."""

    name = "slice"

    def collect_rows(self) -> List[ReportRow]:
        rows: List[ReportRow] = []
        for k, (re, im) in enumerate(self.config.z_values):
            z = complex(re, im)
            path = self.output_dir / f"slice_{k:02d}.svg"
            radius = render_slice(self.spec, z, path)
            theta = self.spec.angle.theta(z)
            if self.spec.inner.contains(theta):
                rows.append(ReportRow.within("slice_radius", theta, radius, 1.0, 1e-12, z_re=re, z_im=im))
            else:
                rows.append(ReportRow.info("slice_radius", theta, radius, z_re=re, z_im=im))
            logger.info(f"Rendered slice over {z} to {path} (radius {radius:.4g})")
        return rows
