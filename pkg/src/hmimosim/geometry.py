# Random network layouts (node/user drops, cell membership) and deployment cost accounting.

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .config import EapPlacement, Paradigm, ScenarioConfig

# Site count of the 128-AP cell-free benchmark; fronthaul reductions are quoted against it.
CELLFREE_BASELINE_SITES = 128


@dataclass(frozen=True)
class NetworkLayout:
    """Positions for one epoch. Cell squares index row-major from the south-west corner."""

    area_side: float
    cell_grid: int                 # cells per axis; 0 means a single pseudo-cell over the area
    cbs_xy: np.ndarray             # (C, 2); empty for cell-free
    cbs_orientation: np.ndarray    # (C,) broadside azimuths
    eap_cell: np.ndarray           # (n_eap,) owning cell index
    eap_xy: np.ndarray             # (n_eap, 2)
    eap_orientation: np.ndarray    # (n_eap,)
    user_cell: np.ndarray          # (K,) serving cell index
    user_xy: np.ndarray            # (K, 2)

    @property
    def num_cells(self) -> int:
        return self.cell_grid * self.cell_grid if self.cell_grid else 1


@dataclass(frozen=True)
class CostReport:
    ap_sites: int
    fronthaul_links: int
    reduction_vs_cellfree: float


def cell_centers(area_side: float, num_cells: int) -> np.ndarray:
    """Centers of the row-major square cell grid."""
    grid = math.isqrt(num_cells)
    if grid * grid != num_cells:
        raise ValueError(f"num_cells={num_cells} is not a perfect square")
    side = area_side / grid
    ix = np.arange(num_cells) % grid
    iy = np.arange(num_cells) // grid
    return np.stack([(ix + 0.5) * side, (iy + 0.5) * side], axis=1)


def cell_of_position(xy: np.ndarray, area_side: float, grid: int) -> np.ndarray:
    """Index of the cell square containing each position (edges belong to the lower cell)."""
    if grid == 0:
        return np.zeros(len(np.atleast_2d(xy)), dtype=int)
    side = area_side / grid
    idx = np.clip((np.atleast_2d(xy) / side).astype(int), 0, grid - 1)
    return idx[:, 1] * grid + idx[:, 0]


def _uniform_in_square(rng, n, origin, side):
    return origin + rng.uniform(0.0, side, size=(n, 2))


def _uniform_in_edge_band(rng, n, origin, side, band):
    # Rejection from the enclosing square; the band is the outer ring of the cell.
    band = min(band, side / 2)
    out = np.empty((n, 2))
    filled = 0
    while filled < n:
        cand = rng.uniform(0.0, side, size=(n, 2))
        local = np.minimum(cand, side - cand).min(axis=1)
        keep = cand[local <= band]
        take = min(len(keep), n - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return origin + out


def generate_layout(config: ScenarioConfig, rng: np.random.Generator) -> NetworkLayout:
    """Draw one layout: cBSs at cell centers, eAPs/APs and users uniform at random.

    Draw order is fixed (eAPs, users, orientations) so a layout is a pure
    function of the generator state.
    """
    area = config.area_side
    if config.paradigm is Paradigm.CELL_FREE:
        grid = 0
        centers = np.empty((0, 2))
        eap_xy = _uniform_in_square(rng, config.eap_count, np.zeros(2), area)
        eap_cell = np.zeros(config.eap_count, dtype=int)
        user_xy = _uniform_in_square(rng, config.users_total, np.zeros(2), area)
        user_cell = np.zeros(config.users_total, dtype=int)
    else:
        grid = math.isqrt(config.num_cells)
        side = area / grid
        centers = cell_centers(area, config.num_cells)
        origins = centers - side / 2
        eap_chunks = []
        eap_cells = []
        if config.paradigm is Paradigm.HETERO:
            for c in range(config.num_cells):
                if config.eap_placement is EapPlacement.EDGE_BAND:
                    pts = _uniform_in_edge_band(rng, config.eap_count, origins[c], side, config.edge_band_width)
                else:
                    pts = _uniform_in_square(rng, config.eap_count, origins[c], side)
                eap_chunks.append(pts)
                eap_cells.append(np.full(config.eap_count, c))
        eap_xy = np.concatenate(eap_chunks) if eap_chunks else np.empty((0, 2))
        eap_cell = np.concatenate(eap_cells) if eap_cells else np.empty(0, dtype=int)
        if config.balanced_drop:
            user_xy = np.concatenate([
                _uniform_in_square(rng, config.users_per_cell, origins[c], side)
                for c in range(config.num_cells)
            ])
            user_cell = np.repeat(np.arange(config.num_cells), config.users_per_cell)
        else:
            user_xy = _uniform_in_square(rng, config.users_total, np.zeros(2), area)
            user_cell = cell_of_position(user_xy, area, grid)

    cbs_orientation = rng.uniform(0.0, 2 * np.pi, size=len(centers))
    eap_orientation = rng.uniform(0.0, 2 * np.pi, size=len(eap_xy))
    return NetworkLayout(
        area_side=area, cell_grid=grid,
        cbs_xy=centers, cbs_orientation=cbs_orientation,
        eap_cell=eap_cell, eap_xy=eap_xy, eap_orientation=eap_orientation,
        user_cell=user_cell, user_xy=user_xy,
    )


def fronthaul_cost(config: ScenarioConfig) -> CostReport:
    """Distributed-site count and its reduction relative to the 128-site cell-free baseline.

    Star fronthaul: every distributed node needs exactly one link to its
    cBS/CPU, so links equal sites.
    """
    if config.paradigm is Paradigm.CELLULAR:
        sites = 0
    elif config.paradigm is Paradigm.CELL_FREE:
        sites = config.eap_count
    else:
        sites = config.num_cells * config.eap_count
    reduction = 1.0 - sites / CELLFREE_BASELINE_SITES
    return CostReport(ap_sites=sites, fronthaul_links=sites, reduction_vs_cellfree=reduction)


def write_layout_csv(layout: NetworkLayout, path) -> None:
    """Dump entities as (entity_type, cell, x_m, y_m, orientation_rad) rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity_type", "cell", "x_m", "y_m", "orientation_rad"])
        for c, (xy, orient) in enumerate(zip(layout.cbs_xy, layout.cbs_orientation)):
            writer.writerow(["cbs", c, repr(float(xy[0])), repr(float(xy[1])), repr(float(orient))])
        for cell, xy, orient in zip(layout.eap_cell, layout.eap_xy, layout.eap_orientation):
            writer.writerow(["eap", int(cell), repr(float(xy[0])), repr(float(xy[1])), repr(float(orient))])
        for cell, xy in zip(layout.user_cell, layout.user_xy):
            writer.writerow(["user", int(cell), repr(float(xy[0])), repr(float(xy[1])), ""])
