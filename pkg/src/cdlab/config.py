"""Central numerical configuration.

Every iteration cap, default resolution, and convergence threshold used by
the library lives in one frozen record so that experiment manifests can
state exactly which knobs produced a given output file.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # symmetric tridiagonal eigensolver
    eig_sweep_cap: int = 60            # QL sweeps per eigenvalue before giving up

    # Aberth-Ehrlich root finder
    aberth_stop: float = 1e-12         # scaled residual at which iteration stops
    aberth_target: float = 1e-10       # residual the result must meet
    aberth_sweep_cap: int = 200
    aberth_cluster: float = 1e-6       # radius for merging multiple roots
    aberth_stall: int = 12             # sweeps without improvement before accepting

    # measure quadrature backends
    circle_nodes: int = 4096           # trapezoid nodes for circle weights
    interval_nodes: int = 2048         # Gauss nodes for interval weights
    jacobi_nodes: int = 256            # Gauss nodes for the general jacobi family
    doubling_tol: float = 1e-11        # agreement between successive resolutions
    resolution_cap: int = 1 << 17

    # real-line (tangent substitution) quadrature
    realline_nodes: int = 256          # starting Gauss-Legendre count per piece
    realline_tol: float = 1e-11
    realline_cap: int = 1 << 15

    # Cauchy average over the spectral-perturbation parameter
    lambda_nodes: int = 256
    lambda_tol: float = 1e-10

    # phase unwrapping grids
    phase_grid: int = 1 << 12
    phase_grid_cap: int = 1 << 18
    phase_refine_depth: int = 24

    # orthogonality / positivity guards
    offdiag_floor: float = 1e-13       # a_j below this means the quadrature is exhausted
    verblunsky_margin: float = 1e-13   # |alpha_j| must stay below 1 by this margin

    # report thresholds
    channel_agreement: float = 1e-7    # independent moment channels must match this well
    moment_tol: float = 1e-10          # generic moment accuracy assumed by reports

    def replace(self, **kwargs) -> "Tolerances":
        """Functional update; unknown keys raise, matching strict config parsing."""
        names = {f.name for f in dataclasses.fields(self)}
        for key in kwargs:
            if key not in names:
                raise KeyError(f"unknown tolerance field: {key!r}")
        return dataclasses.replace(self, **kwargs)

    def asdict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_TOL = Tolerances()
