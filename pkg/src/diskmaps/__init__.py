"""Level-set areas and norms of self-maps of the unit disk."""

from .levelset import (AreaEstimate, BoundReport, EstimatorConfig, GridLevels, MonteCarloLevels,
                       RasterGrid, bound_sweep, check_bound, count_components,
                       moebius_monotonicity_check, moebius_superlevel_closed_form,
                       rasterize_sublevel, sharp_sublevel_bound, sublevel_area_grid,
                       sublevel_area_mc, superlevel_area)
from .maps import (BlaschkeProduct, ConvergenceError, DiskMap, DomainError, MoebiusTransform,
                   PowerRadialMap, blaschke_eval, boundary_dilatation, boundary_length,
                   boundary_speed, moebius_eval, power_radial_eval, winding_number)
from .norms import (NormResult, lp_lower_bound, lp_norm_distributional, lp_norm_quadrature2d,
                    moebius_l2_closed_form)
from .radial import (AdmissibilityError, DensitySpec, RadialQCMap, g_inverse, radial_qc_build,
                     radial_qc_eval, verify_laplacian)

__version__ = "0.1.0"
