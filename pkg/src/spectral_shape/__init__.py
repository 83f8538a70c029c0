"""Boundary-integral eigenvalue computations and two-parameter shape
optimization for smooth planar domains.

The pipeline: equipotential/circle geometry -> quadratic boundary-element
collocation of the Helmholtz layer operators -> contour-integral nonlinear
eigensolver -> scale-invariant eigenvalue objectives and derivative-free
optimization.  Disk oracles provide independent analytic references.
"""

from .bem import (NepMatrixFunction, TransmissionConfig, assemble_neumann,
                  assemble_transmission, element_integral, evaluate_interior,
                  neumann_operator, transmission_operator)
from .beyn import (BeynConfig, Contour, EigenCluster, EigenResult,
                   beyn_solve, cluster_eigenvalues)
from .geometry import (BoundaryMesh, ClosedCurve, EquipotentialSpec,
                       circle_curve, curve_from_nodes, mesh_area,
                       mesh_from_circles, mesh_from_spec, outward_normal,
                       polygon_area, sample_boundary, solve_radius)
from .kernels import (KernelPoint, WaveNumber, adjoint_doublelayer_kernel,
                      fundamental_solution, hankel1_0, hankel1_1)
from .optimize import (MAXIMIZE_NEUMANN, MINIMIZE_ABS_ITE, NelderMeadOptions,
                       ObjectiveSpec, OptimizationReport, eval_objective,
                       ite_circle_comparison, nelder_mead, optimize_shape,
                       sweep_fixed_alpha)
from .oracles import (DiskIteResult, DiskSpec, disk_ite_determinant,
                      disk_ite_eigenvalues, disk_neumann_eigenvalues,
                      two_disc_lambda2)

__version__ = "0.1.0"

__all__ = [
    "BeynConfig", "BoundaryMesh", "ClosedCurve", "Contour", "DiskIteResult",
    "DiskSpec", "EigenCluster", "EigenResult", "EquipotentialSpec",
    "KernelPoint", "MAXIMIZE_NEUMANN", "MINIMIZE_ABS_ITE",
    "NelderMeadOptions", "NepMatrixFunction", "ObjectiveSpec",
    "OptimizationReport", "TransmissionConfig", "WaveNumber",
    "adjoint_doublelayer_kernel", "assemble_neumann",
    "assemble_transmission", "beyn_solve", "circle_curve",
    "cluster_eigenvalues", "curve_from_nodes", "disk_ite_determinant",
    "disk_ite_eigenvalues", "disk_neumann_eigenvalues", "element_integral",
    "eval_objective", "evaluate_interior", "fundamental_solution",
    "hankel1_0", "hankel1_1", "ite_circle_comparison", "mesh_area",
    "mesh_from_circles", "mesh_from_spec", "nelder_mead", "neumann_operator",
    "optimize_shape", "outward_normal", "polygon_area", "sample_boundary",
    "solve_radius", "sweep_fixed_alpha", "transmission_operator",
    "two_disc_lambda2",
]
