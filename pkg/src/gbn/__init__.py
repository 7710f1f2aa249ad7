"""Linear Gaussian DAG models under mixed observational/intervention data.

Exact likelihood evaluation, closed-form maximum likelihood, Fisher
information with Cramér-Rao bounds, reproducible simulation and a Monte
Carlo validation harness.
"""

from . import errors
from ._kernels import active_backend, set_backend
from .fisher import (CenteredMoments, CramerRaoBound, FisherMatrix,
                     centered_moments, cramer_rao, design_score,
                     fisher_intervention, fisher_observational)
from .graph import DagStructure, build_dag, param_labels, parents
from .likelihood import (CenteredData, center, gradient, hessian, loglik,
                         profiled_loglik)
from .mle import (FitResult, ScatterMatrices, fit, max_loglik_full, profile_m,
                  scatter_matrices)
from .model import (GbnParams, InterventionTarget, JointGaussian,
                    MutilatedModel, joint_distribution, mutilate, path_matrix,
                    weight_matrix)
from .montecarlo import McReport, run_mc
from .sampler import Dataset, DesignSpec, sample

__version__ = "0.1.0"

__all__ = [
    "errors",
    "active_backend", "set_backend",
    "DagStructure", "build_dag", "parents", "param_labels",
    "GbnParams", "InterventionTarget", "JointGaussian", "MutilatedModel",
    "weight_matrix", "path_matrix", "joint_distribution", "mutilate",
    "Dataset", "DesignSpec", "sample",
    "CenteredData", "center", "loglik", "profiled_loglik", "gradient",
    "hessian",
    "ScatterMatrices", "FitResult", "scatter_matrices", "fit", "profile_m",
    "max_loglik_full",
    "CenteredMoments", "FisherMatrix", "CramerRaoBound", "centered_moments",
    "fisher_observational", "fisher_intervention", "cramer_rao",
    "design_score",
    "McReport", "run_mc",
]
