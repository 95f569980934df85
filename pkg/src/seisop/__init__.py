"""seisop: composite simplified-physics + Fourier-neural-operator
pipeline for trajectory-level seismic response prediction.

Workflow: synthesize stochastic ground motions, simulate a nonlinear
shear building with smooth story hysteresis, generate coarse
intermediate trajectories from a simplified physics operator, train a
Fourier neural operator to correct them, refine with closed-form linear
regression, and compare trajectory error metrics against a plain
operator baseline.
"""

from .building import (
    BoucWenParams,
    ShearBuildingModel,
    build_modal_damping,
    paper_building,
    restoring_force,
)
from .checkpoint import Checkpoint, load_fno1, predict, predict_batch, save_fno1
from .config import ExperimentConfig
from .dataset import (
    PairedDataset,
    generate_dataset,
    generate_ground_motions,
    load_srd1,
    save_srd1,
    split,
)
from .excitation import WhiteNoiseSpec, paper_spec, synthesize, synthesize_batch
from .fno import FnoConfig, fno_backward, fno_forward, init_params, truncated_dft, \
    truncated_idft
from .grid import TimeGrid, Trajectory
from .integrators import BlowUpError, simulate_batch, simulate_nonlinear
from .linalg import solve_linear, solve_sym_generalized_eig
from .metrics import (
    MetricReport,
    assemble_report,
    ks_statistic,
    peak_distribution,
    relative_l2,
    rmse,
)
from .pipeline import evaluate_model, prepare_splits, train_model
from .refine import RefinementModel, fit_refinement, refine_predict
from .rng import RngStream, standard_normal
from .simplify import (
    ModalReducedModel,
    SimplifierKind,
    build_modal_reduced,
    els_response,
    modal_response,
    relaxed_response,
)
from .training import TrainingParams, adam_init, adam_step, relative_l2_loss, train_fno

__version__ = "0.1.0"
